# apps/games
