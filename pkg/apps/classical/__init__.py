# apps/classical
