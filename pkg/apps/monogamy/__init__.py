# apps/monogamy
