# apps/npa
