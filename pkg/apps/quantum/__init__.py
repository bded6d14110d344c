# apps/quantum
