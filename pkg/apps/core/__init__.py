# apps/core
