# apps/ncpoly
