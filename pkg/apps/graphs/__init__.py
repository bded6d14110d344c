# apps/graphs
