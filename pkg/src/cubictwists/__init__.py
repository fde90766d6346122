"""Cubic twist families y^2 = x^3 + d n^2: orbit counts on pairs of binary
cubic forms, local densities, 2-Selmer statistics, root numbers and
3-Selmer growth."""

__version__ = "0.1.0"

__all__ = ["forms_core", "orbits", "localdata", "curves", "rootnum", "selstats", "cli"]
