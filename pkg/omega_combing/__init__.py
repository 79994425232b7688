"""Combing paths, asynchronous width and Dehn lower bounds for PSL2(Z[1/p])."""

__version__ = "1.0.0"
