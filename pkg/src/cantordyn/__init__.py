"""Curve-pullback dynamics toolkit: transition matrices, interval models,
tree towers and folding plans, all in exact rational arithmetic."""

__version__ = "0.1.0"
