"""Symbolic ramification calculus on dual graphs of models of curves."""

__version__ = "0.1.0"
