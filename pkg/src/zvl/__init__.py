"""Numerical laboratory for decay of Zakharov and Klein-Gordon-Zakharov solutions in one dimension."""

__version__ = "0.1.0"
