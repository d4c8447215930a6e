"""Desk-scale computations for amplified sup-norm bounds on compact arithmetic surfaces."""

__version__ = "0.1.0"
