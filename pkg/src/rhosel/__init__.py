"""Penalized rho-type model selection for exponential-family regression."""

__version__ = "0.1.0"
