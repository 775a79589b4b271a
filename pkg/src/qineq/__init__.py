"""Quaternionic operator inequalities: spectra, functional calculus, verification."""

__version__ = "1.0.0"
