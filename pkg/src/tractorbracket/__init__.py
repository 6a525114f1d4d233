"""Parabolic gradings and the pre-Courant bracket on the adjoint tractor bundle, in exact arithmetic."""

__version__ = "0.1.0"
