"""Wentzell - Galerkin solver for the heat equation with set-valued boundary dynamics."""

__version__ = "0.1.0"
