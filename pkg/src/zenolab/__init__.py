"""Zeno dynamics of finite-dimensional von Neumann algebras: products, limits and modular checks."""

__version__ = "0.1.0"
