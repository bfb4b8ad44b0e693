"""Exact evaluation of groupoid-graded Frobenius structures and surface expressions."""

__version__ = "0.1.0"
