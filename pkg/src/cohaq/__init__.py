"""Exact computer algebra for cohomological Hall algebras of quivers."""

__version__ = "0.1.0"
