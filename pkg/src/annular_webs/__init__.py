"""Annular SL(2) arc algebras and annular SL(3) web combinatorics."""

__version__ = "0.1.0"
