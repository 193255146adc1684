"""Twisted conjugacy in generalised Heisenberg groups: exact lattice algebra,
decision and canonical forms, class counting in word-metric balls, and the
number-theoretic sums that govern their growth."""

__version__ = "0.1.0"
