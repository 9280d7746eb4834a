"""Algebraic theories with configurable structural rules."""
