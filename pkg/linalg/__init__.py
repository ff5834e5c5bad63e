"""Exact sparse linear algebra over sympy domains."""
