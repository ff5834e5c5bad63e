"""Simplicial complexes, pi1, local systems and Poincare duality."""
