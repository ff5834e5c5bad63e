"""Lie algebras and Chevalley-Eilenberg chains."""
