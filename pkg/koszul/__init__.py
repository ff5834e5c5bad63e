"""Dg (co)algebras, twisting cochains, bar/cobar and mixed complexes."""
