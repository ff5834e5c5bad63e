"""Chain complexes, chain maps and windowed homology."""
