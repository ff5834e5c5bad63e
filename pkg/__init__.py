"""
koszul-cy-toolkit: Calabi-Yau checks through Koszul duality.
Licensed under Apache 2.0.
"""

__version__ = "0.1.0"
__license__ = "Apache-2.0"
