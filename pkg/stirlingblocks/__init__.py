"""
stirlingblocks - k-Stirling permutations, block patterns and their
generating functions, computed exactly.
"""

__version__ = "0.1.0"
