"""Generalized ladder algebras interpolating between fermions (n=2) and bosons (n -> inf).

Submodules
----------
algebra
    Matrix representations and numeric identity checks.
opcalc
    Expression parser and exact normal ordering.
statistics
    Occupancy functions for capped occupation and the ensemble solver.
"""

__version__ = "0.1.0"
