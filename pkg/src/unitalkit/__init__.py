"""Computational checks for unitals of PG(2, q^2) with a cyclic 2-point
stabiliser of order q^2 - 1."""

__version__ = "0.1.0"

from .finite_field import FieldTower, make_tower
from .projective_plane import ProjLine, ProjPoint
from .unitals import HermitianForm, Unital, is_unital

__all__ = ["FieldTower", "make_tower", "ProjLine", "ProjPoint", "HermitianForm", "Unital", "is_unital"]
