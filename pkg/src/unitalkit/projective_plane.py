"""Points and lines of PG(2, q^2) and the affine plane AG(2, q^2).

Points and lines are normalised triples of element codes (first nonzero
coordinate equal to 1).  Every point has an integer index equal to its
position in the lexicographic enumeration; lines use the same scheme on
their coefficient triples.  Bulk work is done on index arrays via
:class:`Plane`.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import linalg


class ProjPoint(NamedTuple):
    x: int
    y: int
    z: int

    def __str__(self):
        return f"{self.x}:{self.y}:{self.z}"

    @classmethod
    def parse(cls, text):
        parts = text.strip().split(":")
        if len(parts) != 3:
            raise ValueError(f"malformed point {text!r}")
        return cls(*(int(v) for v in parts))


class ProjLine(NamedTuple):
    a: int
    b: int
    c: int

    def __str__(self):
        return f"[{self.a}:{self.b}:{self.c}]"


O = ProjPoint(0, 0, 1)
Y_INF = ProjPoint(0, 1, 0)
X_INF = ProjPoint(1, 0, 0)
ELL_X = ProjLine(0, 1, 0)    # X2 = 0
ELL_Y = ProjLine(1, 0, 0)    # X1 = 0
ELL_INF = ProjLine(0, 0, 1)  # X3 = 0


def normalize(F, triple):
    for v in triple:
        if v:
            inv = F.inv(v)
            return tuple(F.mul(inv, w) for w in triple)
    raise ValueError("(0,0,0) is not a projective point")


def point(F, x, y, z):
    return ProjPoint(*normalize(F, (x, y, z)))


def line(F, a, b, c):
    return ProjLine(*normalize(F, (a, b, c)))


def incident(F, P, ell):
    return linalg.dot(F, P, ell) == 0


def line_through(F, P, Q):
    """The unique line joining two distinct points."""
    c = linalg.cross(F, P, Q)
    if not any(c):
        raise ValueError(f"line_through needs distinct points, got {P} twice")
    return ProjLine(*normalize(F, c))


def meet(F, l1, l2):
    c = linalg.cross(F, l1, l2)
    if not any(c):
        raise ValueError("meet needs distinct lines")
    return ProjPoint(*normalize(F, c))


def triple_index(s, t):
    x, y, z = t
    if x:
        return 1 + s + y * s + z
    if y:
        return 1 + z
    return 0


def vtriple_index(s, X, Y, Z):
    """Index of already-normalised coordinate arrays."""
    return np.where(X != 0, 1 + s + Y * s + Z, np.where(Y != 0, 1 + Z, 0))


class Plane:
    """Cached enumeration of PG(2, q^2) for one tower."""

    def __init__(self, F):
        self.F = F
        s = F.q2
        self.s = s
        self.size = s * s + s + 1
        coords = [(0, 0, 1)] + [(0, 1, z) for z in range(s)]
        coords += [(1, y, z) for y in range(s) for z in range(s)]
        self.coords = np.array(coords, dtype=np.int64)
        self.coords.setflags(write=False)
        self.points = [ProjPoint(*c) for c in coords]
        self.lines = [ProjLine(*c) for c in coords]
        self.affine_mask = self.coords[:, 2] != 0
        self._line_cache = {}

    def index(self, P):
        return triple_index(self.s, P)

    def vnormalize_index(self, X, Y, Z):
        """Indices of the points with (unnormalised) coordinate arrays X, Y, Z."""
        F = self.F
        X, Y, Z = (np.asarray(a, dtype=np.int64) for a in (X, Y, Z))
        lead = np.where(X != 0, X, np.where(Y != 0, Y, Z))
        if (lead == 0).any():
            raise ValueError("zero vector has no projective point")
        inv = F.vinv(lead)
        return vtriple_index(self.s, F.vmul(X, inv), F.vmul(Y, inv), F.vmul(Z, inv))

    def evaluate_line(self, ell, idx=None):
        F = self.F
        C = self.coords if idx is None else self.coords[idx]
        return F.vadd(F.vadd(F.vmul(ell[0], C[:, 0]), F.vmul(ell[1], C[:, 1])), F.vmul(ell[2], C[:, 2]))

    def line_indices(self, ell):
        ell = tuple(ell)
        hit = self._line_cache.get(ell)
        if hit is None:
            hit = np.flatnonzero(self.evaluate_line(ell) == 0)
            hit.setflags(write=False)
            self._line_cache[ell] = hit
        return hit

    def incidence_counts(self, idx):
        """For every line, the number of points of ``idx`` on it."""
        F = self.F
        P = self.coords[np.asarray(idx, dtype=np.int64)]
        L = self.coords
        vals = F.vadd(
            F.vadd(F.vmul(L[:, 0:1], P[None, :, 0]), F.vmul(L[:, 1:2], P[None, :, 1])),
            F.vmul(L[:, 2:3], P[None, :, 2]),
        )
        return (vals == 0).sum(axis=1)


@lru_cache(maxsize=None)
def plane_of(F):
    return Plane(F)


def all_points(F):
    return list(plane_of(F).points)


def all_lines(F):
    return list(plane_of(F).lines)


def points_on_line(F, ell):
    plane = plane_of(F)
    return [plane.points[i] for i in plane.line_indices(ell)]


def affine_points(F):
    """Points off the line X3 = 0, in enumeration order."""
    plane = plane_of(F)
    return [plane.points[i] for i in np.flatnonzero(plane.affine_mask)]


def affine_coords(F, P):
    """(x, y) with P = (x, y, 1)."""
    if P.z == 0:
        raise ValueError(f"{P} lies on the line at infinity")
    inv = F.inv(P.z)
    return F.mul(P.x, inv), F.mul(P.y, inv)


@dataclass(frozen=True)
class CanonicalFrame:
    """O, Y_inf, X_inf with the lines l_X (X2=0), l_Y (X1=0), l_inf (X3=0).

    ``to_canonical`` maps the original configuration onto this one.
    """

    to_canonical: object = None
    O: ProjPoint = O
    Y_inf: ProjPoint = Y_INF
    X_inf: ProjPoint = X_INF
    ell_X: ProjLine = ELL_X
    ell_Y: ProjLine = ELL_Y
    ell_inf: ProjLine = ELL_INF
