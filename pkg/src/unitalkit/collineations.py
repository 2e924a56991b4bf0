"""Projectivities of PGL(3, q^2), cyclic groups, orbits and the 2-point
stabiliser of a unital."""

import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from math import lcm

import numpy as np

from . import linalg
from .projective_plane import (
    CanonicalFrame,
    O,
    ProjPoint,
    Y_INF,
    incident,
    line_through,
    meet,
    plane_of,
)
from .unitals import Unital, tangent_line


def _normalize_matrix(F, rows):
    flat = [v for row in rows for v in row]
    lead = next((v for v in flat if v), 0)
    if not lead:
        raise ValueError("zero matrix")
    inv = F.inv(lead)
    return tuple(tuple(F.mul(inv, v) for v in row) for row in rows)


@dataclass(frozen=True, eq=False)
class Projectivity:
    """An element of PGL(3, q^2); the matrix is scaled so that its first
    nonzero entry (row-major) is 1."""

    F: object
    matrix: tuple

    def __post_init__(self):
        M = tuple(tuple(int(v) for v in row) for row in self.matrix)
        if len(M) != 3 or any(len(row) != 3 for row in M):
            raise ValueError("projectivities are 3x3")
        if linalg.det3(self.F, M) == 0:
            raise ValueError("singular matrix")
        object.__setattr__(self, "matrix", _normalize_matrix(self.F, M))

    def __eq__(self, other):
        return isinstance(other, Projectivity) and self.F is other.F and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return f"Projectivity({self.matrix})"

    def __matmul__(self, other):
        return Projectivity(self.F, linalg.matmul(self.F, self.matrix, other.matrix))

    def __call__(self, P):
        return apply(self, P)

    def inverse(self):
        return Projectivity(self.F, linalg.inverse3(self.F, self.matrix))

    def __pow__(self, k):
        result = identity(self.F)
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def is_identity(self):
        return self.matrix == ((1, 0, 0), (0, 1, 0), (0, 0, 1))

    def is_diagonal(self):
        M = self.matrix
        return all(M[i][j] == 0 for i in range(3) for j in range(3) if i != j)

    def diagonal_entries(self):
        """(lambda, mu) with the matrix proportional to diag(lambda, mu, 1)."""
        if not self.is_diagonal():
            raise ValueError("not a diagonal projectivity")
        F = self.F
        inv = F.inv(self.matrix[2][2])
        return F.mul(self.matrix[0][0], inv), F.mul(self.matrix[1][1], inv)

    def apply_indices(self, idx):
        """Images of the points with the given indices (vectorised)."""
        F = self.F
        plane = plane_of(F)
        C = plane.coords[np.asarray(idx, dtype=np.int64)]
        out = []
        for row in self.matrix:
            acc = np.zeros(len(C), dtype=np.int64)
            for k in range(3):
                if row[k]:
                    acc = F.vadd(acc, F.vmul(row[k], C[:, k]))
            out.append(acc)
        return plane.vnormalize_index(*out)

    def permutation(self):
        """The permutation of all point indices induced by this map."""
        return self.apply_indices(np.arange(plane_of(self.F).size))

    def serialize(self):
        return [list(row) for row in self.matrix]


def identity(F):
    return Projectivity(F, ((1, 0, 0), (0, 1, 0), (0, 0, 1)))


def diagonal(F, a, b, c=1):
    if 0 in (a, b, c):
        raise ValueError("diagonal entries must be nonzero")
    return Projectivity(F, ((a, 0, 0), (0, b, 0), (0, 0, c)))


def apply(g, P):
    F = g.F
    v = linalg.matvec(F, g.matrix, P)
    return ProjPoint(*_normalize_vec(F, v))


def _normalize_vec(F, v):
    lead = next(x for x in v if x)
    inv = F.inv(lead)
    return tuple(F.mul(inv, x) for x in v)


def random_projectivity(F, rng):
    while True:
        M = tuple(tuple(rng.randrange(F.q2) for _ in range(3)) for _ in range(3))
        if linalg.det3(F, M):
            return Projectivity(F, M)


def transform_unital(U, g):
    """The image g(U)."""
    return Unital.from_indices(U.F, g.apply_indices(U.indices), kind=f"image of {U.kind}")


@dataclass
class CyclicSubgroup:
    generator: Projectivity
    elements: list
    order: int

    def power(self, k):
        return self.elements[k % self.order]

    def subgroup(self, k):
        """The subgroup generated by generator^k."""
        return cyclic_group(self.power(k))


def cyclic_group(g, limit=None):
    """Enumerate <g> by powering until the identity reappears."""
    limit = limit or (g.F.q2 ** 3)
    elements = [identity(g.F)]
    h = g
    while not h.is_identity():
        elements.append(h)
        if len(elements) > limit:
            raise RuntimeError("generator order exceeds limit")
        h = h @ g
    return CyclicSubgroup(g, elements, len(elements))


def diagonal_generator(F, lam, mu):
    """The cyclic group generated by diag(lambda, mu, 1)."""
    return cyclic_group(diagonal(F, lam, mu))


@dataclass
class Orbit:
    id: int
    points: list
    length: int
    indices: np.ndarray = field(repr=False, default=None)


def orbits(G, domain):
    """Partition ``domain`` (a G-closed list of points) into G-orbits.

    Orbit ids follow the position of each orbit's first point in ``domain``.
    """
    plane = plane_of(G.generator.F)
    dom_idx = np.array([plane.index(P) for P in domain], dtype=np.int64)
    position = np.full(plane.size, -1, dtype=np.int64)
    position[dom_idx] = np.arange(len(dom_idx))
    img = position[G.generator.apply_indices(dom_idx)]
    if (img < 0).any():
        bad = domain[int(np.flatnonzero(img < 0)[0])]
        raise ValueError(f"domain is not closed under the group: {bad} escapes")
    seen = np.zeros(len(dom_idx), dtype=bool)
    out = []
    for start in range(len(dom_idx)):
        if seen[start]:
            continue
        cycle = []
        k = start
        while not seen[k]:
            seen[k] = True
            cycle.append(k)
            k = img[k]
        members = np.sort(dom_idx[cycle])
        out.append(Orbit(len(out), [plane.points[i] for i in members], len(members), members))
    return out


@dataclass
class StabilizerCertificate:
    order: int
    cyclic: bool
    lambda_: int
    mu: int
    frame: CanonicalFrame
    elements: list
    P: ProjPoint = None
    Q: ProjPoint = None
    elapsed: float = 0.0

    def full_order_conditions(self, F):
        """Full-order case: lambda primitive in GF(q^2), mu primitive in GF(q)."""
        if self.order != F.q2 - 1 or not self.cyclic:
            return False
        return F.is_primitive(self.lambda_) and F.in_subfield(self.mu) and F.is_primitive(self.mu, subfield=True)

    def to_dict(self):
        return {
            "P": str(self.P),
            "Q": str(self.Q),
            "order": self.order,
            "cyclic": self.cyclic,
            "lambda": self.lambda_,
            "mu": self.mu,
            "frame": self.frame.to_canonical.serialize(),
            "elapsed": round(self.elapsed, 6),
        }


def frame_map(F, P, Q, X, aux):
    """Projectivity sending P, Q, X, aux to (0,0,1), (0,1,0), (1,0,0), (1,1,1)."""
    cols = linalg.transpose((X, Q, P))
    a, b, c = linalg.matvec(F, linalg.inverse3(F, cols), aux)
    if 0 in (a, b, c):
        raise ValueError("frame points are not in general position")
    S = linalg.transpose(
        (tuple(F.mul(a, v) for v in X), tuple(F.mul(b, v) for v in Q), tuple(F.mul(c, v) for v in P))
    )
    return Projectivity(F, S).inverse()


def canonical_frame(U, P, Q):
    """Frame carrying (P, Q, tangent at P, tangent at Q) to (O, Y_inf, l_X, l_inf)."""
    F = U.F
    tP = tangent_line(U, P)
    tQ = tangent_line(U, Q)
    X = meet(F, tP, tQ)
    chord = line_through(F, P, Q)
    aux = next(
        R for R in U if not (incident(F, R, tP) or incident(F, R, tQ) or incident(F, R, chord))
    )
    return CanonicalFrame(to_canonical=frame_map(F, P, Q, X, aux))


def two_point_stabilizer(U, P, Q):
    """The subgroup of PGL(3, q^2) preserving U and fixing P and Q.

    In the canonical frame every such element fixes O, Y_inf and X_inf and is
    therefore diagonal; all (q^2-1)^2 candidates diag(a, b, 1) are tested at
    once.  Each element found is re-checked against U in the original frame.
    """
    start = time.perf_counter()
    F = U.F
    if P not in U or Q not in U:
        raise ValueError("both points must lie on the unital")
    if P == Q:
        raise ValueError("the two points must be distinct")
    plane = plane_of(F)
    frame = canonical_frame(U, P, Q)
    T = frame.to_canonical
    mapped = np.unique(T.apply_indices(U.indices))
    yinf = plane.index(Y_INF)
    assert plane.index(O) in mapped and yinf in mapped
    C = plane.coords[mapped]
    at_inf = C[:, 2] == 0
    if not np.array_equal(mapped[at_inf], [yinf]):
        raise RuntimeError("tangent at Q was not carried to the line at infinity")
    Caff = C[~at_inf]
    zinv = F.vinv(Caff[:, 2])
    xs = F.vmul(Caff[:, 0], zinv)
    ys = F.vmul(Caff[:, 1], zinv)
    member = np.zeros((F.q2, F.q2), dtype=bool)
    member[xs, ys] = True

    n = F.order
    shifts = np.arange(n)[:, None]
    X_img = np.where(xs == 0, 0, F.exp[(F.log[xs][None, :] + shifts) % n])
    Y_img = np.where(ys == 0, 0, F.exp[(F.log[ys][None, :] + shifts) % n])
    ok = member[X_img[:, None, :], Y_img[None, :, :]].all(axis=2)
    pairs = [(int(F.exp[i]), int(F.exp[j])) for i, j in zip(*np.nonzero(ok))]
    pairs.sort()

    Tinv = T.inverse()
    P_idx, Q_idx = plane.index(P), plane.index(Q)
    for a, b in pairs:
        g = Tinv @ diagonal(F, a, b) @ T
        img = g.apply_indices(U.indices)
        if not (U.mask[img].all() and g.apply_indices([P_idx, Q_idx]).tolist() == [P_idx, Q_idx]):
            raise AssertionError(f"diag({a}, {b}, 1) does not stabilise the unital")

    order = len(pairs)
    orders = [lcm(F.multiplicative_order(a), F.multiplicative_order(b)) for a, b in pairs]
    generators = [ab for ab, k in zip(pairs, orders) if k == order]
    cyclic = bool(generators)
    lam, mu = generators[0] if cyclic else (None, None)
    return StabilizerCertificate(
        order, cyclic, lam, mu, frame, pairs, P, Q, time.perf_counter() - start
    )


def point_pairs(U, max_pairs=None, seed=0):
    """Unordered point pairs of U, optionally a seeded sample of ``max_pairs``."""
    pairs = list(combinations(U.points, 2))
    if max_pairs is not None and len(pairs) > max_pairs:
        pairs = random.Random(seed).sample(pairs, max_pairs)
        pairs.sort()
    return pairs


def _pair_orders(args):
    U, chunk = args
    return [two_point_stabilizer(U, P, Q).order for P, Q in chunk]


def worker_count():
    try:
        return max(1, int(os.environ.get("UNITALKIT_WORKERS", "1")))
    except ValueError:
        return 1


def pair_stabilizer_orders(U, pairs, workers=None):
    """Stabiliser order for each pair, in the order given."""
    workers = workers or worker_count()
    pairs = list(pairs)
    if workers <= 1 or len(pairs) < 2 * workers:
        return [two_point_stabilizer(U, P, Q).order for P, Q in pairs]
    size = -(-len(pairs) // workers)
    chunks = [(U, pairs[i:i + size]) for i in range(0, len(pairs), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return [k for part in pool.map(_pair_orders, chunks) for k in part]

