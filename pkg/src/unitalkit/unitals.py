"""Unitals of PG(2, q^2): verification, Hermitian curves and cones,
Buekenhout-Metz unitals, tangents and the classicality decision."""

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import linalg
from .projective_plane import ProjLine, ProjPoint, X_INF, Y_INF, line, plane_of


class NotAUnitalError(ValueError):
    """Raised when a point set fails the unital axioms."""

    def __init__(self, message, witness=None, count=None):
        super().__init__(message)
        self.witness = witness
        self.count = count


class Unital:
    """A point set of PG(2, q^2), intended to be a unital.

    The constructor does not verify the secant condition; use
    :func:`is_unital`.  Secant counts per line are computed once on demand.
    """

    def __init__(self, F, points, kind="custom"):
        self.F = F
        plane = plane_of(F)
        idx = np.unique(np.array([plane.index(_checked_point(F, P)) for P in points], dtype=np.int64))
        idx.setflags(write=False)
        self.indices = idx
        self.points = tuple(plane.points[i] for i in idx)
        self.kind = kind
        mask = np.zeros(plane.size, dtype=bool)
        mask[idx] = True
        mask.setflags(write=False)
        self.mask = mask
        self._secants = None

    @classmethod
    def from_indices(cls, F, indices, kind="custom"):
        plane = plane_of(F)
        return cls(F, [plane.points[i] for i in np.unique(indices)], kind=kind)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, P):
        return bool(self.mask[plane_of(self.F).index(P)])

    def __eq__(self, other):
        return isinstance(other, Unital) and self.F is other.F and np.array_equal(self.indices, other.indices)

    def __hash__(self):
        return hash((self.F.p, self.F.r, self.indices.tobytes()))

    def __repr__(self):
        return f"Unital(q={self.F.q}, {len(self)} points, kind={self.kind!r})"

    def secant_counts(self):
        if self._secants is None:
            counts = plane_of(self.F).incidence_counts(self.indices)
            counts.setflags(write=False)
            self._secants = counts
        return self._secants


def _checked_point(F, P):
    if len(P) != 3 or any(not 0 <= v < F.q2 for v in P):
        raise ValueError(f"{P} is not a point over GF({F.q2})")
    P = ProjPoint(*P)
    lead = next((v for v in P if v), 0)
    if lead != 1:
        raise ValueError(f"{P} is not normalised")
    return P


@dataclass
class UnitalCheck:
    ok: bool
    size: int
    expected_size: int
    spectrum: dict = field(default_factory=dict)
    witness: ProjLine = None
    count: int = None

    def __bool__(self):
        return self.ok


def is_unital(S, F=None):
    """Check |S| = q^3 + 1 and that every line meets S in 1 or q+1 points.

    ``S`` is a :class:`Unital` or an iterable of points (then ``F`` is
    required).  On failure the result carries a witness line and its count.
    """
    if isinstance(S, Unital):
        if F is not None and F is not S.F:
            raise ValueError("point set and tower disagree")
        U = S
    else:
        if F is None:
            raise ValueError("a tower is required for a bare point set")
        U = Unital(F, list(S))
    F = U.F
    q = F.q
    counts = U.secant_counts()
    values, freq = np.unique(counts, return_counts=True)
    spectrum = {int(v): int(c) for v, c in zip(values, freq)}
    expected = q ** 3 + 1
    bad = np.flatnonzero((counts != 1) & (counts != q + 1))
    witness = count = None
    if len(bad):
        # prefer the most violating line as witness
        worst = bad[np.argmax(np.abs(counts[bad] - 1))]
        witness = plane_of(F).lines[worst]
        count = int(counts[worst])
    ok = len(U) == expected and not len(bad)
    return UnitalCheck(ok, len(U), expected, spectrum, witness, count)


def tangent_line(U, P):
    """The unique 1-secant of U through its point P."""
    if P not in U:
        raise ValueError(f"{P} is not a point of the unital")
    plane = plane_of(U.F)
    through = plane.line_indices(P)  # lines l with l . P = 0 (self-dual indexing)
    ones = through[U.secant_counts()[through] == 1]
    if len(ones) != 1:
        raise RuntimeError(f"{len(ones)} one-secants through {P}; not a unital")
    return plane.lines[ones[0]]


class HermitianForm:
    """Conjugate-symmetric 3x3 Gram matrix G (G[i][j] = G[j][i]^q).

    The zero set is {x : sum_ij G[i][j] x_i^q x_j = 0}.
    """

    def __init__(self, F, gram):
        self.F = F
        self.gram = tuple(tuple(int(v) for v in row) for row in gram)
        for i in range(3):
            for j in range(3):
                if self.gram[i][j] != F.frobenius(self.gram[j][i]):
                    raise ValueError("Gram matrix is not conjugate-symmetric")
        self.rank = linalg.rank(F, self.gram)
        if self.rank == 0:
            raise ValueError("zero form")
        self._abs = None

    def __eq__(self, other):
        return isinstance(other, HermitianForm) and self.F is other.F and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)

    def __repr__(self):
        return f"HermitianForm(rank={self.rank}, gram={self.gram})"

    def value(self, P):
        F = self.F
        return F.sum(
            F.mul(self.gram[i][j], F.mul(F.frobenius(P[i]), P[j])) for i in range(3) for j in range(3)
        )

    def values(self, idx=None):
        F = self.F
        plane = plane_of(F)
        C = plane.coords if idx is None else plane.coords[idx]
        Cq = F.vfrobenius(C)
        out = np.zeros(len(C), dtype=np.int64)
        for i in range(3):
            for j in range(3):
                g = self.gram[i][j]
                if g:
                    out = F.vadd(out, F.vmul(g, F.vmul(Cq[:, i], C[:, j])))
        return out

    def absolute_indices(self):
        if self._abs is None:
            self._abs = np.flatnonzero(self.values() == 0)
            self._abs.setflags(write=False)
        return self._abs

    def absolute_points(self):
        plane = plane_of(self.F)
        return [plane.points[i] for i in self.absolute_indices()]

    def is_proportional(self, other):
        F = self.F
        flat_a = [v for row in self.gram for v in row]
        flat_b = [v for row in other.gram for v in row]
        k = next(i for i, v in enumerate(flat_a) if v)
        if not flat_b[k]:
            return False
        ratio = F.div(flat_b[k], flat_a[k])
        return all(F.mul(ratio, a) == b for a, b in zip(flat_a, flat_b))

    def polynomial(self):
        """The form as {(e1, e2, e3): coefficient} of degree q + 1."""
        F = self.F
        poly = {}
        for i in range(3):
            for j in range(3):
                g = self.gram[i][j]
                if not g:
                    continue
                e = [0, 0, 0]
                e[i] += F.q
                e[j] += 1
                e = tuple(e)
                poly[e] = F.add(poly.get(e, 0), g)
        return {e: c for e, c in poly.items() if c}

    def transformed(self, M):
        """The form in coordinates x = M x', i.e. Gram M^(q)T G M."""
        F = self.F
        Mq = linalg.frobenius_matrix(F, M)
        return HermitianForm(F, linalg.matmul(F, linalg.matmul(F, linalg.transpose(Mq), self.gram), M))

    def polar(self, P):
        """The line {x : B(P, x) = 0}; the tangent at an absolute point.

        Returns None when P is in the radical of a degenerate form.
        """
        F = self.F
        Pq = [F.frobenius(v) for v in P]
        coeffs = tuple(F.sum(F.mul(Pq[i], self.gram[i][j]) for i in range(3)) for j in range(3))
        return line(F, *coeffs) if any(coeffs) else None


def curve_form(F, b):
    """Gram matrix of -X1^(q+1) + b X3 X2^q + b^q X3^q X2."""
    if b == 0:
        raise ValueError("b must be nonzero")
    return HermitianForm(F, ((F.neg(1), 0, 0), (0, 0, b), (0, F.frobenius(b), 0)))


def cone_form(F, c):
    """Gram matrix of c^q X2^q X3 + c X2 X3^q (rank 2, radical X_inf)."""
    if c == 0:
        raise ValueError("c must be nonzero")
    return HermitianForm(F, ((0, 0, 0), (0, 0, F.frobenius(c)), (0, c, 0)))


def hermitian_curve(F, b=1):
    form = curve_form(F, b)
    return Unital(F, form.absolute_points(), kind=f"hermitian b={b}")


@dataclass
class HermitianCone:
    form: HermitianForm
    points: list
    lines: list


def hermitian_cone(F, c=1):
    """Absolute points of the cone form and its q+1 lines through X_inf."""
    form = cone_form(F, c)
    plane = plane_of(F)
    mask = np.zeros(plane.size, dtype=bool)
    mask[form.absolute_indices()] = True
    lines = []
    for ell in plane.line_indices(X_INF):  # lines through X_inf
        on = plane.line_indices(plane.lines[ell])
        if mask[on].all():
            lines.append(plane.lines[ell])
    if len(lines) != F.q + 1:
        raise RuntimeError(f"cone decomposed into {len(lines)} lines")
    return HermitianCone(form, form.absolute_points(), lines)


def random_hermitian_form(F, rng, rank=3):
    while True:
        diag = [rng.choice(F.subfield) for _ in range(3)]
        off = [rng.randrange(F.q2) for _ in range(3)]
        g = [[0] * 3 for _ in range(3)]
        for i in range(3):
            g[i][i] = diag[i]
        for (i, j), v in zip(((0, 1), (0, 2), (1, 2)), off):
            g[i][j] = v
            g[j][i] = F.frobenius(v)
        if linalg.rank(F, g) == rank:
            return HermitianForm(F, g)


def buekenhout_metz(F, alpha, beta):
    """{(x, alpha x^2 + beta x^(q+1) + r, 1) : x in GF(q^2), r in GF(q)} + {Y_inf}.

    Only odd q.  Raises NotAUnitalError unless
    (beta^q - beta)^2 + 4 alpha^(q+1) is a non-square of GF(q).
    """
    q = F.q
    if q % 2 == 0:
        raise ValueError("Buekenhout-Metz construction is implemented for odd q only")
    d = F.sub(F.frobenius(beta), beta)
    disc = F.add(F.mul(d, d), F.mul(F.element(4), F.norm(alpha)))
    if disc == 0 or F.is_square(disc):
        raise NotAUnitalError(f"discriminant {disc} is a square in GF({q}); not a unital")
    plane = plane_of(F)
    xs = np.arange(F.q2, dtype=np.int64)
    base = F.vadd(F.vmul(alpha, F.vmul(xs, xs)), F.vmul(beta, F.vpower(xs, q + 1)))
    X, Y = [], []
    for r in F.subfield:
        X.append(xs)
        Y.append(F.vadd(base, r))
    X = np.concatenate(X)
    Y = np.concatenate(Y)
    idx = plane.vnormalize_index(X, Y, np.ones_like(X))
    idx = np.append(idx, plane.index(Y_INF))
    return Unital.from_indices(F, idx, kind=f"bm alpha={alpha} beta={beta}")


def classicality_check(U):
    """Return a rank-3 Hermitian form whose absolute set is U, or None.

    Hermitian forms make up a 9-dimensional GF(q)-space; every point of U
    imposes one GF(q)-linear condition.  Each kernel vector (up to GF(q)
    scalars) is tested for rank 3 and exact absolute-set equality.
    """
    F = U.F
    if not is_unital(U):
        raise ValueError("input is not a unital")
    w = F.root  # not in GF(q)
    rows = []
    for P in U:
        Pq = [F.frobenius(v) for v in P]
        row = [F.mul(Pq[i], P[i]) for i in range(3)]
        for i, j in ((0, 1), (0, 2), (1, 2)):
            z = F.mul(Pq[i], P[j])
            row += [F.trace(z), F.trace(F.mul(w, z))]
        rows.append(row)
    basis = linalg.nullspace(F, rows, 9)
    k = len(basis)
    if F.q ** k > 10 ** 6:
        raise RuntimeError(f"kernel of dimension {k} is too large to enumerate")
    for coeffs in product(F.subfield, repeat=k):
        lead = next((c for c in coeffs if c), 0)
        if lead != 1:
            continue
        v = [F.sum(F.mul(c, b[t]) for c, b in zip(coeffs, basis)) for t in range(9)]
        gram = [[0] * 3 for _ in range(3)]
        for i in range(3):
            gram[i][i] = v[i]
        for n, (i, j) in enumerate(((0, 1), (0, 2), (1, 2))):
            h = F.add(v[3 + 2 * n], F.mul(v[4 + 2 * n], w))
            gram[i][j] = h
            gram[j][i] = F.frobenius(h)
        form = HermitianForm(F, gram)
        if form.rank == 3 and np.array_equal(form.absolute_indices(), U.indices):
            return form
    return None


def curve_intersection_congruence(U, H):
    """(N, N = 1 mod p) with N = |U meet absolute set of H|."""
    if H.F is not U.F:
        raise ValueError("unital and form live over different towers")
    N = int(U.mask[H.absolute_indices()].sum())
    return N, N % U.F.p == 1
