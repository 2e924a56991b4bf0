"""Truncated power series over GF(q^2), the Hermitian branch at O and local
intersection multiplicities of Hermitian curves and cones."""

from dataclasses import dataclass
from functools import lru_cache

from . import linalg
from .projective_plane import ELL_X, O, ProjLine, ProjPoint, line_through, incident, plane_of
from .unitals import HermitianForm


class PrecisionError(ValueError):
    pass


class CommonComponentError(ValueError):
    pass


class BezoutViolation(AssertionError):
    pass


class TruncatedSeries:
    """sum_{i < precision} coeffs[i] t^i, with everything from t^precision unknown."""

    __slots__ = ("F", "coeffs", "precision")

    def __init__(self, F, coeffs, precision=None):
        coeffs = list(coeffs)
        if precision is None:
            precision = len(coeffs)
        if precision <= 0:
            raise PrecisionError("series has no known coefficients")
        coeffs = coeffs[:precision] + [0] * (precision - len(coeffs))
        self.F = F
        self.coeffs = tuple(coeffs)
        self.precision = precision

    @classmethod
    def monomial(cls, F, exponent, precision, coeff=1):
        c = [0] * precision
        if exponent < precision:
            c[exponent] = coeff
        return cls(F, c, precision)

    @classmethod
    def constant(cls, F, value, precision):
        return cls.monomial(F, 0, precision, value)

    def _check(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        if other.F is not self.F:
            raise ValueError("series over different towers")
        return min(self.precision, other.precision)

    def __add__(self, other):
        N = self._check(other)
        if N is NotImplemented:
            return N
        add = self.F.add
        return TruncatedSeries(self.F, [add(a, b) for a, b in zip(self.coeffs[:N], other.coeffs[:N])], N)

    def __neg__(self):
        return TruncatedSeries(self.F, [self.F.neg(a) for a in self.coeffs], self.precision)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return TruncatedSeries(self.F, [self.F.mul(c, a) for a in self.coeffs], self.precision)

    def __mul__(self, other):
        N = self._check(other)
        if N is NotImplemented:
            return N
        F = self.F
        out = [0] * N
        a, b = self.coeffs, other.coeffs
        for i in range(N):
            if a[i]:
                for j in range(N - i):
                    if b[j]:
                        out[i + j] = F.add(out[i + j], F.mul(a[i], b[j]))
        return TruncatedSeries(F, out, N)

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative powers are not supported")
        result = TruncatedSeries.constant(self.F, 1, self.precision)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def power_q(self):
        """s^q = sum a_i^q t^(iq); exact, so the precision grows by a factor q."""
        F = self.F
        q = F.q
        out = [0] * (self.precision * q)
        for i, a in enumerate(self.coeffs):
            out[i * q] = F.frobenius(a)
        return TruncatedSeries(F, out, self.precision * q)

    def truncate(self, N):
        if N > self.precision:
            raise PrecisionError(f"cannot raise precision {self.precision} to {N}")
        return TruncatedSeries(self.F, self.coeffs[:N], N)

    def compose(self, inner):
        """self(inner(t)); inner must have zero constant term."""
        if inner.coeffs[0] != 0:
            raise ValueError("inner series must have zero constant term")
        N = min(self.precision, inner.precision)
        result = TruncatedSeries.constant(self.F, 0, N)
        for a in reversed(self.coeffs[:N]):
            result = result * inner + TruncatedSeries.constant(self.F, a, N)
        return result

    def order(self):
        """Least exponent with a nonzero coefficient, or None if none is known."""
        return next((i for i, a in enumerate(self.coeffs) if a), None)

    def is_zero(self):
        return not any(self.coeffs)

    def terms(self):
        return [(i, a) for i, a in enumerate(self.coeffs) if a]

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedSeries)
            and self.F is other.F
            and self.precision == other.precision
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.coeffs, self.precision))

    def __str__(self):
        body = " ".join(f"{i}:{a}" for i, a in self.terms())
        return f"{body or '0'} + O(t^{self.precision})"

    __repr__ = __str__


@dataclass
class BranchExpansion:
    """x = t, y = y(t), X3 = 1: the branch of H_b through O, tangent to l_X."""

    x: TruncatedSeries
    y: TruncatedSeries
    b: int
    base: ProjPoint = O
    tangent: ProjLine = ELL_X

    @property
    def precision(self):
        return self.y.precision

    def residual(self):
        """b y^q + b^q y - t^(q+1), which must vanish to full precision."""
        F = self.y.F
        N = self.precision
        lhs = self.y.power_q().truncate(N).scale(self.b) + self.y.scale(F.frobenius(self.b))
        return lhs - TruncatedSeries.monomial(F, F.q + 1, N)


def default_precision(F):
    return (F.q + 1) ** 2 + 1


def hermitian_branch(F, precision=None, b=1):
    """Solve b y^q + b^q y = t^(q+1) with y(0) = 0 by the contraction
    y <- b^(-q) (t^(q+1) - b y^q), which gains a factor q in t-adic order."""
    q = F.q
    N = default_precision(F) if precision is None else precision
    if N < q + 2:
        raise PrecisionError(f"precision {N} < q + 2")
    if b == 0:
        raise ValueError("b must be nonzero")
    c = F.inv(F.frobenius(b))
    rhs = TruncatedSeries.monomial(F, q + 1, N)
    y = rhs.scale(c)
    while True:
        nxt = (rhs - y.power_q().truncate(N).scale(b)).scale(c)
        if nxt == y:
            break
        y = nxt
    x = TruncatedSeries.monomial(F, 1, N)
    return BranchExpansion(x, y, b)


@lru_cache(maxsize=None)
def _canonical_branch(F):
    return hermitian_branch(F, default_precision(F), 1)


def _as_polynomial(F, poly):
    if isinstance(poly, HermitianForm):
        return poly.polynomial()
    if isinstance(poly, ProjLine):
        out = {}
        for k, c in enumerate(poly):
            if c:
                e = [0, 0, 0]
                e[k] = 1
                out[tuple(e)] = c
        return out
    return dict(poly)


def multiplicity_at_origin(poly, branch):
    """ord_t poly(t, y(t), 1) along the branch centred at O = (0,0,1)."""
    F = branch.y.F
    poly = _as_polynomial(F, poly)
    if branch.precision < default_precision(F):
        raise PrecisionError(f"branch precision must be at least {default_precision(F)}")
    if any(c for (e1, e2, _), c in poly.items() if e1 == 0 and e2 == 0):
        raise ValueError("the branch centre O does not lie on the curve")
    N = branch.precision
    ypow = {0: TruncatedSeries.constant(F, 1, N)}
    total = TruncatedSeries.constant(F, 0, N)
    for (e1, e2, _), c in sorted(poly.items()):
        if not c:
            continue
        if e2 not in ypow:
            ypow[e2] = branch.y ** e2
        term = ypow[e2] * TruncatedSeries.monomial(F, e1, N, c)
        total = total + term
    k = total.order()
    if k is None:
        raise CommonComponentError("series vanishes to full precision: common component")
    return k


def canonicalizing_matrix(H, P):
    """M with M (0,0,1) = P and Gram(H in coordinates x = M x') equal to
    that of -X1^(q+1) + X2^q X3 + X2 X3^q."""
    F = H.F
    if H.rank != 3:
        raise ValueError("the first curve must be non-degenerate")
    if H.value(P) != 0:
        raise ValueError(f"{P} is not on the curve")
    G = H.gram

    def B(u, v):
        return linalg.dot(F, [F.frobenius(a) for a in u], linalg.matvec(F, G, v))

    v3 = tuple(P)
    plane = plane_of(F)
    Q = next(plane.points[i] for i in H.absolute_indices() if B(plane.points[i], v3))
    a = F.frobenius(F.inv(B(Q, v3)))
    v2 = tuple(F.mul(a, v) for v in Q)
    w = linalg.cross(F, linalg.matvec(F, G, v2), linalg.matvec(F, G, v3))
    v1 = tuple(F.frobenius(v) for v in w)
    target = F.div(F.neg(1), B(v1, v1))
    s = next(s for s in range(1, F.q2) if F.norm(s) == target)
    v1 = tuple(F.mul(s, v) for v in v1)
    M = linalg.transpose((v1, v2, v3))
    canon = ((F.neg(1), 0, 0), (0, 0, 1), (0, 1, 0))
    if H.transformed(M).gram != canon:
        raise AssertionError("canonicalisation failed")
    return M


def multiplicity_at(H1, other, P):
    """I(P, H1 . other) for a non-degenerate H1 and a form or line ``other``."""
    F = H1.F
    if isinstance(other, HermitianForm):
        if other.value(P) != 0:
            raise ValueError(f"{P} is not on the second curve")
    elif not incident(F, P, other):
        raise ValueError(f"{P} is not on the line")
    M = canonicalizing_matrix(H1, P)
    if isinstance(other, HermitianForm):
        moved = other.transformed(M)
    else:
        moved = ProjLine(*(linalg.dot(F, other, col) for col in linalg.transpose(M)))
    return multiplicity_at_origin(moved, _canonical_branch(F))


@dataclass
class MultiplicityReport:
    points: list
    total: int
    budget: int
    N: int
    m: int
    tangent_family: bool

    def to_dict(self):
        return {
            "points": [{"coords": str(P), "multiplicity": k} for P, k in self.points],
            "total": self.total,
            "budget": self.budget,
            "N": self.N,
            "m": self.m,
        }


def bezout_reconcile(H1, H2):
    """Multiplicities at every rational common point, checked against (q+1)^2.

    When the common points are q+1 collinear points (two curves tangent at
    each of them) the total must reach the budget exactly.
    """
    F = H1.F
    q = F.q
    if H1.is_proportional(H2):
        raise CommonComponentError("the two forms define the same curve")
    plane = plane_of(F)
    a = set(H1.absolute_indices().tolist())
    common = [plane.points[i] for i in sorted(a.intersection(H2.absolute_indices().tolist()))]
    points = [(P, multiplicity_at(H1, H2, P)) for P in common]
    total = sum(k for _, k in points)
    budget = (q + 1) ** 2
    if total > budget:
        raise BezoutViolation(f"total multiplicity {total} exceeds {budget}")
    family = False
    if len(common) == q + 1:
        ell = line_through(F, common[0], common[1])
        family = all(incident(F, P, ell) for P in common)
        if family and total != budget:
            raise BezoutViolation(f"tangent family total {total} != {budget}")
    m = sum(1 for P in common if P not in (O, ProjPoint(0, 1, 0)))
    return MultiplicityReport(points, total, budget, len(common), m, family)
