"""The orbit plane of order q built from G = <diag(lambda, lambda^(q+1), 1)>.

Points are the non-trivial G-orbits on AG(2, q^2).  Lines are the axis
X1 = 0, the Hermitian curves H_b (b != 0) and the cones C_c (c over coset
representatives of GF(q)^* in GF(q^2)^*).  Incidence is containment.
"""

from dataclasses import dataclass, field

import numpy as np

from .collineations import cyclic_group, diagonal, orbits
from .projective_plane import ELL_Y, O, Y_INF, affine_points, plane_of
from .unitals import cone_form, curve_form


class WeightRuleConflict(ValueError):
    """The orbit-count weighting did not produce the expected total."""

    def __init__(self, message, result):
        super().__init__(message)
        self.result = result


def coset_representatives(F):
    """Smallest code in each coset of GF(q)^* inside GF(q^2)^*."""
    units = [a for a in F.subfield if a]
    covered = set()
    reps = []
    for c in range(1, F.q2):
        if c in covered:
            continue
        reps.append(c)
        covered.update(F.mul(c, s) for s in units)
    return reps


@dataclass
class QuotientPlane:
    F: object
    lam: int
    group: object
    orbits: list
    points: list
    fixed_points: list
    lines: list
    line_sets: list = field(repr=False)
    incidence: np.ndarray = field(repr=False)
    point_of: np.ndarray = field(repr=False)

    @property
    def order(self):
        return self.F.q

    def line_id(self, tag, param=None):
        return self.lines.index((tag, param))

    def point_id(self, P):
        return int(self.point_of[plane_of(self.F).index(P)])

    def points_on(self, line_id):
        return [int(i) for i in np.flatnonzero(self.incidence[:, line_id])]

    def lines_through(self, point_id):
        return [int(j) for j in np.flatnonzero(self.incidence[point_id])]

    def line_with_points(self, ids):
        """Id of the line whose point set is exactly ``ids``, else None."""
        target = np.zeros(len(self.points), dtype=bool)
        target[list(ids)] = True
        hit = np.flatnonzero((self.incidence == target[:, None]).all(axis=0))
        return int(hit[0]) if len(hit) else None

    def census(self):
        lengths = [orb.length for orb in self.points]
        q = self.F.q
        return {
            "points": len(self.points),
            "lines": len(self.lines),
            "long_orbits": lengths.count(q * q - 1),
            "short_orbits": lengths.count(q - 1),
            "fixed_affine_points": len(self.fixed_points),
        }

    def to_dict(self):
        rows = []
        for row in self.incidence:
            bits = "".join("1" if b else "0" for b in row)
            rows.append(format(int(bits, 2), "x").zfill((len(bits) + 3) // 4))
        return {
            "tower": self.F.header(),
            "lambda": self.lam,
            "points": {str(i): [str(P) for P in orb.points] for i, orb in enumerate(self.points)},
            "lines": [[tag, param] for tag, param in self.lines],
            "incidence": rows,
        }


def build_quotient_plane(F, lam):
    if lam == 0 or not F.is_primitive(lam):
        raise ValueError(f"lambda={lam} is not a primitive element of GF({F.q2})")
    q = F.q
    plane = plane_of(F)
    G = cyclic_group(diagonal(F, lam, F.power(lam, q + 1)))
    orbs = orbits(G, affine_points(F))
    nontrivial = [orb for orb in orbs if orb.length > 1]
    fixed = [orb.points[0] for orb in orbs if orb.length == 1]
    point_of = np.full(plane.size, -1, dtype=np.int64)
    for pid, orb in enumerate(nontrivial):
        point_of[orb.indices] = pid

    affine = plane.affine_mask
    lines = [("ell_Y", None)]
    sets = [plane.line_indices(ELL_Y)]
    for b in range(1, F.q2):
        lines.append(("H", b))
        sets.append(curve_form(F, b).absolute_indices())
    for c in coset_representatives(F):
        lines.append(("C", c))
        sets.append(cone_form(F, c).absolute_indices())
    sets = [s[affine[s]] for s in sets]

    lengths = np.array([orb.length for orb in nontrivial])
    incidence = np.zeros((len(nontrivial), len(lines)), dtype=bool)
    for j, s in enumerate(sets):
        ids = point_of[s]
        counts = np.bincount(ids[ids >= 0], minlength=len(nontrivial))
        partial = np.flatnonzero((counts != 0) & (counts != lengths))
        if len(partial):
            raise RuntimeError(f"line {lines[j]} cuts orbit {partial[0]} partially")
        incidence[:, j] = counts == lengths
    return QuotientPlane(F, lam, G, orbs, nontrivial, fixed, lines, sets, incidence, point_of)


@dataclass
class AxiomResult:
    ok: bool
    witness: object = None


@dataclass
class PlaneCertificate:
    axioms: dict

    @property
    def ok(self):
        return all(r.ok for r in self.axioms.values())

    def __bool__(self):
        return self.ok

    def to_dict(self):
        return {name: {"ok": r.ok, "witness": r.witness} for name, r in self.axioms.items()}


def _off_diagonal_witness(M):
    bad = np.argwhere((M != 1) & ~np.eye(len(M), dtype=bool))
    if len(bad):
        i, j = (int(v) for v in bad[0])
        return AxiomResult(False, {"pair": [i, j], "common": int(M[i, j])})
    return AxiomResult(True)


def verify_projective_plane(pi):
    """Check the projective plane axioms for order q on the incidence matrix."""
    I = pi.incidence.astype(np.int64)
    q = pi.order
    n = q * q + q + 1
    axioms = {}
    axioms["counts"] = AxiomResult(
        I.shape == (n, n), None if I.shape == (n, n) else {"points": I.shape[0], "lines": I.shape[1]}
    )
    line_sizes = I.sum(axis=0)
    bad = np.flatnonzero(line_sizes != q + 1)
    axioms["line_size"] = AxiomResult(
        not len(bad), {"line": int(bad[0]), "points": int(line_sizes[bad[0]])} if len(bad) else None
    )
    degrees = I.sum(axis=1)
    bad = np.flatnonzero(degrees != q + 1)
    axioms["point_degree"] = AxiomResult(
        not len(bad), {"point": int(bad[0]), "lines": int(degrees[bad[0]])} if len(bad) else None
    )
    axioms["two_points_one_line"] = _off_diagonal_witness(I @ I.T)
    axioms["two_lines_one_point"] = _off_diagonal_witness(I.T @ I)
    return PlaneCertificate(axioms)


def _representable(U, pi):
    plane = plane_of(pi.F)
    skip = {plane.index(O), plane.index(Y_INF)}
    rest = np.array([i for i in U.indices if i not in skip], dtype=np.int64)
    if len(rest) and not plane.affine_mask[rest].all():
        raise ValueError("the set has points at infinity other than Y_inf")
    return rest


def unital_trace(U, pi):
    """Ids of the orbit points making up U minus {O, Y_inf}."""
    rest = _representable(U, pi)
    ids = pi.point_of[rest]
    if (ids < 0).any():
        raise ValueError("the set contains a fixed affine point other than O")
    counts = np.bincount(ids, minlength=len(pi.points))
    lengths = np.array([orb.length for orb in pi.points])
    partial = np.flatnonzero((counts != 0) & (counts != lengths))
    if len(partial):
        raise ValueError(f"the set is not a union of orbits (orbit {partial[0]} is cut)")
    return sorted(int(i) for i in np.flatnonzero(counts))


@dataclass
class WeightedPointSet:
    weights: dict
    support: dict
    total: int
    line_weights: list
    double_blocking: bool


def blocking_multiset(U, pi, g):
    """Weighted trace of a <g>-invariant set, g = diag(lambda, -lambda^(q+1), 1).

    n_P counts the <g>-orbits inside U minus {O, Y_inf} that meet the orbit
    point P.  The weight is 2 when n_P = 1 and 1 when n_P = 2.  A total other
    than 2q + 2 raises :class:`WeightRuleConflict`.
    """
    F = pi.F
    q = F.q
    if q % 2 == 0:
        raise ValueError("the weighted trace needs odd q")
    if not g.is_diagonal():
        raise ValueError("g must be diagonal")
    lam, mu = g.diagonal_entries()
    if not F.is_primitive(lam) or mu != F.neg(F.power(lam, q + 1)):
        raise ValueError("g must be diag(lambda, -lambda^(q+1), 1) with lambda primitive")
    if not U.mask[g.apply_indices(U.indices)].all():
        raise ValueError("the set is not invariant under g")
    rest = _representable(U, pi)
    plane = plane_of(F)
    g_orbits = orbits(cyclic_group(g), [plane.points[i] for i in rest])
    support = {}
    for orb in g_orbits:
        ids = set(int(i) for i in pi.point_of[orb.indices])
        if -1 in ids:
            raise ValueError("the set contains a fixed affine point other than O")
        for pid in ids:
            support[pid] = support.get(pid, 0) + 1
    rule = {1: 2, 2: 1}
    weights = {}
    for pid, n in sorted(support.items()):
        if n not in rule:
            raise WeightRuleConflict(f"orbit point {pid} meets {n} g-orbits", None)
        weights[pid] = rule[n]
    w = np.zeros(len(pi.points), dtype=np.int64)
    for pid, v in weights.items():
        w[pid] = v
    line_weights = [int(v) for v in w @ pi.incidence.astype(np.int64)]
    result = WeightedPointSet(
        weights, dict(sorted(support.items())), int(w.sum()), line_weights, min(line_weights) >= 2
    )
    if result.total != 2 * q + 2:
        raise WeightRuleConflict(f"total weight {result.total} != 2q+2 = {2 * q + 2}", result)
    return result


@dataclass
class InducedCollineation:
    points: np.ndarray
    lines: np.ndarray

    def preserves_incidence(self, pi):
        # P on L  <=>  g(P) on g(L)
        I = pi.incidence
        return bool(np.array_equal(I[self.points][:, self.lines], I))

    def is_identity(self):
        return bool((self.points == np.arange(len(self.points))).all() and (self.lines == np.arange(len(self.lines))).all())


def induced_collineation(g, pi):
    """Permutations of orbit points and lines induced by a projectivity g
    normalising the group of ``pi``."""
    plane = plane_of(pi.F)
    pts = np.zeros(len(pi.points), dtype=np.int64)
    for pid, orb in enumerate(pi.points):
        img = g.apply_indices(orb.indices)
        ids = np.unique(pi.point_of[img])
        if len(ids) != 1 or ids[0] < 0 or pi.points[ids[0]].length != orb.length:
            raise ValueError(f"g does not permute the orbits (orbit {pid})")
        pts[pid] = ids[0]
    lookup = {np.sort(s).tobytes(): j for j, s in enumerate(pi.line_sets)}
    lns = np.zeros(len(pi.lines), dtype=np.int64)
    for j, s in enumerate(pi.line_sets):
        img = g.apply_indices(s)
        if not plane.affine_mask[img].all():
            raise ValueError("g does not preserve the affine plane")
        key = np.sort(img).tobytes()
        if key not in lookup:
            raise ValueError(f"g maps line {pi.lines[j]} outside the line set")
        lns[j] = lookup[key]
    return InducedCollineation(pts, lns)
