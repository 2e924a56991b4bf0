import random
from collections import Counter
from itertools import product

import numpy as np
import pytest

from oracles import naive_apply
from unitalkit import linalg
from unitalkit.collineations import (
    Projectivity,
    apply,
    cyclic_group,
    diagonal,
    diagonal_generator,
    identity,
    orbits,
    pair_stabilizer_orders,
    point_pairs,
    random_projectivity,
    transform_unital,
    two_point_stabilizer,
)
from unitalkit.finite_field import make_tower
from unitalkit.projective_plane import O, X_INF, Y_INF, affine_points, all_points, plane_of
from unitalkit.unitals import buekenhout_metz, hermitian_curve, is_unital


def test_identity_and_diagonal_fix_triangle(F3):
    g = diagonal(F3, 3, 2)
    for P in (O, X_INF, Y_INF):
        assert apply(g, P) == P
        assert apply(identity(F3), P) == P
    assert g.is_diagonal() and g.diagonal_entries() == (3, 2)
    with pytest.raises(ValueError):
        diagonal(F3, 0, 1)


def test_singular_matrix_rejected(F3):
    with pytest.raises(ValueError):
        Projectivity(F3, ((1, 1, 0), (1, 1, 0), (0, 0, 1)))


def test_scalar_multiples_are_equal(F3):
    g = random_projectivity(F3, random.Random(0))
    scaled = Projectivity(F3, tuple(tuple(F3.mul(5, v) for v in row) for row in g.matrix))
    assert scaled == g and hash(scaled) == hash(g)


def test_apply_matches_naive_and_is_associative(F4):
    rng = random.Random(2)
    pts = all_points(F4)
    plane = plane_of(F4)
    for _ in range(1000):
        g, h = random_projectivity(F4, rng), random_projectivity(F4, rng)
        P = rng.choice(pts)
        assert apply(g, P) == naive_apply(F4, g.matrix, P)
        assert apply(g @ h, P) == apply(g, apply(h, P))
    g = random_projectivity(F4, rng)
    idx = np.arange(plane.size)
    assert g.apply_indices(idx).tolist() == [plane.index(apply(g, P)) for P in pts]
    assert (g @ g.inverse()).is_identity()


def test_powers(F3):
    g = random_projectivity(F3, random.Random(3))
    assert (g ** 0).is_identity()
    assert g ** 3 == g @ g @ g
    assert g ** -1 == g.inverse()


def _power_order(F, a, b):
    # independent oracle: repeated multiplication of the diagonal entries
    x, y, k = a, b, 1
    while (x, y) != (1, 1):
        x, y, k = F.mul(x, a), F.mul(y, b), k + 1
    return k


def test_diagonal_generator_orders(F3):
    lam = F3.root
    assert diagonal_generator(F3, 1, 1).order == 1
    assert diagonal_generator(F3, lam, F3.power(lam, 4)).order == 8
    mu = F3.neg(F3.power(lam, 4))
    assert diagonal_generator(F3, lam, mu).order == _power_order(F3, lam, mu) == 8
    for a, b in product(range(1, 9), repeat=2):
        assert diagonal_generator(F3, a, b).order == _power_order(F3, a, b)


@pytest.mark.parametrize("p,r", [(3, 1), (2, 2), (5, 1)])
def test_orbit_census_of_g(p, r):
    F = make_tower(p, r)
    q = F.q
    lam = F.root
    G = diagonal_generator(F, lam, F.power(lam, q + 1))
    orbs = orbits(G, affine_points(F))
    lengths = Counter(o.length for o in orbs)
    assert lengths == {q * q - 1: q * q, q - 1: q + 1, 1: 1}
    seen = np.concatenate([o.indices for o in orbs])
    assert sorted(seen.tolist()) == sorted(plane_of(F).index(P) for P in affine_points(F))
    for o in orbs:
        assert G.order % o.length == 0


def test_orbits_reject_open_domain(F3):
    G = cyclic_group(diagonal(F3, F3.root, 1))
    with pytest.raises(ValueError):
        orbits(G, [next(P for P in affine_points(F3) if P.x and P.y)])


def test_cyclic_group_structure(F3):
    G = cyclic_group(diagonal(F3, F3.root, 1))
    assert G.order == 8
    assert G.power(9) == G.generator
    assert G.subgroup(2).order == 4


def _oracle_stabiliser_order(U, frame_T, P, Q):
    """Count diag(a, b, 1) in the canonical frame that preserve U, using
    point-by-point application instead of the vectorised membership table."""
    F = U.F
    Tinv = linalg.inverse3(F, frame_T.matrix)
    pts = set(U.points)
    count = 0
    for a, b in product(range(1, F.q2), repeat=2):
        D = ((a, 0, 0), (0, b, 0), (0, 0, 1))
        M = linalg.matmul(F, Tinv, linalg.matmul(F, D, frame_T.matrix))
        if naive_apply(F, M, P) != P or naive_apply(F, M, Q) != Q:
            continue
        if all(naive_apply(F, M, X) in pts for X in U.points):
            count += 1
    return count


def test_stabiliser_matches_brute_force_q3(F3):
    rng = random.Random(4)
    H = hermitian_curve(F3)
    BM = buekenhout_metz(F3, 3, 0)
    for U in (H, BM):
        for P, Q in rng.sample(point_pairs(U), 8):
            cert = two_point_stabilizer(U, P, Q)
            assert cert.order == _oracle_stabiliser_order(U, cert.frame.to_canonical, P, Q)


@pytest.mark.parametrize("p,r", [(3, 1), (2, 2), (5, 1)])
def test_hermitian_stabiliser_at_reference_pair(p, r):
    F = make_tower(p, r)
    cert = two_point_stabilizer(hermitian_curve(F), O, Y_INF)
    assert cert.order == F.q2 - 1 and cert.cyclic
    assert cert.full_order_conditions(F)
    assert F.is_primitive(cert.lambda_)
    assert F.in_subfield(cert.mu) and F.is_primitive(cert.mu, subfield=True)


def test_hermitian_all_pairs_full_order_q3(F3):
    H = hermitian_curve(F3)
    orders = pair_stabilizer_orders(H, point_pairs(H))
    assert set(orders) == {8}


@pytest.mark.parametrize("p,r", [(2, 2), (5, 1)])
def test_hermitian_sampled_pairs_full_order(p, r):
    F = make_tower(p, r)
    H = hermitian_curve(F)
    pairs = point_pairs(H, 200, seed=1)
    assert len(pairs) == 200
    assert set(pair_stabilizer_orders(H, pairs)) == {F.q2 - 1}


def test_frame_independence(F3):
    rng = random.Random(5)
    H = hermitian_curve(F3)
    BM = buekenhout_metz(F3, 3, 0)
    for U in (H, BM):
        pairs = rng.sample(point_pairs(U), 5)
        base = [two_point_stabilizer(U, P, Q).order for P, Q in pairs]
        for _ in range(2):
            g = random_projectivity(F3, rng)
            V = transform_unital(U, g)
            assert [two_point_stabilizer(V, apply(g, P), apply(g, Q)).order for P, Q in pairs] == base


def test_bm_has_no_full_order_pair(F3):
    BM = buekenhout_metz(F3, 3, 0)
    assert is_unital(BM)
    orders = pair_stabilizer_orders(BM, point_pairs(BM))
    assert 8 not in orders
    assert all(8 % k == 0 for k in orders)


def test_stabiliser_argument_errors(F3):
    H = hermitian_curve(F3)
    with pytest.raises(ValueError):
        two_point_stabilizer(H, O, O)
    off = next(P for P in all_points(F3) if P not in H)
    with pytest.raises(ValueError):
        two_point_stabilizer(H, O, off)


def test_point_pairs_sampling_is_seeded(F3):
    H = hermitian_curve(F3)
    assert len(point_pairs(H)) == 378
    assert point_pairs(H, 20, seed=7) == point_pairs(H, 20, seed=7)
    assert point_pairs(H, 20, seed=7) != point_pairs(H, 20, seed=8)


def test_parallel_matches_serial(F3):
    H = buekenhout_metz(F3, 3, 0)
    pairs = point_pairs(H, 40, seed=2)
    assert pair_stabilizer_orders(H, pairs, workers=2) == pair_stabilizer_orders(H, pairs, workers=1)


def test_certificate_serialises(F3):
    d = two_point_stabilizer(hermitian_curve(F3), O, Y_INF).to_dict()
    assert d["order"] == 8 and d["P"] == "0:0:1" and d["Q"] == "0:1:0"
