import random
from itertools import combinations, product

import numpy as np
import pytest

from oracles import hermitian_value, naive_line_counts, naive_points
from unitalkit.collineations import random_projectivity, transform_unital
from unitalkit.finite_field import make_tower
from unitalkit.projective_plane import (
    ELL_INF,
    ELL_X,
    ELL_Y,
    O,
    X_INF,
    Y_INF,
    ProjPoint,
    all_points,
    line_through,
    points_on_line,
)
from unitalkit.unitals import (
    HermitianForm,
    NotAUnitalError,
    Unital,
    buekenhout_metz,
    classicality_check,
    cone_form,
    curve_form,
    curve_intersection_congruence,
    hermitian_cone,
    hermitian_curve,
    is_unital,
    random_hermitian_form,
    tangent_line,
)

TOWERS = [(3, 1), (2, 2), (5, 1)]


def first_bm(F):
    for alpha, beta in product(range(1, F.q2), range(F.q2)):
        try:
            return buekenhout_metz(F, alpha, beta)
        except NotAUnitalError:
            continue


@pytest.mark.parametrize("p,r", TOWERS)
def test_hermitian_curve_is_unital(p, r):
    F = make_tower(p, r)
    q = F.q
    U = hermitian_curve(F)
    cert = is_unital(U)
    assert cert.ok and cert.size == q ** 3 + 1
    assert set(cert.spectrum) == {1, q + 1}
    assert cert.spectrum[1] == q ** 3 + 1
    assert cert.spectrum[q + 1] == q ** 2 * (q ** 2 - q + 1)


def test_hermitian_points_match_direct_enumeration(F3):
    G = curve_form(F3, 1).gram
    oracle = sorted(ProjPoint(*P) for P in naive_points(F3) if hermitian_value(F3, G, P) == 0)
    assert list(hermitian_curve(F3).points) == oracle
    counts = naive_line_counts(F3, oracle)
    assert sorted(set(counts)) == [1, 4]


def test_every_point_has_one_tangent(F3):
    U = hermitian_curve(F3)
    counts = U.secant_counts()
    for P in U.points:
        ell = tangent_line(U, P)
        assert points_on_line(F3, ell).count(P) == 1
        through = [i for i, L in enumerate(all_points(F3)) if F3.sum(F3.mul(a, x) for a, x in zip(L, P)) == 0]
        assert sorted(counts[through].tolist()) == [1] + [4] * 9


def test_reference_points_and_tangents(F3):
    for b in range(1, 9):
        U = hermitian_curve(F3, b)
        assert O in U and Y_INF in U
        assert tangent_line(U, O) == ELL_X
        assert tangent_line(U, Y_INF) == ELL_INF
        assert int(U.secant_counts()[all_points(F3).index(ProjPoint(*ELL_Y))]) == 4
    with pytest.raises(ValueError):
        tangent_line(hermitian_curve(F3), X_INF)


def test_padded_line_is_not_a_unital(F3):
    pts = points_on_line(F3, ELL_Y)
    extra = [P for P in all_points(F3) if P not in pts][: 28 - len(pts)]
    cert = is_unital(pts + extra, F3)
    assert not cert.ok
    assert cert.size == 28
    assert cert.count not in (1, 4)
    assert cert.witness is not None


def test_wrong_size_is_not_a_unital(F3):
    U = hermitian_curve(F3)
    cert = is_unital(U.points[:-1], F3)
    assert not cert.ok and cert.size == 27
    with pytest.raises(ValueError):
        is_unital(U.points)


def test_unnormalised_point_rejected(F3):
    with pytest.raises(ValueError):
        Unital(F3, [(2, 1, 0)])
    with pytest.raises(ValueError):
        Unital(F3, [(0, 0, 9)])


def test_hermitian_form_validation(F3):
    with pytest.raises(ValueError):
        HermitianForm(F3, ((0, 3, 0), (3, 0, 0), (0, 0, 1)))  # 3 is not fixed by conjugation
    with pytest.raises(ValueError):
        curve_form(F3, 0)


def test_cone_structure(F3):
    for c in range(1, 9):
        cone = hermitian_cone(F3, c)
        assert len(cone.lines) == 4
        assert X_INF in cone.points
        assert len(cone.points) == 4 * 9 + 1
        assert cone_form(F3, c).rank == 2
        affine = [P for P in cone.points if P.z]
        assert len(affine) == 27  # l_inf is one of the cone lines
        assert ELL_INF in cone.lines
    for c, s in product(range(1, 9), [s for s in F3.subfield if s]):
        a = cone_form(F3, c).absolute_indices()
        b = cone_form(F3, F3.mul(c, s)).absolute_indices()
        assert np.array_equal(a, b)


@pytest.mark.parametrize("p,r", [(3, 1), (5, 1)])
def test_bm_unitals(p, r):
    F = make_tower(p, r)
    U = first_bm(F)
    assert is_unital(U)
    assert Y_INF in U
    assert classicality_check(U) is None


def test_bm_with_alpha_zero_is_classical(F3):
    beta = next(b for b in range(9) if not F3.in_subfield(b))
    U = buekenhout_metz(F3, 0, beta)
    assert is_unital(U)
    assert classicality_check(U) is not None


def test_bm_bad_discriminant(F3):
    with pytest.raises(NotAUnitalError):
        buekenhout_metz(F3, 0, 0)
    with pytest.raises(ValueError):
        buekenhout_metz(make_tower(2, 2), 1, 0)


@pytest.mark.parametrize("p,r", TOWERS)
def test_classicality_recovers_curves(p, r):
    F = make_tower(p, r)
    U = hermitian_curve(F, 1)
    form = classicality_check(U)
    assert form is not None and form.rank == 3
    # oracle: evaluate the recovered form at every point
    zeros = [P for P in all_points(F) if hermitian_value(F, form.gram, P) == 0]
    assert zeros == list(U.points)
    assert form.is_proportional(curve_form(F, 1))


@pytest.mark.parametrize("p,r", [(3, 1), (5, 1)])
def test_classicality_on_random_images(p, r):
    F = make_tower(p, r)
    rng = random.Random(6)
    H = hermitian_curve(F)
    for _ in range(3):
        V = transform_unital(H, random_projectivity(F, rng))
        assert is_unital(V)
        form = classicality_check(V)
        assert form is not None
        assert [P for P in all_points(F) if hermitian_value(F, form.gram, P) == 0] == list(V.points)


def test_random_rank3_forms_give_unitals(F3):
    rng = random.Random(7)
    for _ in range(5):
        H = random_hermitian_form(F3, rng)
        U = Unital(F3, H.absolute_points())
        assert is_unital(U)
        assert classicality_check(U).is_proportional(H)


def test_classicality_rejects_non_unital(F3):
    with pytest.raises(ValueError):
        classicality_check(Unital(F3, points_on_line(F3, ELL_Y)))


def test_transformed_form_matches_image(F3):
    rng = random.Random(8)
    H = curve_form(F3, 1)
    g = random_projectivity(F3, rng)
    # x = M x' ; the transformed form's zeros are M^(-1) applied to H's zeros
    moved = H.transformed(g.matrix)
    image = transform_unital(Unital(F3, moved.absolute_points()), g)
    assert list(image.points) == list(H.absolute_points())


def test_polynomial_expansion(F3):
    poly = curve_form(F3, 1).polynomial()
    for P in all_points(F3)[:40]:
        val = F3.sum(F3.mul(c, F3.mul(F3.power(P[0], e1), F3.mul(F3.power(P[1], e2), F3.power(P[2], e3))))
                     for (e1, e2, e3), c in poly.items())
        assert val == curve_form(F3, 1).value(P)


def test_congruence_all_b(F3):
    corpus = [hermitian_curve(F3, 1), hermitian_curve(F3, 2), first_bm(F3)]
    for U in corpus:
        for b in range(1, 9):
            N, ok = curve_intersection_congruence(U, curve_form(F3, b))
            assert ok, (U.kind, b, N)


def test_curve_pairs_meet_in_bounded_sets(F3):
    forms = [curve_form(F3, b) for b in range(1, 9)]
    rng = random.Random(9)
    forms += [random_hermitian_form(F3, rng) for _ in range(10)]
    for A, B in combinations(forms, 2):
        if A.is_proportional(B):
            continue
        n = len(set(A.absolute_indices().tolist()) & set(B.absolute_indices().tolist()))
        assert n != 2
        assert n <= 16


def test_shared_tangent_family_common_points(F3):
    U = curve_form(F3, 1)
    for s in F3.subfield:
        if s in (0, 1):
            continue
        V = curve_form(F3, s)
        common = sorted(set(U.absolute_indices().tolist()) & set(V.absolute_indices().tolist()))
        pts = [all_points(F3)[i] for i in common]
        assert len(pts) == 4
        ell = line_through(F3, pts[0], pts[1])
        assert ell == ELL_Y


def test_polar_is_tangent(F3):
    rng = random.Random(10)
    H = random_hermitian_form(F3, rng)
    U = Unital(F3, H.absolute_points())
    for P in U.points:
        assert H.polar(P) == tangent_line(U, P)
    assert cone_form(F3, 1).polar(X_INF) is None
