from math import comb

import pytest

from veneroni import exactla as la
from veneroni import maps
from veneroni.mpoly import Poly
from veneroni.projgeo import (
    Flat,
    ProjPoint,
    line_restrict,
    parametrize_flat,
    random_general_flats,
    transversal_through,
)
from veneroni.scalar import FieldCtx, seeded_rng

QQ = FieldCtx.rationals()


def pipeline(n, seed=42):
    flats = random_general_flats(n, seed, QQ).flats
    vmap = maps.build_forward_map(flats, QQ)
    inv = maps.build_inverse_map(vmap, maps.solve_b_matrix(vmap))
    return vmap, inv


@pytest.fixture(scope="module")
def m2():
    return pipeline(2)


@pytest.fixture(scope="module")
def m3():
    return pipeline(3)


def sample_off_locus(vmap, rng, tries=50):
    for _ in range(tries):
        p = ProjPoint([vmap.ctx.random_nonzero(rng) for _ in range(vmap.n + 1)], vmap.ctx)
        if all(bool(q.evaluate(p.coords)) for q in vmap.Q):
            return p
    raise AssertionError("could not sample a point off the Q_i")


def test_matrix_b_entries():
    flats = random_general_flats(3, 7, QQ).flats
    b = maps.build_matrix_B(flats, QQ)
    assert len(b) == 4 and all(len(r) == 4 for r in b)
    for i in range(4):
        assert b[i][i] == -flats[i].form2_poly()
        # the diagonal entry dies on its own flat
        assert maps.vanishes_on_flat(-b[i][i], flats[i], QQ)
        for k in range(4):
            if k != i:
                assert b[i][k] == Poly.var(k, 4, flats[i].a[k])
    bad = list(flats)
    a = list(flats[2].a)
    a[2] = QQ.one  # nonzero diagonal coefficient
    bad[2] = Flat(2, tuple(a))
    with pytest.raises(maps.ConstructionError):
        maps.build_matrix_B(bad, QQ)


@pytest.mark.parametrize("n", [2, 3])
def test_det_strategies_agree(n):
    flats = random_general_flats(n, 5, QQ).flats
    b = maps.build_matrix_B(flats, QQ)
    for i in range(n + 1):
        mi = maps.minor_matrix(b, i)
        assert la.det_poly_matrix(mi, "minor_dp") == la.det_poly_matrix(mi, "bareiss")


@pytest.mark.parametrize("n", [2, 3, 4])
def test_q_matches_column_sum_oracle(n):
    # the second determinantal route (constant column of -a_{j,i}) gives
    # Q_i with no division at all; both must agree on the nose
    flats = random_general_flats(n, 11, QQ).flats
    for i in range(n + 1):
        assert maps.compute_Q(flats, i, QQ) == maps.q_column_sum_oracle(flats, i, QQ)


def test_q_frozen_n2_formulas():
    flats = random_general_flats(2, 42, QQ).flats
    a = [f.a for f in flats]
    # expanding det(B_0)/x_0 by hand for n = 2 gives
    #   Q_0 = a10*a20*x0 + a10*a21*x1 + a12*a20*x2
    # and symmetrically for Q_1
    q0 = Poly.from_linear([a[1][0] * a[2][0], a[1][0] * a[2][1], a[1][2] * a[2][0]])
    q1 = Poly.from_linear([a[0][1] * a[2][0], a[0][1] * a[2][1], a[0][2] * a[2][1]])
    assert maps.compute_Q(flats, 0, QQ) == q0
    assert maps.compute_Q(flats, 1, QQ) == q1
    # Q_0 is the line through the two point-flats 1 and 2, so its
    # coefficient vector is the cross product of their coordinates
    p1 = (a[1][2], QQ.zero, -a[1][0])  # x1 = 0, a10*x0 + a12*x2 = 0
    p2 = (a[2][1], -a[2][0], QQ.zero)  # x2 = 0, a20*x0 + a21*x1 = 0
    cross = [
        p1[1] * p2[2] - p1[2] * p2[1],
        p1[2] * p2[0] - p1[0] * p2[2],
        p1[0] * p2[1] - p1[1] * p2[0],
    ]
    assert q0.proportional_to(Poly.from_linear(cross))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_forward_map_invariants(n):
    flats = random_general_flats(n, 42, QQ).flats
    vmap = maps.build_forward_map(flats, QQ)
    n1 = n + 1
    for i in range(n1):
        assert vmap.components[i] == Poly.var(i, n1, QQ.one) * vmap.Q[i]
        assert vmap.Q[i].degree() == n - 1
        assert vmap.components[i].degree() == n
        assert vmap.components[i].is_homogeneous()
    # at vertex k exactly the k-th component survives
    for k in range(n1):
        vert = [QQ.one if i == k else QQ.zero for i in range(n1)]
        vals = [c.evaluate(vert) for c in vmap.components]
        assert [bool(v) for v in vals] == [i == k for i in range(n1)]


def test_apply_map_and_base_locus(m2):
    vmap, _ = m2
    vert = ProjPoint([QQ.one, QQ.zero, QQ.zero], QQ)
    assert maps.apply_map(vmap.components, vert, QQ) == vert
    on_flat = parametrize_flat(vmap.flats[0], QQ)[0]
    with pytest.raises(maps.BaseLocusError):
        maps.apply_map(vmap.components, on_flat, QQ)


@pytest.mark.parametrize("n", [2, 3])
def test_b_matrix_is_transposed_a(n):
    # the components span the left kernel of B (its rows sum to zero), and
    # expanding adj(B)·B = 0 column by column forces b[i][j] = a[j][i];
    # the solver must rediscover this without being told
    vmap, inv = pipeline(n, seed=23)
    for i in range(n + 1):
        for j in range(n + 1):
            assert inv.b[i][j] == vmap.flats[j].a[i]


def test_b_matrix_laws_and_point_oracle(m3):
    vmap, inv = m3
    n1 = vmap.n + 1
    for i in range(n1):
        for j in range(n1):
            assert (i == j) == (not inv.b[i][j])
        # residual of the defining expansion, recomputed here
        residual = vmap.flats[i].form2_poly() * vmap.Q[i]
        for j in range(n1):
            residual = residual - vmap.components[j].scale(inv.b[i][j])
        assert residual.is_zero()
    # point-evaluation oracle, independent of the linear solver
    rng = seeded_rng(1, "b-oracle")
    for _ in range(5):
        p = ProjPoint([QQ.random_nonzero(rng) for _ in range(n1)], QQ)
        img = [c.evaluate(p.coords) for c in vmap.components]
        for i in range(n1):
            lhs = inv.g[i].evaluate(img)
            rhs = vmap.flats[i].form2_poly().evaluate(p.coords) * vmap.Q[i].evaluate(
                p.coords
            )
            assert lhs == rhs


def test_inverse_components_and_duals(m2, m3):
    for vmap, inv in (m2, m3):
        n1 = vmap.n + 1
        assert len(inv.inverse_components) == n1
        for i, d in enumerate(inv.inverse_components):
            assert d.degree() == vmap.n and d.is_homogeneous()
            for j in range(n1):
                if j != i:
                    assert maps.vanishes_on_flat(d, inv.dual_flats[j], vmap.ctx)
        for f in inv.dual_flats:
            assert f.is_canonical()
            assert f.a == tuple(inv.b[f.j])


@pytest.mark.parametrize("n", [2, 3])
def test_composition_is_multiplication_by_product(n):
    vmap, inv = pipeline(n, seed=42)
    prod = vmap.Q[0]
    for q in vmap.Q[1:]:
        prod = prod * q
    for i in range(n + 1):
        composed = inv.inverse_components[i].substitute(vmap.components)
        expected = Poly.var(i, n + 1, QQ.one) * prod
        assert composed == expected


def test_roundtrip_on_samples(m3):
    vmap, inv = m3
    rng = seeded_rng(17, "roundtrip")
    images = []
    for _ in range(8):
        p = sample_off_locus(vmap, rng)
        img = maps.apply_map(vmap.components, p, QQ)
        back = maps.apply_map(inv.inverse_components, img, QQ)
        assert back == p
        images.append(img)
    assert len({im.coords for im in images}) == len(images)


def test_monomials_of_degree():
    for nvars, d in ((3, 2), (4, 3), (5, 4), (6, 5)):
        mons = maps.monomials_of_degree(nvars, d)
        assert len(mons) == comb(d + nvars - 1, nvars - 1)
        assert len(set(mons)) == len(mons)
        assert all(sum(e) == d for e in mons)


def test_linear_system_dimensions_n2():
    flats = random_general_flats(2, 42, QQ).flats
    assert maps.linear_system_dimension(flats, 2, QQ) == 3
    for omit in range(3):
        subset = [j for j in range(3) if j != omit]
        assert maps.linear_system_dimension(flats, 1, QQ, subset=subset) == 1
    # two points impose two conditions on conics
    assert maps.linear_system_dimension(flats, 2, QQ, subset=[0, 1]) == 4


def test_linear_system_dimensions_n3(m3):
    vmap, _ = m3
    flats = vmap.flats
    assert maps.linear_system_dimension(flats, 3, QQ) == 4
    for omit in range(4):
        subset = [j for j in range(4) if j != omit]
        assert maps.linear_system_dimension(flats, 2, QQ, subset=subset) == 1


def test_witness_pinch_agrees_with_exact_path(m3):
    vmap, _ = m3
    exact = maps.linear_system_dimension(vmap.flats, 3, QQ)
    pinched = maps.linear_system_dimension(
        vmap.flats, 3, QQ, witnesses=vmap.components
    )
    assert exact == pinched == 4


def test_degree_n_system_is_spanned_by_components(m3):
    # rank of the component coefficient matrix is n+1: together with the
    # dimension count this is the basis property
    vmap, _ = m3
    mons = maps.monomials_of_degree(4, 3)
    col = {m: r for r, m in enumerate(mons)}
    rows = []
    for comp in vmap.components:
        row = [QQ.zero] * len(mons)
        for e, c in comp.terms.items():
            row[col[e]] = c
        rows.append(row)
    assert la.rank(rows, QQ) == 4


def test_class_matrix_shape_and_involution():
    m = maps.class_matrix(2)
    assert m == [
        [2, 1, 1, 1],
        [-1, 0, -1, -1],
        [-1, -1, 0, -1],
        [-1, -1, -1, 0],
    ]
    for n in range(2, 11):
        cm = maps.class_matrix(n)
        size = n + 2  # hyperplane class plus the n+1 flat classes
        assert len(cm) == size
        assert cm[0][0] == n
        assert all(cm[0][k] == n - 1 for k in range(1, size))
        assert all(cm[k][0] == -1 for k in range(1, size))
        assert la.mat_mul(cm, cm) == la.identity(size)
    with pytest.raises(ValueError):
        maps.class_matrix(1)


def test_contracted_transversal_has_constant_image(m3):
    # a line meeting the three flats other than flat 0 lies on Q_0 and is
    # collapsed by the map: all its sampled points share one image
    vmap, _ = m3
    rng = seeded_rng(31, "fiber")
    span = parametrize_flat(vmap.flats[1], QQ)
    combo = [QQ.random_nonzero(rng) for _ in span]
    p = ProjPoint(
        [sum((c * s[i] for c, s in zip(combo, span)), QQ.zero) for i in range(4)],
        QQ,
    )
    res = transversal_through(p, [vmap.flats[2], vmap.flats[3]], QQ)
    assert res.kind == "unique"
    assert line_restrict(vmap.Q[0], res.line).is_zero()
    images = []
    for t in (1, 2, 3, 5):
        pt = res.line.point_at(QQ.one, QQ.from_int(t), QQ)
        try:
            images.append(maps.apply_map(vmap.components, pt, QQ))
        except maps.BaseLocusError:
            continue
    assert len(images) >= 3
    assert all(im == images[0] for im in images[1:])


def test_image_of_q_locus_hits_dual_flat(m3):
    # points on Q_1 off the base locus land on the dual flat (y_1, g_1)
    vmap, inv = m3
    rng = seeded_rng(37, "dual-image")
    span = parametrize_flat(vmap.flats[0], QQ)
    combo = [QQ.random_nonzero(rng) for _ in span]
    p = ProjPoint(
        [sum((c * s[i] for c, s in zip(combo, span)), QQ.zero) for i in range(4)],
        QQ,
    )
    res = transversal_through(p, [vmap.flats[2], vmap.flats[3]], QQ)
    pt = res.line.point_at(QQ.one, QQ.from_int(2), QQ)
    img = maps.apply_map(vmap.components, pt, QQ)
    assert not img[1]
    assert inv.dual_flats[1].contains(img)


def test_mutated_instance_breaks_construction():
    # flipping one coefficient after generation must not slip through the
    # construction checks silently: either divisibility or a vanishing
    # invariant fails
    flats = list(random_general_flats(3, 3, QQ).flats)
    a = list(flats[1].a)
    a[2] = a[2] + QQ.one
    flats[1] = Flat(1, tuple(a))
    try:
        vmap = maps.build_forward_map(flats, QQ)
    except (maps.ConstructionError, ValueError):
        return
    # construction may survive (the mutated instance is still general);
    # then the original's Q must no longer match
    orig = random_general_flats(3, 3, QQ).flats
    assert maps.compute_Q(orig, 0, QQ) != vmap.Q[0]
