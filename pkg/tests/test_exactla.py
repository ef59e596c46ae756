import random

import pytest

from veneroni import exactla as la
from veneroni.mpoly import Poly
from veneroni.scalar import FieldCtx

QQ = FieldCtx.rationals()
FP = FieldCtx.prime((1 << 31) - 1)


def rand_mat(ctx, rng, k, bound=5):
    return [[ctx.random(rng, bound) for _ in range(k)] for _ in range(k)]


def rand_poly_mat(ctx, rng, k, nvars=3):
    def entry():
        p = Poly.zero(nvars)
        for i in range(nvars):
            p = p + Poly.var(i, nvars, ctx.random(rng, 3))
        return p + Poly.const(ctx.random(rng, 3), nvars)

    return [[entry() for _ in range(k)] for _ in range(k)]


@pytest.mark.parametrize("ctx", [QQ, FP])
def test_det_routes_agree_on_scalars(ctx):
    rng = random.Random(2024)
    for k in (1, 2, 3, 4, 5):
        for _ in range(10):
            m = rand_mat(ctx, rng, k)
            assert la.det_laplace(m) == la.det_bareiss(m)


def test_det_routes_agree_on_polynomials():
    rng = random.Random(7)
    for k in (2, 3, 4):
        m = rand_poly_mat(QQ, rng, k)
        assert la.det_laplace(m) == la.det_bareiss(m)


def test_det_known_values():
    m = [[QQ.from_int(v) for v in row] for row in [[2, 1, 0], [1, 3, 4], [0, 5, 6]]]
    assert la.det(m) == -10
    # Vandermonde on 1, 2, 4: prod of differences = 1*3*2 = 6
    v = [[QQ.from_int(a) ** i for i in range(3)] for a in (1, 2, 4)]
    assert la.det(v) == 6
    assert la.det_laplace([]) == 1 == la.det_bareiss([])


def test_det_is_multiplicative_and_alternating():
    rng = random.Random(99)
    for _ in range(10):
        a = rand_mat(QQ, rng, 4)
        b = rand_mat(QQ, rng, 4)
        assert la.det(la.mat_mul(a, b)) == la.det(a) * la.det(b)
        swapped = [a[1], a[0]] + a[2:]
        assert la.det(swapped) == -la.det(a)
        t = [list(col) for col in zip(*a)]
        assert la.det(t) == la.det(a)


def test_det_bareiss_handles_zero_pivots():
    z, o = QQ.zero, QQ.one
    m = [[z, o, z], [o, z, z], [z, z, o]]  # permutation, det -1
    assert la.det_bareiss(m) == -1
    sing = [[z, o, z], [z, QQ.from_int(2), z], [z, z, o]]  # zero first column
    assert la.det_bareiss(sing) == 0
    assert la.det_laplace(sing) == 0


def test_det_size_cap(monkeypatch):
    monkeypatch.setenv("VENERONI_MAX_DET_SIZE", "3")
    assert la.max_det_size() == 3
    m = rand_mat(QQ, random.Random(0), 4)
    with pytest.raises(ValueError):
        la.det_laplace(m)
    with pytest.raises(ValueError):
        la.det_bareiss(m)
    monkeypatch.delenv("VENERONI_MAX_DET_SIZE")
    assert la.max_det_size() == la.DEFAULT_MAX_DET_SIZE
    assert la.det(m) == la.det_bareiss(m)


def test_rref_shape_and_idempotence():
    rng = random.Random(31)
    rows = [[QQ.random(rng) for _ in range(5)] for _ in range(3)]
    red, piv = la.rref(rows, QQ)
    for r, c in enumerate(piv):
        assert red[r][c] == 1
        assert all(red[i][c] == 0 for i in range(len(red)) if i != r)
    again, piv2 = la.rref(red, QQ)
    assert again == red and piv2 == piv


@pytest.mark.parametrize("ctx", [QQ, FP])
def test_nullspace_annihilates_and_counts(ctx):
    rng = random.Random(17)
    for _ in range(15):
        nr, nc = rng.randrange(1, 5), rng.randrange(1, 6)
        rows = [[ctx.random(rng, 3) for _ in range(nc)] for _ in range(nr)]
        ns = la.nullspace(rows, nc, ctx)
        assert len(ns) == nc - la.rank(rows, ctx)
        for v in ns:
            for r in rows:
                assert sum((a * b for a, b in zip(r, v)), ctx.zero) == ctx.zero
    assert len(la.nullspace([], 4, ctx)) == 4


def test_solve():
    a = [[QQ.from_int(v) for v in row] for row in [[1, 2, 3], [2, 4, 6], [1, 0, 1]]]
    x = la.solve(a, [QQ.from_int(6), QQ.from_int(12), QQ.from_int(2)], QQ)
    assert la.mat_vec(a, x) == [6, 12, 2]
    assert la.solve([[QQ.one], [QQ.one]], [QQ.one, QQ.from_int(2)], QQ) is None


def test_rank_drops_on_dependent_rows():
    rows = [[QQ.from_int(v) for v in r] for r in [[1, 2, 3], [2, 4, 6], [1, 0, 1]]]
    assert la.rank(rows, QQ) == 2
    assert la.rank([], QQ) == 0
