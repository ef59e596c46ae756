"""Exact linear algebra over a field, plus determinants of polynomial matrices.

Matrices are plain lists of lists.  Row reduction, rank, nullspace and solve
work over any of the scalar fields (entries must support +, -, *, / and
truthiness).  Determinants accept matrices whose entries are polynomials as
well as scalars, and come in two independent implementations so results can
be cross-checked:

* `det_laplace` - cofactor expansion memoized over column subsets, the
  default route (no division at all, so it never needs exact quotients);
* `det_bareiss` - fraction-free elimination whose interior divisions are
  exact by Sylvester's identity.

Both refuse matrices larger than `max_det_size()` (default 8, override with
the VENERONI_MAX_DET_SIZE environment variable) since cost explodes beyond
that.
"""

import os

DEFAULT_MAX_DET_SIZE = 8


def max_det_size():
    """Size cap for determinant routines; env VENERONI_MAX_DET_SIZE overrides."""
    v = os.environ.get("VENERONI_MAX_DET_SIZE")
    return int(v) if v else DEFAULT_MAX_DET_SIZE


def _check_square(m):
    k = len(m)
    if any(len(row) != k for row in m):
        raise ValueError("matrix is not square")
    cap = max_det_size()
    if k > cap:
        raise ValueError(f"matrix size {k} exceeds determinant cap {cap}")
    return k


def det_laplace(m):
    """Determinant by column-subset dynamic programming.

    D[mask] is the minor on the first popcount(mask) rows and the columns in
    mask; expanding each along its last row visits every subset once, which
    is far cheaper than the naive n! expansion and involves no division.
    """
    k = _check_square(m)
    if k == 0:
        return 1
    if k == 1:
        return m[0][0]
    prev = {1 << j: m[0][j] for j in range(k)}
    for r in range(1, k):
        cur = {}
        for mask, minor in prev.items():
            # extend the column set by one unused column j; the expansion
            # sign depends on j's position within the enlarged set.
            for j in range(k):
                bit = 1 << j
                if mask & bit:
                    continue
                nm = mask | bit
                pos = bin(nm & (bit - 1)).count("1")
                term = m[r][j] * minor
                if (r + pos) % 2:
                    term = -term
                if nm in cur:
                    cur[nm] = cur[nm] + term
                else:
                    cur[nm] = term
        prev = cur
    return prev[(1 << k) - 1]


def _exact_quo(a, b):
    # Poly entries divide through exact_div; field scalars divide directly.
    if hasattr(a, "exact_div"):
        return a.exact_div(b)
    return a / b


def det_bareiss(m):
    """Determinant by fraction-free Gaussian elimination (Bareiss).

    Every interior division is by the previous pivot and is exact, so the
    routine works verbatim for polynomial entries.  Rows are swapped (with a
    sign flip) when a pivot vanishes.
    """
    k = _check_square(m)
    if k == 0:
        return 1
    a = [list(row) for row in m]
    sign = 1
    prev = None
    for i in range(k - 1):
        if not a[i][i]:
            for r in range(i + 1, k):
                if a[r][i]:
                    a[i], a[r] = a[r], a[i]
                    sign = -sign
                    break
            else:
                return a[i][i]  # a zero; the column below the pivot is gone
        for r in range(i + 1, k):
            for c in range(i + 1, k):
                num = a[i][i] * a[r][c] - a[r][i] * a[i][c]
                a[r][c] = num if prev is None else _exact_quo(num, prev)
            a[r][i] = a[i][i] - a[i][i]  # a zero of the right type
        prev = a[i][i]
    d = a[k - 1][k - 1]
    return -d if sign < 0 else d


def det(m):
    """Default determinant (the division-free route)."""
    return det_laplace(m)


def det_poly_matrix(m, strategy="minor_dp"):
    """Strategy dispatch: "minor_dp" (column-subset DP) or "bareiss"."""
    if strategy == "minor_dp":
        return det_laplace(m)
    if strategy == "bareiss":
        return det_bareiss(m)
    raise ValueError(f"unknown determinant strategy {strategy!r}")


def rref(rows, ctx):
    """Reduced row echelon form.  Returns (reduced rows, pivot column list)."""
    a = [list(r) for r in rows]
    nr = len(a)
    nc = len(a[0]) if nr else 0
    pivots = []
    r = 0
    for c in range(nc):
        pr = next((i for i in range(r, nr) if a[i][c]), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = ctx.inv(a[r][c])
        a[r] = [v * inv for v in a[r]]
        for i in range(nr):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return a, pivots


def rank(rows, ctx):
    if not rows:
        return 0
    return len(rref(rows, ctx)[1])


def rank_mod_p(int_rows, p):
    """Rank of an integer matrix over F_p, on plain ints for speed.

    Used as a certified lower bound for the rational rank of the same
    matrix (a nonzero minor mod p lifts to a nonzero rational minor).
    """
    rows = [[v % p for v in r] for r in int_rows]
    if not rows:
        return 0
    nc = len(rows[0])
    r = 0
    for c in range(nc):
        pr = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = pow(rows[r][c], p - 2, p)
        piv = [v * inv % p for v in rows[r]]
        rows[r] = piv
        for i in range(r + 1, len(rows)):
            f = rows[i][c]
            if f:
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], piv)]
        r += 1
        if r == len(rows):
            break
    return r


def nullspace(rows, ncols, ctx):
    """Basis of the right kernel {v : rows @ v = 0} as a list of vectors."""
    if not rows:
        return [
            [ctx.one if i == j else ctx.zero for i in range(ncols)]
            for j in range(ncols)
        ]
    red, pivots = rref(rows, ctx)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [ctx.zero] * ncols
        v[fc] = ctx.one
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        lead = ctx.inv(next(c for c in v if c))
        basis.append([c * lead for c in v])
    return basis


def rank_nullspace(rows, ncols, ctx):
    """(rank, nullspace basis); basis vectors lead with 1. rank+nullity=ncols."""
    basis = nullspace(rows, ncols, ctx)
    return ncols - len(basis), basis


def solve_exact(a, b, ctx):
    """Solution of a @ x = b with free variables at 0, plus the nullspace.

    Raises on an inconsistent system (the caller treats that as a
    non-generic instance).
    """
    x = solve(a, b, ctx)
    if x is None:
        raise ValueError("inconsistent linear system")
    return x, nullspace(a, len(a[0]), ctx)


def solve(a, b, ctx):
    """One solution of a @ x = b, or None when the system is inconsistent."""
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    red, pivots = rref(aug, ctx)
    ncols = len(a[0]) if a else 0
    if ncols in pivots:  # pivot in the constants column
        return None
    x = [ctx.zero] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][ncols]
    return x


def mat_mul(a, b):
    out = []
    for row in a:
        out.append(
            [sum(row[k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
        )
    return out


def mat_vec(a, v):
    return [sum(row[k] * v[k] for k in range(len(v))) for row in a]


def identity(k):
    return [[1 if i == j else 0 for j in range(k)] for i in range(k)]
