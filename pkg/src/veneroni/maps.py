"""Construction of the Veneroni map, its explicit inverse, and the class matrix.

The map is determinantal: B is the (n+1)x(n+1) matrix with -f_i on the
diagonal and a_{i,k} x_k elsewhere, built straight from the canonical flats.
Deleting row and column i leaves B_i with det(B_i) = x_i Q_i, and the n+1
products x_i Q_i are the components of the degree-n map v_n.  The inverse
comes from rewriting each f_i Q_i in the component basis (the b-matrix),
which yields linear forms g_i, the analogous matrix C in the target
coordinates, and inverse components det(C_i).
"""

from dataclasses import dataclass

from . import exactla as la
from .mpoly import Poly, PolyRing
from .projgeo import Flat, ProjPoint, parametrize_flat, restrict_to_span

__all__ = [
    "ConstructionError",
    "BaseLocusError",
    "VeneroniMap",
    "InverseData",
    "build_matrix_B",
    "minor_matrix",
    "compute_Q",
    "q_column_sum_oracle",
    "linear_system_dimension",
    "build_forward_map",
    "solve_b_matrix",
    "build_inverse_map",
    "apply_map",
    "class_matrix",
    "monomials_of_degree",
]


class ConstructionError(Exception):
    """A construction-time invariant failed; the message names it."""


class BaseLocusError(Exception):
    """The map was applied at a point where every component vanishes."""


def build_matrix_B(flats, ctx):
    """The defining matrix: diagonal -f_i, entry (i,k) = a_{i,k} x_k."""
    n1 = len(flats)
    rows = []
    for i, f in enumerate(flats):
        if not f.is_canonical():
            raise ConstructionError(f"flat {f.j} is not canonical")
        row = []
        for k in range(n1):
            if k == i:
                row.append(-f.form2_poly())
            else:
                row.append(Poly.var(k, n1, f.a[k]))
        rows.append(row)
    return rows


def minor_matrix(m, i):
    """Delete row i and column i."""
    return [
        [e for k, e in enumerate(row) if k != i]
        for r, row in enumerate(m)
        if r != i
    ]


def compute_Q(flats, i, ctx, strategy="minor_dp"):
    """Q_i = det(B_i) / x_i, the degree-(n-1) hypersurface avoiding flat i."""
    b = build_matrix_B(flats, ctx)
    det = la.det_poly_matrix(minor_matrix(b, i), strategy)
    try:
        q = det.div_var(i)
    except ValueError as e:
        raise ConstructionError(f"det(B_{i}) not divisible by x{i}: {e}") from e
    n = len(flats) - 1
    if q.degree() != n - 1:
        raise ConstructionError(f"Q_{i} has degree {q.degree()}, expected {n - 1}")
    return q


def q_column_sum_oracle(flats, i, ctx):
    """Q_i by the column-sum route, independent of division.

    Start from B_i; adding every other column to a chosen column leaves
    each of its entries equal to -a_{j,i} x_i (the full row sums of B are
    -a_{j,i} x_i), so dividing that single column by x_i before taking the
    determinant gives Q_i directly.
    """
    n1 = len(flats)
    keep = [j for j in range(n1) if j != i]
    target = keep[0]
    rows = []
    for j in keep:
        f = flats[j]
        row = []
        for k in keep:
            if k == target:
                row.append(Poly.const(-f.a[i], n1))
            elif k == j:
                row.append(-f.form2_poly())
            else:
                row.append(Poly.var(k, n1, f.a[k]))
        rows.append(row)
    return la.det(rows)


def monomials_of_degree(nvars, d):
    """All exponent tuples of total degree d, in a fixed deterministic order."""
    if nvars == 1:
        return [(d,)]
    out = []
    for k in range(d, -1, -1):
        for rest in monomials_of_degree(nvars - 1, d - k):
            out.append((k,) + rest)
    return out


def _restriction_rows(flat, d, ctx, mons):
    """Linear conditions on degree-d coefficients for vanishing on the flat.

    Substituting the flat's parametrization into a general degree-d form
    and collecting parameter monomials gives one condition per collected
    monomial; the row entries are the contributions of each coefficient.
    """
    basis = parametrize_flat(flat, ctx)
    npar = len(basis)
    # x_i restricted to the flat, as a linear form in the parameters
    images = [
        Poly.from_linear([pt[i] for pt in basis]) for i in range(flat.nvars)
    ]
    cache = {}

    def restricted(e):
        # product of images[i]^e[i], built by peeling one variable at a time
        # so shared prefixes are computed once
        if e in cache:
            return cache[e]
        if sum(e) == 0:
            r = Poly.const(ctx.one, npar)
        else:
            i = next(k for k, v in enumerate(e) if v)
            prev = e[:i] + (e[i] - 1,) + e[i + 1:]
            r = restricted(prev) * images[i]
        cache[e] = r
        return r

    par_mons = {m: r for r, m in enumerate(monomials_of_degree(npar, d))}
    rows = [[ctx.zero] * len(mons) for _ in par_mons]
    for col, e in enumerate(mons):
        for pe, c in restricted(e).terms.items():
            rows[par_mons[pe]][col] = c
    return [r for r in rows if any(bool(c) for c in r)]


def linear_system_dimension(flats, d, ctx, subset=None, witnesses=None):
    """Dimension of the degree-d forms vanishing on every listed flat.

    Computed as the nullity of the stacked restriction conditions.  When
    `witnesses` (known members of the system) are supplied and they are
    linearly independent, a rank bound over a large prime field is used to
    pinch the nullity between the witness count and the modular nullity,
    which avoids the expensive rational elimination in the big cases; if
    the bounds do not meet, the exact elimination runs anyway.
    """
    chosen = flats if subset is None else [flats[k] for k in subset]
    nvars = flats[0].nvars
    mons = monomials_of_degree(nvars, d)
    rows = []
    for f in chosen:
        rows.extend(_restriction_rows(f, d, ctx, mons))
    if not rows:
        return len(mons)
    if witnesses is not None and ctx.kind == "qq":
        pinched = _pinch_nullity(rows, mons, witnesses, ctx)
        if pinched is not None:
            return pinched
    return len(mons) - la.rank(rows, ctx)


_PINCH_PRIME = (1 << 31) - 1


def _pinch_nullity(rows, mons, witnesses, ctx):
    """Sandwich the rational nullity using a mod-p rank and known members.

    Scaling each row to integers and reducing mod p can only lower the
    rank, so nullity_p >= nullity_QQ.  Independent witnesses give
    nullity_QQ >= #witnesses.  When the two meet, the value is exact.
    """
    p = _PINCH_PRIME
    int_rows = [_int_row(r, p) for r in rows]
    nullity_p = len(mons) - la.rank_mod_p(int_rows, p)
    # witness independence, also certified mod p (a nonzero minor lifts)
    col = {m: i for i, m in enumerate(mons)}
    wrows = []
    for w in witnesses:
        row = [ctx.zero] * len(mons)
        for e, c in w.terms.items():
            row[col[e]] = c
        wrows.append(_int_row(row, p))
    if la.rank_mod_p(wrows, p) == len(witnesses) and nullity_p == len(witnesses):
        return nullity_p
    return None


def _int_row(row, p):
    """Clear denominators and reduce mod p.

    Row scaling preserves rational rank, and reduction mod p can only
    drop rank, so the resulting bound stays valid even if p divided the
    scale; the pinch would then just fail closed into the exact path.
    """
    den = 1
    for c in row:
        den = den * c.denominator // _gcd(den, c.denominator)
    return [int(c * den) % p for c in row]


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@dataclass
class VeneroniMap:
    """The forward map: components[i] = x_i * Q[i], all of degree n."""

    n: int
    ctx: object
    flats: list
    Q: list
    components: list

    @property
    def xring(self):
        return PolyRing.coordinate(self.n, self.ctx)

    @property
    def yring(self):
        return PolyRing.coordinate(self.n, self.ctx, letter="y")


def vanishes_on_flat(p, flat, ctx):
    """Exact test: p restricted to the flat is the zero polynomial."""
    return restrict_to_span(p, parametrize_flat(flat, ctx)).is_zero()


def build_forward_map(flats, ctx, strategy="minor_dp"):
    """Build v_n and establish every construction invariant by checking it.

    Verifies, for each i: deg Q_i = n-1; Q_i vanishes identically on each
    flat j != i; Q_i is nonzero at every coordinate vertex; and the full
    component x_i Q_i vanishes on all n+1 flats.  Any failure raises a
    ConstructionError naming the first bad invariant.
    """
    n1 = len(flats)
    n = n1 - 1
    qs = [compute_Q(flats, i, ctx, strategy) for i in range(n1)]
    verts = [
        ProjPoint([ctx.one if k == i else ctx.zero for k in range(n1)], ctx)
        for i in range(n1)
    ]
    for i, q in enumerate(qs):
        for j in range(n1):
            if j != i and not vanishes_on_flat(q, flats[j], ctx):
                raise ConstructionError(f"Q_{i} does not vanish on flat {j}")
        for k, v in enumerate(verts):
            if not q.evaluate(v.coords):
                raise ConstructionError(f"Q_{i} vanishes at coordinate vertex {k}")
    components = [Poly.var(i, n1, ctx.one) * q for i, q in enumerate(qs)]
    for i, comp in enumerate(components):
        if comp.degree() != n or not comp.is_homogeneous():
            raise ConstructionError(f"component {i} is not homogeneous of degree {n}")
        for j in range(n1):
            if not vanishes_on_flat(comp, flats[j], ctx):
                raise ConstructionError(f"component {i} does not vanish on flat {j}")
    return VeneroniMap(n=n, ctx=ctx, flats=list(flats), Q=qs, components=components)


@dataclass
class InverseData:
    """The inverse map u_n: b-matrix, forms g_i, det(C_i), dual flats."""

    b: list  # (n+1) x (n+1) scalars, b[i][j] = 0 iff i = j
    g: list  # linear forms in the y-variables, row i of b
    inverse_components: list | None = None  # det(C_i), degree n
    dual_flats: list | None = None  # ideals (y_i, g_i)


def solve_b_matrix(vmap):
    """Exact coefficients b with f_i Q_i = sum_j b_{i,j} x_j Q_j.

    The components are stacked as columns over all degree-n monomials and
    each f_i Q_i is solved against them; the residual is re-expanded and
    must vanish identically.
    """
    ctx = vmap.ctx
    n1 = vmap.n + 1
    mons = monomials_of_degree(n1, vmap.n)
    col = {m: r for r, m in enumerate(mons)}
    a = [[ctx.zero] * n1 for _ in mons]
    for j, comp in enumerate(vmap.components):
        for e, c in comp.terms.items():
            a[col[e]][j] = c
    b = []
    for i in range(n1):
        target = vmap.flats[i].form2_poly() * vmap.Q[i]
        rhs = [ctx.zero] * len(mons)
        for e, c in target.terms.items():
            rhs[col[e]] = c
        sol = la.solve(a, rhs, ctx)
        if sol is None:
            raise ConstructionError(f"f_{i} Q_{i} is not in the component span")
        residual = target
        for j in range(n1):
            residual = residual - vmap.components[j].scale(sol[j])
        if not residual.is_zero():
            raise ConstructionError(f"b-matrix residual for row {i} is nonzero")
        for j in range(n1):
            if (i == j) != (not sol[j]):
                raise ConstructionError(
                    f"b[{i}][{j}] violates the zero pattern (got {sol[j]})"
                )
        b.append(sol)
    g = [Poly.from_linear(row) for row in b]
    return InverseData(b=b, g=g)


def build_matrix_C(vmap, inv):
    """Like B but in the y-variables, with -g_i replacing -f_i.

    The diagonal forms are rebuilt from the b rows (their defining data)
    rather than read from inv.g, so stale or tampered g forms cannot leak
    into the inverse.
    """
    n1 = vmap.n + 1
    rows = []
    for i in range(n1):
        row = []
        for k in range(n1):
            if k == i:
                row.append(-Poly.from_linear(inv.b[i]))
            else:
                row.append(Poly.var(k, n1, vmap.flats[i].a[k]))
        rows.append(row)
    return rows


def build_inverse_map(vmap, inv, strategy="minor_dp"):
    """Complete the inverse: components det(C_i) and the dual flats.

    Each det(C_i) must have degree n and vanish identically on every dual
    flat (y_j, g_j) with j != i.
    """
    ctx = vmap.ctx
    n1 = vmap.n + 1
    c = build_matrix_C(vmap, inv)
    comps = []
    for i in range(n1):
        d = la.det_poly_matrix(minor_matrix(c, i), strategy)
        if d.degree() != vmap.n:
            raise ConstructionError(f"det(C_{i}) has degree {d.degree()}")
        comps.append(d)
    duals = [Flat(i, tuple(inv.b[i])) for i in range(n1)]
    for f in duals:
        if not f.is_canonical():
            raise ConstructionError(f"dual flat {f.j} is not canonical")
    for i, d in enumerate(comps):
        for j in range(n1):
            if j != i and not vanishes_on_flat(d, duals[j], ctx):
                raise ConstructionError(
                    f"det(C_{i}) does not vanish on dual flat {j}"
                )
    inv.inverse_components = comps
    inv.dual_flats = duals
    return inv


def apply_map(components, p, ctx):
    """Evaluate the map at a point; error on the base locus."""
    vals = [c.evaluate(p.coords) for c in components]
    if not any(bool(v) for v in vals):
        raise BaseLocusError(f"point {p.format()} is in the base locus")
    return ProjPoint(vals, ctx)


def class_matrix(n):
    """Integer pullback matrix on the classes (H, flat_0, ..., flat_n).

    First row (n, n-1, ..., n-1), first column (n, -1, ..., -1), and below
    the corner the block with zero diagonal and -1 elsewhere.  The matrix
    acts on the n+2 listed classes and squares to the identity, which is
    asserted here.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    size = n + 2
    m = [[0] * size for _ in range(size)]
    m[0][0] = n
    for k in range(1, size):
        m[0][k] = n - 1
        m[k][0] = -1
        for l in range(1, size):
            if l != k:
                m[k][l] = -1
    if la.mat_mul(m, m) != la.identity(size):
        raise AssertionError("class matrix is not an involution")
    return m
