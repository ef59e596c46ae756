"""Projective points, codimension-2 flats, and transversal lines.

A flat is stored in canonical coordinates: its ideal is (x_j, f_j) where
f_j = sum_i a_{j,i} x_i with a_{j,j} = 0 and every other a_{j,i} nonzero.
Transversals through a point p are computed by intersecting the cone
hyperplanes <p, flat>: a line through p meets a flat exactly when it lies
inside that hyperplane, so the lines through p meeting every flat of a
query sweep out the common nullspace of the stacked cone forms.  Nullity 2
means a unique transversal, nullity d+1 >= 3 a d-dimensional family, and
nullity 1 no transversal at all.
"""

from dataclasses import dataclass, field

from . import exactla as la
from .mpoly import Poly
from .scalar import FieldCtx, seeded_rng

__all__ = [
    "ProjPoint",
    "Flat",
    "LineParam",
    "TransversalResult",
    "FlatsInstance",
    "cone_hyperplane",
    "transversal_through",
    "flat_intersection",
    "parametrize_flat",
    "restrict_to_span",
    "line_restrict",
    "meeting_param",
    "random_general_flats",
    "normalize_flats",
    "genericity_check",
]


class ProjPoint:
    """Point of P^n, normalized so the first nonzero coordinate is 1."""

    __slots__ = ("coords",)

    def __init__(self, coords, ctx):
        lead = next((c for c in coords if c), None)
        if lead is None:
            raise ValueError("projective point needs a nonzero coordinate")
        inv = ctx.inv(lead)
        self.coords = tuple(c * inv for c in coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __eq__(self, other):
        if isinstance(other, ProjPoint):
            return self.coords == other.coords
        return NotImplemented

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return f"({' : '.join(str(c) for c in self.coords)})"

    @classmethod
    def parse(cls, text, ctx):
        """Parse a comma-separated coordinate string like "1,2/3,0,5,1"."""
        parts = text.split(",")
        if len(parts) < 2:
            raise ValueError(f"point needs at least 2 coordinates: {text!r}")
        return cls([ctx.parse(s) for s in parts], ctx)

    def format(self):
        return ",".join(str(c) for c in self.coords)


def evaluate_form(coeffs, vec):
    """Value of the linear form with the given coefficients at a vector."""
    it = iter(zip(coeffs, vec))
    c, v = next(it)
    total = c * v
    for c, v in it:
        total = total + c * v
    return total


@dataclass(frozen=True)
class Flat:
    """Codimension-2 flat of P^n with ideal (x_j, f_j), in canonical form."""

    j: int
    a: tuple  # coefficients of f_j; a[j] = 0, a[i] != 0 otherwise

    @property
    def nvars(self):
        return len(self.a)

    def form_rows(self, ctx):
        """The two defining forms as coefficient vectors (x_j row first)."""
        e = [ctx.zero] * self.nvars
        e[self.j] = ctx.one
        return [e, list(self.a)]

    def form2_poly(self):
        return Poly.from_linear(self.a)

    def contains(self, pt):
        return (not pt[self.j]) and not evaluate_form(self.a, pt)

    def is_canonical(self):
        return not self.a[self.j] and all(
            bool(c) for i, c in enumerate(self.a) if i != self.j
        )


@dataclass(frozen=True)
class LineParam:
    """Line spanned by two independent points; substitutes to binary forms."""

    base: ProjPoint
    dir: ProjPoint

    def point_at(self, s, t, ctx):
        return ProjPoint([s * b + t * d for b, d in zip(self.base, self.dir)], ctx)


@dataclass
class TransversalResult:
    """Solution of the cone-hyperplane system for one query."""

    kind: str  # "unique" | "family" | "none"
    line: LineParam | None = None
    dim: int | None = None  # projective dimension d_p of the family span
    basis: list = field(default_factory=list)
    meeting_params: list = field(default_factory=list)  # per queried flat

    def distinct_meetings(self):
        """True when all recorded meeting parameters are pairwise distinct."""
        seen = []
        for m in self.meeting_params:
            if m == "contained":
                return False
            for s, t in seen:
                if s * m[1] == t * m[0]:
                    return False
            seen.append(m)
        return True


def cone_hyperplane(p, flat, ctx):
    """Coefficients of the hyperplane spanned by p and the flat.

    The form is f1(p)*f2 - f2(p)*f1; it vanishes at p and on the whole
    flat.  Returns None (vacuous, no constraint) when p lies on the flat.
    """
    r1, r2 = flat.form_rows(ctx)
    v1 = evaluate_form(r1, p)
    v2 = evaluate_form(r2, p)
    if not v1 and not v2:
        return None
    return [v1 * c2 - v2 * c1 for c1, c2 in zip(r1, r2)]


def meeting_param(line, flat, ctx):
    """Where the line meets the flat: (s, t), "contained", or None (misses).

    The line meets the flat iff the 2x2 matrix of the flat's forms at the
    two spanning points is singular; rank 0 means the line lies inside.
    """
    r1, r2 = flat.form_rows(ctx)
    m = [
        [evaluate_form(r1, line.base), evaluate_form(r1, line.dir)],
        [evaluate_form(r2, line.base), evaluate_form(r2, line.dir)],
    ]
    if m[0][0] * m[1][1] - m[0][1] * m[1][0]:
        return None
    for row in m:
        if row[0] or row[1]:
            return (row[1], -row[0])
    return "contained"


def transversal_through(p, flats, ctx):
    """All lines through p meeting every flat in the query.

    Stacks the non-vacuous cone forms and reads the answer off the nullity
    of the system (which always contains p itself).  Unique lines are
    checked on the spot: the returned line must meet every queried flat.
    """
    rows = []
    for f in flats:
        c = cone_hyperplane(p, f, ctx)
        if c is not None:
            rows.append(c)
    n1 = len(p.coords)
    basis = la.nullspace(rows, n1, ctx)
    nullity = len(basis)
    if nullity < 2:
        return TransversalResult(kind="none")
    pts = [ProjPoint(v, ctx) for v in basis]
    if nullity == 2:
        direction = next(pt for pt in pts if pt != p)
        line = LineParam(p, direction)
        meets = [meeting_param(line, f, ctx) for f in flats]
        if any(m is None for m in meets):
            raise RuntimeError("computed transversal fails a meeting condition")
        return TransversalResult(kind="unique", line=line, meeting_params=meets)
    # family: every line through p in the span meets all queried flats;
    # spot-check that on the basis members.
    for pt in pts:
        if pt == p:
            continue
        probe = LineParam(p, pt)
        if any(meeting_param(probe, f, ctx) is None for f in flats):
            raise RuntimeError("family member fails a meeting condition")
    return TransversalResult(kind="family", dim=nullity - 1, basis=pts)


def flat_intersection(a, b, ctx):
    """Basis (list of points) of the intersection of two flats."""
    rows = a.form_rows(ctx) + b.form_rows(ctx)
    return [ProjPoint(v, ctx) for v in la.nullspace(rows, a.nvars, ctx)]


def parametrize_flat(f, ctx):
    """n-1 points spanning the flat."""
    return [ProjPoint(v, ctx) for v in la.nullspace(f.form_rows(ctx), f.nvars, ctx)]


def restrict_to_span(p, pts):
    """Restrict a polynomial to the span of the given points.

    Substitutes x_i -> sum_m pts[m][i] * s_m, one parameter per point; the
    result is the zero polynomial exactly when p vanishes on the whole span.
    """
    k = len(pts)
    images = [
        Poly.from_linear([pt[i] for pt in pts]) for i in range(len(pts[0].coords))
    ]
    assert all(img.nvars == k for img in images)
    return p.substitute(images)


def line_restrict(p, line):
    """Binary form in (s, t): the polynomial restricted to the line."""
    return restrict_to_span(p, [line.base, line.dir])


# ---- instance generation and serialization --------------------------------


@dataclass
class FlatsInstance:
    """A generated set of n+1 canonical flats plus its provenance."""

    n: int
    seed: int
    bound: int
    ctx: FieldCtx
    flats: list
    retries: int = 0

    def to_dict(self, version):
        return {
            "n": self.n,
            "seed": self.seed,
            "field": self.ctx.describe(),
            "bound": self.bound,
            "version": version,
            "retries": self.retries,
            "flats": [
                {"j": f.j, "f2": [str(c) for c in f.a]} for f in self.flats
            ],
        }

    @classmethod
    def from_dict(cls, d):
        ctx = FieldCtx.from_description(d["field"])
        n = d["n"]
        flats = []
        for rec in d["flats"]:
            a = tuple(ctx.parse(s) for s in rec["f2"])
            if len(a) != n + 1:
                raise ValueError(f"flat {rec['j']}: expected {n + 1} coefficients")
            flats.append(Flat(rec["j"], a))
        if [f.j for f in flats] != list(range(n + 1)):
            raise ValueError("flats must be indexed 0..n in order")
        for f in flats:
            if not f.is_canonical():
                raise ValueError(f"flat {f.j} is not in canonical form")
        return cls(
            n=n,
            seed=d["seed"],
            bound=d.get("bound", 9),
            ctx=ctx,
            flats=flats,
            retries=d.get("retries", 0),
        )


def random_general_flats(n, seed, ctx=None, bound=9, max_retries=32):
    """n+1 random canonical flats in P^n certified by genericity_check.

    Deterministic in (seed, field, bound).  Resamples with a derived seed
    on a genericity failure; the retry count is recorded on the instance.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if ctx is None:
        ctx = FieldCtx.rationals()
    for attempt in range(max_retries):
        rng = seeded_rng(seed, "flats", attempt)
        flats = []
        for j in range(n + 1):
            a = [
                ctx.zero if i == j else ctx.random_nonzero(rng, bound)
                for i in range(n + 1)
            ]
            flats.append(Flat(j, tuple(a)))
        report = genericity_check(flats, ctx, seed=seed, attempt=attempt)
        if report.ok:
            return FlatsInstance(n, seed, bound, ctx, flats, retries=attempt)
    raise RuntimeError(
        f"no generic instance after {max_retries} attempts (n={n}, seed={seed})"
    )


def normalize_flats(raw, ctx):
    """Bring n+1 flats given by arbitrary form pairs into canonical shape.

    `raw` lists (f_j1, f_j2) coefficient vectors.  The coordinate change
    sends f_j1 to x_j (so its matrix is the stack of the first forms); each
    second form is rewritten in the new coordinates and reduced mod x_j.
    Returns (flats, change matrix).  Fails if the first forms are dependent
    or if a reduced coefficient a_{j,i} (i != j) vanishes (non-general
    input).
    """
    n1 = len(raw)
    first = [list(r[0]) for r in raw]
    if len(first[0]) != n1:
        raise ValueError("expected n+1 flats in P^n")
    if la.rank(first, ctx) != n1:
        raise ValueError("first forms are linearly dependent")
    # A form c (a row covector) becomes c . inv(F1) in the new coordinates.
    inv_cols = []
    for k in range(n1):
        e = [ctx.one if i == k else ctx.zero for i in range(n1)]
        inv_cols.append(la.solve(first, e, ctx))
    flats = []
    for j, (_, f2) in enumerate(raw):
        c = [
            sum((f2[r] * inv_cols[k][r] for r in range(n1)), ctx.zero)
            for k in range(n1)
        ]
        c[j] = ctx.zero  # subtract the a_{j,j} multiple of x_j
        for i in range(n1):
            if i != j and not c[i]:
                raise ValueError(
                    f"flat {j}: coefficient a_{j},{i} vanishes after normalization"
                )
        flats.append(Flat(j, tuple(c)))
    return flats, first


@dataclass
class GenericityReport:
    ok: bool
    failures: list
    retries_sampled: int = 0

    def first_failure(self):
        return self.failures[0] if self.failures else None


def genericity_check(flats, ctx, seed=0, attempt=0, sample_points=3):
    """Certify that a flat list is general enough for the whole pipeline.

    Checks (a) canonical nonzero pattern, (b) pairwise intersections of the
    expected dimension, (c) unique transversals through sampled general
    points for every (n-1)-subset, (d) every det(B_i) is exactly divisible
    by x_i.  Failures are named; the report carries all of them.
    """
    failures = []
    n1 = len(flats)
    n = n1 - 1
    for f in flats:
        if not f.is_canonical():
            failures.append(f"a: flat {f.j} violates the canonical zero pattern")
    if not failures:
        expected = max(n - 4, -1)  # projective dimension, -1 meaning empty
        for i in range(n1):
            for j in range(i + 1, n1):
                got = len(flat_intersection(flats[i], flats[j], ctx)) - 1
                if got != expected:
                    failures.append(
                        f"b: intersection {i},{j} has dimension {got},"
                        f" expected {expected}"
                    )
    if not failures:
        rng = seeded_rng(seed, "genericity", attempt)
        from itertools import combinations

        subsets = list(combinations(range(n1), n - 1))
        for _ in range(sample_points):
            p = ProjPoint([ctx.random_nonzero(rng) for _ in range(n1)], ctx)
            for sub in subsets:
                r = transversal_through(p, [flats[k] for k in sub], ctx)
                if r.kind != "unique":
                    failures.append(
                        f"c: point {p.format()} with flats {sub} gave {r.kind}"
                    )
                    break
            else:
                continue
            break
    if not failures:
        from .maps import build_matrix_B, minor_matrix

        b = build_matrix_B(flats, ctx)
        for i in range(n1):
            det = la.det(minor_matrix(b, i))
            try:
                det.div_var(i)
            except ValueError:
                failures.append(f"d: det(B_{i}) is not divisible by x{i}")
    return GenericityReport(ok=not failures, failures=failures)
