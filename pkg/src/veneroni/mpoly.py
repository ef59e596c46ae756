"""Sparse multivariate polynomials with exact coefficients.

A polynomial is a dict mapping exponent tuples to nonzero coefficients;
coefficients are whatever the active field context produces (rationals or
prime-field elements) and all arithmetic goes through their operators, so
one implementation serves both fields.  Terms are kept unordered in the
dict and sorted into graded reverse-lexicographic order only at the edges
(printing, serialization, lead-term extraction), which keeps the hot
paths (multiplication, substitution) cheap.
"""


def _grevlex(e):
    # Graded reverse-lex key: higher total degree wins, ties broken so the
    # term with the *smaller* trailing exponents is larger.
    return (sum(e), tuple(-k for k in reversed(e)))


class Poly:
    """Sparse polynomial in `nvars` variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        self.terms = {}
        if terms:
            for e, c in terms.items():
                if c:
                    self.terms[e] = c

    # ---- constructors -------------------------------------------------

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    @classmethod
    def const(cls, c, nvars):
        p = cls(nvars)
        if c:
            p.terms[(0,) * nvars] = c
        return p

    @classmethod
    def var(cls, i, nvars, one=1):
        """The variable x_i, with coefficient `one` from the active field."""
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for {nvars} variables")
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): one})

    @classmethod
    def from_linear(cls, coeffs):
        """The linear form sum_i coeffs[i] * x_i."""
        n = len(coeffs)
        p = cls(n)
        for i, c in enumerate(coeffs):
            if c:
                e = [0] * n
                e[i] = 1
                p.terms[tuple(e)] = c
        return p

    # ---- basic queries ------------------------------------------------

    def is_zero(self):
        return not self.terms

    def degree(self):
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self):
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def lead(self):
        """(exponent, coefficient) of the grevlex-leading term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=_grevlex)
        return e, self.terms[e]

    def coeff(self, e):
        return self.terms.get(tuple(e), 0)

    def sorted_terms(self):
        """Terms in descending grevlex order."""
        return sorted(self.terms.items(), key=lambda t: _grevlex(t[0]), reverse=True)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # ---- arithmetic ---------------------------------------------------

    def _check(self, other):
        if self.nvars != other.nvars:
            raise ValueError("polynomials in different rings")

    def __add__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            elif e in out:
                del out[e]
        p = Poly(self.nvars)
        p.terms = out
        return p

    def __sub__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        p = Poly(self.nvars)
        p.terms = {e: -c for e, c in self.terms.items()}
        return p

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        self._check(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(e, 0) + ca * cb
                if s:
                    out[e] = s
                elif e in out:
                    del out[e]
        p = Poly(self.nvars)
        p.terms = out
        return p

    def scale(self, c):
        """Multiply by a scalar."""
        p = Poly(self.nvars)
        if c:
            p.terms = {e: k * c for e, k in self.terms.items()}
        return p

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        if result is None:
            one = next(iter(self.terms.values()), None)
            unit = 1 if one is None else one - one + 1  # 1 in the coefficient field
            return Poly.const(unit, self.nvars)
        return result

    # ---- division -----------------------------------------------------

    def div_var(self, i):
        """Exact quotient by the variable x_i; raises if any term lacks it."""
        out = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                raise ValueError(f"not divisible by x{i}")
            out[e[:i] + (e[i] - 1,) + e[i + 1:]] = c
        p = Poly(self.nvars)
        p.terms = out
        return p

    def exact_div(self, g):
        """Exact quotient self/g; raises ValueError when g does not divide."""
        if not isinstance(g, Poly):
            raise TypeError("divisor must be a polynomial")
        self._check(g)
        if g.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        eg, cg = g.lead()
        q = Poly(self.nvars)
        r = self
        while r.terms:
            er, cr = r.lead()
            de = tuple(a - b for a, b in zip(er, eg))
            if any(d < 0 for d in de):
                raise ValueError("not an exact multiple")
            t = Poly(self.nvars)
            t.terms = {de: cr / cg}
            q = q + t
            r = r - t * g
        return q

    def partial(self, i):
        """Partial derivative with respect to x_i."""
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                out[e[:i] + (e[i] - 1,) + e[i + 1:]] = c * e[i]
        p = Poly(self.nvars)
        p.terms = out
        return p

    # ---- evaluation and substitution -----------------------------------

    def evaluate(self, point):
        """Value at a tuple of field elements (one per variable)."""
        if len(point) != self.nvars:
            raise ValueError("point length does not match variable count")
        pows = [[None] for _ in range(self.nvars)]  # pows[i][k] = point[i]**k
        total = None
        for e, c in self.terms.items():
            v = c
            for i, k in enumerate(e):
                if k == 0:
                    continue
                pi = pows[i]
                while len(pi) <= k:
                    pi.append(point[i] if len(pi) == 1 else pi[-1] * point[i])
                v = v * pi[k]
            total = v if total is None else total + v
        if total is None:
            z = point[0] - point[0] if point else 0
            return z
        return total

    def substitute(self, images):
        """Ring map x_i -> images[i]; images are polynomials in a common ring.

        Nonzero images must be homogeneous of one shared degree, so that
        homogeneous inputs stay homogeneous (zero images are fine and just
        kill their variable).
        """
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        degs = {im.degree() for im in images if not im.is_zero()}
        if len(degs) > 1 or any(not im.is_homogeneous() for im in images):
            raise ValueError("images must share one homogeneous degree")
        m = images[0].nvars
        pows = [[None] for _ in range(self.nvars)]
        total = Poly.zero(m)
        for e, c in self.sorted_terms():
            v = Poly.const(c, m)
            for i, k in enumerate(e):
                if k == 0:
                    continue
                pi = pows[i]
                while len(pi) <= k:
                    pi.append(images[i] if len(pi) == 1 else pi[-1] * images[i])
                v = v * pi[k]
            total = total + v
        return total

    # ---- normal forms ---------------------------------------------------

    def primitive(self):
        """Canonical scalar multiple of self.

        Over the rationals: integer coefficients with collective gcd 1 and a
        positive leading coefficient.  Over a prime field: monic leading
        coefficient.  The zero polynomial is returned unchanged.
        """
        if not self.terms:
            return self
        _, lc = self.lead()
        if hasattr(lc, "r"):  # prime-field element
            return self.scale(lc.inv())
        from math import gcd, lcm

        den = lcm(*(c.denominator for c in self.terms.values()))
        num = gcd(*(int(c.numerator) for c in self.terms.values()))
        s = type(lc)(den, num)
        if lc < 0:
            s = -s
        return self.scale(s)

    def proportional_to(self, other):
        """True when self = c * other for some nonzero scalar c."""
        if not isinstance(other, Poly) or self.nvars != other.nvars:
            return False
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        if set(self.terms) != set(other.terms):
            return False
        _, ca = self.lead()
        _, cb = other.lead()
        return self.scale(cb) == other.scale(ca)

    # ---- text and JSON --------------------------------------------------

    def text(self, names=None):
        """Human-readable form, terms in descending grevlex order."""
        if not self.terms:
            return "0"
        if names is None:
            names = [f"x{i}" for i in range(self.nvars)]
        parts = []
        for e, c in self.sorted_terms():
            mono = [
                names[i] if k == 1 else f"{names[i]}^{k}"
                for i, k in enumerate(e)
                if k
            ]
            cs = str(c)
            if mono and cs == "1":
                body = "*".join(mono)
            elif mono and cs == "-1":
                body = "-" + "*".join(mono)
            else:
                body = "*".join([cs] + mono)
            parts.append(body)
        out = parts[0]
        for body in parts[1:]:
            out += " - " + body[1:] if body.startswith("-") else " + " + body
        return out

    def to_dict(self):
        """JSON form: degree plus terms in canonical (grevlex-descending) order."""
        return {
            "degree": self.degree(),
            "terms": [{"c": str(c), "e": list(e)} for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_dict(cls, d, nvars, ctx):
        p = cls(nvars)
        for t in d["terms"]:
            e = tuple(t["e"])
            if len(e) != nvars:
                raise ValueError("exponent length does not match variable count")
            c = ctx.parse(t["c"])
            if c:
                p.terms[e] = p.terms.get(e, ctx.zero) + c
        deg = p.degree()
        if d.get("degree", deg) != deg:
            raise ValueError(f"declared degree {d['degree']} but terms have degree {deg}")
        return p

    def __repr__(self):
        return f"Poly({self.text()})"


class ParseError(ValueError):
    """Syntax or name error in polynomial text, carrying the offset."""

    def __init__(self, message, pos):
        super().__init__(f"{message} (at offset {pos})")
        self.pos = pos


def parse_poly(text, names, ctx):
    """Parse a signed sum of terms like "3*x0^2*x1 - 2/5*x2 + 7".

    A term is an optional coefficient (integer or integer/integer) joined
    by '*' to a product of variables, each optionally raised with '^'.
    Inverse of Poly.text for the same name list.
    """
    index = {name: i for i, name in enumerate(names)}
    nvars = len(names)
    i = 0
    size = len(text)

    def skip_ws(k):
        while k < size and text[k].isspace():
            k += 1
        return k

    def read_int(k):
        start = k
        while k < size and text[k].isdigit():
            k += 1
        if k == start:
            raise ParseError("expected a number", start)
        return int(text[start:k]), k

    def read_name(k):
        start = k
        while k < size and (text[k].isalnum() or text[k] == "_"):
            k += 1
        name = text[start:k]
        if name not in index:
            raise ParseError(f"unknown variable {name!r}", start)
        return index[name], k

    result = Poly.zero(nvars)
    i = skip_ws(i)
    if i == size:
        raise ParseError("empty polynomial", 0)
    first = True
    while i < size:
        sign = 1
        if text[i] in "+-":
            if text[i] == "-":
                sign = -1
            i = skip_ws(i + 1)
        elif not first:
            raise ParseError(f"expected '+' or '-', got {text[i]!r}", i)
        first = False
        coeff = None
        expo = [0] * nvars
        saw_factor = False
        while True:
            if i < size and text[i].isdigit():
                if coeff is not None or saw_factor:
                    raise ParseError("coefficient must come first in a term", i)
                num, i = read_int(i)
                den = 1
                if i < size and text[i] == "/":
                    den, i = read_int(i + 1)
                    if den == 0:
                        raise ParseError("zero denominator", i - 1)
                coeff = ctx.from_int(num) if den == 1 else ctx.from_int(num) / ctx.from_int(den)
            elif i < size and (text[i].isalpha() or text[i] == "_"):
                v, i = read_name(i)
                k = 1
                if i < size and text[i] == "^":
                    k, i = read_int(i + 1)
                expo[v] += k
                saw_factor = True
            else:
                raise ParseError("expected a coefficient or variable", i)
            i = skip_ws(i)
            if i < size and text[i] == "*":
                i = skip_ws(i + 1)
                continue
            break
        c = ctx.one if coeff is None else coeff
        if sign < 0:
            c = -c
        result = result + Poly(nvars, {tuple(expo): c})
        i = skip_ws(i)
    return result


class PolyRing:
    """Variable names and field bundled for parsing and printing."""

    __slots__ = ("nvars", "names", "ctx")

    def __init__(self, names, ctx):
        self.nvars = len(names)
        self.names = list(names)
        self.ctx = ctx

    @classmethod
    def coordinate(cls, n, ctx, letter="x"):
        """The coordinate ring of P^n with variables letter0..lettern."""
        return cls([f"{letter}{i}" for i in range(n + 1)], ctx)

    def zero(self):
        return Poly.zero(self.nvars)

    def const(self, c):
        return Poly.const(self.ctx.convert(c), self.nvars)

    def var(self, i):
        return Poly.var(i, self.nvars, self.ctx.one)

    def from_linear(self, coeffs):
        return Poly.from_linear([self.ctx.convert(c) for c in coeffs])

    def parse(self, text):
        return parse_poly(text, self.names, self.ctx)

    def text(self, p):
        return p.text(self.names)
