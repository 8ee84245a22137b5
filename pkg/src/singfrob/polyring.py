"""Exact polynomial arithmetic over the rationals for the singularity calculus.

Everything in this package lives in rings of the shape

    Q[x_1..x_N][s_1..s_m][z, z^-1]

where the x_i are coordinates on the fibre, the s_a are deformation (or flat)
parameters, and z is the spectral variable.  A polynomial is stored as a dict
mapping exponent keys ``(xexp, sexp, zexp)`` -- two tuples of non-negative
ints and one possibly negative int -- to nonzero ``Fraction`` coefficients.
All arithmetic is exact; nothing here ever touches floating point.

A :class:`PolyRing` fixes the variable names; :class:`MPoly` instances belong
to a ring and refuse to mix with polynomials from a ring with different
names.  The ring also owns the parser and printer, which agree on a small
strict grammar (explicit ``*``, ``^`` powers, ``p/q`` rational literals).
"""

import re
from fractions import Fraction

from .errors import PolyParseError

_TOKEN_RE = re.compile(r"(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|\^|\+|\-|\*|/|\(|\))|(\S)")


def _as_fraction(value):
    """Coerce ints, Fractions, and 'p/q' strings to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_fraction(q):
    """Render a Fraction as 'p' or 'p/q' (the serialization used everywhere)."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class PolyRing:
    """Variable context: x-variables, s-variables, and the reserved name z."""

    def __init__(self, xnames, snames=()):
        self.xnames = tuple(xnames)
        self.snames = tuple(snames)
        self.nx = len(self.xnames)
        self.ns = len(self.snames)
        seen = {}
        for i, name in enumerate(self.xnames):
            seen[name] = ("x", i)
        for i, name in enumerate(self.snames):
            if name in seen:
                raise ValueError(f"duplicate variable name {name!r}")
            seen[name] = ("s", i)
        if "z" in seen:
            raise ValueError("the name 'z' is reserved for the spectral variable")
        if len(seen) != self.nx + self.ns:
            raise ValueError("duplicate variable name")
        seen["z"] = ("z", 0)
        self._lookup = seen
        self._zero_x = (0,) * self.nx
        self._zero_s = (0,) * self.ns

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.xnames == other.xnames
            and self.snames == other.snames
        )

    def __repr__(self):
        return f"PolyRing(x={self.xnames}, s={self.snames})"

    # -- constructors ------------------------------------------------------

    def zero(self):
        return MPoly(self, {})

    def one(self):
        return self.const(1)

    def const(self, c):
        c = _as_fraction(c)
        if c == 0:
            return self.zero()
        return MPoly(self, {(self._zero_x, self._zero_s, 0): c})

    def x(self, i):
        e = [0] * self.nx
        e[i] = 1
        return MPoly(self, {(tuple(e), self._zero_s, 0): Fraction(1)})

    def s(self, i):
        e = [0] * self.ns
        e[i] = 1
        return MPoly(self, {(self._zero_x, tuple(e), 0): Fraction(1)})

    def z(self, k=1):
        return MPoly(self, {(self._zero_x, self._zero_s, k): Fraction(1)})

    def variable(self, name):
        kind, i = self._lookup.get(name, (None, None))
        if kind == "x":
            return self.x(i)
        if kind == "s":
            return self.s(i)
        if kind == "z":
            return self.z()
        raise KeyError(f"unknown variable {name!r}")

    def monomial(self, coeff, xexp=None, sexp=None, zexp=0):
        xexp = self._zero_x if xexp is None else tuple(xexp)
        sexp = self._zero_s if sexp is None else tuple(sexp)
        if len(xexp) != self.nx or len(sexp) != self.ns:
            raise ValueError("exponent tuple length does not match the ring")
        c = _as_fraction(coeff)
        if c == 0:
            return self.zero()
        return MPoly(self, {(xexp, sexp, zexp): c})

    def from_terms(self, terms):
        return MPoly(self, {k: v for k, v in terms.items() if v != 0})

    def convert(self, p):
        """Re-home a polynomial from a ring whose variables are a subset of ours."""
        if p.ring == self:
            return p
        xmap = []
        for name in p.ring.xnames:
            kind, i = self._lookup.get(name, (None, None))
            if kind != "x":
                raise ValueError(f"variable {name!r} is not an x-variable here")
            xmap.append(i)
        smap = []
        for name in p.ring.snames:
            kind, i = self._lookup.get(name, (None, None))
            if kind != "s":
                raise ValueError(f"variable {name!r} is not an s-variable here")
            smap.append(i)
        terms = {}
        for (xe, se, ze), c in p.terms.items():
            nxe = [0] * self.nx
            for j, e in enumerate(xe):
                nxe[xmap[j]] = e
            nse = [0] * self.ns
            for j, e in enumerate(se):
                nse[smap[j]] = e
            terms[(tuple(nxe), tuple(nse), ze)] = c
        return MPoly(self, terms)

    # -- parsing -----------------------------------------------------------

    def parse(self, text):
        """Parse polynomial text in the strict grammar.

        Grammar: sums/differences of products of factors; a factor is a
        rational literal ``p`` or ``p/q``, a variable name, a parenthesised
        expression, or any of those raised to an integer power with ``^`` or
        ``**`` (negative exponents are allowed for z only).  Multiplication
        is written ``*``; a product may be divided by an integer literal.
        """
        tokens = []
        pos = 0
        for m in _TOKEN_RE.finditer(text):
            if m.group(4):
                raise PolyParseError(f"unexpected character {m.group(4)!r}", m.start())
            if m.group(1):
                tokens.append(("int", int(m.group(1)), m.start()))
            elif m.group(2):
                tokens.append(("name", m.group(2), m.start()))
            else:
                tokens.append(("op", m.group(3), m.start()))
            pos = m.end()
        tokens.append(("end", None, len(text)))
        parser = _Parser(self, tokens)
        result = parser.parse_expr()
        parser.expect_end()
        return result


class _Parser:
    def __init__(self, ring, tokens):
        self.ring = ring
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_end(self):
        kind, val, pos = self.peek()
        if kind != "end":
            raise PolyParseError(f"unexpected trailing input {val!r}", pos)

    def parse_expr(self):
        kind, val, _ = self.peek()
        negate = False
        if kind == "op" and val in "+-":
            self.advance()
            negate = val == "-"
        acc = self.parse_product()
        if negate:
            acc = -acc
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                term = self.parse_product()
                acc = acc - term if val == "-" else acc + term
            else:
                return acc

    def parse_product(self):
        acc = self.parse_factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.advance()
                acc = acc * self.parse_factor()
            elif kind == "op" and val == "/":
                self.advance()
                dkind, dval, dpos = self.advance()
                if dkind != "int":
                    raise PolyParseError("expected an integer denominator", dpos)
                if dval == 0:
                    raise PolyParseError("zero denominator", dpos)
                acc = acc * Fraction(1, dval)
            else:
                return acc

    def parse_factor(self):
        kind, val, pos = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            return -self.parse_factor()
        base = self.parse_atom()
        kind, val, _ = self.peek()
        if kind == "op" and val in ("^", "**"):
            self.advance()
            exp = self.parse_exponent()
            if exp < 0:
                if not base.is_z():
                    raise PolyParseError("negative powers are allowed for z only", pos)
                return self.ring.z(exp)
            return base**exp
        return base

    def parse_exponent(self):
        kind, val, pos = self.advance()
        sign = 1
        if kind == "op" and val == "-":
            sign = -1
            kind, val, pos = self.advance()
        if kind != "int":
            raise PolyParseError("expected an integer exponent", pos)
        return sign * val

    def parse_atom(self):
        kind, val, pos = self.advance()
        if kind == "int":
            nxt_kind, nxt_val, _ = self.peek()
            if nxt_kind == "op" and nxt_val == "/":
                self.advance()
                dkind, dval, dpos = self.advance()
                if dkind != "int":
                    raise PolyParseError("expected an integer denominator", dpos)
                if dval == 0:
                    raise PolyParseError("zero denominator", dpos)
                return self.ring.const(Fraction(val, dval))
            return self.ring.const(val)
        if kind == "name":
            try:
                return self.ring.variable(val)
            except KeyError:
                raise PolyParseError(f"unknown variable {val!r}", pos) from None
        if kind == "op" and val == "(":
            inner = self.parse_expr()
            ckind, cval, cpos = self.advance()
            if not (ckind == "op" and cval == ")"):
                raise PolyParseError("expected ')'", cpos)
            return inner
        raise PolyParseError(f"unexpected token {val!r}", pos)


def _term_sort_key(key):
    xe, se, ze, = key
    return (sum(xe) + sum(se), xe, se, ze)


class MPoly:
    """Immutable-by-convention exact polynomial attached to a PolyRing."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms

    # -- basic protocol ----------------------------------------------------

    def _check(self, other):
        if self.ring != other.ring:
            raise ValueError("polynomials from different rings")

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring.xnames, self.ring.snames, frozenset(self.terms.items())))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        self._check(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            c = terms.get(k, 0) + v
            if c:
                terms[k] = c
            else:
                terms.pop(k, None)
        return MPoly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.ring, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if c == 0:
                return self.ring.zero()
            return MPoly(self.ring, {k: v * c for k, v in self.terms.items()})
        self._check(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out = {}
        for (xa, sa, za), ca in a.items():
            for (xb, sb, zb), cb in b.items():
                key = (
                    tuple(p + q for p, q in zip(xa, xb)),
                    tuple(p + q for p, q in zip(sa, sb)),
                    za + zb,
                )
                c = out.get(key, 0) + ca * cb
                if c:
                    out[key] = c
                else:
                    del out[key]
        return MPoly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative powers of polynomials are not defined")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __repr__(self):
        return f"MPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for key in sorted(self.terms, key=_term_sort_key, reverse=True):
            coeff = self.terms[key]
            mono = self._monomial_str(key)
            if mono == "1":
                body = format_fraction(abs(coeff))
            elif abs(coeff) == 1:
                body = mono
            else:
                body = f"{format_fraction(abs(coeff))}*{mono}"
            if not bits:
                bits.append(body if coeff > 0 else f"-{body}")
            else:
                bits.append(f"+ {body}" if coeff > 0 else f"- {body}")
        return " ".join(bits)

    def _monomial_str(self, key):
        xe, se, ze = key
        parts = []
        for name, e in zip(self.ring.xnames, xe):
            if e == 1:
                parts.append(name)
            elif e:
                parts.append(f"{name}^{e}")
        for name, e in zip(self.ring.snames, se):
            if e == 1:
                parts.append(name)
            elif e:
                parts.append(f"{name}^{e}")
        if ze == 1:
            parts.append("z")
        elif ze:
            parts.append(f"z^{ze}")
        return "*".join(parts) if parts else "1"

    # -- structure queries ---------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_z(self):
        return self.terms == {(self.ring._zero_x, self.ring._zero_s, 1): Fraction(1)}

    def constant(self):
        """Coefficient of the monomial 1."""
        return self.terms.get((self.ring._zero_x, self.ring._zero_s, 0), Fraction(0))

    def coeff(self, xexp=None, sexp=None, zexp=0):
        xexp = self.ring._zero_x if xexp is None else tuple(xexp)
        sexp = self.ring._zero_s if sexp is None else tuple(sexp)
        return self.terms.get((xexp, sexp, zexp), Fraction(0))

    def is_x_free(self):
        return all(not any(xe) for xe, _, _ in self.terms)

    def is_s_free(self):
        return all(not any(se) for _, se, _ in self.terms)

    def is_z_free(self):
        return all(ze == 0 for _, _, ze in self.terms)

    def x_degree(self):
        return max((sum(xe) for xe, _, _ in self.terms), default=-1)

    def s_degree(self):
        return max((sum(se) for _, se, _ in self.terms), default=-1)

    def z_min(self):
        return min((ze for _, _, ze in self.terms), default=0)

    def z_max(self):
        return max((ze for _, _, ze in self.terms), default=0)

    def sorted_terms(self):
        return [(k, self.terms[k]) for k in sorted(self.terms, key=_term_sort_key, reverse=True)]

    # -- calculus ------------------------------------------------------------

    def diff_x(self, i):
        out = {}
        for (xe, se, ze), c in self.terms.items():
            if xe[i]:
                ne = list(xe)
                ne[i] -= 1
                out[(tuple(ne), se, ze)] = c * xe[i]
        return MPoly(self.ring, out)

    def diff_s(self, i):
        out = {}
        for (xe, se, ze), c in self.terms.items():
            if se[i]:
                ne = list(se)
                ne[i] -= 1
                out[(xe, tuple(ne), ze)] = c * se[i]
        return MPoly(self.ring, out)

    # -- z bookkeeping ---------------------------------------------------------

    def mul_z(self, k):
        """Multiply by z^k (k may be negative)."""
        return MPoly(self.ring, {(xe, se, ze + k): c for (xe, se, ze), c in self.terms.items()})

    def z_coefficient(self, k):
        """The z^k coefficient, as a z-free polynomial."""
        return MPoly(
            self.ring,
            {(xe, se, 0): c for (xe, se, ze), c in self.terms.items() if ze == k},
        )

    def z_support(self):
        return sorted({ze for _, _, ze in self.terms})

    def z_pos_part(self):
        return MPoly(self.ring, {k: c for k, c in self.terms.items() if k[2] > 0})

    def z_nonpos_part(self):
        return MPoly(self.ring, {k: c for k, c in self.terms.items() if k[2] <= 0})

    # -- s bookkeeping ---------------------------------------------------------

    def s_slice(self, d):
        """The part of total s-degree exactly d."""
        return MPoly(self.ring, {k: c for k, c in self.terms.items() if sum(k[1]) == d})

    def s_truncate(self, cap):
        """Drop every term of total s-degree greater than cap."""
        return MPoly(self.ring, {k: c for k, c in self.terms.items() if sum(k[1]) <= cap})

    def subs_s(self, values):
        """Substitute exact rational values for all s-variables.

        ``values`` maps s-variable names to Fractions (or 'p/q' strings).
        """
        vals = [None] * self.ring.ns
        for name, v in values.items():
            kind, i = self.ring._lookup.get(name, (None, None))
            if kind != "s":
                raise KeyError(f"{name!r} is not an s-variable of this ring")
            vals[i] = _as_fraction(v)
        missing = [n for n, v in zip(self.ring.snames, vals) if v is None]
        if missing:
            raise KeyError(f"missing values for {missing}")
        out = {}
        for (xe, se, ze), c in self.terms.items():
            for v, e in zip(vals, se):
                if e:
                    c = c * v**e
            if c:
                key = (xe, self.ring._zero_s, ze)
                acc = out.get(key, 0) + c
                if acc:
                    out[key] = acc
                else:
                    del out[key]
        return MPoly(self.ring, out)


def mul_s_truncated(a, b, cap):
    """Product of a and b, discarding terms of s-degree above cap as it goes."""
    a._check(b)
    out = {}
    bterms = b.terms.items()
    for (xa, sa, za), ca in a.terms.items():
        da = sum(sa)
        for (xb, sb, zb), cb in bterms:
            if da + sum(sb) > cap:
                continue
            key = (
                tuple(p + q for p, q in zip(xa, xb)),
                tuple(p + q for p, q in zip(sa, sb)),
                za + zb,
            )
            c = out.get(key, 0) + ca * cb
            if c:
                out[key] = c
            else:
                del out[key]
    return MPoly(a.ring, out)


def substitute_s(p, target_ring, images, cap=None):
    """Map a polynomial to target_ring, sending s_i to images[i].

    The x-variables (and z) are carried across by name; each image is a
    polynomial of the target ring.  With ``cap`` given, products are
    s-truncated at that total degree, which is how series composition at a
    working order is done throughout the package.
    """
    base = target_ring.zero()
    xmap = []
    for name in p.ring.xnames:
        kind, i = target_ring._lookup.get(name, (None, None))
        if kind != "x":
            raise ValueError(f"variable {name!r} missing from target ring")
        xmap.append(i)
    out = base
    power_cache = {}

    def image_power(i, e):
        key = (i, e)
        if key not in power_cache:
            if e == 0:
                power_cache[key] = target_ring.one()
            else:
                prev = image_power(i, e - 1)
                prod = prev * images[i]
                if cap is not None:
                    prod = prod.s_truncate(cap)
                power_cache[key] = prod
        return power_cache[key]

    for (xe, se, ze), c in p.terms.items():
        nxe = [0] * target_ring.nx
        for j, e in enumerate(xe):
            nxe[xmap[j]] = e
        term = target_ring.monomial(c, tuple(nxe), None, ze)
        for i, e in enumerate(se):
            if e:
                term = term * image_power(i, e)
                if cap is not None:
                    term = term.s_truncate(cap)
        out = out + term
    return out


def poly_det(rows):
    """Exact determinant of a square matrix of MPoly entries (Laplace expansion)."""
    n = len(rows)
    if n == 0:
        raise ValueError("empty matrix")
    ring = rows[0][0].ring
    if n == 1:
        return rows[0][0]
    total = ring.zero()
    for j in range(n):
        entry = rows[0][j]
        if entry.is_zero():
            continue
        minor = [[rows[i][k] for k in range(n) if k != j] for i in range(1, n)]
        term = entry * poly_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def hessian_det(ring, f):
    """Determinant of the matrix of second x-partials of f."""
    n = ring.nx
    rows = [[f.diff_x(i).diff_x(j) for j in range(n)] for i in range(n)]
    return poly_det(rows)
