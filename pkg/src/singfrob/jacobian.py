"""Jacobian (Milnor) algebra of an isolated singularity, with receipts.

The central objects: a Groebner basis of the partial-derivative ideal in
which every element carries an exact cofactor record over the original
partials, normal forms that return both the coefficient vector over the
monomial (staircase) basis and the division cofactors, the Grothendieck
residue pairing normalized against the Hessian class, and the iterated
decomposition of a polynomial over products of the partials.

Division uses graded lexicographic order on the x-exponents.  Coefficients
of the dividend may involve the deformation variables s and the spectral
variable z; reduction is linear over those, so the same engine serves the
central fibre and every s- or z-decorated computation built on top of it.
"""

from fractions import Fraction

from .errors import PreconditionError
from .polyring import MPoly, hessian_det


def _x_grlex_key(xe):
    return (sum(xe), xe)


def _divides(a, b):
    return all(p <= q for p, q in zip(a, b))


def _leading(p):
    """Leading x-exponent and its rational coefficient, for x-only Q-polys."""
    key = max(p.terms, key=lambda k: _x_grlex_key(k[0]))
    return key[0], p.terms[key]


class GBElement:
    """A Groebner-basis element together with its cofactors over the generators."""

    __slots__ = ("poly", "cofactors", "lead", "lead_coeff")

    def __init__(self, poly, cofactors):
        self.poly = poly
        self.cofactors = cofactors
        self.lead, self.lead_coeff = _leading(poly)

    def monic(self):
        c = self.lead_coeff
        if c == 1:
            return self
        inv = Fraction(1) / c
        return GBElement(self.poly * inv, tuple(cf * inv for cf in self.cofactors))


def _reduce_tracked(poly, cofactors, basis):
    """Fully reduce an x-only Q-poly against basis, updating cofactors."""
    ring = poly.ring
    work = poly
    cofs = list(cofactors)
    while True:
        hit = None
        for key in sorted(work.terms, key=lambda k: _x_grlex_key(k[0]), reverse=True):
            for b in basis:
                if _divides(b.lead, key[0]):
                    hit = (key, b)
                    break
            if hit:
                break
        if hit is None:
            return work, tuple(cofs)
        (xe, se, ze), b = hit
        c = work.terms[(xe, se, ze)]
        shift = tuple(p - q for p, q in zip(xe, b.lead))
        mult = ring.monomial(c, shift)
        work = work - mult * b.poly
        for k in range(len(cofs)):
            cofs[k] = cofs[k] + mult * b.cofactors[k]


def groebner_with_cofactors(gens):
    """Minimal monic Groebner basis of the ideal (gens), with cofactor records.

    Every returned element g satisfies g.poly == sum(g.cofactors[k] * gens[k]).
    """
    ring = gens[0].ring
    n = len(gens)
    basis = []
    for i, g in enumerate(gens):
        if g.is_zero():
            raise PreconditionError("zero generator in the ideal")
        cofs = tuple(ring.one() if k == i else ring.zero() for k in range(n))
        basis.append(GBElement(g, cofs).monic())
    pairs = [(i, j) for i in range(len(basis)) for j in range(i + 1, len(basis))]
    while pairs:
        pairs.sort(
            key=lambda ij: _x_grlex_key(
                tuple(max(p, q) for p, q in zip(basis[ij[0]].lead, basis[ij[1]].lead))
            )
        )
        i, j = pairs.pop(0)
        a, b = basis[i], basis[j]
        lcm = tuple(max(p, q) for p, q in zip(a.lead, b.lead))
        if all(p + q == l for p, q, l in zip(a.lead, b.lead, lcm)):
            continue  # coprime leads: S-polynomial reduces to zero
        ma = ring.monomial(1, tuple(l - p for l, p in zip(lcm, a.lead)))
        mb = ring.monomial(1, tuple(l - p for l, p in zip(lcm, b.lead)))
        spoly = ma * a.poly - mb * b.poly
        scofs = tuple(ma * ca - mb * cb for ca, cb in zip(a.cofactors, b.cofactors))
        r, rcofs = _reduce_tracked(spoly, scofs, basis)
        if not r.is_zero():
            new = GBElement(r, rcofs).monic()
            pairs.extend((k, len(basis)) for k in range(len(basis)))
            basis.append(new)
    # drop elements whose lead is divisible by another retained lead
    basis.sort(key=lambda e: _x_grlex_key(e.lead))
    kept = []
    for e in basis:
        if not any(_divides(k.lead, e.lead) for k in kept):
            kept.append(e)
    return kept


def _staircase(ring, gb):
    """Monomials outside the leading-term ideal, or an error if infinitely many."""
    leads = [e.lead for e in gb]
    bounds = []
    for k in range(ring.nx):
        pure = [xe[k] for xe in leads if sum(xe) == xe[k]]
        if not pure:
            raise PreconditionError(
                "the critical point is not isolated (no pure power of "
                f"{ring.xnames[k]} in the leading-term ideal)"
            )
        bounds.append(min(pure))
    cells = [()]
    for b in bounds:
        cells = [c + (e,) for c in cells for e in range(b)]
    standard = [xe for xe in cells if not any(_divides(l, xe) for l in leads)]
    standard.sort(key=lambda xe: tuple(reversed(xe)))
    return tuple(standard)


class QuotientBasis:
    """Finite-dimensional quotient of Q[x] by an ideal, with tracked division."""

    def __init__(self, ring, gens):
        for g in gens:
            if not (g.is_s_free() and g.is_z_free()):
                raise PreconditionError("ideal generators must be x-only")
        self.ring = ring
        self.gens = tuple(gens)
        self.gb = groebner_with_cofactors(list(gens))
        self.basis = _staircase(ring, self.gb)
        self.dim = len(self.basis)
        self.index = {xe: i for i, xe in enumerate(self.basis)}
        self.basis_polys = tuple(ring.monomial(1, xe) for xe in self.basis)
        self._pair_cache = {}

    def normal_form(self, g):
        """Reduce g modulo the ideal.

        Returns ``(vector, cofactors)`` with ``vector`` a list of x-free
        polynomials over the staircase basis and ``cofactors`` a list over
        the original generators, so that
        ``g == sum(cofactors[k] * gens[k]) + sum(vector[a] * basis[a])``.
        The coefficients of g may involve s and z; reduction is linear over
        them.
        """
        ring = self.ring
        work = g
        quots = [ring.zero()] * len(self.gb)
        while True:
            hit = None
            for key in sorted(work.terms, key=lambda k: _x_grlex_key(k[0]), reverse=True):
                for gi, b in enumerate(self.gb):
                    if _divides(b.lead, key[0]):
                        hit = (key, gi)
                        break
                if hit:
                    break
            if hit is None:
                break
            (xe, se, ze), gi = hit
            b = self.gb[gi]
            c = work.terms[(xe, se, ze)]
            shift = tuple(p - q for p, q in zip(xe, b.lead))
            mult = MPoly(ring, {(shift, se, ze): c})
            work = work - mult * b.poly
            quots[gi] = quots[gi] + mult
        vector = [ring.zero()] * self.dim
        for (xe, se, ze), c in work.terms.items():
            entry = MPoly(ring, {((0,) * ring.nx, se, ze): c})
            vector[self.index[xe]] = vector[self.index[xe]] + entry
        cofactors = []
        for k in range(len(self.gens)):
            h = ring.zero()
            for gi, q in enumerate(quots):
                if q:
                    h = h + q * self.gb[gi].cofactors[k]
            cofactors.append(h)
        return vector, cofactors

    def nf_vector_rational(self, g):
        """Normal form of an x-only Q-poly as a plain Fraction vector."""
        vector, _ = self.normal_form(g)
        return [entry.constant() for entry in vector]

    def basis_product(self, a, b):
        """Cached Fraction vector for the class of basis[a] * basis[b]."""
        if a > b:
            a, b = b, a
        key = (a, b)
        if key not in self._pair_cache:
            prod = self.basis_polys[a] * self.basis_polys[b]
            self._pair_cache[key] = self.nf_vector_rational(prod)
        return self._pair_cache[key]

    def class_product(self, va, vb):
        """Product of two Fraction coefficient vectors in the quotient algebra."""
        out = [Fraction(0)] * self.dim
        for a, ca in enumerate(va):
            if not ca:
                continue
            for b, cb in enumerate(vb):
                if not cb:
                    continue
                for g, cg in enumerate(self.basis_product(a, b)):
                    if cg:
                        out[g] += ca * cb * cg
        return out

    def multiplication_matrix(self, g):
        """Matrix of multiplication by the x-only Q-poly g, columns over the basis."""
        cols = []
        for p in self.basis_polys:
            cols.append(self.nf_vector_rational(g * p))
        return [[cols[b][a] for b in range(self.dim)] for a in range(self.dim)]


class JacobianData(QuotientBasis):
    """Milnor algebra of a quasihomogeneous isolated singularity."""

    def __init__(self, ring, weights, f):
        if len(weights) != ring.nx:
            raise PreconditionError("need one weight per x-variable")
        weights = tuple(Fraction(w) for w in weights)
        if any(not (0 < w < 1) for w in weights):
            raise PreconditionError("weights must be rationals strictly between 0 and 1")
        if f.is_zero() or not (f.is_s_free() and f.is_z_free()):
            raise PreconditionError("f must be a nonzero polynomial in the x-variables")
        for (xe, _, _), _c in f.terms.items():
            wt = sum(w * e for w, e in zip(weights, xe))
            if wt != 1:
                raise PreconditionError(
                    f"f is not quasihomogeneous of weight 1: monomial of weight {wt}"
                )
        partials = [f.diff_x(k) for k in range(ring.nx)]
        if any(p.is_zero() for p in partials):
            raise PreconditionError("f does not depend on every variable")
        super().__init__(ring, partials)
        self.weights = weights
        self.f = f
        self.partials = self.gens
        self.mu = self.dim
        expected = Fraction(1)
        for w in weights:
            expected *= Fraction(1) / w - 1
        if expected != self.mu:
            raise PreconditionError(
                f"staircase dimension {self.mu} disagrees with the weight formula {expected}"
            )
        self.d = sum(1 - 2 * w for w in weights)
        self.basis_weights = tuple(
            sum(w * e for w, e in zip(weights, xe)) for xe in self.basis
        )
        tops = [i for i, w in enumerate(self.basis_weights) if w == self.d]
        if len(tops) != 1:
            raise PreconditionError("the top weight class is not one-dimensional")
        self.top_index = tops[0]
        hess = hessian_det(ring, f)
        hvec = self.nf_vector_rational(hess)
        if any(c for i, c in enumerate(hvec) if i != self.top_index) or not hvec[self.top_index]:
            raise PreconditionError("the Hessian class is not a multiple of the top basis element")
        self.hessian_class_coeff = hvec[self.top_index]
        self._gram = None

    def monomial_weight(self, xe):
        return sum(w * e for w, e in zip(self.weights, xe))

    def x_weight(self, p):
        """Weight of an x-homogeneous polynomial; error if mixed."""
        wts = {self.monomial_weight(xe) for (xe, _, _) in p.terms}
        if len(wts) != 1:
            raise PreconditionError("polynomial is not weighted-homogeneous")
        return wts.pop()

    def residue_pairing(self, va, vb):
        """Grothendieck residue pairing of two Fraction coefficient vectors.

        Normalized so that the pairing of 1 with the Hessian class equals the
        Milnor number.
        """
        prod = self.class_product(va, vb)
        return self.mu * prod[self.top_index] / self.hessian_class_coeff

    def gram_matrix(self):
        """Residue-pairing Gram matrix over the monomial basis (cached)."""
        if self._gram is None:
            unit = [Fraction(0)] * self.mu
            self._gram = []
            for a in range(self.mu):
                row = []
                ea = list(unit)
                ea[a] = Fraction(1)
                for b in range(self.mu):
                    eb = list(unit)
                    eb[b] = Fraction(1)
                    row.append(self.residue_pairing(ea, eb))
                self._gram.append(row)
        return [row[:] for row in self._gram]

    def regseq_decompose(self, g):
        """Iterated division record of an x-only Q-poly over the partials.

        Returns a dict mapping ``(powers, alpha)`` to a Fraction, meaning

            g == sum  c * prod(partials[k] ** powers[k]) * basis[alpha].
        """
        if not (g.is_s_free() and g.is_z_free()):
            raise PreconditionError("decomposition is defined for x-only polynomials")
        out = {}
        zero_shift = (0,) * self.ring.nx

        def walk(p, shift):
            vector, cofs = self.normal_form(p)
            for alpha, entry in enumerate(vector):
                c = entry.constant()
                if c:
                    key = (shift, alpha)
                    acc = out.get(key, Fraction(0)) + c
                    if acc:
                        out[key] = acc
                    else:
                        out.pop(key, None)
            for k, h in enumerate(cofs):
                if not h.is_zero():
                    bumped = list(shift)
                    bumped[k] += 1
                    walk(h, tuple(bumped))

        walk(g, zero_shift)
        return out

    def recompose(self, decomposition):
        """Rebuild the polynomial described by a regseq_decompose record."""
        total = self.ring.zero()
        for (powers, alpha), c in decomposition.items():
            term = self.ring.const(c) * self.basis_polys[alpha]
            for k, e in enumerate(powers):
                for _ in range(e):
                    term = term * self.partials[k]
            total = total + term
        return total
