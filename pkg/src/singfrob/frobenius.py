"""Flat structure attached to the primitive form: coordinates, metric, potential.

The reduced expansion classes of the primitive form organize the deformation
into a Frobenius manifold.  Concretely, from the expansion J computed by
:mod:`singfrob.primform`:

* the z^-1 coefficients of J are the flat coordinates t(s) of the
  deformation parameters -- their Jacobian is the period matrix, and the
  constant residue pairing of the good basis is the flat metric in them;
* the z^-2 coefficients of J, with an index lowered by the metric, are the
  gradient of the prepotential, which is recovered by exact term-by-term
  integration (the integrability of that gradient is checked, not assumed);
* multiplication on the tangent spaces comes from the deformed Milnor
  algebra transported through the period matrix, giving structure constants
  that must agree with the third derivatives of the prepotential -- the two
  routes are kept separate so tests can compare them;
* the grading operator and the multiplication by the Euler field at a
  chosen point yield the pair of operators that steer the quantization
  recursion in :mod:`singfrob.rmatrix`.

Everything is exact through the configured series order: flat coordinates
and the period matrix through s-degree ``order``, the prepotential through
t-degree ``order + 1``, structure constants and WDVV through ``order - 2``.
"""

from fractions import Fraction

from . import _linalg
from .brieskorn import deformed_normal_form, unfolding_shift
from .errors import InputSpecError, PreconditionError, TruncationExhaustedError
from .jacobian import QuotientBasis
from .polyring import PolyRing, substitute_s
from .primform import j_function, primitive_form


def _matrix_series_inverse(ring, matrix, order):
    """Invert a matrix of s-polynomials whose constant part is invertible."""
    n = len(matrix)
    const = [[matrix[i][j].s_truncate(0).constant() for j in range(n)] for i in range(n)]
    a_inv = _linalg.invert_rational_matrix(const)
    if a_inv is None:
        raise PreconditionError("matrix series has singular constant part")
    a_inv_polys = [[ring.const(a_inv[i][j]) for j in range(n)] for i in range(n)]
    # higher part H = matrix - const; inverse = sum (-A^-1 H)^k A^-1
    higher = [
        [matrix[i][j] - ring.const(const[i][j]) for j in range(n)] for i in range(n)
    ]
    out = [row[:] for row in a_inv_polys]
    term = [row[:] for row in a_inv_polys]
    for _ in range(order):
        nxt = [[ring.zero()] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                acc = ring.zero()
                for k in range(n):
                    if higher[i][k] and term[k][j]:
                        acc = acc + higher[i][k] * term[k][j]
                nxt[i][j] = acc.s_truncate(order)
        term = [
            [
                -sum(
                    (a_inv_polys[i][k] * nxt[k][j] for k in range(n)),
                    ring.zero(),
                ).s_truncate(order)
                for j in range(n)
            ]
            for i in range(n)
        ]
        if all(term[i][j].is_zero() for i in range(n) for j in range(n)):
            break
        for i in range(n):
            for j in range(n):
                out[i][j] = out[i][j] + term[i][j]
    return out


def _integrate_t(poly, index):
    """Exact antiderivative of an x-free t-polynomial in the index-th variable."""
    ring = poly.ring
    out = {}
    for (xe, se, ze), c in poly.terms.items():
        ne = list(se)
        ne[index] += 1
        out[(xe, tuple(ne), ze)] = c / ne[index]
    return ring.from_terms(out)


class FrobeniusData:
    """Flat-structure package for one unfolding at one series order."""

    def __init__(self, gb, F, order):
        if order is None or order < 2:
            raise InputSpecError("the series order must be at least 2")
        self.gb = gb
        self.data = gb.data
        self.F = F
        self.order = order
        ring = self.data.ring
        n = self.data.dim
        if ring.ns != n:
            raise PreconditionError("need one deformation variable per basis class")
        unfolding_shift(self.data, F)  # validates the unfolding
        self.zetas = primitive_form(gb, F, order)
        self.jseries = j_function(gb, F, self.zetas, order)
        self.t_of_s = []
        for beta in range(n):
            acc = ring.zero()
            for elem in self.jseries:
                acc = acc + elem.coeffs[beta].z_coefficient(-1)
            self.t_of_s.append(acc)
        self.j2_of_s = []
        for gamma in range(n):
            acc = ring.zero()
            for elem in self.jseries:
                acc = acc + elem.coeffs[gamma].z_coefficient(-2)
            self.j2_of_s.append(acc)
        self.psi = [
            [self.t_of_s[beta].diff_s(alpha) for alpha in range(n)] for beta in range(n)
        ]
        self.eta = [row[:] for row in gb.eta]
        self.eta_inverse = [row[:] for row in gb.eta_inverse]
        self.t_weights = tuple(1 - gb.section_weight(alpha) for alpha in range(n))
        self.tnames = tuple(f"t{i}" for i in range(1, n + 1))
        self.t_ring = PolyRing(ring.xnames, self.tnames)
        self.s_of_t = self._invert_coordinates()
        self._potential = None
        self._structure = {}

    # -- coordinates -------------------------------------------------------

    def _invert_coordinates(self):
        """Series inverse of t(s), exact through the working order."""
        ring = self.data.ring
        n = self.data.dim
        order = self.order
        linear = [
            [self.t_of_s[b].s_slice(1).diff_s(a).constant() for a in range(n)]
            for b in range(n)
        ]
        linear_inv = _linalg.invert_rational_matrix(linear)
        if linear_inv is None:
            raise PreconditionError("flat coordinates are singular at the origin")
        tvars = [self.t_ring.s(i) for i in range(n)]

        def lin_inv_apply(vec):
            return [
                sum((linear_inv[a][b] * vec[b] for b in range(n)), self.t_ring.zero())
                for a in range(n)
            ]

        higher = [self.t_of_s[b] - self.t_of_s[b].s_slice(0) - self.t_of_s[b].s_slice(1) for b in range(n)]
        guess = lin_inv_apply(tvars)
        for _ in range(order):
            correction = [
                substitute_s(higher[b], self.t_ring, guess, cap=order) for b in range(n)
            ]
            guess = lin_inv_apply(
                [tvars[b] - correction[b] for b in range(n)]
            )
            guess = [g.s_truncate(order) for g in guess]
        # round trip: t(s(t)) must be the identity through the working order
        for b in range(n):
            composed = substitute_s(self.t_of_s[b], self.t_ring, guess, cap=order)
            if not (composed - tvars[b]).s_truncate(order).is_zero():
                raise PreconditionError("coordinate inversion failed to close")
        return guess

    def psi_at(self, s_values):
        """Period matrix evaluated at exact rational s-values."""
        ring = self.data.ring
        subs = dict(zip(ring.snames, s_values))
        return [
            [entry.subs_s(subs).constant() for entry in row] for row in self.psi
        ]

    def s_values_at_t(self, t_values):
        """Exact deformation-parameter values below a rational flat point."""
        subs = dict(zip(self.tnames, t_values))
        return [entry.subs_s(subs).constant() for entry in self.s_of_t]

    def integrability_defects(self):
        """Mixed-partial symmetry of the period matrix (all must vanish)."""
        n = self.data.dim
        out = []
        for beta in range(n):
            for a in range(n):
                for b in range(a + 1, n):
                    defect = self.psi[beta][a].diff_s(b) - self.psi[beta][b].diff_s(a)
                    if not defect.is_zero():
                        out.append((beta, a, b, defect))
        return out

    # -- potential ---------------------------------------------------------

    def potential(self):
        """The prepotential in flat coordinates, exact through degree order + 1."""
        if self._potential is not None:
            return self._potential
        n = self.data.dim
        order = self.order
        gradient = []
        for l in range(n):
            acc = self.data.ring.zero()
            for gamma in range(n):
                if self.eta[l][gamma]:
                    acc = acc + self.eta[l][gamma] * self.j2_of_s[gamma]
            gradient.append(substitute_s(acc, self.t_ring, self.s_of_t, cap=order))
        for l in range(n):
            for m in range(l + 1, n):
                defect = (gradient[l].diff_s(m) - gradient[m].diff_s(l)).s_truncate(order - 1)
                if not defect.is_zero():
                    raise PreconditionError(
                        "the lowered expansion gradient is not integrable; "
                        "the flat structure is inconsistent"
                    )
        acc = self.t_ring.zero()
        for l in range(n):
            remainder = (gradient[l] - acc.diff_s(l)).s_truncate(order)
            acc = acc + _integrate_t(remainder, l)
        for l in range(n):
            if not (acc.diff_s(l) - gradient[l]).s_truncate(order).is_zero():
                raise PreconditionError("potential integration failed to close")
        self._potential = acc.s_truncate(order + 1)
        return self._potential

    def potential_third_derivatives(self, i, j, k):
        """c_{ijk}(t) from the potential, exact through degree order - 2."""
        return self.potential().diff_s(i).diff_s(j).diff_s(k).s_truncate(self.order - 2)

    # -- multiplication ----------------------------------------------------

    def structure_constants(self):
        """Structure constants c_{ij}^k(t) from the deformed multiplication.

        Computed independently of the potential: normal forms of products of
        the transported coordinate frame in the Jacobian algebra of F,
        converted through the period matrix.  Exact through t-degree
        order - 2.  Returns a dict (i, j) -> list of t-polynomials over the
        raised index.
        """
        if self._structure:
            return self._structure
        ring = self.data.ring
        n = self.data.dim
        cap = self.order - 2
        s_matrix = _matrix_series_inverse(ring, self.psi, self.order - 1)
        frame = []
        for gamma in range(n):
            acc = ring.zero()
            for beta in range(n):
                if s_matrix[beta][gamma]:
                    acc = acc + s_matrix[beta][gamma] * self.data.basis_polys[beta]
            frame.append(acc)
        out = {}
        for i in range(n):
            for j in range(i, n):
                product = (frame[i] * frame[j]).s_truncate(self.order)
                vector, _ = deformed_normal_form(self.data, self.F, product, self.order)
                raised = []
                for gamma in range(n):
                    acc = ring.zero()
                    for beta in range(n):
                        if vector[beta]:
                            acc = acc + self.psi[gamma][beta] * vector[beta]
                    raised.append(
                        substitute_s(acc.s_truncate(self.order), self.t_ring, self.s_of_t, cap=cap)
                    )
                out[(i, j)] = raised
                out[(j, i)] = raised
        self._structure = out
        return out

    def structure_constants_lowered(self, i, j, k):
        """c_{ijk}(t) from the multiplication route, exact through degree order - 2."""
        raised = self.structure_constants()[(i, j)]
        acc = self.t_ring.zero()
        for gamma in range(self.data.dim):
            if self.eta[gamma][k]:
                acc = acc + self.eta[gamma][k] * raised[gamma]
        return acc.s_truncate(self.order - 2)

    # -- checks ------------------------------------------------------------

    def wdvv_residual(self, i, j, k, l, through=None):
        """Associativity residual for one index quadruple, t-truncated.

        Zero through ``through`` (default: the guaranteed order - 2) when the
        potential satisfies the quartic associativity equations.
        """
        cap = self.order - 2 if through is None else through
        if cap > self.order - 2:
            raise TruncationExhaustedError(
                f"associativity is only computed through degree {self.order - 2}; "
                f"raise the series order for degree {cap}"
            )
        n = self.data.dim
        acc = self.t_ring.zero()
        for g in range(n):
            for d in range(n):
                if not self.eta_inverse[g][d]:
                    continue
                lhs = self.potential_third_derivatives(i, j, g) * self.eta_inverse[g][d] * self.potential_third_derivatives(d, k, l)
                rhs = self.potential_third_derivatives(k, j, g) * self.eta_inverse[g][d] * self.potential_third_derivatives(d, i, l)
                acc = acc + lhs - rhs
        return acc.s_truncate(cap)

    def euler_defect(self):
        """E(potential) - (3 - d) * potential; zero by weighted homogeneity."""
        pot = self.potential()
        n = self.data.dim
        acc = self.t_ring.zero()
        for alpha in range(n):
            acc = acc + self.t_weights[alpha] * self.t_ring.s(alpha) * pot.diff_s(alpha)
        scale = Fraction(3) - Fraction(self.data.d)
        return acc - scale * pot

    def eta_from_potential(self):
        """Metric recovered as third derivatives along the unit direction at 0."""
        n = self.data.dim
        zero = {name: Fraction(0) for name in self.tnames}
        out = []
        for a in range(n):
            row = []
            for b in range(n):
                third = self.potential().diff_s(0).diff_s(a).diff_s(b)
                row.append(third.subs_s(zero).constant())
            out.append(row)
        return out

    # -- operators at a point ----------------------------------------------

    def b_operators(self, t_values):
        """Grading pair at a flat point: (B0, Binfty) in the flat frame.

        B0 is multiplication by F in the Jacobian algebra at the point,
        conjugated by the period matrix; Binfty is the constant diagonal
        grading operator.
        """
        n = self.data.dim
        s_values = self.s_values_at_t(t_values)
        subs = dict(zip(self.data.ring.snames, s_values))
        f_point = self.F.subs_s(subs)
        quotient = QuotientBasis(self.data.ring, [f_point.diff_x(k) for k in range(self.data.ring.nx)])
        if quotient.dim != n:
            raise PreconditionError("the Jacobian algebra drops rank at this point")
        if quotient.basis != self.data.basis:
            raise PreconditionError("the staircase changed at this point")
        mult = quotient.multiplication_matrix(f_point)
        psi_point = self.psi_at(s_values)
        psi_inv = _linalg.invert_rational_matrix(psi_point)
        if psi_inv is None:
            raise PreconditionError("the period matrix is singular at this point")
        b0 = _linalg.mat_mul(psi_point, _linalg.mat_mul(mult, psi_inv))
        half = (2 - Fraction(self.data.d)) / 2
        binf = [
            [half - self.t_weights[a] if a == b else Fraction(0) for b in range(n)]
            for a in range(n)
        ]
        return b0, binf
