"""Reduction to the canonical trivialization of the filtered de Rham module.

A polynomial multiple of the volume form determines a class in the
z-completed de Rham module of the singularity.  This module computes that
class in the trivialization by the monomial basis of the Milnor algebra:

* ``phi_top_apply`` realizes the trivializing map on a polynomial via its
  iterated division record, replacing each factor of a partial derivative
  d_k f by the operator (d_k f + z d/dx_k);
* ``lattice_reduce`` inverts it: it rewrites a class as an exact
  z-polynomial combination of the basis classes, by repeatedly splitting
  off the Jacobian-ideal part and trading it for a z-multiple of a
  derivative (integration by parts at the level of forms);
* ``lattice_reduce_unfolding`` does the same over a miniversal unfolding
  F = f + sum s_a phi_a, where division cofactors additionally feed an
  s-degree-raising branch; results are computed to an explicit s-order;
* ``deformed_normal_form`` is the z-free shadow: the class of g in the
  Jacobian algebra of F, order by order in s;
* ``k_pairing`` pairs two reduced classes through the residue form with
  z negated on one side.

All of it is exact; the only approximation anywhere is the explicit
s-truncation order, and coefficients up to that order are exact because
every s-raising step raises the s-degree by at least one.
"""

from fractions import Fraction

from .errors import InputSpecError
from .polyring import MPoly


class LatticeElement:
    """A class written over the basis: a vector of x-free coefficients in s, z."""

    __slots__ = ("ring", "coeffs", "dropped")

    def __init__(self, ring, coeffs, dropped=False):
        self.ring = ring
        self.coeffs = list(coeffs)
        self.dropped = dropped

    @classmethod
    def zero(cls, ring, dim):
        return cls(ring, [ring.zero()] * dim)

    def __len__(self):
        return len(self.coeffs)

    def __add__(self, other):
        return LatticeElement(
            self.ring,
            [a + b for a, b in zip(self.coeffs, other.coeffs)],
            self.dropped or other.dropped,
        )

    def __sub__(self, other):
        return LatticeElement(
            self.ring,
            [a - b for a, b in zip(self.coeffs, other.coeffs)],
            self.dropped or other.dropped,
        )

    def __neg__(self):
        return LatticeElement(self.ring, [-a for a in self.coeffs], self.dropped)

    def scale(self, c):
        """Multiply by a scalar or an x-free polynomial."""
        if isinstance(c, (int, Fraction)):
            c = self.ring.const(c)
        return LatticeElement(self.ring, [c * a for a in self.coeffs], self.dropped)

    def mul_z(self, k):
        return LatticeElement(self.ring, [a.mul_z(k) for a in self.coeffs], self.dropped)

    def s_truncate(self, cap):
        return LatticeElement(self.ring, [a.s_truncate(cap) for a in self.coeffs], self.dropped)

    def z_coefficient(self, k):
        return [a.z_coefficient(k) for a in self.coeffs]

    def z_support(self):
        out = set()
        for a in self.coeffs:
            out.update(a.z_support())
        return sorted(out)

    def is_zero(self):
        return all(a.is_zero() for a in self.coeffs)

    def to_poly(self, basis_polys):
        total = self.ring.zero()
        for c, p in zip(self.coeffs, basis_polys):
            if c:
                total = total + c * p
        return total

    def __eq__(self, other):
        return isinstance(other, LatticeElement) and self.coeffs == other.coeffs

    def __str__(self):
        bits = [f"({c})*[{i}]" for i, c in enumerate(self.coeffs) if c]
        return " + ".join(bits) if bits else "0"


def phi_top_apply(data, g):
    """Image of an x-only Q-polynomial under the canonical trivializing map.

    Each factor of a partial derivative in the iterated division record of g
    becomes the operator (d_k f + z d/dx_k) acting on the residual basis
    monomial.  Returns a polynomial in x and z.
    """
    decomposition = data.regseq_decompose(g)
    total = data.ring.zero()
    for (powers, alpha), c in decomposition.items():
        term = data.basis_polys[alpha]
        for k, e in enumerate(powers):
            for _ in range(e):
                term = data.partials[k] * term + term.diff_x(k).mul_z(1)
        total = total + c * term
    return total


def lattice_reduce(data, g):
    """Write the class of g over the basis classes, exactly.

    g may carry s- and z-dependence in its coefficients (reduction is linear
    over both).  Iterates: split off the normal form, then replace the
    ideal part sum h_k d_k f by -z sum d(h_k)/dx_k.  The x-degree of the
    work term drops strictly, so this terminates.
    """
    ring = data.ring
    out = [ring.zero()] * data.dim
    work = g
    while not work.is_zero():
        vector, cofs = data.normal_form(work)
        for i, v in enumerate(vector):
            if v:
                out[i] = out[i] + v
        nxt = ring.zero()
        for k, h in enumerate(cofs):
            if not h.is_zero():
                nxt = nxt + h.diff_x(k)
        work = (-nxt).mul_z(1)
    return LatticeElement(ring, out)


def unfolding_shift(data, F):
    """The deformation part F - f and its x-gradient, validated.

    F must restrict to f at s = 0 and carry no z.
    """
    ring = data.ring
    if not F.is_z_free():
        raise InputSpecError("an unfolding must not involve z")
    diff = F - data.f
    if any(not any(se) for (_, se, _) in diff.terms):
        raise InputSpecError("the unfolding must restrict to f at s = 0")
    return diff, [diff.diff_x(k) for k in range(ring.nx)]


def lattice_reduce_unfolding(data, F, g, s_order):
    """Write the class of g over the basis classes of the unfolding F.

    Same rewriting as :func:`lattice_reduce`, with one extra branch: the
    division cofactors also multiply the x-gradient of (F - f), raising the
    s-degree.  Results are exact through the mandatory s-truncation order;
    the element's ``dropped`` flag records whether anything beyond the order
    was discarded along the way.
    """
    if s_order is None or s_order < 0:
        raise InputSpecError("an explicit s-truncation order is required for unfoldings")
    ring = data.ring
    _, grad = unfolding_shift(data, F)
    out = [ring.zero()] * data.dim
    dropped = False
    work = g.s_truncate(s_order)
    if work != g:
        dropped = True
    while not work.is_zero():
        vector, cofs = data.normal_form(work)
        for i, v in enumerate(vector):
            if v:
                out[i] = out[i] + v
        nxt = ring.zero()
        for k, h in enumerate(cofs):
            if h.is_zero():
                continue
            nxt = nxt + h.diff_x(k).mul_z(1) + h * grad[k]
        work = -nxt
        trimmed = work.s_truncate(s_order)
        if trimmed != work:
            dropped = True
            work = trimmed
    return LatticeElement(ring, out, dropped)


def deformed_normal_form(data, F, g, s_order):
    """Class of g in the Jacobian algebra of the unfolding F, order by order in s.

    Returns ``(vector, cofactors)`` over the central monomial basis and the
    x-gradient of F, with everything s-truncated at the given order:
    ``g == sum(cofactors[k] * dF/dx_k) + sum(vector[a] * basis[a])``
    through that order.
    """
    if s_order is None or s_order < 0:
        raise InputSpecError("an explicit s-truncation order is required for unfoldings")
    ring = data.ring
    _, grad = unfolding_shift(data, F)
    out = [ring.zero()] * data.dim
    total_cofs = [ring.zero()] * ring.nx
    work = g.s_truncate(s_order)
    while not work.is_zero():
        vector, cofs = data.normal_form(work)
        for i, v in enumerate(vector):
            if v:
                out[i] = out[i] + v
        nxt = ring.zero()
        for k, h in enumerate(cofs):
            if h.is_zero():
                continue
            total_cofs[k] = total_cofs[k] + h
            nxt = nxt + h * grad[k]
        work = (-nxt).s_truncate(s_order)
    return out, total_cofs


def phi_top_extend(data, p):
    """z-linear extension of the trivializing map to polynomials in x and z."""
    total = data.ring.zero()
    for k in p.z_support():
        total = total + phi_top_apply(data, p.z_coefficient(k)).mul_z(k)
    return total


def phi_top_inverse_series(data, g):
    """Invert the trivializing map by its Neumann series.

    Writing the extended map as identity plus a part that strictly raises
    the z-degree at fixed total weight, the inverse is the alternating sum
    of its iterates, which terminates on any polynomial.  This is the slow,
    independent route used to cross-check :func:`lattice_reduce`.
    """

    def raise_part(p):
        return phi_top_extend(data, p) - p

    total = data.ring.zero()
    term = g
    while not term.is_zero():
        total = total + term
        term = -raise_part(term)
    return total


def lattice_reduce_by_series(data, g):
    """Cross-check route: reduce via the inverse Neumann series, then normal forms."""
    inv = phi_top_inverse_series(data, g)
    vector, _ = data.normal_form(inv)
    return LatticeElement(data.ring, vector)


def trivialization_identity_check(data, g):
    """The two inversion routes agree and invert the trivializing map on g.

    For an x-only Q-polynomial g: reducing phi_top_apply(g) must give back
    exactly the normal form of g (no z-corrections), and the rewriting
    reduction of g itself must agree with the Neumann-series route.
    """
    round_trip = lattice_reduce(data, phi_top_apply(data, g))
    nf_vector, _ = data.normal_form(g)
    if round_trip.coeffs != nf_vector:
        return False
    return lattice_reduce(data, g) == lattice_reduce_by_series(data, g)


def k_pairing(data, a, b, eta=None):
    """Pair two reduced classes: sum_ab a_g(z) b_d(-z) eta_gd, an x-free poly in z.

    With the residue Gram matrix as eta this is the lattice pairing in the
    canonical trivialization; for a good basis the result must be z-free.
    """
    ring = data.ring
    if eta is None:
        eta = data.gram_matrix()
    total = ring.zero()
    for g_idx, ag in enumerate(a.coeffs):
        if ag.is_zero():
            continue
        for d_idx, bd in enumerate(b.coeffs):
            if bd.is_zero() or not eta[g_idx][d_idx]:
                continue
            flipped = MPoly(
                ring,
                {
                    (xe, se, ze): (c if ze % 2 == 0 else -c)
                    for (xe, se, ze), c in bd.terms.items()
                },
            )
            total = total + ag * flipped * eta[g_idx][d_idx]
    return total


def k_pairing_grading_check(data, elements, eta=None):
    """True when all pairwise lattice pairings of the elements are z-constant."""
    for i, a in enumerate(elements):
        for b in elements[i:]:
            if not k_pairing(data, a, b, eta).is_z_free():
                return False
    return True
