"""The primitive form of an unfolding, order by order in the deformation.

Normalized so that at s = 0 the form is the first good-basis section, the
primitive form is characterized by its oscillating-integral expansion
having no positive spectral powers and unit constant term.  Two independent
routes to it live here:

* :func:`primitive_form` -- the recursive construction: the order-p
  correction is minus the positive-z projection of the reduced class of
  exp((F - f)/z) applied to the lower-order parts;
* :func:`oracle_primitive_form` -- a dense linear solve imposing the
  defining conditions directly, z-power by z-power and s-monomial by
  s-monomial, with a uniqueness report.

Both produce coordinates over the good-basis frame, one list entry per
s-degree; agreement of the routes is part of the test battery.

:func:`j_function` assembles the reduced expansion itself (the classes of
exp((F - f)/z) zeta), whose defining invariants -- no positive z-powers,
z^0 part equal to the unit at order zero and vanishing beyond -- are what
the oracle solves for and what tests assert.
"""

from fractions import Fraction

from . import _linalg
from .brieskorn import LatticeElement, lattice_reduce, unfolding_shift
from .errors import InputSpecError


def unfolding_powers(data, F, order):
    """[(F-f)^a / a! for a = 0..order]; the a-th has s-degree exactly a."""
    diff, _ = unfolding_shift(data, F)
    powers = [data.ring.one()]
    for a in range(1, order + 1):
        powers.append(powers[-1] * diff * Fraction(1, a))
    return powers


def primitive_form(gb, F, order):
    """Good-basis coordinates of the primitive form through s-degree ``order``.

    Returns a list of LatticeElements, one per s-degree; the zeroth is the
    unit coordinate vector, and every later one carries only positive
    z-powers.
    """
    if order is None or order < 0:
        raise InputSpecError("an explicit s-order is required")
    data = gb.data
    ring = data.ring
    powers = unfolding_powers(data, F, order)
    unit = LatticeElement(
        ring, [ring.one() if a == 0 else ring.zero() for a in range(data.dim)]
    )
    zetas = [unit]
    for p in range(1, order + 1):
        work = ring.zero()
        for a in range(1, p + 1):
            rep = gb.element_rep(zetas[p - a].coeffs)
            if rep.is_zero():
                continue
            work = work + (powers[a] * rep).mul_z(-a)
        coords = gb.coordinates(lattice_reduce(data, work))
        zetas.append(
            LatticeElement(ring, [-(c.z_pos_part().s_slice(p)) for c in coords.coeffs])
        )
    return zetas


def j_function(gb, F, zetas, order):
    """Reduced expansion classes J_p in good-basis coordinates, p = 0..order."""
    data = gb.data
    ring = data.ring
    powers = unfolding_powers(data, F, order)
    out = []
    for p in range(order + 1):
        total = LatticeElement.zero(ring, data.dim)
        for a in range(p + 1):
            rep = gb.element_rep(zetas[p - a].coeffs)
            if rep.is_zero():
                continue
            red = lattice_reduce(data, powers[a] * rep).mul_z(-a)
            total = total + gb.coordinates(red)
        out.append(LatticeElement(ring, [c.s_slice(p) for c in total.coeffs]))
    return out


def j_function_defect(gb, jseries):
    """The defining-condition residuals of a J-series; all must be zero.

    Returns a list per order: the positive-z part and the z^0 deviation
    from the expected unit (order 0) or zero (all later orders).
    """
    data = gb.data
    ring = data.ring
    defects = []
    for p, elem in enumerate(jseries):
        pos = [c.z_pos_part() for c in elem.coeffs]
        z0 = [c.z_coefficient(0) for c in elem.coeffs]
        if p == 0:
            z0[0] = z0[0] - ring.one()
        bad = [c for c in pos + z0 if not c.is_zero()]
        defects.append(bad)
    return defects


def _s_monomials(poly):
    return sorted({se for (_, se, _) in poly.terms})


def oracle_primitive_form(gb, F, order, zmax=3):
    """Dense-solve route to the primitive form; returns (zetas, unique).

    At each s-degree the defining conditions on the expansion classes --
    vanishing of every positive z-power and of the z^0 part -- are a linear
    system for the unknown coordinate block of the form, solved exactly
    over the rationals s-monomial by s-monomial.  ``unique`` reports whether
    every solve had full rank (it must, or the construction is broken).
    """
    data = gb.data
    ring = data.ring
    n = data.dim
    powers = unfolding_powers(data, F, order)
    # the linear map on a coordinate unknown at z^j of section alpha
    base_cols = [gb.coordinates(lattice_reduce(data, gb.rep_poly(a))) for a in range(n)]
    columns = {}
    kmax = 0
    for alpha in range(n):
        for j in range(zmax + 1):
            col = base_cols[alpha].mul_z(j)
            columns[(alpha, j)] = col
            kmax = max(kmax, col.z_support()[-1] if col.z_support() else 0)
    unknown_keys = sorted(columns)

    unit = LatticeElement(
        ring, [ring.one() if a == 0 else ring.zero() for a in range(n)]
    )
    zetas = [unit]
    unique = True
    for p in range(1, order + 1):
        known = LatticeElement.zero(ring, n)
        for a in range(1, p + 1):
            rep = gb.element_rep(zetas[p - a].coeffs)
            if rep.is_zero():
                continue
            red = lattice_reduce(data, powers[a] * rep).mul_z(-a)
            known = known + gb.coordinates(red)
        known = LatticeElement(ring, [c.s_slice(p) for c in known.coeffs])
        known_kmax = max([kmax] + [c.z_max() for c in known.coeffs])
        condition_keys = [(ap, k) for k in range(known_kmax + 1) for ap in range(n)]
        matrix_rows = [
            [
                columns[key].coeffs[ap].z_coefficient(k).constant()
                for key in unknown_keys
            ]
            for (ap, k) in condition_keys
        ]
        monomials = set()
        for c in known.coeffs:
            monomials.update(_s_monomials(c))
        coords = [ring.zero() for _ in range(n)]
        for se in sorted(monomials):
            rhs = [
                -known.coeffs[ap].coeff(None, se, k)
                for (ap, k) in condition_keys
            ]
            solved = _linalg.solve_linear_system(matrix_rows, rhs)
            if solved is None:
                raise InputSpecError(
                    "the defining conditions of the primitive form are inconsistent; "
                    "this indicates a bug or an invalid basis"
                )
            solution, this_unique = solved
            unique = unique and this_unique
            for (alpha, j), value in zip(unknown_keys, solution):
                if value:
                    coords[alpha] = coords[alpha] + ring.monomial(value, None, se, j)
        zetas.append(LatticeElement(ring, coords))
    return zetas, unique
