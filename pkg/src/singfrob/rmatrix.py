"""Givental R-matrix of the flat structure at a semisimple point.

At a parameter point where multiplication by the deformation is a
semisimple operator on the Jacobian algebra, the flat structure carries a
unique normal-form gauge transformation R(z) = Id + z R_1 + z^2 R_2 + ...
fixed by the flatness recursion

    [B0, R_{m+1}] = (m + Binf) R_m,        m >= 0,

together with the degree-zero normalisation (equivalently, solvability of
the recursion at every later order).  ``r_matrix`` computes it by exact
dense linear algebra: each order is a Sylvester-type system whose
centralizer ambiguity is pinned by requiring the next order to remain
solvable.  ``verify_r`` replays the recursion and the symplectic identity
R(z) eta^{-1} R^T(-z) = eta^{-1} on the result.

The module also implements the lattice-side calculus at the point:

* ``lattice_reduce_at_point`` rewrites an x-polynomial in the z-completed
  quotient at numeric parameter values (division by the deformed partials
  plus the z-graded derivative work, iterated until exhaustion);
* ``a_series`` builds the inverse-multiplier series A(z) with
  F * A(z) = 1 in the z-completed quotient;
* ``b_series`` builds the correction operators B_k of the trivialized
  frame and cross-checks them against the equivalent flat form of their
  defining relation;
* ``r_tilde`` assembles the trivialized frame series
  a + z A_0 a - sum_k z^k wt(a) B_k(a) column by column.

Products in the z-completed quotient depend on the chosen representatives;
throughout this module a class is always represented by its canonical
staircase-monomial combination before multiplying, and the product is then
reduced again.  All arithmetic is exact over Fraction.
"""

from fractions import Fraction

from . import _linalg
from .errors import InputSpecError, PreconditionError
from .jacobian import QuotientBasis
from .polyring import MPoly, PolyRing


class SemisimplePoint:
    """Quotient-algebra data of the deformation at certified parameter values."""

    def __init__(self, gb, F, s0):
        ring = gb.ring
        if len(s0) != ring.ns:
            raise InputSpecError(
                f"expected {ring.ns} parameter values, got {len(s0)}"
            )
        self.gb = gb
        self.ring = ring
        self.s0 = tuple(Fraction(v) for v in s0)
        subs = dict(zip(ring.snames, self.s0))
        self.f_point = F.subs_s(subs)
        gens = [self.f_point.diff_x(k) for k in range(ring.nx)]
        self.quotient = QuotientBasis(ring, gens)
        if self.quotient.dim != gb.data.dim:
            raise PreconditionError(
                "degenerate critical locus: quotient dimension "
                f"{self.quotient.dim} != {gb.data.dim} at this point"
            )
        if self.quotient.basis != gb.data.basis:
            raise PreconditionError("the monomial staircase changed at this point")
        self.dim = self.quotient.dim
        self.basis_weights = gb.data.basis_weights
        self.mult_f = self.quotient.multiplication_matrix(self.f_point)
        self.char = _linalg.char_poly(self.mult_f)

    def rep(self, vector):
        """Canonical staircase representative of a coefficient vector."""
        poly = self.ring.zero()
        for c, mono in zip(vector, self.quotient.basis_polys):
            if c:
                poly = poly + mono * c
        return poly


def check_semisimple(gb, F, s0):
    """Certify that multiplication by F at s0 has distinct eigenvalues.

    Builds the Jacobian algebra of F(., s0), takes the multiplication
    matrix of F, and requires its characteristic polynomial to be
    squarefree (gcd with its derivative constant) and its determinant
    nonzero.  Returns the certified SemisimplePoint.
    """
    sp = SemisimplePoint(gb, F, s0)
    if not _linalg.is_squarefree(sp.char):
        raise PreconditionError(
            "not semisimple at this point: the characteristic polynomial "
            "of multiplication by the deformation has a repeated root"
        )
    if not sp.char[0]:
        raise PreconditionError(
            "not semisimple at this point: multiplication by the "
            "deformation is singular"
        )
    return sp


def lattice_reduce_at_point(sp, g):
    """Rewrite an x-polynomial in the z-completed quotient at the point.

    Returns a dict mapping z-powers to Fraction coefficient vectors over
    the staircase basis.  Each round divides by the deformed partial
    derivatives, records the normal form, and feeds the derivative of the
    cofactors forward with one more power of z; the x-degree drops every
    round, so the loop terminates.
    """
    if not (g.is_s_free() and g.is_z_free()):
        raise InputSpecError("point reduction expects an x-only polynomial")
    out = {}
    work = g
    zpow = 0
    while not work.is_zero():
        vector, cofactors = sp.quotient.normal_form(work)
        coeffs = [entry.constant() for entry in vector]
        if any(coeffs):
            acc = out.setdefault(zpow, [Fraction(0)] * sp.dim)
            for i, c in enumerate(coeffs):
                acc[i] += c
        nxt = sp.ring.zero()
        for k, h in enumerate(cofactors):
            nxt = nxt - h.diff_x(k)
        work = nxt
        zpow += 1
    return {k: v for k, v in out.items() if any(v)}


def point_product(sp, u, v, cap):
    """Product of two z-series of classes in the z-completed quotient.

    ``u`` and ``v`` map z-powers to coefficient vectors.  Representatives
    are the canonical staircase polynomials; every polynomial product is
    reduced again, and powers beyond ``cap`` are dropped.
    """
    out = {}
    for i, ui in u.items():
        pu = sp.rep(ui)
        if pu.is_zero():
            continue
        for j, vj in v.items():
            if i + j > cap:
                continue
            pv = sp.rep(vj)
            if pv.is_zero():
                continue
            for l, w in lattice_reduce_at_point(sp, pu * pv).items():
                k = i + j + l
                if k > cap:
                    continue
                acc = out.setdefault(k, [Fraction(0)] * sp.dim)
                for a, c in enumerate(w):
                    acc[a] += c
    return {k: v for k, v in out.items() if any(v)}


def a_series(sp, order):
    """Inverse-multiplier series A(z) with F * A(z) = 1, as class vectors.

    A_0 is the inverse of multiplication by F in the quotient algebra;
    each higher coefficient cancels the z-corrections that the lattice
    reduction of the lower ones produces against F.  Returns the list
    [A_0, ..., A_order] of z-free coefficient vectors.
    """
    if order < 0:
        raise InputSpecError("series order must be nonnegative")
    minv = _linalg.invert_rational_matrix(sp.mult_f)
    if minv is None:
        raise PreconditionError(
            "multiplication by the deformation is singular at this point"
        )
    unit = [Fraction(1)] + [Fraction(0)] * (sp.dim - 1)
    alphas = [_linalg.mat_vec(minv, unit)]
    reduced = [lattice_reduce_at_point(sp, sp.rep(alphas[0]) * sp.f_point)]
    for k in range(1, order + 1):
        rhs = [Fraction(0)] * sp.dim
        for a in range(1, k + 1):
            slice_a = reduced[k - a].get(a)
            if slice_a:
                for i, c in enumerate(slice_a):
                    rhs[i] += c
        alpha = _linalg.mat_vec(minv, [-c for c in rhs])
        alphas.append(alpha)
        reduced.append(lattice_reduce_at_point(sp, sp.rep(alpha) * sp.f_point))
    total = {}
    for j, red in enumerate(reduced):
        for l, w in red.items():
            if j + l > order:
                continue
            acc = total.setdefault(j + l, [Fraction(0)] * sp.dim)
            for i, c in enumerate(w):
                acc[i] += c
    if total.get(0) != unit or any(any(v) for k, v in total.items() if k):
        raise PreconditionError("inverse-multiplier series failed its defining check")
    return alphas


def b_series(sp, alphas, order):
    """Correction operators of the trivialized frame, per basis class.

    Returns ``b[delta][k]`` = B_k applied to the basis class delta, for
    1 <= k <= order, as z-free coefficient vectors; B_1 is minus the
    inverse-multiplication operator.  Each order is read off the recursion

        sum_{k>=2} B_k(a) z^k = -A(z) * sum_{k>=1} z^{k+1} k wt(a) B_k(a),

    and the coefficients the recursion re-derives at later orders are
    asserted to agree with the stored ones.

    ``b_series_flat_residuals`` evaluates the multiplied-through variant
    of the same relation (with F in place of A(z)); the two agree at low
    orders but are not identities of each other under the canonical-
    representative product, so that variant is reported, not asserted.
    """
    if order < 1:
        raise InputSpecError("series order must be at least 1")
    if len(alphas) <= order:
        raise InputSpecError("inverse-multiplier series is too short")
    aser = {k: vec for k, vec in enumerate(alphas)}
    minv = _linalg.invert_rational_matrix(sp.mult_f)
    out = {}
    for delta in range(sp.dim):
        wt = sp.basis_weights[delta]
        unit_col = [Fraction(0)] * sp.dim
        unit_col[delta] = Fraction(1)
        b1 = [-c for c in _linalg.mat_vec(minv, unit_col)]
        bvecs = {1: b1}
        for p in range(2, order + 1):
            target = {
                k + 1: [-k * wt * c for c in bvecs[k]] for k in range(1, p)
            }
            expansion = point_product(sp, aser, target, p)
            for j in range(0, 2):
                if any(expansion.get(j, [])):
                    raise PreconditionError(
                        "trivialized-frame recursion produced a low-order term"
                    )
            for j in range(2, p):
                got = expansion.get(j, [Fraction(0)] * sp.dim)
                if got != bvecs[j]:
                    raise PreconditionError(
                        "trivialized-frame recursion is inconsistent at order "
                        f"{j} for basis class {delta}"
                    )
            bvecs[p] = expansion.get(p, [Fraction(0)] * sp.dim)
        out[delta] = {k: bvecs[k] for k in range(1, order + 1)}
    return out


def b_series_flat_residuals(sp, bser, order):
    """Residuals of the multiplied-through form of the B_k relation.

    Evaluates sum_{k>=2} F * B_k(a) z^k + sum_{k>=1} z^{k+1} k wt(a)
    B_k(a) with the canonical-representative product and returns the
    nonzero slices as ``{(delta, m): vector}``.  Because the product of
    the z-completed quotient depends on representatives, this variant
    agrees with the defining recursion only at low orders; the residuals
    make the divergence point visible instead of hiding it.
    """
    residuals = {}
    for delta in range(sp.dim):
        wt = sp.basis_weights[delta]
        bvecs = bser[delta]
        reduced = {
            k: lattice_reduce_at_point(sp, sp.rep(bvecs[k]) * sp.f_point)
            for k in range(1, order + 1)
            if any(bvecs[k])
        }
        for m in range(2, order + 1):
            total = [(m - 1) * wt * c for c in bvecs[m - 1]]
            for k in range(2, m + 1):
                slice_part = reduced.get(k, {}).get(m - k)
                if slice_part:
                    for i, c in enumerate(slice_part):
                        total[i] += c
            if any(total):
                residuals[(delta, m)] = total
    return residuals


def r_tilde(sp, order):
    """Trivialized frame series, columns over the basis classes.

    Assembles a + z A_0 a - sum_{k>=2} z^k wt(a) B_k(a) for each basis
    class a and reads the coordinates in the z-completed quotient (the
    staircase representatives are already reduced, so the coordinate
    reading is direct).  Returns matrices [T_0, ..., T_order]; T_0 is the
    identity and T_1 is the inverse of the multiplication-by-F matrix.

    Note: this series is the gauge frame of the lattice-side
    trivialization.  Its coordinate matrix does not satisfy the flatness
    recursion of the R-matrix (see ``r_matrix``); the two agree only in
    the trivial rank-one case.
    """
    if order < 1:
        raise InputSpecError("series order must be at least 1")
    alphas = a_series(sp, order)
    minv = _linalg.invert_rational_matrix(sp.mult_f)
    mats = [_linalg.identity_matrix(sp.dim), [row[:] for row in minv]]
    if order >= 2:
        bser = b_series(sp, alphas, order)
        for k in range(2, order + 1):
            mat = [[Fraction(0)] * sp.dim for _ in range(sp.dim)]
            for delta in range(sp.dim):
                wt = sp.basis_weights[delta]
                col = bser[delta][k]
                for gamma in range(sp.dim):
                    mat[gamma][delta] = -wt * col[gamma]
            mats.append(mat)
    return mats


def _centralizer_powers(b0):
    mu = len(b0)
    powers = [_linalg.identity_matrix(mu)]
    for _ in range(1, mu):
        powers.append(_linalg.mat_mul(powers[-1], b0))
    return powers


def _trace(mat):
    return sum((mat[i][i] for i in range(len(mat))), Fraction(0))


def r_matrix(b0, binf, order):
    """Solve the flatness recursion [B0, R_{m+1}] = (m + Binf) R_m exactly.

    R_0 = Id.  At each order the Sylvester system determines R_{m+1} up to
    the centralizer of B0 (spanned by powers of B0 when the spectrum is
    simple); the free part is pinned by requiring the next order to stay
    solvable, which singles out the degree-zero solution.  Raises when a
    right-hand side is not in the image of the commutator or the pinning
    system is degenerate - both would contradict the semisimplicity
    certificate.
    """
    if order < 0:
        raise InputSpecError("series order must be nonnegative")
    mu = len(b0)
    powers = _centralizer_powers(b0)
    rs = [_linalg.identity_matrix(mu)]
    for m in range(order):
        shifted = [
            [binf[i][j] + (m if i == j else 0) for j in range(mu)]
            for i in range(mu)
        ]
        y = _linalg.mat_mul(shifted, rs[m])
        for p in powers:
            if _trace(_linalg.mat_mul(y, p)):
                raise PreconditionError(
                    f"flatness recursion is obstructed at order {m + 1}"
                )
        shifted_next = [
            [binf[i][j] + (m + 1 if i == j else 0) for j in range(mu)]
            for i in range(mu)
        ]
        rows = []
        rhs = []
        for gamma in range(mu):
            for delta in range(mu):
                row = [Fraction(0)] * (mu * mu)
                for a in range(mu):
                    row[a * mu + delta] += b0[gamma][a]
                for b in range(mu):
                    row[gamma * mu + b] -= b0[b][delta]
                rows.append(row)
                rhs.append(y[gamma][delta])
        for p in powers:
            pm = _linalg.mat_mul(p, shifted_next)
            row = [Fraction(0)] * (mu * mu)
            for a in range(mu):
                for b in range(mu):
                    row[a * mu + b] = pm[b][a]
            rows.append(row)
            rhs.append(Fraction(0))
        solved = _linalg.solve_linear_system(rows, rhs)
        if solved is None:
            raise PreconditionError(
                f"flatness recursion has no normalised solution at order {m + 1}"
            )
        flat, unique = solved
        if not unique:
            raise PreconditionError(
                f"flatness recursion is underdetermined at order {m + 1}; "
                "the point is not regular semisimple"
            )
        rs.append([flat[i * mu:(i + 1) * mu] for i in range(mu)])
    return rs


def verify_r(rs, b0, binf, eta):
    """Replay the defining identities of an R-matrix series.

    Returns a report dict with one boolean per check: ``unit`` (R_0 is the
    identity), ``recursion`` (the flatness recursion at each available
    order), and ``symplectic`` (the z-coefficients of
    R(z) eta^{-1} R^T(-z) - eta^{-1} vanish).  Residual matrices of the
    failing orders are included for diagnosis.
    """
    mu = len(b0)
    order = len(rs) - 1
    eta_inv = _linalg.invert_rational_matrix(eta)
    report = {
        "unit": rs[0] == _linalg.identity_matrix(mu),
        "recursion": [],
        "symplectic": [],
        "residuals": {},
    }
    for m in range(order):
        shifted = [
            [binf[i][j] + (m if i == j else 0) for j in range(mu)]
            for i in range(mu)
        ]
        lhs = _linalg.mat_mul(b0, rs[m + 1])
        rhs = _linalg.mat_mul(rs[m + 1], b0)
        target = _linalg.mat_mul(shifted, rs[m])
        residual = [
            [lhs[i][j] - rhs[i][j] - target[i][j] for j in range(mu)]
            for i in range(mu)
        ]
        ok = all(not c for row in residual for c in row)
        report["recursion"].append(ok)
        if not ok:
            report["residuals"][f"recursion[{m}]"] = residual
    for n in range(1, order + 1):
        total = [[Fraction(0)] * mu for _ in range(mu)]
        for i in range(n + 1):
            j = n - i
            sign = -1 if j % 2 else 1
            term = _linalg.mat_mul(
                rs[i], _linalg.mat_mul(eta_inv, _linalg.transpose(rs[j]))
            )
            for a in range(mu):
                for b in range(mu):
                    total[a][b] += sign * term[a][b]
        ok = all(not c for row in total for c in row)
        report["symplectic"].append(ok)
        if not ok:
            report["residuals"][f"symplectic[{n}]"] = total
    report["ok"] = (
        report["unit"]
        and all(report["recursion"])
        and all(report["symplectic"])
    )
    return report


def scaling_check(rs_base, rs_scaled, basis_weights, base, root):
    """Degree-zero check of an R-matrix pair computed at scaled points.

    If the second series was computed at the parameter point scaled by
    lambda = base**root (each parameter multiplied by lambda to its
    weight), a weight-homogeneous R-matrix must satisfy

        R_k[g][d](scaled) = lambda**(wt_d - wt_g - k) * R_k[g][d](base).

    All exponents must come out integral against ``root``; returns True
    when every entry matches.
    """
    mu = len(basis_weights)
    for k in range(len(rs_base)):
        for g in range(mu):
            for d in range(mu):
                expo = (basis_weights[d] - basis_weights[g] - k) * root
                if expo.denominator != 1:
                    raise InputSpecError(
                        "scaling root does not clear the weight denominators"
                    )
                factor = Fraction(base) ** int(expo)
                if rs_scaled[k][g][d] != factor * rs_base[k][g][d]:
                    return False
    return True


def a_series_symbolic_cubic(order):
    """Inverse-multiplier series for the one-variable cubic unfolding.

    Works over polynomials in the two unfolding parameters with the single
    denominator D = 4 s2^3 + 9 s1^2 cleared: returns ``(ring, disc,
    numerators)`` where ``numerators[k]`` is an x-polynomial of degree at
    most one with A_k = numerators[k] / disc**(k+1).  Each numerator is
    checked to be weight-homogeneous of the expected degree.
    """
    if order < 0:
        raise InputSpecError("series order must be nonnegative")
    ring = PolyRing(("x1",), ("s1", "s2"))
    x = ring.parse("x1")
    s1 = ring.parse("s1")
    s2 = ring.parse("s2")
    F = ring.parse("1/3*x1^3 + s2*x1 + s1")
    disc = ring.parse("4*s2^3 + 9*s1^2")

    def apply_cleared_inverse(p):
        # D * M_F^{-1} applied to the class c0 + c1 x.
        c0, c1 = _cubic_components(ring, p)
        left = c0 * 9 * s1 + c1 * 6 * s2 * s2
        right = c1 * 9 * s1 - c0 * 6 * s2
        return left + right * x

    numerators = [apply_cleared_inverse(ring.one())]
    reduced = [_cubic_latred(ring, numerators[0] * F)]
    for k in range(1, order + 1):
        rhs = ring.zero()
        dpow = ring.one()
        for a in range(1, k + 1):
            slices = reduced[k - a]
            if a < len(slices):
                rhs = rhs + dpow * slices[a]
            dpow = dpow * disc
        numerators.append(apply_cleared_inverse(-rhs))
        reduced.append(_cubic_latred(ring, numerators[k] * F))
    weights = {"x1": Fraction(1, 3), "s1": Fraction(1), "s2": Fraction(2, 3)}
    for k, num in enumerate(numerators):
        for (xe, se, _ze), _c in num.terms.items():
            wt = xe[0] * weights["x1"] + se[0] * weights["s1"] + se[1] * weights["s2"]
            if wt != k + 1:
                raise PreconditionError(
                    "symbolic inverse-multiplier numerator is not homogeneous"
                )
    return ring, disc, numerators


def _cubic_components(ring, p):
    """Split an x-degree<=1 polynomial into its 1- and x-components."""
    c0 = ring.zero()
    c1 = ring.zero()
    for (xe, se, ze), c in p.terms.items():
        mono = MPoly(ring, {((0,), se, ze): c})
        if xe[0] == 0:
            c0 = c0 + mono
        elif xe[0] == 1:
            c1 = c1 + mono
        else:
            raise PreconditionError("class representative has x-degree above one")
    return c0, c1


def _cubic_latred(ring, p):
    """Lattice reduction for the cubic unfolding over symbolic parameters.

    Divides by x^2 + s2, records the degree<=1 normal form, and feeds
    -d(cofactor)/dx forward with one more power of z.  Returns the list of
    z-slices.
    """
    x = ring.parse("x1")
    s2 = ring.parse("s2")
    slices = []
    work = p
    while not work.is_zero():
        cofactor = ring.zero()
        rest = work
        changed = True
        while changed:
            changed = False
            for (xe, se, ze), c in sorted(
                rest.terms.items(), key=lambda kv: kv[0][0][0], reverse=True
            ):
                if xe[0] >= 2:
                    shift = MPoly(ring, {((xe[0] - 2,), se, ze): c})
                    cofactor = cofactor + shift
                    rest = rest - shift * (x * x + s2)
                    changed = True
                    break
        slices.append(rest)
        work = -cofactor.diff_x(0)
    return slices
