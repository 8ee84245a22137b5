"""Good bases: z-decorated frames of the lattice with a constant pairing.

A good basis is a tuple of homogeneous lattice sections whose classes
restrict to a basis at z = 0 and whose pairwise lattice pairings are
z-constant.  The monomial basis of the Milnor algebra is the canonical
example; custom bases are supplied as polynomial representatives in x and z
and validated here.

The frame data is the matrix M with columns the reduced coordinates of the
sections over the basis classes, together with its exact inverse as a
z-polynomial matrix (the weight grading makes the inverse terminate).
"""

from fractions import Fraction

from . import _linalg
from .brieskorn import LatticeElement, k_pairing, lattice_reduce
from .errors import PreconditionError

CERTIFIED = "certified"
UNVERIFIED = "unverified"


def _z_matrix_slices(matrix):
    orders = set()
    for row in matrix:
        for entry in row:
            orders.update(entry.z_support())
    return sorted(orders)


def z_matrix_inverse(ring, matrix):
    """Exact inverse of a z-polynomial matrix with invertible z^0 part.

    Solves order by order in z; the result must close up to the natural
    degree bound or the matrix was not invertible over polynomials.
    """
    n = len(matrix)
    slices = {}
    zmax = 0
    for k in _z_matrix_slices(matrix):
        if k < 0:
            raise PreconditionError("frame matrix entries must be polynomial in z")
        zmax = max(zmax, k)
        slices[k] = [[matrix[i][j].z_coefficient(k).constant() for j in range(n)] for i in range(n)]
    m0_inv = _linalg.invert_rational_matrix(slices.get(0, [[Fraction(0)] * n for _ in range(n)]))
    if m0_inv is None:
        raise PreconditionError("the frame is not a basis at z = 0")
    hard_cap = max(1, n * zmax)
    inv_slices = [m0_inv]
    for k in range(1, hard_cap + 1):
        acc = [[Fraction(0)] * n for _ in range(n)]
        for j in range(1, min(k, zmax) + 1):
            mj = slices.get(j)
            if mj is None:
                continue
            prod = _linalg.mat_mul(mj, inv_slices[k - j])
            for r in range(n):
                for c in range(n):
                    acc[r][c] += prod[r][c]
        nxt = _linalg.mat_mul(m0_inv, acc)
        inv_slices.append([[-nxt[r][c] for c in range(n)] for r in range(n)])
    while len(inv_slices) > 1 and all(
        not c for row in inv_slices[-1] for c in row
    ):
        inv_slices.pop()
    inverse = [
        [
            sum((ring.const(inv_slices[k][i][j]).mul_z(k) for k in range(len(inv_slices))), ring.zero())
            for j in range(n)
        ]
        for i in range(n)
    ]
    # exactness check: M * inverse must be the identity on the nose
    for i in range(n):
        for j in range(n):
            acc = ring.zero()
            for k in range(n):
                acc = acc + matrix[i][k] * inverse[k][j]
            expected = ring.one() if i == j else ring.zero()
            if acc != expected:
                raise PreconditionError("the frame matrix is not invertible over z-polynomials")
    return inverse


class GoodBasis:
    """A validated frame of the lattice over a Milnor algebra."""

    def __init__(self, data, reps, columns, status):
        self.data = data
        self.ring = data.ring
        self.reps = tuple(reps)
        self.columns = tuple(columns)
        self.status = status
        n = data.dim
        self.matrix = [[columns[a].coeffs[g] for a in range(n)] for g in range(n)]
        self.matrix_inverse = z_matrix_inverse(data.ring, self.matrix)
        self.is_monomial = all(
            self.matrix[g][a] == (data.ring.one() if g == a else data.ring.zero())
            for g in range(n)
            for a in range(n)
        )
        eta = []
        for a in range(n):
            row = []
            for b in range(n):
                pairing = k_pairing(data, columns[a], columns[b])
                row.append(pairing.z_coefficient(0).constant())
            eta.append(row)
        self.eta = eta
        self.eta_inverse = _linalg.invert_rational_matrix(eta)
        if self.eta_inverse is None:
            raise PreconditionError("the induced pairing of the basis is degenerate")

    def section_weight(self, alpha):
        """Weight of the section (x-weight plus z-degree, constant per section)."""
        wts = set()
        for (xe, _, ze), _c in self.reps[alpha].terms.items():
            wts.add(self.data.monomial_weight(xe) + ze)
        if len(wts) != 1:
            raise PreconditionError("section is not weight-homogeneous")
        return wts.pop()

    def coordinates(self, element):
        """Convert a reduced class to coordinates over this frame: M^-1 * coeffs."""
        n = self.data.dim
        out = []
        for a in range(n):
            acc = self.ring.zero()
            for g in range(n):
                entry = self.matrix_inverse[a][g]
                if entry:
                    acc = acc + entry * element.coeffs[g]
            out.append(acc)
        return LatticeElement(self.ring, out, element.dropped)

    def rep_poly(self, alpha):
        """Polynomial representative (in x and z) of the alpha-th section."""
        return self.reps[alpha]

    def element_rep(self, coords):
        """Polynomial representative of a coordinate vector over this frame."""
        total = self.ring.zero()
        for c, rep in zip(coords, self.reps):
            if c:
                total = total + c * rep
        return total


def monomial_good_basis(data):
    """The canonical good basis: the staircase monomials themselves."""
    ring = data.ring
    reps = list(data.basis_polys)
    columns = []
    for a in range(data.dim):
        coeffs = [ring.one() if g == a else ring.zero() for g in range(data.dim)]
        columns.append(LatticeElement(ring, coeffs))
    return GoodBasis(data, reps, columns, CERTIFIED)


def custom_good_basis(data, reps, allow_unverified=False):
    """Validate user-supplied polynomial representatives as a good basis.

    Hard requirements (never waived): exactly one section per basis class,
    x- and z-only polynomial representatives, weight homogeneity of each
    section, and invertibility of the frame at z = 0.  The z-constancy of
    all pairwise lattice pairings is the grading certificate; with
    ``allow_unverified`` a frame failing it is accepted and marked, without
    the flag it is rejected.
    """
    if len(reps) != data.dim:
        raise PreconditionError(
            f"need exactly {data.dim} sections, got {len(reps)}"
        )
    for rep in reps:
        if rep.is_zero() or not rep.is_s_free():
            raise PreconditionError("sections must be nonzero polynomials in x and z")
        if rep.z_min() < 0:
            raise PreconditionError("sections must be polynomial in z")
        wts = {data.monomial_weight(xe) + ze for (xe, _, ze) in rep.terms}
        if len(wts) != 1:
            raise PreconditionError("sections must be weight-homogeneous (z counts 1)")
    columns = [lattice_reduce(data, rep) for rep in reps]
    status = CERTIFIED
    certified = True
    for i in range(len(columns)):
        for j in range(i, len(columns)):
            if not k_pairing(data, columns[i], columns[j]).is_z_free():
                certified = False
                break
        if not certified:
            break
    if not certified:
        if not allow_unverified:
            raise PreconditionError(
                "the sections do not pair to z-constants; pass the explicit "
                "override to accept an unverified basis"
            )
        status = UNVERIFIED
    return GoodBasis(data, reps, columns, status)


def phi_omega_inverse(gb, p):
    """Coordinates over the good-basis frame of the class of a polynomial."""
    return gb.coordinates(lattice_reduce(gb.data, p))
