"""Small exact linear-algebra helpers over Fraction entries."""

from fractions import Fraction


def identity_matrix(n):
    return [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    return [
        [sum((a[i][k] * b[k][j] for k in range(m)), Fraction(0)) for j in range(p)]
        for i in range(n)
    ]


def mat_vec(a, v):
    return [sum((row[k] * v[k] for k in range(len(v))), Fraction(0)) for row in a]


def transpose(a):
    return [list(col) for col in zip(*a)]


def solve_rational(a, rhs_columns):
    """Solve a X = rhs for several right-hand-side columns, exactly.

    Returns the solution columns, or None when the matrix is singular.
    """
    n = len(a)
    aug = [list(map(Fraction, row)) + [Fraction(c[i]) for c in rhs_columns] for i, row in enumerate(a)]
    width = n + len(rhs_columns)
    row = 0
    for col in range(n):
        pivot = next((r for r in range(row, n) if aug[r][col]), None)
        if pivot is None:
            return None
        aug[row], aug[pivot] = aug[pivot], aug[row]
        inv = Fraction(1) / aug[row][col]
        aug[row] = [v * inv for v in aug[row]]
        for r in range(n):
            if r != row and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [v - factor * w for v, w in zip(aug[r], aug[row])]
        row += 1
    return [[aug[i][n + j] for i in range(n)] for j in range(len(rhs_columns))]


def invert_rational_matrix(a):
    """Exact inverse of a square Fraction matrix, or None if singular."""
    n = len(a)
    cols = solve_rational(a, [[Fraction(1) if i == j else Fraction(0) for i in range(n)] for j in range(n)])
    if cols is None:
        return None
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def solve_linear_system(rows, rhs):
    """Solve a general (possibly rectangular) exact linear system.

    Returns ``(solution, unique)`` where ``solution`` satisfies every
    equation exactly and ``unique`` says whether it is the only one; returns
    ``None`` when the system is inconsistent.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    aug = [list(map(Fraction, r)) + [Fraction(b)] for r, b in zip(rows, rhs)]
    pivots = []
    row = 0
    for col in range(n):
        pivot = next((r for r in range(row, m) if aug[r][col]), None)
        if pivot is None:
            continue
        aug[row], aug[pivot] = aug[pivot], aug[row]
        inv = Fraction(1) / aug[row][col]
        aug[row] = [v * inv for v in aug[row]]
        for r in range(m):
            if r != row and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [v - factor * w for v, w in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
    for r in range(row, m):
        if aug[r][n]:
            return None
    solution = [Fraction(0)] * n
    for r, col in enumerate(pivots):
        solution[col] = aug[r][n]
    return solution, len(pivots) == n


def char_poly(a):
    """Characteristic polynomial of a Fraction matrix via trace recursion.

    Returns coefficients [c_0, ..., c_n] with p(x) = sum c_k x^k and c_n = 1.
    """
    n = len(a)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    m = identity_matrix(n)
    for k in range(1, n + 1):
        m = mat_mul(a, m)
        trace = sum((m[i][i] for i in range(n)), Fraction(0))
        c = -trace / k
        coeffs[n - k] = c
        for i in range(n):
            m[i][i] += c
    return coeffs


def poly_gcd_rational(p, q):
    """Monic gcd of two rational coefficient lists (lowest degree first)."""

    def trim(u):
        while u and not u[-1]:
            u.pop()
        return u

    p, q = trim(list(p)), trim(list(q))
    while q:
        # remainder of p by q
        while len(p) >= len(q) and p:
            factor = p[-1] / q[-1]
            shift = len(p) - len(q)
            for i, c in enumerate(q):
                p[i + shift] -= factor * c
            p = trim(p)
        p, q = q, p
    if p:
        lead = p[-1]
        p = [c / lead for c in p]
    return p


def is_squarefree(p):
    """Whether a rational polynomial (lowest degree first) is squarefree."""
    dp = [c * k for k, c in enumerate(p)][1:]
    g = poly_gcd_rational(p, dp)
    return len(g) == 1
