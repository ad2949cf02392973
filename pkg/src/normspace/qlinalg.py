"""Small exact linear algebra toolkit over the rationals.

Matrices are tuples of tuples of ``fractions.Fraction`` in row-major order.
Everything here is exact; sizes stay tiny (n <= 6), so Gaussian elimination
with Fraction arithmetic is entirely adequate.
"""

from fractions import Fraction

from .errors import UsageError


def frac(x):
    """Coerce ints, strings like '3/4', and Fractions to Fraction (exact)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(x)


def mat(rows):
    """Deep-convert an iterable of iterables into an immutable Fraction matrix."""
    return tuple(tuple(frac(x) for x in row) for row in rows)


def vec(entries):
    return tuple(frac(x) for x in entries)


def identity(n):
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n))
        for i in range(n)
    )


def zeros(n, m):
    return tuple(tuple(Fraction(0) for _ in range(m)) for _ in range(n))


def transpose(a):
    return tuple(tuple(row[i] for row in a) for i in range(len(a[0])))


def matmul(a, b):
    bt = transpose(b)
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def matvec(a, v):
    if len(a[0]) != len(v):
        raise UsageError(f"matvec shape mismatch: {len(a[0])} vs {len(v)}")
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def column(a, j):
    return tuple(row[j] for row in a)


def from_columns(cols):
    return tuple(tuple(col[i] for col in cols) for i in range(len(cols[0])))


def scale(a, c):
    c = frac(c)
    return tuple(tuple(c * x for x in row) for row in a)


def _elim(a):
    """Fraction-exact row echelon; returns (echelon rows, det, rank)."""
    rows = [list(r) for r in a]
    n = len(rows)
    m = len(rows[0]) if n else 0
    det = Fraction(1)
    rank = 0
    for col in range(m):
        if rank == n:
            break
        piv = next((r for r in range(rank, n) if rows[r][col] != 0), None)
        if piv is None:
            det = Fraction(0)
            continue
        if piv != rank:
            rows[rank], rows[piv] = rows[piv], rows[rank]
            det = -det
        det *= rows[rank][col]
        inv = 1 / rows[rank][col]
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(n):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    if rank < min(n, m):
        det = Fraction(0)
    return rows, det, rank


def det(a):
    n = len(a)
    if any(len(row) != n for row in a):
        raise UsageError("det expects a square matrix")
    _, d, _ = _elim(a)
    return d


def rank(a):
    _, _, r = _elim(a)
    return r


def inv(a):
    """Exact inverse via Gauss-Jordan; raises UsageError on a singular input."""
    n = len(a)
    if any(len(row) != n for row in a):
        raise UsageError("inv expects a square matrix")
    aug = [list(row) + [Fraction(1) if i == j else Fraction(0) for j in range(n)]
           for i, row in enumerate(a)]
    red, d, r = _elim(aug)
    if r < n or all(red[i][i] == 0 for i in range(n)):
        raise UsageError("matrix is singular")
    # _elim normalizes pivots to 1 and clears columns, so the left block is I
    for i in range(n):
        if red[i][i] != 1 or any(red[i][j] != 0 for j in range(n) if j != i):
            raise UsageError("matrix is singular")
    return tuple(tuple(red[i][n:]) for i in range(n))


def solve(a, b):
    """Solve a x = b exactly for a single right-hand side vector."""
    n = len(a)
    aug = [list(row) + [frac(bi)] for row, bi in zip(a, b)]
    red, _, r = _elim(aug)
    for i in range(n):
        if red[i][i] == 0:
            raise UsageError("singular system")
    return tuple(red[i][n] for i in range(n))
