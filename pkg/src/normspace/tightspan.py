"""Admissible and extremal functions on finite metric spaces.

A function f is admissible when f(x) + f(y) >= d(x, y) for all pairs, and
extremal when additionally f(x) = max_y (d(x, y) - f(y)) for every x: the
extremal functions form the tight span, the smallest hyperconvex space
containing X.  Two arithmetic modes share each operation: binary64 with a
1e-9 tolerance, and exact Fractions when the input matrix is rational.
"""

import itertools
from fractions import Fraction

import numpy as np

from . import _kernels, qlinalg
from .errors import InfeasibleScaleError, UsageError

TOL = 1e-9
MAX_SPAN_POINTS = 6


def _is_exact_scalar(x):
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


class FiniteMetric:
    """A finite (pseudo)metric space with validated axioms.

    Construction from ints/Fractions selects the exact mode; floats select
    the binary64 mode.  `dist` is always available as a float array.
    """

    __slots__ = ("labels", "rows", "exact", "dist")

    def __init__(self, d, labels=None, exact=None):
        rows = [list(r) for r in d]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise UsageError("distance matrix must be square")
        if exact is None:
            exact = all(_is_exact_scalar(x) for r in rows for x in r)
        if exact:
            rows = [[Fraction(x) for x in r] for r in rows]
        else:
            rows = [[float(x) for x in r] for r in rows]
        if labels is None:
            labels = [str(i) for i in range(n)]
        labels = [str(x) for x in labels]
        if len(labels) != n:
            raise UsageError("labels must match the matrix size")
        tol = 0 if exact else TOL
        for i in range(n):
            if abs(rows[i][i]) > tol:
                raise UsageError("nonzero diagonal")
            for j in range(n):
                if rows[i][j] < -tol:
                    raise UsageError("negative distance")
                if abs(rows[i][j] - rows[j][i]) > tol:
                    raise UsageError("asymmetric matrix")
                for k in range(n):
                    if rows[i][j] > rows[i][k] + rows[k][j] + tol:
                        raise UsageError(
                            f"triangle inequality fails at ({i},{j},{k})"
                        )
        self.labels = tuple(labels)
        self.rows = tuple(tuple(r) for r in rows)
        self.exact = exact
        self.dist = np.array([[float(x) for x in r] for r in rows])

    @property
    def n(self):
        return len(self.labels)

    def d(self, i, j):
        return self.rows[i][j]

    def to_json(self):
        return {
            "labels": list(self.labels),
            "d": [[int(x) if self.exact and Fraction(x).denominator == 1
                   else float(x) for x in r] for r in self.rows],
        }

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(obj["d"], labels=obj.get("labels"))
        except (KeyError, TypeError) as exc:
            raise UsageError(f"bad FiniteMetric JSON: {exc}") from exc

    def __repr__(self):
        return f"FiniteMetric(n={self.n}, exact={self.exact})"


def _coerce_f(f, space):
    if len(f) != space.n:
        raise UsageError("function length does not match the space")
    if space.exact:
        return [Fraction(x) if _is_exact_scalar(x) else Fraction(float(x)) for x in f]
    return [float(x) for x in f]


def is_admissible(f, space):
    """f(x) + f(y) >= d(x, y) for all pairs, and f >= 0."""
    ff = _coerce_f(f, space)
    tol = 0 if space.exact else TOL
    if any(x < -tol for x in ff):
        return False
    n = space.n
    return all(
        ff[i] + ff[j] >= space.d(i, j) - tol
        for i in range(n)
        for j in range(i, n)
    )


def is_extremal(f, space):
    """The fixed-point identity f(x) = max_y (d(x, y) - f(y)) for every x."""
    ff = _coerce_f(f, space)
    if not is_admissible(ff, space):
        raise UsageError("function is not admissible")
    tol = 0 if space.exact else TOL
    n = space.n
    if n == 1:
        return abs(ff[0]) <= tol
    for x in range(n):
        sup = max(space.d(x, y) - ff[y] for y in range(n))
        if abs(ff[x] - sup) > tol:
            return False
    return True


def ts_distance(f, g):
    """Supremum distance max_x |f(x) - g(x)|."""
    if len(f) != len(g):
        raise UsageError("length mismatch")
    return max(abs(a - b) for a, b in zip(f, g))


def kuratowski_embed(space):
    """The canonical embedding x -> d(x, .); each image is extremal and the
    embedding is isometric for the sup distance."""
    out = [list(space.rows[i]) for i in range(space.n)]
    for row in out:
        if not is_extremal(row, space):
            raise RuntimeError("kuratowski image failed the extremal identity")
    return out


def extremal_closure(f, space):
    """A minimal admissible function below f (cyclic coordinate descent).

    Sweeps f(x) <- max(0, max_{y != x} (d(x, y) - f(y))) in ascending point
    order; each step preserves admissibility and never increases f, and the
    fixed points are exactly the extremal functions.
    """
    ff = _coerce_f(f, space)
    if not is_admissible(ff, space):
        raise UsageError("closure input must be admissible")
    n = space.n
    if n == 1:
        return [Fraction(0)] if space.exact else [0.0]
    if space.exact:
        for _ in range(4 * n + 8):
            moved = False
            for x in range(n):
                best = max(space.d(x, y) - ff[y] for y in range(n) if y != x)
                if best < 0:
                    best = Fraction(0)
                if best != ff[x]:
                    ff[x] = best
                    moved = True
            if not moved:
                break
        if moved:
            raise RuntimeError("exact closure did not stabilize")
        return ff
    out, _ = _kernels.closure_sweeps(
        space.dist, np.array(ff, dtype=float), 1e-12, 10_000
    )
    return [float(x) for x in out]


def _solve_candidate(space, pairs):
    """Solve f(i)+f(j) = d(i,j) over the given tight pairs (i = j meaning
    2 f(i) = 0); None when the system is singular."""
    n = space.n
    if space.exact:
        rows = []
        rhs = []
        for i, j in pairs:
            row = [Fraction(0)] * n
            row[i] += 1
            row[j] += 1
            rows.append(row)
            rhs.append(space.d(i, j))
        try:
            return list(qlinalg.solve(qlinalg.mat(rows), rhs))
        except UsageError:
            return None
    mat = np.zeros((n, n))
    rhs = np.zeros(n)
    for r, (i, j) in enumerate(pairs):
        mat[r, i] += 1
        mat[r, j] += 1
        rhs[r] = space.dist[i, j]
    if abs(np.linalg.det(mat)) < 1e-9:
        return None
    return list(np.linalg.solve(mat, rhs))


def tight_span_vertices(space):
    """All 0-cells of the tight span (extremal functions pinned by a
    full-rank set of tight pairs); includes every Kuratowski image."""
    n = space.n
    if n > MAX_SPAN_POINTS:
        raise InfeasibleScaleError(f"tight span enumeration is limited to {MAX_SPAN_POINTS} points")
    all_pairs = [(i, j) for i in range(n) for j in range(i, n)]
    found = []
    seen = set()
    for combo in itertools.combinations(all_pairs, n):
        f = _solve_candidate(space, combo)
        if f is None:
            continue
        if not is_admissible(f, space):
            continue
        if not is_extremal(f, space):
            continue
        if space.exact:
            key = tuple(f)
        else:
            key = tuple(round(x / TOL) for x in f)
        if key not in seen:
            seen.add(key)
            found.append(f)
    for e in kuratowski_embed(space):
        tol = 0 if space.exact else 10 * TOL
        if not any(ts_distance(e, f) <= tol for f in found):
            raise RuntimeError("tight span enumeration missed a Kuratowski image")
    found.sort(key=lambda f: [float(x) for x in f])
    return found
