"""Diagonalizable ultrametric norms on Q^n with the p-adic absolute value.

A norm is stored as an invertible rational basis matrix (column j = j-th
basis vector in standard coordinates) together with a rational weight
vector m.  Writing x for the coordinates of v in that basis, the norm value
is q^max_i(m_i - v_p(x_i)) with q = p, and all arithmetic on the log scale
is exact Fraction arithmetic.  No floating point enters this module.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass

from . import qlinalg
from .errors import PairwiseRadiusError, UsageError
from .qlinalg import frac, mat, vec


def is_prime(p):
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PAdicContext:
    """The prime p; values of the absolute value live in p^Z (q = p)."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise UsageError(f"p must be a prime integer >= 2, got {self.p!r}")


def pval_int(n, p):
    """Exact p-adic valuation of a nonzero integer."""
    if n == 0:
        raise UsageError("valuation of zero is undefined")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def pval(x, p):
    """Exact p-adic valuation of a nonzero rational."""
    x = frac(x)
    if x == 0:
        raise UsageError("valuation of zero is undefined")
    return pval_int(x.numerator, p) - pval_int(x.denominator, p)


@functools.total_ordering
class LogValue:
    """A norm value on the log_q scale: a rational, or bottom for the zero vector.

    Bottom compares below every finite value and absorbs shifts.
    """

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = None if value is None else frac(value)

    @classmethod
    def bottom(cls):
        return cls(None)

    @property
    def is_bottom(self):
        return self.value is None

    def shifted(self, a):
        if self.is_bottom:
            return self
        return LogValue(self.value + frac(a))

    def __add__(self, a):
        return self.shifted(a)

    def __eq__(self, other):
        if isinstance(other, LogValue):
            return self.value == other.value
        if self.is_bottom:
            return False
        return self.value == other

    def __lt__(self, other):
        ov = other.value if isinstance(other, LogValue) else frac(other)
        if self.is_bottom:
            return ov is not None
        if ov is None:
            return False
        return self.value < ov

    def __hash__(self):
        return hash(self.value)

    def __repr__(self):
        return "LogValue(bottom)" if self.is_bottom else f"LogValue({self.value})"


def log_max(values):
    out = LogValue.bottom()
    for v in values:
        if out < v:
            out = v
    return out


class DiagNorm:
    """An ultrametric norm diagonal in an explicit rational basis."""

    __slots__ = ("ctx", "basis", "weights", "_inv")

    def __init__(self, ctx, basis, weights):
        if not isinstance(ctx, PAdicContext):
            ctx = PAdicContext(int(ctx))
        basis = mat(basis)
        weights = vec(weights)
        n = len(weights)
        if len(basis) != n or any(len(row) != n for row in basis):
            raise UsageError("basis must be square and match the weight length")
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "_inv", None)
        if qlinalg.det(basis) == 0:
            raise UsageError("basis matrix is singular")

    def __setattr__(self, *a):  # immutable by construction
        raise AttributeError("DiagNorm is immutable")

    @property
    def dim(self):
        return len(self.weights)

    @property
    def basis_inv(self):
        if self._inv is None:
            object.__setattr__(self, "_inv", qlinalg.inv(self.basis))
        return self._inv

    @classmethod
    def standard(cls, ctx, weights):
        weights = vec(weights)
        return cls(ctx, qlinalg.identity(len(weights)), weights)

    def basis_vector(self, j):
        return qlinalg.column(self.basis, j)

    def __eq__(self, other):
        return (
            isinstance(other, DiagNorm)
            and self.ctx == other.ctx
            and self.basis == other.basis
            and self.weights == other.weights
        )

    def __hash__(self):
        return hash((self.ctx, self.basis, self.weights))

    def __repr__(self):
        return f"DiagNorm(p={self.ctx.p}, n={self.dim})"

    # -- JSON: rationals as "num/den" strings, basis as a list of columns --

    def to_json(self):
        cols = [
            [str(self.basis[i][j]) for i in range(self.dim)]
            for j in range(self.dim)
        ]
        return {
            "p": self.ctx.p,
            "basis": cols,
            "weights": [str(w) for w in self.weights],
        }

    @classmethod
    def from_json(cls, obj):
        try:
            p = int(obj["p"])
            cols = [[frac(x) for x in col] for col in obj["basis"]]
            weights = [frac(x) for x in obj["weights"]]
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad DiagNorm JSON: {exc}") from exc
        return cls(PAdicContext(p), qlinalg.from_columns(cols), weights)

    @classmethod
    def from_json_str(cls, s):
        return cls.from_json(json.loads(s))


def _require_same_space(a, b):
    if a.ctx != b.ctx:
        raise UsageError(f"context mismatch: p={a.ctx.p} vs p={b.ctx.p}")
    if a.dim != b.dim:
        raise UsageError(f"dimension mismatch: {a.dim} vs {b.dim}")


def eval_log_norm(eta, v):
    """log_q eta(v) as a LogValue; bottom iff v = 0."""
    v = vec(v)
    if len(v) != eta.dim:
        raise UsageError(f"vector has dimension {len(v)}, norm expects {eta.dim}")
    x = qlinalg.matvec(eta.basis_inv, v)
    p = eta.ctx.p
    best = None
    for mi, xi in zip(eta.weights, x):
        if xi == 0:
            continue
        t = mi - pval(xi, p)
        if best is None or t > best:
            best = t
    return LogValue(best)


def log_sup_ratio(eta, etap):
    """Exact log_q sup_{v != 0} eta(v)/eta'(v).

    The sup is attained at a basis vector of eta' (ultrametric inequality),
    so it equals max_j (log eta(f_j) - m'_j).
    """
    _require_same_space(eta, etap)
    best = None
    for j in range(etap.dim):
        t = eval_log_norm(eta, etap.basis_vector(j)).value - etap.weights[j]
        if best is None or t > best:
            best = t
    return best


def leq_norms(eta, etap):
    """True iff eta(v) <= eta'(v) for all v (exact)."""
    return log_sup_ratio(eta, etap) <= 0


def scale_norm(eta, a):
    """The norm q^a * eta: all weights shifted by a."""
    a = frac(a)
    return DiagNorm(eta.ctx, eta.basis, tuple(w + a for w in eta.weights))


def gi_distance(eta, etap):
    """Exact Goldman-Iwahori distance sup_v |log_q eta(v)/eta'(v)|."""
    a = log_sup_ratio(eta, etap)
    b = log_sup_ratio(etap, eta)
    d = max(a, b)
    if d < 0:
        raise RuntimeError("negative distance: broken norm input")
    return d


def norms_equal(eta, etap):
    return gi_distance(eta, etap) == 0


def adapted_transition_check(u, m_from, m_to, p):
    """True iff the columns of u (coordinates in an m_from-adapted basis)
    define an m_to-adapted basis of the same norm.

    Entrywise criterion: m_from[i] - v_p(u[i][k]) <= m_to[k] for u, and the
    mirrored condition for u^{-1}; together they force norm equality.
    """
    u = mat(u)
    try:
        uinv = qlinalg.inv(u)
    except UsageError:
        raise UsageError("transition matrix is singular")
    n = len(u)
    for i in range(n):
        for k in range(n):
            if u[i][k] != 0 and m_from[i] - pval(u[i][k], p) > m_to[k]:
                return False
            if uinv[i][k] != 0 and m_to[i] - pval(uinv[i][k], p) > m_from[k]:
                return False
    return True


def stabilizer_check(u, m, ctx):
    """True iff u and u^{-1} preserve the diagonal norm with weights m."""
    m = vec(m)
    return adapted_transition_check(u, m, m, ctx.p)


def common_adapted_basis(eta, etap):
    """A basis diagonalizing both norms, with their weights in that basis.

    Returns (basis, m, m') with basis an invertible rational matrix whose
    columns are the common basis vectors in standard coordinates.  The
    algorithm is weighted Smith pivoting on the transition matrix: the pivot
    (i, j) maximizes m_i - m'_j - v_p(g_ij), which makes every elementary
    multiplier pass the stabilizer valuation test, so each side keeps its
    norm while the matrix is reduced to a scaled permutation.  The output is
    verified before returning; a pivoting bug cannot escape silently.
    """
    _require_same_space(eta, etap)
    n = eta.dim
    p = eta.ctx.p
    m = list(eta.weights)
    mp = list(etap.weights)
    # g[i][j] = coordinate i of eta'-basis vector j, in eta's (current) basis
    g = [list(row) for row in qlinalg.matmul(eta.basis_inv, etap.basis)]
    f_cols = [list(qlinalg.column(etap.basis, j)) for j in range(n)]  # std coords
    rows = list(range(n))
    cols = list(range(n))
    sigma = {}
    pivots = {}
    for _ in range(n):
        best = None
        for i in rows:
            for j in cols:
                if g[i][j] == 0:
                    continue
                w = m[i] - mp[j] - pval(g[i][j], p)
                if best is None or w > best[0]:
                    best = (w, i, j)
        _, i0, j0 = best
        piv = g[i0][j0]
        # Row clearing absorbs f_{j0} into the eta-adapted basis; pivot
        # maximality makes the multipliers pass the stabilizer test, so the
        # positional weights m stay valid.
        for i in rows:
            if i == i0 or g[i][j0] == 0:
                continue
            c = g[i][j0] / piv
            for j in cols:
                g[i][j] -= c * g[i0][j]
        # Column clearing runs elementary operations on the eta'-adapted
        # basis (tracked in standard coordinates), preserving eta'.
        for j in cols:
            if j == j0 or g[i0][j] == 0:
                continue
            c = g[i0][j] / piv
            for i in range(n):
                g[i][j] -= c * g[i][j0]
            for i in range(n):
                f_cols[j][i] -= c * f_cols[j0][i]
        sigma[j0] = i0
        pivots[j0] = piv
        rows.remove(i0)
        cols.remove(j0)
    basis = qlinalg.from_columns(f_cols)
    mm = tuple(m[sigma[j]] - pval(pivots[j], p) for j in range(n))
    mmp = tuple(mp[j] for j in range(n))
    _verify_common_basis(eta, etap, basis, mm, mmp)
    return basis, mm, mmp


def _verify_common_basis(eta, etap, basis, mm, mmp):
    cand = DiagNorm(eta.ctx, basis, mm)
    candp = DiagNorm(eta.ctx, basis, mmp)
    if not (leq_norms(cand, eta) and leq_norms(eta, cand)):
        raise RuntimeError("common basis does not reproduce the first norm")
    if not (leq_norms(candp, etap) and leq_norms(etap, candp)):
        raise RuntimeError("common basis does not reproduce the second norm")
    gap = max(abs(a - b) for a, b in zip(mm, mmp))
    if gap != gi_distance(eta, etap):
        raise RuntimeError("weight gap does not match the distance")


def join_norms(norms):
    """Least upper bound of a nonempty family (pointwise supremum).

    In a common adapted basis the pointwise sup of two diagonal norms is the
    diagonal norm with coordinatewise-max weights; joins of longer families
    iterate the pairwise join.
    """
    norms = list(norms)
    if not norms:
        raise UsageError("join of an empty family")
    out = norms[0]
    for other in norms[1:]:
        basis, mm, mmp = common_adapted_basis(out, other)
        out = DiagNorm(out.ctx, basis, tuple(max(a, b) for a, b in zip(mm, mmp)))
    return out


def helly_witness_na(norms, radii):
    """A norm inside every ball B(eta_s, a_s) of a pairwise-compatible family.

    Checks the pairwise condition d(eta_s, eta_t) <= a_s + a_t, then returns
    the join of the scaled-down norms q^{-a_s} eta_s, re-verifying the ball
    memberships on the way out.
    """
    norms = list(norms)
    radii = [frac(r) for r in radii]
    if len(norms) != len(radii):
        raise UsageError("norms and radii must have equal length")
    if not norms:
        raise UsageError("empty ball family")
    if any(r < 0 for r in radii):
        raise UsageError("radii must be nonnegative")
    for s in range(len(norms)):
        for t in range(s + 1, len(norms)):
            d = gi_distance(norms[s], norms[t])
            if d > radii[s] + radii[t]:
                raise PairwiseRadiusError(
                    (s, t), d - radii[s] - radii[t],
                    f"balls {s} and {t} do not intersect: "
                    f"d = {d} > {radii[s]} + {radii[t]}",
                )
    theta = join_norms([scale_norm(eta, -a) for eta, a in zip(norms, radii)])
    for s, (eta, a) in enumerate(zip(norms, radii)):
        if gi_distance(theta, eta) > a:
            raise RuntimeError(f"witness escaped ball {s}: join construction bug")
    return theta
