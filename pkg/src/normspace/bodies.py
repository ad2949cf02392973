"""Archimedean norms on R^n as symmetric convex bodies.

Two representations: positive-definite quadratic forms (ellipsoid unit
balls) and centrally symmetric polytopes (facets plus one vertex per
antipodal pair).  Distances use closed forms: generalized eigenvalues for
ellipsoid pairs, vertex/facet evaluations otherwise.  The John ellipsoid is
the polar of the minimum-volume ellipsoid of the polar vertices, and
intersection witnesses realize the Helly property constructively.

Structural tolerance is 1e-9, optimization tolerance 1e-6; exact rational
arithmetic is confined to normspace.polyhedra.
"""

import math
from fractions import Fraction

import numpy as np

from . import _kernels, polyhedra
from .errors import PairwiseRadiusError, UsageError

STRUCT_TOL = 1e-9
OPT_TOL = 1e-6

# circumscribed-polytope approximation of an ellipsoid: number of antipodal
# direction pairs per dimension and the worst-case log gauge ratio of the
# resulting tangent polytope (measured covering radius of the direction set)
SPD_APPROX_PAIRS = {2: 64, 3: 242}
SPD_APPROX_LOG_BOUND = {2: 3.1e-4, 3: 8.5e-3}


def _readonly(arr):
    arr = np.array(arr, dtype=float)
    arr.flags.writeable = False
    return arr


class SpdNorm:
    """Euclidean norm v -> sqrt(v^T A v); unit ball {v^T A v <= 1}."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        a = np.array(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise UsageError("SPD matrix must be square")
        if not np.all(np.abs(a - a.T) <= 1e-12):
            raise UsageError("SPD matrix must be symmetric within 1e-12")
        a = 0.5 * (a + a.T)
        if np.linalg.eigvalsh(a).min() <= 0:
            raise UsageError("SPD matrix must be positive definite")
        object.__setattr__(self, "matrix", _readonly(a))

    def __setattr__(self, *a):
        raise AttributeError("SpdNorm is immutable")

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __repr__(self):
        return f"SpdNorm(n={self.dim})"


class PolyNorm:
    """Polytope norm: facets |<a_i, x>| <= b_i plus vertex representatives."""

    __slots__ = ("a", "b", "vertices")

    def __init__(self, facets_a, facets_b, vertices):
        a = _readonly(np.atleast_2d(facets_a))
        b = _readonly(np.ravel(np.array(facets_b, dtype=float)))
        w = _readonly(np.atleast_2d(vertices))
        if a.shape[0] != b.shape[0]:
            raise UsageError("facet normals and offsets disagree in length")
        if a.shape[1] != w.shape[1]:
            raise UsageError("facet/vertex dimension mismatch")
        if np.any(b <= 0):
            raise UsageError("facet offsets must be positive")
        n = a.shape[1]
        if np.linalg.matrix_rank(w, tol=1e-9) < n:
            raise UsageError("vertices do not span: empty interior")
        vals = np.abs(w @ a.T) / b  # (k, m)
        if np.any(vals > 1 + STRUCT_TOL):
            raise UsageError("a vertex violates a facet beyond 1e-9")
        if np.any(vals.max(axis=0) < 1 - STRUCT_TOL):
            raise UsageError("a facet is unsupported by every vertex")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "vertices", w)

    def __setattr__(self, *a):
        raise AttributeError("PolyNorm is immutable")

    @property
    def dim(self):
        return self.a.shape[1]

    def __repr__(self):
        return f"PolyNorm(n={self.dim}, facets={len(self.b)}, vertices={len(self.vertices)})"

    @classmethod
    def from_facets(cls, facets_a, facets_b):
        """Build from halfspaces alone; vertices are enumerated exactly and
        redundant facets are dropped."""
        a = np.atleast_2d(np.array(facets_a, dtype=float))
        b = np.ravel(np.array(facets_b, dtype=float))
        fr = [
            (tuple(Fraction(x) for x in row), Fraction(float(off)))
            for row, off in zip(a, b)
        ]
        verts, keep = polyhedra.vertex_enum_exact(fr)
        return cls(a[keep], b[keep], [[float(x) for x in v] for v in verts])

    @classmethod
    def from_vertices(cls, vertices):
        """Build from vertex representatives; facets are enumerated exactly
        and non-extreme points are dropped."""
        w = np.atleast_2d(np.array(vertices, dtype=float))
        fr = [tuple(Fraction(x) for x in row) for row in w]
        facets, keep = polyhedra.facet_enum_exact(fr)
        fa = [[float(x) for x in a] for a, _ in facets]
        fb = [float(bb) for _, bb in facets]
        return cls(fa, fb, w[keep])


Body = (SpdNorm, PolyNorm)


def _as_dirs(v):
    v = np.atleast_2d(np.array(v, dtype=float))
    return v


def gauge(body, v):
    """Minkowski gauge of the body at v (vectorized over rows of v)."""
    x = _as_dirs(v)
    if x.shape[1] != body.dim:
        raise UsageError("direction dimension mismatch")
    if isinstance(body, SpdNorm):
        out = _kernels.spd_gauge_batch(body.matrix, x)
    else:
        out = _kernels.poly_gauge_batch(body.a, 1.0 / body.b, x)
    return float(out[0]) if np.ndim(v) == 1 else out


def vertex_enum(facets_a, facets_b):
    """Exact vertex enumeration of {|<a_i,x>| <= b_i} (dim <= 3)."""
    return PolyNorm.from_facets(facets_a, facets_b).vertices


def facet_enum(vertices):
    """Exact irredundant facet enumeration of conv(+-vertices) (dim <= 3)."""
    body = PolyNorm.from_vertices(vertices)
    return body.a, body.b


def polar(body):
    """Polar polytope: facets and vertices swap ((a, b) <-> a/b)."""
    if not isinstance(body, PolyNorm):
        raise UsageError("polar expects a PolyNorm")
    new_facets = body.vertices
    new_b = np.ones(len(body.vertices))
    new_vertices = body.a / body.b[:, None]
    return PolyNorm(new_facets, new_b, new_vertices)


def _spd_pair_distance(a1, a2):
    ell = np.linalg.cholesky(a2)
    s = np.linalg.solve(ell, a1)
    mid = np.linalg.solve(ell, s.T).T
    lam = np.linalg.eigvalsh(0.5 * (mid + mid.T))
    if lam.min() <= 0:
        raise UsageError("singular pencil: inputs are not both SPD")
    return 0.5 * float(np.max(np.abs(np.log(lam))))


def _sup_gauge_over(body, other):
    """sup over the unit sphere of `other` of gauge(body), via closed forms."""
    if isinstance(other, PolyNorm):
        return float(np.max(gauge(body, other.vertices)))
    # other is an ellipsoid: sup over {x^T A x = 1} of gauge(body, x)
    ainv = np.linalg.inv(other.matrix)
    if isinstance(body, SpdNorm):
        raise AssertionError("spd/spd pairs use the eigenvalue route")
    vals = np.sqrt(np.maximum(np.sum((body.a @ ainv) * body.a, axis=1), 0.0))
    return float(np.max(vals / body.b))


def gi_distance_bodies(k1, k2):
    """Goldman-Iwahori (log Banach-Mazur) distance between two bodies."""
    if k1.dim != k2.dim:
        raise UsageError("dimension mismatch")
    if isinstance(k1, SpdNorm) and isinstance(k2, SpdNorm):
        return _spd_pair_distance(k1.matrix, k2.matrix)
    s12 = _sup_gauge_over(k1, k2)
    s21 = _sup_gauge_over(k2, k1)
    return max(math.log(s12), math.log(s21))


def sampled_sup_ratio(k1, k2, n_samples, seed):
    """Lower bound for the distance from seeded unit directions (PCG64)."""
    if k1.dim != k2.dim:
        raise UsageError("dimension mismatch")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed)])))
    dirs = rng.standard_normal((int(n_samples), k1.dim))
    norms = np.linalg.norm(dirs, axis=1)
    ok = norms > 1e-12
    dirs = dirs[ok] / norms[ok, None]
    g1 = gauge(k1, dirs)
    g2 = gauge(k2, dirs)
    return float(np.max(np.abs(np.log(g1) - np.log(g2))))


# ---------------------------------------------------------------------------
# minimum-volume enclosing ellipsoid and the John ellipsoid
# ---------------------------------------------------------------------------

def mvee_certified(points, tol=1e-9, max_iter=2_000_000):
    """MVEE of a symmetric point set with its optimality certificate.

    Returns (SpdNorm, info) where info carries the achieved eps
    (max_i w_i / n - 1) and iteration count.  All points are inside the
    returned ellipsoid exactly (up to float roundoff) and its volume is
    within (1+eps)^{n/2} of optimal.
    """
    pts = np.atleast_2d(np.array(points, dtype=float))
    m, n = pts.shape
    if np.linalg.matrix_rank(pts, tol=1e-12) < n:
        raise UsageError("points do not span: degenerate MVEE input")
    u, iters, eps = _kernels.mvee_weights(np.ascontiguousarray(pts), tol, max_iter)
    if eps > OPT_TOL:
        raise RuntimeError(f"MVEE did not converge: eps={eps:.3e} after {iters} iterations")
    mmat = pts.T @ (pts * u[:, None])
    minv = np.linalg.inv(mmat)
    w = np.sum((pts @ minv) * pts, axis=1)
    a = minv / float(np.max(w))
    return SpdNorm(0.5 * (a + a.T)), {"eps": float(eps), "iterations": int(iters)}


def mvee(points, tol=1e-9):
    """Minimum-volume origin-centered ellipsoid containing +-points."""
    return mvee_certified(points, tol=tol)[0]


def john_ellipsoid(body):
    """Maximal-volume inscribed ellipsoid of a polytope norm.

    Computed as the polar of the MVEE of the polar's vertices; the inscribed
    condition a_i^T Q a_i <= b_i^2 (1+1e-6) and the distance bound
    d(E, K) <= log sqrt(n) + 1e-6 are verified before returning.
    """
    if not isinstance(body, PolyNorm):
        raise UsageError("john_ellipsoid expects a PolyNorm")
    n = body.dim
    outer, info = mvee_certified(body.a / body.b[:, None])
    a_out = outer.matrix
    vals = np.sum((body.a @ a_out) * body.a, axis=1)
    if np.any(vals > body.b ** 2 * (1 + OPT_TOL)):
        raise RuntimeError("inscribed ellipsoid escapes a facet")
    b_mat = np.linalg.inv(a_out)
    john = SpdNorm(0.5 * (b_mat + b_mat.T))
    if gi_distance_bodies(john, body) > math.log(math.sqrt(n)) + OPT_TOL:
        raise RuntimeError("John bound violated: MVEE certificate broken")
    return john


# ---------------------------------------------------------------------------
# ellipsoid -> circumscribed polytope, and the intersection witness
# ---------------------------------------------------------------------------

def _pair_directions(n):
    if n == 2:
        k = SPD_APPROX_PAIRS[2]
        th = np.arange(k) * math.pi / k
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    if n == 3:
        k = SPD_APPROX_PAIRS[3]
        idx = np.arange(k)
        z = (idx + 0.5) / k
        r = np.sqrt(1.0 - z * z)
        ang = math.pi * (3.0 - math.sqrt(5.0)) * idx
        return np.stack([r * np.cos(ang), r * np.sin(ang), z], axis=1)
    raise UsageError("SPD polytope approximation supports dimensions 2 and 3")


def spd_to_polytope(body):
    """Circumscribed tangent polytope of an ellipsoid.

    Tangent planes are taken at contact points spread evenly in the
    ellipsoid's own geometry, so the gauge error is at most
    SPD_APPROX_LOG_BOUND[n] regardless of conditioning.
    """
    n = body.dim
    lam, vecs = np.linalg.eigh(body.matrix)
    sqrt_a = (vecs * np.sqrt(lam)) @ vecs.T
    dirs = _pair_directions(n)
    normals = dirs @ sqrt_a.T
    return PolyNorm.from_facets(normals, np.ones(len(normals)))


def coarse_helly_details(bodies, radii):
    """Intersection witness for balls of bodies, with verification data."""
    bodies = list(bodies)
    radii = [float(r) for r in radii]
    if len(bodies) != len(radii):
        raise UsageError("bodies and radii must have equal length")
    if not bodies:
        raise UsageError("empty ball family")
    if any(r < 0 for r in radii):
        raise UsageError("radii must be nonnegative")
    n = bodies[0].dim
    if any(b.dim != n for b in bodies):
        raise UsageError("dimension mismatch in the family")
    for s in range(len(bodies)):
        for t in range(s + 1, len(bodies)):
            d = gi_distance_bodies(bodies[s], bodies[t])
            if d > radii[s] + radii[t] + STRUCT_TOL:
                raise PairwiseRadiusError(
                    (s, t), d - radii[s] - radii[t],
                    f"bodies {s} and {t}: d = {d:.9g} exceeds "
                    f"{radii[s]:.9g} + {radii[t]:.9g}",
                )
    slack = []
    poly_inputs = []
    for b in bodies:
        if isinstance(b, SpdNorm):
            poly_inputs.append(spd_to_polytope(b))
            slack.append(SPD_APPROX_LOG_BOUND[n])
        else:
            poly_inputs.append(b)
            slack.append(0.0)
    pooled_a = np.vstack([p.a for p in poly_inputs])
    pooled_b = np.concatenate(
        [p.b * math.exp(r) for p, r in zip(poly_inputs, radii)]
    )
    witness = PolyNorm.from_facets(pooled_a, pooled_b)
    dists = []
    for s, (b, r) in enumerate(zip(bodies, radii)):
        d = gi_distance_bodies(witness, b)
        allowed = r + OPT_TOL + slack[s]
        if d > allowed:
            raise RuntimeError(
                f"intersection witness escaped ball {s}: {d:.9g} > {allowed:.9g}"
            )
        dists.append(d)
    return {
        "witness": witness,
        "distances": dists,
        "allowed": [r + OPT_TOL + sl for r, sl in zip(radii, slack)],
        "approx_slack": slack,
    }


def coarse_helly_witness_bodies(bodies, radii):
    """The scaled intersection C = cap_s e^{r_s} K_s as a polytope norm;
    satisfies d(C, K_s) <= r_s (+1e-6, +approximation slack for SPD inputs)."""
    return coarse_helly_details(bodies, radii)["witness"]


# ---------------------------------------------------------------------------
# finite linear group invariance
# ---------------------------------------------------------------------------

class LinearGroupAction:
    """A finite matrix group given by generators; closure computed lazily."""

    CLOSURE_CAP = 10_000

    def __init__(self, generators):
        gens = [np.array(g, dtype=float) for g in generators]
        if not gens:
            raise UsageError("need at least one generator")
        n = gens[0].shape[0]
        for g in gens:
            if g.shape != (n, n):
                raise UsageError("generators must be square matrices of equal size")
            if abs(np.linalg.det(g)) < 1e-12:
                raise UsageError("generators must be invertible")
        self.dim = n
        self.generators = gens
        self._elements = None

    @staticmethod
    def _key(g):
        return np.round(g, 9).tobytes()

    def elements(self):
        if self._elements is not None:
            return self._elements
        eye = np.eye(self.dim)
        found = {self._key(eye): eye}
        frontier = [eye]
        while frontier:
            nxt = []
            for g in self.generators:
                for h in frontier:
                    prod = g @ h
                    k = self._key(prod)
                    if k not in found:
                        if len(found) >= self.CLOSURE_CAP:
                            raise UsageError("group closure cap (10^4) exceeded")
                        found[k] = prod
                        nxt.append(prod)
            frontier = nxt
        self._elements = list(found.values())
        return self._elements

    def order(self):
        return len(self.elements())


def _invariance_sample(n, count=1000):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([0xC0FFEE, n])))
    dirs = rng.standard_normal((count, n))
    return dirs / np.linalg.norm(dirs, axis=1)[:, None]


def is_invariant(body, action):
    """True iff gauge(K, g v) = gauge(K, v) within 1e-9 for all group
    elements on a deterministic direction sample (plus vertex-set invariance
    for polytopes)."""
    if body.dim != action.dim:
        raise UsageError("body/group dimension mismatch")
    sample = _invariance_sample(body.dim)
    base = gauge(body, sample)
    for g in action.elements():
        moved = gauge(body, sample @ g.T)
        if np.max(np.abs(moved - base)) > STRUCT_TOL * max(1.0, float(np.max(base))):
            return False
    if isinstance(body, PolyNorm):
        verts = body.vertices
        full = np.vstack([verts, -verts])
        for g in action.elements():
            img = verts @ g.T
            dist = np.min(
                np.linalg.norm(img[:, None, :] - full[None, :, :], axis=2), axis=1
            )
            if np.max(dist) > 1e-6:
                return False
    return True


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def body_to_json(body):
    if isinstance(body, SpdNorm):
        return {"kind": "spd", "matrix": [[float(x) for x in row] for row in body.matrix]}
    return {
        "kind": "polytope",
        "facets": [
            {"a": [float(x) for x in a], "b": float(b)}
            for a, b in zip(body.a, body.b)
        ],
        "vertices": [[float(x) for x in w] for w in body.vertices],
    }


def body_from_json(obj):
    try:
        kind = obj["kind"]
        if kind == "spd":
            return SpdNorm(obj["matrix"])
        if kind == "polytope":
            fa = [f["a"] for f in obj["facets"]]
            fb = [f["b"] for f in obj["facets"]]
            return PolyNorm(fa, fb, obj["vertices"])
    except (KeyError, TypeError) as exc:
        raise UsageError(f"bad body JSON: {exc}") from exc
    raise UsageError(f"unknown body kind {obj.get('kind')!r}")
