"""Generators for the explicit configurations shipped with the toolkit.

Each construction returns the space, the point set, the separation constant
the configuration is known to achieve (exact where the space is polytopal),
and, where a closed form exists, suggested witness functionals that the
verifier can check without optimizing. Generators are pure and
deterministic; the sign-vector search is sequential by design (first-fit
greedy over a seeded shuffle).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from ._io import Real, number_to_json
from .certify import Certificate, PointSet, Tolerances, certify_set
from .spaces import (
    CylinderSpace,
    Functional,
    NormSpace,
    PolytopeFSpace,
    PolytopeVSpace,
    SpaceError,
    Vector,
    lp_space,
    normalize,
)


@dataclass(frozen=True)
class Construction:
    name: str
    space: NormSpace
    points: PointSet
    expected_d: Real
    suggested_witnesses: tuple[tuple[int, int, Functional], ...]
    provenance: str
    expected_d_is_lower_bound: bool = False
    separation_only: bool = False

    def to_json(self) -> dict:
        return {
            "construction": self.name,
            "provenance": self.provenance,
            "points": [[number_to_json(x) for x in p.coords] for p in self.points.points],
            "expected_d": number_to_json(self.expected_d),
            "expected_d_is_lower_bound": self.expected_d_is_lower_bound,
            "separation_only": self.separation_only,
            "suggested_witnesses": [
                {"i": i, "j": j, "f": [number_to_json(x) for x in f.coords]}
                for i, j, f in self.suggested_witnesses
            ],
        }


def _coord_functional(n: int, k: int, value: Real, exact: bool) -> Functional:
    zero = Fraction(0) if exact else 0.0
    return Functional(tuple(value if t == k else zero for t in range(n)))


def auerbach_cross(n: int, p: float | str) -> Construction:
    """The signed basis set {+-e_i} with its biorthogonal margin-1 witnesses.

    The suggested witnesses are half-sums of dual basis vectors and give
    margin exactly 1 on every pair; the optimized constant is 2^(1/p).
    """
    if n < 2:
        raise ValueError("need n >= 2")
    space = lp_space(n, p)
    exact = space.exact
    one = Fraction(1) if exact else 1.0
    half = Fraction(1, 2) if exact else 0.5
    pts = [tuple(one if t == k else one * 0 for t in range(n)) for k in range(n)]
    pts += [tuple(-x for x in v) for v in pts]
    point_set = PointSet.create(space, pts)

    def dual_half(i: int, j: int, si: int, sj: int) -> Functional:
        coords = [one * 0] * n
        coords[i] = si * half
        coords[j] = sj * half
        return Functional(coords)

    witnesses: list[tuple[int, int, Functional]] = []
    for a in range(2 * n):
        for b in range(a + 1, 2 * n):
            i, si = a % n, 1 if a < n else -1
            j, sj = b % n, 1 if b < n else -1
            if i == j:
                witnesses.append((a, b, _coord_functional(n, i, si * one, exact)))
            else:
                witnesses.append((a, b, dual_half(i, j, si, -sj)))

    if exact:
        # p = 1 (cross-polytope ball) is 2-equilateral; p = inf has distance-1 pairs
        expected = Fraction(2) if isinstance(space, PolytopeVSpace) else Fraction(1)
    else:
        expected = 2.0 ** (1.0 / float(p))
    return Construction(
        name="auerbach-cross",
        space=space,
        points=point_set,
        expected_d=expected,
        suggested_witnesses=tuple(witnesses),
        provenance=(
            "signed vectors of a biorthogonal unit basis; half-sums of the dual basis "
            "separate every pair with margin 1, and the optimized constant is 2^(1/p)"
        ),
    )


def scaled_hypercube(n: int, p: float | str) -> Construction:
    """All 2^n sign vectors scaled onto the unit sphere of ell_p^n.

    Coordinate functionals separate opposite faces, giving constant
    2 / n^(1/p) (p = inf keeps the raw cube and constant 2).
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if isinstance(p, str) or math.isinf(float(p)):
        space = lp_space(n, "inf")
        scale: Real = Fraction(1)
    else:
        p = float(p)
        if p <= 1:
            raise ValueError("need p > 1 (p = 1 admits no scaled cube on the sphere)")
        space = lp_space(n, p)
        scale = n ** (-1.0 / p)
    signs = list(itertools.product((1, -1), repeat=n))
    pts = [tuple(scale * s for s in pattern) for pattern in signs]
    point_set = PointSet.create(space, pts)
    exact = space.exact
    one = Fraction(1) if exact else 1.0
    witnesses = []
    for a in range(len(signs)):
        for b in range(a + 1, len(signs)):
            k = next(t for t in range(n) if signs[a][t] != signs[b][t])
            witnesses.append((a, b, _coord_functional(n, k, one * signs[a][k], exact)))
    expected = Fraction(2) if exact else 2.0 * scale
    return Construction(
        name="scaled-hypercube",
        space=space,
        points=point_set,
        expected_d=expected,
        suggested_witnesses=tuple(witnesses),
        provenance=(
            "hypercube vertex set scaled onto the unit sphere; coordinate functionals "
            "separate opposite faces with margin 2/n^(1/p)"
        ),
    )


def default_prism_beta(p: float) -> float:
    return (2.0 + 2.0**p) / 2.0


def prism_4n_minus_4(n: int, p: float, beta: float | None = None) -> Construction:
    """4n-4 vertices of a right prism on the unit sphere of ell_p^n.

    The free exponents alpha, beta satisfy 1/alpha + 1/beta = 1, which puts
    every vertex on the sphere; the constant is
    min{2/beta^(1/p), 2/(2^(1/q) alpha^(1/p))} and exceeds 1 exactly when
    2 < beta < 2^p.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    p = float(p)
    if not (1.0 < p < math.inf):
        raise ValueError("need 1 < p < inf")
    if beta is None:
        beta = default_prism_beta(p)
    beta = float(beta)
    if not (2.0 < beta < 2.0**p):
        raise ValueError(f"beta must lie in (2, 2^p) = (2, {2.0 ** p})")
    alpha = beta / (beta - 1.0)
    q = p / (p - 1.0)
    a = alpha ** (-1.0 / p)
    b = beta ** (-1.0 / p)
    top = []
    for k in range(n - 1):
        for sign in (1, -1):
            coords = [0.0] * n
            coords[k] = sign * a
            coords[-1] = b
            top.append(tuple(coords))
    pts = top + [tuple(-x for x in v) for v in top]
    space = lp_space(n, p)
    point_set = PointSet.create(space, pts)
    half = len(top)
    witnesses = [(0, half, _coord_functional(n, n - 1, 1.0, False))]
    if n == 3:
        r = 2.0 ** (-1.0 / q)
        witnesses.append((0, 1, Functional((r, r, 0.0))))
        witnesses.append((0, 1, Functional((r, -r, 0.0))))
    expected = min(2.0 / beta ** (1.0 / p), 2.0 / (2.0 ** (1.0 / q) * alpha ** (1.0 / p)))
    return Construction(
        name="prism",
        space=space,
        points=point_set,
        expected_d=expected,
        suggested_witnesses=tuple(witnesses),
        provenance=(
            "4n-4 prism vertices with last coordinate +-beta^(-1/p) and one of the "
            "first n-1 coordinates +-alpha^(-1/p), 1/alpha + 1/beta = 1"
        ),
    )


_OCT_GENERATORS = (
    (Fraction(1), Fraction(1), Fraction(-1, 3)),
    (Fraction(1), Fraction(-1, 3), Fraction(1)),
    (Fraction(-1, 3), Fraction(1), Fraction(1)),
)


def octahedron_space() -> PolytopeVSpace:
    """The octahedron model of ell_1^3 wedged between (5/9)C_3 and C_3."""
    gens = list(_OCT_GENERATORS) + [tuple(-x for x in g) for g in _OCT_GENERATORS]
    return PolytopeVSpace(gens)


def l1_cube_in_octahedron() -> Construction:
    """(5/9){-1,1}^3 on the boundary of the octahedron model of ell_1^3.

    Coordinate functionals lie in the dual ball because the octahedron sits
    inside the cube, and they separate opposite parallelepiped faces with
    margin exactly 10/9. Rational arithmetic throughout.
    """
    space = octahedron_space()
    s = Fraction(5, 9)
    signs = list(itertools.product((1, -1), repeat=3))
    pts = [tuple(s * x for x in pattern) for pattern in signs]
    point_set = PointSet.create(space, pts)
    witnesses = []
    for a in range(8):
        for b in range(a + 1, 8):
            k = next(t for t in range(3) if signs[a][t] != signs[b][t])
            witnesses.append((a, b, _coord_functional(3, k, Fraction(signs[a][k]), True)))
    return Construction(
        name="l1-cube-in-octahedron",
        space=space,
        points=point_set,
        expected_d=Fraction(10, 9),
        suggested_witnesses=tuple(witnesses),
        provenance=(
            "scaled cube vertices on the boundary of an octahedron isometric to ell_1^3; "
            "the octahedron lies between (5/9) cube and cube, so coordinate functionals "
            "are dual-feasible and give margin 10/9"
        ),
    )


PETTY_VERTICES = (
    (-0.18, 0.0, 0.82),
    (0.82, 0.0, -0.18),
    (0.32, 0.6, 0.32),
    (0.32, -0.6, 0.32),
)


def petty_parallelepiped() -> Construction:
    """A parallelepiped inscribed in the unit sphere of the cylinder-dual norm.

    The three face functionals have dual norm one; the two slanted faces give
    the binding margin 1.2/sqrt(1.36) ~ 1.02899.
    """
    space = CylinderSpace(3)
    pts = list(PETTY_VERTICES) + [tuple(-x for x in v) for v in PETTY_VERTICES]
    point_set = PointSet.create(space, pts)
    r = math.sqrt(1.36)
    f1 = Functional((1.0, 0.0, 1.0))
    f2 = Functional((0.6 / r, 1.0 / r, -0.6 / r))
    f3 = Functional((0.6 / r, -1.0 / r, -0.6 / r))
    witnesses = ((0, 4, f1), (4, 0, f2), (4, 0, f3))
    return Construction(
        name="petty-parallelepiped",
        space=space,
        points=point_set,
        expected_d=1.2 / r,
        suggested_witnesses=witnesses,
        provenance=(
            "parallelepiped with all 8 vertices on the unit sphere of "
            "||(x,y,z)|| = sqrt(x^2+y^2) + |z|; face-plane functionals normalized "
            "in the dual norm max{sqrt(x^2+y^2), |z|}"
        ),
    )


PETTY_14_POINTS = (
    (1.0, 0.0, 0.0),
    (0.5, 2.0 / 3.0, 1.0 / 6.0),
    (0.0, 2.0 / 3.0, -1.0 / 3.0),
    (-0.5, 2.0 / 3.0, 1.0 / 6.0),
    (-1.0, 0.0, 0.0),
    (-0.5, -2.0 / 3.0, 1.0 / 6.0),
    (0.0, -2.0 / 3.0, -1.0 / 3.0),
    (0.5, -2.0 / 3.0, 1.0 / 6.0),
    (0.0, 0.0, 1.0),
    (0.5, 0.0, 0.5),
    (-0.5, 0.0, 0.5),
    (0.0, 0.0, -1.0),
    (0.5, 0.0, -0.5),
    (-0.5, 0.0, -0.5),
)

_SQ2 = math.sqrt(2.0) / 2.0

PETTY_10_POINTS = (
    (2.0 / 3.0, 0.0, -1.0 / 3.0),
    (_SQ2, _SQ2, 0.0),
    (0.0, 2.0 / 3.0, 1.0 / 3.0),
    (-_SQ2, _SQ2, 0.0),
    (-2.0 / 3.0, 0.0, -1.0 / 3.0),
    (-_SQ2, -_SQ2, 0.0),
    (0.0, -2.0 / 3.0, 1.0 / 3.0),
    (_SQ2, -_SQ2, 0.0),
    (0.0, 0.0, 1.0),
    (0.0, 0.0, -1.0),
)


def petty_separated_sets() -> tuple[Construction, Construction]:
    """Distance-separated (not margin-certified) sets in the cylinder-dual norm.

    The first is a maximal 1-separated 14-point set, the second a 10-point
    set with all pairwise distances strictly above 1. Both feed the
    separation matrix, not the margin certifier.
    """
    space = CylinderSpace(3)
    first = Construction(
        name="petty-separated-14",
        space=space,
        points=PointSet.create(space, PETTY_14_POINTS),
        expected_d=1.0,
        suggested_witnesses=(),
        provenance="maximal 1-separated 14-point subset of the unit sphere of the cylinder-dual norm",
        expected_d_is_lower_bound=True,
        separation_only=True,
    )
    second = Construction(
        name="petty-strict-10",
        space=space,
        points=PointSet.create(space, PETTY_10_POINTS),
        expected_d=1.0,
        suggested_witnesses=(),
        provenance="10-point subset of the unit sphere of the cylinder-dual norm with pairwise distances above 1",
        expected_d_is_lower_bound=True,
        separation_only=True,
    )
    return first, second


def gv_sign_vectors(n: int, delta: float, seed: int) -> Construction:
    """Low-correlation unit sign vectors by greedy first-fit over a seeded shuffle.

    Emits w_i = x_i / sqrt(n) with x_i in {-1,1}^n and |<w_i, w_j>| < delta
    for all pairs. Every pair carries the witness (w_i - w_j)/||w_i - w_j||_2
    whose margin is ||w_i - w_j||_2 = sqrt(2 - 2<w_i, w_j>) > sqrt(2 - 2 delta).
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if not (0.0 < delta <= 1.0 / 3.0):
        raise ValueError("need 0 < delta <= 1/3")
    rng = np.random.default_rng(seed)
    order = rng.permutation(2**n)
    threshold = delta * n
    accepted = np.zeros((0, n), dtype=np.int8)
    block = 8192
    for start in range(0, len(order), block):
        idx = order[start : start + block]
        bits = ((idx[:, None] >> np.arange(n)) & 1).astype(np.int8)
        signs = (2 * bits - 1).astype(np.int8)
        if len(accepted):
            inner = signs.astype(np.int32) @ accepted.T.astype(np.int32)
            keep = np.abs(inner).max(axis=1) < threshold
            signs = signs[keep]
        for row in signs:
            if len(accepted) == 0 or np.abs(accepted.astype(np.int32) @ row.astype(np.int32)).max() < threshold:
                accepted = np.vstack([accepted, row[None, :]])
    scale = 1.0 / math.sqrt(n)
    pts = [tuple(scale * float(x) for x in row) for row in accepted]
    space = lp_space(n, 2)
    point_set = PointSet.create(space, pts)
    witnesses = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            diff = np.asarray(pts[i]) - np.asarray(pts[j])
            witnesses.append((i, j, Functional(diff / np.linalg.norm(diff))))
    return Construction(
        name="gv",
        space=space,
        points=point_set,
        expected_d=math.sqrt(2.0 - 2.0 * delta),
        suggested_witnesses=tuple(witnesses),
        provenance=(
            f"{len(pts)} unit-scaled sign vectors with pairwise inner products below "
            f"{delta!r} (greedy first-fit over a seeded shuffle of all 2^{n} sign patterns); "
            "normalized difference vectors witness every pair"
        ),
        expected_d_is_lower_bound=True,
    )


def hexagon_counterexample() -> Construction:
    """Three consecutive unit-hexagon vertices: 1-separated, but margin below 1.

    The two short sides have distance exactly 1, yet the best separating
    margin for those pairs is sqrt(3)/2, so the set is antipodal without
    reaching the unit threshold.
    """
    space = lp_space(2, 2)
    pts = [(1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0), (-0.5, math.sqrt(3.0) / 2.0)]
    return Construction(
        name="hexagon",
        space=space,
        points=PointSet.create(space, pts),
        expected_d=math.sqrt(3.0) / 2.0,
        suggested_witnesses=(),
        provenance="three consecutive vertices of a regular hexagon inscribed in the Euclidean unit circle",
    )


# ---------------------------------------------------------------------------
# max-area parallelogram quadruple in an arbitrary 2-dimensional space

def _boundary_vertices_2d(space: NormSpace) -> list[Vector] | None:
    """Unit-sphere vertex candidates for polytopal planes; None when smooth."""
    if isinstance(space, PolytopeVSpace):
        out = []
        seen = set()
        for g in space.generators:
            u = normalize(space, g)
            if u.coords not in seen:
                seen.add(u.coords)
                out.append(u)
        return out
    if isinstance(space, PolytopeFSpace):
        gens = space.generators
        out = []
        seen = set()
        for a in range(len(gens)):
            for b in range(a + 1, len(gens)):
                ga, gb = gens[a].coords, gens[b].coords
                det = ga[0] * gb[1] - ga[1] * gb[0]
                if det == 0:
                    continue
                # solve ga . x = 1, gb . x = 1 by Cramer's rule
                v = Vector(((gb[1] - ga[1]) / det, (ga[0] - gb[0]) / det))
                if all(g(v) <= 1 for g in gens) and v.coords not in seen:
                    seen.add(v.coords)
                    out.append(v)
        return out
    return None


def _unit_point(space: NormSpace, theta: float) -> Vector:
    raw = Vector((math.cos(theta), math.sin(theta)))
    return raw.scale(1.0 / float(space.norm(raw)))


def _det2(u: Vector, v: Vector) -> Real:
    return u.coords[0] * v.coords[1] - u.coords[1] * v.coords[0]


def _max_det_basis_smooth(space: NormSpace, grid_step: float = 1e-3) -> tuple[Vector, Vector]:
    thetas = np.arange(0.0, math.pi, grid_step)
    pts = np.empty((len(thetas), 2))
    for t, theta in enumerate(thetas):
        pts[t] = _unit_point(space, theta).coords
    dets = np.abs(pts[:, 0][:, None] * pts[:, 1][None, :] - pts[:, 1][:, None] * pts[:, 0][None, :])
    flat = int(np.argmax(dets))
    i, j = divmod(flat, len(thetas))
    th1, th2 = float(thetas[i]), float(thetas[j])

    def value(a: float, b: float) -> float:
        return abs(float(_det2(_unit_point(space, a), _unit_point(space, b))))

    for _ in range(3):
        th1 = _golden_max(lambda t: value(t, th2), th1 - 2 * grid_step, th1 + 2 * grid_step)
        th2 = _golden_max(lambda t: value(th1, t), th2 - 2 * grid_step, th2 + 2 * grid_step)
        grid_step *= 0.1
    return _unit_point(space, th1), _unit_point(space, th2)


def _golden_max(fun: Callable[[float], float], lo: float, hi: float, iters: int = 60) -> float:
    ratio = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - ratio * (b - a)
    d = a + ratio * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + ratio * (b - a)
            fd = fun(d)
        else:
            b, d, fd = d, c, fc
            c = b - ratio * (b - a)
            fc = fun(c)
    return (a + b) / 2.0


def minkowski_quadruple(space2d: NormSpace, *, tolerances: Tolerances | None = None) -> Construction:
    """Four strictly separated points in any 2-dimensional space.

    Finds a maximum-area inscribed parallelogram (its vertex pair is an
    Auerbach basis), normalizes the two diagonals onto the unit sphere, and
    certifies the quadruple. When both diagonals have norm 2 the ball is the
    parallelogram itself (the space is isometric to the max-norm plane) and
    the vertex set with constant 2 is returned instead. Determinant ties are
    enumerated and each candidate quadruple is certified, so flat spots on
    the sphere (where one diagonal degenerates) fall back to an equivalent
    maximum-area basis that does separate strictly.
    """
    if space2d.dim != 2:
        raise ValueError("need a 2-dimensional space")
    tolerances = tolerances or Tolerances()
    vertices = _boundary_vertices_2d(space2d)
    exact = space2d.exact
    bases: list[tuple[Vector, Vector]]
    if vertices is None:
        bases = [_max_det_basis_smooth(space2d)]
    else:
        best = None
        dets: list[tuple[Real, int, int]] = []
        for a in range(len(vertices)):
            for b in range(a + 1, len(vertices)):
                d = abs(_det2(vertices[a], vertices[b]))
                dets.append((d, a, b))
                if best is None or d > best:
                    best = d
        if best is None or best == 0:
            raise SpaceError("degenerate 2-dimensional ball")
        bases = [
            (vertices[a], vertices[b])
            for d, a, b in dets
            if d == best or (not exact and float(d) >= float(best) * (1 - 1e-9))
        ]

    two = Fraction(2) if exact else 2.0
    candidates: list[tuple[str, list[Vector]]] = []
    for u, v in bases:
        s, diff = u + v, u - v
        ns, nd = space2d.norm(s), space2d.norm(diff)
        cube_like = (ns == two and nd == two) if exact else (
            float(ns) >= 2.0 - 1e-6 and float(nd) >= 2.0 - 1e-6
        )
        if cube_like:
            candidates.append(("parallelotope", [u, v, -u, -v]))
            continue
        one = Fraction(1) if exact else 1.0
        ds = s.scale(one / ns)
        dd = diff.scale(one / nd)
        candidates.append(("diagonals", [ds, dd, -ds, -dd]))
        candidates.append(("basis", [u, v, -u, -v]))

    best_cert: Certificate | None = None
    best_points: list[Vector] | None = None
    best_kind = ""
    for kind, quad in candidates:
        point_set = PointSet.create(space2d, quad, sphere_tol=max(tolerances.sphere_tol, 1e-9))
        cert = certify_set(point_set, tolerances=tolerances)
        if best_cert is None or cert.d > best_cert.d:
            best_cert, best_points, best_kind = cert, quad, kind
        if cert.classification.meets("strict"):
            best_cert, best_points, best_kind = cert, quad, kind
            break
    assert best_cert is not None and best_points is not None
    return Construction(
        name="minkowski-quadruple",
        space=space2d,
        points=best_cert.point_set,
        expected_d=best_cert.d,
        suggested_witnesses=(),
        provenance=(
            f"{best_kind} quadruple from a maximum-area parallelogram inscribed in the "
            "unit circle of a 2-dimensional space"
        ),
    )


# ---------------------------------------------------------------------------
# registry for the command line

def _build_auerbach(n: int = 3, p: float | str = 2, **_: object) -> Construction:
    return auerbach_cross(int(n), p)


def _build_hypercube(n: int = 3, p: float | str = 2, **_: object) -> Construction:
    return scaled_hypercube(int(n), p)


def _build_prism(n: int = 3, p: float = 1.5, beta: float | None = None, **_: object) -> Construction:
    return prism_4n_minus_4(int(n), float(p), None if beta is None else float(beta))


def _build_gv(n: int = 20, delta: float = 1.0 / 3.0, seed: int = 0, **_: object) -> Construction:
    return gv_sign_vectors(int(n), float(delta), int(seed))


def _build_minkowski(space: NormSpace | None = None, **_: object) -> Construction:
    if space is None:
        raise ValueError("minkowski-quadruple needs a --space file")
    return minkowski_quadruple(space)


CONSTRUCTIONS: dict[str, Callable[..., Construction]] = {
    "auerbach-cross": _build_auerbach,
    "scaled-hypercube": _build_hypercube,
    "prism": _build_prism,
    "l1-cube-in-octahedron": lambda **_: l1_cube_in_octahedron(),
    "petty-parallelepiped": lambda **_: petty_parallelepiped(),
    "petty-separated-14": lambda **_: petty_separated_sets()[0],
    "petty-strict-10": lambda **_: petty_separated_sets()[1],
    "gv": _build_gv,
    "minkowski-quadruple": _build_minkowski,
    "hexagon": lambda **_: hexagon_counterexample(),
}


def build_construction(name: str, **params: object) -> Construction:
    if name not in CONSTRUCTIONS:
        known = ", ".join(sorted(CONSTRUCTIONS))
        raise ValueError(f"unknown construction {name!r}; known: {known}")
    return CONSTRUCTIONS[name](**params)
