"""Inclusion scalings between symmetric convex bodies and distance bounds.

Two inclusion computations are provided: an exact one for polytopal bodies
(the optimal homothety factor is read off the gauge of the outer body's
vertices in the inner body), and the cylinder/octahedron scaling where the
critical contact lies on the rim circle of the shrunk cylinder and the
factor is found by bisection against the octahedron's facet planes.

A separation certificate with constant d bounds the Banach-Mazur distance
to the equilateral renorming by 2/d; with 2^n points that renorming is the
max-norm cube, which also yields an impossibility ceiling for full-cube
witness sets in ell_p^n when 2 <= p <= log2(n).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ._io import Real, parse_number
from .certify import Certificate
from .spaces import (
    Functional,
    NormSpace,
    PolytopeFSpace,
    PolytopeVSpace,
    Vector,
)

MAX_INCLUSION_DIM = 6
_VERTEX_ENUM_GUARD = 200_000


class InclusionError(ValueError):
    pass


@dataclass(frozen=True)
class InclusionResult:
    alpha: Real
    contact: str
    bm_upper: Real


def vertices_from_facets(space: PolytopeFSpace) -> list[Vector]:
    """Enumerate the vertices of {x : g(x) <= 1 for all facet generators}."""
    n = space.dim
    gens = space.generators
    if math.comb(len(gens), n) > _VERTEX_ENUM_GUARD:
        raise InclusionError("too many facets for vertex enumeration")
    out: list[Vector] = []
    seen: set[tuple] = set()
    for combo in itertools.combinations(gens, n):
        point = _solve_square([list(g.coords) for g in combo], [Fraction(1)] * n)
        if point is None:
            continue
        v = Vector(point)
        if v.coords in seen:
            continue
        if all(g(v) <= 1 for g in gens):
            seen.add(v.coords)
            out.append(v)
    if not out:
        raise InclusionError("facet body has no vertices (unbounded or degenerate)")
    return out


def _solve_square(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    n = len(rhs)
    aug = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def polytope_inclusion_scale(inner: PolytopeVSpace, outer: NormSpace) -> InclusionResult:
    """Largest alpha with alpha * outer contained in inner, given inner in outer.

    Exact on rational data: alpha is the reciprocal of the largest
    inner-gauge over the outer body's vertices, and the contact vertex has
    inner-gauge exactly 1 after scaling.
    """
    if not isinstance(inner, PolytopeVSpace):
        raise InclusionError("inner body must be vertex-described")
    if not isinstance(outer, (PolytopeVSpace, PolytopeFSpace)):
        raise InclusionError("outer body must be polytopal")
    if inner.dim != outer.dim:
        raise InclusionError("bodies of different dimension")
    if inner.dim > MAX_INCLUSION_DIM:
        raise InclusionError(f"inclusion scaling limited to dimension {MAX_INCLUSION_DIM}")
    for idx, w in enumerate(inner.generators):
        if outer.norm(w) > 1:
            raise InclusionError(
                f"inner vertex {idx} has outer gauge {outer.norm(w)} > 1: inner is not inside outer"
            )
    outer_vertices = (
        list(outer.generators) if isinstance(outer, PolytopeVSpace) else vertices_from_facets(outer)
    )
    gauges = [(inner.norm(v), v) for v in outer_vertices]
    worst, contact_vertex = max(gauges, key=lambda pair: pair[0])
    alpha = Fraction(1) / worst
    return InclusionResult(
        alpha=alpha,
        contact=f"outer vertex {tuple(contact_vertex.coords)} has inner gauge {worst}",
        bm_upper=worst,
    )


CYLINDER_OCTAHEDRON_VERTICES = (
    (0, -1, 1),
    (Fraction(4, 5), Fraction(3, 5), 1),
    (Fraction(-4, 5), Fraction(3, 5), 1),
)


def octahedron_facets(vertices: Sequence) -> list[tuple[Fraction, Fraction, Fraction]]:
    """Facet planes of conv(+-vertices) in canonical form n . x <= 1 (exact)."""
    pts = []
    for v in vertices:
        coords = v.coords if isinstance(v, Vector) else tuple(v)
        pts.append(tuple(parse_number(x, exact=True) for x in coords))
    pts = pts + [tuple(-x for x in p) for p in pts]
    pts = list(dict.fromkeys(pts))
    if any(len(p) != 3 for p in pts):
        raise InclusionError("octahedron vertices must be 3-dimensional")
    facets: dict[tuple, tuple] = {}
    for a, b, c in itertools.combinations(pts, 3):
        u = tuple(b[k] - a[k] for k in range(3))
        w = tuple(c[k] - a[k] for k in range(3))
        normal = (
            u[1] * w[2] - u[2] * w[1],
            u[2] * w[0] - u[0] * w[2],
            u[0] * w[1] - u[1] * w[0],
        )
        if all(x == 0 for x in normal):
            continue
        offset = sum(n * x for n, x in zip(normal, a))
        if offset == 0:
            continue
        if offset < 0:
            normal = tuple(-x for x in normal)
            offset = -offset
        if any(sum(n * x for n, x in zip(normal, p)) > offset for p in pts):
            continue
        key = tuple(n / offset for n in normal)
        facets[key] = key
    if len(facets) < 4:
        raise InclusionError("degenerate vertex set: fewer than 4 facets")
    return list(facets.values())


def cylinder_octahedron_scale(
    octahedron_vertices: Sequence | None = None,
    *,
    tol: float = 1e-8,
) -> InclusionResult:
    """Largest alpha with alpha * cylinder inside conv(+-vertices).

    The vertices must lie on the boundary of the solid cylinder
    {x^2 + y^2 <= 1, |z| <= 1}. If the shrunk cylinder touches a facet, the
    contact is on one of the rim circles x^2 + y^2 = alpha^2, z = +-alpha,
    where the support of a facet plane (a, b, c) is
    alpha * (sqrt(a^2 + b^2) + |c|); alpha is bisected against all facets,
    which covers the caps and the lateral surface as well.
    """
    vertices = octahedron_vertices if octahedron_vertices is not None else CYLINDER_OCTAHEDRON_VERTICES
    exact_vertices = []
    for v in vertices:
        coords = v.coords if isinstance(v, Vector) else tuple(v)
        exact_vertices.append(tuple(parse_number(x, exact=True) for x in coords))
    for v in exact_vertices:
        radial2 = v[0] * v[0] + v[1] * v[1]
        if radial2 > 1 or abs(v[2]) > 1 or (radial2 != 1 and abs(v[2]) != 1):
            raise InclusionError(f"vertex {v} is not on the cylinder boundary")
    planes = octahedron_facets(exact_vertices)
    supports = [(math.hypot(float(a), float(b)), abs(float(c))) for a, b, c in planes]

    def included(alpha: float) -> bool:
        return all(alpha * (rad + axial) <= 1.0 + 1e-12 for rad, axial in supports)

    lo, hi = 0.0, 1.0
    if included(hi):
        lo = hi
    else:
        while hi - lo > tol:
            mid = (lo + hi) / 2.0
            if included(mid):
                lo = mid
            else:
                hi = mid
    alpha = lo
    binding = [
        planes[k] for k, (rad, axial) in enumerate(supports) if alpha * (rad + axial) >= 1.0 - 1e-6
    ]
    contact = "tangent facets (n . x <= 1): " + "; ".join(
        "(" + ", ".join(str(x) for x in plane) + ")" for plane in binding
    )
    return InclusionResult(alpha=alpha, contact=contact, bm_upper=1.0 / alpha)


def bm_bound_from_certificate(cert: Certificate) -> Real:
    """The 2/d distance bound to the equilateral renorming of the certificate."""
    if cert.d <= 0:
        raise ValueError("certificate constant must be positive")
    two = Fraction(2) if cert.point_set.space.exact else 2.0
    return two / cert.d


def is_full_parallelotope_case(cert: Certificate) -> bool:
    """True when the certificate has 2^n points, so the renorming is the cube norm."""
    return len(cert.point_set) == 2 ** cert.point_set.space.dim


@dataclass(frozen=True)
class CeilingReport:
    n: int
    p: float
    alpha_n: float
    applies: bool
    ceiling: float | None
    message: str


def contrapositive_check(n: int, p: float) -> CeilingReport:
    """Margin ceiling for 2^n-point witness sets in ell_p^n, 2 <= p <= log2(n).

    In that range the distance from ell_p^n to the cube space is n^(1/p),
    so a full-cube certificate with constant d would force n^(1/p) <= 2/d;
    hence d < 2/n^(1/p) <= 1 and no strict 2^n-point certificate can exist.
    Used as a sanity ceiling for search results.
    """
    if n < 4:
        raise ValueError("ceiling argument needs n >= 4")
    p = float(p)
    if p < 2:
        raise ValueError("ceiling argument needs p >= 2")
    alpha_n = math.log2(n)
    if p > alpha_n:
        return CeilingReport(
            n=n,
            p=p,
            alpha_n=alpha_n,
            applies=False,
            ceiling=None,
            message=(
                f"p = {p} exceeds log2({n}) = {alpha_n}: the scaled cube itself certifies "
                "2^n points, no ceiling"
            ),
        )
    ceiling = 2.0 / n ** (1.0 / p)
    return CeilingReport(
        n=n,
        p=p,
        alpha_n=alpha_n,
        applies=True,
        ceiling=ceiling,
        message=(
            f"any {2 ** n}-point witness set in ell_{p}^{n} has constant d < {ceiling}"
            " (distance to the cube space is n^(1/p) <= 2/d)"
        ),
    )
