"""Finite-dimensional normed spaces with dual norms and support oracles.

Four kinds of space are supported:

* ``lp_space(n, p)``   with 1 < p < inf: closed-form norms (float regime).
* ``lp_space(n, 1)``   and ``lp_space(n, inf)``: routed through the polytopal
  representations below (cross-polytope vertices resp. coordinate facets),
  so every evaluation is exact rational.
* ``PolytopeVSpace``   unit ball given by a centrally symmetric vertex set;
  the norm is the gauge, evaluated by an exact simplex LP.
* ``PolytopeFSpace``   unit ball given by a centrally symmetric facet
  functional set; the dual norm is the exact gauge LP over the generators.
* ``CylinderSpace(n)`` the norm ||x|| = ||(x_1..x_{n-1})||_2 + |x_n|, whose
  dual ball is a solid cylinder (float regime).

Every space exposes four operations: the primal norm, the dual norm, a
support point of the dual ball for a given primal direction (the argmax of
f(v) over ||f||_* <= 1), and a support point of the primal ball for a given
functional. The latter two are the cut generators used by the max-margin
solver. Tie-breaking on flat faces is by lowest generator index so results
are reproducible.

Spaces are immutable after construction and all operations are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Sequence

from ._io import Real, number_to_json, parse_number
from . import _lp

MAX_POLYTOPE_DIM = 8


class SpaceError(ValueError):
    """Invalid space data (asymmetric or non-spanning generators, bad p)."""


class DimensionMismatchError(ValueError):
    pass


class ZeroVectorError(ValueError):
    pass


@dataclass(frozen=True)
class Vector:
    """A point of the space; coordinates are floats or Fractions."""

    coords: tuple[Real, ...]

    def __init__(self, coords: Iterable[Real]):
        object.__setattr__(self, "coords", tuple(coords))
        for x in self.coords:
            if isinstance(x, float) and not math.isfinite(x):
                raise ValueError("non-finite coordinate")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __add__(self, other: "Vector") -> "Vector":
        return Vector(a + b for a, b in zip(self.coords, other.coords, strict=True))

    def __sub__(self, other: "Vector") -> "Vector":
        return Vector(a - b for a, b in zip(self.coords, other.coords, strict=True))

    def __neg__(self) -> "Vector":
        return Vector(-a for a in self.coords)

    def scale(self, t: Real) -> "Vector":
        return Vector(t * a for a in self.coords)

    def as_floats(self) -> tuple[float, ...]:
        return tuple(float(a) for a in self.coords)


@dataclass(frozen=True)
class Functional:
    """A linear functional; evaluation is the coordinate dot product."""

    coords: tuple[Real, ...]

    def __init__(self, coords: Iterable[Real]):
        object.__setattr__(self, "coords", tuple(coords))
        for x in self.coords:
            if isinstance(x, float) and not math.isfinite(x):
                raise ValueError("non-finite coordinate")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __call__(self, v: Vector) -> Real:
        if v.dim != self.dim:
            raise DimensionMismatchError(f"functional dim {self.dim} vs vector dim {v.dim}")
        return sum(a * b for a, b in zip(self.coords, v.coords))

    def __neg__(self) -> "Functional":
        return Functional(-a for a in self.coords)

    def scale(self, t: Real) -> "Functional":
        return Functional(t * a for a in self.coords)

    def as_floats(self) -> tuple[float, ...]:
        return tuple(float(a) for a in self.coords)


def _unit_coords(n: int, k: int, one: Real) -> tuple[Real, ...]:
    return tuple(one if i == k else type(one)(0) for i in range(n))


def _check_dim(space: "NormSpace", obj: Vector | Functional) -> None:
    if obj.dim != space.dim:
        raise DimensionMismatchError(f"dim {obj.dim} does not match space dim {space.dim}")


def _rank_exact(rows: list[list[Fraction]]) -> int:
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = Fraction(1) / rows[rank][col]
        rows[rank] = [x * inv for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


class NormSpace:
    """Base interface; concrete kinds implement the four operations."""

    dim: int
    exact: bool  # True when all evaluations are exact rationals

    def norm(self, v: Vector) -> Real:
        raise NotImplementedError

    def dual_norm(self, f: Functional) -> Real:
        raise NotImplementedError

    def dual_support(self, v: Vector) -> Functional:
        """A functional with ||f||_* = 1 and f(v) = ||v||."""
        raise NotImplementedError

    def primal_support(self, f: Functional) -> Vector:
        """A vector with ||u|| = 1 and f(u) = ||f||_* (a dual-norm subgradient)."""
        raise NotImplementedError

    def coerce_vector(self, v: Vector | Sequence) -> Vector:
        coords = v.coords if isinstance(v, Vector) else tuple(v)
        out = Vector(parse_number(x, exact=self.exact) for x in coords)
        _check_dim(self, out)
        return out

    def coerce_functional(self, f: Functional | Sequence) -> Functional:
        coords = f.coords if isinstance(f, Functional) else tuple(f)
        out = Functional(parse_number(x, exact=self.exact) for x in coords)
        _check_dim(self, out)
        return out

    def descriptor(self) -> dict:
        raise NotImplementedError


class LpSpace(NormSpace):
    """ell_p^n for 1 < p < inf (float regime; p = 1, inf live in polytopal kinds)."""

    def __init__(self, n: int, p: float):
        if n < 1:
            raise SpaceError("dimension must be positive")
        p = float(p)
        if not (1.0 < p < math.inf):
            raise SpaceError("LpSpace needs 1 < p < inf; use lp_space() for the endpoints")
        self.dim = n
        self.p = p
        self.q = p / (p - 1.0)
        self.exact = False

    def __eq__(self, other):
        return isinstance(other, LpSpace) and (self.dim, self.p) == (other.dim, other.p)

    def __hash__(self):
        return hash(("lp", self.dim, self.p))

    def __repr__(self):
        return f"LpSpace(n={self.dim}, p={self.p})"

    def norm(self, v: Vector) -> float:
        _check_dim(self, v)
        return _lp_norm(v.as_floats(), self.p)

    def dual_norm(self, f: Functional) -> float:
        _check_dim(self, f)
        return _lp_norm(f.as_floats(), self.q)

    def dual_support(self, v: Vector) -> Functional:
        _check_dim(self, v)
        return Functional(_duality_map(v.as_floats(), self.p))

    def primal_support(self, f: Functional) -> Vector:
        _check_dim(self, f)
        return Vector(_duality_map(f.as_floats(), self.q))

    def descriptor(self) -> dict:
        return {"kind": "lp", "n": self.dim, "p": self.p}


def _lp_norm(xs: tuple[float, ...], p: float) -> float:
    if p == 2.0:
        return math.sqrt(math.fsum(x * x for x in xs))
    mx = max((abs(x) for x in xs), default=0.0)
    if mx == 0.0:
        return 0.0
    # scale out the max to dodge overflow for large p
    return mx * math.fsum((abs(x) / mx) ** p for x in xs) ** (1.0 / p)


def _duality_map(xs: tuple[float, ...], p: float) -> tuple[float, ...]:
    nrm = _lp_norm(xs, p)
    if nrm == 0.0:
        raise ZeroVectorError("support point of the zero vector is undefined")
    return tuple(math.copysign(abs(x / nrm) ** (p - 1.0), x) for x in xs)


class CylinderSpace(NormSpace):
    """||x|| = ||(x_1..x_{n-1})||_2 + |x_n|; the dual ball is a solid cylinder."""

    def __init__(self, n: int):
        if n < 2:
            raise SpaceError("cylinder norm needs dimension >= 2")
        self.dim = n
        self.exact = False

    def __eq__(self, other):
        return isinstance(other, CylinderSpace) and self.dim == other.dim

    def __hash__(self):
        return hash(("cylinder", self.dim))

    def __repr__(self):
        return f"CylinderSpace(n={self.dim})"

    def norm(self, v: Vector) -> float:
        _check_dim(self, v)
        xs = v.as_floats()
        return math.sqrt(math.fsum(x * x for x in xs[:-1])) + abs(xs[-1])

    def dual_norm(self, f: Functional) -> float:
        _check_dim(self, f)
        xs = f.as_floats()
        return max(math.sqrt(math.fsum(x * x for x in xs[:-1])), abs(xs[-1]))

    def dual_support(self, v: Vector) -> Functional:
        _check_dim(self, v)
        xs = v.as_floats()
        radial = math.sqrt(math.fsum(x * x for x in xs[:-1]))
        if radial == 0.0 and xs[-1] == 0.0:
            raise ZeroVectorError("support point of the zero vector is undefined")
        head = tuple(x / radial for x in xs[:-1]) if radial > 0.0 else (0.0,) * (self.dim - 1)
        tail = math.copysign(1.0, xs[-1]) if xs[-1] != 0.0 else 0.0
        return Functional(head + (tail,))

    def primal_support(self, f: Functional) -> Vector:
        _check_dim(self, f)
        xs = f.as_floats()
        radial = math.sqrt(math.fsum(x * x for x in xs[:-1]))
        if radial == 0.0 and xs[-1] == 0.0:
            raise ZeroVectorError("support point of the zero functional is undefined")
        if radial >= abs(xs[-1]):
            return Vector(tuple(x / radial for x in xs[:-1]) + (0.0,))
        return Vector((0.0,) * (self.dim - 1) + (math.copysign(1.0, xs[-1]),))

    def descriptor(self) -> dict:
        return {"kind": "cylinder", "n": self.dim}


def _prepare_generators(raw: Sequence, what: str) -> tuple[tuple[tuple[Fraction, ...], ...], int]:
    rows: list[tuple[Fraction, ...]] = []
    for entry in raw:
        coords = entry.coords if isinstance(entry, (Vector, Functional)) else tuple(entry)
        rows.append(tuple(parse_number(x, exact=True) for x in coords))
    if not rows:
        raise SpaceError(f"no {what} given")
    dim = len(rows[0])
    if any(len(r) != dim for r in rows):
        raise SpaceError(f"{what} of mixed dimension")
    if dim > MAX_POLYTOPE_DIM:
        raise SpaceError(f"polytopal spaces are limited to dimension {MAX_POLYTOPE_DIM}")
    as_set = set(rows)
    for r in rows:
        if tuple(-x for x in r) not in as_set:
            raise SpaceError(f"{what} set is not centrally symmetric (missing -{r})")
    if all(all(x == 0 for x in r) for r in rows):
        raise SpaceError(f"{what} are all zero")
    if _rank_exact([list(r) for r in rows]) < dim:
        raise SpaceError(f"{what} do not span the space")
    return tuple(rows), dim


class PolytopeVSpace(NormSpace):
    """Unit ball conv(generators); the norm is the exact gauge LP."""

    def __init__(self, vertices: Sequence, _descriptor: dict | None = None):
        gens, dim = _prepare_generators(vertices, "vertices")
        self.generators = tuple(Vector(g) for g in gens)
        self.dim = dim
        self.exact = True
        self._descriptor = _descriptor

    def __eq__(self, other):
        return isinstance(other, PolytopeVSpace) and self.generators == other.generators

    def __hash__(self):
        return hash(("polytope_v", self.generators))

    def __repr__(self):
        return f"PolytopeVSpace(dim={self.dim}, m={len(self.generators)})"

    def norm(self, v: Vector) -> Fraction:
        v = self.coerce_vector(v)
        if all(x == 0 for x in v.coords):
            return Fraction(0)
        # gauge(v) = min sum(lambda) with sum(lambda_j w_j) = v, lambda >= 0
        a_eq = [[w.coords[k] for w in self.generators] for k in range(self.dim)]
        res = _lp.solve_lp(
            [Fraction(1)] * len(self.generators),
            a_eq=a_eq,
            b_eq=list(v.coords),
        )
        if res.status != _lp.OPTIMAL:
            raise SpaceError(f"gauge LP {res.status}; generators do not span")
        return res.value

    def dual_norm(self, f: Functional) -> Fraction:
        f = self.coerce_functional(f)
        return max(f(w) for w in self.generators)

    def dual_support(self, v: Vector) -> Functional:
        v = self.coerce_vector(v)
        if all(x == 0 for x in v.coords):
            raise ZeroVectorError("support point of the zero vector is undefined")
        # max f(v) over the dual ball {f : f(w) <= 1 for all generators w},
        # solved exactly with f split into positive and negative parts.
        n = len(v.coords)
        obj = list(v.coords) + [-x for x in v.coords]
        a_ub = [list(w.coords) + [-x for x in w.coords] for w in self.generators]
        res = _lp.solve_lp(obj, a_ub=a_ub, b_ub=[Fraction(1)] * len(a_ub), maximize=True)
        if res.status != _lp.OPTIMAL:
            raise SpaceError(f"dual support LP {res.status}")
        return Functional(res.x[k] - res.x[n + k] for k in range(n))

    def primal_support(self, f: Functional) -> Vector:
        f = self.coerce_functional(f)
        values = [f(w) for w in self.generators]
        best = max(range(len(values)), key=lambda i: (values[i], -i))
        if values[best] == 0:
            raise ZeroVectorError("support point of the zero functional is undefined")
        return self.generators[best]

    def descriptor(self) -> dict:
        if self._descriptor is not None:
            return dict(self._descriptor)
        return {
            "kind": "polytope_v",
            "vertices": [[number_to_json(x) for x in w.coords] for w in self.generators],
        }


class PolytopeFSpace(NormSpace):
    """Unit ball {x : f_i(x) <= 1 for all generators}; dual ball conv(generators)."""

    def __init__(self, facets: Sequence, _descriptor: dict | None = None):
        gens, dim = _prepare_generators(facets, "facets")
        self.generators = tuple(Functional(g) for g in gens)
        self.dim = dim
        self.exact = True
        self._descriptor = _descriptor

    def __eq__(self, other):
        return isinstance(other, PolytopeFSpace) and self.generators == other.generators

    def __hash__(self):
        return hash(("polytope_f", self.generators))

    def __repr__(self):
        return f"PolytopeFSpace(dim={self.dim}, m={len(self.generators)})"

    def norm(self, v: Vector) -> Fraction:
        v = self.coerce_vector(v)
        return max(g(v) for g in self.generators)

    def dual_norm(self, f: Functional) -> Fraction:
        f = self.coerce_functional(f)
        if all(x == 0 for x in f.coords):
            return Fraction(0)
        a_eq = [[g.coords[k] for g in self.generators] for k in range(self.dim)]
        res = _lp.solve_lp(
            [Fraction(1)] * len(self.generators),
            a_eq=a_eq,
            b_eq=list(f.coords),
        )
        if res.status != _lp.OPTIMAL:
            raise SpaceError(f"dual gauge LP {res.status}")
        return res.value

    def dual_support(self, v: Vector) -> Functional:
        v = self.coerce_vector(v)
        values = [g(v) for g in self.generators]
        best = max(range(len(values)), key=lambda i: (values[i], -i))
        if values[best] == 0:
            raise ZeroVectorError("support point of the zero vector is undefined")
        return self.generators[best]

    def primal_support(self, f: Functional) -> Vector:
        f = self.coerce_functional(f)
        if all(x == 0 for x in f.coords):
            raise ZeroVectorError("support point of the zero functional is undefined")
        n = self.dim
        obj = list(f.coords) + [-x for x in f.coords]
        a_ub = [list(g.coords) + [-x for x in g.coords] for g in self.generators]
        res = _lp.solve_lp(obj, a_ub=a_ub, b_ub=[Fraction(1)] * len(a_ub), maximize=True)
        if res.status != _lp.OPTIMAL:
            raise SpaceError(f"primal support LP {res.status}")
        return Vector(res.x[k] - res.x[n + k] for k in range(n))

    def descriptor(self) -> dict:
        if self._descriptor is not None:
            return dict(self._descriptor)
        return {
            "kind": "polytope_f",
            "facets": [[number_to_json(x) for x in g.coords] for g in self.generators],
        }


def lp_space(n: int, p: float | str) -> NormSpace:
    """ell_p^n. The endpoints p = 1 and p = inf return exact polytopal spaces."""
    if isinstance(p, str):
        p = math.inf if p in ("inf", "infinity") else float(Fraction(p))
    if n < 1:
        raise SpaceError("dimension must be positive")
    if p < 1:
        raise SpaceError("p must satisfy p >= 1")
    if p == 1:
        one = Fraction(1)
        gens = [_unit_coords(n, k, one) for k in range(n)]
        gens += [tuple(-x for x in g) for g in gens]
        return PolytopeVSpace(gens, _descriptor={"kind": "lp", "n": n, "p": 1})
    if math.isinf(p):
        one = Fraction(1)
        gens = [_unit_coords(n, k, one) for k in range(n)]
        gens += [tuple(-x for x in g) for g in gens]
        return PolytopeFSpace(gens, _descriptor={"kind": "lp", "n": n, "p": "inf"})
    return LpSpace(n, p)


def primal_norm(space: NormSpace, v: Vector) -> Real:
    """||v|| in the given space (gauge LP for vertex-described polytopes)."""
    return space.norm(v)


def dual_norm(space: NormSpace, f: Functional) -> Real:
    """||f||_* = max of f over the unit ball of the space."""
    return space.dual_norm(f)


def dual_support_point(space: NormSpace, direction: Vector) -> Functional:
    """The dual-ball argmax of f(direction); attains the primal norm."""
    return space.dual_support(direction)


def normalize(space: NormSpace, v: Vector) -> Vector:
    """v / ||v||; exact for rational polytopal data."""
    v = space.coerce_vector(v)
    nrm = space.norm(v)
    if nrm == 0:
        raise ZeroVectorError("cannot normalize the zero vector")
    if space.exact:
        return v.scale(Fraction(1) / nrm)
    return v.scale(1.0 / nrm)


def space_to_json(space: NormSpace) -> dict:
    return space.descriptor()


def space_from_json(data: dict) -> NormSpace:
    """Parse a space descriptor; rational entries may be "p/q" strings."""
    if not isinstance(data, dict) or "kind" not in data:
        raise SpaceError("space descriptor must be an object with a 'kind' field")
    kind = data["kind"]
    if kind == "lp":
        p = data["p"]
        if isinstance(p, str) and p not in ("inf", "infinity"):
            p = float(Fraction(p))
        return lp_space(int(data["n"]), p)
    if kind == "cylinder":
        return CylinderSpace(int(data["n"]))
    if kind == "polytope_v":
        return PolytopeVSpace(data["vertices"])
    if kind == "polytope_f":
        return PolytopeFSpace(data["facets"])
    raise SpaceError(f"unknown space kind {kind!r}")
