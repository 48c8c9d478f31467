"""Max-margin separation certificates for point sets on a unit sphere.

For a set S on the unit sphere of a space X and an ordered pair (x_i, x_j),
the pair margin is

    sup { f(x_i) - f(x_j) : ||f||_* <= 1,  f(x_j) <= f(z) <= f(x_i) for z in S }.

The sandwich constraints are linear and homogeneous in f, so any feasible f
scales onto the dual sphere without losing feasibility. Three solver routes
are used depending on the space:

* polytopal spaces: the dual ball is itself a polytope, so one exact
  rational LP gives the margin and an optimal functional;
* Euclidean spaces (p = 2): by conic duality the margin equals the distance
  from x_i - x_j to the cone spanned by the sandwich rows, a nonnegative
  least-squares problem;
* everything else: cutting-plane outer approximation of the dual ball,
  seeded with coordinate cuts and cuts at +-(x_i - x_j); every LP optimum
  outside the ball is cut off by the supporting hyperplane at its radial
  projection, and the scaled iterate provides a certified lower bound.

A certificate aggregates one witness per unordered pair; its constant d is
the minimum margin, and the classification thresholds are d > 0
(antipodal), d >= 1 (the unit threshold) and d > 1 (strict). In float mode
the unit threshold carries the solver tolerance and strictness requires a
gap of strict_tol; in rational mode the comparisons are exact.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import linprog, nnls

from . import _lp
from ._io import Real, number_to_json, parse_number
from .spaces import (
    Functional,
    LpSpace,
    NormSpace,
    PolytopeVSpace,
    Vector,
    space_from_json,
    space_to_json,
)

THREADS_ENV = "ANTIPODE_THREADS"
ITERATION_CAP = 500

_HIGHS_OPTS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


class CertifyError(ValueError):
    pass


class NonUnitPointError(CertifyError):
    """A point misses the unit sphere by more than sphere_tol."""


class WitnessRejectedError(CertifyError):
    """A supplied functional has dual norm above 1 + tol."""

    def __init__(self, dual_norm_value):
        self.dual_norm_value = dual_norm_value
        super().__init__(f"witness rejected: dual norm {float(dual_norm_value)!r} exceeds 1")


class IterationLimitError(CertifyError):
    """Cutting-plane cap hit; carries the bracketing interval."""

    def __init__(self, lower: float, upper: float):
        self.lower = lower
        self.upper = upper
        super().__init__(f"iteration cap exceeded; margin bracketed in [{lower!r}, {upper!r}]")


@dataclass(frozen=True)
class Tolerances:
    sphere_tol: float = 1e-9
    solver_tol: float = 1e-9
    strict_tol: float = 1e-6

    def to_json(self) -> dict:
        return {
            "sphere_tol": self.sphere_tol,
            "solver_tol": self.solver_tol,
            "strict_tol": self.strict_tol,
        }


class Classification(str, Enum):
    NOT_ANTIPODAL = "not_antipodal"
    ANTIPODAL = "antipodal"
    HADWIGER = "hadwiger"
    STRICT_HADWIGER = "strict_hadwiger"

    def meets(self, mode: str) -> bool:
        order = {
            Classification.NOT_ANTIPODAL: 0,
            Classification.ANTIPODAL: 1,
            Classification.HADWIGER: 2,
            Classification.STRICT_HADWIGER: 3,
        }
        need = {"antipodal": 1, "hadwiger": 2, "strict": 3}
        if mode not in need:
            raise ValueError(f"unknown mode {mode!r}")
        return order[self] >= need[mode]


@dataclass(frozen=True)
class PointSet:
    """Points intended to lie on the unit sphere of a space."""

    space: NormSpace
    points: tuple[Vector, ...]

    @staticmethod
    def create(
        space: NormSpace,
        points: Iterable,
        *,
        sphere_tol: float = 1e-9,
        project: bool = False,
    ) -> "PointSet":
        coerced = [space.coerce_vector(p) for p in points]
        if not coerced:
            raise CertifyError("empty point set")
        checked = []
        for idx, v in enumerate(coerced):
            nrm = space.norm(v)
            residual = abs(nrm - 1)
            if residual > sphere_tol:
                if not project:
                    raise NonUnitPointError(
                        f"point {idx} has norm {float(nrm)!r} (off the sphere by {float(residual)!r});"
                        " pass project=True to renormalize"
                    )
                if nrm == 0:
                    raise NonUnitPointError(f"point {idx} is zero and cannot be projected")
                v = v.scale((Fraction(1) if space.exact else 1.0) / nrm)
            checked.append(v)
        seen = set()
        for idx, v in enumerate(checked):
            if v.coords in seen:
                raise CertifyError(f"duplicate point at index {idx}")
            seen.add(v.coords)
        return PointSet(space=space, points=tuple(checked))

    def __len__(self) -> int:
        return len(self.points)

    def subset(self, indices: Sequence[int]) -> "PointSet":
        return PointSet(space=self.space, points=tuple(self.points[i] for i in indices))

    @property
    def mode(self) -> str:
        return "rational" if self.space.exact else "float"


@dataclass(frozen=True)
class PairWitness:
    i: int
    j: int
    functional: Functional
    margin: Real
    sandwich_slack: Real
    dual_norm_value: Real
    separating: bool
    upper_bound: Real | None = None  # cutting-plane bracket, when applicable


@dataclass(frozen=True)
class Certificate:
    point_set: PointSet
    witnesses: tuple[PairWitness, ...]
    d: Real
    classification: Classification
    lower_bound_mode: bool
    tolerances: Tolerances

    @property
    def mode(self) -> str:
        return self.point_set.mode


def _pair_indices(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def _sandwich_slack(points: Sequence[Vector], i: int, j: int, f: Functional) -> Real:
    fi = f(points[i])
    fj = f(points[j])
    return min(min(fi - f(z), f(z) - fj) for z in points)


def _sandwich_rows(points: Sequence[Vector], i: int, j: int) -> list[Vector]:
    rows = []
    for z in points:
        rows.append(z - points[i])
        rows.append(points[j] - z)
    return [r for r in rows if any(x != 0 for x in r.coords)]


# ---------------------------------------------------------------------------
# exact route (polytopal dual ball: one rational LP)

def _exact_pair(space: NormSpace, points, i, j, sandwich: bool) -> PairWitness:
    n = space.dim
    diff = points[i] - points[j]
    rows = _sandwich_rows(points, i, j) if sandwich else []
    if isinstance(space, PolytopeVSpace):
        # variables f+ , f-; dual ball is {f : f(w) <= 1 for all generators}
        obj = list(diff.coords) + [-x for x in diff.coords]
        a_ub = [list(w.coords) + [-x for x in w.coords] for w in space.generators]
        b_ub = [Fraction(1)] * len(a_ub)
        for r in rows:
            a_ub.append(list(r.coords) + [-x for x in r.coords])
            b_ub.append(Fraction(0))
        res = _lp.solve_lp(obj, a_ub=a_ub, b_ub=b_ub, maximize=True)
        if res.status != _lp.OPTIMAL:
            raise CertifyError(f"margin LP unexpectedly {res.status}")
        f = Functional(res.x[k] - res.x[n + k] for k in range(n))
    else:
        # variables are barycentric weights over the generators of the dual ball
        gens = space.generators
        obj = [g(diff) for g in gens]
        a_ub = [[Fraction(1)] * len(gens)]
        b_ub = [Fraction(1)]
        for r in rows:
            a_ub.append([g(r) for g in gens])
            b_ub.append(Fraction(0))
        res = _lp.solve_lp(obj, a_ub=a_ub, b_ub=b_ub, maximize=True)
        if res.status != _lp.OPTIMAL:
            raise CertifyError(f"margin LP unexpectedly {res.status}")
        coords = [Fraction(0)] * n
        for lam, g in zip(res.x, gens):
            if lam:
                for k in range(n):
                    coords[k] += lam * g.coords[k]
        f = Functional(coords)
    margin = res.value
    slack = _sandwich_slack(points, i, j, f) if sandwich else Fraction(0)
    return PairWitness(
        i=i,
        j=j,
        functional=f,
        margin=margin,
        sandwich_slack=slack,
        dual_norm_value=space.dual_norm(f),
        separating=margin > 0,
        upper_bound=margin,
    )


# ---------------------------------------------------------------------------
# Euclidean route: margin = dist(x_i - x_j, cone of sandwich rows) via NNLS

def _euclidean_pair(space: NormSpace, points, i, j, sandwich: bool) -> PairWitness:
    c = np.asarray((points[i] - points[j]).as_floats())
    rows = _sandwich_rows(points, i, j) if sandwich else []
    if rows:
        a = np.asarray([r.as_floats() for r in rows])
        lam, margin = nnls(a.T, c)
        residual = c - a.T @ lam
    else:
        residual = c
        margin = float(np.linalg.norm(c))
    margin = float(margin)
    separating = margin > 1e-12
    if separating:
        f = Functional(residual / margin)
        slack = _sandwich_slack(points, i, j, f) if sandwich else 0.0
        dual = space.dual_norm(f)
    else:
        f = Functional(np.zeros_like(c))
        margin = 0.0
        slack = 0.0
        dual = 0.0
    return PairWitness(
        i=i,
        j=j,
        functional=f,
        margin=margin,
        sandwich_slack=slack,
        dual_norm_value=dual,
        separating=separating,
        upper_bound=margin,
    )


# ---------------------------------------------------------------------------
# generic route: cutting-plane outer approximation of the dual ball

def _cutting_plane_pair(space: NormSpace, points, i, j, tol: float, sandwich: bool) -> PairWitness:
    n = space.dim
    diff = points[i] - points[j]
    c = np.asarray(diff.as_floats())

    cut_rows: list[np.ndarray] = []
    seeds = [diff, -diff]
    for k in range(n):
        e = Vector(tuple(1.0 if t == k else 0.0 for t in range(n)))
        seeds += [e, -e]
    for v in seeds:
        nrm = space.norm(v)
        if float(nrm) > 0.0:
            cut_rows.append(np.asarray(v.as_floats()) / float(nrm))

    sandwich_rows = (
        [np.asarray(r.as_floats()) for r in _sandwich_rows(points, i, j)] if sandwich else []
    )
    n_sand = len(sandwich_rows)

    best_lb = 0.0
    best_f = np.zeros(n)
    upper = math.inf
    for _ in range(ITERATION_CAP):
        a_ub = np.vstack(cut_rows + sandwich_rows)
        b_ub = np.concatenate([np.ones(len(cut_rows)), np.zeros(n_sand)])
        res = linprog(
            -c,
            A_ub=a_ub,
            b_ub=b_ub,
            bounds=[(None, None)] * n,
            method="highs",
            options=_HIGHS_OPTS,
        )
        if res.status != 0:
            raise CertifyError(f"cutting-plane LP failed with status {res.status}: {res.message}")
        f_star = res.x
        upper = float(c @ f_star)
        dn = float(space.dual_norm(Functional(f_star)))
        f_hat = f_star / dn if dn > 1.0 else f_star
        lb = float(c @ f_hat)
        if lb > best_lb:
            best_lb = lb
            best_f = f_hat
        if upper - best_lb <= tol:
            break
        u = space.primal_support(Functional(f_star))
        cut_rows.append(np.asarray(u.as_floats()))
    else:
        raise IterationLimitError(best_lb, upper)

    separating = upper > max(tol, 1e-12)
    f = Functional(best_f)
    slack = _sandwich_slack(points, i, j, f) if sandwich else 0.0
    return PairWitness(
        i=i,
        j=j,
        functional=f,
        margin=best_lb,
        sandwich_slack=slack,
        dual_norm_value=space.dual_norm(f),
        separating=separating,
        upper_bound=upper,
    )


def max_margin_pair(
    point_set: PointSet,
    i: int,
    j: int,
    tol: float = 1e-9,
    *,
    sandwich: bool = True,
) -> PairWitness:
    """Best separation margin for the ordered pair (i, j) over the dual ball.

    With sandwich=False the constraints from the rest of the set are dropped
    and the optimum equals the distance ||x_i - x_j|| exactly.
    """
    pts = point_set.points
    if i == j:
        raise CertifyError("pair indices must differ")
    if not (0 <= i < len(pts) and 0 <= j < len(pts)):
        raise CertifyError("pair index out of range")
    space = point_set.space
    if space.exact:
        return _exact_pair(space, pts, i, j, sandwich)
    if isinstance(space, LpSpace) and space.p == 2.0:
        return _euclidean_pair(space, pts, i, j, sandwich)
    return _cutting_plane_pair(space, pts, i, j, tol, sandwich)


def _num_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _classify(d: Real, all_separating: bool, tolerances: Tolerances, exact: bool) -> Classification:
    if not all_separating or d <= 0:
        return Classification.NOT_ANTIPODAL
    if exact:
        if d > 1:
            return Classification.STRICT_HADWIGER
        if d >= 1:
            return Classification.HADWIGER
        return Classification.ANTIPODAL
    if d >= 1 + tolerances.strict_tol:
        return Classification.STRICT_HADWIGER
    if d >= 1 - tolerances.solver_tol:
        return Classification.HADWIGER
    return Classification.ANTIPODAL


def certify_set(
    point_set: PointSet,
    tol: float | None = None,
    *,
    tolerances: Tolerances | None = None,
) -> Certificate:
    """Solve every pair margin and classify; deterministic in the set order.

    Pair solves are independent; set ANTIPODE_THREADS to run them on a
    thread pool (the final min-reduction does not depend on completion
    order).
    """
    tolerances = tolerances or Tolerances()
    if tol is not None:
        tolerances = Tolerances(tolerances.sphere_tol, tol, tolerances.strict_tol)
    if len(point_set) < 2:
        raise CertifyError("certification needs at least two points")
    pairs = _pair_indices(len(point_set))
    workers = _num_threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            witnesses = list(
                pool.map(lambda ij: max_margin_pair(point_set, *ij, tol=tolerances.solver_tol), pairs)
            )
    else:
        witnesses = [max_margin_pair(point_set, i, j, tol=tolerances.solver_tol) for i, j in pairs]
    d = min(w.margin for w in witnesses)
    all_sep = all(w.separating for w in witnesses)
    classification = _classify(d, all_sep, tolerances, point_set.space.exact)
    return Certificate(
        point_set=point_set,
        witnesses=tuple(witnesses),
        d=d,
        classification=classification,
        lower_bound_mode=False,
        tolerances=tolerances,
    )


def verify_witness(
    point_set: PointSet,
    i: int,
    j: int,
    f: Functional | Sequence,
    tol: float = 1e-9,
) -> PairWitness:
    """Evaluate a supplied functional exactly; never optimizes.

    Raises WitnessRejectedError when its dual norm exceeds 1 + tol.
    """
    space = point_set.space
    f = space.coerce_functional(f)
    dn = space.dual_norm(f)
    if dn > 1 + tol:
        raise WitnessRejectedError(dn)
    pts = point_set.points
    margin = f(pts[i]) - f(pts[j])
    slack = _sandwich_slack(pts, i, j, f)
    return PairWitness(
        i=i,
        j=j,
        functional=f,
        margin=margin,
        sandwich_slack=slack,
        dual_norm_value=dn,
        separating=margin > 0 and slack >= (0 if space.exact else -tol),
        upper_bound=None,
    )


def certify_with_witnesses(
    point_set: PointSet,
    witnesses: Mapping[tuple[int, int], Functional | Sequence] | Iterable[tuple[int, int, Functional]],
    *,
    tolerances: Tolerances | None = None,
) -> Certificate:
    """Lower-bound certificate from user-supplied functionals, one per pair.

    A witness given for (j, i) counts for (i, j) with the sign flipped. Every
    unordered pair must be covered.
    """
    tolerances = tolerances or Tolerances()
    if len(point_set) < 2:
        raise CertifyError("certification needs at least two points")
    supplied: dict[tuple[int, int], Functional] = {}
    if isinstance(witnesses, Mapping):
        items = list(witnesses.items())
    else:
        items = [((w[0], w[1]), w[2]) for w in witnesses]
    for (i, j), f in items:
        f = point_set.space.coerce_functional(f)
        if i > j:
            i, j, f = j, i, -f
        supplied[(i, j)] = f
    out = []
    for i, j in _pair_indices(len(point_set)):
        if (i, j) not in supplied:
            raise CertifyError(f"no witness supplied for pair ({i}, {j})")
        out.append(verify_witness(point_set, i, j, supplied[(i, j)], tol=tolerances.solver_tol))
    d = min(w.margin for w in out)
    all_sep = all(w.separating for w in out)
    classification = _classify(d, all_sep, tolerances, point_set.space.exact)
    return Certificate(
        point_set=point_set,
        witnesses=tuple(out),
        d=d,
        classification=classification,
        lower_bound_mode=True,
        tolerances=tolerances,
    )


@dataclass(frozen=True)
class SeparationReport:
    matrix: tuple[tuple[Real, ...], ...]
    min_off_diagonal: Real
    one_separated: bool
    strictly_separated: bool


def separation_matrix(point_set: PointSet, *, tolerances: Tolerances | None = None) -> SeparationReport:
    """Pairwise distances only; no functionals involved."""
    tolerances = tolerances or Tolerances()
    if len(point_set) < 2:
        raise CertifyError("separation report needs at least two points")
    space = point_set.space
    pts = point_set.points
    zero = Fraction(0) if space.exact else 0.0
    matrix = tuple(
        tuple(zero if a == b else space.norm(pts[a] - pts[b]) for b in range(len(pts)))
        for a in range(len(pts))
    )
    min_off = min(matrix[a][b] for a in range(len(pts)) for b in range(len(pts)) if a != b)
    if space.exact:
        one_sep = min_off >= 1
        strict_sep = min_off > 1
    else:
        one_sep = min_off >= 1 - tolerances.solver_tol
        strict_sep = min_off >= 1 + tolerances.strict_tol
    return SeparationReport(
        matrix=matrix,
        min_off_diagonal=min_off,
        one_separated=one_sep,
        strictly_separated=strict_sep,
    )


# ---------------------------------------------------------------------------
# JSON payloads

def certificate_to_json(cert: Certificate) -> dict:
    return {
        "space": space_to_json(cert.point_set.space),
        "points": [[number_to_json(x) for x in p.coords] for p in cert.point_set.points],
        "pairs": [
            {
                "i": w.i,
                "j": w.j,
                "f": [number_to_json(x) for x in w.functional.coords],
                "margin": number_to_json(w.margin),
                "slack": number_to_json(w.sandwich_slack),
                "dual_norm": number_to_json(w.dual_norm_value),
                "separating": w.separating,
            }
            for w in cert.witnesses
        ],
        "d": number_to_json(cert.d),
        "classification": cert.classification.value,
        "mode": cert.mode,
        "lower_bound_mode": cert.lower_bound_mode,
        "tolerances": cert.tolerances.to_json(),
    }


def certificate_from_json(data: dict) -> Certificate:
    space = space_from_json(data["space"])
    exact = space.exact
    point_set = PointSet.create(
        space,
        data["points"],
        sphere_tol=data.get("tolerances", {}).get("sphere_tol", 1e-9),
    )
    witnesses = tuple(
        PairWitness(
            i=entry["i"],
            j=entry["j"],
            functional=Functional(parse_number(x, exact=exact) for x in entry["f"]),
            margin=parse_number(entry["margin"], exact=exact),
            sandwich_slack=parse_number(entry["slack"], exact=exact),
            dual_norm_value=parse_number(entry["dual_norm"], exact=exact),
            separating=bool(entry.get("separating", True)),
        )
        for entry in data["pairs"]
    )
    tol = data.get("tolerances", {})
    return Certificate(
        point_set=point_set,
        witnesses=witnesses,
        d=parse_number(data["d"], exact=exact),
        classification=Classification(data["classification"]),
        lower_bound_mode=bool(data.get("lower_bound_mode", False)),
        tolerances=Tolerances(
            sphere_tol=tol.get("sphere_tol", 1e-9),
            solver_tol=tol.get("solver_tol", 1e-9),
            strict_tol=tol.get("strict_tol", 1e-6),
        ),
    )
