"""Search for large certified subsets and configurations.

Three strategies: exact branch-and-bound over a candidate pool, simulated
annealing over free unit vectors, and greedy extension of a certified base.
All of them lean on one fact about the margin problem: adding a point only
adds sandwich constraints, so every pair margin is antitone in the set.
Pairwise separation is therefore a sound edge filter, and a subset that
fails its threshold can be pruned together with all of its supersets.
Every reported result carries a certificate recomputed from scratch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._io import Real
from .certify import (
    Certificate,
    PointSet,
    Tolerances,
    certify_set,
    max_margin_pair,
)
from .spaces import NormSpace, Vector, normalize

MAX_POOL = 40


def antipodal_cap(n: int) -> int:
    """Antipodal sets in dimension n have at most 2^n points."""
    return 2**n


class SearchError(ValueError):
    pass


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric cooling plus a self-tuning tangential step size.

    The proposal radius starts at move_scale and adapts (up 15% on accepted
    moves, down 3% on rejections, clamped to [1e-4, 0.5]), which keeps the
    walk at its progress frontier without manual tuning.
    """

    initial_temp: float = 0.5
    decay: float = 0.995
    steps: int = 100_000
    move_scale: float = 0.3

    def to_json(self) -> dict:
        return {
            "initial_temp": self.initial_temp,
            "decay": self.decay,
            "steps": self.steps,
            "move_scale": self.move_scale,
        }


@dataclass(frozen=True)
class SearchResult:
    best_set: PointSet
    best_d: Real
    mode: str
    iterations: int
    seed: int
    pool_description: str
    certificate: Certificate | None


def _mode_distance_threshold(mode: str, tolerances: Tolerances, exact: bool):
    """Pairwise distance needed for a 2-point subset to meet the mode."""
    if mode == "strict":
        return 1 if exact else 1.0 + tolerances.strict_tol
    if mode == "hadwiger":
        return 1 if exact else 1.0 - tolerances.solver_tol
    if mode == "antipodal":
        return 0 if exact else tolerances.solver_tol
    raise SearchError(f"unknown mode {mode!r}")


def _distance_ok(dist, mode: str, tolerances: Tolerances, exact: bool) -> bool:
    bound = _mode_distance_threshold(mode, tolerances, exact)
    if exact and mode in ("strict", "antipodal"):
        return dist > bound
    return dist >= bound


def _meets(cert: Certificate, mode: str) -> bool:
    return cert.classification.meets(mode)


def exact_max_subset(
    space: NormSpace,
    pool: PointSet,
    mode: str = "strict",
    *,
    tolerances: Tolerances | None = None,
) -> SearchResult:
    """Maximum-cardinality subset of the pool whose certificate meets the mode.

    Margins only shrink as points are added, so pairwise infeasibility is a
    sound edge filter and a failed subset prunes its entire branch. Every
    improving subset is fully certified (pairwise feasibility alone is
    necessary, not sufficient, because the sandwich couples all points).
    """
    tolerances = tolerances or Tolerances()
    if pool.space != space:
        raise SearchError("pool was built for a different space")
    m = len(pool)
    if m > MAX_POOL:
        raise SearchError(f"pool of {m} points exceeds the combinatorial guard {MAX_POOL}")
    exact = space.exact
    pts = pool.points
    adj = [[False] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            # the 2-point margin equals the distance (sandwich is vacuous)
            dist = space.norm(pts[i] - pts[j])
            adj[i][j] = adj[j][i] = _distance_ok(dist, mode, tolerances, exact)

    best: list[int] = []
    best_cert: Certificate | None = None
    nodes = 0

    def extend(current: list[int], candidates: list[int]) -> None:
        nonlocal best, best_cert, nodes
        nodes += 1
        if len(current) >= 2:
            cert = certify_set(pool.subset(current), tolerances=tolerances)
            if not _meets(cert, mode):
                return
            if len(current) > len(best):
                best, best_cert = list(current), cert
        elif len(current) > len(best):
            best, best_cert = list(current), None
        for pos, p in enumerate(candidates):
            rest = [q for q in candidates[pos + 1 :] if adj[p][q]]
            if len(current) + 1 + len(rest) <= len(best):
                continue
            extend(current + [p], rest)

    extend([], list(range(m)))
    if not best:
        raise SearchError("empty pool")
    subset = pool.subset(best)
    return SearchResult(
        best_set=subset,
        best_d=best_cert.d if best_cert else math.inf,
        mode=mode,
        iterations=nodes,
        seed=0,
        pool_description=f"exact subset search over {m} pool points in {space!r}",
        certificate=best_cert,
    )


def greedy_extend(
    space: NormSpace,
    base: PointSet,
    pool: PointSet,
    mode: str = "hadwiger",
    *,
    tolerances: Tolerances | None = None,
) -> SearchResult:
    """Add pool points in order, keeping certification at the mode threshold."""
    tolerances = tolerances or Tolerances()
    if base.space != space or pool.space != space:
        raise SearchError("base/pool built for a different space")
    current = list(base.points)
    cert: Certificate | None = None
    if len(current) >= 2:
        cert = certify_set(base, tolerances=tolerances)
        if not _meets(cert, mode):
            raise SearchError(f"base set fails certification at mode {mode!r} (d = {float(cert.d)!r})")
    taken = {p.coords for p in current}
    for point in pool.points:
        if point.coords in taken:
            continue
        candidate = PointSet(space=space, points=tuple(current + [point]))
        if len(candidate) < 2:
            current.append(point)
            taken.add(point.coords)
            continue
        trial = certify_set(candidate, tolerances=tolerances)
        if _meets(trial, mode):
            current.append(point)
            taken.add(point.coords)
            cert = trial
    final = PointSet(space=space, points=tuple(current))
    return SearchResult(
        best_set=final,
        best_d=cert.d if cert else math.inf,
        mode=mode,
        iterations=len(pool),
        seed=0,
        pool_description=f"greedy extension of a {len(base)}-point base over {len(pool)} pool points",
        certificate=cert,
    )


def _pair_score(point_set: PointSet, i: int, j: int, tol: float) -> float:
    """Margin when the pair separates, else the (negative) violation depth.

    Certified margins are exactly 0 on a dense set of configurations (the
    antipodal ones form a measure-zero stratum), so raw margins give the
    annealer no gradient. For a non-separating pair we report instead the
    worst sandwich slack of the distance-attaining functional, a piecewise
    smooth negative quantity that increases toward feasibility.
    """
    w = max_margin_pair(point_set, i, j, tol=tol)
    if w.separating:
        return float(w.margin)
    space = point_set.space
    pts = point_set.points
    f0 = space.dual_support(pts[i] - pts[j])
    fi, fj = f0(pts[i]), f0(pts[j])
    return float(min(min(fi - f0(z), f0(z) - fj) for z in pts))


def _all_scores(space: NormSpace, points: list[Vector], tol: float) -> dict[tuple[int, int], float]:
    ps = PointSet(space=space, points=tuple(points))
    k = len(points)
    return {(i, j): _pair_score(ps, i, j, tol) for i in range(k) for j in range(i + 1, k)}


def _snap_to_box(points: list[Vector]) -> list[Vector] | None:
    """Project 2^n Euclidean points onto the nearest sphere-inscribed box.

    The vertex set of a rectangular box {sum +-a_m q_m} has covariance
    Q diag(a^2) Q^T, so the eigenframe of the configuration covariance
    recovers the box; its vertices are then rebuilt explicitly, which makes
    the sandwich ties exact at float precision and lets the certifier see
    the true margins (2 * min a_m).
    """
    arr = np.asarray([p.as_floats() for p in points])
    n = arr.shape[1]
    if len(points) != 2**n:
        return None
    cov = arr.T @ arr / len(points)
    eigenvalues, frame = np.linalg.eigh(cov)
    if eigenvalues[0] <= 1e-12:
        return None
    half = np.sqrt(eigenvalues)
    half /= np.linalg.norm(half)
    out = []
    for pattern in np.ndindex(*(2,) * n):
        signs = 1 - 2 * np.asarray(pattern)
        vertex = frame @ (signs * half)
        out.append(Vector(tuple(vertex / np.linalg.norm(vertex))))
    return out


def anneal_placement(
    space: NormSpace,
    k: int,
    mode: str = "strict",
    seed: int = 0,
    schedule: AnnealSchedule | None = None,
    *,
    tolerances: Tolerances | None = None,
) -> SearchResult:
    """Maximize the minimum pair margin over k free unit vectors.

    One point is perturbed tangentially and renormalized per step. The
    annealing objective uses the margin of each affected pair when it
    separates and the sandwich violation depth when it does not (see
    _pair_score); stale entries for untouched pairs are refreshed in full
    whenever the tracked objective would improve, so the best-so-far value
    is monotone and always backed by a complete evaluation.

    In Euclidean spaces with k = 2^n the antipodal optima are exactly the
    sphere-inscribed boxes; there the candidate configuration is snapped to
    its covariance eigenbox each step and the snapped set is certified
    directly, which is what lets the annealer actually reach box-quality
    constants instead of diffusing along a measure-zero feasibility stratum.
    Requesting k above the antipodal cap 2^n is allowed; the result then
    simply never certifies (best_d stays at or below 0).
    """
    schedule = schedule or AnnealSchedule()
    tolerances = tolerances or Tolerances()
    if k < 2:
        raise SearchError("need k >= 2")
    rng = np.random.default_rng(seed)
    tol = tolerances.solver_tol
    snap_mode = (
        not space.exact
        and getattr(space, "p", None) == 2.0
        and k == 2**space.dim
    )

    points: list[Vector] = []
    while len(points) < k:
        raw = rng.standard_normal(space.dim)
        if np.linalg.norm(raw) < 1e-9:
            continue
        points.append(normalize(space, Vector(tuple(raw))))

    def snapped_objective(pts: list[Vector]) -> tuple[float, list[Vector]]:
        snapped = _snap_to_box(pts)
        if snapped is None:
            return -math.inf, pts
        cert = certify_set(PointSet(space=space, points=tuple(snapped)), tolerances=tolerances)
        return float(cert.d), snapped

    if snap_mode:
        current_obj, best_points = snapped_objective(points)
        best_obj = current_obj
        scores: dict[tuple[int, int], float] = {}
    else:
        scores = _all_scores(space, points, tol)
        current_obj = min(scores.values())
        best_points = list(points)
        best_obj = min(float(w.margin) for w in certify_set(
            PointSet(space=space, points=tuple(points)), tolerances=tolerances
        ).witnesses)

    temp = schedule.initial_temp
    sigma = schedule.move_scale
    for _ in range(schedule.steps):
        t = int(rng.integers(k))
        x = np.asarray(points[t].as_floats())
        g = rng.standard_normal(space.dim)
        g -= (g @ x) * x / (x @ x)
        cand_raw = x + sigma * g
        if np.linalg.norm(cand_raw) < 1e-9:
            temp *= schedule.decay
            continue
        cand = normalize(space, Vector(tuple(cand_raw)))
        trial_points = list(points)
        trial_points[t] = cand

        if snap_mode:
            trial_obj, trial_snapped = snapped_objective(trial_points)
            delta = trial_obj - current_obj
            accepted = delta >= 0 or rng.random() < math.exp(delta / max(temp, 1e-12))
            if accepted:
                points, current_obj = trial_points, trial_obj
                if current_obj > best_obj:
                    best_obj = current_obj
                    best_points = trial_snapped
        else:
            trial_scores = dict(scores)
            trial_ps = PointSet(space=space, points=tuple(trial_points))
            for other in range(k):
                if other == t:
                    continue
                i, j = min(other, t), max(other, t)
                trial_scores[(i, j)] = _pair_score(trial_ps, i, j, tol)
            trial_obj = min(trial_scores.values())
            delta = trial_obj - current_obj
            accepted = delta >= 0 or rng.random() < math.exp(delta / max(temp, 1e-12))
            if accepted:
                points, scores, current_obj = trial_points, trial_scores, trial_obj
                if current_obj > best_obj:
                    scores = _all_scores(space, points, tol)
                    current_obj = min(scores.values())
                    true_d = min(
                        float(w.margin)
                        for w in certify_set(
                            PointSet(space=space, points=tuple(points)), tolerances=tolerances
                        ).witnesses
                    )
                    if true_d > best_obj:
                        best_obj = true_d
                        best_points = list(points)
        sigma = min(sigma * 1.15, 0.5) if accepted else max(sigma * 0.97, 1e-4)
        temp *= schedule.decay

    final_set = PointSet(space=space, points=tuple(best_points))
    cert = certify_set(final_set, tolerances=tolerances)
    return SearchResult(
        best_set=final_set,
        best_d=cert.d,
        mode=mode,
        iterations=schedule.steps,
        seed=seed,
        pool_description=(
            f"anneal k={k} in {space!r} with schedule {schedule.to_json()!r}"
            + (" (box snap)" if snap_mode else "")
        ),
        certificate=cert,
    )


def brute_force_max_subset(
    space: NormSpace,
    pool: PointSet,
    mode: str = "strict",
    *,
    tolerances: Tolerances | None = None,
) -> SearchResult:
    """Reference oracle: try every subset in decreasing size order."""
    import itertools

    tolerances = tolerances or Tolerances()
    m = len(pool)
    if m > 12:
        raise SearchError("brute force is limited to 12 pool points")
    for size in range(m, 1, -1):
        for combo in itertools.combinations(range(m), size):
            cert = certify_set(pool.subset(list(combo)), tolerances=tolerances)
            if _meets(cert, mode):
                return SearchResult(
                    best_set=pool.subset(list(combo)),
                    best_d=cert.d,
                    mode=mode,
                    iterations=0,
                    seed=0,
                    pool_description="exhaustive subset enumeration",
                    certificate=cert,
                )
    return SearchResult(
        best_set=pool.subset([0]),
        best_d=math.inf,
        mode=mode,
        iterations=0,
        seed=0,
        pool_description="exhaustive subset enumeration",
        certificate=None,
    )
