"""Search for simultaneous fan partitions of spherical measures.

solve_2fan_3measures looks for a 2-fan alpha-partitioning three measures
(such a fan exists for proper measures).  The second ray is placed by
mu_1-quantile, so mu_1 is partitioned exactly up to granularity and the
search runs over (center, first azimuth) only; the objective is the worst
residual of the other measures.

explore_3fan_2measures runs the same scheme for 3-fans of two measures.
It is exploratory: no existence theorem backs it, and non-convergence is a
legitimate outcome.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .fanmeasure import (
    AzimuthProfile,
    Fan,
    MeasureCloud,
    PoleCollisionError,
    orthonormal_frame,
    quantile_fan,
    first_ray_index,
    sector_masses,
)

TWO_PI = 2.0 * math.pi


def default_tolerance(measures) -> float:
    return max(5.0 * max(mu.max_weight for mu in measures), 1e-6)


def thread_count(explicit=None) -> int:
    if explicit is not None and explicit > 0:
        return explicit
    env = os.environ.get("FANATIC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


@dataclass(frozen=True)
class SolveRequest:
    measures: tuple
    alpha: tuple
    tolerance: float = None
    seed: int = 0
    budget: int = 200_000
    threads: int = None

    def __post_init__(self):
        a = tuple(float(x) for x in self.alpha)
        if any(x <= 0 for x in a) or abs(sum(a) - 1.0) > 1e-9:
            raise ValueError("alpha entries must be positive and sum to 1")
        object.__setattr__(self, "alpha", a)
        tol = self.tolerance
        if tol is None:
            tol = default_tolerance(self.measures)
        if tol <= 0:
            raise ValueError("tolerance must be positive")
        object.__setattr__(self, "tolerance", float(tol))
        if self.budget < 100:
            raise ValueError("budget too small to search")


@dataclass
class SolveResult:
    fan: Fan
    residuals: tuple
    evaluations: int
    converged: bool
    objective: float
    exploratory: bool = False


def fibonacci_sphere(count: int) -> np.ndarray:
    """Deterministic low-discrepancy unit vectors."""
    i = np.arange(count) + 0.5
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    z = 1.0 - 2.0 * i / count
    r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


class _Objective:
    """Residual evaluation with a budget counter.

    The search evaluates residuals through per-center azimuth profiles
    (fast path); reported results are always recomputed with quantile_fan
    and sector_masses, which agree with the profiles to roundoff.
    """

    def __init__(self, measures, levels, targets):
        self.measures = measures
        self.levels = levels  # cumulative quantile levels for mu_1 rays
        self.targets = np.asarray(targets)  # target masses per sector
        self.evaluations = 0

    def residuals(self, center, phi):
        fan = quantile_fan(center, phi, self.measures[0], self.levels)
        masses = sector_masses(fan, self.measures[1:])
        start = first_ray_index(fan)
        masses = np.roll(masses, -start, axis=1)
        res = np.abs(masses - self.targets[None, :]).max(axis=1)
        return fan, tuple(float(r) for r in res)

    def profiles(self, center):
        frame = orthonormal_frame(center)
        return [AzimuthProfile(mu, center, frame) for mu in self.measures]

    def fast_value(self, profs, phi):
        self.evaluations += 1
        p = phi % TWO_PI
        cuts = [p]
        for lev in self.levels:
            cuts.append(p + profs[0].quantile_from(p, lev))
        cuts.append(p + TWO_PI)
        worst = 0.0
        for prof in profs[1:]:
            for k in range(len(cuts) - 1):
                m = prof.interval_mass(cuts[k], cuts[k + 1])
                worst = max(worst, abs(m - self.targets[k]))
        return worst

    def __call__(self, center, phi):
        try:
            return self.fast_value(self.profiles(center), phi)
        except (PoleCollisionError, ValueError):
            self.evaluations += 1
            return float("inf")


def _chart(center):
    ref = (
        np.array([1.0, 0.0, 0.0])
        if abs(center[0]) < 0.9
        else np.array([0.0, 1.0, 0.0])
    )
    e1 = ref - np.dot(ref, center) * center
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(center, e1)
    return e1, e2


def _search(measures, levels, targets, tolerance, seed, budget, threads):
    obj = _Objective(measures, levels, targets)
    rng = np.random.default_rng(seed)

    n_phi = 8
    coarse = max(64, min(budget // (3 * n_phi), 4096))
    centers = fibonacci_sphere(coarse)
    # tiny deterministic jitter avoids hitting data points / poles exactly
    jitter = rng.normal(scale=1e-3, size=centers.shape)
    centers = centers + jitter
    centers /= np.linalg.norm(centers, axis=1)[:, None]
    phis = [(i + 0.5) * TWO_PI / n_phi for i in range(n_phi)]

    candidates = [(c, phi) for c in centers for phi in phis]

    def score_center(c):
        try:
            profs = obj.profiles(c)
        except (PoleCollisionError, ValueError):
            obj.evaluations += n_phi
            return [float("inf")] * n_phi
        return [obj.fast_value(profs, phi) for phi in phis]

    workers = thread_count(threads)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(score_center, centers, chunksize=16))
    else:
        rows = [score_center(c) for c in centers]
    values = [v for row in rows for v in row]

    order = sorted(
        range(len(candidates)),
        key=lambda i: (values[i], i),
    )

    best_fan, best_res, best_val = None, None, float("inf")
    for idx in order[:6]:
        if obj.evaluations >= budget:
            break
        c0, phi0 = candidates[idx]
        e1, e2 = _chart(c0)

        def local(x):
            u, v, dphi = x
            center = c0 + u * e1 + v * e2
            center = center / np.linalg.norm(center)
            return obj(center, phi0 + dphi)

        remaining = max(budget - obj.evaluations, 10)
        result = minimize(
            local,
            np.zeros(3),
            method="Nelder-Mead",
            options={
                "maxfev": min(remaining, 4000),
                "xatol": 1e-10,
                "fatol": 1e-12,
                "initial_simplex": np.vstack(
                    [np.zeros(3), np.eye(3) * 0.2]
                ),
            },
        )
        u, v, dphi = result.x
        center = c0 + u * e1 + v * e2
        center /= np.linalg.norm(center)
        try:
            fan, res = obj.residuals(center, phi0 + dphi)
        except (PoleCollisionError, ValueError):
            continue
        val = max(res)
        if val < best_val:
            best_fan, best_res, best_val = fan, res, val
        if best_val <= tolerance:
            break

    if best_fan is None:
        raise RuntimeError("search failed to produce any valid fan")
    return SolveResult(
        fan=best_fan,
        residuals=best_res,
        evaluations=obj.evaluations,
        converged=best_val <= tolerance,
        objective=best_val,
    )


def solve_2fan_3measures(req: SolveRequest) -> SolveResult:
    if len(req.measures) != 3 or len(req.alpha) != 2:
        raise ValueError("need 3 measures and alpha = (s, t)")
    s, t = req.alpha
    return _search(
        req.measures,
        levels=[s],
        targets=[s, t],
        tolerance=req.tolerance,
        seed=req.seed,
        budget=req.budget,
        threads=req.threads,
    )


def explore_3fan_2measures(req: SolveRequest) -> SolveResult:
    if len(req.measures) != 2 or len(req.alpha) != 3:
        raise ValueError("need 2 measures and alpha = (a1, a2, a3)")
    a1, a2, a3 = req.alpha
    result = _search(
        req.measures,
        levels=[a1, a1 + a2],
        targets=[a1, a2, a3],
        tolerance=req.tolerance,
        seed=req.seed,
        budget=req.budget,
        threads=req.threads,
    )
    result.exploratory = True
    return result
