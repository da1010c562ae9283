"""Spherical measures as weighted point clouds, k-fans, and sector masses.

A "proper" measure (no mass on great-circle arcs) is emulated by a finite
cloud with optional azimuthal smoothing: each point mass is spread uniformly
over an arc of half-width delta in azimuth around whichever axis is being
used.  This keeps azimuthal CDFs continuous so quantile inversion is
well-posed.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_SMOOTHING = 1e-4
POLE_TOL = 1e-9
TWO_PI = 2.0 * math.pi


class PoleCollisionError(ValueError):
    """A data point sits (anti)parallel to the fan axis."""


@dataclass(frozen=True)
class MeasureCloud:
    points: np.ndarray  # (N, 3) unit vectors
    weights: np.ndarray  # (N,) positive, summing to 1
    smoothing: float = DEFAULT_SMOOTHING

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or len(w) != len(pts):
            raise ValueError("points must be (N,3) with matching weights")
        if not (np.isfinite(pts).all() and np.isfinite(w).all()):
            raise ValueError("non-finite data in measure cloud")
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
        norms = np.linalg.norm(pts, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValueError("points must be unit vectors")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        if self.smoothing < 0:
            raise ValueError("smoothing must be nonnegative")
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def max_weight(self) -> float:
        return float(self.weights.max())

    def rotated(self, rot: np.ndarray) -> "MeasureCloud":
        return MeasureCloud(self.points @ np.asarray(rot).T, self.weights, self.smoothing)


def load_measure(path, smoothing: float = DEFAULT_SMOOTHING) -> MeasureCloud:
    """Read {"points": [[x,y,z],...], "weights": [w,...]} and normalize."""
    with open(path) as fh:
        data = json.load(fh)
    return measure_from_dict(data, smoothing)


def measure_from_dict(data, smoothing: float = DEFAULT_SMOOTHING) -> MeasureCloud:
    pts = np.asarray(data["points"], dtype=float)
    w = np.asarray(data["weights"], dtype=float)
    if not (np.isfinite(pts).all() and np.isfinite(w).all()):
        raise ValueError("non-finite values in measure data")
    norms = np.linalg.norm(pts, axis=1)
    if np.any(norms == 0):
        raise ValueError("zero vector in measure data")
    pts = pts / norms[:, None]
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    w = w / w.sum()
    return MeasureCloud(pts, w, smoothing)


def orthonormal_frame(center: np.ndarray, reference=None) -> np.ndarray:
    """Unit tangent at center: reference projected to the tangent plane."""
    c = np.asarray(center, dtype=float)
    c = c / np.linalg.norm(c)
    if reference is None:
        reference = (
            np.array([1.0, 0.0, 0.0])
            if abs(c[0]) < 0.9
            else np.array([0.0, 1.0, 0.0])
        )
    r = np.asarray(reference, dtype=float)
    t = r - np.dot(r, c) * c
    nt = np.linalg.norm(t)
    if nt < 1e-12:
        raise ValueError("reference direction is parallel to the center")
    return t / nt


@dataclass(frozen=True)
class Fan:
    """k rays from a common center, enumerated counter-clockwise.

    Sector i is the azimuth interval [azimuths[i], azimuths[i+1]) with
    circular wraparound.
    """

    center: np.ndarray
    frame: np.ndarray
    azimuths: tuple[float, ...]

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        f = np.asarray(self.frame, dtype=float)
        if abs(np.linalg.norm(c) - 1.0) > 1e-9 or abs(np.linalg.norm(f) - 1.0) > 1e-9:
            raise ValueError("center and frame must be unit vectors")
        if abs(np.dot(c, f)) > 1e-9:
            raise ValueError("frame must be tangent to the center")
        az = tuple(a % TWO_PI for a in self.azimuths)
        if len(az) < 1 or any(b <= a for a, b in zip(az, az[1:])):
            raise ValueError("azimuths must be strictly increasing in [0, 2pi)")
        c.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "frame", f)
        object.__setattr__(self, "azimuths", az)

    @property
    def k(self) -> int:
        return len(self.azimuths)

    def rotated(self, rot: np.ndarray) -> "Fan":
        rot = np.asarray(rot)
        return Fan(rot @ self.center, rot @ self.frame, self.azimuths)


def azimuth(center, frame, point) -> float:
    """Counter-clockwise azimuth of point around center, from frame."""
    vals = azimuths_of(center, frame, np.asarray(point, dtype=float)[None, :])
    return float(vals[0])


def azimuths_of(center, frame, points: np.ndarray) -> np.ndarray:
    c = np.asarray(center, dtype=float)
    e1 = np.asarray(frame, dtype=float)
    e2 = np.cross(c, e1)
    pts = np.asarray(points, dtype=float)
    x = pts @ e1
    y = pts @ e2
    r = np.hypot(x, y)
    if np.any(r < POLE_TOL):
        raise PoleCollisionError("a point lies on the fan axis")
    return np.arctan2(y, x) % TWO_PI


def _interval_mass(rel: np.ndarray, weights: np.ndarray, t: float, delta: float) -> float:
    """Smoothed mass of the azimuth interval [0, t), 0 <= t <= 2*pi.

    Each point at relative azimuth a carries an arc [a-delta, a+delta].
    """
    if t <= 0:
        return 0.0
    if t >= TWO_PI:
        return float(weights.sum())
    if delta == 0:
        return float(weights[rel < t].sum())
    lo = rel - delta
    hi = rel + delta
    # overlap of [lo, hi] with [0, t) on the circle: unroll into three shifts
    total = np.zeros_like(rel)
    for shift in (-TWO_PI, 0.0, TWO_PI):
        a = np.maximum(lo + shift, 0.0)
        b = np.minimum(hi + shift, t)
        total += np.maximum(b - a, 0.0)
    return float(np.dot(weights, total) / (2.0 * delta))


class AzimuthProfile:
    """Azimuthal mass distribution of one cloud around a fixed axis.

    Supports O(log N) smoothed CDF evaluation and quantile inversion via
    prefix sums over the sorted (and wrap-extended) azimuths.  Semantics
    agree exactly with sector_masses/_interval_mass.
    """

    def __init__(self, cloud: MeasureCloud, center, frame):
        az = azimuths_of(center, frame, cloud.points)
        order = np.argsort(az, kind="stable")
        a = az[order]
        w = cloud.weights[order]
        self.delta = cloud.smoothing
        self.total = float(w.sum())
        # arcs from the neighbouring periods can overlap [0, 2*pi)
        self.e = np.concatenate([a - TWO_PI, a, a + TWO_PI])
        ew = np.concatenate([w, w, w])
        self.cw = np.concatenate([[0.0], np.cumsum(ew)])
        self.cwa = np.concatenate([[0.0], np.cumsum(ew * self.e)])
        if self.delta > 0:
            # the CDF is piecewise linear with breakpoints at the arc ends;
            # tabulating it there makes cdf/quantile pure interpolation
            raw = np.concatenate([self.e - self.delta, self.e + self.delta])
            bp = np.unique(np.clip(raw, 0.0, TWO_PI))
            bp = np.union1d(bp, [0.0, TWO_PI])
            c0 = self._halfline(np.array([0.0]))[0]
            self.bp = bp
            self.cv = self._halfline(bp) - c0

    def _halfline(self, x: np.ndarray) -> np.ndarray:
        """Sum of w * clip(x + delta - e, 0, 2*delta) / (2*delta)."""
        d = self.delta
        i1 = np.searchsorted(self.e, x - d, side="right")
        i2 = np.searchsorted(self.e, x + d, side="left")
        full = self.cw[i1]
        part = (x + d) * (self.cw[i2] - self.cw[i1]) - (self.cwa[i2] - self.cwa[i1])
        return full + part / (2.0 * d)

    def cdf(self, x: float) -> float:
        """Smoothed mass of the azimuth interval [0, x), x in [0, 4*pi)."""
        extra = 0.0
        while x >= TWO_PI:
            extra += self.total
            x -= TWO_PI
        if x <= 0:
            return extra
        if self.delta == 0:
            n = len(self.e) // 3
            i = np.searchsorted(self.e, x, side="left")
            return extra + float(self.cw[i] - self.cw[n])
        return extra + float(np.interp(x, self.bp, self.cv))

    def interval_mass(self, lo: float, hi: float) -> float:
        """Mass of the azimuth interval [lo, hi), 0 <= hi - lo <= 2*pi."""
        return self.cdf(hi) - self.cdf(lo)

    def quantile_from(self, phi: float, level: float) -> float:
        """Smallest t with mass of [phi, phi + t) >= level."""
        phi = phi % TWO_PI
        base = self.cdf(phi)
        if self.delta == 0:
            lo, hi = 0.0, TWO_PI
            for _ in range(52):
                mid = 0.5 * (lo + hi)
                if self.cdf(phi + mid) - base >= level:
                    hi = mid
                else:
                    lo = mid
            return hi
        y = base + level
        wrap = 0.0
        if y >= self.cv[-1]:
            y -= self.cv[-1]
            wrap = TWO_PI
        i = int(np.searchsorted(self.cv, y, side="left"))
        if i == 0:
            x = self.bp[0]
        else:
            c0, c1 = self.cv[i - 1], self.cv[i]
            b0, b1 = self.bp[i - 1], self.bp[i]
            x = b0 if c1 == c0 else b0 + (y - c0) / (c1 - c0) * (b1 - b0)
        return x + wrap - phi


def sector_masses(fan: Fan, measures) -> np.ndarray:
    """Per-measure, per-sector masses; rows are measures, columns sectors."""
    k = fan.k
    out = np.zeros((len(measures), k))
    for j, mu in enumerate(measures):
        rel = (azimuths_of(fan.center, fan.frame, mu.points) - fan.azimuths[0]) % TWO_PI
        cuts = [(a - fan.azimuths[0]) % TWO_PI for a in fan.azimuths]
        cuts[0] = 0.0
        cum = [_interval_mass(rel, mu.weights, t, mu.smoothing) for t in cuts] + [
            float(mu.weights.sum())
        ]
        for i in range(k):
            out[j, i] = cum[i + 1] - cum[i]
    return out


def _quantile(rel: np.ndarray, weights: np.ndarray, level: float, delta: float) -> float:
    """Smallest t with smoothed mass of [0, t) >= level, by bisection."""
    lo, hi = 0.0, TWO_PI
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _interval_mass(rel, weights, mid, delta) >= level:
            hi = mid
        else:
            lo = mid
    return hi


def equipartition_fan(center, first_azimuth: float, mu1: MeasureCloud, n: int) -> Fan:
    """The n-fan at this center whose sectors each carry mu1-mass 1/n."""
    return quantile_fan(center, first_azimuth, mu1, [i / n for i in range(1, n)])


def quantile_fan(center, first_azimuth: float, mu1: MeasureCloud, levels) -> Fan:
    """Fan with first ray at first_azimuth and further rays at mu1-quantiles.

    levels are cumulative masses (strictly increasing, in (0,1)) measured
    from the first ray.
    """
    frame = orthonormal_frame(center)
    rel = (azimuths_of(center, frame, mu1.points) - first_azimuth) % TWO_PI
    azs = [first_azimuth % TWO_PI]
    for lev in levels:
        azs.append((first_azimuth + _quantile(rel, mu1.weights, lev, mu1.smoothing)) % TWO_PI)
    order = sorted(range(len(azs)), key=lambda i: azs[i])
    sorted_azs = [azs[i] for i in order]
    for a, b in zip(sorted_azs, sorted_azs[1:]):
        if b - a < 1e-12:
            raise ValueError("degenerate quantile fan: coincident rays")
    fan = Fan(np.asarray(center, dtype=float), frame, tuple(sorted_azs))
    # remember which sector starts at the first ray
    object.__setattr__(fan, "_first_ray_index", order.index(0))
    return fan


def first_ray_index(fan: Fan) -> int:
    return getattr(fan, "_first_ray_index", 0)


def test_map_F(center, first_azimuth: float, measures, n: int) -> np.ndarray:
    """Rows j-1 = (mu_j(sector_i) - 1/n)_i over the mu_1-equipartition fan."""
    fan = equipartition_fan(center, first_azimuth, measures[0], n)
    masses = sector_masses(fan, measures[1:])
    start = first_ray_index(fan)
    masses = np.roll(masses, -start, axis=1)
    return masses - 1.0 / n
