"""Quantitative thin-quadrilateral and detour-length certification in H^2.

Two families of facts about a delta-hyperbolic plane are made executable
here.  First, for points x, y with projections x1, y1 on a geodesic, the
shape of the quadrilateral (x, x1, y1, y) obeys a clean dichotomy governed
by the minimum gap between the segments [x, y] and [x1, y1]: either the
segments come 2*delta-close and d(x, y) is at least the sum of the
clearances minus 4*delta, or they stay apart and d(x, y) is at most that
sum plus 4*delta -- with matching bounds 8*delta / d - Kx - Ky + 12*delta
on the projected distance d(x1, y1).  Second, a rectifiable path that
avoids the K-neighborhood of a geodesic must be exponentially long in the
distance between its endpoints; `path_lower_bound` evaluates the bound in
each of its regimes and the Monte-Carlo harnesses `quadrilateral_check`
and `detour_verify` re-measure every constant on randomly generated
configurations and assert the inequalities outright.

All sampling is seeded and deterministic.  delta = 1 is a valid thinness
constant for H^2, and every verified inequality is monotone in delta, so
the default is sound.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .geometry import (
    DEFAULT_DELTA,
    Geodesic,
    HPoint,
    INF,
    Segment,
    dist_to_segment,
    distance,
    fermi_point,
    geodesic_metrics,
    minimize_convex,
)

REGIMES = ("near", "far", "close", "general")


class SamplerError(RuntimeError):
    """The random path sampler exhausted its retry budget."""


class PathBound(NamedTuple):
    """A lower bound on the length of a path avoiding N_K(geodesic).

    `bound` is the main bound for the regime; negative formula values are
    clamped to zero (a length bound below zero is vacuous).  For the far
    regime the chain decomposition is exposed as well: there are at least
    `n` chain points, the path is at least `chain_bound` long, and the
    endpoint distance is capped by `diameter_cap` = 18*n*delta + 2K + 2C.
    """

    regime: str
    bound: float
    n: Optional[int] = None
    chain_bound: Optional[float] = None
    diameter_cap: Optional[float] = None


def _doubling(exponent, delta):
    return max(0.0, (2.0 ** exponent - 2.0) * delta)


def path_lower_bound(d=0.0, K=0.0, C=0.0, delta=DEFAULT_DELTA,
                     Kx=0.0, Ky=0.0, regime="near"):
    """Lower bound for the length of a path staying >= K away from a
    geodesic, by regime:

    - "near":    endpoints within K + C of the geodesic and d <= 2K + 6*delta;
                 bound (2^(d/(2 delta) - C'/delta - 5) - 2) delta, C' = max(C, delta).
    - "far":     endpoints within K + C and d > 2K + 6*delta; closed form
                 (1/18)(d - 2K - 2C - 18 delta)(2^(K/delta - 3) - 2) plus the
                 chain pair (n, (n-1)(2^(K/delta - 3) - 2) delta).
    - "close":   the segment [x, y] comes 2*delta-close to the projected
                 segment; bound (2^(K/delta - 3) - 2) delta.
    - "general": the segment [x, y] stays 2*delta-far from the projected
                 segment; bound (2^((d - Kx - Ky + 2K)/(2 delta) - 5) - 2) delta.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    for name, value in (("d", d), ("K", K), ("C", C), ("Kx", Kx), ("Ky", Ky)):
        if value < 0:
            raise ValueError(f"{name} must be nonnegative")
    if regime == "near":
        c_prime = max(C, delta)
        return PathBound(regime, _doubling(
            d / (2.0 * delta) - c_prime / delta - 5.0, delta))
    if regime == "close":
        return PathBound(regime, _doubling(K / delta - 3.0, delta))
    if regime == "general":
        return PathBound(regime, _doubling(
            (d - Kx - Ky + 2.0 * K) / (2.0 * delta) - 5.0, delta))
    if regime == "far":
        piece = max(0.0, 2.0 ** (K / delta - 3.0) - 2.0)
        n = max(2, math.ceil((d - 2.0 * K - 2.0 * C) / (18.0 * delta)))
        closed = max(0.0, d - 2.0 * K - 2.0 * C - 18.0 * delta) * piece / 18.0
        return PathBound(regime, closed, n=n,
                         chain_bound=(n - 1) * piece * delta,
                         diameter_cap=18.0 * n * delta + 2.0 * K + 2.0 * C)
    raise ValueError(f"unknown regime: {regime!r}")


def segment_gap(seg_a, seg_b):
    """Minimum distance between two geodesic segments.

    The distance to a segment is convex along a geodesic, so a convex
    line search along either segment is exact.
    """
    if seg_a.length < 1e-12:
        return dist_to_segment(seg_a.p, seg_b)
    _, gap = minimize_convex(
        lambda s: dist_to_segment(seg_a.point_at(s), seg_b),
        0.0, seg_a.length)
    return gap


@dataclass
class TrialReport:
    """Outcome of a seeded Monte-Carlo verification run."""

    trials: int = 0
    records: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    branches: dict = field(default_factory=dict)

    @property
    def passed(self):
        return not self.violations

    def tally(self, record, ok):
        self.trials += 1
        self.records.append(record)
        branch = record.get("branch") or record.get("regime")
        if branch is not None:
            self.branches[branch] = self.branches.get(branch, 0) + 1
        if not ok:
            self.violations.append(record)

    def aggregate(self):
        return {
            "trials": self.trials,
            "violations": len(self.violations),
            "branches": dict(sorted(self.branches.items())),
        }


def check_quadrilateral(x, y, line, delta=DEFAULT_DELTA, tol=1e-7):
    """Verify the quadrilateral dichotomies for one configuration.

    Returns a record dict; record["ok"] is False when any asserted
    inequality fails.  Both dichotomies classify on the same quantity:
    the minimum gap between [x, y] and the projected segment [x1, y1].
    """
    mx = geodesic_metrics(x, line)
    my = geodesic_metrics(y, line)
    k_x, k_y = mx.dist, my.dist
    d = distance(x, y)
    d1 = distance(mx.foot, my.foot)
    gap = segment_gap(Segment(x, y), Segment(mx.foot, my.foot))

    failures = []
    if gap <= 2.0 * delta:
        branch = "close"
        if not d >= k_x + k_y - 4.0 * delta - tol:
            failures.append("d >= Kx + Ky - 4*delta")
        if not d1 <= d - k_x - k_y + 12.0 * delta + tol:
            failures.append("d1 <= d - Kx - Ky + 12*delta")
    else:
        branch = "apart"
        if not d <= k_x + k_y + 4.0 * delta + tol:
            failures.append("d <= Kx + Ky + 4*delta")
        if not d1 <= 8.0 * delta + tol:
            failures.append("d1 <= 8*delta")
    if not d1 <= d + 12.0 * delta + tol:
        failures.append("d1 <= d + 12*delta")
    if d <= k_x + k_y + 6.0 * delta and not d1 <= 18.0 * delta + tol:
        failures.append("d1 <= 18*delta")

    return {
        "branch": branch, "d": d, "d1": d1, "Kx": k_x, "Ky": k_y,
        "gap": gap, "failed": failures, "ok": not failures,
    }


def _random_line(rng):
    if rng.random() < 0.15:
        return Geodesic(INF, float(rng.normal(scale=2.0)))
    while True:
        a, b = rng.normal(scale=2.0, size=2)
        if abs(a - b) > 0.2:
            return Geodesic(float(a), float(b))


def _random_point(rng, line):
    if rng.random() < 0.1:
        return line.point_at(float(rng.normal(scale=3.0)))
    return HPoint(float(rng.normal(scale=2.5)),
                  math.exp(float(rng.normal(scale=1.2))))


def quadrilateral_check(trials, delta=DEFAULT_DELTA, seed=0, tol=1e-7):
    """Monte-Carlo the quadrilateral dichotomies on random (x, y, line)
    configurations in H^2.  Every trial asserts the branch inequalities
    plus the unconditional d1 <= d + 12*delta and, when
    d <= Kx + Ky + 6*delta, d1 <= 18*delta."""
    rng = np.random.default_rng(seed)
    report = TrialReport()
    for _ in range(trials):
        line = _random_line(rng)
        record = check_quadrilateral(
            _random_point(rng, line), _random_point(rng, line),
            line, delta=delta, tol=tol)
        report.tally(record, record["ok"])
    return report


def _segment_clearance(p, q):
    """Minimum distance from the segment [p, q] to the vertical axis.

    Closed form: along the circular arc (center m, radius R on the real
    axis) the clearance satisfies sinh(c) = (m/R + cos(theta))/sin(theta),
    which is stationary only at cos(theta) = -R/m, where it equals
    sqrt((m/R)^2 - 1).
    """
    zp, zq = p.z.real, q.z.real
    tp, tq = p.t, q.t
    if zp == 0.0 and zq == 0.0:
        return 0.0
    if zp * zq <= 0.0:
        return 0.0  # the chord meets the axis
    if zp < 0.0:    # mirror to the z > 0 side
        zp, zq = -zp, -zq
    if abs(zp - zq) <= 1e-14 * (tp + tq):
        return math.asinh(0.5 * (zp + zq) / max(tp, tq))
    m = (zq * zq + tq * tq - zp * zp - tp * tp) / (2.0 * (zq - zp))
    radius = math.hypot(zp - m, tp)
    lo, hi = sorted((math.atan2(tp, zp - m), math.atan2(tq, zq - m)))
    k = m / radius
    if k <= 1.0:
        # the full circle reaches the axis; if the crossing angle lies
        # inside the arc the segment touches it
        crossing = math.acos(max(-1.0, min(1.0, -k)))
        if lo - 1e-15 <= crossing <= hi + 1e-15:
            return 0.0
        candidates = []
    else:
        stationary = math.acos(-1.0 / k)
        candidates = [math.sqrt(k * k - 1.0)] if lo <= stationary <= hi else []
    candidates += [(k + math.cos(th)) / math.sin(th) for th in (lo, hi)]
    return math.asinh(min(candidates))


class DetourMeasurement(NamedTuple):
    """Re-measured constants of a piecewise-geodesic path near the
    vertical axis, with the applicable length bound."""

    d: float
    length: float
    clearance: float        # measured min distance to the axis over the path
    excess: float           # max endpoint clearance minus the min clearance
    k_x: float
    k_y: float
    bound: PathBound
    satisfied: bool


def measure_detour(vertices, delta=DEFAULT_DELTA, tol=1e-7):
    """Measure a piecewise-geodesic path against the vertical axis and
    test the length bound of the applicable regime.

    The constants are re-measured on the path itself -- clearance K is the
    actual minimum distance to the axis, C the actual endpoint excess --
    so the bound's hypotheses hold by construction and the inequality must
    hold outright.
    """
    if len(vertices) < 2:
        raise ValueError("a path needs at least two vertices")
    k_x = math.asinh(abs(vertices[0].z) / vertices[0].t)
    k_y = math.asinh(abs(vertices[-1].z) / vertices[-1].t)
    clearance = min(_segment_clearance(p, q)
                    for p, q in zip(vertices, vertices[1:]))
    excess = max(k_x, k_y) - clearance
    d = distance(vertices[0], vertices[-1])
    length = sum(distance(p, q) for p, q in zip(vertices, vertices[1:]))
    regime = "near" if d <= 2.0 * clearance + 6.0 * delta else "far"
    bound = path_lower_bound(d=d, K=clearance, C=max(excess, 1e-12),
                             delta=delta, regime=regime)
    ok = length >= bound.bound - tol
    if regime == "far":
        ok = ok and length >= bound.chain_bound - tol
        ok = ok and d <= bound.diameter_cap + tol
    return DetourMeasurement(d, length, clearance, excess, k_x, k_y,
                             bound, ok)


def _chord_limit(rho, clearance):
    """Largest Fermi-coordinate gap between two vertices at clearance rho
    whose connecting geodesic still clears `clearance`: from the symmetric
    chord, sinh(min) = 1/sqrt(m^2 - 1) with m = cosh(gap/2) coth(rho)."""
    ratio = math.tanh(rho) / math.tanh(clearance)
    if ratio <= 1.0:
        return 0.0
    return 2.0 * math.acosh(ratio)


def _sample_detour_path(rng, K, C, delta, far):
    """Vertices of a jittered hypercycle path at clearance >= K on one side
    of the vertical axis, endpoints within K + C of it.

    Far-regime paths ride the top of the clearance band (larger chords
    survive the dip toward the axis there) and stop just past the endpoint
    separation that makes the closed-form bound nontrivial."""
    side = 1.0 if rng.random() < 0.5 else -1.0
    lo = K + 0.05 * min(1.0, C) + (0.6 * C if far else 0.0)
    hi = K + C
    # nontrivial closed form needs d > 2 max(Kx, Ky) + 18 delta
    far_target = 2.0 * hi + 18.0 * delta + float(rng.uniform(1.0, 4.0))
    step_lo, step_hi = (0.55, 0.95) if far else (0.25, 0.8)
    segments = int(rng.integers(2, 9))
    rho = float(rng.uniform(lo, hi))
    u = 0.0
    vertices = [fermi_point(u, rho, side)]
    while True:
        next_rho = float(rng.uniform(lo, hi))
        limit = _chord_limit(min(rho, next_rho), K)
        u += float(rng.uniform(step_lo, step_hi)) * limit
        rho = next_rho
        vertices.append(fermi_point(u, rho, side))
        if far:
            if distance(vertices[0], vertices[-1]) > far_target:
                break
            if len(vertices) > 6000:
                raise SamplerError("far-regime path failed to spread")
        elif len(vertices) > segments:
            break
    return vertices


def detour_verify(trials, K=None, C=None, delta=DEFAULT_DELTA, seed=0,
                  far_fraction=0.08, max_retries=60, tol=1e-7):
    """Monte-Carlo the path-length bounds: sample random paths avoiding
    the K-neighborhood of the vertical axis (endpoints within K + C),
    re-measure every constant, and assert the regime bound.  K defaults
    to a fresh draw from {1, ..., 5} per trial and C to a draw from
    [0.3, 2].  Far-regime trials (nontrivial only for K/delta > 4) are
    forced for a fraction of the runs."""
    rng = np.random.default_rng(seed)
    report = TrialReport()
    for _ in range(trials):
        k_target = float(rng.integers(1, 6)) if K is None else float(K)
        c_target = float(rng.uniform(0.3, 2.0)) if C is None else float(C)
        far = rng.random() < far_fraction
        if far and K is None:
            k_target = 5.0  # the only draw with a nontrivial far bound
        if far and C is None:
            c_target = float(rng.uniform(1.2, 2.0))
        for attempt in range(max_retries):
            vertices = _sample_detour_path(rng, k_target, c_target, delta, far)
            m = measure_detour(vertices, delta=delta, tol=tol)
            if m.clearance >= k_target:
                break
        else:
            raise SamplerError(
                f"no valid path at K={k_target} after {max_retries} tries")
        record = {
            "regime": m.bound.regime, "K": k_target, "C": c_target,
            "clearance": m.clearance, "excess": m.excess, "d": m.d,
            "length": m.length, "bound": m.bound.bound,
            "chain_bound": m.bound.chain_bound, "n": m.bound.n,
            "segments": len(vertices) - 1, "ok": m.satisfied,
        }
        report.tally(record, m.satisfied)
    return report
