"""Representation scanners over the primitive classes of the free group.

Everything here evaluates a representation of F2 = <a, b> into the
isometries of H^2 or H^3 against quantitative stability certificates:

- `orbit_polyline` / `ExcursionProfile`: the orbit of the basepoint along
  the leaf of a primitive word, and its distance profile to the word's
  axis, with the discrete sub-excursion queries.
- `find_quasi_loops`: cyclic subwords with displacement at most eps times
  their length, plus greedy disjoint coverage and the contradiction test
  against a displacement-ratio constant.
- `bowditch_scan`: per-class traces, translation lengths and
  translation-per-letter ratios, fitted displacement constants, and the
  trace cross-check data (Fricke recursion over the Farey tree).
- `ps_scan`: per-class quasi-isometry constants of the orbit map, tubular
  radii, and the projection-order (feet monotonicity) check.
- `local_global_scan`: local vs global quasi-geodesic constants over
  words of the shape (B A^N A^*)^*.
- `perturbation_scan`: robustness of the minimum ratio under entrywise
  noise.

Class matrices are computed by the block-tower recursion with fast matrix
powers (O(depth * log n_i) products per class) rather than letter-by-letter
products.
"""

import math
from dataclasses import dataclass

import numpy as np

from .blocks import enumerate_primitive_classes
from .geometry import (
    INF,
    HPoint,
    NotLoxodromic,
    Representation,
    Segment,
    apply,
    axis_of,
    classify,
    dist_to_geodesic,
    fixed_points,
    geodesic_metrics,
    mobius_boundary,
    translation_length,
    _apply_scaled,
    _renorm_scaled,
)
from .words import is_cyclically_reduced, is_reduced, rotate

__all__ = [
    "ExcursionProfile", "OrbitPolyline", "PreconditionError", "QuasiLoop",
    "QuasiLoopReport", "ScanReport", "bowditch_scan", "class_matrix",
    "excursion_profile", "find_quasi_loops", "fricke_traces",
    "local_global_scan", "orbit_polyline", "perturbation_scan", "ps_scan",
]


class PreconditionError(ValueError):
    """A scan's geometric precondition fails for the given representation."""


def class_matrix(rep, tower):
    """The image of the tower's top word, via the block recursion
    w_i = w_{i-1}^(n_i - 1) w'_{i-1},  w'_i = w_{i-1} w_i.

    The factors are exactly unimodular, so no determinant-based
    renormalization is applied: once entries are large, the floating
    determinant is cancellation noise, while the plain product keeps
    full relative precision over the O(depth + log n_i) multiplies.
    """
    w = rep.word_image(tower.w[0])
    wp = rep.word_image(tower.wp[0])
    for n in tower.cf:
        w_next = np.linalg.matrix_power(w, n - 1) @ wp
        wp = w @ w_next
        w = w_next
    return w


class OrbitPolyline:
    """The orbit of the basepoint along gamma^span: vertex k is
    rho(prefix of length k) applied to the basepoint, and parameters
    between integers interpolate along the connecting geodesic."""

    __slots__ = ("word", "span", "vertices", "cprime", "_segments")

    def __init__(self, word, span, vertices, cprime):
        self.word = word
        self.span = span
        self.vertices = vertices
        self.cprime = cprime
        self._segments = [None] * (len(vertices) - 1)

    @property
    def u_max(self):
        return float(len(self.vertices) - 1)

    def _segment(self, i):
        seg = self._segments[i]
        if seg is None:
            seg = self._segments[i] = Segment(self.vertices[i],
                                              self.vertices[i + 1])
        return seg

    def point_at(self, u):
        """The point at leaf parameter u in [0, u_max]."""
        u = min(max(u, 0.0), self.u_max)
        i = min(int(u), len(self.vertices) - 2)
        frac = u - i
        if frac == 0.0:
            return self.vertices[i]
        return self._segment(i).interpolate(frac)


def orbit_polyline(rep, gamma, span):
    """Build the orbit polyline of gamma^span from incremental products.

    The prefix products are accumulated with max-entry renormalization
    and the true |det| carried in log form: the letter images are
    unimodular, so dividing by a float determinant would inject pure
    cancellation noise once the entries are large."""
    if not gamma or not is_reduced(gamma) or not is_cyclically_reduced(gamma):
        raise ValueError("gamma must be a nonempty cyclically reduced word")
    if span < 1:
        raise ValueError("span must be >= 1")
    o = rep.basepoint
    log_t0 = math.log(o.t)
    vertices = [o]
    m, log_det = None, 0.0
    for _ in range(span):
        for letter in gamma:
            image = rep.gen_image(letter)
            if m is None:
                m, log_det = image, 0.0
            else:
                m, log_det = _renorm_scaled(m @ image, log_det)
            z, log_t = _apply_scaled(m, log_det, o.z, log_t0)
            t = math.exp(log_t)
            if t == 0.0 or not math.isfinite(t):
                raise ValueError(
                    f"orbit point at depth {len(vertices)} exceeds "
                    "floating-point range")
            vertices.append(HPoint(z, t))
    return OrbitPolyline(gamma, span, tuple(vertices), rep.c_prime)


def _letter_images(rep, letters):
    """Stacked (n, 2, 2) array of the generator images along a word."""
    table = {ch: rep.gen_image(ch) for ch in set(letters)}
    return np.stack([table[ch] for ch in letters])


def _plain_word_image(rep, w):
    """Image of a word as a plain product, without determinant-based
    renormalization (which misfires once entries are large: the float
    determinant of a big-entry matrix is cancellation noise).  The
    result is exactly unimodular analytically, with relative entry
    error ~ |w| eps."""
    out = np.eye(2, dtype=complex)
    for ch in w:
        out = out @ rep.gen_image(ch)
    return out


def _displacements(W, o):
    """d(W[i] o, o) for a stacked array of exactly-unimodular matrices.

    The action formula is applied with the determinant taken as 1: the
    inputs are products of unimodular letters, and recomputing ad - bc
    in floats is cancellation noise once the entries are large.
    """
    a, b = W[..., 0, 0], W[..., 0, 1]
    c, d = W[..., 1, 0], W[..., 1, 1]
    t2 = o.t * o.t
    w = c * o.z + d
    den = np.abs(w) ** 2 + np.abs(c) ** 2 * t2
    z = ((a * o.z + b) * np.conj(w) + a * np.conj(c) * t2) / den
    t = o.t / den
    # Work with ln of the chordal term: at distances beyond ~350 the
    # squared coordinate differences overflow a float even though the
    # distance itself is perfectly representable.
    hyp = np.hypot(np.abs(z - o.z), t - o.t)
    with np.errstate(divide="ignore"):
        ln_x = 2.0 * np.log(hyp) - math.log(2.0 * o.t) - np.log(t)
    out = np.empty_like(ln_x)
    small = ln_x <= 34.0
    out[small] = np.arccosh(1.0 + np.exp(ln_x[small]))
    out[~small] = ln_x[~small] + math.log(2.0)
    return out


def _pair_distances_by_offset(rep, letters, kmax):
    """Distances between orbit-polyline vertices, re-anchored for
    precision: entry k-1 is the array d(v_m, v_{m+k}) for m = 0..n-k.

    d(v_m, v_{m+k}) equals the basepoint displacement of the subword
    letters[m:m+k], so each value is computed from a fresh k-letter
    product instead of coordinates accumulated from a single frame
    (whose pair differences lose all precision at depth ~ 35).
    """
    n = len(letters)
    kmax = min(kmax, n)
    mats = _letter_images(rep, letters)
    W = np.broadcast_to(np.eye(2, dtype=complex), (n, 2, 2)).copy()
    out = []
    for k in range(1, kmax + 1):
        W = W[: n - k + 1] @ mats[k - 1:]
        out.append(_displacements(W, rep.basepoint))
    return out


class ExcursionProfile:
    """The distance E(u) from the orbit polyline to the axis line of
    gamma, sampled uniformly over one period.

    E is periodic with period len(gamma) and Lipschitz with constant
    C' (the polyline moves at most C' per unit parameter, and distance
    to a fixed set is 1-Lipschitz).  The discrete sub-excursion queries
    tolerate one grid step of slack.
    """

    __slots__ = ("gamma", "period", "step", "us", "values", "polyline",
                 "line", "cprime")

    def __init__(self, gamma, period, step, us, values, polyline, line,
                 cprime):
        self.gamma = gamma
        self.period = period
        self.step = step
        self.us = us
        self.values = values
        self.polyline = polyline
        self.line = line
        self.cprime = cprime

    def value(self, u):
        """E at an arbitrary parameter (within the sampled span)."""
        return dist_to_geodesic(self.polyline.point_at(u), self.line)

    @property
    def min_excursion(self):
        return float(self.values.min())

    @property
    def max_excursion(self):
        return float(self.values.max())

    def _circular(self):
        """Samples over [0, period), rolled so a global minimum leads:
        then no run at a threshold above the minimum wraps around."""
        vals = self.values[:-1]
        shift = int(np.argmin(vals))
        return np.roll(vals, -shift), shift

    def _runs(self, vals, threshold):
        """Half-open sample-index runs where vals >= threshold."""
        if vals[0] >= threshold:
            return [(0, len(vals))]
        runs, start = [], None
        for i, v in enumerate(vals):
            if v >= threshold:
                if start is None:
                    start = i
            elif start is not None:
                runs.append((start, i))
                start = None
        if start is not None:
            runs.append((start, len(vals)))
        return runs

    def _run_span(self, start, end, n):
        """Inner parameter length of a sample run; a run of all n
        circular samples is the whole period."""
        if end - start == n:
            return self.period
        return (end - start - 1) * self.step

    def sub_excursion(self, K):
        """The longest circular interval where E >= K, as
        (u_start, u_end, length); parameters are reported modulo the
        period.  Raises ValueError when K exceeds the profile maximum."""
        if K > self.max_excursion:
            raise ValueError("threshold exceeds the maximal excursion")
        vals, shift = self._circular()
        runs = self._runs(vals, K)
        start, end = max(runs, key=lambda r: r[1] - r[0])
        length = self._run_span(start, end, len(vals))
        u_start = ((start + shift) % len(vals)) * self.step
        return u_start, u_start + length, length

    def sub_excursion_in(self, a, slack=None):
        """A sub-excursion whose length lies in [a, 2a], up to one grid
        step of slack: returns (threshold, u_start, u_end, length) for
        the longest interval in the window, preferring lower thresholds.

        As the threshold rises, the longest run shrinks continuously and
        at most halves when it splits, so some threshold hits any
        window of multiplicative width two, for a up to half the longest
        excursion length.
        """
        if slack is None:
            slack = self.step + 1e-9
        lo, hi = a - slack, 2.0 * a + slack
        vals, shift = self._circular()
        best = None
        for threshold in sorted(set(vals.tolist())):
            for start, end in self._runs(vals, threshold):
                length = self._run_span(start, end, len(vals))
                if lo <= length <= hi and (best is None or length > best[3]):
                    u_start = ((start + shift) % len(vals)) * self.step
                    best = (threshold, u_start, u_start + length, length)
        if best is None:
            raise ValueError(
                f"no sub-excursion with length within one step of [{a}, {2*a}]")
        return best

    def periodicity_defect(self):
        """max |E(u + period) - E(u)| over the sampled parameters."""
        return max(abs(self.value(u + self.period) - v)
                   for u, v in zip(self.us, self.values))

    def lipschitz_defect(self):
        """max |E(u_{i+1}) - E(u_i)| - C' * step (negative when the
        Lipschitz bound holds on the grid)."""
        jumps = np.abs(np.diff(self.values))
        return float(jumps.max() - self.cprime * self.step)


def excursion_profile(rep, gamma, step=0.25):
    """Sample E(u) = d(polyline(u), axis line of gamma) over one period."""
    if not 0.0 < step <= 1.0:
        raise ValueError("step must be in (0, 1]")
    m = rep.word_image(gamma)
    if classify(m) != "loxodromic":
        raise NotLoxodromic(
            f"image of {gamma!r} is {classify(m)}", complex(np.trace(m)))
    line = axis_of(m, basepoint=rep.basepoint)
    polyline = orbit_polyline(rep, gamma, 3)
    period = len(gamma)
    count = max(1, math.ceil(period / step - 1e-9))
    us = np.linspace(0.0, float(period), count + 1)
    values = np.array([dist_to_geodesic(polyline.point_at(u), line)
                       for u in us])
    return ExcursionProfile(gamma, period, float(us[1] - us[0]), us, values,
                            polyline, line, rep.c_prime)


# ----------------------------------------------------------- quasi-loops

class QuasiLoop:
    """A cyclic subword whose displacement is at most eps times its
    length."""

    __slots__ = ("word", "position", "eps", "displacement")

    def __init__(self, word, position, eps, displacement):
        self.word = word
        self.position = position
        self.eps = eps
        self.displacement = displacement

    def __repr__(self):
        return (f"QuasiLoop({self.word!r}, position={self.position}, "
                f"eps={self.eps}, displacement={self.displacement:.6g})")


@dataclass
class QuasiLoopReport:
    loops: list
    packed: list
    coverage: float
    contradiction: dict | None


def find_quasi_loops(rep, gamma, eps, min_len=1, cap=10_000, C=None):
    """All cyclic subwords w of gamma with d(rho(w) o, o) <= eps |w|,
    searched over the O(|gamma|^2) windows, plus the fraction of gamma
    covered by a greedy disjoint packing of the loops found.

    When `C` is given and the coverage exceeds 1 - (1/C - eps) / C',
    the displacement-ratio contradiction is evaluated: the report then
    records whether d(rho(gamma) o, o) < |gamma| / C.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if min_len < 1:
        raise ValueError("min_len must be >= 1")
    n = len(gamma)
    if n == 0:
        raise ValueError("gamma must be nonempty")
    if n > cap:
        raise ValueError(f"|gamma| = {n} exceeds the cap {cap}")
    doubled = gamma + gamma
    mats = _letter_images(rep, doubled)
    W = np.broadcast_to(np.eye(2, dtype=complex), (n, 2, 2)).copy()
    loops = []
    for length in range(1, n + 1):
        W = W @ mats[length - 1: length - 1 + n]
        if length < min_len:
            continue
        disps = _displacements(W, rep.basepoint)
        for position in np.nonzero(disps <= eps * length)[0]:
            loops.append(QuasiLoop(doubled[position:position + length],
                                   int(position), eps,
                                   float(disps[position])))
    packed = []
    occupied = np.zeros(n, dtype=bool)
    for loop in sorted(loops, key=lambda l: (-len(l.word), l.position)):
        cells = [(loop.position + i) % n for i in range(len(loop.word))]
        if not occupied[cells].any():
            occupied[cells] = True
            packed.append(loop)
    coverage = float(occupied.sum()) / n
    contradiction = None
    if C is not None and rep.c_prime > 0:
        threshold = 1.0 - (1.0 / C - eps) / rep.c_prime
        if coverage > threshold:
            disp = rep.displacement(gamma)
            contradiction = {
                "coverage": coverage, "threshold": threshold,
                "displacement": disp, "bound": n / C,
                "confirmed": disp < n / C,
            }
    return QuasiLoopReport(loops, packed, coverage, contradiction)


# ----------------------------------------------------------------- scans

@dataclass
class ScanReport:
    """Per-class records (in slope order) and the aggregate summary."""

    records: list
    aggregate: dict

    @property
    def violations(self):
        return [r for r in self.records if r["flags"]]

    @property
    def passed(self):
        return not self.violations


def fricke_traces(tr_a, tr_b, tr_ab, max_denominator):
    """Traces of all primitive classes up to the cap from the trace triple
    (tr A, tr B, tr AB), via the trace recursion z' = xy - z down the
    Farey tree of slopes.  Independent of any matrix arithmetic."""
    out = {(1, 0): tr_a, (0, 1): tr_b}

    def descend(left, t_left, right, t_right, t_mediant):
        mediant = (left[0] + right[0], left[1] + right[1])
        if mediant[0] > max_denominator or mediant[1] > max_denominator:
            return
        out[mediant] = t_mediant
        descend(left, t_left, mediant, t_mediant,
                t_left * t_mediant - t_right)
        descend(mediant, t_mediant, right, t_right,
                t_mediant * t_right - t_left)

    descend((0, 1), tr_b, (1, 0), tr_a, tr_ab)
    return out


def bowditch_scan(rep, max_denominator, low_ratio=1e-3):
    """Scan all primitive classes up to the cap: trace, translation
    length, and the ratio translation/|class|; flag non-loxodromic and
    low-ratio classes; fit displacement constants from the worst ratio."""
    records = []
    for slope, tower in enumerate_primitive_classes(max_denominator):
        m = class_matrix(rep, tower)
        tr = complex(np.trace(m))
        kind = classify(m)
        tl = translation_length(m)
        length = len(tower.word)
        ratio = tl / length
        flags = []
        if kind != "loxodromic":
            flags.append(kind)
        elif ratio < low_ratio:
            flags.append("low-ratio")
        records.append({
            "p": slope.p, "q": slope.q, "len": length,
            "tr": [tr.real, tr.imag], "tl": tl, "ratio": ratio,
            "flags": flags,
        })
    min_ratio = min(r["ratio"] for r in records)
    commutator = complex(np.trace(rep.word_image("abAB")))
    lox = [r for r in records if not r["flags"]]
    lsq = None
    if len({r["len"] for r in lox}) >= 2:
        rate, intercept = np.polyfit([r["len"] for r in lox],
                                     [r["tl"] for r in lox], 1)
        lsq = [float(rate), float(intercept)]
    aggregate = {
        "classes": len(records),
        "min_ratio": min_ratio,
        "min_trace": min(math.hypot(*r["tr"]) for r in records),
        "fitted_C": 1.0 / min_ratio if min_ratio > 0 else None,
        "fitted_D": 0.0 if min_ratio > 0 else None,
        "lsq_rate": lsq[0] if lsq else None,
        "lsq_intercept": lsq[1] if lsq else None,
        "commutator_trace": [commutator.real, commutator.imag],
        "small_trace_count": sum(
            1 for r in records if math.hypot(*r["tr"]) <= 2.0 + 1e-12),
        "violations": sum(1 for r in records if r["flags"]),
    }
    return ScanReport(records, aggregate)


def _same_sign(values, tol=1e-9):
    return bool(all(v >= -tol for v in values)
                or all(v <= tol for v in values))


def ps_scan(rep, max_denominator, window=None, step=0.5, span=3):
    """Scan the orbit polylines of all primitive classes: fit the
    quasi-isometry constants of the orbit map on each leaf, measure the
    tubular radius around the class axis, and check the projection-order
    lemma at the largest block length above its threshold.

    The multiplicative rate 1/lambda is fitted as the worst
    distance-per-parameter over vertex pairs at least half a window
    apart; the additive constant is the worst defect of that rate over
    all pairs within the window.  Non-loxodromic classes are recorded as
    violations.

    Axis excursions and projection feet are measured one letter at a
    time in a frame conjugated back to the basepoint (the axis of the
    rotated word), which keeps every evaluation at unit scale; the
    profile value and the foot increments are conjugation-invariant, so
    this agrees with measuring along the deep orbit directly, without
    the precision loss of deep-orbit coordinates.
    """
    if span < 3:
        raise ValueError("span must be >= 3 (at least three periods)")
    if not 0.0 < step <= 1.0:
        raise ValueError("step must be in (0, 1]")
    records = []
    delta = rep.delta
    o = rep.basepoint
    fracs = np.arange(0.0, 1.0, step)
    for slope, tower in enumerate_primitive_classes(max_denominator):
        gamma = tower.word
        length = len(gamma)
        m = class_matrix(rep, tower)
        tr = complex(np.trace(m))
        base = {
            "p": slope.p, "q": slope.q, "len": length,
            "tr": [tr.real, tr.imag], "tl": translation_length(m),
        }
        not_loxodromic = classify(m) != "loxodromic"
        tube = 0.0
        deltas = []
        if not not_loxodromic:
            try:
                for j in range(length):
                    line = axis_of(_plain_word_image(rep, rotate(gamma, j)),
                                   basepoint=o)
                    far_end = apply(rep.gen_image(gamma[j]), o)
                    seg = Segment(o, far_end)
                    tube = max(tube, max(
                        dist_to_geodesic(seg.interpolate(float(f)), line)
                        for f in fracs))
                    deltas.append(geodesic_metrics(far_end, line).coordinate
                                  - geodesic_metrics(o, line).coordinate)
            except NotLoxodromic:
                not_loxodromic = True
        if not_loxodromic:
            records.append({
                **base, "inv_lambda": 0.0, "defect": None, "tube": None,
                "stride": None, "feet_monotone": None,
                "flags": ["not-loxodromic"],
            })
            continue
        letters = gamma * span
        win = min(window or 2 * length, len(letters))
        dists = _pair_distances_by_offset(rep, letters, win)
        inv_lambda = min(float(dists[k - 1].min()) / k
                         for k in range(max(1, win // 2), win + 1))
        defect = max(
            max(0.0, float((inv_lambda * k - dists[k - 1]).max()))
            for k in range(1, win + 1))
        threshold = ((1.0 / inv_lambda if inv_lambda > 0 else math.inf)
                     * (4.0 * rep.c_prime + 24.0 * delta + 2.0 * tube
                        + defect))
        stride = max((l for l in tower.l if l > threshold), default=None)
        feet_monotone = None
        if stride is not None:
            steps = np.tile(deltas, span)
            feet_jumps = [float(steps[i:i + stride].sum())
                          for i in range(0, len(steps) - stride + 1, stride)]
            feet_monotone = _same_sign(feet_jumps)
        flags = []
        if inv_lambda <= 1e-12:
            flags.append("zero-rate")
        if feet_monotone is False:
            flags.append("feet-order")
        records.append({
            **base, "inv_lambda": inv_lambda, "defect": defect,
            "tube": tube, "stride": stride, "feet_monotone": feet_monotone,
            "flags": flags,
        })
    tubes = [r["tube"] for r in records if r["tube"] is not None]
    aggregate = {
        "classes": len(records),
        "min_rate": min(r["inv_lambda"] for r in records),
        "max_defect": max((r["defect"] for r in records
                           if r["defect"] is not None), default=None),
        "max_tube": max(tubes, default=None),
        "feet_checked": sum(1 for r in records
                            if r["feet_monotone"] is not None),
        "feet_monotone": sum(1 for r in records if r["feet_monotone"]),
        "violations": sum(1 for r in records if r["flags"]),
    }
    return ScanReport(records, aggregate)


# ---------------------------------------------------------- local-global

def _boundary_equal(x, y, tol=1e-9):
    if x is INF or y is INF:
        return x is INF and y is INF
    return abs(x - y) <= tol * (1.0 + abs(x) + abs(y))


def _local_global_word(rng, power_floor, target_len, spread=4):
    parts = []
    total = 0
    while total < target_len:
        run = power_floor + int(rng.integers(0, spread))
        parts.append("b" + "a" * run)
        total += 1 + run
    return "".join(parts)


def local_global_scan(rep, power_floor, window, sample_words, seed=0):
    """Measure local (within `window`) vs global quasi-geodesic constants
    of orbit paths over words of the shape (B A^N A^*)^* with N =
    power_floor.  `sample_words` is either a count of random words to
    generate or an explicit list of words.

    Precondition: A is loxodromic and B does not map the attracting fixed
    point of A to its repelling fixed point.
    """
    a_image = rep.gen_image("a")
    if classify(a_image) != "loxodromic":
        raise PreconditionError("the image of a must be loxodromic")
    attracting, repelling = fixed_points(a_image)
    image = mobius_boundary(rep.gen_image("b"), attracting)
    if _boundary_equal(image, repelling):
        raise PreconditionError(
            f"B maps the attracting fixed point {attracting} of A to its "
            f"repelling fixed point {repelling}")
    if isinstance(sample_words, int):
        rng = np.random.default_rng(seed)
        targets = np.linspace(10, 200, sample_words).round().astype(int)
        words = [_local_global_word(rng, power_floor, int(t))
                 for t in targets]
    else:
        words = list(sample_words)
    records = []
    for word in words:
        n = len(word)
        dists = _pair_distances_by_offset(rep, word, n)
        per_offset = [float(d.min()) / k for k, d in enumerate(dists, 1)]
        win = min(window, n)
        local_rate = min(per_offset[:win])
        global_rate = min(per_offset)
        global_defect = max(
            max(0.0, float((local_rate * k - d).max()))
            for k, d in enumerate(dists, 1))
        records.append({
            "len": n, "local_rate": local_rate, "global_rate": global_rate,
            "global_defect": global_defect,
        })
    aggregate = {
        "words": len(records),
        "worst_local_rate": min(r["local_rate"] for r in records),
        "worst_global_rate": min(r["global_rate"] for r in records),
        "worst_global_defect": max(r["global_defect"] for r in records),
    }
    return ScanReport(records, aggregate)


# ---------------------------------------------------------- perturbation

def perturbation_scan(rep, radius, trials, max_denominator, seed=0,
                      low_ratio=1e-3, max_retries=100):
    """Perturb the generator matrices entrywise by uniform noise of the
    given radius, re-unimodularize, and rerun the ratio scan; report the
    minimum and median of the perturbed minimum ratios."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    base = bowditch_scan(rep, max_denominator, low_ratio)
    children = np.random.SeedSequence(seed).spawn(trials)
    values = []
    degenerate = 0
    for child in children:
        rng = np.random.default_rng(child)
        perturbed = None
        for _ in range(max_retries):
            try:
                perturbed = Representation(
                    rep.model,
                    _perturb(rng, rep.A, radius, rep.model),
                    _perturb(rng, rep.B, radius, rep.model),
                    basepoint=rep.basepoint, delta=rep.delta)
                break
            except (ValueError, ZeroDivisionError):
                continue
        if perturbed is None:
            degenerate += 1
            values.append(None)
            continue
        scan = bowditch_scan(perturbed, max_denominator, low_ratio)
        values.append(scan.aggregate["min_ratio"])
    valid = [v for v in values if v is not None]
    return {
        "radius": radius,
        "trials": trials,
        "unperturbed": base.aggregate["min_ratio"],
        "min": min(valid) if valid else None,
        "median": float(np.median(valid)) if valid else None,
        "degenerate": degenerate,
        "values": values,
    }


def _perturb(rng, matrix, radius, model):
    noise = rng.uniform(-radius, radius, size=(2, 2))
    if model == "H3":
        noise = noise + 1j * rng.uniform(-radius, radius, size=(2, 2))
    raw = matrix + noise
    d = raw[0, 0] * raw[1, 1] - raw[0, 1] * raw[1, 0]
    if model == "H2" and d.real <= 0.05:
        raise ValueError("degenerate perturbation")
    if abs(d) <= 0.05:
        raise ValueError("degenerate perturbation")
    return raw / np.sqrt(d)
