"""Hyperbolic plane and 3-space in upper half-space coordinates.

A point is (z, t) with z complex and t > 0; H^2 is the slice Im(z) = 0 with
real matrices.  Unimodular 2x2 complex matrices act by the quaternionic
extension of the Mobius action, which restricts to the classical PSL(2, R)
action on the slice:

    z' = ((az + b) conj(cz + d) + a conj(c) t^2) / den
    t' = |det| t / den,          den = |cz + d|^2 + |c|^2 t^2

Distances come from cosh d = 1 + (|dz|^2 + dt^2) / (2 t1 t2).  Geodesics are
handled by normalizing their endpoints to (0, infinity), where the vertical
axis makes projections, signed coordinates and point-to-line distances
closed-form: sinh(dist) = |z|/t and the foot sits at height sqrt(|z|^2+t^2).

Three length notions for an isometry M: translation length 2 ln|lambda| of
the dominant eigenvalue (0 with a flag for elliptic/parabolic), displacement
d(Mo, o), and the stable estimate d(M^n o, o)/n.  The latter is computed by
renormalized binary powering with explicit log-scale bookkeeping so that
n ~ 10^4 (matrix entries ~ e^9600) stays in double precision.
"""

from __future__ import annotations

import json
import math
import cmath
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

DEFAULT_DELTA = 1.0  # >= the true thin-triangle constant ln(1+sqrt(2)) ~ 0.8814
_DET_TOL = 1e-9


class NotLoxodromic(ValueError):
    """Raised when an axis or attracting fixed point is requested for an
    isometry that has none; carries the offending trace."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


class RepresentationError(ValueError):
    """A representation file or matrix pair fails validation."""


class _Infinity:
    """The boundary point at infinity (an explicit tag, never a big float)."""

    __slots__ = ()

    def __repr__(self):
        return "INF"


INF = _Infinity()


@dataclass(frozen=True)
class HPoint:
    """A point of upper half-space: horizontal coordinate z, height t > 0."""

    z: complex
    t: float

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "t", float(self.t))
        if not (self.t > 0 and math.isfinite(self.t)):
            raise ValueError(f"height must be positive and finite, got {self.t}")


BASEPOINT = HPoint(0.0, 1.0)


# --------------------------------------------------------------------------
# matrices
# --------------------------------------------------------------------------

def as_matrix(entries):
    """2x2 complex numpy array from any nested 2x2 structure."""
    M = np.asarray(entries, dtype=complex)
    if M.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {M.shape}")
    return M


IDENTITY = np.eye(2, dtype=complex)


def det(M):
    return M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]


def mat_inverse(M):
    """Inverse via the adjugate; exact up to the det divide."""
    return np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]],
                    dtype=complex) / det(M)


def unimodularize(M):
    """Scale so det = 1 (sign of the root is irrelevant projectively)."""
    d = det(M)
    if d == 0:
        raise ValueError("singular matrix")
    return M / cmath.sqrt(d)


def drift_renormalize(M):
    """Re-unitalize only when accumulated det drift is visible."""
    if abs(det(M) - 1.0) > _DET_TOL:
        return unimodularize(M)
    return M


def mat_product(matrices):
    """Product of a sequence of (near-)unimodular matrices with drift
    monitoring."""
    out = IDENTITY
    for M in matrices:
        out = drift_renormalize(out @ M)
    return out


# --------------------------------------------------------------------------
# metric and action
# --------------------------------------------------------------------------

def distance(p, q):
    arg = 1.0 + (abs(p.z - q.z) ** 2 + (p.t - q.t) ** 2) / (2.0 * p.t * q.t)
    return math.acosh(max(1.0, arg))


def apply(M, p):
    """Image of the point p under the isometry M."""
    a, b = M[0, 0], M[0, 1]
    c, d = M[1, 0], M[1, 1]
    t2 = p.t * p.t
    w = c * p.z + d
    den = abs(w) ** 2 + abs(c) ** 2 * t2
    z = ((a * p.z + b) * w.conjugate() + a * c.conjugate() * t2) / den
    t = abs(a * d - b * c) * p.t / den
    return HPoint(z, t)


def mobius_boundary(M, x):
    """Image of a boundary point (complex or INF) under the Mobius map.

    A denominator that cancels to rounding noise is treated as the pole, so
    infinity stays a tagged value instead of leaking out as a huge float.
    """
    a, b = M[0, 0], M[0, 1]
    c, d = M[1, 0], M[1, 1]
    if x is INF:
        return INF if c == 0 else a / c
    w = c * x + d
    if abs(w) <= 1e-14 * (abs(c * x) + abs(d)):
        return INF
    return (a * x + b) / w


# --------------------------------------------------------------------------
# classification, eigenvalues, lengths
# --------------------------------------------------------------------------

def classify(M, tol=1e-9):
    """One of "identity", "elliptic", "parabolic", "loxodromic"."""
    if abs(M - IDENTITY).max() <= tol or abs(M + IDENTITY).max() <= tol:
        return "identity"
    tr = M[0, 0] + M[1, 1]
    if abs(tr.imag) <= tol:
        x = abs(tr.real)
        if x < 2.0 - tol:
            return "elliptic"
        if x <= 2.0 + tol:
            return "parabolic"
    return "loxodromic"


def _dominant_eigenvalue(M):
    """The eigenvalue of larger modulus (ties possible only off the
    loxodromic locus)."""
    tr = M[0, 0] + M[1, 1]
    s = cmath.sqrt(tr * tr - 4.0 * det(M))
    if abs(tr + s) < abs(tr - s):
        s = -s
    return (tr + s) / 2.0


def translation_length(M, tol=1e-9):
    """2 ln|lambda| for loxodromic M; 0 for elliptic/parabolic/identity."""
    if classify(M, tol) != "loxodromic":
        return 0.0
    return 2.0 * math.log(abs(_dominant_eigenvalue(M)))


class LengthTriple(NamedTuple):
    translation: float
    displacement: float
    stable_estimate: float


def lengths(M, o=BASEPOINT, n=1024):
    """(translation length, displacement at o, d(M^n o, o)/n)."""
    if n < 1:
        raise ValueError("sample count must be >= 1")
    return LengthTriple(
        translation=translation_length(M),
        displacement=distance(apply(M, o), o),
        stable_estimate=power_displacement(M, n, o) / n,
    )


def _renorm_scaled(P, log_det):
    s = abs(P).max()
    return P / s, log_det - 2.0 * math.log(s)


def _apply_scaled(P, log_abs_det, z, log_t):
    """Action of a renormalized matrix on (z, log t) with the true
    |det| supplied in log form (entry-level det would cancel away)."""
    a, b = P[0, 0], P[0, 1]
    c, d = P[1, 0], P[1, 1]
    t2 = math.exp(2.0 * log_t) if 2.0 * log_t > -745 else 0.0
    w = c * z + d
    den = abs(w) ** 2 + abs(c) ** 2 * t2
    z2 = ((a * z + b) * w.conjugate() + a * c.conjugate() * t2) / den
    return z2, log_abs_det + log_t - math.log(den)


def _log_safe_distance(z0, log_t0, z1, log_t1):
    """Distance between (z0, e^log_t0) and (z1, e^log_t1) without forming
    underflowing heights: cosh d = (|dz|^2 + t0^2 + t1^2) / (2 t0 t1)."""
    terms = [2.0 * log_t0, 2.0 * log_t1]
    dz = abs(z0 - z1)
    if dz > 0:
        terms.append(2.0 * math.log(dz))
    m = max(terms)
    log_num = m + math.log(sum(math.exp(x - m) for x in terms))
    log_arg = log_num - math.log(2.0) - log_t0 - log_t1
    if log_arg < 30.0:
        return math.acosh(max(1.0, math.exp(log_arg)))
    # acosh(x) = ln(2x) - O(1/x^2); the correction is below double precision
    return log_arg + math.log(2.0)


def power_displacement(M, n, o=BASEPOINT):
    """d(M^n o, o) by square-and-multiply on renormalized matrices.

    Safe for n large enough that M^n overflows doubles by thousands of
    orders of magnitude; the log of |det| is tracked exactly because the
    renormalized entries retain no usable determinant information.
    """
    if n < 0:
        M, n = mat_inverse(M), -n
    if n == 0:
        return 0.0
    base, base_ld = _renorm_scaled(np.asarray(M, dtype=complex),
                                   math.log(abs(det(M))))
    acc, acc_ld = None, 0.0
    while n:
        if n & 1:
            if acc is None:
                acc, acc_ld = base, base_ld
            else:
                acc, acc_ld = _renorm_scaled(acc @ base, acc_ld + base_ld)
        n >>= 1
        if n:
            base, base_ld = _renorm_scaled(base @ base, 2.0 * base_ld)
    z, log_t = _apply_scaled(acc, acc_ld, o.z, math.log(o.t))
    return _log_safe_distance(o.z, math.log(o.t), z, log_t)


# --------------------------------------------------------------------------
# geodesics
# --------------------------------------------------------------------------

def normalizer(to_zero, to_infinity):
    """Unimodular map sending the boundary point `to_zero` to 0 and
    `to_infinity` to INF."""
    if to_zero is INF:
        return unimodularize(np.array([[0, 1], [1, -to_infinity]],
                                      dtype=complex))
    if to_infinity is INF:
        return np.array([[1, -to_zero], [0, 1]], dtype=complex)
    if to_zero == to_infinity:
        raise ValueError("geodesic endpoints must be distinct")
    return unimodularize(np.array([[1, -to_zero], [1, -to_infinity]],
                                  dtype=complex))


class Geodesic:
    """An oriented bi-infinite geodesic with a signed coordinate.

    `endpoints` is (forward, backward): the coordinate H increases toward
    `endpoints[0]`.  H is arc length along the geodesic, zero at the anchor
    (the foot of the reference basepoint), so H is an isometry onto R.
    """

    __slots__ = ("endpoints", "anchor", "_norm", "_inv", "_anchor_coord")

    def __init__(self, forward, backward, basepoint=BASEPOINT):
        if forward == backward or (forward is INF and backward is INF):
            raise ValueError("geodesic endpoints must be distinct")
        self.endpoints = (forward, backward)
        self._norm = normalizer(backward, forward)
        self._inv = mat_inverse(self._norm)
        q = apply(self._norm, basepoint)
        self._anchor_coord = 0.5 * math.log(abs(q.z) ** 2 + q.t ** 2)
        self.anchor = apply(self._inv,
                            HPoint(0.0, math.exp(self._anchor_coord)))

    def __repr__(self):
        return f"Geodesic({self.endpoints[0]!r}, {self.endpoints[1]!r})"

    def point_at(self, h):
        """The point with signed coordinate h (arc length from the anchor)."""
        return apply(self._inv, HPoint(0.0, math.exp(self._anchor_coord + h)))


class GeodesicMetrics(NamedTuple):
    dist: float
    foot: HPoint
    coordinate: float


def geodesic_metrics(p, g):
    """Distance from p to g, the foot of the projection, and its signed
    coordinate H(foot)."""
    q = apply(g._norm, p)
    dist = math.asinh(abs(q.z) / q.t)
    coord = 0.5 * math.log(abs(q.z) ** 2 + q.t ** 2)
    foot = apply(g._inv, HPoint(0.0, math.exp(coord)))
    return GeodesicMetrics(dist, foot, coord - g._anchor_coord)


def dist_to_geodesic(p, g):
    q = apply(g._norm, p)
    return math.asinh(abs(q.z) / q.t)


def fixed_points(M, tol=1e-9):
    """(attracting, repelling) boundary fixed points of a loxodromic M."""
    kind = classify(M, tol)
    if kind != "loxodromic":
        raise NotLoxodromic(f"{kind} isometry has no axis",
                            trace=complex(M[0, 0] + M[1, 1]))
    a, b = M[0, 0], M[0, 1]
    c, d = M[1, 0], M[1, 1]
    if c == 0:
        # fixed points b/(d - a) and INF; INF attracts iff |a| > |d|
        other = b / (d - a)
        if abs(a) > abs(d):
            return INF, other
        return other, INF
    tr = a + d
    s = cmath.sqrt(tr * tr - 4.0 * det(M))
    if abs(tr + s) < abs(tr - s):
        s = -s
    return (a - d + s) / (2 * c), (a - d - s) / (2 * c)


def axis_of(M, basepoint=BASEPOINT, tol=1e-9):
    """The axis of a loxodromic isometry, oriented toward its attracting
    fixed point, anchored at the projection of the basepoint."""
    att, rep = fixed_points(M, tol)
    return Geodesic(att, rep, basepoint)


def geodesic_through(p, q):
    """The geodesic through two distinct interior points, oriented from p
    toward q."""
    dz = q.z - p.z
    span = abs(dz)
    if span <= 1e-14 * (p.t + q.t):
        if q.t == p.t:
            raise ValueError("coincident points span no geodesic")
        if q.t > p.t:
            return Geodesic(INF, p.z, basepoint=p)
        return Geodesic(p.z, INF, basepoint=p)
    u = dz / span
    # in the vertical plane through p and q: semicircle centered on the floor
    center = (span * span + q.t * q.t - p.t * p.t) / (2.0 * span)
    radius = math.hypot(center, p.t)
    return Geodesic(p.z + u * (center + radius),
                    p.z + u * (center - radius), basepoint=p)


class Segment:
    """The geodesic segment [p, q], parametrized by arc length from p."""

    __slots__ = ("p", "q", "length", "_g", "_lo", "_hi")

    def __init__(self, p, q):
        self.p, self.q = p, q
        self.length = distance(p, q)
        if self.length < 1e-13:
            self._g = None
            self._lo = self._hi = 0.0
        else:
            self._g = geodesic_through(p, q)
            self._lo = geodesic_metrics(p, self._g).coordinate
            self._hi = geodesic_metrics(q, self._g).coordinate

    def point_at(self, s):
        """The point at arc length s from p (s clamped into [0, length])."""
        if self._g is None:
            return self.p
        s = min(max(s, 0.0), self.length)
        # the coordinates of p and q differ by exactly the length, up to
        # roundoff; interpolate in coordinate space
        h = self._lo + (self._hi - self._lo) * (s / self.length)
        return self._g.point_at(h)

    def interpolate(self, u):
        """The point at fraction u in [0, 1] of the way from p to q."""
        return self.point_at(u * self.length)


def dist_to_segment(x, seg):
    """Exact distance from a point to a geodesic segment: the distance to
    the full geodesic when the projection foot lands inside, otherwise the
    distance to the nearer endpoint."""
    if seg._g is None:
        return distance(x, seg.p)
    q = apply(seg._g._norm, x)
    coord = 0.5 * math.log(abs(q.z) ** 2 + q.t ** 2) - seg._g._anchor_coord
    lo, hi = min(seg._lo, seg._hi), max(seg._lo, seg._hi)
    if coord < lo or coord > hi:
        return min(distance(x, seg.p), distance(x, seg.q))
    return math.asinh(abs(q.z) / q.t)


def minimize_convex(f, a, b, tol=1e-10):
    """Golden-section minimum of a convex function on [a, b].

    Returns (argmin, min).  Convexity makes the bracket reduction sound; the
    returned value is an achieved evaluation, hence always an upper bound
    for the true minimum.
    """
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = f(x2)
    candidates = [(f1, x1), (f2, x2), (f(a), a), (f(b), b)]
    best, arg = min(candidates)
    return arg, best


def fermi_point(u, rho, side=1.0):
    """The point at signed distance rho from the vertical axis (0, INF)
    whose projection foot has coordinate u (height e^u).

    The curve u -> fermi_point(u, rho) is the hypercycle at clearance |rho|;
    side picks the half-plane (direction of the real axis) for H^2 use.
    """
    scale = math.exp(u)
    return HPoint(side * scale * math.tanh(rho), scale / math.cosh(rho))


# --------------------------------------------------------------------------
# representations of the rank-2 free group
# --------------------------------------------------------------------------

class Representation:
    """A pair of unimodular matrices (images of the two generators), a
    basepoint, and the ambient model data."""

    __slots__ = ("model", "A", "B", "basepoint", "delta", "_images", "c_prime")

    def __init__(self, model, A, B, basepoint=BASEPOINT, delta=DEFAULT_DELTA):
        if model not in ("H2", "H3"):
            raise RepresentationError(f"unknown model {model!r}")
        A, B = as_matrix(A), as_matrix(B)
        for name, M in (("A", A), ("B", B)):
            if abs(det(M) - 1.0) > _DET_TOL:
                raise RepresentationError(
                    f"matrix {name} is not unimodular: det = {det(M):.12g}")
        if model == "H2":
            for name, M in (("A", A), ("B", B)):
                if abs(M.imag).max() > 0:
                    raise RepresentationError(
                        f"H2 representation requires real entries; "
                        f"matrix {name} has imaginary parts")
            if basepoint.z.imag != 0:
                raise RepresentationError(
                    "H2 basepoint must have real horizontal coordinate")
        if not delta > 0:
            raise RepresentationError(f"delta must be positive, got {delta}")
        self.model = model
        self.A, self.B = A, B
        self.basepoint = basepoint
        self.delta = float(delta)
        self._images = {"a": A, "A": mat_inverse(A),
                        "b": B, "B": mat_inverse(B)}
        self.c_prime = max(distance(apply(A, basepoint), basepoint),
                           distance(apply(B, basepoint), basepoint))

    def gen_image(self, letter):
        return self._images[letter]

    def word_image(self, w):
        return mat_product(self._images[x] for x in w)

    def displacement(self, w):
        return distance(apply(self.word_image(w), self.basepoint),
                        self.basepoint)


def _parse_matrix(name, field):
    try:
        arr = np.asarray(field, dtype=float)
    except (TypeError, ValueError) as e:
        raise RepresentationError(f"matrix {name} is not numeric: {e}") from e
    if arr.shape != (4, 2):
        raise RepresentationError(
            f"matrix {name} must be 4 [re, im] pairs row-major, "
            f"got shape {arr.shape}")
    entries = arr[:, 0] + 1j * arr[:, 1]
    return entries.reshape(2, 2)


def parse_rep_file(path):
    """Load and validate a representation JSON file.

    Schema: {"model": "H2"|"H3", "A": [[re, im] x 4 row-major], "B": [...],
    "basepoint": {"z": [re, im], "t": 1.0}, "delta": 1.0}; basepoint and
    delta are optional.
    """
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise RepresentationError(f"invalid JSON in {path}: {e}") from e
    for field in ("model", "A", "B"):
        if field not in data:
            raise RepresentationError(f"missing field {field!r} in {path}")
    base = data.get("basepoint", {"z": [0.0, 0.0], "t": 1.0})
    try:
        z = complex(base["z"][0], base["z"][1])
        basepoint = HPoint(z, base["t"])
    except (KeyError, IndexError, TypeError, ValueError) as e:
        raise RepresentationError(f"bad basepoint in {path}: {e}") from e
    return Representation(
        model=data["model"],
        A=_parse_matrix("A", data["A"]),
        B=_parse_matrix("B", data["B"]),
        basepoint=basepoint,
        delta=data.get("delta", DEFAULT_DELTA),
    )
