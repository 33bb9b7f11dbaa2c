"""Concrete time scales and the delta-calculus primitives on them.

Four kinds are supported:

* ``grid``           explicit strictly increasing isolated points
* ``uniform``        ``start + j*step`` for ``j = 0..count-1``
* ``q_scale``        ``first * q**j`` with ``q > 1``
* ``real_interval``  the continuum ``[a, b]``; ``points`` are output samples only

Function values are always complex; points and graininess are real.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import (
    AnchorNotOnScale,
    IndexOutOfRange,
    NonIncreasing,
    TimeScaleError,
    TooShort,
    UnsupportedScale,
)

KINDS = ("grid", "uniform", "q_scale", "real_interval")
DISCRETE_KINDS = ("grid", "uniform", "q_scale")
MIN_POINTS = 3


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeScale:
    kind: str
    points: np.ndarray
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise TimeScaleError(f"unknown time scale kind {self.kind!r}")
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1:
            raise TimeScaleError("points must be one-dimensional")
        if len(pts) < MIN_POINTS:
            raise TooShort(f"need at least {MIN_POINTS} points, got {len(pts)}")
        if not np.all(np.isfinite(pts)):
            raise TimeScaleError("points must be finite")
        bad = np.nonzero(np.diff(pts) <= 0)[0]
        if len(bad):
            i = int(bad[0])
            raise NonIncreasing(
                f"points not strictly increasing at index {i}: {pts[i]!r} >= {pts[i + 1]!r}"
            )
        object.__setattr__(self, "points", _frozen(pts.copy()))
        object.__setattr__(self, "params", dict(self.params))

    def __len__(self) -> int:
        return len(self.points)

    @property
    def discrete(self) -> bool:
        return self.kind in DISCRETE_KINDS

    @property
    def mu(self) -> np.ndarray:
        """Graininess at indices ``0..N-2`` (zeros on a real interval)."""
        if not self.discrete:
            return np.zeros(len(self.points) - 1)
        return np.diff(self.points)

    def anchor_index(self, a: float) -> int:
        """Index of the grid point equal to ``a`` (discrete kinds only)."""
        if not self.discrete:
            raise UnsupportedScale("anchor indices exist only on discrete scales")
        pts = self.points
        hits = np.nonzero(pts == a)[0]
        if len(hits):
            return int(hits[0])
        j = int(np.argmin(np.abs(pts - a)))
        if abs(pts[j] - a) <= 1e-12 * max(1.0, abs(a)):
            return j
        raise AnchorNotOnScale(f"anchor {a!r} is not a point of the {self.kind} scale")

    def to_json(self) -> dict:
        if self.kind == "grid":
            return {"kind": "grid", "points": [float(p) for p in self.points]}
        return {"kind": self.kind, **self.params}


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Complex values of a function at every point of ``scale``.

    ``defined[i]`` is False where the value does not exist (for example the
    trailing points of a difference quotient); such entries hold NaN.
    """

    scale: TimeScale
    values: np.ndarray
    defined: np.ndarray | None = None

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=complex).copy()
        if vals.shape != (len(self.scale),):
            raise TimeScaleError(
                f"expected {len(self.scale)} values, got shape {vals.shape}"
            )
        if self.defined is None:
            mask = np.ones(len(vals), dtype=bool)
        else:
            mask = np.asarray(self.defined, dtype=bool).copy()
        vals[~mask] = complex(np.nan, np.nan)
        object.__setattr__(self, "values", _frozen(vals))
        object.__setattr__(self, "defined", _frozen(mask))

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def from_callable(cls, scale: TimeScale, fn) -> "SampledFunction":
        return cls(scale, np.array([fn(t) for t in scale.points], dtype=complex))

    def _combine(self, other, op) -> "SampledFunction":
        if isinstance(other, SampledFunction):
            if other.scale is not self.scale and not np.array_equal(
                other.scale.points, self.scale.points
            ):
                raise TimeScaleError("sampled functions live on different scales")
            return SampledFunction(
                self.scale, op(self.values, other.values), self.defined & other.defined
            )
        return SampledFunction(self.scale, op(self.values, other), self.defined)

    def __add__(self, other):
        return self._combine(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, other):
        return self._combine(other, np.multiply)

    __rmul__ = __mul__


# -- constructors -------------------------------------------------------------


def make_grid(points: Sequence[float]) -> TimeScale:
    return TimeScale("grid", np.asarray(points, dtype=float))


def uniform(start: float, step: float, count: int) -> TimeScale:
    if not step > 0:
        raise TimeScaleError(f"uniform step must be > 0, got {step!r}")
    count = _count(count)
    pts = start + np.arange(count, dtype=float) * step
    return TimeScale("uniform", pts, {"start": start, "step": step, "count": count})


def q_scale(q: float, first: float, count: int) -> TimeScale:
    if not q > 1:
        raise TimeScaleError(f"q_scale requires q > 1, got {q!r}")
    if not first > 0:
        raise TimeScaleError(f"q_scale requires first > 0, got {first!r}")
    count = _count(count)
    pts = first * np.power(float(q), np.arange(count, dtype=float))
    return TimeScale("q_scale", pts, {"q": q, "first": first, "count": count})


def real_interval(a: float, b: float, samples: int) -> TimeScale:
    if not b > a:
        raise TimeScaleError(f"real_interval requires b > a, got [{a!r}, {b!r}]")
    samples = _count(samples)
    return TimeScale(
        "real_interval", np.linspace(a, b, samples), {"a": a, "b": b, "samples": samples}
    )


def _count(n) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise TimeScaleError(f"count must be an integer, got {n!r}")
    n = int(n)
    if n < MIN_POINTS:
        raise TooShort(f"need at least {MIN_POINTS} points, got {n}")
    return n


def scale_from_json(obj: Mapping[str, Any]) -> TimeScale:
    """Build a scale from its JSON description, e.g. ``{"kind": "uniform", ...}``."""
    if not isinstance(obj, Mapping):
        raise TimeScaleError("scale spec must be a JSON object")
    kind = obj.get("kind")
    required = {
        "grid": ("points",),
        "uniform": ("start", "step", "count"),
        "q_scale": ("q", "first", "count"),
        "real_interval": ("a", "b", "samples"),
    }
    if kind not in required:
        raise TimeScaleError(f"scale field 'kind': unknown kind {kind!r}")
    for name in required[kind]:
        if name not in obj:
            raise TimeScaleError(f"scale field {name!r} is missing")
    if kind == "grid":
        return make_grid(obj["points"])
    if kind == "uniform":
        return uniform(float(obj["start"]), float(obj["step"]), obj["count"])
    if kind == "q_scale":
        return q_scale(float(obj["q"]), float(obj["first"]), obj["count"])
    return real_interval(float(obj["a"]), float(obj["b"]), obj["samples"])


# -- delta calculus -----------------------------------------------------------


def sigma(ts: TimeScale, i: int) -> float:
    """Forward jump: the next point after ``points[i]``."""
    _check_interior(ts, i)
    if not ts.discrete:
        return float(ts.points[i])
    return float(ts.points[i + 1])


def graininess(ts: TimeScale, i: int) -> float:
    _check_interior(ts, i)
    if not ts.discrete:
        return 0.0
    return float(ts.points[i + 1] - ts.points[i])


def _check_interior(ts: TimeScale, i: int) -> None:
    n = len(ts)
    if ts.discrete:
        if not 0 <= i < n - 1:
            raise IndexOutOfRange(
                f"index {i} has no forward jump on a {n}-point {ts.kind} scale"
            )
    elif not 0 <= i < n:
        raise IndexOutOfRange(f"index {i} outside {n} samples")


def _require_discrete(ts: TimeScale, what: str) -> None:
    if not ts.discrete:
        raise UnsupportedScale(
            f"{what} needs isolated points; real_interval is handled analytically"
        )


def delta_derivative(f: SampledFunction) -> SampledFunction:
    """Forward difference quotient ``(f[i+1] - f[i]) / mu_i``; last entry undefined."""
    ts = f.scale
    _require_discrete(ts, "delta_derivative")
    v = f.values
    out = np.full(len(v), complex(np.nan, np.nan))
    out[:-1] = (v[1:] - v[:-1]) / ts.mu
    defined = np.zeros(len(v), dtype=bool)
    defined[:-1] = f.defined[1:] & f.defined[:-1]
    return SampledFunction(ts, out, defined)


def delta_integral(f: SampledFunction, start: int, stop: int) -> complex:
    """Riemann delta-sum ``sum(mu_i * f[i] for i in range(start, stop))``."""
    ts = f.scale
    _require_discrete(ts, "delta_integral")
    n = len(ts)
    if not (0 <= start <= stop < n):
        raise IndexOutOfRange(f"integration bounds ({start}, {stop}) invalid for {n} points")
    mu = ts.mu
    total = 0j
    for i in range(start, stop):
        total += mu[i] * f.values[i]
    return total


def running_integral(f: SampledFunction, anchor: int = 0) -> SampledFunction:
    """``F(t_j) = integral of f from points[anchor] to t_j`` at every index.

    Left of the anchor the orientation is reversed (negated sum), so the
    delta derivative of ``F`` is ``f`` everywhere it is defined.
    """
    ts = f.scale
    _require_discrete(ts, "running_integral")
    return SampledFunction(ts, _oriented_cumsum(ts.mu * f.values[:-1], anchor))


def _oriented_cumsum(terms: np.ndarray, anchor: int) -> np.ndarray:
    """Oriented prefix sums of per-interval ``terms`` with zero at ``anchor``.

    ``terms[i]`` belongs to the interval ``[t_i, t_{i+1})``.
    """
    n = len(terms) + 1
    out = np.zeros(n, dtype=complex)
    if anchor < n - 1:
        out[anchor + 1 :] = np.cumsum(terms[anchor:])
    if anchor > 0:
        out[:anchor] = -np.cumsum(terms[:anchor][::-1])[::-1]
    return out

