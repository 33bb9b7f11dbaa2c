"""Generalized polynomials h_k(t, a), exponentials e_lambda(t, a) and circle-plus.

On isolated points both families are built by prefix scans over the grid
intervals, starting at the anchor and running outward in each direction.
On a real interval they take their classical closed forms
``(t - a)**k / k!`` and ``exp(lambda * (t - a))``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NotRegressive, TimeScaleError
from .timescale import SampledFunction, TimeScale, _oriented_cumsum

REGRESSIVITY_EPS = 1e-12


def resolve_anchor(ts: TimeScale, a) -> int | float:
    """Grid index of the anchor on discrete scales, the real value otherwise.

    Integers are taken as indices on discrete scales; floats must coincide
    with a grid point.
    """
    if ts.discrete:
        if isinstance(a, (int, np.integer)) and not isinstance(a, bool):
            if not 0 <= a < len(ts):
                raise TimeScaleError(f"anchor index {a} outside 0..{len(ts) - 1}")
            return int(a)
        return ts.anchor_index(float(a))
    a = float(a)
    lo, hi = ts.points[0], ts.points[-1]
    if not lo <= a <= hi:
        raise TimeScaleError(f"anchor {a!r} outside the interval [{lo!r}, {hi!r}]")
    return a


def hk_table(ts: TimeScale, a, k_max: int) -> list[SampledFunction]:
    """Return ``[h_0(., a), ..., h_{k_max}(., a)]`` sampled on ``ts``.

    Discrete scales use the forward cumulative delta-sum
    ``h_k(t_j) = sum_{a <= t_i < t_j} mu_i * h_{k-1}(t_i)`` (negated for
    ``t_j < a``), which costs ``O(k_max * N)``.
    """
    if k_max < 0:
        raise TimeScaleError(f"k_max must be >= 0, got {k_max}")
    anchor = resolve_anchor(ts, a)
    if not ts.discrete:
        d = ts.points - anchor
        return [
            SampledFunction(ts, d**k / math.factorial(k)) for k in range(k_max + 1)
        ]
    mu = ts.mu
    current = np.ones(len(ts), dtype=complex)
    table = [SampledFunction(ts, current)]
    for _ in range(k_max):
        current = _oriented_cumsum(mu * current[:-1], anchor)
        table.append(SampledFunction(ts, current))
    return table


def exp_lambda(ts: TimeScale, lam: complex, a) -> SampledFunction:
    """Time-scale exponential ``e_lam(., a)``.

    Discrete: ``prod(1 + mu_i*lam)`` over ``a <= t_i < t_j``, and the
    reciprocal product to the left of ``a``.  Raises ``NotRegressive`` at the
    first interval with ``|1 + mu_i*lam| <= 1e-12``.
    """
    lam = complex(lam)
    anchor = resolve_anchor(ts, a)
    if not ts.discrete:
        return SampledFunction(ts, np.exp(lam * (ts.points - anchor)))
    factors = 1 + ts.mu * lam
    return SampledFunction(ts, _oriented_cumprod(factors, anchor))


def _oriented_cumprod(factors: np.ndarray, anchor: int, what: str = "1 + mu*lambda") -> np.ndarray:
    bad = np.nonzero(np.abs(factors) <= REGRESSIVITY_EPS)[0]
    if len(bad):
        i = int(bad[0])
        raise NotRegressive(i, complex(factors[i]), what)
    n = len(factors) + 1
    out = np.ones(n, dtype=complex)
    if anchor < n - 1:
        out[anchor + 1 :] = np.cumprod(factors[anchor:])
    if anchor > 0:
        out[:anchor] = 1.0 / np.cumprod(factors[:anchor][::-1])[::-1]
    return out


def exp_of_factors(ts: TimeScale, factors: np.ndarray, a, what: str) -> SampledFunction:
    """Exponential of a point-dependent rate given directly by its factors
    ``1 + mu_i * p(t_i)``; used for ``e_{-2 alpha + mu beta}`` whose rate
    varies with the graininess."""
    anchor = resolve_anchor(ts, a)
    return SampledFunction(ts, _oriented_cumprod(np.asarray(factors, dtype=complex), anchor, what))


def circle_plus(lam1: complex, lam2: complex, mu: float) -> complex:
    return lam1 + lam2 + mu * lam1 * lam2
