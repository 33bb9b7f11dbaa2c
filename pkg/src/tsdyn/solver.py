"""Solve ``y^{DD} + 2*alpha*y^D + beta*y = sum_i gamma_i h_i(., a)`` on a time scale.

The general solution is

    y = c1*e_{lambda1}(., a) + c2*e_{lambda2}(., a) + sum_i xi_i*h_i(., a)

with ``lambda_{1,2} = -alpha -/+ sqrt(alpha**2 - beta)``.  The particular
coefficients ``xi`` satisfy the terminal conditions

    xi_k = gamma_k / beta,  xi_{k-1} = (gamma_{k-1} - 2*alpha*gamma_k/beta) / beta

and the recurrence ``xi_{i+2} + 2*alpha*xi_{i+1} + beta*xi_i = gamma_i``.
Two independent routes compute them: backward iteration of the recurrence
(the normative path) and the explicit double-sum formula with the 2x2
``omega`` correction (kept as a cross-check).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateRoots,
    DegreeTooSmall,
    InadmissibleProblem,
    SingularBeta,
    TimeScaleError,
)
from .special_functions import exp_lambda, hk_table, resolve_anchor
from .timescale import SampledFunction, TimeScale

ADMISSIBILITY_EPS = 1e-9
REGRESSIVITY_EPS = 1e-12
FACTORIZATION_RTOL = 1e-10

HYP_BETA_NONZERO = "beta != 0"
HYP_DISTINCT_ROOTS = "beta != alpha^2"
HYP_REGRESSIVE = "1 - 2*alpha*mu + beta*mu^2 != 0"


@dataclass(frozen=True)
class ProblemSpec:
    alpha: float
    beta: float
    gamma: tuple[float, ...]
    anchor: float = 0.0

    def __post_init__(self) -> None:
        gamma = tuple(float(g) for g in self.gamma)
        if not gamma:
            raise TimeScaleError("problem field 'gamma' must be nonempty")
        for name, v in (("alpha", self.alpha), ("beta", self.beta), ("anchor", self.anchor)):
            if not np.isfinite(v):
                raise TimeScaleError(f"problem field {name!r} must be finite")
        if not all(np.isfinite(gamma)):
            raise TimeScaleError("problem field 'gamma' must be finite")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "anchor", float(self.anchor))
        object.__setattr__(self, "gamma", gamma)

    @property
    def k(self) -> int:
        """Declared forcing degree (trailing zeros are not trimmed)."""
        return len(self.gamma) - 1

    def scaled(self, s: float) -> "ProblemSpec":
        return replace(self, gamma=tuple(s * g for g in self.gamma))

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "ProblemSpec":
        if not isinstance(obj, Mapping):
            raise TimeScaleError("problem spec must be a JSON object")
        for name in ("alpha", "beta", "gamma"):
            if name not in obj:
                raise TimeScaleError(f"problem field {name!r} is missing")
        gamma = obj["gamma"]
        if not isinstance(gamma, (list, tuple)):
            raise TimeScaleError("problem field 'gamma' must be a list")
        try:
            return cls(
                float(obj["alpha"]),
                float(obj["beta"]),
                tuple(float(g) for g in gamma),
                float(obj.get("anchor", 0.0)),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, TimeScaleError):
                raise
            raise TimeScaleError(f"problem spec has a non-numeric field: {exc}") from None


@dataclass(frozen=True)
class Solution:
    lambda1: complex
    lambda2: complex
    xi: tuple[complex, ...]
    omega1: complex | None = None
    omega2: complex | None = None
    c1: complex | None = None
    c2: complex | None = None

    def with_constants(self, c1: complex, c2: complex) -> "Solution":
        return replace(self, c1=complex(c1), c2=complex(c2))


@dataclass(frozen=True)
class AdmissibilityReport:
    beta_nonzero: bool
    distinct_roots: bool
    regressive: bool
    regressivity_values: np.ndarray = field(repr=False)
    first_nonregressive_index: int | None = None
    factorization_discrepancy: float | None = None

    @property
    def passed(self) -> bool:
        return self.beta_nonzero and self.distinct_roots and self.regressive

    @property
    def failures(self) -> list[str]:
        out = []
        if not self.beta_nonzero:
            out.append(HYP_BETA_NONZERO)
        if not self.distinct_roots:
            out.append(HYP_DISTINCT_ROOTS)
        if not self.regressive:
            i = self.first_nonregressive_index
            if i is None:
                out.append(f"{HYP_REGRESSIVE} (factorizations disagree)")
            else:
                out.append(f"{HYP_REGRESSIVE} (fails at grid index {i})")
        return out

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "beta_nonzero": self.beta_nonzero,
            "distinct_roots": self.distinct_roots,
            "regressive": self.regressive,
            "first_nonregressive_index": self.first_nonregressive_index,
            "factorization_discrepancy": self.factorization_discrepancy,
            "failures": self.failures,
        }


def regressivity_polynomial(alpha: float, beta: float, mu) -> np.ndarray:
    mu = np.asarray(mu, dtype=float)
    return 1 - 2 * alpha * mu + beta * mu**2


def check_admissibility(spec: ProblemSpec, ts: TimeScale) -> AdmissibilityReport:
    """Evaluate every hypothesis of the theorem; never raises."""
    alpha, beta = spec.alpha, spec.beta
    beta_ok = abs(beta) > ADMISSIBILITY_EPS
    distinct = abs(beta - alpha * alpha) > ADMISSIBILITY_EPS
    mu = ts.mu
    poly = regressivity_polynomial(alpha, beta, mu)
    bad = np.nonzero(np.abs(poly) <= REGRESSIVITY_EPS)[0]
    first_bad = int(bad[0]) if len(bad) else None
    regressive = first_bad is None

    discrepancy = None
    if distinct:
        lam1, lam2 = characteristic_roots(alpha, beta)
        factored = (1 + mu * lam1) * (1 + mu * lam2)
        # cancellation-aware scale: magnitude of the individual terms
        scale = 1 + 2 * abs(alpha) * mu + abs(beta) * mu**2
        rel = np.abs(factored - poly) / scale
        discrepancy = float(rel.max()) if len(rel) else 0.0
        if discrepancy > FACTORIZATION_RTOL:
            regressive = False
    return AdmissibilityReport(beta_ok, distinct, regressive, poly, first_bad, discrepancy)


def require_admissible(spec: ProblemSpec, ts: TimeScale) -> AdmissibilityReport:
    report = check_admissibility(spec, ts)
    if not report.passed:
        raise InadmissibleProblem(report.failures)
    return report


def characteristic_roots(alpha: float, beta: float) -> tuple[complex, complex]:
    """Roots of ``x**2 + 2*alpha*x + beta`` ordered as ``-alpha -/+ sqrt(alpha**2 - beta)``.

    The principal branch of the square root is used. In the real-root case the
    root of larger magnitude is formed first and the other recovered as
    ``beta / root``, which avoids cancellation without changing the labels.
    """
    disc = alpha * alpha - beta
    if abs(beta - alpha * alpha) <= ADMISSIBILITY_EPS:
        raise DegenerateRoots(f"beta == alpha^2 (|beta - alpha^2| = {abs(disc):.3g})")
    r = cmath.sqrt(complex(disc))
    if disc > 0 and beta != 0:
        if alpha >= 0:
            lam1 = -alpha - r.real
            lam2 = beta / lam1
        else:
            lam2 = -alpha + r.real
            lam1 = beta / lam2
        return complex(lam1), complex(lam2)
    return -alpha - r, -alpha + r


def _require_beta(spec: ProblemSpec) -> None:
    if abs(spec.beta) <= ADMISSIBILITY_EPS:
        raise SingularBeta(f"beta == 0 (|beta| = {abs(spec.beta):.3g})")


def terminal_coefficients(spec: ProblemSpec) -> tuple[complex | None, complex]:
    """``(xi_{k-1}, xi_k)``; the first entry is None when ``k == 0``."""
    _require_beta(spec)
    a, b, g = spec.alpha, spec.beta, spec.gamma
    xi_k = complex(g[-1] / b)
    if spec.k == 0:
        return None, xi_k
    xi_km1 = complex((g[-2] - (2 * a / b) * g[-1]) / b)
    return xi_km1, xi_k


def xi_backward_recursion(spec: ProblemSpec) -> tuple[complex, ...]:
    """Seed with the terminal coefficients and iterate
    ``xi_i = (gamma_i - xi_{i+2} - 2*alpha*xi_{i+1}) / beta`` down to ``i = 0``."""
    xi_km1, xi_k = terminal_coefficients(spec)
    k = spec.k
    if k == 0:
        return (xi_k,)
    xi = [0j] * (k + 1)
    xi[k], xi[k - 1] = xi_k, xi_km1
    a, b, g = spec.alpha, spec.beta, spec.gamma
    for i in range(k - 2, -1, -1):
        xi[i] = (g[i] - xi[i + 2] - 2 * a * xi[i + 1]) / b
    return tuple(xi)


def particular_part(spec: ProblemSpec, i: int, lam1: complex | None = None) -> complex:
    """Double sum ``sum_{tau<i} sum_{s<tau} gamma_s lam1**(i+s-2 tau) beta**(tau-1-s)``.

    Exponents of ``lam1`` may be negative; ``lam1 != 0`` because
    ``lam1 * lam2 = beta != 0``.
    """
    if lam1 is None:
        lam1, _ = characteristic_roots(spec.alpha, spec.beta)
    b, g = spec.beta, spec.gamma
    total = 0j
    for tau in range(i):
        for s in range(tau):
            total += g[s] * lam1 ** (i + s - 2 * tau) * b ** (tau - 1 - s)
    return total


def omega_vector(spec: ProblemSpec) -> tuple[complex, complex]:
    k = spec.k
    if k < 2:
        raise DegreeTooSmall(f"omega needs forcing degree k >= 2, got k = {k}")
    _require_beta(spec)
    lam1, lam2 = characteristic_roots(spec.alpha, spec.beta)
    b = spec.beta
    xi_km1, xi_k = terminal_coefficients(spec)
    rhs1 = xi_km1 - particular_part(spec, k - 1, lam1)
    rhs2 = xi_k - particular_part(spec, k, lam1)
    root = cmath.sqrt(complex(spec.alpha**2 - b))
    pref = 1 / (2 * b ** (k - 1) * root)
    omega1 = pref * (lam2**k * rhs1 - lam2 ** (k - 1) * rhs2)
    omega2 = pref * (-(lam1**k) * rhs1 + lam1 ** (k - 1) * rhs2)
    return omega1, omega2


def xi_closed_form(spec: ProblemSpec) -> tuple[complex, ...]:
    """``xi_i = omega1*lam1**i + omega2*lam2**i + particular_part(i)``.

    For ``k < 2`` there is no recurrence to solve and the terminal
    coefficients are returned directly.
    """
    if spec.k < 2:
        xi_km1, xi_k = terminal_coefficients(spec)
        return (xi_k,) if xi_km1 is None else (xi_km1, xi_k)
    lam1, lam2 = characteristic_roots(spec.alpha, spec.beta)
    w1, w2 = omega_vector(spec)
    return tuple(
        w1 * lam1**i + w2 * lam2**i + particular_part(spec, i, lam1)
        for i in range(spec.k + 1)
    )


def coefficients(spec: ProblemSpec) -> Solution:
    """Roots, xi (recursion path) and omega, without integration constants."""
    _require_beta(spec)
    lam1, lam2 = characteristic_roots(spec.alpha, spec.beta)
    w1 = w2 = None
    if spec.k >= 2:
        w1, w2 = omega_vector(spec)
    return Solution(lam1, lam2, xi_backward_recursion(spec), w1, w2)


def solve_ivp(spec: ProblemSpec, ts: TimeScale, y0: complex, yd0: complex) -> Solution:
    """Fix ``c1, c2`` from ``y(a) = y0`` and ``y^D(a) = yd0``.

    At the anchor ``e_lambda = 1``, ``h_0 = 1`` and ``h_i = 0`` for ``i >= 1``,
    so the constants solve a 2x2 system with determinant ``lam2 - lam1``.
    """
    require_admissible(spec, ts)
    resolve_anchor(ts, spec.anchor)
    sol = coefficients(spec)
    xi0 = sol.xi[0]
    xi1 = sol.xi[1] if spec.k >= 1 else 0j
    lam1, lam2 = sol.lambda1, sol.lambda2
    u = complex(y0) - xi0
    v = complex(yd0) - xi1
    det = lam2 - lam1
    c1 = (lam2 * u - v) / det
    c2 = (v - lam1 * u) / det
    return sol.with_constants(c1, c2)


def _require_constants(sol: Solution) -> None:
    if sol.c1 is None or sol.c2 is None:
        raise TimeScaleError("solution has no integration constants; call solve_ivp first")


def evaluate_solution(sol: Solution, spec: ProblemSpec, ts: TimeScale) -> SampledFunction:
    _require_constants(sol)
    e1 = exp_lambda(ts, sol.lambda1, spec.anchor)
    e2 = exp_lambda(ts, sol.lambda2, spec.anchor)
    h = hk_table(ts, spec.anchor, len(sol.xi) - 1)
    y = sol.c1 * e1.values + sol.c2 * e2.values
    for xi_i, h_i in zip(sol.xi, h):
        y = y + xi_i * h_i.values
    return SampledFunction(ts, y)


def evaluate_delta_derivative(
    sol: Solution, spec: ProblemSpec, ts: TimeScale, order: int = 1
) -> SampledFunction:
    """Delta derivative of the solution from the rules ``e_lam^D = lam*e_lam`` and
    ``h_i^D = h_{i-1}``; exact on every scale kind, no differencing."""
    _require_constants(sol)
    e1 = exp_lambda(ts, sol.lambda1, spec.anchor)
    e2 = exp_lambda(ts, sol.lambda2, spec.anchor)
    y = sol.c1 * sol.lambda1**order * e1.values + sol.c2 * sol.lambda2**order * e2.values
    shifted = sol.xi[order:]
    if shifted:
        h = hk_table(ts, spec.anchor, len(shifted) - 1)
        for xi_i, h_i in zip(shifted, h):
            y = y + xi_i * h_i.values
    return SampledFunction(ts, y)


def particular_solution(sol: Solution, spec: ProblemSpec, ts: TimeScale) -> SampledFunction:
    h = hk_table(ts, spec.anchor, len(sol.xi) - 1)
    y = np.zeros(len(ts), dtype=complex)
    for xi_i, h_i in zip(sol.xi, h):
        y = y + xi_i * h_i.values
    return SampledFunction(ts, y)


def parse_complex(value, name: str) -> complex:
    """Accept a JSON number or a ``[re, im]`` pair."""
    if isinstance(value, bool):
        raise TimeScaleError(f"field {name!r} must be a number or [re, im]")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, Sequence) and not isinstance(value, str) and len(value) == 2:
        try:
            return complex(float(value[0]), float(value[1]))
        except (TypeError, ValueError):
            pass
    raise TimeScaleError(f"field {name!r} must be a number or [re, im]")
