"""Independent checks of a computed solution.

* ``residual``            plug sampled ``y`` back into the equation by differencing
* ``forward_step_oracle`` march the equation forward from the initial data
* ``wronskian_check``     compare ``y1*y2^D - y1^D*y2`` with its closed form
* ``full_report``         run everything and collect maxima

Growing sequences are compared point by point relative to ``max(1, |y_i|)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    NotRegressive,
    ScaleTooShort,
    UnsupportedScale,
)
from .solver import (
    AdmissibilityReport,
    ProblemSpec,
    Solution,
    check_admissibility,
    characteristic_roots,
    evaluate_delta_derivative,
    evaluate_solution,
    regressivity_polynomial,
    solve_ivp,
    xi_backward_recursion,
    xi_closed_form,
)
from .special_functions import exp_lambda, exp_of_factors, hk_table
from .timescale import SampledFunction, TimeScale, delta_derivative

PASS_TOL = 1e-8


def relative_discrepancy(a, b) -> np.ndarray:
    """``|a - b| / max(1, |b|)`` elementwise."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return np.abs(a - b) / np.maximum(1.0, np.abs(b))


def elementwise_relative(a, b) -> np.ndarray:
    """``|a - b| / |b|``, falling back to ``|a - b|`` where ``b == 0``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    denom = np.abs(b)
    return np.abs(a - b) / np.where(denom > 0, denom, 1.0)


def forcing(ts: TimeScale, spec: ProblemSpec) -> SampledFunction:
    """``sum_i gamma_i * h_i(., a)`` on ``ts``."""
    table = hk_table(ts, spec.anchor, spec.k)
    f = np.zeros(len(ts), dtype=complex)
    for g, h in zip(spec.gamma, table):
        f = f + g * h.values
    return SampledFunction(ts, f)


def residual(
    ts: TimeScale, y: SampledFunction, spec: ProblemSpec, f: SampledFunction | None = None
) -> SampledFunction:
    """``y^{DD} + 2*alpha*y^D + beta*y - forcing`` by difference quotients.

    The last two indices carry no second derivative and are left undefined.
    """
    if not ts.discrete:
        raise UnsupportedScale("sampled residual needs isolated points; use analytic_residual")
    if len(ts) < 3:
        raise ScaleTooShort("residual needs at least 3 points")
    if f is None:
        f = forcing(ts, spec)
    yd = delta_derivative(y)
    ydd = delta_derivative(yd)
    r = ydd.values + 2 * spec.alpha * yd.values + spec.beta * y.values - f.values
    return SampledFunction(ts, r, ydd.defined)


def analytic_residual(sol: Solution, spec: ProblemSpec, ts: TimeScale) -> SampledFunction:
    """Residual from exact derivative rules; valid on every scale kind."""
    y = evaluate_solution(sol, spec, ts)
    yd = evaluate_delta_derivative(sol, spec, ts, 1)
    ydd = evaluate_delta_derivative(sol, spec, ts, 2)
    f = forcing(ts, spec)
    return SampledFunction(
        ts, ydd.values + 2 * spec.alpha * yd.values + spec.beta * y.values - f.values
    )


def normalized_residual_max(r: SampledFunction, y: SampledFunction) -> float:
    vals = np.abs(r.values[r.defined])
    if not len(vals):
        return 0.0
    ynorm = np.max(np.abs(y.values[y.defined])) if y.defined.any() else 0.0
    return float(vals.max() / max(1.0, ynorm))


def forward_step_oracle(
    ts: TimeScale,
    spec: ProblemSpec,
    y0: complex,
    yd0: complex,
    f: SampledFunction | None = None,
) -> SampledFunction:
    """March the equation from ``(y0, yd0)`` at index 0.

    With ``d_i = (y_{i+1} - y_i)/mu_i`` the equation at ``t_i`` reads
    ``(d_{i+1} - d_i)/mu_i + 2*alpha*d_i + beta*y_i = f_i``; solve for
    ``d_{i+1}`` and then ``y_{i+2} = y_{i+1} + mu_{i+1}*d_{i+1}``.
    The initial data are taken at the first grid point.
    """
    if not ts.discrete:
        raise UnsupportedScale("forward stepping needs isolated points")
    if len(ts) < 3:
        raise ScaleTooShort("forward stepping needs at least 3 points")
    if f is None:
        f = forcing(ts, spec)
    mu = ts.mu
    fv = f.values
    a2, b = 2 * spec.alpha, spec.beta
    n = len(ts)
    y = np.empty(n, dtype=complex)
    y[0] = y0
    d = complex(yd0)
    y[1] = y[0] + mu[0] * d
    for i in range(n - 2):
        d = d + mu[i] * (fv[i] - a2 * d - b * y[i])
        y[i + 2] = y[i + 1] + mu[i + 1] * d
    return SampledFunction(ts, y)


def wronskian_check(ts: TimeScale, spec: ProblemSpec) -> tuple[float, float]:
    """Return ``(max relative discrepancy, min |W|)`` between the two Wronskian paths.

    Direct: ``y1*y2^D - y1^D*y2`` from sampled exponentials (difference
    quotients on isolated points, exact derivatives on a real interval).
    Closed: ``2*sqrt(alpha^2 - beta) * e_{-2 alpha + mu beta}(., a)``, whose
    factors ``1 - 2*alpha*mu_i + beta*mu_i^2`` use the local graininess.
    """
    w_direct, w_closed = wronskian_paths(ts, spec)
    ok = ~np.isnan(w_direct)
    disc = np.abs(w_direct[ok] - w_closed[ok]) / np.abs(w_closed[ok])
    return float(disc.max()), float(np.abs(w_direct[ok]).min())


def wronskian_paths(ts: TimeScale, spec: ProblemSpec) -> tuple[np.ndarray, np.ndarray]:
    lam1, lam2 = characteristic_roots(spec.alpha, spec.beta)
    y1 = exp_lambda(ts, lam1, spec.anchor)
    y2 = exp_lambda(ts, lam2, spec.anchor)
    if ts.discrete:
        d1 = delta_derivative(y1).values
        d2 = delta_derivative(y2).values
    else:
        d1 = lam1 * y1.values
        d2 = lam2 * y2.values
    w_direct = y1.values * d2 - d1 * y2.values
    root = 2 * cmath.sqrt(complex(spec.alpha**2 - spec.beta))
    if ts.discrete:
        factors = regressivity_polynomial(spec.alpha, spec.beta, ts.mu)
        e = exp_of_factors(ts, factors, spec.anchor, "1 - 2*alpha*mu + beta*mu^2").values
    else:
        e = np.exp(-2 * spec.alpha * (ts.points - spec.anchor))
    return w_direct, root * e


@dataclass(frozen=True)
class VerificationReport:
    admissibility: AdmissibilityReport | None
    residual_max: float | None = None
    xi_discrepancy_max: float | None = None
    step_oracle_discrepancy_max: float | None = None
    wronskian_discrepancy_max: float | None = None
    wronskian_min_abs: float | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    FIELDS = (
        "residual_max",
        "xi_discrepancy_max",
        "step_oracle_discrepancy_max",
        "wronskian_discrepancy_max",
    )

    def passed(self, tol: float = PASS_TOL) -> bool:
        if self.admissibility is None or not self.admissibility.passed:
            return False
        for name in self.FIELDS:
            v = getattr(self, name)
            if v is not None and not (math.isfinite(v) and v <= tol):
                return False
        return self.wronskian_min_abs is None or self.wronskian_min_abs > 0

    def to_dict(self) -> dict:
        return {
            "residual_max": self.residual_max,
            "xi_discrepancy_max": self.xi_discrepancy_max,
            "step_oracle_discrepancy_max": self.step_oracle_discrepancy_max,
            "wronskian_discrepancy_max": self.wronskian_discrepancy_max,
            "wronskian_min_abs": self.wronskian_min_abs,
            "admissibility": None if self.admissibility is None else self.admissibility.to_dict(),
            "notes": list(self.notes),
        }


def full_report(
    spec: ProblemSpec, ts: TimeScale, y0: complex, yd0: complex, tol: float = PASS_TOL
) -> VerificationReport:
    """Run every check; failures are recorded in the report, not raised."""
    notes: list[str] = []
    adm = check_admissibility(spec, ts)
    if not adm.passed:
        notes.extend(f"admissibility failure: {msg}" for msg in adm.failures)
        return VerificationReport(adm, notes=tuple(notes))

    rec = np.array(xi_backward_recursion(spec))
    closed = np.array(xi_closed_form(spec))
    xi_rel = elementwise_relative(closed, rec)
    xi_disc = float(xi_rel.max())
    if xi_disc > tol:
        i = int(np.argmax(xi_rel))
        notes.append(
            f"closed-form xi disagrees with recursion at i={i}: "
            f"{closed[i]!r} vs {rec[i]!r}"
        )

    try:
        sol = solve_ivp(spec, ts, y0, yd0)
        y = evaluate_solution(sol, spec, ts)
    except NotRegressive as exc:
        notes.append(str(exc))
        return VerificationReport(adm, xi_discrepancy_max=xi_disc, notes=tuple(notes))

    step_disc = None
    if ts.discrete:
        f = forcing(ts, spec)
        res_max = normalized_residual_max(residual(ts, y, spec, f), y)
        if spec.anchor == ts.points[0]:
            stepped = forward_step_oracle(ts, spec, y0, yd0, f)
            step_disc = float(relative_discrepancy(y.values, stepped.values).max())
        else:
            notes.append("forward stepping skipped: anchor is not the first grid point")
    else:
        res_max = normalized_residual_max(analytic_residual(sol, spec, ts), y)
        notes.append("forward stepping skipped: real_interval is continuous")

    w_disc, w_min = wronskian_check(ts, spec)
    return VerificationReport(
        adm,
        residual_max=res_max,
        xi_discrepancy_max=xi_disc,
        step_oracle_discrepancy_max=step_disc,
        wronskian_discrepancy_max=w_disc,
        wronskian_min_abs=w_min,
        notes=tuple(notes),
    )
