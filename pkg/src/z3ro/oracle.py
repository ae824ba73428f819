"""Independent numerical verification of the closed-form precoder optimality.

The real-valued design problem is

    max (sum g_m)^2   s.t.   sum g_m^2 = M,   sum g_m^3 = 0,

whose two-level critical points (M_s entries at delta, M - M_s at alpha)
are what the closed-form precoder implements. This module solves the
problem by multi-start constrained optimization, checks Lagrangian
stationarity of candidates and numerically probes the conjecture that the
complex-valued variant gains nothing over the real one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from .core import SeededRng

__all__ = [
    "RealProblemSolution",
    "theorem1_candidate",
    "solve_real_problem",
    "verify_critical_point",
    "probe_realness_conjecture",
    "ConjectureReport",
]

_FEAS_RTOL = 1e-8


@dataclass(frozen=True)
class RealProblemSolution:
    """A feasible point of the real problem with its constraint residuals."""

    g: np.ndarray
    objective: float
    power_residual: float
    cubic_residual: float
    multipliers: Optional[Tuple[float, float]] = None

    @property
    def is_feasible(self):
        m = self.g.size
        return (
            abs(self.power_residual) <= _FEAS_RTOL * m
            and abs(self.cubic_residual) <= _FEAS_RTOL * m**1.5
        )


def _solution(g, multipliers=None):
    g = np.asarray(g, dtype=float)
    return RealProblemSolution(
        g=g,
        objective=float(np.sum(g)) ** 2,
        power_residual=float(np.sum(g**2) - g.size),
        cubic_residual=float(np.sum(g**3)),
        multipliers=multipliers,
    )


def closed_form_levels(num_antennas: int, num_saturated: int):
    """(alpha, delta) of the two-level critical point family."""
    m, ms = int(num_antennas), int(num_saturated)
    if not 0 < ms < m / 2:
        raise ValueError(f"need 0 < M_s < M/2, got M_s={num_saturated}, M={num_antennas}")
    a = float(m - ms)
    alpha = np.sqrt(m) / np.sqrt(a + ms ** (1.0 / 3.0) * a ** (2.0 / 3.0))
    delta = -alpha * (a / ms) ** (1.0 / 3.0)
    return alpha, delta


def theorem1_candidate(num_antennas: int, num_saturated: int) -> RealProblemSolution:
    """The closed-form two-level candidate: M_s entries at delta, the rest at
    alpha. Feasible at floating-point precision for every valid (M, M_s)."""
    m, ms = int(num_antennas), int(num_saturated)
    alpha, delta = closed_form_levels(m, ms)
    g = np.full(m, alpha)
    g[:ms] = delta
    return _solution(g)


def _project_to_constraints(g, max_iter=50, tol=1e-13):
    """Gauss-Newton projection onto {sum g^2 = M, sum g^3 = 0}."""
    g = np.array(g, dtype=float)
    m = g.size
    for _ in range(max_iter):
        if not np.all(np.isfinite(g)):
            return g
        c = np.array([np.sum(g**2) - m, np.sum(g**3)])
        if abs(c[0]) <= tol * m and abs(c[1]) <= tol * m**1.5:
            break
        jac = np.vstack([2.0 * g, 3.0 * g**2])
        step, *_ = np.linalg.lstsq(jac, -c, rcond=None)
        g = g + step
    return g


def _local_solve(g0, m):
    res = minimize(
        lambda g: -np.sum(g) ** 2,
        g0,
        jac=lambda g: -2.0 * np.sum(g) * np.ones(m),
        method="SLSQP",
        constraints=[
            {
                "type": "eq",
                "fun": lambda g: np.sum(g**2) - m,
                "jac": lambda g: 2.0 * g,
            },
            {
                "type": "eq",
                "fun": lambda g: np.sum(g**3),
                "jac": lambda g: 3.0 * g**2,
            },
        ],
        options={"maxiter": 200, "ftol": 1e-12},
    )
    if not np.all(np.isfinite(res.x)):
        return None
    return _project_to_constraints(res.x)


def solve_real_problem(
    num_antennas: int, starts: int = 128, rng: SeededRng = SeededRng(0)
) -> RealProblemSolution:
    """Best feasible solution over `starts` local optimizations.

    The closed-form M_s = 1 candidate is always included as a start (when
    valid), so the returned objective can never fall below it.
    """
    m = int(num_antennas)
    if m < 2:
        raise ValueError("num_antennas must be >= 2")
    if starts < 32:
        raise ValueError("starts must be >= 32 for meaningful coverage")
    initial = []
    if m >= 3:
        initial.append(theorem1_candidate(m, 1).g)
    gen = rng.generator()
    for _ in range(starts - len(initial)):
        g0 = gen.normal(size=m)
        g0 *= np.sqrt(m / np.sum(g0**2))
        initial.append(_project_to_constraints(g0))

    best = None
    for g0 in initial:
        g = _local_solve(g0, m)
        if g is None or not np.all(np.isfinite(g)):
            continue
        sol = _solution(g)
        if not sol.is_feasible:
            continue
        if best is None or sol.objective > best.objective:
            best = sol
    if best is None:
        raise RuntimeError(f"no feasible point found for M={m} after {starts} starts")
    return best


def verify_critical_point(g, rtol: float = 1e-6):
    """Least-squares fit of Lagrange multipliers to the stationarity system
    2*sum(g) - 2*lambda*g_m - 3*mu*g_m^2 = 0.

    Returns (is_critical, lambda, mu, max_residual); `is_critical` holds iff
    the worst per-antenna residual is within `rtol` of the array-sum scale.
    """
    g = np.asarray(g, dtype=float)
    sol = _solution(g)
    if not sol.is_feasible:
        raise ValueError("g is not feasible; project onto the constraints first")
    total = float(np.sum(g))
    design = np.column_stack([2.0 * g, 3.0 * g**2])
    rhs = np.full(g.size, 2.0 * total)
    (lam, mu), *_ = np.linalg.lstsq(design, rhs, rcond=None)
    residual = float(np.max(np.abs(2.0 * total - 2.0 * lam * g - 3.0 * mu * g**2)))
    is_critical = residual <= rtol * abs(total) if total != 0.0 else residual <= rtol
    return bool(is_critical), float(lam), float(mu), residual


@dataclass(frozen=True)
class ConjectureReport:
    """Numerical evidence for the real-optimum conjecture at one M."""

    num_antennas: int
    best_objective: float
    closed_form_objective: float
    max_imag_after_rotation: float
    feasible_starts: int

    @property
    def excess_over_closed_form(self):
        return self.best_objective - self.closed_form_objective


def _complex_pack(z):
    m = z.size // 2
    return z[:m] + 1j * z[m:]


def probe_realness_conjecture(
    num_antennas: int, starts: int = 128, rng: SeededRng = SeededRng(0)
) -> ConjectureReport:
    """Solve the complex-valued variant (objective |sum g|^2, constraints
    sum|g|^2 = M and sum g|g|^2 = 0) by multi-start and report whether any
    solution beats the real closed form.

    The report carries evidence only; it never asserts the conjecture. The
    imaginary residue is measured after removing the best global phasor
    (psi = arg(sum g^2)/2, exact when g is a rotated real vector).
    """
    m = int(num_antennas)
    if not 2 <= m <= 12:
        raise ValueError("conjecture probing is desk-scale: M must lie in [2, 12]")
    closed = theorem1_candidate(m, 1).objective if m >= 3 else 0.0

    def objective(z):
        g = _complex_pack(z)
        return -abs(np.sum(g)) ** 2

    def power_con(z):
        g = _complex_pack(z)
        return float(np.sum(np.abs(g) ** 2) - m)

    def cubic_re(z):
        g = _complex_pack(z)
        return float(np.real(np.sum(g * np.abs(g) ** 2)))

    def cubic_im(z):
        g = _complex_pack(z)
        return float(np.imag(np.sum(g * np.abs(g) ** 2)))

    gen = rng.generator()
    best_obj = -np.inf
    best_g = None
    feasible = 0
    for k in range(starts):
        if k == 0 and m >= 3:
            g0 = theorem1_candidate(m, 1).g.astype(complex)
        else:
            g0 = gen.normal(size=m) + 1j * gen.normal(size=m)
            g0 *= np.sqrt(m / np.sum(np.abs(g0) ** 2))
        z0 = np.concatenate([g0.real, g0.imag])
        res = minimize(
            objective,
            z0,
            method="SLSQP",
            constraints=[
                {"type": "eq", "fun": power_con},
                {"type": "eq", "fun": cubic_re},
                {"type": "eq", "fun": cubic_im},
            ],
            options={"maxiter": 300, "ftol": 1e-12},
        )
        if not np.all(np.isfinite(res.x)):
            continue
        g = _complex_pack(res.x)
        pow_res = abs(np.sum(np.abs(g) ** 2) - m)
        cub_res = abs(np.sum(g * np.abs(g) ** 2))
        if pow_res > _FEAS_RTOL * m * 10 or cub_res > _FEAS_RTOL * m**1.5 * 10:
            continue
        feasible += 1
        obj = abs(np.sum(g)) ** 2
        if obj > best_obj:
            best_obj = obj
            best_g = g
    if best_g is None:
        raise RuntimeError(f"no feasible complex point found for M={m}")
    psi = 0.5 * np.angle(np.sum(best_g**2))
    rotated = best_g * np.exp(-1j * psi)
    max_imag = float(np.max(np.abs(rotated.imag)))
    return ConjectureReport(
        num_antennas=m,
        best_objective=float(best_obj),
        closed_form_objective=float(closed),
        max_imag_after_rotation=max_imag,
        feasible_starts=feasible,
    )
