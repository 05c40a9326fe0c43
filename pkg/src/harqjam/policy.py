"""Optimal jamming-power policies.

Without combining the optimum is closed form: jam with constant power whenever
round I cannot be overheard. With combining the objective is non-convex in the
power, but the average-power constraint satisfies time sharing, so the dual
method is exact: for each multiplier ``mu`` the per-state subproblem
``max_Q  P_eav(g1, Q) - mu * Q`` has a two-regime answer, and ``mu*`` is the
root of the budget equation ``E[Q_mu(g1)] = Q_ave``.
"""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass

import numpy as np

from .closed_form import _a_b, expected_jam_power, expected_success, jam_scale, phi
from .params import SystemParams, g_bar

__all__ = [
    "Mode",
    "JammingPolicy",
    "DualSolution",
    "ConvergenceError",
    "passive_policy",
    "solve_p1",
    "mu_max",
    "subproblem_qbar",
    "subproblem_value",
    "jam_threshold_cc",
    "expected_jam_power_cc",
    "solve_p2",
]


class ConvergenceError(RuntimeError):
    pass


class Mode(str, enum.Enum):
    PASSIVE = "passive"
    THRESHOLD_NC = "threshold_nc"
    THRESHOLD_CC = "threshold_cc"


@dataclass(frozen=True)
class JammingPolicy:
    """Jam with ``jam_power`` iff the observed ``g1 < threshold``, else listen."""

    mode: Mode
    threshold: float
    jam_power: float

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not (self.threshold >= 0 and self.jam_power >= 0):
            raise ValueError("threshold and jam_power must be nonnegative")
        if self.mode is Mode.PASSIVE and self.jam_power != 0:
            raise ValueError("passive policy cannot jam")

    def power_at(self, g1):
        g1 = np.asarray(g1, dtype=np.float64)
        out = np.where(g1 < self.threshold, self.jam_power, 0.0)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DualSolution:
    mu_star: float
    policy: JammingPolicy
    avg_power: float
    objective: float
    iterations: int


def passive_policy() -> JammingPolicy:
    return JammingPolicy(Mode.PASSIVE, 0.0, 0.0)


def solve_p1(params: SystemParams, q_ave: float) -> JammingPolicy:
    """Optimal no-combining policy: threshold ``g_bar``, all budget on the jam region."""
    if not q_ave > 0:
        raise ValueError(f"q_ave must be positive, got {q_ave!r}")
    gb = g_bar(params)
    p_jam = -math.expm1(-params.lambda1 * gb)
    return JammingPolicy(Mode.THRESHOLD_NC, gb, q_ave / p_jam)


def mu_max(params: SystemParams) -> float:
    """Largest multiplier for which jamming is ever worthwhile, ``phi'(0)``."""
    _, b = _a_b(params)
    return b / jam_scale(params)


def subproblem_qbar(params: SystemParams, mu: float) -> float:
    """Stationary point of ``phi(Q) - mu*Q`` over ``Q >= 0``."""
    if not mu > 0:
        raise ValueError("mu must be positive")
    if mu >= mu_max(params):
        return 0.0
    _, b = _a_b(params)
    c = jam_scale(params)
    return max(0.0, math.sqrt(b * c / mu) - c)


def _gap(params: SystemParams, mu: float) -> float:
    # v_mu - phi(0) = (sqrt(mu c) - sqrt(b))**2, zero once jamming stops paying
    if mu >= mu_max(params):
        return 0.0
    _, b = _a_b(params)
    return (math.sqrt(mu * jam_scale(params)) - math.sqrt(b)) ** 2


def subproblem_value(params: SystemParams, mu: float) -> float:
    if not mu > 0:
        raise ValueError("mu must be positive")
    return _gap(params, mu) + phi(params, 0.0)


def jam_threshold_cc(params: SystemParams, mu: float) -> float:
    """Largest ``g1`` at which jamming still beats listening-then-combining.

    Solves ``exp(lambda1 * g) * phi(0) = v_mu`` and clamps to ``[0, g_bar]``.
    """
    if not mu > 0:
        raise ValueError("mu must be positive")
    gap = _gap(params, mu)
    if gap == 0.0:
        return 0.0
    tau = math.log1p(gap / phi(params, 0.0)) / params.lambda1
    return min(g_bar(params), max(0.0, tau))


def _cc_policy(params: SystemParams, mu: float) -> JammingPolicy:
    qbar = subproblem_qbar(params, mu)
    tau = jam_threshold_cc(params, mu) if qbar > 0 else 0.0
    return JammingPolicy(Mode.THRESHOLD_CC, tau, qbar)


def expected_jam_power_cc(params: SystemParams, mu: float) -> float:
    return expected_jam_power(params, _cc_policy(params, mu))


def solve_p2(
    params: SystemParams, q_ave: float, tol: float = 1e-8, max_iter: int = 200
) -> DualSolution:
    """Optimal combining policy via bisection on the power multiplier.

    ``E[Q]`` is continuous and strictly decreasing in ``mu`` on ``(0, mu_max]``,
    with ``E[Q](mu_max) = 0``. The lower bracket is found by halving from
    ``mu_max``; bisection uses the geometric midpoint since the root may sit
    many decades below ``mu_max``.
    """
    if not q_ave > 0:
        raise ValueError(f"q_ave must be positive, got {q_ave!r}")
    if not tol > 0:
        raise ValueError("tol must be positive")

    def residual(mu):
        return expected_jam_power_cc(params, mu) - q_ave

    hi = mu_max(params)
    lo = hi
    while True:
        lo *= 0.5
        if lo < sys.float_info.min:
            raise ConvergenceError("could not bracket mu*: budget too large")
        if residual(lo) >= 0:
            break

    iterations = 0
    while True:
        iterations += 1
        mid = math.sqrt(lo) * math.sqrt(hi)  # lo * hi may underflow
        r = residual(mid)
        if abs(r) <= tol * q_ave:
            break
        if r > 0:
            lo = mid
        else:
            hi = mid
        if hi / lo - 1.0 < 1e-15 or iterations >= max_iter:
            raise ConvergenceError(
                f"bisection stalled after {iterations} steps at mu={mid!r}, residual={r!r}"
            )

    policy = _cc_policy(params, mid)
    return DualSolution(
        mu_star=mid,
        policy=policy,
        avg_power=expected_jam_power(params, policy),
        objective=expected_success(params, policy, combining=True),
        iterations=iterations,
    )
