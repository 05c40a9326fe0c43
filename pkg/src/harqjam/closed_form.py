"""Analytic success and outage probabilities for the two-round HARQ monitor.

Notation used throughout::

    a = exp(-lambda1 * g_bar)                 round-II decode probability at the monitor
    b = exp(-(lambda0 + lambda1) * g_bar)     a * P(SR decodes round I without jamming)
    c = lambda2 * P0 / (lambda0 * gamma_bar)  jamming "half-saturation" power

so that the jamming-branch success is ``phi(q) = a - b * c / (c + q)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .params import SystemParams, g_bar, gamma_bar

__all__ = [
    "SuccessPieces",
    "success_pieces",
    "jam_scale",
    "outage_prob_round1",
    "phi",
    "phi_prime",
    "p_eav_no_combining",
    "p_eav_combining",
    "expected_success",
    "expected_success_quad",
    "expected_jam_power",
]


def jam_scale(params: SystemParams) -> float:
    return params.lambda2 * params.p0 / (params.lambda0 * gamma_bar(params))


def _a_b(params: SystemParams) -> tuple[float, float]:
    gb = g_bar(params)
    return math.exp(-params.lambda1 * gb), math.exp(-(params.lambda0 + params.lambda1) * gb)


def outage_prob_round1(params: SystemParams, q):
    """P(SR fails round I) under jamming power ``q``; finite at ``q = 0``."""
    q = np.asarray(q, dtype=np.float64)
    c = jam_scale(params)
    sr_fail = -math.expm1(-params.lambda0 * g_bar(params))
    # 1 - c/(c+q) * (1 - sr_fail), split to avoid cancellation when both terms are small
    with np.errstate(invalid="ignore"):
        frac = np.where(np.isinf(q), 0.0, c / (c + q))
        jammed = np.where(np.isinf(q), 1.0, q / (c + q))
    out = np.minimum(jammed + frac * sr_fail, 1.0)
    return float(out) if out.ndim == 0 else out


def phi(params: SystemParams, q):
    """Success probability when the monitor jams round I with power ``q``.

    Increasing and concave in ``q``; ``phi(0)`` is the success of a monitor that
    listens in round I, fails, and listens again in round II.
    """
    a, _ = _a_b(params)
    return a * outage_prob_round1(params, q)


def phi_prime(params: SystemParams, q: float) -> float:
    _, b = _a_b(params)
    c = jam_scale(params)
    return b * c / (c + q) ** 2


@dataclass(frozen=True)
class SuccessPieces:
    params: SystemParams
    p_out_zero: float
    p2_suc: float

    def phi_at(self, q):
        return phi(self.params, q)


def success_pieces(params: SystemParams) -> SuccessPieces:
    gb = g_bar(params)
    return SuccessPieces(
        params=params,
        p_out_zero=-math.expm1(-params.lambda0 * gb),
        p2_suc=math.exp(-params.lambda1 * gb),
    )


def p_eav_no_combining(params: SystemParams, g1: float, q: float) -> float:
    if q < 0 or g1 < 0:
        raise ValueError("g1 and q must be nonnegative")
    if q > 0:
        return phi(params, q)
    if g1 >= g_bar(params):
        return 1.0
    return phi(params, 0.0)


def p_eav_combining(params: SystemParams, g1: float, q: float) -> float:
    """As :func:`p_eav_no_combining`, but a failed round-I copy is MRC-combined in round II."""
    if q < 0 or g1 < 0:
        raise ValueError("g1 and q must be nonnegative")
    if q > 0:
        return phi(params, q)
    if g1 >= g_bar(params):
        return 1.0
    return math.exp(g1 * params.lambda1) * phi(params, 0.0)


def _exp_cdf(lam: float, x: float) -> float:
    return -math.expm1(-lam * x)


def expected_success(params: SystemParams, policy, combining: bool) -> float:
    """Average success over ``g1 ~ Exp(lambda1)`` for a threshold policy.

    The policy jams with ``policy.jam_power`` iff ``g1 < policy.threshold``.
    Integrals used (``L = lambda1``, ``gb = g_bar``, ``t = threshold``)::

        jam region      P(g1 < t) * phi(Q)
        listen, t<=g<gb no combining: (e^{-Lt} - e^{-L gb}) * phi(0)
                        combining:    int_t^gb e^{Lg} phi(0) L e^{-Lg} dg = L phi(0) (gb - t)
        listen, g>=gb   e^{-L max(t, gb)}
    """
    tau = float(policy.threshold)
    qhat = float(policy.jam_power)
    if tau < 0:
        raise ValueError("threshold must be nonnegative")
    if qhat <= 0 or tau == 0:
        tau, qhat = 0.0, 0.0
    lam = params.lambda1
    gb = g_bar(params)
    phi0 = phi(params, 0.0)
    total = _exp_cdf(lam, tau) * phi(params, qhat) if tau > 0 else 0.0
    if tau < gb:
        if combining:
            total += lam * phi0 * (gb - tau)
        else:
            total += (math.exp(-lam * tau) - math.exp(-lam * gb)) * phi0
    total += math.exp(-lam * max(tau, gb))
    return total


def expected_jam_power(params: SystemParams, policy) -> float:
    if policy.jam_power <= 0 or policy.threshold <= 0:
        return 0.0
    return _exp_cdf(params.lambda1, policy.threshold) * policy.jam_power


def expected_success_quad(
    params: SystemParams,
    jam_power: Callable[[float], float],
    combining: bool,
    rtol: float = 1e-9,
    breakpoints=(),
) -> float:
    """Average success for an arbitrary power map ``g1 -> Q(g1)`` by adaptive quadrature.

    The integration range is cut where the tail mass of ``g1`` drops below 1e-12;
    ``g_bar`` is always a breakpoint since the integrand jumps there; pass any
    discontinuities of ``jam_power`` through ``breakpoints``.
    """
    lam = params.lambda1
    upper = -math.log(1e-12) / lam
    p_eav = p_eav_combining if combining else p_eav_no_combining

    def integrand(g):
        return p_eav(params, g, max(0.0, float(jam_power(g)))) * lam * math.exp(-lam * g)

    gb = g_bar(params)
    points = sorted({p for p in (gb, *breakpoints) if 0.0 < p < upper}) or None
    value, _ = integrate.quad(integrand, 0.0, upper, points=points, epsrel=rtol, epsabs=1e-13, limit=500)
    return value
