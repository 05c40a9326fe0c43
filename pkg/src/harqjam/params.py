"""System parameters, derived thresholds and Rayleigh-fading channel draws."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SystemParams",
    "ChannelDraw",
    "gamma_bar",
    "g_bar",
    "db_to_linear",
    "exp_from_uniform",
    "chunk_rng",
    "sample_packet",
    "sample_gains",
]


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


@dataclass(frozen=True)
class SystemParams:
    """Constants of the monitored link.

    Defaults are the reference setup: unit noise, mean gains 1 / 0.2 / 0.2 for
    the suspicious, eavesdropping and jamming links, P0 = 10 dB, R = 2.
    """

    p0: float = 10.0
    rate: float = 2.0
    sigma2: float = 1.0
    lambda0: float = 1.0
    lambda1: float = 5.0
    lambda2: float = 5.0

    def __post_init__(self):
        for name in ("p0", "rate", "sigma2", "lambda0", "lambda1", "lambda2"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a finite positive number, got {value!r}")

    def gamma_bar(self) -> float:
        return gamma_bar(self)

    def g_bar(self) -> float:
        return g_bar(self)

    def replace(self, **changes) -> "SystemParams":
        fields = {k: getattr(self, k) for k in ("p0", "rate", "sigma2", "lambda0", "lambda1", "lambda2")}
        fields.update(changes)
        return SystemParams(**fields)


def gamma_bar(params: SystemParams) -> float:
    """Minimum SINR for a rate-R packet, 2**R - 1."""
    return math.expm1(params.rate * math.log(2.0))


def g_bar(params: SystemParams) -> float:
    """Eavesdropping gain at or above which the monitor decodes round I."""
    return gamma_bar(params) * params.sigma2 / params.p0


@dataclass(frozen=True)
class ChannelDraw:
    g0_r1: float
    g1_r1: float
    g2_r1: float
    g0_r2: float
    g1_r2: float

    def __post_init__(self):
        for name in ("g0_r1", "g1_r1", "g2_r1", "g0_r2", "g1_r2"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be nonnegative")


def exp_from_uniform(u, lam):
    """Inverse-CDF exponential variate: -log(1 - u) / lam."""
    return -np.log1p(-np.asarray(u, dtype=np.float64)) / lam


def chunk_rng(seed: int, stream: int) -> np.random.Generator:
    """Independent generator keyed by ``(seed, stream)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(stream)])))


# column order of the uniform block consumed per packet
_RATES = ("lambda0", "lambda1", "lambda2", "lambda0", "lambda1")


def sample_gains(params: SystemParams, rng: np.random.Generator, n: int) -> np.ndarray:
    """``(n, 5)`` array of gains, columns ordered as :class:`ChannelDraw` fields."""
    u = rng.random((n, 5))
    lam = np.array([getattr(params, name) for name in _RATES])
    return exp_from_uniform(u, lam)


def sample_packet(params: SystemParams, rng: np.random.Generator) -> ChannelDraw:
    return ChannelDraw(*(float(g) for g in sample_gains(params, rng, 1)[0]))
