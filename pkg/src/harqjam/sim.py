"""Packet-level Monte Carlo of the two-round HARQ link with a half-duplex monitor."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .params import ChannelDraw, SystemParams, chunk_rng, g_bar, gamma_bar, sample_gains

__all__ = [
    "CHUNK",
    "PacketTrace",
    "SimReport",
    "simulate_packet",
    "simulate_traces",
    "run_simulation",
]

CHUNK = 1 << 16


@dataclass(frozen=True)
class PacketTrace:
    draw: ChannelDraw
    jam_power: float
    sr_decoded_r1: bool
    retransmitted: bool
    monitor_decoded_r1: bool
    monitor_decoded_final: bool
    mrc_used: bool


@dataclass(frozen=True)
class SimReport:
    packets: int
    successes: int
    jams: int
    retransmissions: int
    jam_power: float

    @property
    def success_rate(self) -> float:
        return self.successes / self.packets

    @property
    def stderr(self) -> float:
        p = self.success_rate
        return math.sqrt(p * (1.0 - p) / self.packets)

    @property
    def avg_jam_power(self) -> float:
        return self.jams * self.jam_power / self.packets

    @property
    def retransmission_rate(self) -> float:
        return self.retransmissions / self.packets

    @property
    def jam_rate(self) -> float:
        return self.jams / self.packets


def _policy_args(params, policy):
    return (
        params.p0,
        params.sigma2,
        gamma_bar(params),
        g_bar(params),
        float(policy.threshold),
        float(policy.jam_power),
    )


def simulate_packet(params: SystemParams, policy, combining: bool, draw: ChannelDraw) -> PacketTrace:
    g = np.array([[draw.g0_r1, draw.g1_r1, draw.g2_r1, draw.g0_r2, draw.g1_r2]])
    out = _kernels.packet_outcomes(g, *_policy_args(params, policy), bool(combining))
    sr_ok = bool(out["sr_decoded_r1"][0])
    return PacketTrace(
        draw=draw,
        jam_power=float(out["jam_power"][0]),
        sr_decoded_r1=sr_ok,
        retransmitted=not sr_ok,
        monitor_decoded_r1=bool(out["monitor_decoded_r1"][0]),
        monitor_decoded_final=bool(out["monitor_decoded_final"][0]),
        mrc_used=bool(out["mrc_used"][0]),
    )


def simulate_traces(params: SystemParams, policy, combining: bool, n: int, seed: int) -> dict:
    """Per-packet outcome arrays for ``n`` packets, plus the sampled ``gains``.

    Uses the same ``(seed, chunk)`` streams as :func:`run_simulation`.
    """
    parts = []
    for idx, size in enumerate(_chunk_sizes(n)):
        parts.append(sample_gains(params, chunk_rng(seed, idx), size))
    g = np.concatenate(parts) if parts else np.empty((0, 5))
    out = _kernels.packet_outcomes(g, *_policy_args(params, policy), bool(combining))
    out["gains"] = g
    out["retransmitted"] = ~out["sr_decoded_r1"]
    return out


def _chunk_sizes(n: int) -> list[int]:
    full, rest = divmod(n, CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def run_simulation(
    params: SystemParams,
    policy,
    combining: bool,
    n: int,
    seed: int = 0,
    workers: int = 1,
) -> SimReport:
    """Simulate ``n`` packets under ``policy``.

    Packets are split into fixed chunks of :data:`CHUNK`, chunk ``i`` drawing from
    the stream keyed by ``(seed, i)``; counts are merged in chunk order, so the
    report depends only on ``(seed, n)`` and not on ``workers``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    lam = np.array([params.lambda0, params.lambda1, params.lambda2, params.lambda0, params.lambda1])
    args = _policy_args(params, policy)
    combining = bool(combining)

    def one(job):
        idx, size = job
        u = chunk_rng(seed, idx).random((size, 5))
        return _kernels.count_chunk(u, lam, *args, combining)

    jobs = list(enumerate(_chunk_sizes(n)))
    if workers == 1:
        results = [one(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, jobs))
    s, j, r = (sum(col) for col in zip(*results))
    jam_power = float(policy.jam_power) if float(policy.threshold) > 0 else 0.0
    return SimReport(packets=n, successes=s, jams=j, retransmissions=r, jam_power=jam_power)
