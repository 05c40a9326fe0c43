"""Per-chunk packet kernels.

Both backends consume a ``(n, 5)`` block of uniforms (columns ordered as
``ChannelDraw``) and return ``(successes, jams, retransmissions)``. The numba
backend is used when numba imports and ``HARQJAM_DISABLE_NUMBA`` is unset or
"0"; the numpy backend is always available for cross-checking.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = ["BACKEND", "count_chunk", "count_chunk_numpy", "packet_outcomes"]


def packet_outcomes(g, p0, sigma2, gamma_bar, g_bar, tau, qhat, combining):
    """Vectorised protocol outcome for gains ``g`` of shape ``(n, 5)``.

    Returns a dict of per-packet arrays: ``jam_power``, ``sr_decoded_r1``,
    ``monitor_decoded_r1``, ``mrc_used``, ``monitor_decoded_final``.
    """
    g0, g1, g2, _, g1b = g[:, 0], g[:, 1], g[:, 2], g[:, 3], g[:, 4]
    jam = (g1 < tau) & (qhat > 0)
    q = np.where(jam, qhat, 0.0)
    sr_ok = g0 * p0 / (g2 * q + sigma2) >= gamma_bar
    mon_r1 = ~jam & (g1 >= g_bar)
    pending = ~sr_ok & ~mon_r1
    mrc = pending & ~jam & combining
    r2 = np.where(mrc, g1 + g1b, g1b) >= g_bar
    return {
        "jam_power": q,
        "sr_decoded_r1": sr_ok,
        "monitor_decoded_r1": mon_r1,
        "mrc_used": mrc,
        "monitor_decoded_final": mon_r1 | (pending & r2),
    }


def count_chunk_numpy(u, lam, p0, sigma2, gamma_bar, g_bar, tau, qhat, combining):
    g = -np.log1p(-u) / lam
    out = packet_outcomes(g, p0, sigma2, gamma_bar, g_bar, tau, qhat, combining)
    return (
        int(np.count_nonzero(out["monitor_decoded_final"])),
        int(np.count_nonzero(out["jam_power"] > 0)),
        int(np.count_nonzero(~out["sr_decoded_r1"])),
    )


def _count_chunk_loop(u, lam, p0, sigma2, gamma_bar, g_bar, tau, qhat, combining):
    successes = 0
    jams = 0
    retx = 0
    for i in range(u.shape[0]):
        g0 = -np.log1p(-u[i, 0]) / lam[0]
        g1 = -np.log1p(-u[i, 1]) / lam[1]
        jam = g1 < tau and qhat > 0.0
        q = qhat if jam else 0.0
        if jam:
            jams += 1
            g2 = -np.log1p(-u[i, 2]) / lam[2]
        else:
            g2 = 0.0
        sr_ok = g0 * p0 / (g2 * q + sigma2) >= gamma_bar
        if not sr_ok:
            retx += 1
        if not jam and g1 >= g_bar:
            successes += 1
        elif not sr_ok:
            g1b = -np.log1p(-u[i, 4]) / lam[4]
            if combining and not jam:
                g1b += g1
            if g1b >= g_bar:
                successes += 1
    return successes, jams, retx


def _disabled() -> bool:
    return os.environ.get("HARQJAM_DISABLE_NUMBA", "0").lower() not in ("", "0", "false", "no")


BACKEND = "numpy"
count_chunk = count_chunk_numpy

if not _disabled():
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - depends on environment
        pass
    else:
        _count_chunk_jit = njit(cache=True, nogil=True)(_count_chunk_loop)

        def count_chunk(u, lam, p0, sigma2, gamma_bar, g_bar, tau, qhat, combining):
            s, j, r = _count_chunk_jit(u, lam, p0, sigma2, gamma_bar, g_bar, tau, qhat, bool(combining))
            return int(s), int(j), int(r)

        BACKEND = "numba"
