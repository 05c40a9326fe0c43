"""Optimal jamming policies for proactive eavesdropping over two-round HARQ links."""

from .closed_form import (
    expected_jam_power,
    expected_success,
    outage_prob_round1,
    p_eav_combining,
    p_eav_no_combining,
    phi,
)
from .params import ChannelDraw, SystemParams, db_to_linear, g_bar, gamma_bar, sample_packet
from .policy import (
    ConvergenceError,
    DualSolution,
    JammingPolicy,
    Mode,
    passive_policy,
    solve_p1,
    solve_p2,
)
from .sim import PacketTrace, SimReport, run_simulation, simulate_packet

__version__ = "0.1.0"
