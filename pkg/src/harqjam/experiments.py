"""Parameter sweeps behind the threshold / vs-Q_ave / vs-rate figures."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .closed_form import expected_success
from .params import SystemParams, db_to_linear
from .policy import passive_policy, solve_p1, solve_p2
from .sim import run_simulation

__all__ = [
    "FIGURES",
    "SCHEMES",
    "DEFAULT_GRIDS",
    "SweepSpec",
    "ExperimentRow",
    "SweepError",
    "run_sweep",
    "write_csv",
    "read_csv",
    "write_plot_script",
]

FIGURES = ("thresholds", "vs_qave", "vs_rate")
SCHEMES = ("passive_nc", "passive_cc", "proactive_nc", "proactive_cc")
DEFAULT_GRIDS = {
    "thresholds": tuple(float(x) for x in range(0, 31, 2)),
    "vs_qave": tuple(float(x) for x in range(0, 31, 2)),
    "vs_rate": tuple(0.25 * k for k in range(1, 17)),
}
DEFAULT_SCHEMES = {
    "thresholds": ("proactive_nc", "proactive_cc"),
    "vs_qave": SCHEMES,
    "vs_rate": SCHEMES,
}
VS_RATE_QAVE_DB = 20.0
CSV_HEADER = ("figure", "x", "scheme", "analytic", "mc", "mc_stderr", "threshold", "jam_power", "mu_star")


class SweepError(RuntimeError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    figure: str
    x_values: Sequence[float] = ()
    schemes: Sequence[str] = ()
    mc_packets: int = 0
    seed: int = 0
    q_ave_db: float = VS_RATE_QAVE_DB  # fixed budget for vs_rate
    tol: float = 1e-8

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ValueError(f"unknown figure {self.figure!r}; expected one of {FIGURES}")
        xs = tuple(float(x) for x in (self.x_values or DEFAULT_GRIDS[self.figure]))
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("x_values must be strictly increasing")
        schemes = tuple(self.schemes or DEFAULT_SCHEMES[self.figure])
        bad = [s for s in schemes if s not in SCHEMES]
        if bad:
            raise ValueError(f"unknown schemes {bad}")
        if self.mc_packets < 0:
            raise ValueError("mc_packets must be >= 0")
        object.__setattr__(self, "x_values", xs)
        object.__setattr__(self, "schemes", tuple(s for s in SCHEMES if s in schemes))


@dataclass(frozen=True)
class ExperimentRow:
    figure: str
    x: float
    scheme: str
    analytic: float
    mc: Optional[float] = None
    mc_stderr: Optional[float] = None
    threshold: Optional[float] = None
    jam_power: Optional[float] = None
    mu_star: Optional[float] = None

    @property
    def flagged(self) -> bool:
        """MC and analytic disagree by more than 4 standard errors."""
        if self.mc is None or self.mc_stderr is None:
            return False
        return abs(self.analytic - self.mc) > 4.0 * max(self.mc_stderr, 1e-12)


def _solve(params: SystemParams, scheme: str, q_ave: float, tol: float):
    combining = scheme.endswith("_cc")
    if scheme.startswith("passive"):
        return passive_policy(), combining, None
    if combining:
        sol = solve_p2(params, q_ave, tol=tol)
        return sol.policy, True, sol.mu_star
    return solve_p1(params, q_ave), False, None


def run_sweep(spec: SweepSpec, params: Optional[SystemParams] = None) -> list[ExperimentRow]:
    params = params or SystemParams()
    rows = []
    for i, x in enumerate(spec.x_values):
        if spec.figure == "vs_rate":
            point = params.replace(rate=x)
            q_ave = db_to_linear(spec.q_ave_db)
        else:
            point = params
            q_ave = db_to_linear(x)
        for j, scheme in enumerate(spec.schemes):
            try:
                policy, combining, mu = _solve(point, scheme, q_ave, spec.tol)
            except (ArithmeticError, RuntimeError, ValueError) as exc:
                raise SweepError(f"{spec.figure}: solver failed at x={x!r}, scheme={scheme}: {exc}") from exc
            if spec.figure == "thresholds":
                analytic = policy.threshold
            else:
                analytic = expected_success(point, policy, combining)
            mc = se = None
            if spec.mc_packets and spec.figure != "thresholds":
                seed = int(np.random.SeedSequence([spec.seed, i, j]).generate_state(1)[0])
                rep = run_simulation(point, policy, combining, spec.mc_packets, seed)
                mc, se = rep.success_rate, rep.stderr
            rows.append(
                ExperimentRow(
                    figure=spec.figure,
                    x=x,
                    scheme=scheme,
                    analytic=analytic,
                    mc=mc,
                    mc_stderr=se,
                    threshold=policy.threshold,
                    jam_power=policy.jam_power,
                    mu_star=mu,
                )
            )
    return rows


def _fmt(v) -> str:
    return "" if v is None else format(float(v), ".10g")


def _sort_key(row: ExperimentRow):
    return (FIGURES.index(row.figure), row.x, SCHEMES.index(row.scheme))


def write_csv(rows: Sequence[ExperimentRow], path) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for r in sorted(rows, key=_sort_key):
                writer.writerow(
                    [r.figure, _fmt(r.x), r.scheme]
                    + [_fmt(getattr(r, name)) for name in CSV_HEADER[3:]]
                )
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def read_csv(path) -> list[ExperimentRow]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        rows = []
        for rec in reader:
            num = {k: (float(rec[k]) if rec[k] != "" else None) for k in CSV_HEADER[3:]}
            rows.append(ExperimentRow(figure=rec["figure"], x=float(rec["x"]), scheme=rec["scheme"], **num))
    return rows


_LABELS = {
    "passive_nc": "passive, without combining",
    "passive_cc": "passive, with combining",
    "proactive_nc": "proactive, without combining",
    "proactive_cc": "proactive, with combining",
}
_THRESHOLD_LABELS = {"proactive_nc": "without combining", "proactive_cc": "with combining"}
_XLABELS = {
    "thresholds": "average jamming power Q_ave (dB)",
    "vs_qave": "average jamming power Q_ave (dB)",
    "vs_rate": "rate R (bps/Hz)",
}
_YLABELS = {
    "thresholds": "jamming threshold",
    "vs_qave": "successful eavesdropping probability",
    "vs_rate": "successful eavesdropping probability",
}


def write_plot_script(rows: Sequence[ExperimentRow], path, csv_name: Optional[str] = None) -> None:
    """Write a gnuplot script that renders ``rows`` from their CSV.

    ``csv_name`` defaults to the script's own name with a ``.csv`` suffix.
    """
    if not rows:
        raise ValueError("no rows to plot")
    path = Path(path)
    csv_name = csv_name or path.with_suffix(".csv").name
    figure = rows[0].figure
    present = [s for s in SCHEMES if any(r.scheme == s for r in rows)]
    labels = _THRESHOLD_LABELS if figure == "thresholds" else _LABELS
    has_mc = any(r.mc is not None for r in rows)

    lines = [
        "# gnuplot script",
        f"# usage: gnuplot {path.name}",
        'set terminal pngcairo size 800,600',
        f"set output '{path.with_suffix('.png').name}'",
        'set datafile separator ","',
        "set key bottom right",
        "set grid",
        f'set xlabel "{_XLABELS[figure]}"',
        f'set ylabel "{_YLABELS[figure]}"',
    ]
    plots = []
    for k, scheme in enumerate(present, start=1):
        sel = f'(strcol(3) eq "{scheme}" ? $4 : NaN)'
        plots.append(f"'{csv_name}' every ::1 using 2:{sel} with linespoints lt {k} title \"{labels.get(scheme, scheme)}\"")
        if has_mc:
            mc_sel = f'(strcol(3) eq "{scheme}" ? $5 : NaN)'
            plots.append(f"'{csv_name}' every ::1 using 2:{mc_sel} with points lt {k} pt 6 notitle")
    lines.append("plot " + ", \\\n     ".join(plots))
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write plot script to {path}: {exc}") from exc
