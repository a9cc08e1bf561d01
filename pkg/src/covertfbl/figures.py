"""Figure-data jobs: every curve set is reproduced as a deterministic CSV.

Each job has frozen defaults (the settings the published curves use), an
override map validated before any computation, and byte-stable output:
shortest round-trip float formatting, '.' decimal separator, '\\n' line
endings, and a '#' provenance line carrying version and parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

from . import __version__
from .channel_metrics import ChannelPoint, bound_family, tvd_exact
from .covert_design import (
    CovertBudget,
    power_exact,
    power_necessary,
    power_sufficient,
    throughput_bounds,
)
from .errors import DomainError
from .expansions import Branch, ExpansionConfig, tvd_expansion

__all__ = ["FigureJob", "run_figure", "parse_grid", "FIGURE_IDS", "figure_defaults"]

FIGURE_IDS = ("FIG2", "FIG3", "FIG4", "FIG5", "FIG6", "FIG7", "FIG8")


def parse_grid(spec: str, integer: bool = False) -> list:
    """Parse a 'min:max:points:log|lin' grid specification.

    Integer grids are rounded and deduplicated while preserving order, so a
    dense log grid over a narrow integer range simply thins out.
    """
    parts = str(spec).split(":")
    if len(parts) != 4:
        raise DomainError(f"grid must look like 'min:max:points:log', got {spec!r}")
    try:
        lo = float(parts[0])
        hi = float(parts[1])
        points = int(parts[2])
    except ValueError as exc:
        raise DomainError(f"unparseable grid {spec!r}: {exc}") from None
    kind = parts[3].strip().lower()
    if kind not in ("log", "lin"):
        raise DomainError(f"grid kind must be 'log' or 'lin', got {parts[3]!r}")
    if points < 2:
        raise DomainError(f"grid needs at least 2 points, got {points}")
    if not (lo < hi):
        raise DomainError(f"grid needs min < max, got {lo!r} >= {hi!r}")
    if kind == "log" and lo <= 0:
        raise DomainError("log grid needs min > 0")
    if kind == "log":
        la, lb = math.log(lo), math.log(hi)
        vals = [math.exp(la + i * (lb - la) / (points - 1)) for i in range(points)]
        vals[0], vals[-1] = lo, hi
    else:
        vals = [lo + i * (hi - lo) / (points - 1) for i in range(points)]
        vals[-1] = hi
    if integer:
        out: list[int] = []
        for v in vals:
            iv = int(round(v))
            if not out or iv > out[-1]:
                out.append(iv)
        return out
    return vals


@dataclass(frozen=True)
class FigureJob:
    """A figure identifier, optional parameter overrides and an output path."""

    figure_id: str
    out_path: str
    overrides: Mapping[str, object] = field(default_factory=dict)


# Per-figure default parameters and the override keys each one accepts.
_DEFAULTS: dict[str, dict[str, object]] = {
    "FIG2": {"delta": 0.1, "grid": "100:10000:50:log"},
    "FIG3": {"delta": 0.01, "grid": "100:10000:50:log"},
    "FIG4": {"delta": 0.1, "eps": 0.1, "grid": "500:100000:50:log"},
    "FIG5": {"n": 2000, "delta_grid": "0.01:0.99:50:lin"},
    "FIG6": {"taus": (0.3, 0.4, 0.5, 0.6, 0.7), "grid": "100:1000000:50:log"},
    "FIG7": {"tau": 0.3, "terms": 40, "grid": "1000:1000000:50:log"},
    "FIG8": {"tau": 0.6, "terms": 40, "grid": "1000:1000000:50:log"},
}


def figure_defaults(figure_id: str) -> dict[str, object]:
    """Copy of the frozen default parameter map of one figure."""
    fid = str(figure_id).upper()
    if fid not in _DEFAULTS:
        raise DomainError(f"unknown figure id {figure_id!r}; expected one of {FIGURE_IDS}")
    return dict(_DEFAULTS[fid])


def _check_prob(name: str, v: object) -> float:
    if not isinstance(v, (int, float)) or isinstance(v, bool) or not (0.0 < float(v) < 1.0):
        raise DomainError(f"override {name} must be a number in (0, 1), got {v!r}")
    return float(v)


def _check_tau(v: object) -> float:
    if not isinstance(v, (int, float)) or isinstance(v, bool) or not (0.0 < float(v) < 1.0):
        raise DomainError(f"override tau must be a number in (0, 1), got {v!r}")
    return float(v)


def _merged_params(fid: str, overrides: Mapping[str, object]) -> dict[str, object]:
    params = dict(_DEFAULTS[fid])
    for key, val in overrides.items():
        if key not in params:
            raise DomainError(
                f"unknown override {key!r} for {fid}; allowed: {sorted(params)}"
            )
        params[key] = val
    if "delta" in params:
        params["delta"] = _check_prob("delta", params["delta"])
    if "eps" in params:
        params["eps"] = _check_prob("eps", params["eps"])
    if "tau" in params:
        params["tau"] = _check_tau(params["tau"])
    if "taus" in params:
        taus = params["taus"]
        if isinstance(taus, str):
            taus = tuple(float(t) for t in taus.split(","))
        params["taus"] = tuple(_check_tau(t) for t in taus)
    if "n" in params:
        n = params["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 2:
            raise DomainError(f"override n must be an integer >= 2, got {n!r}")
    if "terms" in params:
        t = params["terms"]
        if not isinstance(t, int) or isinstance(t, bool) or not (0 <= t <= 60):
            raise DomainError(f"override terms must be an integer in [0, 60], got {t!r}")
    for key in ("grid", "delta_grid"):
        if key in params:
            parse_grid(str(params[key]))  # reject malformed grids before computing
    return params


def _fmt(v: object) -> str:
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def _provenance(fid: str, params: Mapping[str, object]) -> str:
    rendered = " ".join(
        f"{k}={','.join(_fmt(t) for t in v) if isinstance(v, tuple) else v}"
        for k, v in sorted(params.items())
    )
    return f"# covertfbl {__version__} figure={fid} {rendered}"


def _rows_fig_power_vs_n(params: Mapping[str, object]) -> tuple[list[str], list[list]]:
    delta = params["delta"]
    ns = parse_grid(str(params["grid"]), integer=True)
    header = ["n", "theta_necessary", "theta_sufficient", "theta_exact"]
    rows = [[n, power_necessary(n, delta), power_sufficient(n, delta),
             power_exact(n, delta)] for n in ns]
    return header, rows


def _rows_fig4(params: Mapping[str, object]) -> tuple[list[str], list[list]]:
    budget = CovertBudget(delta=params["delta"], eps=params["eps"])
    ns = parse_grid(str(params["grid"]), integer=True)
    header = ["n", "upper_bits", "lower_bits", "approx_bits", "sqrt_n"]
    rows = []
    for n in ns:
        rep = throughput_bounds(n, budget)
        rows.append([n, rep.upper_bits, rep.lower_bits, rep.log_m, math.sqrt(n)])
    return header, rows


def _rows_fig5(params: Mapping[str, object]) -> tuple[list[str], list[list]]:
    n = params["n"]
    deltas = parse_grid(str(params["delta_grid"]))
    header = ["delta", "theta_necessary", "theta_sufficient", "theta_exact"]
    rows = [[d, power_necessary(n, d), power_sufficient(n, d), power_exact(n, d)]
            for d in deltas]
    return header, rows


def _rows_fig6(params: Mapping[str, object]) -> tuple[list[str], list[list]]:
    taus = params["taus"]
    ns = parse_grid(str(params["grid"]), integer=True)
    header = ["n"] + [f"tvd@tau={_fmt(t)}" for t in taus]
    rows = []
    for n in ns:
        rows.append([n] + [tvd_exact(ChannelPoint.from_tau(n, t)) for t in taus])
    return header, rows


def _rows_fig78(params: Mapping[str, object], branch: Branch,
                kl_column: bool) -> tuple[list[str], list[list]]:
    tau = params["tau"]
    ns = parse_grid(str(params["grid"]), integer=True)
    cfg = ExpansionConfig(branch=branch, k_max=params["terms"])
    mid = ["kl_bound"] if kl_column else ["h_sq"]
    header = ["n", "tvd"] + mid + ["hellinger_ub_improved", "expansion"]
    rows = []
    for n in ns:
        cp = ChannelPoint.from_tau(n, tau)
        rep = bound_family(cp)
        middle = rep.pinsker_ub if kl_column else rep.h_sq
        approx = tvd_expansion(cp, cfg).value
        rows.append([n, rep.tvd, middle, rep.hellinger_ub_improved, approx])
    return header, rows


_BUILDERS: dict[str, Callable[[Mapping[str, object]], tuple[list[str], list[list]]]] = {
    "FIG2": _rows_fig_power_vs_n,
    "FIG3": _rows_fig_power_vs_n,
    "FIG4": _rows_fig4,
    "FIG5": _rows_fig5,
    "FIG6": _rows_fig6,
    "FIG7": lambda p: _rows_fig78(p, Branch.TAIL_LOWER, kl_column=False),
    "FIG8": lambda p: _rows_fig78(p, Branch.TRANSITION, kl_column=True),
}


def run_figure(job: FigureJob) -> Path:
    """Validate, compute and write one figure CSV; returns the output path."""
    fid = str(job.figure_id).upper()
    if fid not in _DEFAULTS:
        raise DomainError(f"unknown figure id {job.figure_id!r}; expected one of {FIGURE_IDS}")
    params = _merged_params(fid, job.overrides)
    header, rows = _BUILDERS[fid](params)
    out = Path(job.out_path)
    if out.parent and not out.parent.exists():
        raise DomainError(f"output directory does not exist: {out.parent}")
    lines = [_provenance(fid, params), ",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    out.write_bytes(("\n".join(lines) + "\n").encode("ascii"))
    return out
