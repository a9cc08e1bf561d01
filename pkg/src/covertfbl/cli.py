"""Command-line front end.

Subcommands map 1:1 onto the library operations; `fig` reproduces the
published curve sets as CSV files and `accept` runs the acceptance suite.

Exit codes: 0 success, 1 usage/domain error, 2 numerical failure,
3 acceptance failure.  COVERT_FBL_THREADS caps internal worker counts.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Optional, Sequence

from . import __version__
from .asymptotics import Quantity, SweepSpec, fit_subhalf, fit_superhalf, \
    kl_asymptote_check, sweep
from .channel_metrics import ChannelPoint, alpha_beta, bound_family, thresholds, \
    tvd_exact
from .covert_design import CovertBudget, power_bracket, throughput_bounds
from .errors import (
    BracketError,
    ConvergenceError,
    DomainError,
    GridError,
    PhiInstabilityError,
    QuadratureError,
    SeriesDivergenceError,
    ToleranceNotReached,
)
from .expansions import AOffset, Branch, ExpansionConfig, TruncationRule, \
    gamma_half_n_prefactor, tvd_expansion
from .figures import FIGURE_IDS, FigureJob, parse_grid, run_figure
from .oracle import McConfig, mc_tvd, quad_tvd

_NUMERICAL_ERRORS = (ConvergenceError, BracketError, ToleranceNotReached,
                     QuadratureError, PhiInstabilityError, SeriesDivergenceError)
_LN2 = math.log(2.0)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage failures map to exit code 1."""

    def error(self, message):
        raise _UsageError(message)


def _channel_point(args) -> ChannelPoint:
    if args.theta is None and args.tau is None:
        raise _UsageError("one of --theta or --tau is required")
    if args.theta is not None and args.tau is not None:
        raise _UsageError("--theta and --tau are mutually exclusive")
    if args.tau is not None:
        return ChannelPoint.from_tau(args.n, args.tau, c=args.c, sigma_sq=args.sigma_sq)
    return ChannelPoint(n=args.n, theta=args.theta, sigma_sq=args.sigma_sq)


def _print_kv(pairs) -> None:
    for key, value in pairs:
        print(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")


def _cmd_tvd(args) -> int:
    cp = _channel_point(args)
    value = tvd_exact(cp)
    pairs = [("n", cp.n), ("theta", cp.theta), ("tvd", value)]
    if cp.theta > 0:
        t = thresholds(cp)
        pair = alpha_beta(cp)
        pairs += [("alpha", pair.alpha), ("beta", pair.beta),
                  ("f", t.f), ("g", t.g), ("r_sq", t.r_sq)]
    _print_kv(pairs)
    return 0


def _cmd_bounds(args) -> int:
    cp = _channel_point(args)
    rep = bound_family(cp)
    scale = 1.0 if args.units == "nats" else 1.0 / _LN2
    _print_kv([
        ("n", cp.n), ("theta", cp.theta), ("units", args.units),
        ("tvd", rep.tvd), ("h_sq", rep.h_sq),
        ("kl_fwd", rep.kl_fwd * scale), ("kl_rev", rep.kl_rev * scale),
        ("pinsker_ub", rep.pinsker_ub), ("hellinger_lb", rep.hellinger_lb),
        ("hellinger_ub_sqrt2", rep.hellinger_ub_sqrt2),
        ("hellinger_ub_improved", rep.hellinger_ub_improved),
        ("sason_exp_ub", rep.sason_exp_ub),
    ])
    return 0


def _cmd_power(args) -> int:
    br = power_bracket(args.n, args.delta, tol=args.tol)
    _print_kv([
        ("n", args.n), ("delta", args.delta),
        ("theta_necessary", br.theta_necessary),
        ("theta_sufficient", br.theta_sufficient),
        ("theta_exact", br.theta_exact),
        ("y", br.y), ("y0", br.y0), ("lambda", br.lam), ("lambda1", br.lam1),
    ])
    return 0


def _cmd_throughput(args) -> int:
    budget = CovertBudget(delta=args.delta, eps=args.eps)
    rep = throughput_bounds(args.n, budget, tol=args.tol)
    _print_kv([
        ("n", args.n), ("delta", args.delta), ("eps", args.eps),
        ("capacity_bits", rep.capacity_bits), ("dispersion", rep.dispersion),
        ("log_m_bits", rep.log_m),
        ("upper_bits", rep.upper_bits), ("lower_bits", rep.lower_bits),
    ])
    return 0


_BRANCHES = {
    "tail": Branch.TAIL_LOWER,
    "tail-lower": Branch.TAIL_LOWER,
    "tail-upper": Branch.TAIL_UPPER,
    "transition": Branch.TRANSITION,
}
_OFFSETS = {"half-n": AOffset.HALF_N, "half-n-minus-1": AOffset.HALF_N_MINUS_1}


def _cmd_expand(args) -> int:
    cp = _channel_point(args)
    cfg = ExpansionConfig(
        branch=_BRANCHES[args.branch],
        k_max=args.terms,
        truncation_rule=TruncationRule.OPTIMAL if args.rule == "optimal"
        else TruncationRule.FIXED_K,
        a_offset=_OFFSETS[args.offset] if args.offset else None,
    )
    res = tvd_expansion(cp, cfg)
    diag = gamma_half_n_prefactor(cp.n) if cp.n >= 2 else None
    _print_kv([
        ("n", cp.n), ("theta", cp.theta), ("branch", res.branch.value),
        ("a_offset", res.a_offset.value), ("k_used", res.k_used),
        ("value", res.value), ("value_clamped", res.value_clamped),
        ("rel_err_vs_exact", res.rel_err_vs_exact),
        ("regime_warning", res.regime_warning or "-"),
    ])
    if diag is not None:
        _print_kv([("prefactor_shortcut_log", diag.shortcut_log),
                   ("prefactor_exact_log", diag.exact_log),
                   ("prefactor_gap", diag.gap)])
    for k, t in enumerate(res.terms):
        print(f"term[{k}] = {t!r}")
    return 0


def _cmd_rates(args) -> int:
    n_grid = tuple(int(v) for v in parse_grid(args.grid, integer=True))
    quantity = Quantity.ONE_MINUS_TVD if args.tau < 0.5 else Quantity.TVD
    spec = SweepSpec(tau=args.tau, n_grid=n_grid, quantity=quantity, c=args.c)
    for n, v in sweep(spec):
        print(f"{n},{v!r}")
    if args.tau < 0.5:
        fit = fit_subhalf(spec)
        _print_kv([("model", fit.model.value), ("p", fit.p), ("coef", fit.coef),
                   ("r_squared", fit.r_squared)])
    elif args.tau > 0.5:
        fit = fit_superhalf(spec)
        _print_kv([("model", fit.model.value), ("p", fit.p), ("coef", fit.coef),
                   ("r_squared", fit.r_squared)])
        h2 = fit_superhalf(SweepSpec(tau=args.tau, n_grid=n_grid,
                                     quantity=Quantity.H_SQ, c=args.c))
        _print_kv([("h_sq_slope", h2.p)])
        last_n, last_kl, last_asym = kl_asymptote_check(spec)[-1]
        _print_kv([("kl_rev_bits_at_max_n", last_kl),
                   ("kl_asymptote_bits_at_max_n", last_asym)])
    else:
        print("tau = 0.5: stationary regime, no rate fit defined")
    return 0


def _cmd_mc(args) -> int:
    cp = _channel_point(args)
    cfg = McConfig(samples=args.samples, seed=args.seed, chunk=args.chunk)
    est = mc_tvd(cp, cfg)
    exact = tvd_exact(cp)
    _print_kv([
        ("n", cp.n), ("theta", cp.theta), ("samples", args.samples),
        ("seed", args.seed),
        ("tvd_hat", est.tvd_hat), ("std_err", est.std_err),
        ("alpha_hat", est.alpha_hat), ("beta_hat", est.beta_hat),
        ("tvd_exact", exact),
        ("z_score", (est.tvd_hat - exact) / est.std_err if est.std_err > 0 else 0.0),
    ])
    if args.quad:
        _print_kv([("tvd_quad", quad_tvd(cp, tol=args.tol))])
    return 0


def _cmd_fig(args) -> int:
    overrides = {}
    for key in ("delta", "eps", "tau", "n", "terms"):
        val = getattr(args, key, None)
        if val is not None:
            overrides[key] = val
    if args.taus is not None:
        overrides["taus"] = args.taus
    if args.grid is not None:
        fid = args.figure_id.upper()
        overrides["delta_grid" if fid == "FIG5" else "grid"] = args.grid
    path = run_figure(FigureJob(args.figure_id, args.out, overrides))
    print(f"wrote {path}")
    return 0


def _cmd_accept(args) -> int:
    from .acceptance import run_acceptance

    results = run_acceptance(suite=args.suite.upper())
    failed = [r for r in results if not r.passed and not r.skipped]
    return 3 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="covertfbl",
        description="Finite-blocklength covert communication over AWGN: exact "
                    "TVD, bounds, power design, expansions, rates and oracles.",
    )
    parser.add_argument("--version", action="version", version=f"covertfbl {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add_point_args(p, tau_ok=True):
        p.add_argument("--n", type=int, required=True, help="blocklength (channel uses)")
        p.add_argument("--theta", type=float, help="snr p/sigma^2")
        if tau_ok:
            p.add_argument("--tau", type=float,
                           help="power-scaling exponent; theta = c * n^-tau")
            p.add_argument("--c", type=float, default=1.0,
                           help="scaling constant for --tau (default 1)")
        p.add_argument("--sigma-sq", dest="sigma_sq", type=float, default=1.0,
                       help="noise variance (default 1; only theta affects outputs)")

    p = sub.add_parser("tvd", help="exact TVD, operating point and thresholds")
    add_point_args(p)
    p.set_defaults(fn=_cmd_tvd)

    p = sub.add_parser("bounds", help="exact TVD plus the full bound family")
    add_point_args(p)
    p.add_argument("--units", choices=("bits", "nats"), default="bits",
                   help="unit for the K-L divergences (default bits)")
    p.set_defaults(fn=_cmd_bounds)

    p = sub.add_parser("power", help="necessary/sufficient/exact power for a TVD budget")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, required=True, help="TVD budget in (0,1)")
    p.add_argument("--tol", type=float, default=1e-10, help="inversion tolerance")
    p.set_defaults(fn=_cmd_power)

    p = sub.add_parser("throughput", help="normal-approximation throughput bracket")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--eps", type=float, required=True, help="decoding error in (0,1)")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(fn=_cmd_throughput)

    p = sub.add_parser("expand", help="truncated-series TVD approximation")
    add_point_args(p)
    p.add_argument("--branch", choices=sorted(_BRANCHES), default="transition")
    p.add_argument("--terms", type=int, default=40, help="truncation order cap (<= 60)")
    p.add_argument("--rule", choices=("optimal", "fixed"), default="optimal")
    p.add_argument("--offset", choices=sorted(_OFFSETS), default=None,
                   help="shape convention (default: frozen per-branch choice)")
    p.set_defaults(fn=_cmd_expand)

    p = sub.add_parser("rates", help="sweep TVD along theta = c n^-tau and fit rates")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--grid", default="1000:1000000:9:log",
                   help="blocklength grid min:max:points:log|lin")
    p.set_defaults(fn=_cmd_rates)

    p = sub.add_parser("mc", help="Monte Carlo estimate of the operating point")
    add_point_args(p)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chunk", type=int, default=250_000)
    p.add_argument("--quad", action="store_true", help="also run the quadrature oracle")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(fn=_cmd_mc)

    p = sub.add_parser("fig", help="write one figure dataset as CSV")
    p.add_argument("figure_id", metavar="id", choices=[f.lower() for f in FIGURE_IDS]
                   + list(FIGURE_IDS), help="FIG2 .. FIG8")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--delta", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--taus", help="comma-separated tau list (FIG6)")
    p.add_argument("--n", type=int, help="fixed blocklength (FIG5)")
    p.add_argument("--terms", type=int, help="expansion truncation cap (FIG7/FIG8)")
    p.add_argument("--grid", help="grid override min:max:points:log|lin")
    p.set_defaults(fn=_cmd_fig)

    p = sub.add_parser("accept", help="run the acceptance suite")
    p.add_argument("--suite", choices=("fast", "full"), default="fast")
    p.set_defaults(fn=_cmd_accept)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "fn", None):
            parser.print_help()
            return 1
        return args.fn(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, GridError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 1
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
