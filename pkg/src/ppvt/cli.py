"""Command-line experiment runner.

Commands: ``sample-ppp``, ``verify-identity``, ``mean-ues``, ``coverage``,
``bandwidth``, ``figure``.  Values are read from flags, falling back to an
optional ``--config`` key=value file, falling back to documented defaults.
dB/linear conversion happens here only — the library is linear throughout.

Exit codes: 0 success (and, for verification runs, all checks passed);
1 numerical or statistical failure; 2 usage or validation error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from typing import Callable, Sequence

from . import analysis, netsim
from .config import (
    ConfigError,
    DEFAULTS,
    db_to_linear,
    parse_bool,
    parse_config_file,
    parse_db_grid,
    parse_float,
    parse_float_list,
    parse_int,
    scenario_from_values,
)
from .geometry import ORIGIN, Disk
from .identities import (
    LEMMA1_SUITE,
    REMARK_PRODUCT_SUITE,
    REMARK_SUM_SUITE,
    lemma1_closed_form,
    lemma1_monte_carlo,
    remark_product_closed_form,
    remark_product_monte_carlo,
    remark_sum_closed_form,
    remark_sum_monte_carlo,
    typical_cell_window,
)
from .ppp import sample_ppp
from .quadrature import QuadratureError
from .rng import replication_seed
from .voronoi import membership_agreement

__all__ = ["main", "build_parser"]


def _emit(text: str, out_path: str) -> None:
    """Write the complete output in one shot (file when a path is given)."""
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


class _Resolver:
    """Flag > config file > default, with typed access."""

    def __init__(self, args: argparse.Namespace):
        self.values = dict(DEFAULTS)
        config_path = getattr(args, "config", None)
        if config_path:
            self.values.update(parse_config_file(config_path))
        for key in self.values:
            flag = getattr(args, key, None)
            if flag is not None:
                self.values[key] = flag

    def str(self, key: str) -> str:
        return str(self.values[key])

    def float(self, key: str) -> float:
        return parse_float(key, str(self.values[key]))

    def int(self, key: str) -> int:
        return parse_int(key, str(self.values[key]))

    def bool(self, key: str) -> bool:
        return parse_bool(key, self.values[key])

    def gamma_linear(self) -> float:
        raw_db = str(self.values.get("gamma_db", "")).strip()
        if raw_db:
            return db_to_linear(parse_float("gamma_db", raw_db))
        return parse_float("gamma", str(self.values["gamma"]))

    def scenario(self) -> netsim.NetworkScenario:
        return scenario_from_values(self.values)


def cmd_sample_ppp(args: argparse.Namespace) -> int:
    cfg = _Resolver(args)
    sample = sample_ppp(cfg.float("intensity"),
                        Disk(ORIGIN, cfg.float("window_radius")),
                        cfg.int("seed"))
    lines = ["x,y"]
    for x, y in sample.points:
        lines.append(f"{_fmt(x)},{_fmt(y)}")
    _emit("\n".join(lines) + "\n", cfg.str("out"))
    return 0


_IDENTITY_CHOICES = ("lemma1", "lemma2", "remark-sum", "remark-product", "all")


def _identity_rows(identity: str, n_rep: int, seed: int) -> tuple[list[str], bool, bool]:
    """CSV body rows for one identity; returns (rows, all_pass, had_error)."""
    rows: list[str] = []
    all_pass = True
    had_error = False

    def add(name: str, field_set: str, work: Callable[[], tuple[float, float, float, bool]]):
        nonlocal all_pass, had_error
        try:
            closed, mc_mean, mc_stderr, ok = work()
        except (QuadratureError, RuntimeError, ValueError) as exc:
            print(f"{name}/{field_set}: {exc}", file=sys.stderr)
            rows.append(f"{name},{field_set},nan,nan,nan,{n_rep},error")
            had_error = True
            return
        rows.append(f"{name},{field_set},{_fmt(closed)},{_fmt(mc_mean)},"
                    f"{_fmt(mc_stderr)},{n_rep},{1 if ok else 0}")
        if not ok:
            all_pass = False

    if identity in ("lemma1", "all"):
        for field_set, P, S, intensity, window in LEMMA1_SUITE:
            def work(P=P, S=S, intensity=intensity, window=window):
                closed = lemma1_closed_form(P, S, intensity, window)
                est = lemma1_monte_carlo(P, S, intensity, window, n_rep, seed)
                return closed, est.mean, est.stderr, est.agrees_with(closed)
            add("lemma1", field_set, work)
    if identity in ("lemma2", "all"):
        def work_l2():
            agree, total = membership_agreement(n_rep, seed)
            frac = agree / total
            return 1.0, frac, 0.0, agree == total
        add("lemma2", "random_configs", work_l2)
    if identity in ("remark-sum", "all"):
        for field_set, P, lam1, lam2 in REMARK_SUM_SUITE:
            def work_s(P=P, lam1=lam1, lam2=lam2):
                closed = remark_sum_closed_form(P, lam1, lam2)
                est = remark_sum_monte_carlo(P, lam1, lam2, typical_cell_window(lam2),
                                             n_rep, seed)
                return closed, est.mean, est.stderr, est.agrees_with(closed)
            add("remark-sum", field_set, work_s)
    if identity in ("remark-product", "all"):
        for field_set, P, lam1, lam2 in REMARK_PRODUCT_SUITE:
            def work_p(P=P, lam1=lam1, lam2=lam2):
                closed = remark_product_closed_form(P, lam1, lam2)
                est = remark_product_monte_carlo(P, lam1, lam2, typical_cell_window(lam2),
                                                 n_rep, seed)
                return closed, est.mean, est.stderr, est.agrees_with(closed)
            add("remark-product", field_set, work_p)
    return rows, all_pass, had_error


def cmd_verify_identity(args: argparse.Namespace) -> int:
    cfg = _Resolver(args)
    identity = cfg.str("identity")
    if identity not in _IDENTITY_CHOICES:
        raise ConfigError(
            f"identity must be one of {', '.join(_IDENTITY_CHOICES)}, got {identity!r}")
    rows, all_pass, had_error = _identity_rows(identity, cfg.int("n_rep"), cfg.int("seed"))
    header = "identity,field_set,closed_form,mc_mean,mc_stderr,n_rep,pass"
    _emit("\n".join([header] + rows) + "\n", cfg.str("out"))
    return 0 if (all_pass and not had_error) else 1


def cmd_mean_ues(args: argparse.Namespace) -> int:
    cfg = _Resolver(args)
    mode = cfg.str("mode")
    if mode == "closed":
        value = analysis.mean_ues_closed_form(cfg.float("lambda_u"), cfg.float("lambda_b"))
        _emit(_fmt(value) + "\n", cfg.str("out"))
        return 0
    if mode == "mc":
        est = netsim.estimate_mean_ues(cfg.scenario(), cfg.int("n_rep"), cfg.int("seed"))
        _emit(f"{_fmt(est.mean)},{_fmt(est.stderr)}\n", cfg.str("out"))
        return 0
    raise ConfigError(f"mean-ues supports --mode closed|mc, got {mode!r}")


def cmd_coverage(args: argparse.Namespace) -> int:
    cfg = _Resolver(args)
    mode = cfg.str("mode")
    gamma = cfg.gamma_linear()
    if mode == "closed":
        if cfg.float("e") != 4.0:
            raise ConfigError(
                f"the closed-form coverage requires e = 4 (got e = {cfg.float('e')}); "
                "rerun with --mode mc")
        _emit(_fmt(analysis.coverage_closed_form(gamma)) + "\n", cfg.str("out"))
        return 0
    if mode == "mc":
        scenario = replace(cfg.scenario(), gamma=gamma)
        est = netsim.estimate_coverage_mc(scenario, cfg.int("n_rep"), cfg.int("seed"))
        _emit(f"{_fmt(est.mean)},{_fmt(est.stderr)}\n", cfg.str("out"))
        return 0
    raise ConfigError(f"coverage supports --mode closed|mc, got {mode!r}")


def cmd_bandwidth(args: argparse.Namespace) -> int:
    cfg = _Resolver(args)
    mode = cfg.str("mode")
    scenario = replace(cfg.scenario(), gamma=cfg.gamma_linear())
    if mode == "closed":
        _emit(_fmt(analysis.W_closed_form(scenario)) + "\n", cfg.str("out"))
        return 0
    if mode == "approx":
        _emit(_fmt(analysis.W_approx(scenario)) + "\n", cfg.str("out"))
        return 0
    if mode == "mc":
        est = netsim.estimate_W_mc(scenario, cfg.int("n_rep"), cfg.int("seed"))
        _emit(f"{_fmt(est.mean)},{_fmt(est.stderr)}\n", cfg.str("out"))
        return 0
    raise ConfigError(f"bandwidth supports --mode closed|approx|mc, got {mode!r}")


def cmd_figure(args: argparse.Namespace) -> int:
    cfg = _Resolver(args)
    fig = cfg.int("figure")
    if fig not in (1, 2):
        raise ConfigError(f"figure must be 1 or 2, got {fig}")
    rates = parse_float_list("rates", cfg.str("rates"))
    grid_db = parse_db_grid("gamma_grid_db", cfg.str("gamma_grid_db"))
    ratio = cfg.float("ratio")
    if not ratio > 0:
        raise ConfigError(f"ratio must be positive, got {ratio}")
    with_mc = cfg.bool("with_mc")
    n_rep = cfg.int("n_rep")
    seed = cfg.int("seed")

    header = "gamma_db,rate,W_exact,W_approx"
    if fig == 2:
        header += ",diff"
    if with_mc:
        header += ",W_mc_mean,W_mc_stderr"
    lines = [header]
    had_error = False
    for rate in rates:
        for row_idx, gdb in enumerate(grid_db):
            cells = [_fmt(gdb), _fmt(rate)]
            try:
                scenario = netsim.NetworkScenario(
                    lambda_b=1.0, lambda_u=ratio, R=rate, gamma=db_to_linear(gdb))
                w_exact = analysis.W_closed_form(scenario)
                w_app = analysis.W_approx(scenario)
                cells += [_fmt(w_exact), _fmt(w_app)]
                if fig == 2:
                    cells.append(_fmt(w_app - w_exact))
                if with_mc:
                    row_seed = int(replication_seed(seed, row_idx,
                                                    stream=int(rate) % (2 ** 31)))
                    est = netsim.estimate_W_mc(scenario, n_rep, row_seed)
                    cells += [_fmt(est.mean), _fmt(est.stderr)]
            except (QuadratureError, RuntimeError, ValueError) as exc:
                print(f"gamma_db={gdb}, rate={rate}: {exc}", file=sys.stderr)
                n_cols = len(header.split(","))
                cells = cells[:2] + ["error"] * (n_cols - 2)
                had_error = True
            lines.append(",".join(cells))
    _emit("\n".join(lines) + "\n", cfg.str("out"))
    return 1 if had_error else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ppvt",
        description="Poisson-network bandwidth consumption: closed forms, "
                    "Monte Carlo, and identity verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="key=value configuration file")
        p.add_argument("--seed", type=int, help="master seed (default 1)")
        p.add_argument("--out", help="output path (default stdout)")

    p = sub.add_parser("sample-ppp", help="draw one Poisson sample as x,y CSV")
    common(p)
    p.add_argument("--intensity", type=float, help="points per unit area")
    p.add_argument("--window-radius", dest="window_radius", type=float,
                   help="disk radius of the sampling window")
    p.set_defaults(func=cmd_sample_ppp)

    p = sub.add_parser("verify-identity",
                       help="closed form vs Monte Carlo on the built-in suites")
    common(p)
    p.add_argument("--identity", choices=_IDENTITY_CHOICES,
                   help="which identity to check (default all)")
    p.add_argument("--n-rep", dest="n_rep", type=int, help="replications / instances")
    p.set_defaults(func=cmd_verify_identity)

    p = sub.add_parser("mean-ues", help="mean UE count of the typical cell")
    common(p)
    p.add_argument("--lambda-u", dest="lambda_u", type=float)
    p.add_argument("--lambda-b", dest="lambda_b", type=float)
    p.add_argument("--mode", choices=("closed", "mc"))
    p.add_argument("--n-rep", dest="n_rep", type=int)
    p.set_defaults(func=cmd_mean_ues)

    p = sub.add_parser("coverage", help="P(SINR >= gamma) for the typical UE")
    common(p)
    p.add_argument("--gamma-db", dest="gamma_db", type=float, help="threshold in dB")
    p.add_argument("--lambda-b", dest="lambda_b", type=float)
    p.add_argument("--e", dest="e", type=float, help="path-loss exponent")
    p.add_argument("--gamma-tx", dest="gamma_tx", type=float, help="Tx-SNR (inf = none)")
    p.add_argument("--mode", choices=("closed", "mc"))
    p.add_argument("--n-rep", dest="n_rep", type=int)
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("bandwidth", help="mean bandwidth consumption of the typical cell")
    common(p)
    p.add_argument("--gamma-db", dest="gamma_db", type=float, help="threshold in dB")
    p.add_argument("--rate", type=float, help="target rate R (bits/s)")
    p.add_argument("--lambda-u", dest="lambda_u", type=float)
    p.add_argument("--lambda-b", dest="lambda_b", type=float)
    p.add_argument("--e", dest="e", type=float, help="path-loss exponent")
    p.add_argument("--gamma-tx", dest="gamma_tx", type=float, help="Tx-SNR (inf = none)")
    p.add_argument("--mode", choices=("closed", "approx", "mc"))
    p.add_argument("--n-rep", dest="n_rep", type=int)
    p.set_defaults(func=cmd_bandwidth)

    p = sub.add_parser("figure", help="consumption curves over a dB grid as CSV")
    common(p)
    p.add_argument("--figure", type=int, help="1 = curves, 2 = adds approx-exact diff")
    p.add_argument("--rates", help="comma-separated rate sweep")
    p.add_argument("--ratio", type=float, help="lambda_u / lambda_b")
    p.add_argument("--gamma-grid-db", dest="gamma_grid_db",
                   help="dB grid, start:step:stop or comma list")
    p.add_argument("--with-mc", dest="with_mc", action="store_true", default=None,
                   help="add Monte Carlo mean/stderr columns")
    p.add_argument("--n-rep", dest="n_rep", type=int)
    p.set_defaults(func=cmd_figure)
    return parser


def _join_grid_values(argv: Sequence[str]) -> list[str]:
    """Glue ``--gamma-grid-db`` to a following value that starts with ``-``.

    A grid like ``-20:1:30`` or ``-10,0,10`` begins with a dash but is not an
    option; argparse only special-cases plain negative numbers, so the spaced
    form would otherwise be rejected with "expected one argument".
    """
    out: list[str] = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a == "--gamma-grid-db" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(a + "=" + argv[i + 1])
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_join_grid_values(sys.argv[1:] if argv is None else argv))
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QuadratureError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
