"""Panel Granger non-causality tests, simulations and unit-root preprocessing.

Exit status: 0 success, 2 bad input, 3 statistical precondition violated,
4 data-dependent failure (for example no differencing order found).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .dh import DEFAULT_BREPS, dh_block_bootstrap, dh_statistics
from .errors import ConfigError, EmptyPanel, InputError, OrderNotFound, PanelGrangerError, StatisticalError
from .granger import DIRECTIONS, granger_panel, p_values
from .aggregation import qppa_fixed, qppa_gamma_min, reject
from .pipeline import (
    directional_study,
    gamma_sweep,
    ingest_panel_csv,
    preprocess,
    run_power_fdr,
    to_json,
    to_text,
    write_long,
    write_report,
    write_wide,
)
from .pipeline.report import format_table, sweep_plot_data
from .simulate import PRESETS, SimConfig, load_configs, preset, simulate_panel
from .stationarity import REGRESSION_KINDS, DEFAULT_ADF_LAGS, integration_order_search

log = logging.getLogger("panelgranger")


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _grid(text: str) -> list[tuple[int, int]]:
    cells = []
    for part in text.split(","):
        try:
            t, n = part.lower().replace("x", ":").split(":")
            cells.append((int(t), int(n)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"grid cells look like T:N, got {part!r}") from None
    return cells


def _gammas(text: str) -> np.ndarray:
    if ":" in text:
        lo, hi, step = (float(v) for v in text.split(":"))
        return np.round(np.arange(lo, hi + step / 2, step), 10)
    return np.array([float(v) for v in text.split(",")])


def _methods(text: str) -> list[str]:
    return [m.strip().replace("-", "_") for m in text.split(",") if m.strip()]


def _label_columns(text: str | None):
    return None if text is None else [c.strip() for c in text.split(",") if c.strip()]


def _load_panel(args):
    res = ingest_panel_csv(args.input, args.effect, _label_columns(args.label_columns), args.layout)
    if res.dropped_missing:
        log.info("dropped %d members with missing values", len(res.dropped_missing))
    if res.panel is None:
        raise EmptyPanel("every member has a missing value")
    return res


def _sim_template(args) -> SimConfig:
    if args.config:
        configs = load_configs(args.config)
        if not configs:
            raise ConfigError(f"{args.config} has no sections")
        name = args.section or next(iter(configs))
        if name not in configs:
            raise ConfigError(f"section {name!r} not in {args.config}")
        return configs[name]
    return preset(args.preset)


def _emit(report, args, extra_text: str = "") -> None:
    if getattr(args, "json", False):
        print(to_json(report))
    else:
        print(to_text(report) + extra_text, end="")
    if getattr(args, "out", None):
        for path in write_report(report, args.out):
            log.info("wrote %s", path)


# -- subcommands --------------------------------------------------------------


def cmd_simulate(args) -> int:
    if args.config:
        configs = load_configs(args.config)
        if args.section:
            missing = [s for s in args.section if s not in configs]
            if missing:
                raise ConfigError(f"sections not found: {missing}")
            configs = {s: configs[s] for s in args.section}
    else:
        configs = {args.preset: preset(args.preset)}
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, cfg in configs.items():
        cfg = cfg.replace(seed=args.seed)
        if args.causal is not None:
            cfg = cfg.replace(causal=args.causal == "yes")
        sim = simulate_panel(cfg)
        if args.layout == "long":
            path = outdir / f"{name}.csv"
            write_long(sim.panel, path)
            written = [path]
        else:
            written = [outdir / f"{name}_x.csv", outdir / f"{name}_y.csv"]
            write_wide(sim.panel, *written)
        truth = outdir / f"{name}_truth.csv"
        truth.write_text(
            "member,causal,beta\n"
            + "".join(f"{lab},{int(g)},{b!r}\n" for lab, g, b in zip(sim.panel.labels, sim.ground_truth, sim.beta)),
            encoding="utf-8",
        )
        for p in written + [truth]:
            print(p)
    return 0


def cmd_test(args) -> int:
    method = args.method.replace("-", "_")
    if method == "dh_bb" and args.seed is None:
        raise InputError("dh-bb is randomized; pass --seed")
    res = _load_panel(args)
    panel = res.panel
    strict = not args.lenient
    out: dict = {"method": method, "direction": args.direction, "lag_order": args.lags,
                 "alpha": args.alpha, "n_members": panel.n_members, "n_timestamps": panel.n_timestamps,
                 "dropped_missing": res.dropped_missing}
    if method == "qppa":
        results = granger_panel(panel, args.lags, args.direction, strict=strict)
        p = p_values(results)
        if p.size == 0:
            raise StatisticalError("every member failed the Granger regression")
        agg = qppa_gamma_min(p, args.gamma_min) if args.gamma_min is not None else qppa_fixed(p, args.gamma)
        out.update(p_value=agg.p_value, aggregation=agg.method, gamma=agg.gamma,
                   skipped=[r.label for r in results if r.skipped],
                   members=[{"label": r.label, "f_stat": r.f_stat, "p_value": r.p_value, "error": r.error}
                            for r in results])
    elif method == "dh":
        d = dh_statistics(panel, args.lags, args.direction, strict=strict)
        out.update(p_value=d.p_semi, w_bar=d.w_bar, z_semi=d.z_semi, z_asymptotic=d.z_asymptotic,
                   p_asymptotic=d.p_asymptotic)
    elif method == "dh_bb":
        b = dh_block_bootstrap(panel, args.lags, args.direction, args.breps, args.block_size, args.seed, strict)
        out.update(p_value=b.p_value, z_semi=b.observed.z_semi, breps=b.breps, block_size=b.block_size,
                   seed=b.seed, redraws=b.redraws)
    else:
        raise InputError(f"unknown method {args.method!r}")
    out["reject"] = reject(out["p_value"], args.alpha)
    if args.json:
        print(to_json(out))
    else:
        rows = [[k, f"{v:.6g}" if isinstance(v, float) else v] for k, v in out.items()
                if not isinstance(v, (list, dict))]
        print(format_table(["field", "value"], rows), end="")
    if args.out:
        Path(args.out).write_text(to_json(out) + "\n", encoding="utf-8")
    return 0


def cmd_adf(args) -> int:
    res = _load_panel(args)
    try:
        rep = integration_order_search(res.panel, args.lags, args.gamma, args.alpha, args.max_order,
                                       args.regression, strict=not args.lenient)
        code = 0
    except OrderNotFound as exc:
        rep = exc.report
        log.error("%s", exc)
        code = exc.exit_code
    out = {"order": rep.order, "gamma": rep.gamma, "alpha": rep.alpha,
           "per_order_pvalues": [{"d": d, "p_x": px, "p_y": py} for d, px, py in rep.per_order_pvalues]}
    if args.json:
        print(to_json(out))
    else:
        print(format_table(["d", "p(x)", "p(y)"],
                           [[d, f"{px:.4g}", f"{py:.4g}"] for d, px, py in rep.per_order_pvalues]), end="")
        print(f"order: {rep.order if rep.order is not None else 'not found'}")
    return code


def cmd_preprocess(args) -> int:
    res = _load_panel(args)
    window = None if args.start is None and args.end is None else (args.start, args.end)
    panel, report = preprocess(res.panel, res.timestamps, window, args.gamma, args.alpha, args.adf_lags,
                               args.max_order, res.dropped_missing, strict=False)
    times = res.timestamps
    lo = times.index(report.window[0]) + report.integration_order
    write_long(panel, args.output, times[lo:lo + panel.n_timestamps])
    text = json.dumps(report.to_dict(), indent=2)
    if args.report:
        Path(args.report).write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0


def cmd_power_fdr(args) -> int:
    template = _sim_template(args)
    report = run_power_fdr(template, args.grid, _methods(args.methods), args.reps, args.alpha, args.gamma,
                           args.seed, args.gamma_min, args.lags, args.breps, args.block_size)
    _emit(report, args)
    return 0


def cmd_gamma_sweep(args) -> int:
    gammas = _gammas(args.gammas)
    if args.input:
        source = _load_panel(args).panel
        report = gamma_sweep(source, gammas, args.alpha, args.reps, args.seed, args.lags,
                             args.subset_size, args.true_direction)
    else:
        report = gamma_sweep(_sim_template(args), gammas, args.alpha, args.reps, args.seed, args.lags)
    _emit(report, args)
    if args.plot_data:
        sweep_plot_data(report, args.plot_data)
    return 0


def cmd_study(args) -> int:
    res = _load_panel(args)
    result = directional_study(res.panel, args.lags, _methods(args.methods), args.alpha, args.gamma,
                               args.breps, args.block_size, args.seed, strict=not args.strict_members)
    _emit(result, args)
    return 0


# -- parser -------------------------------------------------------------------


def _add_input(p, effect_required=False):
    p.add_argument("input", help="CSV file (long layout, or the cause variable in wide layout)")
    p.add_argument("effect", nargs=None if effect_required else "?", help="effect variable CSV (wide layout)")
    p.add_argument("--layout", choices=("auto", "wide", "long"), default="auto")
    p.add_argument("--label-columns", help="comma-separated member label columns (wide layout)")


def _add_sim_source(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--config", help="INI file with one section per regime")
    g.add_argument("--preset", choices=sorted(PRESETS), default="experiment1")
    p.add_argument("--section", help="section of --config to use (default: first)")


def _add_output(p):
    p.add_argument("--out", help="write <OUT>.json and <OUT>.txt")
    p.add_argument("--json", action="store_true", help="print JSON instead of a table")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="panelgranger", description=__doc__.splitlines()[0], epilog=__doc__.split("\n\n")[1])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write simulated panels as CSV")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--config")
    g.add_argument("--preset", choices=sorted(PRESETS), default="experiment1")
    p.add_argument("--section", action="append", help="only these sections (repeatable)")
    p.add_argument("--causal", choices=("yes", "no"), help="override the causal flag")
    p.add_argument("--layout", choices=("long", "wide"), default="long")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("test", help="panel Granger test on CSV data")
    p.add_argument("method", choices=("qppa", "dh", "dh-bb"))
    _add_input(p)
    p.add_argument("--lags", type=int, default=1)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--gamma-min", type=float)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--direction", choices=DIRECTIONS, default="x_to_y")
    p.add_argument("--breps", type=int, default=DEFAULT_BREPS)
    p.add_argument("--block-size", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("--lenient", action="store_true", help="skip failing members instead of aborting")
    _add_output(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("adf", help="panel unit-root test and order-of-integration search")
    _add_input(p)
    p.add_argument("--lags", type=int, default=DEFAULT_ADF_LAGS)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--max-order", type=int, default=3)
    p.add_argument("--regression", choices=REGRESSION_KINDS, default="constant")
    p.add_argument("--lenient", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_adf)

    p = sub.add_parser("preprocess", help="window, standardize and difference a panel")
    _add_input(p)
    p.add_argument("--start")
    p.add_argument("--end")
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--adf-lags", type=int, default=DEFAULT_ADF_LAGS)
    p.add_argument("--max-order", type=int, default=3)
    p.add_argument("--output", required=True, help="long-layout CSV of the processed panel")
    p.add_argument("--report", help="write the preprocessing report as JSON")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("power-fdr", help="Monte-Carlo power and FDR")
    _add_sim_source(p)
    p.add_argument("--grid", type=_grid, help="cells T:N,T:N (default: the config's T and N)")
    p.add_argument("--methods", default="qppa,dh,dh_bb")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--gamma-min", type=float)
    p.add_argument("--lags", type=int, default=1)
    p.add_argument("--breps", type=int, default=DEFAULT_BREPS)
    p.add_argument("--block-size", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    _add_output(p)
    p.set_defaults(func=cmd_power_fdr)

    p = sub.add_parser("gamma-sweep", help="QPPA power and FDR across quantile levels")
    _add_sim_source(p)
    p.add_argument("--input", help="observed panel CSV instead of a simulation")
    p.add_argument("--effect")
    p.add_argument("--layout", choices=("auto", "wide", "long"), default="auto")
    p.add_argument("--label-columns")
    p.add_argument("--subset-size", type=int)
    p.add_argument("--true-direction", choices=DIRECTIONS, default="x_to_y")
    p.add_argument("--gammas", default="0.01:0.99:0.01", help="start:stop:step or a comma list")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--lags", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--plot-data", help="CSV with gamma, power, fdr columns")
    _add_output(p)
    p.set_defaults(func=cmd_gamma_sweep)

    p = sub.add_parser("study", help="test both directions across lag orders")
    _add_input(p)
    p.add_argument("--lags", type=_int_list, default=[1], help="e.g. 1-14 or 1,2,7")
    p.add_argument("--methods", default="qppa,dh,dh_bb")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--breps", type=int, default=20)
    p.add_argument("--block-size", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--strict-members", action="store_true", help="abort on the first failing member")
    _add_output(p)
    p.set_defaults(func=cmd_study)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except PanelGrangerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
