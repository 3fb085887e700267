"""Command-line front end.

Commands
--------
capacity   evaluate one configuration analytically or by simulation
sweep      run a parameter grid from an INI config and emit CSV
simulate   Monte-Carlo estimate for one configuration
mgf        tabulate the envelope-power MGF of a model
selftest   run the built-in identity battery

Sweep configs are INI files with a ``[model]`` section (model name plus
parameters) and a ``[sweep]`` section (combiners, branch counts, SNR grid,
optional swept model parameter, methods).  Exit codes: 0 success, 2 bad
configuration, 3 numerical failure (failing rows are reported on stderr).
"""
from __future__ import annotations

import argparse
import configparser
import math
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .capacity import (
    CombinerSpec,
    aux_c,
    capacity_independent,
    capacity_mrc_nakagami_closed,
)
from .fading import NakagamiM, ShadowedGNM, Weibull, build_model
from .mellin import ContourError, ConvergenceError, EmptyStripError
from .simulate import SimConfig, simulate_capacity

__all__ = ["ConfigError", "SweepConfig", "main", "parse_sweep_config",
           "run_sweep", "selftest"]

CSV_HEADER = ("combiner,L,swept_param,swept_value,snr_db,method,"
              "capacity_bits_hz,error_estimate,mc_stderr,seed")
_METHODS = ("analytic-adaptive", "analytic-gcq", "monte-carlo")
_NUMERIC_ERRORS = (ConvergenceError, ContourError, EmptyStripError,
                   FloatingPointError, OverflowError, ZeroDivisionError)


class ConfigError(ValueError):
    """Invalid command line or configuration file."""


@dataclass(frozen=True)
class SweepConfig:
    """A validated sweep: grid axes, methods, and output destination."""

    model_name: str
    model_params: dict
    combiners: tuple
    branch_counts: tuple
    snr_db_grid: tuple
    swept: str
    swept_grid: tuple
    methods: tuple
    gcq_n: int = 50
    mc_samples: int = 10000
    seed: int = 0
    out: str = ""
    bandwidth: float = 1.0


# -- small parsing helpers ---------------------------------------------------

def _parse_scalar(raw: str):
    raw = raw.strip()
    if "," in raw:
        try:
            return tuple(float(part) for part in raw.split(","))
        except ValueError:
            raise ConfigError(f"not a list of numbers: {raw!r}") from None
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            pass
    raise ConfigError(f"not a number: {raw!r}")


def _float_list(raw: str, what: str) -> tuple:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"{what} grid is empty")
    try:
        values = tuple(float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"bad {what} value in {raw!r}") from None
    if not all(math.isfinite(v) for v in values):
        raise ConfigError(f"{what} grid contains non-finite values")
    return values


def _name_list(raw: str, allowed: Sequence[str], what: str) -> tuple:
    parts = [p.strip().lower() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"no {what} given")
    for p in parts:
        if p not in allowed:
            raise ConfigError(f"unknown {what} {p!r} (expected one of "
                              f"{', '.join(allowed)})")
    return tuple(parts)


def _read_ini(path: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    try:
        loaded = parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if not loaded:
        raise ConfigError(f"cannot read config file: {path}")
    return parser


def _model_from_ini(parser: configparser.ConfigParser):
    if not parser.has_section("model"):
        return None, {}
    section = parser["model"]
    name = section.get("name", "").strip() or None
    params = {key: _parse_scalar(value) for key, value in section.items()
              if key != "name"}
    return name, params


def _build_model_checked(name: Optional[str], params: dict):
    if not name:
        raise ConfigError("no model specified (use --model or a [model] "
                          "config section)")
    try:
        return build_model(name, **params)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def _load_model(args):
    name, params = None, {}
    if getattr(args, "config", None):
        name, params = _model_from_ini(_read_ini(args.config))
    if getattr(args, "model", None):
        name = args.model
    for item in getattr(args, "param", None) or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--param expects KEY=VALUE, got {item!r}")
        params[key.strip()] = _parse_scalar(value)
    return _build_model_checked(name, params)


def _combiner_from_args(args) -> CombinerSpec:
    try:
        snr = 10.0 ** (args.snr_db / 10.0)
    except OverflowError:
        raise ConfigError(f"snr_db={args.snr_db!r} is out of range") from None
    try:
        return CombinerSpec(args.combiner, args.branches, snr, args.bandwidth)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# -- sweep -------------------------------------------------------------------

def parse_sweep_config(path: str, seed_override: Optional[int] = None,
                       out_override: Optional[str] = None) -> SweepConfig:
    """Read and validate an INI sweep description.

    Raises
    ------
    ConfigError
        On unreadable files, unknown names, empty grids, or model
        parameters that do not construct.
    """
    parser = _read_ini(path)
    model_name, model_params = _model_from_ini(parser)
    if not parser.has_section("sweep"):
        raise ConfigError(f"{path} has no [sweep] section")
    section = parser["sweep"]

    combiners = _name_list(section.get("combiners", "mrc, egc"),
                           ("mrc", "egc"), "combiner")
    branches_raw = _float_list(section.get("branches", "1"), "branches")
    if any(b != int(b) or b < 1 for b in branches_raw):
        raise ConfigError("branches must be positive integers")
    branch_counts = tuple(int(b) for b in branches_raw)
    snr_db_grid = _float_list(section.get("snr_db", ""), "snr_db") \
        if section.get("snr_db", "").strip() else None
    swept = section.get("swept", "snr").strip().lower()
    if swept not in ("snr", "m", "xi", "m_s"):
        raise ConfigError(f"swept axis must be snr, m, xi or m_s, got {swept!r}")
    if snr_db_grid is None:
        raise ConfigError("[sweep] needs an snr_db entry")
    if swept == "snr":
        if section.get("grid", "").strip():
            raise ConfigError("grid applies only when sweeping a model "
                              "parameter; the snr axis uses snr_db")
        swept_grid = snr_db_grid
    else:
        swept_grid = _float_list(section.get("grid", ""), swept)
        if len(snr_db_grid) != 1:
            raise ConfigError(f"sweeping {swept} requires a single snr_db "
                              "operating point")
    methods = _name_list(section.get("methods", "analytic-adaptive"),
                         _METHODS, "method")

    def intval(key, default):
        raw = section.get(key, "").strip()
        try:
            return int(raw) if raw else default
        except ValueError:
            raise ConfigError(f"{key} must be an integer, got {raw!r}") from None

    gcq_n = intval("gcq_n", 50)
    mc_samples = intval("mc_samples", 10000)
    seed = seed_override if seed_override is not None else intval("seed", 0)
    out = out_override or section.get("out", "").strip()
    if not out:
        raise ConfigError("no output path (use --out or an out= entry)")
    try:
        bandwidth = float(section.get("bandwidth", "1").strip() or "1")
    except ValueError:
        raise ConfigError("bandwidth must be a number") from None

    cfg = SweepConfig(model_name or "", model_params, combiners,
                      branch_counts, snr_db_grid, swept, swept_grid, methods,
                      gcq_n, mc_samples, seed, out, bandwidth)
    _validate_grid(cfg)
    return cfg


def _row_model_params(cfg: SweepConfig, value: float) -> dict:
    if cfg.swept == "snr":
        return cfg.model_params
    return {**cfg.model_params, cfg.swept: value}


def _validate_grid(cfg: SweepConfig) -> None:
    """Construct every model and combiner once so bad configs fail early."""
    if cfg.gcq_n < 1:
        raise ConfigError("gcq_n must be positive")
    if cfg.mc_samples < 100:
        raise ConfigError("mc_samples must be at least 100")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigError("seed must fit in 64 bits")
    for snr_db in cfg.snr_db_grid:
        try:
            snr = 10.0 ** (snr_db / 10.0)
        except OverflowError:
            snr = math.inf
        if not 0.0 < snr < math.inf:
            raise ConfigError(f"snr_db={snr_db!r} is out of range")
    values = (cfg.swept_grid[0],) if cfg.swept == "snr" else cfg.swept_grid
    for value in values:
        _build_model_checked(cfg.model_name, _row_model_params(cfg, value))
    for kind in cfg.combiners:
        for branches in cfg.branch_counts:
            try:
                CombinerSpec(kind, branches, 1.0, cfg.bandwidth)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None


def _iter_tasks(cfg: SweepConfig):
    ordinal = 0
    for kind in cfg.combiners:
        for branches in cfg.branch_counts:
            for value in cfg.swept_grid:
                for method in cfg.methods:
                    yield (cfg, ordinal, kind, branches, value, method)
                    ordinal += 1


def _eval_row(task):
    """Evaluate one grid cell; returns (ordinal, row-or-None, error-or-None)."""
    cfg, ordinal, kind, branches, value, method = task
    snr_db = value if cfg.swept == "snr" else cfg.snr_db_grid[0]
    try:
        model = build_model(cfg.model_name, **_row_model_params(cfg, value))
        comb = CombinerSpec(kind, branches, 10.0 ** (snr_db / 10.0),
                            cfg.bandwidth)
        if method == "monte-carlo":
            seed = (cfg.seed + ordinal) % 2**64
            res = simulate_capacity(SimConfig(model, comb,
                                              n_samples=cfg.mc_samples,
                                              seed=seed))
            row = (kind, branches, cfg.swept, float(value), float(snr_db),
                   method, res.mean, res.std_error, res.std_error, seed)
        else:
            point = capacity_independent(
                model, comb,
                method="gcq" if method == "analytic-gcq" else "adaptive",
                gcq_n=cfg.gcq_n)
            row = (kind, branches, cfg.swept, float(value), float(snr_db),
                   method, point.value, point.error_estimate, None, cfg.seed)
        return ordinal, row, None
    except Exception as exc:
        detail = (f"combiner={kind} L={branches} {cfg.swept}={value!r} "
                  f"method={method}: {type(exc).__name__}: {exc}")
        return ordinal, None, detail


def _format_row(row) -> str:
    kind, branches, swept, value, snr_db, method, cap, err, stderr, seed = row
    return ",".join([
        kind, str(branches), swept, repr(value), repr(snr_db), method,
        repr(cap), repr(err), "" if stderr is None else repr(stderr),
        str(seed),
    ])


def run_sweep(cfg: SweepConfig, workers: int = 1, plot: bool = False,
              stderr=None) -> int:
    """Evaluate the grid and write the CSV; returns a process exit status.

    Rows are dispatched to ``workers`` processes and written in grid order,
    so output bytes do not depend on the worker count.  With ``plot`` a PNG
    rendering of the sweep is saved next to the CSV.
    """
    stderr = stderr if stderr is not None else sys.stderr
    tasks = list(_iter_tasks(cfg))
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_eval_row, tasks, chunksize=1))
    else:
        results = [_eval_row(task) for task in tasks]
    results.sort(key=lambda item: item[0])

    failures = [detail for _, row, detail in results if row is None]
    if failures:
        for detail in failures:
            print(f"error: {detail}", file=stderr)
        return 3
    rows = [row for _, row, _ in results]
    with open(cfg.out, "w", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(_format_row(row) + "\n")
    if plot:
        _render_plot(cfg, rows, _plot_path(cfg.out))
    return 0


def _plot_path(out: str) -> str:
    stem = out[:-4] if out.lower().endswith(".csv") else out
    return stem + ".png"


def _render_plot(cfg: SweepConfig, rows, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    styles = {"analytic-adaptive": "-", "analytic-gcq": "--"}
    for kind in cfg.combiners:
        for branches in cfg.branch_counts:
            for method in cfg.methods:
                pts = [(r[3], r[6], r[8]) for r in rows
                       if r[0] == kind and r[1] == branches and r[5] == method]
                if not pts:
                    continue
                xs, ys, errs = zip(*pts)
                label = f"{kind.upper()} L={branches} {method}"
                if method == "monte-carlo":
                    ax.errorbar(xs, ys, yerr=[3.0 * e for e in errs], fmt="o",
                                markersize=3.0, capsize=2.0, label=label)
                else:
                    ax.plot(xs, ys, styles[method], label=label)
    ax.set_xlabel("SNR [dB]" if cfg.swept == "snr" else cfg.swept)
    ax.set_ylabel("capacity [bits/s/Hz]")
    ax.set_title(cfg.model_name)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


# -- selftest ----------------------------------------------------------------

def selftest(tolerance_scale: float = 1.0, stream=None) -> int:
    """Run the built-in identity battery; returns 0 iff every check passes.

    ``tolerance_scale`` multiplies every tolerance (a hook for exercising
    the failure path; production runs use 1.0).
    """
    stream = stream if stream is not None else sys.stdout
    checks = (
        ("aux-kernel-mrc", 1e-7, _check_aux_kernel_mrc),
        ("aux-kernel-egc", 1e-7, _check_aux_kernel_egc),
        ("mgf-vs-quadrature", 1e-5, _check_mgf_vs_quadrature),
        ("closed-form-vs-adaptive", 1e-5, _check_closed_form),
        ("gcq-vs-adaptive", 1e-3, _check_gcq_vs_adaptive),
    )
    passed = 0
    for name, tol, fn in checks:
        tol = tol * tolerance_scale
        try:
            err = fn()
        except Exception as exc:  # a crashed check is a failed check
            err = math.inf
            print(f"[FAIL] {name:24s} error: {type(exc).__name__}: {exc}",
                  file=stream)
            continue
        ok = err <= tol
        passed += ok
        print(f"[{'PASS' if ok else 'FAIL'}] {name:24s} "
              f"max_err={err:.3e}  tol={tol:.3e}", file=stream)
    print(f"selftest: {passed}/{len(checks)} checks passed", file=stream)
    return 0 if passed == len(checks) else 1


_SELFTEST_S = (0.1, 0.25, 1.0, 4.0, 10.0)


def _check_aux_kernel(q: int) -> float:
    s = np.array(_SELFTEST_S)
    fast = aux_c(q, s)
    return max(float(np.max(np.abs(aux_c(q, s, method=route) - fast)))
               for route in ("contour", "meijer"))


def _check_aux_kernel_mrc() -> float:
    return _check_aux_kernel(1)


def _check_aux_kernel_egc() -> float:
    return _check_aux_kernel(2)


def _check_mgf_vs_quadrature() -> float:
    models = (NakagamiM(2.5, 1.0), ShadowedGNM(2.0, 2.0, 3.0, 1.0),
              Weibull(3.0, 1.0))
    worst = 0.0
    for model in models:
        for s in (0.25, 1.0, 4.0):
            for p in (1, 2):
                want = model.mgf_p_oracle(s, p)
                got = float(model.mgf_p(s, p))
                worst = max(worst, abs(got - want) / abs(want))
    return worst


def _check_closed_form() -> float:
    worst = 0.0
    for m, branches, snr in ((2.5, 2, 10.0), (1.0, 3, 1.0)):
        closed = capacity_mrc_nakagami_closed(m, branches, snr).value
        numeric = capacity_independent(NakagamiM(m, 1.0),
                                       CombinerSpec("mrc", branches, snr)).value
        worst = max(worst, abs(closed - numeric) / abs(numeric))
    return worst


def _check_gcq_vs_adaptive() -> float:
    model = ShadowedGNM(2.0, 2.0, 3.0, 1.0)
    worst = 0.0
    for kind in ("mrc", "egc"):
        comb = CombinerSpec(kind, 2, 10.0)
        adaptive = capacity_independent(model, comb).value
        gcq = capacity_independent(model, comb, method="gcq", gcq_n=50).value
        worst = max(worst, abs(gcq - adaptive) / abs(adaptive))
    return worst


# -- single-point commands ---------------------------------------------------

_POINT_LABELS = {"a": "analytic-adaptive", "g": "analytic-gcq",
                 "m": "monte-carlo"}


def _point_row(args, comb, label, value, err, stderr, seed):
    return (comb.kind, comb.L, "snr", float(args.snr_db), float(args.snr_db),
            label, value, err, stderr, seed)


def _write_point_csv(path: str, row) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        fh.write(_format_row(row) + "\n")


def _cmd_capacity(args) -> int:
    model = _load_model(args)
    comb = _combiner_from_args(args)
    label = _POINT_LABELS[args.method]
    try:
        if args.method == "m":
            cfg = SimConfig(model, comb, n_samples=args.samples,
                            seed=args.seed, batch=args.batch)
            res = simulate_capacity(cfg)
            value, err, stderr, seed = res.mean, res.std_error, \
                res.std_error, args.seed
        else:
            point = capacity_independent(
                model, comb, method="gcq" if args.method == "g" else "adaptive",
                gcq_n=args.gcq_n)
            value, err, stderr, seed = point.value, point.error_estimate, \
                None, args.seed
    except _NUMERIC_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    tail = "" if stderr is None else f" mc_stderr={stderr!r}"
    print(f"combiner={comb.kind} L={comb.L} snr_db={args.snr_db!r} "
          f"method={label} capacity_bits_hz={value!r} "
          f"error_estimate={err!r}{tail}")
    if args.out:
        _write_point_csv(args.out,
                         _point_row(args, comb, label, value, err, stderr,
                                    seed))
    return 0


def _cmd_simulate(args) -> int:
    model = _load_model(args)
    comb = _combiner_from_args(args)
    try:
        cfg = SimConfig(model, comb, n_samples=args.samples, seed=args.seed,
                        batch=args.batch)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    try:
        res = simulate_capacity(cfg)
    except _NUMERIC_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    print(f"combiner={comb.kind} L={comb.L} snr_db={args.snr_db!r} "
          f"method=monte-carlo capacity_bits_hz={res.mean!r} "
          f"mc_stderr={res.std_error!r} n_samples={res.n_samples}")
    if args.out:
        _write_point_csv(args.out,
                         _point_row(args, comb, "monte-carlo", res.mean,
                                    res.std_error, res.std_error, args.seed))
    return 0


def _cmd_mgf(args) -> int:
    model = _load_model(args)
    s_values = _float_list(args.s, "s")
    if any(v < 0 for v in s_values):
        raise ConfigError("s values must be nonnegative")
    s = np.array(s_values)
    try:
        mv = np.atleast_1d(np.asarray(model.mgf_p(s, args.p), dtype=float))
        dv = np.atleast_1d(np.asarray(model.dmgf_p(s, args.p), dtype=float))
    except _NUMERIC_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    lines = ["s,mgf,dmgf"]
    lines += [f"{si!r},{mi!r},{di!r}"
              for si, mi, di in zip(s_values, mv.tolist(), dv.tolist())]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_sweep(args) -> int:
    cfg = parse_sweep_config(args.config, seed_override=args.seed,
                             out_override=args.out)
    return run_sweep(cfg, workers=args.workers, plot=args.plot)


def _cmd_selftest(args) -> int:
    return selftest(tolerance_scale=args.tolerance_scale)


# -- argument parsing --------------------------------------------------------

def _add_model_flags(sub) -> None:
    sub.add_argument("--config", help="INI file with a [model] section")
    sub.add_argument("--model", help="model name from the catalog")
    sub.add_argument("--param", action="append", metavar="KEY=VALUE",
                     help="model parameter override (repeatable)")


def _add_point_flags(sub) -> None:
    sub.add_argument("--combiner", default="mrc", choices=("mrc", "egc"))
    sub.add_argument("--branches", type=int, default=1, metavar="L")
    sub.add_argument("--snr-db", type=float, default=0.0)
    sub.add_argument("--bandwidth", type=float, default=1.0)
    sub.add_argument("--out", help="also write the result as a CSV row")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="divcap",
        description="Average capacity of EGC/MRC diversity receivers over "
                    "generalized fading channels.")
    sub = parser.add_subparsers(dest="command", required=True)

    cap = sub.add_parser("capacity", help="evaluate one configuration")
    _add_model_flags(cap)
    _add_point_flags(cap)
    cap.add_argument("--method", default="a", choices=("a", "g", "m"),
                     help="a=adaptive integral, g=Gauss-Chebyshev, "
                          "m=Monte-Carlo")
    cap.add_argument("--gcq-n", type=int, default=50)
    cap.add_argument("--samples", type=int, default=10000)
    cap.add_argument("--batch", type=int, default=None)
    cap.add_argument("--seed", type=int, default=0)
    cap.set_defaults(func=_cmd_capacity)

    sim = sub.add_parser("simulate", help="Monte-Carlo estimate only")
    _add_model_flags(sim)
    _add_point_flags(sim)
    sim.add_argument("--samples", type=int, default=10000)
    sim.add_argument("--batch", type=int, default=None)
    sim.add_argument("--seed", type=int, default=0)
    sim.set_defaults(func=_cmd_simulate)

    mgf = sub.add_parser("mgf", help="tabulate a model's envelope-power MGF")
    _add_model_flags(mgf)
    mgf.add_argument("--p", type=int, default=2, choices=(1, 2),
                     help="envelope power")
    mgf.add_argument("--s", default="0.25,0.5,1,2,4",
                     help="comma-separated transform arguments")
    mgf.add_argument("--out", help="write CSV here instead of stdout")
    mgf.set_defaults(func=_cmd_mgf)

    swp = sub.add_parser("sweep", help="run a parameter grid to CSV")
    swp.add_argument("--config", required=True, help="INI sweep description")
    swp.add_argument("--out", help="override the configured output path")
    swp.add_argument("--seed", type=int, default=None,
                     help="override the configured seed")
    swp.add_argument("--workers", type=int, default=1,
                     help="worker processes for grid evaluation")
    swp.add_argument("--plot", action="store_true",
                     help="render a PNG of the sweep beside the CSV")
    swp.set_defaults(func=_cmd_sweep)

    tst = sub.add_parser("selftest", help="run the built-in identity battery")
    tst.add_argument("--tolerance-scale", type=float, default=1.0,
                     help="multiply all check tolerances (testing hook)")
    tst.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
