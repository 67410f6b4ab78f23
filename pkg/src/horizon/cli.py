"""Experiment harness: config-driven sweeps emitting CSV and JSON.

Exit codes: 0 success, 2 config error, 3 class-membership refusal,
4 bound violation.  CSV output is deterministic (no wall-clock columns,
full-precision scientific notation); per-row runtimes go to the JSON
summary, which is not covered by the byte-identity guarantee.
"""

import concurrent.futures
import json
import os
import sys
import time
from pathlib import Path

import click
import numpy as np

from .config import ConfigError, ExperimentConfig
from .predictor import ClassMembershipError
from .polynomials import (
    alpha_closed_form,
    projection_psi,
    taylor_alpha_bound,
    taylor_psi,
)
from .predictor import (
    build_predictor,
    error_bound_parts,
    noise_bound,
    predict_values,
    run_prediction,
    target_values,
)
from .signals import class_norm, noise_norm

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CLASS = 3
EXIT_BOUND = 4

_BOUND_SLACK = 1e-8


def _fmt(x):
    return f"{float(x):.16e}"


def _write_csv(path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else _fmt(cell) for cell in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _resolve_threads(threads):
    if threads is not None:
        return max(1, threads)
    env = os.environ.get("HORIZON_THREADS")
    return max(1, int(env)) if env else 1


def _parallel_map(fn, items, threads):
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _load_config(config_path, out):
    if config_path is None:
        cfg = ExperimentConfig()
    else:
        cfg = ExperimentConfig.load(config_path)
    if out is not None:
        cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "output_dir": str(out)})
    return cfg


def _psi_for(cfg, d, precision):
    if cfg.method == "taylor":
        return taylor_psi(cfg.T, d)
    proj_precision = "double" if precision == "double" else "auto"
    return projection_psi(cfg.T, cfg.r, d, proj_precision)


def _class_gate(cfg):
    x = cfg.build_signal()
    report = class_norm(x, cfg.r)
    if not report.member:
        click.echo(
            f"refusing: signal {cfg.signal} lies outside the class for r={cfg.r} "
            f"(weighted spectral norm diverges)",
            err=True,
        )
        sys.exit(EXIT_CLASS)
    return x


def common_options(fn):
    fn = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                      default=None, help="JSON experiment config (canonical defaults if omitted).")(fn)
    fn = click.option("--out", type=click.Path(file_okay=False), default=None,
                      help="Output directory (overrides config output_dir).")(fn)
    fn = click.option("--threads", type=int, default=None,
                      help="Worker threads (env HORIZON_THREADS as fallback).")(fn)
    fn = click.option("--precision", type=click.Choice(["double", "extended"]),
                      default="extended", show_default=True,
                      help="extended engages the high-precision paths where double breaks.")(fn)
    return fn


@click.group()
@click.version_option(package_name="horizon")
def main():
    """Limited-memory spectral predictor experiments."""


@main.command("alpha-sweep")
@common_options
def cmd_alpha_sweep(config_path, out, threads, precision):
    """Sweep the weighted approximation error alpha over the degree range."""
    try:
        cfg = _load_config(config_path, out)
        threads = _resolve_threads(threads)

        def one(d):
            psi = _psi_for(cfg, d, precision)
            alpha = alpha_closed_form(psi, cfg.T, cfg.r)
            bound = taylor_alpha_bound(cfg.T, cfg.r, d) if cfg.T < cfg.r else None
            return d, alpha, bound

        results = _parallel_map(one, cfg.ds, threads)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)

    rows = [(float(d), cfg.method, alpha, "" if bound is None else _fmt(bound))
            for d, alpha, bound in results]
    rows = [(_fmt(d), method, _fmt(alpha), bound) for d, method, alpha, bound in rows]
    path = Path(cfg.output_dir) / "alpha_sweep.csv"
    _write_csv(path, ["d", "method", "alpha", "taylor_bound"], rows)
    click.echo(f"wrote {path}")

    if cfg.method == "projection":
        alphas = [alpha for _, alpha, _ in results]
        if any(a2 > a1 + 1e-12 for a1, a2 in zip(alphas, alphas[1:])):
            click.echo("bound violation: projection alpha is not non-increasing", err=True)
            sys.exit(EXIT_BOUND)


@main.command("convergence")
@common_options
def cmd_convergence(config_path, out, threads, precision):
    """Prediction-error convergence over the degree range, with bounds."""
    try:
        cfg = _load_config(config_path, out)
        threads = _resolve_threads(threads)
        x = _class_gate(cfg)
        h = cfg.build_kernel()
        tgrid = cfg.build_tgrid()

        def one(d):
            start = time.perf_counter()
            pk = build_predictor(h, _psi_for(cfg, d, precision))
            res = run_prediction(pk, x, tgrid, cfg.r, method=cfg.method, precision=precision)
            return d, res, 1000.0 * (time.perf_counter() - start)

        results = _parallel_map(one, cfg.ds, threads)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except ClassMembershipError as exc:
        click.echo(f"refusing: {exc}", err=True)
        sys.exit(EXIT_CLASS)

    rows = [(d, res.sup_error, res.bound) for d, res, _ in results]
    path = Path(cfg.output_dir) / "convergence.csv"
    _write_csv(path, ["d", "sup_error", "bound"], rows)

    smallest = next((d for d, res, _ in results if res.sup_error <= cfg.eps_target), None)
    summary = {
        "method": cfg.method,
        "eps_target": cfg.eps_target,
        "smallest_d_within_target": smallest,
        "rows": [dict(res.summary(), runtime_ms=ms) for _, res, ms in results],
    }
    spath = Path(cfg.output_dir) / "convergence_summary.json"
    spath.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    click.echo(f"wrote {path} and {spath}")

    for d, res, _ in results:
        if res.sup_error > res.bound + _BOUND_SLACK:
            click.echo(f"bound violation at d={d}: {res.sup_error:.3e} > {res.bound:.3e}", err=True)
            sys.exit(EXIT_BOUND)


@main.command("noise-sweep")
@common_options
def cmd_noise_sweep(config_path, out, threads, precision):
    """Total prediction error under noise versus the robustness bound."""
    try:
        cfg = _load_config(config_path, out)
        threads = _resolve_threads(threads)
        x0 = _class_gate(cfg)
        h = cfg.build_kernel()
        tgrid = cfg.build_tgrid()
        grid = cfg.build_grid()
        eta_unit = cfg.build_noise()
        unit_norm = noise_norm(eta_unit, cfg.p, grid)
        if unit_norm <= 0:
            raise ConfigError("noise: zero spectrum on the experiment grid")

        def one(d):
            pk = build_predictor(h, _psi_for(cfg, d, precision))
            y = target_values(h, x0, tgrid.nodes)
            y_hat0 = predict_values(pk, x0, tgrid.nodes, precision)
            conv_unit = (predict_values(pk, eta_unit, tgrid.nodes, precision))
            _, _, eps_bound = error_bound_parts(pk, x0, cfg.r)
            slope = noise_bound(pk, h, 1.0, cfg.p)  # norms on the transfer band
            per_nu = []
            for nu in cfg.nu_range:
                scale = nu / unit_norm
                total = float(np.max(np.abs(y - y_hat0 - scale * conv_unit)))
                per_nu.append((nu, d, total, eps_bound + nu * slope))
            return per_nu

        blocks = _parallel_map(one, cfg.ds, threads)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except ClassMembershipError as exc:
        click.echo(f"refusing: {exc}", err=True)
        sys.exit(EXIT_CLASS)

    rows = [row for block in blocks for row in block]
    rows.sort(key=lambda row: (row[0], row[1]))
    path = Path(cfg.output_dir) / "noise_sweep.csv"
    _write_csv(path, ["nu", "d", "empirical_total_error", "bound_total"],
               [(nu, float(d), emp, bnd) for nu, d, emp, bnd in rows])
    click.echo(f"wrote {path}")

    for nu, d, emp, bnd in rows:
        if emp > bnd + _BOUND_SLACK:
            click.echo(f"bound violation at nu={nu}, d={d}: {emp:.3e} > {bnd:.3e}", err=True)
            sys.exit(EXIT_BOUND)


@main.command("predict")
@common_options
@click.option("--times", default=None,
              help="Comma-separated prediction times (default: the config time grid).")
def cmd_predict(config_path, out, threads, precision, times):
    """Single-shot prediction dump at the top degree of the range."""
    try:
        cfg = _load_config(config_path, out)
        x = _class_gate(cfg)
        h = cfg.build_kernel()
        if times is not None:
            try:
                ts = np.array([float(v) for v in times.split(",")])
            except ValueError as exc:
                raise ConfigError(f"times: {exc}") from exc
        else:
            ts = cfg.build_tgrid().nodes
        d = cfg.d_range[1]
        pk = build_predictor(h, _psi_for(cfg, d, precision))
        y = target_values(h, x, ts)
        y_hat = predict_values(pk, x, ts, precision)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)

    path = Path(cfg.output_dir) / "predict.csv"
    _write_csv(path, ["t", "y", "y_hat", "abs_err"],
               [(t, yv, yh, abs(yv - yh)) for t, yv, yh in zip(ts, y, y_hat)])
    click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
