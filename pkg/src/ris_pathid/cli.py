"""Experiment runner: single-scenario evaluation, CDF comparison and the
two parameter sweeps, each written as CSV with a figure alongside.

Output files are written atomically (temp file, then rename), rows are
ordered by grid index regardless of evaluation order, and every file
embeds a comment header echoing the full experiment so any row can be
reproduced from the file alone.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .detector import (optimal_threshold, pattern_power_distributions,
                       random_part_ratio, relative_power_difference)
from .montecarlo import empirical_cdf, empirical_error, ks_distance, simulate_batch
from .patterns import RisPattern, make_partition
from .scene import Scene, SceneConfigError, load_scene
from .stats import power_cdf

_SWEEP_COLUMNS = ["R", "K", "N", "p_error_analytic", "p_error_empirical",
                  "g_d_analytic_db", "g_d_empirical_db", "gamma", "mu1", "mu2"]
_EVAL_COLUMNS = ["R", "K", "N", "M", "p_error_analytic", "p_error_empirical",
                 "g_d_analytic_db", "g_d_empirical_db", "gamma", "mu1", "mu2",
                 "ks_p1", "ks_p2"]
_CDF_COLUMNS = ["x", "cdf_analytic_p1", "cdf_empirical_p1",
                "cdf_analytic_p2", "cdf_empirical_p2"]


@dataclass(frozen=True)
class ExperimentSpec:
    """Validated description of one CLI invocation."""

    command: str
    scene: Scene
    n_trials: int
    seed: int
    out_path: Path
    policy: str = "contiguous"
    policy_seed: int | None = None
    jobs: int = 1
    plot: bool = True
    # eval / cdf-compare
    n: int | None = None
    m: int | None = None
    k: int | None = None
    grid_points: int = 200
    # sweep-r
    r_grid: tuple[float, ...] | None = None
    r_grid_text: str | None = None
    nk: int | None = None
    # sweep-m
    m_grid: tuple[int, ...] | None = None
    m_grid_text: str | None = None
    r: float | None = None


def parse_grid(text: str) -> list[float]:
    """Parse an inclusive 'start:stop:step' grid specification."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid '{text}' must have the form start:stop:step")
    start, stop, step = (float(p) for p in parts)
    if step <= 0.0:
        raise ValueError(f"grid '{text}': step must be positive")
    if stop < start:
        raise ValueError(f"grid '{text}': stop must not be below start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def _integer_on_grid(value: float, what: str) -> int:
    rounded = round(value)
    if abs(value - rounded) > 1e-6:
        raise ValueError(f"{what} = {value!r} is not an integer")
    return int(rounded)


def _scene_header(scene: Scene) -> list[str]:
    return [
        f"# ris-pathid {__version__}",
        "# scene: bs=({},{}) ris_center=({},{}) orientation=({},{}) ue=({},{})".format(
            *scene.bs_position, *scene.ris_center, *scene.ris_orientation,
            *scene.ue_position),
        f"# scene: q={scene.num_elements} spacing_m={scene.element_spacing!r} "
        f"freq_hz={scene.carrier_frequency!r} tx_w={scene.tx_power!r} "
        f"noise_w={scene.noise_power!r}",
    ]


def _write_csv(path: Path, header_lines: list[str], columns: list[str],
               rows: list[dict], trailer_lines: list[str] = ()) -> None:
    """Write the report atomically: temp file in the target directory,
    then rename, so partial runs never leave a truncated file."""
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp_name = tempfile.mkstemp(dir=directory, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            for line in header_lines:
                fh.write(line + "\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([row[c] for c in columns])
            for line in trailer_lines:
                fh.write(line + "\n")
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def _evaluate_point(scene: Scene, n: int, m: int, k: int, policy: str,
                    policy_seed: int | None, n_trials: int, seed: int) -> dict:
    """Analytic plus empirical detection figures for one partition."""
    partition = make_partition(scene.num_elements, n, m, k, policy, policy_seed)
    dist1, dist2 = pattern_power_distributions(scene, partition)
    gamma, p_error = optimal_threshold(dist1, dist2)
    batch1 = simulate_batch(scene, partition, RisPattern.DYNAMIC_COHERENT, n_trials, seed)
    batch2 = simulate_batch(scene, partition, RisPattern.DYNAMIC_RANDOM, n_trials, seed)
    return {
        "R": random_part_ratio(partition),
        "K": k,
        "N": n,
        "M": m,
        "p_error_analytic": p_error,
        "p_error_empirical": empirical_error(batch1, batch2, gamma),
        "g_d_analytic_db": relative_power_difference(dist1, dist2),
        "g_d_empirical_db": 10.0 * math.log10(batch1.samples.mean() / batch2.samples.mean()),
        "gamma": gamma,
        "mu1": dist1.mean,
        "mu2": dist2.mean,
        "_dist1": dist1,
        "_dist2": dist2,
        "_batch1": batch1,
        "_batch2": batch2,
    }


def _sweep_task(args: tuple) -> dict:
    row = _evaluate_point(*args)
    return {key: value for key, value in row.items() if not key.startswith("_")}


def _run_points(spec: ExperimentSpec, points: list[tuple[int, int, int]]) -> list[dict]:
    """Evaluate sweep points, optionally in parallel; rows keep grid order."""
    tasks = [
        (spec.scene, n, m, k, spec.policy, spec.policy_seed, spec.n_trials,
         spec.seed + index)
        for index, (n, m, k) in enumerate(points)
    ]
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            return list(pool.map(_sweep_task, tasks))
    return [_sweep_task(task) for task in tasks]


def _maybe_plot(spec: ExperimentSpec, render, *args, **kwargs) -> None:
    if not spec.plot:
        return
    from . import plots

    getattr(plots, render)(*args, **kwargs)


def run_eval(spec: ExperimentSpec) -> None:
    row = _evaluate_point(spec.scene, spec.n, spec.m, spec.k, spec.policy,
                          spec.policy_seed, spec.n_trials, spec.seed)
    row["ks_p1"] = ks_distance(row.pop("_batch1"), row["_dist1"])
    row["ks_p2"] = ks_distance(row.pop("_batch2"), row["_dist2"])
    dist1, dist2 = row.pop("_dist1"), row.pop("_dist2")
    header = _scene_header(spec.scene) + [
        f"# eval: n={spec.n} m={spec.m} k={spec.k} policy={spec.policy} "
        f"policy_seed={spec.policy_seed}",
        f"# trials={spec.n_trials} seed={spec.seed}",
    ]
    _write_csv(spec.out_path, header, _EVAL_COLUMNS, [row])
    for column in _EVAL_COLUMNS:
        print(f"{column:>18} {row[column]!r}")
    _maybe_plot(spec, "render_eval", dist1, dist2, row["gamma"],
                spec.out_path.with_suffix(".png"),
                f"ue={spec.scene.ue_position} n={spec.n} m={spec.m} k={spec.k}")


def run_sweep_r(spec: ExperimentSpec) -> None:
    q = spec.scene.num_elements
    m = q - spec.nk
    if m < 0:
        raise ValueError(f"nk={spec.nk} exceeds the number of elements q={q}")
    points = []
    for r_value in spec.r_grid:
        k = _integer_on_grid(r_value * q, f"R*Q for R={r_value!r}")
        points.append((spec.nk - k, m, k))
    rows = _run_points(spec, points)
    header = _scene_header(spec.scene) + [
        f"# sweep-r: r_grid={spec.r_grid_text} nk={spec.nk} "
        f"m={m} policy={spec.policy} policy_seed={spec.policy_seed}",
        f"# trials={spec.n_trials} seed={spec.seed} (per-point seed = seed + row index)",
    ]
    _write_csv(spec.out_path, header, _SWEEP_COLUMNS, rows)
    _maybe_plot(spec, "render_sweep", rows, "R", spec.out_path.with_suffix(".png"),
                f"ue={spec.scene.ue_position} N+K={spec.nk} M={m}")


def run_sweep_m(spec: ExperimentSpec) -> None:
    q = spec.scene.num_elements
    k = _integer_on_grid(spec.r * q, f"R*Q for R={spec.r!r}")
    points = []
    for m_value in spec.m_grid:
        n = q - m_value - k
        if n < 1:
            raise ValueError(f"m={m_value} leaves no coherent area (q={q}, k={k})")
        points.append((n, m_value, k))
    rows = _run_points(spec, points)
    columns = ["M"] + _SWEEP_COLUMNS
    header = _scene_header(spec.scene) + [
        f"# sweep-m: m_grid={spec.m_grid_text} r={spec.r!r} "
        f"k={k} policy={spec.policy} policy_seed={spec.policy_seed}",
        f"# trials={spec.n_trials} seed={spec.seed} (per-point seed = seed + row index)",
    ]
    _write_csv(spec.out_path, header, columns, rows)
    _maybe_plot(spec, "render_sweep", rows, "M", spec.out_path.with_suffix(".png"),
                f"ue={spec.scene.ue_position} R={spec.r} K={k}")


def _power_quantile(dist, p: float) -> float:
    """Invert the analytic power CDF by bisection."""
    hi = dist.mean + 10.0 * math.sqrt(dist.variance)
    while power_cdf(hi, dist) < p:
        hi *= 2.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if power_cdf(mid, dist) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            break
    return 0.5 * (lo + hi)


def run_cdf_compare(spec: ExperimentSpec) -> None:
    partition = make_partition(spec.scene.num_elements, spec.n, spec.m, spec.k,
                               spec.policy, spec.policy_seed)
    dist1, dist2 = pattern_power_distributions(spec.scene, partition)
    batch1 = simulate_batch(spec.scene, partition, RisPattern.DYNAMIC_COHERENT,
                            spec.n_trials, spec.seed)
    batch2 = simulate_batch(spec.scene, partition, RisPattern.DYNAMIC_RANDOM,
                            spec.n_trials, spec.seed)
    cdf1, cdf2 = empirical_cdf(batch1), empirical_cdf(batch2)
    x_max = max(_power_quantile(dist1, 0.999), _power_quantile(dist2, 0.999))
    grid = np.linspace(0.0, x_max, spec.grid_points)
    analytic1 = power_cdf(grid, dist1)
    analytic2 = power_cdf(grid, dist2)
    rows = [
        {"x": float(x), "cdf_analytic_p1": float(a1), "cdf_empirical_p1": float(e1),
         "cdf_analytic_p2": float(a2), "cdf_empirical_p2": float(e2)}
        for x, a1, e1, a2, e2 in zip(grid, analytic1, cdf1(grid), analytic2, cdf2(grid))
    ]
    ks1 = ks_distance(batch1, dist1)
    ks2 = ks_distance(batch2, dist2)
    header = _scene_header(spec.scene) + [
        f"# cdf-compare: n={spec.n} m={spec.m} k={spec.k} policy={spec.policy} "
        f"policy_seed={spec.policy_seed} grid_points={spec.grid_points}",
        f"# trials={spec.n_trials} seed={spec.seed}",
    ]
    trailer = [f"# summary: ks_p1={ks1!r} ks_p2={ks2!r}"]
    _write_csv(spec.out_path, header, _CDF_COLUMNS, rows, trailer)
    print(f"ks_p1 {ks1!r}")
    print(f"ks_p2 {ks2!r}")
    _maybe_plot(spec, "render_cdf_compare", rows, spec.out_path.with_suffix(".png"),
                f"ue={spec.scene.ue_position} n={spec.n} m={spec.m} k={spec.k}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ris-pathid",
        description="Alternating-pattern path identification: analytic detection "
                    "figures cross-validated against Monte Carlo simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scene", required=True, help="scene configuration file")
        p.add_argument("--trials", type=int, default=100_000,
                       help="Monte Carlo trials per point (default 100000)")
        p.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
        p.add_argument("--out", required=True, help="output CSV path")
        p.add_argument("--policy", choices=("contiguous", "interleaved"),
                       default="contiguous", help="area membership policy")
        p.add_argument("--policy-seed", type=int, default=None,
                       help="shuffle seed for the interleaved policy")
        p.add_argument("--jobs", type=int, default=1,
                       help="parallel workers for sweep points")
        p.add_argument("--no-plot", action="store_true",
                       help="skip the PNG figure next to the CSV")

    p_eval = sub.add_parser("eval", help="single-scenario detection report")
    common(p_eval)
    p_eval.add_argument("--n", type=int, required=True, help="coherent-area size")
    p_eval.add_argument("--m", type=int, required=True, help="other-user-area size")
    p_eval.add_argument("--k", type=int, required=True, help="dynamic-area size")

    p_cdf = sub.add_parser("cdf-compare", help="analytic vs empirical power CDFs")
    common(p_cdf)
    p_cdf.add_argument("--n", type=int, required=True)
    p_cdf.add_argument("--m", type=int, required=True)
    p_cdf.add_argument("--k", type=int, required=True)
    p_cdf.add_argument("--grid-points", type=int, default=200,
                       help="CDF table resolution (default 200)")

    p_r = sub.add_parser("sweep-r", help="sweep the dynamic-area ratio")
    common(p_r)
    p_r.add_argument("--r-grid", required=True, help="start:stop:step ratio grid")
    p_r.add_argument("--nk", type=int, required=True,
                     help="fixed combined size of coherent + dynamic areas")

    p_m = sub.add_parser("sweep-m", help="sweep the other-user-area size")
    common(p_m)
    p_m.add_argument("--m-grid", required=True, help="start:stop:step size grid")
    p_m.add_argument("--r", type=float, required=True, help="fixed dynamic-area ratio")
    return parser


def _build_spec(args: argparse.Namespace) -> ExperimentSpec:
    scene = load_scene(args.scene)
    if args.trials < 1:
        raise ValueError("--trials must be >= 1")
    if args.seed < 0:
        raise ValueError("--seed must be nonnegative")
    if args.jobs < 1:
        raise ValueError("--jobs must be >= 1")
    kwargs = dict(
        command=args.command,
        scene=scene,
        n_trials=args.trials,
        seed=args.seed,
        out_path=Path(args.out),
        policy=args.policy,
        policy_seed=args.policy_seed,
        jobs=args.jobs,
        plot=not args.no_plot,
    )
    if args.command in ("eval", "cdf-compare"):
        kwargs.update(n=args.n, m=args.m, k=args.k)
        if args.command == "cdf-compare":
            if args.grid_points < 2:
                raise ValueError("--grid-points must be >= 2")
            kwargs.update(grid_points=args.grid_points)
    elif args.command == "sweep-r":
        grid = parse_grid(args.r_grid)
        if not all(0.0 < r < 1.0 for r in grid):
            raise ValueError("--r-grid values must lie in (0, 1)")
        kwargs.update(r_grid=tuple(grid), r_grid_text=args.r_grid, nk=args.nk)
    elif args.command == "sweep-m":
        grid = [_integer_on_grid(v, "m-grid value") for v in parse_grid(args.m_grid)]
        if grid[0] < 0:
            raise ValueError("--m-grid values must be nonnegative")
        kwargs.update(m_grid=tuple(grid), m_grid_text=args.m_grid, r=args.r)
    return ExperimentSpec(**kwargs)


_RUNNERS = {
    "eval": run_eval,
    "cdf-compare": run_cdf_compare,
    "sweep-r": run_sweep_r,
    "sweep-m": run_sweep_m,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = _build_spec(args)
        _RUNNERS[spec.command](spec)
    except (SceneConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
