"""Command line interface.

Exit codes: 0 on success, 2 on input or validation problems, 3 on
degenerate game inputs (no usable interior fixed point).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .dynamics import (
    CORNERS,
    IntegratorConfig,
    phase_portrait,
    sample_starts,
    write_trajectories_csv,
)
from .errors import DegenerateGameError, EvolossError, OutOfSimplexError
from .game import PopulationState, check_state, saddle_point
from .kvfile import read_kv_file
from .lab import LabConfig, save_encoder_weights, train_episode, write_training_log
from .losses import DEFAULT_OFFDIAG_WEIGHT, DEFAULT_TEMPERATURE
from .metrics import (
    discriminability,
    generalizability,
    load_benchmark,
    load_payoff_params,
)
from .scheduler import SchedulerConfig
from .stability import enumerate_equilibria, equilibria_table, write_equilibria_csv


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evoloss",
        description="Trade-off game analysis and scheduled two-view training.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metrics", help="derive gap metrics from a benchmark CSV")
    p.add_argument("--input", required=True, help="benchmark CSV (method,pretrain,eval,accuracy)")
    p.add_argument("--output", required=True, help="where to write the metric rows")

    p = sub.add_parser("saddle", help="print the interior fixed point of a game")
    p.add_argument("--params", required=True, help="key = value payoff params file")

    p = sub.add_parser("equilibria", help="classify all fixed points of a game")
    p.add_argument("--params", required=True)
    p.add_argument("--output", help="optional CSV destination")

    p = sub.add_parser("simulate", help="integrate trajectories of the replicator field")
    p.add_argument("--params", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--starts", type=int, help="number of random interior starts")
    group.add_argument("--starts-file", help="file with one 'x,y' start per line")
    p.add_argument("--out", required=True, help="trajectory CSV destination")
    p.add_argument("--dt", type=float, default=IntegratorConfig.dt)
    p.add_argument("--t-max", type=float, default=IntegratorConfig.t_max)
    p.add_argument("--stop-tol", type=float, default=IntegratorConfig.stop_tol)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("train", help="run a scheduled training episode")
    p.add_argument("--config", required=True, help="key = value training config file")
    p.add_argument("--out", required=True, help="per-step log CSV destination")
    p.add_argument("--weights-out", help="final encoder weights file (default: <out>.weights)")
    p.add_argument("--seed", type=int, help="override the config seed")
    return parser


def run_metrics(args) -> int:
    table = load_benchmark(args.input)
    rows = []
    for rec in table.ssl_accuracies:
        ref = table.sl_accuracy(rec.eval)
        if rec.pretrain == rec.eval:
            rows.append(("D", rec.method, rec.pretrain, rec.eval,
                         discriminability(ref, rec.accuracy)))
        else:
            rows.append(("G", rec.method, rec.pretrain, rec.eval,
                         generalizability(ref, rec.accuracy)))
    for rec in table.ensemble_accuracies:
        ref = table.sl_accuracy(rec.eval)
        rows.append(("N1", rec.method, rec.pretrain, rec.eval, ref - rec.accuracy))
        gen_method = rec.method.split("+", 1)[0]
        try:
            gen_acc = table.accuracy(gen_method, rec.pretrain, rec.eval)
        except EvolossError:
            continue
        rows.append(("N2", rec.method, rec.pretrain, rec.eval, gen_acc - rec.accuracy))
    with open(args.output, "w", encoding="utf-8", newline="") as fh:
        fh.write("metric,method,pretrain,eval,value\n")
        for metric, method, pretrain, eval_ds, value in rows:
            fh.write(f"{metric},{method},{pretrain},{eval_ds},{value!r}\n")
    print(f"wrote {len(rows)} metric rows to {args.output}")
    return 0


def run_saddle(args) -> int:
    params = load_payoff_params(args.params)
    point = saddle_point(params)
    print(f"x_star = {point.x!r}")
    print(f"y_star = {point.y!r}")
    return 0


def run_equilibria(args) -> int:
    params = load_payoff_params(args.params)
    equilibria = enumerate_equilibria(params)
    print(equilibria_table(equilibria))
    if args.output:
        write_equilibria_csv(equilibria, args.output)
        print(f"wrote {len(equilibria)} equilibria to {args.output}")
    return 0


def _read_starts_file(path) -> list[PopulationState]:
    starts = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise EvolossError(f"cannot read {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise EvolossError(f"{path} line {lineno}: expected 'x,y', got {raw!r}")
        try:
            x, y = float(parts[0]), float(parts[1])
        except ValueError:
            raise EvolossError(f"{path} line {lineno}: non-numeric start") from None
        starts.append(check_state((x, y)))
    if not starts:
        raise EvolossError(f"{path}: no start states found")
    return starts


def run_simulate(args) -> int:
    params = load_payoff_params(args.params)
    cfg = IntegratorConfig(dt=args.dt, t_max=args.t_max, stop_tol=args.stop_tol)
    if args.starts_file:
        starts = _read_starts_file(args.starts_file)
    else:
        starts = sample_starts(args.starts, np.random.default_rng(args.seed))
    trajectories = phase_portrait(params, starts, cfg)
    write_trajectories_csv(trajectories, args.out)
    counts = {corner: 0 for corner in CORNERS}
    unconverged = 0
    for traj in trajectories:
        if traj.converged_to is None:
            unconverged += 1
        else:
            counts[traj.converged_to] += 1
    for corner, count in counts.items():
        if count:
            print(f"basin ({corner.x:g}, {corner.y:g}): {count}")
    print(f"unconverged: {unconverged}")
    print(f"wrote {len(trajectories)} trajectories to {args.out}")
    return 0


_LAB_KEYS = {
    "steps": int,
    "input_dim": int,
    "feature_dim": int,
    "batch_size": int,
    "noise_scale": float,
    "learning_rate": float,
    "seed": int,
}
_SCHED_KEYS = {
    "center": float,
    "explore_weight": float,
    "prev_loss_scale": float,
    "target_x": float,
    "target_y": float,
    "update_period": int,
    "reward_cap": float,
    "denom_floor": float,
}
_LOSS_KEYS = {"temperature": float, "epsilon": float}


def _parse_train_config(path):
    data = read_kv_file(path)
    known = set(_LAB_KEYS) | set(_SCHED_KEYS) | set(_LOSS_KEYS)
    unknown = set(data) - known
    if unknown:
        raise EvolossError(f"unknown config keys: {sorted(unknown)}")
    if "steps" not in data:
        raise EvolossError("config must set steps")

    def convert(key, cast):
        value = data[key]
        if cast is int and int(value) != value:
            raise EvolossError(f"{key} must be an integer, got {value}")
        return cast(value)

    lab_kwargs = {k: convert(k, c) for k, c in _LAB_KEYS.items() if k in data}
    sched_kwargs = {
        k: convert(k, c)
        for k, c in _SCHED_KEYS.items()
        if k in data and not k.startswith("target_")
    }
    if ("target_x" in data) != ("target_y" in data):
        raise EvolossError("config must set both target_x and target_y or neither")
    if "target_x" in data:
        sched_kwargs["target"] = (data["target_x"], data["target_y"])
    loss_kwargs = {k: convert(k, c) for k, c in _LOSS_KEYS.items() if k in data}
    return lab_kwargs, sched_kwargs, loss_kwargs


def run_train(args) -> int:
    lab_kwargs, sched_kwargs, loss_kwargs = _parse_train_config(args.config)
    if args.seed is not None:
        lab_kwargs["seed"] = args.seed
    cfg = LabConfig(**lab_kwargs)
    sched_cfg = SchedulerConfig(**sched_kwargs)
    log = train_episode(
        cfg,
        sched_cfg,
        temperature=loss_kwargs.get("temperature", DEFAULT_TEMPERATURE),
        epsilon=loss_kwargs.get("epsilon", DEFAULT_OFFDIAG_WEIGHT),
    )
    write_training_log(log, args.out)
    weights_path = args.weights_out or f"{args.out}.weights"
    save_encoder_weights(log.final_weights, weights_path)
    window = min(1000, cfg.steps)
    mean_alpha = float(log.alphas[-window:].mean())
    mean_beta = float(log.betas[-window:].mean())
    target = np.asarray(sched_cfg.target)
    pair = np.array([mean_alpha, mean_beta])
    cosine = float(pair @ target / (np.linalg.norm(pair) * np.linalg.norm(target)))
    print(f"steps = {cfg.steps}")
    print(f"trailing_mean_alpha = {mean_alpha!r}")
    print(f"trailing_mean_beta = {mean_beta!r}")
    print(f"cosine_to_target = {cosine!r}")
    print(f"wrote log to {args.out} and weights to {weights_path}")
    return 0


_HANDLERS = {
    "metrics": run_metrics,
    "saddle": run_saddle,
    "equilibria": run_equilibria,
    "simulate": run_simulate,
    "train": run_train,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (DegenerateGameError, OutOfSimplexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except EvolossError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
