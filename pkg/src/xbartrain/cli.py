"""Command-line entry points for the fitting / training / evaluation pipeline."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, nn
from .experiments import (
    ConfigError,
    ExperimentConfig,
    evaluate_transfers,
    experiment_dataset,
    heatmap,
    load_experiment_config,
    robustness_curve,
    robustness_table,
    run_experiment,
    write_curve_csv,
    write_heatmap_csv,
    write_json,
    write_table_csv,
)
from .training import train_hardware_aware, train_regular
from .transfer import layouts_for_architecture
from .variability import (
    ConductanceRange,
    ModelFormatError,
    StuckModel,
    VariabilityModel,
    build_bias_db,
    fit_tuning_model,
    make_synthetic_model,
    read_bias_csv,
    read_stuck_csv,
    read_tuning_csv,
    save_model,
)


def _add_common(parser: argparse.ArgumentParser, *, config=True, seed=True, transfers=True,
                out=True, threads=True):
    if config:
        parser.add_argument("--config", type=Path, required=True, help="experiment config JSON")
    if seed:
        parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    if transfers:
        parser.add_argument("--transfers", type=int, default=None,
                            help="override the number of simulated transfers")
    if out:
        parser.add_argument("--out", type=Path, required=True, help="output directory")
    if threads:
        parser.add_argument("--threads", type=int, default=None, help="worker threads")


def _load_config(args) -> ExperimentConfig:
    config = load_experiment_config(args.config)
    if getattr(args, "seed", None) is not None:
        config = replace(config, training=replace(config.training, seed=args.seed))
    if getattr(args, "transfers", None) is not None:
        config = replace(config, transfers=args.transfers)
    if getattr(args, "threads", None) is not None:
        config = replace(config, threads=args.threads)
    return config


def cmd_fit_model(args) -> int:
    records = read_tuning_csv(args.tuning)
    std_model, offset_model, diag = fit_tuning_model(records)
    bias_db = build_bias_db(read_bias_csv(args.bias))
    hrs, lrs = read_stuck_csv(args.stuck)
    if not lrs:
        raise ValueError(f"{args.stuck}: no LRS records; the LRS sampler needs at least one")
    crange = ConductanceRange(args.g_min, args.g_max)
    model = VariabilityModel(
        std_model=std_model,
        offset_model=offset_model,
        bias_db=bias_db,
        stuck_model=StuckModel(lrs_samples=tuple(lrs)),
        range=crange,
    )
    save_model(model, args.out)
    pvals = diag.shapiro_pvalues()
    print(f"fitted std line: {std_model.slope:+.6g} %/uS * g + {std_model.intercept:.6g} %")
    print(f"fitted offset:   mu={offset_model.mu_off:.6g} %  sigma={offset_model.sigma_off:.6g} %")
    print(f"bias database:   {len(bias_db.groups)} n_d groups")
    print(f"ignored {len(hrs)} HRS records (HRS draws are uniform on "
          f"[{model.stuck_model.hrs_low:g}, {model.stuck_model.hrs_high:g}] uS)")
    if pvals:
        below = sum(p < 0.05 for p in pvals)
        print(f"tuning groups:   {len(diag.groups)}; Shapiro-Wilk p<0.05 in {below}/{len(pvals)}")
    print(f"wrote {args.out}")
    return 0


def cmd_gen_synthetic_model(args) -> int:
    save_model(make_synthetic_model(args.seed), args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_train(args) -> int:
    config = _load_config(args)
    model = config.resolve_model()
    train_set, test_set = experiment_dataset(config)
    args.out.mkdir(parents=True, exist_ok=True)
    if args.hardware_aware:
        net = train_hardware_aware(config.training, train_set, model=model)
        name = "hardware_aware"
    else:
        net = train_regular(config.training, train_set)
        name = "regular"
    path = args.out / f"{name}.json"
    nn.save_checkpoint(net, path)
    print(f"{name}: train accuracy {nn.accuracy(net, train_set.points, train_set.labels):.4f}, "
          f"test accuracy {nn.accuracy(net, test_set.points, test_set.labels):.4f}")
    print(f"wrote {path}")
    return 0


def cmd_evaluate(args) -> int:
    config = _load_config(args)
    model = config.resolve_model()
    _, test_set = experiment_dataset(config)
    net = nn.load_checkpoint(args.checkpoint)
    layouts = layouts_for_architecture(net.sizes, *config.training.tile)
    report = evaluate_transfers(
        net, model, layouts, config.training.hrs_fraction, config.training.lrs_fraction,
        test_set, config.transfers, config.training.seed, workers=config.threads,
    )
    args.out.mkdir(parents=True, exist_ok=True)
    write_json(args.out / "report.json", {
        "transfers": report.transfers,
        "counts": report.counts.tolist(),
        "fractions": report.fractions.tolist(),
    })
    write_table_csv(args.out / "table.csv", robustness_table(report))
    write_curve_csv(args.out / "curve.csv", *robustness_curve(report))
    share = float(np.mean(report.fractions >= 0.95))
    print(f"{report.transfers} transfers: {100 * share:.1f}% of test points classified "
          f"correctly by >= 95% of transfers")
    print(f"wrote {args.out}/report.json, table.csv, curve.csv")
    return 0


def cmd_heatmap(args) -> int:
    config = _load_config(args)
    model = config.resolve_model()
    net = nn.load_checkpoint(args.checkpoint)
    layouts = layouts_for_architecture(net.sizes, *config.training.tile)
    repetitions = args.transfers if args.transfers is not None else config.heatmap_repetitions
    hm = heatmap(
        net, model, layouts, config.training.hrs_fraction, config.training.lrs_fraction,
        config.grid, repetitions=repetitions, seed=config.training.seed, workers=config.threads,
    )
    args.out.mkdir(parents=True, exist_ok=True)
    write_heatmap_csv(args.out / "heatmap.csv", hm)
    print(f"wrote {args.out}/heatmap.csv ({config.grid.nx}x{config.grid.ny} cells, "
          f"{repetitions} transfers)")
    return 0


def cmd_run(args) -> int:
    config = _load_config(args)
    config_doc = json.loads(Path(args.config).read_text())
    written = run_experiment(config, args.out, config_doc=config_doc)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xbartrain",
        description="Crossbar variability fitting, hardware-aware training and "
                    "Monte-Carlo transfer evaluation",
    )
    parser.add_argument("--version", action="version", version=f"xbartrain {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit-model", help="fit a variability model from raw characterization CSVs")
    p.add_argument("--tuning", type=Path, required=True, help="device_id,g_target_uS,read_uS")
    p.add_argument("--bias", type=Path, required=True, help="n_d,delta_g_uS")
    p.add_argument("--stuck", type=Path, required=True, help="kind{HRS|LRS},g_uS")
    p.add_argument("--g-min", type=float, default=100.0)
    p.add_argument("--g-max", type=float, default=400.0)
    p.add_argument("--out", type=Path, required=True, help="output model JSON")
    p.set_defaults(func=cmd_fit_model)

    p = sub.add_parser("gen-synthetic-model", help="write the documented synthetic default model")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_gen_synthetic_model)

    p = sub.add_parser("train", help="train one network from a config")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--hardware-aware", action="store_true")
    group.add_argument("--regular", action="store_true")
    _add_common(p, transfers=False, threads=False)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="robustness report for a trained checkpoint")
    p.add_argument("--checkpoint", type=Path, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("heatmap", help="classification-variability heatmap for a checkpoint")
    p.add_argument("--checkpoint", type=Path, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("run", help="full pipeline: train both networks, evaluate, write artifacts")
    _add_common(p)
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ModelFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
