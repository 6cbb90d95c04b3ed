"""Command-line front end: simulate -> train -> infer -> evaluate -> plot.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure. All commands are reproducible byte-for-byte under fixed seeds.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import network
from .config import RunConfig, load_run_config
from .data import (
    build_dataset,
    read_map_csv,
    read_measurement_csv,
    split,
    write_map_csv,
    write_measurement_csv,
)
from .errors import (
    ConfigError,
    DataFormatError,
    DegenerateConfiguration,
    EmptyDataset,
    Landmark2VecError,
)
from .evaluate import evaluation_report, wcl_agent
from .plotting import render_svg
from .simulate import agent_region, gen_inverse_linear, gen_pathloss, make_layout

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

MEASUREMENTS_CSV = "measurements.csv"
LAYOUT_CSV = "layout.csv"
MODEL_CSV = "model.csv"
TRAIN_LOG_JSONL = "train_log.jsonl"
ESTIMATED_MAP_CSV = "estimated_map.csv"
REPORT_JSON = "report.json"


def _write_manifest(out_dir: Path, name: str, payload: dict) -> None:
    path = out_dir / name
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _parse_overrides(items) -> dict:
    overrides = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    return overrides


def _load_config(args) -> RunConfig:
    return load_run_config(args.config, _parse_overrides(args.set), args.seed)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    lmap = make_layout(cfg.to_layout())
    region = agent_region(lmap, cfg.margin)
    if cfg.measurement_model == "pathloss":
        mset = gen_pathloss(
            lmap, cfg.measurements, region, cfg.to_pathloss_params(), cfg.seed
        )
    else:
        mset = gen_inverse_linear(
            lmap, cfg.measurements, region, cfg.to_inverse_linear_params(), cfg.seed
        )
    write_map_csv(lmap, out / LAYOUT_CSV)
    write_measurement_csv(mset, out / MEASUREMENTS_CSV)
    _write_manifest(out, "simulate_manifest.json", {"command": "simulate", **cfg.as_dict()})
    print(f"wrote {out / LAYOUT_CSV} and {out / MEASUREMENTS_CSV}")
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    mset = read_measurement_csv(args.data)
    if args.config is not None and cfg.landmarks != mset.landmark_count:
        raise ConfigError(
            f"config says {cfg.landmarks} landmarks but {args.data} has "
            f"{mset.landmark_count} measurement columns"
        )
    pairs, skipped = build_dataset(mset, cfg.context_size)
    if skipped:
        print(f"skipped {skipped} measurements with fewer than 2 positive weights")
    pairs_train, pairs_val = split(pairs, cfg.train_fraction, cfg.seed)
    model, log = network.train(pairs_train, pairs_val, cfg.to_train_config())
    network.save_model(model, out / MODEL_CSV)
    network.write_train_log(log, out / TRAIN_LOG_JSONL)
    _write_manifest(
        out,
        "train_manifest.json",
        {
            "command": "train",
            "data": str(args.data),
            "stop_reason": log.stop_reason,
            "epochs": len(log.epochs),
            **cfg.as_dict(),
        },
    )
    print(f"stopped after {len(log.epochs)} epochs ({log.stop_reason})")
    if log.stop_reason == network.STOP_NON_FINITE:
        print("training hit non-finite values; wrote last finite model", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_infer(args) -> int:
    out = _out_dir(args)
    model = network.load_model(args.model)
    lmap = network.extract_map(model)
    write_map_csv(lmap, out / ESTIMATED_MAP_CSV)
    print(f"wrote {out / ESTIMATED_MAP_CSV}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    out = _out_dir(args)
    true_map = read_map_csv(args.true)
    est_map = read_map_csv(args.est)
    if true_map.landmark_ids != est_map.landmark_ids:
        raise DataFormatError("landmark ids differ between the true and estimated maps")
    report = evaluation_report(true_map, est_map)
    (out / REPORT_JSON).write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out / REPORT_JSON} (ssme_normalized={report['ssme_normalized']:.6g})")
    if args.agent is not None:
        mset = read_measurement_csv(args.agent)
        rows = [wcl_agent(est_map, mset[i]) for i in range(len(mset))]
        path = out / "agent_positions.csv"
        header = ",".join(["x", "y", "z"][: est_map.dim])
        lines = [header] + [",".join(repr(float(v)) for v in row) for row in rows]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"wrote {path}")
    return EXIT_OK


def cmd_plot(args) -> int:
    out = _out_dir(args)
    lmap = read_map_csv(args.map)
    second = read_map_csv(args.second) if args.second is not None else None
    svg = render_svg(lmap, second)
    path = out / "map.svg"
    path.write_text(svg, encoding="utf-8")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    """simulate -> train -> infer -> evaluate -> plot from one recipe."""
    out = _out_dir(args)
    code = cmd_simulate(args)
    if code != EXIT_OK:
        return code
    train_args = argparse.Namespace(
        config=args.config, seed=args.seed, out=args.out, set=args.set,
        data=out / MEASUREMENTS_CSV,
    )
    code = cmd_train(train_args)
    if code != EXIT_OK:
        return code
    code = cmd_infer(argparse.Namespace(out=args.out, model=out / MODEL_CSV))
    if code != EXIT_OK:
        return code
    code = cmd_evaluate(
        argparse.Namespace(
            out=args.out, true=out / LAYOUT_CSV, est=out / ESTIMATED_MAP_CSV, agent=None
        )
    )
    if code != EXIT_OK:
        return code
    return cmd_plot(
        argparse.Namespace(out=args.out, map=out / LAYOUT_CSV, second=out / ESTIMATED_MAP_CSV)
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="landmark2vec",
        description="Recover relative landmark positions from unlabeled signal measurements.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_config=True):
        if with_config:
            p.add_argument("--config", type=Path, default=None, help="flat key=value recipe file")
            p.add_argument("--seed", type=int, default=None, help="override the config seed")
            p.add_argument("--set", action="append", metavar="KEY=VALUE",
                           help="override one config key (repeatable)")
        p.add_argument("--out", default="out", help="output directory")

    p = sub.add_parser("simulate", help="generate a layout CSV and a measurement CSV")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("train", help="train the embedding network on a measurement CSV")
    common(p)
    p.add_argument("--data", type=Path, required=True, help="measurement CSV")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("infer", help="extract the landmark map from a trained model")
    common(p, with_config=False)
    p.add_argument("--model", type=Path, required=True, help="model CSV")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("evaluate", help="score an estimated map against the true layout")
    common(p, with_config=False)
    p.add_argument("--true", type=Path, required=True, help="true layout CSV")
    p.add_argument("--est", type=Path, required=True, help="estimated map CSV")
    p.add_argument("--agent", type=Path, default=None,
                   help="also position each measurement row of this CSV by weighted centroid")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("plot", help="render one or two maps as a labeled SVG scatter")
    common(p, with_config=False)
    p.add_argument("--map", type=Path, required=True, help="map CSV")
    p.add_argument("--second", type=Path, default=None, help="second map CSV")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("pipeline", help="run simulate, train, infer, evaluate, plot in sequence")
    common(p)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataFormatError, EmptyDataset, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DegenerateConfiguration as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except Landmark2VecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
