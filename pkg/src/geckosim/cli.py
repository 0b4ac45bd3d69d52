"""Command line front end.

Exit codes: 0 success (run: perched), 1 run completed without a perch,
2 configuration or usage error. Reports are delimited text plus PNG
figures written next to each other under --out; run also drops a
result.json summary that the exit code is derived from.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import random
import sys
from typing import List, Optional

from . import __version__, adhesion, bridge, report
from .config import ConfigError, ScenarioConfig, apply_overrides, load_config
from .scenario import monte_carlo, run_scenario

EXIT_OK = 0
EXIT_NO_PERCH = 1
EXIT_CONFIG = 2

PULL_BAND_N = (10.4, 11.2)


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="YAML scenario file")
    parser.add_argument("--seed", type=int, help="override the scenario seed")
    parser.add_argument("--out", default="out", help="report directory")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="dotted config override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geckosim",
        description="gecko-adhesive perching gripper twin",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one perch scenario")
    _common(p_run)
    p_run.add_argument("--quiet", action="store_true", help="summary only")

    p_mc = sub.add_parser("monte-carlo", help="randomized perch campaign")
    _common(p_mc)
    p_mc.add_argument("--trials", type=int, default=100)

    p_pull = sub.add_parser("pull-test", help="bench pull-to-failure cycles")
    _common(p_pull)
    p_pull.add_argument("--cycles", type=int, default=20)
    p_pull.add_argument("--quality", type=float, default=adhesion.FLIGHT_QUALITY)

    p_drip = sub.add_parser("drip", help="retrieve an experiment log")
    _common(p_drip)
    p_drip.add_argument("--experiment", type=int, required=True)
    p_drip.add_argument("--sd", required=True, help="card directory to read")

    p_serve = sub.add_parser("serve", help="live telemetry websocket")
    _common(p_serve)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8765)
    p_serve.add_argument("--speed", type=float, default=1.0,
                         help="sim seconds per wall second")
    return parser


def _load(args) -> ScenarioConfig:
    cfg = load_config(args.config)
    if args.overrides:
        cfg = apply_overrides(cfg, args.overrides)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    return cfg


def _cmd_run(args) -> int:
    cfg = _load(args)
    os.makedirs(args.out, exist_ok=True)
    result = run_scenario(cfg)
    report.write_telemetry_csv(os.path.join(args.out, "telemetry.csv"), result)
    report.plot_trajectory(os.path.join(args.out, "trajectory.png"), result)
    report.plot_timeline(os.path.join(args.out, "timeline.png"), result)
    records = result.world.firmware.store.records(cfg.experiment_id)
    bridge.export_geckolog(args.out, cfg.experiment_id, records)
    summary = {
        "perched": result.perched,
        "contact_time_ms": result.contact_time_ms,
        "contact_speed_mm_s":
            None if result.contact_speed_mm_s is None
            else round(result.contact_speed_mm_s, 2),
        "perch_time_ms": result.perch_time_ms,
        "records": result.record_count,
        "engage_attempts": len(result.engage_attempts),
        "experiment_id": cfg.experiment_id,
        "seed": cfg.seed,
    }
    with open(os.path.join(args.out, "result.json"), "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    rows = [
        ("perched", int(summary["perched"])),
        ("contact_time_ms", summary["contact_time_ms"]),
        ("contact_speed_mm_s",
         None if summary["contact_speed_mm_s"] is None
         else f"{summary['contact_speed_mm_s']:.2f}"),
        ("perch_time_ms", summary["perch_time_ms"]),
        ("records", summary["records"]),
        ("engage_attempts", summary["engage_attempts"]),
    ]
    for key, value in rows:
        print(f"{key}\t{value}")
    if not args.quiet:
        print(f"reports\t{args.out}", file=sys.stderr)
    # exit code is a function of result.json alone
    return EXIT_OK if summary["perched"] else EXIT_NO_PERCH


def _cmd_monte_carlo(args) -> int:
    cfg = _load(args)
    os.makedirs(args.out, exist_ok=True)
    campaign = monte_carlo(cfg, trials=args.trials, master_seed=cfg.seed)
    report.write_bins_csv(os.path.join(args.out, "bins.csv"), campaign)
    report.plot_success_rates(os.path.join(args.out, "success_rates.png"), campaign)
    print(f"trials\t{len(campaign.trials)}")
    print(f"success_rate\t{campaign.success_rate:.4f}")
    for b in campaign.bins:
        lo, hi = b.interval()
        print(f"bin_{b.lo:.0f}_{b.hi:.0f}\t{b.successes}/{b.trials}"
              f"\t{b.rate:.3f}\t[{lo:.3f},{hi:.3f}]")
    return EXIT_OK


def _cmd_pull_test(args) -> int:
    cfg = _load(args)
    os.makedirs(args.out, exist_ok=True)
    pairs = [adhesion.TilePair(quality=args.quality) for _ in range(2)]
    rng = random.Random(cfg.seed)
    samples = adhesion.pull_test(pairs, rng, cycles=args.cycles)
    report.write_pull_csv(os.path.join(args.out, "pull.csv"), samples)
    report.plot_pull_forces(os.path.join(args.out, "pull_forces.png"),
                            samples, band=PULL_BAND_N)
    mean = sum(s.measured_n for s in samples) / len(samples)
    print(f"cycles\t{len(samples)}")
    print(f"mean_n\t{mean:.3f}")
    print(f"min_n\t{min(s.measured_n for s in samples):.3f}")
    print(f"max_n\t{max(s.measured_n for s in samples):.3f}")
    for s in samples:
        print(f"cycle_{s.cycle}\t{s.measured_n:.3f}")
    return EXIT_OK


def _cmd_drip(args) -> int:
    cfg = _load(args)
    if not os.path.isdir(args.sd):
        print(f"config error: no such card directory {args.sd!r}", file=sys.stderr)
        return EXIT_CONFIG
    from .bus import Bus
    from .firmware import GripperDevice, GripperFirmware

    firmware = GripperFirmware(sd_dir=args.sd)
    bus = Bus()
    bus.attach(GripperDevice(firmware))
    link = bridge.PacBridge(bus)
    records = link.slow_drip(args.experiment)
    os.makedirs(args.out, exist_ok=True)
    log_path, json_path = bridge.export_geckolog(args.out, args.experiment, records)
    print(f"experiment\t{args.experiment}")
    print(f"records\t{len(records)}")
    print(f"geckolog\t{log_path}")
    print(f"sidecar\t{json_path}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    cfg = _load(args)
    from .serve import SimServer

    server = SimServer(cfg, host=args.host, port=args.port, speed=args.speed)
    print(f"listening\tws://{args.host}:{server.port}/")
    server.serve_forever()
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "monte-carlo": _cmd_monte_carlo,
        "pull-test": _cmd_pull_test,
        "drip": _cmd_drip,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
