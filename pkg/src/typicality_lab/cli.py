"""Command-line entry point for protocol runs, hidden-variable analyses and the battery.

Every command is deterministic given its flags: seeds are explicit (use
``--seed random`` to draw one; it is printed so the run can be replayed),
reports carry no timestamps, and the canonical JSON output is
byte-identical across reruns and across ``--threads`` values.  Exit
status is 0 only when every enabled check passes; failed checks are all
enumerated in the report's ``failures`` list.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import secrets
import sys
from dataclasses import dataclass

from . import battery as battery_mod
from . import chsh as chsh_mod
from . import ghz as ghz_mod
from .linalg import ATOL
from .spaces import FiniteProbabilitySpace
from .worlds import WorldPrefix, sample_world

__all__ = ["SCHEMA_VERSION", "RunConfig", "main", "cmd_chsh", "cmd_ghz", "cmd_lhv", "cmd_battery"]

SCHEMA_VERSION = 1


class UsageError(Exception):
    """Bad invocation or malformed input file; maps to exit status 2."""


@dataclass
class RunConfig:
    """Everything a command needs, resolved from the parsed flags."""

    command: str
    protocol: str | None = None
    trials: int | None = None
    seed: int | None = None
    threads: int = 1
    fmt: str = "json"
    out: str | None = None
    tolerance: float | None = None
    sweep: int | None = None
    h_file: str | None = None
    blocks: tuple[int, ...] = battery_mod.DEFAULT_BLOCK_LENS
    world_file: str | None = None
    fps_file: str | None = None
    world_out: str | None = None


def _parse_blocks(raw: str) -> tuple[int, ...]:
    try:
        blocks = tuple(int(part) for part in raw.split(",") if part.strip())
    except ValueError:
        raise UsageError(f"--blocks expects comma-separated integers, got {raw!r}")
    if not blocks or any(b < 1 for b in blocks):
        raise UsageError(f"--blocks expects positive integers, got {raw!r}")
    return blocks


def _resolve_seed(raw: str | None, required: bool) -> int | None:
    if raw is None:
        if required:
            raise UsageError("--seed is required (use '--seed random' to draw one)")
        return None
    if raw == "random":
        seed = secrets.randbits(64)
        print(f"seed: {seed}", file=sys.stderr)
        return seed
    try:
        seed = int(raw)
    except ValueError:
        raise UsageError(f"--seed expects an integer or 'random', got {raw!r}")
    if not 0 <= seed < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    return seed


def _load_json_file(path: str, what: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as err:
        raise UsageError(f"cannot read {what} file {path!r}: {err}")
    if not text.strip():
        raise UsageError(f"{what} file {path!r} is empty")
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise UsageError(f"{what} file {path!r} is not valid JSON: {err}")


def _load_fps(path: str, what: str) -> FiniteProbabilitySpace:
    obj = _load_json_file(path, what)
    try:
        return FiniteProbabilitySpace.from_json(obj)
    except ValueError as err:
        raise UsageError(f"invalid {what} file {path!r}: {err}")


# -- commands ----------------------------------------------------------


def _maybe_dump_world(config: RunConfig, fps: FiniteProbabilitySpace) -> None:
    """Re-sample the run's world (identical, by determinism) and save it."""
    if config.world_out:
        world = sample_world(fps, config.trials, config.seed, threads=config.threads)
        with open(config.world_out, "w", encoding="utf-8") as handle:
            handle.write(world.to_json())


def cmd_chsh(config: RunConfig) -> tuple[int, dict]:
    """Quantum protocol run plus the analytic/operator distribution cross-check."""
    analytic = chsh_mod.chsh_distribution("analytic")
    operator = chsh_mod.chsh_distribution("linear_algebra")
    cross_diff = float(abs(analytic.weights - operator.weights).max())
    report_obj = chsh_mod.run_chsh(
        config.trials, config.seed, threads=config.threads, battery_blocks=config.blocks
    )
    _maybe_dump_world(config, analytic)
    s_tolerance = (
        config.tolerance
        if config.tolerance is not None
        else report_obj.tolerances["s_value"]
    )
    s_error = abs(report_obj.s_value - chsh_mod.S_TARGET)
    failures = []
    if cross_diff > ATOL:
        failures.append(
            {
                "check": "distribution-cross-check",
                "detail": f"analytic vs operator max diff {cross_diff:.3e} > {ATOL}",
            }
        )
    if s_error > s_tolerance:
        failures.append(
            {
                "check": "s-value",
                "detail": f"|s - 2*sqrt(2)| = {s_error:.6f} > tolerance {s_tolerance:.6f}",
            }
        )
    report = {
        "schema": SCHEMA_VERSION,
        "protocol": "chsh",
        **report_obj.to_dict(),
        "s_target": chsh_mod.S_TARGET,
        "s_tolerance": s_tolerance,
        "cross_check": {
            "max_abs_diff": cross_diff,
            "tolerance": ATOL,
            "pass": cross_diff <= ATOL,
        },
        "failures": failures,
    }
    return (0 if not failures else 1), report


def cmd_ghz(config: RunConfig) -> tuple[int, dict]:
    """Quantum protocol run plus the exhaustive hidden-value enumeration."""
    analytic = ghz_mod.ghz_distribution("analytic")
    operator = ghz_mod.ghz_distribution("linear_algebra")
    cross_diff = float(abs(analytic.weights - operator.weights).max())
    failures = []
    _maybe_dump_world(config, analytic)
    try:
        run = ghz_mod.run_ghz(config.trials, config.seed, threads=config.threads)
        run_dict = run.to_dict()
        violations = run.total_violations
    except ghz_mod.PerfectCorrelationError as err:
        run_dict = {"trials": config.trials, "seed": config.seed}
        violations = -1
        failures.append({"check": "perfect-correlations", "detail": str(err)})
    enumeration = ghz_mod.lhv_ghz_enumerate()
    if violations > 0:
        failures.append(
            {
                "check": "perfect-correlations",
                "detail": f"{violations} rounds violated a required product",
            }
        )
    if enumeration.satisfying_count != 0:
        failures.append(
            {
                "check": "lhv-enumeration",
                "detail": f"{enumeration.satisfying_count} assignments satisfy all constraints",
            }
        )
    if cross_diff > ATOL:
        failures.append(
            {
                "check": "distribution-cross-check",
                "detail": f"analytic vs operator max diff {cross_diff:.3e} > {ATOL}",
            }
        )
    report = {
        "schema": SCHEMA_VERSION,
        "protocol": "ghz",
        **run_dict,
        "lhv": enumeration.to_dict(),
        "cross_check": {
            "max_abs_diff": cross_diff,
            "tolerance": ATOL,
            "pass": cross_diff <= ATOL,
        },
        "failures": failures,
    }
    return (0 if not failures else 1), report


def cmd_lhv(config: RunConfig) -> tuple[int, dict]:
    """Local-realist analyses: exact averages, simulation, sweep, enumeration."""
    if config.protocol == "chsh":
        return _cmd_lhv_chsh(config)
    if config.protocol == "ghz":
        return _cmd_lhv_ghz(config)
    raise UsageError("lhv requires a protocol: chsh or ghz")


def _cmd_lhv_chsh(config: RunConfig) -> tuple[int, dict]:
    report: dict = {"schema": SCHEMA_VERSION, "protocol": "lhv-chsh"}
    failures = []
    bound = 2.0 + 1e-12
    if config.sweep is not None:
        sweep = chsh_mod.lhv_sweep(config.sweep, config.seed)
        report["sweep"] = sweep.to_dict()
        if not sweep.bound_ok:
            failures.append(
                {
                    "check": "chsh-bound",
                    "detail": f"sweep max s_value {sweep.max_s_value!r} exceeds 2",
                }
            )
    elif config.h_file is not None:
        h = _load_fps(config.h_file, "hidden-variable")
        try:
            exact = chsh_mod.lhv_chsh_averages(h)
        except ValueError as err:
            raise UsageError(f"invalid hidden-variable file {config.h_file!r}: {err}")
        if config.trials is not None:
            simulated = chsh_mod.lhv_chsh_simulate(
                h, config.trials, config.seed, threads=config.threads
            )
            report.update(simulated.to_dict())
        else:
            report.update(exact.to_dict())
        if abs(exact.s_value) > bound:
            failures.append(
                {
                    "check": "chsh-bound",
                    "detail": f"exact s_value {exact.s_value!r} exceeds 2",
                }
            )
    else:
        raise UsageError("lhv chsh requires --h-file or --sweep")
    report["failures"] = failures
    return (0 if not failures else 1), report


def _cmd_lhv_ghz(config: RunConfig) -> tuple[int, dict]:
    report: dict = {"schema": SCHEMA_VERSION, "protocol": "lhv-ghz"}
    failures = []
    enumeration = ghz_mod.lhv_ghz_enumerate()
    report["lhv"] = enumeration.to_dict()
    if enumeration.satisfying_count != 0:
        failures.append(
            {
                "check": "lhv-enumeration",
                "detail": f"{enumeration.satisfying_count} assignments satisfy all constraints",
            }
        )
    if config.h_file is not None:
        p = _load_fps(config.h_file, "hidden-variable")
        try:
            feasibility = ghz_mod.lhv_ghz_feasibility(p)
        except ValueError as err:
            raise UsageError(f"invalid hidden-variable file {config.h_file!r}: {err}")
        report["feasibility"] = feasibility.to_dict()
    report["failures"] = failures
    return (0 if not failures else 1), report


def cmd_battery(config: RunConfig) -> tuple[int, dict]:
    """Replay a stored world against a stored space through the battery."""
    world_obj = _load_json_file(config.world_file, "world")
    try:
        world = WorldPrefix.from_json(world_obj)
    except ValueError as err:
        raise UsageError(f"invalid world file {config.world_file!r}: {err}")
    fps = _load_fps(config.fps_file, "probability-space")
    if world.alphabet != fps.alphabet:
        raise UsageError(
            "world and probability-space alphabets differ (symbols and order must match)"
        )
    significance = (
        config.tolerance if config.tolerance is not None else battery_mod.DEFAULT_SIGNIFICANCE
    )
    try:
        result = battery_mod.run_battery(world, fps, config.blocks, significance)
    except ValueError as err:
        raise UsageError(str(err))
    failures = [
        {
            "check": f"block-frequency-k{t.block_len}",
            "detail": f"statistic {t.statistic:.3f} > threshold {t.threshold:.3f}",
        }
        for t in result.tests
        if not t.passed
    ]
    report = {
        "schema": SCHEMA_VERSION,
        "protocol": "battery",
        "world_length": len(world),
        "significance": significance,
        **result.to_dict(),
        "failures": failures,
    }
    return (0 if not failures else 1), report


# -- output ------------------------------------------------------------


def _canonical_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _csv_view(report: dict) -> str:
    """Lossy CSV view: the averages or per-test rows, nothing else."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    protocol = report.get("protocol")
    if protocol in ("chsh", "lhv-chsh") and "averages" in report:
        avg = report["averages"]
        writer.writerow(["rs", "qs", "rt", "qt", "s_value"])
        writer.writerow([avg["rs"], avg["qs"], avg["rt"], avg["qt"], report["s_value"]])
    elif protocol == "lhv-chsh" and "sweep" in report:
        sweep = report["sweep"]
        writer.writerow(["max_s_value", "vertex_max_s_value", "num_random", "bound_ok"])
        writer.writerow(
            [
                sweep["max_s_value"],
                sweep["vertex_max_s_value"],
                sweep["num_random"],
                sweep["bound_ok"],
            ]
        )
    elif protocol == "ghz":
        writer.writerow(["triple", "kind", "count", "value"])
        for triple, entry in sorted(report.get("perfect_correlation", {}).items()):
            writer.writerow([triple, "violations", entry["count"], entry["violations"]])
        for triple, entry in sorted(report.get("free_triples", {}).items()):
            writer.writerow([triple, "mean_product", entry["count"], entry["mean_product"]])
    elif protocol == "lhv-ghz":
        writer.writerow(["field", "value"])
        writer.writerow(["satisfying_count", report["lhv"]["satisfying_count"]])
        writer.writerow(["plus_only_count", report["lhv"]["plus_only_count"]])
    elif protocol == "battery":
        writer.writerow(["block_len", "statistic", "threshold", "dof", "pass"])
        for t in report["tests"]:
            writer.writerow(
                [t["block_len"], t["statistic"], t["threshold"], t["dof"], t["pass"]]
            )
    else:
        writer.writerow(["report"])
        writer.writerow([json.dumps(report, sort_keys=True)])
    return buffer.getvalue()


def _emit(report: dict, config: RunConfig) -> None:
    text = _canonical_json(report) if config.fmt == "json" else _csv_view(report)
    if config.out:
        with open(config.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


# -- argument parsing ----------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="typicality-lab",
        description="Seeded CHSH/GHZ protocol runs, local-hidden-variable analyses, "
        "and block-frequency randomness checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, battery_blocks: bool = False) -> None:
        p.add_argument("--threads", type=int, default=1, help="parallel sampling blocks")
        p.add_argument("--format", choices=("json", "csv"), default="json", dest="fmt")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument(
            "--tolerance",
            type=float,
            help="override the default acceptance tolerance (battery: significance)",
        )
        if battery_blocks:
            p.add_argument(
                "--blocks",
                default="1,2,3",
                help="comma-separated block lengths for the battery",
            )

    p_chsh = sub.add_parser("chsh", help="run the quantum CHSH protocol")
    p_chsh.add_argument("--trials", type=int, required=True)
    p_chsh.add_argument("--seed", required=True)
    p_chsh.add_argument("--world-out", help="also save the sampled world (JSON)")
    add_common(p_chsh, battery_blocks=True)

    p_ghz = sub.add_parser("ghz", help="run the quantum GHZ protocol")
    p_ghz.add_argument("--trials", type=int, required=True)
    p_ghz.add_argument("--seed", required=True)
    p_ghz.add_argument("--world-out", help="also save the sampled world (JSON)")
    add_common(p_ghz)

    p_lhv = sub.add_parser("lhv", help="local-hidden-variable analyses")
    p_lhv.add_argument("protocol", choices=("chsh", "ghz"))
    p_lhv.add_argument("--h-file", help="hidden-variable distribution (JSON)")
    p_lhv.add_argument("--sweep", type=int, help="number of random distributions to test")
    p_lhv.add_argument("--trials", type=int, help="also simulate this many rounds")
    p_lhv.add_argument("--seed")
    add_common(p_lhv)

    p_batt = sub.add_parser("battery", help="test a stored world against a stored space")
    p_batt.add_argument("world_file", help="world JSON file")
    p_batt.add_argument("fps_file", help="probability-space JSON file")
    p_batt.add_argument("--seed")  # accepted for interface uniformity; unused
    add_common(p_batt, battery_blocks=True)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    config = RunConfig(
        command=args.command,
        protocol=getattr(args, "protocol", None),
        trials=getattr(args, "trials", None),
        threads=args.threads,
        fmt=args.fmt,
        out=args.out,
        tolerance=args.tolerance,
        sweep=getattr(args, "sweep", None),
        h_file=getattr(args, "h_file", None),
        world_file=getattr(args, "world_file", None),
        fps_file=getattr(args, "fps_file", None),
        world_out=getattr(args, "world_out", None),
    )
    if hasattr(args, "blocks"):
        config.blocks = _parse_blocks(args.blocks)
    if config.threads < 1:
        raise UsageError("--threads must be at least 1")
    needs_seed = config.command in ("chsh", "ghz") or (
        config.command == "lhv"
        and config.protocol == "chsh"
        and (config.sweep is not None or config.trials is not None)
    )
    config.seed = _resolve_seed(getattr(args, "seed", None), required=needs_seed)
    if config.command == "chsh" and config.trials < chsh_mod.MIN_TRIALS:
        raise UsageError(f"chsh requires --trials >= {chsh_mod.MIN_TRIALS}")
    if config.command == "ghz" and config.trials < ghz_mod.MIN_TRIALS:
        raise UsageError(f"ghz requires --trials >= {ghz_mod.MIN_TRIALS}")
    return config


_COMMANDS = {
    "chsh": cmd_chsh,
    "ghz": cmd_ghz,
    "lhv": cmd_lhv,
    "battery": cmd_battery,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        status, report = _COMMANDS[config.command](config)
        _emit(report, config)
        return status
    except UsageError as err:
        error = {"schema": SCHEMA_VERSION, "error": {"code": "usage", "message": str(err)}}
        print(json.dumps(error, sort_keys=True), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
