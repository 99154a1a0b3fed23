"""Command-line entry point: ``hbsa verify | analyze | teleport | noise-sweep``.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import analyzer, kerr, teleport
from .hilbert import HyperBellLabel
from .kerr import HomodyneModel, KerrParams

DEFAULT_SEED = 20240601
DEFAULT_THETA = math.pi / 6
DEFAULT_ALPHA = 50.0
DEFAULT_TRIALS = 10_000

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

RECORD_CSV_HEADER = [
    "input", "probe_sig", "first_pol", "first_f", "first_s",
    "second_pol", "second_f", "second_s", "decoded", "correct",
]
TELEPORT_CSV_HEADER = ["run", "label", "fidelity"]
SWEEP_CSV_HEADER = ["alpha", "theta", "analytic", "empirical", "trials"]


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    seed: int = DEFAULT_SEED
    theta: float = DEFAULT_THETA
    alpha: float = DEFAULT_ALPHA
    model: str = "ideal"
    output_format: str = "json"
    output_path: str | None = None

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise UsageError("seed must be a non-negative integer")
        if self.model not in ("ideal", "gaussian"):
            raise UsageError(f"unknown model {self.model!r}")
        if self.output_format not in ("json", "csv"):
            raise UsageError(f"unknown format {self.output_format!r}")
        if self.theta < 0 or self.theta > math.pi / 2:
            raise UsageError("theta must lie in [0, pi/2]")
        if self.theta == 0 and self.model == "ideal":
            raise UsageError("theta must be positive for the ideal readout")
        if self.alpha < 0 or (self.model == "gaussian" and self.alpha == 0):
            raise UsageError("alpha must be positive for the gaussian model")

    def homodyne(self) -> HomodyneModel:
        if self.model == "ideal":
            return HomodyneModel.ideal()
        return HomodyneModel.gaussian(self.theta, self.alpha)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


# --- output -----------------------------------------------------------------


def _dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _dump_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(config: RunConfig, text: str) -> None:
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _record_row(rec: dict) -> list:
    d = rec["detection"]
    return [
        rec["input"], " ".join(rec["probe_sig"]),
        d["first"]["pol"], d["first"]["f"], d["first"]["s"],
        d["second"]["pol"], d["second"]["f"], d["second"]["s"],
        rec["decoded"], rec["correct"],
    ]


def _records_output(config: RunConfig, records: list[dict], summary: dict | None) -> str:
    if config.output_format == "csv":
        return _dump_csv(RECORD_CSV_HEADER, [_record_row(r) for r in records])
    payload: dict = {"records": records}
    if summary is not None:
        payload["summary"] = summary
    return _dump_json(payload)


# --- commands ----------------------------------------------------------------


def verify_summary(records: list[analyzer.AnalysisRecord]) -> dict:
    correct = sum(bool(r.correct) for r in records)
    keys = {(r.probe_sig, r.detection.parity_classes()) for r in records}
    injective = len(keys) == len(records)
    table1 = all(r.probe_sig == analyzer.expected_probe_signature(r.input_label) for r in records)
    table2 = all(analyzer.table2_group(r.decoded) == analyzer.table2_group(r.input_label) for r in records)
    return {
        "total": len(records),
        "correct": correct,
        "error_rate": 1.0 - correct / len(records),
        "injective": injective,
        "table1_consistent": table1,
        "table2_consistent": table2,
    }


def cmd_verify(config: RunConfig) -> int:
    records = analyzer.verify_all(config.homodyne(), seed=config.seed)
    summary = verify_summary(records)
    summary["model"] = config.model
    _emit(config, _records_output(config, [r.to_json() for r in records], summary))
    if config.output_format == "csv":
        print(json.dumps(summary), file=sys.stderr)
    if config.model == "gaussian":
        return EXIT_OK
    passed = (
        summary["correct"] == summary["total"]
        and summary["injective"]
        and summary["table1_consistent"]
        and summary["table2_consistent"]
    )
    return EXIT_OK if passed else EXIT_FAIL


def cmd_analyze(config: RunConfig, label_text: str) -> int:
    try:
        label = HyperBellLabel.parse(label_text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    record = analyzer.analyze_label(label, config.homodyne(), config.rng())
    _emit(config, _records_output(config, [record.to_json()], None))
    return EXIT_OK


def parse_amplitudes(text: str) -> tuple[teleport.DofAmplitudes, ...]:
    """Six comma-separated (complex) numbers: aP,bP,aF,bF,aS,bS."""
    try:
        values = [complex(v.strip().replace(" ", "")) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot parse amplitudes {text!r}") from exc
    if len(values) != 6:
        raise UsageError("expected six amplitudes aP,bP,aF,bF,aS,bS")
    try:
        return tuple(teleport.DofAmplitudes(values[i], values[i + 1]) for i in (0, 2, 4))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_teleport(config: RunConfig, amps: str | None = None, n_random: int | None = None) -> int:
    if (amps is None) == (n_random is None):
        raise UsageError("give exactly one of --amps or --random")
    if n_random is not None and n_random <= 0:
        raise UsageError("--random needs a positive count")
    rng = config.rng()
    inputs = [parse_amplitudes(amps)] if amps is not None else [teleport.random_input(rng) for _ in range(n_random)]
    runs = []
    for i, (p, f, s) in enumerate(inputs):
        result = teleport.teleport(p, f, s, config.homodyne(), rng)
        runs.append({"run": i, "label": str(result.label), "fidelity": result.fidelity})
    fids = [r["fidelity"] for r in runs]
    summary = {"runs": len(runs), "min_fidelity": min(fids), "mean_fidelity": float(np.mean(fids)), "model": config.model}
    if config.output_format == "csv":
        _emit(config, _dump_csv(TELEPORT_CSV_HEADER, [[r["run"], r["label"], repr(r["fidelity"])] for r in runs]))
        print(json.dumps(summary), file=sys.stderr)
    else:
        _emit(config, _dump_json({"runs": runs, "summary": summary}))
    return EXIT_OK


def parse_grid(text: str) -> list[float]:
    """``start..stop:step`` with both ends inclusive, or a single value."""
    try:
        if ".." not in text:
            return [float(text)]
        start_s, rest = text.split("..", 1)
        stop_s, step_s = rest.split(":", 1) if ":" in rest else (rest, None)
        start, stop = float(start_s), float(stop_s)
        if step_s is None:
            if start != stop:
                raise UsageError(f"grid {text!r} needs a step")
            return [start]
        step = float(step_s)
    except ValueError as exc:
        raise UsageError(f"cannot parse grid {text!r}") from exc
    if step <= 0 or stop < start:
        raise UsageError(f"grid {text!r} is empty")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def noise_sweep_rows(alphas: Sequence[float], thetas: Sequence[float], trials: int, seed: int) -> list[dict]:
    if not alphas or not thetas:
        raise UsageError("empty grid")
    streams = analyzer.label_streams(seed, len(alphas) * len(thetas))
    rows = []
    for i, alpha in enumerate(alphas):
        for j, theta in enumerate(thetas):
            try:
                params = KerrParams(theta, alpha)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
            rng = streams[i * len(thetas) + j]
            rows.append({
                "alpha": alpha,
                "theta": theta,
                "analytic": kerr.error_probability(params),
                "empirical": kerr.misclassification_rate(params, trials, rng),
                "trials": trials,
            })
    return rows


def cmd_noise_sweep(config: RunConfig, alpha_grid: str, theta_grid: str, trials: int = DEFAULT_TRIALS) -> int:
    if trials <= 0:
        raise UsageError("--trials must be positive")
    rows = noise_sweep_rows(parse_grid(alpha_grid), parse_grid(theta_grid), trials, config.seed)
    if config.output_format == "csv":
        _emit(config, _dump_csv(SWEEP_CSV_HEADER, [[repr(r[k]) if isinstance(r[k], float) else r[k] for k in SWEEP_CSV_HEADER] for r in rows]))
    else:
        _emit(config, _dump_json({"rows": rows}))
    return EXIT_OK


# --- argument parsing --------------------------------------------------------


def _add_globals(parser: argparse.ArgumentParser, suppress: bool, kerr_flags: bool = True) -> None:
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--seed", type=int, default=default(DEFAULT_SEED), help=f"master seed (default {DEFAULT_SEED})")
    if kerr_flags:
        parser.add_argument("--theta", type=float, default=default(DEFAULT_THETA), help="cross-Kerr phase per photon, radians")
        parser.add_argument("--alpha", type=float, default=default(DEFAULT_ALPHA), help="probe coherent amplitude")
    parser.add_argument("--model", choices=("ideal", "gaussian"), default=default("ideal"))
    parser.add_argument("--format", dest="output_format", choices=("json", "csv"), default=default("json"))
    parser.add_argument("--out", dest="output_path", default=default(None), help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hbsa", description="Hyperentangled Bell-state analysis simulator")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="analyze all 64 hyper-Bell states")
    _add_globals(p, suppress=True)

    p = sub.add_parser("analyze", help="analyze one labelled state")
    _add_globals(p, suppress=True)
    p.add_argument("label", help='P,F,S Bell labels, e.g. "phi+,psi-,phi+"')

    p = sub.add_parser("teleport", help="teleport a three-DOF photon state")
    _add_globals(p, suppress=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--random", dest="n_random", type=int, metavar="N")
    group.add_argument("--amps", help="aP,bP,aF,bF,aS,bS (python complex syntax)")

    p = sub.add_parser("noise-sweep", help="analytic vs empirical homodyne error over a grid")
    # here --alpha/--theta take grids; the scalar globals are only accepted before the command
    _add_globals(p, suppress=True, kerr_flags=False)
    p.add_argument("--alpha", dest="alpha_grid", required=True, metavar="A1..A2:STEP")
    p.add_argument("--theta", dest="theta_grid", required=True, metavar="T1..T2:STEP")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = RunConfig(
            seed=args.seed,
            theta=args.theta,
            alpha=args.alpha,
            model=args.model,
            output_format=args.output_format,
            output_path=args.output_path,
        )
        if args.command == "verify":
            return cmd_verify(config)
        if args.command == "analyze":
            return cmd_analyze(config, args.label)
        if args.command == "teleport":
            return cmd_teleport(config, amps=args.amps, n_random=args.n_random)
        return cmd_noise_sweep(config, args.alpha_grid, args.theta_grid, args.trials)
    except UsageError as exc:
        print(f"hbsa: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"hbsa: I/O error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
