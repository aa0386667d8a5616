"""Command-line entry point: ``photonbell {state,confusion,qkd,sweep}``.

Angles for wave plates are in degrees, phases in radians.  Output goes to
stdout unless ``--out`` is given; files are written only after a run
completes.
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import os
import sys
import tempfile
from dataclasses import asdict

from .circuits import BELL_PREP, PORT_NAMES, PrepSettings, prepare, settings_for
from .detection import ChannelNoise, DetectorModel, SweepTable, phase_sweep, run_confusion
from .qkd import QkdParams, run_qkd, trace_csv
from .states import BellLabel, nearest_named_state

_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
}


def _eval(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_eval(node.left), _eval(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_eval(node.operand))
    raise ValueError


def number(text: str) -> float:
    """Float, optionally written with ``pi`` (e.g. ``pi/2``, ``3*pi/4``)."""
    try:
        value = _eval(ast.parse(text.strip(), mode="eval").body)
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return value


def grid(text: str) -> list[float]:
    values = [number(tok) for tok in text.split(",") if tok.strip()]
    if not values:
        raise argparse.ArgumentTypeError("empty grid")
    return values


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def seed_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be >= 0")
    return value


def probability(text: str) -> float:
    value = number(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1]: {text!r}")
    return value


def efficiencies(text: str) -> tuple:
    parts = [probability(tok) for tok in text.split(",")]
    if len(parts) == 1:
        parts *= 4
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("--eta takes 1 or 4 comma-separated values")
    return tuple(parts)


def non_negative(text: str) -> float:
    value = number(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {text!r}")
    return value


def _add_run_options(p: argparse.ArgumentParser, trials_flag: str, default: int) -> None:
    p.add_argument(trials_flag, dest="trials", type=positive_int, default=default,
                   help=f"number of trials (default {default})")
    p.add_argument("--seed", type=seed_int, default=0)
    p.add_argument("--workers", type=positive_int, default=1,
                   help="parallel workers; never changes the output")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    noise = p.add_argument_group("channel noise")
    noise.add_argument("--phase-sigma", type=non_negative, default=0.0,
                       help="std-dev of per-trial phase jitter on path a [rad]")
    noise.add_argument("--phase-offset", type=number, default=0.0,
                       help="static phase error on path a [rad]")
    noise.add_argument("--misalign-a", type=number, default=0.0, help="polarization rotation in path a [deg]")
    noise.add_argument("--misalign-b", type=number, default=0.0, help="polarization rotation in path b [deg]")
    det = p.add_argument_group("detectors")
    det.add_argument("--eta", type=efficiencies, default=(1.0, 1.0, 1.0, 1.0),
                     help="detector efficiencies, one value or four comma-separated")
    det.add_argument("--dark-rate", type=non_negative, default=0.0, help="dark counts per second per detector")
    det.add_argument("--gate-window", type=non_negative, default=3e-9, help="coincidence window [s]")
    det.add_argument("--herald-efficiency", type=probability, default=1.0)


def _add_prep_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--hwp", type=number, default=22.5, help="preparation HWP angle [deg]")
    p.add_argument("--phi", type=number, default=0.0, help="spatial phase on path a [rad]")
    p.add_argument("--flip-a", action="store_true", help="insert the plate in path a")
    p.add_argument("--flip-b", action="store_true", help="insert the plate in path b")
    p.add_argument("--theta-a", type=number, help="angle of the path-a plate [deg]; implies --flip-a")
    p.add_argument("--theta-b", type=number, help="angle of the path-b plate [deg]; implies --flip-b")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="photonbell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("state", help="prepare a state and print its amplitudes")
    _add_prep_options(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")

    p = sub.add_parser("confusion", help="Bell-analyzer count table for the four Bell inputs")
    _add_run_options(p, "--trials", 10_000)

    p = sub.add_parser("qkd", help="two-basis key exchange simulation")
    _add_run_options(p, "--photons", 100_000)
    p.set_defaults(format="json")
    p.add_argument("--eve", action="store_true", help="intercept-resend eavesdropper on every photon")
    p.add_argument("--trace", help="also write a per-round CSV trace to this file")

    p = sub.add_parser("sweep", help="phase sweep (Bell ports) or jitter sweep (QBER)")
    _add_run_options(p, "--trials", 100_000)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--phi-grid", type=grid, help="comma-separated phase offsets [rad], e.g. 0,pi/2,pi")
    g.add_argument("--sigma-grid", type=grid, help="comma-separated jitter std-devs [rad]")
    p.add_argument("--eve", action="store_true", help="(sigma grid) enable the eavesdropper")
    return parser


def _noise(args) -> ChannelNoise:
    return ChannelNoise(args.phase_sigma, args.phase_offset, args.misalign_a, args.misalign_b)


def _detector(args) -> DetectorModel:
    return DetectorModel(args.eta, args.dark_rate, args.gate_window, args.herald_efficiency)


def _prep(args) -> PrepSettings:
    return PrepSettings(
        prep_hwp=args.hwp,
        phi=args.phi,
        flip_a=args.flip_a or args.theta_a is not None,
        flip_b=args.flip_b or args.theta_b is not None,
        theta_a=45.0 if args.theta_a is None else args.theta_a,
        theta_b=45.0 if args.theta_b is None else args.theta_b,
    )


def run_config(args) -> dict:
    """Echo of the parameters that determine the output bytes (no paths, no worker count)."""
    skip = {"out", "workers", "trace"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        out[k] = list(v) if isinstance(v, tuple) else v
    return out


def cmd_state(args) -> str:
    settings = _prep(args)
    s = prepare(settings)
    label = nearest_named_state(s)
    name = label.name if label is not None else None
    if args.format == "json":
        data = {
            "amplitudes": {k: [float(z.real), float(z.imag)] for k, z in zip(PORT_NAMES, s.amp)},
            "label": name,
            "settings": asdict(settings),
        }
        return json.dumps(data, indent=2) + "\n"
    lines = [f"{k}: {z.real:+.12f} {z.imag:+.12f}j" for k, z in zip(PORT_NAMES, s.amp)]
    lines.append(f"label: {name if name else '-'}")
    return "\n".join(lines) + "\n"


def cmd_confusion(args) -> str:
    table = run_confusion(BELL_PREP, args.trials, _noise(args), _detector(args), args.seed, args.workers)
    if args.format == "json":
        table.metadata["config"] = run_config(args)
        return table.to_json()
    return table.to_csv()


def cmd_qkd(args) -> tuple[str, str | None]:
    params = QkdParams(args.trials, _noise(args), _detector(args), args.eve, args.seed)
    trace = [] if args.trace else None
    report = run_qkd(params, args.workers, trace)
    if args.format == "json":
        data = report.to_dict()
        data["config"] = run_config(args)
        text = json.dumps(data, indent=2) + "\n"
    else:
        d = report.to_dict()
        keys = ("sent", "sifted", "key_bits", "bit_errors", "qber", "basis_mismatch", "discarded",
                "bits_per_sifted_photon", "baseline_bits_per_sifted_photon")
        text = ",".join(keys) + "\n" + ",".join(str(d[k]) for k in keys) + "\n"
    return text, (trace_csv(trace) if trace is not None else None)


def cmd_sweep(args) -> str:
    if args.phi_grid is not None:
        table = phase_sweep(settings_for(BellLabel.PsiPlus), args.phi_grid, args.trials,
                            _detector(args), args.seed, _noise(args), args.workers)
    else:
        rows = []
        for sigma in args.sigma_grid:
            if sigma < 0:
                raise ValueError("sigma grid values must be >= 0")
            noise = ChannelNoise(sigma, args.phase_offset, args.misalign_a, args.misalign_b)
            rep = run_qkd(QkdParams(args.trials, noise, _detector(args), args.eve, args.seed), args.workers)
            rows.append([float(sigma), rep.qber, rep.per_basis["B"]["qber"], rep.per_basis["BPRIME"]["qber"],
                         rep.sent, rep.sifted])
        table = SweepTable(["sigma", "qber", "qber_B", "qber_Bprime", "sent", "sifted"], rows)
    if args.format == "json":
        table.metadata["config"] = run_config(args)
        return table.to_json()
    return table.to_csv()


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".photonbell-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "state":
            outputs = [(args.out, cmd_state(args))]
        elif args.command == "confusion":
            outputs = [(args.out, cmd_confusion(args))]
        elif args.command == "qkd":
            text, trace = cmd_qkd(args)
            outputs = [(args.out, text)]
            if trace is not None:
                outputs.append((args.trace, trace))
        else:
            outputs = [(args.out, cmd_sweep(args))]
    except ValueError as exc:
        parser.error(str(exc))
    for path, text in outputs:
        _write(path, text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
