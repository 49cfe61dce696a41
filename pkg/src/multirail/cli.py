"""Command-line front end: gen, verify, sweep, stats, classes and --reproduce."""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import os
import sys
from collections import Counter
from pathlib import Path

from . import __version__
from .fock import SparseState, SystemShape
from .loss import sweep_lossy
from .optics import MeasurementSetting, outcome_distribution, sample_outcomes
from .reproduce import FIGURES, grid, lossy_csv, reproduce, stats_csv, sweep_csv
from .sources import SourceSpec, db_to_r, generate_postselected, sweep_displacement
from .symmetry import check_complementary_set, check_hw_indices, clock_label, joint_clock_label, orbit_size
from .verifier import VerifierSpec, biproducible_bound

log = logging.getLogger("multirail")

BOOL_KEYS = {"all_kappa"}


def int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in str(text).replace(" ", "").split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).replace(" ", "").split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def parse_source(text: str, r: float | None, x: float) -> SourceSpec:
    name, _, arg = text.partition(":")
    name = name.strip().replace("-", "_")
    if name == "single_photon":
        return SourceSpec.single_photon()
    if name == "fock":
        if not arg:
            raise ValueError("fock source needs a photon count, e.g. fock:2")
        return SourceSpec.fock(int(arg))
    if name == "coherent":
        parts = float_list(arg) if arg else []
        if not 1 <= len(parts) <= 2:
            raise ValueError("coherent source needs an amplitude, e.g. coherent:0.7 or coherent:0.5,0.2")
        return SourceSpec.coherent(complex(parts[0], parts[1] if len(parts) == 2 else 0.0))
    if name == "squeezed":
        if r is None:
            raise ValueError("squeezed source needs --r or --r-db")
        return SourceSpec.squeezed(r, x)
    raise ValueError(f"unknown source {text!r}; use single-photon, fock:N, coherent:RE[,IM] or squeezed")


def squeezing(args) -> float | None:
    if args.r is not None and args.r_db is not None:
        raise ValueError("give either --r or --r-db, not both")
    if args.r_db is not None:
        return db_to_r(args.r_db)
    return args.r


def shape_from(args) -> SystemShape:
    if args.photons is None:
        raise ValueError("--photons is required")
    parties = args.parties if args.parties is not None else len(args.photons)
    return SystemShape(parties, args.modes, tuple(args.photons))


def emit(text: str, output):
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)
        log.info("wrote %s", output)


def cmd_gen(args):
    shape = shape_from(args)
    spec = parse_source(args.source, squeezing(args), args.x)
    result = generate_postselected(shape, spec)
    if result.is_empty:
        log.warning("postselection probability is zero for photons %s with source %s", shape.photons, args.source)
    else:
        log.info("postselection probability %.12g", result.postselect_probability)
    emit(json.dumps(result.state.to_json(), indent=1) + "\n", args.output)


def labels_or_all(L, modes):
    return tuple(range(modes)) if L is None else tuple(L)


def cmd_verify(args):
    state = SparseState.load(args.state)
    if not state.is_normalized(1e-8):
        raise ValueError(f"state in {args.state} is not normalized (norm {state.norm():.12g})")
    shape = state.shape
    spec = VerifierSpec(tuple(args.j), labels_or_all(args.L, shape.modes), args.k, args.kappa)
    report = biproducible_bound(state, spec)
    doc = {"version": __version__, **report.to_json()}
    doc.update({"j": list(spec.indices), "L": list(spec.L), "k": spec.k, "kappa": spec.kappa})
    if not args.all_kappa:
        doc.pop("per_kappa")
    emit(json.dumps(doc, indent=1) + "\n", args.output)


def cmd_sweep(args):
    shape = shape_from(args)
    r = squeezing(args)
    if r is None:
        raise ValueError("sweep needs --r or --r-db")
    xs = grid(args.x_from, args.x_to, args.x_step)
    L = labels_or_all(args.L, shape.modes)
    if args.epsilon is None:
        rows = sweep_displacement(shape, r, xs, args.j, L, args.k, threads=args.threads)
        emit(sweep_csv(rows), args.output)
    else:
        rows = sweep_lossy(shape, r, xs, args.epsilon, args.j, L, args.cutoff, args.k, threads=args.threads)
        emit(lossy_csv(rows), args.output)


def parse_setting(text: str, j, modes: int) -> MeasurementSetting:
    text = text.strip()
    if text == "computational":
        return MeasurementSetting()
    if text.startswith("l="):
        if j is None:
            raise ValueError("Hadamard settings need --j")
        return MeasurementSetting.hadamard(int(text[2:]) % modes, j)
    raise ValueError(f"unknown setting {text!r}; use computational or l=<int>")


def cmd_stats(args):
    state = SparseState.load(args.state)
    if args.j is not None:
        check_hw_indices(state.shape, args.j)
    setting = parse_setting(args.setting, args.j, state.shape.modes)
    dist = outcome_distribution(state, setting)
    counts = None
    if args.samples:
        counts = Counter(sample_outcomes(dist, args.samples, args.seed))
    emit(stats_csv(dist, counts), args.output)


def cmd_classes(args):
    if args.state is not None:
        state = SparseState.load(args.state)
        shape = state.shape
        support = [b for b, _ in state.sorted_items()]
    else:
        from .fock import subspace

        shape = shape_from(args)
        support = list(subspace(shape).states)
    if args.j is not None:
        check_hw_indices(shape, args.j)
    entries = []
    for b in support:
        entry = {
            "basis": [list(p) for p in b],
            "cardinalities": [orbit_size(p) for p in b],
            "clock_labels": [clock_label(p, shape.modes) for p in b],
        }
        entry["min_cardinality"] = min(entry["cardinalities"])
        if args.j is not None:
            entry["joint_label"] = joint_clock_label(b, args.j, shape.modes)
        entries.append(entry)
    doc = {
        "version": __version__,
        "parties": shape.parties,
        "modes": shape.modes,
        "photons": list(shape.photons),
        "basis": entries,
    }
    if args.j is not None:
        cards = {tuple(e["cardinalities"]) for e in entries}
        doc["j"] = list(args.j)
        doc["l_validity"] = [
            [check_complementary_set(shape, args.j, {l, lp}, cards) for lp in range(shape.modes)]
            for l in range(shape.modes)
        ]
    emit(json.dumps(doc, indent=1) + "\n", args.output)


def read_config(path: str) -> dict:
    parser = configparser.ConfigParser()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read config file {path}: {exc}") from exc
    parser.read_string("[run]\n" + text)
    out = {}
    for key, value in parser["run"].items():
        dest = key.strip().lstrip("-").replace("-", "_")
        if dest in BOOL_KEYS:
            out[dest] = value.strip().lower() in ("1", "true", "yes", "on")
        else:
            out[dest] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", default=argparse.SUPPRESS, help="output file (default: stdout)")
    common.add_argument("--threads", type=positive_int, default=argparse.SUPPRESS, help="worker threads")
    common.add_argument("--config", default=argparse.SUPPRESS, help="key = value file of flag defaults")

    parser = argparse.ArgumentParser(prog="multirail", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-o", "--output", default=None, help="output file, or directory for --reproduce")
    parser.add_argument("--threads", type=positive_int, default=os.cpu_count() or 1)
    parser.add_argument("--config", default=None)
    parser.add_argument("--reproduce", choices=FIGURES, help="write the CSV data of a built-in figure")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command")

    def shape_flags(p, required=True):
        p.add_argument("--parties", type=positive_int)
        p.add_argument("--modes", type=positive_int, required=required)
        p.add_argument("--photons", type=int_list, required=required, help="N1,N2,...")

    p = sub.add_parser("gen", parents=[common], help="generate a postselected state file")
    shape_flags(p)
    p.add_argument("--source", required=True, help="single-photon | fock:N | coherent:RE[,IM] | squeezed")
    p.add_argument("--r", type=float)
    p.add_argument("--r-db", type=float)
    p.add_argument("--x", type=float, default=0.0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", parents=[common], help="evaluate a GME verifier and its bound")
    p.add_argument("--state", required=True)
    p.add_argument("--j", type=int_list, required=True)
    p.add_argument("--L", type=int_list, help="measurement labels (default: all)")
    p.add_argument("--k", type=int, default=0)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--kappa", type=int, default=0)
    group.add_argument("--all-kappa", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", parents=[common], help="verifier values along a displacement grid")
    p.add_argument("--parties", type=positive_int)
    p.add_argument("--modes", type=positive_int, default=5)
    p.add_argument("--photons", type=int_list, default=[2, 1, 1])
    p.add_argument("--x-from", type=float, default=0.0)
    p.add_argument("--x-to", type=float, default=1.0)
    p.add_argument("--x-step", type=float, default=0.01)
    p.add_argument("--r", type=float)
    p.add_argument("--r-db", type=float)
    p.add_argument("--j", type=int_list, required=True)
    p.add_argument("--L", type=int_list)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--epsilon", type=float_list, help="loss rates, comma-separated")
    p.add_argument("--cutoff", type=int, default=3, help="maximum number of lost photons kept")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("stats", parents=[common], help="measurement statistics of a state file")
    p.add_argument("--state", required=True)
    p.add_argument("--setting", default="computational", help="computational | l=<int>")
    p.add_argument("--j", type=int_list)
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("classes", parents=[common], help="orbit sizes, clock labels and label validity")
    p.add_argument("--state")
    shape_flags(p, required=False)
    p.add_argument("--j", type=int_list)
    p.set_defaults(func=cmd_classes)
    return parser


def _config_path(argv) -> str | None:
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if arg.startswith("--config="):
            return arg.split("=", 1)[1]
    return None


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        cfg_path = _config_path(argv)
        if cfg_path:
            defaults = read_config(cfg_path)
            parser.set_defaults(**defaults)
            for action in parser._subparsers._group_actions:
                for sp in action.choices.values():
                    for a in sp._actions:
                        if a.dest in defaults:
                            a.required = False
                    known = {a.dest for a in sp._actions}
                    sp.set_defaults(**{k: v for k, v in defaults.items() if k in known})
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.reproduce:
            for path in reproduce(args.reproduce, args.output or ".", args.threads):
                print(path)
            return 0
        if args.command is None:
            parser.print_usage(sys.stderr)
            print("error: a subcommand or --reproduce is required", file=sys.stderr)
            return 2
        args.func(args)
    except (ValueError, IndexError, OSError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
