"""``entangle-mc`` command line.

Subcommands::

    run <figure> [--gate G ...] [--ensemble pure|all] [--samples N] [--seed S]
                 [--streams K] [--bins B] [--band BAND ...] [--out DIR]
                 [--config FILE]
    inspect <file | random-pure | random-mixed> [--seed S] [--dump FILE]
    plot <figure> [--out DIR]

Exit status: 0 on success, 2 for configuration, parse or missing-file
errors, 3 when a rejection budget runs out, 4 on a numerical invariant
violation.
"""

import argparse
import os
import sys
import time
from importlib import metadata

import numpy as np

from . import __version__
from .errors import ConfigError, InvalidState, InvariantViolation, RejectionBudgetExceeded
from .experiments import FIGURES, ExperimentConfig, run_figure
from .gates import cnot, delta_e, parse_gate
from .measures import (
    concurrence,
    entanglement_of_formation,
    is_ppt_separable,
    min_pt_eigenvalue,
    participation_ratio,
    q_moment,
    von_neumann_entropy,
)
from .output import MissingOutput, emit_plot_script, write_run
from .sampling import RngStream, sample_mixed, sample_pure
from .states import StateParseError, density_from_pure, dump_states, load_states

EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_INVARIANT = 4

MAX_STREAMS = 64
DEFAULT_OUT = "entangle_mc_out"

# config-file keys; list-valued keys may repeat
_LIST_KEYS = {"gate": "gates", "ensemble": "ensembles", "band": "bands"}
_INT_KEYS = {"samples", "seed", "streams", "bins", "block_size", "max_attempts"}


def version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return __version__


def default_streams():
    return max(1, min(os.cpu_count() or 1, MAX_STREAMS))


def read_config(path):
    """Flat ``key = value`` file; ``#`` starts a comment; list keys may repeat."""
    out = {}
    try:
        text = open(path).read()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("config", f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key in _LIST_KEYS:
            out.setdefault(_LIST_KEYS[key], []).append(value)
        elif key in _INT_KEYS:
            try:
                out[key] = int(value)
            except ValueError:
                raise ConfigError(key, f"{path}:{lineno}: expected an integer, got {value!r}") from None
        else:
            raise ConfigError(key, f"{path}:{lineno}: unknown config key {key!r}")
    return out


def build_config(args):
    """Merge the config file (if any) with command-line flags; flags win."""
    values = read_config(args.config) if args.config else {}
    flags = {
        "gates": args.gate,
        "ensembles": [args.ensemble] if args.ensemble else None,
        "bands": args.band,
        "samples": args.samples,
        "seed": args.seed,
        "streams": args.streams,
        "bins": args.bins,
        "block_size": args.block_size,
        "max_attempts": args.max_attempts,
    }
    values.update({k: v for k, v in flags.items() if v is not None})
    for key in ("gates", "ensembles", "bands"):
        if key in values:
            values[key] = tuple(values[key])
    streams = values.pop("streams", default_streams())
    if streams < 1:
        raise ConfigError("streams", "must be >= 1")
    cfg = ExperimentConfig(args.figure, workers=streams, **values)
    return cfg.resolved()


def cmd_run(args):
    cfg = build_config(args)
    start = time.perf_counter()
    result = run_figure(cfg)
    wall = time.perf_counter() - start
    out = args.out or os.environ.get("ENTANGLE_MC_OUT") or DEFAULT_OUT
    final = write_run(result, out, cfg.workers, wall, version())
    for name, s in result.scalars.items():
        err = "" if np.isnan(s.stderr) else f" +- {s.stderr:.2g}"
        print(f"{name} = {s.value:.6g}{err} (n={s.n})")
    print(f"wrote {final} in {wall:.1f}s")
    return 0


def _load_inspected(source, seed):
    if source == "random-pure":
        return density_from_pure(sample_pure(RngStream(seed).generator()))
    if source == "random-mixed":
        return sample_mixed(RngStream(seed).generator())
    states = load_states(source)
    if len(states) != 1:
        raise StateParseError(len(states) + 1 if states else 1, 1, f"expected one state, found {len(states)}")
    return states[0]


def inspect_report(rho):
    """``(name, value)`` rows printed by ``inspect``."""
    rows = [
        ("E", entanglement_of_formation(rho)),
        ("C", concurrence(rho)),
        ("R", participation_ratio(rho)),
        ("S1", von_neumann_entropy(rho)),
        ("omega_2", q_moment(rho, 2)),
        ("omega_3", q_moment(rho, 3)),
        ("min_pt_eigenvalue", min_pt_eigenvalue(rho)),
        ("PPT", bool(is_ppt_separable(rho))),
    ]
    for gate in (cnot(), parse_gate("theta:pi/4")):
        d = delta_e(gate, rho)
        rows.append((f"E_F[{gate.name}]", d.e_final))
        rows.append((f"dE[{gate.name}]", d.delta))
    return rows


def cmd_inspect(args):
    try:
        rho = _load_inspected(args.source, args.seed)
    except OSError as exc:
        raise ConfigError("state", f"cannot read {args.source}: {exc.strerror}") from None
    for name, value in inspect_report(rho):
        text = str(value).lower() if isinstance(value, bool) else f"{value:.12g}"
        print(f"{name} = {text}")
    if args.dump:
        dump_states(args.dump, [rho])
    return 0


def cmd_plot(args):
    if args.figure not in FIGURES:
        raise ConfigError("figure", f"unknown figure {args.figure!r}; choose from {', '.join(FIGURES)}")
    out = args.out or os.environ.get("ENTANGLE_MC_OUT") or DEFAULT_OUT
    path = emit_plot_script(os.path.join(out, args.figure), args.figure)
    print(f"wrote {path}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="entangle-mc", description="Entanglement change under two-qubit gates.")
    p.add_argument("--version", action="version", version=f"%(prog)s {version()}")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="compute one figure analogue")
    r.add_argument("figure", help=", ".join(FIGURES))
    r.add_argument("--gate", action="append", help="cnot, identity or theta:<angle>; repeatable")
    r.add_argument("--ensemble", choices=("pure", "all"))
    r.add_argument("--samples", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--streams", type=int, help="worker processes (default: cores, at most 64)")
    r.add_argument("--bins", type=int)
    r.add_argument("--band", action="append", help="'E=0', 'E in [a,b]' or 'R in [a,b]'; repeatable")
    r.add_argument("--block-size", type=int, dest="block_size")
    r.add_argument("--max-attempts", type=int, dest="max_attempts", help="rejection budget per block")
    r.add_argument("--out", help="output directory (default: $ENTANGLE_MC_OUT or ./entangle_mc_out)")
    r.add_argument("--config", help="key=value file; flags override it")
    r.set_defaults(func=cmd_run)

    i = sub.add_parser("inspect", help="report measures of a single state")
    i.add_argument("source", help="state file, random-pure or random-mixed")
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--dump", help="write the inspected state to this file")
    i.set_defaults(func=cmd_inspect)

    q = sub.add_parser("plot", help="(re)write the plot script of a finished run")
    q.add_argument("figure")
    q.add_argument("--out")
    q.set_defaults(func=cmd_plot)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StateParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvalidState as exc:
        print(f"error: invalid state: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MissingOutput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RejectionBudgetExceeded as exc:
        print(f"error: rejection budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvariantViolation as exc:
        print(f"error: numerical invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
