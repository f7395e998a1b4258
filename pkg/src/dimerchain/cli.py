"""Command-line entry point.

Exit codes: 0 success, 2 configuration or usage error, 3 runtime error.
Relative ``--config`` paths that do not exist in the working directory are
looked up in ``$DIMERCHAIN_CONFIG_DIR``.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

from . import __version__
from .experiments import ConfigError, load_config, run

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3
CONFIG_DIR_ENV = "DIMERCHAIN_CONFIG_DIR"

COMMANDS = {
    "sweep-lambda": ("lambda-sweep", "probabilities vs lambda*t"),
    "sweep-omega": ("omega-sweep", "probabilities vs lambda*t for frozen on-site energies"),
    "correlators": ("correlators", "nearest-neighbour <XX> and <YY> vs lambda*t"),
    "fidelity": ("fidelity-vs-iterations", "tomography fidelity vs iteration count"),
    "vqe": ("vqe-layers", "VQE ground and first excited energies vs ansatz layers"),
    "spectrum": ("spectrum", "exact eigenvalues of the chain Hamiltonian"),
    "trotter-error": ("trotter-error", "operator-norm Trotter error vs step count"),
}

log = logging.getLogger("dimerchain")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run")
    g.add_argument("--config", help="key = value config file")
    g.add_argument("--seed", type=int)
    g.add_argument("--shots", type=int, help="0 selects exact mode")
    g.add_argument("--noise-p", type=float, dest="noise_p")
    g.add_argument("--out", help="output file (default: print to stdout)")
    g.add_argument("--format", choices=("csv", "json"))
    g.add_argument("--workers", type=int, help="worker processes (default: all CPUs)")
    g.add_argument("-v", "--verbose", action="count", default=0)
    m = p.add_argument_group("model")
    m.add_argument("--n", type=int, help="number of qubits")
    m.add_argument("--omega", help="comma-separated on-site energies")
    m.add_argument("--lambda", dest="lam", help="coupling strength")
    m.add_argument("--time", help="total evolution time")
    m.add_argument("--steps", type=int, help="Trotter steps")
    m.add_argument("--grid", help="lambda*t grid in degrees, e.g. 0:360:10")
    m.add_argument("--layers", help="ansatz layer counts, e.g. 1:40")
    m.add_argument("--iterations", help="iteration counts, e.g. 1,5,10")
    m.add_argument("--steps-grid", dest="steps_grid", help="step counts for trotter-error")
    m.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE",
        help="override any config key (repeatable)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dimerchain", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        _common(sub.add_parser(name, help=help_text, description=help_text))
    return parser


def resolve_config_path(path: str) -> Path:
    p = Path(path)
    if p.exists() or p.is_absolute():
        return p
    base = os.environ.get(CONFIG_DIR_ENV)
    if base and (Path(base) / p).exists():
        return Path(base) / p
    return p


def overrides_from_args(args: argparse.Namespace) -> dict:
    keys = (
        "seed", "shots", "noise_p", "out", "format", "workers", "n", "omega", "lam",
        "time", "steps", "grid", "layers", "iterations", "steps_grid",
    )
    out = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        out[key.strip()] = value
    for k in keys:
        v = getattr(args, k)
        if v is not None:
            out[k] = str(v)
    out["kind"] = COMMANDS[args.command][0]
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        path = resolve_config_path(args.config) if args.config else None
        cfg = load_config(path, overrides_from_args(args))
    except ConfigError as exc:
        print(f"dimerchain: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    start = time.perf_counter()
    try:
        table = run(cfg)
        text = table.render(cfg.format)
        if cfg.out:
            table.write(cfg.out, cfg.format)
        else:
            sys.stdout.write(text)
    except (ConfigError, ValueError) as exc:
        print(f"dimerchain: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"dimerchain: I/O error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    elapsed = time.perf_counter() - start

    if cfg.kind == "spectrum":
        vals = " ".join(f"{v:.10g}" for v in table.column("eigenvalue"))
        print(f"eigenvalues: {vals}", file=sys.stderr if not cfg.out else sys.stdout)
    dest = cfg.out or "stdout"
    summary = f"{cfg.kind}: {len(table.rows)} rows in {elapsed:.2f}s (seed {cfg.seed}) -> {dest}"
    print(summary, file=sys.stderr if not cfg.out else sys.stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
