"""Command-line entry point: ``crossplat {compare,monitor,scaling,qpt,serve}``.

Settings resolve as CLI flags > ``--config`` JSON file > defaults
(N_U = 100, M = 500, clifford24, exhaustive inputs).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import channels, experiments
from .config import ExperimentConfig
from .errors import CrossPlatError, UsageError

log = logging.getLogger("crossplat")

EXIT_OK = 0


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file (same keys as session config snapshots)")
    p.add_argument("--n", type=int, help="qubit count")
    p.add_argument("--nu", type=int, help="number of unitary draws N_U")
    p.add_argument("--shots", type=int, help="shots per circuit M (0 = exact probabilities)")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--design", choices=["clifford24", "pauli", "haar"])
    p.add_argument("--mode", choices=["free", "assisted"], help="ancilla-free or ancilla-assisted")
    p.add_argument("--inputs", choices=["exhaustive", "sampled"], help="input-state coverage")
    p.add_argument("--channel", help="channel spec, see `crossplat grammar`")
    p.add_argument("--out", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crossplat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compare", help="pairwise max-fidelity matrix across platforms")
    _add_common(p)
    p.add_argument("--platform", action="append", default=[], metavar="LABEL=SPEC",
                   help="platform as label=channel-spec or label=tcp://host:port (repeatable)")
    p.add_argument("--timestamp", help="fixed timestamp written into datasets")

    p = sub.add_parser("monitor", help="one session per day and the day-by-day matrix")
    _add_common(p)
    p.add_argument("--sessions", required=True, help="session directory")
    p.add_argument("--days", type=int, default=7)
    p.add_argument("--day-channel", action="append", default=[], metavar="DAY=SPEC",
                   help="channel override for one day (e.g. 7=depolarizing(0.3)*cnot)")
    p.add_argument("--load-only", action="store_true", help="only compare existing sessions")

    p = sub.add_parser("scaling", help="statistical-error scaling studies")
    _add_common(p)
    p.add_argument("--study", choices=["budget", "qubits"], required=True)
    p.add_argument("--shots-range", default="10,32,100,316,1000,3162",
                   help="budget study: comma-separated shot counts")
    p.add_argument("--qubits", default="1,2,3,4", help="qubits study: comma-separated n values")
    p.add_argument("--process", choices=["ghz", "rotation"], default="ghz")
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--max-shots", type=int, default=1 << 16)
    p.add_argument("--estimator", choices=["corrected", "plugin"], default="corrected",
                   help="unbiased pair statistic (default) or plug-in empirical frequencies")

    p = sub.add_parser("qpt", help="randomized process tomography of one platform")
    _add_common(p)
    p.add_argument("--project", action="store_true", help="clip negative eigenvalues and renormalise")

    p = sub.add_parser("serve", help="run a simulated platform worker")
    p.add_argument("--channel", required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=0)
    p.add_argument("-v", "--verbose", action="store_true")

    sub.add_parser("grammar", help="print the channel spec grammar")
    return parser


def resolve_config(args) -> ExperimentConfig:
    raw = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.is_file():
            raise UsageError(f"config file not found: {path}")
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file {path} is not JSON: {exc}") from None
        # session snapshots carry extra bookkeeping keys
        for key in ("platform_label", "platform_seed", "transport"):
            raw.pop(key, None)
    flags = {
        "n": args.n,
        "n_draws": args.nu,
        "seed": args.seed,
        "design": args.design,
        "protocol": args.mode,
        "input_mode": args.inputs,
        "out_dir": args.out,
    }
    raw.update({k: v for k, v in flags.items() if v is not None})
    if args.shots is not None:
        raw["shots"] = None if args.shots == 0 else args.shots
    platforms = dict(raw.get("platforms", {}))
    for item in getattr(args, "platform", []) or []:
        label, sep, target = item.partition("=")
        if not sep or not label or not target:
            raise UsageError(f"--platform expects LABEL=SPEC, got {item!r}")
        platforms[label] = target
    raw["platforms"] = platforms
    if getattr(args, "timestamp", None):
        raw["timestamp"] = args.timestamp
    return ExperimentConfig.from_dict(raw)


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def cmd_compare(args) -> int:
    config = resolve_config(args)
    for label, target in config.platforms.items():
        if not target.startswith("tcp://"):
            channels.parse_channel_spec(target, config.n)
    result = experiments.compare_platforms(config)
    if result.matrix is not None:
        print(result.matrix.to_csv(), end="")
        for kind, path in result.paths.items():
            log.info("wrote %s", path)
    if not result.complete:
        for label, msg in result.errors.items():
            print(f"error: {label}: {msg}", file=sys.stderr)
        print("warning: partial results (truncated sessions)", file=sys.stderr)
        return 3
    return EXIT_OK


def cmd_monitor(args) -> int:
    config = resolve_config(args)
    overrides = {}
    for item in args.day_channel:
        day, sep, spec = item.partition("=")
        if not sep or not day.isdigit():
            raise UsageError(f"--day-channel expects DAY=SPEC, got {item!r}")
        overrides[int(day)] = spec
    if args.channel:
        channels.parse_channel_spec(args.channel, config.n)
    matrix = experiments.monitor(config, args.sessions, args.days, args.channel, overrides, args.load_only)
    out = Path(args.out or args.sessions)
    matrix.write(out, "monitor_matrix")
    print(matrix.to_csv(), end="")
    return EXIT_OK


def cmd_scaling(args) -> int:
    config = resolve_config(args)
    corrected = args.estimator == "corrected"
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.study == "budget":
        spec = args.channel or ("H" if config.n == 1 else "cnot")
        ch = channels.parse_channel_spec(spec, config.n)
        res = experiments.scaling_budget(ch, _ints(args.shots_range), config.n_draws, args.reps,
                                         config.seed, config.design, corrected)
        path = out / f"scaling_budget_n{config.n}.csv"
    else:
        res = experiments.scaling_qubits(args.process, _ints(args.qubits), args.epsilon, config.n_draws,
                                         args.reps, config.seed, args.max_shots, config.design, corrected)
        path = out / f"scaling_qubits_{args.process}.csv"
    text = res.to_csv()
    path.write_text(text, encoding="utf-8")
    print(text, end="")
    return EXIT_OK


def cmd_qpt(args) -> int:
    config = resolve_config(args)
    spec = args.channel
    if not spec:
        if len(config.platforms) != 1:
            raise UsageError("qpt needs --channel or exactly one configured platform")
        spec = next(iter(config.platforms.values()))
    if spec.startswith("tcp://"):
        raise UsageError("qpt runs against a simulated platform; give a channel spec")
    diag = experiments.run_qpt(config, spec, exact=config.shots is None, project=args.project)
    print(json.dumps(diag, indent=1))
    return EXIT_OK


def cmd_serve(args) -> int:
    from .platform.worker import serve_platform

    server = serve_platform(args.channel, args.n, args.host, args.port)
    host, port = server.address
    print(f"serving {args.channel!r} on {host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "grammar":
        print(channels.GRAMMAR, end="")
        return EXIT_OK
    handlers = {
        "compare": cmd_compare,
        "monitor": cmd_monitor,
        "scaling": cmd_scaling,
        "qpt": cmd_qpt,
        "serve": cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except CrossPlatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
