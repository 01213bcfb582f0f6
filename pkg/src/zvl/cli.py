"""Command line entry point: ``zvl <subcommand> ...``.

Exit codes: 0 when every pass flag holds, 1 when a check failed, 2 for usage
or configuration errors.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import sys
from pathlib import Path

from . import experiments as ex
from .config import dump_config, parse_config
from .dynamics import ModelParams, StepperConfig
from .errors import InvalidParameter, ParseError, ValidationError, ZvlError
from .io import MANIFEST_SUFFIX, RunManifest, _stamp, default_out_dir, read_manifest, write_manifest, write_timeseries

log = logging.getLogger("zvl")

_TABLE_INDEX = {"drift": "dt", "samples": "sample_id"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 2 without the argparse traceback noise
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def write_run(rep: ex.Report, cfg: ex.ExperimentConfig, out: Path, name: str | None = None,
              timestamps: bool = False, started: str | None = None) -> Path:
    """Series and tables as CSV plus one ``<name>.manifest.json`` describing the run."""
    name = name or rep.scenario
    out.mkdir(parents=True, exist_ok=True)
    files = []
    if rep.series is not None:
        write_timeseries(rep.series, out / f"{name}.csv", manifest=False)
        files.append(f"{name}.csv")
    for key, table in rep.tables.items():
        fname = f"{name}_{key}.csv"
        write_timeseries(table, out / fname, index=_TABLE_INDEX.get(key, "t"), manifest=False)
        files.append(fname)
    m = RunManifest(
        files=files, config=dump_config(cfg), seed=cfg.seed,
        grid={"half_length": cfg.half_length, "num_points": cfg.num_points},
        stepper=dataclasses.asdict(cfg.stepper), summary=rep.summary(), passed=rep.passed,
        flags=dict(rep.flags), numbers={k: float(v) for k, v in rep.numbers.items()},
        start_time=started if timestamps else None, end_time=_stamp() if timestamps else None)
    return write_manifest(m, out / f"{name}{MANIFEST_SUFFIX}")


def _finish(rep: ex.Report, cfg, args, name=None) -> int:
    out = Path(args.out) if getattr(args, "out", None) else default_out_dir()
    write_run(rep, cfg, out, name, getattr(args, "timestamps", False), getattr(args, "_started", None))
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(rep.summary())
    return 0 if rep.passed else 1


def _simulate(args) -> int:
    cfg = parse_config(args.config)
    return _finish(ex.run(cfg), cfg, args)


def _soliton(args) -> int:
    system = args.system
    kind = "wu" if system == "zakharov" else "chen"
    data = ex.DataSpec(kind, omega=args.omega, speed=args.speed)
    stepper = StepperConfig(dt=args.dt, t_final=args.t_final, record_every=args.record_every)
    cfg = ex.ExperimentConfig("soliton_validation", ModelParams(system), half_length=args.half_length,
                              num_points=args.points, stepper=stepper, data=data)
    rep = ex.run_soliton_validation(cfg)
    return _finish(rep, cfg, args, name=f"soliton_{system}")


def _virial(args) -> int:
    cfg = parse_config(args.config)
    return _finish(ex.run_virial_check(cfg), cfg, args, name="virial_check")


def _coercivity(args) -> int:
    cfg = ex.ExperimentConfig("coercivity", half_length=args.half_length, num_points=args.points,
                              seed=args.seed, weight_lambda=args.lam, samples=args.samples)
    rep = ex.run_coercivity(cfg)
    print(f"c0 estimate {rep.numbers['c0']:.6g} (reseeded {rep.numbers['c0_reseeded']:.6g}), "
          f"violations {int(rep.numbers['violations'])}")
    return _finish(rep, cfg, args)


def _audit(args) -> int:
    cfg = parse_config(args.config)
    cfg = dataclasses.replace(cfg, scenario="conservation_audit") if cfg.scenario != "conservation_audit" else cfg
    return _finish(ex.run_conservation_audit(cfg), cfg, args, name="conservation_audit")


def _report(args) -> int:
    out = Path(args.out) if args.out else default_out_dir()
    paths = sorted(out.glob(f"*{MANIFEST_SUFFIX}"))
    if not paths:
        print(f"no manifests in {out}", file=sys.stderr)
        return 2
    ok = True
    for p in paths:
        m = read_manifest(p)
        if m.get("passed") is None:
            continue
        ok &= bool(m["passed"])
        print(m["summary"])
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="zvl", description="Decay, soliton and virial checks for Zakharov-type systems.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def out_opts(sp):
        sp.add_argument("--out", help="output directory (default $ZVL_OUT_DIR or ./zvl_out)")
        sp.add_argument("--timestamps", action="store_true", help="record wall times in the manifest")

    s = sub.add_parser("simulate", help="run the scenario in a config file")
    s.add_argument("--config", required=True)
    out_opts(s)
    s.set_defaults(func=_simulate)

    s = sub.add_parser("soliton-check", help="propagate an exact soliton and compare")
    s.add_argument("--system", choices=("zakharov", "kgz"), required=True)
    s.add_argument("--omega", type=float, required=True)
    s.add_argument("--speed", type=float, required=True)
    s.add_argument("--t-final", type=float, default=10.0)
    s.add_argument("--dt", type=float, default=1e-3)
    s.add_argument("--record-every", type=int, default=100)
    s.add_argument("--points", type=int, default=2048)
    s.add_argument("--half-length", type=float, default=64.0 * math.pi)
    out_opts(s)
    s.set_defaults(func=_soliton)

    s = sub.add_parser("virial-check", help="residual tables for every applicable virial identity")
    s.add_argument("--config", required=True)
    out_opts(s)
    s.set_defaults(func=_virial)

    s = sub.add_parser("coercivity", help="sample the coercivity lemma and estimate c0")
    s.add_argument("--samples", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--lambda", dest="lam", type=float, default=1.0)
    s.add_argument("--points", type=int, default=512)
    s.add_argument("--half-length", type=float, default=20.0)
    out_opts(s)
    s.set_defaults(func=_coercivity)

    s = sub.add_parser("audit", help="conservation drifts at dt, dt/2, dt/4")
    s.add_argument("--config", required=True)
    out_opts(s)
    s.set_defaults(func=_audit)

    s = sub.add_parser("report", help="summarize every run manifest in a directory")
    s.add_argument("--out")
    s.set_defaults(func=_report)
    return p


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"zvl: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    args._started = _stamp()
    try:
        return args.func(args)
    except (ParseError, ValidationError, InvalidParameter, FileNotFoundError) as exc:
        print(f"zvl: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ZvlError as exc:
        print(f"zvl: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
