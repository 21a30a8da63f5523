"""lcgf command line: sample, experiment, verify.

Exit codes: 0 success, 1 check failure, 2 usage or configuration error.
Seed precedence: --seed flag, then LCGF_SEED, then the config file.
"""
from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from . import __version__
from . import checks, harness, io
from .covariance import SizeError
from .extremes import level_set, m_N
from .rng import RngStream
from .samplers import sampler_for

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _resolve_seed(flag, config_value=None) -> int:
    if flag is not None:
        return int(flag)
    env = os.environ.get("LCGF_SEED")
    if env not in (None, ""):
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"LCGF_SEED must be an integer, got {env!r}") from None
    return int(config_value) if config_value is not None else 0


def cmd_sample(args) -> int:
    if (args.n is None) == (args.N is None):
        raise UsageError("give exactly one of --n (log2 side) or --N (side)")
    N = (1 << args.n) if args.n is not None else args.N
    seed = _resolve_seed(args.seed)
    try:
        sampler = sampler_for(args.model, N, args.d)
        f = sampler(RngStream(seed, 0, "field"))
    except (ValueError, SizeError) as exc:
        raise UsageError(str(exc)) from None
    out = args.out or f"{args.model}_N{N}_d{args.d}_seed{seed}.lcgf"
    io.write_field(out, f)
    print(f"# max = {float(f.values.max())!r}")
    print(f"# m_N = {m_N(N, args.d)!r}")
    print(f"# |Gamma(3)| = {level_set(f, 3.0).cardinality}")
    print(f"# wrote {out}")
    return EXIT_OK


_LIST_FIELDS = {"N", "t_grid", "ell_grid", "lam_grid", "tests", "n_grid"}


def config_from_dict(raw: dict) -> harness.ExperimentConfig:
    names = {f.name for f in dataclasses.fields(harness.ExperimentConfig)}
    if "experiment" not in raw:
        raise harness.ConfigError("experiment", "required")
    kwargs = {}
    for key, value in raw.items():
        if key in ("out_dir", "name"):
            continue
        if key not in names:
            raise harness.ConfigError(key, "unknown key")
        if key in _LIST_FIELDS and not isinstance(value, list):
            value = [value]
        kwargs[key] = value
    try:
        return harness.ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise harness.ConfigError("config", str(exc)) from None


def cmd_experiment(args) -> int:
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    try:
        raw = io.parse_config(text)
        cfg = config_from_dict(raw)
        cfg.seed = _resolve_seed(args.seed, raw.get("seed"))
        cfg.validate()
    except (io.FormatError, harness.ConfigError) as exc:
        raise UsageError(str(exc)) from None
    out_dir = args.out_dir or raw.get("out_dir") or os.path.dirname(os.path.abspath(args.config))
    name = str(raw.get("name", cfg.experiment))
    csv_path, json_path, manifest_path = io.output_paths(out_dir, name)
    manifest = io.RunManifest(io.config_digest(text), __version__, [cfg.seed], io.RunManifest.now(),
                              config_text=text)
    threads = args.threads or os.cpu_count() or 1
    result = harness.run_experiment(cfg, threads=threads)
    io.write_csv(csv_path, result.columns, result.rows)
    io.write_json(json_path, cfg.experiment, {"config": dataclasses.asdict(cfg), "summary": result.summary})
    manifest.finished = io.RunManifest.now()
    manifest.outputs = [os.path.basename(csv_path), os.path.basename(json_path)]
    manifest.write(manifest_path)
    for p in (csv_path, json_path, manifest_path):
        print(f"# wrote {p}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = checks.SUITES[args.suite]()
    failed = [r for r in results if not r.passed]
    for r in results:
        print(f"# {r.label:<28} {r.name}")
    if failed:
        path = os.path.join(args.out_dir or ".", f"lcgf-verify-{args.suite}.json")
        io.write_json(path, f"verify-{args.suite}",
                      {"failed": [{"name": r.name, "detail": r.detail} for r in failed]})
        print(f"# FAIL: certificate written to {path}")
        return EXIT_FAIL
    print(f"# {args.suite}: all checks PASS")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lcgf", description="Monte Carlo lab for log-correlated Gaussian fields")
    p.add_argument("--version", action="version", version=f"lcgf {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="draw one field and write a binary dump")
    s.add_argument("--model", required=True, type=str.lower, choices=["brw", "mbrw", "dgff"])
    s.add_argument("--n", type=int, help="log2 of the side length")
    s.add_argument("--N", type=int, help="side length")
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)

    e = sub.add_parser("experiment", help="run an experiment from a key = value config file")
    e.add_argument("config")
    e.add_argument("--seed", type=int)
    e.add_argument("--threads", type=int, help="worker processes (default: all cores)")
    e.add_argument("--out-dir")
    e.set_defaults(func=cmd_experiment)

    v = sub.add_parser("verify", help="run a module acceptance suite")
    v.add_argument("suite", choices=sorted(checks.SUITES))
    v.add_argument("--out-dir")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"lcgf {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
