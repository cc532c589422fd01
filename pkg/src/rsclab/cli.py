"""Command-line entry point ``rsc``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
import yaml

from rsclab import homology, stats
from rsclab.complex import SimplicialComplex, euler_characteristic
from rsclab.harness.config import ConfigError, ExperimentConfig, shipped_configs
from rsclab.harness.runner import run_experiment
from rsclab.models import geometric
from rsclab.models.registry import FAMILIES, ModelSpec
from rsclab.rng import RandomSource


def _key_value(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    key, value = text.split("=", 1)
    if value.startswith("="):
        return key, value
    return key, yaml.safe_load(value)


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="ascii")


def _read_complex(path: str) -> SimplicialComplex:
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="ascii")
    return SimplicialComplex.from_text(text)


def _model_params(args) -> dict:
    params = {}
    for name in ("n", "d", "p", "M", "r", "degree", "max_dim", "process", "mode", "rho"):
        v = getattr(args, name, None)
        if v is not None:
            params[name] = v
    if getattr(args, "pvec", None):
        params["pvec"] = _floats(args.pvec)
    if getattr(args, "box", False):
        params["periodic"] = False
    for key, value in getattr(args, "param", None) or []:
        params[key] = value
    return params


def _add_model_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--M", type=int)
    p.add_argument("--pvec", help="comma-separated level probabilities p1,p2,...")
    p.add_argument("--param", type=_key_value, action="append", metavar="KEY=VALUE", help="extra model parameter (YAML value or =expression)")


def cmd_gen(args) -> int:
    params = _model_params(args)
    if args.family in ("rips", "cech"):
        params.setdefault("d", 2)
        params["filtration"] = bool(args.filtration)
    spec = ModelSpec(args.family, params)
    sample = spec.generate(RandomSource(args.seed).generator())
    _write(sample.complex.to_text(), args.out)
    if args.points_out and sample.points is not None:
        Path(args.points_out).write_text(geometric.TorusPointCloud(sample.points).to_csv(), encoding="ascii")
    if args.births_out and sample.filtration is not None:
        F = sample.filtration
        lines = ["simplex,birth"]
        for k in range(F.complex.dim + 1):
            for row, b in zip(F.complex.level(k), F.births[k]):
                lines.append(f"{' '.join(map(str, row))},{float(b)!r}")
        Path(args.births_out).write_text("\n".join(lines) + "\n", encoding="ascii")
    return 0


def cmd_homology(args) -> int:
    X = _read_complex(args.input)
    b = homology.betti_numbers(X, args.max_dim)
    report = {"n": X.n, "f_vector": list(X.f_vector()), "betti": list(b), "euler": euler_characteristic(X)}
    if args.json:
        print(json.dumps(report))
    else:
        print("betti " + " ".join(map(str, b)))
        print("f_vector " + " ".join(map(str, report["f_vector"])))
        print(f"euler {report['euler']}")
    return 0


def cmd_persistence(args) -> int:
    cloud = geometric.TorusPointCloud.from_csv(Path(args.points).read_text(encoding="ascii"))
    build = geometric.cech_complex if args.complex == "cech" else geometric.rips_complex
    F = build(cloud.points, args.r, args.max_dim + 1, filtration=True, periodic=not args.box)
    D = homology.persistent_homology(F, args.max_dim)
    _write(D.to_csv(), args.out)
    return 0


def cmd_stats(args) -> int:
    X = _read_complex(args.input)
    params = _model_params(args)
    params.setdefault("n", X.n)
    spec = {"family": args.family, **params}
    levels = len(params["pvec"]) if "pvec" in params else None
    suff = stats.sufficient_statistics(X, args.family, params.get("d"), levels)
    out = {"sufficient_statistics": suff.as_dict()}
    try:
        lp = stats.log_probability(X, spec)
        out["log_probability"] = None if np.isneginf(lp) else lp
        out["in_support"] = bool(np.isfinite(lp))
    except (KeyError, ValueError) as exc:
        out["log_probability"] = None
        out["note"] = str(exc)
    if args.json:
        print(json.dumps(out))
    else:
        for key, value in out.items():
            print(f"{key}: {value}")
    return 0


def cmd_experiment_run(args) -> int:
    path = Path(args.config)
    shipped = shipped_configs()
    if not path.exists() and args.config in shipped:
        path = shipped[args.config]
    try:
        cfg = ExperimentConfig.load(path)
    except (OSError, ConfigError) as exc:
        print(f"rsc: {exc}", file=sys.stderr)
        return 2
    if args.trials is not None:
        cfg.trials = args.trials
    out = args.out or cfg.output or f"results/{cfg.name}"
    table = run_experiment(cfg, out, resume=not args.no_resume, workers=args.workers)
    sys.stdout.write(table.summary_csv())
    trend = table.metadata.get("trend")
    if trend is not None and not trend["ok"]:
        print(f"rsc: expected {trend['column']} to be {trend['direction']} across the sweep", file=sys.stderr)
        return 1
    return 0


def cmd_experiment_list(args) -> int:
    for name, path in shipped_configs().items():
        cfg = ExperimentConfig.load(path)
        print(f"{name}\t{cfg.model.family}\t{cfg.claim}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rsc", description="Random simplicial complex laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="sample a complex")
    g.add_argument("family", choices=FAMILIES)
    _add_model_options(g)
    g.add_argument("--r", type=float)
    g.add_argument("--degree", type=float, help="expected degree instead of --r")
    g.add_argument("--max-dim", dest="max_dim", type=int)
    g.add_argument("--process", choices=("binomial", "poisson"))
    g.add_argument("--mode")
    g.add_argument("--rho")
    g.add_argument("--box", action="store_true", help="unit box instead of the torus")
    g.add_argument("--filtration", action="store_true")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.add_argument("--points-out", dest="points_out")
    g.add_argument("--births-out", dest="births_out")
    g.set_defaults(func=cmd_gen)

    h = sub.add_parser("homology", help="Betti numbers of a complex file")
    h.add_argument("--in", dest="input", required=True)
    h.add_argument("--max-dim", dest="max_dim", type=int)
    h.add_argument("--json", action="store_true")
    h.set_defaults(func=cmd_homology)

    p = sub.add_parser("persistence", help="persistence diagram of a point cloud")
    p.add_argument("--points", required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--max-dim", dest="max_dim", type=int, default=1)
    p.add_argument("--complex", choices=("cech", "rips"), default="cech")
    p.add_argument("--box", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_persistence)

    s = sub.add_parser("stats", help="sufficient statistics and log-probability")
    s.add_argument("--family", required=True)
    s.add_argument("--in", dest="input", required=True)
    _add_model_options(s)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_stats)

    e = sub.add_parser("experiment", help="configured Monte Carlo sweeps")
    esub = e.add_subparsers(dest="action", required=True)
    run = esub.add_parser("run")
    run.add_argument("config", help="YAML path or the name of a shipped experiment")
    run.add_argument("--out")
    run.add_argument("--trials", type=int)
    run.add_argument("--workers", type=int)
    run.add_argument("--no-resume", dest="no_resume", action="store_true")
    run.set_defaults(func=cmd_experiment_run)
    ls = esub.add_parser("list")
    ls.set_defaults(func=cmd_experiment_list)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return int(args.func(args) or 0)


if __name__ == "__main__":
    raise SystemExit(main())
