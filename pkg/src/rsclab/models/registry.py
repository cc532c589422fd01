"""Tagged model descriptions shared by the statistics module, harness and CLI."""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from rsclab.complex import Filtration, SimplicialComplex
from rsclab.models import geometric, homogeneous, hypergraph, inhomogeneous
from rsclab.rng import as_generator

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
    ast.FloorDiv: operator.floordiv,
    ast.Mod: operator.mod,
}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_FUNCS = {
    "log": math.log,
    "log2": math.log2,
    "exp": math.exp,
    "sqrt": math.sqrt,
    "comb": math.comb,
    "floor": math.floor,
    "ceil": math.ceil,
    "min": min,
    "max": max,
    "omega": geometric.unit_ball_volume,
    "radius": geometric.radius_for_degree,
}


def evaluate(expr: str, names: Mapping[str, Any]) -> Any:
    """Arithmetic expression over numbers, known names and a few math functions."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name):
            if node.id in names:
                return names[node.id]
            if node.id in ("pi", "e"):
                return getattr(math, node.id)
            raise ValueError(f"unknown name {node.id!r} in {expr!r}")
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
            return _FUNCS[node.func.id](*[ev(a) for a in node.args])
        if isinstance(node, (ast.List, ast.Tuple)):
            return [ev(e) for e in node.elts]
        raise ValueError(f"unsupported expression {expr!r}")

    return ev(ast.parse(expr, mode="eval"))


def resolve(params: Mapping[str, Any]) -> dict[str, Any]:
    """Evaluate ``"=expr"`` string values against the other parameters."""
    out = {k: v for k, v in params.items() if not (isinstance(v, str) and v.startswith("="))}
    pending = {k: v[1:] for k, v in params.items() if isinstance(v, str) and v.startswith("=")}
    while pending:
        progress = False
        for k, expr in list(pending.items()):
            try:
                out[k] = evaluate(expr, out)
            except ValueError:
                continue
            del pending[k]
            progress = True
        if not progress:
            raise ValueError(f"cannot resolve parameters {sorted(pending)}")
    return out


@dataclass
class Sample:
    """One generated instance: the complex plus, for geometric models, its
    points and filtration."""

    complex: SimplicialComplex
    points: np.ndarray | None = None
    filtration: Filtration | None = None
    hypergraph: Any = None
    info: dict = field(default_factory=dict)


FAMILIES = (
    "gnp",
    "gnm",
    "lm",
    "ydnm",
    "multi",
    "multi_micro",
    "scm",
    "cm",
    "cm_d",
    "hscm",
    "zscm",
    "rips",
    "cech",
    "hypergraph_lower",
    "hypergraph_upper",
)


@dataclass(frozen=True)
class ModelSpec:
    family: str
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown model family {self.family!r}; known: {', '.join(FAMILIES)}")
        object.__setattr__(self, "params", dict(self.params))

    def with_params(self, **updates) -> "ModelSpec":
        return ModelSpec(self.family, {**self.params, **updates})

    def resolved(self) -> dict[str, Any]:
        return resolve(self.params)

    def generate(self, rng=None) -> Sample:
        return generate(self, rng)


def _points(p: dict, g) -> np.ndarray:
    n, d = p["n"], int(p.get("d", 2))
    if p.get("process", "binomial") == "poisson":
        return geometric.sample_poisson_process(n, d, g).points
    return geometric.sample_binomial_process(int(n), d, g).points


def _radius(p: dict) -> float:
    if "r" in p:
        return float(p["r"])
    return geometric.radius_for_degree(p["n"], p["degree"], int(p.get("d", 2)))


def _targets(p: dict, m: int, g) -> np.ndarray:
    k = p.get("targets", p.get("k"))
    if k is None:
        raise ValueError("configuration models need 'targets' (or 'k')")
    return np.broadcast_to(np.asarray(k, dtype=float), (m,)).copy()


def generate(spec: ModelSpec, rng=None) -> Sample:
    g = as_generator(rng)
    p = spec.resolved()
    f = spec.family
    if f == "gnp":
        return Sample(homogeneous.gen_gnp(int(p["n"]), p["p"], g))
    if f == "gnm":
        return Sample(homogeneous.gen_gnm(int(p["n"]), int(p["M"]), g))
    if f == "lm":
        return Sample(homogeneous.gen_linial_meshulam(int(p["n"]), int(p["d"]), p["p"], g))
    if f == "ydnm":
        return Sample(homogeneous.gen_ydnm(int(p["n"]), int(p["d"]), int(p["M"]), g))
    if f == "multi":
        return Sample(homogeneous.gen_multiparameter(int(p["n"]), p["pvec"], p.get("max_dim"), g))
    if f == "multi_micro":
        return Sample(homogeneous.gen_multiparameter_micro(int(p["n"]), p["targets"], g, p.get("budget", 100_000)))
    if f in ("scm", "zscm"):
        n, d = int(p["n"]), int(p["d"])
        if f == "scm":
            sol = inhomogeneous.solve_scm_multipliers(n, d, _targets(p, math.comb(n, d), g))
            return Sample(inhomogeneous.gen_scm_d(n, d, rng=g, solution=sol), info={"residual": sol.residual})
        sol = inhomogeneous.solve_zscm_multipliers(n, d, _targets(p, n, g))
        return Sample(inhomogeneous.gen_zscm_d(n, d, rng=g, solution=sol), info={"residual": sol.residual})
    if f == "cm":
        n = int(p["n"])
        deg = np.broadcast_to(np.asarray(p["degrees"], dtype=np.int64), (n,))
        return Sample(inhomogeneous.gen_cm(n, deg, p.get("mode", "reject"), g))
    if f == "cm_d":
        n, d = int(p["n"]), int(p["d"])
        deg = np.broadcast_to(np.asarray(p["degrees"], dtype=np.int64), (math.comb(n, d),))
        return Sample(inhomogeneous.gen_cm_d(n, d, deg, g), info=dict(inhomogeneous.CM_D_METADATA))
    if f == "hscm":
        rho = inhomogeneous.DegreeDistribution(p["rho"], tuple(p.get("rho_params", ())))
        diag: dict = {}
        X = inhomogeneous.gen_hscm_d(int(p["n"]), int(p.get("d", 1)), rho, p.get("mode", "exact"), g, diag)
        return Sample(X, info={k: v for k, v in diag.items() if k != "targets"})
    if f in ("rips", "cech"):
        pts = _points(p, g)
        r = _radius(p)
        build = geometric.rips_complex if f == "rips" else geometric.cech_complex
        periodic = bool(p.get("periodic", True))
        max_dim = int(p.get("max_dim", 2))
        if p.get("filtration", False):
            F = build(pts, r, max_dim, filtration=True, periodic=periodic)
            return Sample(F.complex, pts, F)
        return Sample(build(pts, r, max_dim, periodic=periodic), pts)
    if f in ("hypergraph_lower", "hypergraph_upper"):
        H = hypergraph.gen_hypergraph(int(p["n"]), p["pvec"], g)
        env = hypergraph.lower_complex if f == "hypergraph_lower" else hypergraph.upper_complex
        return Sample(env(H), hypergraph=H)
    raise ValueError(f"unknown family {f!r}")
