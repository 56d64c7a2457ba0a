"""Command-line front end.  Every command writes one JSON report.

Exit status: 0 success, 1 input error (or guard / integrator failure), 2 divergence refusal.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional

from .amplitudes import IntegratorOptions, amplitude, feynman_integral
from .compactified import (chart_pole_orders, default_chart, facets, flags, pole_orders,
                           polytope_vertices)
from .errors import DivergenceError, IntegrationError, ParafeynError
from .graphs import Graph, core_subgraphs, rank
from .kinematics import KinematicConfig, parse_fraction
from .moduli import ModuliConfig, build_poset
from .polynomials import first_symanzik, second_symanzik, xi_polynomial
from .power_counting import (divergence_forests, divergent_subgraphs, forest_quotients,
                             is_weinberg_convergent, superficial_degree)
from .renormalization import RenormScheme, renormalised_integral

COMMANDS = ("polys", "power-count", "forests", "cells", "faces", "integrate", "renormalize", "amplitude")
MC_COMMANDS = ("integrate", "renormalize", "amplitude")


class InputError(ParafeynError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple[str, ...] = ()
    n: Optional[int] = None
    k: Optional[int] = None
    d: Optional[Fraction] = None
    method: str = "mc"
    samples: int = 100_000
    depth: int = 12
    seed: int = 0
    jobs: int = 1
    max_n: int = 3
    max_k: int = 4
    max_cells: int = 50_000
    log_only: bool = False
    out: Optional[str] = None
    explicit: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        for name in ("samples", "depth", "jobs", "max_n", "max_k", "max_cells"):
            if getattr(self, name) <= 0:
                raise InputError(f"--{name.replace('_', '-')} must be positive")
        if self.seed < 0:
            raise InputError("--seed must be non-negative")
        if self.command in MC_COMMANDS:
            if self.method == "quad" and "samples" in self.explicit:
                raise InputError("--samples only applies to --method mc")
            if self.method == "mc" and "depth" in self.explicit:
                raise InputError("--depth only applies to --method quad")
        if self.samples < 2:
            raise InputError("--samples must be at least 2")

    def integrator(self) -> IntegratorOptions:
        return IntegratorOptions(self.method, self.samples, self.seed, self.depth, self.jobs)

    def moduli(self) -> ModuliConfig:
        return ModuliConfig(self.max_n, self.max_k, self.max_cells)


# -- files ----------------------------------------------------------------------------

def _read_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


def parse_graph_file(path) -> Graph:
    data = _read_json(path)
    try:
        return Graph.from_json(data)
    except (TypeError, ValueError) as exc:
        raise type(exc)(f"{path}: {exc}") from None


def parse_kinematics_file(path, n_legs: Optional[int] = None, d=None) -> KinematicConfig:
    data = _read_json(path)
    try:
        return KinematicConfig.from_json(data, n_legs=n_legs, d=d)
    except (TypeError, ValueError) as exc:
        raise type(exc)(f"{path}: {exc}") from None


def parse_renorm_file(path, n_legs: Optional[int] = None, d=None) -> RenormScheme:
    point = parse_kinematics_file(path, n_legs=n_legs, d=d)
    return RenormScheme(point)


# -- JSON helpers ---------------------------------------------------------------------

def _plain(obj):
    if isinstance(obj, Fraction):
        return int(obj) if obj.denominator == 1 else str(obj)
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, frozenset):
        return sorted(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def load_schema(name: str) -> dict:
    """Published JSON schema for a command report ("error" for refusals and failures)."""
    text = resources.files("parafeyn").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


# -- commands ---------------------------------------------------------------------------

def _need_d(cfg: RunConfig, kin: Optional[KinematicConfig] = None) -> Fraction:
    if cfg.d is not None:
        return cfg.d
    if kin is not None:
        return kin.d
    raise InputError("--d is required for this command")


def cmd_polys(cfg: RunConfig) -> dict:
    g = parse_graph_file(cfg.inputs[0])
    psi, phi, xi = first_symanzik(g), second_symanzik(g), xi_polynomial(g)
    return {
        "command": "polys",
        "variables": list(g.edge_ids),
        "rank": rank(g),
        "psi": str(psi),
        "phi": str(phi),
        "xi": str(xi),
        "psi_terms": len(psi.terms),
    }


def cmd_power_count(cfg: RunConfig) -> dict:
    g = parse_graph_file(cfg.inputs[0])
    d = _need_d(cfg)
    return {
        "command": "power-count",
        "d": d,
        "overall_degree": superficial_degree(g, d),
        "divergent_subgraphs": [{"edges": sorted(x.edge_ids), "degree": x.degree}
                                for x in divergent_subgraphs(g, d)],
        "weinberg_convergent": is_weinberg_convergent(g, d),
        "weinberg_convergent_projective": is_weinberg_convergent(g, d, projective=True),
    }


def cmd_forests(cfg: RunConfig) -> dict:
    g = parse_graph_file(cfg.inputs[0])
    d = _need_d(cfg)
    out = []
    for f in divergence_forests(g, d, log_only=cfg.log_only):
        out.append({
            "members": f.as_lists(),
            "quotients": [sorted(q.edge_ids) for q in forest_quotients(f)],
        })
    return {"command": "forests", "d": d, "forests": out}


def cmd_cells(cfg: RunConfig) -> dict:
    poset = build_poset(cfg.n, cfg.k, cfg.moduli())
    out = poset.to_json()
    out["command"] = "cells"
    return out


def cmd_faces(cfg: RunConfig) -> dict:
    g = parse_graph_file(cfg.inputs[0])
    out = {
        "command": "faces",
        "vertices": [{"tree": sorted(v.tree), "ordering": list(v.ordering)}
                     for v in polytope_vertices(g)],
        "facets": [f.to_json() for f in facets(g)],
        "core_subgraphs": [sorted(s.edge_ids) for s in core_subgraphs(g)],
    }
    fl = []
    for flag in flags(g):
        entry = {"chain": flag.as_lists()}
        if cfg.d is not None:
            entry["pole_orders"] = pole_orders(g, flag, cfg.d)
            if superficial_degree(g, cfg.d) == 0:
                entry["chart_pole_orders"] = chart_pole_orders(default_chart(g, flag), cfg.d)
        fl.append(entry)
    out["flags"] = fl
    if cfg.d is not None:
        out["d"] = cfg.d
    return out


def cmd_integrate(cfg: RunConfig) -> dict:
    g = parse_graph_file(cfg.inputs[0])
    kin = parse_kinematics_file(cfg.inputs[1], n_legs=g.n_legs, d=cfg.d)
    res = feynman_integral(g, kin, cfg.integrator())
    out = res.to_json()
    out.pop("components", None)
    out.pop("component_errors", None)
    out.update({"command": "integrate", "d": kin.d, "seed": cfg.seed})
    return out


def cmd_renormalize(cfg: RunConfig) -> dict:
    g = parse_graph_file(cfg.inputs[0])
    kin = parse_kinematics_file(cfg.inputs[1], n_legs=g.n_legs, d=cfg.d)
    scheme = parse_renorm_file(cfg.inputs[2], n_legs=g.n_legs, d=kin.d)
    opts = cfg.integrator()
    res = renormalised_integral(g, scheme, kin, **opts.kwargs())
    out = res.to_json()
    out.update({"command": "renormalize", "d": kin.d, "seed": cfg.seed})
    return out


def cmd_amplitude(cfg: RunConfig) -> dict:
    kin = parse_kinematics_file(cfg.inputs[0], n_legs=cfg.k, d=cfg.d)
    scheme = parse_renorm_file(cfg.inputs[1], n_legs=cfg.k, d=kin.d)
    res = amplitude(cfg.n, cfg.k, scheme, kin, cfg.integrator(), cfg.moduli())
    out = res.to_json()
    out.update({"command": "amplitude", "d": kin.d, "seed": cfg.seed})
    return out


HANDLERS = {
    "polys": cmd_polys,
    "power-count": cmd_power_count,
    "forests": cmd_forests,
    "cells": cmd_cells,
    "faces": cmd_faces,
    "integrate": cmd_integrate,
    "renormalize": cmd_renormalize,
    "amplitude": cmd_amplitude,
}


def dispatch(cfg: RunConfig) -> tuple[int, dict]:
    """Run one command; returns (exit status, report)."""
    try:
        return 0, HANDLERS[cfg.command](cfg)
    except DivergenceError as exc:
        return 2, {"command": cfg.command, "error": "divergence", "message": str(exc),
                   "offenders": [{"edges": list(ids), "degree": s} for ids, s in exc.offenders]}
    except IntegrationError as exc:
        return 1, {"command": cfg.command, "error": "integration", "message": str(exc)}
    except (ParafeynError, ValueError, TypeError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        return 1, {"command": cfg.command, "error": "input", "message": msg}


# -- argument parsing ----------------------------------------------------------------------

def _fraction_arg(text: str) -> Fraction:
    try:
        return parse_fraction(text)
    except ParafeynError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with status 1; argparse's default 2 is reserved for refusals."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stdout.write(dumps({"command": self.prog.split()[-1], "error": "input", "message": message}))
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="parafeyn", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, d=False, mc=False, moduli=False):
        sp.add_argument("--out", help="write the JSON report here instead of stdout")
        if d:
            sp.add_argument("--d", type=_fraction_arg, help="space-time dimension (rational)")
        if mc:
            sp.add_argument("--method", choices=("mc", "quad"), default="mc")
            sp.add_argument("--samples", type=int, default=None)
            sp.add_argument("--depth", type=int, default=None)
            sp.add_argument("--seed", type=int, default=None,
                            help="random seed (falls back to $PARAFEYN_SEED, then 0)")
            sp.add_argument("--jobs", type=int, default=1)
        if moduli:
            sp.add_argument("--max-n", type=int, default=3)
            sp.add_argument("--max-k", type=int, default=4)
            sp.add_argument("--max-cells", type=int, default=50_000)

    sp = sub.add_parser("polys", help="Symanzik polynomials of a graph")
    sp.add_argument("graph")
    common(sp)
    sp = sub.add_parser("power-count", help="superficial degrees and divergent subgraphs")
    sp.add_argument("graph")
    common(sp, d=True)
    sp = sub.add_parser("forests", help="forests of divergent subgraphs")
    sp.add_argument("graph")
    sp.add_argument("--log-only", action="store_true")
    common(sp, d=True)
    sp = sub.add_parser("cells", help="cells and face relations of the moduli space")
    sp.add_argument("n", type=int)
    sp.add_argument("k", type=int)
    common(sp, moduli=True)
    sp = sub.add_parser("faces", help="vertices, facets and flags of a compactified cell")
    sp.add_argument("graph")
    common(sp, d=True)
    sp = sub.add_parser("integrate", help="integral of a convergent graph")
    sp.add_argument("graph")
    sp.add_argument("kinematics")
    common(sp, d=True, mc=True)
    sp = sub.add_parser("renormalize", help="forest-formula renormalised integral")
    sp.add_argument("graph")
    sp.add_argument("kinematics")
    sp.add_argument("renorm_point")
    common(sp, d=True, mc=True)
    sp = sub.add_parser("amplitude", help="renormalised amplitude summed over moduli cells")
    sp.add_argument("n", type=int)
    sp.add_argument("k", type=int)
    sp.add_argument("kinematics")
    sp.add_argument("renorm_point")
    common(sp, d=True, mc=True, moduli=True)
    return p


def config_from_args(args: argparse.Namespace, environ=os.environ) -> RunConfig:
    inputs = tuple(getattr(args, name) for name in ("graph", "kinematics", "renorm_point")
                   if getattr(args, name, None) is not None)
    if args.command == "amplitude":
        inputs = (args.kinematics, args.renorm_point)
    explicit = set()
    kw = {}
    for name in ("samples", "depth"):
        val = getattr(args, name, None)
        if val is not None:
            explicit.add(name)
            kw[name] = val
    seed = getattr(args, "seed", None)
    if seed is None and environ.get("PARAFEYN_SEED"):
        try:
            seed = int(environ["PARAFEYN_SEED"])
        except ValueError:
            raise InputError("PARAFEYN_SEED must be an integer") from None
    for name in ("method", "jobs", "max_n", "max_k", "max_cells", "log_only"):
        if getattr(args, name, None) is not None:
            kw[name] = getattr(args, name)
    return RunConfig(
        command=args.command,
        inputs=inputs,
        n=getattr(args, "n", None),
        k=getattr(args, "k", None),
        d=getattr(args, "d", None),
        seed=seed if seed is not None else 0,
        out=args.out,
        explicit=frozenset(explicit),
        **kw,
    )


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else 1
    try:
        cfg = config_from_args(args)
    except ParafeynError as exc:
        status, report = 1, {"command": args.command, "error": "input", "message": str(exc)}
    else:
        status, report = dispatch(cfg)
    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if status == 1:
        sys.stderr.write(f"parafeyn {args.command}: {report.get('message', 'error')}\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
