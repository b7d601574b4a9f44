"""Command-line entry point.

Subcommands: validate, chern, periodicity, cocycle, class-solve, homotopy
and suite. Exit status is 0 when every check passes, 1 when a check fails
and 2 when an input cannot be parsed.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from . import io
from .acceptance import run_suite
from .cochain import NotCyclicError, class_solve, is_cyclic_cocycle
from .fredholm import (
    EvenModule, OddModule, chern_even, chern_odd, periodicity_check, summability_report,
    summability_thresholds, validate_module,
)
from .homotopy import HomotopyFamily, chern_path, doubled_module_at, integrate_invariance
from .lincat import CombinatorialBlowup, LinCat, validate_category
from .report import Report

EXIT_OK, EXIT_FAIL, EXIT_PARSE = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    inputs: List[str] = field(default_factory=list)
    m: int = 0
    tol: Optional[float] = None
    cap: Optional[int] = None
    out: Optional[str] = None
    fmt: str = "text"
    category: Optional[str] = None
    t1: float = 0.0
    t2: float = 1.0
    path: bool = False
    only: Optional[List[int]] = None

    def __post_init__(self):
        if self.tol is not None and not self.tol > 0:
            raise ValueError("--tol must be positive")
        if self.cap is not None and self.cap < 1:
            raise ValueError("--cap must be at least 1")
        if self.fmt not in ("json", "text"):
            raise ValueError("--format must be json or text")


def _tol(cfg: RunConfig, default: float) -> float:
    return cfg.tol if cfg.tol is not None else default


# -- commands ------------------------------------------------------------------

def _validate(cfg: RunConfig) -> Report:
    obj = io.load(cfg.inputs[0], cap=cfg.cap)
    if isinstance(obj, LinCat):
        rep = Report(command=f"validate category {cfg.inputs[0]}")
        vr = validate_category(obj, _tol(cfg, 1e-10))
        for kind in ("typing", "identity", "associativity"):
            fails = [d for k, d in vr.failures if k == kind]
            rep.add(f"{kind} violations", len(fails), 0, "; ".join(fails[:3]))
        return rep
    if isinstance(obj, HomotopyFamily):
        rep = Report(command=f"validate family {cfg.inputs[0]}")
        for t in obj.grid:
            sub = validate_module(doubled_module_at(obj, t), _tol(cfg, 1e-10))
            worst = max((c.residual for c in sub.checks), default=0.0)
            rep.add(f"module at t={t:g}", worst, _tol(cfg, 1e-10),
                    "; ".join(c.name for c in sub.failures()[:3]))
        return rep
    if isinstance(obj, (EvenModule, OddModule)):
        rep = validate_module(obj, _tol(cfg, 1e-10))
        rep.command = f"validate module {cfg.inputs[0]}"
        return rep
    raise io.ParseError(f"{cfg.inputs[0]}: validate expects a category, module or family")


def _chern(cfg: RunConfig) -> Report:
    mod = io.load(cfg.inputs[0], "module", cap=cfg.cap)
    even = isinstance(mod, EvenModule)
    phi = chern_even(mod, cfg.m) if even else chern_odd(mod, cfg.m)
    rep = Report(command=f"chern {'even' if even else 'odd'} m={cfg.m}")
    cc = is_cyclic_cocycle(phi, cfg.tol)
    rep.add(f"phi^{phi.degree} cyclic", cc.cyclic_residual, cc.tolerance)
    rep.add(f"phi^{phi.degree} cocycle", cc.cocycle_residual, cc.tolerance)
    p = phi.degree + 1
    rep.data["summability"] = {"p": p, "schatten_norms": summability_report(mod, p),
                               "thresholds": summability_thresholds(p)}
    rep.data["cochain"] = io.cochain_to_dict(phi)
    if cfg.out:
        io.write_json(io.cochain_to_dict(phi), cfg.out)
    return rep


def _periodicity(cfg: RunConfig) -> Report:
    mod = io.load(cfg.inputs[0], "module", cap=cfg.cap)
    if not isinstance(mod, EvenModule):
        raise io.ParseError(f"{cfg.inputs[0]}: periodicity needs an even module")
    rep = periodicity_check(mod, cfg.m, tol=_tol(cfg, 1e-9))
    for key in ("S", "phi", "phi_next", "witness"):
        rep.data[key] = io.cochain_to_dict(rep.data[key], chains=False)
    return rep


def _load_cochain(cfg: RunConfig):
    cat = io.load_category(cfg.category, cfg.cap) if cfg.category else None
    return io.load(cfg.inputs[0], "cochain", cat=cat)


def _cocycle(cfg: RunConfig) -> Report:
    phi = _load_cochain(cfg)
    cc = is_cyclic_cocycle(phi, cfg.tol)
    rep = Report(command=f"cocycle degree {phi.degree}")
    rep.add("cyclic", cc.cyclic_residual, cc.tolerance)
    rep.add("cocycle", cc.cocycle_residual, cc.tolerance)
    return rep


def _class_solve(cfg: RunConfig) -> Report:
    target = _load_cochain(cfg)
    tol = _tol(cfg, 1e-8)
    sol = class_solve(target, tol)
    rep = Report(command=f"class-solve degree {target.degree}")
    detail = sol.note
    if sol.worst_chain:
        detail += f"; worst chain ({', '.join(sol.worst_chain)})"
    rep.add("target is a cyclic coboundary", sol.residual, tol, detail)
    rep.data["witness"] = io.cochain_to_dict(sol.witness)
    if cfg.out:
        io.write_json(io.cochain_to_dict(sol.witness), cfg.out)
    return rep


def _homotopy(cfg: RunConfig) -> Report:
    fam = io.load(cfg.inputs[0], "family", cap=cfg.cap)
    tol = _tol(cfg, 1e-6)
    rep = integrate_invariance(fam, cfg.t1, cfg.t2, cfg.m, tol=tol, member_tol=tol)
    rep.data["psi_integral"] = io.cochain_to_dict(rep.data["psi_integral"], chains=False)
    if cfg.path:
        cp = chern_path(fam, cfg.m)
        detail = ""
        if cp.argmax is not None:
            detail = f"between t={cp.argmax[0]:g} and t={cp.argmax[1]:g}"
            if cp.worst_chain:
                detail += f", worst chain ({', '.join(cp.worst_chain)})"
        rep.add("max class residual along the path", cp.max_residual, tol, detail)
        rep.data["path_residuals"] = cp.residuals
    return rep


def _suite(cfg: RunConfig) -> Tuple[Report, List[str]]:
    return run_suite(cfg.only)


COMMANDS = {
    "validate": _validate,
    "chern": _chern,
    "periodicity": _periodicity,
    "cocycle": _cocycle,
    "class-solve": _class_solve,
    "homotopy": _homotopy,
}


def run(cfg: RunConfig) -> Tuple[Report, int, List[str]]:
    """Execute one command; returns the report, the exit status and any
    extra summary lines."""
    lines: List[str] = []
    try:
        if cfg.command == "suite":
            rep, lines = _suite(cfg)
        else:
            rep = COMMANDS[cfg.command](cfg)
    except io.ParseError as exc:
        rep = Report(command=cfg.command)
        rep.data["error"] = str(exc)
        return rep, EXIT_PARSE, [f"parse error: {exc}"]
    except (NotCyclicError, CombinatorialBlowup, ValueError) as exc:
        rep = Report(command=cfg.command)
        rep.add(f"{type(exc).__name__}", float("inf"), 0.0, str(exc))
        return rep, EXIT_FAIL, [f"error: {exc}"]
    return rep, (EXIT_OK if rep.passed else EXIT_FAIL), lines


# -- argument parsing --------------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    p.add_argument("--tol", type=float, help="override the main check tolerance")
    p.add_argument("--cap", type=int, help="chain-basis size cap")
    p.add_argument("--format", dest="fmt", choices=("json", "text"), default="text")
    p.add_argument("--out", help="write the command's artifact (cochain or report) here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cychern", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a category, module or family file")
    p.add_argument("input")
    _common(p)

    for name, helptext in (("chern", "emit the Chern character of a module"),
                           ("periodicity", "certify S(phi^2m) + (m+1) phi^(2m+2) = b psi")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("input")
        p.add_argument("--m", type=int, default=0 if name == "periodicity" else 1)
        _common(p)

    for name, helptext in (("cocycle", "check a cochain is a cyclic cocycle"),
                           ("class-solve", "decide whether a cochain is a cyclic coboundary")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("input")
        p.add_argument("--category", help="category file (else the cochain's 'category' field)")
        _common(p)

    p = sub.add_parser("homotopy", help="certify that the Chern class is constant on a path")
    p.add_argument("input")
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--t1", type=float, default=0.0)
    p.add_argument("--t2", type=float, default=1.0)
    p.add_argument("--path", action="store_true", help="also compare consecutive samples")
    _common(p)

    p = sub.add_parser("suite", help="run the acceptance criteria")
    p.add_argument("--only", type=int, nargs="*", help="criterion numbers to run")
    _common(p)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command,
        inputs=[ns.input] if getattr(ns, "input", None) else [],
        m=getattr(ns, "m", 0),
        tol=ns.tol, cap=ns.cap, out=ns.out, fmt=ns.fmt,
        category=getattr(ns, "category", None),
        t1=getattr(ns, "t1", 0.0), t2=getattr(ns, "t2", 1.0),
        path=getattr(ns, "path", False), only=getattr(ns, "only", None),
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        cfg = config_from_args(ns)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    except ValueError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    rep, status, lines = run(cfg)
    for line in lines:
        print(line, file=sys.stderr if status == EXIT_PARSE else sys.stdout)
    if cfg.fmt == "json":
        text = json.dumps(rep.to_dict(), sort_keys=True, indent=2, default=str) + "\n"
    else:
        text = rep.to_text() + "\n"
    if cfg.out and cfg.command not in ("chern", "class-solve"):
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
