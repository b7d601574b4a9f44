"""The ten acceptance criteria as functions returning :class:`Report` objects.

Each criterion also records its wall-clock time against its budget.
``run_suite`` runs them all; the CLI ``suite`` command and the acceptance
tests both go through here.
"""
from __future__ import annotations

import time
from typing import Callable, List, Tuple

import numpy as np

from . import fixtures as fx
from .cochain import (
    A_matrix, B0_matrix, B_matrix, Cochain, b_matrix, bprime_matrix, cyclic_cohomology_dims,
    is_cyclic_cocycle, lambda_matrix, nullspace_sample, op_B, preimage_under_B,
    random_cyclic,
)
from .fredholm import (
    OperatorWord, chern_even, chern_odd, evaluate_word, periodicity_check, supertrace, trs_odd,
)
from .homotopy import integrate_invariance, leibniz_trend
from .numkernel import graded_commutator
from .omega import check_s_on_B, periodicity_S
from .oracles import cyclic_dims_bruteforce, periodicity_S_oracle
from .report import Report

SEED = 20240611


def _timed(name: str, budget: float):
    def wrap(fn: Callable[[], Report]):
        def run(*args, **kwargs) -> Report:
            t0 = time.perf_counter()
            rep = fn(*args, **kwargs)
            elapsed = time.perf_counter() - t0
            rep.command = name
            rep.timings["total"] = elapsed
            rep.add("wall-clock seconds", elapsed, budget)
            return rep
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        run.title = name
        return run
    return wrap


def _rel(residual: np.ndarray, phis: np.ndarray) -> float:
    """max over columns of |residual|_inf / (1 + |phi|_inf)."""
    num = np.abs(residual).max(axis=0, initial=0.0)
    den = 1.0 + np.abs(phis).max(axis=0, initial=0.0)
    return float(np.max(num / den, initial=0.0))


@_timed("1 cochain identities", 10.0)
def criterion_1(seed: int = SEED, samples: int = 100) -> Report:
    rep = Report()
    rng = np.random.default_rng(seed)
    for label, cat in (("FIX_NIL", fx.fix_nil()), ("FIX_PROJ", fx.fix_proj())):
        worst = dict.fromkeys(["b^2", "b'^2", "bA - Ab'", "bB + Bb", "B0 b + b' B0 - (1 - lambda)"],
                              0.0)
        for n in range(5):
            size = b_matrix(cat, n).shape[1]
            phis = rng.standard_normal((size, samples)) + 1j * rng.standard_normal((size, samples))
            b0, b1 = b_matrix(cat, n), b_matrix(cat, n + 1)
            bp0, bp1 = bprime_matrix(cat, n), bprime_matrix(cat, n + 1)
            worst["b^2"] = max(worst["b^2"], _rel(b1 @ b0 @ phis, phis))
            worst["b'^2"] = max(worst["b'^2"], _rel(bp1 @ bp0 @ phis, phis))
            r = b0 @ A_matrix(cat, n) @ phis - A_matrix(cat, n + 1) @ bp0 @ phis
            worst["bA - Ab'"] = max(worst["bA - Ab'"], _rel(r, phis))
            r = B_matrix(cat, n + 1) @ b0 @ phis
            if n >= 1:
                r = r + b_matrix(cat, n - 1) @ B_matrix(cat, n) @ phis
            worst["bB + Bb"] = max(worst["bB + Bb"], _rel(r, phis))
            r = B0_matrix(cat, n + 1) @ b0 @ phis
            if n >= 1:
                r = r + bprime_matrix(cat, n - 1) @ B0_matrix(cat, n) @ phis
            r = r - (phis - lambda_matrix(cat, n) @ phis)
            worst["B0 b + b' B0 - (1 - lambda)"] = max(worst["B0 b + b' B0 - (1 - lambda)"],
                                                       _rel(r, phis))
        for name, val in worst.items():
            rep.add(f"{label} {name}", val, 1e-10)
    return rep


@_timed("2 cyclic cohomology of C", 1.0)
def criterion_2() -> Report:
    rep = Report()
    cat = fx.fix_pt()
    want = [1, 0, 1, 0, 1]
    got = cyclic_cohomology_dims(cat, 4)
    oracle = cyclic_dims_bruteforce(cat, 4)
    rep.add("dims match (1,0,1,0,1)", sum(a != b for a, b in zip(got, want)), 0, f"computed {got}")
    rep.add("dims match brute-force oracle", sum(a != b for a, b in zip(got, oracle)), 0,
            f"oracle {oracle}")
    return rep


@_timed("3 image of B", 5.0)
def criterion_3(seed: int = SEED, samples: int = 50) -> Report:
    rep = Report()
    rng = np.random.default_rng(seed + 3)
    for label, cat in (("FIX_NIL", fx.fix_nil()), ("FIX_PROJ", fx.fix_proj())):
        for n in range(4):
            worst = 0.0
            for _ in range(samples):
                phi = random_cyclic(cat, n, rng)
                psi = preimage_under_B(phi)
                worst = max(worst, (op_B(psi) - 2 * (n + 1) * phi).norm())
            rep.add(f"{label} degree {n}: B(preimage) - 2(n+1) phi", worst, 1e-9)
    return rep


@_timed("4 even character goldens", 5.0)
def criterion_4() -> Report:
    rep = Report()
    mod = fx.proj_even_module()
    phi0, phi2 = chern_even(mod, 0), chern_even(mod, 1)
    rep.golden("phi0(p)", phi0("p"), 1, 1e-12)
    rep.golden("phi0(q)", phi0("q"), -1, 1e-12)
    rep.golden("phi2(p,p,p)", phi2("p", "p", "p"), -1, 1e-12)
    rep.golden("phi2(p,q,p)", phi2("p", "q", "p"), 1, 1e-12)
    for name, c in (("phi0", phi0), ("phi2", phi2)):
        cc = is_cyclic_cocycle(c)
        rep.add(f"{name} cyclic residual", cc.cyclic_residual, 1e-10)
        rep.add(f"{name} cocycle residual", cc.cocycle_residual, 1e-10)
    return rep


@_timed("5 periodicity", 60.0)
def criterion_5() -> Report:
    rep = Report()
    for label, mod in (("FIX_PROJ", fx.proj_even_module()), ("FIX_M2 even", fx.m2_even_module())):
        rep.extend(periodicity_check(mod, 0, tol=1e-9, agree_tol=1e-10, cyclic_tol=1e-10),
                   prefix=f"{label} m=0: ")
    return rep


def random_word(mod, degree: int, rng: np.random.Generator, obj: int = 0) -> OperatorWord:
    """Random element ``(H(a) + mu)[F, H(c1)]...[F, H(cj)]`` of the word span at
    ``obj``, with ``a`` and every ``ci`` random complex combinations of endomorphisms."""
    cat = mod.cat
    endo = [k for k in range(cat.nbasis) if cat.src[k] == obj and cat.dst[k] == obj]

    def combo():
        v = np.zeros(cat.nbasis, dtype=complex)
        v[endo] = rng.standard_normal(len(endo)) + 1j * rng.standard_normal(len(endo))
        return v

    w = evaluate_word(mod, combo(), (), mu=complex(rng.standard_normal()))
    m = w.matrix
    for _ in range(degree):
        c = combo()
        m = m @ sum(c[k] * mod.comm[k] for k in endo)
    return OperatorWord(obj, obj, degree, m)


def _product(w1: OperatorWord, w2: OperatorWord) -> OperatorWord:
    return OperatorWord(w2.src, w1.dst, w1.degree + w2.degree, w1.matrix @ w2.matrix)


def _boundary(mod, w: OperatorWord) -> OperatorWord:
    F = mod.F[w.src]
    return OperatorWord(w.src, w.dst, w.degree + 1, graded_commutator(F, F, w.matrix, w.degree))


@_timed("6 odd character goldens", 5.0)
def criterion_6(seed: int = SEED, samples: int = 100) -> Report:
    rep = Report()
    mod = fx.m2_odd_module()
    phi1 = chern_odd(mod, 1)
    rep.golden("phi1(E12,E21)", phi1("E12", "E21"), -2, 1e-12)
    rep.golden("phi1(E21,E12)", phi1("E21", "E12"), 2, 1e-12)
    # independent oracle Tr(F(BA - AB)) for the degree-1 word A[F,B]
    F = mod.F[0]
    A, B = fx.matrix_unit(0, 1), fx.matrix_unit(1, 0)
    rep.golden("phi1(E12,E21) vs Tr(F(BA - AB))", phi1("E12", "E21"),
               np.trace(F @ (B @ A - A @ B)), 1e-12)
    rng = np.random.default_rng(seed + 6)
    worst = 0.0
    for _ in range(samples):
        w = random_word(mod, int(rng.choice([0, 2, 4])), rng)
        worst = max(worst, abs(trs_odd(mod, w)))
    rep.add("Tr'_s on random even-degree words", worst, 1e-12)
    cc = is_cyclic_cocycle(phi1)
    rep.add("phi1 cyclic residual", cc.cyclic_residual, 1e-10)
    rep.add("phi1 cocycle residual", cc.cocycle_residual, 1e-10)
    return rep


@_timed("7 graded trace laws", 5.0)
def criterion_7(seed: int = SEED, samples: int = 100) -> Report:
    rep = Report()
    rng = np.random.default_rng(seed + 7)
    cases = (("FIX_PROJ", fx.proj_even_module(), supertrace, (0, 2, 4)),
             ("FIX_M2ODD", fx.m2_odd_module(), trs_odd, (1, 3, 5)))
    for label, mod, tr, dims in cases:
        closure = commut = 0.0
        for _ in range(samples):
            total = int(rng.choice(dims))
            i = int(rng.integers(0, total + 1))
            w1, w2 = random_word(mod, i, rng), random_word(mod, total - i, rng)
            sign = (-1) ** (i * (total - i))
            a, b = tr(mod, _product(w1, w2)), tr(mod, _product(w2, w1))
            commut = max(commut, abs(a - sign * b) / (1.0 + abs(a)))
            w = random_word(mod, total - 1, rng) if total else random_word(mod, 0, rng)
            closure = max(closure, abs(tr(mod, _boundary(mod, w))))
        rep.add(f"{label} closure Tr(d' w) = 0", closure, 1e-10)
        rep.add(f"{label} graded commutativity", commut, 1e-10)
    return rep


@_timed("8 homotopy invariance", 60.0)
def criterion_8(samples: int = 65) -> Report:
    rep = Report()
    fam = fx.rotation_family(samples)
    rep.extend(integrate_invariance(fam, 0.0, 1.0, 0, tol=1e-6, member_tol=1e-6),
               prefix="rotation m=0: ")
    trend = leibniz_trend(fx.rotation_family)
    worst_ratio = min(trend["ratios"])
    # pass iff the worst ratio is at least 3.5
    rep.add("Leibniz residual shrink per doubling (3.5 / worst ratio)", 3.5 / worst_ratio, 1.0,
            "ratios " + ", ".join(f"{r:.2f}" for r in trend["ratios"]))
    rep.data["leibniz"] = trend
    return rep


@_timed("9 S normalization", 1.0)
def criterion_9() -> Report:
    rep = Report()
    cat = fx.fix_pt()
    psi_gen = Cochain(cat, 2, np.ones(1))
    s = periodicity_S(psi_gen)("1", "1", "1", "1", "1")
    oracle = periodicity_S_oracle(psi_gen)("1", "1", "1", "1", "1")
    rep.golden("S(psi_gen)(1,1,1,1,1) vs Leibniz oracle", s, oracle, 1e-12)
    rep.golden("S(psi_gen)(1,1,1,1,1) frozen", s, 2, 1e-12)
    return rep


@_timed("10 S on the image of B", 30.0)
def criterion_10(seed: int = SEED, samples: int = 20) -> Report:
    rep = Report()
    rng = np.random.default_rng(seed + 10)
    cat = fx.fix_pt()
    for n in (2, 3):
        M = (np.eye(b_matrix(cat, n).shape[0]) - lambda_matrix(cat, n + 1)) @ b_matrix(cat, n)
        cyc = coc = cls = 0.0
        for _ in range(samples):
            psi = Cochain(cat, n, nullspace_sample(M, rng))
            sub = check_s_on_B(psi)
            by = {c.name: c.residual for c in sub.checks}
            cyc = max(cyc, by["B psi cyclic"])
            coc = max(coc, by["B psi cocycle"])
            cls = max(cls, by.get("S(B psi) - n(n+1) b psi is a cyclic coboundary", np.inf))
        rep.add(f"degree {n}: B psi cyclic", cyc, 1e-10)
        rep.add(f"degree {n}: B psi cocycle", coc, 1e-10)
        rep.add(f"degree {n}: S(B psi) - n(n+1) b psi coboundary residual", cls, 1e-8)
    return rep


CRITERIA: List[Tuple[int, Callable[[], Report]]] = [
    (1, criterion_1), (2, criterion_2), (3, criterion_3), (4, criterion_4), (5, criterion_5),
    (6, criterion_6), (7, criterion_7), (8, criterion_8), (9, criterion_9), (10, criterion_10),
]


def summary_line(num: int, rep: Report) -> str:
    worst = max((c.residual for c in rep.failures()), default=None)
    tail = "" if rep.passed else f"  ({len(rep.failures())} failing, worst residual {worst:.3e})"
    title = rep.command.removeprefix(f"{num} ")
    return f"criterion {num:2d} {title:<30s} {'PASS' if rep.passed else 'FAIL'}{tail}"


def run_suite(only=None) -> Tuple[Report, List[str]]:
    """Run every criterion (or those numbered in ``only``)."""
    total = Report(command="suite")
    lines = []
    for num, fn in CRITERIA:
        if only and num not in only:
            continue
        rep = fn()
        total.extend(rep, prefix=f"[{num}] ")
        lines.append(summary_line(num, rep))
    return total, lines
