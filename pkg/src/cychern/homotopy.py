"""Sampled one-parameter families of doubled Fredholm modules, their
finite-difference derivatives, the transgression cochain and the check that
the Chern class stays constant along the path.

A family stores, for each grid sample and basis morphism, either a block
pair ``(rho_plus, rho_minus)`` acting on ``H (+) H`` or a full doubled
matrix. Optional per-object ``Q_t``, ``P_t = Q_t^-1`` conjugate the second
copy: ``H_t(f) = diag(rho_plus(f), Q_t rho_minus(f) P_t)``. The odd
involution is always the swap of the two copies.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import simpson

from .cochain import B0_matrix, Cochain, class_solve
from .fredholm import EvenModule, chern_even
from .lincat import LinCat, enumerate_chains
from .numkernel import DimensionError, as_mat, pmap, schatten_norm
from .report import Report

QP_TOL = 1e-10
GRID_TOL = 1e-12


class PreconditionError(ValueError):
    """Raised when family data violate an operation's hypothesis."""


def _swap(d: int) -> np.ndarray:
    z, e = np.zeros((d, d)), np.eye(d)
    return np.block([[z, e], [e, z]]).astype(complex)


def _bdiag(a, b) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]), dtype=complex)
    out[:a.shape[0], :a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


class HomotopyFamily:
    def __init__(self, cat: LinCat, base_dims: Mapping, grid: Sequence[float],
                 blocks: Sequence[Mapping], breakpoints: Sequence[float] = (),
                 Q: Optional[Sequence[Mapping]] = None, P: Optional[Sequence[Mapping]] = None):
        self.cat = cat
        self.base = [0] * len(cat.objects)
        for x, d in base_dims.items():
            self.base[cat.obj_index[x]] = int(d)
        if min(self.base) < 1:
            raise ValueError("base dimension missing or non-positive for some object")
        grid = np.asarray(grid, dtype=float)
        if grid.ndim != 1 or grid.size < 2:
            raise ValueError("grid needs at least two samples")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if abs(grid[0]) > GRID_TOL or abs(grid[-1] - 1.0) > GRID_TOL:
            raise ValueError("grid must start at 0 and end at 1")
        self.grid = grid
        if len(blocks) != grid.size:
            raise ValueError(f"{len(blocks)} samples for a grid of {grid.size} points")
        self.breakpoints = tuple(sorted(float(b) for b in breakpoints))
        for b in self.breakpoints:
            k = self.index(b)
            if k in (0, grid.size - 1):
                raise ValueError("breakpoints must be interior grid points")
        self._raw = [self._read_sample(k, s) for k, s in enumerate(blocks)]
        self.Q = self.P = None
        if (Q is None) != (P is None):
            raise PreconditionError("Q and P must be given together")
        if Q is not None:
            self.Q = [self._read_objmats(q, "Q") for q in Q]
            self.P = [self._read_objmats(p, "P") for p in P]
            for k in range(grid.size):
                for x in range(len(cat.objects)):
                    res = np.abs(self.Q[k][x] @ self.P[k][x] - np.eye(self.base[x])).max()
                    if res > QP_TOL:
                        raise PreconditionError(
                            f"Q P != id at t={grid[k]:g}, object {cat.objects[x]} "
                            f"(residual {res:.2e})")
        self.H = [self._conjugated(k) for k in range(grid.size)]

    # -- construction helpers
    def _read_sample(self, k: int, sample: Mapping) -> List[np.ndarray]:
        cat = self.cat
        out = [None] * cat.nbasis
        for name, val in sample.items():
            i = cat.mor_index[name]
            dy, dx = self.base[cat.dst[i]], self.base[cat.src[i]]
            if isinstance(val, (tuple, list)) and len(val) == 2 and np.ndim(val[0]) == 2:
                plus, minus = as_mat(val[0]), as_mat(val[1])
                for part, m in (("plus", plus), ("minus", minus)):
                    if m.shape != (dy, dx):
                        raise DimensionError(f"{part} block of {name} at sample {k} has shape "
                                             f"{m.shape}, expected {(dy, dx)}")
                out[i] = _bdiag(plus, minus)
            else:
                m = as_mat(val)
                if m.shape != (2 * dy, 2 * dx):
                    raise DimensionError(f"H({name}) at sample {k} has shape {m.shape}, "
                                         f"expected {(2 * dy, 2 * dx)}")
                out[i] = m
        missing = [cat.name(i) for i, m in enumerate(out) if m is None]
        if missing:
            raise ValueError(f"sample {k} lacks morphisms {missing}")
        return out

    def _read_objmats(self, mats: Mapping, label: str) -> List[np.ndarray]:
        out = [None] * len(self.cat.objects)
        for x, m in mats.items():
            i = self.cat.obj_index[x]
            m = as_mat(m)
            if m.shape != (self.base[i], self.base[i]):
                raise DimensionError(f"{label} at {x} has shape {m.shape}")
            out[i] = m
        if any(m is None for m in out):
            raise ValueError(f"{label} missing for some objects")
        return out

    def _T(self, k: int, x: int, inverse: bool = False) -> np.ndarray:
        d = self.base[x]
        if self.Q is None:
            return np.eye(2 * d, dtype=complex)
        return _bdiag(np.eye(d), (self.P if inverse else self.Q)[k][x])

    def _conjugated(self, k: int) -> List[np.ndarray]:
        if self.Q is None:
            return self._raw[k]
        cat = self.cat
        return [self._T(k, cat.dst[i]) @ m @ self._T(k, cat.src[i], inverse=True)
                for i, m in enumerate(self._raw[k])]

    # -- access
    def index(self, t: float) -> int:
        k = int(np.argmin(np.abs(self.grid - t)))
        if abs(self.grid[k] - t) > GRID_TOL:
            raise ValueError(f"t={t} is not a grid sample")
        return k

    def matrix_at(self, t: float, f) -> np.ndarray:
        i = f if isinstance(f, (int, np.integer)) else self.cat.mor_index[f]
        return self.H[self.index(t)][int(i)]

    def segments(self) -> List[Tuple[int, int]]:
        """Index ranges ``[a, b]`` between consecutive breakpoints."""
        cuts = [0] + [self.index(b) for b in self.breakpoints] + [self.grid.size - 1]
        return list(zip(cuts, cuts[1:]))

    def dims(self) -> Dict[str, Tuple[int, int]]:
        return {x: (self.base[i], self.base[i]) for i, x in enumerate(self.cat.objects)}


def constant_family(mod_blocks: Mapping, cat: LinCat, base_dims: Mapping,
                    samples: int = 17) -> HomotopyFamily:
    grid = np.linspace(0.0, 1.0, samples)
    return HomotopyFamily(cat, base_dims, grid, [mod_blocks] * samples)


def build_from_QP(fam: HomotopyFamily) -> HomotopyFamily:
    """Bake the ``Q``/``P`` conjugation into the sampled matrices."""
    cat = fam.cat
    blocks = [{cat.name(i): m for i, m in enumerate(fam.H[k])} for k in range(fam.grid.size)]
    return HomotopyFamily(cat, {x: fam.base[i] for i, x in enumerate(cat.objects)},
                          fam.grid, blocks, fam.breakpoints)


def doubled_module_at(fam: HomotopyFamily, t: float) -> EvenModule:
    """Even module at sample ``t``: grading ``(d, d)``, swap involution."""
    k = fam.index(t)
    cat = fam.cat
    F = {x: _swap(fam.base[i]) for i, x in enumerate(cat.objects)}
    H = {cat.name(i): m for i, m in enumerate(fam.H[k])}
    return EvenModule(cat, fam.dims(), F, H)


def raw_module_at(fam: HomotopyFamily, t: float) -> EvenModule:
    """Module before conjugation: ``H = diag(rho+, rho-)`` with involution
    ``T^-1 swap T = [[0, Q], [P, 0]]``, ``T = diag(1, Q)``."""
    k = fam.index(t)
    cat = fam.cat
    F = {x: fam._T(k, i, inverse=True) @ _swap(fam.base[i]) @ fam._T(k, i)
         for i, x in enumerate(cat.objects)}
    H = {cat.name(i): m for i, m in enumerate(fam._raw[k])}
    return EvenModule(cat, fam.dims(), F, H)


# -- derivatives -----------------------------------------------------------------

def _segment_of(fam: HomotopyFamily, k: int, side: str) -> Tuple[int, int]:
    for a, b in fam.segments():
        if a <= k <= b:
            if k == b and side == "right" and b != fam.grid.size - 1:
                continue
            if k == a and side == "left" and a != 0:
                continue
            return a, b
    raise AssertionError("sample outside every segment")


def _segment_derivatives(fam: HomotopyFamily, a: int, b: int) -> np.ndarray:
    """``d/dt H_t(f)`` at samples ``a..b`` for all f, shape (samples, nbasis, ...)."""
    if b - a < 2:
        raise PreconditionError(
            f"segment [{fam.grid[a]:g}, {fam.grid[b]:g}] needs at least 3 samples")
    ts = fam.grid[a:b + 1]
    out = []
    for i in range(fam.cat.nbasis):
        stack = np.stack([fam.H[k][i] for k in range(a, b + 1)])
        # second-order central differences inside, second-order one-sided at the ends
        out.append(np.gradient(stack, ts, axis=0, edge_order=2))
    return out


def _deriv_cache(fam: HomotopyFamily) -> Dict[Tuple[int, int], list]:
    cache = fam.__dict__.setdefault("_deriv", {})
    for a, b in fam.segments():
        if (a, b) not in cache:
            cache[(a, b)] = _segment_derivatives(fam, a, b)
    return cache


def delta_at(fam: HomotopyFamily, f, t: float, side: str = "right") -> np.ndarray:
    """Finite-difference ``delta_t(f)``. At a breakpoint ``side`` picks the
    one-sided derivative from the segment on that side."""
    k = fam.index(t)
    i = f if isinstance(f, (int, np.integer)) else fam.cat.mor_index[f]
    a, b = _segment_of(fam, k, side)
    return _deriv_cache(fam)[(a, b)][int(i)][k - a]


def _deltas_on(fam: HomotopyFamily, a: int, b: int, k: int) -> list:
    d = _deriv_cache(fam)[(a, b)]
    return [d[i][k - a] for i in range(fam.cat.nbasis)]


def leibniz_residual(fam: HomotopyFamily) -> float:
    """``max || delta(g f) - H(g) delta(f) - delta(g) H(f) ||`` over composable
    basis pairs and samples."""
    cat = fam.cat
    worst = 0.0
    for a, b in fam.segments():
        for k in range(a, b + 1):
            D, H = _deltas_on(fam, a, b, k), fam.H[k]
            for g in range(cat.nbasis):
                for f in range(cat.nbasis):
                    if cat.src[g] != cat.dst[f]:
                        continue
                    lhs = sum((cat.comp[g, f, j] * D[j] for j in np.flatnonzero(cat.comp[g, f])),
                              np.zeros_like(H[g] @ H[f]))
                    res = np.abs(lhs - H[g] @ D[f] - D[g] @ H[f]).max()
                    worst = max(worst, float(res))
    return worst


def leibniz_trend(build, sizes: Sequence[int] = (17, 33, 65, 129)) -> Dict[str, list]:
    """Leibniz residuals of ``build(n)`` over refining grids and their ratios."""
    res = [leibniz_residual(build(n)) for n in sizes]
    ratios = [r0 / r1 if r1 > 0 else float("inf") for r0, r1 in zip(res, res[1:])]
    return {"sizes": list(sizes), "residuals": res, "ratios": ratios}


# -- transgression cochain ---------------------------------------------------------

def _psi_values(fam: HomotopyFamily, k: int, m: int, seg: Tuple[int, int]) -> np.ndarray:
    cat = fam.cat
    a, b = seg
    n = 2 * m + 1
    H, D = fam.H[k], _deltas_on(fam, a, b, k)
    F = [_swap(d) for d in fam.base]
    comm = [F[cat.dst[i]] @ H[i] - H[i] @ F[cat.src[i]] for i in range(cat.nbasis)]
    eps = [np.diag(np.r_[np.ones(d), -np.ones(d)]) for d in fam.base]
    basis = enumerate_chains(cat, n)
    out = np.zeros(len(basis), dtype=complex)
    for idx, c in enumerate(basis.chains):
        total = 0j
        for j in range(1, n + 1):
            w = H[c[0]]
            for pos in range(1, n + 1):
                w = w @ (D[c[pos]] if pos == j else comm[c[pos]])
            total += (-1) ** (j - 1) * np.trace(eps[cat.dst[c[0]]] @ w)
        out[idx] = total
    return out


def psi_at(fam: HomotopyFamily, t: float, m: int, side: str = "right") -> Cochain:
    """``psi_t(f0..f_{2m+1}) = sum_j (-1)^{j-1} Tr(eps H(f0)[F,f1]..delta(fj)..[F,f_{2m+1}])``."""
    k = fam.index(t)
    seg = _segment_of(fam, k, side)
    _deriv_cache(fam)
    return Cochain(fam.cat, 2 * m + 1, _psi_values(fam, k, m, seg))


def integrate_invariance(fam: HomotopyFamily, t1: float = 0.0, t2: float = 1.0, m: int = 0,
                         tol: float = 1e-6, member_tol: float = 1e-6) -> Report:
    """Integrate ``psi_t`` over ``[t1, t2]`` and certify
    (a) ``B0 int psi = phi_{t2} - phi_{t1}`` and
    (b) ``S(phi_{t2}) - S(phi_{t1})`` is a cyclic coboundary."""
    from .omega import periodicity_S

    k1, k2 = fam.index(t1), fam.index(t2)
    if k1 >= k2:
        raise ValueError("need t1 < t2")
    _deriv_cache(fam)
    cat = fam.cat
    total = np.zeros(len(enumerate_chains(cat, 2 * m + 1)), dtype=complex)
    hmax, scale = 0.0, 0.0
    for a, b in fam.segments():
        lo, hi = max(a, k1), min(b, k2)
        if hi <= lo:
            continue
        part, h, s = _simpson_segment_range(fam, (a, b), lo, hi, m)
        total += part
        hmax, scale = max(hmax, h), max(scale, s)
    psi = Cochain(cat, 2 * m + 1, total)
    phi1 = chern_even(doubled_module_at(fam, fam.grid[k1]), m)
    phi2 = chern_even(doubled_module_at(fam, fam.grid[k2]), m)
    lhs = Cochain(cat, 2 * m, B0_matrix(cat, 2 * m + 1) @ psi.values)
    diff = lhs - (phi2 - phi1)
    heuristic = hmax ** 4 * scale
    rep = Report(command=f"homotopy invariance m={m} on [{fam.grid[k1]:g}, {fam.grid[k2]:g}]")
    rep.add("B0 int psi = phi(t2) - phi(t1)", diff.norm(), tol,
            f"Simpson h^4 * scale = {heuristic:.2e}")
    s1, s2 = periodicity_S(phi1), periodicity_S(phi2)
    sol = class_solve(s2 - s1, member_tol, scale=max(s1.norm(), s2.norm(), 1.0))
    rep.add("S(phi(t2)) - S(phi(t1)) is a cyclic coboundary", sol.residual, member_tol, sol.note)
    p = 2 * m + 1
    rep.data.update({
        "psi_integral": psi,
        "quadrature_heuristic": heuristic,
        "schatten_norms": [max((schatten_norm(c, p) for c in _commutators(fam, k)), default=0.0)
                           for k in range(k1, k2 + 1)],
    })
    return rep


def _simpson_segment_range(fam, seg, lo, hi, m):
    if (hi - lo + 1) % 2 == 0:
        raise PreconditionError(
            f"composite Simpson needs an odd sample count on [{fam.grid[lo]:g}, "
            f"{fam.grid[hi]:g}], got {hi - lo + 1}")
    if hi - lo < 2:
        raise PreconditionError("integration range needs at least 3 samples")
    vals = np.stack(pmap(lambda k: _psi_values(fam, k, m, seg), range(lo, hi + 1)))
    ts = fam.grid[lo:hi + 1]
    return (simpson(vals, x=ts, axis=0), float(np.max(np.diff(ts))),
            float(np.abs(vals).max(initial=0.0)))


def _commutators(fam: HomotopyFamily, k: int) -> list:
    cat = fam.cat
    F = [_swap(d) for d in fam.base]
    return [F[cat.dst[i]] @ m - m @ F[cat.src[i]] for i, m in enumerate(fam.H[k])]


# -- batch driver -------------------------------------------------------------------

@dataclass
class ChernPath:
    m: int
    samples: List[Tuple[float, Cochain]]
    residuals: List[float] = field(default_factory=list)
    max_residual: float = 0.0
    argmax: Optional[Tuple[float, float]] = None
    worst_chain: Optional[Tuple[str, ...]] = None


def chern_path(fam: HomotopyFamily, m: int) -> ChernPath:
    """Characters at every sample and the class residual of
    ``S(phi_{k+1}) - S(phi_k)`` between consecutive samples."""
    from .omega import periodicity_S

    chars = pmap(lambda t: chern_even(doubled_module_at(fam, t), m), fam.grid)
    out = ChernPath(m, list(zip(fam.grid.tolist(), chars)))
    S = [periodicity_S(c) for c in chars]
    for k in range(len(S) - 1):
        sol = class_solve(S[k + 1] - S[k], scale=max(S[k].norm(), S[k + 1].norm(), 1.0))
        out.residuals.append(sol.residual)
        if out.argmax is None or sol.residual > out.max_residual:
            out.max_residual = sol.residual
            out.argmax = (float(fam.grid[k]), float(fam.grid[k + 1]))
            out.worst_chain = sol.worst_chain
    return out
