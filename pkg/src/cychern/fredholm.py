"""Even and odd Fredholm modules over a linear category, their supertraces
and Chern characters, and the periodicity identity with explicit witness.

An even module assigns to each object a graded space ``H(X) = H+ (+) H-``,
an odd involution ``F_X`` and to each basis morphism a block-diagonal matrix.
Words ``H(f0)[F, f1] ... [F, fj]`` are evaluated left to right from the
per-morphism commutators, which are computed once at construction.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence

import numpy as np

from .cochain import Cochain, cyclic_ops, hochschild_b, is_cyclic_cocycle
from .lincat import CompositionError, LinCat, enumerate_chains
from .numkernel import DimensionError, GradedDims, as_mat, graded_commutator, pmap, schatten_norm
from .report import Report

MODULE_TOL = 1e-10


class _Module:
    graded = True

    def __init__(self, cat: LinCat, dims: Mapping, F: Mapping, H: Mapping):
        self.cat = cat
        nobj = len(cat.objects)
        self.size = [0] * nobj
        self._read_dims(dims)
        self.F = [None] * nobj
        for x, mat in F.items():
            i = cat.obj_index[x]
            m = as_mat(mat)
            d = self.size[i]
            if m.shape != (d, d):
                raise DimensionError(f"F at object {x!r} has shape {m.shape}, expected {(d, d)}")
            self.F[i] = m
        missing = [cat.objects[i] for i, f in enumerate(self.F) if f is None]
        if missing:
            raise ValueError(f"F missing for objects {missing}")
        self.H = [None] * cat.nbasis
        for name, mat in H.items():
            k = cat.mor_index[name]
            m = as_mat(mat)
            shape = (self.size[cat.dst[k]], self.size[cat.src[k]])
            if m.shape != shape:
                raise DimensionError(f"H({name}) has shape {m.shape}, expected {shape}")
            self.H[k] = m
        missing = [cat.name(k) for k, h in enumerate(self.H) if h is None]
        if missing:
            raise ValueError(f"H missing for morphisms {missing}")
        # degree-0 commutators [F, H(f)], computed once
        self.comm = [graded_commutator(self.F[cat.src[k]], self.F[cat.dst[k]], self.H[k])
                     for k in range(cat.nbasis)]

    def _read_dims(self, dims):
        raise NotImplementedError

    def H_of(self, vec: np.ndarray, obj: Optional[int] = None) -> np.ndarray:
        """``H`` extended linearly to a coefficient vector."""
        nz = np.flatnonzero(vec)
        if not nz.size:
            if obj is None:
                raise ValueError("zero head needs an explicit object")
            return np.zeros((self.size[obj], self.size[obj]), dtype=complex)
        return sum(vec[k] * self.H[k] for k in nz)

    def grading(self, obj: int) -> np.ndarray:
        return np.eye(self.size[obj], dtype=complex)


class EvenModule(_Module):
    """Graded module; ``dims`` maps object -> ``(plus, minus)`` or GradedDims."""

    graded = True

    def _read_dims(self, dims):
        self.dims = [None] * len(self.cat.objects)
        for x, d in dims.items():
            i = self.cat.obj_index[x]
            g = d if isinstance(d, GradedDims) else GradedDims(*d)
            self.dims[i] = g
            self.size[i] = g.total
        if any(d is None for d in self.dims):
            raise ValueError("dims missing for some objects")

    def grading(self, obj: int) -> np.ndarray:
        return self.dims[obj].grading()


class OddModule(_Module):
    """Ungraded module; ``dims`` maps object -> int."""

    graded = False

    def _read_dims(self, dims):
        for x, d in dims.items():
            d = int(d)
            if d < 1:
                raise ValueError(f"dimension at {x!r} must be positive")
            self.size[self.cat.obj_index[x]] = d
        if 0 in self.size:
            raise ValueError("dims missing for some objects")


def conjugate(mod: _Module, U: Mapping) -> _Module:
    """Transport ``mod`` along invertible ``U_X``: ``H'(f) = U_Y H(f) U_X^-1``,
    ``F'_X = U_X F_X U_X^-1``. For an even module the ``U_X`` must be block-diagonal."""
    cat = mod.cat
    Um = [as_mat(U[x]) for x in cat.objects]
    Ui = [np.linalg.inv(u) for u in Um]
    F = {x: Um[i] @ mod.F[i] @ Ui[i] for i, x in enumerate(cat.objects)}
    H = {cat.name(k): Um[cat.dst[k]] @ mod.H[k] @ Ui[cat.src[k]] for k in range(cat.nbasis)}
    if isinstance(mod, EvenModule):
        dims = {x: mod.dims[i] for i, x in enumerate(cat.objects)}
        return EvenModule(cat, dims, F, H)
    return OddModule(cat, {x: mod.size[i] for i, x in enumerate(cat.objects)}, F, H)


# -- validation ------------------------------------------------------------------

def _validate_common(mod: _Module, rep: Report, tol: float):
    cat = mod.cat
    for i, x in enumerate(cat.objects):
        F = mod.F[i]
        rep.add(f"F^2 = id at {x}", np.abs(F @ F - np.eye(mod.size[i])).max(), tol)
    for g in range(cat.nbasis):
        for f in range(cat.nbasis):
            if cat.src[g] != cat.dst[f]:
                continue
            want = sum((cat.comp[g, f, k] * mod.H[k] for k in np.flatnonzero(cat.comp[g, f])),
                       np.zeros((mod.size[cat.dst[g]], mod.size[cat.src[f]]), dtype=complex))
            res = np.abs(mod.H[g] @ mod.H[f] - want).max()
            rep.add(f"functor law H({cat.name(g)})H({cat.name(f)})", res, tol)
    for i, x in enumerate(cat.objects):
        res = np.abs(mod.H_of(cat.ident[i], i) - np.eye(mod.size[i])).max()
        rep.add(f"identity at {x}", res, tol)


def _offdiag(m: np.ndarray, p: int) -> float:
    return max(np.abs(m[:p, p:]).max(initial=0.0), np.abs(m[p:, :p]).max(initial=0.0))


def _diag(m: np.ndarray, p: int) -> float:
    return max(np.abs(m[:p, :p]).max(initial=0.0), np.abs(m[p:, p:]).max(initial=0.0))


def validate_even(mod: EvenModule, tol: float = MODULE_TOL) -> Report:
    rep = Report(command="validate even module")
    cat = mod.cat
    for i, x in enumerate(cat.objects):
        rep.add(f"F odd at {x}", _diag(mod.F[i], mod.dims[i].d_plus), tol)
    for k in range(cat.nbasis):
        p_src, p_dst = mod.dims[cat.src[k]].d_plus, mod.dims[cat.dst[k]].d_plus
        h = mod.H[k]
        off = max(np.abs(h[:p_dst, p_src:]).max(initial=0.0),
                  np.abs(h[p_dst:, :p_src]).max(initial=0.0))
        rep.add(f"H({cat.name(k)}) block-diagonal", off, tol)
    _validate_common(mod, rep, tol)
    return rep


def validate_odd(mod: OddModule, tol: float = MODULE_TOL) -> Report:
    rep = Report(command="validate odd module")
    _validate_common(mod, rep, tol)
    return rep


def validate_module(mod: _Module, tol: float = MODULE_TOL) -> Report:
    return validate_even(mod, tol) if isinstance(mod, EvenModule) else validate_odd(mod, tol)


def summability_report(mod: _Module, p: float) -> Dict[str, float]:
    """``|| [F, H(f)] ||_p`` per basis morphism. Every finite matrix is in every
    Schatten class, so this is informational only."""
    return {mod.cat.name(k): schatten_norm(mod.comm[k], p) for k in range(mod.cat.nbasis)}


def summability_thresholds(p: float) -> Dict[str, int]:
    """Smallest admissible character degrees for a p-summable module:
    even ``2m >= p - 1``, odd ``2m - 1 >= p - 1``."""
    even = int(np.ceil(max(p - 1, 0) / 2.0)) * 2
    odd = max(1, 2 * int(np.ceil(p / 2.0)) - 1)
    return {"even_degree": even, "odd_degree": odd}


# -- words and traces -----------------------------------------------------------------

@dataclass
class OperatorWord:
    src: int
    dst: int
    degree: int
    matrix: np.ndarray


def _indices(cat: LinCat, letters: Sequence) -> list:
    return [int(f) if isinstance(f, (int, np.integer)) else cat.mor_index[f] for f in letters]


def evaluate_word(mod: _Module, head=None, letters: Sequence = (), mu: complex = 0.0,
                  obj=None) -> OperatorWord:
    """``(H(head) + mu) [F, l1] ... [F, lj]``.

    ``head`` is a name, a ``{name: coeff}`` mapping, a coefficient vector or
    None; ``obj`` names the target when neither head nor letters fix it.
    """
    cat = mod.cat
    lets = _indices(cat, letters)
    for a, b in zip(lets, lets[1:]):
        if cat.src[a] != cat.dst[b]:
            raise CompositionError(f"letters {cat.name(a)}, {cat.name(b)} are not composable")
    vec = head if isinstance(head, np.ndarray) else cat.vector(head or {})
    ends = cat.endpoints(vec)
    if lets:
        dst, src = int(cat.dst[lets[0]]), int(cat.src[lets[-1]])
        if ends is not None and ends[0] != dst:
            raise CompositionError("head does not compose with the first letter")
        if ends is not None:
            dst = ends[1]
    elif ends is not None:
        src, dst = ends
    elif obj is not None:
        src = dst = obj if isinstance(obj, (int, np.integer)) else cat.obj_index[obj]
    else:
        raise ValueError("cannot infer the object of an empty word")
    mid = int(cat.dst[lets[0]]) if lets else src
    m = mod.H_of(vec, mid) if np.any(vec) else np.zeros((mod.size[dst], mod.size[mid]), complex)
    if mu:
        if dst != mid:
            raise CompositionError("unit head needs matching endpoints")
        m = m + mu * np.eye(mod.size[dst])
    for f in lets:
        m = m @ mod.comm[f]
    return OperatorWord(src, dst, len(lets), m)


def _check_endo(w: OperatorWord):
    if w.src != w.dst:
        raise CompositionError("trace of a word with different endpoints")


def supertrace(mod: EvenModule, w: OperatorWord) -> complex:
    """``1/2 Tr(eps F [F, w])`` with the graded commutator."""
    _check_endo(w)
    F, eps = mod.F[w.src], mod.grading(w.src)
    c = graded_commutator(F, F, w.matrix, w.degree)
    return 0.5 * complex(np.trace(eps @ F @ c))


def trs_odd(mod: OddModule, w: OperatorWord) -> complex:
    """``1/2 Tr(F [F, w])`` with sign ``(-1)^deg w``."""
    _check_endo(w)
    F = mod.F[w.src]
    c = graded_commutator(F, F, w.matrix, w.degree)
    return 0.5 * complex(np.trace(F @ c))


def _word_of_chain(mod: _Module, chain) -> OperatorWord:
    cat = mod.cat
    m = mod.H[chain[0]]
    for f in chain[1:]:
        m = m @ mod.comm[f]
    return OperatorWord(int(cat.src[chain[-1]]), int(cat.dst[chain[0]]), len(chain) - 1, m)


def _character(mod: _Module, n: int, trace_fn) -> Cochain:
    basis = enumerate_chains(mod.cat, n)
    vals = pmap(lambda c: trace_fn(mod, _word_of_chain(mod, c)), basis.chains)
    return Cochain(mod.cat, n, np.array(vals, dtype=complex))


def chern_even(mod: EvenModule, m: int) -> Cochain:
    """``phi^{2m}(f0..f2m) = Tr_s(H(f0)[F,f1]...[F,f2m])``."""
    if m < 0:
        raise ValueError("m must be non-negative")
    return _character(mod, 2 * m, supertrace)


def odd_character(mod: OddModule, n: int) -> Cochain:
    """``Tr'_s(H(f0)[F,f1]...[F,fn])`` for any n; identically zero for even n."""
    return _character(mod, n, trs_odd)


def chern_odd(mod: OddModule, m: int) -> Cochain:
    """``phi^{2m-1}``."""
    if m < 1:
        raise ValueError("odd characters need m >= 1")
    return odd_character(mod, 2 * m - 1)


# -- periodicity -----------------------------------------------------------------

def merged_word_S(mod: EvenModule, m: int) -> Cochain:
    """``S(phi^{2m})`` evaluated in the module itself::

        sum_{i=1}^{2m+1} Tr_s(H(f0)[F,f1]..[F,f_{i-1}] H(fi f_{i+1}) [F,f_{i+2}]..[F,f_{2m+2}])

    The i = 0 term has odd degree and its supertrace vanishes.
    """
    cat = mod.cat
    n = 2 * m + 2
    basis = enumerate_chains(cat, n)

    def value(c):
        total = 0j
        prefix = mod.H[c[0]]
        for i in range(1, n):
            merged = cat.comp[c[i], c[i + 1]]
            if np.any(merged):
                w = prefix @ mod.H_of(merged)
                for f in c[i + 2:]:
                    w = w @ mod.comm[f]
                obj = int(cat.dst[c[0]])
                total += supertrace(mod, OperatorWord(obj, obj, n - 2, w))
            prefix = prefix @ mod.comm[c[i]]
        return total

    return Cochain(cat, n, np.array(pmap(value, basis.chains), dtype=complex))


def witness_component(mod: EvenModule, m: int, j: int) -> Cochain:
    """``psi^j(f0..f_{2m+1}) = Tr(eps F H(fj)[F,f_{j+1}]..[F,f_{2m+1}][F,f0]..[F,f_{j-1}])``."""
    cat = mod.cat
    n = 2 * m + 1
    basis = enumerate_chains(cat, n)

    def value(c):
        w = mod.H[c[j]]
        for f in c[j + 1:] + c[:j]:
            w = w @ mod.comm[f]
        obj = int(cat.dst[c[j]])
        return complex(np.trace(mod.grading(obj) @ mod.F[obj] @ w))

    return Cochain(cat, n, np.array(pmap(value, basis.chains), dtype=complex))


def periodicity_witness(mod: EvenModule, m: int) -> Cochain:
    """Cyclic cochain ``psi`` of degree 2m+1 with
    ``b psi = S(phi^{2m}) + (m+1) phi^{2m+2}``.

    ``psi = 1/2 sum_{j=0}^{2m+1} (-1)^{j-1} psi^j``; the components satisfy
    ``tau psi^j = psi^{j-1}``.
    """
    n = 2 * m + 1
    total = Cochain.zeros(mod.cat, n)
    for j in range(n + 1):
        total = total + (-1) ** (j - 1) * witness_component(mod, m, j)
    return 0.5 * total


def _worst(cat: LinCat, diff: Cochain) -> str:
    if not diff.values.size:
        return ""
    k = int(np.argmax(np.abs(diff.values)))
    chain = enumerate_chains(cat, diff.degree).chains[k]
    return "worst chain (" + ", ".join(cat.chain_names(chain)) + ")"


def periodicity_check(mod: EvenModule, m: int, tol: float = 1e-9,
                      agree_tol: float = 1e-10, cyclic_tol: float = 1e-10) -> Report:
    """Certify ``S(phi^{2m}) + (m+1) phi^{2m+2} = b psi`` with both S routes."""
    from .omega import periodicity_S

    cat = mod.cat
    rep = Report(command=f"periodicity m={m}")
    phi = chern_even(mod, m)
    phi_next = chern_even(mod, m + 1)
    for name, c in ((f"phi^{2 * m}", phi), (f"phi^{2 * m + 2}", phi_next)):
        cc = is_cyclic_cocycle(c)
        rep.add(f"{name} cyclic", cc.cyclic_residual, cyclic_tol)
        rep.add(f"{name} cocycle", cc.cocycle_residual, cyclic_tol)
    s_sym = periodicity_S(phi)
    s_mw = merged_word_S(mod, m)
    rep.add("S via forms = S via merged words", (s_sym - s_mw).norm(), agree_tol,
            _worst(cat, s_sym - s_mw))
    psi = periodicity_witness(mod, m)
    _, lam = cyclic_ops(psi)
    rep.add("witness cyclic", (psi - lam).norm(), cyclic_tol, _worst(cat, psi - lam))
    diff = s_sym + (m + 1) * phi_next - hochschild_b(psi)
    rep.add("S(phi) + (m+1) phi' - b psi", diff.norm(), tol, _worst(cat, diff))
    rep.data.update({"S": s_sym, "phi": phi, "phi_next": phi_next, "witness": psi})
    return rep
