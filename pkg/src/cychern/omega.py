"""Symbolic universal DG-semicategory Omega(C).

A form is a finite sum of normal-form terms ``(f0 + mu) df1 ... dfn`` where
``f0`` is a basis morphism (or the adjoined unit) and the letters ``fi`` are
basis morphisms of C. Terms are stored as ``{(head, letters): coeff}`` with
``head == UNIT`` for the adjoined unit.

The closed graded trace attached to a cyclic cocycle ``phi`` of degree ``n``
sends ``f0 df1 ... dfn`` to ``phi(f0, ..., fn)`` and kills unit-headed terms.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from .cochain import (
    Cochain,
    NotCyclicError,
    class_solve,
    cyclic_ops,
    hochschild_b,
    is_cyclic_cocycle,
    op_B,
)
from .lincat import CompositionError, LinCat, enumerate_chains
from .report import Report

UNIT = -1
DROP_TOL = 1e-14

Term = Tuple[int, Tuple[int, ...]]


@dataclass
class OmegaForm:
    """Homogeneous element of ``Hom^degree(src, dst)`` in Omega(C)."""

    cat: LinCat
    src: int
    dst: int
    degree: int
    terms: Dict[Term, complex] = field(default_factory=dict)

    def is_zero(self) -> bool:
        return not self.terms

    def _like(self, terms) -> "OmegaForm":
        return OmegaForm(self.cat, self.src, self.dst, self.degree, _coalesce(terms))

    def __add__(self, other: "OmegaForm") -> "OmegaForm":
        _same_space(self, other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0) + v
        return self._like(terms)

    def __sub__(self, other: "OmegaForm") -> "OmegaForm":
        return self + (-1) * other

    def __mul__(self, c) -> "OmegaForm":
        return self._like({k: complex(c) * v for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __matmul__(self, other: "OmegaForm") -> "OmegaForm":
        return compose_forms(self, other)

    def max_abs_diff(self, other: "OmegaForm") -> float:
        diff = self - other
        return max((abs(v) for v in diff.terms.values()), default=0.0)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (h, letters), c in sorted(self.terms.items()):
            head = "1" if h == UNIT else self.cat.name(h)
            word = " ".join(f"d{self.cat.name(f)}" for f in letters)
            parts.append(f"({c:.6g}) {head} {word}".rstrip())
        return " + ".join(parts)

    __str__ = to_text


def _same_space(a: OmegaForm, b: OmegaForm):
    if a.cat is not b.cat or (a.src, a.dst, a.degree) != (b.src, b.dst, b.degree):
        raise CompositionError("forms live in different hom-spaces")


def _coalesce(terms: Dict[Term, complex]) -> Dict[Term, complex]:
    return {k: v for k, v in terms.items() if abs(v) > DROP_TOL}


def _obj(cat: LinCat, x) -> int:
    return int(x) if isinstance(x, (int, np.integer)) else cat.obj_index[x]


# -- constructors ------------------------------------------------------------------

def unit_form(cat: LinCat, obj) -> OmegaForm:
    x = _obj(cat, obj)
    return OmegaForm(cat, x, x, 0, {(UNIT, ()): 1.0})


def head_form(cat: LinCat, head, mu: complex = 0.0, letters: Sequence = (),
              obj=None) -> OmegaForm:
    """``(head + mu) d letters[0] ... d letters[-1]``.

    ``head`` is a morphism name, a ``{name: coeff}`` mapping or a coefficient
    vector; ``obj`` fixes the target when the form has neither head nor letters.
    """
    vec = head if isinstance(head, np.ndarray) else cat.vector(head or {})
    lets = tuple(f if isinstance(f, (int, np.integer)) else cat.mor_index[f] for f in letters)
    lets = tuple(int(f) for f in lets)
    ends = cat.endpoints(vec)
    if lets:
        dst, src = int(cat.dst[lets[0]]), int(cat.src[lets[-1]])
        for a, b in zip(lets, lets[1:]):
            if cat.src[a] != cat.dst[b]:
                raise CompositionError("letters are not composable")
        if ends is not None and ends != (dst, dst):
            raise CompositionError("head does not end where the letters start")
    elif ends is not None:
        src, dst = ends
    elif obj is not None:
        src = dst = _obj(cat, obj)
    else:
        raise ValueError("cannot infer the object of an empty form")
    if mu and src != dst and not lets:
        raise CompositionError("unit head needs an endomorphism form")
    terms = {(int(k), lets): complex(vec[k]) for k in np.flatnonzero(vec)}
    if mu:
        terms[(UNIT, lets)] = terms.get((UNIT, lets), 0) + complex(mu)
    return OmegaForm(cat, src, dst, len(lets), _coalesce(terms))


def d_letter(cat: LinCat, f) -> OmegaForm:
    """The form ``df`` for a basis morphism ``f``."""
    i = f if isinstance(f, (int, np.integer)) else cat.mor_index[f]
    i = int(i)
    return OmegaForm(cat, int(cat.src[i]), int(cat.dst[i]), 1, {(UNIT, (i,)): 1.0})


def morphism_form(cat: LinCat, vec: np.ndarray, src: int, dst: int) -> OmegaForm:
    terms = {(int(k), ()): complex(vec[k]) for k in np.flatnonzero(vec)}
    return OmegaForm(cat, src, dst, 0, _coalesce(terms))


# -- structure -----------------------------------------------------------------

def compose_forms(a: OmegaForm, b: OmegaForm) -> OmegaForm:
    """``a o b`` rewritten to normal form.

    For ``a = (f0 + mu) df1..dfn`` and ``b = (f_{n+1} + mu') df_{n+2}..dfm``::

        a o b = sum_{j=1}^{n} (-1)^{n-j} (f0 + mu) df1 .. d(fj f_{j+1}) .. dfm
                + (-1)^n (f0 + mu) f1 df2 .. dfm
                + mu' (f0 + mu) df1 .. dfn df_{n+2} .. dfm
    """
    if a.cat is not b.cat:
        raise CompositionError("forms over different categories")
    if a.src != b.dst:
        raise CompositionError(
            f"cannot compose: source {a.cat.objects[a.src]} != target {a.cat.objects[b.dst]}"
        )
    cat = a.cat
    n = a.degree
    out: Dict[Term, complex] = {}

    def put(key, val):
        out[key] = out.get(key, 0) + val

    for (ha, la), ca in a.terms.items():
        for (hb, lb), cb in b.terms.items():
            c = ca * cb
            if hb == UNIT:
                put((ha, la + lb), c)
                continue
            seq = la + (hb,) + lb
            for j in range(1, n + 1):
                merged = cat.compose_idx(seq[j - 1], seq[j])
                sign = -1.0 if (n - j) % 2 else 1.0
                for k in np.flatnonzero(merged):
                    put((ha, seq[:j - 1] + (int(k),) + seq[j + 1:]), sign * c * merged[k])
            sign = -1.0 if n % 2 else 1.0
            rest = seq[1:]
            if ha == UNIT:
                put((seq[0], rest), sign * c)
            else:
                merged = cat.compose_idx(ha, seq[0])
                for k in np.flatnonzero(merged):
                    put((int(k), rest), sign * c * merged[k])
    return OmegaForm(cat, b.src, a.dst, a.degree + b.degree, _coalesce(out))


def compose_all(forms: Iterable[OmegaForm]) -> OmegaForm:
    it = iter(forms)
    acc = next(it)
    for f in it:
        acc = compose_forms(acc, f)
    return acc


def differential(a: OmegaForm) -> OmegaForm:
    """``d((f0 + mu) df1..dfn) = df0 df1..dfn``."""
    terms: Dict[Term, complex] = {}
    for (h, letters), c in a.terms.items():
        if h != UNIT:
            key = (UNIT, (h,) + letters)
            terms[key] = terms.get(key, 0) + c
    return OmegaForm(a.cat, a.src, a.dst, a.degree + 1, _coalesce(terms))


def trace_eval(phi: Cochain, form: OmegaForm) -> complex:
    """Value of the closed graded trace of ``phi`` on an endomorphism form."""
    if form.degree != phi.degree:
        raise ValueError(f"trace of degree {phi.degree} applied to a degree {form.degree} form")
    if form.src != form.dst:
        raise CompositionError("trace needs an endomorphism form")
    index = enumerate_chains(phi.cat, phi.degree).index
    total = 0j
    for (h, letters), c in form.terms.items():
        if h != UNIT:
            total += c * phi.values[index[(h,) + letters]]
    return complex(total)


# -- periodicity ----------------------------------------------------------------------

def _require_cocycle(phi: Cochain, tol: Optional[float]):
    check = is_cyclic_cocycle(phi, tol)
    if not check.ok:
        raise NotCyclicError(
            f"expected a cyclic cocycle: cyclic residual {check.cyclic_residual:.2e}, "
            f"cocycle residual {check.cocycle_residual:.2e}"
        )


def _letter_forms(cat: LinCat, chain: Sequence[int]):
    return [d_letter(cat, f) for f in chain]


def _merged_form(cat: LinCat, f: int, g: int) -> Optional[OmegaForm]:
    vec = cat.compose_idx(f, g)
    if not np.any(vec):
        return None
    return morphism_form(cat, vec, int(cat.src[g]), int(cat.dst[f]))


def periodicity_S(phi: Cochain, tol: Optional[float] = None) -> Cochain:
    """``S(phi)`` of degree ``r + 2`` for a cyclic cocycle ``phi`` of degree ``r``::

        S(phi)(f0..f_{r+2}) = sum_{i=1}^{r+1}
            T_phi(f0 df1 .. df_{i-1} (fi f_{i+1}) df_{i+2} .. df_{r+2})
    """
    _require_cocycle(phi, tol)
    cat, r = phi.cat, phi.degree
    basis = enumerate_chains(cat, r + 2)
    out = np.zeros(len(basis), dtype=complex)
    for idx, c in enumerate(basis.chains):
        letters = _letter_forms(cat, c)
        head = morphism_form(cat, np.eye(cat.nbasis)[c[0]], int(cat.src[c[0]]), int(cat.dst[c[0]]))
        prefix = head
        total = 0j
        for i in range(1, r + 2):
            merged = _merged_form(cat, c[i], c[i + 1])
            if merged is not None:
                word = compose_all([prefix, merged] + letters[i + 2:])
                total += trace_eval(phi, word)
            prefix = compose_forms(prefix, letters[i])
        out[idx] = total
    return Cochain(cat, r + 2, out)


def s_coboundary_witness(phi: Cochain, tol: Optional[float] = None) -> Cochain:
    """``psi_w`` of degree ``r + 1`` with ``b psi_w = S(phi)``::

        psi_w(f0..f_{r+1}) = sum_{j=1}^{r+1} (-1)^{j-1}
            T_phi(f0 df1 .. df_{j-1} fj df_{j+1} .. df_{r+1})
    """
    _require_cocycle(phi, tol)
    cat, r = phi.cat, phi.degree
    basis = enumerate_chains(cat, r + 1)
    eye = np.eye(cat.nbasis)
    out = np.zeros(len(basis), dtype=complex)
    for idx, c in enumerate(basis.chains):
        letters = _letter_forms(cat, c)
        plain = [morphism_form(cat, eye[f], int(cat.src[f]), int(cat.dst[f])) for f in c]
        prefix = plain[0]
        total = 0j
        for j in range(1, r + 2):
            word = compose_all([prefix, plain[j]] + letters[j + 1:])
            total += (-1) ** (j - 1) * trace_eval(phi, word)
            prefix = compose_forms(prefix, letters[j])
        out[idx] = total
    return Cochain(cat, r + 1, out)


class PreconditionError(ValueError):
    """Raised when an input violates an operation's hypothesis."""


def check_s_on_B(psi: Cochain, tol: float = 1e-10, member_tol: float = 1e-8) -> Report:
    """Check that ``B psi`` is a cyclic cocycle and that
    ``S(B psi) - n (n + 1) b psi`` is a cyclic coboundary, given that ``b psi``
    is cyclic."""
    n = psi.degree
    bpsi = hochschild_b(psi)
    _, lam = cyclic_ops(bpsi)
    pre = (bpsi - lam).norm()
    if pre > tol * (1.0 + bpsi.norm()):
        raise PreconditionError(f"b psi is not cyclic (residual {pre:.2e})")
    rep = Report(command=f"check_s_on_B degree {n}")
    phi = op_B(psi)
    cc = is_cyclic_cocycle(phi)
    scale = 1.0 + phi.norm()
    rep.add("B psi cyclic", cc.cyclic_residual / scale, tol)
    rep.add("B psi cocycle", cc.cocycle_residual / scale, tol)
    if cc.ok:
        diff = periodicity_S(phi) - n * (n + 1) * bpsi
        sol = class_solve(diff, member_tol)
        rep.add("S(B psi) - n(n+1) b psi is a cyclic coboundary", sol.residual, member_tol,
                sol.note)
    return rep


__all__ = [
    "UNIT", "OmegaForm", "unit_form", "head_form", "d_letter", "morphism_form",
    "compose_forms", "compose_all", "differential", "trace_eval", "periodicity_S",
    "s_coboundary_witness", "check_s_on_B", "PreconditionError",
]
