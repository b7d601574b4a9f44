"""Independent reference computations used to cross-check the main engine.

The forms oracle embeds Omega(C) into the tensor algebra over the unitalized
category: ``a + mu`` sits in one slot, ``da = 1 (x) a - a (x) 1`` and
composition concatenates tensors, multiplying the two slots that meet.
Killing every adjoined unit in slots 1..n identifies ``Omega^n`` with
``C~ (x) C^(x)n``, so normal-form coefficients can be read off directly.
None of this shares code with :mod:`cychern.omega`.
"""
from __future__ import annotations

from typing import Dict, Sequence, Tuple

import numpy as np

from .cochain import Cochain
from .lincat import LinCat, enumerate_chains

# slot entries: basis morphism index >= 0, or -1 - obj for the adjoined unit at obj
Tensor = Dict[Tuple[int, ...], complex]


def _unit(obj: int) -> int:
    return -1 - obj


def _slot_product(cat: LinCat, g: int, f: int):
    """Expand ``g o f`` into ``[(slot, coeff)]``."""
    if g < 0:
        return [(f, 1.0)]
    if f < 0:
        return [(g, 1.0)]
    vec = cat.comp[g, f]
    return [(int(k), vec[k]) for k in np.flatnonzero(vec)]


def tensor_mul(cat: LinCat, a: Tensor, b: Tensor) -> Tensor:
    out: Tensor = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            for s, c in _slot_product(cat, ka[-1], kb[0]):
                key = ka[:-1] + (s,) + kb[1:]
                out[key] = out.get(key, 0) + ca * cb * c
    return {k: v for k, v in out.items() if v != 0}


def tensor_d(cat: LinCat, f: int) -> Tensor:
    y, x = int(cat.dst[f]), int(cat.src[f])
    return {(_unit(y), f): 1.0, (f, _unit(x)): -1.0}


def tensor_of_term(cat: LinCat, head: int, letters: Sequence[int], obj: int) -> Tensor:
    """Tensor image of ``head d l1 ... d ln``; ``head < 0`` means the unit at ``obj``."""
    acc: Tensor = {(head if head >= 0 else _unit(obj),): 1.0}
    for f in letters:
        acc = tensor_mul(cat, acc, tensor_d(cat, f))
    return acc


def tensor_to_normal(t: Tensor) -> Dict[Tuple[int, Tuple[int, ...]], complex]:
    """Project slots 1.. onto C and read off ``{(head, letters): coeff}``;
    the unit head is reported as -1."""
    out = {}
    for key, c in t.items():
        if any(s < 0 for s in key[1:]):
            continue
        head = key[0] if key[0] >= 0 else -1
        k = (head, tuple(key[1:]))
        out[k] = out.get(k, 0) + c
    return {k: v for k, v in out.items() if abs(v) > 1e-14}


def form_to_tensor(form) -> Tensor:
    """Tensor image of an :class:`~cychern.omega.OmegaForm`."""
    out: Tensor = {}
    for (h, letters), c in form.terms.items():
        for k, v in tensor_of_term(form.cat, h, letters, form.dst).items():
            out[k] = out.get(k, 0) + c * v
    return out


def trace_of_tensor(phi: Cochain, t: Tensor) -> complex:
    index = enumerate_chains(phi.cat, phi.degree).index
    total = 0j
    for (h, letters), c in tensor_to_normal(t).items():
        if h >= 0:
            total += c * phi.values[index[(h,) + letters]]
    return complex(total)


def periodicity_S_oracle(phi: Cochain) -> Cochain:
    """S(phi) from the Leibniz expansion in the tensor algebra."""
    cat, r = phi.cat, phi.degree
    basis = enumerate_chains(cat, r + 2)
    out = np.zeros(len(basis), dtype=complex)
    for idx, c in enumerate(basis.chains):
        total = 0j
        for i in range(1, r + 2):
            merged = cat.comp[c[i], c[i + 1]]
            for k in np.flatnonzero(merged):
                word: Tensor = {(c[0],): 1.0}
                for f in c[1:i]:
                    word = tensor_mul(cat, word, tensor_d(cat, f))
                word = tensor_mul(cat, word, {(int(k),): merged[k]})
                for f in c[i + 2:]:
                    word = tensor_mul(cat, word, tensor_d(cat, f))
                total += trace_of_tensor(phi, word)
        out[idx] = total
    return Cochain(cat, r + 2, out)


def cyclic_dims_bruteforce(cat: LinCat, nmax: int) -> list:
    """dim H^n_lambda by building b on cyclic cochains from scratch.

    Uses explicit loops over chains and an SVD rank, not the cached operator
    matrices of :mod:`cychern.cochain`.
    """
    def chains(n):
        return enumerate_chains(cat, n).chains

    def b_loop(n):
        src, dst = chains(n), chains(n + 1)
        sidx = {c: i for i, c in enumerate(src)}
        M = np.zeros((len(dst), len(src)), dtype=complex)
        for row, c in enumerate(dst):
            faces = list(range(n + 1)) + ["wrap"]
            for i in faces:
                if i == "wrap":
                    sign, pair = (-1) ** (n + 1), (c[n + 1], c[0])
                    rest = lambda k: (k,) + c[1:n + 1]
                else:
                    sign, pair = (-1) ** i, (c[i], c[i + 1])
                    rest = lambda k, i=i: c[:i] + (k,) + c[i + 2:]
                vec = cat.comp[pair[0], pair[1]]
                for k in np.flatnonzero(vec):
                    M[row, sidx[rest(int(k))]] += sign * vec[k]
        return M

    def cyc(n):
        cs = chains(n)
        idx = {c: i for i, c in enumerate(cs)}
        L = np.zeros((len(cs), len(cs)), dtype=complex)
        for i, c in enumerate(cs):
            # (lambda phi)(c) = (-1)^n phi(rotated c)
            L[i, idx[(c[-1],) + c[:-1]]] = (-1) ** n
        u, s, vh = np.linalg.svd(np.eye(len(cs)) - L)
        rank = int(np.sum(s > 1e-10 * max(1.0, s.max(initial=0))))
        return vh[rank:].conj().T

    def rank(M):
        if M.size == 0:
            return 0
        s = np.linalg.svd(M, compute_uv=False)
        return int(np.sum(s > 1e-10 * max(1.0, s.max(initial=0))))

    K = [cyc(n) for n in range(nmax + 2)]
    dims = []
    for n in range(nmax + 1):
        z = K[n].shape[1] - rank(b_loop(n) @ K[n])
        bnd = rank(b_loop(n - 1) @ K[n - 1]) if n else 0
        dims.append(z - bnd)
    return dims

