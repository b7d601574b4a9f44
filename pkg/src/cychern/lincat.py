"""Finitely presented small C-linear categories.

A category is given by a finite basis of morphisms, a table of structure
constants for composition and, for every object, the decomposition of its
identity in the basis. Composition is ``compose(g, f) = g o f`` for
``f: X -> Y`` and ``g: Y -> Z``.

Cyclic chains of degree ``n`` are tuples ``(f0, ..., fn)`` with
``fi: X_{i+1} -> X_i`` (indices mod ``n + 1``).
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

DEFAULT_CHAIN_CAP = 10**6
ASSOC_TOL = 1e-12


class CombinatorialBlowup(RuntimeError):
    """Raised when a chain basis would exceed the configured cap."""


class CompositionError(ValueError):
    """Raised when morphisms are composed across mismatched objects."""


@dataclass(frozen=True)
class Morphism:
    name: str
    src: str
    dst: str


@dataclass
class ValidationReport:
    failures: List[Tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def add(self, kind: str, detail: str) -> None:
        self.failures.append((kind, detail))

    def kinds(self) -> set:
        return {k for k, _ in self.failures}

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(f"{k}: {d}" for k, d in self.failures)


@dataclass(frozen=True)
class ChainBasis:
    """Enumerated cyclic chains of one degree, in lexicographic order."""

    degree: int
    chains: Tuple[Tuple[int, ...], ...]
    index: Mapping[Tuple[int, ...], int]

    def __len__(self) -> int:
        return len(self.chains)

    def __iter__(self):
        return iter(self.chains)


def _lincomb_items(lc) -> Iterable[Tuple[str, complex]]:
    if isinstance(lc, str):
        return [(lc, 1.0)]
    if isinstance(lc, Mapping):
        return lc.items()
    return lc


class LinCat:
    """Immutable finitely presented C-linear category.

    Parameters
    ----------
    objects : names of the objects.
    morphisms : ``(name, src, dst)`` triples forming the hom-space bases.
    compose_table : ``{(g, f): {name: coeff}}``; a missing entry means ``g o f = 0``.
    identities : ``{object: {name: coeff}}``.
    """

    def __init__(self, objects, morphisms, compose_table, identities,
                 chain_cap: int = DEFAULT_CHAIN_CAP):
        self.objects: Tuple[str, ...] = tuple(objects)
        self.morphisms: Tuple[Morphism, ...] = tuple(
            m if isinstance(m, Morphism) else Morphism(*m) for m in morphisms
        )
        self.chain_cap = int(chain_cap)
        self._schema_issues: List[Tuple[str, str]] = []

        self.obj_index = {x: i for i, x in enumerate(self.objects)}
        self.mor_index: Dict[str, int] = {}
        for i, m in enumerate(self.morphisms):
            if m.name in self.mor_index:
                self._schema_issues.append(("typing", f"duplicate morphism name {m.name!r}"))
            self.mor_index.setdefault(m.name, i)
            for end in (m.src, m.dst):
                if end not in self.obj_index:
                    raise ValueError(f"morphism {m.name!r} refers to unknown object {end!r}")
        if len(self.obj_index) != len(self.objects):
            self._schema_issues.append(("typing", "duplicate object names"))

        nb = len(self.morphisms)
        self.src = np.array([self.obj_index[m.src] for m in self.morphisms], dtype=int)
        self.dst = np.array([self.obj_index[m.dst] for m in self.morphisms], dtype=int)

        self.compose_table: Dict[Tuple[str, str], Dict[str, complex]] = {}
        self.comp = np.zeros((nb, nb, nb), dtype=complex)
        for (g, f), result in dict(compose_table).items():
            gi, fi = self._idx(g), self._idx(f)
            vec = self._vector(result)
            self.comp[gi, fi] = vec
            self.compose_table[(g, f)] = {self.morphisms[k].name: complex(vec[k])
                                          for k in np.flatnonzero(vec)}

        self.identities: Dict[str, Dict[str, complex]] = {}
        self.ident = np.zeros((len(self.objects), nb), dtype=complex)
        self._has_identity = np.zeros(len(self.objects), dtype=bool)
        for x, decomp in dict(identities).items():
            if x not in self.obj_index:
                raise ValueError(f"identity given for unknown object {x!r}")
            vec = self._vector(decomp)
            self.ident[self.obj_index[x]] = vec
            self._has_identity[self.obj_index[x]] = True
            self.identities[x] = {self.morphisms[k].name: complex(vec[k])
                                  for k in np.flatnonzero(vec)}

        # into[x]: basis morphisms with target x, ascending
        self.into = [np.flatnonzero(self.dst == x).tolist() for x in range(len(self.objects))]
        self._cache: Dict[tuple, object] = {}
        self._lock = threading.Lock()

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_dict(cls, data: Mapping, chain_cap: int = DEFAULT_CHAIN_CAP) -> "LinCat":
        """Build from the JSON category schema (complex numbers as ``[re, im]``)."""
        def coeffs(terms):
            return {t["mor"]: complex(*t["coeff"]) for t in terms}

        morphisms = [(m["name"], m["src"], m["dst"]) for m in data["morphisms"]]
        table = {(c["g"], c["f"]): coeffs(c["result"]) for c in data.get("compose", [])}
        idents = {x: coeffs(v) for x, v in data.get("identities", {}).items()}
        return cls(data["objects"], morphisms, table, idents, chain_cap=chain_cap)

    def to_dict(self) -> dict:
        def terms(d):
            return [{"mor": k, "coeff": [v.real, v.imag]} for k, v in d.items()]

        return {
            "objects": list(self.objects),
            "morphisms": [{"name": m.name, "src": m.src, "dst": m.dst} for m in self.morphisms],
            "compose": [{"g": g, "f": f, "result": terms(r)}
                        for (g, f), r in self.compose_table.items()],
            "identities": {x: terms(d) for x, d in self.identities.items()},
        }

    def with_cap(self, cap: int) -> "LinCat":
        return LinCat(self.objects, self.morphisms, self.compose_table, self.identities, cap)

    def _idx(self, name: str) -> int:
        try:
            return self.mor_index[name]
        except KeyError:
            raise ValueError(f"unknown morphism {name!r}") from None

    def _vector(self, lc) -> np.ndarray:
        vec = np.zeros(len(self.morphisms), dtype=complex)
        for name, c in _lincomb_items(lc):
            vec[self._idx(name)] += complex(c)
        return vec

    # -- basic structure ----------------------------------------------------

    @property
    def nbasis(self) -> int:
        return len(self.morphisms)

    def name(self, i: int) -> str:
        return self.morphisms[i].name

    def vector(self, lc) -> np.ndarray:
        """Coefficient vector of a linear combination (name, dict or pairs)."""
        return self._vector(lc)

    def lincomb(self, vec: np.ndarray, tol: float = 0.0) -> Dict[str, complex]:
        return {self.morphisms[k].name: complex(vec[k]) for k in np.flatnonzero(np.abs(vec) > tol)}

    def endpoints(self, vec: np.ndarray) -> Optional[Tuple[int, int]]:
        """``(src, dst)`` object indices shared by the support of ``vec``."""
        support = np.flatnonzero(vec)
        if not support.size:
            return None
        pairs = {(int(self.src[k]), int(self.dst[k])) for k in support}
        if len(pairs) > 1:
            raise CompositionError("linear combination mixes hom-spaces")
        return pairs.pop()

    def compose_idx(self, g: int, f: int) -> np.ndarray:
        """Coefficients of ``g o f`` for basis indices (zero vector if not composable)."""
        if self.src[g] != self.dst[f]:
            return np.zeros(self.nbasis, dtype=complex)
        return self.comp[g, f]

    def compose_vec(self, gv: np.ndarray, fv: np.ndarray) -> np.ndarray:
        ge, fe = self.endpoints(gv), self.endpoints(fv)
        if ge is not None and fe is not None and ge[0] != fe[1]:
            raise CompositionError(
                f"cannot compose: target {self.objects[fe[1]]} != source {self.objects[ge[0]]}"
            )
        return np.einsum("g,f,gfk->k", gv, fv, self.comp)

    def identity_vec(self, obj) -> np.ndarray:
        x = obj if isinstance(obj, (int, np.integer)) else self.obj_index[obj]
        return self.ident[x]

    def cached(self, key, build):
        """Write-once per-category cache for derived operators."""
        try:
            return self._cache[key]
        except KeyError:
            pass
        value = build()
        with self._lock:
            return self._cache.setdefault(key, value)

    def chain_names(self, chain: Sequence[int]) -> Tuple[str, ...]:
        return tuple(self.morphisms[i].name for i in chain)

    def chain_from_names(self, names: Sequence[str]) -> Tuple[int, ...]:
        return tuple(self._idx(n) for n in names)

    def __repr__(self) -> str:
        return f"LinCat(objects={list(self.objects)}, basis={[m.name for m in self.morphisms]})"


# -- operations ---------------------------------------------------------------

def validate_category(cat: LinCat, tol: float = ASSOC_TOL) -> ValidationReport:
    rep = ValidationReport()
    for kind, detail in cat._schema_issues:
        rep.add(kind, detail)
    nb = cat.nbasis

    for (g, f), result in cat.compose_table.items():
        gi, fi = cat.mor_index[g], cat.mor_index[f]
        if cat.src[gi] != cat.dst[fi]:
            rep.add("typing", f"compose entry ({g}, {f}) is not composable")
            continue
        for name in result:
            k = cat.mor_index[name]
            if cat.src[k] != cat.src[fi] or cat.dst[k] != cat.dst[gi]:
                rep.add("typing", f"{g} o {f} contains {name} outside Hom(src {f}, dst {g})")

    for x, obj in enumerate(cat.objects):
        if not cat._has_identity[x]:
            rep.add("identity", f"missing identity decomposition for object {obj}")
            continue
        for name in cat.identities[obj]:
            k = cat.mor_index[name]
            if cat.src[k] != x or cat.dst[k] != x:
                rep.add("typing", f"identity of {obj} uses {name}, not an endomorphism of {obj}")
    if rep.failures:
        return rep

    eye = np.eye(nb)
    for f in range(nb):
        left = cat.compose_vec(cat.ident[cat.dst[f]], eye[f])
        right = cat.compose_vec(eye[f], cat.ident[cat.src[f]])
        if np.max(np.abs(left - eye[f])) > tol:
            rep.add("identity", f"identity of {cat.objects[cat.dst[f]]} is not a left unit on {cat.name(f)}")
        if np.max(np.abs(right - eye[f])) > tol:
            rep.add("identity", f"identity of {cat.objects[cat.src[f]]} is not a right unit on {cat.name(f)}")

    for h, g, f in itertools.product(range(nb), repeat=3):
        if cat.src[h] != cat.dst[g] or cat.src[g] != cat.dst[f]:
            continue
        lhs = cat.comp[:, f, :].T @ cat.comp[h, g]   # (h o g) o f
        rhs = cat.comp[h, :, :].T @ cat.comp[g, f]   # h o (g o f)
        if np.max(np.abs(lhs - rhs)) > tol:
            rep.add("associativity",
                    f"triple ({cat.name(h)}, {cat.name(g)}, {cat.name(f)}): "
                    f"({cat.name(h)} o {cat.name(g)}) o {cat.name(f)} != "
                    f"{cat.name(h)} o ({cat.name(g)} o {cat.name(f)})")
    return rep


def compose(cat: LinCat, g, f) -> Dict[str, complex]:
    """Bilinear composite ``g o f`` of linear combinations; zero terms dropped."""
    out = cat.compose_vec(cat.vector(g), cat.vector(f))
    return cat.lincomb(out)


def unitalize(cat: LinCat) -> LinCat:
    """Adjoin a strict unit ``1_X`` to every endomorphism space."""
    taken = set(cat.mor_index)
    units = {}
    for x in cat.objects:
        name = f"1_{x}"
        while name in taken:
            name += "'"
        taken.add(name)
        units[x] = name

    morphisms = list(cat.morphisms) + [Morphism(units[x], x, x) for x in cat.objects]
    table = dict(cat.compose_table)
    for x, u in units.items():
        table[(u, u)] = {u: 1.0}
        for m in cat.morphisms:
            if m.dst == x:
                table[(u, m.name)] = {m.name: 1.0}
            if m.src == x:
                table[(m.name, u)] = {m.name: 1.0}
    identities = {x: {u: 1.0} for x, u in units.items()}
    return LinCat(cat.objects, morphisms, table, identities, chain_cap=cat.chain_cap)


def count_chains(cat: LinCat, n: int) -> int:
    """Exact number of cyclic chains of degree ``n`` (trace of a transfer matrix power)."""
    k = len(cat.objects)
    trans = [[0] * k for _ in range(k)]
    for s, d in zip(cat.src, cat.dst):
        trans[d][s] += 1
    power = [[int(i == j) for j in range(k)] for i in range(k)]
    for _ in range(n + 1):
        power = [[sum(power[i][l] * trans[l][j] for l in range(k)) for j in range(k)]
                 for i in range(k)]
    return sum(power[i][i] for i in range(k))


def enumerate_chains(cat: LinCat, n: int, cap: Optional[int] = None) -> ChainBasis:
    """Cyclically composable tuples of basis morphisms, lexicographically ordered."""
    if n < 0:
        raise ValueError("chain degree must be non-negative")
    cap = cat.chain_cap if cap is None else cap
    total = count_chains(cat, n)
    if total > cap:
        raise CombinatorialBlowup(f"degree {n} has {total} chains, above the cap {cap}")

    def build():
        chains: List[Tuple[int, ...]] = []
        src, dst, into = cat.src, cat.dst, cat.into

        def extend(prefix, remaining):
            last = prefix[-1]
            if remaining == 0:
                if src[last] == dst[prefix[0]]:
                    chains.append(tuple(prefix))
                return
            for nxt in into[src[last]]:
                prefix.append(nxt)
                extend(prefix, remaining - 1)
                prefix.pop()

        for f0 in range(cat.nbasis):
            extend([f0], n)
        return ChainBasis(n, tuple(chains), {c: i for i, c in enumerate(chains)})

    return cat.cached(("chains", n), build)


def chain_spine(cat: LinCat, chain: Sequence[int]) -> Tuple[str, ...]:
    """Objects ``(X0, ..., Xn)`` with ``fi: X_{i+1} -> X_i``."""
    return tuple(cat.objects[cat.dst[f]] for f in chain)
