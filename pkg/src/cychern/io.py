"""JSON loading and emission for categories, modules, families and cochains.

Complex numbers are ``[re, im]`` pairs and matrices are lists of rows of
such pairs. Emitted files use sorted keys so that goldens diff cleanly.
Module and family files name their category by a path relative to the file.
"""
from __future__ import annotations

import json
import os
from typing import Any, Optional

import numpy as np

from .cochain import Cochain
from .fredholm import EvenModule, OddModule
from .homotopy import HomotopyFamily
from .lincat import LinCat, enumerate_chains

KINDS = ("category", "module", "family", "cochain")


class ParseError(ValueError):
    """Malformed input file; the message names the file and the field."""


# -- primitives --------------------------------------------------------------------

def _fail(where: str, msg: str):
    raise ParseError(f"{where}: {msg}")


def parse_complex(v, where: str) -> complex:
    if (isinstance(v, (list, tuple)) and len(v) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)):
        return complex(v[0], v[1])
    _fail(where, f"expected a complex number as [re, im], got {json.dumps(v)[:40]}")


def parse_matrix(v, where: str) -> np.ndarray:
    if not isinstance(v, list) or not v or not all(isinstance(r, list) for r in v):
        _fail(where, "expected a matrix as a non-empty list of rows")
    width = len(v[0])
    rows = []
    for i, row in enumerate(v):
        if len(row) != width:
            _fail(where, f"row {i} has {len(row)} entries, expected {width}")
        rows.append([parse_complex(x, f"{where}[{i}][{j}]") for j, x in enumerate(row)])
    return np.array(rows, dtype=complex)


def complex_out(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def matrix_out(m) -> list:
    return [[complex_out(x) for x in row] for row in np.asarray(m)]


def _require(data: dict, key: str, where: str, kind=None):
    if not isinstance(data, dict) or key not in data:
        _fail(where, f"missing field {key!r}")
    val = data[key]
    if kind is not None and not isinstance(val, kind):
        _fail(f"{where}.{key}", f"expected {getattr(kind, '__name__', kind)}")
    return val


def read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ParseError(f"{path}: file not found") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(obj, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


def _resolve(base_file: Optional[str], ref: str) -> str:
    if os.path.isabs(ref) or base_file is None:
        return ref
    return os.path.join(os.path.dirname(os.path.abspath(base_file)), ref)


# -- categories --------------------------------------------------------------------

def category_from_dict(data, where: str = "category", cap: Optional[int] = None) -> LinCat:
    _require(data, "objects", where, list)
    morphisms = _require(data, "morphisms", where, list)
    for i, m in enumerate(morphisms):
        for key in ("name", "src", "dst"):
            _require(m, key, f"{where}.morphisms[{i}]", str)
    for i, c in enumerate(data.get("compose", [])):
        w = f"{where}.compose[{i}]"
        _require(c, "g", w, str)
        _require(c, "f", w, str)
        for j, t in enumerate(_require(c, "result", w, list)):
            _require(t, "mor", f"{w}.result[{j}]", str)
            parse_complex(_require(t, "coeff", f"{w}.result[{j}]"), f"{w}.result[{j}].coeff")
    idents = data.get("identities", {})
    if not isinstance(idents, dict):
        _fail(f"{where}.identities", "expected an object keyed by object name")
    for x, terms in idents.items():
        for j, t in enumerate(terms):
            _require(t, "mor", f"{where}.identities.{x}[{j}]", str)
            parse_complex(_require(t, "coeff", f"{where}.identities.{x}[{j}]"),
                          f"{where}.identities.{x}[{j}].coeff")
    try:
        cat = LinCat.from_dict(data)
    except (KeyError, ValueError, TypeError) as exc:
        _fail(where, str(exc))
    return cat.with_cap(cap) if cap else cat


def load_category(path: str, cap: Optional[int] = None) -> LinCat:
    return category_from_dict(read_json(path), path, cap)


def category_to_dict(cat: LinCat) -> dict:
    return cat.to_dict()


# -- modules -------------------------------------------------------------------

def module_from_dict(data, where: str = "module", cat: Optional[LinCat] = None,
                     base_file: Optional[str] = None, cap: Optional[int] = None):
    if cat is None:
        cat = load_category(_resolve(base_file, _require(data, "category", where, str)), cap)
    kind = _require(data, "kind", where, str)
    if kind not in ("even", "odd"):
        _fail(f"{where}.kind", f"expected 'even' or 'odd', got {kind!r}")
    dims = {}
    for x, d in _require(data, "dims", where, dict).items():
        w = f"{where}.dims.{x}"
        if kind == "even":
            dims[x] = (_require(d, "plus", w, int), _require(d, "minus", w, int))
        else:
            dims[x] = _require(d, "dim", w, int)
    F = {x: parse_matrix(m, f"{where}.F.{x}") for x, m in _require(data, "F", where, dict).items()}
    H = {f: parse_matrix(m, f"{where}.H.{f}") for f, m in _require(data, "H", where, dict).items()}
    cls = EvenModule if kind == "even" else OddModule
    try:
        return cls(cat, dims, F, H)
    except (KeyError, ValueError) as exc:
        _fail(where, str(exc).strip("'\""))


def load_module(path: str, cap: Optional[int] = None):
    return module_from_dict(read_json(path), path, base_file=path, cap=cap)


def module_to_dict(mod, category_path: str) -> dict:
    cat = mod.cat
    even = isinstance(mod, EvenModule)
    dims = {}
    for i, x in enumerate(cat.objects):
        dims[x] = ({"plus": mod.dims[i].d_plus, "minus": mod.dims[i].d_minus} if even
                   else {"dim": mod.size[i]})
    return {
        "category": category_path,
        "kind": "even" if even else "odd",
        "dims": dims,
        "F": {x: matrix_out(mod.F[i]) for i, x in enumerate(cat.objects)},
        "H": {cat.name(k): matrix_out(mod.H[k]) for k in range(cat.nbasis)},
    }


# -- families ------------------------------------------------------------------

def family_from_dict(data, where: str = "family", cat: Optional[LinCat] = None,
                     base_file: Optional[str] = None, cap: Optional[int] = None) -> HomotopyFamily:
    if cat is None:
        cat = load_category(_resolve(base_file, _require(data, "category", where, str)), cap)
    dims = {}
    for x, d in _require(data, "dims", where, dict).items():
        dims[x] = d if isinstance(d, int) else _require(d, "dim", f"{where}.dims.{x}", int)
    grid = _require(data, "grid", where, list)
    samples = _require(data, "samples", where, list)
    if len(samples) != len(grid):
        _fail(f"{where}.samples", f"{len(samples)} samples for {len(grid)} grid points")
    blocks = []
    for k, s in enumerate(samples):
        w = f"{where}.samples[{k}]"
        t = _require(s, "t", w)
        if abs(float(t) - float(grid[k])) > 1e-12:
            _fail(f"{w}.t", f"sample time {t} does not match grid point {grid[k]}")
        entry = {}
        for f, m in _require(s, "H", w, dict).items():
            if isinstance(m, dict):
                entry[f] = (parse_matrix(_require(m, "plus", f"{w}.H.{f}"), f"{w}.H.{f}.plus"),
                            parse_matrix(_require(m, "minus", f"{w}.H.{f}"), f"{w}.H.{f}.minus"))
            else:
                entry[f] = parse_matrix(m, f"{w}.H.{f}")
        blocks.append(entry)

    def per_sample(key):
        if key not in data:
            return None
        out = [dict() for _ in grid]
        for x, mats in _require(data, key, where, dict).items():
            if not isinstance(mats, list) or len(mats) != len(grid):
                _fail(f"{where}.{key}.{x}", "expected one matrix per grid sample")
            for k, m in enumerate(mats):
                out[k][x] = parse_matrix(m, f"{where}.{key}.{x}[{k}]")
        return out

    try:
        return HomotopyFamily(cat, dims, grid, blocks, data.get("breakpoints", []),
                              per_sample("Q"), per_sample("P"))
    except (KeyError, ValueError) as exc:
        _fail(where, str(exc).strip("'\""))


def load_family(path: str, cap: Optional[int] = None) -> HomotopyFamily:
    return family_from_dict(read_json(path), path, base_file=path, cap=cap)


def family_to_dict(fam: HomotopyFamily, category_path: str) -> dict:
    """Emit with baked (conjugated) full matrices and no Q/P."""
    cat = fam.cat
    return {
        "category": category_path,
        "dims": {x: {"dim": fam.base[i]} for i, x in enumerate(cat.objects)},
        "grid": fam.grid.tolist(),
        "breakpoints": list(fam.breakpoints),
        "samples": [{"t": float(t), "H": {cat.name(i): matrix_out(m) for i, m in enumerate(H)}}
                    for t, H in zip(fam.grid, fam.H)],
    }


# -- cochains ------------------------------------------------------------------

def cochain_from_dict(data, cat: Optional[LinCat] = None, where: str = "cochain",
                      base_file: Optional[str] = None) -> Cochain:
    if cat is None:
        if "category" not in data:
            _fail(where, "no category given (field 'category' or --category)")
        cat = load_category(_resolve(base_file, data["category"]))
    n = _require(data, "degree", where, int)
    raw = _require(data, "values", where, list)
    values = np.array([parse_complex(v, f"{where}.values[{i}]") for i, v in enumerate(raw)],
                      dtype=complex)
    basis = enumerate_chains(cat, n)
    if values.size != len(basis):
        _fail(f"{where}.values", f"degree {n} needs {len(basis)} values, got {values.size}")
    if "chains" in data:
        expected = [list(cat.chain_names(c)) for c in basis.chains]
        if data["chains"] != expected:
            _fail(f"{where}.chains", "chain labels disagree with the category's chain order")
    return Cochain(cat, n, values)


def load_cochain(path: str, cat: Optional[LinCat] = None) -> Cochain:
    return cochain_from_dict(read_json(path), cat, path, base_file=path)


def cochain_to_dict(c: Cochain, chains: bool = True, category_path: Optional[str] = None) -> dict:
    out = {"degree": c.degree, "values": [complex_out(v) for v in c.values]}
    if chains:
        out["chains"] = [list(c.cat.chain_names(ch)) for ch in c.basis.chains]
    if category_path:
        out["category"] = category_path
    return out


# -- dispatch ------------------------------------------------------------------

def detect_kind(data) -> str:
    if isinstance(data, dict):
        if "objects" in data and "morphisms" in data:
            return "category"
        if "kind" in data and "F" in data:
            return "module"
        if "grid" in data and "samples" in data:
            return "family"
        if "degree" in data and "values" in data:
            return "cochain"
    raise ParseError("cannot tell which kind of file this is")


def load(path: str, kind: Optional[str] = None, cap: Optional[int] = None,
         cat: Optional[LinCat] = None):
    """Load ``path`` as ``kind`` (detected from the content when omitted)."""
    data = read_json(path)
    try:
        kind = kind or detect_kind(data)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None
    if kind == "category":
        return category_from_dict(data, path, cap)
    if kind == "module":
        return module_from_dict(data, path, cat=cat, base_file=path, cap=cap)
    if kind == "family":
        return family_from_dict(data, path, cat=cat, base_file=path, cap=cap)
    if kind == "cochain":
        return cochain_from_dict(data, cat, path, base_file=path)
    raise ParseError(f"unknown kind {kind!r}; expected one of {KINDS}")
