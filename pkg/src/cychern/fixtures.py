"""Small categories, Fredholm modules and homotopy families used throughout
the tests, demos and acceptance suite.

FIX_PT    the category C: one object, basis {1}.
FIX_DUAL  one object, basis {1, x} with x o x = 0.
FIX_NIL   objects X, Y; basis {id_X, id_Y, u: X->Y, v: Y->X, e: Y->Y},
          u o v = e and every other product of u, v, e vanishes.
FIX_PROJ  one object, orthogonal idempotents p, q with identity p + q.
FIX_M2    one object, 2x2 matrix units E11, E12, E21, E22.
"""
from __future__ import annotations

import numpy as np

from .lincat import LinCat


def _with_units(objects, morphisms, table, identities):
    """Fill in composites with a literal identity basis element."""
    table = dict(table)
    for x, idname in identities.items():
        for name, src, dst in morphisms:
            if dst == x:
                table[(idname, name)] = {name: 1.0}
            if src == x:
                table[(name, idname)] = {name: 1.0}
    return LinCat(objects, morphisms, table, {x: {n: 1.0} for x, n in identities.items()})


def fix_pt() -> LinCat:
    return LinCat(["*"], [("1", "*", "*")], {("1", "1"): {"1": 1.0}}, {"*": {"1": 1.0}})


def fix_dual() -> LinCat:
    return _with_units(["*"], [("1", "*", "*"), ("x", "*", "*")], {}, {"*": "1"})


def fix_nil() -> LinCat:
    morphisms = [("id_X", "X", "X"), ("id_Y", "Y", "Y"),
                 ("u", "X", "Y"), ("v", "Y", "X"), ("e", "Y", "Y")]
    return _with_units(["X", "Y"], morphisms, {("u", "v"): {"e": 1.0}},
                       {"X": "id_X", "Y": "id_Y"})


def fix_proj() -> LinCat:
    table = {("p", "p"): {"p": 1.0}, ("q", "q"): {"q": 1.0}}
    return LinCat(["*"], [("p", "*", "*"), ("q", "*", "*")], table,
                  {"*": {"p": 1.0, "q": 1.0}})


M2_NAMES = ("E11", "E12", "E21", "E22")


def fix_m2() -> LinCat:
    table = {}
    for a in "12":
        for b in "12":
            for c in "12":
                # E_ab o E_bc = E_ac
                table[(f"E{a}{b}", f"E{b}{c}")] = {f"E{a}{c}": 1.0}
    return LinCat(["*"], [(n, "*", "*") for n in M2_NAMES], table,
                  {"*": {"E11": 1.0, "E22": 1.0}})


def matrix_unit(i: int, j: int, n: int = 2) -> np.ndarray:
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1.0
    return m


def m2_standard_rep() -> dict:
    return {f"E{i + 1}{j + 1}": matrix_unit(i, j) for i in range(2) for j in range(2)}


def swap(d: int) -> np.ndarray:
    z, e = np.zeros((d, d)), np.eye(d)
    return np.block([[z, e], [e, z]]).astype(complex)


def block_diag(a, b) -> np.ndarray:
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    out = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]), dtype=complex)
    out[:a.shape[0], :a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


def proj_even_module():
    """FIX_PROJ on C^2 (+) C^2: H(p) = diag(E11, 0), H(q) = diag(E22, I), F = swap."""
    from .fredholm import EvenModule

    e11, e22, zero, eye = matrix_unit(0, 0), matrix_unit(1, 1), np.zeros((2, 2)), np.eye(2)
    return EvenModule(fix_proj(), {"*": (2, 2)}, {"*": swap(2)},
                      {"p": block_diag(e11, zero), "q": block_diag(e22, eye)})


def m2_even_module():
    """FIX_M2 with the standard representation on the even half and its
    conjugate by diag(1, 2) on the odd half."""
    from .fredholm import EvenModule

    s = np.diag([1.0, 2.0]).astype(complex)
    s_inv = np.linalg.inv(s)
    rep = m2_standard_rep()
    H = {k: block_diag(v, s @ v @ s_inv) for k, v in rep.items()}
    return EvenModule(fix_m2(), {"*": (2, 2)}, {"*": swap(2)}, H)


def m2_odd_module():
    """FIX_M2ODD: standard representation on C^2 with F = diag(1, -1)."""
    from .fredholm import OddModule

    return OddModule(fix_m2(), {"*": 2}, {"*": np.diag([1.0, -1.0]).astype(complex)},
                     m2_standard_rep())


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rotation_family(samples: int = 65, minus_angle: float = 0.0):
    """FIX_PROJ doubled module with the even projection rotated by pi*t/2.

    With ``minus_angle`` non-zero the odd-side projection also turns, by
    ``minus_angle * t``, which makes the characters vary along the path
    while their class stays fixed. With the default it stays at
    rho^-(p) = 0, rho^-(q) = I.
    """
    from .homotopy import HomotopyFamily

    grid = np.linspace(0.0, 1.0, samples)
    e11, eye = matrix_unit(0, 0), np.eye(2, dtype=complex)
    blocks = []
    for t in grid:
        r = rotation(np.pi * t / 2)
        plus_p = r @ e11 @ r.conj().T
        if minus_angle:
            s = rotation(minus_angle * t)
            minus_p = s @ e11 @ s.conj().T
        else:
            minus_p = np.zeros((2, 2), dtype=complex)
        blocks.append({"p": (plus_p, minus_p), "q": (eye - plus_p, eye - minus_p)})
    return HomotopyFamily(fix_proj(), {"*": 2}, grid, blocks)


CATEGORIES = {
    "pt": fix_pt,
    "dual": fix_dual,
    "nil": fix_nil,
    "proj": fix_proj,
    "m2": fix_m2,
}


def fixture_documents() -> dict:
    """JSON documents for the shipped data files, keyed by file name."""
    from . import io

    docs = {f"{name}.category.json": io.category_to_dict(build())
            for name, build in CATEGORIES.items()}
    docs["proj_even.module.json"] = io.module_to_dict(proj_even_module(), "proj.category.json")
    docs["m2_even.module.json"] = io.module_to_dict(m2_even_module(), "m2.category.json")
    docs["m2_odd.module.json"] = io.module_to_dict(m2_odd_module(), "m2.category.json")
    docs["rotation.family.json"] = io.family_to_dict(rotation_family(), "proj.category.json")
    return docs


def data_path(name: str = "") -> str:
    """Path of a shipped data file (or of the data directory)."""
    import os

    return os.path.join(os.path.dirname(os.path.abspath(__file__)), "data", name)
