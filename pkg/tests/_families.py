"""A FIX_NIL homotopy family with closed-form derivatives, used as an
independent oracle for the finite-difference machinery."""
import numpy as np

from cychern import fixtures as fx
from cychern.cochain import Cochain
from cychern.homotopy import HomotopyFamily
from cychern.lincat import enumerate_chains

DIMS = {"X": 1, "Y": 2}


def nil_sample(t):
    """(plus, minus) blocks with v o u = 0 on both sides, so H is a functor."""
    th = 0.7 * t
    a_p = np.array([[np.cos(th)], [np.sin(th)]])
    b_p = np.array([[-np.sin(th), np.cos(th)]]) * (1 + t)
    a_m = np.array([[1.0], [t]])
    b_m = np.array([[-t, 1.0]]) * np.exp(t)
    return {"id_X": (np.eye(1), np.eye(1)), "id_Y": (np.eye(2), np.eye(2)),
            "u": (a_p, a_m), "v": (b_p, b_m), "e": (a_p @ b_p, a_m @ b_m)}


def nil_derivative(t):
    th = 0.7 * t
    c, s = np.cos(th), np.sin(th)
    a_p, da_p = np.array([[c], [s]]), 0.7 * np.array([[-s], [c]])
    b0, db0 = np.array([[-s, c]]), 0.7 * np.array([[-c, -s]])
    b_p, db_p = b0 * (1 + t), db0 * (1 + t) + b0
    a_m, da_m = np.array([[1.0], [t]]), np.array([[0.0], [1.0]])
    b_m = np.array([[-t, 1.0]]) * np.exp(t)
    db_m = np.array([[-1.0 - t, 1.0]]) * np.exp(t)
    z1, z2 = np.zeros((1, 1)), np.zeros((2, 2))
    return {"id_X": (z1, z1), "id_Y": (z2, z2), "u": (da_p, da_m), "v": (db_p, db_m),
            "e": (da_p @ b_p + a_p @ db_p, da_m @ b_m + a_m @ db_m)}


def nil_family(samples=65):
    grid = np.linspace(0.0, 1.0, samples)
    return HomotopyFamily(fx.fix_nil(), DIMS, grid, [nil_sample(t) for t in grid])


def _double(pair):
    p, m = (np.asarray(x, dtype=complex) for x in pair)
    return np.block([[p, np.zeros((p.shape[0], m.shape[1]))],
                     [np.zeros((m.shape[0], p.shape[1])), m]])


def _swap(d):
    z, e = np.zeros((d, d)), np.eye(d)
    return np.block([[z, e], [e, z]])


def rotation_sample(t):
    r = fx.rotation(np.pi * t / 2)
    p = r @ fx.matrix_unit(0, 0) @ r.conj().T
    return {"p": (p, np.zeros((2, 2))), "q": (np.eye(2) - p, np.eye(2))}


def rotation_derivative(t):
    # d/dt R P0 R^T = (pi/2) (J P - P J) with J the rotation generator
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    p = rotation_sample(t)["p"][0]
    dp = np.pi / 2 * (J @ p - p @ J)
    return {"p": (dp, np.zeros((2, 2))), "q": (-dp, np.zeros((2, 2)))}


def psi_oracle(cat, t, m, sample=nil_sample, derivative=nil_derivative, dims=DIMS):
    """Transgression cochain from exact derivatives, evaluated densely."""
    H = {k: _double(v) for k, v in sample(t).items()}
    D = {k: _double(v) for k, v in derivative(t).items()}
    n = 2 * m + 1
    vals = []
    for chain in enumerate_chains(cat, n).chains:
        names = cat.chain_names(chain)
        total = 0j
        for j in range(1, n + 1):
            w = H[names[0]]
            for pos in range(1, n + 1):
                mor = cat.morphisms[chain[pos]]
                f = names[pos]
                if pos == j:
                    w = w @ D[f]
                else:
                    w = w @ (_swap(dims[mor.dst]) @ H[f] - H[f] @ _swap(dims[mor.src]))
            d = dims[cat.morphisms[chain[0]].dst]
            eps = np.diag(np.r_[np.ones(d), -np.ones(d)])
            total += (-1) ** (j - 1) * np.trace(eps @ w)
        vals.append(total)
    return Cochain(cat, n, np.array(vals))
