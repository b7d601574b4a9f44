"""The cochain complex CN^n of a linear category and its cyclic operators.

A cochain of degree ``n`` is a complex vector indexed by
``enumerate_chains(cat, n)``. Each operator is materialised once per
(category, degree) as a dense matrix acting on such vectors.

Conventions (chain ``(f0, ..., fn)`` with ``fi: X_{i+1} -> X_i``)::

    (b phi)(f0..f_{n+1})  = sum_{i=0}^{n} (-1)^i phi(.., fi f_{i+1}, ..)
                            + (-1)^{n+1} phi(f_{n+1} f0, f1, .., fn)
    (b' phi)              = the same sum without the last (wrap-around) face
    (tau phi)(f0..fn)     = phi(fn, f0, .., f_{n-1}),   lambda = (-1)^n tau
    A                     = 1 + lambda + ... + lambda^n
    (B0 phi)(f0..fn)      = phi(id_{X0}, f0, .., fn) - (-1)^{n+1} phi(f0, .., fn, id_{X0})
    B                     = A B0
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from .lincat import LinCat, enumerate_chains

MEMBER_TOL = 1e-8


class NotCyclicError(ValueError):
    """Raised when an operation needs a cyclic (cocycle) input."""


@dataclass
class Cochain:
    cat: LinCat
    degree: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        size = len(enumerate_chains(self.cat, self.degree))
        if self.values.shape != (size,):
            raise ValueError(f"degree {self.degree} cochain needs {size} values, "
                             f"got shape {self.values.shape}")

    @classmethod
    def zeros(cls, cat: LinCat, n: int) -> "Cochain":
        return cls(cat, n, np.zeros(len(enumerate_chains(cat, n)), dtype=complex))

    @classmethod
    def random(cls, cat: LinCat, n: int, rng: np.random.Generator) -> "Cochain":
        size = len(enumerate_chains(cat, n))
        return cls(cat, n, rng.standard_normal(size) + 1j * rng.standard_normal(size))

    @property
    def basis(self):
        return enumerate_chains(self.cat, self.degree)

    def __call__(self, *names: str) -> complex:
        key = self.cat.chain_from_names(names)
        return complex(self.values[self.basis.index[key]])

    def items(self):
        """``(chain names, value)`` pairs in basis order."""
        for chain, v in zip(self.basis.chains, self.values):
            yield self.cat.chain_names(chain), complex(v)

    def norm(self) -> float:
        return float(np.max(np.abs(self.values), initial=0.0))

    def _like(self, values) -> "Cochain":
        return Cochain(self.cat, self.degree, values)

    def _check(self, other: "Cochain"):
        if other.cat is not self.cat or other.degree != self.degree:
            raise ValueError("cochains live in different spaces")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        return self._like(self.values + other.values)

    def __sub__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        return self._like(self.values - other.values)

    def __neg__(self) -> "Cochain":
        return self._like(-self.values)

    def __mul__(self, c) -> "Cochain":
        return self._like(complex(c) * self.values)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "Cochain":
        return self._like(self.values / complex(c))

    def __repr__(self) -> str:
        return f"Cochain(degree={self.degree}, size={self.values.size}, max={self.norm():.3g})"


# -- operator matrices ----------------------------------------------------------

def _face_matrix(cat: LinCat, n: int, wrap: bool) -> np.ndarray:
    src_basis = enumerate_chains(cat, n)
    dst_basis = enumerate_chains(cat, n + 1)
    M = np.zeros((len(dst_basis), len(src_basis)), dtype=complex)
    for r, c in enumerate(dst_basis.chains):
        for i in range(n + 1):
            merged = cat.compose_idx(c[i], c[i + 1])
            sign = -1.0 if i % 2 else 1.0
            for k in np.flatnonzero(merged):
                M[r, src_basis.index[c[:i] + (k,) + c[i + 2:]]] += sign * merged[k]
        if wrap:
            merged = cat.compose_idx(c[n + 1], c[0])
            sign = -1.0 if (n + 1) % 2 else 1.0
            for k in np.flatnonzero(merged):
                M[r, src_basis.index[(k,) + c[1:n + 1]]] += sign * merged[k]
    return M


def b_matrix(cat: LinCat, n: int) -> np.ndarray:
    """Hochschild coboundary ``C^n -> C^{n+1}``."""
    return cat.cached(("b", n), lambda: _face_matrix(cat, n, wrap=True))


def bprime_matrix(cat: LinCat, n: int) -> np.ndarray:
    return cat.cached(("b'", n), lambda: _face_matrix(cat, n, wrap=False))


def tau_matrix(cat: LinCat, n: int) -> np.ndarray:
    def build():
        basis = enumerate_chains(cat, n)
        M = np.zeros((len(basis), len(basis)), dtype=complex)
        for r, c in enumerate(basis.chains):
            M[r, basis.index[(c[-1],) + c[:-1]]] = 1.0
        return M
    return cat.cached(("tau", n), build)


def lambda_matrix(cat: LinCat, n: int) -> np.ndarray:
    return (-1.0) ** n * tau_matrix(cat, n)


def A_matrix(cat: LinCat, n: int) -> np.ndarray:
    def build():
        lam = lambda_matrix(cat, n)
        acc = np.eye(lam.shape[0], dtype=complex)
        power = acc
        for _ in range(n):
            power = lam @ power
            acc = acc + power
        return acc
    return cat.cached(("A", n), build)


def B0_matrix(cat: LinCat, n: int) -> np.ndarray:
    """``B0: C^n -> C^{n-1}`` for ``n >= 1``."""
    if n < 1:
        raise ValueError("B0 lowers degree and needs n >= 1")

    def build():
        src_basis = enumerate_chains(cat, n)
        dst_basis = enumerate_chains(cat, n - 1)
        M = np.zeros((len(dst_basis), len(src_basis)), dtype=complex)
        back_sign = -((-1.0) ** n)      # -(-1)^{(n-1)+1}
        for r, c in enumerate(dst_basis.chains):
            ident = cat.identity_vec(cat.dst[c[0]])
            for k in np.flatnonzero(ident):
                M[r, src_basis.index[(k,) + c]] += ident[k]
                M[r, src_basis.index[c + (k,)]] += back_sign * ident[k]
        return M
    return cat.cached(("B0", n), build)


def B_matrix(cat: LinCat, n: int) -> np.ndarray:
    """``B = A B0: C^n -> C^{n-1}``."""
    return cat.cached(("B", n), lambda: A_matrix(cat, n - 1) @ B0_matrix(cat, n))


def cyclic_basis(cat: LinCat, n: int) -> np.ndarray:
    """Orthonormal columns spanning ``Ker(1 - lambda)`` in degree ``n``."""
    def build():
        lam = lambda_matrix(cat, n)
        return scipy.linalg.null_space(np.eye(lam.shape[0]) - lam, rcond=1e-10)
    return cat.cached(("cyclic", n), build)


# -- operators on cochains ---------------------------------------------------------

def hochschild_b(phi: Cochain) -> Cochain:
    return Cochain(phi.cat, phi.degree + 1, b_matrix(phi.cat, phi.degree) @ phi.values)


def hochschild_bprime(phi: Cochain) -> Cochain:
    return Cochain(phi.cat, phi.degree + 1, bprime_matrix(phi.cat, phi.degree) @ phi.values)


def cyclic_ops(phi: Cochain) -> Tuple[Cochain, Cochain]:
    """``(tau phi, lambda phi)``."""
    tau = tau_matrix(phi.cat, phi.degree) @ phi.values
    return phi._like(tau), phi._like((-1.0) ** phi.degree * tau)


def op_A(phi: Cochain) -> Cochain:
    return phi._like(A_matrix(phi.cat, phi.degree) @ phi.values)


def op_B0(phi: Cochain) -> Cochain:
    return Cochain(phi.cat, phi.degree - 1, B0_matrix(phi.cat, phi.degree) @ phi.values)


def op_B(phi: Cochain) -> Cochain:
    return Cochain(phi.cat, phi.degree - 1, B_matrix(phi.cat, phi.degree) @ phi.values)


@dataclass
class CocycleCheck:
    cyclic: bool
    cocycle: bool
    cyclic_residual: float
    cocycle_residual: float
    tolerance: float

    def __iter__(self):
        return iter((self.cyclic, self.cocycle, (self.cyclic_residual, self.cocycle_residual)))

    @property
    def ok(self) -> bool:
        return self.cyclic and self.cocycle


def is_cyclic_cocycle(phi: Cochain, tol: Optional[float] = None) -> CocycleCheck:
    """Cyclicity ``(1 - lambda) phi = 0`` and closedness ``b phi = 0`` in sup norm.

    The default tolerance is ``1e-10 * (1 + |phi|_inf)``.
    """
    tol = 1e-10 * (1.0 + phi.norm()) if tol is None else tol
    _, lam = cyclic_ops(phi)
    cyc = (phi - lam).norm()
    coc = hochschild_b(phi).norm()
    return CocycleCheck(cyc <= tol, coc <= tol, cyc, coc, tol)


@dataclass
class ClassSolution:
    member: bool
    witness: Cochain
    residual: float
    worst_chain: Optional[Tuple[str, ...]] = None
    note: str = ""


def class_solve(target: Cochain, tol: float = MEMBER_TOL,
                scale: Optional[float] = None) -> ClassSolution:
    """Decide whether ``target`` lies in ``b(Ker(1 - lambda))`` by least squares.

    Returns the cyclic witness ``w`` of degree ``n - 1`` minimising
    ``|b w - target|`` and the residual relative to ``scale`` (default
    ``|target|``). Pass the size of the inputs as ``scale`` when the target
    is a difference of nearly equal cochains.
    """
    n, cat = target.degree, target.cat
    if n < 1:
        raise ValueError("class_solve needs degree >= 1")
    K = cyclic_basis(cat, n - 1)
    tnorm = float(np.linalg.norm(target.values))
    if tnorm == 0.0:
        return ClassSolution(True, Cochain.zeros(cat, n - 1), 0.0)
    scale = max(tnorm, scale or 0.0)
    if K.shape[1] == 0:
        note = f"cyclic subspace in degree {n - 1} is zero-dimensional"
        worst = int(np.argmax(np.abs(target.values)))
        return ClassSolution(tnorm / scale <= tol, Cochain.zeros(cat, n - 1), tnorm / scale,
                             cat.chain_names(target.basis.chains[worst]), note)
    M = b_matrix(cat, n - 1) @ K
    coeffs, *_ = np.linalg.lstsq(M, target.values, rcond=None)
    diff = M @ coeffs - target.values
    rel = float(np.linalg.norm(diff) / scale)
    worst = int(np.argmax(np.abs(diff)))
    note = f"cyclic subspace dim {K.shape[1]}, target space dim {target.values.size}"
    return ClassSolution(rel <= tol, Cochain(cat, n - 1, K @ coeffs), rel,
                         cat.chain_names(target.basis.chains[worst]), note)


def _rank(M: np.ndarray, rtol: float = 1e-10) -> int:
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > rtol * max(1.0, s[0])))


def cyclic_cohomology_dims(cat: LinCat, nmax: int) -> list:
    """``dim H^n_lambda = dim Z^n_lambda - dim B^n_lambda`` for ``n = 0..nmax``."""
    dims = []
    for n in range(nmax + 1):
        K = cyclic_basis(cat, n)
        z = K.shape[1] - _rank(b_matrix(cat, n) @ K)
        bdim = _rank(b_matrix(cat, n - 1) @ cyclic_basis(cat, n - 1)) if n > 0 else 0
        dims.append(z - bdim)
    return dims


def eta_vector(cat: LinCat) -> np.ndarray:
    """Functional with value 1 on every identity and 0 off the diagonal.

    On an identity ``sum_k c_k e_k`` it takes ``eta(e_k) = conj(c_k) / |c|^2``.
    """
    eta = np.zeros(cat.nbasis, dtype=complex)
    for x in range(len(cat.objects)):
        c = cat.ident[x]
        eta += c.conj() / np.vdot(c, c).real
    return eta


def preimage_under_B(phi: Cochain, tol: Optional[float] = None) -> Cochain:
    """A cochain ``psi`` of degree ``n + 1`` with ``B psi = 2 (n + 1) phi``.

    ``phi`` must be cyclic.
    """
    check = is_cyclic_cocycle(phi, tol)
    if not check.cyclic:
        raise NotCyclicError(f"preimage_under_B needs a cyclic cochain "
                             f"(residual {check.cyclic_residual:.2e})")
    cat, n = phi.cat, phi.degree
    eta = eta_vector(cat)
    low = enumerate_chains(cat, n)
    high = enumerate_chains(cat, n + 1)
    sign = (-1.0) ** n
    out = np.zeros(len(high), dtype=complex)
    for r, c in enumerate(high.chains):
        e0, e1 = eta[c[0]], eta[c[-1]]
        val = 0j
        if e0:
            val += e0 * phi.values[low.index[c[1:]]]
        if e1:
            val += sign * phi.values[low.index[c[:-1]]] * e1
        if e0 and e1:
            ident = cat.identity_vec(cat.src[c[0]])
            inner = sum(ident[k] * phi.values[low.index[(k,) + c[1:-1]]]
                        for k in np.flatnonzero(ident))
            val -= sign * e0 * inner * e1
        out[r] = val
    return Cochain(cat, n + 1, out)


def random_cyclic(cat: LinCat, n: int, rng: np.random.Generator) -> Cochain:
    K = cyclic_basis(cat, n)
    c = rng.standard_normal(K.shape[1]) + 1j * rng.standard_normal(K.shape[1])
    return Cochain(cat, n, K @ c)


def nullspace_sample(M: np.ndarray, rng: np.random.Generator, rcond: float = 1e-10) -> np.ndarray:
    N = scipy.linalg.null_space(M, rcond=rcond)
    c = rng.standard_normal(N.shape[1]) + 1j * rng.standard_normal(N.shape[1])
    return N @ c


def random_cyclic_cocycle(cat: LinCat, n: int, rng: np.random.Generator) -> Cochain:
    """Random element of ``Ker(b) & Ker(1 - lambda)`` in degree ``n``."""
    lam = lambda_matrix(cat, n)
    stacked = np.vstack([np.eye(lam.shape[0]) - lam, b_matrix(cat, n)])
    return Cochain(cat, n, nullspace_sample(stacked, rng))


def from_function(cat: LinCat, n: int, fn) -> Cochain:
    """Cochain with values ``fn(chain names)`` on the degree-``n`` basis."""
    basis = enumerate_chains(cat, n)
    return Cochain(cat, n, np.array([fn(cat.chain_names(c)) for c in basis.chains], dtype=complex))
