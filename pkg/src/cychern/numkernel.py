"""Dense complex matrix helpers: traces, singular values, Schatten norms and
graded commutators.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Every function
returns a fresh array and never mutates its inputs.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

SV_CLAMP = 1e-12


class DimensionError(ValueError):
    """Raised when matrix shapes do not fit together."""


def as_mat(m) -> np.ndarray:
    a = np.array(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


@dataclass(frozen=True)
class GradedDims:
    """Dimensions of the even and odd parts of a Z/2-graded space."""

    d_plus: int
    d_minus: int

    def __post_init__(self):
        if self.d_plus < 0 or self.d_minus < 0 or self.d_plus + self.d_minus < 1:
            raise ValueError(f"invalid graded dimensions {self.d_plus}|{self.d_minus}")

    @property
    def total(self) -> int:
        return self.d_plus + self.d_minus

    def grading(self) -> np.ndarray:
        return np.diag(np.r_[np.ones(self.d_plus), -np.ones(self.d_minus)]).astype(complex)


def trace(m) -> complex:
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"trace of non-square matrix with shape {a.shape}")
    return complex(np.trace(a))


def singular_values(m) -> np.ndarray:
    """Singular values in decreasing order, length ``min(rows, cols)``.

    Values below ``1e-12`` times the largest one are set to zero.
    """
    a = np.asarray(m, dtype=complex)
    if a.size == 0:
        return np.zeros(min(a.shape), dtype=float)
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] > 0:
        s[s < SV_CLAMP * s[0]] = 0.0
    return s


def singular_values_gram(m) -> np.ndarray:
    """Singular values from the eigenvalues of the smaller Gram matrix.

    Kept as an independent route for cross-checking :func:`singular_values`.
    """
    a = np.asarray(m, dtype=complex)
    g = a.conj().T @ a if a.shape[0] >= a.shape[1] else a @ a.conj().T
    ev = np.clip(np.linalg.eigvalsh(g), 0.0, None)[::-1]
    s = np.sqrt(ev)
    if s.size and s[0] > 0:
        s[s < SV_CLAMP * s[0]] = 0.0
    return s


def schatten_norm(m, p: float) -> float:
    """``(sum_n mu_n(m)**p) ** (1/p)`` for ``1 <= p < inf``."""
    if not p >= 1 or not np.isfinite(p):
        raise ValueError(f"Schatten exponent must lie in [1, inf), got {p}")
    s = singular_values(m)
    if not s.size or s[0] == 0:
        return 0.0
    # scale out the largest value to keep large p from overflowing
    top = s[0]
    return float(top * np.sum((s / top) ** p) ** (1.0 / p))


def graded_commutator(FX, FY, T, degT: int = 0, graded: bool = True) -> np.ndarray:
    """``FY @ T - (-1)**degT * T @ FX`` (graded) or ``FY @ T - T @ FX``.

    ``FX`` acts on the source of ``T`` and ``FY`` on its target.
    """
    FX, FY, T = np.asarray(FX), np.asarray(FY), np.asarray(T)
    if FX.shape != (T.shape[1], T.shape[1]) or FY.shape != (T.shape[0], T.shape[0]):
        raise DimensionError(
            f"commutator shapes do not match: FX {FX.shape}, FY {FY.shape}, T {T.shape}"
        )
    sign = -1.0 if (graded and degT % 2) else 1.0
    return FY @ T - sign * (T @ FX)


def worker_count() -> int:
    """Thread budget from ``CYCHERN_THREADS`` (default 1, i.e. serial)."""
    raw = os.environ.get("CYCHERN_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def pmap(fn, items) -> list:
    """``list(map(fn, items))``, spread over ``worker_count()`` threads."""
    items = list(items)
    n = worker_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
