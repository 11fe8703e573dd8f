"""Finite-dimensional realization of the dyadic resolvent identities:
the resolvent of a Hermitian matrix from its unitary evolution sampled at
dyadic times, the inverse of a positive matrix from its semigroup, and
fractional powers through the matrix polylogarithm.

All matrix functions go through one cached spectral decomposition; the
truncated-double-sum form of the resolvent is kept only as a small
demonstration of why those limits must not be interchanged.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import List, TextIO, Tuple

import numpy as np

from .dyadic import MAX_LEVELS, dyadic_reciprocal_partial, ramified_partial
from .scalar import DomainError

__all__ = [
    "HermitianOperator",
    "OperatorSeriesReport",
    "evolution",
    "resolvent_dyadic",
    "inverse_dyadic",
    "fractional_power_dyadic",
    "resolvent_double_sum",
    "read_matrix_text",
    "write_matrix_text",
]

MAX_DIM = 256
_HERM_TOL = 1e-12


@dataclass(frozen=True)
class HermitianOperator:
    """Dense self-adjoint matrix with its cached spectral decomposition."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @staticmethod
    def from_matrix(a: np.ndarray) -> "HermitianOperator":
        a = np.asarray(a, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError("operator must be a square matrix")
        n = a.shape[0]
        if n > MAX_DIM:
            raise DomainError(f"dimension capped at {MAX_DIM}")
        scale = np.abs(a).max() or 1.0
        if np.abs(a - a.conj().T).max() > _HERM_TOL * scale:
            raise DomainError("matrix is not Hermitian to working precision")
        w, v = np.linalg.eigh(a)
        return HermitianOperator(matrix=a, eigenvalues=w, eigenvectors=v)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply_scalar(self, f) -> np.ndarray:
        """V diag(f(lambda_j)) V^*, the spectral calculus for f."""
        fw = np.array([f(w) for w in self.eigenvalues], dtype=complex)
        return (self.eigenvectors * fw) @ self.eigenvectors.conj().T


@dataclass
class OperatorSeriesReport:
    """Partial sum plus the per-level error trace against a reference."""

    partial: np.ndarray
    K_used: int
    J_used: int
    error_curve: List[Tuple[int, float]] = field(default_factory=list)


def evolution(op: HermitianOperator, t: float) -> np.ndarray:
    """Unitary evolution e^{-i t A} via the spectral decomposition."""
    return op.apply_scalar(lambda w: cmath.exp(-1j * t * w))


def resolvent_dyadic(op: HermitianOperator, lam: float, K: int,
                     v: np.ndarray) -> Tuple[np.ndarray, OperatorSeriesReport]:
    """(A - i lam)^{-1} v via the dyadic evolution series

        i (1 - e^{-lam} U_1)^{-1} - i sum_{k=1}^{K} 2^{-k} (1 + e^{-lam/2^k} U_{2^-k})^{-1}

    applied to v; every inner inverse is a scalar function of A.  lam > 0
    (conjugate the identity for the other half plane).
    """
    if lam <= 0:
        raise DomainError("resolvent_dyadic requires lam > 0")
    if K < 0 or K > MAX_LEVELS:
        raise DomainError(f"level count must be in [0, {MAX_LEVELS}]")
    v = np.asarray(v, dtype=complex)
    ref = op.apply_scalar(lambda w: 1.0 / (w - 1j * lam)) @ v
    report = OperatorSeriesReport(partial=None, K_used=K, J_used=0)

    def phi(K_now: int):
        def f(w: float) -> complex:
            # scalar dyadic reciprocal at p = lam + i w
            return 1j * dyadic_reciprocal_partial(lam + 1j * w, K_now)
        return f

    for k in (list(range(0, K + 1, max(1, K // 8))) + [K]):
        approx = op.apply_scalar(phi(k)) @ v
        report.error_curve.append((k, float(np.linalg.norm(approx - ref))))
    partial = op.apply_scalar(phi(K)) @ v
    report.partial = partial
    return partial, report


def inverse_dyadic(op: HermitianOperator, K: int) -> Tuple[np.ndarray, OperatorSeriesReport]:
    """A^{-1} for positive definite A via the semigroup series

        (1 - T_1)^{-1} - sum_{k=1}^{K} 2^{-k} (1 + T_{1/2^k})^{-1},  T_t = e^{-tA}.
    """
    _require_positive(op)
    if K < 0 or K > MAX_LEVELS:
        raise DomainError(f"level count must be in [0, {MAX_LEVELS}]")
    ref = op.apply_scalar(lambda w: 1.0 / w)
    report = OperatorSeriesReport(partial=None, K_used=K, J_used=0)
    for k in range(K + 1):
        approx = op.apply_scalar(lambda w, kk=k: dyadic_reciprocal_partial(w, kk))
        report.error_curve.append((k, float(np.linalg.norm(approx - ref, ord=2))))
    partial = op.apply_scalar(lambda w: dyadic_reciprocal_partial(w, K))
    report.partial = partial
    return partial, report


def fractional_power_dyadic(op: HermitianOperator, s: float, K: int
                            ) -> Tuple[np.ndarray, OperatorSeriesReport]:
    """pi A^{s-1} for positive definite A, s < 1 non-integer, via

        Gamma(s) sin(pi s) [ Li_s(T_1) - sum_{k<=K} 2^{-k(1-s)} Li_s(-T_{1/2^k}) ]

    with the matrix polylogarithms applied spectrally.  The spectrum must
    sit inside (1e-3, 1e3) so every polylog argument stays usable.
    """
    _require_positive(op)
    w = op.eigenvalues
    if w.min() <= 1e-3 or w.max() >= 1e3:
        raise DomainError("fractional_power_dyadic needs the spectrum inside (1e-3, 1e3)")
    if s >= 1.0 or abs(s - round(s)) < 1e-12:
        raise DomainError("fractional_power_dyadic requires non-integer s < 1")
    if K < 0 or K > MAX_LEVELS:
        raise DomainError(f"level count must be in [0, {MAX_LEVELS}]")
    ref = op.apply_scalar(lambda t: math.pi * t ** (s - 1.0))
    report = OperatorSeriesReport(partial=None, K_used=K, J_used=0)
    for k in range(0, K + 1, max(1, K // 10)):
        approx = op.apply_scalar(lambda t, kk=k: math.pi * ramified_partial(s, t, kk))
        report.error_curve.append(
            (k, float(np.linalg.norm(approx - ref, "fro") / np.linalg.norm(ref, "fro")))
        )
    partial = op.apply_scalar(lambda t: math.pi * ramified_partial(s, t, K))
    report.partial = partial
    return partial, report


def resolvent_double_sum(op: HermitianOperator, lam: float, K: int, J: int
                         ) -> np.ndarray:
    """Truncated double-sum form of the resolvent,

        i sum_{j<=J} e^{-j lam} U_j - i sum_{k<=K} sum_{j<=J} (-1)^j e^{-j lam/2^k} U_{j 2^-k},

    kept as a small demonstration (n <= 8, J <= 1000): at fixed J the
    inner geometric sums converge ever more slowly in k, which is why the
    two limits must not be interchanged.
    """
    if op.dim > 8 or J > 1000:
        raise DomainError("double-sum demonstration limited to dim <= 8, J <= 1000")
    if lam <= 0:
        raise DomainError("resolvent_double_sum requires lam > 0")

    def f(w: float) -> complex:
        z1 = cmath.exp(-lam - 1j * w)
        total = 1j * (1.0 - z1 ** (J + 1)) / (1.0 - z1)
        for k in range(1, K + 1):
            zk = -cmath.exp((-lam - 1j * w) * 2.0**-k)
            total -= 1j * 2.0**-k * (1.0 - zk ** (J + 1)) / (1.0 - zk)
        return total

    return op.apply_scalar(f)


def _require_positive(op: HermitianOperator) -> None:
    w = op.eigenvalues
    if w.min() <= 1e-8 * max(w.max(), 0.0):
        raise DomainError("operator must be positive definite (numerical spectral gap)")


def write_matrix_text(a: np.ndarray, fh: TextIO) -> None:
    """n, then n rows of 2n space-separated decimals (re im interleaved)."""
    a = np.asarray(a, dtype=complex)
    fh.write(f"{a.shape[0]}\n")
    for row in a:
        fh.write(" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row) + "\n")


def read_matrix_text(fh: TextIO) -> np.ndarray:
    n = int(fh.readline())
    rows = []
    for _ in range(n):
        vals = [float(v) for v in fh.readline().split()]
        if len(vals) != 2 * n:
            raise ValueError("matrix row has wrong length")
        rows.append([complex(vals[2 * j], vals[2 * j + 1]) for j in range(n)])
    return np.array(rows, dtype=complex)
