"""Dense Hermitian linear algebra for density matrices.

Everything here works on complex128 arrays and is deliberately self-contained:
the eigensolver is a cyclic Jacobi iteration rather than a LAPACK call, so the
fidelity and trace-distance results can be cross-checked against an external
library in the test suite without sharing a code path with it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    FidelityOvershoot,
    NoConvergence,
    NonHermitian,
    NotHermitian,
    NotPSD,
    TraceNotOne,
)

# Absolute floor below which an off-diagonal pivot is not worth rotating.
_PIVOT_SKIP = 1e-300

_MAX_SWEEPS = 100
_OFFDIAG_TARGET = 1e-14


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    ``eigenvectors[:, k]`` is the unit eigenvector for ``eigenvalues[k]``;
    the matrix reconstructs as ``V diag(w) V^dagger``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_square(mat: np.ndarray) -> np.ndarray:
    arr = np.asarray(mat, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {arr.shape}")
    return arr


def _offdiag_norm(a: np.ndarray) -> float:
    # summed entrywise rather than as total - diagonal, which cancels badly
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def _jacobi(mat: np.ndarray, want_vectors: bool) -> tuple[np.ndarray, np.ndarray | None]:
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Sweeps all upper-triangle pivots in row order, each time applying a
    complex plane rotation that zeroes the pivot.  Converged when the
    off-diagonal Frobenius mass falls below 1e-14 (scaled by the matrix norm
    for inputs larger than unit size).
    """
    a = mat.copy()
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128) if want_vectors else None
    if n == 1:
        return np.array([a[0, 0].real]), v

    scale = max(1.0, float(np.linalg.norm(a)))
    target = _OFFDIAG_TARGET * scale
    for _ in range(_MAX_SWEEPS):
        if _offdiag_norm(a) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= _PIVOT_SKIP:
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                phase = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.hypot(1.0, tau))
                else:
                    t = -1.0 / (-tau + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c

                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * phase * row_q
                a[q, :] = s * np.conj(phase) * row_p + c * row_q
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * np.conj(phase) * col_q
                a[:, q] = s * phase * col_p + c * col_q
                # the rotation annihilates the pivot exactly; drop the rounding residue
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

                if v is not None:
                    vcol_p = v[:, p].copy()
                    vcol_q = v[:, q].copy()
                    v[:, p] = c * vcol_p - s * np.conj(phase) * vcol_q
                    v[:, q] = s * phase * vcol_p + c * vcol_q
    else:
        raise NoConvergence(
            f"Jacobi sweeps exhausted with off-diagonal mass {_offdiag_norm(a):.3e}"
        )
    return np.diag(a).real.copy(), v


def hermitian_eig(mat: np.ndarray, tol: float = 1e-10) -> Spectrum:
    """Diagonalize a Hermitian matrix.

    Raises NonHermitian if max|M - M^dagger| exceeds ``tol``; the iteration
    then runs on the Hermitized average (M + M^dagger)/2.
    """
    arr = _as_square(mat)
    defect = float(np.max(np.abs(arr - arr.conj().T))) if arr.size else 0.0
    if defect > tol:
        raise NonHermitian(f"Hermiticity defect {defect:.3e} exceeds {tol:.1e}")
    sym = 0.5 * (arr + arr.conj().T)
    w, v = _jacobi(sym, want_vectors=True)
    order = np.argsort(w, kind="stable")
    return Spectrum(eigenvalues=w[order], eigenvectors=v[:, order])


def psd_sqrt(mat: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in [-tol, 0) are treated as rounding images of zero and
    clamped; anything below -tol raises NotPSD.
    """
    spec = hermitian_eig(mat, tol=1e-10)
    w = spec.eigenvalues
    if w[0] < -tol:
        raise NotPSD(f"eigenvalue {w[0]:.3e} below the -{tol:.1e} clamping window")
    w = np.clip(w, 0.0, None)
    v = spec.eigenvectors
    root = (v * np.sqrt(w)) @ v.conj().T
    return 0.5 * (root + root.conj().T)


def fidelity(rho1: np.ndarray, rho2: np.ndarray) -> float:
    """Uhlmann-Jozsa fidelity of two density matrices.

    Computed as (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2.  Values in
    (1, 1 + 1e-9] are clamped to 1; a larger overshoot raises
    FidelityOvershoot.
    """
    a = _as_square(rho1)
    b = _as_square(rho2)
    if a.shape != b.shape:
        raise DimensionMismatch(f"state shapes differ: {a.shape} vs {b.shape}")
    root = psd_sqrt(a)
    inner = root @ b @ root
    inner = 0.5 * (inner + inner.conj().T)
    w = hermitian_eig(inner).eigenvalues
    if w[0] < -1e-10:
        raise NotPSD(f"inner product matrix has eigenvalue {w[0]:.3e}")
    # eigenvalues this far below the leading one are rounding images of exact
    # zeros; taking their square roots would inject ~1e-7 noise into the trace
    floor = 1e-13 * max(1.0, float(w[-1]))
    w = np.where(w < floor, 0.0, w)
    value = float(np.sum(np.sqrt(w)) ** 2)
    if value > 1.0:
        if value <= 1.0 + 1e-9:
            return 1.0
        raise FidelityOvershoot(f"fidelity {value!r} exceeds 1 beyond the 1e-9 window")
    return value


def trace_distance(rho1: np.ndarray, rho2: np.ndarray) -> float:
    """Trace distance (1/2)||rho1 - rho2||_1 for Hermitian operands."""
    a = _as_square(rho1)
    b = _as_square(rho2)
    if a.shape != b.shape:
        raise DimensionMismatch(f"state shapes differ: {a.shape} vs {b.shape}")
    diff = a - b
    diff = 0.5 * (diff + diff.conj().T)
    w = hermitian_eig(diff).eigenvalues
    return 0.5 * float(np.sum(np.abs(w)))


def validate_density(mat: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Check that ``mat`` is a density matrix and return a Hermitized copy.

    With the default tolerance the checks are: Hermiticity defect at most
    1e-12, real trace within 1e-10 of 1 with imaginary part at most 1e-12,
    and eigenvalues at least -1e-10.  Passing a different ``tol`` rescales
    all three windows together.
    """
    arr = _as_square(mat)
    tight = tol * 1e-2
    herm_defect = float(np.max(np.abs(arr - arr.conj().T)))
    if herm_defect > tight:
        raise NotHermitian(f"Hermiticity defect {herm_defect:.3e} exceeds {tight:.1e}")
    tr = complex(np.trace(arr))
    if abs(tr.real - 1.0) > tol:
        raise TraceNotOne(f"trace real part {tr.real!r} differs from 1 by {abs(tr.real - 1.0):.3e}")
    if abs(tr.imag) > tight:
        raise TraceNotOne(f"trace imaginary part {tr.imag:.3e} exceeds {tight:.1e}")
    sym = 0.5 * (arr + arr.conj().T)
    w = hermitian_eig(sym).eigenvalues
    if w[0] < -tol:
        raise NotPSD(f"eigenvalue {w[0]:.3e} below -{tol:.1e}")
    return sym
