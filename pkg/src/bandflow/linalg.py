"""Dense complex Hermitian matrices, spin operator construction, and a
cyclic Jacobi eigensolver for the small blocks this package produces."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

HERMITIAN_ATOL = 1e-12
JACOBI_RTOL = 1e-13
JACOBI_MAX_SWEEPS = 40


class EigenSolverError(RuntimeError):
    """Jacobi iteration failed to reach the convergence threshold."""


def hermitian_matrix(entries, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Validate a square complex matrix as Hermitian and return it symmetrized.

    Rejects non-square input, non-finite entries, and matrices whose
    anti-Hermitian part exceeds ``atol`` in absolute value.
    """
    h = np.asarray(entries, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h.real)) or not np.all(np.isfinite(h.imag)):
        raise ValueError("matrix entries must be finite")
    defect = np.max(np.abs(h - h.conj().T)) if h.size else 0.0
    if defect > atol:
        raise ValueError(f"matrix is not Hermitian: max |H - H^dag| = {defect:.3e}")
    return 0.5 * (h + h.conj().T)


@dataclass(frozen=True)
class SpinOperators:
    """Spin-j operator matrices in the basis |j, m> with m = j, j-1, ..., -j."""

    j: float
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    splus: np.ndarray
    sminus: np.ndarray

    @property
    def dim(self) -> int:
        return round(2 * self.j) + 1


def spin_operators(j) -> SpinOperators:
    """Build the standard ladder representation of the spin-j operators.

    The basis is ordered by decreasing magnetic quantum number, so ``sz`` is
    diagonal with entries j, j-1, ..., -j and ``splus`` couples m to m+1 with
    matrix element sqrt(j(j+1) - m(m+1)).
    """
    jj = float(j)
    two_j = 2.0 * jj
    if jj < 0 or abs(two_j - round(two_j)) > 1e-12:
        raise ValueError(f"j must be a non-negative integer or half-integer, got {j}")
    dim = round(two_j) + 1
    m = jj - np.arange(dim)
    sz = np.diag(m).astype(np.complex128)
    splus = np.zeros((dim, dim), dtype=np.complex128)
    if dim > 1:
        # splus[i-1, i] = <m+1|S+|m> for m = m[i]
        raising = np.sqrt(jj * (jj + 1.0) - m[1:] * (m[1:] + 1.0))
        splus[np.arange(dim - 1), np.arange(1, dim)] = raising
    sminus = splus.conj().T
    sx = 0.5 * (splus + sminus)
    sy = -0.5j * (splus - sminus)
    return SpinOperators(j=jj, sx=sx, sy=sy, sz=sz, splus=splus, sminus=sminus)


class EigenDecomposition(NamedTuple):
    """Ascending eigenvalues and the matching orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def _offdiag_norm(h: np.ndarray) -> float:
    off = h - np.diag(np.diag(h))
    return float(np.linalg.norm(off))


def eigh(entries, atol: float = HERMITIAN_ATOL,
         max_sweeps: int = JACOBI_MAX_SWEEPS) -> EigenDecomposition:
    """Diagonalize a complex Hermitian matrix by cyclic Jacobi rotations.

    Sweeps run in fixed row-major order over index pairs, so the output is
    deterministic for identical input.  Convergence requires the off-diagonal
    Frobenius norm to drop below JACOBI_RTOL times the matrix norm; failure to
    converge within ``max_sweeps`` raises EigenSolverError.
    """
    h = hermitian_matrix(entries, atol=atol)
    n = h.shape[0]
    v = np.eye(n, dtype=np.complex128)
    if n == 1:
        return EigenDecomposition(values=h.real.diagonal().copy(), vectors=v)

    scale = float(np.linalg.norm(h))
    if scale == 0.0:
        return EigenDecomposition(values=np.zeros(n), vectors=v)
    threshold = JACOBI_RTOL * scale

    h = h.copy()
    for _sweep in range(max_sweeps):
        if _offdiag_norm(h) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                hpq = h[p, q]
                if hpq == 0.0:
                    continue
                # Phase rotation makes the (p, q) entry real, then a real
                # Jacobi rotation annihilates it.
                alpha = math.atan2(hpq.imag, hpq.real)
                mag = abs(hpq)
                app = h[p, p].real
                aqq = h[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                u = complex(math.cos(alpha), -math.sin(alpha))  # e^{-i alpha}
                # Column update: H <- H G with G_pp=c, G_pq=s, G_qp=-s*u, G_qq=c*u
                col_p = h[:, p].copy()
                col_q = h[:, q].copy()
                h[:, p] = c * col_p - s * u * col_q
                h[:, q] = s * col_p + c * u * col_q
                # Row update: H <- G^dag H
                row_p = h[p, :].copy()
                row_q = h[q, :].copy()
                h[p, :] = c * row_p - s * np.conj(u) * row_q
                h[q, :] = s * row_p + c * np.conj(u) * row_q
                # Clean the annihilated pair against roundoff drift.
                h[p, q] = 0.0
                h[q, p] = 0.0
                h[p, p] = h[p, p].real
                h[q, q] = h[q, q].real
                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * u * vec_q
                v[:, q] = s * vec_p + c * u * vec_q
    if _offdiag_norm(h) > threshold:
        raise EigenSolverError(
            f"Jacobi did not converge in {max_sweeps} sweeps: "
            f"off-diagonal norm {_offdiag_norm(h):.3e} vs threshold {threshold:.3e} "
            f"for a {n}x{n} matrix of norm {scale:.3e}"
        )

    values = h.real.diagonal().copy()
    order = np.argsort(values, kind="stable")
    return EigenDecomposition(values=values[order], vectors=v[:, order])
