"""Small dense symmetric linear algebra: positive-definite state with rank-1
inverse maintenance, Mahalanobis norms, and a cyclic-Jacobi minimum eigenvalue.

Everything here operates on matrices of dimension <= ~32, so robustness and
simplicity win over asymptotic speed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SYMMETRY_RTOL = 1e-12
JACOBI_OFFDIAG_TOL = 1e-14
REFACTOR_PERIOD = 1000  # direct re-inversion cadence, guards Sherman-Morrison drift


def symmetrize(m: np.ndarray) -> np.ndarray:
    """Average a matrix with its transpose (removes float asymmetry)."""
    return 0.5 * (m + m.T)


def check_symmetric(m: np.ndarray, rtol: float = SYMMETRY_RTOL) -> None:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.abs(m).max()))
    if np.abs(m - m.T).max() > rtol * scale:
        raise ValueError("matrix is not symmetric within tolerance")


@dataclass
class PosDefState:
    """A positive-definite matrix together with its maintained inverse and log-det.

    Invariants: matrix @ inverse ~ I, log_det ~ ln det(matrix). Updates go
    through :func:`rank1_update`; treat instances as single-writer.
    """

    matrix: np.ndarray
    inverse: np.ndarray
    log_det: float
    updates_since_refactor: int = field(default=0)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def copy(self) -> "PosDefState":
        return PosDefState(self.matrix.copy(), self.inverse.copy(),
                           self.log_det, self.updates_since_refactor)


def pd_init(dim: int, lam: float) -> PosDefState:
    """State for lambda * I: the regularized design matrix before any pull."""
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    if lam <= 0:
        raise ValueError(f"regularization must be positive, got {lam}")
    eye = np.eye(dim)
    return PosDefState(lam * eye, eye / lam, dim * np.log(lam))


def refactor(state: PosDefState) -> None:
    """Recompute inverse and log-det directly from the matrix."""
    state.inverse = symmetrize(np.linalg.inv(state.matrix))
    sign, logdet = np.linalg.slogdet(state.matrix)
    if sign <= 0:
        raise ValueError("matrix lost positive definiteness")
    state.log_det = float(logdet)
    state.updates_since_refactor = 0


def rank1_update(state: PosDefState, x: np.ndarray) -> PosDefState:
    """Return a new state for matrix + x x^T (Sherman-Morrison on the inverse)."""
    out = state.copy()
    rank1_update_inplace(out, x)
    return out


def rank1_update_inplace(state: PosDefState, x: np.ndarray) -> None:
    x = np.asarray(x, dtype=float)
    if x.shape != (state.dim,):
        raise ValueError(f"vector shape {x.shape} does not match dim {state.dim}")
    state.matrix += np.outer(x, x)
    state.matrix = symmetrize(state.matrix)
    inv_x = state.inverse @ x
    denom = 1.0 + float(x @ inv_x)
    state.inverse -= np.outer(inv_x, inv_x) / denom
    state.inverse = symmetrize(state.inverse)
    state.log_det += np.log(denom)
    state.updates_since_refactor += 1
    if state.updates_since_refactor >= REFACTOR_PERIOD:
        refactor(state)


def mahalanobis_inv(state: PosDefState, x: np.ndarray) -> float:
    """sqrt(x^T A^{-1} x) using the maintained inverse."""
    x = np.asarray(x, dtype=float)
    if x.shape != (state.dim,):
        raise ValueError(f"vector shape {x.shape} does not match dim {state.dim}")
    q = float(x @ state.inverse @ x)
    return np.sqrt(max(q, 0.0))


def mahalanobis(matrix: np.ndarray, x: np.ndarray) -> float:
    """sqrt(x^T M x) for an explicit symmetric matrix."""
    q = float(np.asarray(x) @ matrix @ np.asarray(x))
    return np.sqrt(max(q, 0.0))


def min_eigenvalue(m: np.ndarray) -> float:
    """Smallest eigenvalue of a symmetric matrix via cyclic Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius mass falls below
    JACOBI_OFFDIAG_TOL (relative to the matrix scale).
    """
    check_symmetric(m)
    a = symmetrize(np.asarray(m, dtype=float)).copy()
    n = a.shape[0]
    if n == 1:
        return float(a[0, 0])
    scale = max(1.0, float(np.abs(a).max()))
    tol = JACOBI_OFFDIAG_TOL * scale
    for _ in range(100):  # sweeps; converges in a handful for n <= 32
        off = np.sqrt(max(0.0, (a * a).sum() - (np.diag(a) ** 2).sum()))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= tol / (n * n):
                    continue
                phi = 0.5 * np.arctan2(2.0 * apq, a[q, q] - a[p, p])
                c, s = np.cos(phi), np.sin(phi)
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                col_p = c * a[:, p] - s * a[:, q]
                col_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = col_p, col_q
                a[p, q] = a[q, p] = 0.0
    return float(np.diag(a).min())
