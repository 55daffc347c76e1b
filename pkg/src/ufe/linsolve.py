"""Moore-Penrose pseudoinverse and equality-constrained least squares.

The two-factor design matrices carry one redundant column per factor (the
sum-to-zero constraints are what pin the parameters down), so every solve here
goes through a rank-revealing SVD rather than a plain inverse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleConstraintsError, InvalidInputError

__all__ = ["pinv", "ConstrainedLsSolution", "solve_constrained_ls", "multiplier_form"]


def _as_matrix(a, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-d, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return a


def pinv(a, tol: float | None = None) -> np.ndarray:
    """Pseudoinverse of ``a`` via SVD.

    Singular values at or below ``tol * s_max`` are treated as zero. The default
    ``tol`` is ``max(a.shape) * eps``.
    """
    a = _as_matrix(a, "a")
    rows, cols = a.shape
    if a.size == 0:
        return np.zeros((cols, rows))
    if tol is None:
        tol = max(rows, cols) * np.finfo(float).eps
    elif tol < 0:
        raise InvalidInputError("tol must be >= 0")
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    cutoff = tol * s[0]
    keep = s > cutoff
    if not np.any(keep):
        return np.zeros((cols, rows))
    return (vt[keep].T / s[keep]) @ u[:, keep].T


@dataclass(frozen=True)
class ConstrainedLsSolution:
    beta: np.ndarray
    lam: np.ndarray
    #: ``(X^T X)^+ X^T``, p x N; its absolute row sums scale the estimator laws
    q: np.ndarray
    constraint_residual: float
    stationarity_residual: float

    @property
    def q_row_abs_sums(self) -> np.ndarray:
        return np.abs(self.q).sum(axis=1)


def solve_constrained_ls(x, z, c=None, d=None, feasibility_tol: float = 1e-8) -> ConstrainedLsSolution:
    """Minimise ``||z - x beta||^2`` subject to ``c beta = d``.

    The multipliers come from the augmented system
    ``[[2 X^T X, C^T], [C, 0]] [beta; lam] = [2 X^T z; d]``, solved in the
    minimum-norm sense because redundant constraint rows make it singular.
    """
    x = _as_matrix(x, "x")
    n, p = x.shape
    z = np.asarray(z, dtype=float).reshape(-1)
    if z.shape != (n,):
        raise InvalidInputError(f"z has length {z.size}, expected {n}")
    if not np.all(np.isfinite(z)):
        raise InvalidInputError("z has non-finite entries")
    if c is None:
        c = np.zeros((0, p))
    c = _as_matrix(np.atleast_2d(c) if np.size(c) else np.zeros((0, p)), "c")
    k = c.shape[0]
    if c.shape[1] != p:
        raise InvalidInputError(f"c has {c.shape[1]} columns, expected {p}")
    d = np.zeros(k) if d is None else np.asarray(d, dtype=float).reshape(-1)
    if d.shape != (k,):
        raise InvalidInputError(f"d has length {d.size}, expected {k}")

    xtx = x.T @ x
    xtz = x.T @ z
    q = pinv(xtx) @ x.T

    if k == 0:
        beta = q @ z
        lam = np.zeros(0)
    else:
        kkt = np.block([[2.0 * xtx, c.T], [c, np.zeros((k, k))]])
        rhs = np.concatenate([2.0 * xtz, d])
        g = pinv(kkt)
        sol = g @ rhs
        # one step of refinement tightens the constraint residual to ~eps
        sol = sol + g @ (rhs - kkt @ sol)
        beta, lam = sol[:p], sol[p:]

    cres = float(np.max(np.abs(c @ beta - d))) if k else 0.0
    scale = max(1.0, float(np.max(np.abs(d))) if k else 0.0,
                float(np.max(np.abs(c))) * float(np.max(np.abs(beta))) if k else 0.0)
    if cres > feasibility_tol * scale:
        raise InfeasibleConstraintsError("constraints cannot be satisfied", cres)
    stat = float(np.linalg.norm(2.0 * xtx @ beta - 2.0 * xtz + c.T @ lam))
    return ConstrainedLsSolution(beta, lam, q, cres, stat)


def multiplier_form(x, z, c, lam) -> np.ndarray:
    """``(X^T X)^+ X^T z - 1/2 (X^T X)^+ C^T lam``.

    When ``X`` is rank deficient this is the projection of the constrained
    estimate onto the row space of ``X``, not the estimate itself; the
    null-space part is fixed by the constraints.
    """
    x = _as_matrix(x, "x")
    c = _as_matrix(c, "c")
    g = pinv(x.T @ x)
    return g @ (x.T @ np.asarray(z, float)) - 0.5 * g @ (c.T @ np.asarray(lam, float))
