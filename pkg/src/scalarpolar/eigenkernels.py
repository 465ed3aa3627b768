"""Complex Schur form, eigenvalue reordering and triangular Sylvester solves.

These are the dense kernels underneath every matrix function in the
package.  The Schur decomposition itself is delegated to LAPACK (``zgees``
through :func:`scipy.linalg.schur`); reordering and the Sylvester solver
are implemented here because the block recurrence needs direct control over
them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla

from .core import DEFAULT_TOL, Tolerances
from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    IllConditionedSwap,
    InvalidMatrix,
    SingularSylvester,
)

__all__ = [
    "SchurForm",
    "schur",
    "reorder",
    "permute",
    "sylvester_triangular",
    "eigenvalues",
]


@dataclass(frozen=True, eq=False)
class SchurForm:
    """``A = q @ t @ q^*`` with `q` unitary and `t` upper triangular."""

    q: np.ndarray
    t: np.ndarray

    @property
    def n(self) -> int:
        return self.t.shape[0]

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.t).copy()

    def reconstruct(self) -> np.ndarray:
        return self.q @ self.t @ self.q.conj().T


def _square(a, name="A") -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidMatrix(f"{name} has non-finite entries")
    return a


def schur(a: np.ndarray) -> SchurForm:
    """Complex Schur decomposition of a square matrix.

    LAPACK's ``zhseqr`` allots 30 QR sweeps per eigenvalue before giving up;
    that failure surfaces here as :class:`ConvergenceFailure`.
    """
    a = _square(a)
    try:
        t, q = sla.schur(a, output="complex", check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceFailure(f"Schur decomposition did not converge: {exc}") from exc
    t = np.triu(t)
    q.flags.writeable = False
    t.flags.writeable = False
    return SchurForm(q, t)


def eigenvalues(a: np.ndarray) -> np.ndarray:
    """Eigenvalues of `a`, read off the diagonal of its Schur factor."""
    return schur(a).diagonal


def _swap(t: np.ndarray, q: np.ndarray, k: int, tol: float) -> None:
    """Exchange the diagonal entries ``k`` and ``k+1`` of `t` in place."""
    t11, t22, t12 = t[k, k], t[k + 1, k + 1], t[k, k + 1]
    x = t22 - t11
    r = np.hypot(abs(t12), abs(x))
    if r == 0.0:
        # equal eigenvalues with a zero coupling: the swap is the identity
        return
    cs, sn = t12 / r, x / r
    g = np.array([[cs, -np.conj(sn)], [sn, np.conj(cs)]])
    t[k : k + 2, :] = g.conj().T @ t[k : k + 2, :]
    t[:, k : k + 2] = t[:, k : k + 2] @ g
    q[:, k : k + 2] = q[:, k : k + 2] @ g
    lost = abs(t[k + 1, k])
    if lost > tol:
        raise IllConditionedSwap(
            f"swap at position {k} left a subdiagonal entry of {lost:.3e} (limit {tol:.3e})"
        )
    t[k + 1, k] = 0.0
    t[k, k], t[k + 1, k + 1] = t22, t11


def reorder(
    form: SchurForm,
    cluster_of: Sequence[int] | Callable[[int], int],
    tol: Tolerances = DEFAULT_TOL,
) -> SchurForm:
    """Reorder a Schur form so that eigenvalues sharing a cluster id are contiguous.

    Clusters appear in ascending id order; the relative order of eigenvalues
    inside a cluster is kept.  `cluster_of` maps the *current* diagonal
    position to a cluster id.
    """
    n = form.n
    if callable(cluster_of):
        ids = [cluster_of(i) for i in range(n)]
    else:
        ids = list(cluster_of)
    if len(ids) != n:
        raise DimensionMismatch(f"need {n} cluster ids, got {len(ids)}")
    if all(ids[i] <= ids[i + 1] for i in range(n - 1)):
        return form

    t = np.array(form.t, dtype=np.complex128)
    q = np.array(form.q, dtype=np.complex128)
    limit = tol.tol_eq * max(np.linalg.norm(t), np.finfo(float).tiny)
    # stable bubble sort with adjacent unitary swaps
    for end in range(n - 1, 0, -1):
        moved = False
        for k in range(end):
            if ids[k] > ids[k + 1]:
                _swap(t, q, k, limit)
                ids[k], ids[k + 1] = ids[k + 1], ids[k]
                moved = True
        if not moved:
            break
    q.flags.writeable = False
    t.flags.writeable = False
    return SchurForm(q, t)


def permute(form: SchurForm, order: Sequence[int], tol: Tolerances = DEFAULT_TOL) -> SchurForm:
    """Move the eigenvalue at position ``order[j]`` to position ``j``."""
    order = list(order)
    if sorted(order) != list(range(form.n)):
        raise ValueError(f"order must be a permutation of range({form.n})")
    rank = np.empty(form.n, dtype=int)
    rank[order] = np.arange(form.n)
    return reorder(form, rank.tolist(), tol)


def sylvester_triangular(
    t11: np.ndarray,
    t22: np.ndarray,
    c: np.ndarray,
    tol: Tolerances = DEFAULT_TOL,
) -> np.ndarray:
    """Solve ``t11 @ X - X @ t22 = c`` for upper-triangular `t11`, `t22`.

    Column ``j`` of ``X`` satisfies the shifted triangular system
    ``(t11 - t22[j, j] I) x_j = c_j + sum_{k<j} x_k t22[k, j]``, solved by
    back substitution.
    """
    t11 = np.atleast_2d(np.asarray(t11, dtype=np.complex128))
    t22 = np.atleast_2d(np.asarray(t22, dtype=np.complex128))
    c = np.asarray(c, dtype=np.complex128).reshape(t11.shape[0], t22.shape[0])
    p, r = t11.shape[0], t22.shape[0]

    d1, d2 = np.diag(t11), np.diag(t22)
    gap = np.min(np.abs(d1[:, None] - d2[None, :]))
    scale = max(np.linalg.norm(t11) + np.linalg.norm(t22), np.finfo(float).tiny)
    if gap <= tol.tol_class * scale:
        raise SingularSylvester(
            f"spectra overlap: min eigenvalue distance {gap:.3e} at scale {scale:.3e}"
        )

    x = np.zeros((p, r), dtype=np.complex128)
    eye = np.eye(p)
    for j in range(r):
        rhs = c[:, j] + x[:, :j] @ t22[:j, j]
        x[:, j] = sla.solve_triangular(t11 - t22[j, j] * eye, rhs, lower=False, check_finite=False)
    return x
