"""Scalar products, adjoints and the structural predicates built on them.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Everything in
this module is a pure function of its arguments; the containers are frozen
dataclasses holding read-only arrays.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, InvalidMatrix

__all__ = [
    "FormKind",
    "Tolerances",
    "ScalarProductSpace",
    "ProductPair",
    "as_matrix",
    "rel_residual",
    "sharp",
    "adjoint_n",
    "adjoint_mn",
    "double_adjoint",
    "double_adjoint_holds",
    "is_r_positive_definite",
    "has_orthonormal_columns",
    "has_orthonormal_rows",
    "is_selfadjoint",
]


class FormKind(str, enum.Enum):
    REAL_BILINEAR = "real_bilinear"
    COMPLEX_BILINEAR = "complex_bilinear"
    SESQUILINEAR = "sesquilinear"

    @property
    def is_bilinear(self) -> bool:
        return self is not FormKind.SESQUILINEAR


@dataclass(frozen=True)
class Tolerances:
    """Numerical policy shared by every operation.

    Attributes
    ----------
    tol_sing : float
        Relative singular-value cutoff: a matrix is singular when
        ``smin <= tol_sing * smax``.
    tol_eq : float
        Relative residual cutoff for matrix equalities,
        ``||X - Y||_F / max(1, ||Y||_F)``.
    tol_class : float
        Width of the band around a stem discontinuity (or the origin),
        relative to ``||A||_F``, inside which an eigenvalue cannot be
        classified reliably.
    tol_cluster : float
        Eigenvalues closer than ``tol_cluster * ||A||_F`` are evaluated as a
        single block.  Only matters for stems that are not piecewise
        constant; it keeps numerically split defective eigenvalues together.
    """

    tol_sing: float = 1e-12
    tol_eq: float = 1e-8
    tol_class: float = 1e-8
    tol_cluster: float = 1e-4

    def __post_init__(self):
        for name in ("tol_sing", "tol_eq", "tol_class", "tol_cluster"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")


DEFAULT_TOL = Tolerances()


def as_matrix(a, name: str = "matrix", form: FormKind | None = None) -> np.ndarray:
    """Validate and copy `a` into a read-only 2-D ``complex128`` array."""
    arr = np.array(a, dtype=np.complex128, copy=True)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise InvalidMatrix(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size == 0:
        raise InvalidMatrix(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix(f"{name} has non-finite entries")
    if form is FormKind.REAL_BILINEAR and np.any(arr.imag != 0):
        raise InvalidMatrix(f"{name} has nonzero imaginary parts under a real bilinear form")
    arr.flags.writeable = False
    return arr


def rel_residual(x: np.ndarray, y: np.ndarray, scale: float = 0.0) -> float:
    """``||x - y||_F / max(1, ||y||_F, scale)``."""
    return float(np.linalg.norm(x - y) / max(1.0, np.linalg.norm(y), scale))


def _is_nonsingular(a: np.ndarray, tol_sing: float) -> tuple[bool, float]:
    s = np.linalg.svd(a, compute_uv=False)
    ratio = float(s[-1] / s[0]) if s[0] > 0 else 0.0
    return ratio > tol_sing, ratio


@dataclass(frozen=True, eq=False)
class ScalarProductSpace:
    """A nonsingular product matrix together with its form kind.

    ``[x, y] = x^T N y`` for bilinear forms and ``conj(x)^T N y`` for the
    sesquilinear form.
    """

    matrix: np.ndarray
    form: FormKind
    tol_sing: float = DEFAULT_TOL.tol_sing

    def __post_init__(self):
        form = FormKind(self.form)
        object.__setattr__(self, "form", form)
        mat = as_matrix(self.matrix, "product matrix", form)
        if mat.shape[0] != mat.shape[1]:
            raise DimensionMismatch(f"product matrix must be square, got {mat.shape}")
        ok, ratio = _is_nonsingular(mat, self.tol_sing)
        if not ok:
            raise InvalidMatrix(f"product matrix is singular (smin/smax={ratio:.3e})")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def _lu(self):
        return sla.lu_factor(self.matrix, check_finite=False)

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Apply the inverse of the product matrix to `b`."""
        return sla.lu_solve(self._lu, b, check_finite=False)

    def twisted(self, factor: np.ndarray) -> "ScalarProductSpace":
        """The space whose product matrix is ``matrix @ factor``."""
        mat = self.matrix @ factor
        if self.form is FormKind.REAL_BILINEAR:
            mat = mat.real
        return ScalarProductSpace(mat, self.form, self.tol_sing)

    def __repr__(self) -> str:
        return f"ScalarProductSpace(form={self.form.value}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class ProductPair:
    """Scalar products on the codomain (``m_space``) and domain (``n_space``)."""

    m_space: ScalarProductSpace
    n_space: ScalarProductSpace

    def __post_init__(self):
        if self.m_space.form is not self.n_space.form:
            raise ValueError(
                f"paired spaces must share a form kind: {self.m_space.form.value} "
                f"vs {self.n_space.form.value}"
            )

    @classmethod
    def single(cls, space: ScalarProductSpace) -> "ProductPair":
        return cls(space, space)

    @property
    def form(self) -> FormKind:
        return self.m_space.form

    @property
    def shape(self) -> tuple[int, int]:
        return self.m_space.dim, self.n_space.dim

    @property
    def is_single(self) -> bool:
        return self.m_space is self.n_space or (
            self.m_space.dim == self.n_space.dim
            and np.array_equal(self.m_space.matrix, self.n_space.matrix)
        )

    def swapped(self) -> "ProductPair":
        return ProductPair(self.n_space, self.m_space)


def sharp(a: np.ndarray, form: FormKind) -> np.ndarray:
    """Transpose for bilinear forms, conjugate transpose for the sesquilinear one."""
    a = np.asarray(a)
    if FormKind(form) is FormKind.SESQUILINEAR:
        return a.conj().T
    return a.T


def adjoint_n(a: np.ndarray, space: ScalarProductSpace) -> np.ndarray:
    """The adjoint ``N^{-1} A^# N`` of a square matrix in one scalar product."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape != (space.dim, space.dim):
        raise DimensionMismatch(f"expected a {space.dim}x{space.dim} matrix, got {a.shape}")
    return space.solve(sharp(a, space.form) @ space.matrix)


def adjoint_mn(a: np.ndarray, pair: ProductPair) -> np.ndarray:
    """The adjoint ``N^{-1} A^# M`` of an ``m x n`` map between two product spaces."""
    a = np.asarray(a)
    m, n = pair.shape
    if a.ndim != 2 or a.shape != (m, n):
        raise DimensionMismatch(f"expected a {m}x{n} matrix, got {a.shape}")
    return pair.n_space.solve(sharp(a, pair.form) @ pair.m_space.matrix)


def double_adjoint(a: np.ndarray, pair: ProductPair) -> np.ndarray:
    """``(A^[M,N])^[N,M]``."""
    return adjoint_mn(adjoint_mn(a, pair), pair.swapped())


def double_adjoint_holds(
    f: np.ndarray, pair: ProductPair, tol: Tolerances = DEFAULT_TOL
) -> tuple[bool, float]:
    """Check ``(F^[M,N])^[N,M] = F`` and return ``(holds, relative residual)``."""
    f = np.asarray(f)
    residual = rel_residual(double_adjoint(f, pair), f)
    return residual <= tol.tol_eq, residual


def is_r_positive_definite(a: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True when every eigenvalue lies in the open right half-plane.

    The real parts must clear ``tol_class * ||A||_F`` so that rounding on the
    imaginary axis does not count as positive.
    """
    from .eigenkernels import eigenvalues

    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {a.shape}")
    lam = eigenvalues(a)
    return bool(np.min(lam.real) > tol.tol_class * np.linalg.norm(a))


def has_orthonormal_columns(
    w: np.ndarray, pair: ProductPair, tol: Tolerances = DEFAULT_TOL
) -> tuple[bool, float]:
    """``W^[M,N] W = I_n``; the residual is ``||W^[M,N] W - I||_F / n``."""
    w = np.asarray(w)
    n = w.shape[1]
    residual = float(np.linalg.norm(adjoint_mn(w, pair) @ w - np.eye(n)) / n)
    return residual <= tol.tol_eq, residual


def has_orthonormal_rows(
    w: np.ndarray, pair: ProductPair, tol: Tolerances = DEFAULT_TOL
) -> tuple[bool, float]:
    """``W W^[M,N] = I_m``; the residual is ``||W W^[M,N] - I||_F / m``."""
    w = np.asarray(w)
    m = w.shape[0]
    residual = float(np.linalg.norm(w @ adjoint_mn(w, pair) - np.eye(m)) / m)
    return residual <= tol.tol_eq, residual


def is_selfadjoint(
    a: np.ndarray, space: ScalarProductSpace, tol: Tolerances = DEFAULT_TOL
) -> tuple[bool, float]:
    a = np.asarray(a)
    residual = rel_residual(adjoint_n(a, space), a)
    return residual <= tol.tol_eq, residual
