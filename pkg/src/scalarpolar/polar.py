"""Right and left polar decompositions ``F = W S`` and ``F = S' W`` relative to
one or two scalar products, plus certification of the resulting factors.

With ``G = F^[M,N] F`` (right) or ``G = F F^[M,N]`` (left), the factors are

    Sigma = sigma(G),   S = (Sigma G)^{1/2},   W = F S^{-1}  or  S^{-1} F,

and they exist exactly when ``G`` is nonsingular and
``(F^[M,N])^[N,M] = F``.  Violations raise :class:`PreconditionViolation`
subclasses; no best-effort factors are ever returned.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .core import (
    DEFAULT_TOL,
    FormKind,
    ProductPair,
    ScalarProductSpace,
    Tolerances,
    adjoint_mn,
    adjoint_n,
    as_matrix,
    double_adjoint,
    double_adjoint_holds,
    rel_residual,
)
from .eigenkernels import eigenvalues, permute, schur
from .errors import DimensionMismatch, DoubleAdjointViolation, SingularGram, SingularInput
from .matfunc import SignFunctionSpec, _as_spec, generalized_sign, principal_sqrt

__all__ = [
    "Side",
    "PolarFactors",
    "Check",
    "CertificationReport",
    "right_polar_square",
    "left_polar_square",
    "right_polar_rect",
    "left_polar_rect",
    "both_polar_square_two_products",
    "certify",
    "certify_both",
    "DET_TOL",
]

DET_TOL = 1e-9


class Side(str, enum.Enum):
    RIGHT = "right"
    LEFT = "left"


@dataclass(frozen=True, eq=False)
class PolarFactors:
    """``F = w @ s`` (right) or ``F = s @ w`` (left).

    `sigma` is the generalized sign of the Gram matrix the factor `s` was
    built from, so it has the shape of `s`.
    """

    w: np.ndarray
    s: np.ndarray
    sigma: np.ndarray
    side: Side
    spec: SignFunctionSpec

    def product(self) -> np.ndarray:
        return self.w @ self.s if self.side is Side.RIGHT else self.s @ self.w


def _singular_ratio(a: np.ndarray) -> float:
    s = np.linalg.svd(a, compute_uv=False)
    return float(s[-1] / s[0]) if s[0] > 0 else 0.0


def _shuffled_schur(a: np.ndarray, rng, tol):
    if rng is None:
        return None
    sf = schur(a)
    return permute(sf, rng.permutation(sf.n).tolist(), tol)


def _check_double_adjoint(f, pair, tol):
    ok, res = double_adjoint_holds(f, pair, tol)
    if not ok:
        raise DoubleAdjointViolation(
            f"(F^[M,N])^[N,M] differs from F under the {pair.form.value} form", res)


def _decompose(f, pair: ProductPair, spec, tol: Tolerances, side: Side, shuffle) -> PolarFactors:
    adj = adjoint_mn(f, pair)
    if side is Side.RIGHT:
        gram, space = adj @ f, pair.n_space
    else:
        gram, space = f @ adj, pair.m_space
    ratio = _singular_ratio(gram)
    if ratio <= tol.tol_sing:
        what = "F^[M,N] F" if side is Side.RIGHT else "F F^[M,N]"
        raise SingularGram(f"{what} is singular", ratio)
    # the Gram matrix is selfadjoint in `space` under the preconditions
    gram = 0.5 * (gram + adjoint_n(gram, space))

    sign = generalized_sign(gram, spec, tol, _shuffled_schur(gram, shuffle, tol))
    sigma = sign.sigma
    p = sigma @ gram
    s = principal_sqrt(p, tol, _shuffled_schur(p, shuffle, tol))

    lu = sla.lu_factor(s, check_finite=False)
    if side is Side.RIGHT:
        # W = F S^{-1}  <=>  S^T W^T = F^T
        w = sla.lu_solve(lu, f.T, trans=1, check_finite=False).T
    else:
        w = sla.lu_solve(lu, f, check_finite=False)
    if pair.form is FormKind.REAL_BILINEAR:
        w, s, sigma = w.real + 0j, s.real + 0j, sigma.real + 0j
    for arr in (w, s, sigma):
        arr.flags.writeable = False
    return PolarFactors(w, s, sigma, side, spec)


def _prepare(f, pair: ProductPair):
    f = as_matrix(f, "F", pair.form)
    m, n = pair.shape
    if f.shape != (m, n):
        raise DimensionMismatch(f"F has shape {f.shape}, the scalar products need {(m, n)}")
    return f


def _require_nonsingular(f, tol):
    ratio = _singular_ratio(f)
    if ratio <= tol.tol_sing:
        raise SingularInput("F is singular", ratio)


def right_polar_square(
    f: np.ndarray,
    space: ScalarProductSpace,
    spec: SignFunctionSpec | str,
    tol: Tolerances = DEFAULT_TOL,
    shuffle: np.random.Generator | None = None,
) -> PolarFactors:
    """Right decomposition ``F = W S`` of a square matrix in one scalar product.

    Parameters
    ----------
    f : (n, n) array_like
        Nonsingular matrix with ``(F^[N])^[N] = F``.
    space : ScalarProductSpace
        The product matrix ``N`` and its form kind.
    spec : SignFunctionSpec or str
        Generalized sign stem.
    tol : Tolerances
    shuffle : numpy.random.Generator, optional
        If given, the Schur forms feeding the sign and the square root are
        randomly reordered first.  The factors must not change; tests use
        this to probe uniqueness.

    Returns
    -------
    PolarFactors
        `s` is r-positive-definite, N- and (N Sigma)-selfadjoint; `w` is
        (N, N Sigma^{-1})-unitary.
    """
    pair = ProductPair.single(space)
    f = _prepare(f, pair)
    _require_nonsingular(f, tol)
    _check_double_adjoint(f, pair, tol)
    return _decompose(f, pair, _as_spec(spec), tol, Side.RIGHT, shuffle)


def left_polar_square(
    f: np.ndarray,
    space: ScalarProductSpace,
    spec: SignFunctionSpec | str,
    tol: Tolerances = DEFAULT_TOL,
    shuffle: np.random.Generator | None = None,
) -> PolarFactors:
    """Left decomposition ``F = S' W`` of a square matrix in one scalar product.

    `w` coincides with the right decomposition's `w`.
    """
    pair = ProductPair.single(space)
    f = _prepare(f, pair)
    _require_nonsingular(f, tol)
    _check_double_adjoint(f, pair, tol)
    return _decompose(f, pair, _as_spec(spec), tol, Side.LEFT, shuffle)


def right_polar_rect(
    f: np.ndarray,
    pair: ProductPair,
    spec: SignFunctionSpec | str,
    tol: Tolerances = DEFAULT_TOL,
    shuffle: np.random.Generator | None = None,
) -> PolarFactors:
    """Right decomposition ``F = W S`` of an ``m x n`` matrix, ``m >= n``.

    `w` has (M, N Sigma^{-1})-orthonormal columns and `s` is
    r-positive-definite, N- and (N Sigma)-selfadjoint.
    """
    m, n = pair.shape
    if m < n:
        raise DimensionMismatch(f"right decomposition needs m >= n, got {m}x{n}")
    f = _prepare(f, pair)
    _check_double_adjoint(f, pair, tol)
    return _decompose(f, pair, _as_spec(spec), tol, Side.RIGHT, shuffle)


def left_polar_rect(
    f: np.ndarray,
    pair: ProductPair,
    spec: SignFunctionSpec | str,
    tol: Tolerances = DEFAULT_TOL,
    shuffle: np.random.Generator | None = None,
) -> PolarFactors:
    """Left decomposition ``F = S W`` of an ``m x n`` matrix, ``m <= n``.

    `w` has (M Sigma, N)-orthonormal rows and `s` is r-positive-definite,
    M- and (M Sigma)-selfadjoint.
    """
    m, n = pair.shape
    if m > n:
        raise DimensionMismatch(f"left decomposition needs m <= n, got {m}x{n}")
    f = _prepare(f, pair)
    _check_double_adjoint(f, pair, tol)
    return _decompose(f, pair, _as_spec(spec), tol, Side.LEFT, shuffle)


def both_polar_square_two_products(
    f: np.ndarray,
    pair: ProductPair,
    spec: SignFunctionSpec | str,
    tol: Tolerances = DEFAULT_TOL,
    shuffle: np.random.Generator | None = None,
) -> tuple[PolarFactors, PolarFactors]:
    """``F = W S = S' W`` for square nonsingular `F` and two scalar products."""
    m, n = pair.shape
    if m != n:
        raise DimensionMismatch(f"two-sided decomposition needs a square F, got {m}x{n}")
    f = _prepare(f, pair)
    _require_nonsingular(f, tol)
    _check_double_adjoint(f, pair, tol)
    spec = _as_spec(spec)
    right = _decompose(f, pair, spec, tol, Side.RIGHT, shuffle)
    left = _decompose(f, pair, spec, tol, Side.LEFT, shuffle)
    return right, left


# -- certification -----------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    limit: float
    # "le": pass when value <= limit; "gt": pass when value > limit
    mode: str = "le"

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.value):
            return False
        return self.value <= self.limit if self.mode == "le" else self.value > self.limit


@dataclass(frozen=True)
class CertificationReport:
    checks: tuple[Check, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def residuals(self) -> dict[str, float]:
        return {c.name: c.value for c in self.checks}

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> float:
        for c in self.checks:
            if c.name == name:
                return c.value
        raise KeyError(name)

    def __add__(self, other: "CertificationReport") -> "CertificationReport":
        return CertificationReport(self.checks + other.checks)


def _norm(a) -> float:
    return float(np.linalg.norm(a))


def _as_pair(space_or_pair) -> ProductPair:
    if isinstance(space_or_pair, ProductPair):
        return space_or_pair
    return ProductPair.single(space_or_pair)


def certify(
    factors: PolarFactors,
    f: np.ndarray,
    space_or_pair: ScalarProductSpace | ProductPair,
    tol: Tolerances = DEFAULT_TOL,
) -> CertificationReport:
    """Measure every property the decomposition theorems assert about `factors`.

    Matrix identities ``X = Y`` are reported as
    ``||X - Y||_F / max(1, ||Y||_F, c)`` where ``c`` is the product of the
    norms of the factors that make up ``X``, and must not exceed
    ``tol.tol_eq``.  The r-positive-definiteness margin is
    ``min Re eig(S) / ||S||_F`` and must exceed ``tol.tol_class``.
    Determinant identities are only asserted for a single scalar product
    (``M == N``); they are checked to :data:`DET_TOL`.
    """
    pair = _as_pair(space_or_pair)
    f = np.asarray(f, dtype=np.complex128)
    w, s, sigma = factors.w, factors.s, factors.sigma
    right = factors.side is Side.RIGHT
    eq = tol.tol_eq
    checks: list[Check] = []

    def add(name, value, limit=eq, mode="le"):
        checks.append(Check(name, float(value), float(limit), mode))

    ns, nw, nsig = _norm(s), _norm(w), _norm(sigma)
    add("reconstruction", rel_residual(factors.product(), f, nw * ns))

    lam_s = eigenvalues(s)
    add("r_positive_margin", np.min(lam_s.real) / max(ns, np.finfo(float).tiny),
        tol.tol_class, "gt")

    space = pair.n_space if right else pair.m_space
    s_adj = adjoint_n(s, space)
    add("s_selfadjoint", rel_residual(s_adj, s))
    # (N Sigma)^{-1} S^# (N Sigma) = Sigma^{-1} S^[N] Sigma
    s_adj_twisted = np.linalg.solve(sigma, s_adj @ sigma)
    add("s_sigma_selfadjoint", rel_residual(s_adj_twisted, s))

    w_adj = adjoint_mn(w, pair)
    if right:
        # W^[M, N Sigma^{-1}] W = Sigma N^{-1} W^# M W
        gram_w = sigma @ w_adj @ w
        add("w_orthonormal_columns",
            rel_residual(gram_w, np.eye(w.shape[1]), nsig * _norm(w_adj) * nw))
    else:
        # W W^[M Sigma, N] = W N^{-1} W^# M Sigma
        gram_w = w @ w_adj @ sigma
        add("w_orthonormal_rows",
            rel_residual(gram_w, np.eye(w.shape[0]), nsig * _norm(w_adj) * nw))
    add("w_double_adjoint", rel_residual(double_adjoint(w, pair), w))

    add("sigma_commutes_s", rel_residual(sigma @ s, s @ sigma, 2 * nsig * ns))
    gram = adjoint_mn(f, pair) @ f if right else f @ adjoint_mn(f, pair)
    add("square_relation", rel_residual(s @ s, sigma @ gram, max(ns * ns, nsig * _norm(gram))))

    lam_sig = eigenvalues(sigma)
    add("sigma_unit_modulus", np.max(np.abs(np.abs(lam_sig) - 1.0)))

    det_sig = np.linalg.det(sigma)
    add("det_sigma_modulus", abs(abs(det_sig) - 1.0), DET_TOL)
    if pair.is_single and w.shape[0] == w.shape[1]:
        det_w = np.linalg.det(w)
        if pair.form is FormKind.REAL_BILINEAR:
            add("det_w", min(abs(det_w - 1.0), abs(det_w + 1.0)), DET_TOL)
        else:
            add("det_w", abs(abs(det_w) - 1.0), DET_TOL)
        if pair.form is not FormKind.COMPLEX_BILINEAR:
            add("det_sigma", abs(det_sig - 1.0), DET_TOL)
    return CertificationReport(tuple(checks))


def _prefixed(prefix: str, report: CertificationReport) -> CertificationReport:
    return CertificationReport(
        tuple(Check(prefix + c.name, c.value, c.limit, c.mode) for c in report.checks))


def certify_both(
    right: PolarFactors,
    left: PolarFactors,
    f: np.ndarray,
    pair: ScalarProductSpace | ProductPair,
    tol: Tolerances = DEFAULT_TOL,
) -> CertificationReport:
    """Certify both sides and the relations tying them together:
    a shared ``W``, ``S' W = W S`` and ``Sigma' W = W Sigma``."""
    pair = _as_pair(pair)
    report = _prefixed("right.", certify(right, f, pair, tol)) + _prefixed(
        "left.", certify(left, f, pair, tol))
    w = right.w
    nw = _norm(w)
    extra = (
        Check("w_agreement", rel_residual(left.w, w), tol.tol_eq),
        Check("s_similarity", rel_residual(left.s @ w, w @ right.s, _norm(left.s) * nw), tol.tol_eq),
        Check("sigma_similarity",
              rel_residual(left.sigma @ w, w @ right.sigma, _norm(left.sigma) * nw), tol.tol_eq),
    )
    return report + CertificationReport(extra)
