"""Generalized matrix sign functions and the principal square root.

Both are evaluated on the complex Schur form.  The sign stems used here are
constant on clusters of eigenvalues and have all derivatives zero, so every
diagonal block of ``sigma(T)`` is a multiple of the identity and only the
off-diagonal blocks need the Parlett recurrence.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import DEFAULT_TOL, Tolerances
from .eigenkernels import SchurForm, reorder, schur, sylvester_triangular
from .errors import (
    DimensionMismatch,
    NearDiscontinuity,
    NegativeRealEigenvalue,
    StemViolation,
    UndefinedAtZero,
)

__all__ = [
    "SignKind",
    "SignFunctionSpec",
    "SIGN1",
    "SIGN2",
    "SIGN3",
    "EigenClass",
    "SignResult",
    "stem_value",
    "generalized_sign",
    "principal_sqrt",
]


class SignKind(str, enum.Enum):
    SIGN1 = "sign1"
    SIGN2 = "sign2"
    SIGN3 = "sign3"
    CUSTOM = "custom"


@dataclass(frozen=True)
class SignFunctionSpec:
    """Which generalized sign stem to use.

    ``sign1`` is the half-plane sign extended by ``+1`` to the punctured
    imaginary axis, ``sign2`` is ``-1`` on the negative real axis and ``+1``
    elsewhere, and ``sign3`` maps ``z`` to ``conj(z) / |z|``.  A custom stem
    is any side-effect-free map ``complex -> complex``; it is taken to have
    all derivatives zero, and unit modulus and conjugation symmetry are
    checked on each spectrum it is applied to.
    """

    kind: SignKind
    custom_stem: Callable[[complex], complex] | None = field(default=None, compare=False)
    name: str | None = None

    def __post_init__(self):
        kind = SignKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if (kind is SignKind.CUSTOM) != (self.custom_stem is not None):
            raise ValueError("custom_stem must be given exactly when kind is 'custom'")

    @classmethod
    def custom(cls, stem: Callable[[complex], complex], name: str = "custom") -> "SignFunctionSpec":
        return cls(SignKind.CUSTOM, stem, name)

    @property
    def label(self) -> str:
        return self.name or self.kind.value

    @property
    def piecewise_constant(self) -> bool:
        return self.kind in (SignKind.SIGN1, SignKind.SIGN2)


SIGN1 = SignFunctionSpec(SignKind.SIGN1)
SIGN2 = SignFunctionSpec(SignKind.SIGN2)
SIGN3 = SignFunctionSpec(SignKind.SIGN3)


def _as_spec(spec) -> SignFunctionSpec:
    if isinstance(spec, SignFunctionSpec):
        return spec
    return SignFunctionSpec(SignKind(spec))


def stem_value(lam: complex, spec: SignFunctionSpec | str, scale: float = 1.0,
               tol: Tolerances = DEFAULT_TOL) -> complex:
    """Evaluate the stem pointwise, exactly as defined (no classification bands
    other than the one around the origin)."""
    spec = _as_spec(spec)
    lam = complex(lam)
    if abs(lam) <= tol.tol_class * scale:
        raise UndefinedAtZero(f"stem {spec.label} is undefined at {lam!r}", abs(lam))
    if spec.kind is SignKind.SIGN1:
        return -1.0 + 0j if lam.real < 0 else 1.0 + 0j
    if spec.kind is SignKind.SIGN2:
        return -1.0 + 0j if (lam.imag == 0 and lam.real < 0) else 1.0 + 0j
    if spec.kind is SignKind.SIGN3:
        return lam.conjugate() / abs(lam)
    return complex(spec.custom_stem(lam))


@dataclass(frozen=True)
class EigenClass:
    value: complex
    stem: complex
    distance: float
    """Distance from `value` to the nearest point where the stem is undefined
    or discontinuous."""


@dataclass(frozen=True, eq=False)
class SignResult:
    sigma: np.ndarray
    classification: tuple[EigenClass, ...]
    clusters: tuple[tuple[int, ...], ...]


def _distance(lam: complex, kind: SignKind) -> float:
    d0 = abs(lam)
    if kind is SignKind.SIGN1:
        return min(d0, abs(lam.real))
    if kind is SignKind.SIGN2:
        return min(d0, abs(lam.imag)) if lam.real < 0 else d0
    return d0


def _classify(lam: complex, spec: SignFunctionSpec, band: float) -> complex:
    if abs(lam) <= band:
        raise UndefinedAtZero(f"eigenvalue {lam:.3e} is numerically zero", abs(lam))
    if spec.kind is SignKind.SIGN1:
        if abs(lam.real) <= band:
            raise NearDiscontinuity(
                f"sign1: eigenvalue {lam:.6g} is within the classification band of the "
                "imaginary axis", abs(lam.real))
        return -1.0 + 0j if lam.real < 0 else 1.0 + 0j
    if spec.kind is SignKind.SIGN2:
        # the band snaps onto the negative real axis
        return -1.0 + 0j if (lam.real < 0 and abs(lam.imag) <= band) else 1.0 + 0j
    return stem_value(lam, spec, 0.0)


def _clusters(lam: np.ndarray, vals: np.ndarray | None, near: float):
    """Group eigenvalue positions closer than `near` (transitively), and, if
    `vals` is given, also those with equal stem values."""
    n = len(lam)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    same_tol = 64 * np.finfo(float).eps
    for i in range(n):
        for j in range(i + 1, n):
            if abs(lam[i] - lam[j]) <= near or (
                vals is not None and abs(vals[i] - vals[j]) <= same_tol
            ):
                parent[find(j)] = find(i)

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def _cluster_value(lam, vals, g, spec, band) -> complex:
    """Stem value shared by the eigenvalues in proximity cluster `g`."""
    gv = vals[g]
    if len(g) == 1:
        return complex(gv[0])
    same = 64 * np.finfo(float).eps
    uniform = np.ptp(gv.real) + np.ptp(gv.imag) <= same
    # a merged cluster is one eigenvalue as far as the stem is concerned; its
    # mean (a trace) is far more accurate than the scattered members of a
    # defective eigenvalue
    centre = _classify(complex(np.mean(lam[g])), spec, band)
    if spec.piecewise_constant and not (uniform and abs(gv[0] - centre) <= same):
        on_axis = spec.kind is SignKind.SIGN2 and centre.real < 0
        if not on_axis:
            raise NearDiscontinuity(
                f"{spec.label}: eigenvalues {lam[g]} are too close to separate but "
                "straddle a discontinuity", float(np.ptp(np.abs(lam[g]))))
    return centre


def _is_real(a: np.ndarray) -> bool:
    return not np.any(a.imag)


def _project_real(x: np.ndarray, tol: float) -> np.ndarray:
    scale = max(np.linalg.norm(x), 1.0)
    if np.linalg.norm(x.imag) <= tol * scale:
        return x.real.astype(np.complex128)
    return x


def _square(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {np.shape(a)}")
    return a


def generalized_sign(
    a: np.ndarray,
    spec: SignFunctionSpec | str,
    tol: Tolerances = DEFAULT_TOL,
    schur_form: SchurForm | None = None,
) -> SignResult:
    """Generalized matrix sign ``sigma(A)`` by the Schur-Parlett method.

    Parameters
    ----------
    a : (n, n) array_like
        Nonsingular matrix.
    spec : SignFunctionSpec or {'sign1', 'sign2', 'sign3'}
        The stem.
    tol : Tolerances
        ``tol_class`` sets the classification band around the origin and the
        stem discontinuities; ``tol_cluster`` the eigenvalue merge distance.
        Eigenvalues closer than ``tol_cluster * ||A||_F`` are treated as one
        eigenvalue located at their mean, which is how a defective eigenvalue
        scattered by rounding gets a single, correct stem value.
    schur_form : SchurForm, optional
        A precomputed Schur form of `a`, in any diagonal order.

    Returns
    -------
    SignResult

    Raises
    ------
    UndefinedAtZero
        An eigenvalue is numerically zero.
    NearDiscontinuity
        An eigenvalue or a cluster cannot be placed on a definite side of a
        stem discontinuity.  For ``sign2`` the band (and a cluster whose mean
        lies in it) snaps onto the negative real axis instead.
    StemViolation
        A custom stem is not unit-modulus or not conjugation-symmetric on this
        spectrum, or ``sigma(A) A`` acquires a negative real eigenvalue.
    """
    spec = _as_spec(spec)
    a = _square(a)
    scale = float(np.linalg.norm(a))
    band = tol.tol_class * scale
    sf = schur_form if schur_form is not None else schur(a)
    lam = sf.diagonal

    vals = np.array([_classify(complex(z), spec, band) for z in lam])
    if spec.kind is SignKind.CUSTOM:
        _check_custom(lam, vals, spec, band, tol)

    near = tol.tol_cluster * scale
    for g in _clusters(lam, None, near):
        vals[g] = _cluster_value(lam, vals, g, spec, band)

    # eigenvalues sharing a stem value form one constant diagonal block
    groups = _clusters(lam, vals, near)
    ids = np.empty(len(lam), dtype=int)
    cvals = []
    for cid, g in enumerate(groups):
        ids[g] = cid
        cvals.append(complex(vals[g[0]]))

    sf = reorder(sf, ids.tolist(), tol)
    sizes = [len(g) for g in groups]
    f_t = _parlett_constant_blocks(sf.t, sizes, cvals, tol)
    sigma = sf.q @ f_t @ sf.q.conj().T
    if _is_real(a):
        sigma = _project_real(sigma, tol.tol_eq)

    classification = tuple(
        EigenClass(complex(z), complex(v), _distance(complex(z), spec.kind))
        for z, v in zip(lam, vals)
    )
    return SignResult(sigma, classification, tuple(tuple(g) for g in groups))


def _check_custom(lam, vals, spec, band, tol):
    mod_err = np.max(np.abs(np.abs(vals) - 1.0))
    if mod_err > tol.tol_eq:
        raise StemViolation(f"custom stem {spec.label} is not unit-modulus on this spectrum",
                            float(mod_err))
    for z, v in zip(lam, vals):
        conj_err = abs(complex(spec.custom_stem(complex(z).conjugate())) - v.conjugate())
        if conj_err > tol.tol_eq:
            raise StemViolation(f"custom stem {spec.label} breaks conjugation symmetry at {z:.6g}",
                                float(conj_err))
        prod = z * v
        if prod.real < 0 and abs(prod.imag) <= band:
            raise StemViolation(
                f"custom stem {spec.label} puts sigma(A)A on the negative real axis at {z:.6g}",
                abs(prod.imag))


def _parlett_constant_blocks(t: np.ndarray, sizes, cvals, tol: Tolerances) -> np.ndarray:
    """Block Parlett recurrence when every diagonal block maps to ``c_k I``."""
    n = t.shape[0]
    edges = np.concatenate([[0], np.cumsum(sizes)])
    blocks = [slice(edges[k], edges[k + 1]) for k in range(len(sizes))]
    f = np.zeros((n, n), dtype=np.complex128)
    for k, b in enumerate(blocks):
        f[b, b] = cvals[k] * np.eye(sizes[k])
    nb = len(blocks)
    for j in range(1, nb):
        bj = blocks[j]
        for i in range(j - 1, -1, -1):
            bi = blocks[i]
            rhs = (cvals[i] - cvals[j]) * t[bi, bj]
            if j - i > 1:
                mid = slice(edges[i + 1], edges[j])
                rhs = rhs + f[bi, mid] @ t[mid, bj] - t[bi, mid] @ f[mid, bj]
            f[bi, bj] = sylvester_triangular(t[bi, bi], t[bj, bj], rhs, tol)
    return f


def principal_sqrt(
    a: np.ndarray,
    tol: Tolerances = DEFAULT_TOL,
    schur_form: SchurForm | None = None,
) -> np.ndarray:
    """Principal square root by the triangular Schur recurrence.

    Every eigenvalue of the result lies in the open right half-plane.  Real
    input gives real output.

    Raises
    ------
    UndefinedAtZero
        An eigenvalue is numerically zero.
    NegativeRealEigenvalue
        An eigenvalue lies on the negative real axis (within
        ``tol_class * ||A||_F``).
    """
    a = _square(a)
    scale = float(np.linalg.norm(a))
    band = tol.tol_class * scale
    sf = schur_form if schur_form is not None else schur(a)
    t = sf.t
    lam = np.diag(t)
    for z in lam:
        if abs(z) <= band:
            raise UndefinedAtZero(f"eigenvalue {z:.3e} is numerically zero", abs(z))
        if z.real < 0 and abs(z.imag) <= band:
            raise NegativeRealEigenvalue(
                f"eigenvalue {z:.6g} lies on the negative real axis", abs(z.imag))

    n = t.shape[0]
    r = np.zeros((n, n), dtype=np.complex128)
    d = np.sqrt(lam)
    # sqrt of a value with Re<0 and Im=-0.0 lands in the left half-plane
    d = np.where(d.real < 0, -d, d)
    if n > 1:
        # two eigenvalues on opposite sides of the negative real axis and
        # close together (typically a defective negative eigenvalue split by
        # rounding) make r[i, i] + r[j, j] vanish
        pair_sum = np.abs(d[:, None] + d[None, :]) + np.diag(np.full(n, np.inf))
        i, j = np.unravel_index(np.argmin(pair_sum), pair_sum.shape)
        if pair_sum[i, j] <= tol.tol_cluster * np.sqrt(scale):
            raise NegativeRealEigenvalue(
                f"eigenvalues {lam[i]:.6g} and {lam[j]:.6g} straddle the negative real axis",
                float(pair_sum[i, j]))
    r[np.diag_indices(n)] = d
    for j in range(1, n):
        for i in range(j - 1, -1, -1):
            s = t[i, j] - r[i, i + 1 : j] @ r[i + 1 : j, j]
            r[i, j] = s / (r[i, i] + r[j, j])
    x = sf.q @ r @ sf.q.conj().T
    if _is_real(a):
        x = _project_real(x, tol.tol_eq)
    return x
