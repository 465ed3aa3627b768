"""Seeded random instances and brute-force oracles for the test suites.

Random product matrices are always orthosymmetric (``N^# = beta N`` with
``|beta| = 1``, and the same ``beta`` for both members of a pair), which
makes ``(F^[M,N])^[N,M] = F`` hold for every ``F``.  Non-orthosymmetric
coverage comes from the fixed fixtures at the bottom of this module.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import FormKind, ProductPair, ScalarProductSpace
from .errors import GenerationExhausted, SingularGram

__all__ = [
    "Family",
    "InstanceRecipe",
    "Instance",
    "gen_instance",
    "structured_matrix",
    "oracle_stem",
    "oracle_sign_diagonalizable",
    "oracle_classical_polar",
    "diagonalizable_instance",
    "jordan_fixture",
    "random_r_positive_definite",
    "MAX_TRIES",
]

MAX_TRIES = 200


class Family(str, enum.Enum):
    IDENTITY = "identity"
    SYMMETRIC = "symmetric"
    SKEW_SYMMETRIC = "skew_symmetric"
    HERMITIAN = "hermitian"
    Z = "Z"
    J = "J"
    D = "D"


@dataclass(frozen=True)
class InstanceRecipe:
    """Everything needed to regenerate an instance bit for bit.

    `n` is the domain dimension and `m` the codomain dimension (``None``
    means one scalar product on a square ``F``).  `p` and `q` size the
    ``D = diag(I_p, -I_q)`` family.  `spec`, if set, makes the generator
    reject Gram matrices whose spectrum comes within ``margin * ||G||_F`` of
    a discontinuity of that stem or that has differently-signed eigenvalues
    closer than that.  Square instances screen both Gram matrices, so the
    right and left drivers apply to the same instance.
    """

    family: Family
    form: FormKind
    n: int
    m: int | None = None
    seed: int = 0
    cond_cap: float = 1e6
    spec: str | None = None
    margin: float = 1e-3
    p: int | None = None
    q: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "form", FormKind(self.form))


@dataclass(frozen=True, eq=False)
class Instance:
    f: np.ndarray
    product: ScalarProductSpace | ProductPair
    recipe: InstanceRecipe

    @property
    def pair(self) -> ProductPair:
        if isinstance(self.product, ProductPair):
            return self.product
        return ProductPair.single(self.product)


def structured_matrix(family: Family | str, n: int, p: int | None = None,
                      q: int | None = None) -> np.ndarray:
    """The reversal matrix ``Z``, the symplectic ``J`` or the signature ``D``."""
    family = Family(family)
    if family is Family.Z:
        return np.fliplr(np.eye(n))
    if family is Family.J:
        if n % 2:
            raise ValueError("J needs an even dimension")
        h = n // 2
        return np.block([[np.zeros((h, h)), np.eye(h)], [-np.eye(h), np.zeros((h, h))]])
    if family is Family.D:
        if p is None or q is None:
            p = (n + 1) // 2
            q = n - p
        if p + q != n:
            raise ValueError(f"p + q must equal n ({p} + {q} != {n})")
        return np.diag(np.concatenate([np.ones(p), -np.ones(q)]))
    raise ValueError(f"{family.value} is not a structured family")


def _gauss(rng, shape, real):
    if real:
        return rng.standard_normal(shape)
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _cond(a):
    s = np.linalg.svd(a, compute_uv=False)
    return np.inf if s[-1] == 0 else s[0] / s[-1]


def _product_matrix(rng, family: Family, form: FormKind, n: int, phase: complex, recipe):
    real = form is FormKind.REAL_BILINEAR
    if family is Family.IDENTITY:
        base = np.eye(n)
    elif family in (Family.Z, Family.J, Family.D):
        p = recipe.p if n == recipe.n else None
        q = recipe.q if n == recipe.n else None
        base = structured_matrix(family, n, p, q)
    elif family is Family.SYMMETRIC:
        a = _gauss(rng, (n, n), real or form is FormKind.SESQUILINEAR)
        base = a + a.T
    elif family is Family.SKEW_SYMMETRIC:
        if n % 2:
            raise ValueError("skew-symmetric product matrices need an even dimension")
        a = _gauss(rng, (n, n), real or form is FormKind.SESQUILINEAR)
        base = a - a.T
    else:  # HERMITIAN
        if form is FormKind.COMPLEX_BILINEAR:
            raise ValueError("a complex Hermitian matrix is not orthosymmetric for a bilinear form")
        a = _gauss(rng, (n, n), real)
        base = a + a.conj().T
    return phase * base


def _gram_ok(gram: np.ndarray, spec: str | None, margin: float) -> bool:
    if spec is None:
        return True
    lam = np.linalg.eigvals(gram)
    gap = margin * np.linalg.norm(gram)
    if np.min(np.abs(lam)) <= gap:
        return False
    stems = oracle_stem(spec)
    on_axis = 1e-10 * np.linalg.norm(gram)
    if spec == "sign1" and np.min(np.abs(lam.real)) <= gap:
        return False
    if spec == "sign2":
        near = (lam.real < 0) & (np.abs(lam.imag) > on_axis) & (np.abs(lam.imag) <= gap)
        if np.any(near):
            return False
    vals = []
    for z in lam:
        if spec == "sign2" and z.real < 0 and abs(z.imag) <= on_axis:
            vals.append(-1.0)
        else:
            vals.append(stems(complex(z)))
    vals = np.array(vals)
    for i in range(len(lam)):
        for j in range(i + 1, len(lam)):
            if abs(vals[i] - vals[j]) > 1e-12 and abs(lam[i] - lam[j]) <= gap:
                return False
    return True


def gen_instance(recipe: InstanceRecipe) -> Instance:
    """Draw ``F`` and the scalar product(s) described by `recipe`.

    ``F`` is resampled until its condition number (or that of the Gram
    matrix for rectangular problems) is at most ``recipe.cond_cap`` and, if
    ``recipe.spec`` is set, until the Gram spectrum is comfortably
    classifiable.  Gives up with :class:`GenerationExhausted` after
    :data:`MAX_TRIES` draws.
    """
    from .core import adjoint_mn

    rng = np.random.default_rng(recipe.seed)
    form = recipe.form
    real = form is FormKind.REAL_BILINEAR
    n = recipe.n
    m = recipe.m
    phase = 1.0
    if form is FormKind.SESQUILINEAR and recipe.family in (
        Family.SYMMETRIC, Family.SKEW_SYMMETRIC, Family.HERMITIAN
    ):
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi))

    for _ in range(MAX_TRIES):
        n_mat = _product_matrix(rng, recipe.family, form, n, phase, recipe)
        if _cond(n_mat) > recipe.cond_cap:
            continue
        if m is None:
            product = ScalarProductSpace(n_mat, form)
            pair = ProductPair.single(product)
            rows = n
        else:
            m_mat = _product_matrix(rng, recipe.family, form, m, phase, recipe)
            if _cond(m_mat) > recipe.cond_cap:
                continue
            pair = ProductPair(ScalarProductSpace(m_mat, form), ScalarProductSpace(n_mat, form))
            product = pair
            rows = m
        f = _gauss(rng, (rows, n), real)
        if rows == n and _cond(f) > recipe.cond_cap:
            continue
        adj = adjoint_mn(f, pair)
        grams = []
        if rows >= n:
            grams.append(adj @ f)
        if rows <= n:
            grams.append(f @ adj)
        if any(_cond(g) > recipe.cond_cap for g in grams):
            continue
        if not all(_gram_ok(g, recipe.spec, recipe.margin) for g in grams):
            continue
        f.flags.writeable = False
        return Instance(f, product, recipe)
    raise GenerationExhausted(f"no admissible instance after {MAX_TRIES} draws for {recipe}")


# -- oracles -----------------------------------------------------------------


def oracle_stem(spec: str):
    """Pointwise stems written out independently of :mod:`scalarpolar.matfunc`."""

    def sign1(z):
        return -1.0 if z.real < 0 else 1.0

    def sign2(z):
        return -1.0 if (z.imag == 0 and z.real < 0) else 1.0

    def sign3(z):
        return np.conj(z) / abs(z)

    return {"sign1": sign1, "sign2": sign2, "sign3": sign3}[str(spec)]


def oracle_sign_diagonalizable(v: np.ndarray, lam, spec: str) -> np.ndarray:
    """``V diag(f(lam_i)) V^{-1}`` for ``A = V diag(lam) V^{-1}``."""
    v = np.asarray(v, dtype=np.complex128)
    f = oracle_stem(spec)
    d = np.array([f(complex(z)) for z in np.atleast_1d(lam)], dtype=np.complex128)
    return np.linalg.solve(v.T, (v * d).T).T


def oracle_classical_polar(f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Euclidean polar ``F = U S`` with ``S = sqrt(F^* F)`` from a Hermitian
    eigendecomposition."""
    f = np.asarray(f, dtype=np.complex128)
    gram = f.conj().T @ f
    mu, v = np.linalg.eigh(gram)
    if mu[0] <= 1e-12 * mu[-1]:
        raise SingularGram("F^* F is singular", float(mu[0] / mu[-1]))
    s = (v * np.sqrt(mu)) @ v.conj().T
    u = np.linalg.solve(s.T, f.T).T
    return u, s


def _well_conditioned(rng, n, real, spread=2.0):
    q, _ = np.linalg.qr(_gauss(rng, (n, n), real))
    r, _ = np.linalg.qr(_gauss(rng, (n, n), real))
    return q @ np.diag(rng.uniform(1.0, spread, n)) @ r


def diagonalizable_instance(n: int, spec: str, seed: int, real: bool = False,
                            min_gap: float = 0.1):
    """``(A, V, lam)`` with ``A = V diag(lam) V^{-1}``, distinct eigenvalues at
    least `min_gap` apart and at least `min_gap` from the stem's
    discontinuities; ``cond(V) <= 10``.  With ``real=True`` the eigenvalues
    come in conjugate pairs and ``A`` is real."""
    rng = np.random.default_rng(seed)
    for _ in range(MAX_TRIES):
        if real:
            vals = []
            while len(vals) < n:
                if n - len(vals) >= 2 and rng.random() < 0.5:
                    z = complex(rng.uniform(-3, 3), rng.uniform(0.2, 3))
                    vals += [z, z.conjugate()]
                else:
                    vals.append(complex(rng.uniform(-3, 3), 0.0))
            lam = np.array(vals)
        else:
            lam = rng.uniform(-3, 3, n) + 1j * rng.uniform(-3, 3, n)
            if spec == "sign2" and n >= 2:
                # exercise the negative real axis itself
                lam[0] = complex(-rng.uniform(0.5, 3), 0.0)
        if np.min(np.abs(lam)) < min_gap:
            continue
        if spec == "sign1" and np.min(np.abs(lam.real)) < min_gap:
            continue
        if spec == "sign2" and np.any((lam.real < 0) & (lam.imag != 0) & (np.abs(lam.imag) < min_gap)):
            continue
        d = np.abs(lam[:, None] - lam[None, :]) + np.eye(n) * 10
        if np.min(d) < min_gap:
            continue
        if real:
            # real basis spanning each conjugate pair
            v = np.empty((n, n), dtype=np.complex128)
            k = 0
            while k < n:
                if lam[k].imag != 0:
                    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
                    v[:, k], v[:, k + 1] = x, x.conj()
                    k += 2
                else:
                    v[:, k] = rng.standard_normal(n)
                    k += 1
        else:
            v = _gauss(rng, (n, n), False)
        if _cond(v) > 10:
            continue
        a = np.linalg.solve(v.T, (v * lam).T).T
        if real:
            a = a.real.astype(np.complex128)
        return a, v, lam
    raise GenerationExhausted(f"no diagonalizable instance for n={n}, spec={spec}, seed={seed}")


def jordan_fixture(blocks: list[tuple[complex, int]], seed: int = 0):
    """``(A, V, J)`` with ``A = V J V^{-1}``, ``J`` a direct sum of Jordan blocks
    ``(eigenvalue, size)`` and ``cond(V) <= 2``."""
    rng = np.random.default_rng(seed)
    n = sum(size for _, size in blocks)
    j = np.zeros((n, n), dtype=np.complex128)
    k = 0
    for lam, size in blocks:
        for i in range(size):
            j[k + i, k + i] = lam
            if i + 1 < size:
                j[k + i, k + i + 1] = 1.0
        k += size
    v = _well_conditioned(rng, n, real=False)
    a = v @ j @ np.linalg.inv(v)
    return a, v, j


def random_r_positive_definite(n: int, seed: int):
    """``X = V diag(mu) V^{-1}`` with ``Re mu > 0`` and ``cond(V) <= 10``."""
    rng = np.random.default_rng(seed)
    for _ in range(MAX_TRIES):
        mu = rng.uniform(0.2, 3, n) + 1j * rng.uniform(-3, 3, n)
        v = _gauss(rng, (n, n), False)
        if _cond(v) <= 10:
            return np.linalg.solve(v.T, (v * mu).T).T
    raise GenerationExhausted(f"no r-positive-definite instance for n={n}, seed={seed}")
