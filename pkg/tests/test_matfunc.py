import numpy as np
import pytest
import scipy.linalg as sla

from scalarpolar.core import FormKind, adjoint_n
from scalarpolar.errors import (
    NearDiscontinuity,
    NegativeRealEigenvalue,
    PreconditionViolation,
    StemViolation,
    UndefinedAtZero,
)
from scalarpolar.harness import (
    Family,
    InstanceRecipe,
    diagonalizable_instance,
    gen_instance,
    jordan_fixture,
    oracle_sign_diagonalizable,
    random_r_positive_definite,
)
from scalarpolar.matfunc import (
    SIGN1,
    SIGN2,
    SIGN3,
    SignFunctionSpec,
    generalized_sign,
    principal_sqrt,
    stem_value,
)

from conftest import assert_close

STEMS = ["sign1", "sign2", "sign3"]


def sign(a, spec):
    return generalized_sign(np.asarray(a, dtype=complex), spec).sigma


class TestStem:
    @pytest.mark.parametrize("lam,spec,expected", [
        (-3, "sign1", -1), (2, "sign1", 1), (2j, "sign1", 1), (-1 + 5j, "sign1", -1),
        (-3, "sign2", -1), (-3 + 0.1j, "sign2", 1), (2j, "sign2", 1), (5, "sign2", 1),
        (3 - 4j, "sign3", (3 + 4j) / 5), (-2, "sign3", -1), (1j, "sign3", -1j),
    ])
    def test_values(self, lam, spec, expected):
        assert abs(stem_value(lam, spec) - expected) <= 1e-15

    @pytest.mark.parametrize("spec", STEMS)
    def test_zero(self, spec):
        with pytest.raises(UndefinedAtZero):
            stem_value(0, spec)

    def test_custom(self):
        spec = SignFunctionSpec.custom(lambda z: -1.0 if z.real < 0 else 1.0, "halfplane")
        assert stem_value(-2 + 1j, spec) == -1
        assert spec.label == "halfplane"
        assert not spec.piecewise_constant

    def test_custom_requires_callable(self):
        with pytest.raises(ValueError):
            SignFunctionSpec("custom")
        with pytest.raises(ValueError):
            SignFunctionSpec("sign1", custom_stem=abs)


class TestSignExamples:
    def test_negative_scalar_multiple(self):
        assert_close(sign(np.diag([-4, -4]), SIGN2), -np.eye(2))

    def test_imaginary_pair(self):
        assert_close(sign(np.diag([4j, -4j]), SIGN3), np.diag([-1j, 1j]))

    @pytest.mark.parametrize("spec", STEMS)
    def test_identity(self, spec):
        assert_close(sign(np.eye(3), spec), np.eye(3))

    @pytest.mark.parametrize("spec", STEMS)
    def test_defective_positive(self, spec):
        assert_close(sign([[1, 1], [0, 1]], spec), np.eye(2))

    def test_triangular_mixed_signs(self):
        # [[1, 1], [0, -1]]: sigma = [[1, x], [0, -1]] with sigma A = A sigma
        assert_close(sign([[1, 1], [0, -1]], SIGN1), [[1, 1], [0, -1]])

    def test_sign2_off_axis(self):
        assert_close(sign(np.diag([-1 + 1j, -1 - 1j, -2]), SIGN2), np.diag([1, 1, -1]))

    def test_real_input_real_output(self, rng):
        a, _, _ = diagonalizable_instance(5, "sign1", seed=3, real=True)
        s = sign(a, SIGN1)
        assert not np.any(s.imag)

    def test_classification_report(self):
        res = generalized_sign(np.diag([2.0, -3.0]), SIGN1)
        assert [c.stem for c in res.classification] in ([1, -1], [-1, 1])
        assert sorted(len(g) for g in res.clusters) == [1, 1]
        assert min(c.distance for c in res.classification) == pytest.approx(2.0)


class TestSignErrors:
    @pytest.mark.parametrize("spec", STEMS)
    def test_singular(self, spec):
        with pytest.raises(UndefinedAtZero) as info:
            sign(np.diag([0.0, 1.0]), spec)
        assert isinstance(info.value, PreconditionViolation)
        assert info.value.clause == "undefined-at-zero"

    def test_sign1_on_imaginary_axis(self):
        with pytest.raises(NearDiscontinuity):
            sign(np.diag([1j, 1.0]), SIGN1)

    def test_sign1_cluster_straddles_axis(self):
        with pytest.raises(NearDiscontinuity):
            sign(np.diag([1j + 1e-6, 1j - 1e-6]), SIGN1)

    def test_sign2_cluster_mean_on_axis(self):
        # a close conjugate pair around the negative axis is one eigenvalue
        assert_close(sign(np.diag([-2 + 1e-6j, -2 - 1e-6j]), SIGN2), -np.eye(2))

    def test_sign2_cluster_off_axis_straddle(self):
        # the pair is merged, its mean is off the axis, but one member snaps
        with pytest.raises(NearDiscontinuity):
            sign(np.diag([-2 + 1e-6j, -2 + 1e-12j]), SIGN2)

    def test_sign2_snaps_to_axis(self):
        assert_close(sign(np.diag([-2 + 1e-13j, 3]), SIGN2), np.diag([-1, 1]))

    def test_custom_not_unimodular(self):
        with pytest.raises(StemViolation):
            sign(np.eye(2), SignFunctionSpec.custom(lambda z: 2.0))

    def test_custom_not_conjugation_symmetric(self):
        with pytest.raises(StemViolation):
            sign(np.diag([1.0, 2.0]), SignFunctionSpec.custom(lambda z: 1j))

    def test_custom_negative_real_product(self):
        with pytest.raises(StemViolation):
            sign(np.eye(2), SignFunctionSpec.custom(lambda z: -1.0))

    def test_custom_matches_builtin(self, rng):
        a, _, _ = diagonalizable_instance(4, "sign3", seed=11)
        custom = SignFunctionSpec.custom(lambda z: z.conjugate() / abs(z))
        assert_close(sign(a, custom), sign(a, SIGN3), atol=1e-12)


@pytest.mark.parametrize("spec", STEMS)
@pytest.mark.parametrize("real", [False, True])
def test_oracle_agreement(spec, real):
    for seed in range(30):
        n = 1 + seed % 7
        a, v, lam = diagonalizable_instance(n, spec, seed=seed, real=real)
        oracle = oracle_sign_diagonalizable(v, lam, spec)
        assert np.linalg.norm(sign(a, spec) - oracle) <= 1e-8 * max(1, np.linalg.norm(oracle))


JORDAN = [
    [(2 + 1j, 2)],
    [(-1.5 + 0.5j, 3)],
    [(1 - 2j, 2), (-3 + 1j, 1)],
    [(-1 - 1j, 2), (2 + 0.5j, 2)],
    [(0.5 + 2j, 3), (-2 - 0.7j, 2)],
    # defective eigenvalues on the sign2 discontinuity, scattered by rounding
    [(-4.0, 3)],
    [(3.0, 2), (-1.0, 3)],
]


@pytest.mark.parametrize("spec", STEMS)
@pytest.mark.parametrize("blocks", JORDAN)
def test_jordan_fixtures(spec, blocks):
    a, v, j = jordan_fixture(blocks, seed=len(blocks))
    oracle = oracle_sign_diagonalizable(v, np.diag(j), spec)
    assert np.linalg.norm(sign(a, spec) - oracle) <= 1e-8 * np.linalg.norm(oracle)


@pytest.mark.parametrize("spec", STEMS)
def test_algebraic_properties(spec):
    for seed in range(20):
        n = 1 + seed % 8
        a, _, _ = diagonalizable_instance(n, spec, seed=100 + seed)
        s = sign(a, spec)
        scale = max(1, np.linalg.norm(a) * np.linalg.norm(s))
        # commutes with its argument
        assert np.linalg.norm(s @ a - a @ s) <= 1e-8 * scale
        # spectrum on the unit circle
        assert np.max(np.abs(np.abs(np.linalg.eigvals(s)) - 1)) <= 1e-8
        # conjugation symmetry
        assert np.linalg.norm(sign(a.conj(), spec) - s.conj()) <= 1e-8 * max(1, np.linalg.norm(s))
        if spec != "sign3":
            assert np.linalg.norm(s @ s - np.eye(n)) <= 1e-8 * max(1, np.linalg.norm(s) ** 2)


@pytest.mark.parametrize("spec", STEMS)
@pytest.mark.parametrize("form,family", [
    (FormKind.REAL_BILINEAR, Family.D),
    (FormKind.COMPLEX_BILINEAR, Family.SYMMETRIC),
    (FormKind.SESQUILINEAR, Family.HERMITIAN),
    (FormKind.SESQUILINEAR, Family.J),
])
def test_preserves_selfadjointness(spec, form, family):
    for seed in range(5):
        inst = gen_instance(InstanceRecipe(family, form, 4, seed=seed, spec=spec))
        space = inst.product
        g = adjoint_n(inst.f, space) @ inst.f
        s = sign(g, spec)
        assert np.linalg.norm(adjoint_n(s, space) - s) <= 1e-8 * max(1, np.linalg.norm(s))


class TestSqrt:
    def test_scalar_multiple(self):
        assert_close(principal_sqrt(np.diag([4.0, 4.0])), 2 * np.eye(2))

    def test_triangular(self):
        assert_close(principal_sqrt(np.array([[4.0, 1.0], [0.0, 9.0]])), [[2, 0.2], [0, 3]])

    def test_complex_scalar(self):
        assert_close(principal_sqrt(np.array([[-3 - 4j]])), [[1 - 2j]])

    def test_identity(self):
        assert_close(principal_sqrt(np.eye(3)), np.eye(3))

    def test_real_input_real_output(self):
        x = principal_sqrt(np.array([[0.0, -1.0], [1.0, 0.0]]) + 2 * np.eye(2))
        assert not np.any(x.imag)
        assert_close(x @ x, [[2, -1], [1, 2]])

    def test_negative_real_eigenvalue(self):
        with pytest.raises(NegativeRealEigenvalue) as info:
            principal_sqrt(np.diag([-1.0, 1.0]))
        assert info.value.clause == "negative-real-eigenvalue"

    def test_singular(self):
        with pytest.raises(UndefinedAtZero):
            principal_sqrt(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_defective_negative_eigenvalue(self):
        a, _, _ = jordan_fixture([(-4.0, 3)], seed=5)
        with pytest.raises(NegativeRealEigenvalue):
            principal_sqrt(a)

    def test_conjugate_pair_near_axis_is_fine(self):
        lam = np.array([-4 + 1e-2j, -4 - 1e-2j])
        x = principal_sqrt(np.diag(lam))
        assert_close(x @ x, np.diag(lam))

    def test_round_trip(self):
        for seed in range(40):
            x = random_r_positive_definite(1 + seed % 8, seed)
            y = principal_sqrt(x @ x)
            assert np.linalg.norm(y - x) <= 1e-8 * np.linalg.norm(x)
            assert np.min(np.linalg.eigvals(y).real) > 0

    def test_agrees_with_scipy(self, rng):
        for n in range(1, 7):
            a = random_r_positive_definite(n, 1000 + n) @ random_r_positive_definite(n, 2000 + n)
            if np.any((np.linalg.eigvals(a).real < 0) & (abs(np.linalg.eigvals(a).imag) < 1e-3)):
                continue
            assert np.linalg.norm(principal_sqrt(a) - sla.sqrtm(a)) <= 1e-8 * np.linalg.norm(a)
