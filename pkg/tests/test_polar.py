import numpy as np
import pytest

from scalarpolar.core import FormKind, ProductPair, ScalarProductSpace, adjoint_mn, adjoint_n
from scalarpolar.errors import (
    DimensionMismatch,
    DoubleAdjointViolation,
    PreconditionViolation,
    SingularGram,
    SingularInput,
)
from scalarpolar.harness import Family, InstanceRecipe, gen_instance, oracle_classical_polar
from scalarpolar.polar import (
    Check,
    CertificationReport,
    PolarFactors,
    Side,
    both_polar_square_two_products,
    certify,
    certify_both,
    left_polar_rect,
    left_polar_square,
    right_polar_rect,
    right_polar_square,
)

from conftest import CB, RB, SQ, assert_close, pair, space
from instances import decompose, instance

R2, R5 = np.sqrt(2), np.sqrt(5)


def _rel(x, y):
    return np.linalg.norm(x - y) / max(1.0, np.linalg.norm(y))


class TestRightSquare:
    def test_scalar_complex_bilinear(self):
        p = right_polar_square([[-1 + 2j]], space([[1]], CB), "sign1")
        assert_close(p.w, [[1j]])
        assert_close(p.s, [[2 + 1j]])
        assert_close(p.sigma, [[-1]])

    def test_scalar_sesquilinear(self):
        p = right_polar_square([[-1 + 2j]], space([[1]], SQ), "sign1")
        assert_close(p.w, [[(-1 + 2j) / R5]])
        assert_close(p.s, [[R5]])

    @pytest.mark.parametrize("spec,w,s,sigma", [
        ("sign2", -1, 1 - 2j, 1),
        ("sign3", (-1 + 2j) / R5, R5, (-3 + 4j) / 5),
    ])
    def test_scalar_other_stems(self, spec, w, s, sigma):
        p = right_polar_square([[-1 + 2j]], space([[1]], CB), spec)
        assert_close(p.w, [[w]])
        assert_close(p.s, [[s]])
        assert_close(p.sigma, [[sigma]])

    def test_real_bilinear_indefinite(self):
        p = right_polar_square([[0, 4], [1, 0]], space(np.diag([1, -4]), RB), "sign2")
        assert_close(p.w, [[0, 2], [0.5, 0]])
        assert_close(p.s, 2 * np.eye(2))
        assert_close(p.sigma, -np.eye(2))
        assert not np.any(p.w.imag)

    def test_non_orthosymmetric(self):
        p = right_polar_square(np.diag([-1, 4j]), space([[0, 1], [2j, 0]], SQ), "sign3")
        assert_close(p.sigma, np.diag([-1j, 1j]))
        assert_close(p.s, 2 * np.eye(2))
        assert_close(p.w, np.diag([-0.5, 2j]))

    def test_symplectic(self):
        p = right_polar_square(np.diag([1j, -4j]), space([[0, 1], [-1, 0]], SQ), "sign2")
        assert_close(p.w, np.diag([0.5j, -2j]))
        assert_close(p.s, 2 * np.eye(2))

    def test_product(self):
        f = np.array([[0, 4], [1, 0]])
        p = right_polar_square(f, space(np.diag([1, -4]), RB), "sign2")
        assert p.side is Side.RIGHT
        assert_close(p.product(), f)


class TestLeftSquare:
    def test_non_orthosymmetric(self):
        p = left_polar_square(np.diag([-1, 4j]), space([[0, 1], [2j, 0]], SQ), "sign3")
        assert_close(p.s, 2 * np.eye(2))
        assert_close(p.w, np.diag([-0.5, 2j]))

    def test_unitary_euclidean(self, rng):
        q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
        p = left_polar_square(q, space(np.eye(4), SQ), "sign1")
        assert_close(p.s, np.eye(4), atol=1e-12)
        assert_close(p.w, q, atol=1e-12)

    def test_symplectic_conjugated(self):
        f = np.diag([1j, -4j])
        sp = space([[0, 1], [-1, 0]], SQ)
        right = right_polar_square(f, sp, "sign2")
        left = left_polar_square(f, sp, "sign2")
        assert_close(left.s, 2 * np.eye(2))
        assert_close(left.s, right.w @ right.s @ np.linalg.inv(right.w))
        assert_close(left.w, right.w)


class TestRect:
    m66 = [[0, 1], [1j, 0]]

    def test_tall_sesquilinear(self):
        p = right_polar_rect([[1], [-4j]], pair(self.m66, [[1 + 1j]], SQ), "sign3")
        assert_close(p.sigma, [[-1]])
        assert_close(p.s, [[2]])
        assert_close(p.w, [[0.5], [-2j]])

    def test_tall_complex_bilinear_rejected(self):
        with pytest.raises(DoubleAdjointViolation) as info:
            right_polar_rect([[1], [-4j]], pair(self.m66, [[1 + 1j]], CB), "sign3")
        assert info.value.clause == "double-adjoint"
        assert info.value.residual > 0.1

    def test_square_two_complex_bilinear(self):
        p = right_polar_rect(np.diag([-1, 4]), pair(self.m66, [[0, 1j], [-1, 0]], CB), "sign3")
        assert_close(p.sigma, np.diag([-1j, -1j]))
        assert_close(p.s, 2 * np.eye(2))
        assert_close(p.w, np.diag([-0.5, 2]))

    @pytest.mark.parametrize("spec", ["sign1", "sign2", "sign3"])
    def test_tall_euclidean(self, spec):
        p = right_polar_rect([[1], [0]], pair(np.eye(2), [[1]], SQ), spec)
        assert_close(p.w, [[1], [0]])
        assert_close(p.s, [[1]])

    def test_wide_two_sesquilinear(self):
        p = left_polar_rect([[0, 1], [3j, 0]], pair(np.diag([4j, 1]), np.diag([1, -2j]), SQ),
                            "sign2")
        assert_close(p.s, np.diag([R2, 3]))
        assert_close(p.w, [[0, 1 / R2], [1j, 0]])
        assert_close(p.sigma, np.diag([-1, 1]))

    def test_wide_euclidean(self):
        p = left_polar_rect([[1, 0]], pair([[1]], np.eye(2), SQ), "sign1")
        assert_close(p.s, [[1]])
        assert_close(p.w, [[1, 0]])

    def test_wide_hand_example(self):
        # F F^* = 25, so S = 5 and W = F / 5
        p = left_polar_rect([[3, 4]], pair([[1]], np.eye(2), SQ), "sign1")
        assert_close(p.s, [[5]])
        assert_close(p.w, [[0.6, 0.8]])

    def test_adjoint_problem(self):
        # the adjoint problem has left Gram F^[M,N] F, so its S and Sigma
        # coincide with the right factors of the original problem
        pr = pair(self.m66, [[1 + 1j]], SQ)
        f = np.array([[1], [-4j]])
        fa = adjoint_mn(f, pr)
        assert_close(fa, [[-2 + 2j, (1 - 1j) / 2]])
        right = right_polar_rect(f, pr, "sign3")
        left = left_polar_rect(fa, pr.swapped(), "sign3")
        assert_close(left.s, right.s)
        assert_close(left.sigma, right.sigma)
        assert_close(left.w, [[-1 + 1j, (1 - 1j) / 4]])
        assert_close(left.product(), fa)
        assert certify(left, fa, pr.swapped()).passed

    def test_shape_checks(self):
        with pytest.raises(DimensionMismatch):
            right_polar_rect(np.ones((1, 2)), pair([[1]], np.eye(2), SQ), "sign1")
        with pytest.raises(DimensionMismatch):
            left_polar_rect(np.ones((2, 1)), pair(np.eye(2), [[1]], SQ), "sign1")
        with pytest.raises(DimensionMismatch):
            right_polar_rect(np.ones((3, 1)), pair(np.eye(2), [[1]], SQ), "sign1")

    def test_singular_gram(self):
        # x^T x = 0 for x = (1, i): the complex bilinear Gram vanishes
        with pytest.raises(SingularGram) as info:
            right_polar_rect([[1], [1j]], pair(np.eye(2), [[1]], CB), "sign1")
        assert isinstance(info.value, PreconditionViolation)


class TestBoth:
    def test_two_sesquilinear(self):
        right, left = both_polar_square_two_products(
            [[0, 1], [3j, 0]], pair(np.diag([4j, 1]), np.diag([1, -2j]), SQ), "sign2")
        assert_close(right.s, np.diag([3, R2]))
        assert_close(right.sigma, np.diag([1, -1]))
        assert_close(left.s, np.diag([R2, 3]))
        assert_close(right.w, [[0, 1 / R2], [1j, 0]])
        assert_close(left.w, right.w)

    def test_identity(self):
        right, left = both_polar_square_two_products(np.eye(3), pair(np.eye(3), np.eye(3), SQ),
                                                     "sign3")
        for p in (right, left):
            assert_close(p.w, np.eye(3))
            assert_close(p.s, np.eye(3))

    def test_reduces_to_single(self):
        for seed in range(10):
            inst = gen_instance(InstanceRecipe(Family.HERMITIAN, SQ, 4, seed=seed, spec="sign3"))
            sp = inst.product
            right, left = both_polar_square_two_products(inst.f, ProductPair(sp, sp), "sign3")
            r1 = right_polar_square(inst.f, sp, "sign3")
            l1 = left_polar_square(inst.f, sp, "sign3")
            for a, b in ((right, r1), (left, l1)):
                for x, y in ((a.w, b.w), (a.s, b.s), (a.sigma, b.sigma)):
                    assert _rel(x, y) <= 1e-12

    def test_rejects_rectangular(self):
        with pytest.raises(DimensionMismatch):
            both_polar_square_two_products(np.ones((2, 1)), pair(np.eye(2), [[1]], SQ), "sign1")


class TestPreconditions:
    def test_singular_input(self):
        with pytest.raises(SingularInput) as info:
            right_polar_square(np.array([[1, 1], [1, 1]]), space(np.eye(2), SQ), "sign1")
        assert info.value.clause == "nonsingular"

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            right_polar_square(np.eye(3), space(np.eye(2), SQ), "sign1")

    def test_double_adjoint_single_product(self):
        with pytest.raises(DoubleAdjointViolation):
            right_polar_square([[0, 1], [1j, 0]], space([[0, 1], [2j, 0]], SQ), "sign3")
        with pytest.raises(DoubleAdjointViolation):
            left_polar_square([[0, 1], [4j, 0]], space([[0, 1], [1j, 0]], CB), "sign3")

    def test_non_orthosymmetric_accepted(self):
        p = right_polar_square([[0, 1], [4j, 0]], space([[0, 1], [1j, 0]], SQ), "sign3")
        assert certify(p, [[0, 1], [4j, 0]], space([[0, 1], [1j, 0]], SQ)).passed

    def test_sign1_imaginary_gram(self):
        # F^[N] F = (i) sits on the sign1 discontinuity
        from scalarpolar.errors import NearDiscontinuity
        with pytest.raises(NearDiscontinuity):
            right_polar_square([[np.exp(0.25j * np.pi)]], space([[1]], CB), "sign1")


class TestCertify:
    def test_real_bilinear_determinants(self):
        f = np.array([[0, 4], [1, 0]])
        sp = space(np.diag([1, -4]), RB)
        rep = certify(right_polar_square(f, sp, "sign2"), f, sp)
        assert rep.passed
        assert np.linalg.det(right_polar_square(f, sp, "sign2").w) == pytest.approx(-1)
        for c in rep.checks:
            if c.mode == "le":
                assert c.value < 1e-12, c
        assert rep["det_w"] < 1e-12 and rep["det_sigma"] < 1e-12

    def test_complex_bilinear_det_sigma(self):
        sp = space([[1]], CB)
        p = right_polar_square([[-1 + 2j]], sp, "sign1")
        rep = certify(p, [[-1 + 2j]], sp)
        assert rep.passed
        assert np.linalg.det(p.sigma) == pytest.approx(-1)
        assert "det_sigma" not in rep.residuals
        assert rep["det_sigma_modulus"] == 0

    def test_identity_all_zero(self):
        sp = space(np.eye(3), SQ)
        i3 = np.eye(3, dtype=complex)
        p = PolarFactors(i3, i3, i3, Side.RIGHT, None)
        rep = certify(p, i3, sp)
        assert rep.passed
        for c in rep.checks:
            if c.mode == "le":
                assert c.value == 0, c
        assert rep["r_positive_margin"] == pytest.approx(1 / np.sqrt(3))

    def test_two_products_skip_determinants(self):
        f = np.array([[0, 1], [3j, 0]])
        pr = pair(np.diag([4j, 1]), np.diag([1, -2j]), SQ)
        right, left = both_polar_square_two_products(f, pr, "sign2")
        rep = certify_both(right, left, f, pr)
        assert rep.passed
        assert "right.det_w" not in rep.residuals
        # |det W| is 1/sqrt(2) here, so the single-product determinant claim cannot apply
        assert abs(np.linalg.det(right.w)) == pytest.approx(1 / R2)

    def test_detects_wrong_factors(self):
        f = np.array([[0, 4], [1, 0]])
        sp = space(np.diag([1, -4]), RB)
        p = right_polar_square(f, sp, "sign2")
        bad = PolarFactors(p.w, 2 * p.s, p.sigma, p.side, p.spec)
        rep = certify(bad, f, sp)
        assert not rep.passed
        assert {c.name for c in rep.failures} >= {"reconstruction", "square_relation"}

    def test_report_algebra(self):
        a = CertificationReport((Check("x", 0.1, 1.0),))
        b = CertificationReport((Check("y", 2.0, 1.0, "gt"),))
        both = a + b
        assert both.passed and both["y"] == 2.0
        assert not CertificationReport((Check("z", np.nan, 1.0),)).passed
        with pytest.raises(KeyError):
            both["missing"]


def test_uniqueness_under_reordering():
    for i in range(0, 300, 3):
        inst = instance(i)
        base, _ = decompose(inst)
        shuffled, _ = decompose(inst, shuffle=np.random.default_rng(i))
        for side, p in base.items():
            q = shuffled[side]
            for x, y in ((p.w, q.w), (p.s, q.s), (p.sigma, q.sigma)):
                assert _rel(x, y) <= 1e-9, (inst.recipe, side)


def test_property_cycle():
    for i in range(200):
        _, rep = decompose(instance(i))
        assert rep.passed, (i, [(c.name, c.value) for c in rep.failures])


def test_sign2_positive_spectrum():
    hits = 0
    for seed in range(60):
        inst = gen_instance(InstanceRecipe(Family.SYMMETRIC, CB, 1 + seed % 6, seed=seed,
                                           spec="sign2"))
        sp = inst.product
        gram = adjoint_n(inst.f, sp) @ inst.f
        lam = np.linalg.eigvals(gram)
        if np.any((lam.real < 0) & (np.abs(lam.imag) <= 1e-8 * np.linalg.norm(gram))):
            continue
        hits += 1
        p = right_polar_square(inst.f, sp, "sign2")
        n = inst.f.shape[0]
        assert np.linalg.norm(p.sigma - np.eye(n)) <= 1e-9
        assert _rel(adjoint_n(p.w, sp) @ p.w, np.eye(n)) <= 1e-9
    assert hits >= 30


def test_classical_polar(rng):
    for n in range(1, 9):
        f = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        u, s = oracle_classical_polar(f)
        for spec in ("sign1", "sign2", "sign3"):
            p = right_polar_square(f, space(np.eye(n), SQ), spec)
            assert _rel(p.s, s) <= 1e-8 and _rel(p.w, u) <= 1e-8
            assert np.linalg.norm(p.sigma - np.eye(n)) <= 1e-8


def test_rect_drivers_match_both():
    for seed in range(30):
        form = (RB, CB, SQ)[seed % 3]
        fam = (Family.D, Family.SYMMETRIC, Family.HERMITIAN)[seed % 3]
        spec = ("sign1", "sign2", "sign3")[(seed // 3) % 3]
        n = 1 + seed % 6
        inst = gen_instance(InstanceRecipe(fam, form, n, n, seed=seed, spec=spec))
        right, left = both_polar_square_two_products(inst.f, inst.product, spec)
        r = right_polar_rect(inst.f, inst.product, spec)
        l = left_polar_rect(inst.f, inst.product, spec)
        for a, b in ((right, r), (left, l)):
            for x, y in ((a.w, b.w), (a.s, b.s), (a.sigma, b.sigma)):
                assert _rel(x, y) <= 1e-10
