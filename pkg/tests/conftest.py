import numpy as np
import pytest

from scalarpolar.core import FormKind, ProductPair, ScalarProductSpace

RB, CB, SQ = FormKind.REAL_BILINEAR, FormKind.COMPLEX_BILINEAR, FormKind.SESQUILINEAR


def space(n, form):
    return ScalarProductSpace(np.array(n, dtype=complex), FormKind(form))


def pair(m, n, form):
    return ProductPair(space(m, form), space(n, form))


def assert_close(actual, expected, atol=1e-12):
    actual = np.asarray(actual)
    expected = np.asarray(expected, dtype=complex)
    if actual.ndim == 2 and expected.ndim < 2:
        expected = np.atleast_2d(expected)
    assert actual.shape == expected.shape, (actual.shape, expected.shape)
    err = np.max(np.abs(actual - expected))
    assert err <= atol, f"max abs error {err:.3e} > {atol:.1e}\n{actual}\n!=\n{expected}"


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion and fail on FAIL."""

    def record(criterion: str, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'}  {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
