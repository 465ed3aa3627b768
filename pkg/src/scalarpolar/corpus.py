"""Golden problems with hand-derived reference factors.

:func:`golden_problems` is the source of truth; ``scalarpolar corpus DIR``
writes it out as problem files.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import FormKind
from .io import ProblemFile, write_problem

__all__ = ["golden_problems", "write_corpus"]

RB, CB, SQ = FormKind.REAL_BILINEAR, FormKind.COMPLEX_BILINEAR, FormKind.SESQUILINEAR
R5 = np.sqrt(5.0)
R2 = np.sqrt(2.0)


def _m(rows) -> np.ndarray:
    # adding 0.0 clears negative zeros
    return np.atleast_2d(np.array(rows, dtype=np.complex128)) + 0.0


def _right(w, s, sigma):
    return {"right.W": _m(w), "right.S": _m(s), "right.Sigma": _m(sigma)}


def _left(w, s, sigma):
    return {"left.W": _m(w), "left.S": _m(s), "left.Sigma": _m(sigma)}


def golden_problems() -> list[ProblemFile]:
    f_scalar = [[-1 + 2j]]
    n_nonortho = [[0, 1], [2j, 0]]
    m_swap = [[0, 1], [1j, 0]]
    probs = [
        ProblemFile(CB, "sign1", "right", _m(f_scalar), _m([[1]]), name="scalar-complex-bilinear-sign1",
                    description="1x1, N=(1) complex bilinear, sign1",
                    expected=_right([[1j]], [[2 + 1j]], [[-1]])),
        ProblemFile(SQ, "sign1", "right", _m(f_scalar), _m([[1]]), name="scalar-sesquilinear-sign1",
                    description="1x1, N=(1) sesquilinear, sign1",
                    expected=_right([[(-1 + 2j) / R5]], [[R5]], [[1]])),
        ProblemFile(CB, "sign2", "right", _m(f_scalar), _m([[1]]), name="scalar-complex-bilinear-sign2",
                    description="1x1, N=(1) complex bilinear, sign2",
                    expected=_right([[-1]], [[1 - 2j]], [[1]])),
        ProblemFile(CB, "sign3", "right", _m(f_scalar), _m([[1]]), name="scalar-complex-bilinear-sign3",
                    description="1x1, N=(1) complex bilinear, sign3",
                    expected=_right([[(-1 + 2j) / R5]], [[R5]], [[(-3 + 4j) / 5]])),
        ProblemFile(RB, "sign2", "right", _m([[0, 4], [1, 0]]), _m(np.diag([1, -4])),
                    name="real-bilinear-indefinite", description="H=diag(1,-4) real bilinear, sign2",
                    expected=_right([[0, 2], [0.5, 0]], np.diag([2, 2]), np.diag([-1, -1]))),
        ProblemFile(SQ, "sign2", "right", _m(np.diag([1j, -4j])), _m([[0, 1], [-1, 0]]),
                    name="symplectic-sesquilinear", description="J sesquilinear, sign2",
                    expected=_right(np.diag([0.5j, -2j]), np.diag([2, 2]), np.diag([-1, -1]))),
        ProblemFile(SQ, "sign3", "both", _m(np.diag([-1, 4j])), _m(n_nonortho),
                    name="nonortho-diagonal-both", description="non-orthosymmetric N sesquilinear, sign3",
                    expected={**_right(np.diag([-0.5, 2j]), np.diag([2, 2]), np.diag([-1j, 1j])),
                              **_left(np.diag([-0.5, 2j]), np.diag([2, 2]), np.diag([-1j, 1j]))}),
        ProblemFile(SQ, "sign3", "right", _m([[1], [-4j]]), _m([[1 + 1j]]), _m(m_swap),
                    name="tall-sesquilinear", description="2x1, two sesquilinear products, sign3",
                    expected=_right([[0.5], [-2j]], [[2]], [[-1]])),
        ProblemFile(CB, "sign3", "right", _m([[1], [-4j]]), _m([[1 + 1j]]), _m(m_swap),
                    name="tall-complex-bilinear-rejected",
                    description="2x1, two complex bilinear products: no decomposition",
                    expect_error="double-adjoint"),
        ProblemFile(CB, "sign3", "right", _m(np.diag([-1, 4])), _m([[0, 1j], [-1, 0]]), _m(m_swap),
                    name="two-products-complex-bilinear", description="two complex bilinear products, sign3",
                    expected=_right(np.diag([-0.5, 2]), np.diag([2, 2]), np.diag([-1j, -1j]))),
        ProblemFile(SQ, "sign2", "both", _m([[0, 1], [3j, 0]]), _m(np.diag([1, -2j])),
                    _m(np.diag([4j, 1])), name="two-products-sesquilinear-both",
                    description="two sesquilinear products, sign2, both sides",
                    expected={**_right([[0, 1 / R2], [1j, 0]], np.diag([3, R2]), np.diag([1, -1])),
                              **_left([[0, 1 / R2], [1j, 0]], np.diag([R2, 3]), np.diag([-1, 1]))}),
        ProblemFile(SQ, "sign3", "right", _m(np.diag([1, 1j])), _m(n_nonortho),
                    name="nonortho-sesquilinear-accepted",
                    description="N=[[0,1],[2i,0]] sesquilinear; double adjoint holds"),
        ProblemFile(SQ, "sign3", "right", _m([[0, 1], [1j, 0]]), _m(n_nonortho),
                    name="nonortho-sesquilinear-rejected",
                    description="N=[[0,1],[2i,0]] sesquilinear; double adjoint fails",
                    expect_error="double-adjoint"),
        ProblemFile(SQ, "sign3", "right", _m([[0, 1], [4j, 0]]), _m(m_swap),
                    name="nonortho-form-sesquilinear-accepted",
                    description="N=[[0,1],[i,0]], F=[[0,1],[4i,0]] sesquilinear; holds"),
        ProblemFile(CB, "sign3", "right", _m([[0, 1], [4j, 0]]), _m(m_swap),
                    name="nonortho-form-complex-bilinear-rejected",
                    description="N=[[0,1],[i,0]], F=[[0,1],[4i,0]] complex bilinear; fails",
                    expect_error="double-adjoint"),
    ]
    return probs


def write_corpus(directory) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for p in golden_problems():
        path = directory / f"{p.name}.json"
        write_problem(path, p)
        paths.append(path)
    return paths
