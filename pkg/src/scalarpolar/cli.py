"""Command-line front end.

Exit codes: 0 success, 1 operational failure (I/O, parse, numerical
breakdown, failed certification), 2 a mathematical precondition does not
hold (the decomposition or function does not exist for the input).

Every flag can also be set through an environment variable named
``SCALARPOLAR_<FLAG>`` (``--tol-eq`` -> ``SCALARPOLAR_TOL_EQ``).  Explicit
flags win over the environment, and both win over fields in the problem
file; each override of a file field is reported on stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .core import (
    FormKind,
    ProductPair,
    ScalarProductSpace,
    Tolerances,
    adjoint_mn,
    double_adjoint_holds,
)
from .errors import PreconditionViolation, ScalarPolarError
from .io import (
    ProblemFile,
    ReportFile,
    dumps,
    read_problem,
    read_report,
    report_to_obj,
    tolerances_to_obj,
    write_report,
)
from .matfunc import generalized_sign, principal_sqrt
from .polar import (
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

ENV_PREFIX = "SCALARPOLAR_"
EXIT_OK, EXIT_FAILURE, EXIT_PRECONDITION = 0, 1, 2


@dataclass
class CliConfig:
    subcommand: str
    input: str
    output: str | None = None
    factors: str | None = None
    form: str | None = None
    sign: str | None = None
    side: str | None = None
    tol_eq: float | None = None
    tol_class: float | None = None
    tol_sing: float | None = None
    quiet: bool = False


def _env(name: str, cast=str):
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if raw is None or raw == "":
        return None
    return cast(raw)


def build_parser() -> argparse.ArgumentParser:
    defaults = Tolerances()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="problem file (JSON)")
    common.add_argument("-o", "--output", help="write the report here instead of stdout")
    common.add_argument("--form", choices=[f.value for f in FormKind],
                        help="override the file's form kind")
    common.add_argument("--sign", choices=["sign1", "sign2", "sign3"],
                        help="override the file's sign_function")
    common.add_argument("--side", choices=["right", "left", "both"],
                        help="override the file's side (default: right)")
    common.add_argument("--tol-eq", type=float,
                        help=f"relative residual cutoff (default: {defaults.tol_eq:g})")
    common.add_argument("--tol-class", type=float,
                        help=f"eigenvalue classification band (default: {defaults.tol_class:g})")
    common.add_argument("--tol-sing", type=float,
                        help=f"relative singular-value cutoff (default: {defaults.tol_sing:g})")
    common.add_argument("-q", "--quiet", action="store_true", help="no summary on stderr")

    parser = argparse.ArgumentParser(
        prog="scalarpolar",
        description="Polar decompositions F = WS and F = S'W in bilinear and "
        "sesquilinear scalar products.",
        epilog=f"Every flag also reads {ENV_PREFIX}<FLAG> from the environment, "
        f"e.g. {ENV_PREFIX}TOL_EQ.  Exit codes: 0 ok, 1 operational failure, "
        "2 precondition violated.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("decompose", parents=[common], help="compute and certify polar factors")
    sub.add_parser("sign", parents=[common], help="generalized sign of F")
    sub.add_parser("sqrt", parents=[common], help="principal square root of F")
    sub.add_parser("adjoint", parents=[common], help="F^[M,N] (or F^[N]) and the Gram matrices")
    cert = sub.add_parser("certify", parents=[common],
                          help="certify factors from a report against a problem")
    cert.add_argument("--factors", required=False, help="report file holding the factors")
    sub.add_parser("corpus", help="write the golden problem files").add_argument("directory")
    return parser


def parse_config(argv=None) -> CliConfig:
    ns = build_parser().parse_args(argv)
    if ns.subcommand == "corpus":
        return CliConfig("corpus", ns.directory)
    cfg = CliConfig(
        subcommand=ns.subcommand,
        input=ns.input,
        output=ns.output if ns.output is not None else _env("output"),
        factors=getattr(ns, "factors", None) or _env("factors"),
        form=ns.form or _env("form"),
        sign=ns.sign or _env("sign"),
        side=ns.side or _env("side"),
        tol_eq=ns.tol_eq if ns.tol_eq is not None else _env("tol_eq", float),
        tol_class=ns.tol_class if ns.tol_class is not None else _env("tol_class", float),
        tol_sing=ns.tol_sing if ns.tol_sing is not None else _env("tol_sing", float),
        quiet=ns.quiet or bool(_env("quiet", lambda s: s.lower() not in ("0", "false", "no"))),
    )
    return cfg


def _log(cfg: CliConfig, msg: str) -> None:
    if not cfg.quiet:
        print(msg, file=sys.stderr)


def resolve_problem(cfg: CliConfig) -> tuple[ProblemFile, Tolerances]:
    """Read the problem and apply flag/env overrides, reporting each conflict."""
    prob = read_problem(cfg.input)
    if cfg.form is not None and cfg.form != prob.form.value:
        _log(cfg, f"note: --form {cfg.form} overrides file value {prob.form.value}")
        prob = replace(prob, form=FormKind(cfg.form))
    if cfg.sign is not None and cfg.sign != prob.sign_function:
        _log(cfg, f"note: --sign {cfg.sign} overrides file value {prob.sign_function}")
        prob = replace(prob, sign_function=cfg.sign)
    if cfg.side is not None and cfg.side != prob.side:
        _log(cfg, f"note: --side {cfg.side} overrides file value {prob.side}")
        prob = replace(prob, side=cfg.side)
    tol = prob.tolerances or Tolerances()
    for name in ("tol_eq", "tol_class", "tol_sing"):
        value = getattr(cfg, name)
        if value is not None:
            if prob.tolerances is not None and value != getattr(prob.tolerances, name):
                _log(cfg, f"note: --{name.replace('_', '-')} {value:g} overrides file value "
                     f"{getattr(prob.tolerances, name):g}")
            tol = replace(tol, **{name: value})
    return prob, tol


def problem_product(prob: ProblemFile, tol: Tolerances):
    """The scalar product(s) of a problem: a space when ``M`` is absent, else a pair."""
    if prob.n is None:
        raise ScalarPolarError("this command needs a product matrix N")
    n_space = ScalarProductSpace(prob.n, prob.form, tol.tol_sing)
    if prob.m is None:
        return n_space
    return ProductPair(ScalarProductSpace(prob.m, prob.form, tol.tol_sing), n_space)


def run_decomposition(prob: ProblemFile, tol: Tolerances) -> dict[str, PolarFactors]:
    """Dispatch to the polar driver matching the problem's shape and side."""
    product = problem_product(prob, tol)
    f, spec, side = prob.f, prob.sign_function, prob.side
    if isinstance(product, ScalarProductSpace):
        if side == "both":
            return {"right": right_polar_square(f, product, spec, tol),
                    "left": left_polar_square(f, product, spec, tol)}
        driver = right_polar_square if side == "right" else left_polar_square
        return {side: driver(f, product, spec, tol)}
    if side == "both":
        right, left = both_polar_square_two_products(f, product, spec, tol)
        return {"right": right, "left": left}
    driver = right_polar_rect if side == "right" else left_polar_rect
    return {side: driver(f, product, spec, tol)}


def _factor_group(p: PolarFactors) -> dict[str, np.ndarray]:
    return {"W": p.w, "S": p.s, "Sigma": p.sigma}


def _metadata(prob: ProblemFile, tol: Tolerances, command: str) -> dict:
    return {
        "command": command,
        "problem": prob.name,
        "form": prob.form.value,
        "sign_function": prob.sign_function,
        "side": prob.side,
        "tolerances": tolerances_to_obj(tol),
        "version": __version__,
    }


def _certify_all(factors: dict[str, PolarFactors], prob, tol):
    product = problem_product(prob, tol)
    if set(factors) == {"right", "left"}:
        return certify_both(factors["right"], factors["left"], prob.f, product, tol)
    (side, fac), = factors.items()
    return certify(fac, prob.f, product, tol)


def _decompose_report(prob, tol) -> ReportFile:
    factors = run_decomposition(prob, tol)
    report = _certify_all(factors, prob, tol)
    return ReportFile(
        factors={side: _factor_group(p) for side, p in factors.items()},
        residuals=report.residuals,
        passed=report.passed,
        metadata=_metadata(prob, tol, "decompose"),
    )


def _sign_report(prob, tol) -> ReportFile:
    a = prob.f
    res = generalized_sign(a, prob.sign_function, tol)
    sigma = res.sigma
    lam = np.linalg.eigvals(sigma)
    resid = {
        "commutation": float(np.linalg.norm(sigma @ a - a @ sigma)
                             / max(1.0, np.linalg.norm(a) * np.linalg.norm(sigma))),
        "unit_modulus": float(np.max(np.abs(np.abs(lam) - 1.0))),
    }
    return ReportFile({"result": {"Sigma": sigma}}, resid,
                      all(v <= tol.tol_eq for v in resid.values()),
                      _metadata(prob, tol, "sign"))


def _sqrt_report(prob, tol) -> ReportFile:
    a = prob.f
    x = principal_sqrt(a, tol)
    resid = {"square": float(np.linalg.norm(x @ x - a) / max(1.0, np.linalg.norm(a)))}
    return ReportFile({"result": {"X": x}}, resid, resid["square"] <= tol.tol_eq,
                      _metadata(prob, tol, "sqrt"))


def _adjoint_report(prob, tol) -> ReportFile:
    product = problem_product(prob, tol)
    pair = product if isinstance(product, ProductPair) else ProductPair.single(product)
    adj = adjoint_mn(prob.f, pair)
    holds, res = double_adjoint_holds(prob.f, pair, tol)
    mats = {"adjoint": adj}
    m, n = prob.f.shape
    if m >= n:
        mats["gram_right"] = adj @ prob.f
    if m <= n:
        mats["gram_left"] = prob.f @ adj
    return ReportFile({"result": mats}, {"double_adjoint": res}, holds,
                      _metadata(prob, tol, "adjoint"))


def _certify_report(prob, tol, factors_path) -> ReportFile:
    if factors_path is None:
        raise ScalarPolarError("certify needs --factors REPORT")
    src = read_report(factors_path)
    spec = src.metadata.get("sign_function", prob.sign_function)
    factors = {}
    for side in ("right", "left"):
        if side in src.factors:
            g = src.factors[side]
            try:
                factors[side] = PolarFactors(g["W"], g["S"], g["Sigma"], Side(side), spec)
            except KeyError as exc:
                raise ScalarPolarError(f"factors.{side} lacks {exc.args[0]}") from exc
    if not factors:
        raise ScalarPolarError(f"{factors_path} holds no right/left factors")
    report = _certify_all(factors, prob, tol)
    return ReportFile({s: _factor_group(p) for s, p in factors.items()}, report.residuals,
                      report.passed, _metadata(prob, tol, "certify"))


def _emit(cfg: CliConfig, report: ReportFile) -> None:
    if cfg.output:
        write_report(cfg.output, report)
    else:
        sys.stdout.write(dumps(report_to_obj(report)))


def _summary(cfg, report: ReportFile) -> None:
    status = "PASS" if report.passed else "FAIL"
    _log(cfg, f"{cfg.subcommand}: {status}")
    for name, value in report.residuals.items():
        _log(cfg, f"  {name:32s} {value:.3e}")


def run(cfg: CliConfig) -> int:
    if cfg.subcommand == "corpus":
        from .corpus import write_corpus

        try:
            for path in write_corpus(cfg.input):
                _log(cfg, f"wrote {path}")
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAILURE
        return EXIT_OK
    try:
        prob, tol = resolve_problem(cfg)
        handler = {
            "decompose": lambda: _decompose_report(prob, tol),
            "sign": lambda: _sign_report(prob, tol),
            "sqrt": lambda: _sqrt_report(prob, tol),
            "adjoint": lambda: _adjoint_report(prob, tol),
            "certify": lambda: _certify_report(prob, tol, cfg.factors),
        }[cfg.subcommand]
        report = handler()
        _emit(cfg, report)
    except PreconditionViolation as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (ScalarPolarError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    _summary(cfg, report)
    return EXIT_OK if report.passed else EXIT_FAILURE


def main(argv=None) -> int:
    return run(parse_config(argv))


if __name__ == "__main__":
    sys.exit(main())
