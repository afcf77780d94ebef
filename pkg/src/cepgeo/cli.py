"""Command-line front end.

One binary, subcommand style; reports go to stdout as deterministic JSON
(or ``--format table`` for human reading, ``--out`` for a file).  Exit
codes: 0 success, 2 validation or input error, 3 when ``--strict`` turns
warnings or failed tolerance checks into an error.
"""

from __future__ import annotations

import os

_threads = os.environ.get("CEPGEO_THREADS")
if _threads:
    # honoured only if set before the numeric stack is first imported
    for _var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        os.environ.setdefault(_var, _threads)

import argparse
import json
import sys
import warnings

import numpy as np

from . import closed_form, filters, priors, quadrature, serialization
from .closed_form import CoincidentRootsError, ModelPoint
from .filters import FilterError
from .quadrature import QuadratureConfig

HOL = False
BAR = True


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--out", help="write the report to a file instead of stdout")
    common.add_argument(
        "--strict",
        action="store_true",
        help="exit 3 when warnings are raised or a tolerance check fails",
    )
    common.add_argument("--eps-stab", type=float, default=filters.EPS_STAB_DEFAULT)

    parser = argparse.ArgumentParser(
        prog="cepgeo",
        description=(
            "Information geometry of minimum-phase filters: cepstrum, metric, "
            "connections, curvature, divergences, and prior checks."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check stability and minimum phase")
    p.add_argument("input")

    p = sub.add_parser("cepstrum", parents=[common], help="complex-cepstrum series of a filter")
    p.add_argument("input")
    p.add_argument("--trunc", type=int, default=filters.TRUNCATION_DEFAULT)

    p = sub.add_parser(
        "tensors", parents=[common], help="closed-form geometry at the filter's coordinates"
    )
    p.add_argument("input")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--trunc", type=int, default=closed_form.POTENTIAL_TRUNCATION_DEFAULT)

    p = sub.add_parser("divergence", parents=[common], help="alpha-divergence between two filters")
    p.add_argument("input")
    p.add_argument("input2")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--nodes", type=int, default=quadrature.NODES_DEFAULT)
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("check-prior", parents=[common], help="sampled superharmonicity check")
    p.add_argument("--psi", choices=sorted(priors.BUILTINS), required=True)
    p.add_argument("--model", required=True, help="shape like ar:2 or ar:1,ma:1")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("oracle-compare", parents=[common], help="closed forms against quadrature")
    p.add_argument("input")
    p.add_argument("--nodes", type=int, default=quadrature.NODES_DEFAULT)
    p.add_argument("--tol", type=float, default=1e-8)

    p = sub.add_parser(
        "duality-check", parents=[common], help="alpha-duality and reciprocal-swap residuals"
    )
    p.add_argument("input")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--nodes", type=int, default=quadrature.NODES_DEFAULT)
    p.add_argument("--deriv-step", type=float, default=quadrature.DERIV_STEP_DEFAULT)
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser(
        "invariance-check", parents=[common], help="metric residuals under unimodular factors"
    )
    p.add_argument("input")
    p.add_argument("--nodes", type=int, default=quadrature.NODES_DEFAULT)
    p.add_argument("--tol", type=float, default=1e-10)

    return parser


def _parse_model_shape(text: str) -> tuple[int, int]:
    p = q = 0
    for token in text.split(","):
        token = token.strip().lower()
        if ":" not in token:
            raise ValueError(f"malformed model token {token!r}; expected ar:p or ma:q")
        kind, _, count = token.partition(":")
        if kind == "ar":
            p = int(count)
        elif kind == "ma":
            q = int(count)
        else:
            raise ValueError(f"unknown model kind {kind!r}")
    if p < 0 or q < 0 or p + q == 0:
        raise ValueError(f"model shape must have at least one coordinate, got {text!r}")
    return p, q


def _load_validated(args, path: str) -> filters.ValidatedFilter:
    return filters.validate(serialization.load_filter(path), args.eps_stab)


def _cmd_validate(args) -> dict:
    f = _load_validated(args, args.input)
    return {
        "command": "validate",
        "valid": True,
        "dimension": f.dimension,
        "signature": list(f.signature),
        "labels": list(f.labels),
        "has_exact_cancellation": f.has_exact_cancellation,
        "eps_stab": args.eps_stab,
    }


def _cmd_cepstrum(args) -> dict:
    f = _load_validated(args, args.input)
    series = filters.cepstrum(f, args.trunc)
    return {
        "command": "cepstrum",
        "truncation": series.truncation,
        "phi0": serialization.complex_to_json(series.phi0),
        "coeffs": [serialization.complex_to_json(c) for c in series.coeffs],
        "blaschke_coeffs": [serialization.complex_to_json(b) for b in series.blaschke_coeffs],
        "tail_bound": series.tail_bound,
    }


def _cmd_tensors(args) -> dict:
    f = _load_validated(args, args.input)
    point = ModelPoint.from_filter(f)
    potential = closed_form.kahler_potential(point, args.trunc)
    g = closed_form.metric(point)
    ginv = closed_form.inverse_metric(point)
    det = closed_form.metric_determinant(point)
    conn = closed_form.alpha_connection(point, args.alpha)
    curv = closed_form.alpha_ricci(point, args.alpha)
    labels = point.labels
    return {
        "command": "tensors",
        "alpha": args.alpha,
        "labels": list(labels),
        "potential": {
            "value": potential.value,
            "tail_bound": potential.tail_bound,
            "truncation": potential.truncation,
        },
        "metric": serialization.tensor_to_document(
            labels, None, [(g.mixed, (HOL, BAR)), (g.pure, (HOL, HOL))]
        ),
        "inverse_metric": serialization.tensor_to_document(labels, None, [(ginv, (HOL, BAR))]),
        "metric_determinant": det,
        "connection": serialization.tensor_to_document(
            labels,
            args.alpha,
            [
                (conn.gamma_mixed, (HOL, HOL, BAR)),
                (conn.gamma_pure, (HOL, HOL, HOL)),
                (conn.gamma_cross, (HOL, BAR, HOL)),
                (conn.gamma_cross_bar, (HOL, BAR, BAR)),
            ],
        ),
        "t_tensor": serialization.tensor_to_document(
            labels, None, [(conn.t_mixed, (HOL, HOL, BAR)), (conn.t_pure, (HOL, HOL, HOL))]
        ),
        "ricci": serialization.tensor_to_document(labels, args.alpha, [(curv.ricci, (HOL, BAR))]),
        "scalar_curvature": curv.scalar,
    }


def _cmd_divergence(args) -> dict:
    f1 = _load_validated(args, args.input)
    f2 = _load_validated(args, args.input2)
    cfg = QuadratureConfig(nodes=args.nodes)
    result = quadrature.divergence(f1, f2, args.alpha, cfg, tol=args.tol)
    return {
        "command": "divergence",
        "alpha": result.alpha,
        "value": result.value,
        "residual": result.residual,
        "converged": result.converged,
    }


def _cmd_check_prior(args) -> dict:
    shape = _parse_model_shape(args.model)
    psi = priors.BUILTINS[args.psi](n=shape[0] + shape[1])
    report = priors.check_superharmonic(
        psi, shape, args.samples, args.seed, eps_stab=args.eps_stab
    )
    return {
        "command": "check-prior",
        "psi": report.kind,
        "model": args.model,
        "signature": list(report.signature),
        "samples": report.samples,
        "seed": report.seed,
        "violations": report.violations,
        "worst_value": report.worst_value,
        "margin_histogram": report.margin_histogram,
    }


def _relative_residual(closed: np.ndarray, numeric: np.ndarray) -> float:
    scale = float(np.max(np.abs(numeric)))
    if scale == 0.0:
        return float(np.max(np.abs(closed)))
    return float(np.max(np.abs(closed - numeric)) / scale)


def oracle_compare(f: filters.ValidatedFilter, cfg: QuadratureConfig) -> dict[str, float]:
    """Max-norm relative residuals of each closed form against quadrature."""
    point = ModelPoint.from_filter(f)
    residuals = {
        "metric": _relative_residual(
            closed_form.metric(point).mixed, quadrature.metric_numeric(f, cfg).mixed
        ),
        "connection0": _relative_residual(
            closed_form.connection0(point).gamma_mixed,
            quadrature.connection_numeric(f, 0.0, cfg).gamma_mixed,
        ),
        "t_tensor": _relative_residual(
            closed_form.t_tensor(point).t_mixed,
            quadrature.t_tensor_numeric(f, cfg).t_mixed,
        ),
        "ricci0": _relative_residual(
            closed_form.ricci0(point).ricci, quadrature.ricci_numeric(f, cfg)
        ),
    }
    residuals["max"] = max(residuals.values())
    return residuals


def _cmd_oracle_compare(args) -> dict:
    f = _load_validated(args, args.input)
    cfg = QuadratureConfig(nodes=args.nodes)
    residuals = oracle_compare(f, cfg)
    return {
        "command": "oracle-compare",
        "nodes": args.nodes,
        "tol": args.tol,
        "residuals": residuals,
        "passed": residuals["max"] < args.tol,
    }


def _cmd_duality_check(args) -> dict:
    f = _load_validated(args, args.input)
    cfg = QuadratureConfig(nodes=args.nodes, deriv_step=args.deriv_step)
    report = quadrature.duality_check(f, args.alpha, cfg)
    return {
        "command": "duality-check",
        "alpha": report.alpha,
        "duality_residual": report.duality_residual,
        "reciprocal_residual": report.reciprocal_residual,
        "tol": args.tol,
        "passed": max(report.duality_residual, report.reciprocal_residual) < args.tol,
    }


def _cmd_invariance_check(args) -> dict:
    f = _load_validated(args, args.input)
    cfg = QuadratureConfig(nodes=args.nodes)
    report = quadrature.invariance_suite(f, cfg)

    def leg(t):
        return {"metric_residual": t.metric_residual, "sdf_residual": t.sdf_residual}

    body = {
        "command": "invariance-check",
        "identity": leg(report.identity),
        "z_power": leg(report.z_power),
        "blaschke": leg(report.blaschke),
        "outer_reflection": None
        if report.outer_reflection is None
        else leg(report.outer_reflection),
        "max_metric_residual": report.max_metric_residual,
        "tol": args.tol,
        "passed": report.max_metric_residual < args.tol,
    }
    return body


_DISPATCH = {
    "validate": _cmd_validate,
    "cepstrum": _cmd_cepstrum,
    "tensors": _cmd_tensors,
    "divergence": _cmd_divergence,
    "check-prior": _cmd_check_prior,
    "oracle-compare": _cmd_oracle_compare,
    "duality-check": _cmd_duality_check,
    "invariance-check": _cmd_invariance_check,
}


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            report = _DISPATCH[args.command](args)
        except (FilterError, CoincidentRootsError) as exc:
            report = {
                "command": args.command,
                "error": {"code": getattr(exc, "code", "ERROR"), "message": str(exc)},
            }
            _emit(args, serialization.dumps_report(report) + "\n")
            return 2
        except (OSError, json.JSONDecodeError, ValueError) as exc:
            report = {
                "command": args.command,
                "error": {"code": "INVALID_INPUT", "message": str(exc)},
            }
            _emit(args, serialization.dumps_report(report) + "\n")
            return 2
    if caught:
        report["warnings"] = [f"{w.category.__name__}: {w.message}" for w in caught]
    if args.format == "table":
        text = serialization.render_table(report)
    else:
        text = serialization.dumps_report(report) + "\n"
    _emit(args, text)
    if args.strict and (caught or report.get("passed") is False):
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
