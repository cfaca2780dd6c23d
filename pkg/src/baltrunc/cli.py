"""Command-line front end.

    baltrunc analyze FILE
    baltrunc reduce FILE -r N [--method truncation|spa]
    baltrunc freqresp FILE --wmin W --wmax W --points N
    baltrunc canonical FILE

FILE holds one JSON system document (``-`` reads stdin): a dense realization
``{"A", "b", "c", "d"}``, an arrowhead ``{"d", "alpha", "beta", "gamma"}``, a
grid config ``{"m_hat", "d_hat", "droop_inv", "tau"}`` or a transfer function
``{"numer", "denom"}`` with coefficients from the highest power down.

Machine output goes to stdout (JSON, or CSV for ``freqresp``) with sorted
keys and 12 significant digits; diagnostics go to stderr. Exit codes: 0 ok,
1 numerical failure, 2 bad input, 3 unstable, 4 not minimal, 5 inadmissible
order, 6 repeated Hankel singular values.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import errors as E
from .arrowhead import (ArrowheadRealization, canonical_arrowhead_from_tf, detect_arrowhead,
                        diagnose_signs, to_state_space)
from .balance import balance, certify, to_canonical
from .config import Tolerances, load_tolerances
from .gridmodel import GridConfig, build_grid_model
from .hinfnorm import frequency_response
from .lti import StateSpace, check_minimality, check_stability

EXIT_OK, EXIT_NUMERIC, EXIT_PARSE, EXIT_UNSTABLE, EXIT_NONMINIMAL, EXIT_ORDER, EXIT_REPEATED = range(7)

_VARIANTS = {
    "dense": ({"A", "b", "c"}, {"d"}),
    "arrowhead": ({"d", "alpha", "beta", "gamma"}, set()),
    "grid": ({"m_hat", "d_hat", "droop_inv", "tau"}, set()),
    "tf": ({"numer", "denom"}, set()),
}


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class Loaded:
    kind: str
    sys: StateSpace
    arrow: ArrowheadRealization | None


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def _clean(obj):
    """Round floats to 12 significant digits; non-finite values become null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(fmt(obj)) if np.isfinite(obj) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2)


def system_doc(sys: StateSpace) -> dict:
    return {"A": sys.A.tolist(), "b": sys.b.tolist(), "c": sys.c.tolist(), "d": sys.d}


def parse_document(doc) -> Loaded:
    if not isinstance(doc, dict):
        raise CliError(EXIT_PARSE, "system document must be a JSON object")
    keys = set(doc)
    matches = [k for k, (req, opt) in _VARIANTS.items() if req <= keys and keys <= req | opt]
    if len(matches) != 1:
        raise CliError(EXIT_PARSE, f"unrecognized system document with keys {sorted(keys)}")
    kind = matches[0]
    try:
        if kind == "dense":
            A = np.asarray(doc["A"], dtype=float)
            sys = StateSpace(A.reshape(0, 0) if A.size == 0 else A, doc["b"], doc["c"], doc.get("d", 0.0))
            return Loaded(kind, sys, detect_arrowhead(sys))
        if kind == "arrowhead":
            ar = ArrowheadRealization(doc["d"], doc["alpha"], doc["beta"], doc["gamma"])
        elif kind == "grid":
            ar = build_grid_model(GridConfig.from_dict(doc))
        else:
            ar = canonical_arrowhead_from_tf(doc["numer"], doc["denom"])
        return Loaded(kind, to_state_space(ar), ar)
    except (TypeError, ValueError) as exc:
        raise CliError(EXIT_PARSE, f"malformed {kind} document: {exc}") from exc


def load(path: str) -> Loaded:
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
        doc = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_PARSE, f"cannot read {path}: {exc}") from exc
    return parse_document(doc)


def _certificate_doc(cert) -> dict:
    return {"order": cert.order_r, "method": cert.method, "bound": cert.bound,
            "achieved_error": cert.achieved_error, "tight": cert.tight,
            "s2_uniform": cert.s2_uniform, "peak_frequency": cert.peak_frequency}


def cmd_analyze(loaded: Loaded, tol: Tolerances) -> dict:
    sys_ = loaded.sys
    stab = check_stability(sys_, tol)
    if not stab.stable:
        raise CliError(EXIT_UNSTABLE, f"system is not asymptotically stable "
                                      f"(spectral abscissa {fmt(stab.spectral_abscissa)})")
    if not check_minimality(sys_, tol):
        raise CliError(EXIT_NONMINIMAL, "system is not minimal")
    bal = balance(sys_, tol)
    report = {
        "kind": loaded.kind,
        "order": sys_.n,
        "stable": True,
        "spectral_abscissa": stab.spectral_abscissa,
        "minimal": True,
        "hankel": {"sigmas": bal.sigma.sigmas, "multiplicities": list(bal.sigma.multiplicities)},
        "signs": {"signs": bal.signs.signs, "lambdas": bal.signs.lambdas},
        "arrowhead_detected": loaded.arrow is not None,
        "certificates": [_certificate_doc(certify(bal, r, "truncation", tol))
                         for r in bal.sigma.boundaries()[1:-1]],
    }
    if loaded.arrow is not None:
        diag = diagnose_signs(loaded.arrow, tol=tol)
        report["arrowhead"] = {
            "formula_multiset": list(diag.sign_multiset),
            "formula_signs": list(diag.formula_signs),
            "hypothesis_ok": diag.hypothesis_ok,
            "uniform_trailing": diag.uniform_trailing,
            "canonical_permutation": None if diag.canonical_permutation is None
            else list(diag.canonical_permutation),
            "agrees_with_cross_gramian":
                sorted(diag.sign_multiset) == sorted(bal.signs.signs.tolist()),
        }
    return report


def cmd_reduce(loaded: Loaded, r: int, method: str, tol: Tolerances) -> dict:
    bal = balance(loaded.sys, tol)
    if r not in bal.sigma.boundaries():
        raise CliError(EXIT_ORDER, f"order {r} is not admissible; choose one of "
                                   f"{bal.sigma.boundaries()}")
    cert = certify(bal, r, method, tol)
    return {"reduced": system_doc(cert.reduced), "certificate": _certificate_doc(cert)}


def cmd_freqresp(loaded: Loaded, wmin: float, wmax: float, points: int, tol: Tolerances) -> str:
    if points < 1 or wmin < 0 or wmax < wmin or not (np.isfinite(wmin) and np.isfinite(wmax)):
        raise CliError(EXIT_PARSE, "need points >= 1 and 0 <= wmin <= wmax")
    if points == 1:
        grid = np.array([wmin])
    elif wmin == 0:
        raise CliError(EXIT_PARSE, "log spacing needs wmin > 0 when points > 1")
    else:
        grid = np.geomspace(wmin, wmax, points)
    lines = ["omega,re,im,mag"]
    for w, g in frequency_response(loaded.sys, grid, tol):
        lines.append(",".join(fmt(v) for v in (w, g.real, g.imag, abs(g))))
    return "\n".join(lines) + "\n"


def cmd_canonical(loaded: Loaded, tol: Tolerances) -> dict:
    form = to_canonical(loaded.sys, tol)
    return {"system": system_doc(form.sys), "sigma": form.sigma.values,
            "signs": form.signs.signs, "gamma": form.gamma}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="baltrunc", description="Balanced truncation with exact error certificates")
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", help="Hankel singular values, signs and certificates")
    a.add_argument("file")
    r = sub.add_parser("reduce", help="reduce to order r and certify the error")
    r.add_argument("file")
    r.add_argument("-r", type=int, required=True, dest="order")
    r.add_argument("--method", choices=("truncation", "spa"), default="truncation")
    f = sub.add_parser("freqresp", help="frequency response as CSV")
    f.add_argument("file")
    f.add_argument("--wmin", type=float, required=True)
    f.add_argument("--wmax", type=float, required=True)
    f.add_argument("--points", type=int, required=True)
    c = sub.add_parser("canonical", help="canonical sign-symmetric balanced realization")
    c.add_argument("file")
    return p


_ERROR_CODES = [
    (E.NotStable, EXIT_UNSTABLE),
    (E.NotMinimal, EXIT_NONMINIMAL),
    (E.NotCoprime, EXIT_NONMINIMAL),
    (E.RepeatedHSV, EXIT_REPEATED),
    (E.SplitsMultiplicityGroup, EXIT_ORDER),
    ((E.BadInput, E.BadDimension, E.BadConfig, E.DegreeMismatch, E.ComplexZeros,
      E.RepeatedZeros), EXIT_PARSE),
]


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        tol = load_tolerances()
    except ValueError as exc:
        print(f"error: BALTRUNC_TOL: {exc}", file=stderr)
        return EXIT_PARSE
    try:
        loaded = load(args.file)
        if args.command == "analyze":
            out = dumps(cmd_analyze(loaded, tol)) + "\n"
        elif args.command == "reduce":
            out = dumps(cmd_reduce(loaded, args.order, args.method, tol)) + "\n"
        elif args.command == "freqresp":
            out = cmd_freqresp(loaded, args.wmin, args.wmax, args.points, tol)
        else:
            out = dumps(cmd_canonical(loaded, tol)) + "\n"
    except CliError as exc:
        print(f"error: {exc}", file=stderr)
        return exc.code
    except E.BaltruncError as exc:
        for kinds, code in _ERROR_CODES:
            if isinstance(exc, kinds):
                break
        else:
            code = EXIT_NUMERIC
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return code
    stdout.write(out)
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
