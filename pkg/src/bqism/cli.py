"""Command-line front end: ``bqism verify|spectrum|sweep``.

Exit codes: 0 pass (or report-only), 1 fail, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace

import numpy as np

from .chain import ChainSpec, hermitian_a, hermitian_b, spectrum
from .exceptions import BQISMError
from .reflection import KMinusParams, KPlusParams
from .verify import TARGETS, run

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _emit(text: str, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json_arg(raw):
    """Inline JSON or ``@path``."""
    if raw is None:
        return None
    if raw.startswith("@"):
        with open(raw[1:], encoding="utf-8") as fh:
            return json.load(fh)
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise BQISMError(f"malformed parameter JSON: {exc}") from None


def _load_spec(path) -> ChainSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise BQISMError(f"cannot read spec file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise BQISMError(f"malformed spec JSON: {exc}") from None
    return ChainSpec.from_json(obj)


def cmd_verify(args) -> int:
    params = _load_json_arg(args.params)
    rep = run(args.target, samples=args.samples, seed=args.seed, tol=args.tol, params=params)
    _emit(json.dumps(rep.to_json(), indent=2) + "\n", args.out)
    status = rep.passed
    label = "REPORT" if status is None else ("PASS" if status else "FAIL")
    summary = f"{label} {rep.identity_name}: max residual {rep.max_residual:.3e} (tol {rep.tolerance:g})"
    if rep.report_only:
        summary += f", min residual over {rep.notes['candidates']} candidates {rep.notes['min_residual']:.3e}"
    print(summary, file=sys.stderr)
    return EXIT_FAIL if status is False else EXIT_PASS


def _spectrum_csv(res) -> str:
    buf = io.StringIO()
    buf.write(f"# hermiticity_defect={res.hermiticity_defect:.17g}\n")
    for z, r in res.commutation_defect.items():
        buf.write(f"# commutation_defect(z={z.real:g}{z.imag:+g}j)={r:.17g}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "re", "im"])
    for k, v in enumerate(res.eigenvalues):
        w.writerow([k, repr(float(v.real)), repr(float(v.imag))])
    return buf.getvalue()


def cmd_spectrum(args) -> int:
    spec = _load_spec(args.spec_file)
    res = spectrum(spec)
    if args.format == "csv":
        text = _spectrum_csv(res)
    else:
        text = json.dumps(res.to_json(), indent=2) + "\n"
    _emit(text, args.out)
    return EXIT_PASS


def _sweep_values(args):
    if args.steps < 1:
        raise BQISMError("sweep needs at least one step")
    if args.circle is not None:
        if args.axis in ("X", "Y"):
            raise BQISMError("--circle applies to the complex couplings a and b")
        centre, radius = complex(args.circle[0]), float(args.circle[1])
        theta = 2 * np.pi * np.arange(args.steps) / args.steps
        return list(centre + radius * np.exp(1j * theta))
    lo, hi = (complex(v) for v in args.range)
    if args.axis in ("X", "Y") and (lo.imag or hi.imag):
        raise BQISMError(f"{args.axis} is real")
    return list(np.linspace(lo, hi, args.steps))


def _swept_spec(base: ChainSpec, axis: str, v: complex) -> ChainSpec:
    """Copy of ``base`` with one coupling replaced."""
    left, right = base.left, base.right
    if axis in ("X", "a"):
        if not isinstance(left, KMinusParams):
            raise BQISMError(f"sweeping {axis} needs a K- left boundary")
        a = hermitian_a(v.real, left.w) if axis == "X" else v
        left = replace(left, a=a)
    else:
        if not isinstance(right, KPlusParams):
            raise BQISMError(f"sweeping {axis} needs a K+ right boundary")
        b = hermitian_b(v.real, right.j, right.w) if axis == "Y" else v
        right = replace(right, b=b)
    return ChainSpec(base.N, left, right, base.c)


def _sweep_row(base: ChainSpec, axis: str, v: complex):
    """(flag, eigenvalues, defect) for one parameter value."""
    if axis in ("X", "Y") and v.real == 0:
        return "zero-coupling", None, None
    try:
        spec = _swept_spec(base, axis, v)
    except BQISMError as exc:
        if "vanishes" in str(exc):
            return "trace-zero", None, None
        raise
    if isinstance(spec.left, KMinusParams) and abs(1 - spec.left.w**2 + spec.left.a) < 1e-9:
        return "singular-A", None, None
    if isinstance(spec.right, KPlusParams) and abs(1 - spec.right.w**spec.right.j + spec.right.b) < 1e-9:
        return "trace-zero", None, None
    res = spectrum(spec, check_z=())
    return "ok", res.eigenvalues, res.hermiticity_defect


def cmd_sweep(args) -> int:
    base = _load_spec(args.spec_file)
    values = _sweep_values(args)
    rows = [(complex(v),) + _sweep_row(base, args.axis, complex(v)) for v in values]
    dim = 3**base.N
    if args.format == "json":
        obj = {
            "spec": base.to_json(),
            "axis": args.axis,
            "rows": [
                {
                    "value": [v.real, v.imag],
                    "flag": flag,
                    "hermiticity_defect": defect,
                    "eigenvalues": None if ev is None else [[float(e.real), float(e.imag)] for e in ev],
                }
                for v, flag, ev, defect in rows
            ],
        }
        _emit(json.dumps(obj, indent=2) + "\n", args.out)
        return EXIT_PASS
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = [f"{args.axis}_re", f"{args.axis}_im", "flag", "hermiticity_defect"]
    for k in range(dim):
        header += [f"eig{k}_re", f"eig{k}_im"]
    w.writerow(header)
    for v, flag, ev, defect in rows:
        row = [repr(v.real), repr(v.imag), flag, "" if defect is None else repr(defect)]
        if ev is None:
            row += [""] * (2 * dim)
        else:
            for e in ev:
                row += [repr(float(e.real)), repr(float(e.imag))]
        w.writerow(row)
    _emit(buf.getvalue(), args.out)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bqism", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a seeded identity check")
    v.add_argument("target", choices=TARGETS)
    v.add_argument("--samples", type=int, default=20)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=None)
    v.add_argument("--params", default=None, help="inline JSON or @file")
    v.add_argument("--grid", default="default", choices=["default"], help="crossing search grid")
    v.add_argument("--out", default=None)
    v.add_argument("--format", default="json", choices=["json"])
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("spectrum", help="diagonalise the open-chain Hamiltonian")
    s.add_argument("spec_file")
    s.add_argument("--out", default=None)
    s.add_argument("--format", default="json", choices=["json", "csv"])
    s.set_defaults(func=cmd_spectrum)

    w = sub.add_parser("sweep", help="spectra along one coupling")
    w.add_argument("spec_file")
    w.add_argument("--axis", required=True, choices=["X", "Y", "a", "b"])
    g = w.add_mutually_exclusive_group(required=True)
    g.add_argument("--range", nargs=2, metavar=("LO", "HI"), help="endpoints; complex allowed for a, b (e.g. 1+2j)")
    g.add_argument("--circle", nargs=2, metavar=("CENTRE", "RADIUS"), help="a or b on a circle")
    w.add_argument("--steps", type=int, required=True)
    w.add_argument("--out", default=None)
    w.add_argument("--format", default="csv", choices=["json", "csv"])
    w.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (BQISMError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
