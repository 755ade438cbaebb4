"""Command-line front end.

Data goes to stdout (or ``--output``) as CSV with a header row, or as a JSON
array of flat objects with the same field names.  Diagnostics go to stderr.
Exit status: 0 success, 1 verification mismatch, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from typing import Any, Sequence

from . import asympt, monoid, spinchain, verify
from .errors import FareySpinError

log = logging.getLogger("fareyspin")

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_range(text: str) -> tuple[int, int]:
    """Inclusive ``a:b`` range (a bare ``a`` means ``a:a``)."""
    try:
        if ":" in text:
            a, b = text.split(":", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; expected a:b") from None
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return v


# -- formatting --------------------------------------------------------------


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _jsonable(v: Any) -> Any:
    if isinstance(v, float):
        if not math.isfinite(v):
            return _fmt(v)
        return float(f"{v:.12g}")
    return v


def render(rows: Sequence[dict[str, Any]], fields: Sequence[str], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([{k: _jsonable(r[k]) for k in fields} for r in rows]) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([_fmt(r[k]) for k in fields])
    return buf.getvalue()


# -- commands ----------------------------------------------------------------


def _n_bounds(args: argparse.Namespace, default: tuple[int, int] | None = None) -> tuple[int, int]:
    if args.n is not None:
        return args.n, args.n
    if args.n_range is not None:
        return args.n_range
    if default is not None:
        return default
    raise UsageError("one of --n or --n-range is required")


PHI_METHODS = {
    "divisor": spinchain.phi_divisor_sum,
    "boca": spinchain.phi_boca,
}


def cmd_phi(args):
    lo, hi = _n_bounds(args)
    if lo < 3:
        raise UsageError("Phi(N) needs N >= 3")
    if args.method == "main":
        table = spinchain.phi_table(hi, args.jobs)
        values = [int(table[n]) for n in range(lo, hi + 1)]
    elif args.method == "oracle":
        counts = monoid.trace_counts(hi, args.jobs)
        values = counts[lo : hi + 1]
    else:
        values = [PHI_METHODS[args.method](n) for n in range(lo, hi + 1)]
    rows = [{"N": n, "phi": v} for n, v in zip(range(lo, hi + 1), values)]
    return rows, ["N", "phi"], EXIT_OK


def cmd_psi(args):
    lo, hi = _n_bounds(args)
    if lo < 3:
        raise UsageError("Psi(N) needs N >= 3")
    rows = []
    for row in spinchain.psi_batch(hi, args.jobs)[lo - 3 :]:
        main = asympt.psi_main(row.n)
        rows.append({
            "N": row.n,
            "psi": row.psi,
            "psi_main": main,
            "relative_error": (row.psi - main) / main,
        })
    return rows, ["N", "psi", "psi_main", "relative_error"], EXIT_OK


def cmd_upsilon(args):
    if args.x is not None:
        lo = hi = args.x
    elif args.x_range is not None:
        lo, hi = args.x_range
    else:
        raise UsageError("one of --x or --x-range is required")
    if lo < 1:
        raise UsageError("X must be positive")
    rows = []
    for X in range(lo, hi + 1):
        ups = spinchain.upsilon(X)
        if X % 4 in (0, 1):
            cut = spinchain.upsilon_cut(X)
            delta = ups - 2 * cut
        else:
            cut = delta = 0
        rows.append({"X": X, "upsilon": ups, "upsilon_cut": cut, "key_lemma_delta": delta})
    return rows, ["X", "upsilon", "upsilon_cut", "key_lemma_delta"], EXIT_OK


def cmd_verify(args):
    lo, hi = _n_bounds(args, (3, 300))
    if hi < 3:
        raise UsageError("verify needs a range reaching N >= 3")
    results = verify.verify_range(lo, hi, args.jobs)
    rows = [
        {"check": r.name, "lo": r.lo, "hi": r.hi, "cases": r.cases, "status": "ok" if r.ok else "FAIL"}
        for r in results
    ]
    status = EXIT_OK
    for r in results:
        if not r.ok:
            print(f"mismatch in {r.name}: {r.mismatch}", file=sys.stderr)
            status = EXIT_MISMATCH
            break
    return rows, ["check", "lo", "hi", "cases", "status"], status


def _upsilon_of_n_squared_minus_4(lo: int, hi: int, jobs: int) -> list[int]:
    table = spinchain.phi_table(hi, jobs)
    return [int(table[n]) for n in range(lo, hi + 1)]


def cmd_asympt(args):
    lo, hi = _n_bounds(args)
    if lo < 3:
        raise UsageError("X = n^2 - 4 needs n >= 3")
    c3 = asympt.DEFAULT_C3 if args.c3 is None else args.c3
    if args.c3 is None:
        print(f"c3 = {c3:.12g} (empirical fit, n in [100, 2000])", file=sys.stderr)
    ns = list(range(lo, hi + 1))
    ups = _upsilon_of_n_squared_minus_4(lo, hi, args.jobs)
    reports = asympt.main_terms([n * n - 4 for n in ns], c3, args.tol, ups, args.jobs)
    rows = [
        {
            "n": n, "X": r.X, "D": r.D, "r": r.r, "upsilon": int(r.upsilon),
            "L1": r.L1, "Llogderiv": r.Llogderiv, "eta": r.eta.value,
            "eta_deriv": r.eta.derivative, "c3": r.c3, "A": r.A, "residual": r.residual,
        }
        for n, r in zip(ns, reports)
    ]
    fields = ["n", "X", "D", "r", "upsilon", "L1", "Llogderiv", "eta", "eta_deriv", "c3", "A", "residual"]
    return rows, fields, EXIT_OK


def cmd_fit_c3(args):
    lo, hi = _n_bounds(args, (100, 2000))
    if lo < 3:
        raise UsageError("X = n^2 - 4 needs n >= 3")
    ns = list(range(lo, hi + 1))
    ups = _upsilon_of_n_squared_minus_4(lo, hi, args.jobs)
    c3 = asympt.fit_c3([n * n - 4 for n in ns], args.tol, ups, jobs=args.jobs)
    rows = [{"sample": "X=n^2-4", "n_lo": lo, "n_hi": hi, "size": len(ns), "c3": c3}]
    return rows, ["sample", "n_lo", "n_hi", "size", "c3"], EXIT_OK


def cmd_dist(args):
    n_max = args.n if args.n is not None else 10_000
    table = spinchain.phi_table(n_max, args.jobs)
    hist = spinchain.phi_star_histogram(n_max, args.bin_width, args.t_max, table)
    rows = [{"bin_center": c, "frequency": f} for c, f in hist.rows()]
    rows.append({"bin_center": math.inf, "frequency": hist.overflow})
    return rows, ["bin_center", "frequency"], EXIT_OK


COMMANDS = {
    "phi": cmd_phi,
    "psi": cmd_psi,
    "upsilon": cmd_upsilon,
    "verify": cmd_verify,
    "asympt": cmd_asympt,
    "fit-c3": cmd_fit_c3,
    "dist": cmd_dist,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--jobs", type=_positive_int, default=1, help="worker processes")
    common.add_argument("--tol", type=_positive_float, default=1e-10)
    common.add_argument("--output", "-o", help="write data here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")

    n_args = argparse.ArgumentParser(add_help=False)
    n_args.add_argument("--n", type=int, help="single value (wins over --n-range)")
    n_args.add_argument("--n-range", type=parse_range, metavar="A:B", help="inclusive range")

    p = argparse.ArgumentParser(prog="fareyspin", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("phi", parents=[common, n_args], help="state counts Phi(N)")
    s.add_argument("--method", choices=["main", "divisor", "boca", "oracle"], default="main")
    sub.add_parser("psi", parents=[common, n_args], help="Psi(N) against c1 N^2 log N + c2 N^2")
    s = sub.add_parser("upsilon", parents=[common], help="lattice counts and the square/non-square delta")
    s.add_argument("--x", type=int)
    s.add_argument("--x-range", type=parse_range, metavar="A:B")
    sub.add_parser("verify", parents=[common, n_args], help="cross-check all Phi routes")
    s = sub.add_parser("asympt", parents=[common, n_args], help="main term A(n^2 - 4)")
    s.add_argument("--c3", type=float, help=f"constant c3 (default: fitted {asympt.DEFAULT_C3})")
    sub.add_parser("fit-c3", parents=[common, n_args], help="least-squares c3 over X = n^2 - 4")
    s = sub.add_parser("dist", parents=[common, n_args], help="histogram of Phi(n) / (n log n)")
    s.add_argument("--bin-width", type=_positive_float, default=0.05)
    s.add_argument("--t-max", type=_positive_float, default=5.0)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
    )
    log.info("running %s", args.command)
    try:
        rows, fields, status = COMMANDS[args.command](args)
    except (UsageError, FareySpinError) as exc:
        parser.error(str(exc))  # exits with status 2
    text = render(rows, fields, args.format)
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
            sys.stdout.flush()
    except OSError as exc:
        print(f"fareyspin: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    log.info("wrote %d rows", len(rows))
    return status


if __name__ == "__main__":
    sys.exit(main())
