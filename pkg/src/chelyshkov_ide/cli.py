"""Command-line front end.

Exit codes: 0 on success, 1 on usage or input errors, 2 when Newton does
not converge (for a sweep: when any cell fails).
"""
import argparse
import csv
import io
import json
import sys
import warnings

import numpy as np

from .analysis import convergence_sweep
from .benchmarks import BENCHMARKS, get_benchmark
from .exceptions import ChelyshkovError, NonConvergence, SingularJacobian
from .problem_file import load_problem
from .solver import solve

EXIT_OK, EXIT_USAGE, EXIT_NONCONVERGED = 0, 1, 2
DEFAULT_POINTS = (0.1, 0.3, 0.5, 0.7, 0.9)
PLOT_POINTS = 201


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _float_list(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _sweep_range(text):
    """``start:end:step`` with ``end`` included."""
    parts = text.split(":")
    try:
        if len(parts) not in (2, 3):
            raise ValueError
        start, end = int(parts[0]), int(parts[1])
        step = int(parts[2]) if len(parts) == 3 else 1
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:end[:step] integers, got {text!r}") from None
    if step <= 0 or start < 0 or end < start:
        raise argparse.ArgumentTypeError(f"invalid sweep range {text!r}")
    return list(range(start, end + 1, step))


def build_parser():
    p = _Parser(prog="chelyshkov-ide",
                description="Solve fractional Fredholm integro-differential equations by Chelyshkov collocation.")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--example", type=int, choices=sorted(BENCHMARKS), help="built-in benchmark problem")
    src.add_argument("--problem", metavar="PATH", help="problem file with key = expression lines")
    p.add_argument("--N", type=int, help="basis index (N + 1 functions); default from the benchmark, else 4")
    p.add_argument("--nu", type=_float_list, help="basis exponent (default alpha); a list is allowed with --sweep")
    p.add_argument("--alpha", type=float, help="override the order of the derivative")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--quad-order", type=int, help="Fredholm quadrature points (default max(64, 2N+16))")
    p.add_argument("--quad-rule", choices=("mapped", "plain"), default="mapped")
    p.add_argument("--oversample", type=int, default=1)
    p.add_argument("--points", type=_float_list, help="comma-separated evaluation points")
    p.add_argument("--sweep", type=_sweep_range, metavar="START:END:STEP", help="L2 errors over a range of N")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument("--emit-plot-data", metavar="PATH", help=f"CSV of x, exact, approx at {PLOT_POINTS} points")
    p.add_argument("--no-timing", action="store_true", help="leave the sweep seconds column empty")
    return p


def _resolve(args):
    if args.example is not None:
        entry = get_benchmark(args.example)
        problem = entry.problem(alpha=args.alpha)
        N = entry.N if args.N is None else args.N
        file_nu = None
    else:
        loaded = load_problem(args.problem)
        problem = loaded.problem
        if args.alpha is not None:
            from dataclasses import replace
            problem = replace(problem, alpha=args.alpha)
        N = 4 if args.N is None else args.N
        file_nu = loaded.nu
    if args.nu is not None:
        nus = args.nu
    elif file_nu is not None:
        nus = [file_nu]
    else:
        nus = [problem.alpha]
    return problem, N, nus


def _fmt(v, digits=17):
    return "" if v is None or (isinstance(v, float) and np.isnan(v)) else f"{v:.{digits}g}"


def _point_rows(sol, exact, xs):
    approx = sol(np.asarray(xs, dtype=float))
    rows = []
    for x, a in zip(xs, approx):
        e = float(exact(np.asarray(x))) if exact is not None else None
        rows.append((float(x), e, float(a), abs(e - a) if e is not None else None))
    return rows


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _text_table(header, rows):
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(lines) + "\n"


def _render_solve(args, problem, N, nu, res, rows):
    header = ("x", "exact", "approx", "abs_error")
    if args.format == "csv":
        return _csv(header, [[_fmt(v) for v in r] for r in rows])
    if args.format == "json":
        doc = {
            "problem": problem.name, "N": N, "nu": nu, "alpha": problem.alpha,
            "converged": res.converged, "iterations": res.iterations, "residual_norm": res.residual_norm,
            "history": res.history, "W": res.W.tolist(), "coefficients": res.solution.coeffs.tolist(),
            "points": [dict(zip(header, r)) for r in rows],
        }
        return json.dumps(doc, indent=2) + "\n"
    out = [
        f"problem: {problem.name}  N={N}  nu={nu:g}  alpha={problem.alpha:g}",
        f"Newton: {res.iterations} iterations, ||F||_inf = {res.residual_norm:.3e}, "
        f"{'converged' if res.converged else 'NOT converged'}",
        "history:",
    ]
    for k, (h, W) in enumerate(zip(res.history, res.iterates)):
        out.append(f"  W_{k}: ||F|| = {h:.6e}  W = [{', '.join(f'{w:.16g}' for w in W)}]")
    out.append("W = [" + ", ".join(f"{w:.17g}" for w in res.W) + "]")
    out.append("coefficients = [" + ", ".join(f"{c:.17g}" for c in res.solution.coeffs) + "]")
    out.append("")
    out.append(_text_table(header, [[_fmt(v, 16) for v in r] for r in rows]).rstrip("\n"))
    return "\n".join(out) + "\n"


def _render_sweep(args, table):
    header = ("N", "nu", "l2_error", "iterations", "seconds")
    rows = [
        (str(r.N), _fmt(r.nu), _fmt(r.l2_error), str(r.iterations), "" if args.no_timing else f"{r.seconds:.6f}")
        for r in table.rows
    ]
    if args.format == "csv":
        return _csv(header, rows)
    if args.format == "json":
        return json.dumps([
            {"N": r.N, "nu": r.nu, "l2_error": None if np.isnan(r.l2_error) else r.l2_error,
             "iterations": r.iterations, "seconds": None if args.no_timing else r.seconds,
             "converged": r.converged, "error": r.error}
            for r in table.rows
        ], indent=2) + "\n"
    return _text_table(header, rows)


def _emit(args, text, stdout):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def run(argv=None, stdout=None, stderr=None):
    """Run the CLI and return the exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(argv)
        problem, N, nus = _resolve(args)
        exact = problem.exact
        opts = dict(tol=args.tol, max_iter=args.max_iter, quad_order=args.quad_order,
                    quad_rule=args.quad_rule, oversample=args.oversample)
        if args.sweep is not None:
            if exact is None:
                raise UsageError("--sweep needs an exact solution")
            table = convergence_sweep(problem, exact, args.sweep, nus, **opts)
            _emit(args, _render_sweep(args, table), stdout)
            return EXIT_OK if all(r.converged for r in table.rows) else EXIT_NONCONVERGED
        if len(nus) != 1:
            raise UsageError("several --nu values are only allowed with --sweep")
        nu = nus[0]
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            res = solve(problem, N, nu, **opts)
        for w in caught:
            print(f"warning: {w.message}", file=stderr)
        xs = args.points if args.points is not None else list(DEFAULT_POINTS)
        rows = _point_rows(res.solution, exact, xs)
        _emit(args, _render_solve(args, problem, N, nu, res, rows), stdout)
        if args.emit_plot_data:
            grid = np.linspace(0.0, 1.0, PLOT_POINTS)
            plot = _point_rows(res.solution, exact, grid)
            with open(args.emit_plot_data, "w", encoding="utf-8", newline="") as fh:
                fh.write(_csv(("x", "exact", "approx"), [[_fmt(v) for v in r[:3]] for r in plot]))
        if not res.converged:
            print(f"error: Newton did not converge (||F|| = {res.residual_norm:.3e})", file=stderr)
            return EXIT_NONCONVERGED
        return EXIT_OK
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # --help exits 0 through argparse
        return int(exc.code or 0)
    except (SingularJacobian, NonConvergence) as exc:
        print(f"error: solver failed: {exc}", file=stderr)
        return EXIT_NONCONVERGED
    except (ChelyshkovError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE


def main(argv=None):
    sys.exit(run(argv))
