"""Command-line entry point: one experiment per invocation, CSV out.

Every subcommand writes RFC-4180 CSV to stdout (or ``--out``), preceded by
``#`` metadata lines that echo the configuration.  Data rows never carry
timestamps, so identical configurations give byte-identical output.

Exit status: 0 on success, 2 on invalid input, 1 when a computation fails.
Failures print one ``error,<kind>,<message>`` line to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import arith, circle, coeffs, expsums, shifted, special, voronoi

EXIT_OK, EXIT_COMPUTE, EXIT_INVALID = 0, 1, 2


class ValidationError(ValueError):
    pass


# --------------------------------------------------------------------------
# argument types

def _sci_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    return [_sci_float(t) for t in text.split(",") if t.strip()]


def _require(cond: bool, message: str):
    if not cond:
        raise ValidationError(message)


# --------------------------------------------------------------------------
# output

class Table:
    def __init__(self, columns: list[str], meta: dict | None = None):
        self.columns = columns
        self.meta = meta or {}
        self.rows: list[list] = []

    def add(self, *row):
        self.rows.append(list(row))

    def render(self, config: dict) -> str:
        buf = io.StringIO()
        for key in sorted(config):
            buf.write(f"# {key}: {config[key]}\n")
        for key, val in self.meta.items():
            buf.write(f"# {key}: {val}\n")
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, complex):
        return repr(complex(v)).strip("()")
    return str(v)


# --------------------------------------------------------------------------
# shared helpers

def _coefficients(args, n_max: int) -> coeffs.CoefficientTable:
    if args.coeffs:
        table = coeffs.load_coefficients(args.coeffs)
        _require(table.n_max >= n_max, f"{args.coeffs} stops at n = {table.n_max}; need {n_max}")
        return table
    return coeffs.ramanujan_tau(n_max)


def _map(args, fn, items):
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# --------------------------------------------------------------------------
# subcommands

def cmd_rl(args) -> Table:
    _require(1 <= args.ell <= 64, "--ell must lie in [1, 64]")
    _require(args.n_max >= 0, "--n-max must be >= 0")
    t = arith.repr_count(args.ell, args.n_max)
    out = Table(["n", "r_l(n)"], {"columns": "r_l(n) = #{x in Z^l : |x|^2 = n}"})
    for n in range(t.n_max + 1):
        out.add(n, int(t[n]))
    return out


def cmd_tau(args) -> Table:
    _require(1 <= args.n_max <= 10**7, "--n-max must lie in [1, 10^7]")
    tau = coeffs.ramanujan_tau_exact(args.n_max)
    out = Table(["n", "tau(n)", "lambda(n)"], {"columns": "lambda(n) = tau(n) / n^(11/2)"})
    for n, t in enumerate(tau, start=1):
        out.add(n, t, t / n**5.5)
    return out


def cmd_coeffs_check(args) -> Table:
    if args.coeffs:
        table = coeffs.load_coefficients(args.coeffs, validate_table=False)
    else:
        _require(args.n_max and args.n_max >= 1, "give --coeffs PATH or --n-max N")
        table = coeffs.ramanujan_tau(args.n_max)
    tol = args.tolerance if args.tolerance is not None else 1e-9
    hecke = coeffs.check_hecke_relations(table, tol)
    theta = table.spec.theta if args.theta is None else args.theta
    bound = coeffs.check_ramanujan_bound(table, theta=theta, tol=tol)
    out = Table(["check", "kind", "indices", "residual"], {"table_n_max": table.n_max, "bound_theta": theta})
    for v in hecke.violations:
        out.add("violation", v.kind, " ".join(map(str, v.indices)), v.residual)
    for n in bound:
        out.add("violation", "bound", n, float(abs(table.lam[n])))
    out.add("summary", "total", len(hecke.violations) + len(bound), 0.0)
    return out


def cmd_expsum(args) -> Table:
    q = args.q
    _require(1 <= q < arith.MODULUS_CAP, "--q must lie in [1, 2^31)")
    kind = args.kind
    out = Table(["kind", "q", "params", "re", "im", "abs", "bound"])
    if kind == "gauss":
        g = expsums.gauss_sum(args.a, args.b, q)
        out.add(kind, q, f"a={args.a} b={args.b}", g.real, g.imag, abs(g), math.sqrt(2 * q))
    elif kind == "kloosterman":
        v = expsums.kloosterman(args.m, args.n, q)
        out.add(kind, q, f"m={args.m} n={args.n}", v.value.real, 0.0, abs(v), v.bound)
    elif kind == "salie":
        v = expsums.salie(args.m, args.n, q)
        out.add(kind, q, f"m={args.m} n={args.n}", v.value.real, v.value.imag, abs(v), v.bound)
    elif kind == "ramanujan":
        c = expsums.ramanujan_sum(args.n, q)
        out.add(kind, q, f"n={args.n}", float(c), 0.0, float(abs(c)), float(math.gcd(args.n, q)))
    elif kind == "twisted":
        v = expsums.twisted_sum_C(args.b1, args.b2, args.h, args.u, q)
        bound = expsums.proposition2_bound(args.h, q)
        out.add(kind, q, f"b1={args.b1} b2={args.b2} h={args.h} u={args.u}", v.real, v.imag, abs(v), bound)
    else:  # theta
        v = expsums.theta_char_sum(args.h, args.m, q, args.ell)
        out.add(kind, q, f"h={args.h} M={args.m} ell={args.ell}", v.value.real, v.value.imag, abs(v.value), v.bound)
    return out


def cmd_voronoi_check(args) -> Table:
    _require(args.X > 0, "--X must be positive")
    _require(args.Delta > 4, "--Delta must exceed 4")
    q = args.q
    _require(q >= 1, "--q must be >= 1")
    _require(q * q <= args.X * math.log(args.X) ** 2, "need q^2 <= X log^2 X")
    tail = args.tolerance if args.tolerance is not None else voronoi.TAIL_TOL
    w = voronoi.make_window("theta", args.X, args.Delta)
    a_values = args.a if args.a else None
    out = Table(["object", "q", "a", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "relerr", "dual_terms"])
    if args.form:
        # the dual sum runs to transform arguments 4 pi sqrt(nX)/q of about 2*10^4
        n_need = int(args.X) + 1
        if not args.coeffs:
            n_need = min(max(n_need, int((1600 * q) ** 2 / args.X) + 1), 10**7)
        table = _coefficients(args, n_need)
        checks = voronoi.voronoi_f_all(table, q, w, a_values, args.beta, tail)
        for a, c in zip(a_values or _units(q), checks):
            out.add("f", q, a, c.lhs.real, c.lhs.imag, c.rhs.real, c.rhs.imag, c.relerr, c.dual_terms)
        return out
    _require(q % 4 != 2, "q = 2 (mod 4) is not supported for r_l")
    ells = args.ell or [2]
    _require(all(2 <= e <= 16 for e in ells), "--ell must lie in [2, 16]")
    results = _map(args, lambda e: voronoi.voronoi_r_all(e, q, w, a_values, args.beta, tail), ells)
    for e, checks in zip(ells, results):
        for a, c in zip(a_values or _units(q), checks):
            out.add(f"r_{e}", q, a, c.lhs.real, c.lhs.imag, c.rhs.real, c.rhs.imag, c.relerr, c.dual_terms)
    return out


def _units(q: int) -> list[int]:
    return [a for a in range(1, q + 1) if math.gcd(a, q) == 1]


def cmd_jutila_check(args) -> Table:
    out = Table(["Q", "delta", "L", "l2_error", "fitted_constant"],
                {"columns": "fitted_constant = l2_error * delta * L^2 / Q^2"})
    for Q in args.Q:
        delta = args.delta if args.delta is not None else 1 / Q
        _require(Q**-2 <= delta * (1 + 1e-12) and delta <= Q**-1 * (1 + 1e-12), "delta must lie in [Q^-2, Q^-1]")
        ms = circle.build_moduli_set(args.D, Q, args.h)
        err = circle.jutila_l2_error(ms, delta)
        out.add(Q, delta, ms.L, err, err * delta * ms.L**2 / Q**2)
    return out


def cmd_farey(args) -> Table:
    _require(1 <= args.Q <= 2000, "--Q must lie in [1, 2000]")
    out = Table(["a", "q", "left", "right", "length"])
    for arc in circle.farey_dissect(args.Q):
        out.add(arc.a, arc.q, str(arc.left), str(arc.right), str(arc.length))
    return out


def cmd_theta_arc(args) -> Table:
    _require(args.X >= 1, "--X must be >= 1")
    Q = int(5 * math.sqrt(args.X))
    q_max = args.q_max if args.q_max else Q
    _require(1 <= q_max <= Q, f"--q-max must lie in [1, {Q}]")
    out = Table(["a", "q", "beta", "approx_re", "approx_im", "actual_re", "actual_im", "residual", "allowance"],
                {"columns": "allowance = 10 sqrt(q) log(q + 2)"})
    fractions = args.beta_points
    for q in range(1, q_max + 1):
        for a in _units(q):
            for k in range(fractions):
                beta = (-1 + 2 * k / max(fractions - 1, 1)) / (q * Q) if fractions > 1 else 0.0
                r = special.theta_major_arc(a, q, beta, args.X, Q)
                out.add(a, q, beta, r.approx.real, r.approx.imag, r.actual.real, r.actual.imag,
                        r.residual, 10 * math.sqrt(q) * math.log(q + 2))
    return out


_SHIFTED_COLUMNS = ["ell", "h", "X", "Delta", "S_direct", "S_smoothed", "gap", "fitted_slope", "theorem_exponent"]


def cmd_shifted_sum(args) -> Table:
    _require(args.X >= 1 and args.h >= 0, "need X >= 1 and h >= 0")
    _require(args.Delta > 4, "--Delta must exceed 4")
    table = _coefficients(args, int(args.X) + args.h)
    direct = shifted.shifted_sum_direct(args.ell, args.h, args.X, table)
    sm = shifted.shifted_sum_smoothed(args.ell, args.h, args.X, args.Delta, table)
    out = Table(_SHIFTED_COLUMNS, {"gap": "sum over X/2 < n <= X minus the smoothed sum"})
    out.add(args.ell, args.h, args.X, args.Delta, direct, sm.smoothed, sm.gap, "",
            shifted.theorem_exponent(args.ell, table.spec.theta))
    return out


def cmd_circle_recon(args) -> Table:
    _require(1 <= args.X <= 1e4, "--X must lie in [1, 10^4]")
    _require(args.Delta > 4, "--Delta must exceed 4")
    table = _coefficients(args, int(args.X) + args.h)
    rtol = args.tolerance if args.tolerance is not None else 1e-10
    r = shifted.circle_reconstruction(args.h, args.X, table, args.Delta, rtol=rtol)
    out = Table(["h", "X", "Q", "arcs", "direct", "reconstructed_re", "reconstructed_im", "relerr"])
    out.add(args.h, args.X, r.Q, r.n_arcs, r.direct, r.reconstructed.real, r.reconstructed.imag, r.relerr)
    return out


def cmd_exponent_fit(args) -> Table:
    xs = sorted(args.X)
    _require(len(xs) >= 4 and xs[-1] / xs[0] >= 10**1.5 * (1 - 1e-9), "need >= 4 X values spanning >= 1.5 decades")
    _require(all(h >= 1 for h in args.h), "every h must be >= 1")
    table = _coefficients(args, int(xs[-1]) + max(args.h))
    grid = shifted.ExperimentGrid(args.ell, tuple(xs), tuple(args.h), args.Delta, table)
    fits = shifted.exponent_fit(grid)
    out = Table(_SHIFTED_COLUMNS, {"fit": "least squares of log(dyadic RMS of S_h) on log X"})
    for fit in fits:
        for X in xs:
            direct = shifted.shifted_sum_direct(args.ell, fit.h, X, table)
            sm = shifted.shifted_sum_smoothed(args.ell, fit.h, X, args.Delta, table)
            out.add(args.ell, fit.h, X, args.Delta, direct, sm.smoothed, sm.gap, fit.slope, fit.theorem_exponent)
    return out


# --------------------------------------------------------------------------
# parser

def _global_flags(defaults: bool) -> argparse.ArgumentParser:
    # the subcommand copies must not reset flags given before the subcommand
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--out", metavar="PATH", default=d(None), help="write CSV here instead of stdout")
    g.add_argument("--threads", type=int, default=d(1), help="worker threads for independent sub-runs")
    g.add_argument("--tolerance", type=_sci_float, default=d(None),
                   help="numerical tolerance passed to the experiment (meaning depends on the subcommand)")
    return g


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shiftconv", description=__doc__.splitlines()[0], parents=[_global_flags(True)])
    sub = p.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")
    common = _global_flags(False)

    def add(name, func, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        sp.set_defaults(func=func)
        return sp

    sp = add("rl", cmd_rl, "table of r_l(n), the number of representations as a sum of l squares")
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--n-max", type=int, required=True)

    sp = add("tau", cmd_tau, "Ramanujan tau(n) and the normalized eigenvalues of the discriminant form")
    sp.add_argument("--n-max", type=int, required=True)

    sp = add("coeffs-check", cmd_coeffs_check, "Hecke relations and the d(n) n^theta bound for a coefficient table")
    sp.add_argument("--coeffs", metavar="PATH", help="coefficient file (default: tau table)")
    sp.add_argument("--n-max", type=int, default=None, help="tau table length when no file is given")
    sp.add_argument("--theta", type=_sci_float, default=None, help="exponent in the size bound (default: from the table)")

    sp = add("expsum", cmd_expsum, "evaluate one complete exponential sum")
    sp.add_argument("--kind", choices=["gauss", "kloosterman", "salie", "ramanujan", "twisted", "theta"], required=True)
    sp.add_argument("--q", type=int, required=True)
    for name in ("a", "b", "m", "n", "h", "u", "b1", "b2"):
        sp.add_argument(f"--{name}", type=int, default=0 if name != "a" else 1)
    sp.add_argument("--ell", type=int, default=2)

    sp = add("voronoi-check", cmd_voronoi_check, "both sides of the Voronoi formula, one row per twist a")
    sp.add_argument("--ell", type=_int_list, default=None, help="comma-separated l values (r_l case)")
    sp.add_argument("--form", action="store_true", help="check lambda_f instead of r_l")
    sp.add_argument("--coeffs", metavar="PATH", help="coefficient file for --form (default: tau)")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--a", type=_int_list, default=None, help="twists (default: all units mod q)")
    sp.add_argument("--X", type=_sci_float, default=1e3)
    sp.add_argument("--Delta", type=_sci_float, default=16.0)
    sp.add_argument("--beta", type=_sci_float, default=0.0)

    sp = add("jutila-check", cmd_jutila_check, "exact L^2 discrepancy of Jutila's approximation")
    sp.add_argument("--Q", type=_float_list, required=True, help="comma-separated Q values")
    sp.add_argument("--delta", type=_sci_float, default=None, help="interval radius (default: 1/Q)")
    sp.add_argument("--D", type=int, default=1)
    sp.add_argument("--h", type=int, default=1)

    sp = add("farey", cmd_farey, "Farey arcs of order Q with exact endpoints")
    sp.add_argument("--Q", type=int, required=True)

    sp = add("theta-arc", cmd_theta_arc, "theta sum on major arcs against 2 G(a,0;q) Phi_0(beta) / q")
    sp.add_argument("--X", type=_sci_float, required=True)
    sp.add_argument("--q-max", type=int, default=None)
    sp.add_argument("--beta-points", type=int, default=3, help="beta samples per arc, evenly spaced")

    sp = add("shifted-sum", cmd_shifted_sum, "direct and smoothed shifted convolution sum at one point")
    sp.add_argument("--ell", type=int, default=2)
    sp.add_argument("--h", type=int, required=True)
    sp.add_argument("--X", type=_sci_float, required=True)
    sp.add_argument("--Delta", type=_sci_float, default=16.0)
    sp.add_argument("--coeffs", metavar="PATH")

    sp = add("circle-recon", cmd_circle_recon, "smoothed l = 2 sum rebuilt from Farey arcs")
    sp.add_argument("--h", type=int, required=True)
    sp.add_argument("--X", type=_sci_float, required=True)
    sp.add_argument("--Delta", type=_sci_float, default=8.0)
    sp.add_argument("--coeffs", metavar="PATH")

    sp = add("exponent-fit", cmd_exponent_fit, "growth exponents of S_h(X) over a grid of X")
    sp.add_argument("--ell", type=int, default=2)
    sp.add_argument("--h", type=_int_list, required=True)
    sp.add_argument("--X", type=_float_list, required=True)
    sp.add_argument("--Delta", type=_sci_float, default=16.0)
    sp.add_argument("--coeffs", metavar="PATH")
    return p


def _config(args) -> dict:
    skip = {"func", "out", "threads"}
    return {k: v for k, v in vars(args).items() if k not in skip and v is not None}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _require(args.threads >= 1, "--threads must be >= 1")
        table = args.func(args)
    except (ValueError, coeffs.CoefficientFileError, OSError) as exc:
        print(f"error,validation,{exc}", file=sys.stderr)
        return EXIT_INVALID
    except (RuntimeError, ArithmeticError) as exc:
        print(f"error,computation,{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    text = table.render(_config(args))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
