"""Command-line front end.

Every subcommand prints deterministic text to stdout.  Exit status is 0 on
success, 1 for unparseable input (with usage), and 2 when a mathematical
precondition fails; in that case stderr names the hypothesis.

``--prec N`` and ``--format plain|tabular`` may appear anywhere, even after
the ``--`` that protects negative rationals.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import geometry, hensel, linalg, padic, residue, series, valuation
from .errors import NoRootError, NotAPowerError, PadicError

DEFAULT_PREC = 32


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}")


def _pop_globals(argv: list[str]) -> tuple[list[str], int, str]:
    prec, fmt, rest = DEFAULT_PREC, "plain", []
    it = iter(argv)
    for tok in it:
        name, eq, val = tok.partition("=")
        if name in ("--prec", "--format"):
            if not eq:
                val = next(it, None)
                if val is None:
                    raise UsageError(f"{name} needs a value")
            if name == "--prec":
                try:
                    prec = int(val)
                except ValueError:
                    raise UsageError(f"--prec needs an integer, got {val!r}")
                if prec < 1:
                    raise UsageError("--prec must be positive")
            else:
                if val not in ("plain", "tabular"):
                    raise UsageError(f"--format must be plain or tabular, got {val!r}")
                fmt = val
        else:
            rest.append(tok)
    return rest, prec, fmt


def _padic_arg(text: str, p: int, prec: int) -> padic.PadicNumber:
    try:
        return padic.parse_padic(text, p, prec)
    except (ValueError, ZeroDivisionError) as e:
        if text.startswith(("p-adic(", "O(")):
            raise UsageError(f"bad p-adic literal {text!r}: {e}")
        try:
            Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"not a rational or p-adic literal: {text!r}")
        raise


# -- command implementations: each returns rows of (key or None, value) ----

def cmd_val(a, prec):
    return [(None, str(valuation.vp(a.p, a.x)))]


def cmd_abs(a, prec):
    valuation.check_prime(a.p)
    return [(None, str(valuation.abs_p(a.p, a.x)))]


def cmd_classify_norm(a, prec):
    try:
        oracle = valuation.NormOracle.parse(_read(a.file))
    except ValueError as e:
        if isinstance(e, PadicError):
            raise
        raise UsageError(f"{a.file}: {e}")
    rows = []
    if a.check:
        bad = valuation.check_norm_axioms(oracle, a.check, a.C)
        rows.append(("violations", str(len(bad))))
        for v in bad[:10]:
            rows.append(("violation", f"{v.axiom} {v.args} {v.detail}".strip()))
    rows.insert(0, (None, str(valuation.classify_norm(oracle))))
    return rows


def cmd_embed(a, prec):
    return [(None, str(_padic_arg(a.x, a.p, prec)))]


def cmd_arith(a, prec):
    x, y = _padic_arg(a.x, a.p, prec), _padic_arg(a.y, a.p, prec)
    ops = {"+": lambda: x + y, "-": lambda: x - y, "*": lambda: x * y, "/": lambda: x / y}
    return [(None, str(ops[a.op]()))]


def cmd_digits(a, prec):
    x = _padic_arg(a.x, a.p, prec)
    return [(str(j), str(r)) for j, r in x.digits()]


def cmd_geom_sum(a, prec):
    x = _padic_arg(a.x, a.p, prec + 1)
    return [(None, str(series.geometric_sum(x, prec)))]


def _check_rows(check: str, ok: bool):
    return [("check", f"{check} {'OK' if ok else 'FAILED'}")]


def cmd_hensel(a, prec):
    try:
        f = hensel.Polynomial.parse(a.poly)
    except ValueError as e:
        if isinstance(e, PadicError):
            raise
        raise UsageError(f"bad polynomial {a.poly!r}: {e}")
    z = _padic_arg(a.z, f.p, prec)
    lift = hensel.hensel_refined if a.refined else hensel.hensel_basic
    trace = lift(f, z, prec)
    w = trace.root
    rows = [(None, str(w))]
    for j, (x, r) in enumerate(zip(trace.iterates, trace.residuals)):
        rows.append((f"x_{j}", f"{x.representative()}  |f(x_{j})|_{f.p} <= {r}"))
    fw = f.with_precision(prec + 4)(w.lift_to(prec + 4) if w.is_unit_kind() else w)
    rows += _check_rows(f"f(x) ≡ 0 (mod {f.p}^{prec})", fw.min_valuation >= prec)
    return rows


def cmd_root(a, prec):
    q = valuation.check_prime(a.q)
    p = valuation.check_prime(a.p)
    if a.a == 0:
        return [(None, "0")] + _check_rows(f"x^{q} = 0", True)
    extra = 1 if q == p else 0
    x = padic.from_rational(a.a, p, prec + extra)
    try:
        l, unit = hensel.unit_power_reduction(x, q)
        root = hensel.qth_root(padic.from_rational(unit.representative(), p, prec + extra), q, prec)
    except NotAPowerError as e:
        return [(None, f"no root: {e}")]
    except NoRootError as e:
        return [(None, str(e))]
    root = root.shift(l)
    # x^q agrees with a to prec digits beyond the leading one
    t = prec + q * l
    diff = a.a - root.representative() ** q
    ok = diff == 0 or valuation.vp(p, diff) >= t
    return [(None, str(root))] + _check_rows(f"x^{q} ≡ {a.a} (mod {p}^{t})", ok)


def _cell_arg(text: str) -> geometry.Cell:
    try:
        return geometry.Cell.parse(text)
    except ValueError as e:
        if isinstance(e, PadicError):
            raise
        raise UsageError(str(e))


def cmd_cells(a, prec):
    c = _cell_arg(a.cell)
    rows = [("cell", str(c)), ("diameter", str(c.diameter))]
    if a.compare:
        rows.append(("relation", str(geometry.trichotomy(c, _cell_arg(a.compare)))))
    if a.contains is not None:
        rows.append(("contains", "yes" if c.contains(_padic_arg(a.contains, c.p, prec)) else "no"))
    if a.subdivide is not None:
        for sub in c.subdivide(a.subdivide):
            rows.append(("subcell", str(sub)))
    return rows


_REAL = {
    "one": (lambda p: lambda x: 1, lambda d: 0),
    "abs": (lambda p: lambda x: valuation.abs_p(p, x), lambda d: d),
}
_EXACT = {
    "one": lambda p: lambda x: 1,
    "identity": lambda p: lambda x: x,
    "square": lambda p: lambda x: x * x,
    "abs": lambda p: lambda x: valuation.abs_p(p, x),
}


def cmd_integrate(a, prec):
    p = valuation.check_prime(a.p)
    c = _cell_arg(a.cell) if a.cell else geometry.Cell.unit_ball(p)
    if c.p != p:
        raise UsageError(f"cell prime {c.p} differs from {p}")
    if a.measure is not None:
        if a.function not in _EXACT:
            raise UsageError(f"unknown function {a.function!r}")
        if a.measure == "haar":
            mu = geometry.CellMeasure.haar(p)
        else:
            try:
                mu = geometry.CellMeasure.parse_table(p, _read(a.measure))
            except ValueError as e:
                raise UsageError(f"{a.measure}: {e}")
        value = geometry.integrate_measure(_EXACT[a.function](p), mu, c, a.level, prec)
        return [(None, str(value))]
    if a.ell is not None:
        if a.function not in _EXACT:
            raise UsageError(f"unknown function {a.function!r}")
        value = geometry.integrate_qell(_EXACT[a.function](p), c, a.level, a.ell, prec)
        return [(None, str(value))]
    if a.function not in _REAL:
        raise UsageError(f"real integration supports {sorted(_REAL)}, not {a.function!r}")
    fn, modulus = _REAL[a.function]
    s = geometry.integrate_real(fn(p), c, a.level, modulus)
    return [(None, str(s.value)), ("error", str(s.error))]


def cmd_reduce(a, prec):
    x = _padic_arg(a.x, a.p, max(prec, a.j))
    return [(None, str(residue.reduce(x, a.j).rep))]


def cmd_char(a, prec):
    chi = residue.FiniteCharacter(a.p, a.j, a.k)
    x = _padic_arg(a.x, a.p, max(prec, a.j))
    return [(None, residue.render_rotation(chi(x), a.p, a.j))]


def _matrix(path: str) -> linalg.RationalMatrix:
    try:
        return linalg.RationalMatrix.parse(_read(path))
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"{path}: {e}")


def cmd_matrix_order(a, prec):
    A = _matrix(a.file)
    return [(None, str(linalg.torsion_test(A, a.p)))]


def _closure(gens: list[linalg.RationalMatrix], limit: int = 10_000) -> list[linalg.RationalMatrix]:
    group = list(dict.fromkeys([gens[0].identity_like()] + gens))
    seen = set(group)
    frontier = list(group)
    while frontier:
        nxt = []
        for A in frontier:
            for g in gens:
                B = A @ g
                if B not in seen:
                    seen.add(B)
                    group.append(B)
                    nxt.append(B)
                    if len(group) > limit:
                        raise linalg.HypothesisError("G finite", f"more than {limit} elements generated")
        frontier = nxt
    return group


def cmd_subgroup_check(a, prec):
    mats = [_matrix(f) for f in a.files]
    G = _closure(mats) if a.generate else mats
    report = linalg.subgroup_checks(G, a.p)
    return [("order", str(len(G)))] + report.lines()


def cmd_involution(a, prec):
    A = _matrix(a.file)
    P1, P2 = linalg.involution_projections(A)
    rows = [("P1", str(P1)), ("P2", str(P2))]
    for name, ok in linalg.projection_identities(A, P1, P2).items():
        rows.append(("identity", f"{name} {'OK' if ok else 'FAILED'}"))
    return rows


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="padickit", description="Exact p-adic arithmetic toolkit.",
                     epilog="global flags: --prec N (default 32), --format plain|tabular")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    def add(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("val", cmd_val, "p-adic valuation of a rational")
    sp.add_argument("p", type=int)
    sp.add_argument("x", type=_rational)
    sp = add("abs", cmd_abs, "p-adic absolute value of a rational")
    sp.add_argument("p", type=int)
    sp.add_argument("x", type=_rational)
    sp = add("classify-norm", cmd_classify_norm, "classify a norm oracle file (n<TAB>value lines)")
    sp.add_argument("file")
    sp.add_argument("--check", choices=["ultrametric", "triangle", "quasi"])
    sp.add_argument("--C", type=_rational, default=Fraction(1))
    sp = add("embed", cmd_embed, "embed a rational into Q_p")
    sp.add_argument("p", type=int)
    sp.add_argument("x")
    sp = add("arith", cmd_arith, "ball arithmetic: x OP y")
    sp.add_argument("p", type=int)
    sp.add_argument("x")
    sp.add_argument("op", choices=["+", "-", "*", "/"])
    sp.add_argument("y")
    sp = add("digits", cmd_digits, "base-p digits (exponent, digit)")
    sp.add_argument("p", type=int)
    sp.add_argument("x")
    sp = add("geom-sum", cmd_geom_sum, "sum of x^j to absolute precision --prec")
    sp.add_argument("p", type=int)
    sp.add_argument("x")
    sp = add("hensel", cmd_hensel, "lift an approximate root of 'p; a_0, ..., a_n'")
    sp.add_argument("poly")
    sp.add_argument("z")
    sp.add_argument("--refined", action="store_true", help="use |f(z)| < |f'(z)|^2")
    sp = add("root", cmd_root, "q-th root of a in Q_p")
    sp.add_argument("p", type=int)
    sp.add_argument("q", type=int)
    sp.add_argument("a", type=_rational)
    sp = add("cells", cmd_cells, "cell diameter, subdivision, trichotomy")
    sp.add_argument("cell", help="cell(p; center; scale)")
    sp.add_argument("--subdivide", type=int, metavar="N")
    sp.add_argument("--compare", metavar="CELL")
    sp.add_argument("--contains", metavar="Y")
    sp = add("integrate", cmd_integrate, "level-n Riemann sum over a cell")
    sp.add_argument("p", type=int)
    sp.add_argument("level", type=int)
    sp.add_argument("--function", default="one", help="one, abs, identity, square")
    sp.add_argument("--cell", help="default Z_p")
    target = sp.add_mutually_exclusive_group()
    target.add_argument("--ell", type=int, help="Q_ell-valued sum")
    target.add_argument("--measure", help="'haar' or a scale,residue,value CSV file")
    sp = add("reduce", cmd_reduce, "image of x in Z/p^jZ")
    sp.add_argument("p", type=int)
    sp.add_argument("x")
    sp.add_argument("j", type=int)
    sp = add("char", cmd_char, "rotation of the character k at level j")
    sp.add_argument("p", type=int)
    sp.add_argument("j", type=int)
    sp.add_argument("k", type=int)
    sp.add_argument("x")
    sp = add("matrix-order", cmd_matrix_order, "torsion test for a rational matrix file")
    sp.add_argument("file")
    sp.add_argument("p", type=int)
    sp = add("subgroup-check", cmd_subgroup_check, "finite-subgroup checks")
    sp.add_argument("p", type=int)
    sp.add_argument("files", nargs="+")
    sp.add_argument("--generate", action="store_true", help="treat the files as generators")
    sp = add("involution", cmd_involution, "eigenprojections of an involution")
    sp.add_argument("file")
    return parser


def render(rows, fmt: str) -> str:
    out = []
    for key, value in rows:
        if fmt == "tabular":
            out.append(f"{key or 'value'}\t{value.replace(chr(10), ' ; ')}")
        elif key is None:
            out.append(value)
        elif "\n" in value:
            out.append(f"{key}:")
            out.extend("  " + ln for ln in value.splitlines())
        else:
            out.append(f"{key}: {value}")
    return "\n".join(out)


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv, prec, fmt = _pop_globals(argv)
        args = parser.parse_args(argv)
        with padic.precision(prec):
            rows = args.fn(args, prec)
    except UsageError as e:
        print(str(e) if str(e).startswith("usage") else f"{parser.format_usage()}error: {e}", file=stderr)
        return 1
    except (PadicError, ValueError, ArithmeticError) as e:
        print(f"error: {e}", file=stderr)
        return 2
    print(render(rows, fmt), file=stdout)
    return 0


def main():  # pragma: no cover
    sys.exit(run())
