"""Matrices over Q and Z_p: determinants, reduction mod p, and torsion.

Torsion questions are answered only for exact rational matrices.  A
capped-precision p-adic matrix can certify ``A^m != I``, or a congruence
modulo p^N, but it can never certify ``A^m == I``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import HypothesisError, PrecisionError, PrimeMismatchError
from .padic import PadicNumber, default_precision
from .valuation import bad_primes, check_prime, vp

__all__ = [
    "RationalMatrix", "PadicMatrix", "ModMatrix", "UnipotentShape", "TorsionResult",
    "SubgroupReport", "det", "is_glnzp", "reduce_mod_p", "unipotent_shape",
    "power_expansion_check", "torsion_test", "subgroup_checks", "gl_order",
    "involution_projections", "projection_identities",
]


class _Matrix:
    """Square matrix with immutable rows; subclasses fix the entry ring."""

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence]):
        rows = tuple(tuple(self._entry(x) for x in r) for r in rows)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise ValueError("matrix must be square and nonempty")
        self.rows = rows

    def _entry(self, x):
        return x

    def _like(self, rows):
        return type(self)(rows)

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def entries(self):
        return itertools.chain.from_iterable(self.rows)

    def identity_like(self):
        raise NotImplementedError

    def __add__(self, other):
        return self._like([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return self._like([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return self._like([[-a for a in r] for r in self.rows])

    def __matmul__(self, other):
        cols = list(zip(*other.rows))
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = r[0] * c[0]
                for a, b in zip(r[1:], c[1:]):
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return self._like(out)

    def __mul__(self, other):
        if isinstance(other, _Matrix):
            return self @ other
        return self._like([[a * other for a in r] for r in self.rows])

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** -k
        result, base = self.identity_like(), self
        while k:
            if k & 1:
                result = result @ base
            k >>= 1
            if k:
                base = base @ base
        return result

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"{type(self).__name__}({[list(r) for r in self.rows]})"

    def __str__(self):
        cells = [[str(x) for x in r] for r in self.rows]
        width = max(len(c) for r in cells for c in r)
        return "\n".join(" ".join(c.rjust(width) for c in r) for r in cells)


class RationalMatrix(_Matrix):
    """Exact n x n matrix over Q."""

    __slots__ = ()

    def _entry(self, x):
        return Fraction(x)

    @classmethod
    def identity(cls, n: int) -> RationalMatrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, *d) -> RationalMatrix:
        n = len(d)
        return cls([[d[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def parse(cls, text: str) -> RationalMatrix:
        """First line ``n``, then n rows of n whitespace-separated rationals."""
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise ValueError("empty matrix file")
        n = int(lines[0])
        rows = [ln.split() for ln in lines[1:]]
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError(f"expected {n} rows of {n} entries")
        return cls([[Fraction(x) for x in r] for r in rows])

    def identity_like(self):
        return RationalMatrix.identity(self.n)

    def det(self) -> Fraction:
        """Determinant by Bareiss fraction-free elimination on the cleared matrix."""
        n = self.n
        L = math.lcm(*(x.denominator for x in self.entries()))
        M = [[int(x * L) for x in r] for r in self.rows]
        sign, prev = 1, 1
        for k in range(n - 1):
            if M[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if M[i][k]), None)
                if swap is None:
                    return Fraction(0)
                M[k], M[swap] = M[swap], M[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            prev = M[k][k]
        return Fraction(sign * M[n - 1][n - 1], L ** n)

    def inverse(self) -> RationalMatrix:
        n = self.n
        aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.rows)]
        for k in range(n):
            piv = next((i for i in range(k, n) if aug[i][k]), None)
            if piv is None:
                raise HypothesisError("det A != 0", "matrix is singular")
            aug[k], aug[piv] = aug[piv], aug[k]
            inv = 1 / aug[k][k]
            aug[k] = [x * inv for x in aug[k]]
            for i in range(n):
                if i != k and aug[i][k]:
                    f = aug[i][k]
                    aug[i] = [a - f * b for a, b in zip(aug[i], aug[k])]
        return RationalMatrix([r[n:] for r in aug])

    def is_p_integral(self, p: int) -> bool:
        return all(x.denominator % p for x in self.entries())

    def to_padic(self, p: int, N: int | None = None) -> PadicMatrix:
        return PadicMatrix(p, [[PadicNumber.from_rational(x, p, N) for x in r] for r in self.rows])


class PadicMatrix(_Matrix):
    """n x n matrix of PadicNumbers at one prime."""

    __slots__ = ("p",)

    def __init__(self, p: int, rows):
        self.p = check_prime(p)
        super().__init__(rows)

    def _entry(self, x):
        if not isinstance(x, PadicNumber):
            return PadicNumber.from_rational(x, self.p)
        if x.p != self.p:
            raise PrimeMismatchError(self.p, x.p)
        return x

    def _like(self, rows):
        return PadicMatrix(self.p, rows)

    def identity_like(self):
        N = max((x.rel_precision for x in self.entries()), default=0) or default_precision()
        one = PadicNumber.from_rational(1, self.p, N)
        zero = PadicNumber.exact_zero(self.p)
        return PadicMatrix(self.p, [[one if i == j else zero for j in range(self.n)] for i in range(self.n)])

    def is_integral(self) -> bool:
        return all(x.is_integral() for x in self.entries())

    def _eliminate(self, want_inverse: bool):
        n = self.n
        one = PadicNumber.from_rational(1, self.p, max(x.rel_precision for x in self.entries()) or 1)
        zero = PadicNumber.exact_zero(self.p)
        M = [list(r) + ([one if i == j else zero for j in range(n)] if want_inverse else [])
             for i, r in enumerate(self.rows)]
        det = one
        for k in range(n):
            units = [i for i in range(k, n) if M[i][k].is_unit_kind()]
            if not units:
                if all(M[i][k].is_exact_zero() for i in range(k, n)):
                    if want_inverse:
                        raise HypothesisError("det A != 0", "matrix is singular")
                    return PadicNumber.exact_zero(self.p), None
                raise PrecisionError("raise precision: pivot indistinguishable from zero")
            piv = min(units, key=lambda i: M[i][k].v)
            if piv != k:
                M[k], M[piv] = M[piv], M[k]
                det = -det
            pivot = M[k][k]
            det = det * pivot
            inv = pivot.invert()
            rows = range(n) if want_inverse else range(k + 1, n)
            for i in rows:
                if i == k or M[i][k].is_exact_zero():
                    continue
                f = M[i][k] * inv
                M[i] = [a - f * b for a, b in zip(M[i], M[k])]
            if want_inverse:
                M[k] = [x * inv for x in M[k]]
        inverse = PadicMatrix(self.p, [r[n:] for r in M]) if want_inverse else None
        return det, inverse

    def det(self) -> PadicNumber:
        return self._eliminate(False)[0]

    def inverse(self) -> PadicMatrix:
        return self._eliminate(True)[1]


class ModMatrix:
    """Matrix over Z/pZ with integer entries in [0, p)."""

    __slots__ = ("p", "rows")

    def __init__(self, p: int, rows):
        self.p = p
        self.rows = tuple(tuple(int(x) % p for x in r) for r in rows)

    @property
    def n(self) -> int:
        return len(self.rows)

    def __matmul__(self, other: ModMatrix) -> ModMatrix:
        cols = list(zip(*other.rows))
        return ModMatrix(self.p, [[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows])

    __mul__ = __matmul__

    def __pow__(self, k: int) -> ModMatrix:
        result, base = ModMatrix.identity(self.n, self.p), self
        while k:
            if k & 1:
                result = result @ base
            k >>= 1
            base = base @ base
        return result

    @classmethod
    def identity(cls, n: int, p: int) -> ModMatrix:
        return cls(p, [[int(i == j) for j in range(n)] for i in range(n)])

    def is_identity(self) -> bool:
        return all(x == (i == j) for i, r in enumerate(self.rows) for j, x in enumerate(r))

    def order(self) -> int:
        """Multiplicative order, searched up to ``|GL_n(Z/pZ)|``."""
        cap = gl_order(self.n, self.p)
        acc = self
        for m in range(1, cap + 1):
            if acc.is_identity():
                return m
            acc = acc @ self
        raise HypothesisError("A invertible mod p", "no power reaches I")

    def __eq__(self, other):
        if not isinstance(other, ModMatrix):
            return NotImplemented
        return self.p == other.p and self.rows == other.rows

    def __hash__(self):
        return hash((self.p, self.rows))

    def __repr__(self):
        return f"ModMatrix({self.p}, {[list(r) for r in self.rows]})"

    def __str__(self):
        return "\n".join(" ".join(str(x) for x in r) for r in self.rows)


def gl_order(n: int, p: int) -> int:
    """``|GL_n(Z/pZ)| = prod_{i<n} (p^n - p^i)``."""
    return math.prod(p ** n - p ** i for i in range(n))


def det(A):
    return A.det()


def _require_glnzp(A: RationalMatrix, p: int) -> None:
    if not A.is_p_integral(p):
        raise HypothesisError("A in GL_n(Z_p)", f"an entry has denominator divisible by {p}")
    d = A.det()
    if d == 0 or vp(p, d) != 0:
        raise HypothesisError("A in GL_n(Z_p)", f"det A = {d} is not a {p}-adic unit")


def is_glnzp(A, p: int | None = None) -> bool:
    """Whether A has Z_p entries and ``|det A|_p = 1``."""
    if isinstance(A, RationalMatrix):
        if p is None:
            raise ValueError("a prime is needed for a rational matrix")
        p = check_prime(p)
        if not A.is_p_integral(p):
            return False
        d = A.det()
        return d != 0 and vp(p, d) == 0
    if not A.is_integral():
        raise HypothesisError("entries in Z_p")
    d = A.det()
    if d.is_zero_ball():
        if d.abs_precision >= 1:
            return False
        raise PrecisionError(f"undecidable at precision: det A = {d}")
    ok = d.is_unit_kind() and d.v == 0
    if ok and not A.inverse().is_integral():
        raise ArithmeticError("unit determinant but non-integral inverse")
    return ok


def reduce_mod_p(A, p: int | None = None) -> ModMatrix:
    """Entrywise image in Z/pZ."""
    if isinstance(A, PadicMatrix):
        out = []
        for r in A.rows:
            row = []
            for x in r:
                if x.abs_precision < 1:
                    raise PrecisionError(f"insufficient precision: {x}")
                if not x.is_integral():
                    raise HypothesisError("entries in Z_p", str(x))
                row.append(x.u if x.is_unit_kind() and x.v == 0 else 0)
            out.append(row)
        return ModMatrix(A.p, out)
    p = check_prime(p)
    if not A.is_p_integral(p):
        raise HypothesisError("entries in Z_p", f"an entry has denominator divisible by {p}")
    return ModMatrix(p, [[x.numerator * pow(x.denominator, -1, p) for x in r] for r in A.rows])


@dataclass(frozen=True)
class UnipotentShape:
    """``A = I + p^j B`` with B integral and some entry of B a unit."""

    j: int
    B: object


def _min_valuation(entries: Iterable, p: int):
    """Least valuation among entries; None if all vanish. Works for Fraction or balls."""
    best, coarse = None, None
    for x in entries:
        if isinstance(x, PadicNumber):
            if x.is_unit_kind():
                best = x.v if best is None else min(best, x.v)
            elif x.is_zero_ball():
                coarse = x.abs_precision if coarse is None else min(coarse, x.abs_precision)
        elif x:
            v = vp(p, x)
            best = v if best is None else min(best, v)
    if coarse is not None and (best is None or coarse < best):
        raise PrecisionError(f"undecidable at precision: an entry of A - I is only known mod p^{coarse}")
    return best


def unipotent_shape(A, p: int | None = None) -> UnipotentShape | None:
    """The maximal j with ``A - I`` in ``p^j M_n(Z_p)``, and ``B = (A - I)/p^j``.

    Returns None when A is not congruent to I mod p.
    """
    if isinstance(A, PadicMatrix):
        p = A.p
    elif p is None:
        raise ValueError("a prime is needed for a rational matrix")
    p = check_prime(p)
    D = A - A.identity_like()
    try:
        j = _min_valuation(D.entries(), p)
    except PrecisionError:
        if all(x.is_zero() for x in D.entries()):
            raise HypothesisError("A != I", "A is the identity at working precision")
        raise
    if j is None:
        raise HypothesisError("A != I", "A is the identity")
    if j < 0:
        raise HypothesisError("entries in Z_p")
    if j == 0:
        return None
    if isinstance(D, PadicMatrix):
        B = PadicMatrix(p, [[x.shift(-j) for x in r] for r in D.rows])
    else:
        B = D * Fraction(p) ** -j
    return UnipotentShape(j, B)


def _all_at_least(M, p: int, t: int) -> bool:
    for x in M.entries():
        if isinstance(x, PadicNumber):
            if x.is_unit_kind():
                if x.v < t:
                    return False
            elif x.is_zero_ball() and x.abs_precision < t:
                raise PrecisionError(f"undecidable at precision: entry {x} vs p^{t}")
        elif x and vp(p, x) < t:
            return False
    return True


def power_expansion_check(A, q: int, p: int | None = None) -> bool:
    """Verify the binomial congruences for ``A = I + p^j B``.

    Always checks that ``A^q - I - q p^j B`` lies in ``p^(2j) M_n(Z_p)``; for
    ``q = p`` odd and ``j = 1`` also that ``A^p - I - p^2 B`` lies in
    ``p^3 M_n(Z_p)``; for ``q = p = 2`` and ``j = 1`` that
    ``A^2 = I + 4B + 4B^2``.
    """
    q = check_prime(q)
    if isinstance(A, PadicMatrix):
        p = A.p
    shape = unipotent_shape(A, p)
    if shape is None:
        raise HypothesisError("A = I mod p")
    j, B = shape.j, shape.B
    I = A.identity_like()
    Aq = A ** q
    ok = _all_at_least(Aq - I - B * (q * p ** j), p, 2 * j)
    if q == p and j == 1 and p != 2:
        ok = ok and _all_at_least(Aq - I - B * (p * p), p, 3)
    if q == p == 2 and j == 1:
        rhs = I + B * 4 + (B @ B) * 4
        if isinstance(A, PadicMatrix):
            prec = min(x.abs_precision for x in Aq.entries())
            ok = ok and _all_at_least(Aq - rhs, p, prec)
        else:
            ok = ok and Aq == rhs
    return ok


@dataclass(frozen=True)
class TorsionResult:
    """``order`` is the multiplicative order, or None for infinite order."""

    order: int | None

    @property
    def is_torsion(self) -> bool:
        return self.order is not None

    def __str__(self):
        return f"order {self.order}" if self.order is not None else "infinite order"


def torsion_test(A: RationalMatrix, p: int) -> TorsionResult:
    """Decide whether ``A`` in GL_n(Z_p) has finite order, and find the order.

    With ``m`` the order of A mod p: for p odd, A has finite order iff
    ``A^m = I``; for p = 2, iff ``A^m = I`` or ``A^(2m) = I``.
    """
    p = check_prime(p)
    _require_glnzp(A, p)
    m = reduce_mod_p(A, p).order()
    I = A.identity_like()
    Am = A ** m
    if Am == I:
        return TorsionResult(m)
    if p == 2 and Am @ Am == I:
        return TorsionResult(2 * m)
    return TorsionResult(None)


@dataclass
class SubgroupReport:
    p: int
    closed: bool
    closure_failures: list[str] = field(default_factory=list)
    bad_primes: list[int] = field(default_factory=list)
    in_glnzp: bool = True
    injective: bool | None = None
    images: int | None = None
    kernel: list[RationalMatrix] | None = None
    involutions: bool | None = None
    abelian: bool | None = None
    mod4_rigid: bool | None = None

    @property
    def passed(self) -> bool:
        checks = [self.closed, self.in_glnzp, self.injective, self.involutions,
                  self.abelian, self.mod4_rigid]
        return all(c for c in checks if c is not None)

    def lines(self) -> list[tuple[str, str]]:
        out = [("closed", _yn(self.closed)), ("in_GLn_Zp", _yn(self.in_glnzp)),
               ("bad_primes", " ".join(map(str, self.bad_primes)) or "none")]
        for msg in self.closure_failures:
            out.append(("closure_failure", msg))
        if self.injective is not None:
            out += [("reduction_injective", _yn(self.injective)), ("distinct_images", str(self.images))]
        if self.kernel is not None:
            out += [("kernel_size", str(len(self.kernel))), ("involutions", _yn(self.involutions)),
                    ("abelian", _yn(self.abelian)), ("mod4_rigid", _yn(self.mod4_rigid))]
        out.append(("passed", _yn(self.passed)))
        return out


def _yn(b) -> str:
    return "yes" if b else "no"


def subgroup_checks(G: Sequence[RationalMatrix], p: int) -> SubgroupReport:
    """Check the finite-subgroup facts for G inside GL_n(Z_p).

    For p odd: reduction mod p is injective on G.  For p = 2: the kernel H
    of reduction consists of involutions, is abelian, and its only member
    congruent to I mod 4 is I.
    """
    p = check_prime(p)
    G = list(dict.fromkeys(G))
    if not G:
        raise ValueError("empty group")
    members = set(G)
    failures = []
    for A, B in itertools.product(G, repeat=2):
        if A @ B not in members:
            failures.append(f"product not in G:\n{A @ B}")
    for A in G:
        try:
            if A.inverse() not in members:
                failures.append(f"inverse not in G:\n{A.inverse()}")
        except HypothesisError:
            failures.append(f"singular element:\n{A}")
    dets = [A.det() for A in G]
    bad = bad_primes(list(itertools.chain.from_iterable(A.entries() for A in G)) + [d for d in dets if d])
    report = SubgroupReport(p, not failures, failures, bad)
    report.in_glnzp = all(is_glnzp(A, p) for A in G)
    if not report.in_glnzp:
        return report
    I = G[0].identity_like()
    if p != 2:
        images = {reduce_mod_p(A, p) for A in G}
        report.images = len(images)
        report.injective = len(images) == len(G)
        return report
    H = [A for A in G if reduce_mod_p(A, 2).is_identity()]
    report.kernel = H
    report.involutions = all(A @ A == I for A in H)
    report.abelian = all(A @ B == B @ A for A, B in itertools.combinations(H, 2))
    report.mod4_rigid = all(A == I for A in H if _all_at_least(A - I, 2, 2))
    return report


def involution_projections(A: RationalMatrix) -> tuple[RationalMatrix, RationalMatrix]:
    """``P1 = (I - A)/2`` and ``P2 = (I + A)/2`` for an involution A."""
    I = A.identity_like()
    if A @ A != I:
        raise HypothesisError("A^2 = I", "not an involution")
    half = Fraction(1, 2)
    return (I - A) * half, (I + A) * half


def projection_identities(A: RationalMatrix, P1: RationalMatrix, P2: RationalMatrix,
                          commuting: Iterable[RationalMatrix] = ()) -> dict[str, bool]:
    """Truth of the projection identities, plus block-diagonality of commuting B."""
    I = A.identity_like()
    Z = I - I
    out = {
        "P1 + P2 = I": P1 + P2 == I,
        "P1^2 = P1": P1 @ P1 == P1,
        "P2^2 = P2": P2 @ P2 == P2,
        "P1 P2 = 0": P1 @ P2 == Z,
        "A = P2 - P1": A == P2 - P1,
    }
    for k, B in enumerate(commuting):
        if A @ B != B @ A:
            raise HypothesisError("AB = BA", f"matrix {k} does not commute with A")
        out[f"P1 B{k} P2 = 0"] = P1 @ B @ P2 == Z
        out[f"P2 B{k} P1 = 0"] = P2 @ B @ P1 == Z
    return out
