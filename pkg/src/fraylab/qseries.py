"""Quantum integers and truncated Laurent series in a, q, t.

Series are exact: coefficients are Fractions, windows are explicit, and
equality is coefficientwise on the window intersection.  Rational
expressions (products of monomial numerator factors over factors 1 - M)
are expanded geometrically in a declared direction; every denominator
factor used here has positive weight in q or in t, so truncation to a
window needs finitely many terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .symfun import Composition

# ---------------------------------------------------------------------------
# one-variable Laurent polynomials in q


class Laurent:
    """Laurent polynomial in q with Fraction coefficients."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Mapping[int, Fraction] | None = None):
        self.c: dict[int, Fraction] = {}
        if coeffs:
            for k, v in coeffs.items():
                v = Fraction(v)
                if v:
                    self.c[k] = v

    @staticmethod
    def zero() -> "Laurent":
        return Laurent()

    @staticmethod
    def one() -> "Laurent":
        return Laurent({0: Fraction(1)})

    @staticmethod
    def q(power: int = 1, coeff=1) -> "Laurent":
        return Laurent({power: Fraction(coeff)})

    def __add__(self, other: "Laurent") -> "Laurent":
        out = dict(self.c)
        for k, v in other.c.items():
            s = out.get(k, Fraction(0)) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return Laurent(out)

    def __neg__(self) -> "Laurent":
        return Laurent({k: -v for k, v in self.c.items()})

    def __sub__(self, other: "Laurent") -> "Laurent":
        return self + (-other)

    def __mul__(self, other) -> "Laurent":
        if not isinstance(other, Laurent):
            return Laurent({k: v * Fraction(other) for k, v in self.c.items()})
        out: dict[int, Fraction] = {}
        for k1, v1 in self.c.items():
            for k2, v2 in other.c.items():
                k = k1 + k2
                s = out.get(k, Fraction(0)) + v1 * v2
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return Laurent(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Laurent):
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def is_zero(self) -> bool:
        return not self.c

    def bar(self) -> "Laurent":
        """The bar involution q -> q^{-1}."""
        return Laurent({-k: v for k, v in self.c.items()})

    def top(self) -> int:
        return max(self.c) if self.c else 0

    def divide_exact(self, other: "Laurent") -> "Laurent":
        """Exact division; raises if a remainder survives."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero Laurent polynomial")
        rem = Laurent(self.c)
        out: dict[int, Fraction] = {}
        dtop = other.top()
        dlead = other.c[dtop]
        while not rem.is_zero():
            rtop = rem.top()
            k = rtop - dtop
            coeff = rem.c[rtop] / dlead
            out[k] = out.get(k, Fraction(0)) + coeff
            rem = rem - Laurent({k: coeff}) * other
            if not rem.is_zero() and rem.top() >= rtop:
                raise ArithmeticError("non-terminating Laurent division")
        return Laurent({k: v for k, v in out.items() if v})

    def __repr__(self) -> str:  # pragma: no cover
        if not self.c:
            return "0"
        return " + ".join(f"{v}*q^{k}" for k, v in sorted(self.c.items()))


def quantum_int(j: int) -> Laurent:
    """[j] = q^{j-1} + q^{j-3} + ... + q^{1-j}; [-j] = -[j]; [0] = 0."""
    if j == 0:
        return Laurent.zero()
    if j < 0:
        return -quantum_int(-j)
    return Laurent({j - 1 - 2 * i: Fraction(1) for i in range(j)})


def quantum_factorial(j: int) -> Laurent:
    if j < 0:
        raise ValueError("quantum factorial of a negative integer")
    out = Laurent.one()
    for i in range(1, j + 1):
        out = out * quantum_int(i)
    return out


def quantum_binomial(j: int, k: int) -> Laurent:
    """[j choose k] = [j]!/([k]![j-k]!), expanded exactly."""
    if not (0 <= k <= j):
        raise ValueError(f"binomial index out of range: ({j}, {k})")
    num = quantum_factorial(j)
    den = quantum_factorial(k) * quantum_factorial(j - k)
    return num.divide_exact(den)


def f_factor(n: int, lam: Composition) -> Laurent:
    """f_{n,lambda}(q) = [n]! / prod_j [lambda_j]!."""
    if lam.total != n:
        raise ValueError(f"{lam.parts} does not sum to {n}")
    den = Laurent.one()
    for p in lam:
        den = den * quantum_factorial(p)
    return quantum_factorial(n).divide_exact(den)


# ---------------------------------------------------------------------------
# truncated tri-graded series


@dataclass(frozen=True)
class Window:
    """Inclusive bounds for (a, q, t) exponents."""

    a: tuple[int, int]
    q: tuple[int, int]
    t: tuple[int, int]

    def contains(self, d: tuple[int, int, int]) -> bool:
        return (
            self.a[0] <= d[0] <= self.a[1]
            and self.q[0] <= d[1] <= self.q[1]
            and self.t[0] <= d[2] <= self.t[1]
        )

    def intersect(self, other: "Window") -> "Window":
        return Window(
            (max(self.a[0], other.a[0]), min(self.a[1], other.a[1])),
            (max(self.q[0], other.q[0]), min(self.q[1], other.q[1])),
            (max(self.t[0], other.t[0]), min(self.t[1], other.t[1])),
        )

    def inflate(self, da: int, dq: int, dt: int) -> "Window":
        return Window(
            (self.a[0] - da, self.a[1] + da),
            (self.q[0] - dq, self.q[1] + dq),
            (self.t[0] - dt, self.t[1] + dt),
        )

    def shifted(self, d: tuple[int, int, int]) -> "Window":
        return Window(
            (self.a[0] + d[0], self.a[1] + d[0]),
            (self.q[0] + d[1], self.q[1] + d[1]),
            (self.t[0] + d[2], self.t[1] + d[2]),
        )

    def to_json(self):
        return {"a": list(self.a), "q": list(self.q), "t": list(self.t)}


class TriSeries:
    """Exact truncated Laurent series in a, q, t on an explicit window."""

    __slots__ = ("window", "coeffs")

    def __init__(self, window: Window, coeffs: Mapping[tuple, Fraction] | None = None):
        self.window = window
        self.coeffs: dict[tuple[int, int, int], Fraction] = {}
        if coeffs:
            for d, c in coeffs.items():
                c = Fraction(c)
                if c and window.contains(d):
                    self.coeffs[d] = c

    @staticmethod
    def zero(window: Window) -> "TriSeries":
        return TriSeries(window)

    @staticmethod
    def one(window: Window) -> "TriSeries":
        return TriSeries(window, {(0, 0, 0): Fraction(1)})

    @staticmethod
    def monomial(window: Window, d: tuple[int, int, int], c=1) -> "TriSeries":
        return TriSeries(window, {d: Fraction(c)})

    @staticmethod
    def from_laurent(window: Window, l: Laurent) -> "TriSeries":
        return TriSeries(window, {(0, k, 0): v for k, v in l.c.items()})

    def __add__(self, other: "TriSeries") -> "TriSeries":
        w = self.window
        out = dict(self.coeffs)
        for d, c in other.coeffs.items():
            if not w.contains(d):
                continue
            s = out.get(d, Fraction(0)) + c
            if s:
                out[d] = s
            else:
                out.pop(d, None)
        return TriSeries(w, out)

    def __neg__(self) -> "TriSeries":
        return TriSeries(self.window, {d: -c for d, c in self.coeffs.items()})

    def __sub__(self, other: "TriSeries") -> "TriSeries":
        return self + (-other)

    def __mul__(self, other) -> "TriSeries":
        if isinstance(other, Laurent):
            other = TriSeries.from_laurent(self.window, other)
        if not isinstance(other, TriSeries):
            return TriSeries(
                self.window, {d: c * Fraction(other) for d, c in self.coeffs.items()}
            )
        w = self.window
        out: dict[tuple[int, int, int], Fraction] = {}
        for d1, c1 in self.coeffs.items():
            for d2, c2 in other.coeffs.items():
                d = (d1[0] + d2[0], d1[1] + d2[1], d1[2] + d2[2])
                if not w.contains(d):
                    continue
                s = out.get(d, Fraction(0)) + c1 * c2
                if s:
                    out[d] = s
                else:
                    out.pop(d, None)
        return TriSeries(w, out)

    __rmul__ = __mul__

    def shift(self, d: tuple[int, int, int], c=1) -> "TriSeries":
        """Multiply by c * a^d0 q^d1 t^d2 (window kept fixed)."""
        out = {}
        for dd, cc in self.coeffs.items():
            nd = (dd[0] + d[0], dd[1] + d[1], dd[2] + d[2])
            if self.window.contains(nd):
                out[nd] = cc * Fraction(c)
        return TriSeries(self.window, out)

    def restrict(self, window: Window) -> "TriSeries":
        return TriSeries(window, self.coeffs)

    def equal_on(self, other: "TriSeries", window: Window | None = None) -> bool:
        w = self.window.intersect(other.window)
        if window is not None:
            w = w.intersect(window)
        degs = set(self.coeffs) | set(other.coeffs)
        for d in degs:
            if not w.contains(d):
                continue
            if self.coeffs.get(d, Fraction(0)) != other.coeffs.get(d, Fraction(0)):
                return False
        return True

    def mismatches(self, other: "TriSeries", window: Window | None = None):
        w = self.window.intersect(other.window)
        if window is not None:
            w = w.intersect(window)
        out = []
        for d in sorted(set(self.coeffs) | set(other.coeffs)):
            if not w.contains(d):
                continue
            got = self.coeffs.get(d, Fraction(0))
            exp = other.coeffs.get(d, Fraction(0))
            if got != exp:
                out.append({"degree": list(d), "got": str(got), "expected": str(exp)})
        return out

    def is_zero_on(self, window: Window | None = None) -> bool:
        w = self.window if window is None else self.window.intersect(window)
        return all(not w.contains(d) or c == 0 for d, c in self.coeffs.items())

    def monomial_quotient(self, other: "TriSeries", scan: int = 8):
        """If self == q^m * other on the window overlap for a single overall
        q-monomial, return m, else None.  Candidate shifts are scanned since
        window clipping can hide the extremal coefficient."""
        if not self.coeffs or not other.coeffs:
            return None
        for m in sorted(range(-scan, scan + 1), key=abs):
            if m == 0:
                continue
            shifted = TriSeries(self.window, {
                (d[0], d[1] + m, d[2]): c for d, c in other.coeffs.items()
            })
            # compare away from the q-boundary the shift exposes
            w = self.window.intersect(other.window.shifted((0, m, 0)))
            if not self.equal_on(shifted, w):
                continue
            if any(w.contains(d) for d in self.coeffs):
                return m
        return None

    def to_json(self):
        return {
            "window": self.window.to_json(),
            "terms": [
                {"a": d[0], "q": d[1], "t": d[2], "coeff": str(c)}
                for d, c in sorted(self.coeffs.items())
            ],
        }

    def __repr__(self) -> str:  # pragma: no cover
        terms = sorted(self.coeffs.items())
        return " + ".join(f"{c}*a^{d[0]}q^{d[1]}t^{d[2]}" for d, c in terms) or "0"


# ---------------------------------------------------------------------------
# rational expressions and their expansion


@dataclass
class RationalSeriesExpr:
    """prod(numerator factors) / prod(1 - monomial) with exact expansion.

    numerator: list of {degree-triple: coeff} finite Laurent polynomials.
    denominator: list of degree triples M, each standing for (1 - a^i q^j t^k),
    expanded as a geometric series in its own monomial.  Every monomial must
    have positive q-weight or positive t-weight so expansion terminates on a
    window.
    """

    numerator: list[dict[tuple[int, int, int], Fraction]]
    denominator: list[tuple[int, int, int]]

    def __mul__(self, other: "RationalSeriesExpr") -> "RationalSeriesExpr":
        return RationalSeriesExpr(
            self.numerator + other.numerator, self.denominator + other.denominator
        )

    def times_laurent(self, l: Laurent) -> "RationalSeriesExpr":
        return RationalSeriesExpr(
            self.numerator + [{(0, k, 0): v for k, v in l.c.items()}],
            list(self.denominator),
        )

    def expand(self, window: Window) -> TriSeries:
        # slack: how far outside the window intermediate products may reach
        neg_q = pos_q = neg_t = 0
        for f in self.numerator:
            if f:
                neg_q += max(0, -min(d[1] for d in f))
                pos_q += max(0, max(d[1] for d in f))
                neg_t += max(0, -min(d[2] for d in f))
        for m in self.denominator:
            if m[2] > 0:
                steps = max(0, (window.t[1] + neg_t) // m[2])
                if m[1] < 0:
                    neg_q += steps * (-m[1])
                else:
                    pos_q += steps * m[1]
            elif m[1] > 0:
                pass
            else:
                raise ValueError(f"denominator factor 1 - a^{m[0]}q^{m[1]}t^{m[2]} "
                                 "has no valid expansion direction")
        big = window.inflate(0, neg_q + pos_q, neg_t)
        out = TriSeries.one(big)
        for m in self.denominator:
            out = out * _geometric(big, m)
        for f in self.numerator:
            out = out * TriSeries(big, f)
        return out.restrict(window)


def _geometric(window: Window, m: tuple[int, int, int]) -> TriSeries:
    """1/(1 - a^i q^j t^k) expanded in nonnegative powers of the monomial."""
    if m[2] > 0:
        steps = max(0, window.t[1] // m[2])
    elif m[1] > 0:
        steps = max(0, (window.q[1] - window.q[0]) // m[1])
    else:
        raise ValueError("non-invertible denominator factor")
    coeffs = {}
    for n in range(steps + 2):
        d = (n * m[0], n * m[1], n * m[2])
        if window.contains(d) or n == 0:
            coeffs[d] = Fraction(1)
    return TriSeries(window, coeffs)


def expand_rational(expr: RationalSeriesExpr, window: Window) -> TriSeries:
    return expr.expand(window)


# ---------------------------------------------------------------------------
# the colored-unknot tables


def _num(*terms) -> dict:
    out = {}
    for d, c in terms:
        out[d] = Fraction(c)
    return out


def unknot_table(variant: str, k: int) -> RationalSeriesExpr:
    """Closed form of the table row for the column-colored unknot.

    intrinsic        prod_j (1 + a q^{-2j}) / (1 - q^{2j})
    finite           [k]! prod_j (1 + t q^{-2j})(1 + a q^{-2j}) / (1 - q^{2j})
    infinite         ((1 - t^2 q^{-2})/(1 - q^2))^k prod_j (1 + a q^{-2j})/(1 - t^2 q^{-2j})
    def_intrinsic    prod_j (1 + a q^{-2j}) / ((1 - t^2 q^{-2j})(1 - q^{2j}))
    def_finite       [k]! prod_j (1 + a q^{-2j}) / (1 - q^{2j})
    def_infinite     [k]! prod_j (1 + a q^{-2j}) / ((1 - t^2 q^{-2j})(1 - q^{2j}))
    """
    if k < 1:
        raise ValueError("color must be a positive integer")
    num: list[dict] = []
    den: list[tuple[int, int, int]] = []

    def a_factor(j):
        num.append(_num(((0, 0, 0), 1), ((1, -2 * j, 0), 1)))

    def t_factor(j):
        num.append(_num(((0, 0, 0), 1), ((0, -2 * j, 1), 1)))

    if variant == "intrinsic":
        for j in range(1, k + 1):
            a_factor(j)
            den.append((0, 2 * j, 0))
    elif variant == "finite":
        for j in range(1, k + 1):
            a_factor(j)
            t_factor(j)
            den.append((0, 2 * j, 0))
        return RationalSeriesExpr(num, den).times_laurent(quantum_factorial(k))
    elif variant == "infinite":
        for _ in range(k):
            num.append(_num(((0, 0, 0), 1), ((0, -2, 2), -1)))
            den.append((0, 2, 0))
        for j in range(1, k + 1):
            a_factor(j)
            den.append((0, -2 * j, 2))
    elif variant == "def_intrinsic":
        for j in range(1, k + 1):
            a_factor(j)
            den.append((0, -2 * j, 2))
            den.append((0, 2 * j, 0))
    elif variant == "def_finite":
        for j in range(1, k + 1):
            a_factor(j)
            den.append((0, 2 * j, 0))
        return RationalSeriesExpr(num, den).times_laurent(quantum_factorial(k))
    elif variant == "def_infinite":
        for j in range(1, k + 1):
            a_factor(j)
            den.append((0, -2 * j, 2))
            den.append((0, 2 * j, 0))
        return RationalSeriesExpr(num, den).times_laurent(quantum_factorial(k))
    else:
        raise ValueError(f"unknown table variant {variant!r}")
    return RationalSeriesExpr(num, den)


def theorem1_check(k_list: Iterable[int], window: Window) -> dict:
    """Check the multiplicative-factor relations between table rows:
    finite = intrinsic * [k]! prod_j (1 + t q^{-2j}),
    def_finite = intrinsic * [k]!,
    def_infinite = def_intrinsic * [k]!."""
    checks = []
    for k in k_list:
        # multiply at the expression level, then expand once: products of
        # already-truncated series are wrong near the window boundary
        factor = RationalSeriesExpr([], [])
        for j in range(1, k + 1):
            factor.numerator.append(_num(((0, 0, 0), 1), ((0, -2 * j, 1), 1)))
        fin_expected = (
            (unknot_table("intrinsic", k) * factor)
            .times_laurent(quantum_factorial(k))
            .expand(window)
        )
        fin = unknot_table("finite", k).expand(window)
        checks.append({
            "name": f"finite=k!*prod(1+tq^-2j)*intrinsic, k={k}",
            "status": "pass" if fin.equal_on(fin_expected, window) else "fail",
        })

        dfin = unknot_table("def_finite", k).expand(window)
        dfin_expected = (
            unknot_table("intrinsic", k).times_laurent(quantum_factorial(k)).expand(window)
        )
        checks.append({
            "name": f"def_finite=[k]!*intrinsic, k={k}",
            "status": "pass" if dfin.equal_on(dfin_expected, window) else "fail",
        })

        dinf = unknot_table("def_infinite", k).expand(window)
        dinf_expected = (
            unknot_table("def_intrinsic", k)
            .times_laurent(quantum_factorial(k))
            .expand(window)
        )
        checks.append({
            "name": f"def_infinite=[k]!*def_intrinsic, k={k}",
            "status": "pass" if dinf.equal_on(dinf_expected, window) else "fail",
        })
    ok = all(c["status"] == "pass" for c in checks)
    return {"ok": ok, "checks": checks}
