"""Exact integer sequences used for hypernode index maps and distance profiles.

Three kinds of sequence live here:

* :class:`IntPoly` -- an integer-valued polynomial in ``n`` with exact
  rational coefficients.  Sign, monotonicity and growth questions about a
  polynomial on the naturals are answered exactly via a root bound.
* :class:`Composed` -- ``outer(inner(n))``.
* :class:`ThresholdSteps` -- the piecewise-constant index map produced by the
  "closer galaxy" construction: block boundaries ``n_k`` are read off a
  nondecreasing unbounded sequence and the map sends block ``k`` to
  ``n_{k-2}``.

Every sequence answers ``nondecreasing_from()`` and ``is_unbounded()`` with
*certified* answers (``None`` / ``False`` when it cannot tell).
"""
from __future__ import annotations

import ast
import re
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

__all__ = [
    "IndexSeq",
    "IntPoly",
    "Composed",
    "ThresholdSteps",
    "PolyParseError",
    "parse_poly",
    "fit_poly",
    "fit_tail",
]


class PolyParseError(ValueError):
    pass


class IndexSeq:
    """Interface for certified integer sequences on n >= 0."""

    def __call__(self, n: int) -> int:
        raise NotImplementedError

    def nondecreasing_from(self) -> Optional[int]:
        return None

    def is_unbounded(self) -> bool:
        return False

    def constant_value(self) -> Optional[int]:
        return None

    def reach(self, m: int) -> int:
        """Least ``N`` such that ``self(n) >= m`` for all ``n >= N``.

        Only valid for certified nondecreasing, unbounded sequences.
        """
        start = self.nondecreasing_from()
        if start is None or not self.is_unbounded():
            raise ValueError(f"{self} is not certified monotone and unbounded")
        n = start
        while self(n) < m:
            n += 1
        while n > 0 and self(n - 1) >= m and n - 1 >= start:
            n -= 1
        return n

    def is_poly(self) -> bool:
        return False


class IntPoly(IndexSeq):
    """Integer-valued polynomial ``sum c_i n^i`` with rational ``c_i``."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Sequence = (0,)):
        cs = [Fraction(x) for x in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [Fraction(0)]
        self.c: Tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def const(cls, v: int) -> "IntPoly":
        return cls((v,))

    @classmethod
    def identity(cls) -> "IntPoly":
        return cls((0, 1))

    # -- evaluation ---------------------------------------------------------
    def value(self, n) -> Fraction:
        acc = Fraction(0)
        for a in reversed(self.c):
            acc = acc * n + a
        return acc

    def __call__(self, n: int) -> int:
        v = self.value(n)
        if v.denominator != 1:
            raise ValueError(f"{self} is not integer-valued at n={n}")
        return int(v)

    # -- algebra ------------------------------------------------------------
    def __add__(self, other):
        other = _as_poly(other)
        k = max(len(self.c), len(other.c))
        a = self.c + (Fraction(0),) * (k - len(self.c))
        b = other.c + (Fraction(0),) * (k - len(other.c))
        return IntPoly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return IntPoly([-x for x in self.c])

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        out = [Fraction(0)] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    out[i + j] += a * b
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be natural numbers")
        out = IntPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def compose(self, inner: "IntPoly") -> "IntPoly":
        out = IntPoly.const(0)
        for a in reversed(self.c):
            out = out * inner + IntPoly((a,))
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPoly.const(other)
        return isinstance(other, IntPoly) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    # -- exact analysis ----------------------------------------------------
    @property
    def degree(self) -> int:
        return -1 if self.is_zero() else len(self.c) - 1

    def is_zero(self) -> bool:
        return len(self.c) == 1 and self.c[0] == 0

    def is_poly(self) -> bool:
        return True

    def constant_value(self) -> Optional[int]:
        return self(0) if len(self.c) == 1 else None

    @property
    def leading(self) -> Fraction:
        return self.c[-1]

    def root_bound(self) -> int:
        """Integer ``B`` beyond which the polynomial has no real root."""
        if len(self.c) == 1:
            return 0
        lead = abs(self.c[-1])
        return int(1 + max(abs(x) / lead for x in self.c[:-1])) + 1

    def sign_from(self) -> Tuple[int, int]:
        """(sign, N): the eventual sign and the least N from which it holds."""
        if self.is_zero():
            return 0, 0
        s = 1 if self.leading > 0 else -1
        n = self.root_bound()
        while n > 0:
            v = self.value(n - 1)
            if (v > 0 and s > 0) or (v < 0 and s < 0):
                n -= 1
            else:
                break
        return s, n

    def nonneg_from(self) -> Optional[int]:
        """Least N with p(n) >= 0 for all n >= N, or None if never."""
        if self.is_zero():
            return 0
        if self.leading < 0:
            return None
        n = self.root_bound()
        while n > 0 and self.value(n - 1) >= 0:
            n -= 1
        return n

    def derivative_diff(self) -> "IntPoly":
        # forward difference p(n+1) - p(n)
        return self.compose(IntPoly((1, 1))) - self

    def nondecreasing_from(self) -> Optional[int]:
        return self.derivative_diff().nonneg_from()

    def is_unbounded(self) -> bool:
        return self.degree >= 1 and self.leading > 0

    def reach(self, m: int) -> int:
        n = (self - m).nonneg_from()
        if n is None:
            raise ValueError(f"{self} never stays above {m}")
        return n

    # -- text ---------------------------------------------------------------
    def __repr__(self):
        return f"IntPoly({render_poly(self)!r})"

    def __str__(self):
        return render_poly(self)


def _as_poly(x) -> IntPoly:
    if isinstance(x, IntPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return IntPoly((x,))
    raise TypeError(f"not a polynomial: {x!r}")


def render_poly(p: IntPoly, var: str = "n") -> str:
    if p.is_zero():
        return "0"
    if any(x.denominator != 1 for x in p.c):
        # keep exact rational form; still parseable
        parts = [f"({x})*{var}^{i}" if i else f"({x})" for i, x in enumerate(p.c) if x]
        return " + ".join(reversed(parts))
    out = ""
    for i in range(len(p.c) - 1, -1, -1):
        a = int(p.c[i])
        if a == 0:
            continue
        sign = "-" if a < 0 else "+"
        mag = abs(a)
        if i == 0:
            body = str(mag)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if mag == 1 else f"{mag}{mono}"
        if not out:
            out = ("-" if sign == "-" else "") + body
        else:
            out += sign + body
    return out


_IMPLICIT = re.compile(r"(\d)\s*([A-Za-z_(])")


def parse_poly(text: str, names: Sequence[str] = ("n",)) -> Dict[Tuple[int, ...], Fraction]:
    """Parse an integer polynomial over ``names`` into a monomial map.

    Accepts ``2n+1``, ``n^2``, ``3*i - k``; implicit multiplication after a
    digit is allowed.  Returns ``{exponent tuple: coefficient}``.
    """
    src = _IMPLICIT.sub(r"\1*\2", text.strip()).replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise PolyParseError(f"cannot parse {text!r}: {exc.msg} (column {exc.offset})") from None
    index = {name: i for i, name in enumerate(names)}
    k = len(names)

    def mono_add(a, b):
        out = dict(a)
        for m, c in b.items():
            out[m] = out.get(m, 0) + c
        return {m: c for m, c in out.items() if c}

    def mono_mul(a, b):
        out: Dict = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return {m: c for m, c in out.items() if c}

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return {(0,) * k: Fraction(node.value)} if node.value else {}
        if isinstance(node, ast.Name):
            if node.id not in index:
                raise PolyParseError(f"unknown variable {node.id!r} in {text!r}")
            m = [0] * k
            m[index[node.id]] = 1
            return {tuple(m): Fraction(1)}
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = walk(node.operand)
            return {m: -c for m, c in inner.items()} if isinstance(node.op, ast.USub) else inner
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Add):
                return mono_add(walk(node.left), walk(node.right))
            if isinstance(node.op, ast.Sub):
                return mono_add(walk(node.left), {m: -c for m, c in walk(node.right).items()})
            if isinstance(node.op, ast.Mult):
                return mono_mul(walk(node.left), walk(node.right))
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)
                        and 0 <= node.right.value <= 16):
                    raise PolyParseError(f"exponent must be a small natural in {text!r}")
                base = walk(node.left)
                out = {(0,) * k: Fraction(1)}
                for _ in range(node.right.value):
                    out = mono_mul(out, base)
                return out
        raise PolyParseError(f"unsupported expression in {text!r} (column {getattr(node, 'col_offset', 0) + 1})")

    return walk(tree)


def parse_intpoly(text: str, var: str = "n") -> IntPoly:
    monos = parse_poly(text, (var,))
    deg = max((m[0] for m in monos), default=0)
    cs = [Fraction(0)] * (deg + 1)
    for m, c in monos.items():
        cs[m[0]] += c
    return IntPoly(cs)


def fit_poly(xs: Sequence[int], ys: Sequence[int], checks: int = 2) -> Optional[IntPoly]:
    """Exact interpolation of samples at consecutive integers.

    Finds the least degree ``d`` whose Newton forward form reproduces *all*
    samples, insisting on at least ``checks`` samples beyond the ``d + 1``
    that determine the polynomial.  Returns ``None`` when no such degree
    exists for the available data.
    """
    if len(xs) != len(ys) or not xs:
        return None
    x0 = xs[0]
    if list(xs) != list(range(x0, x0 + len(xs))):
        raise ValueError("fit_poly needs consecutive sample points")
    diffs: List[List[int]] = [list(ys)]
    while len(diffs[-1]) > 1 and any(diffs[-1]):
        row = diffs[-1]
        diffs.append([b - a for a, b in zip(row, row[1:])])
    if any(diffs[-1]):
        return None
    d = len(diffs) - 2 if len(diffs) > 1 else 0
    if not any(ys):
        d = -1
    if len(xs) < max(d, 0) + 1 + checks:
        return None
    # Newton forward form in (n - x0)
    shift = IntPoly((-x0, 1))
    out = IntPoly.const(0)
    for k in range(0, d + 1):
        term = IntPoly.const(1)
        for j in range(k):
            term = term * (shift - j)
        out = out + term * Fraction(diffs[k][0], _fact(k))
    for x, y in zip(xs, ys):
        assert out(x) == y
    return out


def fit_tail(xs: Sequence[int], ys: Sequence[int], checks: int = 2) -> Tuple[Optional[IntPoly], int]:
    """Fit on the longest tail that admits an exact polynomial.

    Returns ``(poly, start_index)``; ``poly`` is None if even the shortest
    admissible tail fails.
    """
    for s in range(len(xs)):
        p = fit_poly(xs[s:], ys[s:], checks)
        if p is not None:
            return p, xs[s]
        if len(xs) - s <= checks + 1:
            break
    return None, xs[-1] + 1 if xs else 0


def _fact(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


class Composed(IndexSeq):
    """``outer(inner(n))``."""

    def __init__(self, outer: IndexSeq, inner: IndexSeq):
        self.outer = outer
        self.inner = inner

    def __call__(self, n: int) -> int:
        return self.outer(self.inner(n))

    def constant_value(self) -> Optional[int]:
        c = self.outer.constant_value()
        if c is not None:
            return c
        ci = self.inner.constant_value()
        return None if ci is None else self.outer(ci)

    def nondecreasing_from(self) -> Optional[int]:
        if self.constant_value() is not None:
            return 0
        no = self.outer.nondecreasing_from()
        ni = self.inner.nondecreasing_from()
        if no is None or ni is None or not self.inner.is_unbounded():
            return None
        if no == 0:
            return ni
        # inner must also have climbed past the outer's non-monotone start
        return max(ni, self.inner.reach(no))

    def is_unbounded(self) -> bool:
        return (self.outer.is_unbounded() and self.inner.is_unbounded()
                and self.outer.nondecreasing_from() is not None)

    def __repr__(self):
        return f"Composed({self.outer!r}, {self.inner!r})"


class ThresholdSteps(IndexSeq):
    """Index map of the closer-galaxy construction.

    ``base`` must be nondecreasing from 0 and unbounded.  Block boundaries
    are ``n_0 = 0`` and ``n_k`` = least ``n > n_{k-1}`` with
    ``base(n) - base(n_{k-1}) > k``.  On block ``k`` (``n_{k-1} <= n < n_k``,
    ``k >= 1``) the map returns ``n_{k-2}``, with ``n_{-1} = n_0 = 0``.

    Guarantees (by construction): the map is nondecreasing, never exceeds
    ``n``, tends to infinity, and on block ``k >= 2``
    ``base(n) - base(map(n)) >= k``.
    """

    def __init__(self, base: IndexSeq, label: str = "steps"):
        if base.nondecreasing_from() != 0 or not base.is_unbounded():
            raise ValueError("threshold construction needs a base nondecreasing from 0 and unbounded")
        self.base = base
        self.label = label
        self._n = [0]

    def threshold(self, k: int) -> int:
        """``n_k`` (with ``n_{-1} = 0``)."""
        if k < 0:
            return 0
        while len(self._n) <= k:
            j = len(self._n)
            prev = self._n[-1]
            target = self.base(prev) + j
            n = prev + 1
            while self.base(n) <= target:
                n += 1
            self._n.append(n)
        return self._n[k]

    def block(self, n: int) -> int:
        """The block number ``k >= 1`` containing ``n``."""
        k = 1
        while self.threshold(k) <= n:
            k += 1
        return k

    def __call__(self, n: int) -> int:
        return self.threshold(self.block(n) - 2)

    def nondecreasing_from(self) -> Optional[int]:
        return 0

    def is_unbounded(self) -> bool:
        return True

    def gap_reach(self, m: int) -> int:
        """N with ``base(n) - base(self(n)) >= m`` for all n >= N."""
        return self.threshold(max(m, 2) - 1)

    def __repr__(self):
        return f"ThresholdSteps({self.label})"
