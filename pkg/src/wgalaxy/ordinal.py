"""Ordinals below w^(w+1) in Cantor normal form.

An ordinal is stored as a tuple of ``(exponent, coefficient)`` pairs with
strictly decreasing exponents and positive coefficients.  Exponents are
naturals or the sentinel :data:`OMEGA`.  Because the sentinel is an ``int``
larger than every admissible finite exponent, plain tuple comparison of the
term lists is exactly ordinal comparison, which keeps the hot paths (shortest
walk search, profile evaluation) cheap.

Addition is always the natural (Hessenberg) sum; subtraction is its partial
inverse, coefficient by coefficient.
"""
from __future__ import annotations

import re
from typing import Iterable, Iterator, Optional, Tuple, Union

__all__ = [
    "OMEGA",
    "MAX_FINITE_EXP",
    "Ordinal",
    "ZERO",
    "ONE",
    "W",
    "OrdinalParseError",
    "cmp",
    "nat_sum",
    "nat_diff",
    "omega_pow_scaled",
    "coeff_at",
    "parse",
    "render",
]

MAX_FINITE_EXP = 2 ** 62


class _OmegaExp(int):
    """The exponent w.  Behaves as a very large int for ordering."""

    def __new__(cls):
        return super().__new__(cls, 2 ** 63)

    def __repr__(self):
        return "OMEGA"

    __str__ = __repr__

    def __reduce__(self):
        return (_omega_exp, ())


def _omega_exp():
    return OMEGA


OMEGA = _OmegaExp()

ExpRank = int
Terms = Tuple[Tuple[int, int], ...]


class OrdinalParseError(ValueError):
    pass


def _check_exp(e: int) -> int:
    if e is OMEGA or e == OMEGA:
        return OMEGA
    if not isinstance(e, int) or isinstance(e, bool) or e < 0 or e >= MAX_FINITE_EXP:
        raise ValueError(f"bad exponent {e!r}")
    return e


class Ordinal:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Iterable[Tuple[int, int]] = ()):
        merged: dict = {}
        for e, c in terms:
            e = _check_exp(e)
            if not isinstance(c, int) or c < 0:
                raise ValueError(f"bad coefficient {c!r}")
            if c:
                merged[e] = merged.get(e, 0) + c
        self.terms: Terms = tuple(sorted(merged.items(), reverse=True))
        self._hash = None

    @classmethod
    def _raw(cls, terms: Terms) -> "Ordinal":
        # trusted constructor: terms already normalised
        obj = cls.__new__(cls)
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def of(cls, value: Union["Ordinal", int]) -> "Ordinal":
        if isinstance(value, Ordinal):
            return value
        if isinstance(value, int) and value >= 0:
            return cls._raw(((0, value),) if value else ())
        raise TypeError(f"cannot make an ordinal from {value!r}")

    # -- comparison --------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            other = Ordinal.of(other) if other >= 0 else None
            if other is None:
                return False
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            # finite ordinals compare equal to ints, so hash like them
            t = self.terms
            if not t:
                self._hash = hash(0)
            elif len(t) == 1 and t[0][0] == 0:
                self._hash = hash(t[0][1])
            else:
                self._hash = hash(t)
        return self._hash

    def _coerce(self, other):
        if isinstance(other, Ordinal):
            return other.terms
        if isinstance(other, int) and other >= 0:
            return Ordinal.of(other).terms
        return None

    def __lt__(self, other):
        t = self._coerce(other)
        return NotImplemented if t is None else self.terms < t

    def __le__(self, other):
        t = self._coerce(other)
        return NotImplemented if t is None else self.terms <= t

    def __gt__(self, other):
        t = self._coerce(other)
        return NotImplemented if t is None else self.terms > t

    def __ge__(self, other):
        t = self._coerce(other)
        return NotImplemented if t is None else self.terms >= t

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        t = self._coerce(other)
        if t is None:
            return NotImplemented
        return Ordinal._raw(_sum_terms(self.terms, t))

    __radd__ = __add__

    def __sub__(self, other):
        t = self._coerce(other)
        if t is None:
            return NotImplemented
        d = _diff_terms(self.terms, t)
        if d is None:
            raise ArithmeticError(f"natural difference {self} - {Ordinal._raw(t)} is undefined")
        return Ordinal._raw(d)

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return iter(self.terms)

    def coeff(self, e: int) -> int:
        for ee, c in self.terms:
            if ee == e:
                return c
            if ee < e:
                break
        return 0

    @property
    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == 0)

    @property
    def leading_exp(self) -> Optional[int]:
        return self.terms[0][0] if self.terms else None

    def __int__(self):
        if not self.is_finite:
            raise ValueError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    def __repr__(self):
        return f"Ordinal({render(self)!r})"

    def __str__(self):
        return render(self)


def _sum_terms(a: Terms, b: Terms) -> Terms:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        ea, ca = a[i]
        eb, cb = b[j]
        if ea > eb:
            out.append(a[i])
            i += 1
        elif eb > ea:
            out.append(b[j])
            j += 1
        else:
            out.append((ea, ca + cb))
            i += 1
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def _diff_terms(a: Terms, b: Terms) -> Optional[Terms]:
    if not b:
        return a
    have = dict(a)
    for e, c in b:
        left = have.get(e, 0) - c
        if left < 0:
            return None
        have[e] = left
    return tuple((e, have[e]) for e, _ in a if have[e])


ZERO = Ordinal._raw(())
ONE = Ordinal._raw(((0, 1),))
W = Ordinal._raw(((1, 1),))


def cmp(a: Ordinal, b: Ordinal) -> int:
    """-1, 0 or 1 as ``a`` is below, equal to or above ``b``."""
    ta, tb = Ordinal.of(a).terms, Ordinal.of(b).terms
    return (ta > tb) - (ta < tb)


def nat_sum(a: Ordinal, b: Ordinal) -> Ordinal:
    return Ordinal._raw(_sum_terms(Ordinal.of(a).terms, Ordinal.of(b).terms))


def nat_diff(a: Ordinal, b: Ordinal) -> Optional[Ordinal]:
    """Coefficient-wise difference ``a - b``; ``None`` where some coefficient
    of ``b`` exceeds the matching one of ``a``."""
    d = _diff_terms(Ordinal.of(a).terms, Ordinal.of(b).terms)
    return None if d is None else Ordinal._raw(d)


def omega_pow_scaled(rho: int, mu: int) -> Ordinal:
    """The single-term ordinal w^rho * mu."""
    if mu < 0:
        raise ValueError("mu must be a natural number")
    rho = _check_exp(rho)
    return Ordinal._raw(((rho, mu),) if mu else ())


def coeff_at(a: Ordinal, e: int) -> int:
    return Ordinal.of(a).coeff(e)


# -- text form -------------------------------------------------------------

def _render_exp(e: int) -> str:
    return "w" if e == OMEGA else str(e)


def render(a: Ordinal) -> str:
    a = Ordinal.of(a)
    if not a.terms:
        return "0"
    parts = []
    for e, c in a.terms:
        if e == 0:
            parts.append(str(c))
        elif e == 1:
            parts.append(f"w*{c}")
        else:
            parts.append(f"w^{_render_exp(e)}*{c}")
    return " + ".join(parts)


_TERM = re.compile(
    r"""^(?:
        (?P<nat>\d+)
      | w (?:\^(?P<exp>\d+|w))? (?:\*(?P<coef>\d+))?
    )$""",
    re.VERBOSE,
)


def parse(text: str) -> Ordinal:
    """Parse ``w^e*c + ... + c0``.  ``w`` alone means w^1*1; the exponent
    may be ``w``.  Terms may come in any order; equal exponents are added."""
    src = text.strip()
    if not src:
        raise OrdinalParseError("empty ordinal")
    terms = []
    pos = 0
    for chunk in src.split("+"):
        token = chunk.replace(" ", "")
        m = _TERM.match(token)
        if not m:
            raise OrdinalParseError(f"bad ordinal term {chunk.strip()!r} at column {pos + 1}")
        if m.group("nat") is not None:
            terms.append((0, int(m.group("nat"))))
        else:
            exp = m.group("exp")
            e = 1 if exp is None else (OMEGA if exp == "w" else int(exp))
            c = int(m.group("coef")) if m.group("coef") is not None else 1
            terms.append((e, c))
        pos += len(chunk) + 1
    return Ordinal(terms)
