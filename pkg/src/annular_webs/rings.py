"""Exact coefficient rings and grading bookkeeping.

Two small commutative rings with integer coefficients are provided:

* ``PolyAlpha``: polynomials in ``a1, a2`` (and optionally ``a3``), each
  variable of degree 2.  This is the ground ring of the SL(2) theory.
* ``LaurentQA``: Laurent polynomials in ``q`` and ``A`` used for graded
  ranks, Poincare series and SL(3) skein coefficients.

Both are immutable value types with a canonical (sorted, zero-free) term map,
so equality and hashing are structural.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

NVARS = 3


def _clean(terms):
    return {k: v for k, v in terms.items() if v}


class PolyAlpha:
    """Polynomial in a1, a2, a3 with integer coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        elif isinstance(terms, int):
            terms = {(0,) * NVARS: terms} if terms else {}
        else:
            fixed = {}
            for k, v in dict(terms).items():
                k = tuple(k) + (0,) * (NVARS - len(k))
                fixed[k] = fixed.get(k, 0) + v
            terms = fixed
        self._terms = dict(sorted(_clean(terms).items()))
        self._hash = None

    @classmethod
    def _raw(cls, terms):
        # trusted constructor: terms already cleaned, keys already full length
        obj = cls.__new__(cls)
        obj._terms = dict(sorted(terms.items()))
        obj._hash = None
        return obj

    @classmethod
    def gen(cls, i):
        """The variable a_i, for i in 1..3."""
        e = [0] * NVARS
        e[i - 1] = 1
        return cls._raw({tuple(e): 1})

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self):
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def _coerce(self, other):
        if isinstance(other, PolyAlpha):
            return other
        if isinstance(other, int):
            return PolyAlpha(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, v in other._terms.items():
            c = out.get(k, 0) + v
            if c:
                out[k] = c
            else:
                out.pop(k, None)
        return PolyAlpha._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return PolyAlpha._raw({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if not other:
                return PolyAlpha._raw({})
            return PolyAlpha._raw({k: v * other for k, v in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = {}
        for k1, v1 in self._terms.items():
            for k2, v2 in other._terms.items():
                k = (k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2])
                out[k] = out.get(k, 0) + v1 * v2
        return PolyAlpha._raw(_clean(out))

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = PolyAlpha(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = PolyAlpha(other)
        if not isinstance(other, PolyAlpha):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def degree(self):
        """Top degree, with each variable of degree 2.  The zero polynomial has degree None."""
        if not self._terms:
            return None
        return max(2 * sum(k) for k in self._terms)

    def is_homogeneous(self):
        return len({sum(k) for k in self._terms}) <= 1

    def constant(self):
        return self._terms.get((0,) * NVARS, 0)

    def is_constant(self):
        return all(not any(k) for k in self._terms)

    def evaluate(self, a1=0, a2=0, a3=0):
        vals = (a1, a2, a3)
        total = 0
        for k, v in self._terms.items():
            t = v
            for x, e in zip(vals, k):
                if e:
                    t *= x ** e
            total += t
        return total

    def swap12(self):
        """Interchange a1 and a2."""
        return PolyAlpha._raw({(k[1], k[0], k[2]): v for k, v in self._terms.items()})

    def __repr__(self):
        return f"PolyAlpha({render_poly(self)!r})"

    def __str__(self):
        return render_poly(self)


ZERO = PolyAlpha()
ONE = PolyAlpha(1)
A1 = PolyAlpha.gen(1)
A2 = PolyAlpha.gen(2)
A3 = PolyAlpha.gen(3)


def alpha(i):
    return A1 if i == 1 else A2


class LaurentQA:
    """Laurent polynomial in q and A with integer coefficients.

    ``A`` records the annular grading; ``q`` the quantum grading.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        elif isinstance(terms, int):
            terms = {(0, 0): terms}
        else:
            fixed = {}
            for k, v in dict(terms).items():
                k = (k[0], k[1] if len(k) > 1 else 0)
                fixed[k] = fixed.get(k, 0) + v
            terms = fixed
        self._terms = dict(sorted(_clean(terms).items()))
        self._hash = None

    @classmethod
    def monomial(cls, qexp=0, aexp=0, coeff=1):
        return cls({(qexp, aexp): coeff})

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self):
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def _coerce(self, other):
        if isinstance(other, LaurentQA):
            return other
        if isinstance(other, int):
            return LaurentQA(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, 0) + v
        return LaurentQA(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentQA({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = {}
        for (q1, a1), v1 in self._terms.items():
            for (q2, a2), v2 in other._terms.items():
                k = (q1 + q2, a1 + a2)
                out[k] = out.get(k, 0) + v1 * v2
        return LaurentQA(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            if len(self._terms) != 1:
                raise ValueError("only monomials can be inverted")
            (k, v), = self._terms.items()
            if v not in (1, -1):
                raise ValueError("only unit monomials can be inverted")
            return LaurentQA({(-k[0] * -n, -k[1] * -n): v ** -n})
        out = LaurentQA(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentQA(other)
        if not isinstance(other, LaurentQA):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def at_q1(self):
        """Specialize q = 1."""
        out = {}
        for (q, a), v in self._terms.items():
            out[(0, a)] = out.get((0, a), 0) + v
        return LaurentQA(out)

    def at_a1(self):
        """Specialize A = 1."""
        out = {}
        for (q, a), v in self._terms.items():
            out[(q, 0)] = out.get((q, 0), 0) + v
        return LaurentQA(out)

    def total(self):
        return sum(self._terms.values())

    def coeff(self, qexp=0, aexp=0):
        return self._terms.get((qexp, aexp), 0)

    def bar(self):
        """Invert q and A."""
        return LaurentQA({(-q, -a): v for (q, a), v in self._terms.items()})

    def __repr__(self):
        return f"LaurentQA({render_laurent(self)!r})"

    def __str__(self):
        return render_laurent(self)


Q = LaurentQA.monomial(1, 0)
QINV = LaurentQA.monomial(-1, 0)
AVAR = LaurentQA.monomial(0, 1)


def qint(n):
    """Quantum integer [n] = q^(n-1) + q^(n-3) + ... + q^(1-n)."""
    if n == 0:
        return LaurentQA()
    if n < 0:
        return -qint(-n)
    return LaurentQA({(n - 1 - 2 * k, 0): 1 for k in range(n)})


@dataclass(frozen=True, order=True)
class Bidegree:
    """Quantum and annular degree of a homogeneous element or map."""

    q: int = 0
    a: int = 0

    def __add__(self, other):
        return Bidegree(self.q + other.q, self.a + other.a)

    def __neg__(self):
        return Bidegree(-self.q, -self.a)

    def __sub__(self, other):
        return self + (-other)


# text rendering and parsing

_POLY_VARS = ("a1", "a2", "a3")
_LAURENT_VARS = ("q", "A")


def _render(items, names):
    if not items:
        return "0"
    parts = []
    for k, v in items:
        mono = "*".join(
            name if e == 1 else f"{name}^{e}" for name, e in zip(names, k) if e
        )
        c = abs(v)
        if not mono:
            body = str(c)
        elif c == 1:
            body = mono
        else:
            body = f"{c}*{mono}"
        sign = "-" if v < 0 else "+"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def render_poly(p: PolyAlpha):
    # highest degree first reads more naturally
    items = sorted(p.items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0])))
    names = _POLY_VARS if any(k[2] for k, _ in items) else _POLY_VARS[:2]
    return _render([(k[: len(names)], v) for k, v in items], names)


def render_laurent(p: LaurentQA):
    items = sorted(p.items(), key=lambda kv: (-kv[0][0], -kv[0][1]))
    return _render(items, _LAURENT_VARS)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z]\w*)|(\^)|([-+*()]))")


def _tokenize(text):
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse near {text[pos:]!r}")
        num, name, caret, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif name is not None:
            out.append(("name", name))
        elif caret:
            out.append(("op", "^"))
        else:
            out.append(("op", op))
        pos = m.end()
    return out


def _parse(text, names, make_var, make_const):
    """Parse a signed sum of products of integers and variables with caret powers."""
    toks = _tokenize(text)
    if not toks:
        raise ValueError("empty expression")
    i = 0
    total = make_const(0)

    def peek():
        return toks[i] if i < len(toks) else (None, None)

    sign = 1
    expect_term = True
    while i < len(toks):
        kind, val = peek()
        if kind == "op" and val in "+-" and expect_term is not None:
            if val == "-":
                sign = -sign
            i += 1
            continue
        term = make_const(sign)
        sign = 1
        got = False
        while i < len(toks):
            kind, val = peek()
            if kind == "num":
                term = term * int(val)
                i += 1
            elif kind == "name":
                if val not in names:
                    raise ValueError(f"unknown variable {val!r}")
                i += 1
                e = 1
                if peek() == ("op", "^"):
                    i += 1
                    esign = 1
                    while peek() in (("op", "-"), ("op", "+")):
                        if peek()[1] == "-":
                            esign = -esign
                        i += 1
                    k2, v2 = peek()
                    if k2 != "num":
                        raise ValueError("exponent must be an integer")
                    e = esign * v2
                    i += 1
                term = term * make_var(val, e)
            else:
                raise ValueError(f"unexpected token {val!r}")
            got = True
            if peek() == ("op", "*"):
                i += 1
                continue
            if peek()[0] in ("num", "name"):
                continue
            break
        if not got:
            raise ValueError("dangling sign")
        total = total + term
    return total


def parse_poly(text: str) -> PolyAlpha:
    def var(name, e):
        if e < 0:
            raise ValueError("negative exponent in a polynomial")
        return PolyAlpha.gen(_POLY_VARS.index(name) + 1) ** e

    return _parse(text, _POLY_VARS, var, PolyAlpha)


def parse_laurent(text: str) -> LaurentQA:
    def var(name, e):
        return LaurentQA.monomial(e, 0) if name == "q" else LaurentQA.monomial(0, e)

    return _parse(text, _LAURENT_VARS, var, LaurentQA)


def poly_sum(items: Iterable[PolyAlpha]) -> PolyAlpha:
    out = {}
    for p in items:
        for k, v in p.items():
            out[k] = out.get(k, 0) + v
    return PolyAlpha._raw(_clean(out))
