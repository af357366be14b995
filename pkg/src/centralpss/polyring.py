"""Sparse multivariate polynomials over Q and quotient rings Q[x1..xn]/I.

Everything here is exact: coefficients are ``fractions.Fraction`` and no
floating point value ever enters a polynomial.  A :class:`QuotientRing`
computes its reduced Groebner basis once at construction and is immutable
afterwards; normal forms are unique for a fixed monomial order.

The ideal is never checked for primality.  Rings built from the bundled
corpus are prime by construction; user-supplied rings are taken on trust.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

Monomial = tuple[int, ...]
Rational = Fraction | int

DEFAULT_PAIR_BUDGET = 100_000
MAX_PARSE_EXPONENT = 1024


class PolyError(ValueError):
    """Raised for malformed polynomial operations (arity mismatch and friends)."""


class ParseError(PolyError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class UnknownVariableError(ParseError):
    pass


class ResourceError(RuntimeError):
    """A configured budget was exhausted (distinct from a negative answer)."""


def _mono_add(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def _mono_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _mono_sub(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def _mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


class Poly:
    """Immutable sparse polynomial in ``nvars`` variables with rational coefficients.

    ``terms`` maps exponent tuples to nonzero Fractions.  Zero coefficients are
    dropped on construction, so equal polynomials have equal term maps.
    """

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Monomial, Rational] | None = None):
        if nvars < 1:
            raise PolyError("arity must be positive")
        clean: dict[Monomial, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            if len(mono) != nvars:
                raise PolyError(f"exponent {mono} does not have length {nvars}")
            if any(e < 0 for e in mono):
                raise PolyError(f"negative exponent in {mono}")
            c = Fraction(coeff)
            if c:
                clean[tuple(mono)] = c
        self.nvars = nvars
        self._terms = clean
        self._hash: int | None = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Monomial, Fraction]) -> "Poly":
        # trusted constructor: caller guarantees canonical terms
        p = object.__new__(cls)
        p.nvars = nvars
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars: int, value: Rational) -> "Poly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def var(cls, nvars: int, index: int) -> "Poly":
        mono = tuple(1 if i == index else 0 for i in range(nvars))
        return cls._raw(nvars, {mono: Fraction(1)})

    @classmethod
    def monomial(cls, mono: Monomial, coeff: Rational = 1) -> "Poly":
        return cls(len(mono), {tuple(mono): coeff})

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self._terms.items())

    def coeff(self, mono: Monomial) -> Fraction:
        return self._terms.get(tuple(mono), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def constant_value(self) -> Fraction | None:
        if not self._terms:
            return Fraction(0)
        if len(self._terms) == 1 and (0,) * self.nvars in self._terms:
            return self._terms[(0,) * self.nvars]
        return None

    def _check(self, other: "Poly") -> None:
        if self.nvars != other.nvars:
            raise PolyError(f"arity mismatch: {self.nvars} vs {other.nvars}")

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.nvars, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def __mul__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_add(m1, m2)
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return Poly._raw(self.nvars, out)

    __rmul__ = __mul__

    def scale(self, c: Rational) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly.zero(self.nvars)
        return Poly._raw(self.nvars, {m: v * c for m, v in self._terms.items()})

    def mul_term(self, mono: Monomial, c: Rational) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly.zero(self.nvars)
        return Poly._raw(self.nvars, {_mono_add(m, mono): v * c for m, v in self._terms.items()})

    def __pow__(self, k: int) -> "Poly":
        if not isinstance(k, int) or k < 0:
            raise PolyError("exponent must be a nonnegative integer")
        result = Poly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self._terms == Poly.const(self.nvars, other)._terms
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def evaluate(self, point: Sequence[Rational]) -> Fraction:
        """Exact value at a rational point."""
        if len(point) != self.nvars:
            raise PolyError(f"point has {len(point)} coordinates, polynomial has arity {self.nvars}")
        pt = [Fraction(v) for v in point]
        total = Fraction(0)
        for mono, c in self._terms.items():
            term = c
            for v, e in zip(pt, mono):
                if e:
                    term *= v**e
            total += term
        return total

    def diff(self, index: int) -> "Poly":
        out: dict[Monomial, Fraction] = {}
        for mono, c in self._terms.items():
            e = mono[index]
            if e:
                m = list(mono)
                m[index] -= 1
                out[tuple(m)] = c * e
        return Poly._raw(self.nvars, out)

    def to_str(self, names: Sequence[str], order: "MonomialOrder | None" = None) -> str:
        if not self._terms:
            return "0"
        order = order or MonomialOrder.grevlex(self.nvars)
        parts: list[str] = []
        for mono in sorted(self._terms, key=order.key, reverse=True):
            c = self._terms[mono]
            factors = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, mono) if e]
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not factors:
                body = str(a)
            elif a == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(a)] + factors)
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        names = [f"x{i + 1}" for i in range(self.nvars)]
        return f"Poly({self.to_str(names)!r})"


@dataclass(frozen=True)
class MonomialOrder:
    """Graded reverse lexicographic or lexicographic order on exponent tuples.

    ``perm`` lists variable indices from most to least significant.
    """

    kind: str
    perm: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex"):
            raise PolyError(f"unknown monomial order {self.kind!r}")
        if sorted(self.perm) != list(range(len(self.perm))):
            raise PolyError("variable permutation is not a permutation")

    @classmethod
    def grevlex(cls, nvars: int) -> "MonomialOrder":
        return cls("grevlex", tuple(range(nvars)))

    @classmethod
    def lex(cls, nvars: int) -> "MonomialOrder":
        return cls("lex", tuple(range(nvars)))

    def key(self, mono: Monomial) -> tuple:
        e = tuple(mono[i] for i in self.perm)
        if self.kind == "lex":
            return e
        return (sum(e), tuple(-x for x in reversed(e)))

    def leading(self, p: Poly) -> tuple[Monomial, Fraction]:
        mono = max(p._terms, key=self.key)
        return mono, p._terms[mono]


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<id>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^/()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = len(text) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", start, text)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    # expr   := ['-'|'+'] term (('+'|'-') term)*
    # term   := factor ('*' factor)*
    # factor := atom ('^' INT)?
    # atom   := INT ['/' INT] | IDENT | '(' expr ')' | '-' factor
    def __init__(self, text: str, names: Sequence[str]):
        self.text = text
        self.names = list(names)
        self.n = len(names)
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None, value=None):
        tok = self.tokens[self.i]
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", tok[2], self.text)
        self.i += 1
        return tok

    def parse(self) -> Poly:
        p = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected token {tok[1]!r} (implicit multiplication is not allowed)", tok[2], self.text)
        return p

    def expr(self) -> Poly:
        result = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def term(self) -> Poly:
        result = self.factor()
        while self.peek() == ("op", "*", self.peek()[2]):
            self.take()
            result = result * self.factor()
        return result

    def factor(self) -> Poly:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("-", "+"):
            self.take()
            inner = self.factor()
            return -inner if tok[1] == "-" else inner
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            exp_tok = self.take("num")
            if int(exp_tok[1]) > MAX_PARSE_EXPONENT:
                raise ResourceError(f"exponent {exp_tok[1]} exceeds {MAX_PARSE_EXPONENT}")
            base = base ** int(exp_tok[1])
        return base

    def atom(self) -> Poly:
        tok = self.peek()
        if tok[0] == "num":
            self.take()
            value = Fraction(int(tok[1]))
            if self.peek()[0] == "op" and self.peek()[1] == "/":
                self.take()
                den = self.take("num")
                if int(den[1]) == 0:
                    raise ParseError("division by zero", den[2], self.text)
                value /= int(den[1])
            return Poly.const(self.n, value)
        if tok[0] == "id":
            self.take()
            try:
                idx = self.names.index(tok[1])
            except ValueError:
                raise UnknownVariableError(f"unknown variable {tok[1]!r}", tok[2], self.text) from None
            return Poly.var(self.n, idx)
        if tok == ("op", "(", tok[2]):
            self.take()
            inner = self.expr()
            self.take("op", ")")
            return inner
        got = tok[1] or "end of input"
        raise ParseError(f"unexpected {got!r}", tok[2], self.text)


def parse_poly_names(text: str, names: Sequence[str]) -> Poly:
    return _Parser(text, names).parse()


def parse_poly(text: str, ring: "QuotientRing") -> Poly:
    """Parse ``text`` over the variables of ``ring`` (no reduction mod I)."""
    return parse_poly_names(text, ring.variables)


# -- Groebner bases ----------------------------------------------------------


def _monic(p: Poly, order: MonomialOrder) -> Poly:
    _, lc = order.leading(p)
    return p if lc == 1 else p.scale(1 / lc)


def reduce_full(f: Poly, basis: Sequence[Poly], order: MonomialOrder) -> Poly:
    """Complete reduction of ``f`` by ``basis`` (multivariate division remainder)."""
    if not basis or not f:
        return f
    leads = [order.leading(g) for g in basis]
    p = dict(f._terms)
    rem: dict[Monomial, Fraction] = {}
    key = order.key
    while p:
        mono = max(p, key=key)
        c = p[mono]
        for g, (lm, lc) in zip(basis, leads):
            if _mono_divides(lm, mono):
                shift = _mono_sub(mono, lm)
                factor = c / lc
                for gm, gc in g._terms.items():
                    m = _mono_add(gm, shift)
                    v = p.get(m, 0) - factor * gc
                    if v:
                        p[m] = v
                    else:
                        p.pop(m, None)
                break
        else:
            rem[mono] = c
            del p[mono]
    return Poly._raw(f.nvars, rem)


def s_polynomial(f: Poly, g: Poly, order: MonomialOrder) -> Poly:
    lf, cf = order.leading(f)
    lg, cg = order.leading(g)
    lcm = _mono_lcm(lf, lg)
    return f.mul_term(_mono_sub(lcm, lf), 1 / cf) - g.mul_term(_mono_sub(lcm, lg), 1 / cg)


def buchberger_basis(
    generators: Iterable[Poly], order: MonomialOrder, pair_budget: int = DEFAULT_PAIR_BUDGET
) -> list[Poly]:
    """Reduced monic Groebner basis, sorted by decreasing leading monomial.

    Pairs are processed with the normal selection strategy (smallest lcm of
    leading monomials first) and Buchberger's coprime criterion.  More than
    ``pair_budget`` reduced S-pairs raises :class:`ResourceError`.
    """
    G = [_monic(g, order) for g in generators if g]
    if not G:
        return []
    key = order.key
    pairs = {(i, j) for j in range(len(G)) for i in range(j)}
    processed = 0
    while pairs:
        def pair_key(p):
            a, b = p
            return (key(_mono_lcm(order.leading(G[a])[0], order.leading(G[b])[0])), p)

        pair = min(pairs, key=pair_key)
        pairs.discard(pair)
        a, b = pair
        la, lb = order.leading(G[a])[0], order.leading(G[b])[0]
        if _mono_add(la, lb) == _mono_lcm(la, lb):
            continue
        processed += 1
        if processed > pair_budget:
            raise ResourceError(f"Buchberger exceeded the S-pair budget of {pair_budget}")
        r = reduce_full(s_polynomial(G[a], G[b], order), G, order)
        if r:
            G.append(_monic(r, order))
            new = len(G) - 1
            pairs.update((i, new) for i in range(new))
    return _interreduce(G, order)


def _interreduce(G: list[Poly], order: MonomialOrder) -> list[Poly]:
    # drop elements whose leading monomial is divisible by another's
    leads = [order.leading(g)[0] for g in G]
    keep = []
    for i, lm in enumerate(leads):
        redundant = False
        for j, other in enumerate(leads):
            if j == i or not _mono_divides(other, lm):
                continue
            if other != lm or j < i:
                redundant = True
                break
        if not redundant:
            keep.append(G[i])
    reduced = []
    for i, g in enumerate(keep):
        rest = keep[:i] + keep[i + 1 :]
        lm, lc = order.leading(g)
        tail = reduce_full(g - Poly.monomial(lm, lc), rest, order)
        reduced.append(_monic(tail + Poly.monomial(lm, lc), order))
    reduced.sort(key=lambda g: order.key(order.leading(g)[0]), reverse=True)
    return reduced


class QuotientRing:
    """The ring Q[variables]/(ideal_generators) with a cached reduced Groebner basis.

    Instances are immutable; ``normal_form`` memoizes monomial reductions in a
    private cache that never changes observable results.
    """

    def __init__(
        self,
        variables: Sequence[str],
        ideal_generators: Sequence[Poly | str] = (),
        order: MonomialOrder | str = "grevlex",
        pair_budget: int = DEFAULT_PAIR_BUDGET,
    ):
        variables = tuple(v.strip() for v in variables)
        if not variables:
            raise PolyError("a ring needs at least one variable")
        if len(set(variables)) != len(variables):
            raise PolyError(f"duplicate variable names in {variables}")
        for v in variables:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", v):
                raise PolyError(f"invalid variable name {v!r}")
        self.variables = variables
        n = len(variables)
        if isinstance(order, str):
            order = MonomialOrder.lex(n) if order == "lex" else MonomialOrder(order, tuple(range(n)))
        if len(order.perm) != n:
            raise PolyError("monomial order arity does not match the variables")
        self.order = order
        gens = []
        for g in ideal_generators:
            g = parse_poly_names(g, variables) if isinstance(g, str) else g
            if g.nvars != n:
                raise PolyError("ideal generator arity mismatch")
            if g:
                gens.append(g)
        self.ideal_generators = tuple(gens)
        self.groebner_basis = tuple(buchberger_basis(gens, order, pair_budget))
        self._leads = tuple(order.leading(g)[0] for g in self.groebner_basis)
        self._nf_cache: dict[Monomial, Poly] = {}

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def is_trivial_ideal(self) -> bool:
        return any(not any(lm) for lm in self._leads)

    @property
    def leading_monomials(self) -> tuple[Monomial, ...]:
        return self._leads

    def poly(self, text: str) -> Poly:
        return parse_poly(text, self)

    def var(self, name: str) -> Poly:
        return Poly.var(self.nvars, self.variables.index(name))

    def const(self, value: Rational) -> Poly:
        return Poly.const(self.nvars, value)

    def zero(self) -> Poly:
        return Poly.zero(self.nvars)

    def format(self, p: Poly) -> str:
        return p.to_str(self.variables, self.order)

    def is_standard(self, mono: Monomial) -> bool:
        """True when ``mono`` is not divisible by any Groebner leading monomial."""
        return not any(_mono_divides(lm, mono) for lm in self._leads)

    def normal_form(self, f: Poly) -> Poly:
        if f.nvars != self.nvars:
            raise PolyError("arity mismatch")
        if not self.groebner_basis:
            return f
        out: dict[Monomial, Fraction] = {}
        for mono, c in f._terms.items():
            for m, v in self._monomial_nf(mono)._terms.items():
                s = out.get(m, 0) + c * v
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Poly._raw(self.nvars, out)

    def _monomial_nf(self, mono: Monomial) -> Poly:
        cached = self._nf_cache.get(mono)
        if cached is None:
            cached = reduce_full(Poly._raw(self.nvars, {mono: Fraction(1)}), self.groebner_basis, self.order)
            self._nf_cache[mono] = cached
        return cached

    def contains(self, f: Poly) -> bool:
        return not self.normal_form(f)

    def extended(self, extra: Iterable[Poly]) -> "QuotientRing":
        """The ring modulo I + (extra), presented by concatenated generators."""
        return QuotientRing(self.variables, list(self.ideal_generators) + list(extra), self.order)

    def to_text(self) -> str:
        lines = [f"vars: {', '.join(self.variables)}"]
        if self.order.kind != "grevlex":
            lines.append(f"order: {self.order.kind}")
        lines.append("ideal:")
        lines.extend(self.format(g) for g in self.ideal_generators)
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        gens = ", ".join(self.format(g) for g in self.ideal_generators)
        return f"QuotientRing({list(self.variables)}, [{gens}])"


def buchberger(ring: QuotientRing) -> QuotientRing:
    """Return ``ring`` itself: the reduced basis is computed when a ring is built."""
    return ring


def normal_form(f: Poly, ring: QuotientRing) -> Poly:
    return ring.normal_form(f)


def ideal_member(f: Poly, ring: QuotientRing) -> bool:
    return ring.contains(f)


def evaluate(f: Poly, point: Sequence[Rational]) -> Fraction:
    return f.evaluate(point)


def poly_pow(a: Poly, k: int) -> Poly:
    return a**k


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise PolyError(f"unknown operation {op!r}")


def parse_ring(text: str, pair_budget: int = DEFAULT_PAIR_BUDGET) -> QuotientRing:
    """Read the ring description format::

        vars: x, y, z
        order: grevlex        (optional; or lex)
        ideal:
        y^2 - z*x^2

    ``#`` starts a comment.  An empty ideal section means I = (0).
    """
    variables = None
    order = "grevlex"
    gens_text: list[tuple[int, str]] = []
    in_ideal = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if in_ideal:
            gens_text.append((lineno, line))
            continue
        head, sep, rest = line.partition(":")
        head = head.strip().lower()
        if not sep:
            raise ParseError(f"line {lineno}: expected 'key: value'", 0, raw)
        if head == "vars":
            variables = [v.strip() for v in rest.split(",") if v.strip()]
        elif head == "order":
            order = rest.strip()
        elif head == "ideal":
            in_ideal = True
            if rest.strip():
                gens_text.append((lineno, rest.strip()))
        else:
            raise ParseError(f"line {lineno}: unknown header {head!r}", 0, raw)
    if not variables:
        raise ParseError("missing 'vars:' header", 0, text)
    gens = []
    for lineno, g in gens_text:
        try:
            gens.append(parse_poly_names(g, variables))
        except ParseError as exc:
            raise type(exc)(f"line {lineno}: {exc.args[0]}", exc.position, g) from None
    return QuotientRing(variables, gens, order, pair_budget)
