"""Witnesses for sums of squares of fractions and for finitely generated cones.

An element a of A = Q[x]/I lies in the cone of sums of squares of fractions
when a*q^2 - sum(g_i^2) is in I for some q not in I.  A cone certificate over
generators f_1..f_r is a finite sum of such fractional SOS factors times
squarefree products of the generators.  Every check here clears denominators
and reduces modulo the Groebner basis; nothing is taken on trust.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .polyring import Poly, QuotientRing, ResourceError

MAX_DEGREE = 64
MAX_M = 30


class Reason(str, enum.Enum):
    DENOMINATOR_IN_IDEAL = "DenominatorInIdeal"
    IDENTITY_FAILS = "IdentityFails"
    NON_POLYNOMIAL_WITNESS = "NonPolynomialWitness"
    INDEX_OUT_OF_RANGE = "GeneratorIndexOutOfRange"
    GENERATOR_MISMATCH = "GeneratorMismatch"
    VALUE_MISMATCH = "ValueMismatch"
    MISSING_VALUE = "MissingValue"
    ZERO_TARGET = "ZeroTarget"
    CONTAINMENT_FAILS = "ContainmentFails"
    EMPTY_WITNESS = "EmptyWitness"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a verifier.  Truthy iff the certificate checked out.

    ``identity`` restates the exact equation that was reduced modulo I, and
    ``obligations`` lists side conditions the verifier did not decide.
    """

    ok: bool
    reason: Reason | None = None
    detail: str = ""
    identity: str = ""
    obligations: tuple = ()

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def fail(cls, reason: Reason, detail: str = "", identity: str = "") -> "Verdict":
        return cls(False, reason, detail, identity)


@dataclass(frozen=True)
class SosFractionWitness:
    """Claims target * den^2 == sum(n^2 for n in nums) modulo I."""

    den: Poly
    nums: tuple[Poly, ...]

    def __post_init__(self):
        object.__setattr__(self, "nums", tuple(self.nums))

    @property
    def sos(self) -> Poly:
        total = Poly.zero(self.den.nvars)
        for g in self.nums:
            total = total + g * g
        return total

    def polys(self) -> Iterable[Poly]:
        yield self.den
        yield from self.nums


@dataclass(frozen=True)
class ConeTerm:
    witness: SosFractionWitness
    subset: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "subset", frozenset(self.subset))


@dataclass(frozen=True)
class ConeCertificate:
    """sum over terms of (sum nums^2 / den^2) * prod(generators[j] for j in subset).

    ``value`` optionally names the ring element being certified; when it is
    present the certificate also proves that this element of A has the
    claimed form, and identities built on it use the polynomial directly.
    """

    generators: tuple[Poly, ...] = ()
    terms: tuple[ConeTerm, ...] = ()
    value: Poly | None = None

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "terms", tuple(self.terms))

    def polys(self) -> Iterable[Poly]:
        yield from self.generators
        for t in self.terms:
            yield from t.witness.polys()
        if self.value is not None:
            yield self.value

    def is_polynomial(self) -> bool:
        return all(t.witness.den.constant_value() in (1, -1) for t in self.terms)

    def with_value(self, value: Poly | None) -> "ConeCertificate":
        return ConeCertificate(self.generators, self.terms, value)


def check_caps(polys: Iterable[Poly], m: int = 0) -> None:
    """Raise ResourceError when a degree or exponent exceeds the configured caps."""
    if m > MAX_M:
        raise ResourceError(f"exponent m={m} exceeds the cap of {MAX_M}")
    if m < 0:
        raise ValueError("m must be nonnegative")
    for p in polys:
        if p.degree() > MAX_DEGREE:
            raise ResourceError(f"polynomial degree {p.degree()} exceeds the cap of {MAX_DEGREE}")


def _generator_product(gens: Sequence[Poly], subset: frozenset[int], nvars: int) -> Poly:
    out = Poly.const(nvars, 1)
    for j in sorted(subset):
        out = out * gens[j]
    return out


def cleared(cert: ConeCertificate, nvars: int) -> tuple[Poly, Poly]:
    """(N, D) with D = prod q_t^2 and N = sum_t (prod_{u != t} q_u^2) * S_t * F_t.

    The certified quantity equals N / D in the fraction field.
    """
    one = Poly.const(nvars, 1)
    squares = [t.witness.den * t.witness.den for t in cert.terms]
    D = one
    for s in squares:
        D = D * s
    N = Poly.zero(nvars)
    for t, term in enumerate(cert.terms):
        part = term.witness.sos * _generator_product(cert.generators, term.subset, nvars)
        for u, s in enumerate(squares):
            if u != t:
                part = part * s
        N = N + part
    return N, D


def _structural_check(ring: QuotientRing, cert: ConeCertificate) -> Verdict | None:
    for term in cert.terms:
        if any(j < 0 or j >= len(cert.generators) for j in term.subset):
            return Verdict.fail(Reason.INDEX_OUT_OF_RANGE, f"subset {sorted(term.subset)} with {len(cert.generators)} generators")
        if not term.witness.nums:
            return Verdict.fail(Reason.EMPTY_WITNESS, "a witness needs at least one numerator")
        if ring.contains(term.witness.den):
            return Verdict.fail(Reason.DENOMINATOR_IN_IDEAL, f"denominator {ring.format(term.witness.den)} is zero in A")
    return None


def verify_sos_fraction(ring: QuotientRing, a: Poly, w: SosFractionWitness) -> Verdict:
    """Check a * q^2 - sum g_i^2 in I with q not in I."""
    check_caps([a, *w.polys()])
    identity = "a*q^2 - sum(g_i^2) == 0 mod I"
    if not w.nums:
        return Verdict.fail(Reason.EMPTY_WITNESS, identity=identity)
    if ring.contains(w.den):
        return Verdict.fail(Reason.DENOMINATOR_IN_IDEAL, f"q = {ring.format(w.den)}", identity)
    residue = ring.normal_form(a * w.den * w.den - w.sos)
    if residue:
        return Verdict.fail(Reason.IDENTITY_FAILS, f"residue {ring.format(residue)}", identity)
    return Verdict(True, identity=identity)


def verify_cone_membership(ring: QuotientRing, a: Poly, cert: ConeCertificate) -> Verdict:
    """Check that ``a`` equals the element described by ``cert``.

    Normative equation: a*D - N == 0 mod I with (N, D) from :func:`cleared`.
    When ``cert.value`` is set it must equal ``a`` modulo I as well.
    """
    check_caps([a, *cert.polys()])
    identity = "a*prod_t(q_t^2) - sum_t prod_{u!=t}(q_u^2) * sum_k(g_tk^2) * prod_{j in S_t}(f_j) == 0 mod I"
    bad = _structural_check(ring, cert)
    if bad is not None:
        return Verdict(False, bad.reason, bad.detail, identity)
    if cert.value is not None and ring.normal_form(cert.value - a):
        return Verdict.fail(Reason.VALUE_MISMATCH, "declared value differs from the target", identity)
    N, D = cleared(cert, ring.nvars)
    residue = ring.normal_form(a * D - N)
    if residue:
        return Verdict.fail(Reason.IDENTITY_FAILS, f"residue {ring.format(residue)}", identity)
    return Verdict(True, identity=identity)


def verify_improper_cone(ring: QuotientRing, generators: Sequence[Poly], cert: ConeCertificate) -> Verdict:
    """A passing certificate shows -1 lies in the cone generated by ``generators``.

    Consequently the basic open set where all generators are positive misses
    the central spectrum.
    """
    if tuple(generators) != tuple(cert.generators):
        return Verdict.fail(Reason.GENERATOR_MISMATCH, "certificate generators differ from the requested ones")
    return verify_cone_membership(ring, ring.const(-1), cert)


def fraction_of(ring: QuotientRing, cert: ConeCertificate) -> tuple[Poly, Poly]:
    """(numerator, denominator) used when ``cert`` enters a larger identity."""
    if cert.value is not None:
        return cert.value, ring.const(1)
    return cleared(cert, ring.nvars)


def verify_cone_element(ring: QuotientRing, cert: ConeCertificate) -> Verdict:
    """Validate a certificate used as an ingredient (p or q) of a larger identity."""
    bad = _structural_check(ring, cert)
    if bad is not None:
        return bad
    if cert.value is not None:
        return verify_cone_membership(ring, cert.value, cert)
    return Verdict(True)


# -- constructors and combinators ------------------------------------------


def zero_cone(generators: Sequence[Poly], nvars: int) -> ConeCertificate:
    return ConeCertificate(tuple(generators), (), Poly.zero(nvars))


def square(p: Poly, generators: Sequence[Poly] = ()) -> ConeCertificate:
    one = Poly.const(p.nvars, 1)
    return ConeCertificate(tuple(generators), (ConeTerm(SosFractionWitness(one, (p,))),), p * p)


def sos_cone(nums: Sequence[Poly], den: Poly | None = None, generators: Sequence[Poly] = (), subset: Iterable[int] = (), value: Poly | None = None) -> ConeCertificate:
    nvars = nums[0].nvars
    den = den if den is not None else Poly.const(nvars, 1)
    return ConeCertificate(tuple(generators), (ConeTerm(SosFractionWitness(den, tuple(nums)), frozenset(subset)),), value)


def generator_cone(generators: Sequence[Poly], j: int) -> ConeCertificate:
    nvars = generators[j].nvars
    one = Poly.const(nvars, 1)
    return ConeCertificate(tuple(generators), (ConeTerm(SosFractionWitness(one, (one,)), frozenset({j})),), generators[j])


class GeneratorMismatch(ValueError):
    pass


def _same_generators(c1: ConeCertificate, c2: ConeCertificate) -> None:
    if tuple(c1.generators) != tuple(c2.generators):
        raise GeneratorMismatch("cone certificates use different generator lists")


def cone_add(c1: ConeCertificate, c2: ConeCertificate) -> ConeCertificate:
    _same_generators(c1, c2)
    value = c1.value + c2.value if c1.value is not None and c2.value is not None else None
    return ConeCertificate(c1.generators, c1.terms + c2.terms, value)


def cone_mul(c1: ConeCertificate, c2: ConeCertificate) -> ConeCertificate:
    """Product certificate; repeated generators f_j^2 move into the SOS numerators."""
    _same_generators(c1, c2)
    gens = c1.generators
    terms = []
    for t1 in c1.terms:
        for t2 in c2.terms:
            w1, w2 = t1.witness, t2.witness
            shared = t1.subset & t2.subset
            absorbed = Poly.const(w1.den.nvars, 1)
            for j in sorted(shared):
                absorbed = absorbed * gens[j]
            nums = tuple(g * h * absorbed for g in w1.nums for h in w2.nums)
            terms.append(ConeTerm(SosFractionWitness(w1.den * w2.den, nums), t1.subset ^ t2.subset))
    value = c1.value * c2.value if c1.value is not None and c2.value is not None else None
    return ConeCertificate(gens, tuple(terms), value)


def add_same_denominator(w1: SosFractionWitness, w2: SosFractionWitness) -> SosFractionWitness:
    """Witness for a + b from witnesses for a and b that share their denominator."""
    if w1.den != w2.den:
        raise ValueError("witnesses have different denominators")
    return SosFractionWitness(w1.den, w1.nums + w2.nums)
