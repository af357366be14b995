"""Verifiers for positivity, vanishing and radical-membership certificates.

Each certificate shape reduces to one identity in A = Q[x]/I after the
denominators of its cone ingredients are cleared.  The identity checked is
returned in the verdict (``Verdict.identity``) so it can be re-derived by
other tools.  Writing p = Np/Dp and q = Nq/Dq for the cone ingredients
(Dp = Dq = 1 when a ring value is declared), the normative equations are

    Nonneg / H17   f*Nq*Dp - Np*Dq - f^(2m)*Dp*Dq   == 0 mod I
    Pos            f*Nq*Dp - Dp*Dq - Np*Dq          == 0 mod I
    Zero           f^(2m)*Dp + Np                   == 0 mod I
    Formal         p + b^2 + c                      == 0 mod I   (p polynomial)
    ImproperCone   -1*D - N                         == 0 mod I
    CentralRadical a^(2m) + b                       in J + I
    ContinuousH17  Q^2*f - P                        == 0 mod I   (P, Q polynomial)
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .cones import (
    ConeCertificate,
    Reason,
    Verdict,
    check_caps,
    cone_add,
    cone_mul,
    fraction_of,
    square,
    verify_cone_element,
    verify_cone_membership,
    verify_improper_cone,
    zero_cone,
)
from .polyring import Poly, QuotientRing


class Kind(str, enum.Enum):
    CONE = "Cone"
    FORMAL = "Formal"
    NONNEG = "Nonneg"
    POS = "Pos"
    ZERO = "Zero"
    H17 = "H17"
    IMPROPER_CONE = "ImproperCone"
    CENTRAL_RADICAL = "CentralRadical"
    CONTINUOUS_H17 = "ContinuousH17"


@dataclass(frozen=True)
class PositivityCertificate:
    """One certificate of any supported shape.

    Field use by kind:

    * Cone: ``f`` in the cone over ``generators``, witness in ``p``.
    * Nonneg/H17: ``f``, ``m``, ``p``, ``q`` (H17 has no generators).
    * Pos: ``f``, ``p``, ``q``.  Zero: ``f``, ``m``, ``p``.
    * Formal: ``generators`` is H, ``monoid`` with ``b_exponents`` gives b,
      ``zero_gens`` with ``c_coeffs`` gives c, ``p`` is a polynomial cone.
    * ImproperCone: cone certificate for -1 in ``p``.
    * CentralRadical: ``f`` is the element a, ``sub_ideal`` is J, ``p`` is b.
    * ContinuousH17: ``f``, ``p`` is P, ``q`` is Q.
    """

    kind: Kind
    f: Poly | None = None
    generators: tuple[Poly, ...] = ()
    m: int = 0
    p: ConeCertificate | None = None
    q: ConeCertificate | None = None
    monoid: tuple[Poly, ...] = ()
    b_exponents: tuple[int, ...] = ()
    zero_gens: tuple[Poly, ...] = ()
    c_coeffs: tuple[tuple[Poly, int], ...] = ()
    sub_ideal: tuple[Poly, ...] = ()


def _pow(f: Poly, k: int) -> Poly:
    return f**k


def _ingredients(ring: QuotientRing, *certs: ConeCertificate) -> Verdict | None:
    for c in certs:
        v = verify_cone_element(ring, c)
        if not v:
            return v
    return None


def _check_generators(generators: Sequence[Poly], *certs: ConeCertificate) -> Verdict | None:
    for c in certs:
        if tuple(c.generators) != tuple(generators):
            return Verdict.fail(Reason.GENERATOR_MISMATCH, "cone ingredient built over a different generator list")
    return None


def _first_failure(*verdicts: Verdict | None) -> Verdict | None:
    # failed verdicts are falsy, so test against None explicitly
    return next((v for v in verdicts if v is not None), None)


def _residue_verdict(ring: QuotientRing, expr: Poly, identity: str) -> Verdict:
    residue = ring.normal_form(expr)
    if residue:
        return Verdict.fail(Reason.IDENTITY_FAILS, f"residue {ring.format(residue)}", identity)
    return Verdict(True, identity=identity)


def verify_formal_pss(
    ring: QuotientRing,
    H: Sequence[Poly],
    monoid: Sequence[Poly],
    b_exponents: Sequence[int],
    zero_gens: Sequence[Poly],
    c_coeffs: Sequence[tuple[Poly, int]],
    p_cert: ConeCertificate,
) -> Verdict:
    """p + b^2 + c == 0 mod I with p a polynomial element of the cone over H."""
    identity = "p + b^2 + sum(c_k*h_k) == 0 mod I"
    if not p_cert.is_polynomial():
        return Verdict.fail(Reason.NON_POLYNOMIAL_WITNESS, "formal certificates use denominator 1", identity)
    bad = _first_failure(_check_generators(H, p_cert), _ingredients(ring, p_cert))
    if bad is not None:
        return bad
    if len(b_exponents) != len(monoid):
        return Verdict.fail(Reason.INDEX_OUT_OF_RANGE, "one exponent per monoid generator", identity)
    b = ring.const(1)
    for g, e in zip(monoid, b_exponents):
        if e < 0:
            return Verdict.fail(Reason.INDEX_OUT_OF_RANGE, "negative monoid exponent", identity)
        b = b * _pow(g, e)
    c = ring.zero()
    for coeff, k in c_coeffs:
        if not 0 <= k < len(zero_gens):
            return Verdict.fail(Reason.INDEX_OUT_OF_RANGE, f"ideal generator index {k}", identity)
        c = c + coeff * zero_gens[k]
    check_caps([b, c, *p_cert.polys()])
    p, _ = fraction_of(ring, p_cert)
    return _residue_verdict(ring, p + b * b + c, identity)


def verify_nonneg(ring: QuotientRing, f: Poly, generators: Sequence[Poly], m: int, p_cert: ConeCertificate, q_cert: ConeCertificate) -> Verdict:
    """f*q == p + f^(2m) with p, q in the cone over ``generators``."""
    identity = "f*Nq*Dp - Np*Dq - f^(2m)*Dp*Dq == 0 mod I"
    check_caps([f, *p_cert.polys(), *q_cert.polys()], m)
    bad = _first_failure(_check_generators(generators, p_cert, q_cert), _ingredients(ring, p_cert, q_cert))
    if bad is not None:
        return Verdict(False, bad.reason, bad.detail, identity)
    Np, Dp = fraction_of(ring, p_cert)
    Nq, Dq = fraction_of(ring, q_cert)
    return _residue_verdict(ring, f * Nq * Dp - Np * Dq - _pow(f, 2 * m) * Dp * Dq, identity)


def verify_pos(ring: QuotientRing, f: Poly, generators: Sequence[Poly], p_cert: ConeCertificate, q_cert: ConeCertificate) -> Verdict:
    """f*q == 1 + p with p, q in the cone over ``generators``."""
    identity = "f*Nq*Dp - Dp*Dq - Np*Dq == 0 mod I"
    check_caps([f, *p_cert.polys(), *q_cert.polys()])
    bad = _first_failure(_check_generators(generators, p_cert, q_cert), _ingredients(ring, p_cert, q_cert))
    if bad is not None:
        return Verdict(False, bad.reason, bad.detail, identity)
    Np, Dp = fraction_of(ring, p_cert)
    Nq, Dq = fraction_of(ring, q_cert)
    return _residue_verdict(ring, f * Nq * Dp - Dp * Dq - Np * Dq, identity)


def verify_zero(ring: QuotientRing, f: Poly, generators: Sequence[Poly], m: int, p_cert: ConeCertificate) -> Verdict:
    """f^(2m) + p == 0 with p in the cone over ``generators``."""
    identity = "f^(2m)*Dp + Np == 0 mod I"
    check_caps([f, *p_cert.polys()], m)
    bad = _first_failure(_check_generators(generators, p_cert), _ingredients(ring, p_cert))
    if bad is not None:
        return Verdict(False, bad.reason, bad.detail, identity)
    Np, Dp = fraction_of(ring, p_cert)
    return _residue_verdict(ring, _pow(f, 2 * m) * Dp + Np, identity)


def verify_h17(ring: QuotientRing, f: Poly, m: int, p_cert: ConeCertificate, q_cert: ConeCertificate) -> Verdict:
    """Nonnegativity certificate over the bare cone (no extra generators)."""
    return verify_nonneg(ring, f, (), m, p_cert, q_cert)


@dataclass(frozen=True)
class ZeroSetClaim:
    """Side condition: every central point where ``q`` vanishes is a zero of ``f``."""

    q: Poly
    f: Poly


@dataclass(frozen=True)
class Q2FResult:
    P: ConeCertificate
    Q: ConeCertificate
    claim: ZeroSetClaim | None
    verdict: Verdict


def derive_q2f_eq_p(ring: QuotientRing, f: Poly, m: int, p_cert: ConeCertificate, q_cert: ConeCertificate) -> Q2FResult:
    """From f*q = p + f^(2m) build Q = p + f^(2m) and P = f^2*q*Q with Q^2*f = P.

    Both outputs are cone certificates assembled by the combinators, so they
    inherit witnesses from the inputs.  Raises ValueError for f in I or for
    inputs that do not verify.
    """
    if ring.contains(f):
        raise ValueError("f is zero in A")
    given = verify_h17(ring, f, m, p_cert, q_cert)
    if not given:
        raise ValueError(f"input certificate does not verify: {given.reason.value}")
    Q = cone_add(p_cert, square(_pow(f, m)))
    P = cone_mul(cone_mul(square(f), q_cert), Q)
    NQ, DQ = fraction_of(ring, Q)
    NP, DP = fraction_of(ring, P)
    identity = "NQ^2*f*DP - NP*DQ^2 == 0 mod I"
    verdict = _residue_verdict(ring, NQ * NQ * f * DP - NP * DQ * DQ, identity)
    if not verdict:
        raise AssertionError("derived identity failed; combinator bug")
    claim = ZeroSetClaim(Q.value, f) if Q.value is not None else ZeroSetClaim(NQ, f)
    return Q2FResult(P, Q, claim, verdict)


class RadicalStatus(str, enum.Enum):
    MEMBERSHIP_CERTIFIED = "MembershipCertified"
    TRIVIAL_MEMBERSHIP = "TrivialMembership"
    REJECTED = "Rejected"


@dataclass(frozen=True)
class RadicalVerdict:
    status: RadicalStatus
    reason: Reason | None = None
    # a certified element of the central radical outside J + I: J is not central
    not_central: bool = False
    detail: str = ""
    identity: str = "a^(2m) + b in J + I, b in the cone of fraction squares"

    def __bool__(self) -> bool:
        return self.status is not RadicalStatus.REJECTED


def verify_central_radical(ring: QuotientRing, sub_ideal: Sequence[Poly], a: Poly, m: int, b_cert: ConeCertificate) -> RadicalVerdict:
    """Certify a in the central radical of J = (sub_ideal) via a^(2m) + b in J + I.

    The combined ideal is presented by concatenating generators.  When a
    itself is outside J + I the certificate proves J is not central.
    """
    check_caps([a, *sub_ideal, *b_cert.polys()], m)
    combined = ring.extended(sub_ideal)
    if combined.contains(a):
        return RadicalVerdict(RadicalStatus.TRIVIAL_MEMBERSHIP, detail="a already lies in J + I")
    if b_cert.generators:
        return RadicalVerdict(RadicalStatus.REJECTED, Reason.GENERATOR_MISMATCH, detail="b must lie in the bare cone")
    if b_cert.value is None:
        if not b_cert.is_polynomial():
            return RadicalVerdict(RadicalStatus.REJECTED, Reason.MISSING_VALUE, detail="fractional witness without a declared ring value")
        b_value = fraction_of(ring, b_cert)[0]
    else:
        b_value = b_cert.value
    member = verify_cone_membership(ring, b_value, b_cert)
    if not member:
        return RadicalVerdict(RadicalStatus.REJECTED, member.reason, detail=member.detail)
    residue = combined.normal_form(_pow(a, 2 * m) + b_value)
    if residue:
        return RadicalVerdict(RadicalStatus.REJECTED, Reason.IDENTITY_FAILS, detail=f"residue {combined.format(residue)} in A/J")
    return RadicalVerdict(RadicalStatus.MEMBERSHIP_CERTIFIED, not_central=True, detail="a is in the central radical of J but not in J")


def verify_c0_identity(ring: QuotientRing, f: Poly, P_cert: ConeCertificate, Q_cert: ConeCertificate) -> Verdict:
    """Q^2*f == P with polynomial sums of squares P, Q.

    The zero-set containment Z(Q) within Z(f) on the central locus is not
    decided; it is returned as an obligation for sample-based checking.
    """
    identity = "Q^2*f - P == 0 mod I"
    check_caps([f, *P_cert.polys(), *Q_cert.polys()])
    if not (P_cert.is_polynomial() and Q_cert.is_polynomial()):
        return Verdict.fail(Reason.NON_POLYNOMIAL_WITNESS, "P and Q must be polynomial sums of squares", identity)
    bad = _ingredients(ring, P_cert, Q_cert)
    if bad is not None:
        return Verdict(False, bad.reason, bad.detail, identity)
    P, _ = fraction_of(ring, P_cert)
    Q, _ = fraction_of(ring, Q_cert)
    v = _residue_verdict(ring, Q * Q * f - P, identity)
    if not v:
        return v
    return Verdict(True, identity=identity, obligations=(ZeroSetClaim(Q, f),))


def verify(ring: QuotientRing, cert: PositivityCertificate) -> Verdict | RadicalVerdict:
    """Dispatch on ``cert.kind``."""
    kind = Kind(cert.kind)
    gens = cert.generators
    if kind in (Kind.CONE,):
        return verify_cone_membership(ring, cert.f, cert.p)
    if kind is Kind.FORMAL:
        return verify_formal_pss(ring, gens, cert.monoid, cert.b_exponents, cert.zero_gens, cert.c_coeffs, cert.p)
    if kind is Kind.NONNEG:
        return verify_nonneg(ring, cert.f, gens, cert.m, cert.p, cert.q)
    if kind is Kind.H17:
        if gens:
            return Verdict.fail(Reason.GENERATOR_MISMATCH, "H17 certificates have no generators")
        return verify_h17(ring, cert.f, cert.m, cert.p, cert.q)
    if kind is Kind.POS:
        return verify_pos(ring, cert.f, gens, cert.p, cert.q)
    if kind is Kind.ZERO:
        return verify_zero(ring, cert.f, gens, cert.m, cert.p)
    if kind is Kind.IMPROPER_CONE:
        return verify_improper_cone(ring, gens, cert.p)
    if kind is Kind.CENTRAL_RADICAL:
        return verify_central_radical(ring, cert.sub_ideal, cert.f, cert.m, cert.p)
    if kind is Kind.CONTINUOUS_H17:
        return verify_c0_identity(ring, cert.f, cert.p, cert.q)
    raise ValueError(f"unsupported kind {kind}")


def h17_from_cone_witness(ring: QuotientRing, f: Poly, witness_cert: ConeCertificate) -> PositivityCertificate:
    """q = f (with its cone witness), p = 0, m = 1: the certificate f*f = 0 + f^2."""
    q = witness_cert.with_value(f)
    return PositivityCertificate(Kind.H17, f=f, m=1, p=zero_cone((), ring.nvars), q=q)
