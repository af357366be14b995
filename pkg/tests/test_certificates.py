import random

import pytest

from centralpss.certificates import (
    Kind,
    PositivityCertificate,
    RadicalStatus,
    derive_q2f_eq_p,
    h17_from_cone_witness,
    verify,
    verify_c0_identity,
    verify_central_radical,
    verify_formal_pss,
    verify_h17,
    verify_nonneg,
    verify_pos,
    verify_zero,
)
from centralpss.cones import (
    ConeCertificate,
    ConeTerm,
    Reason,
    SosFractionWitness,
    cone_add,
    cone_mul,
    generator_cone,
    sos_cone,
    square,
    verify_cone_membership,
    zero_cone,
)
from centralpss.polyring import QuotientRing, ResourceError

LINE = QuotientRing(["x"])
CUBIC = QuotientRing(["x", "y"], ["y^2 - x^3 + x^2"])
WHITNEY = QuotientRing(["x", "y", "z"], ["y^2 - z*x^2"])
CARTAN = QuotientRing(["x", "y", "z"], ["x^3 - z*(x^2 + y^2)"])
CONTRE = QuotientRing(["x", "y", "z", "t1", "t2"], ["z^2 + t1*x^2 + t2*y^2"])

GRAM_NUMS = ["x^2*y"] * 3 + ["x*y^2"] * 3 + ["y^3"]


def frac_cone(ring, den, nums, value=None, generators=()):
    return sos_cone([ring.poly(n) for n in nums], ring.poly(den), generators, value=None if value is None else ring.poly(value))


def whitney_z():
    return frac_cone(WHITNEY, "x", ["y"], "z")


def contre_p():
    gens = (CONTRE.var("t1"), CONTRE.var("t2"))
    one = CONTRE.const(1)
    terms = (ConeTerm(SosFractionWitness(one, (CONTRE.var("x"),)), {0}), ConeTerm(SosFractionWitness(one, (CONTRE.var("y"),)), {1}))
    return gens, ConeCertificate(gens, terms)


class TestFormal:
    def test_forced_cancellation(self):
        H = (LINE.poly("-x^2"),)
        p = generator_cone(H, 0)
        assert verify_formal_pss(LINE, H, [LINE.var("x")], [1], [], [], p)

    def test_contre_ex_identity(self):
        H, p = contre_p()
        g = CONTRE.ideal_generators[0]
        assert verify_formal_pss(CONTRE, H, [CONTRE.var("z")], [1], [g], [(CONTRE.const(-1), 0)], p)

    def test_no_identity_on_the_line(self):
        H = (LINE.var("x"),)
        p = cone_add(square(LINE.const(1), H), generator_cone(H, 0))
        assert not verify_formal_pss(LINE, H, [], [], [], [], p)

    def test_fractional_witness_rejected(self):
        H = (CUBIC.var("x"),)
        p = frac_cone(CUBIC, "x", ["y"], generators=H)
        v = verify_formal_pss(CUBIC, H, [], [], [], [], p)
        assert v.reason is Reason.NON_POLYNOMIAL_WITNESS

    def test_bad_ideal_index(self):
        H, p = contre_p()
        v = verify_formal_pss(CONTRE, H, [CONTRE.var("z")], [1], [], [(CONTRE.const(1), 0)], p)
        assert v.reason is Reason.INDEX_OUT_OF_RANGE


class TestNonnegAndH17:
    def test_line_f_squared(self):
        gens = (LINE.var("x"),)
        q = generator_cone(gens, 0)
        assert verify_nonneg(LINE, LINE.var("x"), gens, 1, zero_cone(gens, 1), q)

    def test_whitney_z(self):
        z = WHITNEY.var("z")
        assert verify_nonneg(WHITNEY, z, (), 1, zero_cone((), 3), whitney_z())
        assert verify_h17(WHITNEY, z, 1, zero_cone((), 3), whitney_z())

    def test_cubic_fractional_q_without_value(self):
        f = CUBIC.poly("x - 1")
        q = frac_cone(CUBIC, "x", ["y"])
        assert verify_h17(CUBIC, f, 1, zero_cone((), 2), q)

    def test_h17_and_nonneg_agree(self):
        f = CARTAN.poly("x^2 + y^2 - z^2")
        q = frac_cone(CARTAN, "x^2 + y^2", GRAM_NUMS, "x^2 + y^2 - z^2")
        p = zero_cone((), 3)
        assert bool(verify_h17(CARTAN, f, 1, p, q)) == bool(verify_nonneg(CARTAN, f, (), 1, p, q)) is True
        bad = frac_cone(CARTAN, "x^2 + y^2", GRAM_NUMS[:-1])
        assert bool(verify_h17(CARTAN, f, 1, p, bad)) == bool(verify_nonneg(CARTAN, f, (), 1, p, bad)) is False

    def test_m_cap(self):
        with pytest.raises(ResourceError):
            verify_h17(LINE, LINE.var("x"), 31, zero_cone((), 1), square(LINE.var("x")))

    def test_ingredient_with_wrong_generators(self):
        gens = (LINE.var("x"),)
        v = verify_nonneg(LINE, LINE.var("x"), gens, 1, zero_cone((), 1), generator_cone(gens, 0))
        assert v.reason is Reason.GENERATOR_MISMATCH


class TestPosAndZero:
    def test_pos_trivial(self):
        q = square(LINE.const(1))
        p = square(LINE.var("x"))
        assert verify_pos(LINE, LINE.poly("1 + x^2"), (), p, q)

    def test_pos_fails_where_f_vanishes(self):
        gens = (LINE.var("x"),)
        for q, p in [(square(LINE.const(1), gens), zero_cone(gens, 1)), (generator_cone(gens, 0), square(LINE.const(1), gens))]:
            assert not verify_pos(LINE, LINE.var("x"), gens, p, q)

    def test_zero_line(self):
        H = (LINE.poly("-x^2"),)
        assert verify_zero(LINE, LINE.var("x"), H, 1, generator_cone(H, 0))

    def test_zero_contre_ex(self):
        H, p = contre_p()
        assert verify_zero(CONTRE, CONTRE.var("z"), H, 1, p)

    def test_zero_negative(self):
        for m in (1, 2):
            assert not verify_zero(LINE, LINE.var("x"), (), m, square(LINE.var("x")))


class TestDerivedIdentity:
    def test_whitney(self):
        out = derive_q2f_eq_p(WHITNEY, WHITNEY.var("z"), 1, zero_cone((), 3), whitney_z())
        assert out.Q.value == WHITNEY.poly("z^2")
        assert out.P.value == WHITNEY.poly("z^5")
        assert verify_cone_membership(WHITNEY, out.Q.value, out.Q)
        assert verify_cone_membership(WHITNEY, out.P.value, out.P)
        assert out.claim.q == out.Q.value

    def test_cubic(self):
        f = CUBIC.poly("x - 1")
        out = derive_q2f_eq_p(CUBIC, f, 1, zero_cone((), 2), frac_cone(CUBIC, "x", ["y"], "x - 1"))
        assert out.Q.value == f**2
        assert out.P.value == f**5

    def test_unit(self):
        one = LINE.const(1)
        out = derive_q2f_eq_p(LINE, one, 1, zero_cone((), 1), square(one))
        assert out.Q.value == one and out.P.value == one

    def test_rejects_zero_and_unverified(self):
        with pytest.raises(ValueError):
            derive_q2f_eq_p(CUBIC, CUBIC.poly("y^2 - x^3 + x^2"), 1, zero_cone((), 2), square(CUBIC.const(1)))
        with pytest.raises(ValueError):
            derive_q2f_eq_p(LINE, LINE.var("x"), 1, zero_cone((), 1), square(LINE.const(1)))

    def test_random_sos_inputs(self):
        rng = random.Random(0)
        for _ in range(25):
            g = LINE.poly(f"{rng.randint(-3, 3)} + {rng.randint(-3, 3)}*x")
            h = LINE.poly(f"{rng.randint(1, 3)} + {rng.randint(-2, 2)}*x^2")
            f = g * g + h * h
            m = rng.randint(1, 2)
            # q = f^(2m-1) written as squares so that f q = f^(2m)
            q = cone_add(square(g), square(h))
            if m == 2:
                q = cone_mul(q, square(f))
            assert verify_h17(LINE, f, m, zero_cone((), 1), q)
            out = derive_q2f_eq_p(LINE, f, m, zero_cone((), 1), q)
            assert out.verdict
            assert out.P.value == f ** (4 * m + 1)


class TestCentralRadical:
    def test_cartan_falsifier(self):
        b = frac_cone(CARTAN, "x^2 + y^2", GRAM_NUMS, "x^2 + y^2 - z^2")
        v = verify_central_radical(CARTAN, [CARTAN.var("x"), CARTAN.var("y")], CARTAN.var("z"), 1, b)
        assert v.status is RadicalStatus.MEMBERSHIP_CERTIFIED
        assert v.not_central

    @pytest.mark.parametrize("nums,value", [(["x", "y"], "x^2 + y^2"), (["z"], "z^2"), (["1"], "1")])
    def test_whitney_candidates_rejected(self, nums, value):
        b = frac_cone(WHITNEY, "1", nums, value)
        v = verify_central_radical(WHITNEY, [WHITNEY.var("x"), WHITNEY.var("y")], WHITNEY.var("z"), 1, b)
        assert v.status is RadicalStatus.REJECTED

    def test_trivial_membership(self):
        v = verify_central_radical(CUBIC, [CUBIC.var("x")], CUBIC.poly("x^2"), 0, zero_cone((), 2))
        assert v.status is RadicalStatus.TRIVIAL_MEMBERSHIP

    def test_invalid_b(self):
        b = frac_cone(CARTAN, "1", ["z"], "-z^2")
        v = verify_central_radical(CARTAN, [CARTAN.var("x"), CARTAN.var("y")], CARTAN.var("z"), 1, b)
        assert v.status is RadicalStatus.REJECTED and v.reason is Reason.IDENTITY_FAILS

    def test_fraction_without_value(self):
        b = frac_cone(CARTAN, "x^2 + y^2", GRAM_NUMS)
        v = verify_central_radical(CARTAN, [CARTAN.var("x"), CARTAN.var("y")], CARTAN.var("z"), 1, b)
        assert v.reason is Reason.MISSING_VALUE


class TestContinuous:
    def test_cartan(self):
        Q = frac_cone(CARTAN, "1", ["x", "y"])
        P = frac_cone(CARTAN, "1", GRAM_NUMS)
        v = verify_c0_identity(CARTAN, CARTAN.poly("x^2 + y^2 - z^2"), P, Q)
        assert v
        (claim,) = v.obligations
        assert claim.q == CARTAN.poly("x^2 + y^2")

    def test_trivial(self):
        assert verify_c0_identity(LINE, LINE.poly("x^2"), square(LINE.var("x")), square(LINE.const(1)))

    @pytest.mark.parametrize("q,p", [(["1"], ["y"]), (["x"], ["y"]), (["1"], ["x"])])
    def test_whitney_candidates_fail_identity(self, q, p):
        v = verify_c0_identity(WHITNEY, WHITNEY.var("z"), frac_cone(WHITNEY, "1", p), frac_cone(WHITNEY, "1", q))
        assert not v

    def test_fraction_rejected(self):
        v = verify_c0_identity(WHITNEY, WHITNEY.var("z"), frac_cone(WHITNEY, "x", ["y"]), square(WHITNEY.const(1)))
        assert v.reason is Reason.NON_POLYNOMIAL_WITNESS


def test_dispatch_and_h17_helper():
    cert = h17_from_cone_witness(WHITNEY, WHITNEY.var("z"), frac_cone(WHITNEY, "x", ["y"]))
    assert cert.kind is Kind.H17 and cert.m == 1
    assert verify(WHITNEY, cert)
    bad = PositivityCertificate(Kind.H17, f=WHITNEY.var("z"), generators=(WHITNEY.var("x"),), m=1, p=cert.p, q=cert.q)
    assert verify(WHITNEY, bad).reason is Reason.GENERATOR_MISMATCH
