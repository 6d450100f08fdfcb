import json
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ramsey_bounds.bounds import Alpha
from ramsey_bounds.exact import DomainError, to_mpf
from ramsey_bounds.region import (
    ES_ALPHA,
    MembershipCertificate,
    ProvenAlpha,
    Refusal,
    base_point,
    certificate_from_json,
    certify_membership,
    frontier_y,
    lemma_y_point,
    replay,
    rule_certificate,
)

A1 = ProvenAlpha(Alpha.parse("0.09/e"), 0)
A3 = ProvenAlpha(Alpha.parse("0.137/e"), 2)
unit = st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(999, 1000), max_denominator=1000)


def test_base_point():
    pt = base_point(Fraction(1, 2))
    assert pt.x == Fraction(1, 2) and pt.y.lo == pt.y.hi == mpmath.mpf(0.5)
    assert base_point(Fraction(1, 4)).certificate.params["y"] == Fraction(3, 4)
    assert pt.certificate.rule == "BaseES" and replay(pt.certificate)
    for bad in (0, 1, Fraction(-1, 3)):
        with pytest.raises(DomainError):
            base_point(bad)


def test_proven_alpha_requires_provenance():
    with pytest.raises(DomainError):
        ProvenAlpha(Alpha.parse("0.09/e"))
    assert ES_ALPHA.provenance is None


@given(unit)
def test_lemma_y_with_zero_alpha_is_base(x):
    pt = lemma_y_point(ES_ALPHA, x)
    assert pt.certificate.rule == "BaseES" and pt.certificate.params["y"] == 1 - x


def test_lemma_y_value():
    pt = lemma_y_point(A1, Fraction(3, 10))
    with mpmath.workdps(40):
        expect = mpmath.exp(mpmath.mpf("0.09") / mpmath.e) * mpmath.mpf("0.7")
        assert pt.y.lo <= expect <= pt.y.hi
    assert abs(float(pt.y.mid) - 0.72356) < 1e-5
    assert pt.certificate.rule == "LemmaY" and replay(pt.certificate, [ES_ALPHA, A1])


def test_branches_meet_at_crossover():
    with mpmath.workdps(40):
        a = mpmath.mpf("0.09") / mpmath.e
        x = mpmath.exp(a) / (1 + mpmath.exp(a))
        b1 = mpmath.exp(a) * (1 - x)
        b2 = 1 - x * mpmath.exp(-a)
        assert abs(b1 - x) < 1e-12 and abs(b2 - x) < 1e-12


@given(unit)
def test_first_branch_weakly_larger_below_half(x):
    if x >= Fraction(1, 2):
        return
    for pa in (A1, A3):
        a = pa.alpha.interval()
        first = (a.exp() * (1 - x))
        second = 1 - (-a).exp() * x
        assert first.lo >= second.hi or first.hi >= second.lo


@given(unit, unit)
def test_frontier_strictly_decreasing_in_x(x1, x2):
    if x1 == x2:
        return
    x1, x2 = min(x1, x2), max(x1, x2)
    for pa in (ES_ALPHA, A1, A3):
        y1, _ = frontier_y(pa.alpha, x1)
        y2, _ = frontier_y(pa.alpha, x2)
        if y1.lo == y1.hi == 1 and y2.lo == y2.hi == 1:
            continue  # both clamped at 1
        assert y1.lo > y2.hi or (y1.hi == 1 and y2.hi <= 1)


@given(unit)
def test_frontier_monotone_in_alpha(x):
    ys = [frontier_y(pa.alpha, x)[0] for pa in (ES_ALPHA, A1, A3)]
    assert ys[0].hi <= ys[1].hi <= ys[2].hi
    assert ys[0].lo <= ys[1].lo <= ys[2].lo


def test_certify_membership_examples():
    cert = certify_membership(Fraction(3, 10), Fraction(7, 10), [ES_ALPHA])
    assert isinstance(cert, MembershipCertificate) and cert.rule == "Dominated"
    assert replay(cert, [ES_ALPHA])
    refused = certify_membership(Fraction(3, 10), Fraction(72, 100), [ES_ALPHA])
    assert isinstance(refused, Refusal)
    assert abs(float(refused.gap) - 0.02) < 1e-15
    ok = certify_membership(Fraction(3, 10), Fraction(72, 100), [ES_ALPHA, A1])
    assert isinstance(ok, MembershipCertificate) and replay(ok, [ES_ALPHA, A1])


@given(unit, unit)
def test_certificates_replay(x, y):
    proven = [ES_ALPHA, A1, A3]
    res = certify_membership(x, y, proven)
    if isinstance(res, Refusal):
        assert to_mpf(y, 256) > res.frontier.lo
    else:
        assert replay(res, proven)
        assert replay(certificate_from_json(json.loads(json.dumps(res.to_json()))), proven)


def test_replay_rejects_unproven_alpha():
    cert = lemma_y_point(A3, Fraction(1, 3)).certificate
    assert replay(cert, [ES_ALPHA, A3])
    assert not replay(cert, [ES_ALPHA, A1])


def test_replay_rejects_tampered_domination():
    cert = certify_membership(Fraction(3, 10), Fraction(7, 10), [ES_ALPHA])
    forged = MembershipCertificate("Dominated", {"x": Fraction(3, 10), "y": Fraction(71, 100)}, cert.children)
    assert not replay(forged, [ES_ALPHA])


def test_rule_certificate():
    assert rule_certificate(Alpha.parse("0.09/e"), [ES_ALPHA]) is None
    assert rule_certificate(Alpha(0), [ES_ALPHA]).rule == "BaseES"
    c = rule_certificate(Alpha.parse("0.09/e"), [ES_ALPHA, A1])
    assert c.rule == "LemmaY" and replay(c, [ES_ALPHA, A1])
    d = rule_certificate(Alpha.parse("0.09/e"), [ES_ALPHA, A1, A3])
    assert d.rule == "Dominated" and replay(d, [ES_ALPHA, A1, A3])


def test_membership_domain():
    with pytest.raises(DomainError):
        certify_membership(Fraction(3, 10), Fraction(11, 10), [ES_ALPHA])
