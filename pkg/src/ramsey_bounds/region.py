"""Membership certificates for the region of admissible (x, y) pairs.

A pair (x, y) is admissible when R(k, l) <= x^-k y^-l for all large k + l.
Four rules generate admissible pairs:

* ``BaseES``          (x, 1 - x) for 0 < x < 1 (Erdős–Szekeres);
* ``Dominated``       anything below an admissible pair in both coordinates;
* ``LemmaY``          (x, e^a (1 - x)) for x <= 1/2 and (x, 1 - x e^-a) for
                      x <= 1, given an exponent bound with slack a;
* ``AsymptoticBound`` the exponent bound itself, which only a completed
                      verification stage may supply.

Certificates are immutable trees that can be replayed from their axioms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import mpmath

from .bounds import ALPHA_ZERO, Alpha
from .exact import DEFAULT_PREC, DomainError, format_decimal, parse_decimal, to_fraction
from .interval import IntervalValue

RULES = ("BaseES", "Dominated", "LemmaY", "AsymptoticBound")


@dataclass(frozen=True)
class ProvenAlpha:
    """An alpha whose exponent bound has been established.

    ``provenance`` is the index of the verification stage that proved it;
    ``None`` marks the unconditional alpha = 0 case.
    """

    alpha: Alpha
    provenance: int | None = None

    def __post_init__(self):
        if not self.alpha.is_zero() and self.provenance is None:
            raise DomainError("a positive alpha needs the verification stage that proved it")


ES_ALPHA = ProvenAlpha(ALPHA_ZERO, None)


@dataclass(frozen=True)
class MembershipCertificate:
    rule: str
    params: dict = field(default_factory=dict)
    children: tuple[MembershipCertificate, ...] = ()
    precision: int = DEFAULT_PREC

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}")

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, IntervalValue):
                return v.to_json()
            if isinstance(v, Fraction):
                return format_decimal(v, self.precision) if v.denominator != 1 else str(v)
            if isinstance(v, Alpha):
                return str(v)
            return v

        return {
            "rule": self.rule,
            "params": {k: enc(v) for k, v in sorted(self.params.items())},
            "children": [c.to_json() for c in self.children],
        }


@dataclass(frozen=True)
class RPoint:
    """An admissible pair. ``y`` is an enclosure; (x, y.lo) is admissible."""

    x: Fraction
    y: IntervalValue
    certificate: MembershipCertificate


@dataclass(frozen=True)
class Refusal:
    """Membership could not be certified; ``gap`` is y minus the frontier."""

    x: Fraction
    y: Fraction
    frontier: IntervalValue
    gap: mpmath.mpf


def _asymptotic(proven: ProvenAlpha, prec) -> MembershipCertificate:
    return MembershipCertificate(
        "AsymptoticBound",
        {"alpha": proven.alpha, "stage": proven.provenance},
        precision=prec,
    )


def base_point(x, prec: int = DEFAULT_PREC) -> RPoint:
    xq = to_fraction(x)
    if not 0 < xq < 1:
        raise DomainError(f"x must lie in (0, 1), got {x}")
    y = 1 - xq
    cert = MembershipCertificate("BaseES", {"x": xq, "y": y}, precision=prec)
    return RPoint(xq, IntervalValue(y, prec=prec), cert)


def frontier_y(alpha: Alpha, x, prec: int = DEFAULT_PREC) -> tuple[IntervalValue, int]:
    """Enclosure of the largest y the lemma grants at ``x``, and the branch used."""
    xq = to_fraction(x)
    if not 0 < xq <= 1:
        raise DomainError(f"x must lie in (0, 1], got {x}")
    if alpha.is_zero():
        return IntervalValue(1 - xq, prec=prec), (1 if xq <= Fraction(1, 2) else 2)
    a = alpha.interval(prec)
    xi = IntervalValue(xq, prec=prec)
    if xq <= Fraction(1, 2):
        y = a.exp() * (1 - xi)
        if y.ge(1):
            return IntervalValue(1, prec=prec), 1
        if not y.lt(1):
            # straddles the clamp
            return IntervalValue(min(y.lo, 1), 1, prec=prec), 1
        return y, 1
    return 1 - xi * (-a).exp(), 2


def lemma_y_point(alpha: ProvenAlpha, x, prec: int = DEFAULT_PREC) -> RPoint:
    """(x, e^a (1-x)) for x <= 1/2 (clamped at 1), else (x, 1 - x e^-a)."""
    if alpha.alpha.is_zero():
        xq = to_fraction(x)
        if xq == 1:
            raise DomainError("x = 1 leaves no admissible y > 0 when alpha = 0")
        return base_point(xq, prec)
    xq = to_fraction(x)
    y, branch = frontier_y(alpha.alpha, xq, prec)
    cert = MembershipCertificate(
        "LemmaY",
        {"alpha": alpha.alpha, "branch": branch, "x": xq, "y": y},
        (_asymptotic(alpha, prec),),
        precision=prec,
    )
    return RPoint(xq, y, cert)


def strongest(proven: Iterable[ProvenAlpha], prec: int = DEFAULT_PREC) -> ProvenAlpha:
    best = ES_ALPHA
    for p in proven:
        if p.alpha.compare(best.alpha, prec) > 0:
            best = p
    return best


def certify_membership(x, y, proven: Iterable[ProvenAlpha], prec: int = DEFAULT_PREC):
    """Certificate that (x, y) is admissible, or a :class:`Refusal` with the gap."""
    xq, yq = to_fraction(x), to_fraction(y)
    if not 0 < xq < 1 or not 0 < yq <= 1:
        raise DomainError(f"need x in (0,1) and y in (0,1], got ({x}, {y})")
    best = strongest(proven, prec)
    parent = lemma_y_point(best, xq, prec)
    exact = parent.certificate.params.get("y")
    if isinstance(exact, Fraction):
        inside = yq <= exact
    else:
        inside = IntervalValue(yq, prec=prec).hi <= parent.y.lo
    if inside:
        return MembershipCertificate(
            "Dominated", {"x": xq, "y": yq}, (parent.certificate,), precision=prec
        )
    with mpmath.workprec(prec):
        gap = mpmath.mpf(yq.numerator) / yq.denominator - parent.y.mid
    return Refusal(xq, yq, parent.y, gap)


def rule_certificate(stage_alpha: Alpha, proven: Iterable[ProvenAlpha], prec: int = DEFAULT_PREC):
    """Certificate that (X(lam), Y(lam)) is admissible for every lam.

    Y is built from the lemma frontier at ``stage_alpha``, so membership holds
    as soon as some proven alpha dominates it.  Returns a Refusal-like ``None``
    when no proven alpha is large enough.
    """
    best = strongest(proven, prec)
    if stage_alpha.compare(best.alpha, prec) > 0:
        return None
    if stage_alpha.is_zero():
        return MembershipCertificate("BaseES", {"x": "X(lambda)", "y": "1 - X(lambda)"}, precision=prec)
    lemma = MembershipCertificate(
        "LemmaY",
        {"alpha": best.alpha, "branch": "X(lambda) <= 1/2 ? 1 : 2", "x": "X(lambda)"},
        (_asymptotic(best, prec),),
        precision=prec,
    )
    if stage_alpha == best.alpha:
        return lemma
    return MembershipCertificate(
        "Dominated", {"x": "X(lambda)", "y": f"Y built with alpha={stage_alpha}"}, (lemma,), precision=prec
    )


def replay(cert: MembershipCertificate, proven: Iterable[ProvenAlpha] | None = None) -> bool:
    """Re-derive a certificate from its axioms; True iff every step checks."""
    proven = list(proven) if proven is not None else None
    prec = cert.precision
    p = cert.params
    if cert.rule == "AsymptoticBound":
        alpha = p["alpha"]
        if alpha.is_zero():
            return True
        if p.get("stage") is None:
            return False
        if proven is None:
            return True
        return any(q.alpha == alpha and q.provenance == p["stage"] for q in proven)
    if cert.rule == "BaseES":
        if isinstance(p.get("x"), str):
            return not cert.children
        return p["y"] == 1 - p["x"] and 0 < p["x"] < 1
    if cert.rule == "LemmaY":
        if len(cert.children) != 1 or cert.children[0].rule != "AsymptoticBound":
            return False
        if cert.children[0].params["alpha"] != p["alpha"]:
            return False
        if not replay(cert.children[0], proven):
            return False
        if isinstance(p.get("x"), str):
            return True
        y, branch = frontier_y(p["alpha"], p["x"], prec)
        return branch == p["branch"] and y.lo == p["y"].lo and y.hi == p["y"].hi
    if cert.rule == "Dominated":
        if len(cert.children) != 1 or not replay(cert.children[0], proven):
            return False
        child = cert.children[0]
        cx, cy = child.params.get("x"), child.params.get("y")
        if isinstance(p.get("x"), str) or isinstance(cx, str):
            return True
        child_y = cy.lo if isinstance(cy, IntervalValue) else cy
        return 0 < p["x"] <= cx and 0 < p["y"] and (
            p["y"] <= child_y if isinstance(child_y, Fraction) else IntervalValue(p["y"], prec=prec).hi <= child_y
        )
    return False


def certificate_from_json(data: dict, precision: int = DEFAULT_PREC) -> MembershipCertificate:
    """Inverse of :meth:`MembershipCertificate.to_json`."""

    def dec(key, v):
        if key == "alpha":
            return Alpha.parse(v)
        if key in ("stage", "branch"):
            return v
        if isinstance(v, list):
            return IntervalValue(parse_decimal(v[0]), parse_decimal(v[1]), prec=precision)
        if isinstance(v, str) and "@" in v:
            # decimal strings of rationals: recover the exact value through mpf
            return Fraction(v.split("@")[0]).limit_denominator(10**30)
        if isinstance(v, str):
            try:
                return Fraction(v)
            except ValueError:
                return v
        return v

    return MembershipCertificate(
        data["rule"],
        {k: dec(k, v) for k, v in data["params"].items()},
        tuple(certificate_from_json(c, precision) for c in data["children"]),
        precision=precision,
    )
