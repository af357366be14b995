"""Bundled example varieties with their certificates and expected outcomes.

Ring descriptions and certificate documents live under ``data/v1``; the
rational parameterizations are code and are attached here by entry name.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .certificates import Kind, PositivityCertificate, RadicalVerdict, verify
from .cones import Reason
from .formats import certificate_from_json
from .geometry import (
    Claim,
    VarietySpec,
    check_sign_on_central_samples,
    check_zeroset_containment,
    is_epsilon_central,
)
from .polyring import Poly, QuotientRing, parse_ring

DATA_VERSION = "v1"
NAMES = ("cubic", "whitney", "cartan", "contre-ex")


def _cubic(p):
    (t,) = p
    return (t * t + 1, t * (t * t + 1))


def _whitney(p):
    x, t = p
    return (x, t * x, t * t)


def _cartan(p):
    x, y = p
    r = x * x + y * y
    if r == 0:
        return None
    return (x, y, x**3 / r)


def _contre_ex(p):
    x, y, z, s = p
    if y == 0:
        return None
    return (x, y, z, s, -(z * z + s * x * x) / (y * y))


def _vertical_axis(p):
    (t,) = p
    return (Fraction(0), Fraction(0), t)


def _parameter_plane(p):
    a, b = p
    zero = Fraction(0)
    return (zero, zero, zero, a, b)


_SAMPLERS = {
    "cubic": (_cubic, 1, ()),
    "whitney": (_whitney, 2, ((_vertical_axis, 1),)),
    "cartan": (_cartan, 2, ((_vertical_axis, 1),)),
    "contre-ex": (_contre_ex, 4, ((_parameter_plane, 2),)),
}

# real points off the central locus, listed first in whole-variety checks
_STRAY_POINTS = {
    "cubic": ((0, 0),),
    "whitney": ((0, 0, -1),),
    "cartan": ((0, 0, 2), (0, 0, 1)),
    "contre-ex": ((0, 0, 0, 1, 1),),
}

# central points the samplers only approach
_BOUNDARY_POINTS = {
    "whitney": ((0, 0, 0), (0, 0, 1)),
    "cartan": ((0, 0, 0),),
}


@dataclass(frozen=True)
class BundledCertificate:
    name: str
    ring: QuotientRing
    certificate: PositivityCertificate
    expected: bool
    reason: str | None
    anchor: str
    document: dict


@dataclass(frozen=True, eq=False)
class CorpusEntry:
    name: str
    variety: VarietySpec
    certificates: tuple[BundledCertificate, ...]
    central_points: tuple[tuple[Fraction, ...], ...]
    noncentral_points: tuple[tuple[Fraction, ...], ...]
    dimension: int
    notes: str

    @property
    def ring(self) -> QuotientRing:
        return self.variety.ring

    def certificate(self, name: str) -> BundledCertificate:
        for c in self.certificates:
            if c.name == name:
                return c
        raise KeyError(f"{self.name} has no certificate {name!r}")


class UnknownEntry(KeyError):
    pass


def _data_dir(name: str):
    return resources.files("centralpss").joinpath("data", DATA_VERSION, name)


def ring_text(name: str) -> str:
    if name not in NAMES:
        raise UnknownEntry(name)
    return _data_dir(name).joinpath("ring.txt").read_text(encoding="utf-8")


def _points(rows) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(c) for c in row) for row in rows)


@lru_cache(maxsize=None)
def corpus_get(name: str) -> CorpusEntry:
    """Load a bundled entry: cubic, whitney, cartan or contre-ex."""
    if name not in NAMES:
        raise UnknownEntry(f"unknown corpus entry {name!r}; choose from {', '.join(NAMES)}")
    base = _data_dir(name)
    ring = parse_ring(base.joinpath("ring.txt").read_text(encoding="utf-8"))
    manifest = json.loads(base.joinpath("manifest.json").read_text(encoding="utf-8"))
    sampler, dim, strays = _SAMPLERS[name]
    variety = VarietySpec(
        ring,
        manifest["dimension"],
        sampler,
        dim,
        central_points=_points(_BOUNDARY_POINTS.get(name, ())),
        stray_samplers=strays,
        stray_points=_points(_STRAY_POINTS.get(name, ())),
        notes=manifest["notes"],
    )
    certs = []
    for item in manifest["certificates"]:
        doc = json.loads(base.joinpath(item["file"]).read_text(encoding="utf-8"))
        cring, cert, _ = certificate_from_json(doc, ring)
        certs.append(BundledCertificate(item["file"].removesuffix(".json"), cring, cert, item["expected"], item["reason"], item["anchor"], doc))
    return CorpusEntry(
        name,
        variety,
        tuple(certs),
        _points(manifest["central_points"]),
        _points(manifest["noncentral_points"]),
        manifest["dimension"],
        manifest["notes"],
    )


@dataclass(frozen=True)
class Outcome:
    """Combined result of the algebraic check and any sampled side condition."""

    ok: bool
    reason: str | None
    detail: str
    identity: str
    not_central: bool = False


def evaluate_certificate(bundled: BundledCertificate, variety: VarietySpec | None = None, n: int = 2000, seed: int = 0) -> Outcome:
    """Run the verifier; for the continuous kind also sample the zero-set containment."""
    verdict = verify(bundled.ring, bundled.certificate)
    if isinstance(verdict, RadicalVerdict):
        reason = verdict.reason.value if verdict.reason else None
        return Outcome(bool(verdict), reason, verdict.detail, verdict.identity, verdict.not_central)
    reason = verdict.reason.value if verdict.reason else None
    if verdict and bundled.certificate.kind is Kind.CONTINUOUS_H17 and variety is not None:
        claim = verdict.obligations[0]
        report = check_zeroset_containment(variety, claim.q, claim.f, n, seed)
        if not report.ok:
            point = ", ".join(str(c) for c in report.first_counterexample)
            return Outcome(False, Reason.CONTAINMENT_FAILS.value, f"q vanishes at central point ({point}) where f does not", verdict.identity)
    return Outcome(bool(verdict), reason, verdict.detail, verdict.identity)


def sign_claim(bundled: BundledCertificate) -> tuple[Poly, tuple[Poly, ...], Claim, tuple[Poly, ...]] | None:
    """The pointwise sign statement a verified certificate implies.

    Returns (f, generators, claim, denominators) or None when the kind makes
    no sign statement.
    """
    cert = bundled.certificate
    ring = bundled.ring
    dens = tuple(t.witness.den for c in (cert.p, cert.q) if c is not None for t in c.terms)
    kind = cert.kind
    if kind in (Kind.CONE, Kind.NONNEG, Kind.H17, Kind.CONTINUOUS_H17):
        return cert.f, cert.generators, Claim.NONNEG, dens
    if kind is Kind.POS:
        return cert.f, cert.generators, Claim.POS, dens
    if kind is Kind.ZERO:
        return cert.f, cert.generators, Claim.ZERO, dens
    if kind is Kind.IMPROPER_CONE:
        # no point with all generators >= 0 survives, so the claim holds vacuously
        return ring.const(-1), cert.generators, Claim.NONNEG, dens
    if kind is Kind.FORMAL:
        b = ring.const(1)
        for g, e in zip(cert.monoid, cert.b_exponents):
            b = b * g**e
        return b, cert.generators, Claim.ZERO, ()
    return None


@dataclass
class SelftestLine:
    entry: str
    item: str
    ok: bool
    detail: str


@dataclass
class SelftestReport:
    lines: list[SelftestLine] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(line.ok for line in self.lines)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "passed": sum(line.ok for line in self.lines),
            "failed": sum(not line.ok for line in self.lines),
            "lines": [{"entry": l.entry, "item": l.item, "ok": l.ok, "detail": l.detail} for l in self.lines],
        }

    def to_text(self) -> str:
        out = [f"{'PASS' if l.ok else 'FAIL'}  {l.entry}/{l.item}: {l.detail}" for l in self.lines]
        out.append(f"{sum(l.ok for l in self.lines)} passed, {sum(not l.ok for l in self.lines)} failed")
        return "\n".join(out) + "\n"


def corpus_selftest(name: str = "all", n: int = 10_000, seed: int = 0) -> SelftestReport:
    """Re-run every bundled certificate and every declared point of one entry or all."""
    names = NAMES if name == "all" else (name,)
    report = SelftestReport()
    for nm in names:
        entry = corpus_get(nm)
        for b in entry.certificates:
            out = evaluate_certificate(b, entry.variety, min(n, 2000), seed)
            ok = out.ok == b.expected and (b.expected or out.reason == b.reason)
            want = "holds" if b.expected else f"fails with {b.reason}"
            got = "holds" if out.ok else f"fails with {out.reason}"
            if out.not_central:
                got += ", ideal not central"
            report.lines.append(SelftestLine(nm, b.name, ok, f"expected {want}, got {got}"))
        for pts, want in ((entry.central_points, True), (entry.noncentral_points, False)):
            for p in pts:
                v = is_epsilon_central(entry.variety, p, n=n, seed=seed)
                label = "(" + ", ".join(str(c) for c in p) + ")"
                report.lines.append(SelftestLine(nm, label, v.central == want, f"{v.verdict.value} after {v.samples} samples"))
    return report


def soundness_sweep(entry: CorpusEntry, n: int = 10_000, seed: int = 0) -> list[tuple[BundledCertificate, object]]:
    """Sign reports on central samples for every bundled certificate that verifies."""
    out = []
    for b in entry.certificates:
        if not b.expected or b.ring is not entry.ring:
            continue
        claim = sign_claim(b)
        if claim is None:
            continue
        f, gens, kind, dens = claim
        out.append((b, check_sign_on_central_samples(entry.variety, f, gens, kind, n, seed, denominators=dens)))
    return out
