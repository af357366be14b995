"""JSON encoding of cone certificates and positivity certificates.

Polynomials travel as strings in the ring's variable names; subset indices
are 0-based positions in the ``generators`` list.  A certificate document
may embed its ring description under "ring" (same text format as ring
files) or leave the ring to the caller.
"""

from __future__ import annotations

import json
from typing import Any

from .certificates import Kind, PositivityCertificate
from .cones import ConeCertificate, ConeTerm, SosFractionWitness
from .polyring import ParseError, Poly, QuotientRing, parse_ring


class FormatError(ValueError):
    pass


def _poly(ring: QuotientRing, text: Any, where: str) -> Poly:
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        text = str(text)
    if not isinstance(text, str):
        raise FormatError(f"{where}: expected a polynomial string")
    try:
        return ring.poly(text)
    except ParseError as exc:
        raise FormatError(f"{where}: {exc}") from None


def _polys(ring: QuotientRing, items: Any, where: str) -> tuple[Poly, ...]:
    if not isinstance(items, list):
        raise FormatError(f"{where}: expected a list")
    return tuple(_poly(ring, t, f"{where}[{i}]") for i, t in enumerate(items))


def cone_to_json(ring: QuotientRing, cert: ConeCertificate) -> dict:
    out = {
        "generators": [ring.format(g) for g in cert.generators],
        "terms": [
            {
                "den": ring.format(t.witness.den),
                "nums": [ring.format(g) for g in t.witness.nums],
                "subset": sorted(t.subset),
            }
            for t in cert.terms
        ],
    }
    if cert.value is not None:
        out["value"] = ring.format(cert.value)
    return out


def cone_from_json(ring: QuotientRing, data: Any, generators: tuple[Poly, ...] | None = None, where: str = "cone") -> ConeCertificate:
    if not isinstance(data, dict):
        raise FormatError(f"{where}: expected an object")
    gens = _polys(ring, data["generators"], f"{where}.generators") if "generators" in data else (generators or ())
    terms = []
    for i, t in enumerate(data.get("terms", [])):
        if not isinstance(t, dict) or "nums" not in t:
            raise FormatError(f"{where}.terms[{i}]: expected an object with nums")
        den = _poly(ring, t.get("den", "1"), f"{where}.terms[{i}].den")
        nums = _polys(ring, t["nums"], f"{where}.terms[{i}].nums")
        subset = t.get("subset", [])
        if not isinstance(subset, list) or not all(isinstance(j, int) and not isinstance(j, bool) for j in subset):
            raise FormatError(f"{where}.terms[{i}].subset: expected a list of integers")
        terms.append(ConeTerm(SosFractionWitness(den, nums), frozenset(subset)))
    value = _poly(ring, data["value"], f"{where}.value") if data.get("value") is not None else None
    return ConeCertificate(gens, tuple(terms), value)


def certificate_to_json(ring: QuotientRing, cert: PositivityCertificate, expected: bool | None = None, embed_ring: bool = True) -> dict:
    out: dict[str, Any] = {"kind": cert.kind.value}
    if embed_ring:
        out["ring"] = ring.to_text()
    if cert.f is not None:
        out["f"] = ring.format(cert.f)
    out["generators"] = [ring.format(g) for g in cert.generators]
    out["m"] = cert.m
    if cert.p is not None:
        out["p"] = cone_to_json(ring, cert.p)
    if cert.q is not None:
        out["q"] = cone_to_json(ring, cert.q)
    if cert.kind is Kind.FORMAL:
        out["monoid"] = [ring.format(g) for g in cert.monoid]
        out["b_exponents"] = list(cert.b_exponents)
        out["zero_gens"] = [ring.format(g) for g in cert.zero_gens]
        out["c_coeffs"] = [[ring.format(c), k] for c, k in cert.c_coeffs]
    if cert.kind is Kind.CENTRAL_RADICAL:
        out["sub_ideal"] = [ring.format(g) for g in cert.sub_ideal]
    if expected is not None:
        out["verdict-expected"] = expected
    return out


def certificate_from_json(data: Any, ring: QuotientRing | None = None) -> tuple[QuotientRing, PositivityCertificate, bool | None]:
    """Decode a certificate document; the embedded ring wins over ``ring`` when both exist."""
    if not isinstance(data, dict):
        raise FormatError("certificate: expected an object")
    try:
        kind = Kind(data.get("kind"))
    except ValueError:
        raise FormatError(f"unknown certificate kind {data.get('kind')!r}") from None
    if "ring" in data:
        if not isinstance(data["ring"], str):
            raise FormatError("ring: expected the ring description text")
        try:
            ring = parse_ring(data["ring"])
        except ParseError as exc:
            raise FormatError(f"ring: {exc}") from None
    if ring is None:
        raise FormatError("no ring given")
    m = data.get("m", 0)
    if not isinstance(m, int) or isinstance(m, bool) or m < 0:
        raise FormatError("m: expected a nonnegative integer")
    gens = _polys(ring, data.get("generators", []), "generators")
    f = _poly(ring, data["f"], "f") if "f" in data else None
    p = cone_from_json(ring, data["p"], gens, "p") if "p" in data else None
    q = cone_from_json(ring, data["q"], gens, "q") if "q" in data else None
    extra: dict[str, Any] = {}
    if kind is Kind.FORMAL:
        extra["monoid"] = _polys(ring, data.get("monoid", []), "monoid")
        exps = data.get("b_exponents", [])
        if not isinstance(exps, list) or not all(isinstance(e, int) for e in exps):
            raise FormatError("b_exponents: expected a list of integers")
        extra["b_exponents"] = tuple(exps)
        extra["zero_gens"] = _polys(ring, data.get("zero_gens", []), "zero_gens")
        coeffs = []
        for i, pair in enumerate(data.get("c_coeffs", [])):
            if not (isinstance(pair, list) and len(pair) == 2 and isinstance(pair[1], int)):
                raise FormatError(f"c_coeffs[{i}]: expected [poly, index]")
            coeffs.append((_poly(ring, pair[0], f"c_coeffs[{i}]"), pair[1]))
        extra["c_coeffs"] = tuple(coeffs)
    if kind is Kind.CENTRAL_RADICAL:
        extra["sub_ideal"] = _polys(ring, data.get("sub_ideal", []), "sub_ideal")
    needs_f = kind not in (Kind.FORMAL, Kind.IMPROPER_CONE)
    if needs_f and f is None:
        raise FormatError(f"{kind.value} certificates need f")
    needs_q = kind in (Kind.NONNEG, Kind.H17, Kind.POS, Kind.CONTINUOUS_H17)
    if p is None or (needs_q and q is None):
        raise FormatError(f"{kind.value} certificates need " + ("p and q" if needs_q else "p"))
    expected = data.get("verdict-expected")
    if expected is not None and not isinstance(expected, bool):
        raise FormatError("verdict-expected: expected a boolean")
    cert = PositivityCertificate(kind, f=f, generators=gens, m=m, p=p, q=q, **extra)
    return ring, cert, expected


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def load_certificate(path: str, ring: QuotientRing | None = None):
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON ({exc})") from None
    return certificate_from_json(data, ring)
