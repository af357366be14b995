"""Command-line entry point: verify, search, classify, sample, corpus.

Exit status: 0 verified or found, 1 refuted, 2 input error, 3 resource
limit, 4 search exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Any

from .certificates import Kind, RadicalStatus, RadicalVerdict, verify
from .corpus import NAMES, BundledCertificate, UnknownEntry, corpus_get, corpus_selftest, evaluate_certificate
from .formats import FormatError, certificate_from_json, certificate_to_json
from .geometry import (
    Claim,
    NotOnVariety,
    UnsupportedPresentation,
    check_sign_on_central_samples,
    is_epsilon_central,
    parse_point,
)
from .polyring import ParseError, PolyError, QuotientRing, ResourceError, parse_ring
from .search import default_pool, search_h17

OK, REFUTED, INPUT_ERROR, RESOURCE, EXHAUSTED = 0, 1, 2, 3, 4

DEFAULTS = {"d": 2, "epsilon": "1/100", "n": 10_000, "seed": 0}


class InputError(Exception):
    pass


def load_ring(spec: str | None, variables: str | None = None) -> QuotientRing:
    """A corpus entry name, ``trivial`` (no relations), or a ring description file."""
    if spec is None:
        raise InputError("--ring is required")
    if spec == "trivial":
        names = [v.strip() for v in (variables or "x,y").split(",") if v.strip()]
        return QuotientRing(names)
    if spec in NAMES:
        return corpus_get(spec).ring
    if not os.path.exists(spec):
        raise InputError(f"no ring file or corpus entry named {spec!r}")
    with open(spec, encoding="utf-8") as fh:
        return parse_ring(fh.read())


def _variety(name: str | None):
    if name is None or name not in NAMES:
        raise InputError(f"sampling needs a corpus variety ({', '.join(NAMES)})")
    return corpus_get(name).variety


def _poly_list(ring: QuotientRing, text: str | None):
    if not text:
        return []
    return [ring.poly(t) for t in text.replace(";", ",").split(",") if t.strip()]


def _emit(args, report: dict, text_lines: list[str]) -> None:
    if args.format == "json":
        out = json.dumps(report, indent=2) + "\n"
    else:
        out = "\n".join(text_lines) + "\n"
    sys.stdout.write(out)


def _fmt_point(p) -> str | None:
    return None if p is None else ",".join(str(c) for c in p)


# -- verify ---------------------------------------------------------------


def cmd_verify(args) -> int:
    if not args.cert:
        raise InputError("--cert is required")
    base = load_ring(args.ring, args.vars) if args.ring else None
    with open(args.cert, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.cert}: invalid JSON ({exc})") from None
    ring, cert, expected = certificate_from_json(data, base)
    variety = None
    if args.ring in NAMES and ring.to_text() == corpus_get(args.ring).ring.to_text():
        variety = corpus_get(args.ring).variety
    outcome = evaluate_certificate(BundledCertificate(os.path.basename(args.cert), ring, cert, bool(expected), None, "", data), variety, min(args.n, 2000), args.seed)
    status = OK if outcome.ok else REFUTED
    report = {
        "command": "verify",
        "certificate": args.cert,
        "kind": cert.kind.value,
        "verified": outcome.ok,
        "reason": outcome.reason,
        "identity": outcome.identity,
        "detail": outcome.detail,
        "not_central": outcome.not_central,
        "status": status,
    }
    if cert.kind is Kind.CONTINUOUS_H17 and variety is None:
        report["containment"] = "not checked: pass --ring with a corpus variety to sample it"
    lines = [
        f"certificate: {args.cert} ({cert.kind.value})",
        f"identity: {outcome.identity}",
        f"result: {'verified' if outcome.ok else 'refuted'}" + (f" ({outcome.reason})" if outcome.reason else ""),
    ]
    if outcome.detail:
        lines.append(f"detail: {outcome.detail}")
    if outcome.not_central:
        lines.append("the sub-ideal is not central")
    _emit(args, report, lines)
    return status


# -- search ---------------------------------------------------------------


def cmd_search(args) -> int:
    ring = load_ring(args.ring, args.vars)
    if not args.f:
        raise InputError("--f is required")
    f = ring.poly(args.f)
    if ring.contains(f):
        raise InputError("f is zero in the quotient ring")
    pool = default_pool(ring, args.d) if args.pool == "auto" else _poly_list(ring, args.pool)
    if not pool:
        raise InputError("empty denominator pool")
    res = search_h17(ring, f, args.d, pool)
    attempts = [
        {"denominator": ring.format(q), "status": r.status.value, "degree": r.degree, "basis_size": r.basis_size, "proven": r.proven, "detail": r.detail}
        for q, r in res.search.attempts
    ]
    report: dict[str, Any] = {"command": "search", "f": ring.format(f), "d": args.d, "pool": [ring.format(q) for q in pool], "status": res.status.value, "attempts": attempts}
    lines = [f"target: {ring.format(f)}", f"degree bound: {args.d}", f"pool: {', '.join(ring.format(q) for q in pool)}"]
    for a in attempts:
        lines.append(f"  q = {a['denominator']}: {a['status']} (degree {a['degree']}, basis {a['basis_size']}) {a['detail']}")
    if res.found:
        doc = certificate_to_json(ring, res.certificate, expected=True)
        report["certificate"] = doc
        lines.append("status: Found (H17 certificate re-verified)")
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, indent=2)
                fh.write("\n")
            lines.append(f"certificate written to {args.out}")
        else:
            lines.append(json.dumps(doc, indent=2))
        _emit(args, report, lines)
        return OK
    lines.append(f"status: {res.status.value}" + (" (proven at every tried degree)" if res.search.proven else ""))
    _emit(args, report, lines)
    return EXHAUSTED


# -- classify -------------------------------------------------------------


def _zero_set_points(v, sub_ideal, n: int, seed: int, limit: int = 12):
    from .geometry import halton, sample_regular_points

    pts = list(v.central_points) + list(v.stray_points)
    for sampler, dim in v.stray_samplers:
        for i in range(1, 65):
            p = sampler(halton(i + seed * 7919, dim, v.box))
            if p is not None:
                pts.append(tuple(p))
    pts += sample_regular_points(v, min(n, 2000), seed)
    seen, out = set(), []
    for p in pts:
        if p in seen or not v.on_variety(p) or any(g.evaluate(p) != 0 for g in sub_ideal):
            continue
        seen.add(p)
        out.append(p)
        if len(out) >= limit:
            break
    return out


def cmd_classify(args) -> int:
    ring = load_ring(args.ring, args.vars)
    if args.cert:
        with open(args.cert, encoding="utf-8") as fh:
            ring, cert, _ = certificate_from_json(json.load(fh), ring)
        if cert.kind is not Kind.CENTRAL_RADICAL:
            raise InputError("classify expects a CentralRadical certificate")
        verdict = verify(ring, cert)
        assert isinstance(verdict, RadicalVerdict)
        if verdict.status is RadicalStatus.TRIVIAL_MEMBERSHIP:
            label, status = "TrivialMembership", OK
        elif verdict.status is RadicalStatus.MEMBERSHIP_CERTIFIED:
            label, status = "NotCentral (certified)", OK
        else:
            label, status = f"Rejected ({verdict.reason.value if verdict.reason else 'unknown'})", REFUTED
        sub = [ring.format(g) for g in cert.sub_ideal]
        report = {"command": "classify", "sub_ideal": sub, "verdict": label, "identity": verdict.identity, "detail": verdict.detail, "status": status}
        _emit(args, report, [f"sub-ideal: ({', '.join(sub)})", f"identity: {verdict.identity}", f"verdict: {label}", f"detail: {verdict.detail}"])
        return status
    sub_ideal = _poly_list(ring, args.generators)
    if not sub_ideal:
        raise InputError("--generators (the sub-ideal) or --cert is required")
    v = _variety(args.ring)
    eps = Fraction(args.epsilon)
    rows = []
    for p in _zero_set_points(v, sub_ideal, args.n, args.seed):
        c = is_epsilon_central(v, p, eps, args.n, args.seed)
        rows.append({"point": _fmt_point(p), "verdict": c.verdict.value})
    central = [r for r in rows if r["verdict"] == "EpsilonCentral"]
    # a single central point cannot be dense in a positive-dimensional zero set
    label = "ConsistentWithCentral" if len(central) >= 3 else "NoCentralEvidence"
    report = {
        "command": "classify",
        "sub_ideal": [ring.format(g) for g in sub_ideal],
        "verdict": label,
        "evidence_only": True,
        "points": rows,
        "epsilon": str(eps),
        "n": args.n,
        "seed": args.seed,
        "status": OK,
    }
    lines = [f"sub-ideal: ({', '.join(ring.format(g) for g in sub_ideal)})", f"epsilon={eps} n={args.n} seed={args.seed}"]
    lines += [f"  ({r['point']}): {r['verdict']}" for r in rows]
    lines.append(f"verdict: {label} (sampled evidence only, not a proof)")
    _emit(args, report, lines)
    return OK


# -- sample ---------------------------------------------------------------


def cmd_sample(args) -> int:
    v = _variety(args.variety or args.ring)
    eps = Fraction(args.epsilon)
    if args.point:
        try:
            point = parse_point(args.point)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        c = is_epsilon_central(v, point, eps, args.n, args.seed)
        report = {
            "command": "sample",
            "point": _fmt_point(c.point),
            "verdict": c.verdict.value,
            "witness": _fmt_point(c.witness),
            "distance": None if c.distance is None else str(c.distance),
            "samples": c.samples,
            "epsilon": str(eps),
            "seed": args.seed,
            "note": c.note,
        }
        lines = [
            f"point: ({report['point']})",
            f"verdict: {c.verdict.value}",
            f"nearest regular sample: ({report['witness']}) at sup distance {report['distance']}",
            f"epsilon={eps} samples={c.samples} seed={args.seed}",
            c.note,
        ]
        _emit(args, report, lines)
        return OK
    if args.f:
        ring = v.ring
        f = ring.poly(args.f)
        rep = check_sign_on_central_samples(v, f, _poly_list(ring, args.generators), Claim(args.claim), args.n, args.seed, region=args.region)
        report = {"command": "sample", "f": ring.format(f), **rep.to_json()}
        lines = [f"{k}: {val}" for k, val in report.items()]
        _emit(args, report, lines)
        return OK if rep.ok else REFUTED
    raise InputError("sample needs --point or --f")


# -- corpus ---------------------------------------------------------------


def cmd_corpus(args) -> int:
    action = args.action
    target = args.name or "all"
    if action == "list":
        report = {"entries": list(NAMES)}
        _emit(args, report, list(NAMES))
        return OK
    if action == "show":
        entry = corpus_get(target)
        report = {
            "name": entry.name,
            "ring": entry.ring.to_text(),
            "dimension": entry.dimension,
            "notes": entry.notes,
            "certificates": [{"name": b.name, "kind": b.certificate.kind.value, "expected": b.expected, "reason": b.reason, "anchor": b.anchor} for b in entry.certificates],
            "central_points": [_fmt_point(p) for p in entry.central_points],
            "noncentral_points": [_fmt_point(p) for p in entry.noncentral_points],
        }
        lines = [entry.ring.to_text().rstrip(), entry.notes]
        lines += [f"  {c['name']}: {c['kind']}, expected {'pass' if c['expected'] else 'fail ' + str(c['reason'])}" for c in report["certificates"]]
        _emit(args, report, lines)
        return OK
    if action == "export":
        entry = corpus_get(target)
        if not args.out:
            raise InputError("export needs --out DIR")
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, f"{entry.name}.ring"), "w", encoding="utf-8") as fh:
            fh.write(entry.ring.to_text())
        for b in entry.certificates:
            with open(os.path.join(args.out, f"{entry.name}-{b.name}.json"), "w", encoding="utf-8") as fh:
                # embed the ring so the exported file verifies on its own
                json.dump({"ring": b.ring.to_text(), **b.document}, fh, indent=2)
                fh.write("\n")
        _emit(args, {"exported": len(entry.certificates), "dir": args.out}, [f"wrote {len(entry.certificates)} certificates to {args.out}"])
        return OK
    report = corpus_selftest(target, args.n, args.seed)
    doc = report.to_json()
    doc.update({"n": args.n, "seed": args.seed})
    if args.format == "json":
        _emit(args, doc, [])
    else:
        sys.stdout.write(report.to_text())
    return OK if report.ok else REFUTED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", help="ring file, corpus entry name, or 'trivial'")
    common.add_argument("--vars", help="variables for the trivial ring (default x,y)")
    common.add_argument("--cert", help="certificate JSON file")
    common.add_argument("--f", help="target polynomial")
    common.add_argument("--generators", help="comma-separated polynomials")
    common.add_argument("--d", type=int, default=DEFAULTS["d"], help="degree bound (default 2)")
    common.add_argument("--pool", default="auto", help="'auto' or comma-separated denominators")
    common.add_argument("--epsilon", default=DEFAULTS["epsilon"], help="centrality radius, a rational (default 1/100)")
    common.add_argument("--n", type=int, default=DEFAULTS["n"], help="sample budget (default 10000)")
    common.add_argument("--seed", type=int, default=DEFAULTS["seed"])
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", help="output file or directory")

    parser = argparse.ArgumentParser(prog="centralpss", description="Exact certificates for sums of squares over quotient rings.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="check a certificate file")
    sub.add_parser("search", parents=[common], help="search for an H17 certificate of --f")
    sub.add_parser("classify", parents=[common], help="centrality of a sub-ideal")
    p = sub.add_parser("sample", parents=[common], help="sampled centrality and sign checks")
    p.add_argument("--variety", help="corpus entry providing the sampler")
    p.add_argument("--point", help="comma-separated rational coordinates")
    p.add_argument("--claim", choices=[c.value for c in Claim], default="NonNeg")
    p.add_argument("--region", choices=("central", "all"), default="central")
    p = sub.add_parser("corpus", parents=[common], help="bundled examples")
    p.add_argument("action", choices=("list", "show", "selftest", "export"))
    p.add_argument("name", nargs="?", help="entry name or 'all'")
    return parser


_COMMANDS = {"verify": cmd_verify, "search": cmd_search, "classify": cmd_classify, "sample": cmd_sample, "corpus": cmd_corpus}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    try:
        return _COMMANDS[args.command](args)
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return RESOURCE
    except (InputError, FormatError, ParseError, PolyError, UnknownEntry, NotOnVariety, UnsupportedPresentation, OSError, ValueError, ZeroDivisionError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
