"""Sampled real geometry of hypersurfaces: singular loci, regular points, centrality.

Everything is exact over Q.  Regular points come from rational
parameterizations evaluated on a Halton sequence, distances use the sup norm,
and every verdict records the sample budget it was computed with.  A negative
centrality answer only means no nearby regular sample was found.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .polyring import Poly, QuotientRing

Point = tuple[Fraction, ...]
Sampler = Callable[[Sequence[Fraction]], Point | None]

DEFAULT_EPSILON = Fraction(1, 100)
DEFAULT_SAMPLES = 10_000
DEFAULT_BOX = Fraction(2)

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)


class UnsupportedPresentation(ValueError):
    pass


class NotOnVariety(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class VarietySpec:
    """A hypersurface with a rational parameterization of (most of) its regular part.

    ``sampler`` maps a point of the box [-box, box]^param_dim to a point of V
    or returns None where it is undefined.  ``central_points`` are declared
    central points that the sampler only approaches (boundary of the regular
    part); they take part in containment checks.  ``stray_samplers`` cover real
    points outside the central locus and are used only when a check is asked
    to range over all of V(R).
    """

    ring: QuotientRing
    dimension: int
    sampler: Sampler
    param_dim: int
    box: Fraction = DEFAULT_BOX
    central_points: tuple[Point, ...] = ()
    stray_samplers: tuple[tuple[Sampler, int], ...] = ()
    stray_points: tuple[Point, ...] = ()
    notes: str = ""

    def on_variety(self, point: Sequence[Fraction]) -> bool:
        return all(g.evaluate(point) == 0 for g in self.ring.ideal_generators)


def singular_ideal(ring: QuotientRing) -> list[Poly]:
    """[g, dg/dx_1, ..., dg/dx_n] for a hypersurface ring Q[x]/(g)."""
    gens = ring.ideal_generators
    if len(gens) != 1:
        raise UnsupportedPresentation(f"expected one ideal generator, got {len(gens)}")
    g = gens[0]
    return [g] + [g.diff(i) for i in range(ring.nvars)]


def is_regular(ring: QuotientRing, point: Sequence[Fraction], singular: Sequence[Poly] | None = None) -> bool:
    singular = singular_ideal(ring) if singular is None else singular
    return any(d.evaluate(point) != 0 for d in singular[1:])


def _radical_inverse(index: int, base: int) -> Fraction:
    num, den = 0, 1
    while index:
        index, digit = divmod(index, base)
        den *= base
        num = num * base + digit
    return Fraction(num, den) if den > 1 else Fraction(0)


def halton(index: int, dim: int, box: Fraction) -> tuple[Fraction, ...]:
    """Point ``index`` (1-based) of the Halton sequence, scaled to [-box, box]^dim."""
    return tuple((2 * _radical_inverse(index, _PRIMES[k]) - 1) * box for k in range(dim))


@dataclass
class SampleBatch:
    points: list[Point]
    skipped: int


def _sample(v: VarietySpec, sampler: Sampler, param_dim: int, n: int, seed: int, box: Fraction) -> SampleBatch:
    singular = singular_ideal(v.ring)
    points: list[Point] = []
    skipped = 0
    index = 1 + seed * 7919
    # bounded retries: skipped parameters are replaced by later Halton indices
    limit = 4 * n + 100
    while len(points) < n and limit:
        limit -= 1
        params = halton(index, param_dim, box)
        index += 1
        p = sampler(params)
        if p is None or not is_regular(v.ring, p, singular):
            skipped += 1
            continue
        if not v.on_variety(p):
            raise AssertionError(f"sampler left the variety at parameters {params}")
        points.append(tuple(p))
    return SampleBatch(points, skipped)


_cache: dict = {}


def sample_regular_points(v: VarietySpec, n: int, seed: int = 0, box: Fraction | None = None) -> list[Point]:
    """n regular points of V from the parameterization, deterministic in (seed, box)."""
    if n < 1:
        raise ValueError("n must be positive")
    box = v.box if box is None else Fraction(box)
    key = (id(v), n, seed, box)
    hit = _cache.get(key)
    if hit is None or hit[0] is not v:
        hit = (v, _sample(v, v.sampler, v.param_dim, n, seed, box))
        _cache[key] = hit
    return hit[1].points


def sample_batch(v: VarietySpec, n: int, seed: int = 0, box: Fraction | None = None) -> SampleBatch:
    sample_regular_points(v, n, seed, box)
    box = v.box if box is None else Fraction(box)
    return _cache[(id(v), n, seed, box)][1]


def sup_distance(p: Sequence[Fraction], q: Sequence[Fraction]) -> Fraction:
    return max(abs(a - b) for a, b in zip(p, q))


class Centrality(str, enum.Enum):
    EPSILON_CENTRAL = "EpsilonCentral"
    NOT_EPSILON_CENTRAL = "NotEpsilonCentral"


@dataclass(frozen=True)
class CentralityVerdict:
    point: Point
    epsilon: Fraction
    verdict: Centrality
    witness: Point | None
    distance: Fraction | None
    samples: int
    note: str = ""

    @property
    def central(self) -> bool:
        return self.verdict is Centrality.EPSILON_CENTRAL


def _refine(v: VarietySpec, point: Point, params: tuple[Fraction, ...], budget: int, singular) -> tuple[Point | None, Fraction | None, tuple, int]:
    """Pattern search in parameter space toward ``point``.

    Steps halve when no neighbour is closer; the objective is the sup distance
    with the sum of coordinate gaps as tie-breaker so flat directions still
    move.  The path does not depend on any tolerance.
    """

    def score(prm):
        q = v.sampler(prm)
        if q is None or not is_regular(v.ring, q, singular):
            return None, None
        gaps = [abs(a - b) for a, b in zip(q, point)]
        return q, (max(gaps), sum(gaps))

    best_q, best = score(params)
    used = 1
    if best is None:
        return None, None, params, used
    step = v.box / 4
    floor = v.box / 2**40
    while used < budget and step > floor:
        moved = False
        for k, sign in itertools.product(range(len(params)), (1, -1)):
            trial = list(params)
            trial[k] += sign * step
            trial = tuple(trial)
            q, s = score(trial)
            used += 1
            if s is not None and s < best:
                best_q, best, params, moved = q, s, trial, True
                break
            if used >= budget:
                break
        if not moved:
            step /= 2
    return best_q, best[0], params, used


def is_epsilon_central(v: VarietySpec, point: Sequence[Fraction], epsilon: Fraction = DEFAULT_EPSILON, n: int = DEFAULT_SAMPLES, seed: int = 0) -> CentralityVerdict:
    """Search at most n regular points for one within sup distance epsilon of ``point``.

    Half the budget goes to the Halton samples, the rest to local refinement
    from the closest few of them.  Raises NotOnVariety for points off V.
    """
    point = tuple(Fraction(c) for c in point)
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if len(point) != v.ring.nvars:
        raise NotOnVariety(f"expected {v.ring.nvars} coordinates, got {len(point)}")
    if not v.on_variety(point):
        raise NotOnVariety("point does not satisfy the ideal generators")
    singular = singular_ideal(v.ring)
    globals_n = max(1, n // 2)
    box = v.box
    index = 1 + seed * 7919
    ranked = []
    best_q, best_d = None, None
    used = 0
    while used < globals_n:
        params = halton(index, v.param_dim, box)
        index += 1
        used += 1
        q = v.sampler(params)
        if q is None or not is_regular(v.ring, q, singular):
            continue
        d = sup_distance(q, point)
        ranked.append((d, used, params, q))
        if best_d is None or d < best_d:
            best_q, best_d = q, d
        if d <= epsilon:
            break
    if best_d is None or best_d > epsilon:
        ranked.sort(key=lambda r: (r[0], r[1]))
        starts = ranked[:4]
        share = (n - used) // max(1, len(starts))
        for _, _, params, _ in starts:
            q, d, _, spent = _refine(v, point, params, share, singular)
            used += spent
            if d is not None and (best_d is None or d < best_d):
                best_q, best_d = q, d
            if best_d is not None and best_d <= epsilon:
                break
    ok = best_d is not None and best_d <= epsilon
    note = "a regular sample lies within epsilon" if ok else "no regular sample found within epsilon; evidence, not proof"
    return CentralityVerdict(
        point,
        epsilon,
        Centrality.EPSILON_CENTRAL if ok else Centrality.NOT_EPSILON_CENTRAL,
        tuple(best_q) if best_q is not None else None,
        best_d,
        used,
        note,
    )


class Claim(str, enum.Enum):
    NONNEG = "NonNeg"
    POS = "Pos"
    ZERO = "Zero"


@dataclass
class SampleReport:
    claim: str
    samples: int
    passes: int
    failures: int
    first_counterexample: Point | None
    vacuous: bool
    region: str = "central"
    seed: int = 0
    skipped: int = 0

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def to_json(self) -> dict:
        return {
            "claim": self.claim,
            "samples": self.samples,
            "passes": self.passes,
            "failures": self.failures,
            "first_counterexample": None if self.first_counterexample is None else [str(c) for c in self.first_counterexample],
            "vacuous": self.vacuous,
            "region": self.region,
            "seed": self.seed,
            "skipped": self.skipped,
        }


def _region_points(v: VarietySpec, n: int, seed: int, region: str) -> list[Point]:
    pts = list(v.central_points) + list(sample_regular_points(v, n, seed))
    if region == "all":
        stray = list(v.stray_points)
        for sampler, dim in v.stray_samplers:
            for i in range(1, n + 1):
                p = sampler(halton(i + seed * 7919, dim, v.box))
                if p is not None:
                    if not v.on_variety(p):
                        raise AssertionError("stray sampler left the variety")
                    stray.append(tuple(p))
        # stray points first so the first counterexample is off the central locus
        pts = stray + pts
    elif region != "central":
        raise ValueError(f"unknown region {region!r}")
    return pts


def check_sign_on_central_samples(
    v: VarietySpec,
    f: Poly,
    generators: Sequence[Poly] = (),
    claim: Claim | str = Claim.NONNEG,
    n: int = DEFAULT_SAMPLES,
    seed: int = 0,
    region: str = "central",
    denominators: Sequence[Poly] = (),
    positives: Sequence[Poly] = (),
) -> SampleReport:
    """Evaluate the sign claim for f at sampled points where all generators are >= 0.

    Points where a polynomial in ``denominators`` vanishes, or where one in
    ``positives`` is not strictly positive, are left out of the count.  With
    region="all" the stray samplers of ``v`` add real points that are not
    central.
    """
    claim = Claim(claim)
    passes = failures = 0
    first = None
    considered = 0
    for p in _region_points(v, n, seed, region):
        if any(g.evaluate(p) < 0 for g in generators):
            continue
        if any(d.evaluate(p) == 0 for d in denominators):
            continue
        if any(q.evaluate(p) <= 0 for q in positives):
            continue
        considered += 1
        val = f.evaluate(p)
        good = val >= 0 if claim is Claim.NONNEG else val > 0 if claim is Claim.POS else val == 0
        if good:
            passes += 1
        else:
            failures += 1
            if first is None:
                first = p
    return SampleReport(claim.value, considered, passes, failures, first, considered == 0, region, seed)


def check_zeroset_containment(v: VarietySpec, q: Poly, f: Poly, n: int = DEFAULT_SAMPLES, seed: int = 0) -> SampleReport:
    """Every sampled central point with q == 0 must have f == 0.

    The report counts only the points where q vanishes; with none it is
    flagged vacuous.
    """
    passes = failures = 0
    first = None
    for p in _region_points(v, n, seed, "central"):
        if q.evaluate(p) != 0:
            continue
        if f.evaluate(p) == 0:
            passes += 1
        else:
            failures += 1
            if first is None:
                first = p
    considered = passes + failures
    return SampleReport("ZeroSetContainment", considered, passes, failures, first, considered == 0, "central", seed)


def parse_point(text: str) -> Point:
    try:
        return tuple(Fraction(c.strip()) for c in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad point {text!r}: {exc}") from None
