"""Bounded-degree search for sum-of-squares certificates modulo an ideal.

A target F is written as v^T G v with v a vector of standard monomials and G
a symmetric rational matrix; coefficient matching after reduction modulo the
Groebner basis gives an affine space of candidate G.  Points of that space are
tried in a fixed order and accepted only through an exact LDL^T with
nonnegative pivots, so everything returned is a genuine identity over Q.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .linalg import (
    AffineSolution,
    InconsistentSystem,
    RationalLDL,
    least_norm,
    rational_psd_decompose,
    solve_affine,
)
from .cones import SosFractionWitness
from .polyring import Monomial, Poly, QuotientRing

if TYPE_CHECKING:
    from .certificates import PositivityCertificate

GRID_DEPTH = 8
MAX_BASIS = 64


class SearchStatus(enum.Enum):
    FOUND = "Found"
    INFEASIBLE_AT_DEGREE = "InfeasibleAtDegree"
    RESOURCE_LIMIT = "ResourceLimit"


@dataclass
class GramProblem:
    target: Poly
    basis: list[Monomial]
    pairs: list[tuple[int, int]]
    # monomial -> {pair index: coefficient}
    rows: dict[Monomial, dict[int, Fraction]]

    def equations(self) -> tuple[list[list[Fraction]], list[Fraction]]:
        A, b = [], []
        n = len(self.pairs)
        for mono, row in self.rows.items():
            line = [Fraction(0)] * n
            for k, c in row.items():
                line[k] = c
            A.append(line)
            b.append(self.target.coeff(mono))
        return A, b


@dataclass
class SosResult:
    status: SearchStatus
    numerators: list[Poly] | None = None
    degree: int | None = None
    basis_size: int = 0
    # True when infeasibility at every tried degree was proven, not just unfound
    proven: bool = False
    detail: str = ""

    @property
    def found(self) -> bool:
        return self.status is SearchStatus.FOUND


def gram_basis(ring: QuotientRing, degree_bound: int) -> list[Monomial]:
    """Standard monomials of degree <= degree_bound in increasing monomial order."""
    if degree_bound < 0:
        raise ValueError("degree bound must be nonnegative")
    n = ring.nvars
    monos = []
    for total in range(degree_bound + 1):
        for combo in itertools.combinations_with_replacement(range(n), total):
            e = [0] * n
            for i in combo:
                e[i] += 1
            e = tuple(e)
            if ring.is_standard(e):
                monos.append(e)
    monos.sort(key=ring.order.key)
    return monos


def build_gram_problem(ring: QuotientRing, F: Poly, basis: Sequence[Monomial]) -> GramProblem:
    target = ring.normal_form(F)
    pairs = [(i, j) for i in range(len(basis)) for j in range(i, len(basis))]
    rows: dict[Monomial, dict[int, Fraction]] = {m: {} for m in target._terms}
    for k, (i, j) in enumerate(pairs):
        prod = tuple(a + b for a, b in zip(basis[i], basis[j]))
        mult = 1 if i == j else 2
        for mono, c in ring._monomial_nf(prod).items():
            rows.setdefault(mono, {})[k] = rows.get(mono, {}).get(k, 0) + mult * c
    rows = {m: {k: c for k, c in r.items() if c} for m, r in rows.items()}
    return GramProblem(target, list(basis), pairs, rows)


def _propagate_zeros(problem: GramProblem) -> tuple[set[int], bool]:
    """Facial reduction by diagonal sign arguments.

    A PSD matrix with a zero diagonal entry has a zero row.  An equation whose
    surviving unknowns are all diagonal entries with coefficients of one sign
    either forces them to zero (right-hand side 0) or is unsatisfiable
    (right-hand side of the opposite sign).  Returns the zeroed basis indices
    and whether infeasibility was proven.
    """
    pairs = problem.pairs
    zero: set[int] = set()
    changed = True
    while changed:
        changed = False
        for mono, row in problem.rows.items():
            rhs = problem.target.coeff(mono)
            live = {k: c for k, c in row.items() if pairs[k][0] not in zero and pairs[k][1] not in zero}
            if not live:
                if rhs:
                    return zero, True
                continue
            if not all(pairs[k][0] == pairs[k][1] for k in live):
                continue
            signs = {c > 0 for c in live.values()}
            if len(signs) != 1:
                continue
            positive = signs.pop()
            if rhs and (rhs > 0) != positive:
                return zero, True
            if rhs == 0:
                zero.update(pairs[k][0] for k in live)
                changed = True
    return zero, False


def _gram_from_vector(x: Sequence[Fraction], pairs: Sequence[tuple[int, int]], n: int) -> list[list[Fraction]]:
    G = [[Fraction(0)] * n for _ in range(n)]
    for v, (i, j) in zip(x, pairs):
        G[i][j] = v
        G[j][i] = v
    return G


PROBE_VALUES = (Fraction(0), Fraction(1), Fraction(-1), Fraction(2), Fraction(-2), Fraction(1, 2), Fraction(-1, 2))
MAX_PROBES = 20000


def _probe_grid(nvars: int) -> Sequence[tuple[Fraction, ...]]:
    for k in range(len(PROBE_VALUES), 1, -2):
        if k**nvars <= MAX_PROBES:
            return itertools.product(PROBE_VALUES[:k], repeat=nvars)
    return ()


def real_zeros(ring: QuotientRing, F: Poly) -> list[tuple[Fraction, ...]]:
    """Small rational points of V(I) where F vanishes.

    Any SOS representation of F has every square vanishing there, so these
    points pin down part of the kernel of every feasible Gram matrix.
    """
    gens = ring.ideal_generators
    out = []
    for p in _probe_grid(ring.nvars):
        if F.evaluate(p) == 0 and all(g.evaluate(p) == 0 for g in gens):
            out.append(p)
    return out


def _monomial_value(mono: Monomial, point: Sequence[Fraction]) -> Fraction:
    v = Fraction(1)
    for a, e in zip(point, mono):
        if e:
            v *= a**e
    return v


def _kernel_vectors(basis: Sequence[Monomial], points: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """A linearly independent subset of the evaluation vectors v(p)."""
    vecs = [[_monomial_value(m, p) for m in basis] for p in points]
    vecs = [v for v in vecs if any(v)]
    if not vecs:
        return []
    # greedy independence test through incremental row reduction
    chosen: list[list[Fraction]] = []
    reduced: list[tuple[int, list[Fraction]]] = []
    for v in vecs:
        w = list(v)
        for col, row in reduced:
            if w[col]:
                f = w[col]
                w = [a - f * b for a, b in zip(w, row)]
        col = next((i for i, a in enumerate(w) if a), None)
        if col is None:
            continue
        inv = 1 / w[col]
        reduced.append((col, [a * inv for a in w]))
        chosen.append(v)
    return chosen


def _kernel_equations(kernel: Sequence[Sequence[Fraction]], pairs: Sequence[tuple[int, int]], n: int) -> tuple[list[list[Fraction]], list[Fraction]]:
    index = {pr: k for k, pr in enumerate(pairs)}
    A, b = [], []
    for v in kernel:
        for i in range(n):
            row = [Fraction(0)] * len(pairs)
            for j in range(n):
                if v[j]:
                    row[index[(min(i, j), max(i, j))]] += v[j]
            A.append(row)
            b.append(Fraction(0))
    return A, b


class _Steering:
    """Float model of the Gram matrix restricted to the complement of the known kernel.

    Used only to decide which exact candidate to try next; acceptance is
    always by exact LDL^T.
    """

    def __init__(self, sol: AffineSolution, pairs, n: int, kernel):
        def sym(vec):
            M = np.zeros((n, n))
            for v, (i, j) in zip(vec, pairs):
                M[i, j] = M[j, i] = float(v)
            return M

        if kernel:
            K = np.array([[float(a) for a in v] for v in kernel]).T
            U, s, _ = np.linalg.svd(K)
            rank = int((s > 1e-9 * s[0]).sum())
            self.Q = U[:, rank:]
        else:
            self.Q = np.eye(n)
        Q = self.Q
        self.base = Q.T @ sym(sol.particular) @ Q
        self.dirs = np.array([Q.T @ sym(v) @ Q for v in sol.null_basis]) if sol.null_basis else np.zeros((0,) + self.base.shape)

    def matrix(self, params: Sequence[Fraction]) -> np.ndarray:
        M = self.base.copy()
        for t, D in zip(params, self.dirs):
            if t:
                M += float(t) * D
        return M

    @staticmethod
    def min_eig(M: np.ndarray) -> float:
        if M.shape[0] == 0:
            return math.inf
        return float(np.linalg.eigvalsh(M)[0])


def _try_exact(sol: AffineSolution, params, pairs, n: int) -> RationalLDL | None:
    return rational_psd_decompose(_gram_from_vector(sol.point(params), pairs, n))


def _grid_search(sol: AffineSolution, pairs, n: int, kernel, start: list[Fraction], max_evals: int) -> tuple[RationalLDL | None, int]:
    """Dyadic coordinate ascent on the smallest eigenvalue, from ``start``.

    At each step every coordinate is moved by +-1/2^k and the best move is
    taken; k increases when no move helps.  Returns the first exactly PSD
    candidate and the number of candidates scored.
    """
    if not sol.null_basis:
        return None, 0
    steer = _Steering(sol, pairs, n, kernel)
    if steer.base.shape[0] == 0:
        return None, 0
    t = list(start)
    current = steer.matrix(t)
    best = steer.min_eig(current)
    evals = 0
    dirs = steer.dirs
    for depth in range(GRID_DEPTH + 1):
        step = Fraction(1, 2**depth)
        fstep = float(step)
        while evals < max_evals:
            cands = np.concatenate([current + fstep * dirs, current - fstep * dirs])
            scores = np.linalg.eigvalsh(cands)[:, 0]
            evals += len(cands)
            k = int(np.argmax(scores))
            if scores[k] <= best + 1e-12:
                break
            best = float(scores[k])
            coord, sign = k % len(dirs), (1 if k < len(dirs) else -1)
            t[coord] += sign * step
            current = steer.matrix(t)
            if best > 1e-9:
                ldl = _try_exact(sol, t, pairs, n)
                if ldl is not None:
                    return ldl, evals
        if evals >= max_evals:
            break
    return None, evals


def _solve_at_degree(ring: QuotientRing, F: Poly, degree: int, max_evals: int) -> SosResult:
    basis = gram_basis(ring, degree)
    if len(basis) > MAX_BASIS:
        return SosResult(SearchStatus.RESOURCE_LIMIT, degree=degree, basis_size=len(basis), detail=f"basis of {len(basis)} monomials exceeds {MAX_BASIS}")
    problem = build_gram_problem(ring, F, basis)
    zeroed, infeasible = _propagate_zeros(problem)
    if infeasible:
        return SosResult(SearchStatus.INFEASIBLE_AT_DEGREE, degree=degree, basis_size=len(basis), proven=True, detail="diagonal sign argument")
    sub = [m for i, m in enumerate(basis) if i not in zeroed]
    if not sub:
        return SosResult(SearchStatus.INFEASIBLE_AT_DEGREE, degree=degree, basis_size=len(basis), proven=True, detail="every basis monomial forced out")
    problem = build_gram_problem(ring, F, sub)
    n = len(sub)
    A, b = problem.equations()
    kernel = _kernel_vectors(sub, real_zeros(ring, problem.target))
    KA, Kb = _kernel_equations(kernel, problem.pairs, n)
    try:
        sol = solve_affine(A + KA, b + Kb, len(problem.pairs))
    except InconsistentSystem:
        return SosResult(SearchStatus.INFEASIBLE_AT_DEGREE, degree=degree, basis_size=len(basis), proven=True, detail="coefficient matching has no solution")
    weights = [1 if i == j else 2 for i, j in problem.pairs]
    centered = least_norm(sol, weights)
    ldl = rational_psd_decompose(_gram_from_vector(centered, problem.pairs, n))
    evals = 1
    if ldl is None:
        ldl, used = _grid_search(sol, problem.pairs, n, kernel, sol.params_of(centered), max_evals)
        evals += used
    if ldl is None:
        return SosResult(SearchStatus.INFEASIBLE_AT_DEGREE, degree=degree, basis_size=len(basis), detail=f"no PSD point among {evals} candidates")
    nums = numerators_from_ldl(ldl, sub, ring.nvars)
    total = Poly.zero(ring.nvars)
    for g in nums:
        total = total + g * g
    if ring.normal_form(total - F):
        raise AssertionError("extracted squares do not reproduce the target")
    return SosResult(SearchStatus.FOUND, nums, degree, len(basis), detail=f"{evals} candidates")


def search_sos(ring: QuotientRing, F: Poly, degree_bound: int, max_evals: int = 20000) -> SosResult:
    """Find g_i with sum g_i^2 == F mod I and deg g_i <= degree_bound.

    Degrees are tried in increasing order starting from half the degree of
    the normal form, so a success at d is returned again for any larger bound.
    """
    target = ring.normal_form(F)
    if not target:
        return SosResult(SearchStatus.FOUND, [], 0, 1, detail="target is zero in A")
    graded = ring.order.kind == "grevlex"
    start = (target.degree() + 1) // 2 if graded else 0
    if start > degree_bound:
        return SosResult(SearchStatus.INFEASIBLE_AT_DEGREE, degree=degree_bound, proven=graded, detail="target degree exceeds twice the bound")
    proven = True
    last = None
    for d in range(start, degree_bound + 1):
        res = _solve_at_degree(ring, target, d, max_evals)
        if res.found or res.status is SearchStatus.RESOURCE_LIMIT:
            return res
        proven = proven and res.proven
        last = res
    last.proven = proven
    return last


@dataclass
class FractionSearchResult:
    status: SearchStatus
    witness: SosFractionWitness | None = None
    attempts: list[tuple[Poly, SosResult]] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.status is SearchStatus.FOUND

    @property
    def proven(self) -> bool:
        return bool(self.attempts) and all(r.proven for _, r in self.attempts)


def search_sos_fraction(ring: QuotientRing, f: Poly, pool: Sequence[Poly], degree_bound: int, max_evals: int = 20000) -> FractionSearchResult:
    """Look for f*q^2 == sum g^2 mod I over denominators q from ``pool``, in order.

    ``degree_bound`` limits the numerator degree relative to the denominator:
    for q of degree e the numerators may reach degree degree_bound + e.
    """
    attempts = []
    for q in pool:
        if ring.contains(q):
            raise ValueError(f"denominator {ring.format(q)} is zero in A")
        res = search_sos(ring, f * q * q, degree_bound + q.degree(), max_evals)
        attempts.append((q, res))
        if res.found:
            nums = tuple(res.numerators) or (ring.zero(),)
            return FractionSearchResult(SearchStatus.FOUND, SosFractionWitness(q, nums), attempts)
    if any(r.status is SearchStatus.RESOURCE_LIMIT for _, r in attempts):
        return FractionSearchResult(SearchStatus.RESOURCE_LIMIT, None, attempts)
    return FractionSearchResult(SearchStatus.INFEASIBLE_AT_DEGREE, None, attempts)


def _normalized(ring: QuotientRing, p: Poly) -> Poly:
    _, lc = ring.order.leading(p)
    return p.scale(1 / lc)


def default_pool(ring: QuotientRing, degree_bound: int) -> list[Poly]:
    """1, the partial derivatives of the ideal generators, and their pairwise products.

    Entries are made monic, entries of degree above ``degree_bound`` or lying
    in I are dropped, and duplicates modulo I are removed.
    """
    base = []
    for g in ring.ideal_generators:
        for i in range(ring.nvars):
            d = g.diff(i)
            if d and d.constant_value() is None:
                base.append(_normalized(ring, d))
    candidates = [ring.const(1)] + base
    for a, b in itertools.combinations_with_replacement(base, 2):
        candidates.append(a * b)
    out: list[Poly] = []
    seen: set = set()
    for c in candidates:
        if c.degree() > degree_bound or ring.contains(c):
            continue
        key = _normalized(ring, ring.normal_form(c))
        if key in seen:
            continue
        seen.add(key)
        out.append(c)
    return out


@dataclass
class H17SearchResult:
    status: SearchStatus
    certificate: PositivityCertificate | None = None
    search: FractionSearchResult | None = None

    @property
    def found(self) -> bool:
        return self.status is SearchStatus.FOUND


def search_h17(ring: QuotientRing, f: Poly, degree_bound: int, pool: Sequence[Poly] | None = None, max_evals: int = 20000) -> H17SearchResult:
    """H17 certificate f*f = 0 + f^2 with f shown to be a sum of squares of fractions."""
    from .certificates import h17_from_cone_witness, verify
    from .cones import sos_cone

    if ring.contains(f):
        raise ValueError("f is zero in A")
    if pool is None:
        pool = default_pool(ring, degree_bound)
    res = search_sos_fraction(ring, f, pool, degree_bound, max_evals)
    if not res.found:
        return H17SearchResult(res.status, None, res)
    w = res.witness
    cert = h17_from_cone_witness(ring, f, sos_cone(w.nums, w.den))
    if not verify(ring, cert):
        raise AssertionError("assembled certificate failed to verify")
    return H17SearchResult(SearchStatus.FOUND, cert, res)



def numerators_from_ldl(ldl: RationalLDL, basis: Sequence[Monomial], nvars: int) -> list[Poly]:
    """Turn P^T G P = L D L^T into explicit squares sum_k d_k (L_k . v)^2.

    Each weight d_k is split into squares of rationals so the witness is a
    plain list of polynomials.
    """
    n = len(ldl.D)
    out = []
    for k in range(n):
        d = ldl.D[k]
        if not d:
            continue
        terms: dict[Monomial, Fraction] = {}
        for i in range(k, n):
            c = ldl.L[i][k]
            if c:
                terms[basis[ldl.perm[i]]] = c
        g = Poly(nvars, terms)
        for r in rational_square_split(d):
            out.append(g.scale(r))
    return out


def rational_square_split(w: Fraction) -> list[Fraction]:
    """Rationals r_i with sum r_i^2 == w (at most four), for w >= 0."""
    w = Fraction(w)
    if w < 0:
        raise ValueError("negative weight")
    if w == 0:
        return []
    num, den = w.numerator, w.denominator
    root = _exact_sqrt(num * den)
    if root is not None:
        return [Fraction(root, den)]
    return [Fraction(a, den) for a in four_squares(num * den) if a]


def _exact_sqrt(n: int) -> int | None:
    r = math.isqrt(n)
    return r if r * r == n else None


def four_squares(n: int) -> tuple[int, int, int, int]:
    from sympy.solvers.diophantine.diophantine import sum_of_four_squares

    return tuple(sum_of_four_squares(n))
