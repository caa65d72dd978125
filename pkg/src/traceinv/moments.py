"""Exact Gaussian moments and cumulants as Laurent polynomials in N.

Every pairing of a family's union contributes N^(F0 - D k); coefficients
are exact integers, so moment-cumulant identities and factorization
verdicts are decided without floating point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .graphs import ColoredGraph, GraphFamily, connected_components, family_of, graph_stats
from .search import (
    BudgetError,
    DEFAULT_KMAX,
    _check_budget,
    _f0,
    degree_report,
    mst_pair_f0,
    search_f0,
    search_f0_connected,
)

DEFAULT_PMAX = 5


class LaurentPoly:
    """Laurent polynomial in N with integer coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for e, c in dict(terms).items():
                if c:
                    self.terms[int(e)] = int(c)

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def constant(cls, c):
        return cls({0: c})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.constant(other)
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return LaurentPoly(out)

    def __sub__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) - c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return LaurentPoly(out)

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentPoly({e: c * other for e, c in self.terms.items()})
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return LaurentPoly(out)

    __rmul__ = __mul__

    def coefficient(self, e: int) -> int:
        return self.terms.get(e, 0)

    def coefficient_sum(self) -> int:
        return sum(self.terms.values())

    def max_exponent(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no exponents")
        return max(self.terms)

    def min_exponent(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no exponents")
        return min(self.terms)

    def eval_at(self, N) -> Fraction:
        """Exact value at a numeric N."""
        N = Fraction(N)
        return sum((c * N**e for e, c in self.terms.items()), Fraction(0))

    def to_json_dict(self) -> dict:
        return {
            "variable": "N",
            "terms": [
                {"exp": e, "coef": str(c)} for e, c in sorted(self.terms.items(), reverse=True)
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "LaurentPoly":
        return cls({int(t["exp"]): int(t["coef"]) for t in data["terms"]})

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for e, c in sorted(self.terms.items(), reverse=True):
            a = abs(c)
            if e == 0:
                body = str(a)
            elif a == 1:
                body = f"N^{e}"
            else:
                body = f"{a}N^{e}"
            if not out:
                out.append(body if c > 0 else f"-{body}")
            else:
                out.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(out)

    def __repr__(self):
        return f"LaurentPoly({self.terms!r})"


def set_partitions(n: int):
    """All partitions of {0..n-1} via restricted growth strings."""
    if n == 0:
        yield ()
        return
    rgs = [0] * n

    def emit():
        blocks = {}
        for i, b in enumerate(rgs):
            blocks.setdefault(b, []).append(i)
        return tuple(tuple(blocks[b]) for b in sorted(blocks))

    def rec(i, m):
        if i == n:
            yield emit()
            return
        for b in range(m + 2):
            rgs[i] = b
            yield from rec(i + 1, max(m, b))

    yield from rec(1, 0)


def _exponent_histogram(family: GraphFamily, connected: bool, kmax) -> dict:
    union = family.union()
    _check_budget(union.k, kmax)
    k = union.k
    sigmas = union.sigma
    member_of = family.member_of_label() if connected else None
    p = family.p
    hist = {}
    rng = range(k)
    for nu in itertools.permutations(rng):
        if member_of is not None:
            parent = list(range(p))
            comps = p
            for s in rng:
                a = member_of[s]
                b = member_of[nu[s]]
                while parent[a] != a:
                    parent[a] = parent[parent[a]]
                    a = parent[a]
                while parent[b] != b:
                    parent[b] = parent[parent[b]]
                    b = parent[b]
                if a != b:
                    parent[a] = b
                    comps -= 1
            if comps != 1:
                continue
        f0 = _f0(sigmas, nu)
        hist[f0] = hist.get(f0, 0) + 1
    return hist


def gaussian_moment(family: GraphFamily, kmax: Optional[int] = None) -> LaurentPoly:
    """Expectation of the product of the members' trace-invariants.

    Wick expansion over all pairings of the union: each contributes
    N^(F0 - D k).
    """
    D = family.D
    k = family.total_k
    hist = _exponent_histogram(family, connected=False, kmax=kmax)
    return LaurentPoly({f0 - D * k: c for f0, c in hist.items()})


def connected_cumulant(family: GraphFamily, kmax: Optional[int] = None) -> LaurentPoly:
    """Joint cumulant of the members' trace-invariants.

    Same expansion restricted to pairings whose member-incidence graph is
    connected; for a single member this is the full moment.
    """
    D = family.D
    k = family.total_k
    hist = _exponent_histogram(family, connected=True, kmax=kmax)
    return LaurentPoly({f0 - D * k: c for f0, c in hist.items()})


def cumulant_consistency(
    family: GraphFamily, kmax: Optional[int] = None, pmax: int = DEFAULT_PMAX
) -> LaurentPoly:
    """Residual of the moment-cumulant formula; identically zero on contract."""
    p = family.p
    if p > pmax:
        raise BudgetError(f"partition lattice for p={p} exceeds the budget p_max={pmax}")
    moment = gaussian_moment(family, kmax=kmax)
    cumulants = {}
    total = LaurentPoly.zero()
    for pi in set_partitions(p):
        prod = LaurentPoly.constant(1)
        for block in pi:
            if block not in cumulants:
                cumulants[block] = connected_cumulant(family.subfamily(block), kmax=kmax)
            prod = prod * cumulants[block]
        total = total + prod
    return moment - total


def haar_factor(k: int, D: int, N: int) -> Fraction:
    """Exact ratio between Haar and Gaussian single-invariant expectations."""
    if N < 1:
        raise ValueError("need N >= 1")
    if k < 0:
        raise ValueError("need k >= 0")
    denom = 1
    nd = N**D
    for j in range(k):
        denom *= nd + j
    return Fraction(N ** (D * k), denom)


@dataclass(frozen=True)
class LeadingOrder:
    s: int
    mu: int


def leading_order(poly: LaurentPoly) -> LeadingOrder:
    if not poly:
        raise ValueError("zero polynomial has no leading order")
    s = poly.max_exponent()
    return LeadingOrder(s=s, mu=poly.coefficient(s))


@dataclass(frozen=True)
class FactorizationVerdict:
    factorizes: bool
    per_partition: tuple  # (partition, margin) for every partition != 0_p
    worst: tuple  # the (partition, margin) with the smallest margin

    def to_json_dict(self) -> dict:
        return {
            "factorizes": self.factorizes,
            "per_partition": [
                {"partition": [list(b) for b in pi], "margin": m}
                for pi, m in self.per_partition
            ],
            "worst": {"partition": [list(b) for b in self.worst[0]], "margin": self.worst[1]},
        }


def factorization_verdict(
    family: GraphFamily, kmax: Optional[int] = None, pmax: int = DEFAULT_PMAX, workers: int = 1
) -> FactorizationVerdict:
    """Exhaustive check that the fully split partition dominates.

    For every partition pi of the members other than the singletons
    partition, margin = sum_i F0max(G_i) - sum_{B in pi} F0max_connected(B);
    factorization holds exactly when every margin is positive.
    """
    p = family.p
    if p > pmax:
        raise BudgetError(f"partition lattice for p={p} exceeds the budget p_max={pmax}")
    block_f0 = {}

    def f0c(block) -> int:
        if block not in block_f0:
            if len(block) == 1:
                rep = search_f0(family.members[block[0]][1], kmax=kmax, workers=workers)
            else:
                rep = search_f0_connected(family.subfamily(block), kmax=kmax, workers=workers)
            block_f0[block] = rep.f0_max
        return block_f0[block]

    split_total = sum(f0c((i,)) for i in range(p))
    per_partition = []
    for pi in set_partitions(p):
        if all(len(b) == 1 for b in pi):
            continue
        margin = split_total - sum(f0c(b) for b in pi)
        per_partition.append((pi, margin))
    if not per_partition:  # p = 1: nothing to dominate
        trivial = ((tuple(range(p)),), 0)
        return FactorizationVerdict(True, (), trivial)
    worst = min(per_partition, key=lambda item: item[1])
    return FactorizationVerdict(
        factorizes=all(m > 0 for _, m in per_partition),
        per_partition=tuple(per_partition),
        worst=worst,
    )


@dataclass(frozen=True)
class Thm41Report:
    passes: bool
    lhs: int  # sum of per-component F0 maxima
    rhs: Fraction  # (D/2) k + F/(D-1) - D
    delta_sum: Fraction  # equivalent form: passes iff delta_sum < D(D-1)/2


def thm41_check(
    family: GraphFamily, kmax: Optional[int] = None, workers: int = 1
) -> Thm41Report:
    """Sufficient factorization bound over the union's connected components."""
    union = family.union()
    D = union.D
    stats = graph_stats(union)
    lhs = 0
    delta_sum = Fraction(0)
    for comp, _ in connected_components(union):
        rep = search_f0(comp, kmax=kmax, workers=workers)
        lhs += rep.f0_max
        delta_sum += degree_report(comp, f0_max=rep.f0_max).delta
    rhs = Fraction(D * union.k, 2) + Fraction(stats.F_total, D - 1) - D
    return Thm41Report(passes=lhs > rhs, lhs=lhs, rhs=rhs, delta_sum=delta_sum)


def limit_moments_prop34(mu_c, p: int, regime: str) -> dict:
    """Limit cumulant and moment of order p for the two solved regimes.

    exponential: the limit law of the rescaled invariant when the
    conjugate-pair channel strictly dominates; gamma: the half-integer
    shape law of the degenerate case.  Exact in Fraction arithmetic.
    """
    if p < 1:
        raise ValueError("order p must be >= 1")
    mu = Fraction(mu_c)
    if mu <= 0:
        raise ValueError("mu_c must be positive")
    if regime == "exponential":
        cumulant = math.factorial(p - 1) * mu**p
        moment = math.factorial(p) * mu**p
    elif regime == "gamma":
        cumulant = Fraction(math.factorial(p - 1), 2) * (2 * mu) ** p
        double_fact = Fraction(math.factorial(2 * p), 2**p * math.factorial(p))
        moment = double_fact * mu**p
    else:
        raise ValueError(f"unknown regime {regime!r}")
    return {"cumulant_p": Fraction(cumulant), "moment_p": Fraction(moment)}


@dataclass(frozen=True)
class Prop32Report:
    exponent: int
    verified: bool
    note: str


def prop32_scaling_check(
    H: ColoredGraph, p: int, kmax: Optional[int] = None, workers: int = 1
) -> Prop32Report:
    """Predicted leading exponent of the p-th moment of Tr over {H, conj H}.

    Requires a maximally single-trace, non-factorizing H; the prediction is
    -p D k(H).  It is verified by enumeration only when p copies of the
    union fit in the budget, and flagged asymptotic otherwise.
    """
    if p < 1:
        raise ValueError("order p must be >= 1")
    pair = mst_pair_f0(H, kmax=kmax, workers=workers)
    if not pair.nonfactorizing:
        raise ValueError("prop32_scaling_check requires a non-factorizing pair")
    exponent = -p * H.D * H.k
    from .graphs import conjugate, disjoint_union

    union, _ = disjoint_union([H, conjugate(H)])
    limit = DEFAULT_KMAX if kmax is None else int(kmax)
    if p * union.k <= limit:
        fam = family_of([union] * p)
        lead = leading_order(gaussian_moment(fam, kmax=kmax))
        return Prop32Report(
            exponent=exponent,
            verified=lead.s == exponent,
            note="verified by enumeration",
        )
    return Prop32Report(exponent=exponent, verified=False, note="asymptotic (not desk-verifiable)")
