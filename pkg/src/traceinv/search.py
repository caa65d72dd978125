"""Exact maximization of color-0 face counts over pairings.

A pairing nu (white label -> black label) completes a D-colored graph with
color-0 edges; its score is sum_c #(sigma_c nu^-1).  Everything here is
exact enumeration over S_k, optionally split by the image of white 0 for
parallel workers, with an optional branch-and-bound that never changes
results.
"""

from __future__ import annotations

import itertools
import multiprocessing
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import perms
from .graphs import ColoredGraph, GraphFamily, component_labels, graph_stats

DEFAULT_KMAX = 11


class BudgetError(ValueError):
    """Raised when an exact computation would exceed the configured k_max."""


def _check_budget(k: int, kmax: Optional[int]) -> int:
    limit = DEFAULT_KMAX if kmax is None else int(kmax)
    if limit < 1:
        raise ValueError("k_max must be >= 1")
    if k > limit:
        raise BudgetError(
            f"exact enumeration over S_{k} exceeds the budget k_max={limit}; "
            f"raise k_max explicitly to proceed"
        )
    return limit


def pairing_f0(G: ColoredGraph, nu) -> int:
    """Total number of color-0 faces of the completion determined by nu."""
    nu = perms.check_perm(nu)
    if len(nu) != G.k:
        raise ValueError(f"pairing has size {len(nu)}, graph has k={G.k}")
    return _f0(G.sigma, nu)


def _f0(sigmas, nu) -> int:
    # sum over colors of the cycle count of nu^-1 . sigma_c, which has the
    # same cycle structure as sigma_c . nu^-1
    k = len(nu)
    inv = [0] * k
    i = 0
    for b in nu:
        inv[b] = i
        i += 1
    total = 0
    rng = range(k)
    for sig in sigmas:
        seen = 0
        cnt = 0
        for x in rng:
            if not (seen >> x) & 1:
                cnt += 1
                y = x
                while not (seen >> y) & 1:
                    seen |= 1 << y
                    y = inv[sig[y]]
        total += cnt
    return total


@dataclass(frozen=True)
class SearchReport:
    f0_max: int
    multiplicity: int
    optima: tuple  # pairings achieving f0_max, lexicographic
    explored: int

    @property
    def truncated(self) -> bool:
        return self.multiplicity > len(self.optima)

    def to_json_dict(self) -> dict:
        out = {
            "f0_max": self.f0_max,
            "multiplicity": self.multiplicity,
            "optima": [[b + 1 for b in nu] for nu in self.optima],
            "explored": self.explored,
        }
        if self.truncated:
            out["truncated"] = True
        return out


def _scan_coset(sigmas, k, first, member_of, p, max_optima):
    """Enumerate pairings with nu(0)=first; None enumerates all of S_k.

    member_of restricts to pairings whose member-incidence graph K is
    connected.  Returns (best, count, optima, explored).
    """
    rng = range(k)
    best = -1
    count = 0
    optima = []
    explored = 0
    connected_only = member_of is not None

    if first is None:
        iterator = itertools.permutations(rng)
        prefix = ()
    else:
        rest = [x for x in rng if x != first]
        iterator = itertools.permutations(rest)
        prefix = (first,)

    for tail in iterator:
        nu = prefix + tail
        explored += 1
        if connected_only:
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
        inv = [0] * k
        i = 0
        for b in nu:
            inv[b] = i
            i += 1
        total = 0
        for sig in sigmas:
            seen = 0
            cnt = 0
            for x in rng:
                if not (seen >> x) & 1:
                    cnt += 1
                    y = x
                    while not (seen >> y) & 1:
                        seen |= 1 << y
                        y = inv[sig[y]]
            total += cnt
        if total > best:
            best = total
            count = 1
            optima = [nu]
        elif total == best:
            count += 1
            if max_optima is None or len(optima) < max_optima:
                optima.append(nu)
    return best, count, optima, explored


def _scan_task(args):
    return _scan_coset(*args)


def _bnb_scan(sigmas, k, member_of, p, max_optima):
    """Depth-first search with an exact upper bound; same results as a scan.

    Bound: closed 0c-cycles so far plus one new cycle per color per
    remaining assignment.  A branch is cut only when it cannot reach the
    current best, so max, multiplicity and optima are unchanged.
    """
    D = len(sigmas)
    best = _f0(sigmas, tuple(range(k)))
    count = 0
    optima = []
    explored = 0
    connected_only = member_of is not None

    end_pair = [list(range(k)) for _ in range(D)]
    closed = [0] * D
    free = [True] * k
    nu = [0] * k

    def descend(s, closed_sum):
        nonlocal best, count, optima, explored
        if s == k:
            explored += 1
            total = closed_sum
            if connected_only:
                parent = list(range(p))
                comps = p
                for t in range(k):
                    a = member_of[t]
                    b = member_of[nu[t]]
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
                    return
            if total > best:
                best = total
                count = 1
                optima = [tuple(nu)]
            elif total == best:
                count += 1
                if max_optima is None or len(optima) < max_optima:
                    optima.append(tuple(nu))
            return
        remaining = k - s - 1
        for b in range(k):
            if not free[b]:
                continue
            free[b] = False
            nu[s] = b
            log = []
            gained = 0
            for c in range(D):
                v = sigmas[c][s]
                ep = end_pair[c]
                if b == v or ep[b] == v:
                    closed[c] += 1
                    gained += 1
                    log.append((c, None))
                else:
                    a, d = ep[b], ep[v]
                    ep[a] = d
                    ep[d] = a
                    log.append((c, (a, d, b, v)))
            new_sum = closed_sum + gained
            # the connectivity filter only discards completions, so the
            # bound stays valid for the constrained maximum as well
            if new_sum + D * remaining >= best:
                descend(s + 1, new_sum)
            for c, entry in reversed(log):
                if entry is None:
                    closed[c] -= 1
                else:
                    a, d, u, v = entry
                    end_pair[c][a] = u
                    end_pair[c][d] = v
            free[b] = True

    # seed best with one valid completion so the bound has a base line;
    # for the connected variant start from nothing
    if connected_only:
        best = -1
    descend(0, 0)
    optima.sort()
    return best, count, optima, explored


def _run_search(sigmas, k, member_of, p, workers, prune, max_optima):
    if prune:
        return _bnb_scan(sigmas, k, member_of, p, max_optima)
    if workers <= 1 or k < 6:
        return _scan_coset(sigmas, k, None, member_of, p, max_optima)
    tasks = [(sigmas, k, j, member_of, p, max_optima) for j in range(k)]
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(processes=min(workers, k)) as pool:
        parts = pool.map(_scan_task, tasks)
    best = max(part[0] for part in parts)
    count = 0
    optima = []
    explored = 0
    for pbest, pcount, popt, pexp in parts:
        explored += pexp
        if pbest == best:
            count += pcount
            optima.extend(popt)
    if max_optima is not None:
        optima = optima[:max_optima]
    return best, count, optima, explored


def search_f0(
    G: ColoredGraph,
    kmax: Optional[int] = None,
    workers: int = 1,
    prune: bool = False,
    max_optima: Optional[int] = None,
) -> SearchReport:
    """Exact maximum of pairing_f0 over all k! pairings."""
    _check_budget(G.k, kmax)
    best, count, optima, explored = _run_search(
        G.sigma, G.k, None, 0, workers, prune, max_optima
    )
    return SearchReport(best, count, tuple(optima), explored)


def search_f0_connected(
    family: GraphFamily,
    kmax: Optional[int] = None,
    workers: int = 1,
    prune: bool = False,
    max_optima: Optional[int] = None,
) -> SearchReport:
    """Exact maximum restricted to pairings that connect the family members."""
    union = family.union()
    _check_budget(union.k, kmax)
    member_of = family.member_of_label()
    best, count, optima, explored = _run_search(
        union.sigma, union.k, member_of, family.p, workers, prune, max_optima
    )
    return SearchReport(best, count, tuple(optima), explored)


@dataclass(frozen=True)
class KConnectivityReport:
    connected: bool
    partition: tuple  # member-index blocks, sorted


def k_connectivity(family: GraphFamily, nu) -> KConnectivityReport:
    """Partition of the members induced by the cross-member color-0 edges."""
    union = family.union()
    nu = perms.check_perm(nu)
    if len(nu) != union.k:
        raise ValueError(f"pairing has size {len(nu)}, union has k={union.k}")
    member_of = family.member_of_label()
    p = family.p
    parent = list(range(p))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in range(union.k):
        a, b = find(member_of[s]), find(member_of[nu[s]])
        if a != b:
            parent[a] = b
    blocks = {}
    for i in range(p):
        blocks.setdefault(find(i), []).append(i)
    partition = tuple(tuple(v) for v in sorted(blocks.values()))
    return KConnectivityReport(connected=len(partition) == 1, partition=partition)


@dataclass(frozen=True)
class GammaTreeReport:
    is_tree: bool
    kappa_hat: int


def gamma_tree_check(family: GraphFamily, nu) -> GammaTreeReport:
    """Check whether the component-member incidence graph is a tree.

    A connecting pairing satisfies kappa(G-hat) <= kappa(G) - p + 1 with
    equality exactly on trees; kappa_hat is counted on the completed union.
    """
    union = family.union()
    nu = perms.check_perm(nu)
    if len(nu) != union.k:
        raise ValueError(f"pairing has size {len(nu)}, union has k={union.k}")
    k = union.k
    parent = list(range(2 * k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union_(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for p_ in union.sigma:
        for s in range(k):
            union_(s, k + p_[s])
    for s in range(k):
        union_(s, k + nu[s])
    kappa_hat = len({find(s) for s in range(k)})
    kappa_g = sum(g.n_components() for g in family.graphs())
    return GammaTreeReport(is_tree=kappa_hat == kappa_g - family.p + 1, kappa_hat=kappa_hat)


@dataclass(frozen=True)
class DegreeReport:
    omega2: int  # reduced Gurau degree, (2/(D-2)!) omega
    delta: Fraction  # degree of compatibility
    compatible: bool

    @property
    def delta_doubled(self) -> int:
        """2*delta, always integral."""
        return int(2 * self.delta)


def degree_report(
    G: ColoredGraph, kmax: Optional[int] = None, workers: int = 1, f0_max: Optional[int] = None
) -> DegreeReport:
    """Reduced Gurau degree and degree of compatibility, exact.

    f0_max may be supplied to skip the enumeration.
    """
    stats = graph_stats(G)
    D, k, F = G.D, G.k, stats.F_total
    omega2 = (D - 1) * stats.kappa + (D - 1) * (D - 2) * k // 2 - F
    if f0_max is None:
        f0_max = search_f0(G, kmax=kmax, workers=workers).f0_max
    delta = Fraction(D * (D - 1) * k, 4) + Fraction(F, 2) - Fraction((D - 1) * f0_max, 2)
    return DegreeReport(omega2=omega2, delta=delta, compatible=delta == 0)


def gurau_bound(G: ColoredGraph, kappa_hat: int) -> int:
    """Upper bound on F0 for completions with kappa_hat components."""
    stats = graph_stats(G)
    if not 1 <= kappa_hat <= stats.kappa:
        raise ValueError(f"kappa_hat={kappa_hat} out of range 1..{stats.kappa}")
    D = G.D
    bound = Fraction(D * G.k, 2) + Fraction(stats.F_total, D - 1) - D * (stats.kappa - kappa_hat)
    return bound.numerator // bound.denominator


@dataclass(frozen=True)
class MstPairReport:
    f0_union: int
    nonfactorizing: bool
    f0_single: int


def mst_pair_f0(
    H: ColoredGraph, kmax: Optional[int] = None, workers: int = 1, f0_max: Optional[int] = None
) -> MstPairReport:
    """F0-maximum of {H, conjugate(H)} without searching S_{2k}.

    Valid for maximally single-trace H only: the mirror pairing yields
    D*k(H) and the component bound caps connected completions at the same
    value, while split completions cap at twice the single-graph maximum.
    """
    if not graph_stats(H).is_mst:
        raise ValueError("mst_pair_f0 requires a maximally single-trace graph")
    if f0_max is None:
        f0_max = search_f0(H, kmax=kmax, workers=workers).f0_max
    f0_union = max(2 * f0_max, H.D * H.k)
    return MstPairReport(
        f0_union=f0_union,
        nonfactorizing=2 * f0_max <= H.D * H.k,
        f0_single=f0_max,
    )


def cayley_delta(
    G: ColoredGraph,
    nu,
    kmax: Optional[int] = None,
    workers: int = 1,
    f0_max: Optional[int] = None,
) -> Fraction:
    """Degree of compatibility as a sum of Cayley-distance triangle defects.

    Only valid at a dominant pairing; non-dominant nu is refused.
    """
    nu = perms.check_perm(nu)
    if f0_max is None:
        f0_max = search_f0(G, kmax=kmax, workers=workers).f0_max
    if pairing_f0(G, nu) != f0_max:
        raise ValueError("cayley_delta requires a dominant pairing")
    k = G.k

    def dist(a, b):
        return k - perms.cycle_count(perms.compose(a, perms.inverse(b)))

    total = Fraction(0)
    D = G.D
    for i in range(D):
        for j in range(i + 1, D):
            si, sj = G.sigma[i], G.sigma[j]
            total += Fraction(dist(si, nu) + dist(nu, sj) - dist(si, sj), 2)
    return total


@dataclass(frozen=True)
class TreelikeReport:
    has_treelike: bool
    only_treelike: bool
    classified: tuple  # (pairing, is_treelike) over the connected optima
    f0_connected: int
    tree_value: int  # D + sum_i (F0_i - D)


def treelike_report(
    family: GraphFamily, kmax: Optional[int] = None, workers: int = 1
) -> TreelikeReport:
    """Tree-like classification of the connected dominant pairings.

    has_treelike holds when the connected maximum equals the value shared
    by all tree-like completions; each connected optimum is then tagged by
    the maximal two-cut property, member by member.
    """
    D = family.D
    member_reports = [search_f0(g, kmax=kmax, workers=workers) for g in family.graphs()]
    connected = search_f0_connected(family, kmax=kmax, workers=workers)
    tree_value = D + sum(rep.f0_max - D for rep in member_reports)
    has_treelike = connected.f0_max == tree_value
    member_optima = [rep.optima for rep in member_reports]
    classified = tuple(
        (nu, _is_treelike(family, nu, member_optima)) for nu in connected.optima
    )
    only_treelike = has_treelike and all(flag for _, flag in classified)
    return TreelikeReport(
        has_treelike=has_treelike,
        only_treelike=only_treelike,
        classified=classified,
        f0_connected=connected.f0_max,
        tree_value=tree_value,
    )


def _k_components_without(member_of, p, nu, skip):
    """Components of the member-incidence graph after dropping two 0-edges.

    Edges are identified by their white end; skip holds the two whites.
    """
    parent = list(range(p))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = p
    for s in range(len(nu)):
        if s in skip:
            continue
        a, b = find(member_of[s]), find(member_of[nu[s]])
        if a != b:
            parent[a] = b
            comps -= 1
    return comps


def _is_treelike(family: GraphFamily, nu, member_optima) -> bool:
    member_of = family.member_of_label()
    p = family.p
    inv_nu = perms.inverse(nu)
    for i, opts in enumerate(member_optima):
        off = family.offsets[i]
        ki = family.members[i][1].k
        member_ok = False
        for pi in opts:
            ok = True
            for w in range(ki):
                gw = off + w
                gb = off + pi[w]
                if nu[gw] == gb:
                    continue
                skip = (gw, inv_nu[gb])
                if _k_components_without(member_of, p, nu, skip) == 1:
                    ok = False
                    break
            if ok:
                member_ok = True
                break
        if not member_ok:
            return False
    return True
