"""Independent re-derivations used as oracles by the test suite.

Everything here is written against the definitions, not against the
package internals: naive cycle walks, full S_k scans, BFS connectivity,
and all-index contraction loops.
"""

import itertools

import numpy as np


def cycle_count_naive(p):
    left = set(range(len(p)))
    count = 0
    while left:
        count += 1
        x = left.pop()
        y = p[x]
        while y in left:
            left.remove(y)
            y = p[y]
    return count


def f0_naive(sigmas, nu):
    k = len(nu)
    inv_nu = {nu[s]: s for s in range(k)}
    total = 0
    for sig in sigmas:
        composed = tuple(sig[inv_nu[x]] for x in range(k))
        total += cycle_count_naive(composed)
    return total


def brute_f0(G):
    """(max, multiplicity, set of optimal pairings) over all of S_k."""
    best, count, opts = -1, 0, []
    for nu in itertools.permutations(range(G.k)):
        val = f0_naive(G.sigma, nu)
        if val > best:
            best, count, opts = val, 1, [nu]
        elif val == best:
            count += 1
            opts.append(nu)
    return best, count, set(opts)


def members_connected(member_of, nu):
    """BFS over the member graph induced by the cross edges of nu."""
    p = max(member_of) + 1
    adj = {i: set() for i in range(p)}
    for s, b in enumerate(nu):
        adj[member_of[s]].add(member_of[b])
        adj[member_of[b]].add(member_of[s])
    seen = {0}
    stack = [0]
    while stack:
        for j in adj[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == p


def brute_f0_connected(union_sigma, member_of):
    k = len(union_sigma[0])
    best, count, opts = -1, 0, []
    for nu in itertools.permutations(range(k)):
        if not members_connected(member_of, nu):
            continue
        val = f0_naive(union_sigma, nu)
        if val > best:
            best, count, opts = val, 1, [nu]
        elif val == best:
            count += 1
            opts.append(nu)
    return best, count, set(opts)


def union_component_count(sigmas, nu):
    """Components of the completed bipartite graph (whites 0..k-1, blacks k..2k-1)."""
    k = len(nu)
    adj = {x: set() for x in range(2 * k)}
    for sig in sigmas:
        for s in range(k):
            adj[s].add(k + sig[s])
            adj[k + sig[s]].add(s)
    for s in range(k):
        adj[s].add(k + nu[s])
        adj[k + nu[s]].add(s)
    seen = set()
    comps = 0
    for start in range(2 * k):
        if start in seen:
            continue
        comps += 1
        stack = [start]
        seen.add(start)
        while stack:
            for y in adj[stack.pop()]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    return comps


def trace_naive(G, S):
    """Sum over every assignment of one index per edge."""
    k, D, N = G.k, G.D, S.N
    inv = []
    for sig in G.sigma:
        m = [0] * k
        for s in range(k):
            m[sig[s]] = s
        inv.append(m)
    conj = np.conj(S.entries)
    total = 0j
    for assign in itertools.product(range(N), repeat=D * k):
        idx = lambda c, s: assign[c * k + s]
        term = 1 + 0j
        for s in range(k):
            term *= S.entries[tuple(idx(c, s) for c in range(D))]
        for t in range(k):
            term *= conj[tuple(idx(c, inv[c][t]) for c in range(D))]
        total += term
    return total
