"""Edge-colored bipartite graphs encoded by permutation tuples.

A graph with D colors and k white vertices is stored as D permutations of
size k: the color-c edge at white vertex s ends on black vertex
``sigma[c][s]``.  Vertex labels and color indices are 0-based in code;
JSON and cycle strings use 1-based vertex labels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from . import perms


@dataclass(frozen=True)
class ColoredGraph:
    D: int
    k: int
    sigma: tuple  # D permutations, white label -> black label

    def __post_init__(self):
        if self.D < 2:
            raise ValueError(f"need at least 2 colors, got D={self.D}")
        if self.k < 1:
            raise ValueError(f"need at least one white vertex, got k={self.k}")
        if len(self.sigma) != self.D:
            raise ValueError(f"expected {self.D} permutations, got {len(self.sigma)}")
        checked = []
        for c, p in enumerate(self.sigma):
            try:
                q = perms.check_perm(p)
            except ValueError as exc:
                raise ValueError(f"sigma[{c}] invalid: {exc}") from exc
            if len(q) != self.k:
                raise ValueError(f"sigma[{c}] has size {len(q)}, expected {self.k}")
            checked.append(q)
        object.__setattr__(self, "sigma", tuple(checked))

    def face_count(self, i: int, j: int) -> int:
        """Number of faces with colors i and j (0-based color indices)."""
        return perms.cycle_count(perms.compose(self.sigma[i], perms.inverse(self.sigma[j])))

    def n_components(self) -> int:
        return len(component_labels(self))

    def to_json_dict(self) -> dict:
        return {
            "D": self.D,
            "k": self.k,
            "sigma": [[b + 1 for b in p] for p in self.sigma],
        }

    def __str__(self):
        body = ", ".join(perms.to_cycle_string(p) for p in self.sigma)
        return f"ColoredGraph(D={self.D}, k={self.k}, sigma=[{body}])"


def build_graph(D: int, sigma) -> ColoredGraph:
    """Construct and validate a graph from D image arrays (0-based)."""
    sigma = [tuple(p) for p in sigma]
    if not sigma:
        raise ValueError("no permutations given")
    return ColoredGraph(D=D, k=len(sigma[0]), sigma=tuple(sigma))


def graph_from_json_dict(data: dict) -> ColoredGraph:
    """Parse graph JSON: 1-based image arrays or cycle-string sugar."""
    try:
        D = int(data["D"])
    except KeyError:
        raise ValueError("graph JSON missing field 'D'")
    if "sigma" in data:
        raw = data["sigma"]
        sigma = []
        for c, images in enumerate(raw):
            try:
                sigma.append(tuple(int(b) - 1 for b in images))
            except (TypeError, ValueError):
                raise ValueError(f"graph JSON field 'sigma[{c}]' is not an integer array")
    elif "sigma_cycles" in data:
        if "k" not in data:
            raise ValueError("graph JSON with 'sigma_cycles' requires explicit 'k'")
        k = int(data["k"])
        sigma = [perms.from_cycle_string(k, text) for text in data["sigma_cycles"]]
    else:
        raise ValueError("graph JSON missing field 'sigma' (or 'sigma_cycles')")
    G = build_graph(D, sigma)
    if "k" in data and int(data["k"]) != G.k:
        raise ValueError(f"graph JSON field 'k'={data['k']} inconsistent with sigma size {G.k}")
    return G


def load_graph(path: str) -> ColoredGraph:
    with open(path) as fh:
        return graph_from_json_dict(json.load(fh))


@dataclass(frozen=True)
class GraphFamily:
    """Ordered multiset of named member graphs, viewed inside their disjoint union.

    Member i occupies white labels [offsets[i], offsets[i] + k_i) of the
    union, and likewise for black labels.
    """

    members: tuple  # of (name, ColoredGraph)
    offsets: tuple = field(init=False)

    def __post_init__(self):
        if not self.members:
            raise ValueError("family needs at least one member")
        members = tuple((str(name), g) for name, g in self.members)
        D = members[0][1].D
        for name, g in members:
            if g.D != D:
                raise ValueError(f"member {name!r} has D={g.D}, expected {D}")
        offsets = []
        total = 0
        for _, g in members:
            offsets.append(total)
            total += g.k
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "offsets", tuple(offsets))

    @property
    def D(self) -> int:
        return self.members[0][1].D

    @property
    def p(self) -> int:
        return len(self.members)

    @property
    def total_k(self) -> int:
        return sum(g.k for _, g in self.members)

    def graphs(self) -> list:
        return [g for _, g in self.members]

    def member_of_label(self) -> list:
        """Member index of each white (equally, black) label of the union."""
        out = []
        for i, (_, g) in enumerate(self.members):
            out.extend([i] * g.k)
        return out

    def union(self) -> ColoredGraph:
        return disjoint_union(self.graphs())[0]

    def subfamily(self, indices) -> "GraphFamily":
        return GraphFamily(tuple(self.members[i] for i in indices))

    def to_json_dict(self) -> dict:
        return {"members": [{"name": name, "graph": g.to_json_dict()} for name, g in self.members]}


def family_of(graphs, names=None) -> GraphFamily:
    if names is None:
        names = [f"G{i + 1}" for i in range(len(graphs))]
    return GraphFamily(tuple(zip(names, graphs)))


def family_from_json_dict(data: dict) -> GraphFamily:
    try:
        raw = data["members"]
    except KeyError:
        raise ValueError("family JSON missing field 'members'")
    members = []
    for i, entry in enumerate(raw):
        name = entry.get("name", f"G{i + 1}")
        if "graph" not in entry:
            raise ValueError(f"family member {i} missing field 'graph'")
        members.append((name, graph_from_json_dict(entry["graph"])))
    return GraphFamily(tuple(members))


def load_family(path: str) -> GraphFamily:
    with open(path) as fh:
        data = json.load(fh)
    if "members" in data:
        return family_from_json_dict(data)
    # a bare graph file is accepted as a one-member family
    return family_of([graph_from_json_dict(data)])


@dataclass(frozen=True)
class GraphStats:
    k: int
    kappa: int
    F_pairwise: tuple  # D x D symmetric, zero on the diagonal
    F_total: int
    is_mst: bool
    is_planar3: bool


def graph_stats(G: ColoredGraph) -> GraphStats:
    D, k = G.D, G.k
    mat = [[0] * D for _ in range(D)]
    total = 0
    for i in range(D):
        for j in range(i + 1, D):
            f = G.face_count(i, j)
            mat[i][j] = mat[j][i] = f
            total += f
    kappa = G.n_components()
    is_mst = all(mat[i][j] == 1 for i in range(D) for j in range(i + 1, D))
    is_planar3 = D == 3 and total == 2 * kappa + k
    return GraphStats(
        k=k,
        kappa=kappa,
        F_pairwise=tuple(tuple(row) for row in mat),
        F_total=total,
        is_mst=is_mst,
        is_planar3=is_planar3,
    )


def component_labels(G: ColoredGraph) -> list:
    """Connected components of the bipartite graph, as lists of white labels.

    Whites and blacks pair up inside a component, so white labels determine it.
    """
    k = G.k
    parent = list(range(2 * k))  # whites 0..k-1, blacks k..2k-1

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in G.sigma:
        for s in range(k):
            a, b = find(s), find(k + p[s])
            if a != b:
                parent[a] = b
    groups = {}
    for s in range(k):
        groups.setdefault(find(s), []).append(s)
    return sorted(groups.values())


def connected_components(G: ColoredGraph) -> list:
    """Split into component subgraphs, each relabeled to 0..k_c-1.

    Returns a list of (subgraph, white_labels) with white_labels the original
    labels, in increasing order.
    """
    out = []
    for whites in component_labels(G):
        pos = {s: i for i, s in enumerate(whites)}
        # black labels of a component coincide with its white label set only
        # up to the sigma maps; collect them per component
        blacks = sorted({G.sigma[0][s] for s in whites})
        bpos = {b: i for i, b in enumerate(blacks)}
        sigma = []
        for p in G.sigma:
            sigma.append(tuple(bpos[p[s]] for s in whites))
        out.append((ColoredGraph(D=G.D, k=len(whites), sigma=tuple(sigma)), whites))
    return out


def disjoint_union(parts) -> tuple:
    """Disjoint union of graphs sharing the same D.

    Returns (union graph, GraphFamily recording the block offsets).
    """
    parts = list(parts)
    if not parts:
        raise ValueError("empty union")
    D = parts[0].D
    for g in parts:
        if g.D != D:
            raise ValueError(f"mixed color counts in union: {g.D} != {D}")
    sigma = []
    for c in range(D):
        images = []
        offset = 0
        for g in parts:
            images.extend(offset + b for b in g.sigma[c])
            offset += g.k
        sigma.append(tuple(images))
    union = ColoredGraph(D=D, k=sum(g.k for g in parts), sigma=tuple(sigma))
    return union, family_of(parts)


def conjugate(G: ColoredGraph) -> ColoredGraph:
    """Swap black and white on every vertex.

    In the permutation encoding the old black b becomes the new white b, so
    every permutation is replaced by its inverse.
    """
    return ColoredGraph(D=G.D, k=G.k, sigma=tuple(perms.inverse(p) for p in G.sigma))


def flip_edges(G: ColoredGraph, c: int, s1: int, s2: int) -> ColoredGraph:
    """Exchange the color-c edges at white vertices s1 and s2."""
    if s1 == s2:
        raise ValueError("flip needs two distinct white vertices")
    if not (0 <= c < G.D):
        raise ValueError(f"color index {c} out of range 0..{G.D - 1}")
    img = list(G.sigma[c])
    img[s1], img[s2] = img[s2], img[s1]
    sigma = list(G.sigma)
    sigma[c] = tuple(img)
    return ColoredGraph(D=G.D, k=G.k, sigma=tuple(sigma))


@dataclass(frozen=True)
class BoundaryReport:
    internal_f0: int
    boundary: Optional[ColoredGraph]  # None when the pairing is full
    boundary_k: int
    white_map: tuple  # new white label -> original white label
    black_map: tuple  # new black label -> original black label


def boundary_graph(G: ColoredGraph, matches: dict) -> BoundaryReport:
    """Attach color-0 edges per the partial pairing and take the boundary.

    ``matches`` maps white labels to black labels (0-based), injectively.
    For every color c the 0c-restriction splits into closed cycles (counted
    by internal_f0) and open paths; each open path contributes a color-c
    edge of the boundary graph between its two end vertices.
    """
    k = G.k
    matched_black = {}
    for w, b in matches.items():
        if not (0 <= w < k and 0 <= b < k):
            raise ValueError(f"pairing entry {w}->{b} out of range")
        if b in matched_black:
            raise ValueError(f"pairing not injective: black {b} matched twice")
        matched_black[b] = w
    free_whites = sorted(set(range(k)) - set(matches))
    free_blacks = sorted(set(range(k)) - set(matched_black))
    white_pos = {w: i for i, w in enumerate(free_whites)}
    black_pos = {b: i for i, b in enumerate(free_blacks)}

    internal = 0
    boundary_sigma = []
    for p in G.sigma:
        # open 0c-paths start at free whites and end at free blacks
        images = [None] * len(free_whites)
        for w in free_whites:
            b = p[w]
            while b in matched_black:
                b = p[matched_black[b]]
            images[white_pos[w]] = black_pos[b]
        boundary_sigma.append(tuple(images))
        # closed 0c-cycles visit matched whites only
        seen = set()
        for w0 in matches:
            if w0 in seen:
                continue
            w = w0
            closed = True
            cyc = []
            while w not in seen:
                seen.add(w)
                cyc.append(w)
                b = p[w]
                if b not in matched_black:
                    closed = False
                    break
                w = matched_black[b]
            if closed and w == w0:
                internal += 1
            # a walk that left the matched set, or merged into an earlier
            # path, marks its whites as seen either way
    if free_whites:
        boundary = ColoredGraph(D=G.D, k=len(free_whites), sigma=tuple(boundary_sigma))
    else:
        boundary = None
    return BoundaryReport(
        internal_f0=internal,
        boundary=boundary,
        boundary_k=len(free_whites),
        white_map=tuple(free_whites),
        black_map=tuple(free_blacks),
    )
