"""Directed communication graphs and the graph quantities the round bounds are stated in.

Nodes are process ids (positive ints). Every graph carries all of its self-loops,
so a process always "hears" its own previous state. Unbounded quantities are
reported as ``INF`` (``math.inf``), which compares correctly against ints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Sequence, Union

INF = math.inf

Edge = tuple[int, int]


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _mask(nodes: Iterable[int]) -> int:
    m = 0
    for v in nodes:
        m |= 1 << v
    return m


@dataclass(frozen=True)
class DirectedGraph:
    nodes: frozenset
    edges: frozenset

    def __post_init__(self):
        for u, v in self.edges:
            if u not in self.nodes or v not in self.nodes:
                raise ValueError(f"edge ({u},{v}) leaves the node set")
        for p in self.nodes:
            if (p, p) not in self.edges:
                raise ValueError(f"missing self-loop at {p}")

    @classmethod
    def build(cls, nodes: Iterable[int], edges: Iterable[Edge] = (), directed: bool = True) -> "DirectedGraph":
        """Normalizing constructor: adds self-loops and, if undirected, reverse edges."""
        nodes = frozenset(nodes)
        es = set()
        for u, v in edges:
            es.add((u, v))
            if not directed:
                es.add((v, u))
        es.update((p, p) for p in nodes)
        return cls(nodes, frozenset(es))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge] = (), directed: bool = True) -> "DirectedGraph":
        return cls.build(range(1, n + 1), edges, directed)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @cached_property
    def out_mask(self) -> dict:
        out = {p: 0 for p in self.nodes}
        for u, v in self.edges:
            out[u] |= 1 << v
        return out

    @cached_property
    def node_mask(self) -> int:
        return _mask(self.nodes)

    def out_neighbors(self, p: int) -> frozenset:
        return frozenset(q for (u, q) in self.edges if u == p)

    def in_neighbors(self, q: int) -> frozenset:
        return frozenset(p for (p, v) in self.edges if v == q)

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges

    def proper_edges(self) -> list:
        return sorted(e for e in self.edges if e[0] != e[1])

    def to_dot(self, name: str = "G") -> str:
        lines = [f"digraph {name} {{"]
        lines += [f"  {p};" for p in sorted(self.nodes)]
        lines += [f"  {u} -> {v};" for u, v in self.proper_edges()]
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class GraphSequence:
    rounds: tuple = field()

    def __post_init__(self):
        if not self.rounds:
            raise ValueError("graph sequence must be non-empty")
        universe = self.rounds[0].nodes
        if any(g.nodes != universe for g in self.rounds):
            raise ValueError("graph sequence rounds have different node sets")

    @classmethod
    def of(cls, graphs: Iterable[DirectedGraph]) -> "GraphSequence":
        return cls(tuple(graphs))

    @classmethod
    def repeat(cls, g: DirectedGraph, r: int) -> "GraphSequence":
        return cls((g,) * r)

    @property
    def nodes(self) -> frozenset:
        return self.rounds[0].nodes

    def __len__(self) -> int:
        return len(self.rounds)

    def __iter__(self):
        return iter(self.rounds)

    def __getitem__(self, i):
        return self.rounds[i]

    def induced(self, S: Iterable[int]) -> "GraphSequence":
        S = frozenset(S)
        return GraphSequence(tuple(induced_subgraph(g, S) for g in self.rounds))


GraphLike = Union[DirectedGraph, GraphSequence]


# ---------------------------------------------------------------------------
# basic constructions

def complete_graph(n: int) -> DirectedGraph:
    return DirectedGraph.from_edges(n, ((u, v) for u in range(1, n + 1) for v in range(1, n + 1)))


def cycle_graph(n: int) -> DirectedGraph:
    return DirectedGraph.from_edges(n, ((i, i % n + 1) for i in range(1, n + 1)), directed=False)


def directed_ring(n: int) -> DirectedGraph:
    return DirectedGraph.from_edges(n, ((i, i % n + 1) for i in range(1, n + 1)))


def path_graph(n: int) -> DirectedGraph:
    return DirectedGraph.from_edges(n, ((i, i + 1) for i in range(1, n)), directed=False)


def empty_graph(n: int) -> DirectedGraph:
    return DirectedGraph.from_edges(n)


def hypercube_graph(d: int) -> DirectedGraph:
    """Q_d on nodes 1..2^d; node i+1 is the bit string i."""
    n = 1 << d
    edges = [(i + 1, (i ^ (1 << b)) + 1) for i in range(n) for b in range(d)]
    return DirectedGraph.from_edges(n, edges)


def from_networkx(nxg, directed: bool | None = None) -> DirectedGraph:
    """Relabel a networkx graph onto 1..n (in sorted node order)."""
    order = sorted(nxg.nodes())
    idx = {v: i + 1 for i, v in enumerate(order)}
    if directed is None:
        directed = nxg.is_directed()
    return DirectedGraph.from_edges(len(order), ((idx[u], idx[v]) for u, v in nxg.edges()), directed)


# ---------------------------------------------------------------------------
# operations

def induced_subgraph(G: DirectedGraph, S: Iterable[int]) -> DirectedGraph:
    S = frozenset(S)
    if not S:
        raise ValueError("empty induced set")
    if not S <= G.nodes:
        raise ValueError(f"nodes {sorted(S - G.nodes)} not in graph")
    return DirectedGraph(S, frozenset((u, v) for (u, v) in G.edges if u in S and v in S))


def _rounds_of(g: GraphLike, length: int | None = None) -> tuple:
    if isinstance(g, GraphSequence):
        return g.rounds
    if length is None:
        raise ValueError("static graph needs an explicit round count")
    return (g,) * length


def _spread(mask: int, g: DirectedGraph) -> int:
    out = g.out_mask
    res = 0
    for v in _bits(mask):
        res |= out[v]
    return res


def product(seq: GraphLike) -> DirectedGraph:
    """Temporal-path reachability over the rounds of ``seq``: (p,q) iff q hears from p."""
    rounds = _rounds_of(seq, 1)
    g0 = rounds[0]
    edges = []
    for p in g0.nodes:
        reach = 1 << p
        for g in rounds:
            reach = _spread(reach, g)
        edges.extend((p, q) for q in _bits(reach))
    return DirectedGraph(g0.nodes, frozenset(edges))


def compose(A: DirectedGraph, B: DirectedGraph) -> DirectedGraph:
    """Relational composition: (p,q) iff p->u in A and u->q in B for some u."""
    if A.nodes != B.nodes:
        raise ValueError("composition needs a common node set")
    edges = [(p, q) for p in A.nodes for q in _bits(_spread(A.out_mask[p], B))]
    return DirectedGraph(A.nodes, frozenset(edges))


def eccentricity(D: Iterable[int], g: GraphLike) -> float | int:
    """Rounds until flooding from all of D reaches every node; INF if it never does.

    A static graph is treated as repeated for n-1 rounds, a finite sequence is
    used as given.
    """
    D = frozenset(D)
    if not D:
        raise ValueError("eccentricity of an empty set")
    nodes = g.nodes
    if not D <= nodes:
        raise ValueError("D must be a subset of the graph's nodes")
    rounds = _rounds_of(g, max(len(nodes) - 1, 0))
    full = _mask(nodes)
    reach = _mask(D)
    if reach == full:
        return 0
    for r, gr in enumerate(rounds, start=1):
        reach = _spread(reach, gr)
        if reach == full:
            return r
    return INF


def diameter(G: DirectedGraph) -> float | int:
    worst = 0
    for p in G.nodes:
        e = eccentricity({p}, G)
        if e == INF:
            return INF
        worst = max(worst, e)
    return worst


def d_of_g_t_witness(G: DirectedGraph, t: int):
    """D(G,t) with the maximizing removal set S."""
    if not 0 <= t <= G.n - 1:
        raise ValueError(f"t must lie in [0, n-1], got {t}")
    best, witness = -1, frozenset()
    nodes = sorted(G.nodes)
    for size in range(t + 1):
        for S in combinations(nodes, size):
            d = diameter(induced_subgraph(G, G.nodes - set(S)))
            if d > best:
                best, witness = d, frozenset(S)
                if best == INF:
                    return best, witness
    return best, witness


def d_of_g_t(G: DirectedGraph, t: int):
    return d_of_g_t_witness(G, t)[0]


def big_rad_witness(g: GraphLike, m: int):
    nodes = sorted(g.nodes)
    if not 1 <= m <= len(nodes):
        raise ValueError(f"m must lie in [1, n], got {m}")
    best, witness = INF, None
    for D in combinations(nodes, m):
        e = eccentricity(D, g)
        if witness is None or e < best:
            best, witness = e, frozenset(D)
            if best == 0:
                break
    return best, witness


def big_rad(g: GraphLike, m: int):
    return big_rad_witness(g, m)[0]


def _induced_like(g: GraphLike, keep: frozenset) -> GraphLike:
    if isinstance(g, GraphSequence):
        return g.induced(keep)
    return induced_subgraph(g, keep)


def rad_tk_witness(g: GraphLike, t: int, k: int):
    """(t,k)-radius with witness (D, worst D')."""
    nodes = frozenset(g.nodes)
    if t < 0 or k < 1 or t + k > len(nodes):
        raise ValueError(f"need t >= 0, k >= 1, t+k <= n (t={t}, k={k}, n={len(nodes)})")
    best, witness = INF, None
    for D in combinations(sorted(nodes), t + k):
        D = frozenset(D)
        worst, worst_dp = -1, None
        for Dp in combinations(sorted(D), t):
            Dp = frozenset(Dp)
            e = eccentricity(D - Dp, _induced_like(g, nodes - Dp))
            if e > worst:
                worst, worst_dp = e, Dp
            if worst >= best and witness is not None:
                break
        if witness is None or worst < best:
            best, witness = worst, (D, worst_dp)
    return best, witness


def rad_tk(g: GraphLike, t: int, k: int):
    return rad_tk_witness(g, t, k)[0]


def domination_witness(G: DirectedGraph):
    """Minimum outgoing dominating set (exhaustive by increasing size)."""
    nodes = sorted(G.nodes)
    full = G.node_mask
    out = G.out_mask
    for size in range(0, len(nodes) + 1):
        for S in combinations(nodes, size):
            cover = 0
            for s in S:
                cover |= out[s]
            if cover == full:
                return size, frozenset(S)
    raise AssertionError("unreachable: the full node set dominates")


def domination_number_out(G: DirectedGraph) -> int:
    return domination_witness(G)[0]


def p_caused_edges(rounds: GraphSequence, p: int) -> frozenset:
    """Edges (u,q), u,q != p, whose every realizing temporal path passes through p."""
    if p not in rounds.nodes:
        raise ValueError(f"process {p} not in the graph sequence")
    with_p = product(rounds).edges
    rest = rounds.nodes - {p}
    if not rest:
        return frozenset()
    without_p = product(rounds.induced(rest)).edges
    return frozenset((u, q) for (u, q) in with_p if u != p and q != p and (u, q) not in without_p)


def union_graph(entries: Sequence, round_sources: Sequence | None = None) -> DirectedGraph:
    """Union of the per-petal product graphs with present-process edges pruned.

    ``entries`` is a list of ``(graph, present_process_or_None)``; entry 0 is the
    base graph and must carry ``None``. ``round_sources[i]`` is the round sequence
    whose product is ``entries[i][0]``; it is needed whenever a present process is
    given, to find the present-process-caused edges.
    """
    if not entries:
        raise ValueError("union of no graphs")
    if entries[0][1] is not None:
        raise ValueError("entry 0 is the base graph and has no present process")
    round_sources = list(round_sources) if round_sources is not None else [None] * len(entries)
    if len(round_sources) != len(entries):
        raise ValueError("one round source per entry is required")
    nodes, edges = set(), set()
    for (g, present), src in zip(entries, round_sources):
        if src is not None and src.nodes != g.nodes:
            raise ValueError("round source and product graph have mismatched universes")
        kept = set(g.edges)
        if present is not None:
            if src is None:
                raise ValueError(f"present process {present} needs its round sequence")
            if present not in g.nodes:
                raise ValueError(f"present process {present} not in its graph")
            kept -= {(u, v) for (u, v) in kept if v == present and u != present}
            kept -= p_caused_edges(src, present)
        nodes |= g.nodes
        edges |= kept
    return DirectedGraph(frozenset(nodes), frozenset(edges))


@dataclass(frozen=True)
class PetalInstance:
    """A base facet's graph plus petals that swap one process (or one input) each."""
    base: DirectedGraph
    rounds: int
    t: int
    base_names: frozenset
    petals: tuple  # (present, absent) pairs; present == absent means only the input changed

    def entries(self) -> tuple:
        """(product graph, present process or None) per entry, and the round sequences behind them."""
        seq0 = GraphSequence.repeat(induced_subgraph(self.base, self.base_names), self.rounds)
        entries, sources = [(product(seq0), None)], [seq0]
        for present, absent in self.petals:
            if present == absent:
                entries.append((product(seq0), None))
                sources.append(seq0)
                continue
            names_i = (self.base_names - {absent}) | {present}
            seq = GraphSequence.repeat(induced_subgraph(self.base, names_i), self.rounds)
            entries.append((product(seq), present))
            sources.append(seq)
        return tuple(entries), tuple(sources)

    def present_set(self) -> frozenset:
        return frozenset(p for p, a in self.petals if p != a)


def random_petal_instance(rng, n_max: int = 5, l_max: int = 3, edge_p: float = 0.4) -> PetalInstance:
    n = rng.randint(3, n_max)
    t = rng.randint(1, n - 2)
    edges = [(u, v) for u in range(1, n + 1) for v in range(1, n + 1) if u != v and rng.random() < edge_p]
    G = DirectedGraph.from_edges(n, edges)
    base = frozenset(rng.sample(range(1, n + 1), n - t))
    outside = sorted(G.nodes - base)
    petals = []
    for _ in range(rng.randint(1, l_max)):
        absent = rng.choice(sorted(base))
        present = absent if rng.random() < 0.25 else rng.choice(outside)
        petals.append((present, absent))
    return PetalInstance(G, rng.randint(1, 2), t, base, tuple(petals))
