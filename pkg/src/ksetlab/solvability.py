"""Brute-force k-set agreement solvability at a fixed horizon, and bound reports.

A protocol complex admits a k-set agreement protocol iff its vertices can be
labeled with decision values such that every vertex decides a value it has
seen and every facet (one execution) carries at most k distinct decisions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .execution import (ALL, BudgetExceeded, FailureMode, count_failure_patterns, enumeration_budget,
                        protocol_complex)
from .graphs import (INF, DirectedGraph, GraphLike, GraphSequence, d_of_g_t_witness, domination_witness,
                     induced_subgraph, product, rad_tk_witness)
from .topology import Complex, uniform_pseudosphere
from .views import input_values, label_key, vertex_key

SAT, UNSAT, BUDGET = "SAT", "UNSAT", "BUDGET"
DEFAULT_NODE_BUDGET = 10_000_000


@dataclass
class TaskSpec:
    n: int
    t: int
    k: int
    graphs: GraphLike
    mode: FailureMode = ALL
    values: tuple | None = None

    def __post_init__(self):
        if self.values is None:
            self.values = tuple(range(1, self.k + 2))
        self.values = tuple(self.values)
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if len(self.values) < self.k + 1:
            raise ValueError("need at least k+1 input values")
        if not 0 <= self.t < self.n:
            raise ValueError(f"need 0 <= t < n (t={self.t}, n={self.n})")
        if self.graphs.nodes != frozenset(range(1, self.n + 1)):
            raise ValueError("graph nodes must be 1..n")
        if self.mode.kind == "exactly-k" and self.t % self.mode.k:
            raise ValueError("exactly-k mode needs k | t")

    def input_complex(self) -> Complex:
        return uniform_pseudosphere(self.n, self.values)

    def protocol(self, rounds: int, budget: int | None = None) -> Complex:
        seq = self.graphs
        if isinstance(seq, GraphSequence) and len(seq) < rounds:
            raise ValueError(f"graph sequence too short for {rounds} rounds")
        return protocol_complex(seq, self.input_complex(), rounds, self.mode, self.t, budget)

    def to_json(self) -> dict:
        return {"n": self.n, "t": self.t, "k": self.k, "mode": self.mode.label(), "values": list(self.values)}


@dataclass
class DecisionMapSearchResult:
    status: str
    map: dict | None = None
    nodes: int = 0
    vertices: int = 0
    facets: int = 0

    def to_json(self, encode=None) -> dict:
        doc = {"status": self.status, "nodes": self.nodes, "vertices": self.vertices, "facets": self.facets}
        if self.map is not None and encode is not None:
            doc["map"] = [[v.color, encode(v.label), x] for v, x in sorted(self.map.items(),
                                                                           key=lambda kv: vertex_key(kv[0]))]
        return doc


class _Search:
    """Backtracking with facet-level propagation over bitmask domains."""

    def __init__(self, P: Complex, k: int, budget: int):
        self.k = k
        self.budget = budget
        verts = sorted(P.vertices(), key=lambda v: (len(input_values(v.label)), vertex_key(v)))
        self.verts = verts
        index = {v: i for i, v in enumerate(verts)}
        vals = sorted({x for v in verts for x in input_values(v.label)}, key=label_key)
        self.vals = vals
        vidx = {x: i for i, x in enumerate(vals)}
        self.dom = [sum(1 << vidx[x] for x in input_values(v.label)) for v in verts]
        self.facets = [[index[v] for v in f] for f in P.sorted_facets()]
        self.vfacets = [[] for _ in verts]
        for fi, f in enumerate(self.facets):
            for i in f:
                self.vfacets[i].append(fi)
        self.val = [-1] * len(verts)
        self.count = [dict() for _ in self.facets]
        self.trail: list = []
        self.nodes = 0

    def _assign(self, i: int, x: int, queue: list) -> bool:
        self.val[i] = x
        self.trail.append(("v", i))
        for fi in self.vfacets[i]:
            cnt = self.count[fi]
            c = cnt.get(x, 0)
            cnt[x] = c + 1
            self.trail.append(("c", fi, x))
            if c:
                continue
            if len(cnt) > self.k:
                return False
            if len(cnt) == self.k:
                mask = 0
                for y in cnt:
                    mask |= 1 << y
                for u in self.facets[fi]:
                    if self.val[u] >= 0:
                        continue
                    old = self.dom[u]
                    new = old & mask
                    if new != old:
                        if not new:
                            return False
                        self.dom[u] = new
                        self.trail.append(("d", u, old))
                        if new & (new - 1) == 0:
                            queue.append(u)
        return True

    def _propagate(self, i: int, x: int) -> bool:
        queue: list = []
        if not self._assign(i, x, queue):
            return False
        while queue:
            u = queue.pop()
            if self.val[u] >= 0:
                continue
            d = self.dom[u]
            if not self._assign(u, d.bit_length() - 1, queue):
                return False
        return True

    def _undo(self, mark: int):
        trail = self.trail
        while len(trail) > mark:
            e = trail.pop()
            if e[0] == "v":
                self.val[e[1]] = -1
            elif e[0] == "c":
                cnt = self.count[e[1]]
                c = cnt[e[2]] - 1
                if c:
                    cnt[e[2]] = c
                else:
                    del cnt[e[2]]
            else:
                self.dom[e[1]] = e[2]

    def _next_var(self, start: int) -> int:
        n = len(self.verts)
        while start < n and self.val[start] >= 0:
            start += 1
        return start

    def run(self) -> str:
        # Explicit stack: (variable, remaining value bits, trail mark).
        n = len(self.verts)
        stack = []
        var = self._next_var(0)
        if var == n:
            return SAT
        stack.append([var, self.dom[var], len(self.trail)])
        while stack:
            frame = stack[-1]
            var, remaining, mark = frame
            self._undo(mark)
            if not remaining:
                stack.pop()
                continue
            low = remaining & -remaining
            frame[1] = remaining ^ low
            self.nodes += 1
            if self.nodes > self.budget:
                return BUDGET
            if self._propagate(var, low.bit_length() - 1):
                nxt = self._next_var(var + 1)
                if nxt == n:
                    return SAT
                stack.append([nxt, self.dom[nxt], len(self.trail)])
        return UNSAT

    def decision_map(self) -> dict:
        return {v: self.vals[self.val[i]] for i, v in enumerate(self.verts)}


def decision_map_exists(P: Complex, k: int, budget: int | None = None) -> DecisionMapSearchResult:
    """Search for a decision map: a value from each vertex's view, at most k values per facet."""
    if k < 1:
        raise ValueError("k must be at least 1")
    budget = DEFAULT_NODE_BUDGET if budget is None else budget
    s = _Search(P, k, budget)
    status = s.run()
    res = DecisionMapSearchResult(status, None, s.nodes, len(s.verts), len(s.facets))
    if status == SAT:
        res.map = s.decision_map()
    return res


def check_decision_map(P: Complex, k: int, decision: dict) -> bool:
    for f in P.facets:
        if len({decision[v] for v in f}) > k:
            return False
        if any(decision[v] not in input_values(v.label) for v in f):
            return False
    return True


@dataclass
class ScanResult:
    spec: TaskSpec
    r_max: int
    statuses: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    exact: int | None = None
    budget_hit: bool = False

    def to_json(self) -> dict:
        return {
            "task": self.spec.to_json(),
            "rmax": self.r_max,
            "per_round": [{"rounds": r, "status": self.statuses[r], **self.stats[r]} for r in sorted(self.statuses)],
            "exact": self.exact if self.exact is not None else "unknown",
            "budget_hit": self.budget_hit,
        }


def scan_rounds(spec: TaskSpec, r_max: int, r_min: int = 0, node_budget: int | None = None,
                enum_budget: int | None = None) -> ScanResult:
    res = ScanResult(spec, r_max)
    for r in range(r_min, r_max + 1):
        try:
            P = spec.protocol(r, enum_budget)
        except BudgetExceeded as exc:
            res.statuses[r] = BUDGET
            res.stats[r] = {"executions": exc.count}
            res.budget_hit = True
            break
        out = decision_map_exists(P, spec.k, node_budget)
        res.statuses[r] = out.status
        res.stats[r] = {"nodes": out.nodes, "vertices": out.vertices, "facets": out.facets}
        if out.status == BUDGET:
            res.budget_hit = True
            break
        if out.status == SAT:
            res.exact = r
            break
    return res


def min_rounds_solvable(spec: TaskSpec, r_max: int, node_budget: int | None = None):
    """Least r <= r_max admitting a decision map, or None ("unknown")."""
    res = scan_rounds(spec, r_max, node_budget=node_budget)
    if res.budget_hit:
        raise BudgetExceeded("solvability scan", r_max, node_budget or DEFAULT_NODE_BUDGET)
    return res.exact


def _json_num(x):
    return "inf" if x == INF else x


def bounds_report(spec: TaskSpec, r_max: int | None = None, node_budget: int | None = None) -> dict:
    G = spec.graphs
    if not isinstance(G, DirectedGraph):
        raise ValueError("bounds_report needs a static graph")
    base = spec.t // spec.k
    rad, (D, Dp) = rad_tk_witness(G, spec.t, spec.k)
    dgt, S = d_of_g_t_witness(G, spec.t)
    lower = base + rad
    upper = base + dgt
    doc = {
        "task": spec.to_json(),
        "rad": _json_num(rad),
        "rad_witness": {"D": sorted(D), "D_prime": sorted(Dp)},
        "D": _json_num(dgt),
        "D_witness": {"S": sorted(S)},
        "lower": _json_num(lower),
        "upper": _json_num(upper),
        "overhead_window": [_json_num(rad - 1), _json_num(dgt - 1)],
    }
    if r_max is not None:
        scan = scan_rounds(spec, r_max, node_budget=node_budget)
        doc["scan"] = scan.to_json()
        doc["exact"] = scan.exact if scan.exact is not None else "unknown"
        if scan.exact is not None:
            doc["sandwich"] = "OK" if lower <= scan.exact <= upper else "VIOLATED"
    return doc


def dominance_precondition(G: DirectedGraph, k: int, t: int, r: int) -> dict:
    """Is the r-round product of every (n-t)-node induced subgraph dominated only by > k nodes?"""
    if r < 1:
        raise ValueError("r must be at least 1")
    best, best_S, best_dom = None, None, None
    for S in combinations(sorted(G.nodes), G.n - t):
        H = induced_subgraph(G, S)
        gamma, dom = domination_witness(product(GraphSequence.repeat(H, r)))
        if best is None or gamma < best:
            best, best_S, best_dom = gamma, frozenset(S), dom
    return {
        "holds": best > k,
        "min_gamma": best,
        "witness": {"S": sorted(best_S), "dominating_set": sorted(best_dom)},
    }


def count_executions(spec: TaskSpec, rounds: int) -> int:
    per_facet = count_failure_patterns(spec.n, spec.t, rounds, spec.graphs, spec.mode)
    return per_facet * len(spec.values) ** spec.n


__all__ = [
    "SAT", "UNSAT", "BUDGET", "TaskSpec", "DecisionMapSearchResult", "decision_map_exists", "check_decision_map",
    "ScanResult", "scan_rounds", "min_rounds_solvable", "bounds_report", "dominance_precondition",
    "count_executions", "enumeration_budget",
]
