"""Synchronous crash-prone rounds: failure patterns, full-information runs,
protocol complexes and the min-flooding algorithm."""
from __future__ import annotations

import hashlib
import itertools
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .graphs import INF, DirectedGraph, GraphLike, d_of_g_t
from .topology import Complex, maximal_sets, names
from .views import Vertex, View, encode_label

DEFAULT_BUDGET = 2_000_000


class BudgetExceeded(RuntimeError):
    def __init__(self, what: str, count: int, budget: int):
        super().__init__(f"{what}: {count} exceeds budget {budget}")
        self.count = count
        self.budget = budget


def enumeration_budget(default: int = DEFAULT_BUDGET) -> int:
    env = os.environ.get("KSETLAB_BUDGET")
    return int(env) if env else default


@dataclass(frozen=True, order=True)
class Crash:
    process: int
    round: int
    receivers: frozenset = frozenset()

    def to_json(self) -> dict:
        return {"p": self.process, "round": self.round, "receivers": sorted(self.receivers)}


@dataclass(frozen=True)
class FailurePattern:
    crashes: frozenset = frozenset()

    def __post_init__(self):
        procs = [c.process for c in self.crashes]
        if len(set(procs)) != len(procs):
            raise ValueError("a process crashes at most once")

    @classmethod
    def of(cls, crashes: Iterable[Crash]) -> "FailurePattern":
        return cls(frozenset(crashes))

    def crash_of(self, p: int):
        for c in self.crashes:
            if c.process == p:
                return c
        return None

    def faulty(self) -> frozenset:
        return frozenset(c.process for c in self.crashes)

    def to_json(self) -> list:
        return [c.to_json() for c in sorted(self.crashes, key=lambda c: c.process)]


NO_FAILURES = FailurePattern()


@dataclass(frozen=True)
class FailureMode:
    kind: str  # "all" | "clean" | "exactly-k" | "initially-dead"
    k: int | None = None
    t: int | None = None

    def __post_init__(self):
        if self.kind not in ("all", "clean", "exactly-k", "initially-dead"):
            raise ValueError(f"unknown failure mode {self.kind!r}")
        if self.kind == "exactly-k" and (self.k is None or self.k < 1):
            raise ValueError("exactly-k mode needs k >= 1")

    def label(self) -> str:
        if self.kind == "exactly-k":
            return f"exactly-{self.k}-per-round"
        if self.kind == "initially-dead" and self.t is not None:
            return f"initially-dead({self.t})"
        return self.kind


ALL = FailureMode("all")
CLEAN_ONLY = FailureMode("clean")


def exactly_k_per_round(k: int) -> FailureMode:
    return FailureMode("exactly-k", k=k)


def initially_dead(t: int | None = None) -> FailureMode:
    return FailureMode("initially-dead", t=t)


def parse_mode(text: str, k: int | None = None, t: int | None = None) -> FailureMode:
    text = text.lower().replace("_", "-")
    if text == "all":
        return ALL
    if text in ("clean", "clean-only"):
        return CLEAN_ONLY
    if text in ("exactly-k", "exactly-k-per-round"):
        return exactly_k_per_round(k)
    if text in ("initially-dead", "dead"):
        return initially_dead(t)
    raise ValueError(f"unknown failure mode {text!r}")


def _as_sequence(graphs: GraphLike, rounds: int) -> tuple:
    if isinstance(graphs, DirectedGraph):
        return (graphs,) * rounds
    if len(graphs) < rounds:
        raise ValueError(f"graph sequence has {len(graphs)} rounds, {rounds} needed")
    return tuple(graphs.rounds[:rounds])


def _universe(graphs: GraphLike) -> frozenset:
    return graphs.nodes if isinstance(graphs, DirectedGraph) else graphs.nodes


def _crash_options(p: int, seq: tuple, rounds_allowed: Iterable[int], clean: bool) -> list:
    out = []
    for r in rounds_allowed:
        others = sorted(seq[r - 1].out_neighbors(p) - {p})
        if clean:
            out.append(Crash(p, r, frozenset()))
            continue
        for size in range(len(others) + 1):
            for sub in itertools.combinations(others, size):
                out.append(Crash(p, r, frozenset(sub)))
    return out


def _crashing_rounds(t: int, rounds: int, mode: FailureMode) -> int:
    """Number of rounds with exactly k crashes; none happen afterwards."""
    if t % mode.k:
        raise ValueError(f"exactly-k mode needs k | t (k={mode.k}, t={t})")
    return min(t // mode.k, rounds)


def enumerate_failure_patterns(n: int | Iterable[int], t: int, rounds: int, graphs: GraphLike,
                               mode: FailureMode = ALL) -> Iterator[FailurePattern]:
    """Every failure pattern of the mode, each exactly once, in a fixed order."""
    procs = sorted(range(1, n + 1)) if isinstance(n, int) else sorted(n)
    if mode.kind == "initially-dead":
        dead = t if mode.t is None else mode.t
        if dead > len(procs):
            return
        for S in itertools.combinations(procs, dead):
            yield FailurePattern.of(Crash(p, 1) for p in S)
        return
    if rounds == 0:
        yield NO_FAILURES
        return
    seq = _as_sequence(graphs, rounds)
    if mode.kind == "exactly-k":
        last = _crashing_rounds(t, rounds, mode)
        k = mode.k
        yield from _exact_per_round(procs, seq, k, 1, last, ())
        return
    clean = mode.kind == "clean"
    options = {p: _crash_options(p, seq, range(1, rounds + 1), clean) for p in procs}
    for size in range(0, min(t, len(procs)) + 1):
        for S in itertools.combinations(procs, size):
            for choice in itertools.product(*(options[p] for p in S)):
                yield FailurePattern.of(choice)


def _exact_per_round(procs, seq, k, r, last, acc):
    if r > last:
        yield FailurePattern.of(acc)
        return
    used = {c.process for c in acc}
    free = [p for p in procs if p not in used]
    for S in itertools.combinations(free, k):
        per = [_crash_options(p, seq, [r], clean=False) for p in S]
        for choice in itertools.product(*per):
            yield from _exact_per_round(procs, seq, k, r + 1, last, acc + choice)


def count_failure_patterns(n, t, rounds, graphs, mode: FailureMode = ALL) -> int:
    procs = sorted(range(1, n + 1)) if isinstance(n, int) else sorted(n)
    if mode.kind == "initially-dead":
        dead = t if mode.t is None else mode.t
        return len(list(itertools.combinations(procs, dead))) if dead <= len(procs) else 0
    if rounds == 0:
        return 1
    if mode.kind == "exactly-k":
        return sum(1 for _ in enumerate_failure_patterns(procs, t, rounds, graphs, mode))
    seq = _as_sequence(graphs, rounds)
    clean = mode.kind == "clean"
    weight = {p: len(_crash_options(p, seq, range(1, rounds + 1), clean)) for p in procs}
    # elementary symmetric sums of the per-process weights up to degree t
    e = [1] + [0] * t
    for p in procs:
        for j in range(t, 0, -1):
            e[j] += e[j - 1] * weight[p]
    return sum(e)


# ---------------------------------------------------------------------------
# runs

@dataclass
class ExecutionSpec:
    graphs: GraphLike
    inputs: Mapping[int, object]
    failures: FailurePattern = NO_FAILURES
    rounds: int = 0


def _check_pattern(failures: FailurePattern, seq: tuple, participants: frozenset):
    for c in failures.crashes:
        if c.process not in participants:
            continue
        if c.round < 1:
            raise ValueError("crash rounds start at 1")
        if c.round <= len(seq):
            g = seq[c.round - 1]
            if not c.receivers <= g.out_neighbors(c.process):
                raise ValueError(f"receivers of {c.process} are not its out-neighbors in round {c.round}")


def _step(r: int, g: DirectedGraph, state: dict, failures: FailurePattern, transcript=None) -> dict:
    nxt = {}
    crashing = {}
    for p in state:
        c = failures.crash_of(p)
        if c is not None and c.round == r:
            crashing[p] = c.receivers
    for q in state:
        if q in crashing:
            continue
        received = {}
        for p in g.in_neighbors(q):
            if p not in state:
                continue
            if p in crashing and q not in crashing[p]:
                continue
            received[p] = state[p]
            if transcript is not None and p != q:
                transcript.append((r, p, q, state[p]))
        nxt[q] = View(r, received)
    return nxt


def run_views(spec: ExecutionSpec, transcript: list | None = None) -> dict:
    """End-of-run views of all surviving processes, keyed by process."""
    seq = _as_sequence(spec.graphs, spec.rounds)
    participants = frozenset(spec.inputs)
    _check_pattern(spec.failures, seq, participants)
    state = dict(spec.inputs)
    for r, g in enumerate(seq, start=1):
        state = _step(r, g, state, spec.failures, transcript)
    return state


def run_full_information(spec: ExecutionSpec, transcript: list | None = None) -> frozenset:
    return frozenset(Vertex(p, v) for p, v in run_views(spec, transcript).items())


_DIGESTS: dict = {}


def payload_digest(label) -> str:
    """Short stable digest of a view, computed bottom-up so shared histories are hashed once."""
    if not isinstance(label, View):
        return hashlib.sha256(encode_label(label).encode()).hexdigest()[:16]
    d = _DIGESTS.get(label)
    if d is None:
        body = f"{label.round}|" + ",".join(f"{p}:{payload_digest(v)}" for p, v in label.received)
        d = hashlib.sha256(body.encode()).hexdigest()[:16]
        _DIGESTS[label] = d
    return d


def transcript_lines(transcript: list) -> list:
    return [
        {"round": r, "sender": p, "receiver": q, "payload": payload_digest(v)}
        for r, p, q, v in transcript
    ]


def input_assignments(input_complex: Complex) -> list:
    return [{v.color: v.label for v in f} for f in input_complex.sorted_facets()]


def protocol_complex(graphs: GraphLike, input_complex: Complex, rounds: int, mode: FailureMode = ALL,
                     t: int = 0, budget: int | None = None) -> Complex:
    """End states of every run over every input facet and every failure pattern of the mode."""
    if rounds == 0 and mode.kind != "initially-dead":
        return input_complex
    budget = enumeration_budget() if budget is None else budget
    facets = input_complex.sorted_facets()
    total = sum(count_failure_patterns(names(f), t, rounds, graphs, mode) for f in facets)
    if total > budget:
        raise BudgetExceeded("executions", total, budget)
    ends = set()
    for f in facets:
        inputs = {v.color: v.label for v in f}
        for pat in enumerate_failure_patterns(names(f), t, rounds, graphs, mode):
            alive = {p: x for p, x in inputs.items() if not (mode.kind == "initially-dead" and pat.crash_of(p))}
            if mode.kind == "initially-dead":
                spec = ExecutionSpec(graphs, alive, NO_FAILURES, rounds)
            else:
                spec = ExecutionSpec(graphs, inputs, pat, rounds)
            ends.add(run_full_information(spec))
    return Complex(maximal_sets(ends))


# ---------------------------------------------------------------------------
# min-flooding

@dataclass
class FloodResult:
    horizon: int
    decisions: dict
    survivors: frozenset = field(default_factory=frozenset)


def flooding_horizon(G: DirectedGraph, t: int, k: int) -> int:
    D = d_of_g_t(G, t)
    if D == INF:
        raise ValueError("graph not t-connected")
    return t // k + D


def flood_min(graphs: GraphLike, inputs: Mapping[int, object], failures: FailurePattern, rounds: int) -> dict:
    seq = _as_sequence(graphs, rounds)
    _check_pattern(failures, seq, frozenset(inputs))
    state = dict(inputs)
    for r, g in enumerate(seq, start=1):
        crashing = {c.process: c.receivers for c in failures.crashes if c.round == r and c.process in state}
        nxt = {}
        for q in state:
            if q in crashing:
                continue
            best = state[q]
            for p in g.in_neighbors(q):
                if p in state and (p not in crashing or q in crashing[p]) and state[p] < best:
                    best = state[p]
            nxt[q] = best
        state = nxt
    return state


def min_flooding(G: DirectedGraph, inputs: Mapping[int, object], failures: FailurePattern, t: int, k: int,
                 horizon: int | None = None) -> FloodResult:
    h = flooding_horizon(G, t, k) if horizon is None else horizon
    decisions = flood_min(G, inputs, failures, h)
    return FloodResult(h, decisions, frozenset(decisions))


def verify_kset_run(decisions: Mapping[int, object], inputs: Mapping[int, object], k: int,
                    survivors: Iterable[int] | None = None) -> bool:
    if survivors is not None and not set(survivors) <= set(decisions):
        return False
    vals = set(decisions.values())
    if len(vals) > k:
        return False
    allowed = set(inputs.values())
    return vals <= allowed
