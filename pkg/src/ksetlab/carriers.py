"""Round-by-round carrier maps and the overhead map, with exhaustive property checks.

Vertices produced by a round map are labeled by the simplex the process
received in that round. The overhead map instead runs failure-free
full-information rounds on top of a source complex and drops every vertex
whose history touches a dirty source vertex.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .graphs import DirectedGraph, GraphLike
from .execution import NO_FAILURES, _as_sequence, _step
from .topology import (
    Complex,
    combined_order,
    complex_union,
    maximal_sets,
    names,
    restrict,
    signature,
    skeleton,
    uniform_pseudosphere,
    verify_shelling_order,
)
from .views import Vertex, history, label_names, simplex_key

RHO_COMMON_FACE = "sigma"
RHO_EXTENDED_FACE = "tau"


def view_of(rho, q: int, graph: DirectedGraph) -> frozenset:
    """The part of rho that q can hear in one round."""
    if q not in names(rho):
        raise ValueError(f"process {q} is not in the simplex")
    return restrict(rho, graph.in_neighbors(q))


def faces_of_size(s, size: int) -> list:
    if size < 1 or size > len(s):
        return []
    return [frozenset(c) for c in itertools.combinations(sorted(s, key=lambda v: v.color), size)]


def _interval_labels(low: frozenset, high: frozenset) -> list:
    extra = sorted(high - low, key=lambda v: v.color)
    out = []
    for size in range(len(extra) + 1):
        for sub in itertools.combinations(extra, size):
            out.append(low | frozenset(sub))
    return out


def _interval_pseudosphere(tau, upper, graph: DirectedGraph | None) -> set:
    """Facets labeling each p in tau with a simplex between its view of tau and of upper."""
    pools = []
    for v in sorted(tau, key=lambda v: v.color):
        p = v.color
        if graph is None:
            low, high = tau, upper
        else:
            low, high = view_of(tau, p, graph), view_of(upper, p, graph)
        pools.append([Vertex(p, lab) for lab in _interval_labels(low, high)])
    return {frozenset(c) for c in itertools.product(*pools)}


@dataclass
class RoundContext:
    i: int
    n: int
    k: int
    t: int
    graph: DirectedGraph
    domain: Complex
    rho_choice: str = RHO_COMMON_FACE
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.rho_choice not in (RHO_COMMON_FACE, RHO_EXTENDED_FACE):
            raise ValueError("rho_choice is 'sigma' or 'tau'")
        sizes = {len(f) for f in self.domain.facets}
        if sizes and sizes != {self.n - self.k * self.i}:
            raise ValueError(f"domain facets must have {self.n - self.k * self.i} vertices, got {sorted(sizes)}")

    @property
    def target_size(self) -> int:
        return self.n - self.k * (self.i + 1)

    @property
    def target_dim(self) -> int:
        return self.target_size - 1

    def facets_containing(self, s) -> list:
        key = ("T", s)
        got = self._cache.get(key)
        if got is None:
            got = sorted(self.domain.star_facets(s), key=simplex_key)
            self._cache[key] = got
        return got

    def require_face(self, s):
        if not s or not self.domain.contains(s):
            raise ValueError("simplex is not a face of the restricted domain")


def f_complete(sigma, ctx: RoundContext) -> Complex:
    if any(len(ctx.graph.in_neighbors(q)) != ctx.n for q in ctx.graph.nodes):
        raise ValueError("f_complete needs the complete graph")
    out = set()
    for tau in faces_of_size(sigma, ctx.target_size):
        out |= _interval_pseudosphere(tau, sigma, None)
    return Complex(maximal_sets(out))


def h_general(sigma, ctx: RoundContext) -> Complex:
    out = set()
    for tau in faces_of_size(sigma, ctx.target_size):
        out |= _interval_pseudosphere(tau, sigma, ctx.graph)
    return Complex(maximal_sets(out))


def dangerous_faces(sigma, xi, ctx: RoundContext, rho_choice: str | None = None) -> set:
    """Target-size faces sigma+theta of xi where some witness hears nobody in theta."""
    sigma, xi = frozenset(sigma), frozenset(xi)
    if not sigma <= xi:
        raise ValueError("sigma must be a face of xi")
    choice = rho_choice or ctx.rho_choice
    need = ctx.target_size - len(sigma)
    if need < 1:
        return set()
    out = set()
    rest = sorted(xi - sigma, key=lambda v: v.color)
    for theta in itertools.combinations(rest, need):
        theta_names = {v.color for v in theta}
        tau = sigma | frozenset(theta)
        witnesses = names(sigma) if choice == RHO_COMMON_FACE else names(tau)
        for q in witnesses:
            if not theta_names & ctx.graph.in_neighbors(q):
                out.add(tau)
                break
    return out


def _extra_facets(sigma, ctx: RoundContext) -> set:
    out = set()
    members = sorted(sigma, key=lambda v: v.color)
    for size in range(1, len(members) + 1):
        for sub in itertools.combinations(members, size):
            sub = frozenset(sub)
            for phi in ctx.facets_containing(sub):
                key = ("P", sub, phi, ctx.rho_choice)
                part = ctx._cache.get(key)
                if part is None:
                    part = set()
                    for tau in dangerous_faces(sub, phi, ctx):
                        part |= _interval_pseudosphere(tau, phi, ctx.graph)
                    ctx._cache[key] = part
                out |= part
    return out


def f_general(sigma, ctx: RoundContext) -> Complex:
    sigma = frozenset(sigma)
    ctx.require_face(sigma)
    key = ("f", sigma, ctx.rho_choice)
    got = ctx._cache.get(key)
    if got is None:
        out = set(h_general(sigma, ctx).facets) | _extra_facets(sigma, ctx)
        got = Complex(maximal_sets(out))
        ctx._cache[key] = got
    return got


def _process_entry(psi, q: int, n: int) -> tuple:
    for v in psi:
        if v.color == q:
            return (0, signature(v.label, range(1, n + 1)))
    return (1,)


def f_general_shelling_order(sigma, ctx: RoundContext, domain_order: Sequence | None = None) -> list:
    """Facets of f_general(sigma): per-process received-face signatures first, absent last;
    ties go to the earliest domain facet whose image contains the facet."""
    image = f_general(sigma, ctx)
    if domain_order is None:
        domain_order = combined_order(ctx.domain)
    rank = {}
    for r, phi in enumerate(domain_order):
        for psi in f_general(phi, ctx).facets:
            rank.setdefault(psi, r)
    missing = [psi for psi in image.facets if psi not in rank]
    if missing:
        raise AssertionError("image facet not produced by any domain facet")

    def key(psi):
        return (tuple(_process_entry(psi, q, ctx.n) for q in range(1, ctx.n + 1)), rank[psi])

    return sorted(image.facets, key=key)


class CarrierPipeline:
    """Threads the restricted domain through the rounds, starting from the input complex."""

    def __init__(self, graphs: GraphLike, n: int, k: int, t: int, input_complex: Complex,
                 rho_choice: str = RHO_COMMON_FACE):
        self.graphs = graphs
        self.n, self.k, self.t = n, k, t
        self.rho_choice = rho_choice
        self.contexts = [self._context(0, input_complex)]

    def _graph(self, i: int) -> DirectedGraph:
        if isinstance(self.graphs, DirectedGraph):
            return self.graphs
        return self.graphs[i]

    def _context(self, i: int, domain: Complex) -> RoundContext:
        return RoundContext(i, self.n, self.k, self.t, self._graph(i), domain, self.rho_choice)

    @property
    def current(self) -> RoundContext:
        return self.contexts[-1]

    def advance(self, kappa) -> RoundContext:
        image = f_general(kappa, self.current)
        if image.is_empty():
            raise ValueError("empty image; cannot restrict the next round to it")
        nxt = self._context(self.current.i + 1, image)
        self.contexts.append(nxt)
        return nxt


# ---------------------------------------------------------------------------
# overhead map

@dataclass
class OverheadContext:
    source: Complex
    graphs: GraphLike
    N: int
    R: int
    n: int
    t: int
    k: int
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        sizes = {len(f) for f in self.source.facets}
        if sizes and sizes != {self.n - self.t}:
            raise ValueError(f"source facets must have n-t={self.n - self.t} vertices")
        self.rounds = _as_sequence(self.graphs, self.R)

    def facets_containing(self, s) -> list:
        key = ("T", s)
        got = self._cache.get(key)
        if got is None:
            got = self.source.star_facets(s)
            self._cache[key] = got
        return got


def initially_dead_context(graphs: GraphLike, n: int, t: int, k: int, R: int) -> OverheadContext:
    src = skeleton(uniform_pseudosphere(n, range(1, k + 2)), n - t - 1)
    return OverheadContext(src, graphs, 0, R, n, t, k)


def dirty_vertices(phi, octx: OverheadContext | None = None) -> frozenset:
    members = names(phi)
    return frozenset(v for v in phi if label_names(v.label) - members)


def run_from(phi, rounds: Sequence, start_round: int) -> dict:
    state = {v.color: v.label for v in phi}
    for j, g in enumerate(rounds, start=1):
        state = _step(start_round + j, g, state, NO_FAILURES)
    return state


def g_facet(phi, octx: OverheadContext) -> frozenset:
    key = ("g", phi)
    got = octx._cache.get(key)
    if got is not None:
        return got
    if octx.R == 0:
        dirty = dirty_vertices(phi)
        got = frozenset(v for v in phi if v not in dirty)
    else:
        dirty = dirty_vertices(phi)
        end = run_from(phi, octx.rounds, octx.N)
        got = frozenset(Vertex(p, lab) for p, lab in end.items() if not (history(lab, octx.R) & dirty))
    octx._cache[key] = got
    return got


def g_map(sigma, octx: OverheadContext) -> Complex:
    sigma = frozenset(sigma)
    if not sigma:
        return Complex()
    star = octx.facets_containing(sigma)
    if not star:
        raise ValueError("simplex is not a face of the source complex")
    acc = None
    for phi in star:
        img = g_facet(phi, octx)
        acc = img if acc is None else acc & img
    rho = restrict(acc, names(sigma))
    return Complex(frozenset([rho])) if rho else Complex()


# ---------------------------------------------------------------------------
# property checks

MONOTONE = "MONOTONE"
STRICT = "STRICT"
CODIM = "CODIM"
NONEMPTY = "NONEMPTY"
PURE = "PURE"


@dataclass
class PropertyReport:
    property: str
    status: str
    witness_faces: list = field(default_factory=list)
    assumption_flags: dict = field(default_factory=dict)
    checked: int = 0

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    def to_json(self, encode=None) -> dict:
        enc = encode or (lambda s: sorted((v.color, repr(v.label)) for v in s))
        return {
            "property": self.property,
            "status": self.status,
            "witness_faces": [enc(s) for s in self.witness_faces],
            "assumption_flags": dict(self.assumption_flags),
        }


def _all_faces(domain: Complex) -> list:
    return sorted(domain.faces(), key=lambda s: (len(s), simplex_key(s)))


def check_carrier_properties(image_of: Callable, domain: Complex, which: Iterable[str], k: int | None = None,
                             target_dim: int | None = None, flags: dict | None = None) -> list:
    """Exhaustively test carrier-map properties over every face of the domain.

    `image_of(sigma)` returns a Complex. CODIM and NONEMPTY look only at faces
    of codimension at most k; CODIM needs the dimension of the target.
    """
    faces = _all_faces(domain)
    images = {s: image_of(s) for s in faces}
    images[frozenset()] = Complex()
    top = domain.dim
    reports = []
    for prop in which:
        rep = PropertyReport(prop, "PASS", assumption_flags=dict(flags or {}))
        if prop == MONOTONE:
            for s in faces:
                for v in sorted(s, key=lambda v: v.color):
                    sub = s - {v}
                    rep.checked += 1
                    if sub and not images[sub].is_subcomplex_of(images[s]):
                        rep.status, rep.witness_faces = "FAIL", [sub, s]
                        break
                if rep.status == "FAIL":
                    break
        elif prop == STRICT:
            _check_strict(faces, images, rep)
        elif prop in (CODIM, NONEMPTY):
            if k is None:
                raise ValueError(f"{prop} needs k")
            if prop == CODIM and target_dim is None:
                raise ValueError("CODIM needs the target dimension")
            for s in faces:
                c = top - (len(s) - 1)
                if c > k:
                    continue
                rep.checked += 1
                img = images[s]
                if img.is_empty():
                    rep.status, rep.witness_faces = "FAIL", [s]
                    break
                if prop == CODIM and target_dim - img.dim > c:
                    rep.status, rep.witness_faces = "FAIL", [s]
                    break
        elif prop == PURE:
            for s in faces:
                img = images[s]
                rep.checked += 1
                if img.is_empty():
                    continue
                dims = {len(f) - 1 for f in img.facets}
                if len(dims) != 1 or (target_dim is not None and dims != {target_dim}):
                    rep.status, rep.witness_faces = "FAIL", [s]
                    break
        else:
            raise ValueError(f"unknown property {prop}")
        reports.append(rep)
    return reports


def _check_strict(faces, images, rep: PropertyReport):
    # Pairs whose images share no vertex only need an empty image of the meet.
    by_vertex: dict = {}
    for idx, s in enumerate(faces):
        for v in images[s].vertices():
            by_vertex.setdefault(v, []).append(idx)
    for a in range(len(faces)):
        sa = faces[a]
        partners = set()
        for v in images[sa].vertices():
            partners.update(by_vertex[v])
        for b in range(a + 1, len(faces)):
            sb = faces[b]
            meet = images[sa & sb]
            rep.checked += 1
            if b not in partners:
                if not meet.is_empty():
                    rep.status, rep.witness_faces = "FAIL", [sa, sb]
                    return
                continue
            if images[sa].intersection(images[sb]) != meet:
                rep.status, rep.witness_faces = "FAIL", [sa, sb]
                return


def check_image_shellings(ctx: RoundContext, flags: dict | None = None) -> PropertyReport:
    """Run the shelling verifier on the claimed order of every non-empty f_general image."""
    rep = PropertyReport("SHELLING", "PASS", assumption_flags=dict(flags or {}))
    order0 = combined_order(ctx.domain)
    for s in _all_faces(ctx.domain):
        img = f_general(s, ctx)
        if img.is_empty():
            continue
        rep.checked += 1
        if not verify_shelling_order(img, f_general_shelling_order(s, ctx, order0)).ok:
            rep.status, rep.witness_faces = "FAIL", [s]
            break
    return rep


# ---------------------------------------------------------------------------
# source-complex conditions

@dataclass
class ConditionReport:
    c1: bool
    c2: bool
    c1_witness: frozenset | None = None
    c2_witness: frozenset | None = None

    def to_json(self) -> dict:
        return {
            "C1": "PASS" if self.c1 else "FAIL",
            "C2": "PASS" if self.c2 else "FAIL",
            "C1_witness": sorted(self.c1_witness) if self.c1_witness is not None else None,
            "C2_witness": sorted((v.color, repr(v.label)) for v in self.c2_witness) if self.c2_witness else None,
        }


def verify_C1_C2(source: Complex, n: int, t: int) -> ConditionReport:
    """C1: every admissible t-set S (one containing all never-present processes)
    is avoided exactly by some facet. C2: each face is the meet of its star."""
    everyone = frozenset(range(1, n + 1))
    present = frozenset(v.color for v in source.vertices())
    gone = everyone - present
    rep = ConditionReport(True, True)
    facet_names = {names(f) for f in source.facets}
    if len(gone) > t:
        rep.c1, rep.c1_witness = False, gone
    else:
        for extra in itertools.combinations(sorted(present), t - len(gone)):
            S = gone | frozenset(extra)
            if everyone - S not in facet_names:
                rep.c1, rep.c1_witness = False, S
                break
    for s in _all_faces(source):
        star = source.star_facets(s)
        meet = frozenset.intersection(*star)
        if meet != s:
            rep.c2, rep.c2_witness = False, s
            break
    return rep


def complex_of_images(images: Iterable[Complex]) -> Complex:
    return complex_union(images)


def crash_chain_source(graphs: GraphLike, n: int, t: int, k: int, values: Sequence | None = None,
                       pick: Callable | None = None) -> Complex:
    """Restricted image after t/k crashing rounds, descending through one facet per round."""
    if t % k:
        raise ValueError("k must divide t")
    values = list(range(1, k + 2)) if values is None else list(values)
    pipe = CarrierPipeline(graphs, n, k, t, uniform_pseudosphere(n, values))
    pick = pick or (lambda K: K.sorted_facets()[0])
    for _ in range(t // k):
        pipe.advance(pick(pipe.current.domain))
    return pipe.current.domain
