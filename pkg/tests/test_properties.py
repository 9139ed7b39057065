"""Property tests (hypothesis) for the structural invariants."""
import itertools

from hypothesis import given, settings, strategies as st

from ksetlab.graphs import (INF, DirectedGraph, GraphSequence, big_rad, compose, d_of_g_t, eccentricity, product,
                            rad_tk)
from ksetlab.topology import (Complex, betti_mod2, combined_order_cmp, combined_order_key, is_pure,
                              is_shellable_exhaustive, maximal_sets, simplex, verify_shelling_order)
from ksetlab.views import Vertex

from . import oracles


@st.composite
def graphs(draw, n_min=2, n_max=6, directed=None):
    n = draw(st.integers(n_min, n_max))
    pairs = [(u, v) for u in range(1, n + 1) for v in range(1, n + 1) if u != v]
    undirected = draw(st.booleans()) if directed is None else not directed
    if undirected:
        pairs = [(u, v) for u, v in pairs if u < v]
    chosen = [e for e, keep in zip(pairs, draw(st.lists(st.booleans(), min_size=len(pairs),
                                                         max_size=len(pairs)))) if keep]
    return DirectedGraph.from_edges(n, chosen, directed=not undirected)


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_dgt_monotone_in_t(G):
    vals = [d_of_g_t(G, t) for t in range(G.n)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


@settings(max_examples=60, deadline=None)
@given(graphs(), st.integers(1, 3))
def test_rad_zero_faults_is_big_rad(G, k):
    k = min(k, G.n)
    assert rad_tk(G, 0, k) == big_rad(G, k)


@settings(max_examples=60, deadline=None)
@given(graphs(), st.data())
def test_eccentricity_matches_bfs(G, data):
    D = data.draw(st.sets(st.integers(1, G.n), min_size=1))
    adj = {u: [v for v in G.nodes if G.has_edge(u, v)] for u in G.nodes}
    ecc = eccentricity(D, G)
    want = oracles.bfs_ecc(adj, sorted(D))
    assert ecc == (INF if want == float("inf") else want)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5).flatmap(lambda n: st.tuples(*[graphs(n, n, directed=True)] * 3)))
def test_product_associative(gs):
    A, B, C = gs
    assert product(GraphSequence.of([A, B, C])) == compose(compose(A, B), C) == compose(A, compose(B, C))
    assert product(GraphSequence.of([A, B])) == compose(A, B)


@st.composite
def simplices(draw, n=4, values=(1, 2)):
    procs = draw(st.sets(st.integers(1, n), min_size=1))
    return simplex((p, draw(st.sampled_from(values))) for p in sorted(procs))


@settings(max_examples=80, deadline=None)
@given(st.lists(simplices(), min_size=2, max_size=6, unique=True))
def test_combined_order_is_total(ss):
    universe = range(1, 5)
    for a, b in itertools.combinations(ss, 2):
        c = combined_order_cmp(a, b, universe)
        assert c != 0
        assert c == -combined_order_cmp(b, a, universe)
    ordered = sorted(ss, key=lambda s: combined_order_key(s, universe))
    for a, b, c in zip(ordered, ordered[1:], ordered[2:]):
        assert combined_order_cmp(a, c, universe) < 0


@st.composite
def small_pure_complexes(draw):
    d = draw(st.integers(1, 2))
    verts = list(range(1, 6))
    facets = draw(st.lists(st.sets(st.sampled_from(verts), min_size=d + 1, max_size=d + 1), min_size=1,
                           max_size=6))
    return Complex(maximal_sets(frozenset(Vertex(v, 0) for v in f) for f in facets))


@settings(max_examples=80, deadline=None)
@given(small_pure_complexes())
def test_shellable_implies_lower_betti_zero(K):
    order = is_shellable_exhaustive(K, cap=10)
    if order is None:
        return
    assert is_pure(K)
    assert verify_shelling_order(K, order).ok
    assert all(b == 0 for b in betti_mod2(K)[:K.dim])
