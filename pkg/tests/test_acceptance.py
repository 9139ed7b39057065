"""The eleven acceptance criteria.

Each `criterion_N` returns (passed, detail). The pytest wrappers assert on
them, the conftest hook prints one PASS/FAIL line per criterion at the end of
the session, and running this file directly prints the same lines.
"""
import itertools
import random
import time

import networkx as nx
import pytest

from ksetlab.carriers import (CODIM, MONOTONE, NONEMPTY, STRICT, RoundContext, check_carrier_properties,
                              check_image_shellings, f_general, g_map, h_general, initially_dead_context)
from ksetlab.execution import ALL, enumerate_failure_patterns, initially_dead, min_flooding, verify_kset_run
from ksetlab.graphs import (INF, complete_graph, cycle_graph, d_of_g_t, directed_ring, domination_number_out,
                            from_networkx, hypercube_graph, rad_tk, random_petal_instance, union_graph)
from ksetlab.solvability import UNSAT, TaskSpec, decision_map_exists, scan_rounds
from ksetlab.topology import (Complex, betti_mod2, combined_order, kuhn_input_complex, kuhn_order, skeleton,
                              uniform_pseudosphere, verify_shelling_order)
from ksetlab.views import Vertex

from . import oracles

RESULTS: dict = {}


def atlas_graphs(n_max, connected_only):
    for g in nx.graph_atlas_g():
        n = g.number_of_nodes()
        if n == 0 or n > n_max or (connected_only and not nx.is_connected(g)):
            continue
        yield from_networkx(nx.convert_node_labels_to_integers(g, first_label=1))


def criterion_1():
    got = {}
    for n in (3, 4):
        scan = scan_rounds(TaskSpec(n, 1, 1, complete_graph(n)), 3)
        got[n] = (scan.exact, scan.statuses.get(1))
    ok = all(v == (oracles.CLIQUE_EXACT_T1_K1, UNSAT) for v in got.values())
    return ok, f"(exact, status at r=1) per n: {got}"


def criterion_2():
    details = []
    ok = True
    for n in (4, 5, 6, 7):
        G = cycle_graph(n)
        D = d_of_g_t(G, 1)
        ok &= D == oracles.CYCLE_DGT1[n] == n - 2
        horizon = n - 1
        patterns = list(enumerate_failure_patterns(n, 1, horizon, G, ALL))
        assignments = list(itertools.product((1, 2), repeat=n))
        rng = random.Random(n)
        assignments += [tuple(rng.sample(range(1, n + 1), n)) for _ in range(5)]
        bad = 0
        for vals in assignments:
            inputs = dict(zip(range(1, n + 1), vals))
            for pat in patterns:
                res = min_flooding(G, inputs, pat, 1, 1, horizon)
                if not verify_kset_run(res.decisions, inputs, 1, G.nodes - pat.faulty()):
                    bad += 1
        ok &= bad == 0
        details.append(f"C{n}: D={D}, runs={len(patterns) * len(assignments)}, violations={bad}")
    return ok, "; ".join(details)


def criterion_3():
    D = d_of_g_t(hypercube_graph(3), 2)
    return D == oracles.HYPERCUBE3_DGT2, f"D(Q3,2)={D}"


def criterion_4():
    G = cycle_graph(4)
    rad = rad_tk(G, 1, 1)
    spec = TaskSpec(4, 1, 1, G)
    statuses = {r: decision_map_exists(spec.protocol(r), 1).status for r in range(1 // 1 + rad)}
    ok = rad == oracles.RAD_C4_1_1 and all(s == UNSAT for s in statuses.values())
    return ok, f"rad={rad}, statuses={statuses}"


def criterion_5():
    count, bad = 0, []
    for G in atlas_graphs(5, connected_only=True):
        for t in (1, 2):
            if t + 1 > G.n:
                continue
            rad = rad_tk(G, t, 1)
            spec = TaskSpec(G.n, t, 1, G, mode=initially_dead(t))
            for r in range(int(min(rad, 4))):
                count += 1
                if decision_map_exists(spec.protocol(r), 1).status != UNSAT:
                    bad.append((sorted(G.proper_edges()), t, r))
    return not bad and count > 0, f"{count} instances, non-UNSAT: {bad[:3]}"


def _accepted_complexes():
    """Every complex of criteria 6 and 7 together with its claimed order."""
    for n in range(1, 6):
        for m in (1, 2, 3):
            P = uniform_pseudosphere(n, range(1, m + 1))
            for d in range(n):
                K = skeleton(P, d)
                yield f"skel(Psi({n},{m}),{d})", K, combined_order(K)


def criterion_6():
    bad, count = [], 0
    for name, K, order in _accepted_complexes():
        count += 1
        if not verify_shelling_order(K, order).ok:
            bad.append(name)
    return not bad, f"{count} skeletons, rejected: {bad}"


def criterion_7():
    bad = []
    for n in range(1, 7):
        for k in range(1, 4):
            K = kuhn_input_complex(n, k)
            if len(K.facets) != oracles.kuhn_count(n, k):
                bad.append((n, k, "count"))
            elif not verify_shelling_order(K, kuhn_order(K)).ok:
                bad.append((n, k, "order"))
    return not bad, f"n<=6, k<=3, failures: {bad}"


def _f_battery(G):
    ctx = RoundContext(0, 4, 1, 0, G, uniform_pseudosphere(4, (1, 2)))
    reps = check_carrier_properties(lambda s: f_general(s, ctx), ctx.domain, [MONOTONE, STRICT, CODIM], k=1,
                                    target_dim=ctx.target_dim)
    reps.append(check_image_shellings(ctx))
    return ctx, {r.property: r.status for r in reps}


def criterion_8():
    _, clique = _f_battery(complete_graph(4))
    ctx, ring = _f_battery(directed_ring(4))
    (h_strict,) = check_carrier_properties(lambda s: h_general(s, ctx), ctx.domain, [STRICT])
    ok = all(v == "PASS" for v in clique.values()) and all(v == "PASS" for v in ring.values()) \
        and h_strict.status == "FAIL"
    return ok, f"clique {clique}; ring {ring}; h_general STRICT on ring: {h_strict.status}"


def criterion_9():
    count, fails = 0, {NONEMPTY: 0, MONOTONE: 0, STRICT: 0}
    first = None
    for G in atlas_graphs(5, connected_only=False):
        for t in (0, 1, 2):
            for k in (1, 2):
                if t + k > G.n:
                    continue
                rad = rad_tk(G, t, k)
                if rad == INF:
                    continue
                for R in range(rad):
                    count += 1
                    octx = initially_dead_context(G, G.n, t, k, R)
                    reps = check_carrier_properties(lambda s: g_map(s, octx), octx.source,
                                                    [NONEMPTY, MONOTONE, STRICT], k=k)
                    for rep in reps:
                        if not rep.passed:
                            fails[rep.property] += 1
                            if first is None:
                                first = (sorted(G.proper_edges()), t, k, R, rep.property)
    ok = count > 0 and not any(fails.values())
    return ok, f"{count} instances (finite rad), failures {fails}, first {first}"


def criterion_10():
    bad = []
    for name, K, order in _accepted_complexes():
        if verify_shelling_order(K, order).ok and any(betti_mod2(K)[:K.dim]):
            bad.append(name)
    for n in range(1, 5):
        for k in range(1, 3):
            K = kuhn_input_complex(n, k)
            if any(betti_mod2(K)[:K.dim]):
                bad.append(f"kuhn({n},{k})")
    hollow = Complex(frozenset(frozenset({Vertex(a, 0), Vertex(b, 0)}) for a, b in [(1, 2), (2, 3), (1, 3)]))
    b = betti_mod2(hollow)
    return not bad and b[1] == 1, f"hollow triangle betti {b}; nonzero lower betti on {bad}"


def criterion_11():
    rng = random.Random(11)
    lower_bad = upper_bad = 0
    for _ in range(100):
        inst = random_petal_instance(rng, n_max=5, l_max=3)
        entries, sources = inst.entries()
        g0 = domination_number_out(entries[0][0])
        gu = domination_number_out(union_graph(entries, sources))
        A = len(inst.present_set())
        lower_bad += not g0 <= gu
        upper_bad += not gu <= g0 + A
    return lower_bad == 0 and upper_bad == 0, f"100 instances: lower bound fails {lower_bad}, upper bound fails {upper_bad}"


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 12)}


def _record(i):
    start = time.perf_counter()
    ok, detail = CRITERIA[i]()
    RESULTS[i] = (ok, detail, time.perf_counter() - start)
    return ok, detail


@pytest.mark.parametrize("i", list(CRITERIA))
def test_criterion(i):
    ok, detail = _record(i)
    assert ok, detail


if __name__ == "__main__":
    for i in CRITERIA:
        ok, detail = _record(i)
        print(f"criterion {i:2d}: {'PASS' if ok else 'FAIL'} ({RESULTS[i][2]:.1f}s) {detail}")
