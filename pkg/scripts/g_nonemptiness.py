"""Overhead-map property sweep over small graphs and two source complexes.

With --source initially-dead the source is the skeleton of the input
pseudosphere. With --source crash-chain it is the image of t/k crashing
clique rounds, so some source vertices are dirty.
"""
import argparse
import collections

import networkx as nx

from ksetlab.carriers import (MONOTONE, NONEMPTY, STRICT, OverheadContext, check_carrier_properties,
                              crash_chain_source, g_map, initially_dead_context, verify_C1_C2)
from ksetlab.graphs import INF, big_rad, complete_graph, from_networkx, rad_tk


def graphs(n_max, connected):
    for g in nx.graph_atlas_g():
        n = g.number_of_nodes()
        if 2 <= n <= n_max and (not connected or nx.is_connected(g)):
            yield from_networkx(nx.convert_node_labels_to_integers(g, first_label=1))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--source", choices=["initially-dead", "crash-chain"], default="initially-dead")
    ap.add_argument("--bound", choices=["rad", "static"], default="rad",
                    help="R < rad(G,t,k), or R < Rad(G,t+k)")
    ap.add_argument("--n-max", type=int, default=5)
    args = ap.parse_args()
    fails = collections.Counter()
    first = {}
    count = 0
    for G in graphs(args.n_max, connected=args.source == "crash-chain"):
        n = G.n
        for t in (0, 1, 2):
            for k in (1, 2):
                if t + k > n or (args.source == "crash-chain" and (t == 0 or t % k)):
                    continue
                bound = rad_tk(G, t, k) if args.bound == "rad" else big_rad(G, t + k)
                if bound == INF:
                    continue
                for R in range(bound):
                    if args.source == "initially-dead":
                        octx = initially_dead_context(G, n, t, k, R)
                    else:
                        src = crash_chain_source(complete_graph(n), n, t, k)
                        octx = OverheadContext(src, G, t // k, R, n, t, k)
                        cond = verify_C1_C2(src, n, t)
                        if not (cond.c1 and cond.c2):
                            fails["C1/C2"] += 1
                    count += 1
                    for rep in check_carrier_properties(lambda s: g_map(s, octx), octx.source,
                                                        [NONEMPTY, MONOTONE, STRICT], k=k):
                        if not rep.passed:
                            fails[rep.property] += 1
                            first.setdefault(rep.property, (sorted(G.proper_edges()), t, k, R))
    print(f"instances: {count}")
    for prop in (NONEMPTY, MONOTONE, STRICT, "C1/C2"):
        print(f"{prop:9} failures: {fails[prop]:4d}  first: {first.get(prop)}")


if __name__ == "__main__":
    main()
