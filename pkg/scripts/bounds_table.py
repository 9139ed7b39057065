"""Lower bound, upper bound and exact round count for a set of small graphs."""
import argparse
import json

from ksetlab.graphs import complete_graph, cycle_graph, directed_ring, hypercube_graph
from ksetlab.io import dumps
from ksetlab.solvability import TaskSpec, bounds_report

GRAPHS = {
    "K3": complete_graph(3), "K4": complete_graph(4), "C4": cycle_graph(4), "C5": cycle_graph(5),
    "ring4": directed_ring(4), "Q2": hypercube_graph(2),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rmax", type=int, default=3)
    ap.add_argument("--json", action="store_true", help="print full reports instead of a table")
    args = ap.parse_args()
    rows = []
    for name, G in GRAPHS.items():
        for t, k in [(1, 1), (1, 2), (2, 1)]:
            if t + k > G.n:
                continue
            rep = bounds_report(TaskSpec(G.n, t, k, G), r_max=args.rmax)
            rows.append({"graph": name, "t": t, "k": k, "lower": rep["lower"], "exact": rep["exact"],
                         "upper": rep["upper"], "sandwich": rep.get("sandwich", "-")})
    if args.json:
        print(dumps(rows), end="")
        return
    print(f"{'graph':6} {'t':>2} {'k':>2} {'lower':>6} {'exact':>8} {'upper':>6}  sandwich")
    for r in rows:
        print(f"{r['graph']:6} {r['t']:>2} {r['k']:>2} {json.dumps(r['lower']):>6} {json.dumps(r['exact']):>8} "
              f"{json.dumps(r['upper']):>6}  {r['sandwich']}")


if __name__ == "__main__":
    main()
