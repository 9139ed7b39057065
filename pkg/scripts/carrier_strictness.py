"""Print the first strictness witness of h_general and f_general on a small instance."""
import argparse

from ksetlab.carriers import STRICT, RoundContext, check_carrier_properties, f_general, h_general
from ksetlab.graphs import complete_graph, directed_ring
from ksetlab.topology import Complex, uniform_pseudosphere
from ksetlab.views import encode_label


def show(s):
    return "{" + ", ".join(f"p{v.color}:{encode_label(v.label)}" for v in sorted(s, key=lambda v: v.color)) + "}"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--graph", choices=["ring", "clique"], default="ring")
    args = ap.parse_args()
    G = directed_ring(4) if args.graph == "ring" else complete_graph(4)
    ctx = RoundContext(0, 4, 1, 0, G, uniform_pseudosphere(4, (1, 2)))
    for name, fn in [("h_general", h_general), ("f_general", f_general)]:
        (rep,) = check_carrier_properties(lambda s: fn(s, ctx), ctx.domain, [STRICT])
        print(f"{name}: STRICT {rep.status} after {rep.checked} pairs")
        if rep.passed:
            continue
        a, b = rep.witness_faces
        meet = fn(a & b, ctx) if a & b else Complex()
        extra = fn(a, ctx).intersection(fn(b, ctx)).faces() - meet.faces()
        print(f"  sigma1 = {show(a)}")
        print(f"  sigma2 = {show(b)}")
        for s in sorted(extra, key=len, reverse=True)[:3]:
            print(f"  in both images, not in image of the meet: {show(s)}")


if __name__ == "__main__":
    main()
