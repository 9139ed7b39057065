"""Why no shelling order exists for f_general images on the directed 4-ring.

A shellable pure complex of dimension d has vanishing reduced Betti numbers
below d. The script prints the mod-2 Betti numbers of every distinct image
type and flags the ones that rule out shellability.
"""
import argparse

from ksetlab.carriers import RoundContext, f_general, h_general
from ksetlab.graphs import complete_graph, directed_ring
from ksetlab.topology import betti_mod2, uniform_pseudosphere


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--graph", choices=["ring", "clique"], default="ring")
    ap.add_argument("--map", choices=["f", "h"], default="f")
    args = ap.parse_args()
    G = directed_ring(4) if args.graph == "ring" else complete_graph(4)
    ctx = RoundContext(0, 4, 1, 0, G, uniform_pseudosphere(4, (1, 2)))
    fn = f_general if args.map == "f" else h_general
    seen = {}
    for s in sorted(ctx.domain.faces(), key=len):
        if not s:
            continue
        img = fn(s, ctx)
        if img.is_empty():
            continue
        betti = tuple(betti_mod2(img))
        seen.setdefault((len(s), betti), 0)
        seen[(len(s), betti)] += 1
    for (size, betti), count in sorted(seen.items()):
        blocked = any(betti[:len(betti) - 1])
        note = "not shellable" if blocked else "no obstruction"
        print(f"|sigma|={size}  faces={count:3d}  betti={list(betti)}  {note}")


if __name__ == "__main__":
    main()
