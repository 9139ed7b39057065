"""Command-line front end.

Exit codes: 0 ok, 1 usage or malformed input, 2 budget exceeded, 3 a checked
invariant does not hold (impure complex for shelling, failed carrier property,
k-set agreement violation, bound sandwich violated).
"""
from __future__ import annotations

import argparse
import itertools
import random
import sys
from concurrent.futures import ProcessPoolExecutor

from . import io
from .carriers import (CODIM, MONOTONE, NONEMPTY, PURE, STRICT, CarrierPipeline, OverheadContext,
                       check_carrier_properties, crash_chain_source, f_complete, f_general,
                       g_map, check_image_shellings, h_general, initially_dead_context, verify_C1_C2)
from .execution import (BudgetExceeded, Crash, ExecutionSpec, FailurePattern, enumerate_failure_patterns,
                        enumeration_budget, flooding_horizon, min_flooding, parse_mode, protocol_complex,
                        run_views, transcript_lines, verify_kset_run)
from .graphs import (DirectedGraph, GraphSequence, big_rad_witness, d_of_g_t_witness, diameter,
                     domination_witness, eccentricity, product, rad_tk_witness, union_graph)
from .solvability import (BUDGET, TaskSpec, bounds_report, decision_map_exists, dominance_precondition,
                          scan_rounds)
from .topology import (Complex, NotPureError, ShellingDisagreement, betti_mod2, combined_order, complex_to_json,
                       is_pure, is_shellable_exhaustive, kuhn_input_complex, kuhn_order, skeleton,
                       uniform_pseudosphere, verify_shelling_order)
from .views import encode_label

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_INVARIANT = 0, 1, 2, 3
DEFAULT_SEED = 20240601


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(doc, schema: str | None, out) -> None:
    if schema is not None:
        io.validate(doc, schema)
    out.write(io.dumps(doc))


def _ints(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _values(text: str) -> list:
    """`3` means 1..3; `a,b` lists values explicitly."""
    if "," not in text and text.isdigit():
        return list(range(1, int(text) + 1))
    out = []
    for x in text.split(","):
        x = x.strip()
        out.append(int(x) if x.lstrip("-").isdigit() else x)
    return out


def _graph(args):
    g, notes = io.read_graph(args.graph)
    if getattr(args, "dot", None):
        base = g if isinstance(g, DirectedGraph) else g[0]
        with open(args.dot, "w") as fh:
            fh.write(base.to_dot())
    return g, notes


def _read_complex(args) -> Complex:
    if args.input in (None, "-"):
        text = sys.stdin.read()
    else:
        with open(args.input) as fh:
            text = fh.read()
    return io.read_complex_text(text)


def _maybe_dot(args, K: Complex):
    if getattr(args, "dot", None):
        with open(args.dot, "w") as fh:
            fh.write(io.complex_to_dot(K))


# ---------------------------------------------------------------------------
# graph

def _quantity(name, value, witness, notes):
    doc = {"quantity": name, "value": value, "witness": witness}
    if notes:
        doc["notes"] = notes
    return doc


def cmd_graph(args, out):
    sub = args.sub
    if sub == "union":
        return _graph_union(args, out)
    if sub == "random":
        rng = random.Random(args.seed)
        edges = [(u, v) for u in range(1, args.n + 1) for v in range(1, args.n + 1) if u != v and rng.random() < args.p]
        g = DirectedGraph.from_edges(args.n, edges)
        _emit(io.graph_to_json(g), "graph", out)
        return EXIT_OK
    g, notes = _graph(args)
    if sub == "ecc":
        D = _ints(args.set)
        doc = _quantity("eccentricity", eccentricity(D, g), {"D": sorted(D)}, notes)
    elif sub == "diam":
        doc = _quantity("diameter", diameter(_static(g)), {}, notes)
    elif sub == "dgt":
        val, S = d_of_g_t_witness(_static(g), args.t)
        doc = _quantity("D(G,t)", val, {"S": sorted(S), "t": args.t}, notes)
    elif sub == "rad":
        val, (D, Dp) = rad_tk_witness(g, args.t, args.k)
        doc = _quantity("rad(G,t,k)", val, {"D": sorted(D), "D_prime": sorted(Dp), "t": args.t, "k": args.k}, notes)
    elif sub == "bigrad":
        val, D = big_rad_witness(g, args.m)
        doc = _quantity("Rad(G,m)", val, {"D": sorted(D), "m": args.m}, notes)
    elif sub == "domset":
        val, S = domination_witness(_static(g) if args.rounds is None else product(GraphSequence.repeat(_static(g), args.rounds)))
        doc = _quantity("gamma_out", val, {"S": sorted(S)}, notes)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(sub)
    _emit(doc, "quantity", out)
    return EXIT_OK


def _static(g):
    if not isinstance(g, DirectedGraph):
        raise UsageError("this quantity needs a static graph")
    return g


def _graph_union(args, out):
    import json
    try:
        with open(args.entries) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise io.FormatError(f"cannot read entries: {exc}") from None
    n = doc["n"]
    entries, sources = [], []
    for e in doc["entries"]:
        seq, _ = io.graph_from_json({"n": n, "rounds": e["rounds"]})
        entries.append((product(seq), e.get("present")))
        sources.append(seq)
    U = union_graph(entries, sources)
    val, S = domination_witness(U)
    base_val, base_S = domination_witness(entries[0][0])
    witness = {"S": sorted(S), "edges": [list(x) for x in U.proper_edges()], "base_gamma": base_val,
               "present": sorted(p for _, p in entries if p is not None)}
    _emit(_quantity("gamma_out(union)", val, witness, []), "quantity", out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# complex

def cmd_complex(args, out):
    sub = args.sub
    if sub == "pseudosphere":
        K = uniform_pseudosphere(args.n, _values(args.values))
        _maybe_dot(args, K)
        _emit(complex_to_json(K), "complex", out)
        return EXIT_OK
    if sub == "kuhn":
        K = kuhn_input_complex(args.n, args.k)
        _maybe_dot(args, K)
        _emit(complex_to_json(K), "complex", out)
        return EXIT_OK
    K = _read_complex(args)
    _maybe_dot(args, K)
    if sub == "skeleton":
        _emit(complex_to_json(skeleton(K, args.d)), "complex", out)
        return EXIT_OK
    if sub == "check-shelling":
        if not is_pure(K):
            raise NotPureError("complex is not pure")
        if args.order == "face-pseudo":
            order = combined_order(K)
        elif args.order == "kuhn":
            order = kuhn_order(K)
        else:
            import json
            with open(args.order) as fh:
                order = io.facets_from_json(json.load(fh))
        rep = verify_shelling_order(K, order)
        doc = {"ok": rep.ok, "order": args.order if args.order in ("face-pseudo", "kuhn") else "file",
               "facets": len(K.facets), "witness": rep.to_json()["witness"],
               "shelling_order": [io.simplex_to_json(f) for f in order] if args.emit_order else None}
        _emit(doc, "shelling", out)
        return EXIT_OK if rep.ok else EXIT_INVARIANT
    if sub == "shellable":
        order = is_shellable_exhaustive(K, cap=args.cap)
        doc = {"ok": order is not None, "order": "exhaustive", "facets": len(K.facets), "witness": None,
               "shelling_order": [io.simplex_to_json(f) for f in order] if order is not None else None}
        _emit(doc, "shelling", out)
        return EXIT_OK
    if sub == "betti":
        b = betti_mod2(K)
        low = next((i for i, x in enumerate(b[:-1]) if x), None)
        _emit({"betti": b, "dim": K.dim, "proxy": "mod-2 reduced homology", "not_connected_below": low},
              "betti", out)
        return EXIT_OK
    raise UsageError(sub)  # pragma: no cover


# ---------------------------------------------------------------------------
# simulate

def _flood_chunk(payload):
    G, t, k, mode_text, horizon, values, patterns, start, stop = payload
    assignments = list(itertools.product(values, repeat=G.n))[start:stop]
    runs = bad = 0
    first = None
    for ai, vals in enumerate(assignments, start=start):
        inputs = dict(zip(sorted(G.nodes), vals))
        for pi, pat in enumerate(patterns):
            res = min_flooding(G, inputs, pat, t, k, horizon)
            runs += 1
            if not verify_kset_run(res.decisions, inputs, k, G.nodes - pat.faulty()):
                bad += 1
                if first is None:
                    first = {"assignment": ai, "pattern": pi, "inputs": {str(p): x for p, x in inputs.items()},
                             "failures": pat.to_json(),
                             "decisions": {str(p): x for p, x in sorted(res.decisions.items())}}
    return runs, bad, first


def cmd_simulate(args, out):
    if args.sub == "flood":
        G = _static(_graph(args)[0])
        horizon = args.horizon if args.horizon is not None else flooding_horizon(G, args.t, args.k)
        mode = parse_mode(args.mode, k=args.k, t=args.t)
        values = _values(args.values) if args.values else list(range(1, args.k + 2))
        patterns = list(enumerate_failure_patterns(G.n, args.t, horizon, G, mode))
        total = len(patterns) * len(values) ** G.n
        budget = enumeration_budget()
        if total > budget:
            raise BudgetExceeded("flooding runs", total, budget)
        n_assign = len(values) ** G.n
        jobs = max(1, args.jobs)
        step = -(-n_assign // jobs)
        chunks = [(G, args.t, args.k, args.mode, horizon, values, patterns, s, min(s + step, n_assign))
                  for s in range(0, n_assign, step)]
        if jobs == 1:
            results = [_flood_chunk(c) for c in chunks]
        else:
            with ProcessPoolExecutor(max_workers=jobs) as ex:
                results = list(ex.map(_flood_chunk, chunks))
        runs = sum(r[0] for r in results)
        bad = sum(r[1] for r in results)
        first = next((r[2] for r in results if r[2] is not None), None)
        doc = {"command": "flood", "horizon": horizon, "runs": runs, "violations": bad, "agree": bad == 0,
               "first_violation": first}
        _emit(doc, "simulate", out)
        return EXIT_OK if bad == 0 else EXIT_INVARIANT
    sc = io.read_scenario(args.scenario)
    G = sc["graph"]
    mode = parse_mode(sc.get("mode", "all"), k=sc["k"], t=sc["t"])
    if args.sub == "run":
        if "inputs" not in sc:
            raise UsageError("simulate run needs explicit inputs")
        inputs = {int(p): x for p, x in sc["inputs"].items()}
        pat = FailurePattern.of(Crash(c["p"], c["round"], frozenset(c.get("receivers", ())))
                                for c in sc.get("failures", []))
        trans: list = []
        views = run_views(ExecutionSpec(G, inputs, pat, sc["rounds"]), trans)
        doc = {"command": "run",
               "views": [{"p": p, "label": encode_label(v)} for p, v in sorted(views.items())],
               "transcript": transcript_lines(trans) if args.transcript else []}
        _emit(doc, "simulate", out)
        return EXIT_OK
    # protocol complex
    if sc.get("all_inputs", "inputs" not in sc):
        values = _values(args.values) if args.values else list(range(1, sc["k"] + 2))
        I = uniform_pseudosphere(len(G.nodes), values)
    else:
        I = Complex(frozenset([frozenset(io.simplex_from_pairs(sc["inputs"]))]))
    P = protocol_complex(G, I, sc["rounds"], mode, sc["t"])
    _maybe_dot(args, P)
    _emit(complex_to_json(P), "complex", out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# carrier

def cmd_carrier(args, out):
    G, notes = _graph(args)
    n = len(G.nodes)
    k, t = args.k, args.t
    props = [p.strip().upper() for p in args.properties.split(",")] if args.properties else None
    instance = {"n": n, "k": k, "t": t, "graph_notes": notes}
    conditions = None
    if args.map == "g":
        if args.R is None:
            raise UsageError("--R is required for the overhead map")
        if args.source == "initially-dead":
            octx = initially_dead_context(G, n, t, k, args.R)
        else:
            src = crash_chain_source(_complete_like(G), n, t, k)
            octx = OverheadContext(src, G, t // k, args.R, n, t, k)
        conditions = verify_C1_C2(octx.source, n, t).to_json()
        instance.update({"R": args.R, "source": args.source})
        reports = check_carrier_properties(lambda s: g_map(s, octx), octx.source,
                                           props or [NONEMPTY, MONOTONE, STRICT], k=k)
    else:
        values = _values(args.values) if args.values else list(range(1, k + 2))
        pipe = CarrierPipeline(G, n, k, t, uniform_pseudosphere(n, values), rho_choice=args.rho)
        for _ in range(args.i):
            pipe.advance(pipe.current.domain.sorted_facets()[0])
        ctx = pipe.current
        fn = {"f-general": f_general, "h-general": h_general, "f-complete": f_complete}[args.map]
        instance.update({"i": args.i, "values": values})

        def image(s):
            return fn(s, ctx) if s else Complex()

        flags = {"rho_choice": args.rho} if args.map == "f-general" else {}
        reports = check_carrier_properties(image, ctx.domain, props or [MONOTONE, STRICT, CODIM, PURE], k=k,
                                           target_dim=ctx.target_dim, flags=flags)
        if args.map == "f-general" and (props is None or "SHELLING" in props):
            reports.append(check_image_shellings(ctx, flags))
    doc = {"map": args.map, "instance": instance,
           "properties": [r.to_json(io.simplex_to_json) for r in reports]}
    if conditions is not None:
        doc["conditions"] = conditions
    _emit(doc, "carrier", out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_INVARIANT


def _complete_like(G):
    from .graphs import complete_graph
    return complete_graph(len(G.nodes))


# ---------------------------------------------------------------------------
# solve

def _scan_one(payload):
    spec, r = payload
    try:
        P = spec.protocol(r)
    except BudgetExceeded as exc:
        return r, BUDGET, {"executions": exc.count}
    res = decision_map_exists(P, spec.k)
    return r, res.status, {"nodes": res.nodes, "vertices": res.vertices, "facets": res.facets}


def cmd_solve(args, out):
    G, notes = _graph(args)
    mode = parse_mode(args.mode, k=args.k, t=args.t)
    values = _values(args.values) if args.values else None
    spec = TaskSpec(len(G.nodes), args.t, args.k, G, mode, values)
    if args.sub == "scan":
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as ex:
                rows = list(ex.map(_scan_one, [(spec, r) for r in range(args.rmax + 1)]))
            per, exact, hit = [], None, False
            for r, status, stats in rows:
                per.append({"rounds": r, "status": status, **stats})
                if status == BUDGET:
                    hit = True
                    break
                if status == "SAT":
                    exact = r
                    break
            doc = {"task": spec.to_json(), "rmax": args.rmax, "per_round": per,
                   "exact": exact if exact is not None else "unknown", "budget_hit": hit}
        else:
            doc = scan_rounds(spec, args.rmax).to_json()
        if notes:
            doc["notes"] = notes
        _emit(doc, "solve", out)
        return EXIT_BUDGET if doc["budget_hit"] else EXIT_OK
    if args.sub == "bounds":
        doc = bounds_report(spec, args.rmax)
        _emit(doc, "solve", out)
        if doc.get("scan", {}).get("budget_hit"):
            return EXIT_BUDGET
        return EXIT_INVARIANT if doc.get("sandwich") == "VIOLATED" else EXIT_OK
    if args.sub == "dominance":
        doc = {"task": spec.to_json(), "r": args.r, **dominance_precondition(_static(G), args.k, args.t, args.r)}
        _emit(doc, "solve", out)
        return EXIT_OK
    raise UsageError(args.sub)  # pragma: no cover


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--jobs", type=int, default=1, help="worker processes (output is identical)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--dot", help="also write a DOT rendering to this path")

    p = _Parser(prog="ksetlab", description="k-set agreement lower/upper bound workbench")
    verbs = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    g = verbs.add_parser("graph", help="graph quantities").add_subparsers(dest="sub", required=True,
                                                                             parser_class=_Parser)
    for name in ("ecc", "diam", "dgt", "rad", "bigrad", "domset"):
        sp = g.add_parser(name, parents=[common])
        sp.add_argument("--graph", required=True, help="graph JSON file or built-in like cycle:5")
        if name == "ecc":
            sp.add_argument("--set", required=True, help="comma-separated node set D")
        if name in ("dgt", "rad"):
            sp.add_argument("--t", type=int, required=True)
        if name == "rad":
            sp.add_argument("--k", type=int, required=True)
        if name == "bigrad":
            sp.add_argument("--m", type=int, required=True)
        if name == "domset":
            sp.add_argument("--rounds", type=int, help="dominate the r-round product instead")
    sp = g.add_parser("union", parents=[common])
    sp.add_argument("--entries", required=True, help="JSON {n, entries: [{rounds, present}]}")
    sp = g.add_parser("random", parents=[common])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, default=0.5)

    c = verbs.add_parser("complex", help="simplicial complexes").add_subparsers(dest="sub", required=True,
                                                                                 parser_class=_Parser)
    sp = c.add_parser("pseudosphere", parents=[common])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--values", required=True, help="count (1..v) or comma list")
    sp = c.add_parser("kuhn", parents=[common])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    for name in ("skeleton", "check-shelling", "shellable", "betti"):
        sp = c.add_parser(name, parents=[common])
        sp.add_argument("--in", dest="input", help="complex JSON file (default stdin)")
        if name == "skeleton":
            sp.add_argument("--d", type=int, required=True)
        if name == "check-shelling":
            sp.add_argument("--order", required=True, help="face-pseudo, kuhn, or a complex JSON listing the order")
            sp.add_argument("--emit-order", action="store_true")
        if name == "shellable":
            sp.add_argument("--cap", type=int, default=10)

    s = verbs.add_parser("simulate", help="executions").add_subparsers(dest="sub", required=True,
                                                                        parser_class=_Parser)
    sp = s.add_parser("flood", parents=[common])
    sp.add_argument("--graph", required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--mode", default="all")
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--values")
    for name in ("run", "complex"):
        sp = s.add_parser(name, parents=[common])
        sp.add_argument("--scenario", required=True)
        sp.add_argument("--values")
        if name == "run":
            sp.add_argument("--transcript", action="store_true")

    cr = verbs.add_parser("carrier", help="carrier-map property battery").add_subparsers(
        dest="sub", required=True, parser_class=_Parser)
    sp = cr.add_parser("check", parents=[common])
    sp.add_argument("--map", required=True, choices=["f-general", "h-general", "f-complete", "g"])
    sp.add_argument("--graph", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--t", type=int, default=None)
    sp.add_argument("--i", type=int, default=0)
    sp.add_argument("--values")
    sp.add_argument("--rho", choices=["sigma", "tau"], default="sigma")
    sp.add_argument("--R", type=int)
    sp.add_argument("--source", choices=["initially-dead", "crash-chain"], default="initially-dead")
    sp.add_argument("--properties", help="comma list; default depends on the map")

    sv = verbs.add_parser("solve", help="solvability search and bounds").add_subparsers(
        dest="sub", required=True, parser_class=_Parser)
    for name in ("scan", "bounds", "dominance"):
        sp = sv.add_parser(name, parents=[common])
        sp.add_argument("--graph", required=True)
        sp.add_argument("--t", type=int, required=True)
        sp.add_argument("--k", type=int, required=True)
        sp.add_argument("--mode", default="all")
        sp.add_argument("--values")
        if name == "scan":
            sp.add_argument("--rmax", type=int, required=True)
        if name == "bounds":
            sp.add_argument("--rmax", type=int)
        if name == "dominance":
            sp.add_argument("--r", type=int, required=True)
    return p


_COMMANDS = {"graph": cmd_graph, "complex": cmd_complex, "simulate": cmd_simulate, "carrier": cmd_carrier,
             "solve": cmd_solve}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if getattr(args, "t", 0) is None:
        args.t = 0
    try:
        return _COMMANDS[args.verb](args, out)
    except BudgetExceeded as exc:
        print(f"ksetlab: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (NotPureError, ShellingDisagreement) as exc:
        print(f"ksetlab: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (UsageError, io.FormatError, ValueError, KeyError, OSError) as exc:
        print(f"ksetlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
