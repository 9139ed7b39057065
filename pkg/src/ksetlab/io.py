"""File formats: graph, complex, scenario and report JSON, schema validation, DOT export."""
from __future__ import annotations

import json
import math
from functools import lru_cache
from importlib import resources
from typing import Any

import jsonschema

from .graphs import (DirectedGraph, GraphSequence, complete_graph, cycle_graph, directed_ring, empty_graph,
                     hypercube_graph, path_graph)
from .topology import Complex, complex_from_json, complex_to_json
from .views import encode_label, vertex_key


class FormatError(ValueError):
    """Malformed input file; the CLI maps it to a usage error."""


# ---------------------------------------------------------------------------
# JSON helpers

def encode_number(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def _inf_safe(obj):
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    if isinstance(obj, dict):
        return {str(k): _inf_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_inf_safe(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_inf_safe(v) for v in obj)
    return obj


def dumps(doc: Any) -> str:
    """Canonical JSON text: sorted keys, INF as "inf", trailing newline."""
    return json.dumps(_inf_safe(doc), sort_keys=True, indent=2) + "\n"


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files("ksetlab").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(doc: Any, schema: str):
    try:
        jsonschema.validate(_inf_safe(doc), load_schema(schema))
    except jsonschema.ValidationError as exc:
        raise FormatError(f"{schema}: {exc.message}") from None


# ---------------------------------------------------------------------------
# graphs

_BUILTINS = {
    "complete": complete_graph,
    "cycle": cycle_graph,
    "ring": directed_ring,
    "path": path_graph,
    "empty": empty_graph,
    "hypercube": hypercube_graph,
}


def builtin_graph(spec: str) -> DirectedGraph:
    """`complete:4`, `cycle:5`, `ring:4`, `path:3`, `empty:3`, `hypercube:3`."""
    name, _, arg = spec.partition(":")
    if name not in _BUILTINS or not arg.isdigit():
        raise FormatError(f"unknown built-in graph {spec!r}")
    return _BUILTINS[name](int(arg))


def graph_from_json(doc: dict) -> tuple:
    """Parse a graph document; returns (graph or sequence, normalization notes)."""
    validate(doc, "graph")
    directed = doc.get("directed", True)
    notes = []
    if "rounds" in doc:
        graphs = []
        for i, es in enumerate(doc["rounds"], start=1):
            g, sub = _one_graph(doc["n"], es, directed)
            graphs.append(g)
            notes += [f"round {i}: {m}" for m in sub]
        return GraphSequence.of(graphs), notes
    g, notes = _one_graph(doc["n"], doc["edges"], directed)
    return g, notes


def _one_graph(n: int, edges, directed: bool):
    notes = []
    pairs = [tuple(e) for e in edges]
    for u, v in pairs:
        if not (1 <= u <= n and 1 <= v <= n):
            raise FormatError(f"edge [{u},{v}] outside 1..{n}")
    missing = sorted({p for p in range(1, n + 1)} - {u for u, v in pairs if u == v})
    if missing:
        notes.append(f"added self-loops at {missing}")
    if not directed:
        notes.append("undirected input symmetrized")
    return DirectedGraph.from_edges(n, pairs, directed=directed), notes


def graph_to_json(g) -> dict:
    if isinstance(g, GraphSequence):
        return {"n": len(g.nodes), "directed": True, "rounds": [[list(e) for e in r.proper_edges()] for r in g]}
    return {"n": g.n, "directed": True, "edges": [list(e) for e in g.proper_edges()]}


def read_graph(source: str) -> tuple:
    if ":" in source and not source.endswith(".json"):
        return builtin_graph(source), []
    try:
        with open(source) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read graph {source!r}: {exc}") from None
    return graph_from_json(doc)


# ---------------------------------------------------------------------------
# complexes

def read_complex_text(text: str) -> Complex:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"complex is not JSON: {exc}") from None
    validate(doc, "complex")
    try:
        return complex_from_json(doc)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def facets_from_json(doc: dict) -> list:
    """Facets in file order (used for explicit shelling orders)."""
    validate(doc, "complex")
    from .topology import simplex
    from .views import decode_label
    return [simplex((int(v["p"]), decode_label(v["label"])) for v in f) for f in doc["facets"]]


def simplex_to_json(s) -> list:
    return [{"p": v.color, "label": encode_label(v.label)} for v in sorted(s, key=vertex_key)]


def simplex_from_pairs(inputs: dict) -> frozenset:
    from .topology import simplex
    return simplex((int(p), x) for p, x in inputs.items())


def complex_to_dot(K: Complex, name: str = "K") -> str:
    """1-skeleton of a complex, vertices named by color and canonical label."""
    verts = sorted(K.vertices(), key=vertex_key)
    ids = {v: f"v{i}" for i, v in enumerate(verts)}
    lines = [f"graph {name} {{"]
    for v in verts:
        lab = f"p{v.color}:{encode_label(v.label)}".replace('"', '\\"')
        lines.append(f'  {ids[v]} [label="{lab}"];')
    edges = set()
    for f in K.facets:
        fs = sorted(f, key=vertex_key)
        for i in range(len(fs)):
            for j in range(i + 1, len(fs)):
                edges.add((ids[fs[i]], ids[fs[j]]))
    lines += [f"  {a} -- {b};" for a, b in sorted(edges)]
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# scenarios

def read_scenario(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read scenario {path!r}: {exc}") from None
    validate(doc, "scenario")
    g = doc["graph"]
    if isinstance(g, str):
        graph, notes = read_graph(g)
    else:
        graph, notes = graph_from_json(g)
    out = dict(doc)
    out["graph"] = graph
    out["notes"] = notes
    return out


__all__ = [
    "FormatError", "dumps", "validate", "load_schema", "builtin_graph", "graph_from_json", "graph_to_json",
    "read_graph", "read_complex_text", "facets_from_json", "simplex_to_json", "simplex_from_pairs", "complex_to_dot", "complex_to_json",
    "read_scenario", "encode_number",
]
