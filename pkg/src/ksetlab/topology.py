"""Chromatic simplicial complexes, shelling orders and mod-2 homology."""
from __future__ import annotations

import itertools
import json
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cmp_to_key
from math import comb
from typing import Any, Iterable, Sequence

from .views import Vertex, decode_label, encode_label, label_key, simplex_key, vertex_key

BOT, TOP = 0, 1


class NotPureError(ValueError):
    pass


class ShellingDisagreement(AssertionError):
    """The two shelling characterizations disagreed; always an implementation bug."""


def simplex(vertices: Iterable) -> frozenset:
    s = frozenset(Vertex(*v) for v in vertices)
    if len({v.color for v in s}) != len(s):
        raise ValueError(f"simplex is not chromatic: {sorted(s, key=vertex_key)}")
    return s


def names(s) -> frozenset:
    return frozenset(v.color for v in s)


def label_of(s, p):
    for v in s:
        if v.color == p:
            return v.label
    raise KeyError(p)


def restrict(s, procs) -> frozenset:
    return frozenset(v for v in s if v.color in procs)


def maximal_sets(sets: Iterable[frozenset]) -> frozenset:
    """Keep the inclusion-maximal non-empty sets."""
    uniq = sorted({s for s in sets if s}, key=len, reverse=True)
    kept: list = []
    containing = defaultdict(list)
    for s in uniq:
        pivot = min(s, key=lambda v: len(containing[v]))
        if any(s <= c for c in containing[pivot]):
            continue
        kept.append(s)
        for v in s:
            containing[v].append(s)
    return frozenset(kept)


@dataclass(frozen=True)
class Complex:
    facets: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        for f in self.facets:
            if len(names(f)) != len(f):
                raise ValueError("non-chromatic facet")

    @classmethod
    def from_simplices(cls, simplices: Iterable) -> "Complex":
        return cls(maximal_sets(frozenset(s) for s in simplices))

    def is_empty(self) -> bool:
        return not self.facets

    def sorted_facets(self) -> list:
        return sorted(self.facets, key=simplex_key)

    @property
    def dim(self) -> int:
        return max((len(f) for f in self.facets), default=0) - 1

    def vertices(self) -> frozenset:
        return frozenset(v for f in self.facets for v in f)

    def contains(self, s) -> bool:
        s = frozenset(s)
        return any(s <= f for f in self.facets)

    def faces(self, dim: int | None = None) -> set:
        out = set()
        for f in self.facets:
            sizes = range(1, len(f) + 1) if dim is None else [dim + 1]
            for size in sizes:
                if size <= len(f):
                    out.update(frozenset(c) for c in itertools.combinations(f, size))
        return out

    def is_subcomplex_of(self, other: "Complex") -> bool:
        return all(other.contains(f) for f in self.facets)

    def intersection(self, other: "Complex") -> "Complex":
        return Complex(maximal_sets(a & b for a in self.facets for b in other.facets))

    def union(self, other: "Complex") -> "Complex":
        return Complex(maximal_sets(self.facets | other.facets))

    def star_facets(self, s) -> list:
        """Facets containing s."""
        s = frozenset(s)
        return [f for f in self.facets if s <= f]

    def __len__(self):
        return len(self.facets)


def complex_union(parts: Iterable[Complex]) -> Complex:
    acc = set()
    for c in parts:
        acc |= c.facets
    return Complex(maximal_sets(acc))


def is_pure(K: Complex) -> bool:
    return len({len(f) for f in K.facets}) <= 1


def codim(s, K: Complex) -> int:
    if K.is_empty():
        raise ValueError("codim on the empty complex")
    if not is_pure(K):
        raise NotPureError("not pure")
    if not K.contains(s):
        raise ValueError("not a face of the complex")
    return K.dim - (len(s) - 1)


def pseudosphere(assignments: Sequence) -> Complex:
    procs = [p for p, _ in assignments]
    if len(set(procs)) != len(procs):
        raise ValueError("duplicate process ids")
    pools = []
    for p, values in assignments:
        values = list(values)
        if not values:
            raise ValueError(f"empty value set for process {p}")
        pools.append([Vertex(p, v) for v in values])
    return Complex(frozenset(frozenset(c) for c in itertools.product(*pools)))


def uniform_pseudosphere(n: int, values: Iterable) -> Complex:
    values = list(values)
    return pseudosphere([(p, values) for p in range(1, n + 1)])


def skeleton(K: Complex, d: int) -> Complex:
    if d < 0:
        raise ValueError("d must be >= 0")
    if K.is_empty():
        raise ValueError("skeleton of the empty complex")
    out = set()
    for f in K.facets:
        if len(f) <= d + 1:
            out.add(f)
        else:
            out.update(frozenset(c) for c in itertools.combinations(f, d + 1))
    return Complex(maximal_sets(out))


def kuhn_indices(n: int, k: int) -> list:
    """All x with n >= x_1 >= ... >= x_k >= 0, in increasing lexicographic order."""
    return sorted(tuple(reversed(c)) for c in itertools.combinations_with_replacement(range(n + 1), k))


def kuhn_facet(x: Sequence[int], n: int) -> frozenset:
    # node j gets the number of coordinates reaching it
    return frozenset(Vertex(j, sum(1 for xi in x if xi >= j)) for j in range(1, n + 1))


def kuhn_index_of(facet, k: int) -> tuple:
    return tuple(sum(1 for v in facet if v.label >= i) for i in range(1, k + 1))


def kuhn_input_complex(n: int, k: int) -> Complex:
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    return Complex(frozenset(kuhn_facet(x, n) for x in kuhn_indices(n, k)))


# ---------------------------------------------------------------------------
# orders

def _cmp(a, b) -> int:
    return (a > b) - (a < b)


def signature(s, universe: Iterable[int]) -> tuple:
    present = names(s)
    return tuple(BOT if i in present else TOP for i in sorted(universe))


def face_order_cmp(a, b, universe: Iterable[int]) -> int:
    universe = list(universe)
    return _cmp(signature(a, universe), signature(b, universe))


def _labels_by_index(s) -> tuple:
    return tuple(label_key(v.label) for v in sorted(s, key=lambda v: v.color))


def pseudosphere_order_cmp(a, b) -> int:
    if names(a) != names(b):
        raise ValueError("color-set mismatch")
    return _cmp(_labels_by_index(a), _labels_by_index(b))


def combined_order_key(s, universe: Iterable[int] | None = None) -> tuple:
    """Sort key for the face-then-pseudosphere order on skeleton facets."""
    if universe is None:
        universe = names(s)
    return (signature(s, universe), _labels_by_index(s))


def combined_order_cmp(a, b, universe: Iterable[int] | None = None) -> int:
    if universe is None:
        universe = names(a) | names(b)
    universe = sorted(universe)
    return _cmp(combined_order_key(a, universe), combined_order_key(b, universe))


def kuhn_order_cmp(a: Sequence[int], b: Sequence[int]) -> int:
    if len(a) != len(b):
        raise ValueError("Kuhn indices of different length")
    return _cmp(tuple(a), tuple(b))


def combined_order(K: Complex) -> list:
    universe = sorted({v.color for v in K.vertices()})
    return sorted(K.facets, key=lambda f: combined_order_key(f, universe))


def kuhn_order(K: Complex) -> list:
    k = max(v.label for v in K.vertices())
    return sorted(K.facets, key=lambda f: kuhn_index_of(f, k))


# ---------------------------------------------------------------------------
# shellability

@dataclass
class ShellingReport:
    ok: bool
    witness: Any = None
    checked_pairs: int = 0

    def to_json(self) -> dict:
        w = None
        if self.witness is not None:
            w = {"a": self.witness[0], "b": self.witness[1]}
        return {"ok": self.ok, "witness": w}


def _exchange_check(order: Sequence[frozenset]):
    """Every earlier facet's overlap with the current one lies in a codim-1 overlap
    with some earlier facet. Returns the first failing (a, b) or None."""
    for b in range(1, len(order)):
        fb = order[b]
        d = len(fb) - 1
        ridges = {fb & order[c] for c in range(b) if len(fb & order[c]) == d}
        missing = {next(iter(fb - r)) for r in ridges}
        for a in range(b):
            if not (fb - order[a]) & missing:
                return (a, b)
    return None


def _prefix_ok(prefix: Iterable[frozenset], fb: frozenset) -> bool:
    d = len(fb) - 1
    meets = maximal_sets(fb & fa for fa in prefix)
    if d == 0:
        return True
    return bool(meets) and all(len(m) == d for m in meets)


def _prefix_check(order: Sequence[frozenset]):
    for b in range(1, len(order)):
        if not _prefix_ok(order[:b], order[b]):
            fb = order[b]
            d = len(fb) - 1
            # name an earlier facet whose overlap is not covered by a ridge
            ridges = [fb & order[c] for c in range(b) if len(fb & order[c]) == d]
            for a in range(b):
                if not any((fb & order[a]) <= r for r in ridges):
                    return (a, b)
            return (0, b)
    return None


def verify_shelling_order(K: Complex, order: Sequence) -> ShellingReport:
    if not is_pure(K):
        raise NotPureError("not pure")
    order = [frozenset(f) for f in order]
    if len(order) != len(K.facets) or set(order) != set(K.facets):
        raise ValueError("order is not a permutation of the facets")
    w1 = _exchange_check(order)
    w2 = _prefix_check(order)
    if (w1 is None) != (w2 is None):
        raise ShellingDisagreement(f"exchange check {w1}, prefix check {w2}")
    return ShellingReport(ok=w1 is None, witness=w1, checked_pairs=len(order) * (len(order) - 1) // 2)


def is_shellable_exhaustive(K: Complex, cap: int = 10):
    """Return some shelling order of K, or None if none exists."""
    facets = K.sorted_facets()
    if len(facets) > cap:
        raise ValueError(f"facet count {len(facets)} exceeds cap {cap}")
    if not is_pure(K):
        return None
    if not facets:
        return []
    chosen: list = []
    used = [False] * len(facets)

    def extend() -> bool:
        if len(chosen) == len(facets):
            return True
        for i, f in enumerate(facets):
            if used[i]:
                continue
            if chosen and not _prefix_ok(chosen, f):
                continue
            used[i] = True
            chosen.append(f)
            if extend():
                return True
            chosen.pop()
            used[i] = False
        return False

    return list(chosen) if extend() else None


# ---------------------------------------------------------------------------
# mod-2 homology

def _rank_gf2(rows: Iterable[int]) -> int:
    basis: dict = {}
    rank = 0
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top in basis:
                r ^= basis[top]
            else:
                basis[top] = r
                rank += 1
                break
    return rank


def betti_mod2(K: Complex, up_to: int | None = None) -> list:
    """Reduced mod-2 Betti numbers b_0..b_up_to (a necessary-condition proxy for connectivity)."""
    if K.is_empty():
        return [] if up_to is None else [0] * (up_to + 1)
    top = K.dim
    if up_to is None:
        up_to = top
    if up_to > top:
        raise ValueError("up_to exceeds the dimension")
    levels = [sorted(K.faces(d), key=simplex_key) for d in range(min(top, up_to + 1) + 1)]
    index = [{s: i for i, s in enumerate(lv)} for lv in levels]

    def boundary_rank(d: int) -> int:
        if d == 0:
            return 1 if levels[0] else 0
        if d >= len(levels):
            return 0
        rows = []
        for s in levels[d]:
            r = 0
            for v in s:
                r |= 1 << index[d - 1][s - {v}]
            rows.append(r)
        return _rank_gf2(rows)

    ranks = [boundary_rank(d) for d in range(up_to + 2)]
    return [len(levels[d]) - ranks[d] - ranks[d + 1] for d in range(up_to + 1)]


# ---------------------------------------------------------------------------
# serialization

def complex_to_json(K: Complex) -> dict:
    return {
        "facets": [
            [{"p": v.color, "label": encode_label(v.label)} for v in sorted(f, key=vertex_key)]
            for f in K.sorted_facets()
        ]
    }


def complex_from_json(doc: dict) -> Complex:
    facets = []
    for f in doc["facets"]:
        facets.append(simplex((int(v["p"]), decode_label(v["label"])) for v in f))
    return Complex.from_simplices(facets)


def dumps_complex(K: Complex) -> str:
    return json.dumps(complex_to_json(K), sort_keys=True)


def loads_complex(text: str) -> Complex:
    return complex_from_json(json.loads(text))


def kuhn_facet_count(n: int, k: int) -> int:
    return comb(n + k, k)


def order_by_key(K: Complex, key) -> list:
    return sorted(K.facets, key=key)


def sort_with_cmp(facets: Iterable, cmp) -> list:
    return sorted(facets, key=cmp_to_key(cmp))
