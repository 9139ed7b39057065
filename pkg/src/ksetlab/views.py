"""Full-information views (heard-of histories) and canonical label handling.

A round-0 view is the bare input value. A round-r view records, for every
sender heard in round r, that sender's round-(r-1) view. Views are interned:
two structurally equal views are the same object, so equality and hashing are
O(1) no matter how deep the history is.
"""
from __future__ import annotations

import weakref
from functools import lru_cache
from typing import Any, Mapping, NamedTuple


class Vertex(NamedTuple):
    color: int
    label: Any


class View:
    __slots__ = ("round", "received", "_key", "_hist", "__weakref__")
    _table: "weakref.WeakValueDictionary" = weakref.WeakValueDictionary()

    def __new__(cls, round: int, received: Mapping[int, Any]):
        if round < 1:
            raise ValueError("a View node has round >= 1; round-0 views are bare labels")
        items = tuple(sorted(received.items()))
        token = (round, items)
        obj = cls._table.get(token)
        if obj is None:
            obj = object.__new__(cls)
            obj.round = round
            obj.received = items
            obj._key = None
            obj._hist = None
            cls._table[token] = obj
        return obj

    def __reduce__(self):
        return (View, (self.round, dict(self.received)))

    def __repr__(self):
        return f"View({self.round}, {dict(self.received)!r})"

    def senders(self) -> frozenset:
        return frozenset(p for p, _ in self.received)

    def previous(self, p: int):
        for q, v in self.received:
            if q == p:
                return v
        raise KeyError(p)

    def hist(self) -> frozenset:
        """All (process, round-0 label) pairs this view carries, directly or transitively."""
        if self._hist is None:
            acc = set()
            for p, v in self.received:
                if isinstance(v, View):
                    acc |= v.hist()
                else:
                    acc.add(Vertex(p, v))
            self._hist = frozenset(acc)
        return self._hist

    def sort_key(self):
        if self._key is None:
            self._key = (3, self.round, tuple((p, label_key(v)) for p, v in self.received))
        return self._key


@lru_cache(maxsize=None)
def label_key(label) -> tuple:
    """Structural total order on labels: ints < strings < simplices < views."""
    if isinstance(label, bool):
        return (0, int(label))
    if isinstance(label, int):
        return (0, label)
    if isinstance(label, str):
        return (1, label)
    if isinstance(label, frozenset):
        return (2, tuple(sorted(vertex_key(v) for v in label)))
    if isinstance(label, View):
        return label.sort_key()
    if isinstance(label, tuple):
        return (4, tuple(label_key(x) for x in label))
    raise TypeError(f"unsupported label type {type(label).__name__}")


def vertex_key(v: Vertex) -> tuple:
    return (v.color, label_key(v.label))


def simplex_key(s) -> tuple:
    return tuple(sorted(vertex_key(v) for v in s))


def label_names(label) -> frozenset:
    """Processes a label reports hearing from in its last round (empty for inputs)."""
    if isinstance(label, View):
        return label.senders()
    if isinstance(label, frozenset):
        return frozenset(v.color for v in label)
    return frozenset()


def input_values(label) -> frozenset:
    """Every round-0 value carried by a label."""
    if isinstance(label, View):
        return frozenset(v.label for v in label.hist())
    if isinstance(label, frozenset):
        out = set()
        for v in label:
            out |= input_values(v.label)
        return frozenset(out)
    return frozenset([label])


# ---------------------------------------------------------------------------
# canonical strings: 7 | "s" | {p:L,p:L} (simplex) | <r|p:L,p:L> (view)

def encode_label(label) -> str:
    if isinstance(label, bool):
        raise TypeError("bool labels are not supported")
    if isinstance(label, int):
        return str(label)
    if isinstance(label, str):
        import json
        return json.dumps(label)
    if isinstance(label, frozenset):
        parts = sorted(label, key=vertex_key)
        return "{" + ",".join(f"{v.color}:{encode_label(v.label)}" for v in parts) + "}"
    if isinstance(label, View):
        return f"<{label.round}|" + ",".join(f"{p}:{encode_label(v)}" for p, v in label.received) + ">"
    raise TypeError(f"cannot encode label of type {type(label).__name__}")


class _Parser:
    def __init__(self, text: str):
        self.s = text
        self.i = 0

    def fail(self, msg):
        raise ValueError(f"bad label {self.s!r} at {self.i}: {msg}")

    def peek(self):
        return self.s[self.i] if self.i < len(self.s) else ""

    def expect(self, ch):
        if self.peek() != ch:
            self.fail(f"expected {ch!r}")
        self.i += 1

    def integer(self) -> int:
        j = self.i
        if self.peek() == "-":
            self.i += 1
        while self.peek().isdigit():
            self.i += 1
        if j == self.i or self.s[j:self.i] == "-":
            self.fail("expected integer")
        return int(self.s[j:self.i])

    def pairs(self, close):
        out = []
        if self.peek() == close:
            self.i += 1
            return out
        while True:
            p = self.integer()
            self.expect(":")
            out.append((p, self.label()))
            if self.peek() == ",":
                self.i += 1
                continue
            self.expect(close)
            return out

    def label(self):
        ch = self.peek()
        if ch == '"':
            import json
            dec = json.JSONDecoder()
            val, end = dec.raw_decode(self.s, self.i)
            self.i = end
            return val
        if ch == "{":
            self.i += 1
            return frozenset(Vertex(p, lab) for p, lab in self.pairs("}"))
        if ch == "<":
            self.i += 1
            r = self.integer()
            self.expect("|")
            return View(r, dict(self.pairs(">")))
        return self.integer()


def decode_label(text: str):
    p = _Parser(text)
    lab = p.label()
    if p.i != len(text):
        p.fail("trailing characters")
    return lab


_FRONTIER: dict = {}


def history(view, depth: int) -> frozenset:
    """Vertices (process, label) that reached `view` exactly `depth` rounds earlier.

    With self-loops this is everything the view heard of, directly or
    transitively, from the states `depth` rounds back.
    """
    if depth == 0:
        raise ValueError("depth must be positive")
    key = (view, depth)
    got = _FRONTIER.get(key)
    if got is not None:
        return got
    if depth == 1:
        got = frozenset(Vertex(p, v) for p, v in view.received)
    else:
        acc = set()
        for _, v in view.received:
            if not isinstance(v, View):
                raise ValueError("history deeper than the view")
            acc |= history(v, depth - 1)
        got = frozenset(acc)
    _FRONTIER[key] = got
    return got
