"""Sentence-level word co-occurrence graphs and their DOT / GraphML / JSON export."""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from xml.sax.saxutils import escape, quoteattr

from .errors import UnsupportedFormat
from .tokenize import CONTENT_POS

FORMATS = ("dot", "graphml", "json")


def edge_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass
class CooccurrenceGraph:
    """Undirected weighted graph; edge keys are stored in code-point order.

    ``nodes`` maps lemma -> token frequency, ``sentence_freq`` maps lemma ->
    number of sentences containing it, ``n_sentences`` is the sentence total
    the counts were taken over.
    """

    nodes: dict[str, int]
    edges: dict[tuple[str, str], int]
    sentence_freq: dict[str, int] = field(default_factory=dict)
    n_sentences: int = 0

    def __post_init__(self):
        for (a, b), w in self.edges.items():
            if a == b:
                raise ValueError(f"self-loop on {a!r}")
            if a > b:
                raise ValueError(f"edge {(a, b)!r} not in canonical order")
            if a not in self.nodes or b not in self.nodes:
                raise ValueError(f"edge {(a, b)!r} references a missing node")
            if w < 1:
                raise ValueError("edge weights must be positive")

    def weight(self, a: str, b: str) -> int:
        return self.edges.get(edge_key(a, b), 0)

    def jaccard(self, a: str, b: str) -> float:
        w = self.weight(a, b)
        return w / (self.sentence_freq[a] + self.sentence_freq[b] - w)

    def pmi(self, a: str, b: str) -> float:
        w = self.weight(a, b)
        return math.log(w * self.n_sentences / (self.sentence_freq[a] * self.sentence_freq[b]))


def build_cooccurrence(tokens, keep_pos=CONTENT_POS, min_node_freq: int = 1) -> CooccurrenceGraph:
    """Count, per sentence, every unordered pair of distinct lemmas present together.

    ``keep_pos=None`` keeps all POS tags.
    """
    if min_node_freq < 1:
        raise ValueError("min_node_freq must be >= 1")
    freq: Counter = Counter()
    sent_freq: Counter = Counter()
    edges: Counter = Counter()
    n_sent = 0
    for sent in tokens.tokens:
        lemmas = [t.lemma for t in sent if keep_pos is None or t.pos in keep_pos]
        n_sent += 1
        freq.update(lemmas)
        uniq = sorted(set(lemmas))
        sent_freq.update(uniq)
        edges.update(itertools.combinations(uniq, 2))
    keep = {w for w, n in freq.items() if n >= min_node_freq}
    return CooccurrenceGraph(
        nodes={w: freq[w] for w in sorted(keep)},
        edges={e: w for e, w in sorted(edges.items()) if e[0] in keep and e[1] in keep},
        sentence_freq={w: sent_freq[w] for w in sorted(keep)},
        n_sentences=n_sent,
    )


def prune(graph: CooccurrenceGraph, min_edge_weight: int = 1, top_k_nodes: int | None = None,
          drop_isolated: bool = True) -> CooccurrenceGraph:
    if min_edge_weight < 1:
        raise ValueError("min_edge_weight must be >= 1")
    nodes = graph.nodes
    if top_k_nodes is not None:
        ranked = sorted(nodes.items(), key=lambda kv: (-kv[1], kv[0]))[:max(top_k_nodes, 0)]
        nodes = dict(ranked)
    edges = {
        e: w for e, w in graph.edges.items()
        if w >= min_edge_weight and e[0] in nodes and e[1] in nodes
    }
    if drop_isolated:
        touched = {v for e in edges for v in e}
        nodes = {w: n for w, n in nodes.items() if w in touched}
    return CooccurrenceGraph(
        nodes=dict(sorted(nodes.items())),
        edges=dict(sorted(edges.items())),
        sentence_freq={w: graph.sentence_freq[w] for w in sorted(nodes) if w in graph.sentence_freq},
        n_sentences=graph.n_sentences,
    )


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _derived(graph, a, b) -> dict[str, float]:
    if not graph.sentence_freq or a not in graph.sentence_freq or b not in graph.sentence_freq:
        return {}
    return {"jaccard": graph.jaccard(a, b), "pmi": graph.pmi(a, b)}


def to_dot(graph: CooccurrenceGraph, derived: bool = False) -> str:
    lines = ["graph G {"]
    for w in sorted(graph.nodes):
        lines.append(f"  {_dot_id(w)} [freq={graph.nodes[w]}];")
    for (a, b) in sorted(graph.edges):
        attrs = [f"weight={graph.edges[(a, b)]}"]
        if derived:
            attrs += [f'{k}="{_fmt(v)}"' for k, v in _derived(graph, a, b).items()]
        lines.append(f"  {_dot_id(a)} -- {_dot_id(b)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_graphml(graph: CooccurrenceGraph, derived: bool = False) -> str:
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
        '  <key id="freq" for="node" attr.name="freq" attr.type="int"/>',
        '  <key id="weight" for="edge" attr.name="weight" attr.type="int"/>',
    ]
    if derived:
        out.append('  <key id="jaccard" for="edge" attr.name="jaccard" attr.type="double"/>')
        out.append('  <key id="pmi" for="edge" attr.name="pmi" attr.type="double"/>')
    out.append('  <graph id="G" edgedefault="undirected">')
    for w in sorted(graph.nodes):
        out.append(f'    <node id={quoteattr(w)}><data key="freq">{graph.nodes[w]}</data></node>')
    for (a, b) in sorted(graph.edges):
        data = f'<data key="weight">{graph.edges[(a, b)]}</data>'
        if derived:
            data += "".join(
                f'<data key="{k}">{escape(_fmt(v))}</data>' for k, v in _derived(graph, a, b).items()
            )
        out.append(f"    <edge source={quoteattr(a)} target={quoteattr(b)}>{data}</edge>")
    out.append("  </graph>")
    out.append("</graphml>")
    return "\n".join(out) + "\n"


def to_json(graph: CooccurrenceGraph, derived: bool = False) -> str:
    edges = []
    for (a, b) in sorted(graph.edges):
        rec = {"source": a, "target": b, "weight": graph.edges[(a, b)]}
        if derived:
            rec.update(_derived(graph, a, b))
        edges.append(rec)
    doc = {
        "nodes": [{"id": w, "freq": graph.nodes[w]} for w in sorted(graph.nodes)],
        "edges": edges,
    }
    return json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=1) + "\n"


def export_graph(graph: CooccurrenceGraph, format: str = "dot", derived: bool = False) -> str:
    fmt = format.lower()
    if fmt == "dot":
        return to_dot(graph, derived)
    if fmt == "graphml":
        return to_graphml(graph, derived)
    if fmt == "json":
        return to_json(graph, derived)
    raise UnsupportedFormat(f"unsupported graph format {format!r}; expected one of {FORMATS}")
