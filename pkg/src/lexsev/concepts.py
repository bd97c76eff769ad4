"""Concept grouping of mined rules and their graph renderings.

Rules whose term unions nest are merged into one concept per maximal union,
so a rule covering a subset of another rule's terms joins the larger concept.
Each concept renders two ways: a transitive graph (one edge per rule, from
antecedent set to consequent set) and a lattice graph (term subsets ordered
by inclusion, with the full concept as root). Both export deterministically
to DOT and JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

from .formatting import fmt3
from .mining import HateRule


def _label(terms) -> str:
    return "_".join(sorted(terms))


@dataclass(frozen=True)
class Concept:
    """A maximal term set with the rules it subsumes."""

    terms: frozenset
    rules: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", frozenset(self.terms))
        object.__setattr__(self, "rules", tuple(self.rules))
        if not self.rules:
            raise ValueError("concept needs at least one rule")
        union = frozenset()
        for rule in self.rules:
            union |= set(rule.antecedent) | set(rule.consequent)
        if union != self.terms:
            raise ValueError(
                f"concept terms {_label(self.terms)!r} do not equal the "
                f"union of its rules {_label(union)!r}")

    @property
    def rule_count(self) -> int:
        return len(self.rules)

    @property
    def label(self) -> str:
        return _label(self.terms)


def group_similar_rules(rules: Iterable[HateRule]) -> tuple:
    """Partition rules into concepts keyed by maximal term-set union.

    Every rule lands in exactly one concept: the maximal union containing
    its own term union. When several maximal unions contain it, the smallest
    (then lexicographically first) wins.
    """
    deduped = []
    seen = set()
    for rule in rules:
        if rule.key not in seen:
            seen.add(rule.key)
            deduped.append(rule)
    if not deduped:
        return ()

    unions = {frozenset(r.antecedent) | frozenset(r.consequent)
              for r in deduped}
    maximal = [u for u in unions
               if not any(u < other for other in unions)]

    grouped: dict = {}
    for rule in deduped:
        union = frozenset(rule.antecedent) | frozenset(rule.consequent)
        home = min((m for m in maximal if union <= m),
                   key=lambda m: (len(m), tuple(sorted(m))))
        grouped.setdefault(home, []).append(rule)
    concepts = [Concept(terms=terms, rules=tuple(members))
                for terms, members in grouped.items()]
    return tuple(sorted(concepts, key=lambda c: c.label))


@dataclass(frozen=True)
class GraphNode:
    label: str
    terms: tuple


@dataclass(frozen=True)
class GraphEdge:
    source: str
    target: str
    rule: Optional[HateRule] = None


@dataclass(frozen=True)
class TransitiveGraph:
    """One node per rule side, one rule-annotated edge per rule."""

    name: str
    nodes: tuple
    edges: tuple
    kind: str = "transitive"


@dataclass(frozen=True)
class LatticeGraph:
    """Term subsets of one concept under inclusion, root = all terms."""

    name: str
    nodes: tuple
    edges: tuple
    root: str = ""
    kind: str = "lattice"


def _node(terms) -> GraphNode:
    return GraphNode(label=_label(terms), terms=tuple(sorted(terms)))


def build_transitive_graph(concept: Concept) -> TransitiveGraph:
    sides = {}
    edges = []
    for rule in concept.rules:
        source = _label(rule.antecedent)
        target = _label(rule.consequent)
        sides.setdefault(source, frozenset(rule.antecedent))
        sides.setdefault(target, frozenset(rule.consequent))
        edges.append(GraphEdge(source=source, target=target, rule=rule))
    nodes = tuple(_node(terms)
                  for _, terms in sorted(sides.items()))
    edges = tuple(sorted(edges, key=lambda e: (e.source, e.target)))
    return TransitiveGraph(name=f"Transitive_{concept.label}",
                           nodes=nodes, edges=edges)


def build_lattice_graph(concept: Concept) -> LatticeGraph:
    """Subsets in play for the concept, wired by covering edges.

    The node family is every single term, every rule side, every rule's
    whole term union, and the root (all concept terms); an edge runs S -> T
    when T is the next-larger family set containing S.
    """
    family = {frozenset({t}) for t in concept.terms}
    for rule in concept.rules:
        ant = frozenset(rule.antecedent)
        cons = frozenset(rule.consequent)
        family.update((ant, cons, ant | cons))
    root = frozenset(concept.terms)
    family.add(root)

    edges = []
    for small in family:
        for big in family:
            if not small < big:
                continue
            if any(small < mid < big for mid in family):
                continue
            edges.append(GraphEdge(source=_label(small), target=_label(big)))
    nodes = tuple(sorted((_node(terms) for terms in family),
                         key=lambda n: n.label))
    edges = tuple(sorted(edges, key=lambda e: (e.source, e.target)))
    return LatticeGraph(name=f"Lattice_{concept.label}", nodes=nodes,
                        edges=edges, root=_label(root))


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(graph) -> str:
    """Deterministic DOT text: nodes by label, edges by (source, target)."""
    lines = [f"digraph {_quote(graph.name)} {{"]
    lines.append("  rankdir=TB;" if graph.kind == "lattice"
                 else "  rankdir=LR;")
    for node in sorted(graph.nodes, key=lambda n: n.label):
        lines.append(f"  {_quote(node.label)};")
    if graph.kind == "lattice" and graph.root:
        # the full concept set sits at the bottom of the drawing
        lines.append(f"  {{ rank=max; {_quote(graph.root)}; }}")
    for edge in sorted(graph.edges, key=lambda e: (e.source, e.target)):
        stmt = f"  {_quote(edge.source)} -> {_quote(edge.target)}"
        if edge.rule is not None:
            note = f"sup={edge.rule.support}, conf={fmt3(edge.rule.confidence)}"
            stmt += f" [label={_quote(note)}]"
        lines.append(stmt + ";")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_json(graph) -> str:
    """Deterministic JSON: the same node and edge ordering as the DOT form."""
    payload = {
        "name": graph.name,
        "kind": graph.kind,
        "nodes": [{"label": n.label, "terms": list(n.terms)}
                  for n in sorted(graph.nodes, key=lambda n: n.label)],
        "edges": [],
    }
    if graph.kind == "lattice":
        payload["root"] = graph.root
    for edge in sorted(graph.edges, key=lambda e: (e.source, e.target)):
        rule = None
        if edge.rule is not None:
            rule = {
                "antecedent": list(edge.rule.antecedent),
                "consequent": list(edge.rule.consequent),
                "support": edge.rule.support,
                "confidence": float(edge.rule.confidence),
            }
        payload["edges"].append({"source": edge.source, "target": edge.target,
                                 "rule": rule})
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
