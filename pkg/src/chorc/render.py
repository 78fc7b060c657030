"""DOT and JSON renderings of hypergraphs."""
from __future__ import annotations

from .hypergraph import Comm, HyperGraph, event_key


def _node_id(e) -> str:
    return f'"{e}"'


def hypergraph_dot(r: HyperGraph, name: str = "G") -> str:
    """Events become nodes.  A one-to-one edge is drawn directly; any other
    edge goes through an auxiliary point node."""
    lines = [f'digraph "{name}" {{', "  node [shape=box, fontname=monospace];"]
    for e in sorted(r.events(), key=event_key):
        shape = "" if isinstance(e, Comm) else " [shape=circle]"
        lines.append(f"  {_node_id(e)}{shape};")
    aux = 0
    for h in r:
        src = sorted(h.source, key=event_key)
        tgt = sorted(h.target, key=event_key)
        if len(src) == 1 and len(tgt) == 1:
            lines.append(f"  {_node_id(src[0])} -> {_node_id(tgt[0])};")
            continue
        point = f'"__h{aux}"'
        aux += 1
        lines.append(f"  {point} [shape=point];")
        for e in src:
            lines.append(f"  {_node_id(e)} -> {point} [arrowhead=none];")
        for e in tgt:
            lines.append(f"  {point} -> {_node_id(e)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def hypergraph_json(r: HyperGraph) -> dict:
    return {"events": [str(e) for e in sorted(r.events(), key=event_key)],
            "edges": [{"source": [str(e) for e in sorted(h.source, key=event_key)],
                       "target": [str(e) for e in sorted(h.target, key=event_key)]}
                      for h in r]}
