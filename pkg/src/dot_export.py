"""
Graphviz DOT rendering of graphs, ferns and junior caterpillars.
"""

import json
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from .errors import MalformedCertificateError, ParameterError
from .graph_core import Graph
from .structures import Fern, JuniorCaterpillar

Cluster = Tuple[str, Sequence[int]]


def graph_to_dot(g: Graph, clusters: Sequence[Cluster] = (), highlight: Sequence[int] = (),
                 name: str = "G") -> str:
    """Undirected DOT; each cluster becomes a `subgraph cluster_k` block"""
    lines = [f"graph {name} {{", "  node [shape=circle];"]
    placed = set()
    for k, (label, members) in enumerate(clusters):
        lines.append(f"  subgraph cluster_{k} {{")
        lines.append(f'    label="{label}";')
        for v in sorted(members):
            lines.append(f"    {v};")
            placed.add(v)
        lines.append("  }")
    marked = set(highlight)
    for v in g.vertices():
        if v in marked:
            lines.append(f"  {v} [style=filled, fillcolor=lightgrey];")
        elif v not in placed:
            lines.append(f"  {v};")
    lines.extend(f"  {u} -- {v};" for u, v in g.edges())
    lines.append("}")
    return "\n".join(lines) + "\n"


def fern_clusters(f: Fern) -> List[Cluster]:
    return [(f"node {i} (colour {b.witness_colour})", b.vertices) for i, b in enumerate(f.buds)]


def junior_clusters(jc: JuniorCaterpillar) -> List[Cluster]:
    return [(f"bud ({i},{j}) (colour {b.witness_colour})", b.vertices)
            for i, row in enumerate(jc.buds) for j, b in enumerate(row)]


def parse_structure(text: str):
    """Fern or JuniorCaterpillar from their debug JSON"""
    try:
        data: Dict[str, Any] = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedCertificateError(f"structure file is not JSON: {e}") from e
    try:
        if "parents" in data:
            return Fern.model_validate(data)
        if "path" in data:
            return JuniorCaterpillar.model_validate(data)
    except ValidationError as e:
        raise MalformedCertificateError(f"malformed structure JSON: {e}") from e
    raise MalformedCertificateError("structure JSON must describe a fern (parents) or a junior caterpillar (path)")


def structure_to_dot(g: Graph, structure: Optional[object] = None) -> str:
    if structure is None:
        return graph_to_dot(g)
    if isinstance(structure, Fern):
        clusters = fern_clusters(structure)
        highlight: Sequence[int] = ()
    elif isinstance(structure, JuniorCaterpillar):
        clusters = junior_clusters(structure)
        highlight = structure.path
    else:
        raise ParameterError(f"cannot render {type(structure).__name__}")
    for label, members in clusters:
        if any(not 0 <= v < g.n for v in members):
            raise MalformedCertificateError(f"{label} refers to vertices outside the graph")
    return graph_to_dot(g, clusters, highlight)
