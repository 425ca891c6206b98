"""
Graph file formats: the "n m" edge list and graph6.

Edge list: first non-comment line "n m", then m lines "u v" with 0-based ids.
Anything after '#' on a line is a comment.
"""

import logging
from pathlib import Path
from typing import Iterable, List, Tuple, Union

import networkx as nx

from .errors import ParseError
from .graph_core import Graph

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def parse_edge_list(text: str) -> Graph:
    """Parse edge-list text; errors cite the 1-based line number"""
    header = None
    edges: List[Tuple[int, int]] = []
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ParseError(f"expected two integers, got {line!r}", lineno)
        try:
            a, b = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(f"expected two integers, got {line!r}", lineno)

        if header is None:
            if a < 0 or b < 0:
                raise ParseError(f"negative counts in header {line!r}", lineno)
            header = (a, b)
            continue
        n = header[0]
        if not (0 <= a < n and 0 <= b < n):
            raise ParseError(f"vertex out of range 0..{n - 1}: {line!r}", lineno)
        if a == b:
            raise ParseError(f"self-loop at vertex {a}", lineno)
        edges.append((a, b))
        if len(edges) > header[1]:
            raise ParseError(f"more than the {header[1]} edges announced in the header", lineno)

    if header is None:
        raise ParseError("missing 'n m' header", last_line + 1)
    if len(edges) < header[1]:
        raise ParseError(f"expected {header[1]} edges, found {len(edges)} (truncated file?)", last_line + 1)
    g = Graph(header[0], edges)
    if g.edge_count != header[1]:
        raise ParseError(f"duplicate edges: header says {header[1]}, distinct edges {g.edge_count}", last_line)
    return g


def format_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.edge_count}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def parse_graph6(data: Union[str, bytes]) -> Graph:
    """Decode one graph6 record (optional '>>graph6<<' header is accepted)"""
    if isinstance(data, str):
        data = data.encode("ascii")
    data = data.strip()
    try:
        nxg = nx.from_graph6_bytes(data)
    except (nx.NetworkXError, ValueError, IndexError) as e:
        raise ParseError(f"invalid graph6 data: {e}", 1) from e
    return from_networkx(nxg)


def format_graph6(g: Graph) -> str:
    return nx.to_graph6_bytes(to_networkx(g), header=False).decode("ascii").strip() + "\n"


def read_graph(path: PathLike) -> Graph:
    """Read a graph file; '.g6' selects graph6, anything else the edge list"""
    path = Path(path)
    try:
        if path.suffix == ".g6":
            return parse_graph6(path.read_bytes())
        text = path.read_text()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    g = parse_edge_list(text)
    logger.debug(f"Read {g!r} from {path}")
    return g


def write_graph(g: Graph, path: PathLike) -> None:
    path = Path(path)
    if path.suffix == ".g6":
        path.write_text(format_graph6(g))
    else:
        path.write_text(format_edge_list(g))
    logger.debug(f"Wrote {g!r} to {path}")


def to_networkx(g: Graph) -> nx.Graph:
    nxg = nx.Graph()
    nxg.add_nodes_from(g.vertices())
    nxg.add_edges_from(g.edges())
    return nxg


def from_networkx(nxg: nx.Graph) -> Graph:
    """Relabel nodes 0..n-1 in sorted order when they are not already"""
    nodes: Iterable = list(nxg.nodes())
    try:
        nodes = sorted(nodes)
    except TypeError:
        pass
    index = {v: i for i, v in enumerate(nodes)}
    return Graph(len(index), ((index[u], index[v]) for u, v in nxg.edges() if u != v))
