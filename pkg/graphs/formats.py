"""
Entrada/salida de grafos: formato de lista de aristas y graph6.

Lista de aristas::

    # comentario
    3
    0 1
    1 2

La primera línea útil es ``n``; cada línea siguiente es ``u v``. graph6 sigue
el formato estándar (grupos de 6 bits con desplazamiento 63); la cabecera
``>>graph6<<`` es opcional.
"""

import logging
from pathlib import Path

import networkx as nx

from .exceptions import GraphParseError
from .structures import Graph

logger = logging.getLogger(__name__)

GRAPH6_HEADER = b">>graph6<<"
GRAPH6_SUFFIXES = {".g6", ".graph6"}


# --- Lista de aristas ---

def _is_natural(token: str) -> bool:
    return token.isascii() and token.isdecimal()


def parse_edge_list(text: str) -> Graph:
    n = None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if n is None:
            if len(tokens) != 1 or not _is_natural(tokens[0]):
                raise GraphParseError("La primera línea debe contener solo n", line=lineno)
            n = int(tokens[0])
            continue
        if len(tokens) != 2:
            raise GraphParseError(f"Se esperaba 'u v' y se leyó {line!r}", line=lineno)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphParseError(f"Extremos no enteros en {line!r}", line=lineno)
        if u == v:
            raise GraphParseError(f"Lazo en el vértice {u}", line=lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(f"Vértice fuera de rango [0, {n}) en {line!r}", line=lineno)
        pairs.append((u, v))
    if n is None:
        raise GraphParseError("Entrada vacía: falta la línea con n", line=1)
    return Graph(n, frozenset(pairs))


def serialize_edge_list(g: Graph) -> str:
    lines = [str(g.n)]
    lines.extend(f"{u} {v}" for u, v in g.sorted_edges)
    return "\n".join(lines) + "\n"


# --- graph6 ---

def parse_graph6(data) -> Graph:
    if isinstance(data, str):
        data = data.encode("ascii", errors="replace")
    data = data.strip()
    start = 0
    if data.startswith(GRAPH6_HEADER):
        data = data[len(GRAPH6_HEADER):]
        start = len(GRAPH6_HEADER)
    if not data:
        raise GraphParseError("Cadena graph6 vacía", offset=start)
    if data[:1] in (b":", b"&"):
        raise GraphParseError("sparse6/digraph6 no están soportados", offset=start)
    for i, byte in enumerate(data):
        if byte < 63 or byte > 126:
            raise GraphParseError(f"Byte graph6 inválido {byte!r}", offset=start + i)
    try:
        g = nx.from_graph6_bytes(data)
    except (nx.NetworkXError, ValueError) as e:
        raise GraphParseError(f"graph6 mal formado: {e}", offset=start + len(data))
    return Graph.from_networkx(g)


def serialize_graph6(g: Graph, header: bool = False) -> str:
    return nx.to_graph6_bytes(g.to_networkx(), header=header).decode("ascii").strip()


# --- Detección automática ---

def looks_like_graph6(text: str) -> bool:
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith(GRAPH6_HEADER.decode()):
            return True
        return len(line.split()) == 1 and not _is_natural(line)
    return False


def parse_graph(text: str) -> Graph:
    if looks_like_graph6(text):
        return parse_graph6(text)
    return parse_edge_list(text)


def serialize_graph(g: Graph, fmt: str = "edgelist") -> str:
    if fmt == "graph6":
        return serialize_graph6(g) + "\n"
    if fmt == "edgelist":
        return serialize_edge_list(g)
    raise ValueError(f"Formato desconocido: {fmt}")


def read_graph(path) -> Graph:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() in GRAPH6_SUFFIXES:
        return parse_graph6(text)
    g = parse_graph(text)
    logger.debug(f"Grafo leído de {path}: n={g.n}, e={g.edge_count}")
    return g


def write_graph(g: Graph, path, fmt: str | None = None) -> Path:
    path = Path(path)
    if fmt is None:
        fmt = "graph6" if path.suffix.lower() in GRAPH6_SUFFIXES else "edgelist"
    path.write_text(serialize_graph(g, fmt), encoding="utf-8")
    return path


def parse_vertex_list(text: str) -> list[int]:
    """'0,1,5' o rangos '0-6,9' (extremos incluidos)."""
    out = []
    for chunk in filter(None, (part.strip() for part in text.split(","))):
        try:
            if "-" in chunk:
                lo, hi = (int(x) for x in chunk.split("-", 1))
                if hi < lo:
                    raise ValueError
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(chunk))
        except ValueError:
            raise GraphParseError(f"Lista de vértices inválida: '{chunk}'")
    return out
