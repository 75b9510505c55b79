"""Flat-file formats.  Every index is 0-based.

Boolean matrix::

    R C
    0110...        (R lines of C characters)

Scalar matrix: CSV, ``inf`` for +infinity.  Witness matrix: CSV of ints,
``-1`` when absent.

Graph::

    n m
    w_0 w_1 ... w_{n-1}
    [q c_1 ... c_q]          (edge-class variant only)
    u v [class_id]           (m lines)

Point set::

    n r
    x y w                    (n lines)

Spanning tree::

    # nodes=N total=C
    u v cost
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .apsp import EdgeClassDigraph, VertexWeightedDigraph
from .bits import BitMatrix, UsageError
from .mst import SpanningTree


class ParseError(UsageError):
    """Malformed input; rendered as ``source:line: message``."""

    def __init__(self, msg: str, line: int | None = None):
        super().__init__(msg)
        self.msg = msg
        self.line = line
        self.source: str | None = None

    def __str__(self) -> str:
        prefix = ":".join(str(p) for p in (self.source, self.line) if p is not None)
        return f"{prefix}: {self.msg}" if prefix else self.msg


def _lines(text: str) -> list[tuple[int, str]]:
    """Non-blank lines with their 1-based numbers."""
    return [(i, s.strip()) for i, s in enumerate(text.splitlines(), 1) if s.strip()]


def _ints(tokens, lineno, count=None):
    try:
        vals = [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None
    if count is not None and len(vals) != count:
        raise ParseError(f"expected {count} integers, got {len(vals)}", lineno)
    return vals


def _float(token: str, lineno: int, *, allow_inf: bool = False) -> float:
    try:
        x = float(token)
    except ValueError:
        raise ParseError(f"not a number: {token!r}", lineno) from None
    if math.isnan(x) or x == -math.inf or (x == math.inf and not allow_inf):
        raise ParseError(f"value not allowed here: {token!r}", lineno)
    return x


def _fmt(x: float) -> str:
    return "inf" if x == math.inf else repr(float(x))


# -- Boolean matrices --------------------------------------------------------


def format_bitmatrix(m: BitMatrix) -> str:
    out = [f"{m.rows} {m.cols}"]
    for row in m.to_dense():
        out.append(row.astype(np.uint8).tobytes().translate(bytes.maketrans(b"\x00\x01", b"01")).decode())
    return "\n".join(out) + "\n"


def parse_bitmatrix(text: str) -> BitMatrix:
    lines = _lines(text)
    if not lines:
        raise ParseError("empty input", 1)
    lineno, head = lines[0]
    rows, cols = _ints(head.split(), lineno, 2)
    body = lines[1:]
    if len(body) != rows:
        raise ParseError(f"header promises {rows} rows, found {len(body)}", lineno)
    dense = np.zeros((rows, cols), dtype=np.uint8)
    for r, (ln, s) in enumerate(body):
        if len(s) != cols or set(s) - {"0", "1"}:
            raise ParseError(f"expected {cols} characters from {{0,1}}", ln)
        dense[r] = np.frombuffer(s.encode(), dtype=np.uint8) - ord("0")
    return BitMatrix.from_dense(dense)


# -- scalar and witness matrices ----------------------------------------------


def format_scalar_csv(M: np.ndarray) -> str:
    return "".join(",".join(_fmt(x) for x in row) + "\n" for row in np.asarray(M))


def parse_scalar_csv(text: str) -> np.ndarray:
    rows = []
    for ln, s in _lines(text):
        rows.append([_float(tok.strip(), ln, allow_inf=True) for tok in s.split(",")])
        if len(rows[-1]) != len(rows[0]):
            raise ParseError("ragged row", ln)
    return np.array(rows, dtype=np.float64).reshape(len(rows), -1)


def format_witness_csv(W: np.ndarray) -> str:
    return "".join(",".join(str(int(x)) for x in row) + "\n" for row in np.asarray(W))


def parse_witness_csv(text: str) -> np.ndarray:
    rows = []
    for ln, s in _lines(text):
        vals = _ints([t.strip() for t in s.split(",")], ln)
        if any(v < -1 for v in vals):
            raise ParseError("witness entries must be >= -1", ln)
        if rows and len(vals) != len(rows[0]):
            raise ParseError("ragged row", ln)
        rows.append(vals)
    return np.array(rows, dtype=np.int64).reshape(len(rows), -1)


# -- graphs -------------------------------------------------------------------


def format_graph(G) -> str:
    if isinstance(G, EdgeClassDigraph):
        edges = [f"{u} {v} {c}" for u, v, c in G.edges]
        header = [f"{G.q} " + " ".join(_fmt(c) for c in G.class_weights)]
    else:
        edges = [f"{u} {v}" for u, v in G.edges()]
        header = []
    out = [f"{G.n} {len(edges)}", " ".join(_fmt(x) for x in G.weights), *header, *edges]
    return "\n".join(out) + "\n"


def parse_graph(text: str, *, edge_classes: bool = False):
    lines = _lines(text)
    if not lines:
        raise ParseError("empty input", 1)
    ln, head = lines[0]
    n, m = _ints(head.split(), ln, 2)
    if n < 0 or m < 0:
        raise ParseError("negative sizes", ln)
    if n == 0:
        weights, rest = [], lines[1:]
    else:
        if len(lines) < 2:
            raise ParseError("missing vertex weight line", ln + 1)
        ln, s = lines[1]
        weights = [_float(t, ln) for t in s.split()]
        if len(weights) != n:
            raise ParseError(f"expected {n} vertex weights, got {len(weights)}", ln)
        if any(x < 0 for x in weights):
            raise ParseError("vertex weights must be nonnegative", ln)
        rest = lines[2:]
    classes: list[float] = []
    if edge_classes:
        if not rest:
            raise ParseError("missing class header line", ln + 1)
        ln, s = rest[0]
        toks = s.split()
        q = _ints(toks[:1], ln, 1)[0]
        classes = [_float(t, ln) for t in toks[1:]]
        if q < 1 or len(classes) != q:
            raise ParseError("class header must be 'q c_1 ... c_q' with q >= 1", ln)
        rest = rest[1:]
    if len(rest) != m:
        raise ParseError(f"header promises {m} edges, found {len(rest)}", lines[0][0])
    edges = []
    width = 3 if edge_classes else 2
    for ln, s in rest:
        e = _ints(s.split(), ln, width)
        if not (0 <= e[0] < n and 0 <= e[1] < n):
            raise ParseError(f"edge endpoint out of range [0, {n})", ln)
        if edge_classes and not 0 <= e[2] < len(classes):
            raise ParseError(f"unknown edge class {e[2]}", ln)
        edges.append(tuple(e))
    if edge_classes:
        return EdgeClassDigraph(n, np.array(weights), tuple(classes), tuple(edges))
    return VertexWeightedDigraph.from_edges(n, edges, np.array(weights))


# -- point sets -----------------------------------------------------------------


def format_points(P) -> str:
    out = [f"{P.n} {_fmt(P.radius)}"]
    out += [f"{_fmt(x)} {_fmt(y)} {_fmt(w)}" for (x, y), w in zip(P.xy, P.weights)]
    return "\n".join(out) + "\n"


def parse_points(text: str):
    from .disk import PointSet

    lines = _lines(text)
    if not lines:
        raise ParseError("empty input", 1)
    ln, head = lines[0]
    toks = head.split()
    if len(toks) != 2:
        raise ParseError("header must be 'n r'", ln)
    n = _ints(toks[:1], ln, 1)[0]
    r = _float(toks[1], ln)
    if len(lines) - 1 != n:
        raise ParseError(f"header promises {n} points, found {len(lines) - 1}", ln)
    rows = []
    for ln, s in lines[1:]:
        toks = s.split()
        if len(toks) != 3:
            raise ParseError("point lines must be 'x y w'", ln)
        rows.append([_float(t, ln) for t in toks])
    arr = np.array(rows, dtype=np.float64).reshape(n, 3)
    try:
        return PointSet(arr[:, :2], r, arr[:, 2])
    except UsageError as e:
        raise ParseError(str(e)) from None


# -- trees ----------------------------------------------------------------------


def format_tree(T: SpanningTree) -> str:
    out = [f"# nodes={T.node_count} total={T.cost}"]
    out += [f"{u} {v} {c}" for u, v, c in T.edges]
    return "\n".join(out) + "\n"


def parse_tree(text: str) -> SpanningTree:
    lines = _lines(text)
    if not lines or not lines[0][1].startswith("#"):
        raise ParseError("missing '# nodes=N total=C' header", 1)
    ln, head = lines[0]
    try:
        fields = dict(tok.split("=", 1) for tok in head[1:].split())
        n = int(fields["nodes"])
    except (KeyError, ValueError):
        raise ParseError("bad tree header", ln) from None
    edges = []
    for ln, s in lines[1:]:
        toks = s.split()
        if len(toks) != 3:
            raise ParseError("tree lines must be 'u v cost'", ln)
        u, v = _ints(toks[:2], ln, 2)
        try:
            c = int(toks[2])
        except ValueError:
            c = _float(toks[2], ln)
        edges.append((u, v, c))
    return SpanningTree.from_edges(n, edges)


# -- file helpers ------------------------------------------------------------------


def read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _wrap(parse, path, **kw):
    try:
        return parse(read_text(path), **kw)
    except ParseError as e:
        e.source = str(path)
        raise


def read_bitmatrix(path) -> BitMatrix:
    return _wrap(parse_bitmatrix, path)


def read_scalar_csv(path) -> np.ndarray:
    return _wrap(parse_scalar_csv, path)


def read_graph(path, *, edge_classes: bool = False):
    return _wrap(parse_graph, path, edge_classes=edge_classes)


def read_points(path):
    return _wrap(parse_points, path)
