"""Directed networks for the arc-knockout instantiation.

Arc ``k`` (0-based position in ``DirectedGraph.arcs``) is binary variable ``k``
everywhere in the package.  Shortest paths are simple origin-destination paths;
among equal-length paths the one with the lexicographically smallest arc-index
sequence (in path order) wins.

Native instance format::

    c optional comment lines, anywhere
    p ko <node_count> <arc_count>
    a <tail> <head> <length>        (arc_count lines)
    s <origin> <destination>
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass
from typing import Iterable, Optional

from .core import BinaryProgram, InputError, KnockoutError


class ParseError(KnockoutError, ValueError):
    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


@dataclass(frozen=True)
class DirectedGraph:
    node_count: int
    arcs: tuple
    origin: int
    destination: int

    def __post_init__(self):
        arcs = tuple((int(t), int(h), int(l)) for t, h, l in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        if self.node_count < 1:
            raise InputError("graph needs at least one node")
        for t, h, l in arcs:
            if not (1 <= t <= self.node_count and 1 <= h <= self.node_count):
                raise InputError(f"arc ({t}, {h}) references a node outside 1..{self.node_count}")
            if l < 0:
                raise InputError(f"arc ({t}, {h}) has negative length {l}")
        for v in (self.origin, self.destination):
            if not 1 <= v <= self.node_count:
                raise InputError(f"terminal {v} outside 1..{self.node_count}")
        if self.origin == self.destination:
            raise InputError("origin and destination must differ")
        out = [[] for _ in range(self.node_count + 1)]
        inc = [[] for _ in range(self.node_count + 1)]
        for k, (t, h, _) in enumerate(arcs):
            out[t].append(k)
            inc[h].append(k)
        object.__setattr__(self, "_out", tuple(tuple(a) for a in out))
        object.__setattr__(self, "_in", tuple(tuple(a) for a in inc))

    @property
    def arc_count(self) -> int:
        return len(self.arcs)

    def out_arcs(self, v):
        return self._out[v]

    def in_arcs(self, v):
        return self._in[v]

    def path_length(self, arc_indices: Iterable[int]) -> int:
        return sum(self.arcs[k][2] for k in arc_indices)

    def is_path(self, arc_indices) -> bool:
        """True if *arc_indices* (in order) is a simple origin-destination path."""
        arc_indices = list(arc_indices)
        if not arc_indices:
            return False
        node = self.origin
        seen = {node}
        for k in arc_indices:
            t, h, _ = self.arcs[k]
            if t != node or h in seen:
                return False
            seen.add(h)
            node = h
        return node == self.destination


@dataclass(frozen=True)
class PathSolution:
    arc_indices: tuple
    length: int

    @property
    def support(self):
        return tuple(sorted(self.arc_indices))


def distances_to(g: DirectedGraph, target: int, forbidden=frozenset(), banned_nodes=frozenset()):
    """Reverse Dijkstra: shortest distance from every node to *target*."""
    dist = {target: 0}
    heap = [(0, target)]
    done = set()
    while heap:
        d, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        for k in g.in_arcs(v):
            if k in forbidden:
                continue
            u = g.arcs[k][0]
            if u in banned_nodes or u in done:
                continue
            nd = d + g.arcs[k][2]
            if nd < dist.get(u, nd + 1):
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    return dist


def _reaches(g, start, target, tight, blocked):
    stack, seen = [start], {start}
    while stack:
        v = stack.pop()
        if v == target:
            return True
        for k in tight.get(v, ()):
            w = g.arcs[k][1]
            if w not in seen and w not in blocked:
                seen.add(w)
                stack.append(w)
    return False


def shortest_path(
    g: DirectedGraph,
    forbidden: Iterable[int] = (),
    *,
    source: Optional[int] = None,
    banned_nodes: Iterable[int] = (),
) -> Optional[PathSolution]:
    """Minimum-length simple path avoiding the *forbidden* arcs, or None.

    Ties go to the lexicographically smallest arc-index sequence.  *source*
    and *banned_nodes* exist for spur-path searches and default to the plain
    origin-destination query.
    """
    forbidden = frozenset(forbidden)
    banned = frozenset(banned_nodes)
    src = g.origin if source is None else source
    dist = distances_to(g, g.destination, forbidden, banned)
    if src not in dist or src in banned:
        return None
    tight = {}
    zero_arcs = False
    for k, (t, h, l) in enumerate(g.arcs):
        if k in forbidden or t in banned or h in banned:
            continue
        if t in dist and h in dist and dist[t] == l + dist[h]:
            tight.setdefault(t, []).append(k)
            zero_arcs = zero_arcs or l == 0
    path, node, visited = [], src, {src}
    while node != g.destination:
        for k in tight[node]:
            h = g.arcs[k][1]
            if h in visited:
                continue
            # only zero-length arcs can close a tight cycle
            if zero_arcs and not _reaches(g, h, g.destination, tight, visited):
                continue
            break
        else:
            raise AssertionError("tight-arc walk got stuck")
        path.append(k)
        visited.add(h)
        node = h
    return PathSolution(tuple(path), dist[src])


def hop_limited_shortest_path(g: DirectedGraph, forbidden: Iterable[int], max_arcs: int):
    """Shortest path with at most *max_arcs* arcs (lexicographic ties), or None.

    Assumes positive lengths on tight walks; zero-length cycles may yield a
    non-simple walk, which is then rejected.
    """
    forbidden = frozenset(forbidden)
    if max_arcs <= 0:
        return None
    inf = float("inf")
    nodes = range(1, g.node_count + 1)
    # best[h][v]: shortest v -> destination using at most h arcs
    best = [{v: (0 if v == g.destination else inf) for v in nodes}]
    for _ in range(max_arcs):
        prev = best[-1]
        cur = dict(prev)
        for k, (t, h, l) in enumerate(g.arcs):
            if k not in forbidden and prev[h] + l < cur[t]:
                cur[t] = prev[h] + l
        best.append(cur)
    if best[max_arcs][g.origin] == inf:
        return None
    path, node, hops, visited = [], g.origin, max_arcs, {g.origin}
    while node != g.destination:
        target = best[hops][node]
        for k in g.out_arcs(node):
            if k in forbidden:
                continue
            _, h, l = g.arcs[k]
            if l + best[hops - 1][h] == target:
                break
        else:
            raise AssertionError("hop-limited walk got stuck")
        if h in visited:
            return None
        path.append(k)
        visited.add(h)
        node, hops = h, hops - 1
    return PathSolution(tuple(path), best[max_arcs][g.origin])


def all_simple_paths(g: DirectedGraph):
    """Every simple origin-destination path, as arc-index tuples (DFS order)."""
    out = []

    def walk(v, path, seen):
        if v == g.destination:
            out.append(tuple(path))
            return
        for k in g.out_arcs(v):
            h = g.arcs[k][1]
            if h not in seen:
                path.append(k)
                seen.add(h)
                walk(h, path, seen)
                seen.discard(h)
                path.pop()

    walk(g.origin, [], {g.origin})
    return out


def parse_instance(text: str) -> DirectedGraph:
    header = None
    arcs = []
    terminals = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line == "c" or line.startswith("c "):
            continue
        tok = line.split()
        kind = tok[0]
        try:
            if kind == "p":
                if header is not None:
                    raise ParseError("duplicate header", lineno)
                if len(tok) != 4 or tok[1] != "ko":
                    raise ParseError(f"expected 'p ko <nodes> <arcs>', got {line!r}", lineno)
                header = (int(tok[2]), int(tok[3]))
                if header[0] < 1 or header[1] < 0:
                    raise ParseError("node count must be positive, arc count nonnegative", lineno)
            elif kind == "a":
                if header is None:
                    raise ParseError("arc line before header", lineno)
                if terminals is not None:
                    raise ParseError("arc line after terminal line", lineno)
                if len(tok) != 4:
                    raise ParseError(f"expected 'a <tail> <head> <length>', got {line!r}", lineno)
                t, h, l = int(tok[1]), int(tok[2]), int(tok[3])
                for v in (t, h):
                    if not 1 <= v <= header[0]:
                        raise ParseError(f"node {v} outside 1..{header[0]}", lineno)
                if l < 0:
                    raise ParseError(f"negative length {l}", lineno)
                arcs.append((t, h, l))
            elif kind == "s":
                if header is None:
                    raise ParseError("terminal line before header", lineno)
                if terminals is not None:
                    raise ParseError("duplicate terminal line", lineno)
                if len(tok) != 3:
                    raise ParseError(f"expected 's <origin> <destination>', got {line!r}", lineno)
                terminals = (int(tok[1]), int(tok[2]))
                for v in terminals:
                    if not 1 <= v <= header[0]:
                        raise ParseError(f"node {v} outside 1..{header[0]}", lineno)
                if terminals[0] == terminals[1]:
                    raise ParseError("origin equals destination", lineno)
            else:
                raise ParseError(f"unknown line type {kind!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"non-integer field in {line!r}", lineno) from None
    if header is None:
        raise ParseError("missing 'p ko' header")
    if len(arcs) != header[1]:
        raise ParseError(f"header declares {header[1]} arcs, found {len(arcs)}")
    if terminals is None:
        raise ParseError("missing 's <origin> <destination>' line")
    return DirectedGraph(header[0], tuple(arcs), *terminals)


def write_instance(g: DirectedGraph) -> str:
    lines = [f"p ko {g.node_count} {g.arc_count}"]
    lines += [f"a {t} {h} {l}" for t, h, l in g.arcs]
    lines.append(f"s {g.origin} {g.destination}")
    return "\n".join(lines) + "\n"


def parse_arc_list(text: str, origin: int, destination: int) -> DirectedGraph:
    """Read bare ``tail head length`` lines; node count is the largest id seen.

    Adapter for third-party arc lists.  Instances in other layouts (e.g. the
    OR-Library shortest-path files) need their own reader registered in
    ``READERS``.
    """
    arcs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if len(tok) != 3:
            raise ParseError(f"expected 'tail head length', got {raw!r}", lineno)
        try:
            arcs.append(tuple(int(x) for x in tok))
        except ValueError:
            raise ParseError(f"non-integer field in {raw!r}", lineno) from None
    if not arcs:
        raise ParseError("no arcs")
    nodes = max(max(t, h) for t, h, _ in arcs)
    nodes = max(nodes, origin, destination)
    if destination <= 0:
        destination = nodes
    try:
        return DirectedGraph(nodes, tuple(arcs), origin, destination)
    except InputError as exc:
        raise ParseError(str(exc)) from None


# format name -> reader(text, origin, destination); terminals are ignored by
# formats that carry their own
READERS = {
    "ko": lambda text, origin=None, destination=None: parse_instance(text),
    "arclist": lambda text, origin=None, destination=None: parse_arc_list(
        text, origin or 1, destination or 0
    ),
}


def random_instance(node_count, arc_count, length_range, seed) -> DirectedGraph:
    """Random digraph with origin 1 and destination ``node_count``.

    A backbone through every node in random order is laid first so that the
    destination is reachable; remaining arcs are uniform over unused ordered
    pairs.  Deterministic in *seed*.
    """
    lo, hi = length_range
    if node_count < 2:
        raise InputError("need at least two nodes")
    if lo > hi or lo < 0:
        raise InputError(f"bad length range {length_range!r}")
    if arc_count < node_count - 1:
        raise InputError("arc_count must be at least node_count - 1")
    if arc_count > node_count * (node_count - 1):
        raise InputError("too many arcs for a graph without parallel arcs or loops")
    rng = random.Random(seed)
    middle = list(range(2, node_count))
    rng.shuffle(middle)
    order = [1] + middle + [node_count]
    pairs = list(zip(order, order[1:]))
    used = set(pairs)
    if arc_count - len(pairs) > node_count * (node_count - 1) // 2:
        rest = [
            (u, v)
            for u in range(1, node_count + 1)
            for v in range(1, node_count + 1)
            if u != v and (u, v) not in used
        ]
        pairs += rng.sample(rest, arc_count - len(pairs))
    else:
        while len(pairs) < arc_count:
            u = rng.randint(1, node_count)
            v = rng.randint(1, node_count)
            if u != v and (u, v) not in used:
                used.add((u, v))
                pairs.append((u, v))
    rng.shuffle(pairs)
    arcs = tuple((u, v, rng.randint(lo, hi)) for u, v in pairs)
    return DirectedGraph(node_count, arcs, 1, node_count)


def to_binary_program(g: DirectedGraph) -> BinaryProgram:
    """Encode the origin-destination shortest path as a canonical 0-1 program.

    Flow conservation at each node becomes a pair of >= rows; one more row caps
    the number of selected arcs at ``node_count - 1``.
    """
    rows = []
    for v in range(1, g.node_count + 1):
        supply = 1 if v == g.origin else (-1 if v == g.destination else 0)
        coeffs = {}
        for k in g.out_arcs(v):
            coeffs[k] = coeffs.get(k, 0) + 1
        for k in g.in_arcs(v):
            coeffs[k] = coeffs.get(k, 0) - 1
        coeffs = {k: a for k, a in coeffs.items() if a}
        if not coeffs and supply == 0:
            continue
        rows.append((coeffs, supply))
        rows.append(({k: -a for k, a in coeffs.items()}, -supply))
    rows.append(({k: -1 for k in range(g.arc_count)}, -(g.node_count - 1)))
    names = [f"a{k + 1}:{t}->{h}" for k, (t, h, _) in enumerate(g.arcs)]
    return BinaryProgram([l for _, _, l in g.arcs], rows, names)
