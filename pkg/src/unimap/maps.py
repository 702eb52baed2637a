"""Permutation-encoded combinatorial maps and their multigraph views.

A map on an orientable surface is stored as a pair of permutations acting on
darts (half-edges) labelled ``0..n_darts-1``: ``alpha`` is the fixed-point-free
involution that pairs the two darts of every edge, and ``sigma`` sends a dart
to the next dart clockwise around its vertex.  Vertices are the orbits of
``sigma``, edges the orbits of ``alpha``, and faces the orbits of the
composition ``sigma∘alpha`` (alpha first).  With this convention, gluing a
``2n``-gon whose face cycle is ``gamma`` amounts to setting
``sigma = gamma∘alpha``, so the glued map has exactly one face by
construction.

Maps are immutable; every mutating operation elsewhere in the package builds
a new map.  Equality is dart-for-dart.  Two rooted maps that differ only by a
relabelling of darts can be compared through :func:`canonical_form`, which
relabels darts by a deterministic traversal from the root.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import DisconnectedGraphError, GenusError, MalformedMapError

__all__ = [
    "CombinatorialMap",
    "Multigraph",
    "canonical_form",
    "canonical_relabeling",
    "cycles_of",
    "decode_map",
    "encode_map",
    "face_order_form",
    "face_order_relabeling",
    "face_tour",
    "faces",
    "from_polygon_gluing",
    "genus",
    "is_connected",
    "parse_multigraph",
    "rooted_isomorphic",
    "underlying_graph",
    "vertex_degrees",
    "write_multigraph",
]


def cycles_of(perm: Sequence[int]) -> list[list[int]]:
    """Cycles of a permutation given as a sequence, ordered by smallest element."""
    seen = bytearray(len(perm))
    out: list[list[int]] = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = 1
        d = perm[start]
        while d != start:
            seen[d] = 1
            cyc.append(d)
            d = perm[d]
        out.append(cyc)
    return out


def _count_cycles(perm: Sequence[int]) -> int:
    seen = bytearray(len(perm))
    count = 0
    for start in range(len(perm)):
        if seen[start]:
            continue
        count += 1
        d = start
        while not seen[d]:
            seen[d] = 1
            d = perm[d]
    return count


@dataclass(frozen=True)
class CombinatorialMap:
    """A rooted map: dart involution ``alpha``, vertex rotation ``sigma``, root dart."""

    n_darts: int
    alpha: tuple[int, ...]
    sigma: tuple[int, ...]
    root: int

    def __post_init__(self) -> None:
        n = self.n_darts
        object.__setattr__(self, "alpha", tuple(self.alpha))
        object.__setattr__(self, "sigma", tuple(self.sigma))
        if n <= 0 or n % 2:
            raise MalformedMapError(f"n_darts must be positive and even, got {n}")
        if len(self.alpha) != n or len(self.sigma) != n:
            raise MalformedMapError("alpha and sigma must have length n_darts")
        if sorted(self.sigma) != list(range(n)):
            raise MalformedMapError("sigma is not a permutation of 0..n_darts-1")
        for d, a in enumerate(self.alpha):
            if not 0 <= a < n or a == d or self.alpha[a] != d:
                raise MalformedMapError("alpha is not a fixed-point-free involution")
        if not 0 <= self.root < n:
            raise MalformedMapError(f"root dart {self.root} out of range")

    @property
    def n_edges(self) -> int:
        return self.n_darts // 2

    def vertex_cycles(self) -> list[list[int]]:
        """Orbits of sigma; each cycle lists a vertex's darts in rotation order."""
        return cycles_of(self.sigma)

    def face_permutation(self) -> tuple[int, ...]:
        return tuple(self.sigma[a] for a in self.alpha)

    def face_cycles(self) -> list[list[int]]:
        return cycles_of(self.face_permutation())

    def n_vertices(self) -> int:
        return _count_cycles(self.sigma)

    def n_faces(self) -> int:
        return _count_cycles(self.face_permutation())

    def vertex_of(self) -> tuple[int, ...]:
        """Map each dart to a vertex id (the smallest dart on its sigma-cycle)."""
        ids = [-1] * self.n_darts
        for cyc in self.vertex_cycles():
            v = cyc[0]
            for d in cyc:
                ids[d] = v
        return tuple(ids)

    def is_dart_connected(self) -> bool:
        """True if the darts form a single orbit under ``sigma`` and ``alpha``."""
        seen = bytearray(self.n_darts)
        stack = [0]
        seen[0] = 1
        count = 1
        while stack:
            d = stack.pop()
            for nxt in (self.sigma[d], self.alpha[d]):
                if not seen[nxt]:
                    seen[nxt] = 1
                    count += 1
                    stack.append(nxt)
        return count == self.n_darts


def faces(m: CombinatorialMap) -> list[list[int]]:
    """Face cycles of the map, i.e. orbits of ``sigma∘alpha``."""
    return m.face_cycles()


def genus(m: CombinatorialMap) -> int:
    """Genus from the Euler relation V - E + F = 2 - 2g.

    Raises :class:`GenusError` when the formula gives a negative or
    non-integer value, which signals a dart structure that is not a single
    closed surface (a disconnected pairing, for instance).
    """
    chi = m.n_vertices() - m.n_edges + m.n_faces()
    if chi % 2:
        raise GenusError(f"odd Euler characteristic {chi}")
    g = (2 - chi) // 2
    if g < 0:
        raise GenusError(f"negative genus {g}; the map is not a single surface")
    return g


def vertex_degrees(m: CombinatorialMap) -> tuple[int, ...]:
    """Sorted vertex degrees (loops contribute two darts at their vertex)."""
    return tuple(sorted(len(c) for c in m.vertex_cycles()))


def from_polygon_gluing(pairing: Sequence[tuple[int, int]], n: int) -> CombinatorialMap:
    """Glue the sides of a ``2n``-gon according to ``pairing``.

    The polygon's sides are the darts ``0..2n-1`` in face order, so the face
    permutation of the result is forced to be the full cycle
    ``gamma = (0 1 ... 2n-1)`` and the glued map is unicellular with root
    dart 0.
    """
    n_darts = 2 * n
    alpha = [-1] * n_darts
    for a, b in pairing:
        alpha[a] = b
        alpha[b] = a
    if -1 in alpha:
        raise MalformedMapError("pairing does not cover every polygon side")
    sigma = tuple((alpha[d] + 1) % n_darts for d in range(n_darts))
    return CombinatorialMap(n_darts, tuple(alpha), sigma, 0)


@dataclass(frozen=True)
class Multigraph:
    """An undirected multigraph; loops and parallel edges allowed.

    Edges are stored with endpoints normalised as ``(min, max)``.  Degrees
    count loops twice, so the handshake identity ``sum(deg) == 2*n_edges``
    holds by construction.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    degrees: tuple[int, ...] = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if self.n_vertices <= 0:
            raise ValueError("a multigraph needs at least one vertex")
        norm = []
        deg = [0] * self.n_vertices
        for u, v in self.edges:
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ValueError(f"edge ({u},{v}) out of range")
            norm.append((u, v) if u <= v else (v, u))
            deg[u] += 1
            deg[v] += 1
        object.__setattr__(self, "edges", tuple(norm))
        object.__setattr__(self, "degrees", tuple(deg))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def volume(self, subset: Iterable[int]) -> int:
        return sum(self.degrees[v] for v in subset)

    def adjacency(self) -> list[list[int]]:
        """Neighbour lists without multiplicity; loops do not add neighbours."""
        adj: list[set[int]] = [set() for _ in range(self.n_vertices)]
        for u, v in self.edges:
            if u != v:
                adj[u].add(v)
                adj[v].add(u)
        return [sorted(s) for s in adj]


def underlying_graph(m: CombinatorialMap) -> tuple[Multigraph, tuple[int, ...]]:
    """Forget the embedding: the multigraph of a map plus the dart->vertex table.

    Vertices are numbered 0..V-1 in order of their smallest dart; the second
    return value maps darts to these vertex numbers.
    """
    cycles = m.vertex_cycles()
    dart_vertex = [-1] * m.n_darts
    for i, cyc in enumerate(cycles):
        for d in cyc:
            dart_vertex[d] = i
    edges = []
    for d in range(m.n_darts):
        a = m.alpha[d]
        if d < a:
            edges.append((dart_vertex[d], dart_vertex[a]))
    return Multigraph(len(cycles), tuple(edges)), tuple(dart_vertex)


def is_connected(g: Multigraph) -> bool:
    """Breadth-first connectivity over the multigraph (loops ignored)."""
    if g.n_vertices == 1:
        return True
    adj = g.adjacency()
    seen = bytearray(g.n_vertices)
    stack = [0]
    seen[0] = 1
    count = 1
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if not seen[w]:
                seen[w] = 1
                count += 1
                stack.append(w)
    return count == g.n_vertices


def canonical_relabeling(m: CombinatorialMap) -> tuple[int, ...]:
    """Old-dart -> new-label table for the canonical breadth-first order.

    The traversal starts at the root and visits ``sigma`` before ``alpha``
    at every dart, so the table is a pure function of the rooted
    isomorphism class.  Requires a dart-connected map.
    """
    if not m.is_dart_connected():
        raise DisconnectedGraphError("canonical_form needs a connected map")
    new_label = [-1] * m.n_darts
    order = [m.root]
    new_label[m.root] = 0
    head = 0
    while head < len(order):
        d = order[head]
        head += 1
        for nxt in (m.sigma[d], m.alpha[d]):
            if new_label[nxt] < 0:
                new_label[nxt] = len(order)
                order.append(nxt)
    return tuple(new_label)


def canonical_form(m: CombinatorialMap) -> CombinatorialMap:
    """Relabel darts by breadth-first order from the root; see
    :func:`canonical_relabeling`.  Equal outputs mean rooted-isomorphic inputs."""
    new_label = canonical_relabeling(m)
    n = m.n_darts
    alpha = [0] * n
    sigma = [0] * n
    for d in range(n):
        alpha[new_label[d]] = new_label[m.alpha[d]]
        sigma[new_label[d]] = new_label[m.sigma[d]]
    return CombinatorialMap(n, tuple(alpha), tuple(sigma), 0)


def rooted_isomorphic(m1: CombinatorialMap, m2: CombinatorialMap) -> bool:
    """Equality of rooted maps up to dart relabelling."""
    if m1.n_darts != m2.n_darts:
        return False
    return canonical_form(m1) == canonical_form(m2)


def face_order_relabeling(m: CombinatorialMap) -> tuple[int, ...]:
    """Old-dart -> new-label table walking the single face from the root.

    Applying it yields face permutation ``(0 1 ... 2n-1)`` and root 0, the
    labelling :func:`from_polygon_gluing` produces, so a one-face map in
    this form is literally a polygon gluing.  A rooted isomorphism between
    two maps in this form must fix every dart, hence equal outputs, equal
    rooted maps.
    """
    new_label = [-1] * m.n_darts
    for t, d in enumerate(face_tour(m)):
        new_label[d] = t
    return tuple(new_label)


def face_order_form(m: CombinatorialMap) -> CombinatorialMap:
    """Relabel a one-face map into its polygon-gluing labelling."""
    new_label = face_order_relabeling(m)
    n = m.n_darts
    alpha = [0] * n
    sigma = [0] * n
    for d in range(n):
        alpha[new_label[d]] = new_label[m.alpha[d]]
        sigma[new_label[d]] = new_label[m.sigma[d]]
    return CombinatorialMap(n, tuple(alpha), tuple(sigma), 0)


def encode_map(m: CombinatorialMap) -> str:
    """Serialise to the on-disk JSON form; :func:`decode_map` inverts this."""
    return json.dumps(
        {
            "n_darts": m.n_darts,
            "alpha": list(m.alpha),
            "sigma": list(m.sigma),
            "root": m.root,
        },
        separators=(",", ":"),
    )


def decode_map(text: str) -> CombinatorialMap:
    try:
        obj = json.loads(text)
        return CombinatorialMap(
            int(obj["n_darts"]),
            tuple(int(x) for x in obj["alpha"]),
            tuple(int(x) for x in obj["sigma"]),
            int(obj["root"]),
        )
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise MalformedMapError(f"cannot decode map: {exc}") from exc


def write_multigraph(g: Multigraph) -> str:
    """Edge-list text: header ``p mg <n_vertices> <n_edges>``, one edge per line."""
    lines = [f"p mg {g.n_vertices} {g.n_edges}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def parse_multigraph(text: str) -> Multigraph:
    lines = [ln for ln in (s.strip() for s in text.splitlines()) if ln]
    if not lines or not lines[0].startswith("p mg "):
        raise ValueError("missing 'p mg <n_vertices> <n_edges>' header")
    parts = lines[0].split()
    n_vertices, n_edges = int(parts[2]), int(parts[3])
    edges = []
    for ln in lines[1:]:
        u, v = ln.split()
        edges.append((int(u), int(v)))
    if len(edges) != n_edges:
        raise ValueError(f"header promises {n_edges} edges, found {len(edges)}")
    return Multigraph(n_vertices, tuple(edges))


def _require_unicellular(m: CombinatorialMap, where: str) -> None:
    if m.n_faces() != 1:
        raise MalformedMapError(f"{where} needs a unicellular map, got {m.n_faces()} faces")


def face_tour(m: CombinatorialMap, start: int | None = None) -> Iterator[int]:
    """Darts of a unicellular map in face order, starting at ``start`` (default root)."""
    _require_unicellular(m, "face_tour")
    phi = m.face_permutation()
    d0 = m.root if start is None else start
    d = d0
    while True:
        yield d
        d = phi[d]
        if d == d0:
            return
