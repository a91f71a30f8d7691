"""Labeled connected multigraphs, line multiplicities and the momentum-conservation rank.

Graphs are labeled (no isomorphism reduction).  An undirected graph stores
each edge as ``(i, j)`` with ``i < j``; an oriented graph stores ``(source, range)``.
"""
from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .errors import CapacityError, DomainError

MAX_VERTICES = 6
MAX_EDGES = 8


@dataclass(frozen=True)
class OrientedGraph:
    n_vertices: int
    edges: tuple[tuple[int, int], ...] = ()
    oriented: bool = True

    def __post_init__(self):
        if self.n_vertices < 1:
            raise DomainError("a graph needs at least one vertex")
        norm = []
        for s, r in self.edges:
            if s == r:
                raise DomainError(f"self-loop at vertex {s}")
            if not (0 <= s < self.n_vertices and 0 <= r < self.n_vertices):
                raise DomainError(f"edge ({s}, {r}) leaves the vertex set")
            norm.append((s, r) if self.oriented else (min(s, r), max(s, r)))
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def multiplicities(self) -> Counter:
        """Number of lines l_ij between each unordered vertex pair."""
        return Counter((min(s, r), max(s, r)) for s, r in self.edges)

    def has_opposite_pair(self) -> bool:
        es = set(self.edges)
        return self.oriented and any((r, s) in es for s, r in es)

    def is_connected(self) -> bool:
        adj = {v: set() for v in range(self.n_vertices)}
        for s, r in self.edges:
            adj[s].add(r)
            adj[r].add(s)
        seen, stack = {0}, [0]
        while stack:
            for w in adj[stack.pop()] - seen:
                seen.add(w)
                stack.append(w)
        return len(seen) == self.n_vertices

    # serialization -----------------------------------------------------
    def to_dict(self) -> dict:
        return {"n_vertices": self.n_vertices, "oriented": self.oriented,
                "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, d: dict) -> "OrientedGraph":
        return cls(int(d["n_vertices"]), tuple(tuple(e) for e in d["edges"]), bool(d.get("oriented", True)))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "OrientedGraph":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class GraphWeight:
    symmetry: int
    c_G: Fraction = Fraction(1)

    def __post_init__(self):
        if self.symmetry < 1:
            raise DomainError("symmetry factor must be >= 1")


def _check_capacity(n_vertices, max_edges):
    if n_vertices < 1:
        raise DomainError("need at least one vertex")
    if n_vertices > MAX_VERTICES or max_edges > MAX_EDGES:
        raise CapacityError(f"enumeration capacity is n <= {MAX_VERTICES}, edges <= {MAX_EDGES}")
    if max_edges < 0:
        raise DomainError("max_edges must be non-negative")


def _pair_fillings(pair, budget, oriented, forbid_opposite_pairs, max_multiplicity):
    i, j = pair
    cap = min(budget, max_multiplicity)
    yield ()
    if not oriented:
        for l in range(1, cap + 1):
            yield ((i, j),) * l
        return
    if forbid_opposite_pairs:
        for l in range(1, cap + 1):
            yield ((i, j),) * l
            yield ((j, i),) * l
        return
    # the multiplicity cap applies per direction here
    for a in range(cap + 1):
        for b in range(min(cap, budget - a) + 1):
            if a + b:
                yield ((i, j),) * a + ((j, i),) * b


def enumerate_graphs(n_vertices: int, max_edges: int, oriented: bool = False,
                     forbid_opposite_pairs: bool = False, max_multiplicity: int | None = None,
                     min_edges: int = 0) -> Iterator[OrientedGraph]:
    """All labeled multigraphs with ``min_edges <= #edges <= max_edges`` (connected or not)."""
    _check_capacity(n_vertices, max_edges)
    cap = max_edges if max_multiplicity is None else max_multiplicity
    pairs = list(itertools.combinations(range(n_vertices), 2))

    def rec(idx, budget, acc):
        if idx == len(pairs):
            if max_edges - budget >= min_edges:
                yield acc
            return
        for fill in _pair_fillings(pairs[idx], budget, oriented, forbid_opposite_pairs, cap):
            yield from rec(idx + 1, budget - len(fill), acc + fill)

    for edges in rec(0, max_edges, ()):
        yield OrientedGraph(n_vertices, edges, oriented)


def enumerate_connected(n_vertices: int, max_edges: int, oriented: bool = False,
                        forbid_opposite_pairs: bool = False, max_multiplicity: int | None = None,
                        min_edges: int = 0) -> Iterator[OrientedGraph]:
    """Exhaustive duplicate-free stream of connected labeled multigraphs.

    ``max_multiplicity=1`` restricts to simple graphs (for oriented graphs
    without ``forbid_opposite_pairs`` that still allows one line each way).
    """
    for g in enumerate_graphs(n_vertices, max_edges, oriented, forbid_opposite_pairs,
                              max_multiplicity, min_edges):
        if g.is_connected():
            yield g


def brute_force_count(n_vertices: int, max_edges: int, oriented: bool = False,
                      forbid_opposite_pairs: bool = False, max_multiplicity: int | None = None,
                      min_edges: int = 0) -> int:
    """Independent count: multisets of candidate lines, filtered by union-find connectivity."""
    _check_capacity(n_vertices, max_edges)
    if oriented:
        lines = [(a, b) for a in range(n_vertices) for b in range(n_vertices) if a != b]
    else:
        lines = list(itertools.combinations(range(n_vertices), 2))
    cap = max_edges if max_multiplicity is None else max_multiplicity
    count = 0
    for k in range(min_edges, max_edges + 1):
        for subset in itertools.combinations_with_replacement(lines, k):
            mult = Counter(subset)
            if oriented and not forbid_opposite_pairs:
                if any(v > cap for v in mult.values()):
                    continue
            else:
                undirected = Counter((min(a, b), max(a, b)) for a, b in subset)
                if any(v > cap for v in undirected.values()):
                    continue
            if oriented and forbid_opposite_pairs and any((b, a) in mult for a, b in mult):
                continue
            parent = list(range(n_vertices))

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            for a, b in subset:
                parent[find(a)] = find(b)
            if len({find(v) for v in range(n_vertices)}) == 1:
                count += 1
    return count


def line_multiplicity_factor(G: OrientedGraph) -> GraphWeight:
    """Symmetry factor prod_{i<j} l_ij! over vertex pairs."""
    sym = 1
    for l in G.multiplicities().values():
        sym *= math.factorial(l)
    return GraphWeight(sym)


# -------------------------------------------------------------- momentum rank


def momentum_matrix(G: OrientedGraph) -> list[list[Fraction]]:
    """The 3n x 3k matrix J: vertex-0 row block deleted, +1 at sources, -1 at ranges."""
    n, k = G.n_vertices - 1, G.n_edges
    J = [[Fraction(0)] * (3 * k) for _ in range(3 * n)]
    for l, (s, r) in enumerate(G.edges):
        for v, sign in ((s, 1), (r, -1)):
            if v == 0:
                continue
            for c in range(3):
                J[3 * (v - 1) + c][3 * l + c] = Fraction(sign)
    return J


def _row_echelon(M):
    M = [row[:] for row in M]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    rank, det_sign, pivots = 0, 1, []
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if M[r][c] != 0), None)
        if piv is None:
            continue
        if piv != rank:
            M[rank], M[piv] = M[piv], M[rank]
            det_sign = -det_sign
        pivots.append(M[rank][c])
        for r in range(rank + 1, rows):
            if M[r][c] != 0:
                factor = M[r][c] / M[rank][c]
                M[r] = [a - factor * b for a, b in zip(M[r], M[rank])]
        rank += 1
        if rank == rows:
            break
    return rank, det_sign, pivots


def rational_rank(M) -> int:
    return _row_echelon(M)[0]


def rational_det(M) -> Fraction:
    if len(M) != (len(M[0]) if M else 0):
        raise DomainError("determinant needs a square matrix")
    rank, sign, pivots = _row_echelon(M)
    if rank < len(M):
        return Fraction(0)
    return sign * math.prod(pivots, start=Fraction(1))


def momentum_conservation_rank(G: OrientedGraph) -> bool:
    """True iff J has full row rank 3n over the rationals."""
    if not G.is_connected():
        raise DomainError("momentum conservation rank needs a connected graph")
    n = G.n_vertices - 1
    if n == 0:
        return True
    # flipping a line or repeating it leaves the column span unchanged, so the
    # rank only depends on which vertex pairs are joined
    support = tuple(sorted({(min(s, r), max(s, r)) for s, r in G.edges}))
    return _support_full_rank(G.n_vertices, support)


@lru_cache(maxsize=None)
def _support_full_rank(n_vertices: int, support: tuple) -> bool:
    J = momentum_matrix(OrientedGraph(n_vertices, support))
    return rational_rank(J) == 3 * (n_vertices - 1)
