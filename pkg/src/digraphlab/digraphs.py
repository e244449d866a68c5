"""Labelled digraphs: exact representation, parsing, copy counting and
canonical forms.

A digraph lives on vertices 0..n-1 with no loops and no repeated ordered
pairs; between two vertices there may be no edge, a single directed edge, or
both opposite edges (a 2-cycle).  Everything here is immutable and pure, so
all operations are safe to call concurrently.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, permutations

from .errors import BudgetError, ParseError, PreconditionError

MAX_VERTICES = 64
_CANONICAL_MAX = 10  # minimisation over permutations; factorial beyond this is hopeless

_HEADER_RE = re.compile(r"^n\s*=\s*(\d+)$")


def falling(n: int, k: int) -> int:
    """Falling factorial n*(n-1)*...*(n-k+1)."""
    out = 1
    for i in range(k):
        out *= n - i
    return out


@dataclass(frozen=True)
class Digraph:
    """Immutable labelled digraph on [n] = {0, ..., n-1}."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_VERTICES:
            raise PreconditionError(f"vertex count {self.n} outside 1..{MAX_VERTICES}")
        for u, v in self.edges:
            if u == v:
                raise PreconditionError(f"loop edge ({u},{v}) is not allowed")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise PreconditionError(f"edge ({u},{v}) outside vertex range 0..{self.n - 1}")

    @classmethod
    def from_edges(cls, n: int, edge_list) -> "Digraph":
        edge_list = list(edge_list)
        edges = frozenset((int(u), int(v)) for u, v in edge_list)
        if len(edges) != len(edge_list):
            raise PreconditionError("duplicate edge in edge list")
        return cls(n, edges)

    # -- cached structure ----------------------------------------------------

    @cached_property
    def edge_list(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.edges))

    @cached_property
    def out_mask(self) -> tuple[int, ...]:
        """out_mask[u] has bit v set iff the edge u->v is present."""
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
        return tuple(masks)

    @cached_property
    def in_mask(self) -> tuple[int, ...]:
        """in_mask[u] has bit v set iff the edge v->u is present."""
        masks = [0] * self.n
        for u, v in self.edges:
            masks[v] |= 1 << u
        return tuple(masks)

    @cached_property
    def f2(self) -> int:
        """Number of unordered pairs joined in both directions (2-cycles)."""
        return sum(1 for u, v in self.edges if u < v and (v, u) in self.edges)

    @cached_property
    def f1(self) -> int:
        """Number of unordered pairs joined by exactly one directed edge."""
        return len(self.edges) - 2 * self.f2

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges

    @cached_property
    def nonisolated(self) -> tuple[int, ...]:
        seen = set()
        for u, v in self.edges:
            seen.add(u)
            seen.add(v)
        return tuple(sorted(seen))

    # -- manipulation --------------------------------------------------------

    def relabel(self, perm) -> "Digraph":
        """Image under the vertex permutation perm (perm[old] = new)."""
        return Digraph(self.n, frozenset((perm[u], perm[v]) for u, v in self.edges))

    def spanned_subgraph(self, edge_subset) -> "Digraph":
        """Digraph induced by an edge subset, reindexed onto its endpoints."""
        edge_subset = list(edge_subset)
        verts = sorted({x for e in edge_subset for x in e})
        idx = {v: i for i, v in enumerate(verts)}
        return Digraph(max(1, len(verts)), frozenset((idx[u], idx[v]) for u, v in edge_subset))

    def to_edge_text(self) -> str:
        lines = [f"n={self.n}"]
        lines.extend(f"{u} {v}" for u, v in self.edge_list)
        return "\n".join(lines) + "\n"


def parse_digraph(text: str) -> Digraph:
    """Parse the edge-list document format.

    Header line ``n=<int>``; each following line one edge ``<u> <v>``
    (0-based).  ``#`` starts a comment; ``;`` also separates logical lines so
    single-line documents work.  Errors name the physical line number.
    """
    n = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        for chunk in raw.split(";"):
            body = chunk.split("#", 1)[0].strip()
            if not body:
                continue
            if n is None:
                m = _HEADER_RE.match(body)
                if not m:
                    raise ParseError(f"expected header 'n=<int>', got {body!r}", lineno)
                n = int(m.group(1))
                if not 1 <= n <= MAX_VERTICES:
                    raise ParseError(f"vertex count {n} outside 1..{MAX_VERTICES}", lineno)
                continue
            parts = body.split()
            if len(parts) != 2 or not all(p.isdigit() for p in parts):
                raise ParseError(f"malformed edge line {body!r}", lineno)
            u, v = int(parts[0]), int(parts[1])
            if u == v:
                raise ParseError(f"loop edge ({u},{v})", lineno)
            if u >= n or v >= n:
                raise ParseError(f"vertex index {max(u, v)} >= n={n}", lineno)
            if (u, v) in seen:
                raise ParseError(f"duplicate edge ({u},{v})", lineno)
            seen.add((u, v))
            edges.append((u, v))
    if n is None:
        raise ParseError("empty document: missing header 'n=<int>'")
    return Digraph(n, frozenset(edges))


def weighted_size(g: Digraph, weight) -> float:
    """a*f2(G) + f1(G) as a float; exact forms live on WeightParam."""
    return weight.ea_float(g.f2, g.f1)


# ---------------------------------------------------------------------------
# Automorphisms and embeddings
# ---------------------------------------------------------------------------

def automorphism_count(g: Digraph) -> int:
    """|Aut(G)| by exhaustive permutation check (fine for n <= 10)."""
    if g.n > _CANONICAL_MAX:
        raise BudgetError(f"automorphism count over {g.n}! permutations refused")
    edges = g.edges
    count = 0
    for perm in permutations(range(g.n)):
        ok = True
        for u, v in edges:
            if (perm[u], perm[v]) not in edges:
                ok = False
                break
        if ok:
            count += 1
    return count


def _embedding_plan(core: Digraph) -> list[tuple[list[int], list[int]]]:
    """Constraint-first visit order for embedding the core into a host.

    Entry i holds (need_out, need_in): slot indices j < i whose image must
    send an edge to / receive an edge from the vertex placed at slot i.
    """
    n = core.n
    deg = [bin(core.out_mask[v]).count("1") + bin(core.in_mask[v]).count("1") for v in range(n)]
    order: list[int] = []
    placed: set[int] = set()
    while len(order) < n:
        best = None
        best_key = None
        for v in range(n):
            if v in placed:
                continue
            links = sum(1 for u in placed if core.has_edge(u, v) or core.has_edge(v, u))
            key = (links, deg[v], -v)
            if best_key is None or key > best_key:
                best, best_key = v, key
        order.append(best)
        placed.add(best)
    slot_of = {v: i for i, v in enumerate(order)}
    plan = []
    for i, v in enumerate(order):
        need_out = [slot_of[u] for u in order[:i] if core.has_edge(u, v)]
        need_in = [slot_of[u] for u in order[:i] if core.has_edge(v, u)]
        plan.append((need_out, need_in))
    return plan


def _embed_search(g: Digraph, core: Digraph, plan, count_all: bool) -> int:
    """Count injective embeddings of core into g (or stop at the first one)."""
    k = core.n
    if k > g.n:
        return 0
    out_m = g.out_mask
    in_m = g.in_mask
    full = (1 << g.n) - 1
    images = [0] * k
    total = 0

    def extend(i: int, used: int) -> int:
        nonlocal total
        need_out, need_in = plan[i]
        cand = full & ~used
        for s in need_out:
            cand &= out_m[images[s]]
            if not cand:
                return 0
        for s in need_in:
            cand &= in_m[images[s]]
            if not cand:
                return 0
        while cand:
            bit = cand & -cand
            cand ^= bit
            v = bit.bit_length() - 1
            images[i] = v
            if i + 1 == k:
                total += 1
                if not count_all:
                    return 1
            else:
                if extend(i + 1, used | bit) and not count_all:
                    return 1
        return 0

    extend(0, 0)
    return total


@dataclass(frozen=True)
class PatternDigraph:
    """A forbidden pattern H with cached derived data."""

    graph: Digraph

    def __post_init__(self):
        if len(self.graph.edges) < 2:
            raise PreconditionError("pattern needs at least 2 edges")

    @classmethod
    def from_digraph(cls, g: Digraph) -> "PatternDigraph":
        return cls(g)

    @classmethod
    def from_text(cls, text: str) -> "PatternDigraph":
        return cls(parse_digraph(text))

    @cached_property
    def r(self) -> int:
        """Edge count of the pattern."""
        return len(self.graph.edges)

    @cached_property
    def h(self) -> int:
        """Vertex count of the pattern, isolated vertices included."""
        return self.graph.n

    @cached_property
    def aut(self) -> int:
        return automorphism_count(self.graph)

    @cached_property
    def core_digraph(self) -> Digraph:
        """The pattern restricted to its non-isolated vertices, reindexed."""
        return self.graph.spanned_subgraph(self.graph.edges)

    @cached_property
    def core_aut(self) -> int:
        return automorphism_count(self.core_digraph)

    @cached_property
    def isolated_count(self) -> int:
        return self.h - self.core_digraph.n

    @cached_property
    def embedding_plan(self):
        return _embedding_plan(self.core_digraph)


def count_copies(g: Digraph, pattern: PatternDigraph) -> int:
    """Number of distinct subsets of g's edges forming a copy of the pattern.

    A copy is the edge image of an injective vertex map of the whole pattern;
    two maps differing by a pattern automorphism give the same subset, so the
    count equals core embeddings / |Aut(core)|, gated on room for isolated
    vertices.  Zero iff g is pattern-free.
    """
    if g.n < pattern.h:
        return 0
    emb = _embed_search(g, pattern.core_digraph, pattern.embedding_plan, count_all=True)
    return emb // pattern.core_aut


def count_labelled_copies(g: Digraph, pattern: PatternDigraph) -> int:
    """Number of injective vertex maps realising the pattern inside g."""
    if g.n < pattern.h:
        return 0
    emb = _embed_search(g, pattern.core_digraph, pattern.embedding_plan, count_all=True)
    return emb * falling(g.n - pattern.core_digraph.n, pattern.isolated_count)


def is_pattern_free(g: Digraph, pattern: PatternDigraph) -> bool:
    if g.n < pattern.h:
        return True
    return _embed_search(g, pattern.core_digraph, pattern.embedding_plan, count_all=False) == 0


# ---------------------------------------------------------------------------
# Subpattern enumeration
# ---------------------------------------------------------------------------

def iter_subpatterns(pattern: PatternDigraph, min_edges: int = 2):
    """Yield (edge_subset, span) over all edge subsets with >= min_edges edges.

    span counts only the vertices covered by the chosen edges.  Subset order
    follows the bitmask counter over the sorted edge list, so it is
    deterministic.
    """
    edges = pattern.graph.edge_list
    r = len(edges)
    if r > 20:
        raise BudgetError(f"subpattern scan over 2^{r} subsets refused")
    endpoint_mask = [(1 << u) | (1 << v) for u, v in edges]
    for mask in range(1, 1 << r):
        e = bin(mask).count("1")
        if e < min_edges:
            continue
        vm = 0
        m = mask
        while m:
            b = m & -m
            m ^= b
            vm |= endpoint_mask[b.bit_length() - 1]
        subset = tuple(edges[i] for i in range(r) if mask >> i & 1)
        yield subset, vm.bit_count()


def enumerate_subpatterns(pattern: PatternDigraph) -> list[tuple[int, int]]:
    """(v, e) per edge subset with more than one edge, one entry per subset."""
    return [(span, len(subset)) for subset, span in iter_subpatterns(pattern)]


# ---------------------------------------------------------------------------
# Canonical forms
# ---------------------------------------------------------------------------

def _colour_refine(g: Digraph) -> list[int]:
    """Iterated directed colour refinement; colour ids are canonical under
    isomorphism (derived from sorted signatures at every round)."""
    n = g.n
    out_m, in_m = g.out_mask, g.in_mask
    code = [[0] * n for _ in range(n)]
    for u in range(n):
        row = out_m[u]
        for v in range(n):
            if u != v:
                code[u][v] = (row >> v & 1) | ((in_m[u] >> v & 1) << 1)
    triples = [
        (bin(out_m[v]).count("1"), bin(in_m[v]).count("1"), bin(out_m[v] & in_m[v]).count("1"))
        for v in range(n)
    ]
    rank = {t: i for i, t in enumerate(sorted(set(triples)))}
    colours = [rank[t] for t in triples]
    while True:
        sigs = [
            (colours[v], tuple(sorted((code[v][u], colours[u]) for u in range(n) if u != v)))
            for v in range(n)
        ]
        rank = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [rank[s] for s in sigs]
        if len(set(new)) == len(set(colours)):
            return new
        colours = new


def canonical_form(g: Digraph) -> bytes:
    """Canonical key: two digraphs get the same key iff they are isomorphic.

    Exact minimisation of the adjacency bit string over all colour-respecting
    vertex orders (colour refinement never separates vertices an isomorphism
    could exchange, so restricting to colour-respecting orders is lossless).
    The string is read in bordered order: placing vertex k appends the 2k bits
    (M[0,k], M[k,0], M[1,k], M[k,1], ..., M[k-1,k], M[k,k-1]).
    """
    n = g.n
    if n > _CANONICAL_MAX:
        raise BudgetError(f"canonical form over {n}! permutations refused")
    if n == 1:
        return bytes([1])
    colours = _colour_refine(g)
    by_colour: dict[int, list[int]] = {}
    for v, c in enumerate(colours):
        by_colour.setdefault(c, []).append(v)
    pos_colour: list[int] = []
    for c in sorted(by_colour):
        pos_colour.extend([c] * len(by_colour[c]))
    out_m = g.out_mask

    perm = [0] * n
    used = [False] * n
    best: list[int] | None = None
    inf = 1 << (2 * n + 2)  # larger than any level word

    def word_for(v: int, k: int) -> int:
        w = 0
        for p in range(k):
            u = perm[p]
            w = (w << 2) | ((out_m[u] >> v & 1) << 1) | (out_m[v] >> u & 1)
        return w

    # invariant on entry to dfs(k): best is None, or the words chosen on the
    # current path equal best[0..k-1]; a strictly smaller word truncates best
    # in place (the old deeper suffix is dominated), so the global minimum
    # path is never pruned and best converges to it
    def dfs(k: int):
        nonlocal best
        if k == n:
            if best is None:
                best = [word_for(perm[i], i) for i in range(n)]
            return
        for v in by_colour[pos_colour[k]]:
            if used[v]:
                continue
            w = word_for(v, k)
            if best is not None:
                if w > best[k]:
                    continue
                if w < best[k]:
                    best[k] = w
                    for i in range(k + 1, n):
                        best[i] = inf
            used[v] = True
            perm[k] = v
            dfs(k + 1)
            used[v] = False

    dfs(0)
    acc = 0
    for k, w in enumerate(best):
        acc = (acc << (2 * k)) | w
    nbytes = max(1, (n * (n - 1) + 7) // 8)
    return bytes([n]) + acc.to_bytes(nbytes, "big")


def generate_nonisomorphic_digraphs(n: int, spanning: bool = False) -> list[Digraph]:
    """All digraphs on [n] up to isomorphism, by canonical-key dedup.

    With spanning=True only digraphs without isolated vertices are kept.
    Desk scale: n <= 4 (4^6 labelled states).
    """
    if n > 4:
        raise BudgetError("exhaustive isomorphism-class generation capped at n=4")
    pairs = list(combinations(range(n), 2))
    reps: dict[bytes, Digraph] = {}
    for state in range(4 ** len(pairs)):
        edges = []
        s = state
        for i, j in pairs:
            t = s & 3
            s >>= 2
            if t & 1:
                edges.append((i, j))
            if t & 2:
                edges.append((j, i))
        g = Digraph(n, frozenset(edges))
        if spanning and len(g.nonisolated) != n:
            continue
        key = canonical_form(g)
        if key not in reps:
            reps[key] = g
    return [reps[k] for k in sorted(reps)]
