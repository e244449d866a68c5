"""Independent brute-force oracles for the test suite.

Everything here is deliberately naive (itertools over permutations and
subsets, Fractions, no bitsets, no incremental state) so that agreement with
the package is a genuine dual-route check, not the same code twice.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations, permutations, product


def naive_copy_images(edges: frozenset, n: int, h_edges: frozenset, h_n: int) -> set[frozenset]:
    """Distinct edge images of injective placements of the pattern."""
    images = set()
    if h_n > n:
        return images
    for img in permutations(range(n), h_n):
        mapped = frozenset((img[u], img[v]) for u, v in h_edges)
        if mapped <= edges:
            images.add(mapped)
    return images


def naive_count_copies(edges: frozenset, n: int, h_edges: frozenset, h_n: int) -> int:
    return len(naive_copy_images(edges, n, h_edges, h_n))


def naive_subsets(h_edges) -> list[tuple[tuple, int, int]]:
    """(subset, e, v) for every edge subset with at least two edges."""
    edges = sorted(h_edges)
    out = []
    for size in range(2, len(edges) + 1):
        for subset in combinations(edges, size):
            verts = {x for e in subset for x in e}
            out.append((subset, size, len(verts)))
    return out


def naive_m(h_edges) -> tuple[Fraction | None, bool]:
    """(max (e-1)/(v-2) over subsets with v >= 3, two-cycle-subset flag)."""
    best = None
    flag = False
    for _, e, v in naive_subsets(h_edges):
        if v == 2:
            flag = True
            continue
        cand = Fraction(e - 1, v - 2)
        if best is None or cand > best:
            best = cand
    return best, flag


def naive_max_density(h_edges) -> Fraction:
    return max(Fraction(e, v) for _, e, v in naive_subsets(h_edges))


def naive_condition(h_edges, a: Fraction) -> bool:
    return naive_max_density(h_edges) <= a / 2


def all_digraph_edge_sets(n: int):
    """Every labelled digraph on [n], as a frozenset of ordered pairs."""
    pairs = list(combinations(range(n), 2))
    for states in product(range(4), repeat=len(pairs)):
        edges = []
        for (i, j), t in zip(pairs, states):
            if t & 1:
                edges.append((i, j))
            if t & 2:
                edges.append((j, i))
        yield frozenset(edges)


def f_counts(edges: frozenset) -> tuple[int, int]:
    f2 = sum(1 for u, v in edges if u < v and (v, u) in edges)
    return f2, len(edges) - 2 * f2


def naive_extremal(n: int, h_edges: frozenset, h_n: int, a: Fraction):
    """(max a*f2+f1 over pattern-free digraphs, free count, attaining count)."""
    best = None
    free = 0
    attain = 0
    for edges in all_digraph_edge_sets(n):
        if naive_count_copies(edges, n, h_edges, h_n) != 0:
            continue
        free += 1
        f2, f1 = f_counts(edges)
        val = a * f2 + f1
        if best is None or val > best:
            best = val
            attain = 1
        elif val == best:
            attain += 1
    return best, free, attain


def naive_supersat(n: int, h_edges: frozenset, h_n: int, a: Fraction, k_max: int):
    """max a*f2+f1 over digraphs with at most k copies, for k in 0..k_max."""
    best = [None] * (k_max + 1)
    for edges in all_digraph_edge_sets(n):
        c = naive_count_copies(edges, n, h_edges, h_n)
        if c > k_max:
            continue
        f2, f1 = f_counts(edges)
        val = a * f2 + f1
        for k in range(c, k_max + 1):
            if best[k] is None or val > best[k]:
                best[k] = val
    return best


def burnside_digraph_classes(n: int) -> int:
    """Number of digraph isomorphism classes on [n] via orbit counting:
    average over all vertex permutations of 2^(orbits on ordered pairs)."""
    total = 0
    ordered = [(u, v) for u in range(n) for v in range(n) if u != v]
    for perm in permutations(range(n)):
        seen = set()
        orbits = 0
        for e in ordered:
            if e in seen:
                continue
            orbits += 1
            u, v = e
            while (u, v) not in seen:
                seen.add((u, v))
                u, v = perm[u], perm[v]
        total += 2 ** orbits
    return total // math.factorial(n)


def naive_codegree_sums(universe_size: int, edges: list[tuple[int, ...]], r: int) -> dict[int, int]:
    """Sum over universe vertices of max co-degree over j-subsets through it.

    Quadratic in the number of hyperedges: candidate subsets come from the
    edges themselves (anything else has co-degree zero), and each candidate
    is scored by scanning the whole edge list.
    """
    edge_sets = [set(e) for e in edges]
    sums = {}
    for j in range(2, r + 1):
        candidates = set()
        for e in edges:
            for combo in combinations(sorted(e), j):
                candidates.add(combo)
        d = {}
        for sigma in candidates:
            s = set(sigma)
            d[sigma] = sum(1 for es in edge_sets if s <= es)
        per_vertex = [0] * universe_size
        for sigma, val in d.items():
            for v in sigma:
                if val > per_vertex[v]:
                    per_vertex[v] = val
        sums[j] = sum(per_vertex)
    return sums
