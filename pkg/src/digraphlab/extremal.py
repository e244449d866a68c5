"""Exact extremal numbers, pattern-free counts and supersaturation scans.

The labelled state space is a mixed-radix counter: each of the n(n-1)/2
unordered pairs takes one of four states (none / forward / backward / double).
The full-mode scan walks this counter with incremental maintenance of f1, f2
and the number of realised pattern copies, so n=5 (4^10 states) runs in
seconds.  Canonical mode grows graphs one vertex at a time with isomorph
rejection and reaches n=7 for small patterns.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations

from .digraphs import (
    Digraph,
    PatternDigraph,
    automorphism_count,
    canonical_form,
    count_copies,
    is_pattern_free,
)
from .errors import BudgetError, PreconditionError, VerificationError
from .weights import WeightParam

FULL_MODE_MAX_N = 5
CANONICAL_MODE_MAX_N = 7
COUNT_CLASSES_MAX_N = 6

_D_F1 = (1, 0, -1, 0)  # f1 delta for pair transition t -> t+1 (mod 4)
_D_F2 = (0, 0, 1, -1)


def pair_slots(n: int) -> list[tuple[int, int]]:
    return list(combinations(range(n), 2))


def compile_copies(n: int, pattern: PatternDigraph):
    """Distinct copies of the pattern inside the complete digraph on [n].

    Each copy is a tuple of (pair_slot, need) constraints where need is the
    2-bit mask of required directions on that unordered pair.  If n is below
    the pattern's vertex count there are no copies at all.
    """
    if n < pattern.h:
        return []
    core = pattern.core_digraph
    slot = {p: q for q, p in enumerate(pair_slots(n))}
    images = set()
    for img in permutations(range(n), core.n):
        images.add(frozenset((img[u], img[v]) for u, v in core.edges))
    copies = []
    for edge_set in images:
        need: dict[int, int] = {}
        for u, v in edge_set:
            i, j = (u, v) if u < v else (v, u)
            q = slot[(i, j)]
            need[q] = need.get(q, 0) | (1 if u < v else 2)
        copies.append(tuple(sorted(need.items())))
    copies.sort()
    return copies


def _touch_lists(p: int, copies):
    touch_ids: list[list[int]] = [[] for _ in range(p)]
    touch_reqs: list[list[int]] = [[] for _ in range(p)]
    for cid, constraints in enumerate(copies):
        for q, req in constraints:
            touch_ids[q].append(cid)
            touch_reqs[q].append(req)
    return touch_ids, touch_reqs


def digraph_from_digits(n: int, digits) -> Digraph:
    edges = []
    for q, (i, j) in enumerate(pair_slots(n)):
        t = digits[q]
        if t & 1:
            edges.append((i, j))
        if t & 2:
            edges.append((j, i))
    return Digraph(n, frozenset(edges))


def _scan_worker(args) -> dict:
    """Scan a contiguous state range [start, stop); exact aggregates only.

    Tracks, per exact copy count 0..k_max, the best weighted size as the pair
    (f2, f1); for rational weights the comparison key is the exact integer
    num*f2 + den*f1.  Optionally collects digit snapshots attaining the
    copy-free maximum (for extremal witnesses).
    """
    (n, copies, wspec, k_max, start, stop, collect, raw_cap) = args
    p = n * (n - 1) // 2
    touch_ids, touch_reqs = _touch_lists(p, copies)
    digits = [(start >> (2 * q)) & 3 for q in range(p)]

    deficit = []
    present = 0
    for constraints in copies:
        d = sum(1 for q, req in constraints if (digits[q] & req) != req)
        deficit.append(d)
        if d == 0:
            present += 1

    f2 = sum(1 for t in digits if t == 3)
    f1 = sum(1 for t in digits if t in (1, 2))

    rational = wspec is not None and wspec[0] == "rat"
    weight = None
    w = 0
    d_w = (0, 0, 0, 0)
    if rational:
        num, den = wspec[1], wspec[2]
        d_w = (den, 0, num - den, -num)
        w = num * f2 + den * f1
    elif wspec is not None:
        weight = WeightParam.log2(wspec[1])

    # best[c] = (key, f2, f1); key is the weighted integer for rational
    # weights and None otherwise (pairs compared via the weight object)
    best: list[tuple | None] = [None] * (k_max + 1)
    free = 0
    wits: list[tuple[int, ...]] = []
    overflow = False

    idx = start
    while True:
        if present <= k_max:
            if present == 0:
                free += 1
            if wspec is not None:
                c = present
                b = best[c]
                if rational:
                    cmp = 1 if b is None else (w > b[0]) - (w < b[0])
                else:
                    cmp = 1 if b is None else weight.cmp_pairs((f2, f1), (b[1], b[2]))
                if cmp > 0:
                    best[c] = (w if rational else None, f2, f1)
                    if collect and c == 0:
                        wits = [tuple(digits)]
                        overflow = False
                elif cmp == 0 and collect and c == 0:
                    if len(wits) < raw_cap:
                        wits.append(tuple(digits))
                    else:
                        overflow = True
        idx += 1
        if idx == stop:
            break
        q = 0
        while True:
            t = digits[q]
            nt = (t + 1) & 3
            digits[q] = nt
            f1 += _D_F1[t]
            f2 += _D_F2[t]
            if rational:
                w += d_w[t]
            tids = touch_ids[q]
            treqs = touch_reqs[q]
            for i in range(len(tids)):
                req = treqs[i]
                if ((t & req) == req) != ((nt & req) == req):
                    cid = tids[i]
                    if (nt & req) == req:
                        deficit[cid] -= 1
                        if deficit[cid] == 0:
                            present += 1
                    else:
                        if deficit[cid] == 0:
                            present -= 1
                        deficit[cid] += 1
            if nt != 0:
                break
            q += 1

    return {"free": free, "best": best, "wits": wits, "overflow": overflow}


@dataclass
class ScanResult:
    n: int
    states: int
    free_count: int
    best_pairs: list[tuple[int, int] | None]  # index = exact copy count
    witness_digits: list[tuple[int, ...]]
    witness_overflow: bool


def full_scan(
    n: int,
    pattern: PatternDigraph,
    weight: WeightParam | None,
    k_max: int = 0,
    collect_witnesses: bool = False,
    raw_cap: int = 50_000,
    workers: int = 1,
) -> ScanResult:
    """Exhaustive scan of all 4^(n(n-1)/2) digraphs on [n], exact reduce."""
    if n > FULL_MODE_MAX_N:
        raise BudgetError(
            f"full enumeration needs 4^{n * (n - 1) // 2} states; capped at n={FULL_MODE_MAX_N}"
        )
    if n < 1:
        raise PreconditionError("n must be >= 1")
    p = n * (n - 1) // 2
    total = 4 ** p
    copies = compile_copies(n, pattern)
    if weight is None:
        wspec = None
    elif weight.is_rational:
        wspec = ("rat", weight.rational.numerator, weight.rational.denominator)
    else:
        wspec = ("log", weight.log_arg)

    if workers <= 1 or total < 1 << 14:
        chunks = [(0, total)]
    else:
        parts = min(total, workers * 4)
        step = total // parts
        bounds = [i * step for i in range(parts)] + [total]
        chunks = [(bounds[i], bounds[i + 1]) for i in range(parts) if bounds[i] < bounds[i + 1]]

    args = [
        (n, copies, wspec, k_max, start, stop, collect_witnesses, raw_cap)
        for start, stop in chunks
    ]
    if len(args) == 1:
        results = [_scan_worker(a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_worker, args))

    free = sum(r["free"] for r in results)
    best: list[tuple[int, int] | None] = [None] * (k_max + 1)
    wits: list[tuple[int, ...]] = []
    overflow = False
    if weight is not None:
        merged: list[tuple | None] = [None] * (k_max + 1)
        for r in results:
            for c in range(k_max + 1):
                v = r["best"][c]
                if v is None:
                    continue
                b = merged[c]
                if weight.is_rational:
                    cmp = 1 if b is None else (v[0] > b[0]) - (v[0] < b[0])
                else:
                    cmp = 1 if b is None else weight.cmp_pairs((v[1], v[2]), (b[1], b[2]))
                if cmp > 0:
                    merged[c] = v
                    if c == 0 and collect_witnesses:
                        wits = list(r["wits"])
                        overflow = r["overflow"]
                elif cmp == 0 and c == 0 and collect_witnesses:
                    room = raw_cap - len(wits)
                    extra = r["wits"]
                    wits.extend(extra[:room])
                    if r["overflow"] or len(extra) > room:
                        overflow = True
        best = [None if m is None else (m[1], m[2]) for m in merged]

    return ScanResult(n, total, free, best, wits, overflow)


# ---------------------------------------------------------------------------
# Canonical-augmentation search
# ---------------------------------------------------------------------------

def _free_extensions(g: Digraph, pattern: PatternDigraph):
    """Pattern-free one-vertex extensions of g (new vertex = g.n)."""
    k = g.n
    base = g.edges
    for code in range(4 ** k):
        edges = set(base)
        c = code
        for u in range(k):
            t = c & 3
            c >>= 2
            if t & 1:
                edges.add((u, k))
            if t & 2:
                edges.add((k, u))
        ext = Digraph(k + 1, frozenset(edges))
        if is_pattern_free(ext, pattern):
            yield ext


def free_classes(n: int, pattern: PatternDigraph) -> dict[bytes, Digraph]:
    """All pattern-free isomorphism classes on [n], via one-vertex growth.

    Every pattern-free class on k+1 vertices restricts to a pattern-free
    class on k vertices, so extending every representative in all 4^k ways
    and deduplicating by canonical key is complete.
    """
    if n > COUNT_CLASSES_MAX_N:
        raise BudgetError(f"class generation capped at n={COUNT_CLASSES_MAX_N}")
    g1 = Digraph(1, frozenset())
    reps = {canonical_form(g1): g1}
    for _level in range(2, n + 1):
        new: dict[bytes, Digraph] = {}
        for g in reps.values():
            for ext in _free_extensions(g, pattern):
                key = canonical_form(ext)
                if key not in new:
                    new[key] = ext
        reps = new
    return reps


def _greedy_seed(n: int, pattern: PatternDigraph, weight: WeightParam) -> tuple[int, int]:
    """A pattern-free digraph on [n] found greedily; lower bound for pruning."""
    g = Digraph(1, frozenset())
    for _level in range(2, n + 1):
        best = None
        for ext in _free_extensions(g, pattern):
            if best is None or weight.cmp_pairs((ext.f2, ext.f1), (best.f2, best.f1)) > 0:
                best = ext
        g = best
    return (g.f2, g.f1)


def _extremal_canonical(n: int, pattern: PatternDigraph, weight: WeightParam):
    """Branch-and-bound over canonical representatives; exact max + classes.

    Pruning discards a representative only when even turning every remaining
    pair into a double edge cannot reach the current best, so every class
    attaining the maximum survives to level n.
    """
    if n > CANONICAL_MODE_MAX_N:
        raise BudgetError(f"canonical search capped at n={CANONICAL_MODE_MAX_N}")
    total_pairs = n * (n - 1) // 2
    best_pair = _greedy_seed(n, pattern, weight)
    winners: dict[bytes, Digraph] = {}
    g1 = Digraph(1, frozenset())
    reps: dict[bytes, Digraph] = {canonical_form(g1): g1}
    if n == 1:
        return (0, 0), {canonical_form(g1): g1}
    for level in range(2, n + 1):
        rem = total_pairs - level * (level - 1) // 2
        new: dict[bytes, Digraph] = {}
        for g in reps.values():
            for ext in _free_extensions(g, pattern):
                bound = (ext.f2 + rem, ext.f1)
                if weight.cmp_pairs(bound, best_pair) < 0:
                    continue
                if level == n:
                    val = weight.cmp_pairs((ext.f2, ext.f1), best_pair)
                    if val < 0:
                        continue
                    key = canonical_form(ext)
                    if val > 0:
                        best_pair = (ext.f2, ext.f1)
                        winners = {key: ext}
                    else:
                        winners.setdefault(key, ext)
                else:
                    key = canonical_form(ext)
                    if key not in new:
                        new[key] = ext
        if level < n:
            reps = new
    return best_pair, winners


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtremalResult:
    n: int
    weight: WeightParam
    mode: str
    value_str: str
    value_float: float
    value_fraction: Fraction | None
    best_pair: tuple[int, int]
    witnesses: tuple[Digraph, ...]
    witness_keys: tuple[bytes, ...]
    witness_overflow: bool
    states_scanned: int | None


def _assemble_result(n, pattern, weight, mode, best_pair, class_map, overflow,
                     witness_cap, states) -> ExtremalResult:
    keys = sorted(class_map)
    if len(keys) > witness_cap:
        keys = keys[:witness_cap]
        overflow = True
    witnesses = tuple(class_map[k] for k in keys)
    for wit in witnesses:
        if count_copies(wit, pattern) != 0:
            raise VerificationError("extremal witness is not pattern-free on re-check")
        if weight.cmp_pairs((wit.f2, wit.f1), best_pair) != 0:
            raise VerificationError("extremal witness does not attain the maximum on re-check")
    return ExtremalResult(
        n=n,
        weight=weight,
        mode=mode,
        value_str=weight.ea_str(best_pair[0], best_pair[1]),
        value_float=weight.ea_float(*best_pair),
        value_fraction=weight.ea_fraction(*best_pair),
        best_pair=best_pair,
        witnesses=witnesses,
        witness_keys=tuple(keys),
        witness_overflow=overflow,
        states_scanned=states,
    )


def extremal_number(
    n: int,
    pattern: PatternDigraph,
    weight: WeightParam,
    mode: str = "full",
    witness_cap: int = 256,
    workers: int = 1,
) -> ExtremalResult:
    """Exact maximum weighted size over pattern-free digraphs on [n]."""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    if mode == "full":
        scan = full_scan(n, pattern, weight, k_max=0, collect_witnesses=True, workers=workers)
        best_pair = scan.best_pairs[0]
        class_map: dict[bytes, Digraph] = {}
        for digits in scan.witness_digits:
            g = digraph_from_digits(n, digits)
            class_map.setdefault(canonical_form(g), g)
        return _assemble_result(
            n, pattern, weight, mode, best_pair, class_map, scan.witness_overflow,
            witness_cap, scan.states,
        )
    if mode == "canonical":
        best_pair, winners = _extremal_canonical(n, pattern, weight)
        return _assemble_result(
            n, pattern, weight, mode, best_pair, winners, False, witness_cap, None,
        )
    raise PreconditionError(f"unknown mode {mode!r}; expected full or canonical")


def count_free(n: int, pattern: PatternDigraph, workers: int = 1) -> int:
    """Exact number of labelled pattern-free digraphs on [n]."""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    if n <= FULL_MODE_MAX_N:
        return full_scan(n, pattern, None, workers=workers).free_count
    if n == COUNT_CLASSES_MAX_N:
        base = COUNT_CLASSES_MAX_N - 1
        reps = free_classes(base, pattern)
        fact = math.factorial(base)
        total = 0
        for g in reps.values():
            labelled = fact // automorphism_count(g)
            total += labelled * _free_extension_count(g, pattern)
        return total
    raise BudgetError(f"labelled count capped at n={COUNT_CLASSES_MAX_N}")


def _free_extension_count(g: Digraph, pattern: PatternDigraph) -> int:
    """Number of attachment codes of a new vertex keeping g pattern-free.

    Attachment code: 2 bits per existing vertex u (bit 2u = edge u->new,
    bit 2u+1 = edge new->u).  Copies whose base part is not already inside g
    can never appear; the rest impose superset constraints on the code.
    """
    k = g.n
    new_v = k
    core = pattern.core_digraph
    if pattern.h > k + 1:
        return 4 ** k
    if pattern.isolated_count and not is_pattern_free(
        Digraph(k + 1, g.edges), pattern
    ):
        # the base already hosts the core; the new vertex supplies the room
        # its isolated vertices were missing, so no extension stays free
        return 0
    reqs: set[int] = set()
    seen_images = set()
    for img in permutations(range(k + 1), core.n):
        if new_v not in img:
            continue
        edge_set = frozenset((img[u], img[v]) for u, v in core.edges)
        if edge_set in seen_images:
            continue
        seen_images.add(edge_set)
        req = 0
        ok = True
        for u, v in edge_set:
            if u == new_v:
                req |= 1 << (2 * v + 1)
            elif v == new_v:
                req |= 1 << (2 * u)
            elif not g.has_edge(u, v):
                ok = False
                break
        if ok and req:
            reqs.add(req)
    req_list = sorted(reqs)
    count = 0
    for code in range(4 ** k):
        good = True
        for req in req_list:
            if code & req == req:
                good = False
                break
        if good:
            count += 1
    return count


@dataclass(frozen=True)
class RatioReport:
    n: int
    count: int
    ex2: int
    log2_count: float
    ratio: float | None
    lower_bound_ok: bool


def counting_ratio(n: int, pattern: PatternDigraph, workers: int = 1) -> RatioReport:
    """log2 of the pattern-free count against the a=2 extremal number.

    Also asserts the exact spanning lower bound count >= 2**ex2: every edge
    subset of an extremal witness is pattern-free by monotonicity.
    """
    mode = "full" if n <= FULL_MODE_MAX_N else "canonical"
    ex = extremal_number(n, pattern, WeightParam.from_rational(2), mode=mode, workers=workers)
    if ex.value_fraction.denominator != 1:
        raise VerificationError("a=2 extremal value must be an integer")
    ex2 = int(ex.value_fraction)
    count = count_free(n, pattern, workers=workers)
    if count < (1 << ex2):
        raise VerificationError(f"spanning lower bound violated: f*={count} < 2^{ex2}")
    log2c = math.log2(count)
    ratio = (log2c / ex2) if ex2 > 0 else None
    return RatioReport(n, count, ex2, log2c, ratio, True)


@dataclass(frozen=True)
class SupersatPoint:
    n: int
    k: int
    f2: int
    f1: int
    value_str: str
    value_float: float
    value_fraction: Fraction | None


def supersat_scan(
    n: int,
    pattern: PatternDigraph,
    weight: WeightParam,
    k_max: int,
    workers: int = 1,
) -> list[SupersatPoint]:
    """For each copy budget k in 0..k_max, the exact maximum weighted size
    over digraphs on [n] with at most k pattern copies."""
    if k_max < 0:
        raise PreconditionError("k_max must be >= 0")
    scan = full_scan(n, pattern, weight, k_max=k_max, workers=workers)
    points: list[SupersatPoint] = []
    running: tuple[int, int] | None = None
    for k in range(k_max + 1):
        cand = scan.best_pairs[k]
        if cand is not None and (running is None or weight.cmp_pairs(cand, running) > 0):
            running = cand
        f2, f1 = running
        points.append(
            SupersatPoint(
                n, k, f2, f1,
                weight.ea_str(f2, f1),
                weight.ea_float(f2, f1),
                weight.ea_fraction(f2, f1),
            )
        )
    return points


def iter_free_edge_masks(n: int, pattern: PatternDigraph, edge_bit):
    """Yield one bitmask per pattern-free digraph on [n] (all of them).

    edge_bit(u, v) gives the bit position of the directed edge u->v, so the
    caller controls the indexing (e.g. the pair-universe codec).
    """
    p = n * (n - 1) // 2
    copies = compile_copies(n, pattern)
    touch_ids, touch_reqs = _touch_lists(p, copies)
    slots = pair_slots(n)
    xor_tab = []
    for i, j in slots:
        fw = 1 << edge_bit(i, j)
        bw = 1 << edge_bit(j, i)
        xor_tab.append((fw, fw | bw, fw, fw | bw))
    digits = [0] * p
    deficit = [len(c) for c in copies]
    present = sum(1 for d in deficit if d == 0)
    mask = 0
    total = 4 ** p
    idx = 0
    while True:
        if present == 0:
            yield mask
        idx += 1
        if idx == total:
            return
        q = 0
        while True:
            t = digits[q]
            nt = (t + 1) & 3
            digits[q] = nt
            mask ^= xor_tab[q][t]
            tids = touch_ids[q]
            treqs = touch_reqs[q]
            for i in range(len(tids)):
                req = treqs[i]
                if ((t & req) == req) != ((nt & req) == req):
                    cid = tids[i]
                    if (nt & req) == req:
                        deficit[cid] -= 1
                        if deficit[cid] == 0:
                            present += 1
                    else:
                        if deficit[cid] == 0:
                            present -= 1
                        deficit[cid] += 1
            if nt != 0:
                break
            q += 1
