"""Container engine: coverage, sparsity, determinism, routing, pipeline."""

from __future__ import annotations

from fractions import Fraction

import pytest

from digraphlab import (
    ContainerFamily,
    PatternDigraph,
    WeightParam,
    build_containers,
    build_hypergraph,
    container_pipeline,
    count_copies,
    count_free,
    verify_family,
)
from digraphlab.errors import PreconditionError, VerificationError
from digraphlab.extremal import iter_free_edge_masks


def small_family(pat, N, eps=Fraction(1, 10), tau=None):
    hg = build_hypergraph(N, pat)
    if tau is None:
        tau = N ** -0.5
    return hg, build_containers(hg, tau, eps)


def test_empty_hypergraph_single_full_container(c3):
    # on [2] there are no triangle copies: one container, the whole universe
    hg = build_hypergraph(3, c3)
    empty = type(hg)(hg.universe, hg.r, (), 0)
    fam = build_containers(empty, 0.5, Fraction(1, 10))
    assert len(fam.containers) == 1
    assert fam.containers[0] == (1 << hg.universe.size) - 1


def test_single_hyperedge_each_container_misses_an_element(c3):
    hg = build_hypergraph(3, c3)
    single = type(hg)(hg.universe, hg.r, hg.edges[:1], 3)
    fam = build_containers(single, 0.5, Fraction(1, 4))
    edge_mask = 0
    for idx in single.edges[0]:
        edge_mask |= 1 << idx
    assert len(fam.containers) >= 1
    for c in fam.containers:
        assert edge_mask & ~c != 0  # at least one element of the edge missing
    rep = verify_family(single, fam, c3, mode="exhaustive")
    assert rep.checked == count_free(3, c3)
    assert rep.coverage_ok and rep.sparsity_ok


def test_parameter_validation(c3):
    hg = build_hypergraph(3, c3)
    with pytest.raises(PreconditionError):
        build_containers(hg, 0.5, Fraction(1, 2))
    with pytest.raises(PreconditionError):
        build_containers(hg, 0.5, Fraction(0))
    with pytest.raises(PreconditionError):
        build_containers(hg, 0.0, Fraction(1, 10))
    with pytest.raises(PreconditionError):
        build_containers(hg, 1.5, Fraction(1, 10))


def test_coverage_exhaustive_small(c3, t3):
    for pat in (c3, t3):
        for N in (3, 4):
            hg, fam = small_family(pat, N)
            rep = verify_family(hg, fam, pat, mode="exhaustive")
            assert rep.coverage_ok and rep.sparsity_ok
            assert rep.checked == count_free(N, pat)


def test_sparsity_recheck_is_exact(c3):
    hg, fam = small_family(c3, 4)
    limit = fam.eps * hg.edge_count
    for cmask in fam.containers:
        span = sum(1 for em in hg.edge_masks if em & ~cmask == 0)
        assert span <= limit


def test_routing_agrees_with_linear_scan(c3):
    # the fingerprint route must land on a container that contains the set
    hg, fam = small_family(c3, 4)
    for mask in iter_free_edge_masks(4, c3, hg.universe.pair_index):
        idx = fam.route(mask)
        assert idx is not None
        assert mask & ~fam.containers[idx] == 0


def test_route_partition_soundness(c3):
    """Every node's member/exclude split preserves the routed family.

    Walking each pattern-free digraph down the tree, the branch taken at a
    node is determined by pivot membership, the fingerprint stays inside the
    set, and the out-set stays disjoint from it.
    """
    hg, fam = small_family(c3, 4)
    for mask in iter_free_edge_masks(4, c3, hg.universe.pair_index):
        code = fam.root
        s_in = 0
        s_out = 0
        while code >= 0:
            piv = 1 << fam.pivots[code]
            if mask & piv:
                s_in |= piv
                code = fam.in_child[code]
            else:
                s_out |= piv
                code = fam.out_child[code]
        assert code != -1  # independent sets never reach a dead leaf
        assert s_in & ~mask == 0
        assert s_out & mask == 0
        assert mask & ~fam.containers[-code - 2] == 0


def test_determinism_byte_identical(c3):
    hg = build_hypergraph(4, c3)
    fam1 = build_containers(hg, 0.5, Fraction(1, 10))
    fam2 = build_containers(hg, 0.5, Fraction(1, 10))
    assert fam1.export_text() == fam2.export_text()


def test_export_roundtrip_routes_identically(c3):
    hg, fam = small_family(c3, 4)
    loaded = ContainerFamily.from_export_text(fam.export_text())
    assert loaded.containers == fam.containers
    for mask in iter_free_edge_masks(4, c3, hg.universe.pair_index):
        assert loaded.route(mask) == fam.route(mask)


def test_fault_injection_detected(c3):
    hg, fam = small_family(c3, 4)
    text = fam.export_text()
    lines = text.splitlines()
    w = (hg.universe.size + 3) // 4
    mask = int(lines[1], 16)
    lines[1] = f"{mask & ~(mask & -mask):0{w}x}"  # drop one universe element
    bad = ContainerFamily.from_export_text("\n".join(lines) + "\n")
    rep = verify_family(hg, bad, c3, mode="exhaustive")
    assert not rep.coverage_ok
    assert rep.miss_witness is not None and rep.miss_witness.startswith("n=4")
    with pytest.raises(VerificationError):
        rep.raise_on_failure()


def test_empty_family_on_nonempty_hypergraph_fails(c3):
    hg = build_hypergraph(3, c3)
    empty_fam = ContainerFamily(
        N=3, r=3, eps=Fraction(1, 10), tau=0.5, total_edges=hg.edge_count,
        containers=[], spans=[], root=-1, pivots=[], out_child=[], in_child=[],
    )
    rep = verify_family(hg, empty_fam, c3, mode="exhaustive")
    assert not rep.coverage_ok


def test_sampled_mode_deterministic(c3):
    hg, fam = small_family(c3, 5)
    r1 = verify_family(hg, fam, c3, mode="sampled", samples=500, seed=7)
    r2 = verify_family(hg, fam, c3, mode="sampled", samples=500, seed=7)
    assert r1.coverage_ok and r1.attempts == r2.attempts and r1.checked == r2.checked


def test_pipeline_refusals(dk3, a2, a4):
    with pytest.raises(PreconditionError) as err:
        container_pipeline(dk3, a2, 5, Fraction(1, 10))
    assert "6/3 > 2/2" in str(err.value)
    with pytest.raises(PreconditionError) as err:
        container_pipeline(dk3, a4, 5, Fraction(1, 10))
    assert "2-cycle" in str(err.value)


def test_pipeline_n4(c3, a2):
    rep = container_pipeline(c3, a2, 4, Fraction(1, 10))
    assert rep.verify.coverage_ok
    assert rep.verify.checked == count_free(4, c3)
    assert rep.copies_ok
    assert rep.ea_ok
    for row in rep.rows:
        assert row.copies_le_eps_edges and row.copies_le_eps_Nh
        assert row.copies <= float(rep.eps) * rep.N ** c3.h
    # family-size curve is reported, never asserted
    assert rep.reference_curve > 0


def test_pipeline_copy_counts_match_decode(c3, a2):
    rep = container_pipeline(c3, a2, 4, Fraction(1, 10))
    hg = build_hypergraph(4, c3)
    fam = build_containers(hg, rep.tau, rep.eps)
    for row in rep.rows:
        g = fam.universe.digraph_from_mask(fam.containers[row.index])
        assert count_copies(g, c3) == row.copies
