import random
from collections import Counter

import pytest

from _instances import synthetic_instance
from zkseq.pipeline import (ConstructionFailed, PipelineConfig, assemble,
                            build_Y_targets, classify_interval, derive_K,
                            is_acceptable, is_boundary_safe,
                            lll_dependency_degree, run_classical, run_tweak,
                            sequence, split_blocks, _quarter_sizes, _segments)
from zkseq.structure import Decomposition
from zkseq.verify import is_sequencing, is_t_weak
from zkseq.zk import GroundSet, Modulus

# pinned medium-size fixture whose first assembly has a vanishing interval
RESAMPLE_K = 10007
RESAMPLE_ELEMS = [334, 572, 2796, 3181, 3231, 3595, 4003, 4110, 4479, 4805,
                  5319, 6213, 6312, 6464, 6669, 7352, 7798, 7997, 8471]


def hand_decomp(k, blocks, P=(), N=(), delta=None, R=4):
    bl = [frozenset(b) for b in blocks]
    d = sum(x for b in bl for x in b) % k if delta is None else delta % k
    return Decomposition(modulus=Modulus.of(k), lam=1, P=frozenset(P),
                         N=frozenset(N), blocks=bl, delta=d, R=R, params={})


def test_derive_K():
    assert derive_K(4) == 2
    assert derive_K(5) == 3
    assert derive_K(4, c2=2.0) == 4
    assert derive_K(0) == 1


def test_quarter_sizes():
    assert _quarter_sizes(8) == [2, 2, 2, 2]
    assert _quarter_sizes(5) == [2, 1, 1, 1]
    assert _quarter_sizes(4) == [1, 1, 1, 1]


def test_split_blocks_interleaving():
    d = hand_decomp(10007, [range(10, 18), range(30, 38), range(60, 68)],
                    P=[1], N=[10006])
    plan = split_blocks(d, K=2, rng=random.Random(0))
    assert plan.u == 12
    assert plan.pattern() == plan.expected_pattern()
    assert plan.pattern() == ([(j, q) for j in (1, 2, 3) for q in (1, 2)] +
                              [(j, q) for j in (1, 2, 3) for q in (3, 4)])
    # quarters of each source partition that source's block
    for j, Dj in enumerate(d.blocks, start=1):
        got = [x for b in plan.blocks if b.source == j for x in b.elements]
        assert sorted(got) == sorted(Dj)


def test_split_blocks_empty_plan():
    d = hand_decomp(101, [], P=[1], N=[100], delta=0)
    plan = split_blocks(d, K=1, rng=random.Random(0))
    assert plan.u == 0


def test_split_blocks_uniform_partition():
    # internal blocks: every ordered 4-partition of an 8-element block is
    # equally likely (8! / 2!^4 = 2520 cells); 5 sigma per-cell window
    d = hand_decomp(10007, [range(10, 18), range(30, 38), range(60, 68)],
                    P=[1], N=[10006])
    rng = random.Random(123)
    trials = 60_000
    counts = Counter()
    for _ in range(trials):
        plan = split_blocks(d, K=2, rng=rng)
        quarters = tuple(frozenset(b.elements) for b in plan.blocks if b.source == 2)
        counts[quarters] += 1
    assert len(counts) <= 2520
    exp = trials / 2520
    sigma = (trials * (1 / 2520) * (1 - 1 / 2520)) ** 0.5
    worst = max(abs(c - exp) for c in counts.values())
    assert worst <= 5 * sigma, (worst, exp, sigma)
    # seeing nearly all cells is itself evidence of spread
    assert len(counts) > 2400


def test_y_targets_fixture():
    d = hand_decomp(101, [[1, 3, 9]], P=[1], N=[100], delta=13)
    Yp, Ym = build_Y_targets(d, K=1)
    assert Yp[0] == frozenset({100, 98, 92, 89, 91, 97})
    assert Ym[0] == Yp[0]   # single block: both ends coincide


def test_y_targets_need_blocks():
    d = hand_decomp(101, [], P=[1], N=[100], delta=0)
    with pytest.raises(ValueError):
        build_Y_targets(d, K=1)


def test_acceptability_first_end():
    # IS(p) = {0,1,3}, IS(n) = {0,3}: forbidden = {0,100,98} u {5,8}
    args = dict(K=2, p_order=(1, 2), n_order=(3,), delta=5, k=101)
    assert is_acceptable((4, 9), "first", **args)
    assert not is_acceptable((5, 9), "first", **args)
    assert not is_acceptable((4, 1), "first", **args)   # 4 + 1 = 5
    assert is_acceptable((4, 5), "first", K=1, p_order=(1, 2), n_order=(3,),
                         delta=5, k=101)   # K truncates to the first prefix


def test_acceptability_last_end():
    # forbidden = -IS(n) u (delta + IS(p)) = {0,98} u {5,6,8}
    args = dict(K=2, p_order=(1, 2), n_order=(3,), delta=5, k=101)
    assert is_acceptable((7, 2), "last", **args)
    assert not is_acceptable((7, 1), "last", **args)   # prefix 7 + 1 = 8
    assert not is_acceptable((6, 9), "last", **args)
    with pytest.raises(ValueError):
        is_acceptable((7,), "middle", **args)


def test_boundary_safety():
    assert not is_boundary_safe((3,), (7,), 1, 10)        # 3 + 7 = 0
    assert is_boundary_safe((1, 2), (3, 4), 2, 101)
    assert not is_boundary_safe((2, 3), (1,), 2, 5)       # left run 2+3 = 0
    assert not is_boundary_safe((9,), (1,), 2, 5)         # right run alone
    assert not is_boundary_safe((1, 4), (6, 1), 2, 10)    # 4 + 6 = 0
    assert is_boundary_safe((9, 1), (1,), 1, 10)          # K = 1 ignores the 9


def test_boundary_safety_empty_sides():
    assert is_boundary_safe((), (1,), 2, 5)
    assert is_boundary_safe((), (), 2, 5)


def test_classify_interval():
    d = hand_decomp(101, [range(10, 18)], P=[1, 2], N=[100])
    plan = split_blocks(d, K=1, rng=random.Random(0))
    segmap = _segments(2, plan.sizes(), 1)
    assert segmap.total == 11
    assert classify_interval((3, 3), plan, segmap) == "TypeII"
    assert classify_interval((1, 2), plan, segmap) == "TypeI"     # p only
    assert classify_interval((3, 4), plan, segmap) == "TypeI"     # swallows T_1
    for bad in ((0, 2), (1, 11), (5, 3)):
        with pytest.raises(ValueError):
            classify_interval(bad, plan, segmap)


def test_assemble():
    d = hand_decomp(101, [range(10, 18)], P=[1, 2], N=[100])
    plan = split_blocks(d, K=1, rng=random.Random(0))
    orders = [list(b.elements) for b in plan.blocks]
    fo = assemble((1, 2), (100,), orders, plan)
    assert fo.ordering[:2] == (2, 1)            # reversed positive phase
    assert fo.ordering[-1] == 100
    assert len(fo.ordering) == 11
    segs = [pv["segment"] for pv in fo.provenance]
    assert segs == ["p"] + ["T"] * 4 + ["n"]
    spans = [(pv["start"], pv["end"]) for pv in fo.provenance]
    assert spans[0] == (1, 2) and spans[-1] == (11, 11)
    flat = [fo.ordering[a - 1:b] for a, b in spans]
    assert sum(len(x) for x in flat) == 11
    bad = [list(o) for o in orders]
    bad[0] = [999, 998]
    with pytest.raises(ValueError):
        assemble((1, 2), (100,), bad, plan)


def oracle_sources(a, b, plan, p_len):
    # independent reconstruction: walk spans positionally
    out = set()
    pos = p_len
    for idx, blk in enumerate(plan.blocks, start=1):
        lo, hi = pos + 1, pos + len(blk.elements)
        pos = hi
        cnt = min(b, hi) - max(a, lo) + 1
        if cnt <= 0:
            continue
        if blk.source in (1, plan.s):
            out.add(("sigma", blk.source))
        else:
            out.add(("split", blk.source))
        if cnt < len(blk.elements):
            if idx == 1:
                out.add(("sigma", 1))
            elif idx == plan.u:
                out.add(("sigma", plan.s))
            else:
                out.add(("pair", idx // 2))
    return out


def oracle_degree(plan, t, p_len, n_len):
    total = p_len + sum(plan.sizes()) + n_len
    ivs = [(a, b) for a in range(1, total + 1)
           for b in range(a, min(a + t - 1, total) + 1)
           if not (a == 1 and b == total)]
    srcs = {iv: oracle_sources(iv[0], iv[1], plan, p_len) for iv in ivs}
    best = 0
    for iv in ivs:
        if not srcs[iv]:
            continue
        n = sum(1 for jv in ivs if jv != iv and srcs[iv] & srcs[jv])
        best = max(best, n)
    return best


@pytest.mark.parametrize("sizes,t,p_len,n_len", [
    ([range(10, 18)], 2, 0, 0),
    ([range(10, 18)], 3, 2, 1),
    ([range(10, 18), range(30, 38)], 4, 2, 1),
    ([range(10, 16), range(30, 38)], 3, 0, 2),
    ([range(10, 18), range(30, 38)], 1, 1, 1),
])
def test_lll_degree_matches_exhaustive(sizes, t, p_len, n_len):
    d = hand_decomp(10007, sizes, P=[1], N=[10006])
    plan = split_blocks(d, K=1, rng=random.Random(7))
    assert lll_dependency_degree(plan, t, p_len, n_len) == \
        oracle_degree(plan, t, p_len, n_len)


def test_tweak_end_to_end():
    A = synthetic_instance(0)
    cfg = PipelineConfig(mode="tweak", t=8, seed=5)
    fo = run_tweak(A, cfg)
    k = A.modulus.k
    assert is_t_weak(fo.ordering, k, 8)
    assert sorted(fo.ordering) == sorted(A)
    assert fo.plan.pattern() == fo.plan.expected_pattern()
    assert fo.mode == "tweak" and fo.t == 8
    # all cross-source junctions stay permissible (checked in dilated space)
    plan, pn, d = fo.plan, fo.pn, fo.decomposition
    K = plan.K
    for j in range(1, 2 * d.s):
        left, right = plan.blocks[2 * j - 1], plan.blocks[2 * j]
        assert is_boundary_safe(left.elements, right.elements, K, k)
    assert is_acceptable(plan.blocks[0].elements, "first", K,
                         pn.p_order, pn.n_order, d.delta, k)
    assert is_acceptable(tuple(reversed(plan.blocks[-1].elements)), "last", K,
                         pn.p_order, pn.n_order, d.delta, k)


def test_tweak_deterministic():
    A = synthetic_instance(2)
    cfg = PipelineConfig(mode="tweak", t=8, seed=11)
    assert run_tweak(A, cfg).ordering == run_tweak(A, cfg).ordering


def test_tweak_resampling_repairs_violations():
    A = GroundSet.of(RESAMPLE_K, RESAMPLE_ELEMS)
    fo = run_tweak(A, PipelineConfig(mode="tweak", t=6, seed=159))
    assert fo.resamples >= 1
    assert is_t_weak(fo.ordering, RESAMPLE_K, 6)


def test_tweak_total_zero_infeasible():
    A = GroundSet.of(10, [1, 2, 3, 4])
    with pytest.raises(ConstructionFailed) as exc:
        run_tweak(A, PipelineConfig(mode="tweak", t=2, seed=0))
    assert "infeasible-total-zero" in exc.value.flags


def test_classical_end_to_end():
    A = synthetic_instance(1)
    fo = run_classical(A, PipelineConfig(mode="classical", seed=3))
    assert is_sequencing(fo.ordering, A.modulus.k)
    assert sorted(fo.ordering) == sorted(A)
    assert fo.mode == "classical"


def test_classical_oracle_fallback():
    # starve the skeleton search so the retry loop gives up fast
    A = GroundSet.of(13, [1, 2, 3, 4, 5])
    cfg = PipelineConfig(mode="classical", seed=0, max_retries=2,
                         pn_node_budget=0)
    fo = run_classical(A, cfg)
    assert is_sequencing(fo.ordering, 13)
    assert any(pv.get("segment") == "oracle" for pv in fo.provenance)


def test_classical_no_fallback_raises():
    A = GroundSet.of(13, [1, 2, 3, 4, 5])
    cfg = PipelineConfig(mode="classical", seed=0, max_retries=2,
                         pn_node_budget=0, oracle_fallback=False)
    with pytest.raises(ConstructionFailed):
        run_classical(A, cfg)


def test_sequence_dispatch():
    A = GroundSet.of(11, [1, 3, 4])
    fo = sequence(A)
    assert "oracle_first" in fo.flags
    assert is_sequencing(fo.ordering, 11)
    fo2 = sequence(A, PipelineConfig(mode="auto", t=2))
    assert is_t_weak(fo2.ordering, 11, 2)
    with pytest.raises(ValueError):
        sequence(A, PipelineConfig(mode="bogus"))


def test_final_ordering_json_keys():
    A = GroundSet.of(11, [1, 3, 4])
    fo = sequence(A)
    assert set(fo.to_json_dict()) == {"k", "ordering", "mode", "t", "seed",
                                      "resamples", "provenance"}
