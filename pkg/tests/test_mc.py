import csv
import math

import pytest

from _instances import synthetic_instance
from zkseq.mc import (CSV_COLUMNS, RNG_ID, ExperimentReport,
                      estimate_acceptability, estimate_anticoncentration,
                      estimate_permissible_density, lll_budget_report,
                      union_bound_report, write_reports_csv)
from zkseq.pipeline import derive_K, split_blocks, lll_dependency_degree, _decompose_for, _order_for
from zkseq.pipeline import PipelineConfig
from zkseq.pn_ordering import PNOrderings
from zkseq.structure import Decomposition, compute_R_tweak
from zkseq.zk import GroundSet, Modulus

POW3 = GroundSet.of(3**9, [3**i for i in range(8)])


def test_anticoncentration_exact_uniform():
    # distinct subset sums: a representable target is hit with prob 1/C(8,2)
    rep = estimate_anticoncentration(POW3, [1], x=3**0 + 3**1, trials=40_000, seed=1)
    est = rep.estimates["p_hat"]["estimate"]
    se = rep.estimates["p_hat"]["stderr"]
    assert abs(est - 1 / math.comb(8, 2)) <= 5 * se
    assert rep.verdicts["p_hat"] == "pass"
    assert rep.bounds["p_hat"] == 1 / math.comb(8, 2)
    assert rep.rng == RNG_ID


def test_anticoncentration_unrepresentable_target():
    rep = estimate_anticoncentration(POW3, [1], x=2, trials=5_000, seed=0)
    assert rep.estimates["p_hat"]["estimate"] == 0.0


def test_anticoncentration_two_quarters():
    rep = estimate_anticoncentration(POW3, [2, 4], x=sum(3**i for i in range(4)),
                                     trials=40_000, seed=2)
    est = rep.estimates["p_hat"]["estimate"]
    se = rep.estimates["p_hat"]["stderr"]
    assert abs(est - 1 / math.comb(8, 4)) <= 5 * se


def test_anticoncentration_guards():
    with pytest.raises(ValueError):
        estimate_anticoncentration(POW3, [1, 2, 3, 4], 1, 10)
    with pytest.raises(ValueError):
        estimate_anticoncentration(POW3, [], 1, 10)
    with pytest.raises(ValueError):
        estimate_anticoncentration(GroundSet.of(101, [1, 3, 9]), [1], 1, 10)
    with pytest.raises(ValueError):
        estimate_anticoncentration(POW3, [1], 1, 0)


def test_anticoncentration_deterministic():
    a = estimate_anticoncentration(POW3, [1], 4, trials=2_000, seed=7)
    b = estimate_anticoncentration(POW3, [1], 4, trials=2_000, seed=7)
    assert a.estimates == b.estimates


def test_acceptability_in_regime_instance():
    A = synthetic_instance(0)
    cfg = PipelineConfig(mode="tweak", t=8, seed=0)
    R = compute_R_tweak(A.modulus.p, cfg.c1)
    d = _decompose_for(A, R, cfg, seed=0)
    pn = _order_for(d, derive_K(R, cfg.c2), cfg, seed=0)
    rep = estimate_acceptability(d, pn, derive_K(R, cfg.c2), trials=500, seed=0)
    assert rep.estimates["accept_rate"]["estimate"] >= 0.99
    assert rep.verdicts["accept_rate"] == "pass"


def test_acceptability_all_rejected():
    # single-element first block whose only prefix sum is always forbidden
    d = Decomposition(modulus=Modulus.of(101), lam=1, P=frozenset({96}),
                      N=frozenset(), blocks=[frozenset({5})], delta=5, R=1)
    pn = PNOrderings(k=101, p_order=(96,), n_order=(), delta=0,
                     targets_plus=[], targets_minus=[])
    rep = estimate_acceptability(d, pn, K=1, trials=50, seed=0)
    assert rep.estimates["accept_rate"]["estimate"] == 0.0
    assert rep.verdicts["accept_rate"] == "info"


def test_permissible_density_zero_and_one():
    rep = estimate_permissible_density([3], [7], K=1, trials=100, seed=0, k=10)
    assert rep.estimates["density"]["estimate"] == 0.0
    rep = estimate_permissible_density([1, 2], [3, 4], K=2, trials=100, seed=0, k=1009)
    assert rep.estimates["density"]["estimate"] == 1.0
    assert rep.verdicts["density"] == "info"
    with pytest.raises(ValueError):
        estimate_permissible_density([1], [2], K=1, trials=10)


def test_lll_budget_pinned_values():
    rep = lll_budget_report(0.01, 30)
    assert abs(rep.estimates["e_p_d"]["estimate"] - math.e * 0.3) < 1e-12
    assert rep.verdicts["e_p_d"] == "pass"
    rep = lll_budget_report(0.1, 10)
    assert rep.verdicts["e_p_d"] == "fail"
    rep = lll_budget_report(0.0, 1000)
    assert rep.verdicts["e_p_d"] == "pass"


def test_lll_budget_from_plan():
    import random
    d = Decomposition(modulus=Modulus.of(10007), lam=1, P=frozenset({1}),
                      N=frozenset({10006}), blocks=[frozenset(range(10, 18)),
                                                    frozenset(range(30, 38)),
                                                    frozenset(range(60, 68))],
                      delta=sum(range(10, 18)) + sum(range(30, 38)) + sum(range(60, 68)),
                      R=4)
    plan = split_blocks(d, K=2, rng=random.Random(0))
    rep = lll_budget_report(0.001, plan=plan, t=3)
    assert rep.details["degree"] == lll_dependency_degree(plan, 3)


def test_lll_budget_guards():
    with pytest.raises(ValueError):
        lll_budget_report(0.5)
    with pytest.raises(ValueError):
        lll_budget_report(1.5, 10)
    with pytest.raises(ValueError):
        lll_budget_report(0.5, 10, plan="also")


def test_union_bound_pinned():
    rep = union_bound_report(10, 3, {"type_i": 1e-5, "type_ii": 1e-4})
    assert abs(rep.estimates["failure_bound"]["estimate"] - 0.011) < 1e-12
    assert rep.verdicts["failure_bound"] == "pass"
    rep = union_bound_report(10, 3, {})
    assert rep.estimates["failure_bound"]["estimate"] == 0.0
    rep = union_bound_report(200, 3, {"type_ii": 1e-4})
    assert rep.verdicts["failure_bound"] == "fail"


def test_csv_round_trip(tmp_path):
    reports = [
        lll_budget_report(0.01, 30),
        union_bound_report(10, 3, {"type_i": 1e-5}),
        ExperimentReport(experiment="multi", seed=0, trials=10,
                         estimates={"a": {"estimate": 0.5, "stderr": 0.1},
                                    "b": {"estimate": 0.25, "stderr": 0.1}},
                         bounds={"a": 1.0, "b": None},
                         verdicts={"a": "pass", "b": "info"}),
    ]
    path = tmp_path / "reports.csv"
    write_reports_csv(reports, path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == list(CSV_COLUMNS)
    assert len(rows) == 1 + 2 + 2
    labels = [r[0] for r in rows[1:]]
    assert "lll-budget" in labels and "multi:a" in labels and "multi:b" in labels
    # bounds of None serialize as the empty field
    b_row = rows[1 + labels.index("multi:b")]
    assert b_row[5] == ""


def test_report_json_dict():
    rep = lll_budget_report(0.01, 30)
    d = rep.to_json_dict()
    assert d["experiment"] == "lll-budget" and d["rng"] == RNG_ID
    assert set(d) == {"experiment", "seed", "trials", "estimates", "bounds",
                      "verdicts", "rng", "details"}
