"""Seeded Monte Carlo estimators for the pipeline's probabilistic ingredients.

Every estimator draws from a named generator (numpy PCG64, recorded in each
report) and returns an ExperimentReport carrying empirical estimates with
standard errors next to the theoretical bounds they are compared against.
Hard pass/fail verdicts are only attached where an exact finite probability
is forced (uniformity over distinct subset sums, exact budget arithmetic);
asymptotic claims are reported with verdict "info".
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .pipeline import BlockPlan, is_acceptable, is_boundary_safe, lll_dependency_degree
from .structure import Decomposition
from .zk import GroundSet

RNG_ID = "numpy:PCG64"
CSV_COLUMNS = ("experiment", "seed", "trials", "estimate", "stderr", "bound", "verdict")

_CHUNK = 100_000


@dataclass
class ExperimentReport:
    experiment: str
    seed: int
    trials: int
    estimates: dict          # name -> {"estimate": float, "stderr": float}
    bounds: dict             # name -> float or None
    verdicts: dict           # name -> pass | fail | info
    rng: str = RNG_ID
    details: dict = field(default_factory=dict)

    def csv_rows(self) -> list:
        rows = []
        for name, est in self.estimates.items():
            label = self.experiment if len(self.estimates) == 1 else f"{self.experiment}:{name}"
            bound = self.bounds.get(name)
            rows.append((label, self.seed, self.trials,
                         est["estimate"], est["stderr"],
                         "" if bound is None else bound,
                         self.verdicts.get(name, "info")))
        return rows

    def to_json_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "trials": self.trials,
            "estimates": self.estimates,
            "bounds": self.bounds,
            "verdicts": self.verdicts,
            "rng": self.rng,
            "details": self.details,
        }


def write_reports_csv(reports, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for report in reports:
            for row in report.csv_rows():
                w.writerow(row)


def _stderr(q: float, trials: int) -> float:
    if trials <= 0:
        return 0.0
    return math.sqrt(q * (1.0 - q) / trials)


def estimate_anticoncentration(D: GroundSet, I, x: int, trials: int,
                               seed: int = 0) -> ExperimentReport:
    """Empirical P(sum over quarters I of a uniform 4-partition of D hits x),
    against the exact-uniform bound 1/C(|D|, |D|*|I|/4).

    The union of the selected quarters is a uniform (|D|*|I|/4)-subset, so the
    event is simulated by summing a uniform random m-subset per trial.
    """
    elems = D.sorted()
    d = len(elems)
    if d == 0 or d % 4 != 0:
        raise ValueError("anticoncentration needs a nonempty block of size divisible by 4")
    I = sorted(set(I))
    if not I or any(i not in (1, 2, 3, 4) for i in I) or len(I) == 4:
        raise ValueError("I must be a proper nonempty subset of {1,2,3,4}")
    if trials < 1:
        raise ValueError("trials must be positive")
    k = D.k
    m = d * len(I) // 4
    target = x % k
    arr = np.array(elems, dtype=np.int64)
    rng = np.random.Generator(np.random.PCG64(seed))
    hits = 0
    done = 0
    while done < trials:
        batch = min(_CHUNK, trials - done)
        idx = np.argsort(rng.random((batch, d)), axis=1)[:, :m]
        sums = arr[idx].sum(axis=1) % k
        hits += int((sums == target).sum())
        done += batch
    q = hits / trials
    bound = 1.0 / math.comb(d, m)
    se = _stderr(q, trials)
    verdict = "pass" if q <= bound + 5.0 * se else "fail"
    return ExperimentReport(
        experiment="anticoncentration", seed=seed, trials=trials,
        estimates={"p_hat": {"estimate": q, "stderr": se}},
        bounds={"p_hat": bound},
        verdicts={"p_hat": verdict},
        details={"k": k, "block_size": d, "I": I, "x": target, "m": m,
                 "hits": hits})


def estimate_acceptability(decomp: Decomposition, pn, K: int, trials: int,
                           seed: int = 0) -> ExperimentReport:
    """Fraction of uniform sigma_1 draws whose induced first quarter t_1 is
    acceptable; reported against 0.99 (informational at desk scale)."""
    if decomp.s < 1:
        raise ValueError("acceptability needs at least one block")
    if trials < 1:
        raise ValueError("trials must be positive")
    k = decomp.k
    elems = sorted(decomp.blocks[0])
    q1 = len(elems) // 4 + (1 if len(elems) % 4 >= 1 else 0)
    rng = np.random.Generator(np.random.PCG64(seed))
    hits = 0
    for _ in range(trials):
        perm = rng.permutation(len(elems))
        t1 = [elems[i] for i in perm[:q1]]
        if is_acceptable(t1, "first", K, pn.p_order, pn.n_order, pn.delta, k):
            hits += 1
    q = hits / trials
    se = _stderr(q, trials)
    return ExperimentReport(
        experiment="acceptability", seed=seed, trials=trials,
        estimates={"accept_rate": {"estimate": q, "stderr": se}},
        bounds={"accept_rate": 0.99},
        verdicts={"accept_rate": "pass" if q >= 0.99 else "info"},
        details={"k": k, "K": K, "block_size": len(elems), "quarter": q1,
                 "hits": hits})


def estimate_permissible_density(left_block, right_block, K: int, trials: int,
                                 seed: int = 0, k: int | None = None) -> ExperimentReport:
    """Fraction of uniform independent ordering pairs passing is_boundary_safe."""
    if k is None:
        raise ValueError("k is required")
    if trials < 1:
        raise ValueError("trials must be positive")
    left = sorted(left_block)
    right = sorted(right_block)
    rng = np.random.Generator(np.random.PCG64(seed))
    hits = 0
    for _ in range(trials):
        lp = [left[i] for i in rng.permutation(len(left))]
        rp = [right[i] for i in rng.permutation(len(right))]
        if is_boundary_safe(lp, rp, K, k):
            hits += 1
    q = hits / trials
    se = _stderr(q, trials)
    return ExperimentReport(
        experiment="permissible-density", seed=seed, trials=trials,
        estimates={"density": {"estimate": q, "stderr": se}},
        bounds={"density": None},
        verdicts={"density": "info"},
        details={"k": k, "K": K, "left_size": len(left), "right_size": len(right),
                 "hits": hits})


def lll_budget_report(p_hat: float, degree: int | None = None, *,
                      plan: BlockPlan | None = None, t: int | None = None,
                      seed: int = 0) -> ExperimentReport:
    """e * P * D <= 1 budget check; D supplied directly or computed exactly
    from a plan via lll_dependency_degree."""
    if not (0.0 <= p_hat <= 1.0):
        raise ValueError("p_hat must be in [0, 1]")
    if (degree is None) == (plan is None):
        raise ValueError("pass exactly one of degree or plan")
    if plan is not None:
        if t is None:
            raise ValueError("t is required with a plan")
        degree = lll_dependency_degree(plan, t)
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    value = math.e * p_hat * degree
    return ExperimentReport(
        experiment="lll-budget", seed=seed, trials=0,
        estimates={"e_p_d": {"estimate": value, "stderr": 0.0}},
        bounds={"e_p_d": 1.0},
        verdicts={"e_p_d": "pass" if value <= 1.0 else "fail"},
        details={"p_hat": p_hat, "degree": degree})


def union_bound_report(a_size: int, R: int, estimates: dict,
                       seed: int = 0) -> ExperimentReport:
    """|A|^2 * P_II + |A|^2 * P_I from supplied empirical interval-event rates;
    informational verdict against 1."""
    if a_size < 0:
        raise ValueError("a_size must be nonnegative")
    p1 = float(estimates.get("type_i", 0.0))
    p2 = float(estimates.get("type_ii", 0.0))
    if not (0.0 <= p1 <= 1.0 and 0.0 <= p2 <= 1.0):
        raise ValueError("estimates must be probabilities")
    total = a_size * a_size * p2 + a_size * a_size * p1
    return ExperimentReport(
        experiment="union-bound", seed=seed, trials=0,
        estimates={"failure_bound": {"estimate": total, "stderr": 0.0}},
        bounds={"failure_bound": 1.0},
        verdicts={"failure_bound": "pass" if total < 1.0 else "fail"},
        details={"a_size": a_size, "R": R, "type_i": p1, "type_ii": p2})
