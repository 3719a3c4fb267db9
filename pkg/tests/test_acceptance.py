"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python tests/test_acceptance.py``. Sample sizes and tolerances are the
full ones; expect a few minutes on one core.
"""

import math
import sys
import time

import numpy as np
import pytest
from scipy import stats

from entangle_mc import experiments as ex
from entangle_mc.gates import parse_gate
from entangle_mc.measures import concurrence, eof_from_concurrence, is_ppt_separable
from entangle_mc.sampling import RngStream, haar_unitary, sample_mixed_batch

SEED = 20240601
PURE_MEAN = 1 / (3 * math.log(2))


def _report(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    print(line)
    return ok


def check_1():
    start = time.perf_counter()
    acc = ex.survey("pure", (), 10**6, SEED)
    wall = time.perf_counter() - start
    mean = acc["mean_E0"].mean
    ok = abs(mean - PURE_MEAN) <= 0.005 and wall < 300
    return ok, f"pure <E> = {mean:.5f} (target {PURE_MEAN:.5f} +- 0.005), {wall:.1f}s (< 300s)"


def check_2():
    acc = ex.survey("all", (), 10**6, SEED)
    mean = acc["mean_E0"].mean
    return abs(mean - 0.03) <= 0.01, f"all-states <E> = {mean:.5f} (target 0.03 +- 0.01)"


def check_3():
    res = ex.run_figure(ex.ExperimentConfig("fig1b", samples=10**5, seed=SEED))
    c = res.scalars["mean_EF_from_E0_zero_cnot"].value
    p = res.scalars["mean_EF_from_E0_zero_theta_pi_4"].value
    ok = abs(c - 0.0052) <= 0.002 and abs(p - 0.0023) <= 0.001
    return ok, f"<E_F> from E=0: CNOT {c:.5f} (0.0052 +- 0.002), pi/4 {p:.5f} (0.0023 +- 0.001)"


def check_4():
    res = ex.run_figure(
        ex.ExperimentConfig("fig2", gates=("cnot", "theta:pi/4"), ensembles=("pure",), samples=10**6, seed=SEED)
    )
    x = res.scalars["crossing_E0_pure_cnot_vs_theta_pi_4"].value
    top = res.scalars["top_bin_EF_pure_theta_pi_4"]
    ok = (not math.isnan(x)) and abs(x - 0.53) <= 0.05 and abs(top.value - 0.738) <= 0.02
    return ok, (f"pure crossing E0 = {x:.4f} (0.53 +- 0.05); pi/4 top-bin <E_F> = {top.value:.4f} "
                f"(0.738 +- 0.02, n={top.n})")


def check_5():
    rng = RngStream(SEED, 0, channel=5).generator()
    v = rng.standard_normal((10**4, 4))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    a, b, c, d = v.T
    rho = v[:, :, None] * v[:, None, :]
    expected = {
        None: 4 * (a * d - b * c) ** 2,
        "cnot": 4 * (a * c - b * d) ** 2,
        "theta:pi/2": 4 * (a * c + b * d) ** 2,
        "theta:pi/4": 2 * (a**2 + b**2) * (c**2 + d**2) + 4 * ((-(a**2) + b**2) * c * d + (c**2 - d**2) * a * b),
    }
    worst = 0.0
    for name, c2 in expected.items():
        u = np.eye(4) if name is None else parse_gate(name).matrix
        got = concurrence(u @ rho @ u.conj().T)
        # compare concurrences, C = sqrt(C^2) of the analytic expression
        worst = max(worst, float(np.max(np.abs(got - np.sqrt(np.maximum(c2, 0.0))))))
        worst = max(worst, float(np.max(np.abs(got**2 - c2))))
    return worst <= 1e-9, f"max |pipeline - analytic| over 4 formulas, 10^4 states = {worst:.2e} (<= 1e-9)"


def check_6():
    details, ok = [], True
    for ens in ("all", "pure"):
        acc = ex.survey(ens, ("theta:0",), 10**5, SEED)
        h = acc["hist_dE/theta_0"]
        zero = h.counts[h.axis.bin_of(0.0)]
        exact = acc["mean_dE/theta_0"].sum2 == 0.0
        ok &= zero == h.total and exact
        details.append(f"{ens}: {zero}/{h.total} in the zero bin, sum dE^2 = {acc['mean_dE/theta_0'].sum2}")
    return ok, "theta=0 " + "; ".join(details)


def check_7():
    n = 10**5
    before = eof_from_concurrence(sample_mixed_batch(RngStream(SEED, 0, channel=7).generator(), n).concurrence())
    u = haar_unitary(RngStream(SEED, 1, channel=7).generator())
    batch = sample_mixed_batch(RngStream(SEED, 2, channel=7).generator(), n)
    after = eof_from_concurrence(batch.concurrence(u))
    res = stats.ks_2samp(before, after)
    return res.pvalue > 0.01, f"KS D = {res.statistic:.4f}, p = {res.pvalue:.3f} (> 0.01), 10^5 per side"


def check_8():
    batch = sample_mixed_batch(RngStream(SEED, 0, channel=8).generator(), 10**5)
    rho = batch.matrices()
    c = concurrence(rho)
    ppt = is_ppt_separable(rho)
    disagree = int(np.sum(ppt != (c == 0.0)))
    return disagree == 0, f"{disagree} disagreements between C = 0 and PPT over 10^5 states ({int(ppt.sum())} PPT)"


def check_9():
    res = ex.run_figure(ex.ExperimentConfig("fig6", seed=SEED))
    m14 = res.scalars["max_mean_E0_R_1.4_cnot"].value
    m22 = res.scalars["max_mean_E0_R_2.2_cnot"].value
    lm14 = res.scalars["origin_variance_is_local_max_R_1.4_cnot"].value == 1.0
    lm22 = res.scalars["origin_variance_is_local_max_R_2.2_cnot"].value == 1.0
    ok = m22 < m14 and lm14 and lm22
    return ok, (f"max <E0>: R=2.2 {m22:.4f} < R=1.4 {m14:.4f}; variance local max at dE=0: "
                f"R=1.4 {lm14}, R=2.2 {lm22}")


def check_10():
    res = ex.run_figure(ex.ExperimentConfig("fig3b", ensembles=("all", "pure"), samples=10**6, seed=SEED))
    s = res.scalars
    ok, parts = True, []
    for g in ("cnot", "theta_pi_4"):
        za, zp = s[f"zero_bin_mass_all_{g}"].value, s[f"zero_bin_mass_pure_{g}"].value
        ok &= za > zp
        parts.append(f"{g} zero-bin mass all {za:.4f} > pure {zp:.4f}")
    mean = s["mean_dE_all_cnot"]
    ok &= mean.value <= 3 * mean.stderr
    parts.append(f"mean dE (all, CNOT) = {mean.value:.2e} <= 3 sigma = {3 * mean.stderr:.2e}")
    return ok, "; ".join(parts)


def check_11():
    cfg = ex.ExperimentConfig("fig3a", samples=50000, seed=SEED)
    a, b = ex.run_figure(cfg), ex.run_figure(cfg)
    same = all(np.array_equal(a.histograms[k].counts, b.histograms[k].counts) for k in a.histograms)
    same &= repr(a.scalars) == repr(b.scalars)
    task = ex.SurveyTask("all", (parse_gate("cnot"),), SEED)
    single = ex.map_reduce(task, 40000, block_size=4096)
    shards_ok = True
    for k in (2, 3, 7):
        parts = [p for shard in range(k) for p in ex.run_shard(task, 40000, 4096, shard, k)]
        merged = ex.merge_parts(parts, task.empty())
        shards_ok &= all(
            np.array_equal(single[key].counts, merged[key].counts) for key in single if hasattr(single[key], "counts")
        )
        shards_ok &= single["mean_dE/cnot"].sum1 == merged["mean_dE/cnot"].sum1
    pooled = ex.map_reduce(task, 40000, block_size=4096, workers=2)
    shards_ok &= np.array_equal(single["hist_dE/cnot"].counts, pooled["hist_dE/cnot"].counts)
    return same and shards_ok, f"repeat runs identical: {same}; 2/3/7-shard and 2-process merges exact: {shards_ok}"


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8, check_9, check_10, check_11]


@pytest.mark.slow
@pytest.mark.parametrize("number", range(1, 12))
def test_criterion(number, capsys):
    ok, detail = CHECKS[number - 1]()
    with capsys.disabled():
        print()
        _report(number, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    results = [_report(i, *check()) for i, check in enumerate(CHECKS, 1)]
    sys.exit(0 if all(results) else 1)
