"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line.  Run with `pytest tests/test_acceptance.py -v -s`."""

import json
import math
import time

import numpy as np

from qdeval import (
    BleuConfig,
    CategoricalDist,
    EnumSpec,
    OracleSpec,
    PenaltyConfig,
    bleu_expect,
    bleu_nsbleu_functionals,
    check_rationality,
    cnd,
    compatibility_analytic,
    compute_B,
    corpus_bleu,
    cr,
    cr_nrr,
    cr_se,
    divergence,
    expected_bleu_enumerate,
    expected_nsbleu_unigram,
    expected_selfbleu_enumerate,
    expected_unigram_bleu,
    frontier_point,
    gram_cr_nrr_functionals,
    ll_nrr,
    ll_se,
    maximize_combined,
    ngram_dist,
    nrr,
    oracle_enumerate,
    psi_n,
    qdisc_frontier,
    qdisc_penalty,
    random_toy,
    self_bleu,
    sweep,
    temper,
)
from qdeval.cli import main as cli_main
from qdeval.ngram_metrics import NGramDist
from qdeval.seeding import generator

from conftest import markov_sentences


def _report(criterion: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[{criterion}] {status}{suffix}")
    assert ok, f"{criterion} failed{suffix}"


def _random_dist(rng, lo=3, hi=50):
    return CategoricalDist(rng.random(int(rng.integers(lo, hi + 1))) + 1e-4)


def test_criterion_1_frontier_closed_form():
    p = random_toy(20, seed=7)
    pair = ll_se()
    started = time.perf_counter()
    worst = 0.0
    for w in np.linspace(-10.0, 0.0, 64):
        got = frontier_point(pair, p, float(w)).q.probs
        want = temper(p, -float(w)).probs
        worst = max(worst, float(np.max(np.abs(got - want))))
    elapsed = time.perf_counter() - started
    _report("criterion 1: frontier closed form",
            worst <= 1e-8 and elapsed < 1.0,
            f"max err {worst:.2e}, {elapsed:.2f}s")


def test_criterion_2_sweep_monotonicity_and_plateau():
    rng = generator(2001, "accept2")
    ok = True
    detail = ""
    for trial in range(50):
        p = _random_dist(rng)
        for pair in (ll_se(), cr_nrr()):
            sw = sweep(pair, p, 33)
            us = np.array([pt.u for pt in sw.points])
            vs = np.array([pt.v for pt in sw.points])
            # w decreases along the sweep; quality may never drop nor
            # diversity rise beyond 1e-10, and the ends must separate
            if np.any(np.diff(us) < -1e-10) or np.any(np.diff(vs) > 1e-10):
                ok, detail = False, f"direction violated ({pair.name})"
                break
            if not (us[-1] > us[0] and vs[-1] < vs[0]):
                ok, detail = False, f"endpoints not separated ({pair.name})"
                break
        if not ok:
            break

    plateau_worst = 0.0
    for trial in range(10):
        p = _random_dist(rng, 3, 12)
        pair = cr_nrr()
        bound = compute_B(pair, p)
        q_at = frontier_point(pair, p, bound).q.probs
        for factor in (1.5, 3.0):
            q = frontier_point(pair, p, bound * factor).q.probs
            plateau_worst = max(plateau_worst, float(np.max(np.abs(q - q_at))))
    ok = ok and plateau_worst < 1e-9
    _report("criterion 2: sweep monotonicity + plateau", ok,
            detail or f"plateau err {plateau_worst:.2e}")


def test_criterion_3_compatibility_verdicts():
    rng = generator(2002, "accept3")
    worst = 0.0
    for _ in range(100):
        p = _random_dist(rng)
        for pair in (ll_se(), cr_nrr()):
            worst = max(worst, qdisc_frontier(pair, p).qdisc)
    compat_ok = worst <= 1e-9

    toy = random_toy(20, seed=7)
    gap_ll_nrr = qdisc_frontier(ll_nrr(), toy).qdisc
    gap_cr_se = qdisc_frontier(cr_se(), toy).qdisc
    gaps_ok = gap_ll_nrr > 1e-4 and gap_cr_se > 1e-4

    ok_ll, w_, b_ll = compatibility_analytic(ll_se())
    # the affine-integral identity for log-quality/entropy-diversity is
    # g = -1 * F - 1 * x (the fit confirms b0 = -1; see the ledger)
    fit_ll = ok_ll and abs(w_ + 1.0) < 1e-8 and abs(b_ll + 1.0) < 1e-8
    ok_cr, w_cr, b_cr = compatibility_analytic(cr_nrr())
    fit_cr = ok_cr and abs(w_cr + 2.0) < 1e-8 and abs(b_cr) < 1e-8
    fit_bleu = (not compatibility_analytic(bleu_expect(2, 2))[0]) and \
        compatibility_analytic(bleu_expect(1, 2))[0]

    _report("criterion 3: compatibility",
            compat_ok and gaps_ok and fit_ll and fit_cr and fit_bleu,
            f"max compatible qdisc {worst:.1e}, ll-nrr gap {gap_ll_nrr:.4f}, "
            f"cr-se gap {gap_cr_se:.4f}")


def test_criterion_4_divergence_identities():
    rng = generator(2003, "accept4")
    pair = ll_se()
    worst_kl = 0.0
    for _ in range(100):
        n = int(rng.integers(3, 40))
        p = CategoricalDist(rng.random(n) + 1e-4)
        q = CategoricalDist(rng.random(n) + 1e-4)
        d = divergence(pair, q, p)
        rkl = float(np.sum(q.probs * np.log(q.probs / p.probs)))
        worst_kl = max(worst_kl, abs(d - 0.5 * rkl))

    worst_cnd = 0.0
    for _ in range(100):
        keys = [(i,) for i in range(12)]
        qv = rng.random(12)
        pv = rng.random(12)
        qg = NGramDist(1, {k: v for k, v in zip(keys[:9], qv[:9] / qv[:9].sum())}, 0)
        pg = NGramDist(1, {k: v for k, v in zip(keys[2:], pv[2:] / pv[2:].sum())}, 0)
        lhs = cnd(qg, pg)
        rhs = 3.0 * (psi_n(pg, pg) - psi_n(qg, pg))
        worst_cnd = max(worst_cnd, abs(lhs - rhs))
    _report("criterion 4: divergence identities",
            worst_kl < 1e-12 and worst_cnd < 1e-12,
            f"kl err {worst_kl:.1e}, cnd err {worst_cnd:.1e}")


def test_criterion_5_duality():
    p = random_toy(10, seed=17)
    cfg = PenaltyConfig(max_steps=20000, restarts=2, seed=0)
    worst = 0.0
    for pair in (ll_se(), cr_nrr()):
        for alpha in np.arange(0.1, 0.95, 0.1):
            w = alpha / (alpha - 1.0)
            got = maximize_combined(pair, p, float(alpha), cfg).probs
            want = frontier_point(pair, p, w).q.probs
            worst = max(worst, 0.5 * float(np.abs(got - want).sum()))
    _report("criterion 5: combined-objective duality", worst <= 1e-4,
            f"worst TV {worst:.2e}")


def test_criterion_6_expected_bleu_oracles():
    rng = generator(2004, "accept6")
    # closed forms against enumeration on single-token texts
    labels = tuple((i,) for i in range(8))
    q1 = CategoricalDist(rng.random(8) + 1e-3, labels=labels)
    p1 = CategoricalDist(rng.random(8) + 1e-3, labels=labels)
    cfg1 = BleuConfig(max_order=1)
    worst_closed = 0.0
    for n_refs in (1, 2, 3):
        enum = expected_bleu_enumerate(EnumSpec(q=q1, p=p1, m=1, n=n_refs,
                                                config=cfg1))
        closed = expected_unigram_bleu(q1, p1, n_refs)
        worst_closed = max(worst_closed, abs(enum - closed))
    enum_sb = expected_selfbleu_enumerate(q1, 2, cfg1)
    worst_closed = max(worst_closed,
                       abs(enum_sb + expected_nsbleu_unigram(q1, 2)))

    # enumeration against Monte-Carlo on the 4^3 oracle space
    p = oracle_enumerate(OracleSpec(4, 3, sigma=1.0, seed=4))
    q = oracle_enumerate(OracleSpec(4, 3, sigma=0.5, seed=5))
    cfg2 = BleuConfig(max_order=2)
    exact = expected_bleu_enumerate(EnumSpec(q=q, p=p, m=1, n=2, config=cfg2))
    draws = 100_000
    mc_rng = generator(2005, "accept6-mc")
    cand_idx = mc_rng.choice(q.n, p=q.probs, size=draws)
    ref_idx = mc_rng.choice(p.n, p=p.probs, size=(draws, 2))
    scores = np.empty(draws)
    for k in range(draws):
        scores[k] = corpus_bleu([q.labels[cand_idx[k]]],
                                [p.labels[ref_idx[k, 0]],
                                 p.labels[ref_idx[k, 1]]], cfg2)
    se = scores.std(ddof=1) / math.sqrt(draws)
    mc_gap = abs(scores.mean() - exact)

    exact_sb = expected_selfbleu_enumerate(q, 2, cfg2)
    pair_idx = mc_rng.choice(q.n, p=q.probs, size=(draws, 2))
    sb_scores = np.empty(draws)
    for k in range(draws):
        sb_scores[k] = self_bleu([q.labels[pair_idx[k, 0]],
                                  q.labels[pair_idx[k, 1]]], cfg2)
    sb_se = sb_scores.std(ddof=1) / math.sqrt(draws)
    sb_gap = abs(sb_scores.mean() - exact_sb)

    _report("criterion 6: expected-BLEU oracles",
            worst_closed < 1e-12 and mc_gap < 3 * se and sb_gap < 3 * sb_se,
            f"closed err {worst_closed:.1e}, MC {mc_gap:.2e} vs 3se "
            f"{3 * se:.2e}, selfMC {sb_gap:.2e} vs 3se {3 * sb_se:.2e}")


def test_criterion_7_synthetic_discrepancy_table():
    started = time.perf_counter()
    cfg = PenaltyConfig(max_steps=20000, restarts=8, seed=0)
    sigmas = (0.5, 1.0, 2.0)
    bs_best = {1: 0.0, 2: 0.0}
    cn_worst = 0.0
    for sigma in sigmas:
        p = oracle_enumerate(OracleSpec(4, 3, sigma=sigma, seed=4))
        for order in (1, 2):
            u_fn, v_fn = bleu_nsbleu_functionals(p, ref_count=2, cand_size=2,
                                                 max_order=order)
            rep = qdisc_penalty(u_fn, v_fn, p, cfg)
            bs_best[order] = max(bs_best[order], rep.qdisc)
        for order in (2, 3):
            u_fn, v_fn = gram_cr_nrr_functionals(p, order)
            rep = qdisc_penalty(u_fn, v_fn, p, cfg)
            cn_worst = max(cn_worst, rep.qdisc)
    elapsed = time.perf_counter() - started
    ok = bs_best[1] > 5e-3 and bs_best[2] > 5e-3 and cn_worst <= 1e-4 \
        and elapsed < 600
    _report("criterion 7: synthetic discrepancy table", ok,
            f"BS-1 best {bs_best[1]:.4f}, BS-2 best {bs_best[2]:.4f}, "
            f"CN worst {cn_worst:.1e}, {elapsed:.0f}s")


def test_criterion_8_complexity_scaling():
    sents = [tuple(s) for s in
             markov_sentences(16_000, seed=77, vocab=150, branch=12,
                              min_len=12, max_len=16)]
    cfg = BleuConfig(max_order=2)

    def time_cr_nrr(m):
        best = math.inf
        for _ in range(3):
            t0 = time.perf_counter()
            qg = ngram_dist(sents[:m], 2)
            pg = ngram_dist(sents[m:2 * m], 2)
            cr(qg, pg)
            nrr(qg)
            best = min(best, time.perf_counter() - t0)
        return best

    def time_self_bleu(m):
        best = math.inf
        for _ in range(2):
            t0 = time.perf_counter()
            self_bleu(sents[:m], cfg)
            best = min(best, time.perf_counter() - t0)
        return best

    cr_times = {m: time_cr_nrr(m) for m in (1000, 2000, 4000)}
    sb_times = {m: time_self_bleu(m) for m in (1000, 2000, 4000)}
    cr_r1 = cr_times[2000] / cr_times[1000]
    cr_r2 = cr_times[4000] / cr_times[2000]
    sb_r1 = sb_times[2000] / sb_times[1000]
    sb_r2 = sb_times[4000] / sb_times[2000]
    ok = cr_r1 <= 2.5 and cr_r2 <= 2.5 and sb_r1 >= 3.0 and sb_r2 >= 3.0
    _report("criterion 8: complexity scaling", ok,
            f"cr-nrr ratios {cr_r1:.2f}/{cr_r2:.2f} (<=2.5), "
            f"self-bleu ratios {sb_r1:.2f}/{sb_r2:.2f} (>=3)")


def test_criterion_9_epsilon_sweep_shape(big_corpus_files, tmp_path, capsys):
    cand_path, ref_path = big_corpus_files
    out = tmp_path / "sweep.csv"
    rc = cli_main(["sweep-epsilon", "--candidates", cand_path,
                   "--refs", ref_path, "--ngram", "3",
                   "--epsilons", "0.0,0.2,0.4,0.6", "--noise-len", "5,max",
                   "--samples", "50000", "--selfbleu-cap", "1000",
                   "--seed", "7", "--out", str(out)])
    payload = json.loads(capsys.readouterr().out)
    assert rc == 0

    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    by_noise_len: dict = {}
    for r in rows:
        by_noise_len.setdefault(r[0], []).append((float(r[4]), float(r[5])))
    monotone = True
    for pts in by_noise_len.values():
        crs = [u for u, _ in pts]
        nrrs = [v for _, v in pts]
        monotone = monotone and all(a > b for a, b in zip(crs, crs[1:])) \
            and all(a < b for a, b in zip(nrrs, nrrs[1:]))

    cn = payload["reports"]["cr-nrr"]["selected"]
    bs = payload["reports"]["bleu-nsbleu"]["selected"]
    has_ratios = cn["self_ratio"] is not None and cn["ref_ratio"] is not None
    drate_ordered = cn["drate"] < bs["drate"]
    first = by_noise_len[rows[0][0]]
    _report("criterion 9: noise-sweep shape",
            monotone and drate_ordered and has_ratios,
            f"CR {first[0][0]:.2e}->{first[-1][0]:.2e}, DRate cn "
            f"{cn['drate']:.4f} < bs {bs['drate']:.4f}")


def test_criterion_10_rationality_perturbations():
    ok = True
    for pair in (ll_se(), cr_nrr()):
        report = check_rationality(pair, grid_size=64,
                                   n_perturbations=10_000, seed=11)
        ok = ok and report.passed
    _report("criterion 10: rationality perturbations", ok,
            "10k mass shifts per pair, zero violations" if ok else "violations")
