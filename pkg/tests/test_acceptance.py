"""Acceptance suite: eleven criteria, one pass/fail line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; every criterion is also a hard assertion.
"""

import itertools
import json
import math
import sys

import numpy as np
import pytest

from privmrf._rng import trial_seed
from privmrf.cli import main as cli_main
from privmrf.learners import learn_ising, learn_mrf_linf, learn_pairwise, node_monomials, monomial_features
from privmrf.models import (
    IsingModel,
    delta_unbiased_bound,
    matched_pairs_edges,
    matched_pairs_ising,
    model_to_json,
)
from privmrf.oracle import (
    enumerate_states,
    exact_conditional,
    exact_distribution,
    exact_parity,
)
from privmrf.pfw import (
    FWConfig,
    LogisticProblem,
    PolytopeConstraint,
    logistic_gradient,
    logistic_loss,
    private_frank_wolfe,
    sparse_logistic_fit,
)
from privmrf.polynomial import MultilinearPolynomial
from privmrf.privacy import (
    Accountant,
    frank_wolfe_noise_scale,
    pure_to_zcdp,
    zcdp_to_approx,
)
from privmrf.query_release import ParityTable, empirical_parities, parity_queries, pmw_release
from privmrf.sampler import Dataset, exact_sample
from privmrf.structure import (
    GraphEstimate,
    StabilityConfig,
    base_structure,
    mode_margin,
    stable_mode_structure,
)

from conftest import random_ising, random_mrf, random_pairwise


def _report(num: int, desc: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    extra = f" ({detail})" if detail else ""
    print(f"[criterion {num:02d}] {status}: {desc}{extra}", file=sys.stderr, flush=True)
    assert ok, f"criterion {num} failed: {desc}{extra}"


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _model_sets():
    rng = np.random.default_rng(1001)
    ising = [random_ising(rng, int(rng.integers(2, 6)), width=2.0) for _ in range(50)]
    pairwise = [random_pairwise(rng, int(rng.integers(2, 5)), 3, width=2.0) for _ in range(50)]
    mrf = [random_mrf(rng, int(rng.integers(3, 6)), 3, width=2.0) for _ in range(50)]
    return ising, pairwise, mrf


MODEL_SETS = _model_sets()


def test_criterion_01_conditional_law_equivalence():
    worst = 0.0
    ising, pairwise, mrf = MODEL_SETS
    for m in ising:
        dist = exact_distribution(m)
        rest = enumerate_states(m.p - 1, 2)
        for i in range(1, m.p + 1):
            others = [j for j in range(m.p) if j != i - 1]
            for x in rest:
                logit = 2.0 * (m.A[i - 1, others] @ x + m.theta[i - 1])
                want = _sigmoid(logit)
                got = exact_conditional(m, i, 1, x.tolist(), dist)
                worst = max(worst, abs(got - want))
                worst = max(worst, abs(exact_conditional(m, i, -1, x.tolist(), dist) - (1.0 - want)))
    for m in pairwise:
        dist = exact_distribution(m)
        rest = enumerate_states(m.p - 1, m.k, signed=False)
        for i in range(1, m.p + 1):
            others = [j for j in range(1, m.p + 1) if j != i]
            for x in rest:
                scores = m.Theta[i - 1].copy()
                for c, j in enumerate(others):
                    scores += m.weight(i, j)[:, x[c] - 1]
                probs = np.exp(scores - scores.max())
                probs /= probs.sum()
                for a in range(1, m.k + 1):
                    got = exact_conditional(m, i, a, x.tolist(), dist)
                    worst = max(worst, abs(got - probs[a - 1]))
    for m in mrf:
        dist = exact_distribution(m)
        rest = enumerate_states(m.p - 1, 2)
        for i in range(1, m.p + 1):
            d_i = m.h.partial_derivative((i,))
            for x in rest:
                z = np.insert(x, i - 1, 1)
                want = _sigmoid(2.0 * d_i.evaluate(z.tolist()))
                got = exact_conditional(m, i, 1, x.tolist(), dist)
                worst = max(worst, abs(got - want))
    _report(1, "closed-form conditionals match the enumeration oracle to 1e-10",
            worst <= 1e-10, f"worst |diff| = {worst:.2e}")


def test_criterion_02_delta_unbiasedness():
    worst_margin = math.inf
    for family in MODEL_SETS:
        for m in family:
            bound = delta_unbiased_bound(m)
            dist = exact_distribution(m)
            k = m.k
            signed = m.__class__.__name__ != "PairwiseModel" and k == 2
            rest = enumerate_states(m.p - 1, k, signed=signed)
            symbols = (-1, 1) if signed else range(1, k + 1)
            for i in range(1, m.p + 1):
                for x in rest:
                    for v in symbols:
                        pr = exact_conditional(m, i, v, x.tolist(), dist)
                        worst_margin = min(worst_margin, pr - bound)
    _report(2, "every conditional clears the e^{-2 lambda}/k floor",
            worst_margin >= -1e-12, f"worst margin = {worst_margin:.2e}")


def test_criterion_03_matched_pairs_exactness():
    worst = 0.0
    for eta in (0.0, 0.5, math.log(2.0)):
        m = matched_pairs_ising(2, eta)
        dist = exact_distribution(m)
        agree = 0.5 * math.exp(eta) / (math.exp(eta) + 1.0)
        disagree = 0.5 / (math.exp(eta) + 1.0)
        worst = max(worst, abs(dist.probs[0] - agree), abs(dist.probs[3] - agree),
                    abs(dist.probs[1] - disagree), abs(dist.probs[2] - disagree))
        parity = (math.exp(eta) - 1.0) / (math.exp(eta) + 1.0)
        worst = max(worst, abs(exact_parity(m, (1, 2), dist) - parity))
    _report(3, "matched-pairs cells and pair parity match the closed forms to 1e-12",
            worst <= 1e-12, f"worst |diff| = {worst:.2e}")


def test_criterion_04_frank_wolfe():
    rng = np.random.default_rng(1004)
    ok_gap, ok_feas, ok_grad, ok_charge = True, True, True, True
    for _ in range(20):
        X = rng.uniform(-1, 1, size=(25, 2))
        y = rng.choice([-1.0, 1.0], size=25)
        problem = LogisticProblem(X, y)
        radius, T = 1.0, 200
        gamma = radius**2
        cfg = FWConfig(T=T, L1=2.0, gamma_curv=gamma, rho=0.0, non_private=True)
        w = private_frank_wolfe(problem, PolytopeConstraint(radius), cfg)
        ok_feas &= np.sum(np.abs(w)) <= radius + 1e-9
        grid = np.linspace(-radius, radius, 401)
        best = min(
            logistic_loss(problem, np.array([a, b]))
            for a in grid
            for b in np.linspace(-(radius - abs(a)), radius - abs(a), 21)
        )
        ok_gap &= logistic_loss(problem, w) <= best + 4.0 * gamma / (T + 2.0) + 1e-3
        wp = rng.normal(size=2)
        g = logistic_gradient(problem, wp)
        h = 1e-5
        for j in range(2):
            e = np.zeros(2)
            e[j] = h
            fd = (logistic_loss(problem, wp + e) - logistic_loss(problem, wp - e)) / (2 * h)
            ok_grad &= abs(g[j] - fd) <= 1e-6 * max(1.0, abs(fd))
    acct = Accountant(1.0)
    X = rng.uniform(-1, 1, size=(50, 3))
    y = rng.choice([-1.0, 1.0], size=50)
    cfg = FWConfig(T=30, L1=2.0, gamma_curv=1.0, rho=0.25, seed=3)
    private_frank_wolfe(LogisticProblem(X, y), PolytopeConstraint(1.0), cfg, acct)
    ok_charge = acct.ledger == [("frank-wolfe", 0.25)]
    ok = ok_gap and ok_feas and ok_grad and ok_charge
    _report(4, "Frank-Wolfe rate, gradients, feasibility, single budget charge", ok,
            f"gap={ok_gap} grad={ok_grad} feasible={ok_feas} charge={ok_charge}")


def test_criterion_05_privacy_calculus():
    ok = (
        pure_to_zcdp(1.0) == 0.5
        and abs(zcdp_to_approx(0.5, math.exp(-2.0)) - 2.5) < 1e-12
        and abs(frank_wolfe_noise_scale(2.0, 2.0, 4, 100, 1.0) - 0.08) < 1e-15
    )
    acct = Accountant(1.0)
    acct.spend("a", 0.3)
    acct.spend("b", 0.45)
    ok = ok and abs(acct.spent - 0.75) < 1e-12 and abs(acct.remaining - 0.25) < 1e-12
    _report(5, "conversion constants, Laplace scale, additive composition", ok)


def test_criterion_06_ising_end_to_end():
    m = matched_pairs_ising(8, 0.6)
    rho, lam = 5.0, 1.0
    hits = 0
    for seed in range(10):
        d = exact_sample(m, 50_000, seed=trial_seed(606, seed))
        est = learn_ising(d, lam, rho, Accountant(rho), seed=seed)
        if np.max(np.abs(est.A_hat - m.A)) <= 0.25:
            hits += 1
    med = {}
    for n in (1_000, 100_000):
        errs = []
        for seed in range(5):
            d = exact_sample(m, n, seed=trial_seed(607, n, seed))
            est = learn_ising(d, lam, rho, Accountant(rho), seed=seed)
            errs.append(np.max(np.abs(est.A_hat - m.A)))
        med[n] = float(np.median(errs))
    trend = med[100_000] < med[1_000]
    _report(6, "private Ising recovery at n=5e4 and n-consistency trend",
            hits >= 7 and trend,
            f"hits={hits}/10, median(1e3)={med[1_000]:.3f}, median(1e5)={med[100_000]:.3f}")


def test_criterion_07_pairwise_k2_equivalence():
    m = matched_pairs_ising(4, 1.0, theta=[0.1, -0.1, 0.2, 0.0])
    hits = 0
    worst_seen = []
    for seed in range(10):
        d = exact_sample(m, 100_000, seed=trial_seed(707, seed))
        ising = learn_ising(d, 1.0, 0.0, seed=seed, non_private=True, T_override=800)
        # map to symbols: +1 -> 1, -1 -> 2 (pair (1,2) labels +1 exactly when z = +1)
        sym = np.where(d.rows == 1, 1, 2)
        d2 = Dataset(4, 2, sym)
        pw = learn_pairwise(d2, 2, 1.0, 0.0, seed=seed, non_private=True, T_override=800)
        worst = max(
            abs(pw.W_hat[(i, j)][0, 0] - ising.A_hat[i - 1, j - 1])
            for i in range(1, 5)
            for j in range(i + 1, 5)
        )
        worst_seen.append(worst)
        if worst <= 0.1:
            hits += 1
    _report(7, "pairwise learner at k=2 reproduces the Ising edge estimates",
            hits >= 8, f"hits={hits}/10, median diff={np.median(worst_seen):.3f}")


def test_criterion_08_linf_readback_identity():
    rng = np.random.default_rng(1008)
    worst = 0.0
    for trial in range(5):
        m = random_mrf(rng, 5, 3, width=1.5)
        dist = exact_distribution(m)
        table = ParityTable(3, {q: exact_parity(m, q, dist) for q in parity_queries(5, 3)})
        d = exact_sample(m, 2_000, seed=trial)
        seed = 800 + trial
        est = learn_mrf_linf(d, 3, 1.5, 0.0, seed=seed, non_private=True,
                             T_override=40, qhat=table)
        # reconstruct each node fit and compare the read-back against the
        # enumeration value of E[d_I v_i(X)]
        n1 = d.n // 2
        fit_rows = d.rows[:n1].astype(float)
        states = enumerate_states(5, 2)
        for i in range(1, 6):
            monos = node_monomials(5, i, 3)
            problem = LogisticProblem(monomial_features(fit_rows, monos), fit_rows[:, i - 1])
            w = sparse_logistic_fit(problem, 3.0, 0.0, T_override=40,
                                    seed=trial_seed(seed, "mrf-node", i),
                                    non_private=True, label=f"mrf-node-{i}")
            v_i = MultilinearPolynomial(5, {mono: 0.5 * w[c] for c, mono in enumerate(monos)})
            for mono in monos:
                target = tuple(sorted(mono + (i,)))
                if min(target) != i:
                    continue
                deriv = v_i.partial_derivative(mono)
                expect = sum(
                    dist.probs[s] * deriv.evaluate(states[s].tolist())
                    for s in range(states.shape[0])
                )
                worst = max(worst, abs(est.u.coefficient(target) - expect))
    _report(8, "exact-parity read-back equals enumeration of E[d_I v_i(X)]",
            worst <= 1e-10, f"worst |diff| = {worst:.2e}")


def test_criterion_09_pmw_calibration():
    m = matched_pairs_ising(8, 0.6)
    hits = 0
    for seed in range(10):
        d = exact_sample(m, 5_000, seed=trial_seed(909, seed))
        truth = empirical_parities(d, 2)
        rel = pmw_release(d, 2, 2.0, Accountant(2.0), rounds=40, seed=seed)
        err = max(abs(rel.table.value(q) - truth.value(q)) for q in parity_queries(8, 2))
        if err <= 0.1:
            hits += 1
    d = exact_sample(m, 3_000, seed=1)
    truth = empirical_parities(d, 2)
    queries = parity_queries(8, 2)
    rel = pmw_release(d, 2, 0.0, rounds=len(queries), seed=1, non_private=True)
    exact_ok = all(abs(rel.table.value(q) - truth.value(q)) <= 1e-12 for q in queries)
    _report(9, "noisy parity release accurate in >= 8/10 seeds; zero-noise exact",
            hits >= 8 and exact_ok, f"hits={hits}/10, exact={exact_ok}")


def test_criterion_10_structure_learning():
    # (a) mock-base release probabilities
    eps, delta = 1.0, math.exp(-5.0)
    cfg = StabilityConfig(eps=eps, delta=delta, blocks=24)
    data = Dataset(2, 2, np.ones((24, 2), dtype=int))
    g = GraphEstimate(2, frozenset({(1, 2)}))
    released = sum(
        stable_mode_structure(data, lambda b: g, cfg, seed=s).released
        for s in range(10_000)
    )
    rel_rate = released / 10_000
    ci = 4.0 * math.sqrt(0.25 / 10_000)
    ok_a1 = rel_rate >= 1.0 - delta - ci

    g2 = GraphEstimate(2, frozenset())
    bottoms = 0
    for s in range(10_000):
        calls = itertools.count()
        base = lambda b, c=calls: g if next(c) % 2 == 0 else g2
        bottoms += not stable_mode_structure(data, base, cfg, seed=s).released
    ok_a2 = bottoms / 10_000 >= 0.99

    # (b) exhaustive single-row perturbation on a 30-row fixture
    rng = np.random.default_rng(1010)
    rows = rng.choice([-1, 1], size=(30, 2))

    def margin(r):
        size = 30 // 10
        encs = []
        for b in range(10):
            block = r[b * size : (b + 1) * size]
            enc = "1-2" if block[:, 0].sum() >= 0 else ""
            encs.append(enc)
        return mode_margin(encs)[1]

    d0 = margin(rows)
    ok_b = all(
        abs(margin(np.concatenate([rows[:r], [[v, rows[r, 1]]], rows[r + 1:]])) - d0) <= 1.0
        for r in range(30)
        for v in (-1, 1)
    )

    # (c) end-to-end private recovery of the p=10 matching
    m = matched_pairs_ising(10, 0.8)  # couplings 0.4
    truth = frozenset(matched_pairs_edges(10))
    cfg_e = StabilityConfig(eps=2.0, delta=1e-6)
    blocks = cfg_e.effective_blocks()
    n = blocks * 20_000
    hits = 0
    for seed in range(10):
        d = exact_sample(m, n, seed=trial_seed(1010, seed))
        base = lambda b: base_structure(b, "ising", 1.0, eta=0.4, seed=seed, fit_iters=100)
        out = stable_mode_structure(d, base, cfg_e, seed=seed)
        if out.released and out.edges == truth:
            hits += 1
    ok = ok_a1 and ok_a2 and ok_b and hits >= 8
    _report(10, "PTR release rates, sensitivity bound, end-to-end recovery", ok,
            f"release={rel_rate:.4f} bottom={bottoms / 10_000:.4f} perturb={ok_b} hits={hits}/10")


def test_criterion_11_determinism_replay(tmp_path):
    model_path = tmp_path / "model.json"
    model_path.write_text(json.dumps(model_to_json(matched_pairs_ising(4, 1.0))))
    spec = {
        "fixture": {"name": "matched_pairs", "p": 4, "eta": 1.0},
        "task": "parameters",
        "privacy": {"kind": "zcdp", "rho": 4.0},
        "grid": [500, 1500],
        "trials": 2,
        "lambda": 2.0,
        "alpha": 0.4,
        "master_seed": 11,
    }
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec))

    def run(tag):
        base = tmp_path / tag
        base.mkdir()
        data = base / "data.csv"
        cli_main(["sample", "--model", str(model_path), "--n", "3000", "--seed", "4",
                  "--out", str(data)])
        cli_main(["learn-ising", "--data", str(data), "--lambda", "2.0", "--rho", "1.0",
                  "--seed", "4", "--out", str(base / "ising.json")])
        cli_main(["learn-mrf", "--data", str(data), "--t", "2", "--lambda", "2.0",
                  "--rho", "1.0", "--seed", "4", "--objective", "linf",
                  "--out", str(base / "mrf.json")])
        cli_main(["release-parities", "--data", str(data), "--t", "2", "--rho", "1.0",
                  "--seed", "4", "--out", str(base / "par.json")])
        cli_main(["experiment", "--spec", str(spec_path), "--out", str(base / "results.csv"),
                  "--emit-plot-data", "--no-figures"])
        return {
            name: (base / name).read_bytes()
            for name in ("data.csv", "ising.json", "mrf.json", "par.json",
                         "results.csv", "results_curve.csv")
        }

    a, b = run("a"), run("b")
    mismatched = [name for name in a if a[name] != b[name]]
    _report(11, "CLI and experiment outputs replay byte-identically",
            not mismatched, f"mismatched={mismatched or 'none'}")
