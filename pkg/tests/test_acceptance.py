"""Acceptance suite: every headline behavior at its stated tolerance.

Each test prints one line; run with ``pytest tests/test_acceptance.py -v -s``
to see them as the criteria execute.  Budgets are wall-clock seconds.
"""

import time

import numpy as np
import pytest
from scipy import stats

from polarize import duel, dynamics, geometry, metrics, strategies


def _report(num, name, t0, budget, detail=""):
    elapsed = time.time() - t0
    print(f"ACCEPTANCE {num:02d} {name}: PASS ({elapsed:.1f}s / {budget}s budget) {detail}")
    assert elapsed < budget, f"runtime {elapsed:.1f}s exceeded the {budget}s budget"


def test_criterion_01_update_rule_norm_identity():
    t0 = time.time()
    worst = 0.0
    per_combo = 111_112  # 9 combos -> just over 1e6 triples
    rng = np.random.default_rng(101)
    for eta in (0.1, 1.0, 5.0):
        for d in (2, 3, 10):
            u = geometry.sample_uniform_sphere(d, rng, size=per_combo)
            v = geometry.sample_uniform_sphere(d, rng, size=per_combo)
            dots = np.einsum("ij,ij->i", u, v)
            w = u + eta * dots[:, None] * v
            lhs = np.einsum("ij,ij->i", w, w)
            rhs = 1.0 + (2 * eta + eta * eta) * dots * dots
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    assert worst < 1e-12, f"norm identity violated by {worst}"
    _report(1, "update-rule norm identity", t0, 10, f"max dev {worst:.2e}")


def test_criterion_02_single_influencer_regime():
    t0 = time.time()
    rng = np.random.default_rng(202)
    opinions = np.zeros((500, 4))
    opinions[:, :3] = geometry.sample_uniform_sphere(3, rng, size=500)
    v = np.array([np.sqrt(7.0) / 4.0, 0.0, 0.0, 3.0 / 4.0])
    state = dynamics.PopulationState(opinions, eta=1.0)
    after_one = dynamics.step(state, v)
    aligned = np.sign(after_one.opinions[:, 3]) == np.sign(opinions[:, 0])
    assert np.all(aligned), f"{(~aligned).sum()} agents misaligned after one step"
    current = after_one
    for _ in range(4):
        current = dynamics.step(current, v)
    rho = metrics.rho_total(current.opinions, exact=False).value
    assert rho >= 0.9, f"rho after 5 steps is {rho}"
    _report(2, "product-coupling regime", t0, 1, f"rho={rho:.3f}")


MARTINGALE_GRID = [
    (2, np.pi / 6, 0.5), (2, np.pi / 3, 1.0), (2, np.pi / 2, 2.0),
    (2, 2 * np.pi / 3, 1.0), (3, np.pi / 6, 1.0), (3, np.pi / 3, 0.5),
    (3, np.pi / 2, 1.0), (3, 2 * np.pi / 3, 2.0), (5, np.pi / 6, 2.0),
    (5, np.pi / 3, 1.0), (5, np.pi / 2, 0.5), (5, 2 * np.pi / 3, 1.0),
]


def test_criterion_03_angle_martingale():
    t0 = time.time()
    n_draws = 100_000
    rng = np.random.default_rng(303)
    worst_z = 0.0
    for d, alpha, eta in MARTINGALE_GRID:
        u1 = np.zeros(d)
        u1[0] = 1.0
        u2 = np.zeros(d)
        u2[0], u2[1] = np.cos(alpha), np.sin(alpha)
        vs = geometry.sample_uniform_sphere(d, rng, size=n_draws)
        c = 2 * eta + eta * eta
        d1, d2 = vs @ u1, vs @ u2
        inner = float(u1 @ u2) + c * d1 * d2
        norms = np.sqrt((1 + c * d1 * d1) * (1 + c * d2 * d2))
        post = np.arccos(np.clip(inner / norms, -1.0, 1.0))
        se = post.std(ddof=1) / np.sqrt(n_draws)
        z = abs(post.mean() - alpha) / se
        worst_z = max(worst_z, z)
        assert z < 4, f"martingale broken at d={d} alpha={alpha} eta={eta}: z={z:.2f}"
    _report(3, "post-step angle is a martingale", t0, 30, f"worst |z|={worst_z:.2f}")


def _canonical_cluster_size(final):
    ref = final[0]
    k = int(np.argmax(np.abs(ref) > 1e-9))
    canon = ref if ref[k] > 0 else -ref
    return int(np.count_nonzero(final @ canon > 0))


def test_criterion_04_strong_polarization_and_cluster_balance():
    t0 = time.time()
    n, d, steps = 50, 3, 2000
    converged = 0
    sizes = []
    for seed in range(200):
        init = geometry.sample_uniform_sphere(d, np.random.default_rng(seed), size=n)
        state = dynamics.PopulationState(init, eta=1.0)
        traj = dynamics.run(state, dynamics.IIDUniformSchedule(), steps,
                            seed=seed + 40_000, stride=10**9)
        final = traj.final_opinions
        if seed < 100:
            converged += dynamics.converged_pairs(final, 0.05)
        sizes.append(_canonical_cluster_size(final))
    assert converged >= 95, f"only {converged}/100 seeds fully polarized"
    # the labeled cluster size across runs must look Binomial(50, 1/2)
    edges = [(0, 21), (22, 23), (24, 25), (26, 27), (28, 29), (30, 50)]
    probs = np.array([
        stats.binom.cdf(hi, n, 0.5) - stats.binom.cdf(lo - 1, n, 0.5)
        for lo, hi in edges
    ])
    observed = np.array([
        sum(1 for s in sizes if lo <= s <= hi) for lo, hi in edges
    ])
    expected = probs / probs.sum() * observed.sum()
    chi2 = stats.chisquare(observed, expected)
    assert chi2.pvalue > 0.01, f"cluster split chi-square p={chi2.pvalue:.4f}"
    _report(4, "random interventions strongly polarize", t0, 60,
            f"{converged}/100 converged, chi2 p={chi2.pvalue:.2f}")


def test_criterion_05_hemisphere_equivalence():
    t0 = time.time()
    rng = np.random.default_rng(505)
    for _ in range(50):
        n = int(rng.integers(3, 16))
        pts = geometry.sample_uniform_sphere(3, rng, size=n)
        _, want = strategies.densest_hemisphere_exact(pts)
        got_counts = set()
        for _ in range(5):
            target = geometry.sample_uniform_sphere(3, rng)
            plan = strategies.plan_convergence(pts, target, eta=1.0, epsilon=1e-3)
            seq = plan.expand()
            state = dynamics.PopulationState(pts, eta=1.0)
            traj = dynamics.run(state, dynamics.ExplicitSchedule(seq),
                                seq.shape[0], seed=0, stride=10**9)
            close = np.linalg.norm(
                traj.final_opinions - target[None, :], axis=1
            ) <= 1e-3
            got = int(close.sum())
            got_counts.add(got)
            assert got == want, f"plan converged {got}, densest hemisphere {want}"
        assert len(got_counts) == 1, "persuadable count depended on the target"
    _report(5, "plans converge exactly the densest-hemisphere count", t0, 60)


def test_criterion_06_reduction_strictness():
    t0 = time.time()
    rng = np.random.default_rng(606)
    for _ in range(1000):
        n = int(rng.integers(3, 40))
        d = int(rng.integers(1, 7))
        data = [
            strategies.LabeledPoint(
                rng.standard_normal(d) * rng.uniform(0.1, 4.0),
                int(rng.choice([-1, 1])),
            )
            for _ in range(n)
        ]
        a = rng.standard_normal(d)
        c = float(rng.standard_normal())
        agree = strategies.halfspace_agreement_count(data, a, c)
        density = strategies.hemisphere_count(
            strategies.reduce_agreement_to_hemisphere(data),
            strategies.halfspace_to_hemisphere_axis(a, c),
        )
        assert agree == density, f"agreement {agree} != mapped density {density}"
    _report(6, "agreement equals mapped hemisphere density", t0, 5)


def test_criterion_07_one_shot_closed_forms():
    t0 = time.time()
    # one-agent benchmark: exactly 1/3, whatever the starting opinion
    rng = np.random.default_rng(707)
    for d in (3, 4, 6):
        for _ in range(3):
            u1 = np.zeros(d)
            u1[: d - 1] = geometry.sample_uniform_sphere(d - 1, rng)
            v, claimed = strategies.one_agent_intervention(u1)
            moved = geometry.intervene(u1, v, 1.0)
            assert claimed == 1.0 / 3.0
            assert abs(moved[-1] - 1.0 / 3.0) < 1e-12
    # full c-grid: closed forms reproduced by simulation
    grid = np.round(np.arange(-99, 100) * 0.01, 2)
    for c in grid:
        c = float(c)
        res = strategies.two_agent_intervention(c)
        u1, u2, v_two = strategies.two_agent_vectors(c)
        m1 = geometry.intervene(u1, v_two, 1.0)
        m2 = geometry.intervene(u2, v_two, 1.0)
        assert abs(m1[2] - res.achieved) < 1e-9
        assert abs(m2[2] - res.achieved) < 1e-9
        assert abs(float(m1 @ m2) - res.correlation_after) < 1e-9
        v_one, _ = strategies.one_agent_intervention(u1)
        s1 = geometry.intervene(u1, v_one, 1.0)
        s2 = geometry.intervene(u2, v_one, 1.0)
        assert abs(float(s1 @ s2) - strategies.correlation_after_one_agent(c)) < 1e-9
        assert abs(s2[2] - strategies.one_agent_other_value(c)) < 1e-9
        assert strategies.polarization_cost(c) >= -1e-12
    _report(7, "one-shot intervention closed forms replay", t0, 5)


def test_criterion_08_spherical_cap():
    t0 = time.time()
    rng = np.random.default_rng(808)
    for threshold in (0.05, 0.15, 0.25, 0.3):
        pts = np.zeros((40, 4))
        pts[:, :3] = geometry.sample_uniform_sphere(3, rng, size=40)
        result = strategies.spherical_cap_intervention(pts, threshold)
        moved = geometry.intervene_many(pts, result.intervention, 1.0)
        inside = pts[:, :3] @ result.cap.axis > result.cap.threshold + 1e-12
        assert int(inside.sum()) == result.count
        assert np.all(moved[inside, -1] > threshold), "a counted agent fell short"
        # an agent at the cap boundary lands exactly on the threshold
        axis = result.cap.axis
        c = result.cap.threshold
        ortho = geometry.sample_uniform_sphere(3, rng)
        ortho -= (ortho @ axis) * axis
        ortho /= np.linalg.norm(ortho)
        edge = np.concatenate([c * axis + np.sqrt(1 - c * c) * ortho, [0.0]])
        lifted = geometry.intervene(edge, result.intervention, 1.0)
        assert abs(lifted[-1] - threshold) < 1e-9
    c0, z0, beta0 = strategies.cap_parameters(1e-9)
    assert abs(c0) < 1e-6 and abs(beta0 - np.pi / 4) < 1e-6
    assert abs(z0 - 1 / np.sqrt(2)) < 1e-6
    _report(8, "cap intervention thresholds and limits", t0, 10)


def test_criterion_09_duel_dynamics():
    t0 = time.time()
    v = np.array([1.0, 0.0, 0.0])
    vp = np.array([0.8, 0.6, 0.0])
    config = duel.DuelConfig(v, vp, eta=1.0)
    schedule = dynamics.RandomPairSchedule(v, vp)
    converged = 0
    for seed in range(100):
        init = geometry.sample_uniform_sphere(3, np.random.default_rng(seed), size=20)
        state = dynamics.PopulationState(init, eta=1.0)
        traj = dynamics.run(state, schedule, 10_000, seed=seed + 90_000,
                            stride=10**9)
        diag = duel.duel_diagnostics(traj, config)
        assert diag.w_monotone(), f"out-of-plane norm grew (seed {seed})"
        assert diag.absorption_ok(), f"an agent left its cone (seed {seed})"
        converged += diag.pair_disagreement[-1] < 0.05
    assert converged >= 95, f"only {converged}/100 duel seeds polarized"
    # orthogonal duel: both inner-product signs frozen for every agent
    e2 = np.array([0.0, 1.0, 0.0])
    ortho_cfg = duel.DuelConfig(v, e2, eta=1.0)
    ortho_sched = dynamics.RandomPairSchedule(v, e2)
    for seed in range(100):
        init = geometry.sample_uniform_sphere(3, np.random.default_rng(seed + 500),
                                              size=20)
        state = dynamics.PopulationState(init, eta=1.0)
        traj = dynamics.run(state, ortho_sched, 1000, seed=seed + 95_000,
                            stride=10**9)
        diag = duel.duel_diagnostics(traj, ortho_cfg)
        assert diag.signs_constant(), f"sign flipped under orthogonal duel (seed {seed})"
    _report(9, "duel dynamics: decay, absorption, polarization", t0, 120,
            f"{converged}/100 converged")


def test_criterion_10_pull_function_contraction():
    t0 = time.time()
    for eta in (0.5, 1.0, 2.0):
        theta_star = geometry.critical_angle(eta)
        grid = np.linspace(0.0, theta_star, 10_000)
        f = geometry.pull(grid, eta)
        quotients = np.diff(f) / np.diff(grid)
        # Lipschitz constant of the angle map on [0, theta] for every grid
        # theta below the critical angle (running max of local slopes)
        assert np.all(np.maximum.accumulate(quotients) < 1.0), (
            f"slope reached 1 below the critical angle (eta={eta})"
        )
        # the absolute pull strengthens all the way up to the critical angle
        assert np.all(np.diff(grid - f) > 0.0), f"pull not increasing (eta={eta})"
    _report(10, "angle map contracts below the critical angle", t0, 5)


def test_criterion_11_polarization_sandwich():
    t0 = time.time()
    rng = np.random.default_rng(1111)
    for _ in range(1000):
        n = int(rng.integers(2, 13))
        d = int(rng.integers(2, 5))
        pts = geometry.sample_uniform_sphere(d, rng, size=n)
        per_topic = [metrics.rho_topic(pts, i) for i in range(d)]
        rho = metrics.rho_total(pts).value
        assert max(per_topic) <= rho + 1e-12
        assert rho <= sum(per_topic) + 1e-12
    for d in (2, 3, 4):
        cube = np.array(
            [[(1.0 if (i >> j) & 1 else -1.0) for j in range(d)]
             for i in range(2**d)]
        ) / np.sqrt(d)
        for i in range(d):
            assert metrics.rho_topic(cube, i) == pytest.approx(1.0 / d, abs=1e-12)
    square = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]]) / np.sqrt(2)
    assert metrics.rho_total(square).value == pytest.approx(0.75, abs=1e-12)
    _report(11, "polarization sandwich inequality", t0, 30)
