import itertools
import math

import numpy as np
import pytest

from rlgames import (
    Bandit,
    Clairvoyant,
    Full,
    InputError,
    MirrorProx,
    NumericError,
    Optimistic,
    Schedule,
    builtin_game,
    choice_map_profile,
    derive_run_seed,
    explored_profile,
    init_state,
    iwe,
    kernel_from_name,
    lipschitz_estimate,
    perturbation_stream,
    player_stream,
    pure_profile,
    run,
    sample_actions,
    step,
    uniform_at,
    uniform_table,
)
from rlgames.game import make_game, payoff_vectors


@pytest.fixture(scope="module")
def vz():
    return builtin_game("vz4x4")


@pytest.fixture(scope="module")
def mp():
    return builtin_game("matching_pennies_2p")


LOGIT = kernel_from_name("logit")


# ---------------------------------------------------------------------------
# schedules


def test_schedule_values():
    s = Schedule(base=0.2, exponent=0.5)
    assert s.value(1) == 0.2
    assert s.value(4) == pytest.approx(0.1)
    assert Schedule(base=3.0).value(1000) == 3.0


@pytest.mark.parametrize("base,exponent", [
    (0.0, 0.5), (-1.0, 0.5), (np.inf, 0.5), (np.nan, 0.5),
    (0.2, -0.1), (0.2, 1.5),
])
def test_schedule_rejects_bad_parameters(base, exponent):
    with pytest.raises(InputError):
        Schedule(base=base, exponent=exponent)


def test_schedule_is_indexed_from_one():
    with pytest.raises(InputError):
        Schedule(base=0.2, exponent=0.5).value(0)


# ---------------------------------------------------------------------------
# randomness plumbing


def test_uniform_at_addresses_the_table():
    for seed in (0, 9, 123456):
        table = uniform_table(seed, n_players=3, horizon=21)
        for i in range(3):
            for n in range(1, 22):  # crosses several Philox block boundaries
                assert uniform_at(seed, i, n) == table[n - 1, i]


def test_player_streams_are_independent_and_reproducible():
    a = player_stream(7, 0).random(5)
    b = player_stream(7, 1).random(5)
    assert not np.allclose(a, b)
    assert np.array_equal(player_stream(7, 0).random(5), a)


def test_perturbation_stream_is_its_own_substream():
    pert = perturbation_stream(7).random(5)
    for player in range(4):
        assert not np.allclose(pert, player_stream(7, player).random(5))
    assert np.array_equal(perturbation_stream(7).random(5), pert)


def test_derive_run_seed_is_stable_and_spread():
    assert derive_run_seed(99, 3) == derive_run_seed(99, 3)
    seeds = {derive_run_seed(99, i) for i in range(50)}
    assert len(seeds) == 50
    assert derive_run_seed(98, 0) != derive_run_seed(99, 0)


# ---------------------------------------------------------------------------
# bandit building blocks


def test_explored_profile_mixes_toward_uniform():
    x = [np.array([1.0, 0.0]), np.array([0.25, 0.25, 0.5])]
    out = explored_profile(x, 0.2)
    assert np.allclose(out[0], [0.9, 0.1])
    assert np.allclose(out[1], 0.8 * x[1] + 0.2 / 3)
    flat = explored_profile(x, 1.0)
    assert np.allclose(flat[0], [0.5, 0.5])
    for bad in (0.0, -0.1, 1.2):
        with pytest.raises(InputError):
            explored_profile(x, bad)


def test_sample_actions_inverse_cdf():
    x = [np.array([0.5, 0.5]), np.array([0.2, 0.3, 0.5])]
    assert sample_actions(x, [0.25, 0.1]) == [0, 0]
    assert sample_actions(x, [0.75, 0.4]) == [1, 1]
    assert sample_actions(x, [0.999, 0.999]) == [1, 2]
    assert sample_actions(x, [1.0, 1.0]) == [1, 2]  # boundary stays in range


def test_iwe_support_and_errors(mp):
    xhat = [np.array([0.3, 0.7]), np.array([0.6, 0.4])]
    est = iwe(mp, xhat, [0, 1])
    assert est[0][1] == 0.0 and est[1][0] == 0.0
    assert est[0][0] == pytest.approx(mp.payoffs[0][0, 1] / 0.3)
    assert est[1][1] == pytest.approx(mp.payoffs[1][0, 1] / 0.4)
    with pytest.raises(InputError):
        iwe(mp, xhat, [0])
    with pytest.raises(InputError):
        iwe(mp, xhat, [0, 5])
    with pytest.raises(InputError):
        iwe(mp, [np.array([1.0, 0.0]), np.array([0.5, 0.5])], [1, 0])


def test_iwe_is_unbiased_by_enumeration(mp):
    xhat = [np.array([0.3, 0.7]), np.array([0.6, 0.4])]
    want = payoff_vectors(mp, xhat)
    mean = [np.zeros(2), np.zeros(2)]
    for a, b in itertools.product(range(2), range(2)):
        w = xhat[0][a] * xhat[1][b]
        est = iwe(mp, xhat, [a, b])
        mean = [m + w * e for m, e in zip(mean, est)]
    for m, v in zip(mean, want):
        assert np.allclose(m, v, atol=1e-12)


# ---------------------------------------------------------------------------
# state initialization


def test_init_state_defaults_to_zero_scores(vz):
    st = init_state(vz, LOGIT)
    assert all(np.array_equal(y, np.zeros(4)) for y in st.scores)
    assert all(np.allclose(x, 0.25) for x in st.current)
    assert st.step_index == 1
    assert [x.tolist() for x in st.previous] == [x.tolist() for x in st.current]


def test_init_state_validation(vz):
    with pytest.raises(InputError):
        init_state(vz, LOGIT, y0=[np.zeros(4)])
    with pytest.raises(InputError):
        init_state(vz, LOGIT, y0=[np.zeros(4), np.zeros(3)])
    with pytest.raises(InputError):
        init_state(vz, LOGIT, y0=[np.zeros(4), np.array([1.0, np.nan, 0, 0])])


def test_init_state_copies_y0(vz):
    y0 = [np.zeros(4), np.zeros(4)]
    st = init_state(vz, LOGIT, y0=y0)
    y0[0][0] = 99.0
    assert st.scores[0][0] == 0.0


# ---------------------------------------------------------------------------
# one-step semantics


def manual_v(game, xs):
    return payoff_vectors(game, xs)


def test_full_step_updates_scores_with_the_true_field(vz):
    sch = Schedule(0.2, 0.5)
    st = init_state(vz, LOGIT, y0=[np.array([0.1, 0.0, -0.1, 0.2])] * 2)
    y_before = [y.copy() for y in st.scores]
    x_before = [x.copy() for x in st.current]
    v = manual_v(vz, x_before)
    rec = step(st, vz, LOGIT, Full(), sch)

    assert rec.n == 1 and rec.gamma == 0.2
    for got, want in zip(rec.vhat, v):
        assert np.allclose(got, want, atol=1e-12)
    assert all(np.all(b == 0) for b in rec.bias)
    assert all(np.all(b == 0) for b in rec.noise)
    assert rec.realized is None
    # the record holds the pre-update snapshot
    for got, want in zip(rec.scores, y_before):
        assert np.array_equal(got, want)
    for got, want in zip(rec.x, x_before):
        assert np.array_equal(got, want)
    # y <- y + gamma vhat, x <- Q(y)
    for y_new, y_old, g in zip(st.scores, y_before, rec.vhat):
        assert np.allclose(y_new, y_old + 0.2 * g, atol=1e-15)
    for x_new, want in zip(st.current, choice_map_profile(LOGIT, st.scores)):
        assert np.array_equal(x_new, want)
    assert st.step_index == 2
    # gaps replay: best response payoff minus realized mixed payoff
    for gap, g, xi in zip(rec.gaps, v, x_before):
        assert gap == pytest.approx(float(g.max() - np.dot(g, xi)))


def test_optimistic_first_step_is_plain_then_extrapolates(vz):
    sch = Schedule(0.1, 0.0)
    st = init_state(vz, LOGIT, y0=[np.array([0.3, 0.0, 0.0, -0.3])] * 2)
    x1 = [x.copy() for x in st.current]
    rec1 = step(st, vz, LOGIT, Optimistic(), sch)
    v1 = manual_v(vz, x1)
    for got, want in zip(rec1.vhat, v1):
        assert np.allclose(got, want, atol=1e-12)
    assert all(np.allclose(b, 0, atol=1e-15) for b in rec1.bias)

    x2 = [x.copy() for x in st.current]
    rec2 = step(st, vz, LOGIT, Optimistic(), sch)
    v2 = manual_v(vz, x2)
    for got, a, b in zip(rec2.vhat, v2, v1):
        assert np.allclose(got, 2 * a - b, atol=1e-12)
    for got, a, b in zip(rec2.bias, v2, v1):
        assert np.allclose(got, a - b, atol=1e-12)


def test_mirror_prox_evaluates_the_half_step(vz):
    sch = Schedule(0.3, 0.0)
    y0 = [np.array([0.2, -0.1, 0.0, 0.1])] * 2
    st = init_state(vz, LOGIT, y0=y0)
    x = [x.copy() for x in st.current]
    v = manual_v(vz, x)
    rec = step(st, vz, LOGIT, MirrorProx(), sch)
    x_half = choice_map_profile(LOGIT, [y + 0.3 * g for y, g in zip(y0, v)])
    v_half = manual_v(vz, x_half)
    for got, want in zip(rec.vhat, v_half):
        assert np.allclose(got, want, atol=1e-12)
    for got, a, b in zip(rec.bias, v_half, v):
        assert np.allclose(got, a - b, atol=1e-12)


def test_clairvoyant_lands_on_the_implicit_fixed_point(vz):
    sch = Schedule(0.4, 0.0)
    fb = Clairvoyant(tol=1e-12)
    st = init_state(vz, LOGIT, y0=[np.array([0.5, 0.0, -0.5, 0.0])] * 2)
    y0 = [y.copy() for y in st.scores]
    rec = step(st, vz, LOGIT, fb, sch)
    # reconstruct x+ from the recorded field and check Q(y + gamma v(x+)) = x+
    x_plus = choice_map_profile(LOGIT, [y + 0.4 * g for y, g in zip(y0, rec.vhat)])
    v_plus = manual_v(vz, x_plus)
    for got, want in zip(rec.vhat, v_plus):
        assert np.allclose(got, want, atol=1e-8)


def test_clairvoyant_iteration_cap_raises(vz):
    fb = Clairvoyant(tol=1e-14, max_iters=1)
    st = init_state(vz, LOGIT, y0=[np.array([2.0, 0.0, -1.0, 0.0])] * 2)
    with pytest.raises(NumericError):
        step(st, vz, LOGIT, fb, Schedule(0.5, 0.0))


def test_clairvoyant_parameter_validation():
    with pytest.raises(InputError):
        Clairvoyant(tol=0.0)
    with pytest.raises(InputError):
        Clairvoyant(max_iters=0)


def test_bandit_step_decomposition(vz):
    fb = Bandit(exploration=Schedule(0.1, 0.15))
    sch = Schedule(0.2, 0.5)
    st = init_state(vz, LOGIT, seed=42)
    x = [x.copy() for x in st.current]
    v = manual_v(vz, x)
    rec = step(st, vz, LOGIT, fb, sch)

    assert rec.realized is not None and len(rec.realized) == 2
    xhat = explored_profile(x, 0.1)
    assert np.allclose(
        np.concatenate(rec.vhat),
        np.concatenate(iwe(vz, xhat, rec.realized)),
        atol=1e-12,
    )
    v_mean = manual_v(vz, xhat)
    for got, a, b in zip(rec.bias, v_mean, v):
        assert np.allclose(got, a - b, atol=1e-12)
    for got, est, mean in zip(rec.noise, rec.vhat, v_mean):
        assert np.allclose(got, est - mean, atol=1e-12)
    # estimator is supported on the realized action only
    for est, a in zip(rec.vhat, rec.realized):
        mask = np.ones(4, dtype=bool)
        mask[a] = False
        assert np.all(est[mask] == 0.0)


def test_bandit_exploration_must_stay_in_range():
    with pytest.raises(InputError):
        Bandit(exploration=Schedule(1.5, 0.0))


def test_unknown_feedback_kind_is_rejected(vz):
    st = init_state(vz, LOGIT)
    with pytest.raises(InputError):
        step(st, vz, LOGIT, object(), Schedule(0.1, 0.0))


# ---------------------------------------------------------------------------
# whole runs


def test_run_validates_horizon(vz):
    for bad in (0, -3, 2.5):
        with pytest.raises(InputError):
            run(vz, LOGIT, Full(), Schedule(0.1, 0.5), bad)


def test_run_shapes_and_columns(vz):
    T = 50
    traj = run(vz, LOGIT, Full(), Schedule(0.2, 0.5), T, seed=3)
    assert traj.n.tolist() == list(range(1, T + 1))
    assert traj.x.shape == (T, 8)
    assert traj.scores.shape == (T, 8)
    assert traj.gaps.shape == (T, 2)
    assert traj.realized.shape == (T, 2)
    assert np.all(traj.realized == -1)  # non-bandit runs never sample
    assert traj.kernel_name == "logit"
    assert traj.feedback_label == "full"
    assert np.array_equal(traj.y0, np.zeros(8))


def test_run_tau_is_the_exact_prefix_sum(vz):
    traj = run(vz, LOGIT, Full(), Schedule(0.2, 0.5), 2000)
    gammas = traj.gamma.tolist()
    for k in (0, 1, 99, 1999):
        assert traj.tau[k] == pytest.approx(math.fsum(gammas[:k + 1]), abs=1e-12)
    assert np.all(np.diff(traj.tau) > 0)


def test_run_state_invariants_hold_rowwise(vz):
    traj = run(vz, LOGIT, MirrorProx(), Schedule(0.2, 0.5), 40)
    for k in range(40):
        ys = [traj.scores[k, :4], traj.scores[k, 4:]]
        xs = choice_map_profile(LOGIT, ys)
        assert np.allclose(traj.x[k], np.concatenate(xs), atol=1e-12)
        vs = payoff_vectors(vz, [traj.x[k, :4], traj.x[k, 4:]])
        for i, v in enumerate(vs):
            xi = traj.x[k, 4 * i:4 * i + 4]
            assert traj.gaps[k, i] == pytest.approx(v.max() - np.dot(v, xi))
    # consecutive rows obey y' = y + gamma vhat
    lhs = traj.scores[1:]
    rhs = traj.scores[:-1] + traj.gamma[:-1, None] * traj.vhat[:-1]
    assert np.allclose(lhs, rhs, atol=1e-14)


def test_bandit_run_is_seed_deterministic(vz):
    fb = Bandit(exploration=Schedule(0.1, 0.15))
    a = run(vz, LOGIT, fb, Schedule(0.2, 0.5), 200, seed=11)
    b = run(vz, LOGIT, fb, Schedule(0.2, 0.5), 200, seed=11)
    c = run(vz, LOGIT, fb, Schedule(0.2, 0.5), 200, seed=12)
    assert np.array_equal(a.x, b.x)
    assert np.array_equal(a.realized, b.realized)
    assert not np.array_equal(a.realized, c.realized)
    assert np.any(a.realized >= 0)


def test_bandit_run_matches_stepwise_replay(vz):
    fb = Bandit(exploration=Schedule(0.1, 0.15))
    sch = Schedule(0.2, 0.5)
    traj = run(vz, LOGIT, fb, sch, 25, seed=5)
    st = init_state(vz, LOGIT, seed=5)
    for k in range(25):
        rec = step(st, vz, LOGIT, fb, sch)
        assert rec.realized == traj.realized[k].tolist()
        assert np.allclose(np.concatenate(rec.x), traj.x[k], atol=0)


def test_logit_runs_are_invariant_to_per_player_score_shifts(vz):
    y0 = [np.array([0.4, -0.2, 0.0, 0.1]), np.array([0.0, 0.3, -0.3, 0.2])]
    shifted = [y0[0] + 5.0, y0[1] - 2.0]
    a = run(vz, LOGIT, Full(), Schedule(0.2, 0.5), 60, y0=y0)
    b = run(vz, LOGIT, Full(), Schedule(0.2, 0.5), 60, y0=shifted)
    assert np.allclose(a.x, b.x, atol=1e-10)


# ---------------------------------------------------------------------------
# payoff field modulus


def test_lipschitz_estimates_on_builtins(vz):
    assert lipschitz_estimate(vz) == pytest.approx(0.5)
    assert lipschitz_estimate(builtin_game("parity")) == pytest.approx(0.5)
    flat = make_game([np.full((2, 2), 3.0), np.full((2, 2), -1.0)])
    assert lipschitz_estimate(flat) == 0.0


def test_lipschitz_bounds_field_differences(rng, vz):
    L = lipschitz_estimate(vz)
    for _ in range(100):
        xs = [rng.dirichlet(np.ones(4)) for _ in range(2)]
        ys = [rng.dirichlet(np.ones(4)) for _ in range(2)]
        va = payoff_vectors(vz, xs)
        vb = payoff_vectors(vz, ys)
        lhs = max(float(np.abs(a - b).max()) for a, b in zip(va, vb))
        rhs = L * sum(float(np.abs(a - b).sum()) for a, b in zip(xs, ys))
        assert lhs <= rhs + 1e-12
