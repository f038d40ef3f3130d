"""Regularized-learning drivers.

Every algorithm here is one template: accumulate a surrogate gain vector
into scores and map scores to strategies,

    y_{n+1} = y_n + gamma_n * vhat_n,      x_{n+1} = Q(y_{n+1}),

with the feedback kind deciding how vhat_n is produced from the current
play. Each vhat splits as vhat = v(x_n) + bias + noise, and both parts are
recorded so tests can check the advertised envelopes directly.

Randomness (bandit sampling only) comes from the counter-based Philox
generator, keyed per (run seed, player): the draw used by player i at step
n is the n-th output of that player's stream, so results never depend on
execution interleaving and parallel batches stay reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericError
from .game import Game, _payoff_vectors_unchecked, check_profile
from .regularizers import Kernel, choice_map_profile
from .trajectory import Trajectory

_INIT_STREAM = 0xFFFFFFFF  # reserved substream for initial-score perturbation


@dataclass(frozen=True)
class Schedule:
    """Polynomial schedule base / n^exponent, n >= 1."""

    base: float
    exponent: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.base) or self.base <= 0:
            raise InputError("schedule base must be positive and finite")
        if not 0.0 <= self.exponent <= 1.0:
            raise InputError("schedule exponent must lie in [0, 1]")

    def value(self, n: int) -> float:
        if n < 1:
            raise InputError("schedules are indexed from 1")
        if self.exponent == 0.0:
            return self.base
        return self.base / float(n) ** self.exponent


@dataclass(frozen=True)
class Full:
    """Oracle feedback: vhat = v(x_n)."""

    label = "full"


@dataclass(frozen=True)
class Optimistic:
    """Gradient extrapolation: vhat = 2 v(x_n) - v(x_{n-1})."""

    label = "optimistic"


@dataclass(frozen=True)
class MirrorProx:
    """Extra-gradient: evaluate v at the half-step profile Q(y + gamma v)."""

    label = "mirror_prox"


@dataclass(frozen=True)
class Clairvoyant:
    """Implicit step: vhat = v(x+) at the damped fixed point
    x+ = Q(y + gamma v(x+))."""

    tol: float = 1e-10
    max_iters: int = 1000
    label = "clairvoyant"

    def __post_init__(self):
        if not np.isfinite(self.tol) or self.tol <= 0:
            raise InputError("clairvoyant tolerance must be positive")
        if self.max_iters < 1:
            raise InputError("clairvoyant iteration cap must be at least 1")


@dataclass(frozen=True)
class Bandit:
    """Payoff-only feedback with importance weighting over an explored play."""

    exploration: Schedule
    label = "bandit"

    def __post_init__(self):
        if self.exploration.base > 1.0:
            raise InputError("exploration schedule must stay within (0, 1]")


FeedbackKind = Full | Optimistic | MirrorProx | Clairvoyant | Bandit


@dataclass
class LearnerState:
    """Mutable driver state; owned by exactly one run at a time."""

    scores: list[np.ndarray]
    current: list[np.ndarray]
    previous: list[np.ndarray]
    step_index: int
    seed: int


@dataclass
class StepRecord:
    n: int
    gamma: float
    x: list[np.ndarray]
    scores: list[np.ndarray]
    vhat: list[np.ndarray]
    bias: list[np.ndarray]
    noise: list[np.ndarray]
    realized: list[int] | None
    gaps: list[float]


# ---------------------------------------------------------------------------
# randomness


def _player_key(seed: int, player: int) -> np.ndarray:
    return np.array([np.uint64(seed & (2**64 - 1)), np.uint64(player)], dtype=np.uint64)


def player_stream(seed: int, player: int) -> np.random.Generator:
    """The Philox substream feeding one player's action draws."""
    return np.random.Generator(np.random.Philox(key=_player_key(seed, player)))


def uniform_table(seed: int, n_players: int, horizon: int) -> np.ndarray:
    """Column i holds the draws of player i's substream for steps 1..horizon."""
    table = np.empty((horizon, n_players))
    for i in range(n_players):
        table[:, i] = player_stream(seed, i).random(horizon)
    return table


def uniform_at(seed: int, player: int, n: int) -> float:
    """The single draw player `player` consumes at step `n`, addressed directly.

    Philox advances in 4-word counter blocks while each double consumes one
    word, so jump to the right block and discard the remainder.
    """
    word = n - 1
    bg = np.random.Philox(key=_player_key(seed, player))
    if word >= 4:
        bg.advance(word // 4)
    gen = np.random.Generator(bg)
    rem = word % 4
    if rem:
        gen.random(rem)
    return float(gen.random())


def derive_run_seed(master_seed: int, run_index: int) -> int:
    """Stable per-run seed for batch execution."""
    ss = np.random.SeedSequence([int(master_seed), int(run_index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def perturbation_stream(seed: int) -> np.random.Generator:
    """Substream reserved for initial-score perturbations."""
    return player_stream(seed, _INIT_STREAM)


# ---------------------------------------------------------------------------
# bandit building blocks


def explored_profile(profile, delta: float) -> list[np.ndarray]:
    """Mix each strategy with the uniform one: (1-delta) x + delta/m."""
    if not 0.0 < delta <= 1.0:
        raise InputError("exploration weight must lie in (0, 1]")
    out = []
    for x in profile:
        x = np.asarray(x, dtype=float)
        out.append((1.0 - delta) * x + delta / len(x))
    return out


def sample_actions(explored, uniforms) -> list[int]:
    """Inverse-CDF draws, one uniform per player."""
    actions = []
    for x, u in zip(explored, uniforms):
        c = np.cumsum(x)
        a = int(np.searchsorted(c, u * c[-1], side="right"))
        actions.append(min(a, len(x) - 1))
    return actions


def iwe(game: Game, explored, realized) -> list[np.ndarray]:
    """Importance-weighted estimator of all payoff vectors.

    Player i's estimate puts u_i(realized) / P(a_i) on the realized action
    and 0 elsewhere, which is conditionally unbiased for v_i(explored
    profile) when actions are drawn independently from it.
    """
    xs = check_profile(game, explored)
    realized = [int(a) for a in realized]
    if len(realized) != game.n_players:
        raise InputError("one realized action per player is required")
    for i, a in enumerate(realized):
        if not 0 <= a < game.n_actions[i]:
            raise InputError(f"realized action {a} out of range for player {i}")
    out = []
    for i, a in enumerate(realized):
        prob = float(xs[i][a])
        if prob <= 0.0:
            raise InputError(
                f"realized action {a} has zero sampling probability for player {i}"
            )
        u = float(game.payoffs[i][tuple(realized)])
        v = np.zeros(game.n_actions[i])
        v[a] = u / prob
        out.append(v)
    return out


# ---------------------------------------------------------------------------
# the driver


def init_state(game: Game, kernel: Kernel, y0=None, seed: int = 0) -> LearnerState:
    """Fresh state at step 1 with x = Q(y0)."""
    if y0 is None:
        scores = [np.zeros(m) for m in game.n_actions]
    else:
        if len(y0) != game.n_players:
            raise InputError("initial scores need one vector per player")
        scores = []
        for i, v in enumerate(y0):
            v = np.asarray(v, dtype=float).copy()
            if v.shape != (game.n_actions[i],):
                raise InputError(
                    f"initial scores for player {i} have shape {v.shape}, "
                    f"expected ({game.n_actions[i]},)"
                )
            if not np.all(np.isfinite(v)):
                raise InputError("initial scores contain NaN or Inf")
            scores.append(v)
    current = choice_map_profile(kernel, scores)
    return LearnerState(
        scores=scores,
        current=current,
        previous=[x.copy() for x in current],
        step_index=1,
        seed=int(seed),
    )


def step(
    state: LearnerState,
    game: Game,
    kernel: Kernel,
    feedback: FeedbackKind,
    step_schedule: Schedule,
    _uniforms=None,
) -> StepRecord:
    """Advance the state by one template step and report what happened."""
    n = state.step_index
    gamma = step_schedule.value(n)
    x = state.current
    v = _payoff_vectors_unchecked(game,x)
    realized = None

    if isinstance(feedback, Full):
        vhat = v
        bias = [np.zeros_like(g) for g in v]
        noise = [np.zeros_like(g) for g in v]
    elif isinstance(feedback, Optimistic):
        # state.previous is x_1 at n = 1, so the first step is plain
        v_prev = _payoff_vectors_unchecked(game,state.previous)
        vhat = [2.0 * a - b for a, b in zip(v, v_prev)]
        bias = [a - b for a, b in zip(v, v_prev)]
        noise = [np.zeros_like(g) for g in v]
    elif isinstance(feedback, MirrorProx):
        y_half = [y + gamma * g for y, g in zip(state.scores, v)]
        x_half = choice_map_profile(kernel, y_half)
        v_half = _payoff_vectors_unchecked(game,x_half)
        vhat = v_half
        bias = [a - b for a, b in zip(v_half, v)]
        noise = [np.zeros_like(g) for g in v]
    elif isinstance(feedback, Clairvoyant):
        x_fix = _clairvoyant_point(state, game, kernel, feedback, gamma)
        v_fix = _payoff_vectors_unchecked(game,x_fix)
        vhat = v_fix
        bias = [a - b for a, b in zip(v_fix, v)]
        noise = [np.zeros_like(g) for g in v]
    elif isinstance(feedback, Bandit):
        delta = feedback.exploration.value(n)
        xhat = explored_profile(x, delta)
        if _uniforms is None:
            _uniforms = [uniform_at(state.seed, i, n) for i in range(game.n_players)]
        realized = sample_actions(xhat, _uniforms)
        vhat = iwe(game, xhat, realized)
        v_hat_mean = _payoff_vectors_unchecked(game,xhat)
        bias = [a - b for a, b in zip(v_hat_mean, v)]
        noise = [a - b for a, b in zip(vhat, v_hat_mean)]
    else:
        raise InputError(f"unknown feedback kind {feedback!r}")

    gaps = [float(g.max() - np.dot(g, xi)) for g, xi in zip(v, x)]
    record = StepRecord(
        n=n,
        gamma=gamma,
        x=[xi.copy() for xi in x],
        scores=[y.copy() for y in state.scores],
        vhat=vhat,
        bias=bias,
        noise=noise,
        realized=realized,
        gaps=gaps,
    )

    state.scores = [y + gamma * g for y, g in zip(state.scores, vhat)]
    state.previous = x
    state.current = choice_map_profile(kernel, state.scores)
    state.step_index = n + 1
    return record


def _clairvoyant_point(state, game, kernel, feedback, gamma):
    x = [xi.copy() for xi in state.current]
    for _ in range(feedback.max_iters):
        v = _payoff_vectors_unchecked(game,x)
        target = choice_map_profile(
            kernel, [y + gamma * g for y, g in zip(state.scores, v)]
        )
        # damped Picard update, relaxation 1/2
        x_new = [0.5 * a + 0.5 * b for a, b in zip(x, target)]
        resid = max(float(np.abs(a - b).sum()) for a, b in zip(x_new, x))
        x = x_new
        if resid <= feedback.tol:
            return x
    raise NumericError(
        f"clairvoyant fixed point stalled at residual {resid:.3e} "
        f"after {feedback.max_iters} iterations"
    )


def run(
    game: Game,
    kernel: Kernel,
    feedback: FeedbackKind,
    step_schedule: Schedule,
    horizon: int,
    y0=None,
    seed: int = 0,
) -> Trajectory:
    """Run the template for `horizon` steps and collect the full record."""
    if not isinstance(horizon, (int, np.integer)) or horizon < 1:
        raise InputError("horizon must be a positive integer")
    state = init_state(game, kernel, y0=y0, seed=seed)
    y0_flat = np.concatenate(state.scores)
    N = game.n_players
    D = sum(game.n_actions)
    T = int(horizon)

    uniforms = None
    if isinstance(feedback, Bandit):
        uniforms = uniform_table(state.seed, N, T)

    out_n = np.empty(T, dtype=np.int64)
    out_gamma = np.empty(T)
    out_tau = np.empty(T)
    out_x = np.empty((T, D))
    out_scores = np.empty((T, D))
    out_vhat = np.empty((T, D))
    out_bias = np.empty((T, D))
    out_noise = np.empty((T, D))
    out_real = np.full((T, N), -1, dtype=np.int64)
    out_gaps = np.empty((T, N))

    tau = 0.0
    comp = 0.0  # Kahan correction so tau stays exact over long runs
    for k in range(T):
        row_u = uniforms[k] if uniforms is not None else None
        rec = step(state, game, kernel, feedback, step_schedule, _uniforms=row_u)
        yv = rec.gamma - comp
        t = tau + yv
        comp = (t - tau) - yv
        tau = t
        out_n[k] = rec.n
        out_gamma[k] = rec.gamma
        out_tau[k] = tau
        out_x[k] = np.concatenate(rec.x)
        out_scores[k] = np.concatenate(rec.scores)
        out_vhat[k] = np.concatenate(rec.vhat)
        out_bias[k] = np.concatenate(rec.bias)
        out_noise[k] = np.concatenate(rec.noise)
        if rec.realized is not None:
            out_real[k] = rec.realized
        out_gaps[k] = rec.gaps

    return Trajectory(
        n_actions=game.n_actions,
        kernel_name=kernel.name,
        feedback_label=feedback.label,
        seed=state.seed,
        y0=y0_flat,
        n=out_n,
        gamma=out_gamma,
        tau=out_tau,
        x=out_x,
        scores=out_scores,
        vhat=out_vhat,
        bias=out_bias,
        noise=out_noise,
        realized=out_real,
        gaps=out_gaps,
    )


def lipschitz_estimate(game: Game) -> float:
    """Modulus L with ||v(x) - v(x')||_inf <= L * sum_i ||x_i - x'_i||_1.

    Hybrid argument over one opponent coordinate at a time: each swap moves
    the payoff by at most half the oscillation of u_i along that axis, so
    the largest half-oscillation over (player, own action, opponent axis)
    is a valid modulus. Never exceeds the global payoff bound.
    """
    L = 0.0
    for i in range(game.n_players):
        u = game.payoffs[i]
        for j in range(game.n_players):
            if j == i:
                continue
            osc = u.max(axis=j) - u.min(axis=j)
            L = max(L, 0.5 * float(osc.max()))
    return L
