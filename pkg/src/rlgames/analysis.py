"""Post-run diagnostics: regret, energies, limit sets, convergence rates.

Everything here consumes a finished :class:`Trajectory` (or raw play
distributions) and never mutates it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DiagnosticError, InputError
from .faces import Face, DeviationVector, check_face, is_resilient, ResilienceReport
from .game import Game, check_distribution, payoff_vector
from .regularizers import Kernel
from .trajectory import Trajectory, face_distances

MIN_FIT_POINTS = 20


# ---------------------------------------------------------------------------
# regret


def regret(trajectory: Trajectory, game: Game, player: int, mode: str = "expected") -> np.ndarray:
    """Cumulative external regret R_i(n) for n = 1..T.

    expected mode scores the played mixed profiles; realized mode scores
    the sampled pure profiles and requires a run that actually sampled.
    """
    if game.n_actions != trajectory.n_actions:
        raise InputError("trajectory and game disagree on action counts")
    if not 0 <= player < game.n_players:
        raise InputError(f"player index {player} out of range")
    T = trajectory.horizon
    m = game.n_actions[player]
    per_action = np.empty((T, m))
    value = np.empty(T)
    if mode == "expected":
        sl = trajectory.player_slice(player)
        for k in range(T):
            xs = trajectory.profile_at(k)
            v = payoff_vector(game, player, xs)
            per_action[k] = v
            value[k] = float(np.dot(v, trajectory.x[k, sl]))
    elif mode == "realized":
        if np.any(trajectory.realized < 0):
            raise InputError("realized-mode regret needs a run with sampled actions")
        u = np.moveaxis(game.payoffs[player], player, -1)
        for k in range(T):
            acts = tuple(int(a) for a in trajectory.realized[k])
            per_action[k] = u[tuple(a for i, a in enumerate(acts) if i != player)]
            value[k] = game.payoffs[player][acts]
    else:
        raise InputError("regret mode must be 'expected' or 'realized'")
    cum_actions = np.cumsum(per_action, axis=0)
    cum_value = np.cumsum(value)
    return cum_actions.max(axis=1) - cum_value


def regret_from_distributions(game: Game, player: int, dists) -> np.ndarray:
    """Replay-mode regret against a sequence of correlated distributions."""
    if not 0 <= player < game.n_players:
        raise InputError(f"player index {player} out of range")
    tensors = [check_distribution(game, d) for d in dists]
    if not tensors:
        raise InputError("at least one play distribution is required")
    u = game.payoffs[player]
    moved = np.moveaxis(u, player, -1)
    ax = tuple(range(game.n_players - 1))
    per_action = []
    value = []
    for d in tensors:
        marg = d.sum(axis=player)
        per_action.append(np.tensordot(marg, moved, axes=(ax, ax)))
        value.append(float((d * u).sum()))
    cum_actions = np.cumsum(np.asarray(per_action), axis=0)
    cum_value = np.cumsum(np.asarray(value))
    return cum_actions.max(axis=1) - cum_value


# ---------------------------------------------------------------------------
# series extracted from runs


def energy_series(trajectory: Trajectory, deviation: DeviationVector) -> np.ndarray:
    """Score difference (outside minus inside) of one deviation over time."""
    i = deviation.player
    if not 0 <= i < trajectory.n_players:
        raise InputError(f"deviation names player {i}, which the run does not have")
    m = trajectory.n_actions[i]
    if not (0 <= deviation.inside < m and 0 <= deviation.outside < m):
        raise InputError("deviation actions out of range for the run")
    sl = trajectory.player_slice(i)
    block = trajectory.scores[:, sl]
    return block[:, deviation.outside] - block[:, deviation.inside]


def distance_series(trajectory: Trajectory, face: Face) -> np.ndarray:
    """Outside-support mass per step (same quantity the CSV dist columns use)."""
    return face_distances(trajectory, face)


# ---------------------------------------------------------------------------
# limit sets


@dataclass(frozen=True)
class LimitSetEstimate:
    """Deduplicated trailing-window profiles standing in for the limit set."""

    points: tuple  # tuple of per-player strategy lists
    window_fraction: float
    epsilon: float
    first_index: int  # first step index (0-based row) inside the window


def estimate_limit_set(
    trajectory: Trajectory, window_fraction: float = 0.1, epsilon: float = 0.02
) -> LimitSetEstimate:
    """Greedy L1 dedup (first-seen representatives) of the trailing window."""
    if not 0.0 < window_fraction <= 1.0:
        raise InputError("window fraction must lie in (0, 1]")
    if epsilon <= 0:
        raise InputError("dedup radius must be positive")
    T = trajectory.horizon
    start = T - max(1, int(np.ceil(window_fraction * T)))
    window = trajectory.x[start:]
    reps: list[np.ndarray] = []
    for row in window:
        if not any(np.abs(row - r).sum() <= epsilon for r in reps):
            reps.append(row)
    points = tuple(
        tuple(row[trajectory.player_slice(i)].copy() for i in range(trajectory.n_players))
        for row in reps
    )
    return LimitSetEstimate(
        points=points,
        window_fraction=window_fraction,
        epsilon=epsilon,
        first_index=start,
    )


def check_limit_resilience(
    trajectory: Trajectory,
    game: Game,
    window_fraction: float = 0.1,
    epsilon: float = 0.02,
    tol: float = 0.02,
) -> ResilienceReport:
    """Estimate the limit set of a run and test it for resilience."""
    if game.n_actions != trajectory.n_actions:
        raise InputError("trajectory and game disagree on action counts")
    est = estimate_limit_set(trajectory, window_fraction=window_fraction, epsilon=epsilon)
    return is_resilient(game, [list(p) for p in est.points], tol=tol)


# ---------------------------------------------------------------------------
# rate fits


@dataclass(frozen=True)
class RateFit:
    """Fitted decay law of the distance-to-face series.

    model is 'finite_hit' (non-steep kernels: exact arrival step),
    'geometric' (log dist linear in tau), or 'inverse_square'
    (log dist linear in log(shift + tau) with slope near -2).
    """

    model: str
    hit_index: int | None = None
    slope: float | None = None
    intercept: float | None = None
    shift: float | None = None
    r_squared: float | None = None
    window: tuple[int, int] = (0, 0)
    n_points: int = 0


def fit_rate(
    trajectory: Trajectory,
    face: Face,
    kernel: Kernel,
    atol: float = 1e-12,
    window: float = 0.5,
) -> RateFit:
    """Fit the decay law the kernel family predicts for club convergence.

    The regression window keeps steps with atol < dist < `window`: the
    upper cutoff drops the transient, the lower one drops the numerical
    floor. Regression models need at least 20 points inside the window.
    """
    if atol <= 0 or window <= atol:
        raise InputError("need 0 < atol < window")
    dist = distance_series(trajectory, face)
    tau = trajectory.tau

    if kernel.variant == "quadratic":
        hits = np.flatnonzero(dist <= atol)
        if hits.size == 0:
            raise DiagnosticError(
                "distance never reached the floor; no finite hitting step"
            )
        k = int(hits[0])
        return RateFit(
            model="finite_hit",
            hit_index=int(trajectory.n[k]),
            window=(int(trajectory.n[0]), int(trajectory.n[k])),
            n_points=k + 1,
        )

    mask = (dist > atol) & (dist < window)
    idx = np.flatnonzero(mask)
    if idx.size < MIN_FIT_POINTS:
        raise DiagnosticError(
            f"only {idx.size} in-window points (need {MIN_FIT_POINTS}); "
            "the run never settled into the fitted regime"
        )
    logd = np.log(dist[idx])
    t = tau[idx]
    first, last = int(trajectory.n[idx[0]]), int(trajectory.n[idx[-1]])

    if kernel.variant == "entropic":
        slope, intercept, r2 = _line_fit(t, logd)
        return RateFit(
            model="geometric",
            slope=slope,
            intercept=intercept,
            r_squared=r2,
            window=(first, last),
            n_points=int(idx.size),
        )

    # steep power kernels: log dist ~ slope * log(shift + tau) + b
    shift, (slope, intercept, r2) = _best_shift(t, logd)
    return RateFit(
        model="inverse_square",
        slope=slope,
        intercept=intercept,
        shift=shift,
        r_squared=r2,
        window=(first, last),
        n_points=int(idx.size),
    )


def _line_fit(x, y):
    A = np.stack([x, np.ones_like(x)], axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ coef
    ss_res = float(((y - pred) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), float(coef[1]), r2


def _best_shift(t, logd):
    """1-D search over the time offset maximizing the log-log fit quality."""
    span = float(t.max()) - float(t.min())
    grid = np.concatenate([[1e-9], np.geomspace(1e-3, max(10.0 * span, 1.0), 120)])
    best = None
    best_c = None
    for c in grid:
        shifted = c + t
        if shifted.min() <= 0:
            continue
        fit = _line_fit(np.log(shifted), logd)
        if best is None or fit[2] > best[2]:
            best, best_c = fit, float(c)
    # golden-ratio refinement around the winning grid cell
    lo, hi = best_c / 3.0, best_c * 3.0
    for _ in range(60):
        m1 = lo + 0.382 * (hi - lo)
        m2 = lo + 0.618 * (hi - lo)
        f1 = _line_fit(np.log(m1 + t), logd)[2]
        f2 = _line_fit(np.log(m2 + t), logd)[2]
        if f1 < f2:
            lo = m1
        else:
            hi = m2
    c = 0.5 * (lo + hi)
    return c, _line_fit(np.log(c + t), logd)
