"""Finite normal-form games with dense payoff tensors.

Conventions used throughout the package:

* A game with N players stores one payoff tensor per player, each of shape
  ``n_actions`` (player 1's action indexes the first axis, so flattening is
  row-major with player 1 slowest).
* A mixed strategy for player i is a 1-D float array of length
  ``n_actions[i]`` on the probability simplex.
* A mixed profile is a sequence of per-player mixed strategies.
* A correlated distribution is a single joint tensor of shape ``n_actions``.

Functions validate their inputs and raise :class:`InputError` on contract
violations rather than letting numpy produce silently wrong answers.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .errors import InputError

PROB_ATOL = 1e-9  # mixed strategies must sum to 1 within this


@dataclass(frozen=True)
class Game:
    """A finite N-player normal-form game.

    ``payoffs[i]`` is player i's payoff tensor, indexed by the full action
    profile. Tensors are made read-only so a Game can be shared freely
    between threads.
    """

    n_actions: tuple[int, ...]
    payoffs: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.n_actions) < 1:
            raise InputError("game needs at least one player")
        if any(int(m) < 1 for m in self.n_actions):
            raise InputError("every player needs at least one action")
        if len(self.payoffs) != len(self.n_actions):
            raise InputError("one payoff tensor per player is required")
        fixed = []
        for i, table in enumerate(self.payoffs):
            arr = np.asarray(table, dtype=float)
            if arr.shape != self.n_actions:
                raise InputError(
                    f"payoff tensor for player {i} has shape {arr.shape}, "
                    f"expected {self.n_actions}"
                )
            if not np.all(np.isfinite(arr)):
                raise InputError(f"payoff tensor for player {i} contains NaN or Inf")
            arr = arr.copy()
            arr.setflags(write=False)
            fixed.append(arr)
        object.__setattr__(self, "n_actions", tuple(int(m) for m in self.n_actions))
        object.__setattr__(self, "payoffs", tuple(fixed))

    @property
    def n_players(self) -> int:
        return len(self.n_actions)

    def profiles(self):
        """Iterate over all pure action profiles in row-major order."""
        return itertools.product(*(range(m) for m in self.n_actions))


def make_game(payoffs) -> Game:
    """Build a Game from a sequence of per-player payoff tensors."""
    tables = [np.asarray(t, dtype=float) for t in payoffs]
    if not tables:
        raise InputError("game needs at least one player")
    return Game(n_actions=tables[0].shape, payoffs=tuple(tables))


# ---------------------------------------------------------------------------
# profile and distribution validation


def check_strategy(game: Game, player: int, x) -> np.ndarray:
    """Validate a mixed strategy for one player and return it as an array."""
    if not 0 <= player < game.n_players:
        raise InputError(f"player index {player} out of range")
    v = np.asarray(x, dtype=float)
    if v.shape != (game.n_actions[player],):
        raise InputError(
            f"strategy for player {player} has shape {v.shape}, "
            f"expected ({game.n_actions[player]},)"
        )
    if not np.all(np.isfinite(v)):
        raise InputError("mixed strategy contains NaN or Inf")
    if np.any(v < -PROB_ATOL):
        raise InputError("mixed strategy has a negative entry")
    if abs(float(v.sum()) - 1.0) > PROB_ATOL:
        raise InputError("mixed strategy does not sum to 1")
    return v


def check_profile(game: Game, profile) -> list[np.ndarray]:
    """Validate a mixed profile (one strategy per player)."""
    if len(profile) != game.n_players:
        raise InputError(
            f"profile has {len(profile)} strategies, expected {game.n_players}"
        )
    return [check_strategy(game, i, x) for i, x in enumerate(profile)]


def check_distribution(game: Game, dist) -> np.ndarray:
    """Validate a correlated distribution (joint tensor over profiles)."""
    d = np.asarray(dist, dtype=float)
    if d.shape != game.n_actions:
        raise InputError(
            f"distribution has shape {d.shape}, expected {game.n_actions}"
        )
    if not np.all(np.isfinite(d)):
        raise InputError("distribution contains NaN or Inf")
    if np.any(d < -PROB_ATOL):
        raise InputError("distribution has a negative entry")
    if abs(float(d.sum()) - 1.0) > PROB_ATOL:
        raise InputError("distribution does not sum to 1")
    return d


def pure_profile(game: Game, actions) -> list[np.ndarray]:
    """The point-mass mixed profile at a pure action profile."""
    actions = tuple(int(a) for a in actions)
    _check_pure(game, actions)
    out = []
    for i, a in enumerate(actions):
        v = np.zeros(game.n_actions[i])
        v[a] = 1.0
        out.append(v)
    return out


def product_distribution(game: Game, profile) -> np.ndarray:
    """The joint tensor induced by an independent mixed profile."""
    xs = check_profile(game, profile)
    d = xs[0]
    for v in xs[1:]:
        d = np.multiply.outer(d, v)
    return d.reshape(game.n_actions)


def _check_pure(game: Game, actions: tuple[int, ...]):
    if len(actions) != game.n_players:
        raise InputError(
            f"pure profile has {len(actions)} actions, expected {game.n_players}"
        )
    for i, a in enumerate(actions):
        if not 0 <= a < game.n_actions[i]:
            raise InputError(f"action {a} out of range for player {i}")


# ---------------------------------------------------------------------------
# payoff operators


def payoff_pure(game: Game, player: int, actions) -> float:
    """Payoff to `player` at a pure action profile."""
    actions = tuple(int(a) for a in actions)
    _check_pure(game, actions)
    if not 0 <= player < game.n_players:
        raise InputError(f"player index {player} out of range")
    return float(game.payoffs[player][actions])


def payoff_mixed(game: Game, player: int, profile) -> float:
    """Expected payoff to `player` under an independent mixed profile."""
    xs = check_profile(game, profile)
    val = game.payoffs[player]
    for v in xs:
        val = np.tensordot(val, v, axes=([0], [0]))
    return float(val)


def payoff_vector(game: Game, player: int, profile) -> np.ndarray:
    """Expected payoff to `player` of each own action against the others.

    Entry a is the payoff of playing a while everyone else follows the
    profile; the player's own strategy in `profile` is ignored.
    """
    xs = check_profile(game, profile)
    return _payoff_vector_unchecked(game, player, xs)


def _payoff_vector_unchecked(game: Game, player: int, xs) -> np.ndarray:
    val = np.moveaxis(game.payoffs[player], player, 0)
    for j in range(game.n_players):
        if j == player:
            continue
        # own axis was moved to the front, so the next opponent axis is 1
        val = np.tensordot(val, xs[j], axes=([1], [0]))
    return val


def payoff_vectors(game: Game, profile) -> list[np.ndarray]:
    """Payoff vectors of every player under one mixed profile."""
    xs = check_profile(game, profile)
    return [_payoff_vector_unchecked(game, i, xs) for i in range(game.n_players)]


def _payoff_vectors_unchecked(game: Game, xs) -> list[np.ndarray]:
    return [_payoff_vector_unchecked(game, i, xs) for i in range(game.n_players)]


def payoff_bound(game: Game) -> float:
    """Largest absolute pure payoff across all players."""
    return max(float(np.abs(t).max()) for t in game.payoffs)


def deviation_gap(game: Game, player: int, dist) -> np.ndarray | float:
    """Best fixed-action improvement over the payoff of a joint distribution.

    Returns max_a [u_i(a; dist_-i) - u_i(dist)] where both terms are
    expectations under the correlated distribution `dist`. A negative value
    certifies that no fixed action beats the distribution itself. Note the
    maximum runs over all actions including any the distribution plays, so
    the gap of a point mass is never negative (it is 0 at a strict
    equilibrium, where only the equilibrium action attains it).
    """
    return float(deviation_gaps(game, player, dist).max())


def deviation_gaps(game: Game, player: int, dist) -> np.ndarray:
    """Per-action version of :func:`deviation_gap` (one entry per action)."""
    d = check_distribution(game, dist)
    if not 0 <= player < game.n_players:
        raise InputError(f"player index {player} out of range")
    value = float((d * game.payoffs[player]).sum())
    marginal = d.sum(axis=player)
    moved = np.moveaxis(game.payoffs[player], player, -1)
    k = tuple(range(marginal.ndim))
    fixed = np.tensordot(marginal, moved, axes=(k, k))
    return fixed - value


def best_replies(game: Game, player: int, profile, tol: float = 1e-9) -> tuple[int, ...]:
    """Actions within `tol` of the best payoff against the profile."""
    if tol < 0:
        raise InputError("tie tolerance must be nonnegative")
    v = payoff_vector(game, player, profile)
    return tuple(int(a) for a in np.flatnonzero(v >= v.max() - tol))


# ---------------------------------------------------------------------------
# equilibria and dominance


def enumerate_pure_nash(game: Game, strict_only: bool = False, tol: float = 1e-9):
    """All pure Nash profiles, sorted lexicographically.

    Weak equilibria allow deviations to tie within `tol`; strict mode
    requires every unilateral deviation to be strictly worse (exact
    comparison, no tolerance, matching the exact treatment of ties in the
    setwise tests).
    """
    if tol < 0:
        raise InputError("tie tolerance must be nonnegative")
    ok = np.ones(game.n_actions, dtype=bool)
    for i in range(game.n_players):
        u = game.payoffs[i]
        best = u.max(axis=i, keepdims=True)
        if strict_only:
            # strict: the action is the unique maximizer
            count = (u == best).sum(axis=i, keepdims=True)
            ok &= (u == best) & (count == 1)
        else:
            ok &= u >= best - tol
    return [tuple(int(a) for a in idx) for idx in np.argwhere(ok)]


def strictly_dominated_pure(game: Game, player: int) -> tuple[int, ...]:
    """Actions strictly dominated by some other pure action (exact >)."""
    if not 0 <= player < game.n_players:
        raise InputError(f"player index {player} out of range")
    u = np.moveaxis(game.payoffs[player], player, 0)
    m = game.n_actions[player]
    flat = u.reshape(m, -1)
    # diff[b, a] > 0 everywhere means b strictly dominates a
    diff = flat[:, None, :] - flat[None, :, :]
    dominated = np.any(np.all(diff > 0, axis=2), axis=0)
    return tuple(int(a) for a in np.flatnonzero(dominated))


def random_game(rng: np.random.Generator, n_actions, low: float = -1.0, high: float = 1.0) -> Game:
    """A game with iid uniform payoffs, for property tests and calibration."""
    shape = tuple(int(m) for m in n_actions)
    tables = [rng.uniform(low, high, size=shape) for _ in shape]
    return make_game(tables)


# ---------------------------------------------------------------------------
# JSON interchange format


def game_to_dict(game: Game) -> dict:
    """Plain-dict form: row-major flat payoff lists, player 1 slowest."""
    return {
        "players": game.n_players,
        "actions": list(game.n_actions),
        "payoffs": [t.ravel(order="C").tolist() for t in game.payoffs],
    }


def game_from_dict(data: dict) -> Game:
    """Inverse of :func:`game_to_dict`, with full validation."""
    if not isinstance(data, dict):
        raise InputError("game document must be a JSON object")
    for key in ("players", "actions", "payoffs"):
        if key not in data:
            raise InputError(f"game document is missing the '{key}' field")
    players = data["players"]
    actions = data["actions"]
    if not isinstance(players, int) or players < 1:
        raise InputError("'players' must be a positive integer")
    if not isinstance(actions, list) or len(actions) != players:
        raise InputError("'actions' must list one action count per player")
    if not all(isinstance(m, int) and m >= 1 for m in actions):
        raise InputError("every action count must be a positive integer")
    payoffs = data["payoffs"]
    if not isinstance(payoffs, list) or len(payoffs) != players:
        raise InputError("'payoffs' must list one flat table per player")
    shape = tuple(actions)
    size = int(np.prod(shape))
    tables = []
    for i, flat in enumerate(payoffs):
        if not isinstance(flat, list) or len(flat) != size:
            raise InputError(
                f"payoff table for player {i} must be a flat list of {size} numbers"
            )
        arr = np.asarray(flat, dtype=float).reshape(shape, order="C")
        if not np.all(np.isfinite(arr)):
            raise InputError(f"payoff table for player {i} contains NaN or Inf")
        tables.append(arr)
    return make_game(tables)


def game_to_json(game: Game) -> str:
    """Canonical JSON serialization (stable key order, repr-exact floats)."""
    return json.dumps(game_to_dict(game), indent=2, sort_keys=False)


def load_game(path) -> Game:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"could not parse game file: {exc}") from exc
    return game_from_dict(data)


def save_game(game: Game, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(game_to_json(game))
        fh.write("\n")
