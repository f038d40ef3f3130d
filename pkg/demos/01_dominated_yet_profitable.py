"""Strictly dominated actions can still carry a profitable correlated play.

The bundled 4x4 game has actions B and D strictly dominated for both
players, yet the correlated distribution that flips a fair coin between
the profiles (B,B) and (D,D) pays each player more than any fixed action
earns against it. Replaying that distribution round after round drives
external regret negative at a linear rate.
"""

import numpy as np

from rlgames import builtin_game, enumerate_pure_nash, regret_from_distributions
from rlgames.game import payoff_pure, strictly_dominated_pure

ACTIONS = "ABCD"

game = builtin_game("vz4x4")

print("pure equilibria:", [tuple(ACTIONS[a] for a in p)
                           for p in enumerate_pure_nash(game)])
for i in range(2):
    dominated = strictly_dominated_pure(game, i)
    print(f"player {i} strictly dominated actions:",
          [ACTIONS[a] for a in dominated])

# the half-half correlated coin on (B,B) and (D,D)
coin = np.zeros((4, 4))
coin[1, 1] = 0.5
coin[3, 3] = 0.5

value = float((coin * game.payoffs[0]).sum())
print(f"\ncorrelated value for player 0: {value:.4f}")

# compare against the best fixed action when the opponent follows the coin
opponent_marginal = coin.sum(axis=0)
fixed = game.payoffs[0] @ opponent_marginal
for a in range(4):
    print(f"  fixed action {ACTIONS[a]} earns {fixed[a]: .4f}")
print(f"  best fixed action earns {fixed.max():.4f} < {value:.4f}")

# replaying the coin: cumulative regret is exactly -n/6 for both players
rounds = 12
for i in range(2):
    r = regret_from_distributions(game, i, [coin] * rounds)
    print(f"\nplayer {i} replay regret after {rounds} rounds: {r[-1]:.4f} "
          f"(per round {r[-1] / rounds:.4f})")

# sanity: the coin only ever plays dominated actions
support = [(a, b) for a, b in zip(*np.nonzero(coin))]
print("\ncoin support:", [(ACTIONS[a], ACTIONS[b]) for a, b in support],
      "with payoffs", [payoff_pure(game, 0, p) for p in support])
