"""Faces of the strategy polytope and setwise stability tests.

A face is a product of nonempty pure-action subsets, one per player. The
closedness test (`is_club`) asks that every action outside a player's
subset earn strictly less than every action inside it against every pure
profile the other players can form inside the face; because payoffs are
multilinear in the opponents' mixtures, checking the pure vertices of the
opposing face is exact. `is_curb` checks the coarser best-reply closure on
a finite grid over the opposing face. `is_resilient` solves, per player,
a small minimax LP certifying that no prepared mixture beats the face's
candidate points uniformly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InputError, ResourceLimitError
from .game import Game, check_profile, payoff_mixed, payoff_vector
from .minimax_lp import solve_minimax_lp

MAX_FACES_DEFAULT = 1_000_000


@dataclass(frozen=True)
class Face:
    """Product of per-player action subsets, canonically sorted."""

    supports: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        canon = []
        for i, sub in enumerate(self.supports):
            acts = tuple(sorted(int(a) for a in sub))
            if not acts:
                raise InputError(f"support for player {i} is empty")
            if len(set(acts)) != len(acts):
                raise InputError(f"support for player {i} repeats an action")
            canon.append(acts)
        object.__setattr__(self, "supports", tuple(canon))

    @property
    def n_players(self) -> int:
        return len(self.supports)

    def size(self) -> int:
        return sum(len(s) for s in self.supports)

    def contains(self, other: "Face") -> bool:
        """True when every support of `other` sits inside this face's."""
        if self.n_players != other.n_players:
            raise InputError("faces belong to games of different player counts")
        return all(
            set(o).issubset(set(s)) for s, o in zip(self.supports, other.supports)
        )


@dataclass(frozen=True)
class DeviationVector:
    """A single unilateral swap: `player` moves mass from `inside` to `outside`."""

    player: int
    inside: int
    outside: int


def check_face(game: Game, face: Face) -> Face:
    if face.n_players != game.n_players:
        raise InputError(
            f"face has {face.n_players} supports, game has {game.n_players} players"
        )
    for i, sub in enumerate(face.supports):
        if sub[-1] >= game.n_actions[i]:
            raise InputError(f"face support for player {i} mentions action {sub[-1]}, "
                             f"but the player has {game.n_actions[i]} actions")
    return face


def face_from_lists(supports) -> Face:
    return Face(supports=tuple(tuple(int(a) for a in s) for s in supports))


def singleton_face(game: Game, actions) -> Face:
    face = face_from_lists([[a] for a in actions])
    return check_face(game, face)


def full_face(game: Game) -> Face:
    return Face(supports=tuple(tuple(range(m)) for m in game.n_actions))


# ---------------------------------------------------------------------------
# geometry


def distance_to_face(game: Game, profile, face: Face) -> float:
    """Total probability mass the profile puts outside the face's supports."""
    xs = check_profile(game, profile)
    check_face(game, face)
    total = 0.0
    for i, x in enumerate(xs):
        inside = np.zeros(game.n_actions[i], dtype=bool)
        inside[list(face.supports[i])] = True
        total += float(x[~inside].sum())
    return total


def deviation_vectors(game: Game, face: Face) -> list[DeviationVector]:
    """All (player, inside, outside) swaps leaving the face, in index order."""
    check_face(game, face)
    out = []
    for i in range(game.n_players):
        inside = face.supports[i]
        outside = [b for b in range(game.n_actions[i]) if b not in inside]
        for a in inside:
            for b in outside:
                out.append(DeviationVector(player=i, inside=a, outside=b))
    return out


# ---------------------------------------------------------------------------
# closedness under better replies


def _club_tables(game: Game):
    """Per player: D_i[b, a, opp profile axes] = u_i(b; .) - u_i(a; .)."""
    tables = []
    for i in range(game.n_players):
        u = np.moveaxis(game.payoffs[i], i, 0)
        tables.append(u[:, None] - u[None, :])
    return tables


def club_margin(game: Game, face: Face, tables=None) -> float:
    """Worst-case inside-minus-outside payoff gap over the face's vertices.

    Positive means every outside action loses strictly to every inside
    action at every vertex of the opposing face; the face is closed under
    better replies exactly when the margin is positive. The full face has
    no deviations and gets +inf.
    """
    check_face(game, face)
    if tables is None:
        tables = _club_tables(game)
    margin = np.inf
    for i in range(game.n_players):
        inside = list(face.supports[i])
        outside = [b for b in range(game.n_actions[i]) if b not in face.supports[i]]
        if not outside:
            continue
        opp = [list(face.supports[j]) for j in range(game.n_players) if j != i]
        sub = tables[i][np.ix_(outside, inside, *opp)]
        margin = min(margin, float(-sub.max()))
    return float(margin)


def is_club(game: Game, face: Face, tables=None) -> bool:
    """Closed under better replies (strict vertex test; ties fail)."""
    return club_margin(game, face, tables=tables) > 0.0


def enumerate_clubs(game: Game, max_faces: int = MAX_FACES_DEFAULT) -> list[Face]:
    """Every club face, sorted by total support size then lexicographically.

    Raises ResourceLimitError if the face lattice exceeds `max_faces`.
    """
    total = 1
    for m in game.n_actions:
        total *= (1 << m) - 1
        if total > max_faces:
            raise ResourceLimitError(
                f"face lattice has more than {max_faces} faces; "
                "raise max_faces to enumerate anyway"
            )
    tables = _club_tables(game)
    subsets = []
    for m in game.n_actions:
        subs = []
        for r in range(1, m + 1):
            subs.extend(itertools.combinations(range(m), r))
        subsets.append(subs)
    found = []
    for combo in itertools.product(*subsets):
        face = Face(supports=combo)
        if is_club(game, face, tables=tables):
            found.append(face)
    found.sort(key=lambda f: (f.size(), f.supports))
    return found


def minimal_clubs(game: Game, max_faces: int = MAX_FACES_DEFAULT) -> list[Face]:
    """Clubs containing no strictly smaller club."""
    clubs = enumerate_clubs(game, max_faces=max_faces)
    out = []
    for f in clubs:
        if not any(g is not f and f.contains(g) for g in clubs):
            out.append(f)
    return out


# ---------------------------------------------------------------------------
# best-reply closure on a grid


@lru_cache(maxsize=None)
def _simplex_grid(dim: int, resolution: int) -> tuple[tuple[float, ...], ...]:
    """All points of the `dim`-simplex with coordinates k/resolution."""
    pts = []
    for combo in itertools.combinations(range(resolution + dim - 1), dim - 1):
        counts = []
        prev = -1
        for c in combo:
            counts.append(c - prev - 1)
            prev = c
        counts.append(resolution + dim - 2 - prev)
        pts.append(tuple(k / resolution for k in counts))
    return tuple(pts)


def is_curb(game: Game, face: Face, grid_resolution: int = 8) -> bool:
    """Approximate best-reply closure over a grid of opposing mixtures.

    For every grid mixture supported on the opposing face, the best payoff
    inside each player's support must strictly beat the best outside. The
    grid includes all vertices, so a face that already fails the vertex
    test fails here too; grid refinement only tightens the interior check.
    """
    check_face(game, face)
    if grid_resolution < 2:
        raise InputError("grid resolution must be at least 2")
    for i in range(game.n_players):
        inside = list(face.supports[i])
        outside = [b for b in range(game.n_actions[i]) if b not in face.supports[i]]
        if not outside:
            continue
        opp_grids = []
        for j in range(game.n_players):
            if j == i:
                continue
            pts = _simplex_grid(len(face.supports[j]), grid_resolution)
            full = []
            for p in pts:
                v = np.zeros(game.n_actions[j])
                v[list(face.supports[j])] = p
                full.append(v)
            opp_grids.append((j, full))
        order = [j for j, _ in opp_grids]
        for choice in itertools.product(*(g for _, g in opp_grids)):
            xs = [None] * game.n_players
            for j, v in zip(order, choice):
                xs[j] = v
            xs[i] = np.full(game.n_actions[i], 1.0 / game.n_actions[i])
            v = payoff_vector(game, i, xs)
            if v[outside].max() >= v[inside].max():
                return False
    return True


# ---------------------------------------------------------------------------
# resilience


@dataclass(frozen=True)
class ResilienceReport:
    """Per-player minimax certificates for a candidate point set."""

    resilient: bool
    tol: float
    gaps: tuple[float, ...]
    witnesses: tuple[np.ndarray, ...]  # minimizing prepared mixture per player
    statuses: tuple[str, ...]


def is_resilient(game: Game, points, tol: float = 0.0) -> ResilienceReport:
    """Decide whether a finite point set defends every player's payoff.

    For each player the LP computes min over prepared mixtures z of the
    best excess max_x [u_i(x) - <v_i(x), z>] across the candidate points x.
    Nonnegative gaps (within `tol`) for all players certify that no fixed
    mixture beats the set uniformly.
    """
    if tol < 0:
        raise InputError("tolerance must be nonnegative")
    pts = [check_profile(game, p) for p in points]
    if not pts:
        raise InputError("at least one candidate point is required")
    gaps = []
    witnesses = []
    statuses = []
    for i in range(game.n_players):
        pieces = []
        for xs in pts:
            c = payoff_mixed(game, i, xs)
            a = payoff_vector(game, i, xs)
            pieces.append((c, a))
        value, z = solve_minimax_lp(pieces, game.n_actions[i])
        gaps.append(value)
        witnesses.append(z)
        statuses.append("solved")
    resilient = all(g >= -tol for g in gaps)
    return ResilienceReport(
        resilient=resilient,
        tol=tol,
        gaps=tuple(gaps),
        witnesses=tuple(witnesses),
        statuses=tuple(statuses),
    )
