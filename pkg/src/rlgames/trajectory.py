"""Time-indexed run records and their CSV interchange format.

A Trajectory stores everything a driver produced, step by step: played
profiles, scores, surrogate gain vectors with their bias/noise split, and
per-player instantaneous regret summands. The CSV format is a strict
subset with a fixed column order:

    n, gamma, tau,
    x_<player>_<action> ... (player-major, action-major),
    realized_<player> ...   (-1 when the run had no sampling),
    regret_<player> ...     (instantaneous summands),
    dist_<k> ...            (one column per tracked face)

Floats are written with 17 significant digits, which round-trips IEEE
doubles exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .faces import Face

_FMT = "{:.17g}"


@dataclass
class Trajectory:
    """Complete record of one learning run."""

    n_actions: tuple[int, ...]
    kernel_name: str
    feedback_label: str
    seed: int
    y0: np.ndarray  # flat initial scores
    n: np.ndarray  # (T,) step indices, 1-based
    gamma: np.ndarray  # (T,)
    tau: np.ndarray  # (T,) running sum of gamma
    x: np.ndarray  # (T, D) played profiles, flattened player-major
    scores: np.ndarray  # (T, D) scores y_n matching x rows
    vhat: np.ndarray  # (T, D) surrogate gains
    bias: np.ndarray  # (T, D)
    noise: np.ndarray  # (T, D)
    realized: np.ndarray  # (T, N) sampled actions, -1 when not sampled
    gaps: np.ndarray  # (T, N) per-player instantaneous regret summands
    offsets: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        offs = [0]
        for m in self.n_actions:
            offs.append(offs[-1] + int(m))
        self.offsets = tuple(offs)

    @property
    def n_players(self) -> int:
        return len(self.n_actions)

    @property
    def dim(self) -> int:
        return self.offsets[-1]

    @property
    def horizon(self) -> int:
        return len(self.n)

    def player_slice(self, i: int) -> slice:
        if not 0 <= i < self.n_players:
            raise InputError(f"player index {i} out of range")
        return slice(self.offsets[i], self.offsets[i + 1])

    def profile_at(self, k: int) -> list[np.ndarray]:
        row = self.x[k]
        return [row[self.player_slice(i)].copy() for i in range(self.n_players)]

    def final_profile(self) -> list[np.ndarray]:
        return self.profile_at(-1)


def face_distances(traj: Trajectory, face: Face) -> np.ndarray:
    """Outside-support mass of every recorded profile, as a (T,) series."""
    if face.n_players != traj.n_players:
        raise InputError("face and trajectory disagree on the number of players")
    cols = []
    for i, sub in enumerate(face.supports):
        if sub[-1] >= traj.n_actions[i]:
            raise InputError(f"face support for player {i} is out of range")
        s = traj.player_slice(i)
        outside = [s.start + a for a in range(traj.n_actions[i]) if a not in sub]
        cols.extend(outside)
    if not cols:
        return np.zeros(traj.horizon)
    return traj.x[:, cols].sum(axis=1)


def csv_header(traj: Trajectory, n_faces: int = 0) -> list[str]:
    head = ["n", "gamma", "tau"]
    for i, m in enumerate(traj.n_actions):
        head.extend(f"x_{i}_{a}" for a in range(m))
    head.extend(f"realized_{i}" for i in range(traj.n_players))
    head.extend(f"regret_{i}" for i in range(traj.n_players))
    head.extend(f"dist_{k}" for k in range(n_faces))
    return head


def write_trajectory_csv(traj: Trajectory, path, faces=()) -> None:
    """Write the contracted CSV columns; `faces` adds one distance column each."""
    faces = list(faces)
    dists = [face_distances(traj, f) for f in faces]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(csv_header(traj, len(faces)))
        for k in range(traj.horizon):
            row = [str(int(traj.n[k])), _FMT.format(traj.gamma[k]), _FMT.format(traj.tau[k])]
            row.extend(_FMT.format(v) for v in traj.x[k])
            row.extend(str(int(a)) for a in traj.realized[k])
            row.extend(_FMT.format(v) for v in traj.gaps[k])
            row.extend(_FMT.format(d[k]) for d in dists)
            writer.writerow(row)


def read_trajectory_csv(path) -> dict[str, np.ndarray]:
    """Read a trajectory CSV back into {column name: array} (ints stay ints)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError("trajectory CSV is empty") from None
        rows = list(reader)
    if not rows:
        raise InputError("trajectory CSV has a header but no rows")
    out: dict[str, np.ndarray] = {}
    columns = list(zip(*rows))
    if len(columns) != len(header):
        raise InputError("trajectory CSV rows do not match the header")
    for name, col in zip(header, columns):
        if name == "n" or name.startswith("realized_"):
            out[name] = np.array([int(v) for v in col], dtype=np.int64)
        else:
            out[name] = np.array([float(v) for v in col], dtype=float)
    return out
