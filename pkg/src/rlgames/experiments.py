"""Run orchestration: configs to trajectories, reports, and batch aggregates.

A single run writes ``trajectory.csv`` and ``report.json``. A batch expands
a grid init into one run per grid point (``run_000.csv``, ...) plus an
``aggregate.json`` with per-run convergence summaries. Every run's
randomness is derived from (master seed, run index), so outputs are
byte-identical across reruns regardless of thread count.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .analysis import check_limit_resilience, estimate_limit_set, fit_rate, regret
from .builtin import BUILTIN_GAMES, builtin_game
from .config import AUTO_FACES, ExperimentConfig
from .errors import ConfigError, DiagnosticError, InputError
from .faces import Face, check_face, distance_to_face, minimal_clubs
from .game import Game, load_game
from .learning import derive_run_seed, perturbation_stream, run
from .regularizers import kernel_from_name
from .trajectory import Trajectory, write_trajectory_csv

CONVERGENCE_THRESHOLD = 0.05
RESILIENCE_TOL = 0.02
THREADS_ENV = "RLGAMES_THREADS"


def load_game_spec(spec: str) -> Game:
    """Resolve a config game field: builtin name first, then file path."""
    if spec in BUILTIN_GAMES:
        return builtin_game(spec)
    if Path(spec).exists():
        return load_game(spec)
    raise InputError(
        f"game {spec!r} is neither a builtin ({', '.join(sorted(BUILTIN_GAMES))}) "
        "nor a readable file"
    )


def resolve_faces(game: Game, spec) -> list[Face]:
    """Turn a config faces field into checked Face objects."""
    if spec == AUTO_FACES:
        return minimal_clubs(game)
    return [check_face(game, Face(supports=s)) for s in spec]


def _perturbed_starts(config: ExperimentConfig, game: Game):
    """All (run_seed, y0) pairs the config expands to, in grid order."""
    bases = config.init.base_starts(game)
    radius = config.init.perturbation_radius
    out = []
    for index, base in enumerate(bases):
        seed = derive_run_seed(config.seed, index)
        if radius > 0:
            stream = perturbation_stream(seed)
            y0 = [y + stream.uniform(-radius, radius, y.shape[0]) for y in base]
        else:
            y0 = [y.copy() for y in base]
        out.append((seed, y0))
    return out


def _face_key(face: Face) -> str:
    return "x".join("{" + ",".join(str(a) for a in s) + "}" for s in face.supports)


def _rate_fit_entry(traj, face, kernel):
    try:
        fit = fit_rate(traj, face, kernel)
    except DiagnosticError as exc:
        return {"face": _face_key(face), "error": str(exc)}
    return {
        "face": _face_key(face),
        "model": fit.model,
        "hit_index": fit.hit_index,
        "slope": fit.slope,
        "intercept": fit.intercept,
        "shift": fit.shift,
        "r_squared": fit.r_squared,
        "n_points": fit.n_points,
    }


def diagnostic_report(game: Game, traj: Trajectory, kernel, faces) -> dict:
    """The per-run JSON report: regret, rate fits, limit set, resilience."""
    final_regret = [float(regret(traj, game, i)[-1]) for i in range(game.n_players)]
    limits = estimate_limit_set(traj)
    resilience = check_limit_resilience(traj, game, tol=RESILIENCE_TOL)
    return {
        "horizon": traj.horizon,
        "seed": traj.seed,
        "kernel": traj.kernel_name,
        "feedback": traj.feedback_label,
        "regret_final": final_regret,
        "rate_fit": [_rate_fit_entry(traj, f, kernel) for f in faces],
        "limit_set": {
            "window_fraction": limits.window_fraction,
            "epsilon": limits.epsilon,
            "n_points": len(limits.points),
            "points": [[x.tolist() for x in p] for p in limits.points],
        },
        "resilience": {
            "resilient": resilience.resilient,
            "tol": resilience.tol,
            "min_gap": min(resilience.gaps),
        },
        "tracked_faces": [_face_key(f) for f in faces],
        "final_distances": {
            _face_key(f): distance_to_face(game, traj.final_profile(), f)
            for f in faces
        },
    }


def run_experiment(config: ExperimentConfig, out_dir=None):
    """Execute a single-run config; returns (trajectory, report).

    Writes ``trajectory.csv`` and ``report.json`` under ``out_dir`` (or the
    config's own output field) when a directory is given.
    """
    game = load_game_spec(config.game)
    kernel = kernel_from_name(config.kernel)
    starts = _perturbed_starts(config, game)
    if len(starts) != 1:
        raise ConfigError(
            f"config expands to {len(starts)} initial points; single runs need "
            "exactly one (use batch for grids)"
        )
    seed, y0 = starts[0]
    traj = run(game, kernel, config.feedback, config.step, config.horizon,
               y0=y0, seed=seed)
    faces = resolve_faces(game, config.faces)
    report = diagnostic_report(game, traj, kernel, faces)

    target = out_dir if out_dir is not None else config.output
    if target is not None:
        target = Path(target)
        target.mkdir(parents=True, exist_ok=True)
        write_trajectory_csv(traj, target / "trajectory.csv", faces=faces)
        with open(target / "report.json", "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    return traj, report


def _thread_count(n_jobs: int) -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        cap = os.cpu_count() or 1
    else:
        try:
            cap = int(raw)
        except ValueError:
            cap = -1
        if cap < 1:
            raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return max(1, min(cap, n_jobs))


def execute_batch(config: ExperimentConfig, out_dir=None):
    """Run every grid point of a batch config, optionally writing CSVs.

    Returns (per_run summaries in grid order, aggregate dict). Trajectories
    are dropped as soon as their summary is computed.
    """
    game = load_game_spec(config.game)
    kernel = kernel_from_name(config.kernel)
    faces = resolve_faces(game, config.faces)
    starts = _perturbed_starts(config, game)
    target = Path(out_dir) if out_dir is not None else None
    if target is not None:
        target.mkdir(parents=True, exist_ok=True)

    def one(job):
        index, (seed, y0) = job
        traj = run(game, kernel, config.feedback, config.step, config.horizon,
                   y0=y0, seed=seed)
        if target is not None:
            write_trajectory_csv(traj, target / f"run_{index:03d}.csv", faces=faces)
        distances = {
            _face_key(f): distance_to_face(game, traj.final_profile(), f)
            for f in faces
        }
        min_dist = min(distances.values()) if distances else float("inf")
        resilience = check_limit_resilience(traj, game, tol=RESILIENCE_TOL)
        return {
            "run": index,
            "seed": seed,
            "final_distances": distances,
            "min_distance": min_dist,
            "converged": bool(min_dist <= CONVERGENCE_THRESHOLD),
            "resilient": resilience.resilient,
        }

    jobs = list(enumerate(starts))
    workers = _thread_count(len(jobs))
    if workers == 1:
        summaries = [one(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(one, jobs))

    converged = sum(s["converged"] for s in summaries)
    aggregate = {
        "game": config.game,
        "kernel": config.kernel,
        "feedback": config.feedback.label,
        "horizon": config.horizon,
        "master_seed": config.seed,
        "runs": len(summaries),
        "tracked_faces": [_face_key(f) for f in faces],
        "convergence_threshold": CONVERGENCE_THRESHOLD,
        "converged_runs": converged,
        "convergence_fraction": converged / len(summaries),
        "all_resilient": all(s["resilient"] for s in summaries),
        "per_run": summaries,
    }
    return summaries, aggregate


def run_batch(config: ExperimentConfig, out_dir=None):
    """Execute a batch and write per-run CSVs plus ``aggregate.json``."""
    target = out_dir if out_dir is not None else config.output
    summaries, aggregate = execute_batch(config, out_dir=target)
    if target is not None:
        with open(Path(target) / "aggregate.json", "w", encoding="utf-8") as fh:
            json.dump(aggregate, fh, indent=2)
            fh.write("\n")
    return summaries, aggregate
