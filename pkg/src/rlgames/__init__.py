"""Finite normal-form games, set stability audits, and regularized learning.

The package splits into a game layer (payoff tensors and equilibrium
queries), a face layer (product subsets of the strategy space and the
closedness / robustness tests that single them out), a regularizer layer
(mirror maps from convex kernels on the simplex), a learning layer (the
score-based update template with several feedback models), and an analysis
layer (regret, energies, limit sets, and convergence-rate fits). The
``experiments`` and ``cli`` modules wrap everything for batch use.
"""

from .errors import (
    ConfigError,
    DiagnosticError,
    InputError,
    NumericError,
    ResourceLimitError,
    RLGamesError,
    SolverError,
)
from .game import (
    Game,
    best_replies,
    check_distribution,
    check_profile,
    check_strategy,
    deviation_gap,
    deviation_gaps,
    enumerate_pure_nash,
    game_from_dict,
    game_to_dict,
    game_to_json,
    load_game,
    make_game,
    payoff_bound,
    payoff_mixed,
    payoff_pure,
    payoff_vector,
    payoff_vectors,
    product_distribution,
    pure_profile,
    random_game,
    save_game,
    strictly_dominated_pure,
)
from .builtin import builtin_game, list_builtin
from .faces import (
    DeviationVector,
    Face,
    ResilienceReport,
    check_face,
    club_margin,
    deviation_vectors,
    distance_to_face,
    enumerate_clubs,
    face_from_lists,
    full_face,
    is_club,
    is_curb,
    is_resilient,
    minimal_clubs,
    singleton_face,
)
from .regularizers import (
    Kernel,
    choice_map,
    choice_map_profile,
    conjugate,
    fenchel_coupling,
    kernel_from_name,
    rate_function,
    strong_convexity,
)
from .learning import (
    Bandit,
    Clairvoyant,
    Full,
    LearnerState,
    MirrorProx,
    Optimistic,
    Schedule,
    StepRecord,
    derive_run_seed,
    explored_profile,
    init_state,
    iwe,
    lipschitz_estimate,
    perturbation_stream,
    player_stream,
    run,
    sample_actions,
    step,
    uniform_at,
    uniform_table,
)
from .trajectory import (
    Trajectory,
    face_distances,
    read_trajectory_csv,
    write_trajectory_csv,
)
from .analysis import (
    LimitSetEstimate,
    RateFit,
    check_limit_resilience,
    distance_series,
    energy_series,
    estimate_limit_set,
    fit_rate,
    regret,
    regret_from_distributions,
)
from .config import (
    AUTO_FACES,
    ExperimentConfig,
    ExplicitInit,
    GridInit,
    config_from_dict,
    config_from_json,
)
from .experiments import run_batch, run_experiment

__version__ = "0.1.0"

__all__ = [
    "AUTO_FACES",
    "Bandit",
    "Clairvoyant",
    "ConfigError",
    "DeviationVector",
    "DiagnosticError",
    "ExperimentConfig",
    "ExplicitInit",
    "Face",
    "Full",
    "Game",
    "GridInit",
    "InputError",
    "Kernel",
    "LearnerState",
    "LimitSetEstimate",
    "MirrorProx",
    "NumericError",
    "Optimistic",
    "RLGamesError",
    "RateFit",
    "ResilienceReport",
    "ResourceLimitError",
    "Schedule",
    "SolverError",
    "StepRecord",
    "Trajectory",
    "best_replies",
    "builtin_game",
    "check_distribution",
    "check_face",
    "check_limit_resilience",
    "check_profile",
    "check_strategy",
    "choice_map",
    "choice_map_profile",
    "club_margin",
    "config_from_dict",
    "config_from_json",
    "conjugate",
    "derive_run_seed",
    "deviation_gap",
    "deviation_gaps",
    "deviation_vectors",
    "distance_series",
    "distance_to_face",
    "energy_series",
    "enumerate_clubs",
    "enumerate_pure_nash",
    "estimate_limit_set",
    "explored_profile",
    "face_distances",
    "face_from_lists",
    "fenchel_coupling",
    "fit_rate",
    "full_face",
    "game_from_dict",
    "game_to_dict",
    "game_to_json",
    "init_state",
    "is_club",
    "is_curb",
    "is_resilient",
    "iwe",
    "kernel_from_name",
    "lipschitz_estimate",
    "perturbation_stream",
    "player_stream",
    "list_builtin",
    "load_game",
    "make_game",
    "minimal_clubs",
    "payoff_bound",
    "payoff_mixed",
    "payoff_pure",
    "payoff_vector",
    "payoff_vectors",
    "product_distribution",
    "pure_profile",
    "random_game",
    "rate_function",
    "read_trajectory_csv",
    "regret",
    "regret_from_distributions",
    "run",
    "run_batch",
    "run_experiment",
    "sample_actions",
    "save_game",
    "singleton_face",
    "step",
    "uniform_at",
    "uniform_table",
    "strictly_dominated_pure",
    "strong_convexity",
    "write_trajectory_csv",
]
