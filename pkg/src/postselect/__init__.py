"""Post-selection on binary input/output boxes.

Boxes, Boolean post-selection functions, conditioning, signaling and locality
diagnostics, a trial-dropping adversary, the post-selected 3SAT machine and two
scripted demonstrations.
"""
from ._accel import backend
from .adversary import (
    EveProtocol,
    TrialLog,
    faked_value,
    max_faking_efficiency,
    required_acceptance,
    security_margin,
    simulate_trials,
)
from .analysis import (
    CHSH,
    chsh_value,
    classify,
    game_value,
    locality_class,
    mutual_information,
    signaling_profile,
    sweep_classify,
    table_report,
)
from .behavior import Behavior, JointDist, canonical, load_box, marginal_pair, mix, white_noise
from .boolfn import TruthTable, as_function, complement, named, parse_expr
from .errors import (
    DimacsError,
    ExpressionError,
    NoPostSelectionNeeded,
    PostSelectError,
    ShapeError,
    TotalRejection,
    UndefinedSettingError,
)
from .postrp import CnfFormula, count_models, decide, exact_conditional, expected_runs, parse_dimacs, run_machine
from .psd import PsdResult, complement_report, condition, efficiency, f_box, orthogonality_class
from .scenarios import ScenarioReport, run_pigeonhole_demo, run_signaling_demo

__version__ = "0.1.0"
