"""Projection-free online learning: Frank-Wolfe learners that replace
projections with linear minimization, plus the measurement harness used
to study them.

Layering, bottom up:

* ``geometry``   feasible sets and their linear minimization oracles
* ``oracles``    loss models, per-round losses, stochastic gradients
* ``estimators`` gradient estimators shared by all learners
* ``stream``     datasets and per-round batch schedules
* ``algorithms`` the online learners themselves
* ``metrics``    comparators, regret curves, the regret bound
* ``verify``     numerical checks for the supporting lemmas
* ``cli``        config-driven experiment runner (``onlinefw`` script)
"""

from .algorithms import (
    ALGORITHMS,
    FtplState,
    LearnerConfig,
    LearnerState,
    ftpl_feedback,
    ftpl_init,
    ftpl_predict,
    init_state,
    morgfw_round,
    ofw_step,
    orgfw_step,
    osfw_step,
    resolve_inner_steps,
    run,
)
from .estimators import (
    EstimatorKind,
    EstimatorState,
    ScheduleSpec,
    estimator_error,
    estimator_init,
    estimator_update,
    rho,
)
from .geometry import ColumnL1Ball, FeasibleSet, L2Ball, ProductSet, Simplex
from .metrics import (
    BoundParams,
    Comparator,
    RoundRecord,
    attach_regret,
    fw_gap,
    regret_curve,
    solve_comparator,
    theoretical_regret_bound,
)
from .oracles import (
    AdditiveGaussian,
    MinibatchSubsample,
    MulticlassLogistic,
    OneHiddenNN,
    RoundLoss,
    Sample,
    SyntheticQuadratic,
    empirical_lipschitz,
    empirical_noise_bound,
)
from .stream import (
    Dataset,
    Stream,
    build_stream,
    load_cifar10,
    load_csv,
    load_idx,
    save_csv,
    synthetic_dataset,
)
from .verify import (
    CheckResult,
    SequenceProbe,
    SlopeFit,
    concentration_probe,
    finite_difference_check,
    fit_regret_slope,
    product_identity_check,
    sequence_direct_sum,
    sequence_lemma_check,
    verification_battery,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "AdditiveGaussian",
    "BoundParams",
    "CheckResult",
    "ColumnL1Ball",
    "Comparator",
    "Dataset",
    "EstimatorKind",
    "EstimatorState",
    "FeasibleSet",
    "FtplState",
    "L2Ball",
    "LearnerConfig",
    "LearnerState",
    "MinibatchSubsample",
    "MulticlassLogistic",
    "OneHiddenNN",
    "ProductSet",
    "RoundLoss",
    "RoundRecord",
    "Sample",
    "ScheduleSpec",
    "SequenceProbe",
    "Simplex",
    "SlopeFit",
    "Stream",
    "SyntheticQuadratic",
    "attach_regret",
    "build_stream",
    "concentration_probe",
    "empirical_lipschitz",
    "empirical_noise_bound",
    "estimator_error",
    "estimator_init",
    "estimator_update",
    "finite_difference_check",
    "fit_regret_slope",
    "ftpl_feedback",
    "ftpl_init",
    "ftpl_predict",
    "fw_gap",
    "init_state",
    "load_cifar10",
    "load_csv",
    "load_idx",
    "morgfw_round",
    "ofw_step",
    "orgfw_step",
    "osfw_step",
    "product_identity_check",
    "regret_curve",
    "resolve_inner_steps",
    "rho",
    "run",
    "save_csv",
    "sequence_direct_sum",
    "sequence_lemma_check",
    "solve_comparator",
    "synthetic_dataset",
    "theoretical_regret_bound",
    "verification_battery",
]
