"""Service-mesh routing and admission control with a learned delay surrogate."""

from ._core import (
    Action,
    ActionGrid,
    ConfigError,
    GroundTruthParams,
    LoadPattern,
    ManagementObjective,
    ModelAccuracy,
    ObjectiveKind,
    OracleResult,
    ScenarioConfig,
    StepOutcome,
    SystemModel,
    Trace,
    carried_load,
    collect_trace_grid,
    collect_trace_random,
    evaluate_model,
    expected_step,
    fit_system_model,
    ground_truth_step,
    normalized_reward,
    optimal_ground_truth,
    optimal_surrogate,
    reward,
    run_pipeline,
)

__version__ = "0.1.0"
