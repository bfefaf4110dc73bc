"""Homodyne-measured two-level atom with quantum feedback."""

from ._core import (
    BlochVector,
    EnsemblePoint,
    FeedbackLaw,
    HomodyneConfig,
    MeasurementOutcome,
    PureState,
    Rng,
    SimConfig,
    StepRecord,
    UpdateMode,
    angle_of,
    bloch_from_state,
    cli_run,
    combined_diffusion_step,
    conditioned_update_exact,
    diffusion_step_first_order,
    feedback_amplitude,
    fidelity,
    master_evolve,
    run_ensemble,
    run_trajectory,
    sample_outcome,
    state_from_bloch,
    __version__,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
