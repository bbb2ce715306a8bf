from .harness import ExperimentConfig, ExperimentReport, proportion, run_trials, wilson_interval
from .runs import (
    end_to_end,
    estimate_phase_flip,
    estimate_ptau,
    read_instance,
    run_experiment,
    solve_instance,
    sv_success_sweep,
    sv_timing_bench,
)
