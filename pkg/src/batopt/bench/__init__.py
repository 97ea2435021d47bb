"""Benchmark harness: dataset IO, experiment configs, seeded comparisons."""

from .config import (
    BuiltObjective,
    ConfigError,
    ExperimentConfig,
    ObjectiveConfig,
    OptimizerChoice,
    build_objective,
    config_from_dict,
    load_config,
)
from .datasets import (
    BUILTIN_DATASETS,
    DatasetError,
    builtin_dataset_path,
    load_csv_dataset,
    save_events_csv,
    synth_glm_dataset,
    synth_hawkes_events,
    synth_two_state_dataset,
)
from .runner import ExperimentResult, RunRecord, replicate_seed, run_experiment
from .tables import ResultTable, TableRow, emit_table, parse_csv_table
