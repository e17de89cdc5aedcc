"""Reproducible restoration experiments: noise, metrics, image I/O, runs."""

from .config import read_config_file
from .imageio import load_standin, read_image, write_image
from .metrics import relative_error, snr
from .noise import add_gaussian_white, add_salt_pepper
from .runner import (
    SUMMARY_HEADER,
    TABLES,
    TRACE_HEADER,
    BlurSpec,
    ExperimentConfig,
    ExperimentResult,
    NoiseSpec,
    preset,
    run_experiment,
    table_configs,
    with_overrides,
    write_summary_csv,
    write_trace_csv,
)
