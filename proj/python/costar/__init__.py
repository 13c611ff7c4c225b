"""Co-starring network analysis: projections, swap-null index, dyad-independent ERGMs."""

from ._costar import (
    ConfigError,
    DataError,
    Dataset,
    Error,
    Network,
    NumericError,
    Period,
    cross_region_index,
    fit_ergm,
    load_dataset,
    make_schedule,
    project,
    run_cli,
)

__all__ = [
    "ConfigError",
    "DataError",
    "Dataset",
    "Error",
    "Network",
    "NumericError",
    "Period",
    "cross_region_index",
    "fit_ergm",
    "load_dataset",
    "make_schedule",
    "project",
    "run_cli",
]
