"""Hourglass-pattern I/O lower bounds, pebble simulation and verification."""

from ._core import (
    CdagError,
    KernelError,
    PebbleError,
    ScheduleError,
    bounds,
    catalog,
    catalog_names,
    default_block,
    detect,
    evaluate_grid_expr,
    kernel_names,
    kernel_source,
    simulate,
    sweep_csv,
    verify_sampling,
)

__all__ = [
    "CdagError",
    "KernelError",
    "PebbleError",
    "ScheduleError",
    "bounds",
    "catalog",
    "catalog_names",
    "default_block",
    "detect",
    "evaluate_grid_expr",
    "kernel_names",
    "kernel_source",
    "simulate",
    "sweep_csv",
    "verify_sampling",
]
