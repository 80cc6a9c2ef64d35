# -*- coding: utf-8 -*-

import math

from lab.core.constants import ExperimentEnum


## Grid type an experiment runs on when the config leaves `grid.periodic` unset:
PERIODIC_DEFAULTS = {
    ExperimentEnum.identities: True,
    ExperimentEnum.jacobian: True,
    ExperimentEnum.scaling: True,
    ExperimentEnum.regimes: False,
    ExperimentEnum.lowerbound: False,
    ExperimentEnum.sparse: False,
}

TORUS_LENGTH = 2.0 * math.pi
SQUARE_LENGTH = 1.0

## Disk indicator refinement study on [-2, 2]^2:
DISK_DOMAIN_LENGTH = 4.0
DISK_INNER_RADIUS = 0.5
DISK_OUTER_RADIUS = 1.5
DISK_EDGE = 1.9

## |K(x,y)| |x-y|^2 of the Beurling kernel is 1/pi to roundoff:
KERNEL_BOUNDS_TOL = 1e-12

## Relative slack when a certified lower bound is compared with an upper envelope:
ENVELOPE_SLACK = 1e-9

MC_STDERR_FACTOR = 3.0

## Regime trends: Holder-matched lower bounds stable between refinements, divergent ones
## within a relative tolerance of the expected log-log slope:
REGIME_STABLE_RTOL = 0.1
REGIME_SLOPE_RTOL = 0.2

REPORT_FILE_SUFFIX = ".json"
CHECKS_TABLE = "checks"

## Leading key columns each CSV table is sorted by:
TABLE_SORT_KEYS = {
    CHECKS_TABLE: ["name"],
    "jacobian_trials": ["trial"],
    "regimes": ["p", "q", "symbol", "n"],
    "regime_trends": ["p", "q", "symbol"],
    "pipeline_samples": ["sample", "component"],
    "scaling": ["lambda"],
    "sparse_families": ["symbol"],
    "sparse_lp_ratios": ["symbol", "draw", "p"],
}


__all__ = [
    "PERIODIC_DEFAULTS",
    "TORUS_LENGTH",
    "SQUARE_LENGTH",
    "DISK_DOMAIN_LENGTH",
    "DISK_INNER_RADIUS",
    "DISK_OUTER_RADIUS",
    "DISK_EDGE",
    "KERNEL_BOUNDS_TOL",
    "ENVELOPE_SLACK",
    "MC_STDERR_FACTOR",
    "REGIME_STABLE_RTOL",
    "REGIME_SLOPE_RTOL",
    "REPORT_FILE_SUFFIX",
    "CHECKS_TABLE",
    "TABLE_SORT_KEYS",
]
