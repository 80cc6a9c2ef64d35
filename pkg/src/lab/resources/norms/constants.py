# -*- coding: utf-8 -*-

## Known L^s bound of the Beurling transform: ||S||_s <= BEURLING_LP_FACTOR * (max(s, s') - 1).
BEURLING_LP_FACTOR = 1.575

## Fixed probe set for the empirical L^s bound of S:
PROBE_SEEDS = (0, 1, 2, 3)
PROBE_BAND = 3
PROBE_DISK_RADIUS = 0.25

## Exponent relation 1/q = 1/r + 1/p must hold to this tolerance:
EXPONENT_RELATION_TOL = 1e-12

## Pairwise Holder seminorm is evaluated on at most this many nodes:
HOLDER_MAX_POINTS = 1024

BMO_MIN_CELLS = 2


__all__ = [
    "BEURLING_LP_FACTOR",
    "PROBE_SEEDS",
    "PROBE_BAND",
    "PROBE_DISK_RADIUS",
    "EXPONENT_RELATION_TOL",
    "HOLDER_MAX_POINTS",
    "BMO_MIN_CELLS",
]
