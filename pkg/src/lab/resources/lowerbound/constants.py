# -*- coding: utf-8 -*-

import math

## Witness pairs satisfy |f_i| + |g_i| <= WITNESS_BOUND on their cube:
WITNESS_BOUND = 1.0 + math.pi * math.sqrt(2.0)
WITNESS_PAIRS = 3

## Pipeline report CSV table of per-sample pairings:
PIPELINE_CSV_TABLE = "pipeline_samples"


__all__ = [
    "WITNESS_BOUND",
    "WITNESS_PAIRS",
    "PIPELINE_CSV_TABLE",
]
