# -*- coding: utf-8 -*-

MIN_GRID_N = 8
MAX_GRID_N = 4096

## Field CSV file format:
FIELD_CSV_HEADER = ["n", "length", "periodic", "origin_re", "origin_im"]
FIELD_CSV_COLUMNS = ["re", "im"]
FIELD_CSV_FLOAT_FORMAT = "%.17g"

## One-sided fourth-order closures (numerators over 12h):
FD_EDGE_STENCIL = (-25.0, 48.0, -36.0, 16.0, -3.0)
FD_NEAR_EDGE_STENCIL = (-3.0, -10.0, 18.0, -6.0, 1.0)
FD_CENTRAL_STENCIL = (1.0, -8.0, 0.0, 8.0, -1.0)


__all__ = [
    "MIN_GRID_N",
    "MAX_GRID_N",
    "FIELD_CSV_HEADER",
    "FIELD_CSV_COLUMNS",
    "FIELD_CSV_FLOAT_FORMAT",
    "FD_EDGE_STENCIL",
    "FD_NEAR_EDGE_STENCIL",
    "FD_CENTRAL_STENCIL",
]
