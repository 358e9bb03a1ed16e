"""Quasiconvex envelopes of gridded functions by directional line sweeps."""

from .directions import DirectionSet, directional_resolution, lattice_directions
from .envelope1d import RobustParams, Seq, qce_1d, robust_qce_1d
from .grid import GridFn, GridFormatError, build, min_info, read_grid, write_grid
from .linesweep import SolveParams, SolveReport, apply_direction, robust_solve, solve
from .oracles import dqce_oracle, qc_violation, robust_qc_violation

__version__ = "0.1.0"

__all__ = [
    "DirectionSet", "GridFn", "GridFormatError", "RobustParams", "Seq",
    "SolveParams", "SolveReport", "apply_direction", "build", "directional_resolution",
    "dqce_oracle", "lattice_directions", "min_info", "qc_violation", "qce_1d",
    "read_grid", "robust_qc_violation", "robust_qce_1d", "robust_solve", "solve",
    "write_grid",
]
