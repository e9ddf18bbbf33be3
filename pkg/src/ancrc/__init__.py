"""Numerical crepant-resolution correspondence for the A_n singularity and its resolution.

Closed and open CRC maps, the Landau-Ginzburg mirror with its twisted periods,
quantum cohomology of the resolution, calibration asymptotics and a seeded
verification suite that cross-checks each identity by an independent route.
"""

from .geometry import AnGeometry, CohVector, DiskConfig, sample_geometry
from .mirror import HurwitzPoint
from .report import VerificationReport, emit_report, parse_report
from .series import LaurentZ
from .suite import SuiteConfig, run_suite

__version__ = "0.1.0"

__all__ = [
    "AnGeometry",
    "CohVector",
    "DiskConfig",
    "HurwitzPoint",
    "LaurentZ",
    "SuiteConfig",
    "VerificationReport",
    "emit_report",
    "parse_report",
    "run_suite",
    "sample_geometry",
]
