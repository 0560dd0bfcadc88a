"""Weil-Petersson volume polynomials, evaluated at cone-angle boundary data."""
from .exactpoly import PiScalar, VolumePolynomial
from .volumes import UnstableError, VolumeTable, compute_volume, volume, volume_table_up_to
from .chambers import BoundaryLabel, ChamberReport, Validity, classify_validity, parse_labels

__all__ = [
    "PiScalar",
    "VolumePolynomial",
    "UnstableError",
    "VolumeTable",
    "compute_volume",
    "volume",
    "volume_table_up_to",
    "BoundaryLabel",
    "ChamberReport",
    "Validity",
    "classify_validity",
    "parse_labels",
]

__version__ = "0.1.0"
