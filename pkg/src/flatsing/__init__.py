"""Normal forms, area growth and symmetries of isolated flat conical-type singularities."""

from .area import AreaScan, annulus_area, growth_scan, invariance_check
from .classify import (Conical, CoordinateChange, Cylindrical, LogPole, apply_change,
                       classify, pushforward, roundtrip_residual)
from .devmap import (DevelopingMap, MetricDensity, density_of, density_residual,
                     flatness_residual)
from .errors import FlatsingError, SchemaError
from .series import LaurentSeries
from .symmetry import SymmetryElement, compose_elements, element_to_change, verify_invariance

__all__ = [
    "AreaScan", "Conical", "CoordinateChange", "Cylindrical", "DevelopingMap",
    "FlatsingError", "LaurentSeries", "LogPole", "MetricDensity", "SchemaError",
    "SymmetryElement", "annulus_area", "apply_change", "classify", "compose_elements",
    "density_of", "density_residual", "element_to_change", "flatness_residual",
    "growth_scan", "invariance_check", "pushforward", "roundtrip_residual",
    "verify_invariance",
]
