"""slowdet - explicit determinant-method bounds for slow curves

Rational points of bounded height on transcendental curves with a slow
parametrization: certificates, the explicit global bound, point scans,
covering plans and Bezout audits.
"""

from slowdet.bounds import BoundMode, BoundReport, global_bound
from slowdet.catalog import CurveSpec, catalog_curve
from slowdet.config import RunConfig, load_config
from slowdet.covering import CoveringPlan, build_covering_plan, compact_bound
from slowdet.error import ErrorCode, SlowdetError
from slowdet.points import RationalPoint, ScanResult, scan_points
from slowdet.slow import HeightControl, SlowCertificate
from slowdet.specfile import load_curve

__version__ = "0.1.0"

__all__ = [
    # Curves
    "CurveSpec",
    "catalog_curve",
    "load_curve",
    "SlowCertificate",
    "HeightControl",
    # Bounds
    "BoundMode",
    "BoundReport",
    "global_bound",
    "compact_bound",
    # Experiments
    "RationalPoint",
    "ScanResult",
    "scan_points",
    "CoveringPlan",
    "build_covering_plan",
    # Configuration
    "RunConfig",
    "load_config",
    # Errors
    "SlowdetError",
    "ErrorCode",
]
