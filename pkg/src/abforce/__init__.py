"""Forces between a moving electron and a magnetic dipole, the resulting path shift and phase, and numerical cross-checks."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    CODATA2018,
    Constants,
    DimensionlessCoupling,
    Scenario,
    Side,
    coupling,
    make_constants,
)
from .errors import (  # noqa: E402
    AbforceError,
    ConfigError,
    IntegrationError,
    NumericalError,
    QuadratureError,
    RegimeError,
    ScaleRangeError,
    SingularPointError,
    StepSizeError,
    UnderResolvedError,
)
from .perturbative import closure_report, delta_z, phase_shift  # noqa: E402

__all__ = [
    "__version__",
    "CODATA2018",
    "Constants",
    "DimensionlessCoupling",
    "Scenario",
    "Side",
    "coupling",
    "make_constants",
    "closure_report",
    "delta_z",
    "phase_shift",
    "AbforceError",
    "ConfigError",
    "IntegrationError",
    "NumericalError",
    "QuadratureError",
    "RegimeError",
    "ScaleRangeError",
    "SingularPointError",
    "StepSizeError",
    "UnderResolvedError",
]
