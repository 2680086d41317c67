"""Cross-platform comparison of quantum processes with randomized measurements."""

from . import channels, qcore
from .channels import FidelityEstimate, KrausChannel, exact_max_fidelity, exact_overlap
from .errors import (
    CrossPlatError,
    DegenerateDataError,
    NumericalIntegrityError,
    TransportError,
    UsageError,
)

__version__ = "0.1.0"
