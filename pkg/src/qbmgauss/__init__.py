"""Gaussian states under a non-Markovian quantum Brownian motion channel."""

from .channel import (
    BathSpec,
    ChannelCoefficients,
    Convention,
    Source,
    accumulate,
    apply_channel,
    coefficients_at,
    delta,
    evolve,
    gamma,
)
from .errors import (
    DomainError,
    InvalidArgumentError,
    NotFoundError,
    NumericalError,
    QBMError,
    TruncationError,
)
from .metrics import (
    Metric,
    MetricSeries,
    PetzRenyiRequest,
    critical_time,
    fidelity_closed,
    fidelity_general,
    log_negativity,
    metric_series,
    petz_renyi_condition,
    petz_renyi_entropy,
)
from .states import (
    Family,
    StateSpec,
    basset_hound,
    make_state,
    squeezed,
    thermal,
    two_mode_squeezed,
    vacuum,
)
from .symplectic import GaussianState, check_bona_fide, symplectic_eigenvalues, symplectic_form

__version__ = "0.1.0"

__all__ = [
    "BathSpec",
    "ChannelCoefficients",
    "Convention",
    "DomainError",
    "Family",
    "GaussianState",
    "InvalidArgumentError",
    "Metric",
    "MetricSeries",
    "NotFoundError",
    "NumericalError",
    "PetzRenyiRequest",
    "QBMError",
    "Source",
    "StateSpec",
    "TruncationError",
    "accumulate",
    "apply_channel",
    "basset_hound",
    "check_bona_fide",
    "coefficients_at",
    "critical_time",
    "delta",
    "evolve",
    "fidelity_closed",
    "fidelity_general",
    "gamma",
    "log_negativity",
    "make_state",
    "metric_series",
    "petz_renyi_condition",
    "petz_renyi_entropy",
    "squeezed",
    "symplectic_eigenvalues",
    "symplectic_form",
    "thermal",
    "two_mode_squeezed",
    "vacuum",
]
