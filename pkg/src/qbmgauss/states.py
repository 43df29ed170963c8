"""Initial-state families: vacuum, thermal, squeezed, twin-beam and basset-hound."""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidArgumentError
from .symplectic import GaussianState

MAX_SQUEEZING = 10.0


class Family(str, Enum):
    VACUUM = "vacuum"
    THERMAL = "thermal"
    SQUEEZED1 = "squeezed1"
    SQUEEZED2 = "squeezed2"
    BASSET_HOUND = "basset_hound"


N_MODES = {
    Family.VACUUM: 1,
    Family.THERMAL: 1,
    Family.SQUEEZED1: 1,
    Family.SQUEEZED2: 2,
    Family.BASSET_HOUND: 3,
}


@dataclass(frozen=True)
class StateSpec:
    family: Family
    r: float = 0.0
    n_bar: float = 0.0

    def __post_init__(self):
        try:
            object.__setattr__(self, "family", Family(self.family))
        except ValueError:
            raise InvalidArgumentError(f"unknown state family {self.family!r}") from None
        if not math.isfinite(self.r) or abs(self.r) > MAX_SQUEEZING:
            raise InvalidArgumentError(f"squeezing r must be finite with |r| <= {MAX_SQUEEZING}, got {self.r}")
        if not math.isfinite(self.n_bar) or self.n_bar < 0:
            raise InvalidArgumentError(f"n_bar must be >= 0, got {self.n_bar}")

    @property
    def n_modes(self) -> int:
        return N_MODES[self.family]


def make_state(spec: StateSpec) -> GaussianState:
    fam, r = spec.family, spec.r
    if fam is Family.VACUUM:
        cm = np.eye(2)
    elif fam is Family.THERMAL:
        cm = (2 * spec.n_bar + 1) * np.eye(2)
    elif fam is Family.SQUEEZED1:
        cm = np.diag([np.exp(-2 * r), np.exp(2 * r)])
    elif fam is Family.SQUEEZED2:
        c, s = np.cosh(2 * r), np.sinh(2 * r)
        z = np.diag([1.0, -1.0])
        cm = np.block([[c * np.eye(2), s * z], [s * z, c * np.eye(2)]])
    else:
        cm = _basset_hound_cm(np.cosh(2 * r))
    return GaussianState(cm)


def _basset_hound_cm(a: float) -> np.ndarray:
    eye, z = np.eye(2), np.diag([1.0, -1.0])
    s1 = a * eye
    s23 = 0.5 * (a + 1) * eye
    e23 = 0.5 * (a - 1) * eye
    e1 = np.sqrt(max(a * a - 1, 0.0) / 2) * z
    return np.block([[s1, e1, e1], [e1.T, s23, e23], [e1.T, e23.T, s23]])


def vacuum(n_modes: int = 1) -> GaussianState:
    return GaussianState(np.eye(2 * n_modes))


def thermal(n_bar: float) -> GaussianState:
    return make_state(StateSpec(Family.THERMAL, n_bar=n_bar))


def squeezed(r: float) -> GaussianState:
    return make_state(StateSpec(Family.SQUEEZED1, r=r))


def two_mode_squeezed(r: float) -> GaussianState:
    return make_state(StateSpec(Family.SQUEEZED2, r=r))


def basset_hound(r: float) -> GaussianState:
    return make_state(StateSpec(Family.BASSET_HOUND, r=r))
