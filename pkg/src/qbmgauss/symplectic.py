"""Symplectic linear algebra on real covariance matrices.

Covariance matrices use the ordering (x1, p1, x2, p2, ...) and the
normalisation in which the vacuum is the identity, so every physical state
has symplectic eigenvalues >= 1.
"""

import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple

import numpy as np

from .errors import InvalidArgumentError, NumericalError

SYMMETRY_WARN = 1e-12
SYMMETRY_REJECT = 1e-6
BONA_FIDE_TOL = -1e-10

_OMEGA_1 = np.array([[0, 1], [-1, 0]])


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Zero-mean Gaussian state described by its covariance matrix.

    The matrix is symmetrised on construction and stored read-only.
    ``meta`` carries diagnostic flags (e.g. from channel evolution) and does
    not take part in comparisons.
    """

    cm: np.ndarray
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        cm = _as_symmetric(self.cm)
        cm.setflags(write=False)
        object.__setattr__(self, "cm", cm)

    @property
    def n_modes(self) -> int:
        return self.cm.shape[0] // 2

    def mode_block(self, i: int, j: int | None = None) -> np.ndarray:
        """2x2 block (i, j) of the covariance matrix (local CM when j is None)."""
        j = i if j is None else j
        return self.cm[2 * i : 2 * i + 2, 2 * j : 2 * j + 2]

    def reduced(self, modes: Iterable[int]) -> "GaussianState":
        """Marginal state on ``modes`` (rows/columns of the others deleted)."""
        idx = np.concatenate([[2 * m, 2 * m + 1] for m in modes])
        return GaussianState(self.cm[np.ix_(idx, idx)])

    def __eq__(self, other):
        if not isinstance(other, GaussianState):
            return NotImplemented
        return self.cm.shape == other.cm.shape and np.array_equal(self.cm, other.cm)

    __hash__ = None


def _as_symmetric(m) -> np.ndarray:
    m = np.array(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2 or m.shape[0] == 0:
        raise InvalidArgumentError(f"covariance matrix must be 2n x 2n, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidArgumentError("covariance matrix has non-finite entries")
    asym = np.max(np.abs(m - m.T))
    scale = max(1.0, np.max(np.abs(m)))
    if asym > SYMMETRY_REJECT * scale:
        raise InvalidArgumentError(f"covariance matrix is not symmetric (asymmetry {asym:.3g})")
    if asym > SYMMETRY_WARN:
        warnings.warn(f"symmetrising covariance matrix with asymmetry {asym:.3g}", RuntimeWarning, stacklevel=3)
    return 0.5 * (m + m.T)


def _cm(state) -> np.ndarray:
    if isinstance(state, GaussianState):
        return state.cm
    return _as_symmetric(state)


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form Omega for ``n_modes`` modes (integer entries)."""
    if int(n_modes) != n_modes or n_modes < 1:
        raise InvalidArgumentError(f"n_modes must be a positive integer, got {n_modes!r}")
    return np.kron(np.eye(int(n_modes), dtype=int), _OMEGA_1)


def symplectic_eigenvalues(state) -> np.ndarray:
    """Ascending symplectic spectrum (n values) of a covariance matrix.

    Computed from the moduli of the eigenvalues of i*Omega*sigma, which come
    in +/- pairs; each pair is collapsed to one value.
    """
    cm = _cm(state)
    n = cm.shape[0] // 2
    try:
        ev = np.linalg.eigvals(1j * symplectic_form(n) @ cm)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    mods = np.sort(np.abs(ev))
    return 0.5 * (mods[0::2] + mods[1::2])


class BonaFideReport(NamedTuple):
    valid: bool
    min_eigenvalue: float


def check_bona_fide(state, tol: float = BONA_FIDE_TOL) -> BonaFideReport:
    """Robertson-Schroedinger test: smallest eigenvalue of sigma + i*Omega >= tol."""
    cm = _cm(state)
    n = cm.shape[0] // 2
    lam = float(np.linalg.eigvalsh(cm + 1j * symplectic_form(n))[0])
    return BonaFideReport(lam >= tol, lam)


def partial_transpose(state, transposed_modes: Iterable[int]) -> np.ndarray:
    """Covariance matrix after transposing ``transposed_modes`` (momentum sign flip).

    The result need not be a physical covariance matrix, so a plain array is
    returned.
    """
    cm = _cm(state)
    n = cm.shape[0] // 2
    modes = set(transposed_modes)
    for m in modes:
        if int(m) != m or not 0 <= m < n:
            raise InvalidArgumentError(f"mode index {m!r} out of range for {n} modes")
    signs = np.ones(2 * n)
    for m in modes:
        signs[2 * int(m) + 1] = -1.0
    return cm * np.outer(signs, signs)


def matrix_function(m, f: Callable, max_cond: float = 1e12) -> np.ndarray:
    """Apply scalar ``f`` to a diagonalisable matrix through its eigenbasis.

    ``f`` receives the complex eigenvalue array; pass ``np.sqrt`` for the
    principal square root.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidArgumentError(f"matrix_function needs a square matrix, got shape {m.shape}")
    w, v = np.linalg.eig(m)
    cond = np.linalg.cond(v)
    if not np.isfinite(cond) or cond > max_cond:
        raise NumericalError(f"eigenbasis is ill-conditioned (condition number {cond:.3g})", estimate=cond)
    return (v * f(w)) @ np.linalg.inv(v)
