"""Fidelity, logarithmic negativity and Petz-Renyi relative entropy of Gaussian states.

Inputs use the vacuum = identity normalisation.  The fidelity formulas are
written for the half-scaled matrices V = sigma / 2 (vacuum = I/2) and convert
internally.  All logarithms are natural.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple, Optional

import numpy as np

from .channel import BathSpec, Convention, Source, accumulate, apply_channel, coefficients_at
from .errors import DomainError, InvalidArgumentError, NotFoundError, NumericalError
from .symplectic import (
    GaussianState,
    matrix_function,
    partial_transpose,
    symplectic_eigenvalues,
    symplectic_form,
)

log = logging.getLogger(__name__)

FIDELITY_CLIP_FLAG = 1e-6
MIXEDNESS_MARGIN = 1e-9
CONDITION_TOL = 1e-10
IMAG_TOL = 1e-9
RADICAND_FLOOR = 64 * np.finfo(float).eps


class Metric(str, Enum):
    FIDELITY = "fidelity"
    LOG_NEGATIVITY = "log_negativity"
    PETZ_RENYI = "petz_renyi"


def _pair(a: GaussianState, b: GaussianState):
    if a.n_modes != b.n_modes:
        raise InvalidArgumentError(f"states have different mode counts ({a.n_modes} vs {b.n_modes})")
    return a.cm, b.cm, symplectic_form(a.n_modes).astype(float)


def _clip_fidelity(f: float) -> float:
    if not math.isfinite(f):
        raise NumericalError(f"fidelity evaluated to {f}")
    if f < 0 or f > 1:
        if f < -FIDELITY_CLIP_FLAG or f > 1 + FIDELITY_CLIP_FLAG:
            log.warning("fidelity %.12g outside [0, 1] by more than %g; clipping", f, FIDELITY_CLIP_FLAG)
        f = min(max(f, 0.0), 1.0)
    return f


def _aux_matrix(v1, v2, om):
    try:
        inv_sum = np.linalg.inv(v1 + v2)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("V1 + V2 is singular") from exc
    return om.T @ inv_sum @ (om / 4 + v2 @ om @ v1)


def fidelity_general(a: GaussianState, b: GaussianState) -> float:
    """Uhlmann fidelity [Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))]^2 of zero-mean Gaussian states.

    Uses F = F_tot^2 / sqrt(det(V1 + V2)) with
    F_tot^4 = det[2 (sqrt(I + (V_aux Omega)^-2 / 4) + I) V_aux].
    """
    s1, s2, om = _pair(a, b)
    v1, v2 = s1 / 2, s2 / 2
    v_aux = _aux_matrix(v1, v2, om)
    a = v_aux @ om
    inv_sq = np.linalg.matrix_power(np.linalg.inv(a), 2)
    root = _sqrtm(np.eye(len(om)) + inv_sq / 4, _radicand_floor(a))
    f_tot4 = np.linalg.det(2 * (root + np.eye(len(om))) @ v_aux)
    if abs(f_tot4.imag) > IMAG_TOL * max(1.0, abs(f_tot4.real)):
        raise NumericalError(f"F_tot^4 has imaginary part {f_tot4.imag:.3g}")
    f = math.sqrt(max(f_tot4.real, 0.0)) / math.sqrt(np.linalg.det(v1 + v2))
    return _clip_fidelity(f)


def _sqrtm(m, floor):
    # for pure pairs the radicand vanishes exactly; eigenvalues inside the
    # rounding floor are set to zero so they do not leak in as sqrt(eps)
    def root(w):
        return np.sqrt(np.where(np.abs(w) < floor, 0.0, w))

    try:
        return matrix_function(m, root)
    except NumericalError:
        from scipy.linalg import sqrtm

        return sqrtm(m.astype(complex))


def _radicand_floor(a):
    return RADICAND_FLOOR * np.linalg.cond(a) ** 2


def fidelity_aux_form(a: GaussianState, b: GaussianState) -> float:
    """Same fidelity through sigma_aux = -2 V_aux i Omega.

    F_tot^4 = det[(sqrt(I - sigma_aux^-2) + I) sigma_aux i Omega].  Kept as an
    independent check of :func:`fidelity_general`.
    """
    s1, s2, om = _pair(a, b)
    v1, v2 = s1 / 2, s2 / 2
    s_aux = -2j * _aux_matrix(v1, v2, om) @ om
    eye = np.eye(len(om))
    root = _sqrtm(eye - np.linalg.matrix_power(np.linalg.inv(s_aux), 2), _radicand_floor(s_aux))
    f_tot4 = np.linalg.det((root + eye) @ s_aux @ (1j * om))
    return _clip_fidelity(math.sqrt(max(f_tot4.real, 0.0)) / math.sqrt(np.linalg.det(v1 + v2)))


def fidelity_closed(a: GaussianState, b: GaussianState) -> float:
    """Closed-form fidelity for one- and two-mode states."""
    s1, s2, om = _pair(a, b)
    n = a.n_modes
    if n > 2:
        raise InvalidArgumentError("closed-form fidelity is available for 1 and 2 modes only")
    v1, v2 = s1 / 2, s2 / 2
    big_sigma = np.linalg.det(v1 + v2)
    # 4^n det(V + iOmega/2) = prod(nu^2 - 1); the spectrum keeps pure states at exactly zero
    lam = _mixedness(s1) * _mixedness(s2) / 4**n
    if n == 1:
        f = (math.sqrt(big_sigma + lam) + math.sqrt(lam)) / big_sigma
    else:
        eta = (4**n) * np.linalg.det(om @ v1 @ om @ v2 - np.eye(4) / 4)
        root_sum = math.sqrt(max(eta, 0.0)) + math.sqrt(lam)
        # pure pairs have root_sum^2 == Sigma; the 4x4 determinant only gets there to rounding
        scale = np.linalg.norm(v1, 2) * np.linalg.norm(v2, 2) + 0.25
        gap = root_sum**2 - big_sigma
        gap = 0.0 if gap < RADICAND_FLOOR * 16 * scale**4 else gap
        f = (root_sum + math.sqrt(gap)) / big_sigma
    return _clip_fidelity(f)


def _mixedness(cm: np.ndarray) -> float:
    return float(np.prod(np.maximum(symplectic_eigenvalues(cm) ** 2 - 1, 0.0)))


def _check_bipartition(state: GaussianState, part: Iterable[int]) -> set:
    part = {int(m) for m in part}
    if not part or len(part) >= state.n_modes or not part <= set(range(state.n_modes)):
        raise InvalidArgumentError(f"bipartition {sorted(part)} is not a nonempty proper subset of the modes")
    return part


def partial_transpose_spectrum(state: GaussianState, bipartition: Iterable[int]) -> np.ndarray:
    part = _check_bipartition(state, bipartition)
    return symplectic_eigenvalues(partial_transpose(state, part))


def log_negativity(state: GaussianState, bipartition: Iterable[int] = (0,)) -> float:
    """E_N = -sum ln(nu~) over partial-transpose symplectic eigenvalues below 1."""
    return _neg_log_sum(partial_transpose_spectrum(state, bipartition))


def two_mode_pt_spectrum(state: GaussianState) -> tuple[float, float]:
    """(nu~-, nu~+) of a two-mode state from its 2x2 block invariants."""
    if state.n_modes != 2:
        raise InvalidArgumentError("two-mode formula needs a two-mode state")
    d1 = np.linalg.det(state.mode_block(0))
    d2 = np.linalg.det(state.mode_block(1))
    d12 = np.linalg.det(state.mode_block(0, 1))
    det = np.linalg.det(state.cm)
    delta_t = d1 + d2 - 2 * d12
    disc = math.sqrt(max(delta_t**2 - 4 * det, 0.0))
    return math.sqrt((delta_t - disc) / 2), math.sqrt((delta_t + disc) / 2)


def log_negativity_two_mode(state: GaussianState) -> float:
    return _neg_log_sum(np.array(two_mode_pt_spectrum(state)))


def _neg_log_sum(nu: np.ndarray) -> float:
    # a product vacuum sits at 1 - O(eps); that is not entanglement
    return float(-np.sum(np.log(nu[nu < 1 - 64 * np.finfo(float).eps])))


@dataclass(frozen=True)
class PetzRenyiRequest:
    kappa: float
    state_a: GaussianState
    state_b: GaussianState

    def __post_init__(self):
        if not (math.isfinite(self.kappa) and self.kappa > 1):
            raise InvalidArgumentError(f"kappa must lie in (1, inf), got {self.kappa}")
        if self.state_a.n_modes != self.state_b.n_modes:
            raise InvalidArgumentError("states have different mode counts")
        for st in (self.state_a, self.state_b):
            nu = symplectic_eigenvalues(st)
            if nu[0] <= 1 + MIXEDNESS_MARGIN:
                raise InvalidArgumentError(f"Petz-Renyi entropy needs strictly mixed states (min nu = {nu[0]:.12g})")


def _matrix_power(m, p: float):
    if float(p).is_integer():
        return np.linalg.matrix_power(m, int(p))
    return matrix_function(m, lambda w: w**p)


def power_cm(cm: np.ndarray, p: float) -> np.ndarray:
    """Covariance matrix of the normalised p-th power of a Gaussian state.

    With X = (sigma i Omega)^-1 this is
    [(I + X)^p + (I - X)^p] [(I + X)^p - (I - X)^p]^-1 i Omega.
    """
    n = cm.shape[0] // 2
    i_om = 1j * symplectic_form(n)
    x = np.linalg.inv(cm @ i_om)
    eye = np.eye(2 * n)
    plus, minus = _matrix_power(eye + x, p), _matrix_power(eye - x, p)
    out = (plus + minus) @ np.linalg.inv(plus - minus) @ i_om
    if np.max(np.abs(out.imag)) > IMAG_TOL * max(1.0, np.max(np.abs(out.real))):
        raise NumericalError("power covariance matrix has a non-negligible imaginary part")
    out = out.real
    return 0.5 * (out + out.T)


class ConditionReport(NamedTuple):
    holds: bool
    min_eigenvalue: float


def _z(cm: np.ndarray) -> float:
    n = cm.shape[0] // 2
    d = np.linalg.det((cm + 1j * symplectic_form(n)) / 2)
    if abs(d.imag) > IMAG_TOL * max(1.0, abs(d.real)):
        raise NumericalError(f"normalisation determinant has imaginary part {d.imag:.3g}")
    if d.real <= 0:
        raise NumericalError("normalisation determinant is not positive")
    return math.sqrt(d.real)


def _as_request(rho, rho_prime, kappa) -> PetzRenyiRequest:
    if isinstance(rho, PetzRenyiRequest):
        return rho
    return PetzRenyiRequest(kappa, rho, rho_prime)


def petz_renyi_condition(rho, rho_prime=None, kappa: Optional[float] = None) -> ConditionReport:
    """Domain test sigma_rho'(kappa - 1) > sigma_rho(kappa) (strict matrix inequality).

    Accepts either a :class:`PetzRenyiRequest` or ``(rho, rho_prime, kappa)``.
    """
    req = _as_request(rho, rho_prime, kappa)
    diff = power_cm(req.state_b.cm, req.kappa - 1) - power_cm(req.state_a.cm, req.kappa)
    lam = float(np.linalg.eigvalsh(0.5 * (diff + diff.T))[0])
    return ConditionReport(lam > CONDITION_TOL, lam)


def petz_renyi_quasi_entropy(rho, rho_prime=None, kappa: Optional[float] = None) -> float:
    """Q_kappa(rho || rho') = Tr[rho^kappa rho'^(1 - kappa)] for zero-mean states."""
    req = _as_request(rho, rho_prime, kappa)
    k = req.kappa
    s_a, s_b = req.state_a.cm, req.state_b.cm
    s_ak = power_cm(s_a, k)
    s_bk = power_cm(s_b, k - 1)
    diff = s_bk - s_ak
    lam = float(np.linalg.eigvalsh(0.5 * (diff + diff.T))[0])
    if lam <= CONDITION_TOL:
        raise DomainError(f"Petz-Renyi condition violated (min eigenvalue {lam:.3g})")
    q = (_z(s_b) ** (k - 1) / _z(s_a) ** k) * _z(s_ak) * _z(s_bk) / math.sqrt(np.linalg.det(diff / 2))
    if not (math.isfinite(q) and q > 0):
        raise NumericalError(f"quasi-entropy evaluated to {q}")
    return q


def petz_renyi_entropy(rho, rho_prime=None, kappa: Optional[float] = None) -> float:
    """D_kappa(rho || rho') = ln Q_kappa / (kappa - 1), kappa > 1."""
    req = _as_request(rho, rho_prime, kappa)
    return math.log(petz_renyi_quasi_entropy(req)) / (req.kappa - 1)


def _condition_margin(a: GaussianState, b: GaussianState, kappa: float) -> float:
    # -inf when either state is (numerically) pure, where the formula is undefined
    try:
        return petz_renyi_condition(a, b, kappa).min_eigenvalue
    except InvalidArgumentError:
        return -math.inf


def critical_time(
    state_a: GaussianState,
    state_b: GaussianState,
    bath: BathSpec,
    kappa: float = 2.0,
    *,
    convention: Convention = Convention.UNIFORM,
    t_max: float = 5.0,
    step: float = 0.005,
    hold: int = 10,
    tol: float = 1e-4,
) -> float:
    """Earliest time after which the Petz-Renyi condition holds for the evolved pair.

    Times are in units of 1/omega_c.  A uniform scan over (0, t_max] finds the
    first point from which the condition holds for ``hold`` further steps;
    bisection then refines the onset to ``tol``.
    """
    if not kappa > 1:
        raise InvalidArgumentError(f"kappa must lie in (1, inf), got {kappa}")
    wc = bath.omega_c
    grid = np.arange(0.0, t_max + 0.5 * step, step) / wc
    coeffs = accumulate(bath, grid, verify=False)

    def margin_at(big, dg):
        ea = apply_channel(state_a, big, dg, convention=convention)
        eb = apply_channel(state_b, big, dg, convention=convention)
        return _condition_margin(ea, eb, kappa)

    ok = np.array([margin_at(*coeffs.at(i)) > CONDITION_TOL for i in range(len(grid))])
    first = None
    for i in range(1, len(grid)):
        if ok[i : i + hold + 1].all():
            first = i
            break
    if first is None:
        raise NotFoundError(f"Petz-Renyi condition never holds on (0, {t_max}]/omega_c")
    if not ok[first:].all():
        log.warning("Petz-Renyi condition fails again after its onset at t = %g", grid[first])

    lo, hi = grid[first - 1], grid[first]
    while (hi - lo) * wc > tol:
        mid = 0.5 * (lo + hi)
        c = coefficients_at(mid, bath)
        if margin_at(*c.at(1)) > CONDITION_TOL:
            hi = mid
        else:
            lo = mid
    return hi * wc


@dataclass
class MetricSeries:
    """A metric sampled on a time grid (t in units of 1/omega_c).

    Petz-Renyi entries are NaN where the entropy is undefined.
    """

    metric: Metric
    t: np.ndarray
    values: np.ndarray
    params: dict = field(default_factory=dict)
    t_star: Optional[float] = None


def metric_series(
    metric: Metric,
    state_a: GaussianState,
    bath: BathSpec,
    t_grid,
    state_b: Optional[GaussianState] = None,
    *,
    kappa: float = 2.0,
    bipartition: Iterable[int] = (0,),
    convention: Convention = Convention.UNIFORM,
    source: Source = Source.CLOSED_FORM,
    params: Optional[dict] = None,
) -> MetricSeries:
    """Evolve the input state(s) over ``t_grid`` (units 1/omega_c) and evaluate ``metric``."""
    metric = Metric(metric)
    t = np.asarray(t_grid, dtype=float)
    if metric is not Metric.LOG_NEGATIVITY and state_b is None:
        raise InvalidArgumentError(f"{metric.value} needs two states")
    coeffs = accumulate(bath, t / bath.omega_c, source=source)
    values = np.empty(t.size)
    bipartition = tuple(bipartition)
    for i in range(t.size):
        big, dg = coeffs.at(i)
        ea = apply_channel(state_a, big, dg, convention=convention)
        if metric is Metric.LOG_NEGATIVITY:
            values[i] = log_negativity(ea, bipartition)
            continue
        eb = apply_channel(state_b, big, dg, convention=convention)
        if metric is Metric.FIDELITY:
            values[i] = fidelity_general(ea, eb)
        elif _condition_margin(ea, eb, kappa) > CONDITION_TOL:
            values[i] = petz_renyi_entropy(ea, eb, kappa)
        else:
            values[i] = np.nan
    t_star = None
    if metric is Metric.PETZ_RENYI:
        try:
            t_star = critical_time(state_a, state_b, bath, kappa, convention=convention, t_max=max(float(t[-1]), 5.0))
        except NotFoundError:
            t_star = None
    return MetricSeries(metric, t, values, dict(params or {}), t_star)
