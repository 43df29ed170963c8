"""Quantum-Brownian-motion channel acting on covariance matrices.

The bath is Ohmic with a Lorentz-Drude cutoff, J(w) = (2w/pi) wc^2/(wc^2 + w^2),
coupled with strength alpha to an oscillator of frequency w0 at temperature T
(hbar = k_B = 1).  In the interaction picture the master equation has
time-dependent diffusion Delta(t) and damping gamma(t); a single mode then
evolves as

    sigma(t) = exp(-Gamma(t)) sigma(0) + 2 Delta_Gamma(t) I,

with Gamma(t) = int_0^t 2 gamma and
Delta_Gamma(t) = exp(-Gamma(t)) int_0^t exp(Gamma(s)) Delta(s) ds.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.polynomial import legendre
from scipy import integrate

from .errors import DomainError, InvalidArgumentError, NumericalError
from .special import Z_MAX, adaptive_quad, f_bar
from .symplectic import GaussianState, check_bona_fide

log = logging.getLogger(__name__)

IMAG_RESIDUE_TOL = 1e-9
CLOSED_FORM_MISMATCH = 1e-3
LEGITIMACY_TOL = -1e-8
# Longest piece handed to a single adaptive integration; Delta oscillates at w0.
_MAX_PIECE = 0.5
_GL_NODES, _GL_WEIGHTS = legendre.leggauss(8)


@dataclass(frozen=True)
class BathSpec:
    """Bath and oscillator parameters; derived ratios are computed on access."""

    alpha: float
    T: float
    omega0: float
    omega_c: float

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise InvalidArgumentError(f"coupling alpha must lie in (0, 1), got {self.alpha}")
        for name in ("T", "omega0", "omega_c"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvalidArgumentError(f"{name} must be positive and finite, got {v}")

    @property
    def x(self) -> float:
        return self.omega_c / self.omega0

    @property
    def nu1(self) -> float:
        """First Matsubara frequency 2 pi T."""
        return 2 * math.pi * self.T

    @property
    def r0(self) -> float:
        return self.omega0 / self.nu1

    @property
    def rc(self) -> float:
        return self.omega_c / self.nu1

    @property
    def prefactor(self) -> float:
        """Asymptotic damping rate alpha^2 x^2 w0 / (x^2 + 1)."""
        x2 = self.x**2
        return self.alpha**2 * x2 * self.omega0 / (x2 + 1)

    @property
    def t_min(self) -> float:
        """Earliest time at which the hypergeometric closed form is evaluated."""
        return -math.log(Z_MAX) / self.nu1

    @property
    def n_thermal(self) -> float:
        """Bose occupation of the oscillator at the bath temperature."""
        return 0.5 * (1 / math.tanh(self.omega0 / (2 * self.T)) - 1)


class Source(str, Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


class Convention(str, Enum):
    """Diffusion weight on the system-mode block of a multimode state.

    UNIFORM adds 2 Delta_Gamma for any mode count (the master-equation value,
    with the thermal fixed point coth(w0/2T)).  PAPER adds 2 Delta_Gamma for a
    single mode but Delta_Gamma when other modes are present, as the
    multimode map is commonly written for this model.
    """

    UNIFORM = "uniform"
    PAPER = "paper"


def spectral_density(omega, bath: BathSpec):
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise InvalidArgumentError("spectral density needs omega >= 0")
    wc2 = bath.omega_c**2
    out = (2 * omega / np.pi) * wc2 / (wc2 + omega**2)
    return out if out.ndim else float(out)


def gamma_closed(t, bath: BathSpec):
    t = np.asarray(t, dtype=float)
    w0, wc = bath.omega0, bath.omega_c
    e = np.exp(-wc * t)
    out = bath.prefactor * (1 - e * np.cos(w0 * t) - bath.x * e * np.sin(w0 * t))
    return out if out.ndim else float(out)


def big_gamma_closed(t, bath: BathSpec):
    """Gamma(t) = int_0^t 2 gamma(s) ds in closed form."""
    t = np.asarray(t, dtype=float)
    w0, wc = bath.omega0, bath.omega_c
    e = np.exp(-wc * t)
    norm = wc**2 + w0**2
    int_cos = (wc + e * (w0 * np.sin(w0 * t) - wc * np.cos(w0 * t))) / norm
    int_sin = (w0 - e * (wc * np.sin(w0 * t) + w0 * np.cos(w0 * t))) / norm
    out = 2 * bath.prefactor * (t - int_cos - bath.x * int_sin)
    return out if out.ndim else float(out)


def delta_closed(t: float, bath: BathSpec) -> float:
    """Diffusion coefficient Delta(t) from its Matsubara-sum closed form.

    All Matsubara contributions are expressed through F(x, t) with
    x in {+-rc, +-i r0}.  Valid for t >= bath.t_min.
    """
    t = float(t)
    if t < bath.t_min * (1 - 1e-12):
        raise DomainError(f"t = {t:g} below t_min = {bath.t_min:g}; use delta_quadrature")
    r0, rc, x = bath.r0, bath.rc, bath.x
    if abs(rc - round(rc)) < 1e-12:
        raise DomainError(f"rc = {rc} is an integer; the closed form has a removable pole there")
    c, s = math.cos(bath.omega0 * t), math.sin(bath.omega0 * t)
    f_mc, f_pc = f_bar(-rc, t, bath), f_bar(rc, t, bath)
    f_pi, f_mi = f_bar(1j * r0, t, bath), f_bar(-1j * r0, t, bath)
    val = (
        1 / math.tanh(math.pi * r0)
        - math.exp(-bath.omega_c * t) * (x * c - s) / math.tan(math.pi * rc)
        + c / (math.pi * r0) * (f_mc + f_pc - f_pi - f_mi)
        - s / math.pi * ((f_mc - f_pc) / rc + (f_pi - f_mi) / (1j * r0))
    )
    if abs(val.imag) > IMAG_RESIDUE_TOL * max(1.0, abs(val.real)):
        raise NumericalError(f"closed-form Delta has imaginary residue {val.imag:.3g} at t = {t:g}")
    return bath.prefactor * val.real


def _j_coth(w, bath: BathSpec):
    # J(w) coth(w / 2T), finite at w = 0 through y / tanh(y) -> 1
    y = np.asarray(w, dtype=float) / (2 * bath.T)
    small = np.abs(y) < 1e-6
    ratio = np.where(small, 1 + y * y / 3, y / np.tanh(np.where(small, 1.0, y)))
    return (2 / np.pi) * bath.omega_c**2 / (bath.omega_c**2 + np.asarray(w) ** 2) * 2 * bath.T * ratio


def _sinc_t(u, t):
    # sin(u t) / u, equal to t at u = 0
    return t * np.sinc(u * t / np.pi)


def _head_edges(t: float, bath: BathSpec) -> np.ndarray:
    # non-oscillatory head out to several w0 (or ~200/t for tiny t), in
    # decade-sized segments so the 1/w decay is resolved
    base = 4 * max(bath.omega0, bath.omega_c) + 1.0
    w_split = max(base, 200.0 / t)
    edges = [0.0, base]
    while edges[-1] < w_split:
        edges.append(min(10 * edges[-1], w_split))
    return np.array(edges)


def _frequency_integral(t, bath, amp, near, tail_sin, tail_cos, abs_tol=1e-13):
    edges = _head_edges(t, bath)
    opts = dict(epsabs=1e-14, epsrel=1e-11, limit=4000)
    head = err = 0.0
    with np.errstate(all="ignore"):
        for lo, hi in zip(edges[:-1], edges[1:]):
            pts = [bath.omega0] if lo < bath.omega0 < hi else None
            v, e = integrate.quad(lambda w: amp(w) * near(w), lo, hi, points=pts, **opts)[:2]
            head += v
            err += e
        w_split = edges[-1]
        ts, err_s = integrate.quad(lambda w: amp(w) * tail_sin(w), w_split, np.inf, weight="sin", wvar=t, limlst=200)[:2]
        tc, err_c = integrate.quad(lambda w: amp(w) * tail_cos(w), w_split, np.inf, weight="cos", wvar=t, limlst=200)[:2]
    total = head + ts + tc
    err += err_s + err_c
    if not math.isfinite(total) or err > 1e-4 * abs(total) + abs_tol:
        raise NumericalError(f"frequency quadrature failed at t = {t:g} (error {err:.3g})", estimate=total)
    return total


# below this time the head segment would reach omega ~ 1e14 and beyond;
# both coefficients vanish like t log(1/t), so a linear ramp is exact to ~t * 1e-12
_T_RAMP = 1e-12


def _check_time(t) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise InvalidArgumentError(f"t must be finite and >= 0, got {t}")
    return t


def delta_quadrature(t: float, bath: BathSpec) -> float:
    """Delta(t) by direct integration over bath frequencies.

    The time integral is done analytically,
    int_0^t cos(w s) cos(w0 s) ds = [sin((w-w0)t)/(w-w0) + sin((w+w0)t)/(w+w0)]/2,
    leaving one frequency integral; its oscillatory tail beyond a few w0 is
    integrated with a Fourier-weighted rule.
    """
    t = _check_time(t)
    if t == 0:
        return 0.0
    if t < _T_RAMP:
        return delta_quadrature(_T_RAMP, bath) * (t / _T_RAMP)
    w0 = bath.omega0
    c, s = math.cos(w0 * t), math.sin(w0 * t)
    amp = lambda w: _j_coth(w, bath)  # noqa: E731
    near = lambda w: 0.5 * (_sinc_t(w - w0, t) + _sinc_t(w + w0, t))  # noqa: E731
    tail_sin = lambda w: 0.5 * c * (1 / (w - w0) + 1 / (w + w0))  # noqa: E731
    tail_cos = lambda w: 0.5 * s * (1 / (w + w0) - 1 / (w - w0))  # noqa: E731
    return bath.alpha**2 * _frequency_integral(t, bath, amp, near, tail_sin, tail_cos)


def gamma_quadrature(t: float, bath: BathSpec) -> float:
    """gamma(t) by direct integration over bath frequencies (see delta_quadrature)."""
    t = _check_time(t)
    if t == 0:
        return 0.0
    if t < _T_RAMP:
        return gamma_quadrature(_T_RAMP, bath) * (t / _T_RAMP)
    w0 = bath.omega0
    c, s = math.cos(w0 * t), math.sin(w0 * t)
    amp = lambda w: spectral_density(w, bath)  # noqa: E731
    near = lambda w: 0.5 * (_sinc_t(w - w0, t) - _sinc_t(w + w0, t))  # noqa: E731
    tail_sin = lambda w: 0.5 * c * (1 / (w - w0) - 1 / (w + w0))  # noqa: E731
    tail_cos = lambda w: -0.5 * s * (1 / (w - w0) + 1 / (w + w0))  # noqa: E731
    return bath.alpha**2 * _frequency_integral(t, bath, amp, near, tail_sin, tail_cos, abs_tol=1e-7)


def delta(t: float, bath: BathSpec, source: Source = Source.CLOSED_FORM) -> float:
    """Delta(t), routing to quadrature below t_min or when asked to."""
    t = float(t)
    if t == 0:
        return 0.0
    if Source(source) is Source.QUADRATURE or t < bath.t_min:
        return delta_quadrature(t, bath)
    return delta_closed(t, bath)


def gamma(t: float, bath: BathSpec, source: Source = Source.CLOSED_FORM) -> float:
    if Source(source) is Source.QUADRATURE:
        return gamma_quadrature(t, bath)
    return gamma_closed(t, bath)


@dataclass(frozen=True)
class ChannelCoefficients:
    t: np.ndarray
    gamma: np.ndarray
    delta: np.ndarray
    big_gamma: np.ndarray
    delta_gamma: np.ndarray
    delta_gamma_weak: np.ndarray
    source: Source

    def __len__(self):
        return len(self.t)

    def at(self, i: int, weak_coupling: bool = False) -> tuple[float, float]:
        """(Gamma, Delta_Gamma) at grid index ``i``."""
        dg = self.delta_gamma_weak if weak_coupling else self.delta_gamma
        return float(self.big_gamma[i]), float(dg[i])


def _pieces(a: float, b: float, h: float):
    n = max(1, math.ceil((b - a) / h - 1e-9))
    edges = np.linspace(a, b, n + 1)
    return zip(edges[:-1], edges[1:])


def _integrate_closed(bath, a, b):
    """(int Delta, int exp(Gamma) Delta) over [a, b] with closed-form coefficients."""
    scale = bath.prefactor / math.tanh(math.pi * bath.r0)
    plain = weighted = 0.0
    for lo, hi in _pieces(a, b, _MAX_PIECE):
        tol = 1e-12 * scale * (hi - lo) + 1e-16
        plain += adaptive_quad(lambda s: delta(s, bath), lo, hi, tol=tol)
        boost = math.exp(big_gamma_closed(hi, bath))
        weighted += adaptive_quad(lambda s: math.exp(big_gamma_closed(s, bath)) * delta(s, bath), lo, hi, tol=tol * boost)
    return plain, weighted


def _gl_pieces(bath, a, b):
    """Sub-intervals of [a, b] for Gauss-Legendre integration.

    Pieces are at most 0.25 long and, from the origin, graded geometrically
    down to the thermal time 1/nu1 where Delta varies fastest.
    """
    edges = [a]
    if a == 0.0:
        scale = 1.0 / bath.nu1
        edges += [scale * 2.0**k for k in range(-6, 40) if scale * 2.0**k < min(b, 0.25)]
    for lo, hi in zip(edges, edges[1:] + [b]):
        yield from _pieces(lo, hi, 0.25)


def _integrate_quadrature(bath, a, b, big_a):
    """Integrals over [a, b] with quadrature-evaluated coefficients.

    Returns (int 2 gamma, int Delta, int exp(Gamma) Delta).  Gamma at the
    interior nodes comes from integrating the Legendre interpolant of 2 gamma.
    """
    damp = plain = weighted = 0.0
    big = big_a
    for lo, hi in _gl_pieces(bath, a, b):
        half = 0.5 * (hi - lo)
        nodes = half * _GL_NODES + 0.5 * (hi + lo)
        w = half * _GL_WEIGHTS
        g2 = 2 * np.array([gamma_quadrature(s, bath) for s in nodes])
        d = np.array([delta_quadrature(s, bath) for s in nodes])
        antideriv = legendre.legint(legendre.legfit(_GL_NODES, g2, len(_GL_NODES) - 1), lbnd=-1)
        inner = big + half * legendre.legval(_GL_NODES, antideriv)
        damp += w @ g2
        plain += w @ d
        weighted += w @ (np.exp(inner) * d)
        big = big_a + damp
    return damp, plain, weighted


def accumulate(bath: BathSpec, t_grid, source: Source = Source.CLOSED_FORM, verify: bool = True) -> ChannelCoefficients:
    """Sample gamma, Delta and the accumulated Gamma, Delta_Gamma on ``t_grid``.

    ``delta_gamma`` is the exact damped integral and ``delta_gamma_weak`` its
    weak-coupling truncation int_0^t Delta(s) ds.  With ``verify`` the
    closed-form Delta is spot-checked against quadrature and the whole run
    falls back to quadrature on a relative mismatch above 1e-3.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
        raise InvalidArgumentError("t_grid must be strictly ascending and start at 0")
    source = Source(source)
    if source is Source.CLOSED_FORM and verify and not _closed_form_agrees(bath, t):
        source = Source.QUADRATURE

    n = t.size
    gam = np.zeros(n)
    dlt = np.zeros(n)
    big = np.zeros(n)
    plain = np.zeros(n)
    weighted = np.zeros(n)
    if source is Source.CLOSED_FORM:
        gam[:] = gamma_closed(t, bath)
        dlt[:] = [delta(s, bath) for s in t]
        big[:] = big_gamma_closed(t, bath)
        for i in range(1, n):
            p, w = _integrate_closed(bath, t[i - 1], t[i])
            plain[i] = plain[i - 1] + p
            weighted[i] = weighted[i - 1] + w
    else:
        gam[:] = [gamma_quadrature(s, bath) for s in t]
        dlt[:] = [delta_quadrature(s, bath) for s in t]
        for i in range(1, n):
            dmp, p, w = _integrate_quadrature(bath, t[i - 1], t[i], big[i - 1])
            big[i] = big[i - 1] + dmp
            plain[i] = plain[i - 1] + p
            weighted[i] = weighted[i - 1] + w
    exact = np.exp(-big) * weighted
    return ChannelCoefficients(t, gam, dlt, big, exact, plain, source)


def _closed_form_agrees(bath: BathSpec, t: np.ndarray) -> bool:
    probe = t[t >= bath.t_min]
    if probe.size == 0:
        return True
    picks = np.unique(probe[[0, probe.size // 2, -1]])
    for s in picks:
        c = delta_closed(s, bath)
        q = delta_quadrature(s, bath)
        if abs(c - q) > CLOSED_FORM_MISMATCH * max(abs(q), 1e-12):
            log.warning("closed-form Delta(%g) = %.10g disagrees with quadrature %.10g; switching to quadrature", s, c, q)
            return False
    return True


def coefficients_at(t: float, bath: BathSpec, source: Source = Source.CLOSED_FORM) -> ChannelCoefficients:
    """Coefficients on the two-point grid [0, t]."""
    if t < 0:
        raise InvalidArgumentError("t must be >= 0")
    grid = [0.0] if t == 0 else [0.0, float(t)]
    return accumulate(bath, grid, source=source, verify=False)


def apply_channel(
    state: GaussianState,
    big_gamma: float,
    delta_gamma: float,
    system_mode: int = 0,
    convention: Convention = Convention.UNIFORM,
) -> GaussianState:
    """sigma -> D sigma D + k Delta_Gamma P on the system mode's 2x2 block.

    D damps the system mode by exp(-Gamma/2), P projects onto its block and k
    is 2 (or 1 for multimode inputs under the PAPER convention).  A
    bona-fide violation below -1e-8 is reported in ``meta`` rather than
    raised.
    """
    n = state.n_modes
    if int(system_mode) != system_mode or not 0 <= system_mode < n:
        raise InvalidArgumentError(f"system_mode {system_mode!r} out of range for {n} modes")
    k = 2.0 if (Convention(convention) is Convention.UNIFORM or n == 1) else 1.0
    d = np.ones(2 * n)
    sl = slice(2 * system_mode, 2 * system_mode + 2)
    d[sl] = math.exp(-0.5 * big_gamma)
    cm = state.cm * np.outer(d, d)
    cm[sl, sl] += k * delta_gamma * np.eye(2)
    out = GaussianState(0.5 * (cm + cm.T))
    report = check_bona_fide(out, tol=LEGITIMACY_TOL)
    out.meta["bona_fide"] = report.valid
    out.meta["min_eigenvalue"] = report.min_eigenvalue
    if not report.valid:
        log.warning("evolved state violates the uncertainty relation (min eigenvalue %.3g)", report.min_eigenvalue)
    return out


def evolve(
    state: GaussianState,
    t: float,
    bath: BathSpec,
    system_mode: int = 0,
    *,
    convention: Convention = Convention.UNIFORM,
    weak_coupling: bool = False,
    source: Source = Source.CLOSED_FORM,
) -> GaussianState:
    """Evolve ``state`` to time ``t`` with the channel acting on ``system_mode``.

    The other modes evolve freely, which in the interaction picture leaves
    their blocks unchanged.
    """
    coeffs = coefficients_at(t, bath, source=source)
    g, dg = coeffs.at(len(coeffs) - 1, weak_coupling=weak_coupling)
    return apply_channel(state, g, dg, system_mode, convention)
