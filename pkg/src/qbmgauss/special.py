"""Gauss hypergeometric evaluations on [0, 1) and adaptive quadrature."""

import math
import warnings

import numpy as np
from scipy import integrate, special

from .errors import DomainError, InvalidArgumentError, NumericalError

Z_MAX = 1.0 - 1e-6
MAX_TERMS = 10**6
DEFAULT_TOL = 1e-15

# Below this z the plain series is summed term by term in Python (a few
# dozen terms at most); above it long series are summed in numpy chunks.
_LOOP_TERMS = 64
_CHUNK = 4096
# For c == a + b the logarithmic z -> 1 - z expansion replaces the series.
_LOG_SWITCH = 0.5


def _is_nonpositive_int(v: complex) -> bool:
    return v.imag == 0 and v.real <= 0 and v.real == math.floor(v.real)


def hyp2f1(a, b, c, z: float, tol: float = DEFAULT_TOL, max_terms: int = MAX_TERMS) -> complex:
    """2F1(a, b; c; z) for complex parameters and real 0 <= z <= 1 - 1e-6.

    The Gauss series is summed until three consecutive terms fall below
    ``tol`` times the partial sum.  When c == a + b and z > 1/2 the
    logarithmic expansion about z = 1 is used instead, since the series
    there needs of order 1/(1 - z) terms.
    """
    a, b, c = complex(a), complex(b), complex(c)
    z = float(z)
    if _is_nonpositive_int(c):
        raise InvalidArgumentError(f"c = {c} is a non-positive integer")
    if not 0.0 <= z <= Z_MAX + 1e-15:
        raise DomainError(f"z = {z!r} outside [0, 1 - 1e-6]")
    if z == 0.0:
        return 1.0 + 0.0j
    terminating = _is_nonpositive_int(a) or _is_nonpositive_int(b)
    if z > _LOG_SWITCH and abs(c - a - b) < 1e-14 and not terminating:
        return _hyp2f1_log(a, b, 1.0 - z, tol)
    return _hyp2f1_series(a, b, c, z, tol, max_terms)


def _hyp2f1_series(a, b, c, z, tol, max_terms):
    total = term = 1.0 + 0.0j
    small = 0
    for k in range(min(_LOOP_TERMS, max_terms)):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
        if term == 0:
            return total
        small = small + 1 if abs(term) < tol * abs(total) else 0
        if small >= 3:
            return total
    k0 = _LOOP_TERMS
    while k0 < max_terms:
        k = np.arange(k0, min(k0 + _CHUNK, max_terms), dtype=float)
        terms = term * np.cumprod((a + k) * (b + k) / ((c + k) * (k + 1)) * z)
        partial = total + np.cumsum(terms)
        below = np.abs(terms) < tol * np.abs(partial)
        # first index ending a run of three consecutive small terms
        run = np.convolve(np.r_[np.ones(small, bool), below].astype(int), np.ones(3, int), "valid")
        hit = np.flatnonzero(run == 3)
        if hit.size:
            return complex(partial[hit[0] + 2 - small])
        small = 0
        for flag in below[::-1]:
            if not flag:
                break
            small += 1
        small = min(small, 2)
        term, total = terms[-1], partial[-1]
        if not np.isfinite(total):
            raise NumericalError("hypergeometric series overflowed")
        k0 += k.size
    raise NumericalError(f"hypergeometric series did not converge in {max_terms} terms", estimate=complex(total))


def _hyp2f1_log(a, b, w, tol):
    # 2F1(a,b;a+b;1-w) = G(a+b)/(G(a)G(b)) * sum_n (a)_n (b)_n / n!^2
    #                    * [2 psi(n+1) - psi(a+n) - psi(b+n) - ln w] w^n
    pre = special.gamma(a + b) / (special.gamma(a) * special.gamma(b))
    coef = 1.0 + 0.0j
    psi_1 = complex(special.psi(1.0))
    psi_a, psi_b = complex(special.psi(a)), complex(special.psi(b))
    log_w = math.log(w)
    total = 0.0 + 0.0j
    for n in range(10_000):
        term = coef * (2 * psi_1 - psi_a - psi_b - log_w)
        total += term
        if n > 2 and abs(term) < tol * abs(total):
            return complex(pre * total)
        coef *= (a + n) * (b + n) / ((n + 1) ** 2) * w
        psi_1 += 1.0 / (n + 1)
        psi_a += 1.0 / (a + n)
        psi_b += 1.0 / (b + n)
    raise NumericalError("logarithmic hypergeometric expansion did not converge", estimate=complex(pre * total))


def _z_of(t: float, bath) -> float:
    return math.exp(-bath.nu1 * t)


def f_bar(x, t: float, bath) -> complex:
    """F(x, t) = 2F1(x, 1; x + 1; exp(-nu1 t)), nu1 = 2 pi T."""
    return hyp2f1(x, 1.0, complex(x) + 1.0, _z_of(t, bath))


def g_bar(x, t: float, bath) -> complex:
    """G(x, t) = 2F1(2, x + 1; x + 2; exp(-nu1 t))."""
    return hyp2f1(2.0, complex(x) + 1.0, complex(x) + 2.0, _z_of(t, bath))


def adaptive_quad(f, a: float, b: float, tol: float = 1e-10, limit: int = 500) -> float:
    """Adaptive Gauss-Kronrod integral of ``f`` over [a, b] to absolute ``tol``.

    Raises NumericalError (with the best estimate attached) when QUADPACK
    reports that the subdivision limit or roundoff prevented convergence.
    """
    if b < a:
        raise InvalidArgumentError(f"integration bounds out of order: {a} > {b}")
    if a == b:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(f, a, b, epsabs=tol, epsrel=0.0, limit=limit, full_output=1)
    value, err = out[0], out[1]
    if len(out) > 3 and err > tol:
        raise NumericalError(f"adaptive quadrature failed on [{a}, {b}]: {out[3]}", estimate=value)
    return value


__all__ = ["Z_MAX", "hyp2f1", "f_bar", "g_bar", "adaptive_quad"]
