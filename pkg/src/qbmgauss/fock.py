"""Truncated Fock-space reference implementation.

Density matrices of one or two modes are evolved under the same time-local
master equation as the Gaussian channel,

    d rho/dt = (Delta + gamma)/2 D[a] rho + (Delta - gamma)/2 D[a^dag] rho,
    D[L] rho = 2 L rho L^dag - {L^dag L, rho},

and the metrics are computed by dense linear algebra.  Nothing here uses the
covariance-matrix formulas, which is the point: it is an oracle for them.
Truncated ladder operators keep the generator trace preserving; population
in the top level is reported as a leakage estimate.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .channel import BathSpec, delta, gamma
from .errors import InvalidArgumentError, NumericalError, TruncationError
from .states import Family, StateSpec

DEFAULT_CUTOFF = 40
LEAKAGE_LIMIT = 1e-6
MAX_COND = 1e10


@dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    """Density matrix on (cutoff+1)^n_modes levels, modes ordered as in kron."""

    rho: np.ndarray
    n_modes: int
    cutoff: int
    leakage: float = 0.0

    def __post_init__(self):
        if self.n_modes not in (1, 2):
            raise InvalidArgumentError(f"Fock oracle supports 1 or 2 modes, got {self.n_modes}")
        dim = (self.cutoff + 1) ** self.n_modes
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (dim, dim):
            raise InvalidArgumentError(f"expected a {dim}x{dim} matrix, got {rho.shape}")
        herm = np.max(np.abs(rho - rho.conj().T))
        if herm > 1e-6:
            raise InvalidArgumentError(f"density matrix is not Hermitian (deviation {herm:.3g})")
        rho = 0.5 * (rho + rho.conj().T)
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.rho)[0])


def _squeezed_amplitudes(r: float, cutoff: int) -> np.ndarray:
    c = np.zeros(cutoff + 1)
    c[0] = 1.0 / math.sqrt(math.cosh(r))
    th = -math.tanh(r)
    for n in range(0, (cutoff - 2) // 2 + 1):
        c[2 * n + 2] = c[2 * n] * th * math.sqrt((2 * n + 1) * (2 * n + 2)) / (2 * (n + 1))
    return c


def build_fock(spec: StateSpec, cutoff: int = DEFAULT_CUTOFF) -> FockDensityMatrix:
    """Density matrix of ``spec`` truncated at ``cutoff`` quanta per mode."""
    if int(cutoff) != cutoff or cutoff < 1:
        raise InvalidArgumentError(f"cutoff must be a positive integer, got {cutoff!r}")
    cutoff = int(cutoff)
    n = cutoff + 1
    fam = spec.family
    if fam is Family.VACUUM:
        psi = np.zeros(n)
        psi[0] = 1.0
        rho, modes, leak = np.outer(psi, psi), 1, 0.0
    elif fam is Family.THERMAL:
        nb = spec.n_bar
        q = nb / (nb + 1)
        p = q ** np.arange(n) / (nb + 1)
        rho, modes, leak = np.diag(p), 1, q**n
    elif fam is Family.SQUEEZED1:
        psi = _squeezed_amplitudes(spec.r, cutoff)
        rho, modes, leak = np.outer(psi, psi), 1, max(1.0 - psi @ psi, 0.0)
    elif fam is Family.SQUEEZED2:
        th = math.tanh(spec.r)
        diag = th ** np.arange(n) / math.cosh(spec.r)
        psi = np.zeros((n, n))
        psi[np.arange(n), np.arange(n)] = diag
        psi = psi.ravel()
        rho, modes, leak = np.outer(psi, psi), 2, th ** (2 * n)
    else:
        raise InvalidArgumentError(f"Fock oracle does not build {fam.value} states")
    if leak > LEAKAGE_LIMIT:
        raise TruncationError(f"truncation leakage {leak:.3g} exceeds {LEAKAGE_LIMIT} at cutoff {cutoff}", estimate=leak)
    return FockDensityMatrix(rho, modes, cutoff, float(leak))


def _lindblad(r, k_minus, k_plus, sq, num, num_up):
    # r has the system row/column indices on axes 0 and 1
    out = np.zeros_like(r)
    if k_minus:
        jump = np.zeros_like(r)
        jump[:-1, :-1] = sq[1:, None] * sq[None, 1:] * r[1:, 1:]
        out += k_minus * (2 * jump - num[:, None] * r - r * num[None, :])
    if k_plus:
        jump = np.zeros_like(r)
        jump[1:, 1:] = sq[1:, None] * sq[None, 1:] * r[:-1, :-1]
        out += k_plus * (2 * jump - num_up[:, None] * r - r * num_up[None, :])
    return out


def evolve_fock(
    rho0: FockDensityMatrix,
    t_grid: Sequence[float],
    bath: BathSpec,
    system_mode: int = 0,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> list[FockDensityMatrix]:
    """Integrate the master equation from t = 0 and return rho at each grid time.

    The rates come from the channel's coefficient functions.  Other modes
    evolve trivially.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0 or t_grid[0] < 0 or np.any(np.diff(t_grid) <= 0):
        raise InvalidArgumentError("t_grid must be a nonempty strictly ascending array of times >= 0")
    if not 0 <= system_mode < rho0.n_modes:
        raise InvalidArgumentError(f"system_mode {system_mode} out of range")
    n = rho0.cutoff + 1
    m = rho0.n_modes
    shape = (n,) * (2 * m)
    perm_axes = (system_mode, m + system_mode)
    sq = np.sqrt(np.arange(n, dtype=float))
    num = np.arange(n, dtype=float)
    num_up = np.r_[num[1:], 0.0]
    extra = (1,) * (2 * m - 2)
    sq_b, num_b, up_b = sq.reshape((n,) + extra), num.reshape((n,) + extra), num_up.reshape((n,) + extra)

    def rhs(t, y):
        d, g = float(delta(t, bath)) if t > 0 else 0.0, float(gamma(t, bath))
        r = np.moveaxis(y.reshape(shape), perm_axes, (0, 1))
        out = _lindblad(r, 0.5 * (d + g), 0.5 * (d - g), sq_b, num_b, up_b)
        return np.moveaxis(out, (0, 1), perm_axes).ravel()

    y0 = np.array(rho0.rho, dtype=complex).reshape(shape).ravel()
    if t_grid[-1] == 0:
        return [rho0 for _ in t_grid]
    sol = solve_ivp(rhs, (0.0, t_grid[-1]), y0, method="RK45", t_eval=t_grid, rtol=rtol, atol=atol)
    if not sol.success:
        raise NumericalError(f"master-equation integration failed: {sol.message}")
    out = []
    for k in range(t_grid.size):
        rho = sol.y[:, k].reshape(n**m, n**m)
        tr = np.trace(rho).real
        if abs(tr - rho0.trace) > 1e-8:
            raise NumericalError(f"trace drifted by {tr - rho0.trace:.3g}")
        out.append(FockDensityMatrix(rho, m, rho0.cutoff, _top_population(rho, n, m)))
    return out


def _top_population(rho, n, m) -> float:
    diag = np.diag(rho).real.reshape((n,) * m)
    return max(float(sum(diag.take(n - 1, axis=ax).sum() for ax in range(m))), 0.0)


def quadrature_operators(cutoff: int, n_modes: int) -> list[np.ndarray]:
    """[x1, p1, x2, p2, ...] with x = (a + a^dag)/sqrt 2 on the truncated space."""
    n = cutoff + 1
    a = np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1)
    x = (a + a.T) / math.sqrt(2)
    p = (a - a.T) / (1j * math.sqrt(2))
    eye = np.eye(n)
    ops = []
    for k in range(n_modes):
        for single in (x, p):
            factors = [single if j == k else eye for j in range(n_modes)]
            op = factors[0]
            for f in factors[1:]:
                op = np.kron(op, f)
            ops.append(op)
    return ops


def fock_covariance(state: FockDensityMatrix) -> np.ndarray:
    """sigma_ij = <{R_i, R_j}> (vacuum = identity), ignoring first moments (zero here)."""
    ops = quadrature_operators(state.cutoff, state.n_modes)
    k = len(ops)
    cm = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            v = np.trace(state.rho @ (ops[i] @ ops[j] + ops[j] @ ops[i])).real
            cm[i, j] = cm[j, i] = v
    return cm


def _psd_power(rho, p):
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    return (v * w**p) @ v.conj().T


def fock_fidelity(a: FockDensityMatrix, b: FockDensityMatrix) -> float:
    """[Tr sqrt(sqrt(a) b sqrt(a))]^2, evaluated as (trace norm of sqrt(a) sqrt(b))^2.

    The singular values avoid square-rooting rounding-level eigenvalues.
    """
    if a.dim != b.dim:
        raise InvalidArgumentError("density matrices have different dimensions")
    sv = np.linalg.svd(_psd_power(a.rho, 0.5) @ _psd_power(b.rho, 0.5), compute_uv=False)
    return float(np.sum(sv) ** 2)


def partial_transpose_fock(state: FockDensityMatrix, modes: Iterable[int]) -> np.ndarray:
    n, m = state.cutoff + 1, state.n_modes
    t = state.rho.reshape((n,) * (2 * m))
    for k in set(modes):
        if not 0 <= k < m:
            raise InvalidArgumentError(f"mode index {k} out of range")
        t = np.swapaxes(t, k, m + k)
    return t.reshape(n**m, n**m)


def fock_log_negativity(state: FockDensityMatrix, bipartition: Iterable[int] = (1,)) -> float:
    """ln ||rho^T_B||_1 with T_B the transpose on ``bipartition``."""
    part = set(bipartition)
    if state.n_modes < 2 or not part or len(part) >= state.n_modes:
        raise InvalidArgumentError("log-negativity needs a nonempty proper subset of at least two modes")
    w = np.linalg.eigvalsh(partial_transpose_fock(state, part))
    return float(math.log(np.sum(np.abs(w))))


def fock_quasi_entropy(a: FockDensityMatrix, b: FockDensityMatrix, kappa: float) -> float:
    """Tr[a^kappa b^(1 - kappa)]; ``b`` must be well conditioned on the truncated space."""
    if a.dim != b.dim:
        raise InvalidArgumentError("density matrices have different dimensions")
    w, v = np.linalg.eigh(b.rho)
    if w[0] <= 0 or w[-1] / w[0] > MAX_COND:
        raise NumericalError(f"second state is ill-conditioned (eigenvalues {w[0]:.3g} .. {w[-1]:.3g})")
    b_pow = (v * w ** (1.0 - kappa)) @ v.conj().T
    return float(np.trace(_psd_power(a.rho, kappa) @ b_pow).real)


def fock_petz_renyi(a: FockDensityMatrix, b: FockDensityMatrix, kappa: float) -> float:
    return math.log(fock_quasi_entropy(a, b, kappa)) / (kappa - 1)
