import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbmgauss.channel import BathSpec, Convention, evolve
from qbmgauss.errors import DomainError, InvalidArgumentError, NotFoundError
from qbmgauss.metrics import (
    Metric,
    PetzRenyiRequest,
    critical_time,
    fidelity_aux_form,
    fidelity_closed,
    fidelity_general,
    log_negativity,
    log_negativity_two_mode,
    metric_series,
    petz_renyi_condition,
    petz_renyi_entropy,
    petz_renyi_quasi_entropy,
    power_cm,
    two_mode_pt_spectrum,
)
from qbmgauss.states import basset_hound, squeezed, thermal, two_mode_squeezed, vacuum
from qbmgauss.symplectic import GaussianState, symplectic_form
from support import random_state, sign_changes

FIG2 = BathSpec(0.1, 50.0, 7.0, 1.0)
FIG5 = BathSpec(0.3, 50.0, 7.0, 1.0)


def pair(n, seed, **kw):
    rng = np.random.default_rng(seed)
    return random_state(n, rng, **kw), random_state(n, rng, **kw)


class TestFidelity:
    def test_identical(self):
        for s in (squeezed(2.0), thermal(1.5), two_mode_squeezed(1.0), basset_hound(0.8)):
            assert fidelity_general(s, s) == pytest.approx(1.0, abs=1e-10)

    def test_squeezed_overlap(self):
        f = fidelity_general(squeezed(2.0), squeezed(3.0))
        assert f == pytest.approx(1 / math.cosh(1.0), abs=1e-10)
        assert f == pytest.approx(0.648054, abs=1e-6)

    def test_two_mode_squeezed_overlap(self):
        a, b = two_mode_squeezed(2.0), two_mode_squeezed(3.0)
        assert fidelity_closed(a, b) == pytest.approx(1 / math.cosh(1.0) ** 2, abs=1e-10)
        assert fidelity_general(a, b) == pytest.approx(0.419974, abs=1e-6)

    def test_thermal_pair(self):
        want = (math.sqrt(6) - math.sqrt(2)) ** -2
        assert fidelity_general(thermal(1.0), thermal(2.0)) == pytest.approx(want, rel=1e-12)
        assert fidelity_closed(thermal(1.0), thermal(2.0)) == pytest.approx(want, rel=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 2), st.integers(0, 2**32 - 1), st.booleans())
    def test_closed_form_agrees_with_general(self, n, seed, pure):
        a, b = pair(n, seed, pure=pure, max_r=0.8)
        assert fidelity_closed(a, b) == pytest.approx(fidelity_general(a, b), abs=1e-8)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_aux_form_agrees(self, n, seed):
        a, b = pair(n, seed)
        assert fidelity_aux_form(a, b) == pytest.approx(fidelity_general(a, b), abs=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_symmetry_and_range(self, n, seed):
        a, b = pair(n, seed)
        f = fidelity_general(a, b)
        assert 0 <= f <= 1
        assert fidelity_general(b, a) == pytest.approx(f, abs=1e-10)
        if n <= 2:
            assert fidelity_closed(b, a) == pytest.approx(fidelity_closed(a, b), abs=1e-10)

    def test_mode_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            fidelity_general(vacuum(1), vacuum(2))

    def test_closed_form_mode_limit(self):
        with pytest.raises(InvalidArgumentError):
            fidelity_closed(basset_hound(1.0), basset_hound(1.0))

    def test_clip_is_logged(self, caplog, monkeypatch):
        from qbmgauss import metrics

        with caplog.at_level(logging.WARNING):
            assert metrics._clip_fidelity(1 + 1e-3) == 1.0
        assert caplog.records
        caplog.clear()
        with caplog.at_level(logging.WARNING):
            assert metrics._clip_fidelity(1 + 1e-9) == 1.0
        assert not caplog.records

    def test_late_time_approach(self):
        # both inputs relax to the same bath state, so F creeps toward 1
        s = metric_series(Metric.FIDELITY, squeezed(2.0), FIG2, [0.0, 30.0, 120.0, 800.0], squeezed(3.0))
        assert np.all(np.diff(s.values) > 0)
        assert s.values[-1] < 1.0

    @pytest.mark.xfail(strict=True, reason="relaxation at alpha=0.1 is far slower than tω_c=30; see ledger")
    def test_saturated_by_thirty(self):
        s = metric_series(Metric.FIDELITY, squeezed(2.0), FIG2, [30.0, 800.0], squeezed(3.0))
        assert s.values[0] > 0.99 * s.values[1]


class TestLogNegativity:
    def test_product_state(self):
        assert log_negativity(vacuum(2), {0}) == 0.0

    @pytest.mark.parametrize("r", [0.3, 1.0, 2.0])
    def test_two_mode_squeezed(self, r):
        assert log_negativity(two_mode_squeezed(r), {0}) == pytest.approx(2 * r, abs=1e-9)
        assert log_negativity(two_mode_squeezed(r), {1}) == pytest.approx(2 * r, abs=1e-9)

    def test_basset_hound_purification(self):
        # mode 1 against modes (2, 3) carries the same entanglement as a twin beam
        got = log_negativity(basset_hound(2.0), {0})
        assert got == pytest.approx(log_negativity(two_mode_squeezed(2.0), {0}), abs=1e-6)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0, 10), st.floats(0.1, 50))
    def test_closed_form_spectrum(self, seed, t, temp):
        s = random_state(2, np.random.default_rng(seed), max_r=1.2)
        s = evolve(s, t, BathSpec(0.2, temp, 7.0, 1.0))
        nu_m, nu_p = two_mode_pt_spectrum(s)
        from qbmgauss.metrics import partial_transpose_spectrum

        assert np.allclose([nu_m, nu_p], partial_transpose_spectrum(s, {1}), rtol=1e-9)
        assert log_negativity_two_mode(s) == pytest.approx(log_negativity(s, {1}), abs=1e-9)
        assert log_negativity(s, {1}) >= 0

    @pytest.mark.parametrize("part", [set(), {0, 1}, {2}])
    def test_invalid_bipartition(self, part):
        with pytest.raises(InvalidArgumentError):
            log_negativity(two_mode_squeezed(1.0), part)

    def test_non_monotone_window(self):
        t = np.linspace(0, 2, 401)
        s = metric_series(Metric.LOG_NEGATIVITY, two_mode_squeezed(2.0), FIG2, t)
        assert s.values[0] == pytest.approx(4.0, abs=1e-9)
        assert sign_changes(s.values) >= 1


class TestPowerCM:
    def test_kappa_two_closed_form(self):
        s = evolve(squeezed(0.5), 1.0, FIG5).cm
        om = symplectic_form(1)
        assert np.allclose(power_cm(s, 2), 0.5 * (s + om.T @ np.linalg.inv(s) @ om), rtol=1e-12)

    def test_first_power_is_identity_map(self):
        s = evolve(two_mode_squeezed(0.5), 1.0, FIG5).cm
        assert np.allclose(power_cm(s, 1), s, rtol=1e-12)

    def test_thermal_powers(self):
        # rho^p of a thermal state is thermal with q -> q^p
        nb, p = 1.0, 2.5
        q = (nb / (nb + 1)) ** p
        want = (1 + q) / (1 - q)
        assert np.allclose(power_cm(thermal(nb).cm, p), want * np.eye(2), rtol=1e-12)


class TestPetzRenyi:
    def test_thermal_anchor(self):
        assert petz_renyi_quasi_entropy(thermal(1.0), thermal(2.0), 2) == pytest.approx(6 / 5, rel=1e-12)
        assert petz_renyi_entropy(thermal(1.0), thermal(2.0), 2) == pytest.approx(math.log(6 / 5), abs=1e-12)

    @pytest.mark.parametrize("kappa", [1.5, 2.0, 3.0])
    def test_thermal_series(self, kappa):
        # Q = sum p_n^k q_n^(1-k) for commuting thermal states
        p = lambda nb, n: nb**n / (nb + 1) ** (n + 1)  # noqa: E731
        n = np.arange(400)
        want = np.sum(p(0.7, n) ** kappa * p(1.8, n) ** (1 - kappa))
        assert petz_renyi_quasi_entropy(thermal(0.7), thermal(1.8), kappa) == pytest.approx(want, rel=1e-10)

    def test_identical_states_zero(self):
        s = evolve(two_mode_squeezed(0.6), 1.5, FIG5)
        for kappa in (1.3, 2.0, 3.0):
            assert petz_renyi_entropy(s, s, kappa) == pytest.approx(0.0, abs=1e-9)

    def test_request_object(self):
        req = PetzRenyiRequest(2.0, thermal(1.0), thermal(2.0))
        assert petz_renyi_condition(req).holds
        assert petz_renyi_entropy(req) == pytest.approx(math.log(1.2))

    @pytest.mark.parametrize("kappa", [1.0, 0.5, math.inf, math.nan])
    def test_kappa_domain(self, kappa):
        with pytest.raises(InvalidArgumentError):
            PetzRenyiRequest(kappa, thermal(1.0), thermal(2.0))

    def test_pure_states_rejected(self):
        with pytest.raises(InvalidArgumentError):
            PetzRenyiRequest(2.0, squeezed(1.0), thermal(1.0))

    def test_mode_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            PetzRenyiRequest(2.0, thermal(1.0), GaussianState(3 * np.eye(4)))

    def test_condition_violation(self):
        rep = petz_renyi_condition(thermal(2.0), thermal(0.2), 2.0)
        assert not rep.holds
        with pytest.raises(DomainError):
            petz_renyi_entropy(thermal(2.0), thermal(0.2), 2.0)

    def test_identical_thermal_condition_reported(self):
        rep = petz_renyi_condition(thermal(1.0), thermal(1.0), 2.0)
        # sigma_(1) - sigma_(2) = 3 - 5/3 for n = 1
        assert rep.min_eigenvalue == pytest.approx(3 - 5 / 3, rel=1e-12)

    def test_kappa_to_one_blows_up(self):
        s = thermal(1.0)
        lam = [petz_renyi_condition(s, s, 1 + e).min_eigenvalue for e in (1e-1, 1e-2, 1e-3)]
        assert lam[0] < lam[1] < lam[2]
        assert lam[2] > 100

    def test_nonnegative_on_domain(self):
        a = evolve(squeezed(2.0), 1.0, FIG5)
        b = evolve(squeezed(3.0), 1.0, FIG5)
        assert petz_renyi_entropy(a, b, 2.0) >= 0

    def test_condition_onset_fig5(self):
        for t, holds in ((0.04, False), (0.07, True), (0.5, True)):
            a = evolve(squeezed(2.0), t, FIG5)
            b = evolve(squeezed(3.0), t, FIG5)
            assert petz_renyi_condition(a, b, 2.0).holds is holds

    def test_series_shape(self):
        t = np.linspace(0, 5, 201)
        s = metric_series(Metric.PETZ_RENYI, squeezed(2.0), FIG5, t, squeezed(3.0))
        assert s.t_star == pytest.approx(0.06, abs=0.02)
        defined = s.values[t > s.t_star + 0.01]
        assert np.all(np.isfinite(defined)) and np.all(defined >= 0)
        assert defined[-1] < defined[0]
        assert sign_changes(defined) >= 1
        steps = np.abs(np.diff(defined))
        assert np.max(steps[1:]) <= 10 * np.max(steps[:-1])


class TestCriticalTime:
    def test_one_mode(self):
        assert critical_time(squeezed(2.0), squeezed(3.0), FIG5) == pytest.approx(0.06, abs=0.02)

    def test_not_found(self):
        with pytest.raises(NotFoundError):
            critical_time(squeezed(3.0), squeezed(2.0), FIG5, t_max=1.0)

    def test_kappa_domain(self):
        with pytest.raises(InvalidArgumentError):
            critical_time(squeezed(2.0), squeezed(3.0), FIG5, kappa=0.5)

    def test_two_mode_halved_diffusion(self):
        t = critical_time(two_mode_squeezed(2.0), two_mode_squeezed(3.0), FIG5, convention=Convention.PAPER)
        assert t == pytest.approx(0.13, abs=0.03)
