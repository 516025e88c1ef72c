import math

import numpy as np
import pytest

from su11squeeze import IDENTITY, compose, step_coeffs
from su11squeeze import kernels
from su11squeeze.errors import SingularCompositionError
from su11squeeze.kernels import (
    _fold_numpy,
    _rk4_numpy,
    active_backend,
    fold_ladder,
    record_steps,
    rk4_propagate,
)


def resonance_ladder(n=5000, t_final=5.0):
    tau = t_final / n
    ts = tau * np.arange(1, n + 1)
    omega = 0.5 * ((1.0 + 1.04) + (1.0 - 1.04) * np.cos(2.04 * ts))
    return omega, tau


class TestBackendSelection:
    def test_env_flag_forces_numpy(self, monkeypatch):
        monkeypatch.setenv("SU11SQUEEZE_NO_NUMBA", "1")
        assert active_backend() == "numpy"

    def test_default_uses_numba_when_available(self, monkeypatch):
        monkeypatch.delenv("SU11SQUEEZE_NO_NUMBA", raising=False)
        if kernels._HAVE_NUMBA:
            assert active_backend() == "numba"
        else:
            assert active_backend() == "numpy"


class TestFoldLadder:
    def test_record_steps_cover_final_step(self):
        assert list(record_steps(10, 3)) == [3, 6, 9, 10]
        assert list(record_steps(10, 5)) == [5, 10]
        assert list(record_steps(3, 10)) == [3]
        assert list(record_steps(4, 1)) == [1, 2, 3, 4]

    def test_matches_scalar_composition(self):
        omega, tau = resonance_ladder(n=400)
        rec, alpha, beta, gamma, defect, _ = fold_ladder(omega, 1.0, tau, record_every=50)
        acc = IDENTITY
        k = 0
        for j, w in enumerate(omega, 1):
            acc = compose(acc, step_coeffs(float(w), 1.0, tau))
            if j == rec[k]:
                assert abs(acc.alpha - alpha[k]) < 1e-12
                assert abs(acc.beta - beta[k]) < 1e-12
                assert abs(acc.gamma - gamma[k]) < 1e-12
                assert abs(acc.norm_defect - defect[k]) < 1e-12
                k += 1
        assert k == rec.shape[0]

    @pytest.mark.skipif(not kernels._HAVE_NUMBA, reason="numba unavailable")
    def test_numba_and_numpy_paths_agree(self):
        omega, tau = resonance_ladder(n=20_000)
        rec = record_steps(omega.shape[0], 100)
        out = {}
        for name, impl in (("numba", kernels._fold_numba), ("numpy", _fold_numpy)):
            alpha = np.empty(rec.shape[0], np.complex128)
            beta = np.empty_like(alpha)
            gamma = np.empty_like(alpha)
            defect = np.empty(rec.shape[0], np.float64)
            max_defect, bad = impl(omega, 1.0, tau, rec, alpha, beta, gamma, defect)
            assert bad == 0
            out[name] = (alpha, beta, gamma, max_defect)
        for a, b in zip(out["numba"][:3], out["numpy"][:3]):
            np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)

    def test_env_flag_changes_executed_path(self, monkeypatch):
        omega, tau = resonance_ladder(n=300)
        monkeypatch.setenv("SU11SQUEEZE_NO_NUMBA", "true")
        rec1 = fold_ladder(omega, 1.0, tau, 30)
        monkeypatch.delenv("SU11SQUEEZE_NO_NUMBA")
        rec2 = fold_ladder(omega, 1.0, tau, 30)
        np.testing.assert_allclose(rec1[1], rec2[1], rtol=1e-12)

    def test_singular_status_raises_with_context(self, monkeypatch):
        def fake_impl(omega, omega0, tau, rec, alpha, beta, gamma, defect):
            return 0.0, 3

        monkeypatch.setattr(kernels, "_fold_numba", fake_impl)
        monkeypatch.setattr(kernels, "_fold_numpy", fake_impl)
        with pytest.raises(SingularCompositionError) as err:
            fold_ladder(np.array([1.1, 1.2, 1.3, 1.4]), 1.0, 0.1, 1)
        assert err.value.step == 3
        assert err.value.omega == pytest.approx(1.3)

    def test_bad_record_every_rejected(self):
        with pytest.raises(ValueError):
            fold_ladder(np.array([1.0]), 1.0, 0.1, 0)


class TestRk4Propagate:
    def _vacuum(self, dim):
        psi = np.zeros(dim, np.complex128)
        psi[0] = 1.0
        return psi

    @pytest.mark.skipif(not kernels._HAVE_NUMBA, reason="numba unavailable")
    def test_numba_and_numpy_paths_agree(self):
        omega, tau = resonance_ladder(n=200, t_final=0.2)
        psi0 = self._vacuum(32)
        a = kernels._rk4_numba(omega, 1.0, tau, psi0.copy(), 4)
        b = _rk4_numpy(omega, 1.0, tau, psi0.copy(), 4)
        np.testing.assert_allclose(a[0], b[0], rtol=1e-12, atol=1e-14)
        assert a[1] == pytest.approx(b[1], rel=1e-12)
        assert a[3] == pytest.approx(b[3], rel=1e-9, abs=1e-20)

    def test_norm_tracking_brackets_unity(self):
        omega = np.full(50, 1.3)
        psi0 = self._vacuum(16)
        _, min_norm2, max_norm2, max_edge = rk4_propagate(omega, 1.0, 0.01, psi0, 4)
        assert min_norm2 <= 1.0 <= max_norm2 + 1e-12
        assert max_norm2 - min_norm2 < 1e-10
        assert max_edge < 1e-8  # mild squeezing leaves only a faint tail at the boundary

    def test_input_vector_is_not_mutated(self):
        omega = np.full(10, 1.2)
        psi0 = self._vacuum(8)
        before = psi0.copy()
        rk4_propagate(omega, 1.0, 0.01, psi0, 2)
        np.testing.assert_array_equal(psi0, before)

    def test_rejects_undersized_state(self):
        with pytest.raises(ValueError):
            rk4_propagate(np.array([1.0]), 1.0, 0.1, np.zeros(3, np.complex128), 1)

    def test_rejects_bad_substep_count(self):
        with pytest.raises(ValueError):
            rk4_propagate(np.array([1.0]), 1.0, 0.1, self._vacuum(8), 0)
