import cmath
import math

import numpy as np
import pytest

from su11squeeze import (
    FockState,
    IDENTITY,
    PropagatorAccumulator,
    apply_to_state,
    auto_converge,
    constant,
    discretize,
    evolve,
    fock_amplitudes,
    janszky_adam,
    observables_from_accumulator,
    parametric_resonance,
    relaxing_pulse,
    sudden_jump,
)
from su11squeeze.errors import InvalidAccumulatorError, LeakageError


def squeezed_acc(r, vartheta, chi=0.0):
    """Accumulator with |alpha| = tanh(r) and exact normalization."""
    alpha = math.tanh(r) * cmath.exp(1j * vartheta)
    beta = (1.0 - math.tanh(r) ** 2) * cmath.exp(1j * chi)
    return PropagatorAccumulator(alpha, beta, 0j, 1)


def reference_squeezed_amplitudes(r, phi, n_max):
    """Number-basis expansion of a squeezed vacuum written the other way
    around: sqrt(sech r) prefactor and (-e^{i phi} tanh(r) / 2)^n weights."""
    amp = np.zeros(n_max + 1, dtype=np.complex128)
    amp[0] = math.sqrt(1.0 / math.cosh(r))
    factor = -0.5 * cmath.exp(1j * phi) * math.tanh(r)
    for n in range(1, n_max // 2 + 1):
        amp[2 * n] = amp[2 * n - 2] * (math.sqrt((2.0 * n) * (2.0 * n - 1.0)) / n) * factor
    return amp


class TestObservables:
    def test_no_squeezing_limit(self):
        obs = observables_from_accumulator(IDENTITY, t=0.0)
        assert obs.r == 0.0
        assert obs.mean_n == 0.0
        for lam in (0.0, 0.3, 1.2):
            o = observables_from_accumulator(IDENTITY, 0.0, lam=lam)
            assert o.variance == pytest.approx(0.25, abs=1e-15)

    def test_half_scaling_at_rest(self):
        obs = observables_from_accumulator(IDENTITY, 0.0, scaling="half")
        assert obs.variance == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize("scaling,s", [("half", 0.5), ("quarter", 0.25)])
    def test_principal_axes_select_the_envelope(self, scaling, s):
        acc = squeezed_acc(1.0, 0.7)
        phi = observables_from_accumulator(acc, 0.0, scaling=scaling).phi
        lo = observables_from_accumulator(acc, 0.0, lam=phi / 2.0, scaling=scaling)
        hi = observables_from_accumulator(acc, 0.0, lam=phi / 2.0 + math.pi / 2.0, scaling=scaling)
        assert lo.variance == pytest.approx(s * math.exp(-2.0), rel=1e-12)
        assert hi.variance == pytest.approx(s * math.exp(+2.0), rel=1e-12)
        assert lo.variance * hi.variance == pytest.approx(s * s, rel=1e-10)

    def test_phase_bookkeeping(self):
        for vartheta in (-3.0, -1.0, 0.0, 1.0, 3.0, math.pi):
            obs = observables_from_accumulator(squeezed_acc(0.4, vartheta), 0.0)
            assert obs.vartheta == pytest.approx(cmath.phase(cmath.exp(1j * vartheta)), abs=1e-12)
            assert -math.pi < obs.phi <= math.pi
            # phi = vartheta +- pi makes the two expansions identical
            assert cmath.isclose(cmath.exp(1j * obs.phi), -cmath.exp(1j * obs.vartheta), rel_tol=1e-12)

    def test_mean_photon_number(self):
        obs = observables_from_accumulator(squeezed_acc(0.8, 0.2), 0.0)
        assert obs.mean_n == pytest.approx(math.sinh(0.8) ** 2, rel=1e-12)

    def test_invalid_accumulator_rejected(self):
        bad = PropagatorAccumulator(1.0 + 0j, 0j, 0j, 1)
        with pytest.raises(InvalidAccumulatorError):
            observables_from_accumulator(bad, 0.0)

    def test_unknown_scaling_rejected(self):
        with pytest.raises(ValueError):
            observables_from_accumulator(IDENTITY, 0.0, scaling="third")

    def test_variance_envelope_and_uncertainty_product(self, rng):
        for _ in range(25):
            r = rng.uniform(0.0, 1.5)
            acc = squeezed_acc(r, rng.uniform(-math.pi, math.pi))
            obs = observables_from_accumulator(acc, 0.0)
            lo, hi = 0.25 * math.exp(-2 * r), 0.25 * math.exp(2 * r)
            for lam in rng.uniform(-math.pi, math.pi, 8):
                o = observables_from_accumulator(acc, 0.0, lam=float(lam))
                assert lo - 1e-12 <= o.variance <= hi + 1e-12
                partner = observables_from_accumulator(acc, 0.0, lam=float(lam) + math.pi / 2.0)
                assert o.variance * partner.variance >= 0.25**2 * (1.0 - 1e-10)
            at_lo = observables_from_accumulator(acc, 0.0, lam=obs.phi / 2.0)
            at_hi = observables_from_accumulator(acc, 0.0, lam=obs.phi / 2.0 + math.pi / 2.0)
            assert at_lo.variance == pytest.approx(lo, rel=1e-12)
            assert at_hi.variance == pytest.approx(hi, rel=1e-12)


class TestEvolve:
    def test_constant_frequency_never_squeezes(self):
        traj = evolve(discretize(constant(), 10.0, 2000), record_every=100)
        assert all(rec.r == 0.0 for rec in traj.records)
        assert all(rec.variance == 0.25 for rec in traj.records)
        assert traj.max_norm_defect < 1e-12  # |beta| drifts by ~N*eps, alpha stays exactly 0

    def test_record_grid(self):
        traj = evolve(discretize(constant(), 1.0, 1003), record_every=100)
        times = traj.times()
        tau = 1.0 / 1003
        assert times[0] == pytest.approx(100 * tau)
        assert times[-1] == pytest.approx(1.0)
        assert np.all(np.diff(times) > 0)

    def test_default_record_every_keeps_outputs_small(self):
        traj = evolve(discretize(constant(), 1.0, 20_000))
        assert len(traj.records) <= 5001

    def test_sudden_jump_peak_matches_analytic_maximum(self):
        traj = evolve(discretize(sudden_jump(1.5), 5.0, 100_000), record_every=1)
        r_max = max(rec.r for rec in traj.records)
        assert abs(r_max - math.log(1.5)) < 1e-6

    def test_relaxing_pulse_settles_once_frequency_returns(self):
        # B small enough that the pulse is long gone by t_final
        traj = evolve(discretize(relaxing_pulse(B=0.5 * math.pi), 60.0, 60_000))
        t = traj.times()
        r = traj.r_values()
        tail = r[t >= 54.0]
        assert tail.max() - tail.min() < 1e-9
        assert tail.mean() > 0.05
        variances = traj.variances()[t >= 54.0]
        assert variances.max() - variances.min() > 1e-3  # phase keeps the variance oscillating

    def test_final_accumulator_matches_last_record(self):
        traj = evolve(discretize(relaxing_pulse(B=math.pi), 5.0, 5000), record_every=500)
        assert traj.final.alpha == traj.records[-1].alpha
        assert traj.final.steps_applied == traj.n_steps_used


class TestFockAmplitudes:
    def test_vacuum(self):
        state = fock_amplitudes(IDENTITY, n_max=8)
        assert state.amplitudes[0] == 1.0
        assert np.all(state.amplitudes[1:] == 0.0)

    def test_matches_reference_expansion(self):
        acc = squeezed_acc(0.5, 1.1)
        obs = observables_from_accumulator(acc, 0.0)
        ours = fock_amplitudes(acc, n_max=60)
        reference = reference_squeezed_amplitudes(0.5, obs.phi, 60)
        np.testing.assert_allclose(ours.amplitudes, reference, rtol=1e-12, atol=1e-15)

    def test_amplitude_ratio_consistency(self):
        acc = squeezed_acc(0.75, -2.1)
        obs = observables_from_accumulator(acc, 0.0)
        state = fock_amplitudes(acc, n_max=4)
        ratio = state.amplitudes[2] / state.amplitudes[0]
        assert cmath.isclose(ratio, (1.0 / math.sqrt(2.0)) * abs(acc.alpha) * cmath.exp(1j * obs.vartheta), rel_tol=1e-12)
        assert cmath.isclose(ratio, -(1.0 / math.sqrt(2.0)) * math.tanh(0.75) * cmath.exp(1j * obs.phi), rel_tol=1e-12)

    def test_normalization_and_tail_bound(self):
        r = 0.5
        acc = squeezed_acc(r, 0.3)
        n_max = math.ceil(10.0 * math.log(10.0) / (-math.log(math.tanh(r))))  # tanh^n_max < 1e-10
        n_max += n_max % 2
        state = fock_amplitudes(acc, n_max=n_max)
        weights = np.abs(state.amplitudes) ** 2
        assert np.sum(weights) == pytest.approx(1.0, abs=1e-8)
        for n in range(0, n_max + 1, 2):
            assert weights[n] <= math.tanh(r) ** n + 1e-15
        assert np.all(weights[1::2] == 0.0)

    def test_odd_n_max_rejected(self):
        with pytest.raises(ValueError):
            fock_amplitudes(IDENTITY, n_max=7)


class TestApplyToState:
    def test_identity_returns_input(self):
        initial = FockState.basis_state(3, 10)
        out = apply_to_state(IDENTITY, initial, n_max=10)
        np.testing.assert_array_equal(out.amplitudes, initial.amplitudes)

    def test_vacuum_route_matches_fock_amplitudes(self):
        dprof = discretize(relaxing_pulse(B=0.5 * math.pi), 10.0, 10_000)
        traj = evolve(dprof)
        direct = fock_amplitudes(traj.final, n_max=64)
        applied = apply_to_state(traj.final, FockState.vacuum(), n_max=64)
        phase = applied.amplitudes[0] / abs(applied.amplitudes[0])
        np.testing.assert_allclose(applied.amplitudes / phase, direct.amplitudes,
                                   rtol=1e-10, atol=1e-12)

    def test_number_state_is_stationary_at_constant_frequency(self):
        traj = evolve(discretize(constant(), 3.0, 300))
        out = apply_to_state(traj.final, FockState.basis_state(1, 8), n_max=8)
        assert abs(out.amplitudes[1]) == pytest.approx(1.0, abs=1e-12)
        others = np.delete(out.amplitudes, 1)
        assert np.max(np.abs(others)) == 0.0

    def test_truncation_leakage_raises(self):
        traj = evolve(discretize(sudden_jump(2.5), math.pi / 5.0, 2000))
        with pytest.raises(LeakageError) as err:
            apply_to_state(traj.final, FockState.vacuum(), n_max=8)
        assert err.value.leakage > 1e-6

    def test_norm_precondition(self):
        unnormalized = FockState(np.array([0.5, 0.0, 0.5], dtype=np.complex128))
        with pytest.raises(ValueError):
            apply_to_state(IDENTITY, unnormalized)

    def test_n_max_must_hold_initial_state(self):
        with pytest.raises(ValueError):
            apply_to_state(IDENTITY, FockState.basis_state(6, 6), n_max=4)


class TestAutoConverge:
    def test_constant_profile_converges_immediately(self):
        traj = auto_converge(constant(), 5.0, tol=1e-8, n_start=500, n_records=100)
        assert traj.converged is True
        assert len(traj.convergence_history) == 1
        assert traj.convergence_history[0][1] == 0.0
        assert np.all(traj.r_values() == 0.0)

    def test_pulse_converges_with_shrinking_differences(self):
        traj = auto_converge(relaxing_pulse(B=0.5 * math.pi), 30.0, tol=1e-4,
                             n_start=1000, n_records=100)
        assert traj.converged is True
        diffs = [diff for _, diff in traj.convergence_history]
        assert all(b < a for a, b in zip(diffs, diffs[1:]))

    def test_cap_returns_soft_failure(self):
        with pytest.warns(RuntimeWarning):
            traj = auto_converge(parametric_resonance(2.04, 1.04), 20.0, tol=1e-15,
                                 n_start=500, n_records=100, cap=4000)
        assert traj.converged is False
        assert traj.convergence_history

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            auto_converge(constant(), 1.0, tol=0.0)
        with pytest.raises(ValueError):
            auto_converge(constant(), 1.0, tol=1e-5, n_start=50)


class TestPlateaus:
    def test_squeezing_is_flat_on_reference_holds_and_grows_on_high_holds(self):
        profile = janszky_adam(omega1=1.5)
        cycle = profile.hold_high + profile.hold_low
        dprof = discretize(profile, 4 * cycle, 12_000)
        traj = evolve(dprof, record_every=1)
        r = traj.r_values()
        samples = dprof.samples

        # segment the ladder into constant-frequency runs
        edges = np.flatnonzero(np.diff(samples)) + 1
        bounds = np.concatenate([[0], edges, [samples.shape[0]]])
        plateau_levels = []
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            run = r[lo:hi]
            if samples[lo] == 1.0 and hi - lo > 10:
                assert run.max() - run.min() <= 1e-9
                plateau_levels.append(run.mean())
            elif samples[lo] == 1.5 and hi - lo > 10:
                assert run[-1] > run[0]
        assert len(plateau_levels) >= 3
        assert all(b > a for a, b in zip(plateau_levels, plateau_levels[1:]))

        # the variance keeps moving on those same holds
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            if samples[lo] == 1.0 and hi - lo > 100:
                variances = traj.variances()[lo:hi]
                assert variances.max() - variances.min() > 1e-3
