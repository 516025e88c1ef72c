"""Trajectory driver and observable extraction.

``evolve`` folds a discretized profile through the hot kernel and turns the
recorded coefficients into squeezing observables; ``auto_converge`` wraps it
in a step-doubling loop.  ``fock_amplitudes`` and ``apply_to_state`` expand
the composed propagator in the number basis.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import PropagatorAccumulator
from .errors import InvalidAccumulatorError, LeakageError
from .profiles import DiscretizedProfile, Profile, discretize

SCALINGS = {"half": 0.5, "quarter": 0.25}

#: Truncation-loss threshold for apply_to_state / the oracle.
LEAKAGE_TOL = 1e-6


@dataclass(frozen=True)
class SqueezeObservables:
    """Squeezing observables of the vacuum-evolved state at one instant."""

    t: float
    omega: float
    alpha: complex
    r: float
    vartheta: float
    phi: float
    chi: float
    variance: float
    mean_n: float
    norm_defect: float

    @property
    def z(self) -> complex:
        """Complex squeeze label r*exp(i*phi) (the trajectory fingerprint)."""
        return self.r * cmath.exp(1j * self.phi)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time-ordered squeezing records plus the final composed propagator."""

    profile_descriptor: str
    records: tuple
    n_steps_used: int
    converged: bool | None
    final: PropagatorAccumulator
    max_norm_defect: float
    convergence_history: tuple = field(default=())

    def times(self) -> np.ndarray:
        return np.array([rec.t for rec in self.records])

    def r_values(self) -> np.ndarray:
        return np.array([rec.r for rec in self.records])

    def variances(self) -> np.ndarray:
        return np.array([rec.variance for rec in self.records])


@dataclass(frozen=True, eq=False)
class FockState:
    """Number-basis amplitudes c_0 ... c_{n_max}."""

    amplitudes: np.ndarray

    @property
    def n_max(self) -> int:
        return int(self.amplitudes.shape[0] - 1)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def normalized(self) -> "FockState":
        return FockState(self.amplitudes / math.sqrt(self.norm2()))

    @staticmethod
    def basis_state(n: int, n_max: int | None = None) -> "FockState":
        n_max = n if n_max is None else n_max
        amp = np.zeros(n_max + 1, dtype=np.complex128)
        amp[n] = 1.0
        return FockState(amp)

    @staticmethod
    def vacuum(n_max: int = 0) -> "FockState":
        return FockState.basis_state(0, n_max)


def _wrap_phi(vartheta: float) -> float:
    # phi = vartheta +- pi, folded back into (-pi, pi]
    return vartheta + math.pi if vartheta <= 0.0 else vartheta - math.pi


def observables_from_accumulator(acc: PropagatorAccumulator, t: float,
                                 lam: float = 0.0, scaling: str = "quarter",
                                 omega: float = math.nan) -> SqueezeObservables:
    """Extract squeezing observables from a composed propagator.

    ``r = atanh|alpha|``; ``vartheta = arg(alpha)`` (principal value); the
    squeezing phase is ``phi = vartheta + pi`` wrapped to (-pi, pi], the
    branch that makes the two number-basis expansions of the state agree
    term by term.  The quadrature variance at angle ``lam`` is::

        s * (exp(2r)*sin^2(lam - phi/2) + exp(-2r)*cos^2(lam - phi/2))

    with ``s = 1/2`` (``scaling="half"``) or the rescaled-quadrature
    convention ``s = 1/4`` (``"quarter"``, the default used by all shipped
    presets).
    """
    try:
        s = SCALINGS[scaling]
    except KeyError:
        raise ValueError(f"scaling must be one of {sorted(SCALINGS)}, got {scaling!r}") from None
    mod_alpha = abs(acc.alpha)
    if mod_alpha >= 1.0:
        raise InvalidAccumulatorError(
            f"|alpha| = {mod_alpha} >= 1; normalization was violated upstream"
        )
    r = math.atanh(mod_alpha)
    vartheta = cmath.phase(acc.alpha)
    phi = _wrap_phi(vartheta)
    chi = cmath.phase(acc.beta)
    angle = lam - 0.5 * phi
    variance = s * (math.exp(2.0 * r) * math.sin(angle) ** 2
                    + math.exp(-2.0 * r) * math.cos(angle) ** 2)
    return SqueezeObservables(
        t=t,
        omega=omega,
        alpha=acc.alpha,
        r=r,
        vartheta=vartheta,
        phi=phi,
        chi=chi,
        variance=variance,
        mean_n=math.sinh(r) ** 2,
        norm_defect=acc.norm_defect,
    )


def evolve(dprofile: DiscretizedProfile, record_every: int | None = None,
           lam: float = 0.0, scaling: str = "quarter") -> Trajectory:
    """Fold all segments of a discretized profile, emitting records along the way.

    ``record_every`` defaults to ``max(1, N // 5000)`` so that outputs stay
    plottable regardless of N; the final segment is always recorded.
    """
    n = dprofile.n_steps
    if record_every is None:
        record_every = max(1, n // 5000)
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    rec, alpha, beta, gamma, defect, max_defect = kernels.fold_ladder(
        dprofile.samples, dprofile.omega0, dprofile.tau, record_every
    )
    records = []
    for k in range(rec.shape[0]):
        j = int(rec[k])
        acc = PropagatorAccumulator(complex(alpha[k]), complex(beta[k]), complex(gamma[k]), j)
        records.append(observables_from_accumulator(
            acc, t=j * dprofile.tau, lam=lam, scaling=scaling,
            omega=float(dprofile.samples[j - 1]),
        ))
    final = PropagatorAccumulator(
        complex(alpha[-1]), complex(beta[-1]), complex(gamma[-1]), n
    )
    return Trajectory(
        profile_descriptor=f"omega0={dprofile.omega0!r} tau={dprofile.tau!r} n={n}",
        records=tuple(records),
        n_steps_used=n,
        converged=None,
        final=final,
        max_norm_defect=max_defect,
    )


def fock_amplitudes(acc: PropagatorAccumulator, n_max: int = 64) -> FockState:
    """Number-basis amplitudes of the vacuum-evolved state.

    Only even levels are populated::

        c_{2n} = |beta|^{1/4} * (sqrt((2n)!)/n!) * (|alpha| e^{i vartheta} / 2)^n

    computed by stable ratio iteration.  The global phase is removed
    (c_0 is real positive).
    """
    if n_max % 2 != 0:
        raise ValueError(f"n_max must be even, got {n_max}")
    if abs(acc.alpha) >= 1.0:
        raise InvalidAccumulatorError(f"|alpha| = {abs(acc.alpha)} >= 1")
    amp = np.zeros(n_max + 1, dtype=np.complex128)
    amp[0] = abs(acc.beta) ** 0.25
    factor = 0.5 * acc.alpha  # |alpha| e^{i vartheta} / 2
    for n in range(1, n_max // 2 + 1):
        amp[2 * n] = amp[2 * n - 2] * (math.sqrt((2.0 * n) * (2.0 * n - 1.0)) / n) * factor
    return FockState(amp)


def _apply_lowering(amp: np.ndarray) -> np.ndarray:
    # K_- |n> = 0.5*sqrt(n(n-1)) |n-2>
    out = np.zeros_like(amp)
    n = np.arange(amp.shape[0], dtype=np.float64)
    out[:-2] = 0.5 * np.sqrt(n[2:] * (n[2:] - 1.0)) * amp[2:]
    return out


def _apply_raising(amp: np.ndarray) -> np.ndarray:
    # K_+ |n> = 0.5*sqrt((n+1)(n+2)) |n+2>; amplitudes pushed past the end are dropped
    out = np.zeros_like(amp)
    n = np.arange(amp.shape[0], dtype=np.float64)
    out[2:] = 0.5 * np.sqrt((n[:-2] + 1.0) * (n[:-2] + 2.0)) * amp[:-2]
    return out


def apply_to_state(acc: PropagatorAccumulator, initial: FockState, n_max: int | None = None) -> FockState:
    """Apply the composed propagator to an arbitrary initial Fock state.

    Applies ``exp(gamma K_-)`` (finite lowering series), the diagonal
    ``beta^(n/2 + 1/4)`` (principal-branch logarithm), then ``exp(alpha K_+)``
    truncated at ``n_max``.  The returned state is *not* renormalized: its
    norm deficit equals the truncation leakage.

    The principal branch fixes the phase within each parity sector; a
    superposition of even and odd levels therefore carries a
    branch-dependent relative phase between the sectors.  Parity-pure
    inputs (any preset workflow starting from a number state) are exact up
    to a global phase.

    Raises
    ------
    LeakageError
        If the truncation leakage exceeds ``LEAKAGE_TOL``.
    """
    if n_max is None:
        n_max = max(2 * initial.n_max, initial.n_max + 64)
    if n_max < initial.n_max:
        raise ValueError(f"n_max={n_max} smaller than the initial state ({initial.n_max})")
    if abs(initial.norm2() - 1.0) > 1e-9:
        raise ValueError(f"initial state norm^2 = {initial.norm2()} is not 1 within 1e-9")

    amp = np.zeros(n_max + 1, dtype=np.complex128)
    amp[: initial.n_max + 1] = initial.amplitudes

    # exp(gamma K_-): nilpotent on any finite state, the series terminates
    if acc.gamma != 0:
        total = amp.copy()
        term = amp
        for k in range(1, n_max // 2 + 2):
            term = (acc.gamma / k) * _apply_lowering(term)
            if not term.any():
                break
            total += term
        amp = total

    logb = cmath.log(acc.beta)
    levels = np.arange(n_max + 1, dtype=np.float64)
    amp = amp * np.exp(logb * (0.5 * levels + 0.25))

    # exp(alpha K_+): truncated at n_max, terms decay like |alpha|^k for |alpha| < 1
    if acc.alpha != 0:
        total = amp.copy()
        term = amp
        for k in range(1, n_max // 2 + 2):
            term = (acc.alpha / k) * _apply_raising(term)
            if not term.any():
                break
            total += term
        amp = total

    out = FockState(amp)
    leakage = max(0.0, 1.0 - out.norm2())
    if leakage > LEAKAGE_TOL:
        raise LeakageError(
            f"truncation leakage {leakage:.3e} exceeds {LEAKAGE_TOL:g}; increase n_max",
            leakage=leakage,
        )
    return out


def auto_converge(profile: Profile, t_final: float, tol: float,
                  n_start: int = 10000, cap: int = 2 ** 24,
                  n_records: int = 500, rule: str = "right",
                  lam: float = 0.0, scaling: str = "quarter") -> Trajectory:
    """Double the step count until the squeezing curve stops moving.

    Runs ``evolve`` at N, 2N, 4N, ... and compares r(t) on a common grid of
    ``n_records`` instants; stops when ``max_t |r_(2N) - r_N| < tol``.  The
    returned trajectory carries ``converged`` plus the (N, max diff) history.
    Hitting ``cap`` is a soft failure: the last trajectory is returned with
    ``converged=False`` and a warning.
    """
    if not (tol > 0.0):
        raise ValueError(f"tol must be positive, got {tol}")
    if n_start < 100:
        raise ValueError(f"n_start must be >= 100, got {n_start}")
    # round up so every doubling shares the same record instants
    n = ((n_start + n_records - 1) // n_records) * n_records

    def run(n_steps):
        dprof = discretize(profile, t_final, n_steps, rule=rule)
        return evolve(dprof, record_every=n_steps // n_records, lam=lam, scaling=scaling)

    history = []
    prev = run(n)
    prev_r = prev.r_values()
    while 2 * n <= cap:
        cur = run(2 * n)
        cur_r = cur.r_values()
        diff = float(np.max(np.abs(cur_r - prev_r)))
        history.append((2 * n, diff))
        if diff < tol:
            return Trajectory(
                profile_descriptor=cur.profile_descriptor,
                records=cur.records,
                n_steps_used=cur.n_steps_used,
                converged=True,
                final=cur.final,
                max_norm_defect=cur.max_norm_defect,
                convergence_history=tuple(history),
            )
        prev, prev_r = cur, cur_r
        n *= 2
    warnings.warn(
        f"step-doubling hit the cap ({cap}) before reaching tol={tol:g}; "
        f"last max |dr| = {history[-1][1] if history else math.nan:.3e}",
        RuntimeWarning,
        stacklevel=2,
    )
    return Trajectory(
        profile_descriptor=prev.profile_descriptor,
        records=prev.records,
        n_steps_used=prev.n_steps_used,
        converged=False,
        final=prev.final,
        max_norm_defect=prev.max_norm_defect,
        convergence_history=tuple(history),
    )
