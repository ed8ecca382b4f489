"""Unitary evolution on uniform time grids, with Bargmann-angle bookkeeping.

Hamiltonians are time independent, so one eigendecomposition serves a whole
grid. Trajectories carry the geodesic angle s0(t), the overlap it comes
from, the (constant) energy spread, and a validity index marking the first
overlap minimum; integrands derived from s0 are only trustworthy before it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DimensionMismatch
from .linalg import eigh
from .states import DensityMatrix, Observable, PureState, State, purity, variance

S0_START_TOL = 1e-9
DELTA_H_CONSTANCY_TOL = 1e-9
ANGLE_RATE_SLACK = 1e-6
_MINIMUM_EPS = 1e-12


def bargmann_angle_pure(psi0: PureState, psit: PureState) -> float:
    """2 arccos |<psi0|psit>|, the Fubini-Study geodesic angle in [0, pi]."""
    if psi0.dim != psit.dim:
        raise DimensionMismatch(f"state dims {psi0.dim} vs {psit.dim}")
    overlap = min(abs(complex(np.vdot(psi0.amplitudes, psit.amplitudes))), 1.0)
    return 2.0 * math.acos(overlap)


def bargmann_angle_mixed(rho0: DensityMatrix, rhot: DensityMatrix) -> float:
    """2 arccos sqrt(Tr(rho0 rhot) / Tr(rho0^2)); pure lifts recover the
    pure-state angle since both traces collapse to overlap moduli."""
    if rho0.dim != rhot.dim:
        raise DimensionMismatch(f"state dims {rho0.dim} vs {rhot.dim}")
    ratio = float(np.trace(rho0.matrix @ rhot.matrix).real) / purity(rho0)
    return 2.0 * math.acos(math.sqrt(min(max(ratio, 0.0), 1.0)))


def _propagator(dec, t: float, hbar: float) -> np.ndarray:
    phases = np.exp(-1j * dec.eigenvalues * (t / hbar))
    return (dec.eigenvectors * phases) @ dec.eigenvectors.conj().T


def evolve_pure(h: Observable, psi0: PureState, t: float, hbar: float = 1.0) -> PureState:
    """e^{-iHt/hbar} |psi0>."""
    if h.dim != psi0.dim:
        raise DimensionMismatch(f"H dim {h.dim} vs state dim {psi0.dim}")
    if t < 0:
        raise ValueError("evolution time must be >= 0")
    return PureState(_propagator(eigh(h.matrix), t, hbar) @ psi0.amplitudes)


def evolve_mixed(h: Observable, rho0: DensityMatrix, t: float, hbar: float = 1.0) -> DensityMatrix:
    """e^{-iHt/hbar} rho0 e^{+iHt/hbar}."""
    if h.dim != rho0.dim:
        raise DimensionMismatch(f"H dim {h.dim} vs state dim {rho0.dim}")
    if t < 0:
        raise ValueError("evolution time must be >= 0")
    u = _propagator(eigh(h.matrix), t, hbar)
    return DensityMatrix(u @ rho0.matrix @ u.conj().T)


def _first_overlap_minimum(overlap: np.ndarray) -> int:
    """Index of the first interior overlap minimum, or the last index if the
    overlap never turns around on the grid."""
    last = len(overlap) - 1
    for k in range(1, last):
        if overlap[k + 1] > overlap[k] + _MINIMUM_EPS and overlap[k] <= overlap[k - 1] + _MINIMUM_EPS:
            return k
    return last


@dataclass(frozen=True)
class Trajectory:
    """States sampled on a uniform grid, with derived angle data.

    valid_until is the last index before the overlap starts growing again;
    rows up to and including it are inside the derivation's assumptions.
    """

    hamiltonian: Observable
    hbar: float
    times: np.ndarray
    states: tuple
    s0: np.ndarray
    overlap: np.ndarray
    delta_h: float
    valid_until: int

    def __post_init__(self):
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")
        times = np.asarray(self.times, dtype=float)
        s0 = np.asarray(self.s0, dtype=float)
        overlap = np.asarray(self.overlap, dtype=float)
        n = len(times)
        if not (n == len(s0) == len(overlap) == len(self.states)):
            raise ValueError("grid arrays and states must share one length")
        if n < 2 or abs(times[0]) > 1e-12 or np.any(np.diff(times) <= 0):
            raise ValueError("times must ascend from 0 with at least 2 points")
        if s0[0] > S0_START_TOL or np.any(s0 < -1e-12) or np.any(s0 > math.pi + 1e-12):
            raise ValueError("s0 must start at 0 and stay in [0, pi]")
        if not 0 <= self.valid_until < n:
            raise ValueError(f"valid_until {self.valid_until} outside grid")
        spreads = np.array(
            [math.sqrt(variance(self.hamiltonian, s)) for s in self.states]
        )
        drift = float(np.max(np.abs(spreads - self.delta_h)))
        if drift > DELTA_H_CONSTANCY_TOL:
            raise ValueError(f"energy spread drifts by {drift:.3e} along the grid")
        if isinstance(self.states[0], PureState):
            # Fubini-Study speed is 2*dH/hbar, so s0 is Lipschitz with that
            # rate. The mixed-state angle obeys no such rate in general.
            excess = np.abs(np.diff(s0)) - (2.0 * self.delta_h / self.hbar) * np.diff(times)
            if float(excess.max()) > ANGLE_RATE_SLACK:
                raise ValueError(f"s0 outruns the pure-state rate by {float(excess.max()):.3e}")
        for arr in (times, s0, overlap):
            arr.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "s0", s0)
        object.__setattr__(self, "overlap", overlap)
        object.__setattr__(self, "states", tuple(self.states))

    @property
    def kind(self) -> str:
        return "pure" if isinstance(self.states[0], PureState) else "mixed"

    @property
    def validity_clean(self) -> bool:
        return self.valid_until == len(self.times) - 1

    def validity_flags(self) -> np.ndarray:
        return np.arange(len(self.times)) <= self.valid_until

    def to_csv(self) -> str:
        lines = ["t,s0,overlap,delta_h"]
        for k in range(len(self.times)):
            row = (self.times[k], self.s0[k], self.overlap[k], self.delta_h)
            lines.append(",".join(f"{x:.12g}" for x in row))
        return "\n".join(lines) + "\n"


def sample_trajectory(
    h: Observable,
    state0: State,
    t_max: float,
    steps: int,
    hbar: float = 1.0,
) -> Trajectory:
    """Evolve state0 over {0, ..., t_max} with `steps` grid points."""
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    if steps < 2:
        raise ValueError("need at least 2 grid points")
    if h.dim != state0.dim:
        raise DimensionMismatch(f"H dim {h.dim} vs state dim {state0.dim}")
    times = np.linspace(0.0, float(t_max), int(steps))
    dec = eigh(h.matrix)
    # The t = 0 sample is the initial state itself; writing it (and its unit
    # overlap) exactly keeps arccos from amplifying eigensolver round-off
    # into a spurious starting angle.
    if isinstance(state0, PureState):
        v0 = state0.amplitudes
        c0 = dec.eigenvectors.conj().T @ v0
        phases = np.exp(-1j * np.outer(dec.eigenvalues, times / hbar))
        columns = dec.eigenvectors @ (phases * c0[:, None])
        states = (state0,) + tuple(PureState(columns[:, k]) for k in range(1, len(times)))
        overlap = np.minimum(np.abs(v0.conj() @ columns), 1.0)
    else:
        r0 = state0.matrix
        p0 = purity(state0)
        states_list = [state0]
        overlap = np.empty(len(times))
        for k, t in enumerate(times[1:], start=1):
            u = _propagator(dec, float(t), hbar)
            rt = DensityMatrix(u @ r0 @ u.conj().T)
            states_list.append(rt)
            ratio = float(np.trace(r0 @ rt.matrix).real) / p0
            overlap[k] = math.sqrt(min(max(ratio, 0.0), 1.0))
        states = tuple(states_list)
    overlap[0] = 1.0
    s0 = 2.0 * np.arccos(overlap)
    return Trajectory(
        hamiltonian=h,
        hbar=float(hbar),
        times=times,
        states=states,
        s0=s0,
        overlap=overlap,
        delta_h=math.sqrt(variance(h, state0)),
        valid_until=_first_overlap_minimum(overlap),
    )
