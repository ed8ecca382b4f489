"""Speed-limit bounds: geodesic terms, correction quadrature, optimization.

Every report decomposes tau_tqsl = geodesic term + correction integral so
the improvement over the plain variance bound, delta, is directly the
integrated correction. The correction integrand carries its prefactors
(2/dH for pure states, 1/(sqrt(purity) dH) with the purity-corrected
denominator for mixed ones), so integrating it yields time units.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory, sample_trajectory
from .ensembles import random_basis
from .errors import (
    BoundViolation,
    ConfigError,
    DenominatorUnderflow,
    DimensionMismatch,
    NonFiniteSample,
    NonPositiveMeanEnergy,
    SingularIntegrand,
    ValidityExceeded,
    ZeroEnergyVariance,
)
from .linalg import expm_i_hermitian
from .states import (
    DensityMatrix,
    Observable,
    OrthonormalBasis,
    PureState,
    State,
    expectation,
    purity,
    variance,
)
from .uncertainty import correction_k_mixed

DEFAULT_STEPS = 400
ZERO_SPREAD_TOL = 1e-12
MEAN_ENERGY_TOL = 1e-12
SIN_EPS = 1e-8
K_EPS = 1e-10
RADICAL_EPS = 1e-12
NONNEG_CLAMP = 1e-9
BOOKKEEPING_TOL = 1e-12
BOUND_SLACK = 1e-6

BOUND_CSV_HEADER = "t,tau_mt,tau_tqsl,delta,quad_error,validity"


@dataclass(frozen=True)
class QuadratureInfo:
    scheme: str
    step: float
    estimated_error: float

    def to_json(self) -> dict:
        return {
            "scheme": self.scheme,
            "step": self.step,
            "estimated_error": self.estimated_error,
        }


@dataclass(frozen=True)
class BoundReport:
    """One bound evaluation at the trajectory endpoint (or one grid row)."""

    tau_actual: float
    tau_mt: float
    correction_integral: float
    tau_tqsl: float
    delta: float
    basis_id: str
    validity: bool
    quadrature: QuadratureInfo

    def __post_init__(self):
        values = (self.tau_actual, self.tau_mt, self.correction_integral, self.tau_tqsl, self.delta)
        if not all(math.isfinite(v) for v in values):
            raise BoundViolation("bound report contains non-finite values")
        if self.correction_integral < 0.0:
            raise BoundViolation(f"correction integral {self.correction_integral!r} < 0")
        if self.delta < -NONNEG_CLAMP:
            raise BoundViolation(f"delta {self.delta!r} below -{NONNEG_CLAMP:.0e}")
        if abs(self.tau_tqsl - (self.tau_mt + self.correction_integral)) > BOOKKEEPING_TOL:
            raise BoundViolation("tau_tqsl is not geodesic term + correction")
        if self.validity and self.tau_actual < self.tau_tqsl - BOUND_SLACK:
            raise BoundViolation(
                f"bound {self.tau_tqsl!r} exceeds actual time {self.tau_actual!r} on a clean trajectory"
            )

    def to_json(self) -> dict:
        return {
            "tau_actual": self.tau_actual,
            "tau_mt": self.tau_mt,
            "correction_integral": self.correction_integral,
            "tau_tqsl": self.tau_tqsl,
            "delta": self.delta,
            "basis_id": self.basis_id,
            "validity": self.validity,
            "quadrature": self.quadrature.to_json(),
        }

    def csv_row(self) -> str:
        cells = [
            f"{x:.12g}"
            for x in (
                self.tau_actual,
                self.tau_mt,
                self.tau_tqsl,
                self.delta,
                self.quadrature.estimated_error,
            )
        ]
        cells.append("true" if self.validity else "false")
        return ",".join(cells)


def mt_bound_pure(traj: Trajectory, at_index: int) -> float:
    """hbar * s0 / (2 dH) at one grid index of a pure trajectory."""
    if traj.delta_h <= ZERO_SPREAD_TOL:
        raise ZeroEnergyVariance(f"energy spread {traj.delta_h!r} is numerically zero")
    return traj.hbar * float(traj.s0[at_index]) / (2.0 * traj.delta_h)


def combined_bound_orthogonal(h: Observable, psi0: PureState, hbar: float = 1.0) -> float:
    """max of the variance and mean-energy orthogonalization times."""
    spread = math.sqrt(variance(h, psi0))
    if spread <= ZERO_SPREAD_TOL:
        raise ZeroEnergyVariance(f"energy spread {spread!r} is numerically zero")
    mean = expectation(h, psi0)
    if mean <= MEAN_ENERGY_TOL:
        raise NonPositiveMeanEnergy(f"mean energy {mean!r} must be positive")
    return max(math.pi * hbar / (2.0 * spread), math.pi * hbar / (2.0 * mean))


def mixed_geodesic_term(
    rho0: DensityMatrix, rho_tau: DensityMatrix, delta_h: float, hbar: float = 1.0
) -> float:
    """hbar (arccos sqrt(Tr rho0 rho_tau) - arccos sqrt(Tr rho0^2)) / dH.

    Pure lifts collapse this to the plain geodesic term hbar*s0/(2 dH).
    """
    if rho0.dim != rho_tau.dim:
        raise DimensionMismatch(f"state dims {rho0.dim} vs {rho_tau.dim}")
    if delta_h <= ZERO_SPREAD_TOL:
        raise ZeroEnergyVariance(f"energy spread {delta_h!r} is numerically zero")
    cross = min(max(float(np.trace(rho0.matrix @ rho_tau.matrix).real), 0.0), 1.0)
    p0 = min(purity(rho0), 1.0)
    value = hbar * (math.acos(math.sqrt(cross)) - math.acos(math.sqrt(p0))) / delta_h
    if value < -NONNEG_CLAMP:
        raise BoundViolation(f"geodesic term {value:.3e} below -{NONNEG_CLAMP:.0e}")
    return max(value, 0.0)


def integrate_correction(samples, scheme: str = "trapezoid") -> tuple[float, float]:
    """Composite trapezoid over (t, value) samples, plus a Richardson error
    estimate from comparing against the half-resolution grid."""
    if scheme != "trapezoid":
        raise ConfigError(f"unknown quadrature scheme {scheme!r}")
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
        raise ValueError("need an (n >= 2) x 2 array of (t, value) samples")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteSample("integrand samples contain NaN or Inf")
    t, f = arr[:, 0], arr[:, 1]
    if np.any(np.diff(t) <= 0):
        raise ValueError("sample times must be strictly ascending")
    full = float(np.trapezoid(f, t))
    idx = _half_grid_indices(len(t))
    half = float(np.trapezoid(f[idx], t[idx]))
    return full, abs(full - half) / 3.0


def _half_grid_indices(n: int) -> list:
    idx = list(range(0, n, 2))
    if idx[-1] != n - 1:
        idx.append(n - 1)
    return idx


def _pure_k_series(traj: Trajectory, basis: OrthonormalBasis) -> np.ndarray:
    """K(t) on the whole grid for A = initial projector, B = H.

    Per-vector products are summed with and without moduli; completeness
    makes the plain sum the unresolved cross term, so the difference is K.
    """
    cols = np.column_stack([s.amplitudes for s in traj.states])
    a = traj.states[0].amplitudes
    hm = traj.hamiltonian.matrix
    o = a.conj() @ cols
    pop = (o.conj() * o).real
    x = np.outer(a, o) - cols * pop[None, :]
    mean_h = float(np.vdot(a, hm @ a).real)
    y = hm @ cols - mean_h * cols
    u = basis.matrix
    prods = (u.conj().T @ x).conj() * (u.conj().T @ y)
    k = np.abs(prods).sum(axis=0) - np.abs(prods.sum(axis=0))
    low = float(k.min())
    if low < -NONNEG_CLAMP:
        raise BoundViolation(f"correction series dips to {low:.3e}")
    return np.maximum(k, 0.0)


def correction_samples(traj: Trajectory, basis: OrthonormalBasis) -> np.ndarray:
    """(t, integrand) rows for the correction term, prefactors included.

    Grid points where the denominator underflows while K is itself below
    round-off contribute 0 (the t = 0 limit); a vanishing denominator with
    K genuinely nonzero is outside the derivation and raises.
    """
    if basis.dim != traj.hamiltonian.dim:
        raise DimensionMismatch(f"basis dim {basis.dim} vs H dim {traj.hamiltonian.dim}")
    if traj.delta_h <= ZERO_SPREAD_TOL:
        raise ZeroEnergyVariance(f"energy spread {traj.delta_h!r} is numerically zero")
    if traj.kind == "pure":
        k = _pure_k_series(traj, basis)
        den = np.sin(traj.s0)
        den_gate = den
        scale = 2.0 / traj.delta_h
    else:
        rho0 = traj.states[0]
        a = Observable(rho0.matrix)
        k = np.array(
            [correction_k_mixed(a, traj.hamiltonian, rt, basis) for rt in traj.states]
        )
        p = purity(rho0)
        c = traj.overlap
        radical = np.maximum(1.0 - p * c * c, 0.0)
        if np.any((radical < RADICAL_EPS) & (k >= K_EPS)):
            raise DenominatorUnderflow("purity radical underflows while K is nonzero")
        den = c * np.sqrt(radical)
        # pure lifts give den = sin(s0)/2, so gate at twice the denominator
        # to keep the singularity policy identical across both routes
        den_gate = 2.0 * den
        scale = 1.0 / (math.sqrt(p) * traj.delta_h)
    singular = (k >= K_EPS) & (den_gate < SIN_EPS)
    if np.any(singular):
        raise SingularIntegrand(
            f"{int(np.sum(singular))} grid points have K >= {K_EPS:.0e} with a vanishing denominator"
        )
    integrand = np.zeros(len(traj.times))
    ok = den_gate >= SIN_EPS
    integrand[ok] = scale * k[ok] / den[ok]
    return np.column_stack([traj.times, integrand])


def _geodesic_term(traj: Trajectory, at_index: int) -> float:
    if traj.kind == "pure":
        return mt_bound_pure(traj, at_index)
    return mixed_geodesic_term(traj.states[0], traj.states[at_index], traj.delta_h, traj.hbar)


def _report_at_end(traj: Trajectory, basis: OrthonormalBasis, basis_id: str) -> BoundReport:
    samples = correction_samples(traj, basis)
    value, err = integrate_correction(samples)
    tau_mt = _geodesic_term(traj, len(traj.times) - 1)
    tau_tqsl = tau_mt + value
    return BoundReport(
        tau_actual=float(traj.times[-1]),
        tau_mt=tau_mt,
        correction_integral=value,
        tau_tqsl=tau_tqsl,
        delta=tau_tqsl - tau_mt,
        basis_id=basis_id,
        validity=traj.validity_clean,
        quadrature=QuadratureInfo("trapezoid", float(traj.times[1] - traj.times[0]), err),
    )


def _require_clean(traj: Trajectory) -> None:
    if not traj.validity_clean:
        turn = traj.times[traj.valid_until]
        raise ValidityExceeded(
            f"overlap turns around at t = {turn:.6g}, before the requested endpoint"
        )


def tqsl_pure(
    h: Observable,
    psi0: PureState,
    tau: float,
    basis: OrthonormalBasis,
    steps: int = DEFAULT_STEPS,
    hbar: float = 1.0,
    *,
    basis_id: str = "user",
) -> BoundReport:
    """Evaluate the tightened bound at time tau for a pure initial state."""
    traj = sample_trajectory(h, psi0, tau, steps, hbar)
    _require_clean(traj)
    return _report_at_end(traj, basis, basis_id)


def tqsl_mixed(
    h: Observable,
    rho0: DensityMatrix,
    tau: float,
    basis: OrthonormalBasis,
    steps: int = DEFAULT_STEPS,
    hbar: float = 1.0,
    *,
    basis_id: str = "user",
) -> BoundReport:
    """Evaluate the tightened bound at time tau for a mixed initial state."""
    traj = sample_trajectory(h, rho0, tau, steps, hbar)
    _require_clean(traj)
    return _report_at_end(traj, basis, basis_id)


def bound_series(traj: Trajectory, basis: OrthonormalBasis, basis_id: str = "user") -> tuple:
    """One BoundReport per grid row, with cumulative correction quadrature.

    Rows past the trajectory's validity index are still reported (flagged
    false) so sweeps can plot the whole window.
    """
    samples = correction_samples(traj, basis)
    t, f = samples[:, 0], samples[:, 1]
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(t))])
    idx = _half_grid_indices(len(t))
    th, fh = t[idx], f[idx]
    cum_half = np.concatenate([[0.0], np.cumsum(0.5 * (fh[1:] + fh[:-1]) * np.diff(th))])
    est = np.abs(cum - np.interp(t, th, cum_half)) / 3.0
    flags = traj.validity_flags()
    step = float(t[1] - t[0])
    reports = []
    for k in range(len(t)):
        tau_mt = _geodesic_term(traj, k)
        tau_tqsl = tau_mt + float(cum[k])
        reports.append(
            BoundReport(
                tau_actual=float(t[k]),
                tau_mt=tau_mt,
                correction_integral=float(cum[k]),
                tau_tqsl=tau_tqsl,
                delta=tau_tqsl - tau_mt,
                basis_id=basis_id,
                validity=bool(flags[k]),
                quadrature=QuadratureInfo("trapezoid", step, float(est[k])),
            )
        )
    return tuple(reports)


@dataclass(frozen=True)
class OptimizerConfig:
    """Random-restart hill climbing over the unitary group."""

    restarts: int = 4
    iterations: int = 120
    seed: int = 0
    initial_step: float = 0.4
    shrink: float = 0.5
    patience: int = 8
    min_step: float = 1e-4

    def __post_init__(self):
        if self.restarts < 1:
            raise ConfigError("need at least one restart")
        if self.iterations < 0:
            raise ConfigError("iterations must be >= 0")
        if not 0.0 < self.shrink < 1.0:
            raise ConfigError("shrink must lie in (0, 1)")
        if self.initial_step <= 0 or self.min_step <= 0:
            raise ConfigError("step sizes must be positive")
        if self.patience < 1:
            raise ConfigError("patience must be >= 1")


def optimize_basis(
    h: Observable,
    state0: State,
    tau: float,
    steps: int = DEFAULT_STEPS,
    opt_config: OptimizerConfig = None,
    hbar: float = 1.0,
) -> tuple:
    """Maximize the correction integral over complete orthonormal bases.

    Restart 0 is the identity basis; later restarts start from eigenbases
    of independent random Hermitian draws. Candidates rotate the current
    basis by e^{i step G} with G a random Hermitian direction; the step
    shrinks after `patience` rejections. Best effort: the returned bound
    dominates every basis probed, nothing more is claimed.
    """
    cfg = opt_config if opt_config is not None else OptimizerConfig()
    traj = sample_trajectory(h, state0, tau, steps, hbar)
    _require_clean(traj)
    dim = h.dim

    def objective(b: OrthonormalBasis) -> float:
        s = correction_samples(traj, b)
        return float(np.trapezoid(s[:, 1], s[:, 0]))

    best = None
    for r in range(cfg.restarts):
        if r == 0:
            basis = OrthonormalBasis.identity(dim)
            origin = "identity"
        else:
            basis = random_basis(dim, cfg.seed + r)
            origin = f"gue-eigenbasis:seed={cfg.seed + r}"
        try:
            value = objective(basis)
        except (SingularIntegrand, DenominatorUnderflow):
            continue
        rng = np.random.default_rng([cfg.seed, r])
        step = cfg.initial_step
        stall = 0
        moves = 0
        for _ in range(cfg.iterations):
            if step < cfg.min_step:
                break
            g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            g = g + g.conj().T
            g /= np.linalg.norm(g)
            candidate = OrthonormalBasis(basis.matrix @ expm_i_hermitian(g, -step))
            try:
                cand_value = objective(candidate)
            except (SingularIntegrand, DenominatorUnderflow):
                cand_value = None
            if cand_value is not None and cand_value > value:
                basis, value, moves = candidate, cand_value, moves + 1
                stall = 0
            else:
                stall += 1
                if stall >= cfg.patience:
                    step *= cfg.shrink
                    stall = 0
        if best is None or value > best[0]:
            best = (value, basis, f"optimize[{origin}, {moves} moves]")
    if best is None:
        raise SingularIntegrand("every optimizer restart hit a singular integrand")
    _, basis, label = best
    return basis, _report_at_end(traj, basis, label)
