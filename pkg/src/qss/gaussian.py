"""Gaussian states of optical modes and exact mean/covariance propagation.

Quadratures are interleaved per mode, ``(X+_1, X-_1, X+_2, X-_2, ...)``, and
expressed in quantum-noise-limit units: the vacuum has covariance identity.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateMeasurement, InvalidArgument, PhysicalityError

SYM_TOL = 1e-9
PSD_TOL = 1e-9
PHYS_TOL = 1e-9
PINV_TOL = 1e-12


class Quad(enum.IntEnum):
    AMPLITUDE = 0
    PHASE = 1


class QuadratureIndex(NamedTuple):
    mode: int
    quad: Quad

    @property
    def flat(self) -> int:
        return 2 * self.mode + int(self.quad)


@dataclass(frozen=True)
class SqueezerSpec:
    """Single-mode squeezer.

    ``squeezing_db`` is the squeezed-quadrature variance in dB relative to the
    QNL (so it is never positive). The anti-squeezed variance is
    ``excess_factor / V_sqz``; ``excess_factor = 1`` is a pure state.
    """

    squeezing_db: float
    excess_factor: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.squeezing_db) or self.squeezing_db > 0:
            raise InvalidArgument(
                f"squeezing_db must be <= 0 (got {self.squeezing_db}); "
                "express antisqueezing through excess_factor"
            )
        if not self.excess_factor >= 1.0:
            raise InvalidArgument(f"excess_factor must be >= 1 (got {self.excess_factor})")

    @property
    def v_sqz(self) -> float:
        return 10.0 ** (self.squeezing_db / 10.0)

    @property
    def v_anti(self) -> float:
        return self.excess_factor / self.v_sqz


def _check_cov(cov: np.ndarray) -> None:
    scale = max(1.0, float(np.max(np.abs(cov))))
    if np.max(np.abs(cov - cov.T)) > SYM_TOL * scale:
        raise InvalidArgument("covariance matrix is not symmetric")
    if np.linalg.eigvalsh(0.5 * (cov + cov.T))[0] < -PSD_TOL * scale:
        raise InvalidArgument("covariance matrix is not positive semi-definite")


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean quadrature vector and covariance matrix over ``n_modes`` modes.

    Instances are immutable; every operation returns a new state.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        if mean.size == 0 or mean.size % 2:
            raise InvalidArgument(f"mean must have even, non-zero length (got {mean.size})")
        if cov.shape != (mean.size, mean.size):
            raise InvalidArgument(f"cov shape {cov.shape} does not match mean length {mean.size}")
        _check_cov(cov)
        cov = 0.5 * (cov + cov.T)
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    def variance(self, mode: int, quad: Quad) -> float:
        k = QuadratureIndex(mode, quad).flat
        return float(self.cov[k, k])

    def with_mean(self, mean) -> GaussianState:
        return GaussianState(np.asarray(mean, dtype=float), self.cov)

    def check_physical(self) -> None:
        """Raise :class:`PhysicalityError` unless ``V + i Omega >= 0``.

        This is the uncertainty relation, equivalent to every symplectic
        eigenvalue being at least 1 but much better conditioned for strongly
        squeezed states.
        """
        margin = _uncertainty_margin(self)
        if margin < -_phys_tol(self):
            nu = symplectic_eigenvalues(self)[0]
            raise PhysicalityError(f"V + i Omega has eigenvalue {margin:.3g} < 0 (smallest symplectic eigenvalue {nu:.12g})")

    def is_physical(self) -> bool:
        return bool(_uncertainty_margin(self) >= -_phys_tol(self))


def _mode(state: GaussianState, mode: int) -> int:
    if not 0 <= mode < state.n_modes:
        raise InvalidArgument(f"mode {mode} out of range for {state.n_modes}-mode state")
    return mode


def _apply_linear(state: GaussianState, S: np.ndarray, added: np.ndarray | None = None) -> GaussianState:
    cov = S @ state.cov @ S.T
    if added is not None:
        cov = cov + added
    return GaussianState(S @ state.mean, cov)


def vacuum(n_modes: int) -> GaussianState:
    if int(n_modes) != n_modes or n_modes < 1:
        raise InvalidArgument(f"n_modes must be a positive integer (got {n_modes})")
    return GaussianState(np.zeros(2 * n_modes), np.eye(2 * n_modes))


def coherent(amp_plus: float, amp_minus: float) -> GaussianState:
    return GaussianState(np.array([amp_plus, amp_minus], dtype=float), np.eye(2))


def squeezed(spec: SqueezerSpec, squeezed_quad: Quad = Quad.AMPLITUDE) -> GaussianState:
    v = [spec.v_sqz, spec.v_anti]
    if squeezed_quad == Quad.PHASE:
        v.reverse()
    return GaussianState(np.zeros(2), np.diag(v))


def tensor(*states: GaussianState) -> GaussianState:
    """Direct sum of independent states, modes concatenated in order."""
    mean = np.concatenate([s.mean for s in states])
    n = mean.size
    cov = np.zeros((n, n))
    k = 0
    for s in states:
        m = s.mean.size
        cov[k : k + m, k : k + m] = s.cov
        k += m
    return GaussianState(mean, cov)


def _rotation(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def _embed(n_modes: int, blocks: dict[tuple[int, int], np.ndarray]) -> np.ndarray:
    S = np.eye(2 * n_modes)
    for (a, b), block in blocks.items():
        S[2 * a : 2 * a + 2, 2 * b : 2 * b + 2] = block
    return S


def beam_splitter(
    state: GaussianState, i: int, j: int, reflectivity: float, relative_phase: float = 0.0
) -> GaussianState:
    """Interfere modes ``i`` and ``j``.

    ``a_i' = sqrt(r) a_i + sqrt(1-r) e^{i phi} a_j`` and
    ``a_j' = sqrt(1-r) a_i - sqrt(r) e^{i phi} a_j``.
    """
    _mode(state, i)
    _mode(state, j)
    if i == j:
        raise InvalidArgument("beam splitter needs two distinct modes")
    if not 0.0 <= reflectivity <= 1.0:
        raise InvalidArgument(f"reflectivity must lie in [0, 1] (got {reflectivity})")
    t = np.sqrt(reflectivity)
    u = np.sqrt(1.0 - reflectivity)
    R = _rotation(relative_phase)
    S = _embed(
        state.n_modes,
        {(i, i): t * np.eye(2), (i, j): u * R, (j, i): u * np.eye(2), (j, j): -t * R},
    )
    return _apply_linear(state, S)


def phase_shift(state: GaussianState, mode: int, phi: float) -> GaussianState:
    """``a -> e^{i phi} a`` on one mode."""
    _mode(state, mode)
    return _apply_linear(state, _embed(state.n_modes, {(mode, mode): _rotation(phi)}))


def scale_quadratures(state: GaussianState, mode: int, amp_factor: float) -> GaussianState:
    """Ideal single-mode squeeze: ``X+ -> s X+``, ``X- -> X- / s``."""
    _mode(state, mode)
    if not amp_factor > 0:
        raise InvalidArgument("squeeze factor must be positive")
    S = _embed(state.n_modes, {(mode, mode): np.diag([amp_factor, 1.0 / amp_factor])})
    return _apply_linear(state, S)


def displace(state: GaussianState, mode: int, d_plus: float, d_minus: float) -> GaussianState:
    _mode(state, mode)
    mean = state.mean.copy()
    mean[2 * mode] += d_plus
    mean[2 * mode + 1] += d_minus
    return GaussianState(mean, state.cov)


def loss_channel(state: GaussianState, mode: int, efficiency: float) -> GaussianState:
    _mode(state, mode)
    if not 0.0 <= efficiency <= 1.0:
        raise InvalidArgument(f"efficiency must lie in [0, 1] (got {efficiency})")
    S = _embed(state.n_modes, {(mode, mode): np.sqrt(efficiency) * np.eye(2)})
    added = np.zeros_like(state.cov)
    added[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2] = (1.0 - efficiency) * np.eye(2)
    return _apply_linear(state, S, added)


def add_classical_noise(state: GaussianState, noise_cov) -> GaussianState:
    noise_cov = np.asarray(noise_cov, dtype=float)
    if noise_cov.shape != state.cov.shape:
        raise InvalidArgument(f"noise_cov shape {noise_cov.shape} != {state.cov.shape}")
    _check_cov(noise_cov)
    return GaussianState(state.mean, state.cov + noise_cov)


def partial_trace(state: GaussianState, keep: Sequence[int]) -> GaussianState:
    keep = list(keep)
    if not keep:
        raise InvalidArgument("keep must name at least one mode")
    if len(set(keep)) != len(keep):
        raise InvalidArgument(f"duplicate modes in {keep}")
    for m in keep:
        _mode(state, m)
    idx = np.array([2 * m + q for m in keep for q in (0, 1)])
    return GaussianState(state.mean[idx], state.cov[np.ix_(idx, idx)])


def homodyne_condition(state: GaussianState, idx: QuadratureIndex):
    """Condition the unmeasured modes on a homodyne outcome of ``idx``.

    Returns ``(remaining, gain, outcome_variance)``. ``remaining`` carries the
    conditional covariance and the mean for an outcome equal to the measured
    quadrature's mean; an outcome ``x`` shifts that mean by
    ``gain * (x - state.mean[idx.flat])``.
    """
    if state.n_modes < 2:
        raise InvalidArgument("homodyne conditioning needs at least two modes")
    _mode(state, idx.mode)
    k = idx.flat
    rest = np.array([q for q in range(2 * state.n_modes) if q // 2 != idx.mode])
    v = float(state.cov[k, k])
    cross = state.cov[rest, k]
    if v < PINV_TOL:
        if np.max(np.abs(cross), initial=0.0) > PSD_TOL:
            raise DegenerateMeasurement(
                f"quadrature {tuple(idx)} has variance {v:.3g} but non-zero correlations"
            )
        gain = np.zeros(rest.size)
    else:
        gain = cross / v
    cov = state.cov[np.ix_(rest, rest)] - np.outer(gain, cross)
    return GaussianState(state.mean[rest], cov), gain, v


def feedforward_displace(
    state: GaussianState,
    detect: QuadratureIndex,
    target: QuadratureIndex,
    electronic_gain: float,
    detector_efficiency: float = 1.0,
    electronic_noise_var: float = 0.0,
) -> GaussianState:
    """Detect one quadrature and displace another by the scaled photocurrent.

    The photocurrent is ``sqrt(eta) X_detect + sqrt(1-eta) X_vac + n_el`` and
    the target becomes ``X_target + G * photocurrent``. The detected mode is
    traced out afterwards.
    """
    _mode(state, detect.mode)
    _mode(state, target.mode)
    if detect.mode == target.mode:
        raise InvalidArgument("detected and displaced quadratures must be on different modes")
    if not 0.0 <= detector_efficiency <= 1.0:
        raise InvalidArgument(f"detector efficiency must lie in [0, 1] (got {detector_efficiency})")
    if electronic_noise_var < 0:
        raise InvalidArgument(f"electronic noise variance must be >= 0 (got {electronic_noise_var})")
    G = electronic_gain
    d, t = detect.flat, target.flat
    S = np.eye(2 * state.n_modes)
    S[t, d] += G * np.sqrt(detector_efficiency)
    added = np.zeros_like(state.cov)
    added[t, t] = G**2 * ((1.0 - detector_efficiency) + electronic_noise_var)
    out = _apply_linear(state, S, added)
    return partial_trace(out, [m for m in range(state.n_modes) if m != detect.mode])


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(state: GaussianState) -> np.ndarray:
    # sqrt(V) (i Omega) sqrt(V) is Hermitian with eigenvalues +-nu; unlike the
    # plain eig of Omega V it stays accurate for strongly squeezed states
    w, u = np.linalg.eigh(state.cov)
    root = (u * np.sqrt(np.clip(w, 0.0, None))) @ u.T
    ev = np.linalg.eigvalsh(root @ (1j * symplectic_form(state.n_modes)) @ root)
    return np.sort(ev[ev.size // 2 :])


def _uncertainty_margin(state: GaussianState) -> float:
    return float(np.linalg.eigvalsh(state.cov + 1j * symplectic_form(state.n_modes))[0])


def _phys_tol(state: GaussianState) -> float:
    return max(PHYS_TOL, 64 * np.finfo(float).eps * float(np.max(np.abs(state.cov))))


def photon_proxy(state: GaussianState) -> float:
    """Mean-photon-number proxy ``(|mean|^2 + tr(cov) - 2N) / 4``, conserved by passive optics."""
    return float((state.mean @ state.mean + np.trace(state.cov) - 2 * state.n_modes) / 4.0)
