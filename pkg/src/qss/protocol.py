"""Dealer encoding and reconstruction networks of the (2,3) state sharing scheme.

The dealer mixes a coherent secret with one EPR beam on a 1:1 beam splitter;
the two outputs are shares 1 and 2 and the other EPR beam is share 3.
Correlated Gaussian noise ``dN`` is added as ``+dN/sqrt2``, ``-dN/sqrt2`` and
``+dN*`` (phase-quadrature sign flipped) to the three shares.

Players {1,2} undo the dealer's beam splitter. Players {2,3} (and {1,3})
combine their shares on a 2:1 beam splitter and feed the detected amplitude
quadrature of one port forward onto the other.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from . import gaussian as gs
from .config import ScenarioConfig
from .errors import InvalidArgument, InvalidState
from .gaussian import GaussianState, Quad, QuadratureIndex, SqueezerSpec

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)
SQRT6 = np.sqrt(6.0)


class AccessStructure(enum.Enum):
    S12 = "{1,2}"
    S23 = "{2,3}"
    S13 = "{1,3}"
    ADV1 = "{1}"
    ADV2 = "{2}"
    ADV3 = "{3}"

    @property
    def is_access(self) -> bool:
        return self in (AccessStructure.S12, AccessStructure.S23, AccessStructure.S13)

    @property
    def complement(self) -> AccessStructure:
        return _COMPLEMENT[self]


_COMPLEMENT = {
    AccessStructure.S12: AccessStructure.ADV3,
    AccessStructure.S23: AccessStructure.ADV1,
    AccessStructure.S13: AccessStructure.ADV2,
    AccessStructure.ADV1: AccessStructure.S23,
    AccessStructure.ADV2: AccessStructure.S13,
    AccessStructure.ADV3: AccessStructure.S12,
}

ACCESS_STRUCTURES = (AccessStructure.S12, AccessStructure.S23, AccessStructure.S13)
ADVERSARY_STRUCTURES = (AccessStructure.ADV1, AccessStructure.ADV2, AccessStructure.ADV3)


@dataclass(frozen=True, eq=False)
class ShareSet:
    """The three shares as one Gaussian state (modes: share 1, 2, 3).

    ``signal`` is the 6x2 linear response of the share means to a unit
    secret amplitude in ``X+`` (column 0) and ``X-`` (column 1).
    """

    state: GaussianState
    secret_mean: tuple[float, float]
    signal: np.ndarray


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    out_state: GaussianState
    g_plus: float
    g_minus: float
    structure: AccessStructure
    parametric_applied: bool = False

    @property
    def gain_product(self) -> float:
        return self.g_plus * self.g_minus

    @property
    def v_plus(self) -> float:
        return self.out_state.variance(0, Quad.AMPLITUDE)

    @property
    def v_minus(self) -> float:
        return self.out_state.variance(0, Quad.PHASE)


def make_epr(sqz1: SqueezerSpec, sqz2: SqueezerSpec, visibility: float = 1.0) -> GaussianState:
    """Interfere two amplitude-squeezed beams with a pi/2 relative phase.

    Imperfect mode matching is treated as an efficiency ``visibility**2``
    against vacuum on both outputs. The result has squeezed
    ``X+_1 + X+_2`` and ``X-_1 - X-_2``.
    """
    if not 0.0 <= visibility <= 1.0:
        raise InvalidArgument(f"visibility must lie in [0, 1] (got {visibility})")
    state = gs.tensor(gs.squeezed(sqz1, Quad.AMPLITUDE), gs.squeezed(sqz2, Quad.AMPLITUDE))
    state = gs.beam_splitter(state, 0, 1, 0.5, np.pi / 2)
    for mode in (0, 1):
        state = gs.loss_channel(state, mode, visibility**2)
    return state


def dealer_noise_cov(noise_var: float, stage: str = "shares") -> np.ndarray:
    """Covariance of the correlated dealer noise over (in, EPR1, EPR2) or the shares."""
    if stage == "shares":
        c_plus = np.array([1 / SQRT2, 0, -1 / SQRT2, 0, 1, 0])
        c_minus = np.array([0, 1 / SQRT2, 0, -1 / SQRT2, 0, -1])
    elif stage == "epr_beams":
        c_plus = np.array([0, 0, 1, 0, 1, 0])
        c_minus = np.array([0, 0, 0, 1, 0, -1])
    else:
        raise InvalidArgument(f"unknown noise stage {stage!r}")
    return noise_var * (np.outer(c_plus, c_plus) + np.outer(c_minus, c_minus))


def _encode_state(config: ScenarioConfig, secret) -> GaussianState:
    epr = make_epr(config.sqz1, config.sqz2, config.epr_visibility)
    state = gs.tensor(gs.coherent(*secret), epr)
    # pi reference on EPR2 aligns its correlations with the dN / dN* pattern
    state = gs.phase_shift(state, 2, np.pi)
    if config.noise_injection == "epr_beams":
        state = gs.add_classical_noise(state, dealer_noise_cov(config.noise_var, "epr_beams"))
    state = gs.beam_splitter(state, 0, 1, 0.5, 0.0)
    if config.noise_injection == "shares":
        state = gs.add_classical_noise(state, dealer_noise_cov(config.noise_var, "shares"))
    for mode, eta in enumerate(config.channel_efficiencies):
        state = gs.loss_channel(state, mode, eta)
    return state


def dealer_encode(config: ScenarioConfig) -> ShareSet:
    state = _encode_state(config, config.secret_amp)
    signal = np.column_stack(
        [
            _encode_state(config, (1.0, 0.0)).mean - _encode_state(config, (0.0, 0.0)).mean,
            _encode_state(config, (0.0, 1.0)).mean - _encode_state(config, (0.0, 0.0)).mean,
        ]
    )
    return ShareSet(state, tuple(config.secret_amp), signal)


def _probe_gains(shares: ShareSet, network) -> tuple[float, float]:
    zero = network(shares.state.with_mean(np.zeros(6))).mean
    g_plus = network(shares.state.with_mean(shares.signal[:, 0])).mean[0] - zero[0]
    g_minus = network(shares.state.with_mean(shares.signal[:, 1])).mean[1] - zero[1]
    return float(g_plus), float(g_minus)


def _mach_zehnder(state: GaussianState) -> GaussianState:
    out = gs.beam_splitter(state, 0, 1, 0.5, 0.0)
    return gs.partial_trace(out, [0])


def reconstruct_12(shares: ShareSet) -> ReconstructionResult:
    """Close the dealer's interferometer: ``(a1 + a2)/sqrt2``."""
    out = _mach_zehnder(shares.state)
    g_plus, g_minus = _probe_gains(shares, _mach_zehnder)
    return ReconstructionResult(out, g_plus, g_minus, AccessStructure.S12)


def gain_for_unitary(detector_efficiency: float = 1.0) -> float:
    """Electronic gain ``G`` at which ``g+ g- = 1``.

    With a lossless detector this is ``2 sqrt2``; detector loss scales the
    photocurrent by ``sqrt(eta)`` and is compensated here.
    """
    if not 0.0 < detector_efficiency <= 1.0:
        raise InvalidArgument(f"detector efficiency must lie in (0, 1] (got {detector_efficiency})")
    return float((SQRT3 - 1 / SQRT3) * SQRT6 / np.sqrt(detector_efficiency))


_FEEDFORWARD_ROUTING = {
    # (share carrying secret/sqrt2, relative phase of share 3)
    AccessStructure.S23: (1, np.pi),
    AccessStructure.S13: (0, 0.0),
}


def _feedforward_network(structure: AccessStructure, config: ScenarioConfig, G: float):
    if structure not in _FEEDFORWARD_ROUTING:
        raise InvalidArgument(f"feedforward reconstruction needs {{2,3}} or {{1,3}}, got {structure.value}")
    partner, phi = _FEEDFORWARD_ROUTING[structure]

    def network(state: GaussianState) -> GaussianState:
        pair = gs.partial_trace(state, [partner, 2])
        pair = gs.beam_splitter(pair, 0, 1, 2.0 / 3.0, phi)
        return gs.feedforward_displace(
            pair,
            detect=QuadratureIndex(1, Quad.AMPLITUDE),
            target=QuadratureIndex(0, Quad.AMPLITUDE),
            electronic_gain=G,
            detector_efficiency=config.ff_detector_efficiency,
            electronic_noise_var=config.ff_electronic_noise_var,
        )

    return network


def solve_unitary_gain(shares: ShareSet, structure: AccessStructure, config: ScenarioConfig) -> float:
    """Electronic gain giving ``g+ g- = 1`` for this network, channel losses included.

    ``g+`` is affine in ``G`` and ``g-`` does not depend on it.
    """
    g0 = _probe_gains(shares, _feedforward_network(structure, config, 0.0))
    g1 = _probe_gains(shares, _feedforward_network(structure, config, 1.0))
    slope = g1[0] - g0[0]
    if g0[1] == 0 or slope == 0:
        raise InvalidArgument("unitary gain point does not exist for this configuration")
    return float((1.0 / g0[1] - g0[0]) / slope)


def feedforward_gain(shares: ShareSet, structure: AccessStructure, config: ScenarioConfig) -> float:
    """The configured electronic gain, or the unitary gain point when unset."""
    if config.electronic_gain is None:
        return solve_unitary_gain(shares, structure, config)
    return config.electronic_gain


def reconstruct_feedforward(
    shares: ShareSet, structure: AccessStructure, config: ScenarioConfig
) -> ReconstructionResult:
    """2:1 beam splitter plus amplitude feedforward for {2,3} or {1,3}.

    {1,3} runs the same network as {2,3} with share 1 in place of share 2 and
    share 3 taken with the opposite phase reference.
    """
    network = _feedforward_network(structure, config, feedforward_gain(shares, structure, config))
    out = network(shares.state)
    g_plus, g_minus = _probe_gains(shares, network)
    return ReconstructionResult(out, g_plus, g_minus, structure)


def apply_parametric(result: ReconstructionResult) -> ReconstructionResult:
    """Local squeeze ``X+ -> X+/sqrt3``, ``X- -> sqrt3 X-`` on a feedforward output."""
    if result.parametric_applied:
        raise InvalidState("parametric correction already applied")
    return replace(
        result,
        out_state=gs.scale_quadratures(result.out_state, 0, 1 / SQRT3),
        g_plus=result.g_plus / SQRT3,
        g_minus=result.g_minus * SQRT3,
        parametric_applied=True,
    )


def adversary_state(shares: ShareSet, structure: AccessStructure) -> ReconstructionResult:
    if structure not in ADVERSARY_STRUCTURES:
        raise InvalidArgument(f"not an adversary structure: {structure.value}")
    k = ADVERSARY_STRUCTURES.index(structure)
    out = gs.partial_trace(shares.state, [k])
    return ReconstructionResult(
        out, float(shares.signal[2 * k, 0]), float(shares.signal[2 * k + 1, 1]), structure
    )


def reconstruct(
    shares: ShareSet,
    structure: AccessStructure,
    config: ScenarioConfig,
    parametric: bool = True,
) -> ReconstructionResult:
    """Dispatch to the right network; feedforward outputs get the parametric fix unless disabled."""
    if structure is AccessStructure.S12:
        return reconstruct_12(shares)
    if structure in _FEEDFORWARD_ROUTING:
        result = reconstruct_feedforward(shares, structure, config)
        return apply_parametric(result) if parametric else result
    return adversary_state(shares, structure)


def detect(result: ReconstructionResult, homodyne_efficiency: float) -> ReconstructionResult:
    """What an inefficient homodyne detector reports for the output state."""
    out = gs.loss_channel(result.out_state, 0, homodyne_efficiency)
    root = np.sqrt(homodyne_efficiency)
    return replace(result, out_state=out, g_plus=result.g_plus * root, g_minus=result.g_minus * root)


@dataclass(frozen=True)
class FeedforwardCoefficients:
    """Lossless {2,3} output quadratures as linear combinations of the inputs.

    Amplitude: ``g+ dX+_in + c_sqz_sum (dX+_s1 + dX+_s2) + c_anti_diff (dX-_s1 - dX-_s2)
    + c_noise dN+``. Phase: ``(dX-_in + dX+_s1 - dX+_s2) / sqrt3``.
    """

    G: float
    g_plus: float
    c_sqz_sum: float
    c_anti_diff: float
    c_noise: float
    g_minus: float
    c_phase_sqz_diff: float

    @property
    def amplitude(self) -> tuple[float, float, float, float]:
        return (self.g_plus, self.c_sqz_sum, self.c_anti_diff, self.c_noise)

    @property
    def phase(self) -> tuple[float, float]:
        return (self.g_minus, self.c_phase_sqz_diff)

    def amplitude_variance(self, sqz1: SqueezerSpec, sqz2: SqueezerSpec, noise_var: float, v_in: float = 1.0) -> float:
        return (
            self.g_plus**2 * v_in
            + self.c_sqz_sum**2 * (sqz1.v_sqz + sqz2.v_sqz)
            + self.c_anti_diff**2 * (sqz1.v_anti + sqz2.v_anti)
            + self.c_noise**2 * noise_var
        )

    def phase_variance(self, sqz1: SqueezerSpec, sqz2: SqueezerSpec, v_in: float = 1.0) -> float:
        return self.g_minus**2 * v_in + self.c_phase_sqz_diff**2 * (sqz1.v_sqz + sqz2.v_sqz)


def ideal_feedforward_coefficients(G: float) -> FeedforwardCoefficients:
    g = 1 / SQRT3 + G / SQRT6
    return FeedforwardCoefficients(
        G=G,
        g_plus=g,
        c_sqz_sum=SQRT3 / 2 * (1 - SQRT3 * g),
        c_anti_diff=0.5 * (g - SQRT3),
        c_noise=SQRT3 - g,
        g_minus=1 / SQRT3,
        c_phase_sqz_diff=1 / SQRT3,
    )
