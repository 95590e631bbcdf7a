"""Figures of merit for reconstructed and adversary states.

All variances are in QNL units and the secret is a coherent state, so the
input variances are 1 unless stated otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InconsistentState, InvalidArgument, InvalidState, UndefinedGain
from .gaussian import GaussianState
from .protocol import AccessStructure, ReconstructionResult

VCV_CLAMP = 1e-9
VCV_FAIL = 1e-6


def fidelity(secret_mean, out: ReconstructionResult) -> float:
    """Overlap of a coherent secret with a Gaussian output.

    ``F = 2 exp(-(k+ + k-)/4) / sqrt((1 + V+)(1 + V-))`` with
    ``k = <X_in>^2 (1 - g)^2 / (1 + V)``.
    """
    if out.structure in (AccessStructure.S23, AccessStructure.S13) and not out.parametric_applied:
        raise InvalidState("apply the parametric correction before computing {2,3}/{1,3} fidelity")
    return fidelity_from_moments(secret_mean, (out.g_plus, out.g_minus), (out.v_plus, out.v_minus))


def fidelity_from_moments(secret_mean, gains, variances) -> float:
    x = np.asarray(secret_mean, dtype=float)
    g = np.asarray(gains, dtype=float)
    v = np.asarray(variances, dtype=float)
    k = x**2 * (1.0 - g) ** 2 / (1.0 + v)
    return float(2.0 * np.exp(-k.sum() / 4.0) / np.sqrt(np.prod(1.0 + v)))


def optical_gains(secret_mean, out_mean) -> tuple[float, float]:
    x = np.asarray(secret_mean, dtype=float)
    if np.any(x == 0):
        raise UndefinedGain("optical gain needs a modulated secret in both quadratures")
    g = np.asarray(out_mean, dtype=float)[:2] / x
    return float(g[0]), float(g[1])


def signal_transfer(secret: GaussianState, out: ReconstructionResult) -> tuple[float, float, float]:
    """Return ``(T, T+, T-)`` with ``T± = SNR±_out / SNR±_in = g² V_in / V_out``."""
    if np.any(secret.mean == 0):
        raise UndefinedGain("signal transfer needs a modulated secret in both quadratures")
    t_plus = out.g_plus**2 * secret.cov[0, 0] / out.v_plus
    t_minus = out.g_minus**2 * secret.cov[1, 1] / out.v_minus
    return float(t_plus + t_minus), float(t_plus), float(t_minus)


def reconstruction_noise(out: ReconstructionResult) -> tuple[float, float, float]:
    """Return ``(V, Vcv+, Vcv-)`` where ``Vcv = V_out - g^2`` and ``V = Vcv+ Vcv-``."""
    vcv = []
    for v, g in ((out.v_plus, out.g_plus), (out.v_minus, out.g_minus)):
        c = v - g**2
        if c < -VCV_FAIL:
            raise InconsistentState(f"conditional variance {c:.3g} < 0 (V_out={v:.6g}, g={g:.6g})")
        vcv.append(max(c, 0.0) if c >= -VCV_CLAMP else c)
    return float(vcv[0] * vcv[1]), float(vcv[0]), float(vcv[1])


def duan_terms(epr: GaussianState) -> tuple[float, float]:
    """``<(dX+_1 + dX+_2)^2>`` and ``<(dX-_1 - dX-_2)^2>``."""
    if epr.n_modes != 2:
        raise InvalidArgument("Duan criterion needs a two-mode state")
    u_plus = np.array([1.0, 0.0, 1.0, 0.0])
    u_minus = np.array([0.0, 1.0, 0.0, -1.0])
    return float(u_plus @ epr.cov @ u_plus), float(u_minus @ epr.cov @ u_minus)


def duan_product(epr: GaussianState) -> float:
    """Product of the two correlation variances over 4; below 1 certifies entanglement."""
    a, b = duan_terms(epr)
    return a * b / 4.0


@dataclass(frozen=True)
class ClassicalBounds:
    avg: float
    asymmetric: float | None = None
    mz: float | None = None


def classical_bounds(k: int, n: int) -> ClassicalBounds:
    """Best fidelities reachable without entanglement.

    The average over access structures is ``k/n`` for any threshold scheme;
    the per-structure split is only known for (2,3).
    """
    if int(k) != k or int(n) != n or not 1 <= k <= n:
        raise InvalidArgument(f"need integers 1 <= k <= n (got k={k}, n={n})")
    if (k, n) == (2, 3):
        return ClassicalBounds(avg=2 / 3, asymmetric=0.5, mz=1.0)
    return ClassicalBounds(avg=k / n)


def average_fidelity(f12: float, f23: float, f13: float) -> float:
    fs = (f12, f23, f13)
    if not all(0.0 <= f <= 1.0 for f in fs):
        raise InvalidArgument(f"fidelities must lie in [0, 1], got {fs}")
    return float(sum(fs) / 3.0)


def infer_through_loss(measured_var: float, efficiency: float) -> float:
    """Undo a loss channel: the variance before a detector of the given efficiency."""
    if not 0.0 < efficiency <= 1.0:
        raise InvalidArgument(f"efficiency must lie in (0, 1] (got {efficiency})")
    return 1.0 + (measured_var - 1.0) / efficiency


class WignerEllipse(NamedTuple):
    center: tuple[float, float]
    semi_axes: tuple[float, float]
    angle: float


def wigner_contour(state: GaussianState) -> WignerEllipse:
    """One-standard-deviation contour of a single-mode Wigner function.

    ``semi_axes`` are ascending; ``angle`` is the direction of the first
    (minor) axis measured from the ``X+`` axis, in ``[0, pi)``.
    """
    if state.n_modes != 1:
        raise InvalidArgument("Wigner contour needs a single-mode state")
    w, vecs = np.linalg.eigh(state.cov)
    angle = float(np.arctan2(vecs[1, 0], vecs[0, 0]) % np.pi)
    return WignerEllipse(
        (float(state.mean[0]), float(state.mean[1])),
        (float(np.sqrt(w[0])), float(np.sqrt(w[1]))),
        angle,
    )


@dataclass(frozen=True)
class MetricsReport:
    structure: AccessStructure
    fidelity: float
    g_plus: float
    g_minus: float
    gain_product: float
    T: float
    T_plus: float
    T_minus: float
    V: float
    Vcv_plus: float
    Vcv_minus: float
    v_plus: float
    v_minus: float
    duan: float | None = None
    beats_F_bound: bool = False
    beats_T_cloning: bool = False
    below_V_unity: bool = False


def _classical_fidelity_bound(structure: AccessStructure) -> float:
    bounds = classical_bounds(2, 3)
    if structure is AccessStructure.S12:
        return bounds.mz
    if structure in (AccessStructure.S23, AccessStructure.S13):
        return bounds.asymmetric
    return 0.0


def evaluate(
    secret: GaussianState,
    result: ReconstructionResult,
    tv_result: ReconstructionResult | None = None,
    duan: float | None = None,
) -> MetricsReport:
    """Collect every figure of merit for one structure.

    T and V are taken from ``tv_result`` when given (they are the same before
    and after the parametric correction) and from ``result`` otherwise.
    """
    tv_src = tv_result if tv_result is not None else result
    F = fidelity(secret.mean, result)
    T, t_plus, t_minus = signal_transfer(secret, tv_src)
    V, vcv_plus, vcv_minus = reconstruction_noise(tv_src)
    bound = _classical_fidelity_bound(result.structure)
    return MetricsReport(
        structure=result.structure,
        fidelity=F,
        g_plus=result.g_plus,
        g_minus=result.g_minus,
        gain_product=result.gain_product,
        T=T,
        T_plus=t_plus,
        T_minus=t_minus,
        V=V,
        Vcv_plus=vcv_plus,
        Vcv_minus=vcv_minus,
        v_plus=result.v_plus,
        v_minus=result.v_minus,
        duan=duan,
        beats_F_bound=result.structure.is_access and F > bound + 1e-9,
        beats_T_cloning=T > 1.0,
        below_V_unity=V < 1.0,
    )
