"""Side-by-side comparison of the covariance engine and the Monte Carlo oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import metrics, montecarlo, protocol
from .config import ScenarioConfig
from .gaussian import coherent
from .protocol import AccessStructure

Z_LIMIT = 5.0


def analytic_quantities(config: ScenarioConfig, structure: AccessStructure) -> dict[str, float]:
    """Same keys as :func:`qss.montecarlo.estimates_from_batch`, from the covariance engine."""
    shares = protocol.dealer_encode(config)
    raw = protocol.reconstruct(shares, structure, config, parametric=False)
    q = {"V_out_plus": raw.v_plus, "V_out_minus": raw.v_minus}
    secret = coherent(*config.secret_amp)
    if np.all(secret.mean != 0):
        T, t_plus, t_minus = metrics.signal_transfer(secret, raw)
        V, vcv_plus, vcv_minus = metrics.reconstruction_noise(raw)
        q.update(
            g_plus=raw.g_plus,
            g_minus=raw.g_minus,
            Vcv_plus=vcv_plus,
            Vcv_minus=vcv_minus,
            T_plus=t_plus,
            T_minus=t_minus,
            T=T,
            V=V,
        )
        final = protocol.apply_parametric(raw) if structure in (AccessStructure.S23, AccessStructure.S13) else raw
        q["fidelity"] = metrics.fidelity(config.secret_amp, final)
    epr = protocol.make_epr(config.sqz1, config.sqz2, config.epr_visibility)
    q["duan_plus"], q["duan_minus"] = metrics.duan_terms(epr)
    q["duan"] = metrics.duan_product(epr)
    return q


@dataclass(frozen=True)
class Comparison:
    structure: AccessStructure
    quantity: str
    analytic: float
    mc: float
    std_error: float

    @property
    def z(self) -> float:
        delta = abs(self.mc - self.analytic)
        if self.std_error == 0:
            return 0.0 if delta < 1e-12 else float("inf")
        return delta / self.std_error

    @property
    def ok(self) -> bool:
        return self.z < Z_LIMIT


def compare(
    config: ScenarioConfig,
    structures=tuple(AccessStructure),
    n_shots: int = 1_000_000,
    seed: int | None = None,
    coefficient_error: float = 0.0,
) -> list[Comparison]:
    rows = []
    for s in structures:
        exact = analytic_quantities(config, s)
        mc = montecarlo.sample_scenario(config, s, n_shots, seed, coefficient_error)
        for key, value in exact.items():
            est = mc[key]
            rows.append(Comparison(s, key, value, est.value, est.std_error))
    return rows
