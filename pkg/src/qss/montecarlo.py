"""Shot-level Monte Carlo of the sharing scheme.

Every noise source is drawn explicitly (squeezed quadratures, dealer noise,
vacuum entering at each loss, feedforward electronic noise) and pushed
through the linear input/output relations of the dealer and the
reconstruction networks, one shot at a time (vectorised over shots). Nothing
here uses the covariance engine in :mod:`qss.gaussian`; the two routes are
meant to be compared against each other.

Shots are generated in fixed-size blocks, each with its own generator spawned
from ``numpy.random.SeedSequence(seed)``, so a given ``(seed, n_shots)`` pair
always yields the same samples however the blocks are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .config import ScenarioConfig
from .errors import InvalidArgument
from .protocol import AccessStructure

BLOCK_SIZE = 1 << 17

_R2 = np.sqrt(2.0)
_R3 = np.sqrt(3.0)


@dataclass(frozen=True)
class MCEstimate:
    """Sample mean and variance of one quadrature with their standard errors."""

    mean: float
    variance: float
    std_error_mean: float
    std_error_var: float
    n_shots: int

    @classmethod
    def from_samples(cls, x: np.ndarray) -> MCEstimate:
        n = x.size
        if n < 2:
            raise InvalidArgument("need at least two shots")
        mean = float(x.mean())
        var = float(x.var(ddof=1))
        return cls(mean, var, np.sqrt(var / n), var * np.sqrt(2.0 / (n - 1)), n)


@dataclass(frozen=True)
class Estimate:
    value: float
    std_error: float


@dataclass
class SampleBatch:
    n_shots: int
    rng_seed: int
    samples: dict[str, np.ndarray] = field(default_factory=dict)


class _Shots:
    """Draws independent Gaussian variates for one block."""

    def __init__(self, rng: np.random.Generator, n: int):
        self.rng = rng
        self.n = n

    def normal(self, var: float, mean: float = 0.0) -> np.ndarray:
        return mean + np.sqrt(var) * self.rng.standard_normal(self.n)

    def vacuum(self) -> tuple[np.ndarray, np.ndarray]:
        return self.normal(1.0), self.normal(1.0)


class _NoiseFree(_Shots):
    """Zero-noise "draws": pushes only the means through the relations."""

    def __init__(self):
        super().__init__(None, 1)

    def normal(self, var: float, mean: float = 0.0) -> np.ndarray:
        return np.full(1, float(mean))


def _unitary_gain(cfg: ScenarioConfig, structure: AccessStructure) -> float:
    """Feedforward gain with ``g+ g- = 1``, from noise-free passes at G = 0 and G = 1."""
    x = np.array([1.0, 1.0])
    out = []
    for G in (0.0, 1.0):
        probe = replace(cfg, secret_amp=tuple(x), electronic_gain=G)
        (op, om), _ = _block(probe, structure, _NoiseFree(), 0.0)
        out.append((op[0] / x[0], om[0] / x[1]))
    (gp0, gm0), (gp1, _) = out
    return (1.0 / gm0 - gp0) / (gp1 - gp0)


def _lossy(q: tuple[np.ndarray, np.ndarray], eta: float, draw: _Shots):
    if eta == 1.0:
        return q
    vp, vm = draw.vacuum()
    a, b = np.sqrt(eta), np.sqrt(1.0 - eta)
    return a * q[0] + b * vp, a * q[1] + b * vm


def _block(cfg: ScenarioConfig, structure: AccessStructure, draw: _Shots, coefficient_error: float):
    """Output quadratures (and raw EPR quadratures) for one block of shots."""
    in_p = draw.normal(1.0, cfg.secret_amp[0])
    in_m = draw.normal(1.0, cfg.secret_amp[1])
    s1p, s1m = draw.normal(cfg.sqz1.v_sqz), draw.normal(cfg.sqz1.v_anti)
    s2p, s2m = draw.normal(cfg.sqz2.v_sqz), draw.normal(cfg.sqz2.v_anti)

    # (a_s1 + i a_s2)/sqrt2 and (a_s1 - i a_s2)/sqrt2
    e1 = ((s1p - s2m) / _R2, (s1m + s2p) / _R2)
    e2 = ((s1p + s2m) / _R2, (s1m - s2p) / _R2)
    vis = cfg.epr_visibility**2
    e1 = _lossy(e1, vis, draw)
    e2 = _lossy(e2, vis, draw)
    epr = {"epr1_plus": e1[0], "epr1_minus": e1[1], "epr2_plus": e2[0], "epr2_minus": e2[1]}

    n_p = draw.normal(cfg.noise_var)
    n_m = draw.normal(cfg.noise_var)
    # dealer takes EPR2 with a pi phase reference
    f_p, f_m = -e2[0], -e2[1]
    if cfg.noise_injection == "epr_beams":
        e_p, e_m = e1[0] + n_p, e1[1] + n_m
        f_p, f_m = f_p + n_p, f_m - n_m
        shares = [
            ((in_p + e_p) / _R2, (in_m + e_m) / _R2),
            ((in_p - e_p) / _R2, (in_m - e_m) / _R2),
            (f_p, f_m),
        ]
    else:
        shares = [
            ((in_p + e1[0] + n_p) / _R2, (in_m + e1[1] + n_m) / _R2),
            ((in_p - e1[0] - n_p) / _R2, (in_m - e1[1] - n_m) / _R2),
            (f_p + n_p, f_m - n_m),
        ]
    shares = [_lossy(q, eta, draw) for q, eta in zip(shares, cfg.channel_efficiencies)]

    k = 1.0 + coefficient_error
    if structure is AccessStructure.S12:
        (a1p, a1m), (a2p, a2m) = shares[0], shares[1]
        out = ((a1p + k * a2p) / _R2, (a1m + k * a2m) / _R2)
    elif structure in (AccessStructure.S23, AccessStructure.S13):
        if structure is AccessStructure.S23:
            (ap, am), sign = shares[1], -1.0
        else:
            (ap, am), sign = shares[0], 1.0
        bp, bm = shares[2]
        t, r = np.sqrt(2.0 / 3.0), np.sqrt(1.0 / 3.0)
        target = (k * t * ap + sign * r * bp, k * t * am + sign * r * bm)
        det_p = r * ap - sign * t * bp
        eta = cfg.ff_detector_efficiency
        G = _unitary_gain(cfg, structure) if cfg.electronic_gain is None else cfg.electronic_gain
        current = np.sqrt(eta) * det_p + draw.normal(1.0 - eta) + draw.normal(cfg.ff_electronic_noise_var)
        out = (target[0] + G * current, target[1])
    else:
        out = shares[("ADV1", "ADV2", "ADV3").index(structure.name)]
    return out, epr


def sample_batch(
    config: ScenarioConfig,
    structure: AccessStructure,
    n_shots: int,
    seed: int,
    coefficient_error: float = 0.0,
) -> SampleBatch:
    """Draw ``n_shots`` shots of the output quadratures for one structure.

    ``coefficient_error`` perturbs one interferometer coefficient by that
    relative amount; it exists so tests can check the comparison catches a
    wrong network.
    """
    if int(n_shots) != n_shots or n_shots < 2:
        raise InvalidArgument(f"n_shots must be an integer >= 2 (got {n_shots})")
    n_shots = int(n_shots)
    n_blocks = -(-n_shots // BLOCK_SIZE)
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    parts: dict[str, list[np.ndarray]] = {}
    for b, child in enumerate(children):
        n = min(BLOCK_SIZE, n_shots - b * BLOCK_SIZE)
        draw = _Shots(np.random.default_rng(child), n)
        (op, om), epr = _block(config, structure, draw, coefficient_error)
        for key, arr in {"out_plus": op, "out_minus": om, **epr}.items():
            parts.setdefault(key, []).append(arr)
    samples = {key: np.concatenate(v) for key, v in parts.items()}
    return SampleBatch(n_shots, seed, samples)


def _ratio(est: MCEstimate, denom: float) -> Estimate:
    return Estimate(est.mean / denom, est.std_error_mean / abs(denom))


def estimate_fidelity(out_plus: np.ndarray, out_minus: np.ndarray, secret_mean) -> Estimate:
    """Plug sampled gains and variances into the coherent-secret fidelity.

    The standard error comes from first-order propagation of the errors on
    the two means and two variances (independent for Gaussian data).
    """
    x = np.asarray(secret_mean, dtype=float)
    ests = [MCEstimate.from_samples(out_plus), MCEstimate.from_samples(out_minus)]
    params = np.array([ests[0].mean, ests[1].mean, ests[0].variance, ests[1].variance])
    errors = np.array([ests[0].std_error_mean, ests[1].std_error_mean, ests[0].std_error_var, ests[1].std_error_var])

    def f(p):
        g = p[:2] / x
        v = p[2:]
        k = x**2 * (1.0 - g) ** 2 / (1.0 + v)
        return 2.0 * np.exp(-k.sum() / 4.0) / np.sqrt(np.prod(1.0 + v))

    value = float(f(params))
    grad = np.empty(4)
    for i in range(4):
        h = 1e-6 * max(1.0, abs(params[i]))
        up, dn = params.copy(), params.copy()
        up[i] += h
        dn[i] -= h
        grad[i] = (f(up) - f(dn)) / (2 * h)
    return Estimate(value, float(np.sqrt(np.sum((grad * errors) ** 2))))


def estimates_from_batch(batch: SampleBatch, secret_mean, structure: AccessStructure) -> dict[str, Estimate]:
    """Reduce a batch to the scenario quantities with standard errors."""
    x = np.asarray(secret_mean, dtype=float)
    op, om = batch.samples["out_plus"], batch.samples["out_minus"]
    est_p, est_m = MCEstimate.from_samples(op), MCEstimate.from_samples(om)
    out: dict[str, Estimate] = {
        "V_out_plus": Estimate(est_p.variance, est_p.std_error_var),
        "V_out_minus": Estimate(est_m.variance, est_m.std_error_var),
    }
    vcv, transfer = {}, {}
    if np.all(x != 0):
        for tag, est, xin in (("plus", est_p, x[0]), ("minus", est_m, x[1])):
            g = _ratio(est, xin)
            v = est.variance
            out[f"g_{tag}"] = g
            vcv[tag] = Estimate(
                v - g.value**2, float(np.hypot(est.std_error_var, 2 * g.value * g.std_error))
            )
            transfer[tag] = Estimate(
                g.value**2 / v,
                float(np.hypot(2 * g.value / v * g.std_error, g.value**2 / v**2 * est.std_error_var)),
            )
            out[f"Vcv_{tag}"] = vcv[tag]
            out[f"T_{tag}"] = transfer[tag]
        out["T"] = Estimate(
            transfer["plus"].value + transfer["minus"].value,
            float(np.hypot(transfer["plus"].std_error, transfer["minus"].std_error)),
        )
        out["V"] = Estimate(
            vcv["plus"].value * vcv["minus"].value,
            float(
                np.hypot(
                    vcv["minus"].value * vcv["plus"].std_error,
                    vcv["plus"].value * vcv["minus"].std_error,
                )
            ),
        )
        if structure in (AccessStructure.S23, AccessStructure.S13):
            out["fidelity"] = estimate_fidelity(op / _R3, om * _R3, x)
        else:
            out["fidelity"] = estimate_fidelity(op, om, x)

    s = batch.samples
    d_plus = MCEstimate.from_samples(s["epr1_plus"] + s["epr2_plus"])
    d_minus = MCEstimate.from_samples(s["epr1_minus"] - s["epr2_minus"])
    out["duan_plus"] = Estimate(d_plus.variance, d_plus.std_error_var)
    out["duan_minus"] = Estimate(d_minus.variance, d_minus.std_error_var)
    out["duan"] = Estimate(
        d_plus.variance * d_minus.variance / 4.0,
        float(np.hypot(d_minus.variance * d_plus.std_error_var, d_plus.variance * d_minus.std_error_var)) / 4.0,
    )
    return out


def sample_scenario(
    config: ScenarioConfig,
    structure: AccessStructure,
    n_shots: int = 1_000_000,
    seed: int | None = None,
    coefficient_error: float = 0.0,
) -> dict[str, Estimate]:
    seed = config.seed if seed is None else seed
    batch = sample_batch(config, structure, n_shots, seed, coefficient_error)
    return estimates_from_batch(batch, config.secret_amp, structure)
