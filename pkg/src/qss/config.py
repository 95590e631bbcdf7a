"""Scenario parameters and the flat ``key = value`` config format.

Keys ending in ``_db`` are given in dB relative to the quantum noise limit;
keys ending in ``_var`` are linear variances in QNL units. Either spelling is
accepted on input; serialization always writes the canonical keys below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import InvalidArgument
from .gaussian import SqueezerSpec

EXP_SQUEEZING_DB = -4.5
EXP_NOISE_DB = 3.5
EXP_ELECTRONIC_NOISE_DB = -13.0
EXP_FF_EFFICIENCY = 0.93
EXP_HOMODYNE_EFFICIENCY = 0.89


def db_to_var(db: float) -> float:
    return 10.0 ** (db / 10.0)


class ConfigError(InvalidArgument):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"field '{key}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.key = key


@dataclass(frozen=True)
class ScenarioConfig:
    """All physical parameters of one run of the sharing scheme.

    ``electronic_gain = None`` means "the unitary gain point for the configured
    feedforward detector efficiency".
    """

    secret_amp: tuple[float, float] = (4.0, 2.0)
    sqz1: SqueezerSpec = field(default_factory=lambda: SqueezerSpec(EXP_SQUEEZING_DB))
    sqz2: SqueezerSpec = field(default_factory=lambda: SqueezerSpec(EXP_SQUEEZING_DB))
    epr_visibility: float = 1.0
    noise_var: float = db_to_var(EXP_NOISE_DB)
    ff_detector_efficiency: float = EXP_FF_EFFICIENCY
    ff_electronic_noise_var: float = db_to_var(EXP_ELECTRONIC_NOISE_DB)
    electronic_gain: float | None = None
    homodyne_efficiency: float = EXP_HOMODYNE_EFFICIENCY
    channel_efficiencies: tuple[float, float, float] = (1.0, 1.0, 1.0)
    noise_injection: str = "shares"
    seed: int = 42

    def __post_init__(self):
        object.__setattr__(self, "secret_amp", tuple(float(x) for x in self.secret_amp))
        object.__setattr__(
            self, "channel_efficiencies", tuple(float(x) for x in self.channel_efficiencies)
        )
        if len(self.secret_amp) != 2:
            raise ConfigError("secret_amp needs two components", key="secret_amp")
        if len(self.channel_efficiencies) != 3:
            raise ConfigError("need three channel efficiencies", key="channel_efficiencies")
        _unit_interval("epr_visibility", self.epr_visibility)
        _unit_interval("ff_detector_efficiency", self.ff_detector_efficiency)
        for k, eta in enumerate(self.channel_efficiencies, start=1):
            _unit_interval(f"channel_efficiency_{k}", eta)
        if not 0.0 < self.homodyne_efficiency <= 1.0:
            raise ConfigError("must lie in (0, 1]", key="homodyne_efficiency")
        if not self.noise_var >= 0:
            raise ConfigError("must be >= 0", key="noise_var")
        if not self.ff_electronic_noise_var >= 0:
            raise ConfigError("must be >= 0", key="ff_electronic_noise_var")
        if self.electronic_gain is not None and not math.isfinite(self.electronic_gain):
            raise ConfigError("must be finite", key="electronic_gain")
        if self.noise_injection not in ("shares", "epr_beams"):
            raise ConfigError("must be 'shares' or 'epr_beams'", key="noise_injection")
        if not all(math.isfinite(x) for x in self.secret_amp):
            raise ConfigError("must be finite", key="secret_amp")

    @classmethod
    def experiment(cls, **overrides) -> ScenarioConfig:
        """Parameters of the theoretical curves: -4.5 dB, +3.5 dB noise, -13 dB electronics, 0.93."""
        return replace(cls(), **overrides)

    @classmethod
    def ideal(cls, **overrides) -> ScenarioConfig:
        """Near-perfect resources: -60 dB squeezing, no dealer noise, ideal detection."""
        base = cls(
            sqz1=SqueezerSpec(-60.0),
            sqz2=SqueezerSpec(-60.0),
            noise_var=0.0,
            ff_detector_efficiency=1.0,
            ff_electronic_noise_var=0.0,
            homodyne_efficiency=1.0,
        )
        return replace(base, **overrides)

    @classmethod
    def classical(cls, **overrides) -> ScenarioConfig:
        """No entanglement: vacuum in place of the squeezed beams, no dealer noise."""
        base = cls(
            sqz1=SqueezerSpec(0.0),
            sqz2=SqueezerSpec(0.0),
            noise_var=0.0,
            ff_detector_efficiency=1.0,
            ff_electronic_noise_var=0.0,
            homodyne_efficiency=1.0,
        )
        return replace(base, **overrides)

    def with_gain(self, G: float | None) -> ScenarioConfig:
        return replace(self, electronic_gain=G)


def _unit_interval(key: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ConfigError(f"must lie in [0, 1] (got {value})", key=key)


_CANONICAL_KEYS = (
    "secret_amp_plus",
    "secret_amp_minus",
    "sqz1_db",
    "sqz1_excess",
    "sqz2_db",
    "sqz2_excess",
    "epr_visibility",
    "noise_var",
    "ff_detector_efficiency",
    "ff_electronic_noise_var",
    "electronic_gain",
    "homodyne_efficiency",
    "channel_efficiency_1",
    "channel_efficiency_2",
    "channel_efficiency_3",
    "noise_injection",
    "seed",
)

_DB_ALIASES = {"noise_db": "noise_var", "ff_electronic_noise_db": "ff_electronic_noise_var"}


def _to_flat(cfg: ScenarioConfig) -> dict[str, object]:
    return {
        "secret_amp_plus": cfg.secret_amp[0],
        "secret_amp_minus": cfg.secret_amp[1],
        "sqz1_db": cfg.sqz1.squeezing_db,
        "sqz1_excess": cfg.sqz1.excess_factor,
        "sqz2_db": cfg.sqz2.squeezing_db,
        "sqz2_excess": cfg.sqz2.excess_factor,
        "epr_visibility": cfg.epr_visibility,
        "noise_var": cfg.noise_var,
        "ff_detector_efficiency": cfg.ff_detector_efficiency,
        "ff_electronic_noise_var": cfg.ff_electronic_noise_var,
        "electronic_gain": "unitary" if cfg.electronic_gain is None else cfg.electronic_gain,
        "homodyne_efficiency": cfg.homodyne_efficiency,
        "channel_efficiency_1": cfg.channel_efficiencies[0],
        "channel_efficiency_2": cfg.channel_efficiencies[1],
        "channel_efficiency_3": cfg.channel_efficiencies[2],
        "noise_injection": cfg.noise_injection,
        "seed": cfg.seed,
    }


def _format(value: object) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dumps(cfg: ScenarioConfig) -> str:
    flat = _to_flat(cfg)
    return "".join(f"{k} = {_format(flat[k])}\n" for k in _CANONICAL_KEYS)


def loads(text: str) -> ScenarioConfig:
    flat = _to_flat(ScenarioConfig())
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        target = _DB_ALIASES.get(key, key)
        if target not in flat:
            raise ConfigError("unknown key", line=lineno, key=key)
        if target in seen:
            raise ConfigError(f"duplicate (first set on line {seen[target]})", line=lineno, key=key)
        seen[target] = lineno
        flat[target] = _parse_value(target, key, value, lineno)
    sqz = {}
    for name in ("sqz1", "sqz2"):
        try:
            sqz[name] = SqueezerSpec(flat[f"{name}_db"], flat[f"{name}_excess"])
        except InvalidArgument as exc:
            key = f"{name}_db" if flat[f"{name}_db"] > 0 else f"{name}_excess"
            raise ConfigError(str(exc), line=seen.get(key), key=key) from None
    try:
        return ScenarioConfig(
            secret_amp=(flat["secret_amp_plus"], flat["secret_amp_minus"]),
            sqz1=sqz["sqz1"],
            sqz2=sqz["sqz2"],
            epr_visibility=flat["epr_visibility"],
            noise_var=flat["noise_var"],
            ff_detector_efficiency=flat["ff_detector_efficiency"],
            ff_electronic_noise_var=flat["ff_electronic_noise_var"],
            electronic_gain=None if flat["electronic_gain"] == "unitary" else flat["electronic_gain"],
            homodyne_efficiency=flat["homodyne_efficiency"],
            channel_efficiencies=(
                flat["channel_efficiency_1"],
                flat["channel_efficiency_2"],
                flat["channel_efficiency_3"],
            ),
            noise_injection=flat["noise_injection"],
            seed=flat["seed"],
        )
    except ConfigError as exc:
        if exc.line is None and exc.key in seen:
            raise ConfigError(exc.args[0].split(": ", 1)[-1], line=seen[exc.key], key=exc.key) from None
        raise


def _parse_value(target: str, key: str, value: str, lineno: int):
    if target == "noise_injection":
        return value
    if target == "electronic_gain" and value.lower() == "unitary":
        return "unitary"
    if target == "seed":
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"expected an integer, got {value!r}", line=lineno, key=key) from None
    try:
        x = float(value)
    except ValueError:
        raise ConfigError(f"expected a number, got {value!r}", line=lineno, key=key) from None
    if not math.isfinite(x):
        raise ConfigError(f"expected a finite number, got {value!r}", line=lineno, key=key)
    if key in _DB_ALIASES:
        x = db_to_var(x)
    return x


def load(path: str | Path) -> ScenarioConfig:
    return loads(Path(path).read_text())


def dump(cfg: ScenarioConfig, path: str | Path) -> None:
    Path(path).write_text(dumps(cfg))

