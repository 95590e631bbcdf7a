from dataclasses import replace

import numpy as np
import pytest

from qss import config
from qss.config import ConfigError, ScenarioConfig
from qss.gaussian import SqueezerSpec


def test_experiment_defaults():
    c = ScenarioConfig.experiment()
    assert c.sqz1.squeezing_db == -4.5
    assert np.isclose(c.noise_var, 10**0.35)
    assert np.isclose(c.ff_electronic_noise_var, 10**-1.3)
    assert c.ff_detector_efficiency == 0.93 and c.homodyne_efficiency == 0.89
    assert c.secret_amp == (4.0, 2.0) and c.electronic_gain is None


@pytest.mark.parametrize(
    "cfg",
    [
        ScenarioConfig.experiment(),
        ScenarioConfig.ideal(),
        ScenarioConfig.classical().with_gain(1.234567890123),
        replace(ScenarioConfig.experiment(), sqz2=SqueezerSpec(-3.3, 1.7), channel_efficiencies=(0.9, 0.8, 1.0), noise_injection="epr_beams"),
    ],
)
def test_round_trip(cfg):
    text = config.dumps(cfg)
    assert config.loads(text) == cfg
    assert config.dumps(config.loads(text)) == text


def test_file_round_trip(tmp_path):
    p = tmp_path / "s.cfg"
    config.dump(ScenarioConfig.experiment(), p)
    assert config.load(p) == ScenarioConfig.experiment()


def test_comments_and_db_aliases():
    c = config.loads("# scenario\nnoise_db = 3.5   # dealer noise\nff_electronic_noise_db = -13\nelectronic_gain = 2.5\n")
    assert np.isclose(c.noise_var, 10**0.35)
    assert np.isclose(c.ff_electronic_noise_var, 10**-1.3)
    assert c.electronic_gain == 2.5
    assert config.loads("electronic_gain = unitary").electronic_gain is None


@pytest.mark.parametrize(
    "text,line,key",
    [
        ("seed = 1\nbogus = 2\n", 2, "bogus"),
        ("noise_var = 1\nnoise_var = 2\n", 2, "noise_var"),
        ("\n\nsqz1_db = abc\n", 3, "sqz1_db"),
        ("sqz1_db = 2.0\n", 1, "sqz1_db"),
        ("homodyne_efficiency = 1.5\n", 1, "homodyne_efficiency"),
        ("channel_efficiency_2 = -0.1\n", 1, "channel_efficiency_2"),
        ("noise_injection = somewhere\n", 1, "noise_injection"),
        ("seed = 1.5\n", 1, "seed"),
        ("just words\n", 1, None),
    ],
)
def test_diagnostics(text, line, key):
    with pytest.raises(ConfigError) as info:
        config.loads(text)
    assert info.value.line == line
    assert info.value.key == key
    assert f"line {line}" in str(info.value)


def test_direct_validation():
    with pytest.raises(ConfigError):
        ScenarioConfig(noise_var=-1)
    with pytest.raises(ConfigError):
        ScenarioConfig(channel_efficiencies=(1, 1))
