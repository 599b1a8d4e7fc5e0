from dataclasses import FrozenInstanceError

import pytest

from config import config, load_run_config, RunConfig, ENV_OUTPUT
from utility import ConfigError


def test_config():
    assert config.fd_step > 0
    assert config.landau['a_lower'] > 1
    assert set(config.run) == set(RunConfig.__dataclass_fields__)


def test_run_config(tmp_path, monkeypatch):
    monkeypatch.delenv(ENV_OUTPUT, raising=False)
    run = load_run_config()
    assert run.n_phi == 64 and run.n_theta == 32
    assert run.betas == (0.25, 0.5, 1.0, 2.0, 300.0)
    assert run.inner_data == 0.0
    assert isinstance(run.grid_n_rho, int)
    with pytest.raises(FrozenInstanceError):
        run.n_phi = 8

    path = tmp_path / 'run.yml'
    path.write_text('n_phi: 16\nbetas: 0.1,0.2\nrho_min: 0.5\n')
    run = load_run_config(str(path), seed=3)
    assert run.n_phi == 16
    assert run.betas == (0.1, 0.2)
    assert run.rho_min == 0.5
    assert run.seed == 3
    assert run.as_dict()['betas'] == [0.1, 0.2]

    # Overrides of None are ignored
    assert load_run_config(tol=None).tol == config.run['tol']

    monkeypatch.setenv(ENV_OUTPUT, str(tmp_path / 'out'))
    assert load_run_config().output_dir == str(tmp_path / 'out')

    # An explicit output directory wins over the environment
    explicit = str(tmp_path / 'explicit')
    assert load_run_config(output_dir=explicit).output_dir == explicit
    path.write_text('output_dir: from_file\n')
    assert load_run_config(str(path)).output_dir == str(tmp_path / 'out')


def test_run_config_errors(tmp_path):
    bad = {
        'unknown.yml': 'bogus: 1\n',
        'type.yml': 'n_phi: many\n',
        'fraction.yml': 'grid_n_rho: 16.5\n',
        'range.yml': 'rho_min: 3.0\n',
        'q.yml': 'q: 3.0\n',
        'beta.yml': 'betas: [1.0, -1.0]\n',
        'list.yml': '- 1\n- 2\n',
    }
    for name, text in bad.items():
        path = tmp_path / name
        path.write_text(text)
        with pytest.raises(ConfigError):
            load_run_config(str(path))

    with pytest.raises(ConfigError):
        load_run_config(str(tmp_path / 'missing.yml'))
    with pytest.raises(ConfigError):
        load_run_config(workers=0)
    with pytest.raises(ConfigError):
        load_run_config(colour='blue')
