#!/usr/bin/env python

'''
Load a YML configuration file based on context (local development override or
the shipped defaults), and validate RunConfig files against the `run` section.
'''

import os
import logging
from dataclasses import dataclass, fields
from types import SimpleNamespace

import yaml

from utility import find_file_in_resources, ConfigError

logger = logging.getLogger(__name__)

FILE_DEV = 'configmine.yml'
FILE_APP = 'config.yml'

ENV_OUTPUT = 'MHDPOINT_OUTPUT'


def read_yml(filename):
    '''Return a YAML file as a dictionary'''
    try:
        with open(filename, encoding='utf-8') as f:
            data = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        raise RuntimeError(
            f'Missing or invalid configuration file\n({e})') from e
    return data or {}


# Use a local development config file if present
if os.path.isfile(find_file_in_resources(FILE_DEV)):
    file = FILE_DEV
else:
    file = FILE_APP

logger.debug(f'Using config file: {file}')

# Get the YAML configuration file as a dictionary
config_dict = read_yml(find_file_in_resources(file))

# Unpack the dictionary to a namespace
# to allow access through dot notation
config = SimpleNamespace(**config_dict)


@dataclass(frozen=True)
class RunConfig:
    n_phi: int
    n_theta: int
    n_rho_shells: int
    grid_n_rho: int
    grid_n_phi: int
    rho_min: float
    rho_max: float
    tol: float
    max_iter: int
    betas: tuple
    q: float
    inner_data: float
    output_dir: str
    seed: int
    workers: int

    def as_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d['betas'] = list(self.betas)
        return d


def _coerce(key: str, value, default):
    '''Convert a RunConfig value to the type of its default.'''
    try:
        if isinstance(default, bool):
            return bool(value)
        if isinstance(default, int):
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(f'{value} is not an integer')
            return int(value)
        if isinstance(default, float):
            return float(value)
        if isinstance(default, list):
            if isinstance(value, str):
                value = [v for v in value.split(',') if v.strip()]
            return tuple(float(v) for v in value)
        return str(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f'Invalid value for \'{key}\': {value!r} ({e})') from e


def load_run_config(path: str = None, **overrides) -> RunConfig:
    '''Merge a RunConfig file and keyword overrides over the shipped defaults.'''
    defaults = dict(config.run)
    values = dict(defaults)

    if path:
        try:
            data = read_yml(path)
        except RuntimeError as e:
            raise ConfigError(str(e)) from e
        if not isinstance(data, dict):
            raise ConfigError(f'RunConfig \'{path}\' is not a key: value mapping')
        for k, v in data.items():
            if k not in defaults:
                raise ConfigError(f'Unknown RunConfig key \'{k}\' in {path}')
            values[k] = v
        logger.info(f'Loaded RunConfig {path}')

    for k, v in overrides.items():
        if v is None:
            continue
        if k not in defaults:
            raise ConfigError(f'Unknown RunConfig key \'{k}\'')
        values[k] = v

    # An explicit output_dir beats the environment
    if overrides.get('output_dir') is None and os.environ.get(ENV_OUTPUT):
        values['output_dir'] = os.environ[ENV_OUTPUT]

    values = {k: _coerce(k, v, defaults[k]) for k, v in values.items()}

    if values['n_phi'] < 2 or values['n_theta'] < 4:
        raise ConfigError('Quadrature orders need n_phi >= 2 and n_theta >= 4')
    if values['grid_n_rho'] < 8 or values['grid_n_phi'] < 8:
        raise ConfigError('Grid sizes must be at least 8')
    if not 0 < values['rho_min'] < values['rho_max']:
        raise ConfigError('Need 0 < rho_min < rho_max')
    if values['tol'] <= 0 or values['max_iter'] < 1 or values['workers'] < 1:
        raise ConfigError('tol, max_iter and workers must be positive')
    if not 1 < values['q'] < 3:
        raise ConfigError(f'q must lie in (1, 3), got {values["q"]}')
    if any(b < 0 for b in values['betas']):
        raise ConfigError('Negative beta in sweep list')

    return RunConfig(**values)
