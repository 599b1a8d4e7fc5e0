# General utility module

import os
import csv
import logging
import functools


def logger(level: str = 'INFO', logfile: str = None) -> logging.Logger:
    '''Default logger for the command-line entry point.'''
    # Create the logger
    logger = logging.getLogger()
    logger.setLevel(level)

    # Remove handlers installed by earlier calls (or by other libraries)
    for h in list(logger.handlers):
        logger.removeHandler(h)

    ch = logging.StreamHandler()
    ch.setLevel(level)
    ch.setFormatter(logging.Formatter(
        '[ %(levelname)s ] %(name)s : %(message)s'))
    logger.addHandler(ch)

    if logfile:
        fh = logging.FileHandler(logfile, mode='w')
        fh.setLevel(logging.DEBUG)
        fh.setFormatter(logging.Formatter(
            '%(asctime)s [ %(levelname)s ] %(name)s : %(message)s'))
        logger.addHandler(fh)

    return logger


def logit(function):
    '''Decorator that logs command calls at debug level.'''
    log = logging.getLogger(function.__module__)

    @functools.wraps(function)
    def wrapper(*args, **kwargs):
        a = f'-- {args}' if args else ''
        k = f': {kwargs}' if kwargs else ''
        log.debug(f'LOGIT {function.__name__} {a} {k}')
        return function(*args, **kwargs)
    return wrapper


def find_file_in_resources(filename: str) -> str:
    '''Return the path of a resource file shipped next to the modules.'''
    return os.path.join(os.path.dirname(os.path.abspath(__file__)), filename)


def format_number(value) -> str:
    '''Deterministic text form of a CSV cell.'''
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, '.17g')
    try:
        return format(float(value), '.17g')
    except (TypeError, ValueError):
        return str(value)


def write_csv(path: str, header: list, rows, metadata: dict = None) -> None:
    '''Write rows to CSV, preceded by a `# key=value` metadata block.'''
    with open(path, 'w', newline='', encoding='utf-8') as f:
        for k, v in (metadata or {}).items():
            f.write(f'# {k}={v}\n')
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(v) for v in row])


def read_csv(path: str) -> tuple:
    '''Return (metadata, header, rows) from a file written by write_csv.'''
    metadata = {}
    with open(path, encoding='utf-8') as f:
        lines = f.read().splitlines()
    body = []
    for line in lines:
        if line.startswith('#'):
            key, _, value = line[1:].strip().partition('=')
            metadata[key] = value
        elif line.strip():
            body.append(line)
    reader = csv.reader(body)
    header = next(reader)
    return metadata, header, [row for row in reader]


#
# Exceptions
#


class ZeroPoint(ValueError):
    '''Evaluation requested at the origin.'''


class AxisSingularity(ValueError):
    '''Spherical operator evaluated too close to the polar axis.'''


class StencilHitsOrigin(ValueError):
    '''Finite-difference stencil reaches the origin.'''


class DomainError(ValueError):
    '''Parameter outside its mathematical domain.'''


class MissingPressure(ValueError):
    '''T1 requested for a triple without pressure.'''


class QuadratureMismatch(ValueError):
    '''Quadrature rule radius differs from the requested sphere.'''


class TestFieldNotDivergenceFree(ValueError):
    '''Weak-form test field fails the sampled divergence check.'''
    __test__ = False


class DomainExceeded(ValueError):
    '''Scaled or interpolated field evaluated outside its source domain.'''


class NonPositiveValues(ValueError):
    '''A sphere supremum is zero, so no logarithm can be taken.'''


class FieldSpecError(ValueError):
    '''Unparseable field selector.'''


class ConfigError(ValueError):
    '''Invalid RunConfig file or value.'''


class SolverFailure(RuntimeError):
    '''Singular or ill-conditioned linear system.'''


class NotContracting(RuntimeError):
    '''Fixed-point iteration stopped contracting.'''
    def __init__(self, message: str, history=None):
        super().__init__(message)
        self.history = history
