"""Scenario files: loading, validation and resolved snapshots.

A scenario is a YAML document with a few top-level scalars and four sections::

    name: intercept_resend
    seed: 20240611
    n_runs: 100000
    message_source: random
    session:
      control_probability: 0.5
      abort_on_detection: false
    attack:
      name: intercept_resend
      params: {basis: Z}
    sweep:                        # optional
      parameter: attack.params.gamma
      values: [0.0, 0.25, 0.5, 0.75]
    output:
      format: csv

``run`` and ``sweep`` accept either a path or the name of a bundled scenario
(``superdense_pingpong/scenarios/<name>.yml``). Validation is pure: it either
returns a Scenario or raises ConfigError with one of its code constants.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field, fields
from importlib import resources
import io
import logging
from pathlib import Path
from typing import Any, Mapping, Optional, Union

import numpy as np
from ruamel.yaml import YAML
from ruamel.yaml.error import YAMLError

from ..adversary.registry import build_attack
from ..adversary.strategies import AttackStrategy
from ..errors import ConfigError, DomainError
from ..protocol.messages import MessageSource, message_source_from_spec
from ..protocol.session import SessionConfig
from .reports import write_text_atomic
from .seeding import MESSAGES, check_seed, derive_rng

logger = logging.getLogger(__name__)

BUNDLED_PACKAGE = 'superdense_pingpong.scenarios'
SCENARIO_SUFFIX = '.yml'

FORMATS = ('csv', 'json')
TOP_LEVEL_KEYS = ('name', 'seed', 'n_runs', 'message_source', 'session', 'attack', 'sweep', 'output')
SESSION_KEYS = tuple(f.name for f in fields(SessionConfig) if f.name != 'rng_seed')
SWEEP_ROOTS = ('session.', 'attack.params.')
DEFAULT_SEED = 0
GRID_DECIMALS = 12


def read_yaml(path: Path) -> tuple[Optional[dict], Optional[str]]:
    """Read a YAML file. Returns (data, error_message). Either may be None."""
    yaml = YAML(typ='safe')
    try:
        with open(path, 'r') as f:
            return yaml.load(f) or {}, None
    except (OSError, YAMLError) as e:
        return None, f"{type(e).__name__}: {e}"


def write_yaml_atomic(dest_path: Path, data: dict) -> None:
    """Write YAML via tempfile + os.replace so dest is never partially written."""
    yaml = YAML()
    yaml.default_flow_style = False
    buf = io.StringIO()
    yaml.dump(data, buf)
    write_text_atomic(dest_path, buf.getvalue())


@dataclass(frozen=True)
class Sweep:
    parameter: str
    values: tuple


@dataclass(frozen=True)
class OutputSpec:
    format: str = 'csv'
    prefix: Optional[str] = None
    write_runs: bool = True


@dataclass(frozen=True)
class Scenario:
    name: str
    session: SessionConfig
    attack_name: str
    attack_params: Mapping[str, Any]
    n_runs: int
    message_source: str = 'random'
    sweep: Optional[Sweep] = None
    output: OutputSpec = field(default_factory=OutputSpec)
    raw: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @property
    def seed(self) -> int:
        return self.session.rng_seed

    @property
    def prefix(self) -> str:
        return self.output.prefix or self.name

    def build_attack(self) -> AttackStrategy:
        return build_attack(self.attack_name, self.attack_params)

    def make_message_source(self, stream: int = 0) -> MessageSource:
        return message_source_from_spec(self.message_source, derive_rng(self.seed, stream, MESSAGES))

    def at_sweep_point(self, value: Any) -> 'Scenario':
        """The same scenario with the swept parameter pinned to ``value``."""
        if self.sweep is None:
            raise ConfigError(ConfigError.BAD_SWEEP, f"scenario {self.name!r} has no sweep section")
        data = copy.deepcopy(self.raw)
        data.pop('sweep', None)
        set_dotted(data, self.sweep.parameter, value)
        return scenario_from_dict(data, self.name)

    def with_overrides(self, seed: Optional[int] = None, n_runs: Optional[int] = None,
                       fmt: Optional[str] = None) -> 'Scenario':
        """Apply command-line overrides and re-validate."""
        data = copy.deepcopy(self.raw)
        if seed is not None:
            data['seed'] = seed
        if n_runs is not None:
            data['n_runs'] = n_runs
        if fmt is not None:
            data.setdefault('output', {})['format'] = fmt
        return scenario_from_dict(data, self.name)

    def snapshot(self) -> dict:
        """Fully resolved config, suitable for writing next to the reports."""
        data = copy.deepcopy(self.raw)
        data['name'] = self.name
        data['seed'] = self.seed
        data['n_runs'] = self.n_runs
        data['message_source'] = self.message_source
        session = {k: getattr(self.session, k) for k in SESSION_KEYS}
        session['auth_key'] = self.session.auth_key.decode('utf-8', errors='replace')
        data['session'] = session
        data['attack'] = {'name': self.attack_name, 'params': copy.deepcopy(dict(self.attack_params))}
        data['output'] = {'format': self.output.format, 'prefix': self.prefix,
                          'write_runs': self.output.write_runs}
        return data


def set_dotted(data: dict, path: str, value: Any) -> None:
    """Assign ``value`` at a dotted path such as ``attack.params.gamma``."""
    keys = path.split('.')
    node = data
    for key in keys[:-1]:
        child = node.get(key)
        if child is None:
            child = node[key] = {}
        if not isinstance(child, dict):
            raise ConfigError(ConfigError.BAD_SWEEP, f"{path!r}: {key!r} is not a section")
        node = child
    node[keys[-1]] = value


def _section(data: dict, key: str) -> dict:
    value = data.get(key)
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(ConfigError.MALFORMED, f"section {key!r} must be a mapping, got {type(value).__name__}")
    return value


def _session_config(section: dict, seed: int) -> SessionConfig:
    unknown = sorted(set(section) - set(SESSION_KEYS))
    if unknown:
        raise ConfigError(ConfigError.MALFORMED, f"unknown session keys: {', '.join(unknown)}")
    kwargs = dict(section)
    if 'auth_key' in kwargs:
        kwargs['auth_key'] = str(kwargs['auth_key']).encode('utf-8')
    if not isinstance(kwargs.get('abort_on_detection', True), bool):
        raise ConfigError(ConfigError.MALFORMED, "session.abort_on_detection must be true or false")
    try:
        for key in ('control_probability', 'max_loss_rate'):
            if key in kwargs:
                kwargs[key] = float(kwargs[key])
        if 'auth_tag_bits' in kwargs:
            kwargs['auth_tag_bits'] = int(kwargs['auth_tag_bits'])
        return SessionConfig(rng_seed=seed, **kwargs)
    except (TypeError, ValueError) as e:
        raise ConfigError(ConfigError.MALFORMED, f"session: {e}") from e
    except DomainError as e:
        raise ConfigError(ConfigError.OUT_OF_DOMAIN, f"session: {e}") from e


def _grid_values(section: dict) -> tuple:
    if 'values' in section:
        values = section['values']
        if not isinstance(values, list) or not values:
            raise ConfigError(ConfigError.BAD_SWEEP, "sweep.values must be a non-empty list")
        return tuple(values)
    grid = section.get('grid')
    if not isinstance(grid, dict):
        raise ConfigError(ConfigError.BAD_SWEEP, "sweep needs either 'values' or 'grid: {start, stop, num}'")
    try:
        num = int(grid['num'])
        if num < 1:
            raise ValueError(f"num must be at least 1, got {num}")
        points = np.linspace(float(grid['start']), float(grid['stop']), num)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(ConfigError.BAD_SWEEP, f"sweep.grid: {e}") from e
    return tuple(round(float(v), GRID_DECIMALS) for v in points)


def _sweep(section: dict) -> Optional[Sweep]:
    if not section:
        return None
    parameter = section.get('parameter')
    if not isinstance(parameter, str) or not parameter.startswith(SWEEP_ROOTS):
        raise ConfigError(ConfigError.BAD_SWEEP,
                          f"sweep.parameter must start with one of {SWEEP_ROOTS}, got {parameter!r}")
    return Sweep(parameter=parameter, values=_grid_values(section))


def _output(section: dict) -> OutputSpec:
    fmt = str(section.get('format', 'csv')).lower()
    if fmt not in FORMATS:
        raise ConfigError(ConfigError.MALFORMED, f"output.format must be one of {FORMATS}, got {fmt!r}")
    write_runs = section.get('write_runs', True)
    if not isinstance(write_runs, bool):
        raise ConfigError(ConfigError.MALFORMED, "output.write_runs must be true or false")
    prefix = section.get('prefix')
    return OutputSpec(format=fmt, prefix=str(prefix) if prefix else None, write_runs=write_runs)


def scenario_from_dict(data: Any, default_name: str = 'scenario') -> Scenario:
    """Validate a parsed scenario document."""
    if not isinstance(data, dict):
        raise ConfigError(ConfigError.MALFORMED, "scenario must be a mapping at the top level")
    unknown = sorted(set(data) - set(TOP_LEVEL_KEYS))
    if unknown:
        raise ConfigError(ConfigError.MALFORMED, f"unknown top-level keys: {', '.join(unknown)}")

    try:
        seed = check_seed(data.get('seed', DEFAULT_SEED))
        n_runs = int(data.get('n_runs', 1000))
    except (TypeError, ValueError) as e:
        raise ConfigError(ConfigError.OUT_OF_DOMAIN, str(e)) from e
    if n_runs < 1:
        raise ConfigError(ConfigError.OUT_OF_DOMAIN, f"n_runs must be at least 1, got {n_runs}")

    session = _session_config(_section(data, 'session'), seed)

    attack_section = _section(data, 'attack')
    attack_name = str(attack_section.get('name', 'none'))
    attack_params = attack_section.get('params') or {}
    if not isinstance(attack_params, dict):
        raise ConfigError(ConfigError.MALFORMED, "attack.params must be a mapping")
    build_attack(attack_name, attack_params)

    message_source = str(data.get('message_source', 'random'))
    try:
        message_source_from_spec(message_source, derive_rng(seed, 0, MESSAGES))
    except ValueError as e:
        raise ConfigError(ConfigError.OUT_OF_DOMAIN, f"message_source: {e}") from e

    scenario = Scenario(
        name=str(data.get('name') or default_name),
        session=session,
        attack_name=attack_name,
        attack_params=attack_params,
        n_runs=n_runs,
        message_source=message_source,
        sweep=_sweep(_section(data, 'sweep')),
        output=_output(_section(data, 'output')),
        raw=copy.deepcopy(data),
    )
    if scenario.sweep is not None:
        for value in scenario.sweep.values:
            try:
                scenario.at_sweep_point(value)
            except ConfigError as e:
                raise ConfigError(ConfigError.BAD_SWEEP,
                                  f"{scenario.sweep.parameter}={value!r}: {e.message}") from e
    return scenario


def bundled_scenarios() -> list:
    """Names of the scenarios shipped with the package, sorted."""
    root = resources.files(BUNDLED_PACKAGE)
    return sorted(
        entry.name[:-len(SCENARIO_SUFFIX)]
        for entry in root.iterdir()
        if entry.name.endswith(SCENARIO_SUFFIX)
    )


def resolve_scenario(source: Union[str, Path]) -> tuple:
    """``(path-like, default name)`` for a file path or a bundled scenario name."""
    path = Path(source)
    if path.is_file():
        return path, path.stem
    name = str(source)
    if name in bundled_scenarios():
        return resources.files(BUNDLED_PACKAGE) / f"{name}{SCENARIO_SUFFIX}", name
    raise ConfigError(ConfigError.MISSING_FILE,
                      f"no scenario file or bundled scenario named {str(source)!r}")


def load_scenario(source: Union[str, Path]) -> Scenario:
    path, default_name = resolve_scenario(source)
    with resources.as_file(path) as real_path:
        data, error = read_yaml(real_path)
    if error is not None:
        raise ConfigError(ConfigError.MALFORMED, f"{source}: {error}")
    scenario = scenario_from_dict(data, default_name)
    logger.debug(f"Loaded scenario {scenario.name!r} from {source}")
    return scenario
