import sys
from pathlib import Path

import numpy as np
import pytest

# Ensure src is on path so the package is importable from a plain checkout.
sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))


@pytest.fixture
def rng():
    """Fixed-seed generator; tests that need independence draw their own."""
    return np.random.default_rng(12345)


@pytest.fixture
def singlet():
    from superdense_pingpong.qstate import bell_state
    return bell_state('psi_minus')


@pytest.fixture
def session_config():
    """Factory for SessionConfig with test-friendly defaults."""
    from superdense_pingpong.protocol.session import SessionConfig

    def make(**overrides):
        params = {'rng_seed': 7, 'auth_key': b'test key'}
        params.update(overrides)
        return SessionConfig(**params)
    return make


@pytest.fixture
def tmp_scenario(tmp_path):
    """Write a small scenario YAML and return its path."""
    content = """name: small
seed: 42
n_runs: 400
message_source: random
session:
  control_probability: 0.5
  abort_on_detection: false
  auth_key: scenario key
  auth_tag_bits: 32
attack:
  name: intercept_resend
  params:
    basis: Z
output:
  format: csv
"""
    path = tmp_path / "small.yml"
    path.write_text(content)
    return path


@pytest.fixture
def tmp_sweep_scenario(tmp_path):
    content = """name: mini_sweep
seed: 9
n_runs: 300
session:
  control_probability: 0.5
  abort_on_detection: false
attack:
  name: bell_diagonal
  params:
    gamma: 0.0
sweep:
  parameter: attack.params.gamma
  values: [0.0, 0.75]
output:
  format: csv
  write_runs: false
"""
    path = tmp_path / "mini_sweep.yml"
    path.write_text(content)
    return path


@pytest.fixture
def runner():
    from click.testing import CliRunner
    return CliRunner()
