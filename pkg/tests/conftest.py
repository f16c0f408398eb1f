import json
from pathlib import Path

import numpy as np
import pytest

from kleinian.cli import JobConfig, run_master

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"


def load_config(name, **overrides):
    raw = json.loads((CONFIGS / f"{name}.json").read_text())
    raw.update(overrides)
    return JobConfig.from_dict(raw, name=name)


_RUNS = {}


def master(name):
    if name not in _RUNS:
        _RUNS[name] = run_master(load_config(name))
    return _RUNS[name]


@pytest.fixture(scope="session")
def bianchi3():
    return master("bianchi_3")


@pytest.fixture(scope="session")
def bianchi15():
    return master("bianchi_15")


@pytest.fixture(scope="session")
def bianchi23():
    return master("bianchi_23")


@pytest.fixture(scope="session")
def sextic():
    return master("sextic_92779")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def eichler():
    import eichler as mod
    return mod.build()
