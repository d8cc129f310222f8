"""
Pytest configuration and fixtures for smpec tests
"""

import logging
import shutil
import tempfile
from pathlib import Path

import numpy as np
import pytest
import yaml
from click.testing import CliRunner

from smpec.config import SmpecConfig
from smpec.instances.demos import get_demo
from smpec.model.instance import ProblemInstance, validate_instance
from smpec.model.maps import MonotoneMap
from smpec.model.objectives import ConvexObjective
from smpec.model.sets import Box
from smpec.solver.regularization import solve_smpec


def random_affine_instance(seed: int, n: int) -> ProblemInstance:
    """Monotone affine map M = B B^T + K (K skew) on a random box"""
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((n, n))
    K = rng.standard_normal((n, n))
    M = 0.5 * B @ B.T + (K - K.T)
    q = rng.standard_normal(n)
    lower = -rng.uniform(0.5, 2.0, n)
    upper = rng.uniform(0.5, 2.0, n)
    inst = ProblemInstance(
        objective=ConvexObjective.squared_norm(n),
        map=MonotoneMap.affine(M, q),
        set=Box(lower, upper),
        dimension=n,
        name=f"random-{seed}",
    )
    return validate_instance(inst).instance


@pytest.fixture(autouse=True)
def restore_root_logging():
    """CLI invocations reconfigure the root logger"""
    root = logging.getLogger()
    level = root.level
    yield
    for handler in list(root.handlers):
        if type(handler) in (logging.StreamHandler, logging.FileHandler):
            root.removeHandler(handler)
            handler.close()
    root.setLevel(level)


@pytest.fixture
def temp_dir():
    """Create a temporary directory for tests"""
    temp_path = Path(tempfile.mkdtemp())
    yield temp_path
    shutil.rmtree(temp_path)


@pytest.fixture
def cli_runner():
    """Click CLI test runner"""
    return CliRunner()


@pytest.fixture
def smpec_config():
    """Built-in default configuration"""
    return SmpecConfig()


@pytest.fixture
def example_3_1():
    return get_demo("example-3-1").instance()


@pytest.fixture
def example_3_2():
    return get_demo("example-3-2").instance()


@pytest.fixture
def min_norm_lp():
    return get_demo("min-norm-lp").instance()


@pytest.fixture
def distance_estimation():
    return get_demo("distance-estimation").instance()


@pytest.fixture
def basis_pursuit():
    return get_demo("basis-pursuit").instance()


@pytest.fixture(scope="session")
def demo_runs():
    """Solve every demo once with its shipped settings: name -> (instance, trace)"""
    runs = {}
    for name in (
        "example-3-1",
        "example-3-2",
        "min-norm-lp",
        "distance-estimation",
        "basis-pursuit",
    ):
        preset = get_demo(name)
        inst = preset.instance()
        runs[name] = (inst, solve_smpec(inst, preset.solve_config()))
    return runs


@pytest.fixture
def random_instances():
    """Five random monotone affine box instances with n <= 5"""
    return [random_affine_instance(seed, n) for seed, n in zip(range(5), (1, 2, 3, 4, 5))]


@pytest.fixture
def affine_box_document():
    """A well-formed instance file body"""
    return {
        "name": "affine-box",
        "dimension": 2,
        "objective": {"variant": "quadratic-distance", "params": {"anchor": [1.0, 2.0]}},
        "map": {
            "variant": "affine",
            "params": {"M": [[2.0, 1.0], [-1.0, 1.0]], "q": [0.5, -0.5]},
        },
        "set": {"variant": "box", "params": {"lower": [-1.0, -1.0], "upper": [1.0, 1.0]}},
        "known_solution": [0.0, 0.0],
    }


@pytest.fixture
def affine_box_file(temp_dir, affine_box_document):
    path = temp_dir / "affine-box.yaml"
    with open(path, "w") as f:
        yaml.safe_dump(affine_box_document, f, sort_keys=False)
    return path
