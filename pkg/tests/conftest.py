import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from daq import QuantJob, generate_tensor, save_tensor  # noqa: E402

DATA_DIR = Path(__file__).parent / "data"

# Shared synthetic-layer fixture: 256x512 standard-normal weights with 1% of
# entries scaled x10, calibration 512x64 standard normal.
LAYER_SEED = 20240601
CALIB_SEED = 20240602


@pytest.fixture(scope="session")
def layer_fixture():
    weights = generate_tensor(256, 512, outlier_frac=0.01, outlier_scale=10.0,
                              seed=LAYER_SEED)
    calib = generate_tensor(512, 64, seed=CALIB_SEED)
    return weights, calib


@pytest.fixture(scope="session")
def layer_fixture_files(layer_fixture, tmp_path_factory):
    weights, calib = layer_fixture
    d = tmp_path_factory.mktemp("layer")
    wpath = str(d / "w.daqt")
    xpath = str(d / "x.daqt")
    save_tensor(weights, wpath)
    save_tensor(calib, xpath)
    return wpath, xpath


def make_job(wpath, xpath, method, **kw):
    return QuantJob(weights_path=wpath, calib_path=xpath, method=method, **kw)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
