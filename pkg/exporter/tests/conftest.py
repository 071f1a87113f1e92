import shutil
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from exporter_lib.toymodel import make_toy_checkpoint  # noqa: E402


def daq_command() -> list[str]:
    exe = shutil.which("daq")
    if exe:
        return [exe]
    return [sys.executable, "-m", "daq.cli"]


@pytest.fixture(scope="session")
def toy_checkpoint(tmp_path_factory):
    path = str(tmp_path_factory.mktemp("ckpt") / "toy.pt")
    config = make_toy_checkpoint(path, seed=42, dim=16, hidden=32, depth=2,
                                 dtype="float16")
    return path, config
