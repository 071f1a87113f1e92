"""Export manifest: which layers went to which DAQT files."""

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from .daqt import read_daqt


@dataclass
class ExportManifest:
    model: str
    layers: dict = field(default_factory=dict)  # layer name -> DAQT path
    calibration_source: Optional[str] = None
    sample_count: Optional[int] = None
    seed: Optional[int] = None

    def validate(self) -> None:
        for name, path in self.layers.items():
            if not Path(path).exists():
                raise FileNotFoundError(f"manifest entry {name}: missing {path}")
            read_daqt(path)  # must parse

    def save(self, path: str) -> None:
        self.validate()
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")


def load_manifest(path: str) -> ExportManifest:
    with open(path) as fh:
        blob = json.load(fh)
    m = ExportManifest(**blob)
    m.validate()
    return m


def layer_filename(layer: str, suffix: str = "") -> str:
    return layer.replace(".", "__") + suffix + ".daqt"
