"""Weight extraction and activation capture."""

import fnmatch
from pathlib import Path

import torch

from . import LayerNotFound, NonMatrixLayer, RuntimeFailure
from .daqt import write_daqt
from .manifest import ExportManifest, layer_filename
from .toymodel import load_checkpoint, rebuild_toy_model, tokenize


def export_weights(checkpoint: str, layer_filter: str, out_dir: str) -> ExportManifest:
    """One DAQT file per selected 2-D layer, values widened to float32."""
    _, state_dict = load_checkpoint(checkpoint)
    selected = [k for k in state_dict if fnmatch.fnmatch(k, layer_filter)]
    if not selected:
        raise LayerNotFound(f"filter {layer_filter!r} matched no layers")

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = ExportManifest(model=str(checkpoint))
    for name in selected:
        tensor = state_dict[name]
        if tensor.dim() != 2:
            raise NonMatrixLayer(f"{name} has shape {tuple(tensor.shape)}")
        path = out / layer_filename(name)
        write_daqt(tensor.to(torch.float32).numpy(), str(path))
        manifest.layers[name] = str(path)
    manifest.save(str(out / "manifest.json"))
    return manifest


def capture_activations(
    checkpoint: str, samples: list[str], layer_filter: str, out_dir: str
) -> ExportManifest:
    """Per-layer input activations, feature-major: X is (in_features, samples).

    Every text sample is byte-tokenized, mean-pooled, and run through the
    model once; each matching linear layer records its input vector, so
    columns line up with sample order and X rows line up with the layer's
    weight columns.
    """
    config, state_dict = load_checkpoint(checkpoint)
    if config is None:
        raise RuntimeFailure(
            f"{checkpoint} is a bare state dict; activation capture needs a "
            f"runnable toy container"
        )
    try:
        model = rebuild_toy_model(config, state_dict)
    except Exception as e:
        raise RuntimeFailure(f"cannot rebuild model: {e}") from e

    targets = {
        name: module
        for name, module in model.named_modules()
        if isinstance(module, torch.nn.Linear)
        and (fnmatch.fnmatch(name, layer_filter)
             or fnmatch.fnmatch(name + ".weight", layer_filter))
    }
    if not targets:
        raise LayerNotFound(f"filter {layer_filter!r} matched no linear layers")

    captured = {name: [] for name in targets}
    hooks = []

    def grab(name):
        def hook(module, inputs, output):
            captured[name].append(inputs[0].detach().to(torch.float32).reshape(-1))
        return hook

    for name, module in targets.items():
        hooks.append(module.register_forward_hook(grab(name)))
    try:
        with torch.no_grad():
            for text in samples:
                model(tokenize(text))
    finally:
        for h in hooks:
            h.remove()

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = ExportManifest(
        model=str(checkpoint),
        calibration_source="byte-tokenized text samples, mean-pooled",
        sample_count=len(samples),
    )
    for name, columns in captured.items():
        x = torch.stack(columns, dim=1).numpy()  # (in_features, n_samples)
        path = out / layer_filename(name, suffix="__acts")
        write_daqt(x, str(path))
        manifest.layers[name] = str(path)
    manifest.save(str(out / "acts_manifest.json"))
    return manifest
