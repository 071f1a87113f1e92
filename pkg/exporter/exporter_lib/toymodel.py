"""Tiny byte-level model used for desk-scale export and capture tests.

Text is tokenized as UTF-8 bytes, embedded, mean-pooled into a single
feature vector, and pushed through a small linear stack, so every sample
contributes exactly one input-activation column per linear layer.
"""

from collections import OrderedDict

import torch
import torch.nn as nn

TOY_FORMAT = "daq-toy-v1"


class ToyMLP(nn.Module):
    def __init__(self, vocab: int = 256, dim: int = 16, hidden: int = 32,
                 depth: int = 2):
        super().__init__()
        self.embed = nn.Embedding(vocab, dim)
        layers = []
        width_in = dim
        for _ in range(depth):
            layers += [nn.Linear(width_in, hidden), nn.ReLU()]
            width_in = hidden
        self.net = nn.Sequential(*layers)

    def forward(self, tokens: torch.Tensor) -> torch.Tensor:
        pooled = self.embed(tokens).mean(dim=0)
        return self.net(pooled)


def tokenize(text: str) -> torch.Tensor:
    data = text.encode("utf-8") or b"\x00"
    return torch.tensor(list(data), dtype=torch.long)


def save_toy_checkpoint(model: ToyMLP, config: dict, path: str) -> None:
    torch.save(
        {"format": TOY_FORMAT, "config": config, "state_dict": model.state_dict()},
        path,
    )


def make_toy_checkpoint(path: str, seed: int = 0, dim: int = 16,
                        hidden: int = 32, depth: int = 2,
                        dtype: str = "float16") -> dict:
    torch.manual_seed(seed)
    config = {"vocab": 256, "dim": dim, "hidden": hidden, "depth": depth}
    model = ToyMLP(**config)
    model = model.to(getattr(torch, dtype))
    save_toy_checkpoint(model, config, path)
    return config


def load_checkpoint(path: str):
    """Returns (config | None, state_dict). Accepts toy containers and raw
    state dicts."""
    blob = torch.load(path, map_location="cpu", weights_only=True)
    if isinstance(blob, dict) and blob.get("format") == TOY_FORMAT:
        return blob["config"], OrderedDict(blob["state_dict"])
    if isinstance(blob, dict) and all(torch.is_tensor(v) for v in blob.values()):
        return None, OrderedDict(blob)
    raise ValueError(f"{path}: unrecognized checkpoint container")


def rebuild_toy_model(config: dict, state_dict) -> ToyMLP:
    model = ToyMLP(**config)
    model.load_state_dict({k: v.to(torch.float32) for k, v in state_dict.items()})
    model.eval()
    return model
