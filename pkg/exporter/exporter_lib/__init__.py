"""Checkpoint-to-DAQT bridge for the quantization toolkit.

The exporter performs no quantization math; it only moves tensors between
checkpoint files and the toolkit's documented DAQT interchange format.
"""


class ExporterError(Exception):
    pass


class LayerNotFound(ExporterError):
    """Layer filter matched nothing in the checkpoint."""


class NonMatrixLayer(ExporterError):
    """A selected layer is not a 2-D tensor."""


class RuntimeFailure(ExporterError):
    """The model could not be rebuilt or run for activation capture."""
