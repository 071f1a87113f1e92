"""Density-aware post-training weight-only quantization toolkit."""

from .baselines import grid_search_range, minmax_range, percentile_range
from .dca import DcaConfig, dca_range, density_center, quantile
from .estimator import DaqQuantizer
from .formats import QuantFormat, build_format, build_int_format, build_nf_format
from .ldra import LdraConfig, OptimizeTrace, finite_diff_sign, group_loss, lr_at, optimize
from .pipeline import (
    LayerReport,
    QuantJob,
    compare,
    generate_tensor,
    improvement,
    perplexity,
    quantize_layer,
    quantize_matrix,
    verify_packed,
)
from .quantizer import (
    DynamicRange,
    GroupLayout,
    QuantizedGroup,
    QuantParams,
    compute_params,
    dequantize_group,
    partition,
    quantize_group,
)
from .tensor_io import (
    PackedQuantizedTensor,
    load_packed,
    load_tensor,
    pack_quantized,
    save_packed,
    save_tensor,
    unpack_quantized,
)

__version__ = "0.1.0"

__all__ = [
    "DaqQuantizer",
    "DcaConfig",
    "DynamicRange",
    "GroupLayout",
    "LayerReport",
    "LdraConfig",
    "OptimizeTrace",
    "PackedQuantizedTensor",
    "QuantFormat",
    "QuantJob",
    "QuantParams",
    "QuantizedGroup",
    "build_format",
    "build_int_format",
    "build_nf_format",
    "compare",
    "compute_params",
    "dca_range",
    "density_center",
    "dequantize_group",
    "finite_diff_sign",
    "generate_tensor",
    "grid_search_range",
    "group_loss",
    "improvement",
    "load_packed",
    "load_tensor",
    "lr_at",
    "minmax_range",
    "optimize",
    "pack_quantized",
    "partition",
    "percentile_range",
    "perplexity",
    "quantile",
    "quantize_group",
    "quantize_layer",
    "quantize_matrix",
    "save_packed",
    "save_tensor",
    "unpack_quantized",
    "verify_packed",
]
