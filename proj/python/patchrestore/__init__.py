"""Patch-based image restoration with learned patch priors."""

from ._patchrestore import (
    DimensionError,
    Error,
    FormatError,
    IndefiniteOperator,
    IoError,
    NonConvergence,
    Operator,
    ParameterError,
    PatchDataset,
    PatchIndexError,
    __version__,
    c_bound_denoising,
    c_bound_downsampling,
    c_bound_inpainting,
    correlation_map,
    dct_features,
    estimate_q,
    initial_estimate,
    krr_lambda,
    load_image,
    load_kernel,
    nw_weights,
    psnr,
    restore_hqs,
    restore_mse,
    run_config,
    sample_patches,
    save_image,
)

__all__ = [
    "DimensionError",
    "Error",
    "FormatError",
    "IndefiniteOperator",
    "IoError",
    "NonConvergence",
    "Operator",
    "ParameterError",
    "PatchDataset",
    "PatchIndexError",
    "__version__",
    "c_bound_denoising",
    "c_bound_downsampling",
    "c_bound_inpainting",
    "correlation_map",
    "dct_features",
    "estimate_q",
    "initial_estimate",
    "krr_lambda",
    "load_image",
    "load_kernel",
    "nw_weights",
    "psnr",
    "restore_hqs",
    "restore_mse",
    "run_config",
    "sample_patches",
    "save_image",
]
