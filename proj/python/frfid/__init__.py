"""FRF identification of slow-sampled systems beyond the output Nyquist."""

from ._frfid import (
    FrequencyGrid,
    LpmConfig,
    TransferFunction,
    downsample,
    estimate_frf_lpm,
    estimate_sparse,
    etfe_baseline,
    full_spectrum_bins,
    identify,
    multisine,
    resonant_plant,
    sparse_multisine_bins,
)

__all__ = [
    "FrequencyGrid",
    "LpmConfig",
    "TransferFunction",
    "downsample",
    "estimate_frf_lpm",
    "estimate_sparse",
    "etfe_baseline",
    "full_spectrum_bins",
    "identify",
    "multisine",
    "resonant_plant",
    "sparse_multisine_bins",
]
