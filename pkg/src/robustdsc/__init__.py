"""Rate-distortion regions for robust two-encoder distributed source coding."""
__version__ = "0.1.0"

from .gaussian_core import (
    ABSENT,
    ClampWarning,
    DerivedConstants,
    GaussianProblem,
    RdPoint,
    TestChannelParams,
    derived_constants,
    distortion_rate_noisy,
    qin_corner_rates,
    rate_noisy,
    test_channel_point,
)

__all__ = [
    "ABSENT",
    "ClampWarning",
    "DerivedConstants",
    "GaussianProblem",
    "RdPoint",
    "TestChannelParams",
    "derived_constants",
    "distortion_rate_noisy",
    "qin_corner_rates",
    "rate_noisy",
    "test_channel_point",
]
