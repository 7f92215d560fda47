"""Photon statistics of frequency-filtered Fock-state spontaneous emission and filtered thermal light."""
from .rates import UNFILTERED, BundleSpec, RateSet, ThermalParams
from .exact import ExpPolynomial, DivergentIntegralError, harmonic, hyp2f1_terminating, multinomial, compositions
from .distributions import (
    CountingDistribution,
    counting_probability,
    counting_via_mandel_series,
    detect_probability,
    detected_fraction,
    efficiency,
    efficiency_filtered,
    efficiency_unfiltered,
    filter_response,
    fock_correlator,
    g_pair,
    joint_first_last,
    joint_pdf,
    marginal_broken,
    marginal_full,
)
from .moments import (
    MomentResult,
    Pipeline,
    bundle_length_stats,
    cross_moment_first_last,
    length_asymptotes,
    mean_time,
    mean_time_broken,
    mean_time_exact,
    mean_time_sum,
    peak_average_weighted,
    pearson,
    reflective,
    second_moment,
    std_dev,
    std_dev_coefficients,
    unfiltered_cross,
    unfiltered_mean,
    unfiltered_second,
    unfiltered_std,
)
from .wtd import mean_wtd_biphoton, thermal_peak_average, thermal_peak_average_narrow, wtd_biphoton, wtd_thermal
from .thermal import (
    filtered_intensity,
    filtered_temperature,
    g2_thermal_filtered,
    spectrum_thermal,
    spectrum_thermal_filtered,
    thermal_number_distribution,
)
from .montecarlo import RngSpec, TrajectoryRecord, estimate, inverse_cdf_single, sample_bundle, sample_bundles, sample_cwse_stream

__all__ = [
    "UNFILTERED",
    "BundleSpec",
    "RateSet",
    "ThermalParams",
    "ExpPolynomial",
    "DivergentIntegralError",
    "harmonic",
    "hyp2f1_terminating",
    "multinomial",
    "compositions",
    "CountingDistribution",
    "counting_probability",
    "counting_via_mandel_series",
    "detect_probability",
    "detected_fraction",
    "efficiency",
    "efficiency_filtered",
    "efficiency_unfiltered",
    "filter_response",
    "fock_correlator",
    "g_pair",
    "joint_first_last",
    "joint_pdf",
    "marginal_broken",
    "marginal_full",
    "MomentResult",
    "Pipeline",
    "bundle_length_stats",
    "cross_moment_first_last",
    "length_asymptotes",
    "mean_time",
    "mean_time_broken",
    "mean_time_exact",
    "mean_time_sum",
    "peak_average_weighted",
    "pearson",
    "reflective",
    "second_moment",
    "std_dev",
    "std_dev_coefficients",
    "unfiltered_cross",
    "unfiltered_mean",
    "unfiltered_second",
    "unfiltered_std",
    "mean_wtd_biphoton",
    "thermal_peak_average",
    "thermal_peak_average_narrow",
    "wtd_biphoton",
    "wtd_thermal",
    "filtered_intensity",
    "filtered_temperature",
    "g2_thermal_filtered",
    "spectrum_thermal",
    "spectrum_thermal_filtered",
    "thermal_number_distribution",
    "RngSpec",
    "TrajectoryRecord",
    "estimate",
    "inverse_cdf_single",
    "sample_bundle",
    "sample_bundles",
    "sample_cwse_stream",
]

__version__ = "0.1.0"
