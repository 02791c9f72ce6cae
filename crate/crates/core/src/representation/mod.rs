//! Representation counts, coverage probes and the transference gauge.

mod count;
mod coverage;
mod thresholds;
mod transfer;

pub use count::{
    count_representations, fft_distribution, prime_powers, reachable, CountMethod, RepresentationCounts,
    BRUTE_MAX_N, FFT_EXACT_LIMIT, FFT_MAX_GRID,
};
pub use coverage::{admissible_filter, coverage_probe, CoverageReport};
pub use thresholds::{theorem_thresholds, Thresholds};
pub use transfer::{
    indicator_convolution, normalized_convolution, transference_gauge, ConvolutionProfile, DEFAULT_EPSILON,
    MAX_DIGITS_LOST,
};
