//! Circle-method numerics: grid spectra, arcs, complete exponential sums,
//! the major-arc model, the pseudorandomness gauge and restriction norms.

mod arcs;
mod expsum;
mod gauge;
mod model;
mod spectrum;

pub use arcs::{arc_decompose, Arc, ArcClass, ArcParams, DEFAULT_SIGMA, DEFAULT_SIGMA0};
pub use expsum::{exp_sum_factor, exp_sum_sdiamond, exp_sum_sstar, ExpSumValue, FactorReport};
pub use gauge::{lp_norm, pseudorandom_gauge, restriction_norm, GaugeReport, ReportRow, RestrictionReport};
pub use model::{integral_i, major_arc_model, sstar_sum};
pub use spectrum::{default_grid, dft_spectrum, e_frac, evaluate, evaluate_rational, Spectrum};
