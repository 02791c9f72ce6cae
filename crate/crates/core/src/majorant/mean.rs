//! Mean values `g(b, N) = 𝔼_{n ∈ [N]} f_b(n)`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::build::WTrick;
use super::subset::PrimeSubset;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanReport {
    pub w: u64,
    pub k: u64,
    pub n: u64,
    pub subset: String,
    /// `g(b, N)` keyed by `b ∈ Z(W)`.
    pub per_b: BTreeMap<u64, f64>,
    /// `𝔼_{b ∈ Z(W)} g(b, N)`.
    pub aggregate: f64,
    pub intended_density: Option<f64>,
    pub measured_density: f64,
    pub min_prefix_density: f64,
    /// Density used for the margins: the intended one, else the prefix minimum.
    pub delta: f64,
    /// `kδ - (k - 1)`.
    pub lower_margin: f64,
    pub epsilon: f64,
    /// `(1 - ε)δ`.
    pub density_floor: f64,
}

impl MeanReport {
    /// `f(b) = max(0, (g(b, N) - ε/2) / (1 + ε))`, the weights handed to the
    /// local decomposition.
    pub fn thinned_weights(&self) -> BTreeMap<u64, f64> {
        let eps = self.epsilon;
        self.per_b
            .iter()
            .map(|(&b, &g)| (b, ((g - eps / 2.0) / (1.0 + eps)).max(0.0)))
            .collect()
    }
}

/// Computes `g(b, N)` for every `b ∈ Z(W)` from the built `f_b`.
pub fn mean_g(trick: &WTrick, n: u64, subset: &PrimeSubset, epsilon: f64) -> Result<MeanReport> {
    let per_b: Vec<(u64, f64)> = trick
        .residues()
        .par_iter()
        .map(|&b| Ok((b, trick.f::<f64>(b, n, subset)?.mean())))
        .collect::<Result<_>>()?;
    let aggregate = per_b.iter().map(|(_, g)| g).sum::<f64>() / per_b.len() as f64;
    let intended = subset.spec().intended_density();
    let delta = intended.unwrap_or(subset.min_prefix_density());
    let k = trick.k() as f64;
    Ok(MeanReport {
        w: trick.w(),
        k: trick.k(),
        n,
        subset: subset.spec().label(),
        per_b: per_b.into_iter().collect(),
        aggregate,
        intended_density: intended,
        measured_density: subset.measured_density(),
        min_prefix_density: subset.min_prefix_density(),
        delta,
        lower_margin: k * delta - (k - 1.0),
        epsilon,
        density_floor: (1.0 - epsilon) * delta,
    })
}
