//! Major and minor arcs.

use serde::{Deserialize, Serialize};

use crate::arith::intmath::gcd;
use crate::arith::{rational_approx, torus_distance, Convergents};
use crate::error::{Error, Result};
use crate::majorant::log_scale;

pub const DEFAULT_SIGMA: f64 = 4.0;
pub const DEFAULT_SIGMA0: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcParams {
    pub sigma: f64,
    pub sigma0: f64,
    /// `ln(WN + W) / k`.
    pub l: f64,
    /// `L^σ`.
    pub p: f64,
    /// `WN / L^σ`.
    pub q: f64,
}

impl ArcParams {
    pub fn new(w: u64, k: u64, n: u64, sigma: f64, sigma0: f64) -> Result<Self> {
        if w == 0 || k == 0 || n == 0 {
            return Err(Error::invalid("arcs", "W, k and N must be positive"));
        }
        if !(sigma > 0.0 && sigma0 > 0.0) {
            return Err(Error::invalid("sigma", "arc exponents must be positive"));
        }
        let l = log_scale(w, k, n);
        let p = l.powf(sigma);
        let q = w as f64 * n as f64 / p;
        if p >= q {
            return Err(Error::invalid(
                "sigma",
                format!("degenerate arcs: P = {p:.4} is not below Q = {q:.4} (sigma = {sigma}, W·N = {})", w as f64 * n as f64),
            ));
        }
        Ok(ArcParams { sigma, sigma0, l, p, q })
    }

    pub fn with_defaults(w: u64, k: u64, n: u64) -> Result<Self> {
        Self::new(w, k, n, DEFAULT_SIGMA, DEFAULT_SIGMA0)
    }

    /// Major-arc halfwidth `1/Q`.
    pub fn halfwidth(&self) -> f64 {
        1.0 / self.q
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArcClass {
    Major,
    Minor,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub q: u64,
    pub a: u64,
    pub center: f64,
    pub halfwidth: f64,
    /// `‖α - a/q‖`.
    pub distance: f64,
    pub class: ArcClass,
}

/// Classifies `α ∈ [0, 1)`.
///
/// Major witnesses are the smallest `q <= P` with `‖α - a/q‖ <= 1/Q`. When
/// `Q >= 2P²` any such fraction is a convergent of `α`, so the convergents
/// are scanned; otherwise every `q <= P` is tried. A minor `α` gets the
/// Dirichlet witness with `q <= Q`.
pub fn arc_decompose(params: &ArcParams, alpha: f64) -> Arc {
    let alpha = alpha.rem_euclid(1.0);
    let pmax = params.p.floor() as u64;
    let width = params.halfwidth();
    let make = |a: u64, q: u64, class| Arc {
        q,
        a,
        center: a as f64 / q as f64,
        halfwidth: width,
        distance: torus_distance(alpha, a, q),
        class,
    };
    let major = if params.q >= 2.0 * params.p * params.p {
        Convergents::new(alpha)
            .take_while(|&(_, q)| q <= pmax as u128)
            .map(|(a, q)| (a as u64 % q as u64, q as u64))
            .find(|&(a, q)| torus_distance(alpha, a, q) <= width)
    } else {
        (1..=pmax).find_map(|q| {
            let a = (alpha * q as f64).round() as u64 % q;
            (gcd(a, q) == 1 && torus_distance(alpha, a, q) <= width).then_some((a, q))
        })
    };
    if let Some((a, q)) = major {
        return make(a, q, ArcClass::Major);
    }
    let (a, q) = rational_approx(alpha, params.q.floor().max(1.0) as u64);
    make(a % q, q, ArcClass::Minor)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: f64, q: f64) -> ArcParams {
        ArcParams { sigma: 1.0, sigma0: 1.0, l: p, p, q }
    }

    #[test]
    fn simple_fractions_are_major() {
        let arc = arc_decompose(&params(10.0, 1e6), 0.5);
        assert_eq!((arc.class, arc.q, arc.a), (ArcClass::Major, 2, 1));
        let arc = arc_decompose(&params(10.0, 1e6), 1.0 / 3.0);
        assert_eq!((arc.class, arc.q, arc.a), (ArcClass::Major, 3, 1));
        let arc = arc_decompose(&params(10.0, 1e6), 0.0);
        assert_eq!((arc.class, arc.q, arc.a), (ArcClass::Major, 1, 0));
    }

    #[test]
    fn golden_ratio_is_minor() {
        let alpha = (5f64.sqrt() - 1.0) / 2.0;
        let arc = arc_decompose(&params(4.0, 1e6), alpha);
        assert_eq!(arc.class, ArcClass::Minor);
        assert!(arc.distance <= 1.0 / (arc.q as f64 * 1e6));
    }

    #[test]
    fn degenerate_params_rejected() {
        assert!(ArcParams::with_defaults(16, 2, 4096).is_err());
        assert!(ArcParams::new(16, 2, 1 << 17, 2.0, 2.0).is_ok());
    }
}
