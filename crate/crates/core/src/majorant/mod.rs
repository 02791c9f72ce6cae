//! W-tricked weighted sequences over subsets of the primes and their means.

mod build;
mod mean;
mod sequence;
mod subset;

pub use build::{log_scale, y_bound, MuMajorant, WTrick};
pub use mean::{mean_g, MeanReport};
pub use sequence::{SequenceKind, SequenceMeta, WeightedSequence};
pub use subset::{PrimeFilter, PrimeSubset, SubsetSpec};
