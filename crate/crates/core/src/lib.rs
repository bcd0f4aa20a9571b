//! Bounds, exact oracles and Monte Carlo experiments for the
//! `(k, ℓ)`-rainbow index of complete graphs.
//!
//! * [`colorings`]: edge-colorings of `K_n`, seeded generation, enumeration, file format.
//! * [`trees`]: rainbow S-trees, the exact packing oracle, coloring verification.
//! * [`bounds`]: the closed-form and root-solved thresholds.
//! * [`montecarlo`]: empirical estimates against exact tails and analytic bounds.
//! * [`search`]: constructive search for certified colorings.

pub mod bounds;
pub mod colorings;
pub mod error;
pub mod montecarlo;
pub mod search;
pub mod trees;

pub use error::{Error, Result};
