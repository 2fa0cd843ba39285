//! Exact threshold quantities for explicitly represented monotone properties.
//!
//! An upper set `F ⊆ 2^X` over a small ground set is stored by its minimal
//! antichain ([`UpperSet`]). From it the crate computes the critical
//! probability `p_c(F)`, the expectation threshold `q(F)`, the covering
//! dimension and the lattice symmetric polynomials `σ_k`, and then checks the
//! sandwich `q(F) ≤ p_c(F) ≤ K q(F) log ℓ(F)` together with the inequalities
//! relating these quantities.
//!
//! ```
//! use thresholds::{families, bounds::{verify_instance, BoundVariant}};
//!
//! let k3 = families::graph_connectivity(3)?;
//! let report = verify_instance(&k3, &BoundVariant::bell())?;
//! assert!((report.p_c - 0.5).abs() < 1e-9);
//! assert!((report.q - 6f64.powf(-0.5)).abs() < 1e-8);
//! assert!(report.all_hold());
//! # Ok::<(), thresholds::Error>(())
//! ```
//!
//! The guide under `book/` walks through each quantity; its code listings are
//! compiled and run as doc-tests of this crate.

pub mod battery;
pub mod bounds;
pub mod error;
pub mod expectation;
pub mod families;
pub mod format;
pub mod mask;
pub mod measure;
pub mod sequence;
pub mod structure;
pub mod upset;

pub use error::{Error, Result};
pub use mask::SubsetMask;
pub use upset::{normalize_to_antichain, Cover, UpperSet};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/upper-sets.md")]
    mod upper_sets {}
    #[doc = include_str!("../../../book/src/measure.md")]
    mod measure {}
    #[doc = include_str!("../../../book/src/expectation-threshold.md")]
    mod expectation_threshold {}
    #[doc = include_str!("../../../book/src/covering-dimension.md")]
    mod covering_dimension {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/sequences.md")]
    mod sequences {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
