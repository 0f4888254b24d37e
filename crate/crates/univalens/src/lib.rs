//! Symbolic-numeric analysis of meromorphic vector fields on complex
//! surfaces and curves.
//!
//! The exact layer works over the Gaussian rationals: blow-up reduction of
//! singularities, classification of reduced local models with their
//! order/ramification/Camacho-Sad data, and affine-structure calculus on
//! curves. The numeric layer continues solutions of the associated complex
//! ODEs along paths, counts determinations, and computes Riccati monodromy
//! representations in PSL(2, C) together with their common fixed points.

pub mod affine;
pub mod algebra;
pub mod continuation;
pub mod corpus;
pub mod jets;
pub mod localmodels;
pub mod reduction;
pub mod report;
pub mod riccati;

pub use algebra::{BiPoly, GaussRat, RationalFn1, RationalFn2, RationalVF2};

/// Worker-count cap for parallel sections, from UNIVALENS_THREADS when set.
pub fn worker_count() -> usize {
    std::env::var("UNIVALENS_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}
