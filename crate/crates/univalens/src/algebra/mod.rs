//! Exact arithmetic layer: Gaussian rationals, polynomials, rational
//! functions and planar vector fields, with divisor/order computations.

pub mod bipoly;
pub mod gaussrat;
pub mod parse;
pub mod rational;
pub mod solve;
pub mod unipoly;
pub mod vf;

pub use bipoly::{AlgebraError, BiPoly, Var};
pub use gaussrat::GaussRat;
pub use parse::{parse_poly, parse_rational, parse_rational1, parse_vf};
pub use rational::{RationalFn1, RationalFn2};
pub use unipoly::UniPoly;
pub use vf::{
    eigen_ratio_class, eigenvalues_exact, eigenvector, DivisorComponent, EigenRatioClass,
    FoliationGen, Mat2, RationalVF2,
};
