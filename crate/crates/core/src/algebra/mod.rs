//! Exact arithmetic over the rationals: scalars, polynomials, matrices,
//! factorization and real root isolation.

pub mod factor;
pub mod matrix;
pub mod poly;
pub mod rational;
pub mod roots;

pub use factor::factor_rational_poly;
pub use matrix::{Matrix, Vector};
pub use poly::Poly;
pub use rational::{format_rational, parse_rational, rat, ratio, Rational, Sign};
