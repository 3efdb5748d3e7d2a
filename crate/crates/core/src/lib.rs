//! Exact classification of reversible and bireflectional elements of the
//! real orthogonal groups O(p,q), SO(p,q) and Ω(p,q).
//!
//! An element φ is decomposed into orthogonally indecomposable summands,
//! each summand contributes a set of achievable (determinant, spinor norm)
//! pairs for its reversing involutions, and the sets are combined to decide
//! membership of a reversing involution in the requested group. Positive
//! verdicts come with an explicit, exactly verified pair of involutions.

pub mod algebra;
pub mod bilinear;
pub mod calculus;
pub mod cli;
pub mod decompose;
pub mod error;
pub mod factory;
pub mod oracle;
pub mod transform;

pub use error::Error;
