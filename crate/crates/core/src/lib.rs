//! Derivative approximation for black-box scalar functions using only
//! function evaluations.
//!
//! Everything in this crate is built from one primitive: differences of
//! function values over a matrix of direction columns, mapped back through a
//! Moore-Penrose pseudoinverse. Stacking that primitive gives
//!
//! - the generalized simplex gradient (GSG),
//! - the generalized simplex Hessian (GSH) and its centered variant (GCSH),
//! - the centered simplex Hessian diagonal (CSHD),
//! - Hessian-vector product approximations, and
//! - order-P derivative tensors via a recursion whose base case is the GSG.
//!
//! Direction matrices can be chosen so a scheme targets the full Hessian, its
//! diagonal, its off-diagonal entries, a single row/column, or a product
//! `∇²f(x⁰)·v`; [`directions`] holds the builders, [`sampling`] enumerates and
//! deduplicates the exact evaluation points each scheme reads, [`bounds`]
//! evaluates the theoretical error ceilings, and [`harness`] measures
//! empirical convergence orders against analytic oracles.
//!
//! The crate is `no_std` (with `alloc`) and has no dependency besides `libm`.
//!
//! # Quick example
//!
//! ```
//! use simderiv_core::directions::SchemeSpec;
//! use simderiv_core::estimators::approximate;
//!
//! // Full Hessian of a quadratic from 7 evaluations (n = 2, centered).
//! let spec = SchemeSpec::full_gcsh_minimal(2, 0.1).unwrap();
//! let f = |x: &[f64]| 3.0 * x[0] * x[0] + x[0] * x[1] - 2.0 * x[1] * x[1];
//! let result = approximate(&spec, f, &[0.4, -1.0]).unwrap();
//! assert_eq!(result.eval_count, 7);
//! let h = result.value.to_matrix().unwrap();
//! assert!((h[(0, 0)] - 6.0).abs() < 1e-9);
//! assert!((h[(0, 1)] - 1.0).abs() < 1e-9);
//! assert!((h[(1, 1)] + 4.0).abs() < 1e-9);
//! ```

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod directions;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod linalg;
pub mod projections;
pub mod sampling;
pub mod tensor;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use tensor::DerivTensor;
