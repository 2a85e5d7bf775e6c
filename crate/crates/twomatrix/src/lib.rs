//! Numerical laboratory for the two-matrix model with quartic second potential
//! W(y) = y⁴/4, even first potential V and coupling τ > 0.
//!
//! The crate solves the constrained vector equilibrium problem for the triple
//! of measures (μ₁, μ₂, μ₃), builds the four-sheeted spectral curve and the
//! outer parametrix, evaluates Pearcey integrals and weight functions, and
//! computes finite-n biorthogonal polynomials and the correlation kernel K₁₁
//! in arbitrary precision to compare against the sine and Airy limits.
//!
//! Module map:
//! - [`potential`]: measures on ℝ / iℝ / K_c, potentials, energies.
//! - [`balayage`]: closed-form balayage kernels and measure balayage.
//! - [`equilibrium`]: the vector equilibrium solver and its diagnostics.
//! - [`curve`]: Cauchy transforms, ξ-sheets, g/φ functions, outer parametrix.
//! - [`pearcey`]: Pearcey integrals, weights w_{j,n}, moment functions I_m.
//! - [`finite_n`]: bimoment matrix, biorthogonal system, kernel K₁₁.
//! - [`universal`]: Airy function, sine/Airy kernels, Airy model problem.
//! - [`cli`]: configuration, command pipelines and report emission.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Reference constants are written with every digit of their oracle.
#![allow(clippy::excessive_precision)]

pub mod balayage;
pub mod cli;
pub mod curve;
pub mod equilibrium;
pub mod error;
pub mod finite_n;
pub mod pearcey;
pub mod plot;
pub mod potential;
pub mod quad;
pub mod universal;

pub use error::{Error, Result};
pub use num_complex::Complex64;
