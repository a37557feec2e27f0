//! Numerical laboratory for gradient Ricci shrinkers on rotationally symmetric models.
//!
//! * [`warped`]: curvature, geodesics and volumes of ds² + φ(s)² g_{S^{m-1}}
//! * [`catalog`]: Gaussian, round sphere and cylinder shrinkers; flow identities
//! * [`conformal`]: the chart ḡ = e^{2(f(q)-f)/(m-2)} g and its comparison estimates
//! * [`gaussian`]: erfc⁻¹ identities and the conformally compressed Gaussian
//! * [`entropy`]: the W-functional and μ(g, τ) on closed models
//! * [`gh`]: finite metric spaces and Gromov–Hausdorff bounds
//! * [`radii`]: volume, GH and convexity radii with their capped variants

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod catalog;
pub mod conformal;
pub mod entropy;
pub mod error;
pub mod gaussian;
pub mod gh;
pub mod num;
pub mod radii;
pub mod special;
pub mod warped;

pub use error::{Error, Result};
