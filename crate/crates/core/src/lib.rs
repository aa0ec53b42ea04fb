//! Numerical laboratory for the flux-limited Keller–Segel system
//!
//! ```text
//! u_t = Δu − ∇·(u f(|∇v|²) ∇v),   v_t = Δv − v + u,   Neumann boundary,
//! ```
//!
//! with `f(ξ) = k_f (1 + ξ)^{−α}`, started from a nonnegative Radon measure.
//!
//! The crate is organized bottom-up:
//!
//! - [`domain`]: grids on intervals and rectangles, cell-averaged fields,
//!   Neumann difference operators and discrete `L^r` / `W^{1,q}` norms.
//! - [`semigroup`]: the Neumann heat semigroup in the cosine basis, the
//!   Duhamel solver and empirical checks of the smoothing estimates.
//! - [`measure`]: Radon measures (atoms plus density), heat-kernel
//!   mollification and the weak-* gap against cosine test functions.
//! - [`model`]: the sensitivity law, admissible exponent ranges and the
//!   constructive exponent selection behind the `L^r` decay estimate.
//! - [`solver`]: the regularized system, advanced by an upwind/spectral
//!   splitting that conserves mass exactly and keeps both components
//!   nonnegative.
//! - [`harness`]: rate fits and the experiments that measure smoothing,
//!   weak-* continuity, signal continuity, the taxis integral, gradient
//!   uniformity and the ε-ladder.
//! - [`cli`]: configuration files, run manifests and the `kslab` command.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod cli;
pub mod domain;
pub mod harness;
pub mod measure;
pub mod model;
pub mod semigroup;
pub mod solver;
