//! Analysis toolkit for spherically symmetric gravitational initial data.
//!
//! A data set `(g, k)` on a ball or annulus is described by four radial
//! profiles: the metric coefficient `g11(r)`, the areal radius `rho(r)`, and
//! the two extrinsic-curvature eigenvalues `ka(r)` (radial) and `kb(r)`
//! (tangential). On top of that representation the crate provides:
//!
//! - [`radial_data`]: grids, field providers (closed-form or tabulated),
//!   validation, refinement, differentiation, and JSON persistence;
//! - [`geometry`]: scalar curvature, energy/momentum densities, null
//!   expansions, proper radius and volume, and the dominant-energy check;
//! - [`horizon`]: root scans for the expansions and trapped/untrapped
//!   interval classification;
//! - [`criteria`]: the size-based trapped-surface criterion, the integral
//!   (flux-based) criterion, and a randomized soundness sweep;
//! - [`jang`]: the first-order reduction of the generalized graph equation,
//!   its blow-up detection, and the associated diagnostic fields;
//! - [`energy`]: quasi-local energy profiles, the flux identity, the
//!   monotonicity/positivity checks, and the mass-inequality chain.
//!
//! All numerical kernels (finite-difference stencils on arbitrary grids,
//! cumulative quadrature, interpolation, extrapolation) live in
//! [`numerics`] and are second-order or better on smooth profiles.

pub mod criteria;
pub mod energy;
pub mod geometry;
pub mod horizon;
pub mod jang;
pub mod numerics;
pub mod radial_data;
