//! Exact recursive sampling and tree-indexed series expansion for the
//! spatially homogeneous Boltzmann equation with hard potentials and
//! angular cutoff.
//!
//! The weighted sampler ([`sampler::sample_state`]) returns `(M_t, V_t)` with
//! `E[M_t 1{V_t in A}] = f_t(A)` when the reference energy `e0` equals the
//! energy of `f0`. The Maxwellian machinery in [`maxwell`], the particle
//! series in [`series`], and the N-particle oracle in [`dsmc`] are
//! independent routes to the same `f_t` used for cross-validation.

#![allow(clippy::too_many_arguments)]

pub mod collision;
pub mod dsmc;
pub mod dynamics;
mod engine;
pub mod error;
pub mod exec;
pub mod harness;
pub mod law;
pub mod maxwell;
pub mod rng;
pub mod sampler;
pub mod series;
pub mod stats;
pub mod tree;
pub mod velocity;

pub use collision::{AngularKernel, CollisionAux, ModelParams};
pub use dynamics::WeightedState;
pub use error::{Error, Result};
pub use exec::Execution;
pub use law::{InitialLaw, VelocityLaw};
pub use rng::RngStream;
pub use sampler::SampleRecord;
pub use tree::OrderedTree;
pub use velocity::Velocity;
