//! Enclosure-method laboratory for the inverse heat-source problem.
//!
//! Given lateral Cauchy data `(u, ∂u/∂ν)` of `u_t = Δu + f` on `∂Ω × (0, T)`,
//! this crate pairs the data with closed-form backward-heat probe fields and
//! reads off, from the large-parameter growth rate of the resulting indicator,
//! the source onset time `T₀` and support-function values of the space-time
//! source support. Every extraction law is paired with an independent oracle
//! (volume quadrature, cone and segment closed forms) in [`oracle`].
//!
//! The crate is `no_std` with `alloc`. File formats, configuration, the CLI
//! and parallel sweeps live in the `enclosure-lab` companion crate.

#![no_std]
// inherent float methods shadow the `Float` trait whenever std enters the
// crate graph (test builds pull it in through dev-dependencies)
#![allow(unused_imports)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod geometry;
pub mod indicator;
pub mod linalg;
pub mod logc;
pub mod oracle;
pub mod probes;
pub mod quad;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{
    Density, Dim, HalfSpace, Monomial, Region, SourceComponent, SourceSpec, SpaceTimeDirection,
    SpaceTimePolytope, SpatialDomain,
};
pub use geometry::BoundaryNode;
pub use indicator::{EnclosureResult, FitModel, IndicatorSample, SlopeFit, SupportRecord, Trend};
pub use logc::LogComplex;
pub use probes::{ProbeField, ProbeKind};
pub use solver::{BoundaryCondition, BoundaryData, FieldSnapshot, Grid};

/// Version string embedded in every artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
