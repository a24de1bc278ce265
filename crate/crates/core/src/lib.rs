//! Verification toolkit for a rigid disk settling onto a flat wall in a
//! viscous fluid with Tresca slip.
//!
//! The crate builds the explicit test velocity used to bound the drag as the
//! gap `h` closes, integrates its norms on the degenerate gap, checks the
//! scaling of each bound over a ladder of gap heights, and simulates the
//! differential inequality that yields a finite contact time.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod cutoff;
pub mod dynamics;
pub mod error;
pub mod estimates;
pub mod fields;
pub mod geometry;
pub mod jet;
pub mod quadrature;
pub mod suite;

pub use config::{load_config, parse_config, RunConfig};
pub use cutoff::CutoffProfile;
pub use dynamics::{DynamicsParams, GateMode, IterationRecord, Trajectory};
pub use error::{Error, Result};
pub use fields::{Branch, BoundaryPart, FieldParams, FieldSample, TestField, VelocityJet};
pub use geometry::{gamma, BoundaryFrame, GapGeometry, Point, Region, Vec2};
pub use quadrature::{l2_norms, moment_integral, NormBundle, QuadratureSpec};
pub use estimates::{ScalingReport, SlopeAxis, TrescaPartition, DEFAULT_LADDER};
pub use suite::{run_suite, RunManifest, Suite};
