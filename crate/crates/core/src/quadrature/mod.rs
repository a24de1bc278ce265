//! Integrals over the thin gap, the far-field annulus and the fluid boundary.
//!
//! The gap `{|x1| < 1/4, 0 < x2 < H(x1)}` is mapped to `(x1, t)` with
//! `x2 = t H(x1)` so the degenerate aspect ratio disappears; `x1` panels are
//! graded geometrically toward `x1 = 0` on the `sqrt(h)` scale where the
//! lubrication profile concentrates. The test field vanishes outside the
//! half gap and the cutoff annulus `|x - c| < 1 + 2 delta`, so outer
//! integrals only cover the band `1/4 < |x1| < 1/2` of the half gap and the
//! annulus (in polar coordinates, minus the sector already in the half gap).

pub mod rules;

mod domain;
mod norms;

pub use domain::{
    boundary_integral, boundary_panels, gap_breakpoints, integrate_annulus, integrate_gap, integrate_half_band,
    integrate_region, lower_arc_breakpoints, moment_integral, IntegrationRegion,
};
pub(crate) use domain::column_breaks;
pub use norms::{disk_force, l2_norms, linf_disk_shear, norms_of, NormBundle, LINF_SAMPLES};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss nodes across the gap core in `x1` (both halves).
    pub nodes_x1: usize,
    /// Gauss nodes across the mapped gap height.
    pub nodes_x2: usize,
    /// Gauss nodes per boundary segment.
    pub boundary_nodes: usize,
    pub abs_tol: f64,
    /// Integrate the gap in `(x1, x2 / H)` coordinates.
    pub mapping: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes_x1: 128,
            nodes_x2: 64,
            boundary_nodes: 64,
            abs_tol: 1e-8,
            mapping: true,
        }
    }
}

/// Gauss order used on every panel.
pub const PANEL_ORDER: usize = 8;

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("nodes_x1", self.nodes_x1),
            ("nodes_x2", self.nodes_x2),
            ("boundary_nodes", self.boundary_nodes),
        ] {
            if v < 8 {
                return Err(Error::InvalidParameter {
                    name: "quadrature",
                    reason: format!("{name} = {v} must be at least 8"),
                });
            }
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::invalid("abs_tol", format!("must be positive, got {}", self.abs_tol)));
        }
        if !self.mapping {
            return Err(Error::invalid(
                "mapping",
                "only the mapped gap quadrature is implemented",
            ));
        }
        Ok(())
    }

    /// Same layout with every node count doubled.
    pub fn doubled(&self) -> Self {
        Self {
            nodes_x1: 2 * self.nodes_x1,
            nodes_x2: 2 * self.nodes_x2,
            boundary_nodes: 2 * self.boundary_nodes,
            ..*self
        }
    }

    pub fn panels_per_half(&self) -> usize {
        (self.nodes_x1 / (2 * PANEL_ORDER)).max(2)
    }

    pub fn boundary_panels(&self) -> usize {
        (self.boundary_nodes / PANEL_ORDER).max(1)
    }
}
