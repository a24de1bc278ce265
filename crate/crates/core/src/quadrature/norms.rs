use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::domain::{boundary_integral, integrate_region, IntegrationRegion};
use super::rules::{compensated_sum, composite_nodes, GaussLegendre};
use super::{QuadratureSpec, PANEL_ORDER};
use crate::error::{Error, Result};
use crate::fields::{BoundaryPart, Branch, FieldParams, TestField, VelocityJet};
use crate::geometry::{GapGeometry, Point, Vec2, CORE_HALF_WIDTH, HALF_GAP_HALF_WIDTH};

/// Minimum number of samples behind every sampled supremum.
pub const LINF_SAMPLES: usize = 4096;

/// Norms and integrals of the test field at one gap height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBundle {
    pub h: f64,
    /// `||w||_{L2(G_h)}`.
    pub l2_gap: f64,
    /// `||w||_{L2(Omega_h \ G_h)}`.
    pub l2_outer: f64,
    /// Sampled `sup_{dB_h} |2 D(w) n . tau|`.
    pub linf_disk_shear: f64,
    /// `int_{dOmega_h} |(w - w*) . tau|`.
    pub slip_integral: f64,
    /// `||Delta w - grad q||_{L2(G_h)}`.
    pub residual_l2_gap: f64,
    /// `||grad w||_{L2(G_h)}`.
    pub grad_l2_gap: f64,
    /// `||w||_{L2(dB_h cap dG_h)}`, fluid-side trace on the lower arc `|x1| < 1/4`.
    pub boundary_l2_disk: f64,
    pub grad_l2_outer: f64,
    pub sym_l2_gap: f64,
    pub sym_l2_outer: f64,
    /// `||w||_{L2(dB_h)}` over the whole circle.
    pub disk_trace_l2: f64,
    /// `e2 . int_{dB_h} Sigma(w, q) n`.
    pub disk_force: f64,
    /// Sampled `sup_{Omega_h \ G_h} |grad w|`.
    pub linf_outer_grad: f64,
}

impl NormBundle {
    fn check(self) -> Result<Self> {
        let v = [
            self.l2_gap,
            self.l2_outer,
            self.linf_disk_shear,
            self.slip_integral,
            self.residual_l2_gap,
            self.grad_l2_gap,
            self.boundary_l2_disk,
            self.grad_l2_outer,
            self.sym_l2_gap,
            self.sym_l2_outer,
            self.disk_trace_l2,
            self.linf_outer_grad,
        ];
        if v.iter().all(|x| x.is_finite() && *x >= 0.0) && self.disk_force.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonFinite("norm bundle"))
        }
    }

    /// `||grad w||^2 + ||w||^2 + ||w||^2_{L2(dB_h)}` over `||D(w)||^2`.
    pub fn korn_ratio(&self) -> Result<f64> {
        let num = self.grad_l2_gap.powi(2)
            + self.grad_l2_outer.powi(2)
            + self.l2_gap.powi(2)
            + self.l2_outer.powi(2)
            + self.disk_trace_l2.powi(2);
        let den = self.sym_l2_gap.powi(2) + self.sym_l2_outer.powi(2);
        if !(den > 0.0) {
            return Err(Error::invalid("korn_ratio", "symmetric gradient vanishes"));
        }
        Ok(num / den)
    }

    /// `||D(w)||_{L2(Omega_h)}`.
    pub fn sym_l2_total(&self) -> f64 {
        self.sym_l2_gap.hypot(self.sym_l2_outer)
    }
}

fn norm2(v: Vec2) -> f64 {
    v[0] * v[0] + v[1] * v[1]
}

fn frob2(m: [[f64; 2]; 2]) -> f64 {
    m.iter().flatten().map(|x| x * x).sum()
}

/// `int |F(jet)|` over the gap or over the rest of the support.
fn region_integral<F>(field: &TestField, spec: &QuadratureSpec, outer: bool, f: F) -> Result<f64>
where
    F: Fn(&VelocityJet) -> Result<f64> + Sync,
{
    let g = field.geometry();
    let eval = |p: Point| f(&field.velocity_jet(p)?);
    if outer {
        let a = integrate_region(IntegrationRegion::HalfBand, eval, g, spec)?;
        let b = integrate_region(IntegrationRegion::Annulus, eval, g, spec)?;
        Ok(a + b)
    } else {
        integrate_region(IntegrationRegion::GapCore, eval, g, spec)
    }
}

/// Lower disk arc `|x1| < 1/4` with arc-length weights.
fn lower_arc_l2(field: &TestField, spec: &QuadratureSpec) -> Result<f64> {
    let g = field.geometry();
    let rule = GaussLegendre::new(PANEL_ORDER);
    let half = super::domain::gap_breakpoints(g.h, spec.panels_per_half());
    let mut breaks: Vec<f64> = half.iter().rev().map(|x| -x).collect();
    breaks.extend(half.into_iter().skip(1));
    let vals: Result<Vec<f64>> = composite_nodes(&breaks, &rule)
        .into_iter()
        .map(|(x, w)| {
            let frame = g.lower_disk_boundary(x)?;
            let jet = field.boundary_jet(BoundaryPart::Disk, &frame)?;
            Ok(w / (1.0 - x * x).sqrt() * norm2(jet.velocity()))
        })
        .collect();
    Ok(compensated_sum(vals?).sqrt())
}

/// Sampled `sup_{dB_h} |2 D(w) n . tau|`: geometric in `x1` on the lower arc (both sides), uniform
/// in angle elsewhere.
pub fn linf_disk_shear(field: &TestField) -> Result<f64> {
    let g = field.geometry();
    let n = LINF_SAMPLES;
    let lo = 1e-3 * g.h.sqrt().min(1.0);
    let ratio = (HALF_GAP_HALF_WIDTH / lo).powf(1.0 / (n - 1) as f64);
    let mut arc: Vec<f64> = vec![0.0];
    let mut x = lo;
    for _ in 0..n {
        arc.push(x.min(HALF_GAP_HALF_WIDTH));
        arc.push(-x.min(HALF_GAP_HALF_WIDTH));
        x *= ratio;
    }
    let lower: Result<Vec<f64>> = arc.par_iter().map(|&x| field.shear_on_lower_disk(x).map(f64::abs)).collect();
    let t0 = -PI / 3.0;
    let t1 = 4.0 * PI / 3.0;
    let upper: Result<Vec<f64>> = (0..=n)
        .into_par_iter()
        .map(|k| field.shear_on_disk(t0 + (t1 - t0) * k as f64 / n as f64).map(f64::abs))
        .collect();
    Ok(lower?.into_iter().chain(upper?).fold(0.0, f64::max))
}

/// Dense samples of `|grad w|` on the half band and the cutoff annulus.
fn outer_grad_sup(field: &TestField) -> Result<f64> {
    let g = field.geometry();
    let m = 64;
    let c = g.disk_center();
    let mut pts = Vec::with_capacity(2 * m * m);
    for i in 0..m {
        let s = CORE_HALF_WIDTH + (HALF_GAP_HALF_WIDTH - CORE_HALF_WIDTH) * (i as f64 + 0.5) / m as f64;
        for sign in [-1.0, 1.0] {
            let x1 = sign * s;
            let height = g.gap_height(x1)?;
            for j in 0..m / 2 {
                pts.push(Point::new(x1, height * (j as f64 + 0.5) / (m / 2) as f64));
            }
        }
        let r = 1.0 + 2.0 * g.delta * (i as f64 + 0.5) / m as f64;
        let gap = (HALF_GAP_HALF_WIDTH / r).asin();
        for j in 0..m {
            let t = -PI / 2.0 + gap + (2.0 * PI - 2.0 * gap) * (j as f64 + 0.5) / m as f64;
            pts.push(Point::new(c.x1 + r * t.cos(), c.x2 + r * t.sin()));
        }
    }
    let v: Result<Vec<f64>> = pts
        .par_iter()
        .map(|&p| field.velocity_jet(p).map(|j| frob2(j.grad()).sqrt()))
        .collect();
    Ok(v?.into_iter().fold(0.0, f64::max))
}

/// Slip integral and disk quantities from one boundary pass.
fn boundary_terms(field: &TestField, spec: &QuadratureSpec) -> Result<(f64, f64, f64)> {
    let g = field.geometry();
    let rigid = field.rigid();
    let slip = boundary_integral(
        |part, frame| {
            let jet = field.boundary_jet(part, frame)?;
            let w = jet.velocity();
            let ws = rigid.w_star(part.is_disk());
            Ok(((w[0] - ws[0]) * frame.tangent[0] + (w[1] - ws[1]) * frame.tangent[1]).abs())
        },
        g,
        spec,
    )?;
    let trace = boundary_integral(
        |part, frame| {
            if !part.is_disk() {
                return Ok(0.0);
            }
            Ok(norm2(field.boundary_jet(part, frame)?.velocity()))
        },
        g,
        spec,
    )?;
    let force = disk_force(field, spec)?;
    Ok((slip, trace.sqrt(), force))
}

/// `e2 . int_{dB_h} Sigma(w, q) n` with `Sigma = 2 D(w) - q I`, fluid-side traces.
pub fn disk_force(field: &TestField, spec: &QuadratureSpec) -> Result<f64> {
    boundary_integral(
        |part, frame| {
            if !part.is_disk() {
                return Ok(0.0);
            }
            let jet = field.boundary_jet(part, frame)?;
            let d = jet.sym_grad();
            let n = frame.normal;
            let q = if jet.branch == Branch::Blend {
                field.pressure_on_blend(frame.point)?
            } else {
                0.0
            };
            Ok(2.0 * (d[1][0] * n[0] + d[1][1] * n[1]) - q * n[1])
        },
        field.geometry(),
        spec,
    )
}

/// Every norm of the test field `w_h` at the gap height of `g`.
pub fn l2_norms(p: &FieldParams, g: &GapGeometry, spec: &QuadratureSpec) -> Result<NormBundle> {
    g.ensure_valid()?;
    spec.validate()?;
    let field = TestField::new(*p, *g)?;
    norms_of(&field, spec)
}

pub fn norms_of(field: &TestField, spec: &QuadratureSpec) -> Result<NormBundle> {
    let w2 = |j: &VelocityJet| Ok(norm2(j.velocity()));
    let g2 = |j: &VelocityJet| Ok(frob2(j.grad()));
    let d2 = |j: &VelocityJet| Ok(frob2(j.sym_grad()));
    let r2 = |j: &VelocityJet| Ok(norm2(field.residual_from_jet(j)?));
    let (slip, trace, force) = boundary_terms(field, spec)?;
    NormBundle {
        h: field.geometry().h,
        l2_gap: region_integral(field, spec, false, w2)?.sqrt(),
        l2_outer: region_integral(field, spec, true, w2)?.sqrt(),
        linf_disk_shear: linf_disk_shear(field)?,
        slip_integral: slip,
        residual_l2_gap: region_integral(field, spec, false, r2)?.sqrt(),
        grad_l2_gap: region_integral(field, spec, false, g2)?.sqrt(),
        boundary_l2_disk: lower_arc_l2(field, spec)?,
        grad_l2_outer: region_integral(field, spec, true, g2)?.sqrt(),
        sym_l2_gap: region_integral(field, spec, false, d2)?.sqrt(),
        sym_l2_outer: region_integral(field, spec, true, d2)?.sqrt(),
        disk_trace_l2: trace,
        disk_force: force,
        linf_outer_grad: outer_grad_sup(field)?,
    }
    .check()
}
