use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{FieldParams, TestField};
use crate::geometry::{GapGeometry, Point, Vec2, HALF_GAP_HALF_WIDTH};
use crate::quadrature::rules::{compensated_sum, composite_nodes, GaussLegendre};
use crate::quadrature::{integrate_annulus, l2_norms, QuadratureSpec, PANEL_ORDER};

/// A velocity field with its gradient, `grad[i][j] = d w_i / d x_j`.
pub trait VectorField: Sync {
    fn value(&self, x: Point) -> Result<Vec2>;
    fn gradient(&self, x: Point) -> Result<[[f64; 2]; 2]>;
}

impl VectorField for TestField {
    fn value(&self, x: Point) -> Result<Vec2> {
        self.velocity(x)
    }

    fn gradient(&self, x: Point) -> Result<[[f64; 2]; 2]> {
        Ok(self.velocity_jet(x)?.grad())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl VectorField for ZeroField {
    fn value(&self, _: Point) -> Result<Vec2> {
        Ok([0.0, 0.0])
    }

    fn gradient(&self, _: Point) -> Result<[[f64; 2]; 2]> {
        Ok([[0.0; 2]; 2])
    }
}

/// Simple shear `w = (x2 - c2, 0)` about the disk centre.
#[derive(Debug, Clone, Copy)]
pub struct ShearSample {
    pub center: Point,
}

impl VectorField for ShearSample {
    fn value(&self, x: Point) -> Result<Vec2> {
        Ok([x.x2 - self.center.x2, 0.0])
    }

    fn gradient(&self, _: Point) -> Result<[[f64; 2]; 2]> {
        Ok([[0.0, 1.0], [0.0, 0.0]])
    }
}

/// `lambda_2 = -1/2 int_{(-L,-1) u (1,L)} u_2(x1, 1 + h) dx1`.
///
/// For a divergence-free field that is rigid in the disk and tangent to the
/// container this recovers the vertical translation of the disk.
pub fn lambda_flux_identity<F: VectorField>(field: &F, g: &GapGeometry, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    let y = g.disk_center().x2;
    let d = g.delta;
    let panels = spec.boundary_panels();
    let mut breaks = vec![1.0, 1.0 + 0.5 * d, 1.0 + d, 1.0 + 1.5 * d, 1.0 + 2.0 * d];
    for k in 1..=panels {
        breaks.push(1.0 + 2.0 * d + (g.l - 1.0 - 2.0 * d) * k as f64 / panels as f64);
    }
    let rule = GaussLegendre::new(2 * PANEL_ORDER);
    let mut vals = Vec::new();
    for (x, w) in composite_nodes(&breaks, &rule) {
        vals.push(w * field.value(Point::new(x, y))?[1]);
        vals.push(w * field.value(Point::new(-x, y))?[1]);
    }
    let v = -0.5 * compensated_sum(vals);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite("flux identity"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KornReport {
    pub h: f64,
    /// `(||grad w||^2 + ||w||^2 + ||w||^2_{L2(dB_h)}) / ||D(w)||^2`.
    pub ratio: f64,
    /// `h^{1/4} |lambda| / ||D(w)||` with `lambda = 1` for the test field.
    pub lambda_weighted: f64,
}

pub fn korn_ratio(p: &FieldParams, g: &GapGeometry, spec: &QuadratureSpec) -> Result<KornReport> {
    let n = l2_norms(p, g, spec)?;
    Ok(KornReport {
        h: g.h,
        ratio: n.korn_ratio()?,
        lambda_weighted: g.h.powf(0.25) / n.sym_l2_total(),
    })
}

/// Korn ratio of an arbitrary field on the cutoff annulus (minus the lower
/// sector), with the inner circle as the boundary term. The sub-domain is
/// fixed relative to the disk centre, so the ratio does not depend on `h`.
pub fn korn_ratio_annulus<F: VectorField>(field: &F, g: &GapGeometry, spec: &QuadratureSpec) -> Result<f64> {
    let frob2 = |m: [[f64; 2]; 2]| m.iter().flatten().map(|x| x * x).sum::<f64>();
    let grad = integrate_annulus(|x| Ok(frob2(field.gradient(x)?)), g, spec)?;
    let mass = integrate_annulus(
        |x| {
            let v = field.value(x)?;
            Ok(v[0] * v[0] + v[1] * v[1])
        },
        g,
        spec,
    )?;
    let sym = integrate_annulus(
        |x| {
            let m = field.gradient(x)?;
            let off = 0.5 * (m[0][1] + m[1][0]);
            Ok(m[0][0] * m[0][0] + m[1][1] * m[1][1] + 2.0 * off * off)
        },
        g,
        spec,
    )?;
    let c = g.disk_center();
    let gap = HALF_GAP_HALF_WIDTH.asin();
    let (t0, t1) = (-PI / 2.0 + gap, 3.0 * PI / 2.0 - gap);
    let panels = 4 * spec.boundary_panels();
    let breaks: Vec<f64> = (0..=panels).map(|k| t0 + (t1 - t0) * k as f64 / panels as f64).collect();
    let circle = composite_nodes(&breaks, &GaussLegendre::new(PANEL_ORDER))
        .into_iter()
        .map(|(t, w)| {
            // the fluid-side trace coincides with the rigid value off the lower sector
            let v = field.value(Point::new(c.x1 + t.cos(), c.x2 + t.sin()))?;
            Ok(w * (v[0] * v[0] + v[1] * v[1]))
        })
        .collect::<Result<Vec<f64>>>()?;
    if !(sym > 0.0) {
        return Err(Error::invalid("korn_ratio", "symmetric gradient vanishes on the sub-domain"));
    }
    Ok((grad + mass + compensated_sum(circle)) / sym)
}
