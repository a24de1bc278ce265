use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fields::{BoundaryPart, Branch, FieldParams, TestField};
use crate::geometry::{BoundaryFrame, GapGeometry, Point, CORE_HALF_WIDTH, HALF_GAP_HALF_WIDTH};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldCheckSpec {
    /// Interior and boundary sample counts (each).
    pub samples: usize,
    /// Finite-difference step for the divergence check.
    pub fd_step: f64,
    pub seed: u64,
}

impl Default for FieldCheckSpec {
    fn default() -> Self {
        Self {
            samples: 1000,
            fd_step: 1e-5,
            seed: 0x7e5ca,
        }
    }
}

/// Worst deviations found by the structural checks on the test field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldCheckReport {
    pub h: f64,
    /// `max |div w|` from eighth-order central differences of `w`.
    pub fd_divergence: f64,
    /// `max |tr grad w|` from the analytic derivatives.
    pub jet_divergence: f64,
    /// `max |(w - w*) . n|` over walls and disk boundary.
    pub normal_mismatch: f64,
    /// `max |w - e2|` inside the disk.
    pub rigid_error: f64,
    /// `max` parity defect of `w1` (odd), `w2` and `q` (even) at mirrored points.
    pub parity_error: f64,
    /// `max` jump of `Psi` and `grad Psi` across `|x1| = 1/4` and `|x1| = 1/2`.
    pub interface_jump: f64,
}

impl FieldCheckReport {
    pub fn passes(&self, divergence_tol: f64, normal_tol: f64) -> bool {
        self.fd_divergence < divergence_tol
            && self.normal_mismatch < normal_tol
            && self.rigid_error < normal_tol
            && self.parity_error < 1e-10
            && self.interface_jump < 1e-8
    }
}

/// Uniform-ish fluid samples: a quarter each in the gap core, the half band,
/// the cutoff annulus and the rest of the container, kept `margin` away from
/// every boundary.
fn fluid_samples(g: &GapGeometry, n: usize, margin: f64, rng: &mut ChaCha8Rng) -> Result<Vec<Point>> {
    let c = g.disk_center();
    let mut pts = Vec::with_capacity(n);
    let far_enough = |p: Point| {
        p.x2 > margin
            && p.x2 < g.lp - margin
            && p.x1.abs() < g.l - margin
            && p.distance_to(c) > 1.0 + margin
    };
    let mut k = 0usize;
    while pts.len() < n {
        let p = match k % 4 {
            0 | 1 => {
                let (lo, hi) = if k.is_multiple_of(4) {
                    (0.0, CORE_HALF_WIDTH)
                } else {
                    (CORE_HALF_WIDTH, HALF_GAP_HALF_WIDTH)
                };
                let x1 = rng.gen_range(lo..hi) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                Point::new(x1, rng.gen_range(0.0..1.0) * g.gap_height(x1)?)
            }
            2 => {
                let r = rng.gen_range(1.0..1.0 + 2.5 * g.delta);
                let t = rng.gen_range(0.0..2.0 * PI);
                Point::new(c.x1 + r * t.cos(), c.x2 + r * t.sin())
            }
            _ => Point::new(rng.gen_range(-g.l..g.l), rng.gen_range(0.0..g.lp)),
        };
        k += 1;
        if far_enough(p) && g.in_container(p) {
            pts.push(p);
        }
    }
    Ok(pts)
}

/// Eighth-order central difference weights for offsets `1..=4`.
const FD_WEIGHTS: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

fn fd_divergence(field: &TestField, x: Point, e: f64) -> Result<f64> {
    // central derivative with offsets `k * step`, all exact in floating point
    let d = |f: &dyn Fn(f64) -> Result<f64>, step: f64| -> Result<f64> {
        let mut s = 0.0;
        for (k, w) in FD_WEIGHTS.iter().enumerate() {
            let o = (k + 1) as f64 * step;
            s += w * (f(o)? - f(-o)?);
        }
        Ok(s / step)
    };
    let e1 = (x.x1 + e) - x.x1;
    let e2 = (x.x2 + e) - x.x2;
    let d1 = d(&|s| Ok(field.velocity(Point::new(x.x1 + s, x.x2))?[0]), e1)?;
    let d2 = d(&|s| Ok(field.velocity(Point::new(x.x1, x.x2 + s))?[1]), e2)?;
    Ok((d1 + d2).abs())
}

fn boundary_samples(g: &GapGeometry, n: usize, rng: &mut ChaCha8Rng) -> Vec<(BoundaryPart, BoundaryFrame)> {
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let frame = match k % 5 {
            0 => {
                // concentrate half the bottom samples under the gap
                let x = if rng.gen_bool(0.5) {
                    rng.gen_range(-HALF_GAP_HALF_WIDTH..HALF_GAP_HALF_WIDTH)
                } else {
                    rng.gen_range(-g.l..g.l)
                };
                (BoundaryPart::Bottom, Point::new(x, 0.0), [0.0, -1.0], [1.0, 0.0])
            }
            1 => (BoundaryPart::Right, Point::new(g.l, rng.gen_range(0.0..g.lp)), [1.0, 0.0], [0.0, 1.0]),
            2 => (BoundaryPart::Left, Point::new(-g.l, rng.gen_range(0.0..g.lp)), [-1.0, 0.0], [0.0, -1.0]),
            3 => (BoundaryPart::Top, Point::new(rng.gen_range(-g.l..g.l), g.lp), [0.0, 1.0], [-1.0, 0.0]),
            _ => {
                let f = if rng.gen_bool(0.5) {
                    g.lower_disk_boundary(rng.gen_range(-HALF_GAP_HALF_WIDTH..HALF_GAP_HALF_WIDTH))
                        .expect("|x1| < 1/2 lies on the arc")
                } else {
                    g.disk_boundary(rng.gen_range(-PI..PI))
                };
                out.push((BoundaryPart::Disk, f));
                continue;
            }
        };
        out.push((
            frame.0,
            BoundaryFrame {
                point: frame.1,
                normal: frame.2,
                tangent: frame.3,
            },
        ));
    }
    out
}

/// Divergence, boundary compatibility, rigidity, parity and interface checks.
pub fn check_fields(p: &FieldParams, g: &GapGeometry, spec: &FieldCheckSpec) -> Result<FieldCheckReport> {
    g.ensure_valid()?;
    let field = TestField::new(*p, *g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let pts = fluid_samples(g, spec.samples, 5.0 * spec.fd_step, &mut rng)?;

    let (fd, jet): (Vec<f64>, Vec<f64>) = pts
        .par_iter()
        .map(|&x| Ok((fd_divergence(&field, x, spec.fd_step)?, field.velocity_jet(x)?.divergence().abs())))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();

    let rigid = field.rigid();
    let mut normal = 0.0f64;
    for (part, frame) in boundary_samples(g, spec.samples, &mut rng) {
        let (frame, jet) = if part.is_disk() {
            // snap lower-arc points onto x2 = H like the disk trace does
            let theta = (frame.point.x2 - g.disk_center().x2).atan2(frame.point.x1);
            field.disk_trace(theta)?
        } else {
            (frame, field.boundary_jet(part, &frame)?)
        };
        let w = jet.velocity();
        let ws = rigid.w_star(part.is_disk());
        normal = normal.max(((w[0] - ws[0]) * frame.normal[0] + (w[1] - ws[1]) * frame.normal[1]).abs());
    }

    let c = g.disk_center();
    let mut rigid_err = 0.0f64;
    for _ in 0..spec.samples {
        let r = rng.gen_range(0.0..1.0f64).sqrt();
        let t = rng.gen_range(0.0..2.0 * PI);
        let w = field.velocity(Point::new(c.x1 + r * t.cos(), c.x2 + r * t.sin()))?;
        rigid_err = rigid_err.max(w[0].abs()).max((w[1] - 1.0).abs());
    }

    let mut parity = 0.0f64;
    for &x in pts.iter().filter(|x| x.x1.abs() < HALF_GAP_HALF_WIDTH && x.x2 < g.gap_height(x.x1).unwrap_or(0.0)) {
        let a = field.sample(x)?;
        let b = field.sample(x.mirrored())?;
        let scale = 1.0 + a.w[0].abs().max(a.w[1].abs()).max(a.q.abs());
        parity = parity
            .max((a.w[0] + b.w[0]).abs() / scale)
            .max((a.w[1] - b.w[1]).abs() / scale)
            .max((a.q - b.q).abs() / scale);
    }

    let mut jump = 0.0f64;
    for k in 0..spec.samples {
        let s = if k % 2 == 0 { CORE_HALF_WIDTH } else { HALF_GAP_HALF_WIDTH };
        let x1 = if k % 4 < 2 { s } else { -s };
        let x2 = rng.gen_range(0.0..1.0) * g.gap_height(x1)?;
        let x = Point::new(x1, x2);
        // the half gap uses the blended formula; beyond |x1| = 1/2 the far one
        let outer = if s == HALF_GAP_HALF_WIDTH { Branch::Far } else { Branch::Blend };
        let a = field.stream_jet_on(Branch::Blend, x)?.psi;
        let b = field.stream_jet_on(outer, x)?.psi;
        jump = jump
            .max((a.value() - b.value()).abs())
            .max((a.d(1, 0) - b.d(1, 0)).abs())
            .max((a.d(0, 1) - b.d(0, 1)).abs());
    }

    Ok(FieldCheckReport {
        h: g.h,
        fd_divergence: fd.into_iter().fold(0.0, f64::max),
        jet_divergence: jet.into_iter().fold(0.0, f64::max),
        normal_mismatch: normal,
        rigid_error: rigid_err,
        parity_error: parity,
        interface_jump: jump,
    })
}
