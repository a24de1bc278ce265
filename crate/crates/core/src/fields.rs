//! The explicit test velocity `w_h = curl Psi` and its pressure `q_h`.
//!
//! Below the disk the stream function is the lubrication profile
//!
//! ```text
//! phi_s = x1 [ (1 - a) (x2/H) + a (x2/H)^3 ],   a(h, x1) = mu1 h + mu2 x1^2,
//! ```
//!
//! which vanishes on the wall and equals `x1` on the disk. Away from the gap
//! the field is the rigid translation `e2` cut off radially: `phi_0 = x1` for
//! `|x - c| < 1 + delta`, `0` for `|x - c| >= 1 + 2 delta`. The two are blended
//! in the half gap by the tensor cutoff `chi(x1) chi(x2)` which is `1` on
//! `(-1/4, 1/4)^2` and `0` outside `[-1/2, 1/2]^2`:
//!
//! ```text
//! Psi = chi phi_s + (1 - chi) phi_0   in the half gap,
//! Psi = phi_0                         elsewhere in the fluid,
//! Psi = x1                            in the disk.
//! ```
//!
//! All derivatives come from [`Jet`] arithmetic, so `div w = 0` holds to
//! rounding and third derivatives (needed by `Delta w`) are exact.

use serde::{Deserialize, Serialize};

use crate::cutoff::CutoffProfile;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryFrame, GapGeometry, Point, Region, Vec2, CORE_HALF_WIDTH, HALF_GAP_HALF_WIDTH};
use crate::jet::Jet;
use crate::quadrature::rules::adaptive_gk;

pub const REFERENCE_MU1: f64 = 1.0 / 6.0;
pub const REFERENCE_MU2: f64 = -1.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldParams {
    pub mu1: f64,
    pub mu2: f64,
    pub chi_profile: CutoffProfile,
    pub phi_profile: CutoffProfile,
}

impl Default for FieldParams {
    fn default() -> Self {
        Self {
            mu1: REFERENCE_MU1,
            mu2: REFERENCE_MU2,
            chi_profile: CutoffProfile::Exponential,
            phi_profile: CutoffProfile::Exponential,
        }
    }
}

impl FieldParams {
    pub fn with_mu(mu1: f64, mu2: f64) -> Self {
        Self {
            mu1,
            mu2,
            ..Self::default()
        }
    }

    /// True for the coefficients that cancel the diverging disk shear.
    pub fn is_reference(&self) -> bool {
        (self.mu1 - REFERENCE_MU1).abs() < 1e-15 && (self.mu2 - REFERENCE_MU2).abs() < 1e-15
    }
}

/// Which closed-form piece of `Psi` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `Psi = x1` (inside the disk).
    Rigid,
    /// `chi phi_s + (1 - chi) phi_0` (half gap).
    Blend,
    /// `phi_0` (rest of the fluid).
    Far,
}

/// Stream-function jet at a point with the velocity quantities derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityJet {
    pub point: Point,
    pub branch: Branch,
    pub psi: Jet,
}

impl VelocityJet {
    pub fn velocity(&self) -> Vec2 {
        [-self.psi.d(0, 1), self.psi.d(1, 0)]
    }

    /// `grad_w[i][j] = d w_i / d x_j`.
    pub fn grad(&self) -> [[f64; 2]; 2] {
        let p = &self.psi;
        [[-p.d(1, 1), -p.d(0, 2)], [p.d(2, 0), p.d(1, 1)]]
    }

    pub fn sym_grad(&self) -> [[f64; 2]; 2] {
        sym(self.grad())
    }

    pub fn divergence(&self) -> f64 {
        let g = self.grad();
        g[0][0] + g[1][1]
    }

    pub fn laplacian(&self) -> Vec2 {
        let p = &self.psi;
        [-p.d(2, 1) - p.d(0, 3), p.d(3, 0) + p.d(1, 2)]
    }

    /// `2 D(w) n . tau`.
    pub fn shear(&self, normal: Vec2, tangent: Vec2) -> f64 {
        let d = self.sym_grad();
        2.0 * bilinear(&d, normal, tangent)
    }
}

fn sym(g: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let off = 0.5 * (g[0][1] + g[1][0]);
    [[g[0][0], off], [off, g[1][1]]]
}

fn bilinear(m: &[[f64; 2]; 2], a: Vec2, b: Vec2) -> f64 {
    (m[0][0] * a[0] + m[0][1] * a[1]) * b[0] + (m[1][0] * a[0] + m[1][1] * a[1]) * b[1]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub point: Point,
    pub w: Vec2,
    pub grad_w: [[f64; 2]; 2],
    pub d: [[f64; 2]; 2],
    pub q: f64,
    pub residual: Vec2,
}

/// Rigid part carried by the field and the boundary indicator `w*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidData {
    pub lambda_w: Vec2,
}

impl RigidData {
    /// `w* = e2` on the disk boundary, `0` on the container walls.
    pub fn w_star(&self, on_disk: bool) -> Vec2 {
        if on_disk {
            [0.0, 1.0]
        } else {
            [0.0, 0.0]
        }
    }
}

/// Which part of the fluid boundary a frame lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryPart {
    Bottom,
    Right,
    Top,
    Left,
    Disk,
}

impl BoundaryPart {
    pub const ALL: [BoundaryPart; 5] = [
        BoundaryPart::Bottom,
        BoundaryPart::Right,
        BoundaryPart::Top,
        BoundaryPart::Left,
        BoundaryPart::Disk,
    ];

    pub fn is_disk(&self) -> bool {
        matches!(self, BoundaryPart::Disk)
    }
}

/// Default absolute tolerance for the pressure's `x1`-integrals.
pub const PRESSURE_ABS_TOL: f64 = 1e-10;
const PRESSURE_REL_TOL: f64 = 1e-13;
const PRESSURE_MAX_SEGMENTS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestField {
    params: FieldParams,
    geom: GapGeometry,
    pressure_tol: f64,
}

impl TestField {
    pub fn new(params: FieldParams, geom: GapGeometry) -> Result<Self> {
        if !(geom.h > 0.0 && geom.h.is_finite()) {
            return Err(Error::invalid("h", format!("gap height must be positive, got {}", geom.h)));
        }
        if !(params.mu1.is_finite() && params.mu2.is_finite()) {
            return Err(Error::invalid("mu", "coefficients must be finite"));
        }
        Ok(Self {
            params,
            geom,
            pressure_tol: PRESSURE_ABS_TOL,
        })
    }

    pub fn with_pressure_tolerance(mut self, abs_tol: f64) -> Self {
        self.pressure_tol = abs_tol;
        self
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn geometry(&self) -> &GapGeometry {
        &self.geom
    }

    pub fn rigid(&self) -> RigidData {
        RigidData { lambda_w: [0.0, 1.0] }
    }

    /// `a(h, x1) = mu1 h + mu2 x1^2`.
    pub fn coef_a(&self, x1: f64) -> f64 {
        coef_a(&self.params, self.geom.h, x1)
    }

    /// Lubrication stream function `phi_s` on the closed half gap.
    pub fn stream_gap(&self, x: Point) -> Result<f64> {
        if !(x.x1.abs() < HALF_GAP_HALF_WIDTH) {
            return Err(Error::Domain {
                what: "stream_gap",
                value: x.x1,
                domain: "|x1| < 1/2",
            });
        }
        let height = self.geom.gap_height(x.x1)?;
        if !(x.x2 >= 0.0 && x.x2 <= height) {
            return Err(Error::Domain {
                what: "stream_gap",
                value: x.x2,
                domain: "0 <= x2 <= H(x1)",
            });
        }
        let a = self.coef_a(x.x1);
        let t = x.x2 / height;
        Ok(x.x1 * ((1.0 - a) * t + a * t * t * t))
    }

    pub fn branch_at(&self, x: Point) -> Result<Branch> {
        match self.geom.classify_point(x) {
            Region::Disk => Ok(Branch::Rigid),
            Region::GapCore | Region::GapHalf => Ok(Branch::Blend),
            Region::FluidOuter => Ok(Branch::Far),
            Region::Outside => Err(Error::Domain {
                what: "test field",
                value: if self.geom.in_container(Point::new(x.x1, self.geom.lp / 2.0)) {
                    x.x2
                } else {
                    x.x1
                },
                domain: "closed container",
            }),
        }
    }

    /// Jet of `Psi` using a prescribed branch formula (used for one-sided
    /// boundary traces).
    pub fn stream_jet_on(&self, branch: Branch, x: Point) -> Result<VelocityJet> {
        let x1 = Jet::var1(x.x1);
        let x2 = Jet::var2(x.x2);
        let psi = match branch {
            Branch::Rigid => x1,
            Branch::Far => self.phi0_jet(x1, x2),
            Branch::Blend => {
                let chi = self.chi_jet(x1, x2);
                let phi_s = self.phi_s_jet(x1, x2)?;
                if chi == Jet::constant(1.0) {
                    phi_s
                } else {
                    chi * phi_s + (1.0 - chi) * self.phi0_jet(x1, x2)
                }
            }
        };
        if !psi.is_finite() {
            return Err(Error::NonFinite("stream function jet"));
        }
        Ok(VelocityJet {
            point: x,
            branch,
            psi,
        })
    }

    /// Jet of `Psi` at `x`, branch chosen by region.
    pub fn velocity_jet(&self, x: Point) -> Result<VelocityJet> {
        let branch = self.branch_at(x)?;
        self.stream_jet_on(branch, x)
    }

    /// `Psi(x)` on the closed container.
    pub fn stream(&self, x: Point) -> Result<f64> {
        Ok(self.velocity_jet(x)?.psi.value())
    }

    /// `w_h(x) = (-d2 Psi, d1 Psi)`.
    pub fn velocity(&self, x: Point) -> Result<Vec2> {
        Ok(self.velocity_jet(x)?.velocity())
    }

    /// Fluid-side trace on the boundary described by `frame`.
    pub fn boundary_jet(&self, part: BoundaryPart, frame: &BoundaryFrame) -> Result<VelocityJet> {
        let p = frame.point;
        let branch = match part {
            BoundaryPart::Disk | BoundaryPart::Bottom
                if p.x1.abs() <= HALF_GAP_HALF_WIDTH && p.x2 < self.geom.disk_center().x2 =>
            {
                Branch::Blend
            }
            _ => Branch::Far,
        };
        self.stream_jet_on(branch, p)
    }

    /// Fluid-side jet on the disk boundary at polar angle `theta`.
    pub fn disk_trace(&self, theta: f64) -> Result<(BoundaryFrame, VelocityJet)> {
        let mut frame = self.geom.disk_boundary(theta);
        if frame.point.x1.abs() <= HALF_GAP_HALF_WIDTH && frame.point.x2 < self.geom.disk_center().x2 {
            // snap onto the graph x2 = H(x1) so the gap formula sees t = 1
            frame.point.x2 = self.geom.gap_height(frame.point.x1)?;
        }
        let jet = self.boundary_jet(BoundaryPart::Disk, &frame)?;
        Ok((frame, jet))
    }

    /// `2 D(w_h) n . tau` on the disk boundary (fluid side).
    pub fn shear_on_disk(&self, theta: f64) -> Result<f64> {
        let (frame, jet) = self.disk_trace(theta)?;
        Ok(jet.shear(frame.normal, frame.tangent))
    }

    /// Same as [`shear_on_disk`](Self::shear_on_disk), parametrized by the
    /// abscissa of a lower-arc point.
    pub fn shear_on_lower_disk(&self, x1: f64) -> Result<f64> {
        let frame = self.geom.lower_disk_boundary(x1)?;
        let jet = self.boundary_jet(BoundaryPart::Disk, &frame)?;
        Ok(jet.shear(frame.normal, frame.tangent))
    }

    /// Pressure `q_h = chi q~` (zero outside the half gap).
    pub fn pressure(&self, x: Point) -> Result<f64> {
        if self.branch_at(x)? != Branch::Blend {
            return Ok(0.0);
        }
        self.pressure_on_blend(x)
    }

    /// Pressure evaluated with the half-gap formula (used for disk traces).
    pub fn pressure_on_blend(&self, x: Point) -> Result<f64> {
        let x1 = Jet::var1(x.x1);
        let x2 = Jet::var2(x.x2);
        let chi = self.chi_jet(x1, x2).value();
        if chi == 0.0 {
            return Ok(0.0);
        }
        Ok(chi * self.pressure_tilde(x)?)
    }

    /// `q~(x) = int_{-1/2}^{x1} (I1 + I2) ds + d12 Psi + E(x1, x2)`.
    pub fn pressure_tilde(&self, x: Point) -> Result<f64> {
        let jet = self.stream_jet_on(Branch::Blend, x)?;
        let e = self.explicit_pressure_jet(Jet::var1(x.x1), Jet::var2(x.x2))?;
        Ok(self.pressure_integral(x.x1)? + jet.psi.d(1, 1) + e.value())
    }

    /// `int_{-1/2}^{x1} (I1 + I2)(s) ds`. Both integrands are odd in `s`, so the
    /// integral is even and is evaluated up to `-|x1|`.
    pub fn pressure_integral(&self, x1: f64) -> Result<f64> {
        if !(x1.abs() <= HALF_GAP_HALF_WIDTH) {
            return Err(Error::Domain {
                what: "pressure_integral",
                value: x1,
                domain: "|x1| <= 1/2",
            });
        }
        let upper = -x1.abs();
        let mut failure = None;
        let r = adaptive_gk(
            |s| match self.pressure_integrand(s) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            -HALF_GAP_HALF_WIDTH,
            upper,
            self.pressure_tol,
            PRESSURE_REL_TOL,
            PRESSURE_MAX_SEGMENTS,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(r.value)
    }

    /// `I1(s) + I2(s)` with `I1 = -6 s a / H^3` and
    /// `I2 = 2 (1 - a) (2H'/H^2 - s (2H'^2/H^3 - H''/H^2))`.
    pub fn pressure_integrand(&self, s: f64) -> Result<f64> {
        let d = self.geom.gap_height_derivatives(s, 2)?;
        let (hh, h1, h2) = (d[0], d[1], d[2]);
        let a = self.coef_a(s);
        let i1 = -6.0 * s * a / (hh * hh * hh);
        let i2 = 2.0 * (1.0 - a) * (2.0 * h1 / (hh * hh) - s * (2.0 * h1 * h1 / (hh * hh * hh) - h2 / (hh * hh)));
        Ok(i1 + i2)
    }

    /// Explicit correction
    /// `E = -3/2 x2^2 (H''/H^2 - 2H'^2/H^3) + x1 x2^2 (3H''H'/H^3 - 3H'^3/H^4 - H'''/(2H^2))`.
    pub fn explicit_pressure_jet(&self, x1: Jet, x2: Jet) -> Result<Jet> {
        let d = self.geom.gap_height_derivatives(x1.value(), 6)?;
        let hj: Vec<Jet> = (0..4).map(|k| Jet::from_x1_derivatives(&d[k..k + 4])).collect();
        let (h0, h1, h2, h3) = (hj[0], hj[1], hj[2], hj[3]);
        let inv = h0.recip();
        let inv2 = inv * inv;
        let inv3 = inv2 * inv;
        let inv4 = inv3 * inv;
        let x2sq = x2 * x2;
        let first = x2sq * (h2 * inv2 - 2.0 * h1 * h1 * inv3) * -1.5;
        let second = x1 * x2sq * (3.0 * h2 * h1 * inv3 - 3.0 * h1 * h1 * h1 * inv4 - 0.5 * h3 * inv2);
        Ok(first + second)
    }

    /// `Delta w_h - grad q_h`.
    pub fn residual(&self, x: Point) -> Result<Vec2> {
        let jet = self.velocity_jet(x)?;
        self.residual_from_jet(&jet)
    }

    pub fn residual_from_jet(&self, jet: &VelocityJet) -> Result<Vec2> {
        let lap = jet.laplacian();
        if jet.branch != Branch::Blend {
            return Ok(lap);
        }
        let g = self.pressure_gradient(jet)?;
        Ok([lap[0] - g[0], lap[1] - g[1]])
    }

    /// `grad q_h = q~ grad chi + chi grad q~` on the half gap.
    pub fn pressure_gradient(&self, jet: &VelocityJet) -> Result<Vec2> {
        let x = jet.point;
        let x1 = Jet::var1(x.x1);
        let x2 = Jet::var2(x.x2);
        let chi = self.chi_jet(x1, x2);
        if chi.value() == 0.0 && chi.gradient() == [0.0, 0.0] {
            return Ok([0.0, 0.0]);
        }
        let e = self.explicit_pressure_jet(x1, x2)?;
        let p = &jet.psi;
        let dq1 = self.pressure_integrand(x.x1)? + p.d(2, 1) + e.d(1, 0);
        let dq2 = p.d(1, 2) + e.d(0, 1);
        let cg = chi.gradient();
        let mut g = [chi.value() * dq1, chi.value() * dq2];
        if cg != [0.0, 0.0] {
            let qt = self.pressure_integral(x.x1)? + p.d(1, 1) + e.value();
            g[0] += qt * cg[0];
            g[1] += qt * cg[1];
        }
        Ok(g)
    }

    /// Full sample: velocity, gradients, pressure and residual.
    pub fn sample(&self, x: Point) -> Result<FieldSample> {
        let jet = self.velocity_jet(x)?;
        let grad = jet.grad();
        let q = if jet.branch == Branch::Blend {
            self.pressure_on_blend(x)?
        } else {
            0.0
        };
        Ok(FieldSample {
            point: x,
            w: jet.velocity(),
            grad_w: grad,
            d: sym(grad),
            q,
            residual: self.residual_from_jet(&jet)?,
        })
    }

    fn phi_s_jet(&self, x1: Jet, x2: Jet) -> Result<Jet> {
        let d = self.geom.gap_height_derivatives(x1.value(), 3)?;
        let height = Jet::from_x1_derivatives(&d);
        let a = coef_a_jet(&self.params, self.geom.h, x1);
        let t = x2 / height;
        Ok(x1 * ((1.0 - a) * t + a * t * t * t))
    }

    fn chi_jet(&self, x1: Jet, x2: Jet) -> Jet {
        let p = self.params.chi_profile;
        let c1 = p.plateau_jet(x1, CORE_HALF_WIDTH, HALF_GAP_HALF_WIDTH);
        let c2 = p.plateau_jet(x2, CORE_HALF_WIDTH, HALF_GAP_HALF_WIDTH);
        c1 * c2
    }

    fn phi0_jet(&self, x1: Jet, x2: Jet) -> Jet {
        let c = self.geom.disk_center();
        let dy = x2 - c.x2;
        let r2 = x1 * x1 + dy * dy;
        let delta = self.geom.delta;
        let r0 = r2.value().sqrt();
        if r0 < 1.0 + delta {
            return x1;
        }
        if r0 >= 1.0 + 2.0 * delta {
            return Jet::constant(0.0);
        }
        let r = r2.sqrt();
        let u = ((r - (1.0 + delta)) * (1.0 / delta)).with_value((radial_excess(x1.value(), dy.value(), r0) - delta) / delta);
        let s = self.params.phi_profile.step_jet(u);
        x1 * (1.0 - s)
    }
}

/// `sqrt(a^2 + b^2) - 1` without the cancellation of subtracting 1 from `r`.
fn radial_excess(a: f64, b: f64, r: f64) -> f64 {
    let two_prod = |x: f64| {
        let p = x * x;
        (p, x.mul_add(x, -p))
    };
    let two_sum = |x: f64, y: f64| {
        let s = x + y;
        let z = s - x;
        (s, (x - (s - z)) + (y - z))
    };
    let (pa, ea) = two_prod(a);
    let (pb, eb) = two_prod(b);
    let (s, es) = two_sum(pa, pb);
    let (t, et) = two_sum(s, -1.0);
    (t + (et + es + ea + eb)) / (r + 1.0)
}

pub fn coef_a(params: &FieldParams, h: f64, x1: f64) -> f64 {
    params.mu1 * h + params.mu2 * x1 * x1
}

fn coef_a_jet(params: &FieldParams, h: f64, x1: Jet) -> Jet {
    x1 * x1 * params.mu2 + params.mu1 * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn field(h: f64) -> TestField {
        TestField::new(FieldParams::default(), GapGeometry::default().with_h(h)).unwrap()
    }

    #[test]
    fn coef_a_examples() {
        let p = FieldParams::default();
        assert_abs_diff_eq!(coef_a(&p, 1e-300, 0.0), 0.0, epsilon = 1e-300);
        assert_abs_diff_eq!(coef_a(&p, 1.0, 0.0), 1.0 / 6.0, epsilon = 1e-16);
        assert_abs_diff_eq!(coef_a(&p, 0.5, 0.2), 1.0 / 12.0 - 0.06, epsilon = 1e-16);
        assert_abs_diff_eq!(coef_a(&p, 0.5, 0.2), 0.0233333, epsilon = 1e-7);
    }

    #[test]
    fn stream_gap_endpoints() {
        let f = field(0.5);
        for &x1 in &[-0.4, -0.1, 0.0, 0.2, 0.49] {
            let hgt = f.geometry().gap_height(x1).unwrap();
            assert_eq!(f.stream_gap(Point::new(x1, 0.0)).unwrap(), 0.0);
            assert_abs_diff_eq!(f.stream_gap(Point::new(x1, hgt)).unwrap(), x1, epsilon = 1e-15);
        }
        assert!(f.stream_gap(Point::new(0.5, 0.1)).is_err());
        assert!(f.stream_gap(Point::new(0.1, 0.6)).is_err());
    }

    #[test]
    fn stream_gap_extended_precision_value() {
        // h = 0.5, x = (0.1, 0.25); reference from a 50-digit evaluation:
        // H = 0.5 + 1 - sqrt(0.99), a = 1/12 - 0.015, t = 0.25 / H
        let v = field(0.5).stream_gap(Point::new(0.1, 0.25)).unwrap();
        assert_relative_eq!(v, 0.046_949_948_741_091_38, epsilon = 1e-15);
    }

    #[test]
    fn stream_global_examples() {
        let f = field(0.5);
        assert_eq!(f.stream(Point::new(0.1, 0.0)).unwrap(), 0.0);
        assert_eq!(f.stream(Point::new(0.0, 1.5)).unwrap(), 0.0);
        assert!(f.stream(Point::new(3.0, 1.0)).is_err());
        // on x2 = H at |x1| = 1/4 both branches give x1
        let hgt = f.geometry().gap_height(0.25).unwrap();
        let blend = f.stream_jet_on(Branch::Blend, Point::new(0.25, hgt)).unwrap();
        let far = f.stream_jet_on(Branch::Far, Point::new(0.25, hgt)).unwrap();
        assert_abs_diff_eq!(blend.psi.value(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(far.psi.value(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn rigid_inside_disk() {
        let f = field(0.01);
        let j = f.velocity_jet(Point::new(0.3, 1.2)).unwrap();
        assert_eq!(j.velocity(), [0.0, 1.0]);
        assert_eq!(j.grad(), [[0.0, 0.0], [0.0, 0.0]]);
    }

    #[test]
    fn wall_velocity_closed_form() {
        for &h in &[1.0, 0.1, 1e-3] {
            let f = field(h);
            for &x1 in &[-0.2, 0.03, 0.11, 0.24] {
                let w = f.velocity(Point::new(x1, 0.0)).unwrap();
                let hgt = f.geometry().gap_height(x1).unwrap();
                let expected = -x1 * (1.0 - f.coef_a(x1)) / hgt;
                assert_relative_eq!(w[0], expected, epsilon = 1e-13, max_relative = 1e-13);
                assert_eq!(w[1], 0.0);
            }
        }
    }

    #[test]
    fn centreline_horizontal_velocity_vanishes() {
        let f = field(0.1);
        for &x2 in &[0.0, 0.02, 0.05, 0.099] {
            assert_eq!(f.velocity(Point::new(0.0, x2)).unwrap()[0], 0.0);
        }
    }

    #[test]
    fn shear_vanishes_at_bottom_of_disk() {
        for &h in &[1.0, 1e-2, 1e-4] {
            assert_abs_diff_eq!(field(h).shear_on_disk(-std::f64::consts::FRAC_PI_2).unwrap(), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn pressure_zero_outside_half_gap() {
        let f = field(0.1);
        assert_eq!(f.pressure(Point::new(0.7, 0.05)).unwrap(), 0.0);
        assert_eq!(f.pressure(Point::new(0.0, 3.5)).unwrap(), 0.0);
        assert_eq!(f.pressure(Point::new(0.0, 1.5)).unwrap(), 0.0);
    }

    #[test]
    fn pressure_integral_is_even() {
        let f = field(1e-3);
        for &x1 in &[0.01, 0.1, 0.3] {
            assert_eq!(f.pressure_integral(x1).unwrap(), f.pressure_integral(-x1).unwrap());
        }
        assert_abs_diff_eq!(f.pressure_integral(-0.5).unwrap(), 0.0);
    }
}
