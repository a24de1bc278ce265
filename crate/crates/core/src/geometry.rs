//! Container, disk and gap subdomains.
//!
//! The fluid occupies the rectangle `(-L, L) x (0, Lp)` minus the closed unit
//! disk centred at `(0, 1 + h)`. Below the disk the thin gap is described by
//! the graph `x2 < H(x1) = h + gamma(x1)`; the strip `|x1| < 1/4` is the gap
//! core and `|x1| < 1/2` the half gap where the cutoff blends the lubrication
//! stream function into the far field.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-width of the gap core strip.
pub const CORE_HALF_WIDTH: f64 = 0.25;
/// Half-width of the half-gap strip (support of the cutoff in `x1`).
pub const HALF_GAP_HALF_WIDTH: f64 = 0.5;

pub type Vec2 = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x1: f64,
    pub x2: f64,
}

impl Point {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn mirrored(self) -> Self {
        Self::new(-self.x1, self.x2)
    }

    pub fn distance_to(self, other: Point) -> f64 {
        (self.x1 - other.x1).hypot(self.x2 - other.x2)
    }
}

impl From<Vec2> for Point {
    fn from(v: Vec2) -> Self {
        Self::new(v[0], v[1])
    }
}

/// `gamma(x1) = 1 - sqrt(1 - x1^2)`, the depth of the unit circle below its
/// lowest point.
pub fn gamma(x1: f64) -> Result<f64> {
    if !(x1.abs() <= 1.0) {
        return Err(Error::Domain {
            what: "gamma",
            value: x1,
            domain: "|x1| <= 1",
        });
    }
    // x^2 / (1 + sqrt(1 - x^2)) avoids cancellation near 0.
    let x2 = x1 * x1;
    Ok(x2 / (1.0 + (1.0 - x2).sqrt()))
}

/// Derivatives `gamma^(k)(x1)` for `k = 0..=order`, from the Taylor series of
/// `sqrt(1 - (x1 + e)^2)` in `e`.
pub fn gamma_derivatives(x1: f64, order: usize) -> Result<Vec<f64>> {
    let g0 = gamma(x1)?;
    if x1.abs() == 1.0 && order > 0 {
        return Err(Error::Domain {
            what: "gamma_derivatives",
            value: x1,
            domain: "|x1| < 1",
        });
    }
    // u(e) = (1 - x1^2) - 2 x1 e - e^2, s = sqrt(u)
    let mut u = vec![0.0; order + 1];
    u[0] = 1.0 - x1 * x1;
    if order >= 1 {
        u[1] = -2.0 * x1;
    }
    if order >= 2 {
        u[2] = -1.0;
    }
    let mut s = vec![0.0; order + 1];
    s[0] = u[0].sqrt();
    for k in 1..=order {
        let conv: f64 = (1..k).map(|j| s[j] * s[k - j]).sum();
        s[k] = (u[k] - conv) / (2.0 * s[0]);
    }
    let mut out = Vec::with_capacity(order + 1);
    out.push(g0);
    let mut fact = 1.0;
    for (k, sk) in s.iter().enumerate().skip(1) {
        fact *= k as f64;
        out.push(-sk * fact);
    }
    Ok(out)
}

/// Region tags partitioning the closed container.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Disk,
    GapCore,
    GapHalf,
    FluidOuter,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFrame {
    pub point: Point,
    /// Outer normal of the fluid domain (points into the disk).
    pub normal: Vec2,
    pub tangent: Vec2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapGeometry {
    /// Gap height: distance between the disk and the bottom wall.
    pub h: f64,
    /// Container half-width.
    pub l: f64,
    /// Container height.
    pub lp: f64,
    /// Width of the far-field cutoff annulus.
    pub delta: f64,
}

impl Default for GapGeometry {
    fn default() -> Self {
        Self {
            h: 0.1,
            l: 2.0,
            lp: 4.0,
            delta: 0.01,
        }
    }
}

impl GapGeometry {
    pub fn new(h: f64, l: f64, lp: f64, delta: f64) -> Self {
        Self { h, l, lp, delta }
    }

    pub fn with_h(&self, h: f64) -> Self {
        Self { h, ..*self }
    }

    pub fn disk_center(&self) -> Point {
        Point::new(0.0, 1.0 + self.h)
    }

    /// `H(x1) = h + gamma(x1)`.
    pub fn gap_height(&self, x1: f64) -> Result<f64> {
        Ok(self.h + gamma(x1)?)
    }

    /// `H, H', H'', ...` up to `order`.
    pub fn gap_height_derivatives(&self, x1: f64, order: usize) -> Result<Vec<f64>> {
        let mut d = gamma_derivatives(x1, order)?;
        d[0] += self.h;
        Ok(d)
    }

    pub fn in_container(&self, x: Point) -> bool {
        x.x1.abs() <= self.l && (0.0..=self.lp).contains(&x.x2)
    }

    pub fn in_disk(&self, x: Point) -> bool {
        x.distance_to(self.disk_center()) <= 1.0
    }

    /// Region tag. The disk is closed; gap strips are closed at the wall and
    /// at `|x1| = 1/4, 1/2` (inner-region convention), open at the disk.
    pub fn classify_point(&self, x: Point) -> Region {
        if !self.in_container(x) {
            return Region::Outside;
        }
        if self.in_disk(x) {
            return Region::Disk;
        }
        let a = x.x1.abs();
        if a <= HALF_GAP_HALF_WIDTH {
            // |x1| <= 1/2 < 1 so gamma is defined
            let height = self.h + gamma(x.x1).unwrap_or(f64::INFINITY);
            if x.x2 < height {
                return if a <= CORE_HALF_WIDTH {
                    Region::GapCore
                } else {
                    Region::GapHalf
                };
            }
        }
        Region::FluidOuter
    }

    /// Point, fluid outer normal `n = -e_r` and tangent `tau = e_theta` on the
    /// disk boundary.
    pub fn disk_boundary(&self, theta: f64) -> BoundaryFrame {
        let (s, c) = theta.sin_cos();
        let center = self.disk_center();
        BoundaryFrame {
            point: Point::new(center.x1 + c, center.x2 + s),
            normal: [-c, -s],
            tangent: [-s, c],
        }
    }

    /// Disk boundary point below the centre with abscissa `x1`, as a frame.
    pub fn lower_disk_boundary(&self, x1: f64) -> Result<BoundaryFrame> {
        let height = self.gap_height(x1)?;
        let ny = (1.0 - x1 * x1).sqrt();
        Ok(BoundaryFrame {
            point: Point::new(x1, height),
            normal: [-x1, ny],
            tangent: [ny, x1],
        })
    }

    pub fn validate(&self) -> GeometryReport {
        validate_geometry(self)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        match self.validate().first_violation() {
            None => Ok(()),
            Some(v) => Err(Error::invalid("geometry", v.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum GeometryViolation {
    NonPositiveGap { h: f64 },
    NonPositiveDelta { delta: f64 },
    HalfWidth { l: f64 },
    Height { lp: f64, required: f64 },
    AnnulusOutside { x1: f64, x2: f64, radius: f64 },
}

impl std::fmt::Display for GeometryViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NonPositiveGap { h } => write!(f, "gap height h = {h} must be positive"),
            Self::NonPositiveDelta { delta } => write!(f, "delta = {delta} must be positive"),
            Self::HalfWidth { l } => write!(f, "half-width L = {l} must exceed 1"),
            Self::Height { lp, required } => {
                write!(f, "height Lp = {lp} must exceed 2 + h = {required}")
            }
            Self::AnnulusOutside { x1, x2, radius } => write!(
                f,
                "cutoff annulus point ({x1}, {x2}) at radius {radius} leaves the container"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub violations: Vec<GeometryViolation>,
}

impl GeometryReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first_violation(&self) -> Option<&GeometryViolation> {
        self.violations.first()
    }
}

const ANNULUS_SAMPLES: usize = 4096;

/// Checks `L > 1`, `Lp > 2 + h` and that every point of the cutoff annulus
/// `1 + delta <= |x - c| <= 1 + 2 delta` outside the strip `|x1| < 1/4` lies in
/// the open container. The annulus is sampled densely, together with its
/// extremal points (strip corners, sides, top).
pub fn validate_geometry(g: &GapGeometry) -> GeometryReport {
    let mut violations = Vec::new();
    if !(g.h > 0.0) {
        violations.push(GeometryViolation::NonPositiveGap { h: g.h });
    }
    if !(g.delta > 0.0) {
        violations.push(GeometryViolation::NonPositiveDelta { delta: g.delta });
    }
    if !(g.l > 1.0) {
        violations.push(GeometryViolation::HalfWidth { l: g.l });
    }
    if !(g.lp > 2.0 + g.h) {
        violations.push(GeometryViolation::Height {
            lp: g.lp,
            required: 2.0 + g.h,
        });
    }
    if !(g.h > 0.0 && g.delta > 0.0) {
        return GeometryReport { violations };
    }

    let c = g.disk_center();
    let inside = |p: Point| p.x1.abs() < g.l && p.x2 > 0.0 && p.x2 < g.lp;
    let radii = [1.0 + g.delta, 1.0 + 1.5 * g.delta, 1.0 + 2.0 * g.delta];
    for &r in &radii {
        let mut candidates: Vec<Point> = (0..ANNULUS_SAMPLES)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / ANNULUS_SAMPLES as f64;
                Point::new(c.x1 + r * t.cos(), c.x2 + r * t.sin())
            })
            .collect();
        // extremal points: strip edges (lowest allowed), sides and top
        if r > CORE_HALF_WIDTH {
            let dy = (r * r - CORE_HALF_WIDTH * CORE_HALF_WIDTH).sqrt();
            for sx in [-1.0, 1.0] {
                candidates.push(Point::new(sx * CORE_HALF_WIDTH, c.x2 - dy));
                candidates.push(Point::new(sx * CORE_HALF_WIDTH, c.x2 + dy));
            }
        }
        candidates.push(Point::new(r, c.x2));
        candidates.push(Point::new(-r, c.x2));
        candidates.push(Point::new(0.0, c.x2 + r));
        for p in candidates {
            if p.x1.abs() < CORE_HALF_WIDTH {
                continue;
            }
            if !inside(p) {
                violations.push(GeometryViolation::AnnulusOutside {
                    x1: p.x1,
                    x2: p.x2,
                    radius: r,
                });
                return GeometryReport { violations };
            }
        }
    }
    GeometryReport { violations }
}
