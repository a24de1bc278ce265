use std::f64::consts::PI;

use rayon::prelude::*;

use super::rules::{adaptive_gk, compensated_sum, composite_nodes, GaussLegendre};
use super::{QuadratureSpec, PANEL_ORDER};
use crate::error::{Error, Result};
use crate::fields::BoundaryPart;
use crate::geometry::{BoundaryFrame, GapGeometry, Point, CORE_HALF_WIDTH, HALF_GAP_HALF_WIDTH};

/// Pieces of the fluid domain covered by the quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrationRegion {
    /// `|x1| < 1/4, 0 < x2 < H`.
    GapCore,
    /// `1/4 < |x1| < 1/2, 0 < x2 < H`.
    HalfBand,
    /// `1 < |x - c| < 1 + 2 delta` minus the lower sector `|x1| < 1/2`.
    Annulus,
}

impl IntegrationRegion {
    pub const SUPPORT: [IntegrationRegion; 3] = [
        IntegrationRegion::GapCore,
        IntegrationRegion::HalfBand,
        IntegrationRegion::Annulus,
    ];
}

/// Breakpoints of the graded `x1` panels on `[0, 1/4]`.
pub fn gap_breakpoints(h: f64, panels: usize) -> Vec<f64> {
    let panels = panels.max(2);
    let end = CORE_HALF_WIDTH;
    // first panel resolves the sqrt(h) scale, then geometric growth to 1/4
    let first = (0.25 * h.sqrt()).min(end / panels as f64);
    let ratio = if panels > 1 {
        (end / first).powf(1.0 / (panels - 1) as f64)
    } else {
        1.0
    };
    let mut pts = vec![0.0];
    let mut x = first;
    for _ in 0..panels - 1 {
        pts.push(x);
        x *= ratio;
    }
    pts.push(end);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    pts
}

/// `x2`-breakpoints (mapped to `t`) inside one gap column: the cutoff levels
/// `x2 = 1/4, 1/2` and the crossings of the annulus radii.
pub(crate) fn column_breaks(g: &GapGeometry, x1: f64, height: f64) -> Vec<f64> {
    let mut ts = vec![0.0, 1.0];
    for level in [CORE_HALF_WIDTH, HALF_GAP_HALF_WIDTH] {
        ts.push(level / height);
    }
    let c = g.disk_center();
    for r in [1.0 + g.delta, 1.0 + 2.0 * g.delta] {
        if r > x1.abs() {
            ts.push((c.x2 - (r * r - x1 * x1).sqrt()) / height);
        }
    }
    ts.retain(|t| (0.0..=1.0).contains(t));
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    ts
}

fn column_integral<F>(g: &GapGeometry, x1: f64, nodes_x2: usize, f: &F) -> Result<f64>
where
    F: Fn(Point) -> Result<f64> + Sync,
{
    let height = g.gap_height(x1)?;
    let breaks = column_breaks(g, x1, height);
    let pieces = breaks.len() - 1;
    let per = (nodes_x2 / pieces).max(PANEL_ORDER);
    let rule = GaussLegendre::new(per);
    let mut vals = Vec::with_capacity(per * pieces);
    for w in breaks.windows(2) {
        for (t, wt) in rule.mapped(w[0], w[1]) {
            let v = f(Point::new(x1, t * height))?;
            vals.push(wt * v);
        }
    }
    let s = compensated_sum(vals) * height;
    if !s.is_finite() {
        return Err(Error::NonFinite("gap integrand"));
    }
    Ok(s)
}

fn integrate_columns<F>(g: &GapGeometry, x1_nodes: Vec<(f64, f64)>, nodes_x2: usize, f: &F) -> Result<f64>
where
    F: Fn(Point) -> Result<f64> + Sync,
{
    let cols: Vec<Result<f64>> = x1_nodes
        .par_iter()
        .map(|&(x1, w)| column_integral(g, x1, nodes_x2, f).map(|v| w * v))
        .collect();
    let vals: Result<Vec<f64>> = cols.into_iter().collect();
    Ok(compensated_sum(vals?))
}

fn mirrored(nodes: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = nodes.iter().rev().map(|&(x, w)| (-x, w)).collect();
    out.extend(nodes);
    out
}

/// `int_{G_h} f` over the gap core via the mapping `x2 = t H(x1)`.
pub fn integrate_gap<F>(f: F, g: &GapGeometry, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(Point) -> Result<f64> + Sync,
{
    spec.validate()?;
    let rule = GaussLegendre::new(PANEL_ORDER);
    let half = composite_nodes(&gap_breakpoints(g.h, spec.panels_per_half()), &rule);
    integrate_columns(g, mirrored(half), spec.nodes_x2, &f)
}

/// `int f` over the band `1/4 < |x1| < 1/2` of the half gap.
pub fn integrate_half_band<F>(f: F, g: &GapGeometry, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(Point) -> Result<f64> + Sync,
{
    spec.validate()?;
    let rule = GaussLegendre::new(PANEL_ORDER);
    let panels = (spec.panels_per_half() / 2).max(2);
    let breaks: Vec<f64> = (0..=panels)
        .map(|k| CORE_HALF_WIDTH + (HALF_GAP_HALF_WIDTH - CORE_HALF_WIDTH) * k as f64 / panels as f64)
        .collect();
    let half = composite_nodes(&breaks, &rule);
    integrate_columns(g, mirrored(half), spec.nodes_x2, &f)
}

/// `int f` over the cutoff annulus `1 < r < 1 + 2 delta` around the disk,
/// excluding the lower sector `|x1| < 1/2` (which belongs to the half gap).
pub fn integrate_annulus<F>(f: F, g: &GapGeometry, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(Point) -> Result<f64> + Sync,
{
    spec.validate()?;
    let c = g.disk_center();
    let radial = GaussLegendre::new(PANEL_ORDER);
    let r_breaks = [1.0, 1.0 + g.delta, 1.0 + 1.5 * g.delta, 1.0 + 2.0 * g.delta];
    let r_nodes = composite_nodes(&r_breaks, &radial);
    let theta_panels = 4 * spec.boundary_panels();
    let rule = GaussLegendre::new(PANEL_ORDER);
    let rows: Vec<Result<f64>> = r_nodes
        .par_iter()
        .map(|&(r, wr)| {
            let gap = (HALF_GAP_HALF_WIDTH / r).asin();
            let t0 = -PI / 2.0 + gap;
            let t1 = 3.0 * PI / 2.0 - gap;
            let mut vals = Vec::with_capacity(theta_panels * PANEL_ORDER);
            for k in 0..theta_panels {
                let a = t0 + (t1 - t0) * k as f64 / theta_panels as f64;
                let b = t0 + (t1 - t0) * (k + 1) as f64 / theta_panels as f64;
                for (t, wt) in rule.mapped(a, b) {
                    let p = Point::new(c.x1 + r * t.cos(), c.x2 + r * t.sin());
                    vals.push(wt * f(p)?);
                }
            }
            Ok(wr * r * compensated_sum(vals))
        })
        .collect();
    let rows: Result<Vec<f64>> = rows.into_iter().collect();
    Ok(compensated_sum(rows?))
}

pub fn integrate_region<F>(region: IntegrationRegion, f: F, g: &GapGeometry, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(Point) -> Result<f64> + Sync,
{
    match region {
        IntegrationRegion::GapCore => integrate_gap(f, g, spec),
        IntegrationRegion::HalfBand => integrate_half_band(f, g, spec),
        IntegrationRegion::Annulus => integrate_annulus(f, g, spec),
    }
}

/// `int_{-1/4}^{1/4} |x1|^e / H(x1)^p dx1` by adaptive Gauss-Kronrod.
pub fn moment_integral(e: u32, p: u32, g: &GapGeometry) -> Result<f64> {
    if e > 1 {
        return Err(Error::invalid("e", format!("exponent must be 0 or 1, got {e}")));
    }
    if p < 1 {
        return Err(Error::invalid("p", "exponent must be at least 1"));
    }
    if !(g.h > 0.0) {
        return Err(Error::invalid("h", "gap height must be positive"));
    }
    let h = g.h;
    let integrand = |x: f64| {
        let height = h + crate::geometry::gamma(x).unwrap_or(f64::NAN);
        x.powi(e as i32) / height.powi(p as i32)
    };
    // pre-split on the sqrt(h) scale, then refine adaptively on each piece
    let breaks = gap_breakpoints(h, 12);
    let mut pieces = Vec::with_capacity(breaks.len());
    for w in breaks.windows(2) {
        let r = adaptive_gk(integrand, w[0], w[1], 0.0, 1e-13, 2000)?;
        pieces.push(r.value);
    }
    Ok(2.0 * compensated_sum(pieces))
}

/// Parameter breakpoints for the lower disk arc and the bottom wall,
/// `x1 in [-1/2, 1/2]`, graded toward `x1 = 0`.
pub fn lower_arc_breakpoints(h: f64, spec: &QuadratureSpec) -> Vec<f64> {
    let half = gap_breakpoints(h, spec.panels_per_half());
    let band = (spec.panels_per_half() / 2).max(2);
    let mut pts: Vec<f64> = half.clone();
    for k in 1..=band {
        pts.push(CORE_HALF_WIDTH + (HALF_GAP_HALF_WIDTH - CORE_HALF_WIDTH) * k as f64 / band as f64);
    }
    let mut all: Vec<f64> = pts.iter().rev().map(|x| -x).collect();
    all.extend(pts.into_iter().skip(1));
    all
}

/// Quadrature nodes `(part, frame, weight)` for the whole fluid boundary:
/// four walls (arc length) and the disk circle.
pub fn boundary_panels(g: &GapGeometry, spec: &QuadratureSpec) -> Result<Vec<(BoundaryPart, BoundaryFrame, f64)>> {
    spec.validate()?;
    let rule = GaussLegendre::new(PANEL_ORDER);
    let panels = spec.boundary_panels();
    let mut out = Vec::new();
    let uniform = |a: f64, b: f64, n: usize| -> Vec<f64> { (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect() };

    // bottom wall: graded centre, uniform flanks
    let centre = lower_arc_breakpoints(g.h, spec);
    let mut bottom = uniform(-g.l, -HALF_GAP_HALF_WIDTH, panels);
    bottom.extend(centre.iter().skip(1));
    bottom.extend(uniform(HALF_GAP_HALF_WIDTH, g.l, panels).into_iter().skip(1));
    for (x, w) in composite_nodes(&bottom, &rule) {
        out.push((
            BoundaryPart::Bottom,
            BoundaryFrame {
                point: Point::new(x, 0.0),
                normal: [0.0, -1.0],
                tangent: [1.0, 0.0],
            },
            w,
        ));
    }
    for (y, w) in composite_nodes(&uniform(0.0, g.lp, panels), &rule) {
        out.push((
            BoundaryPart::Right,
            BoundaryFrame {
                point: Point::new(g.l, y),
                normal: [1.0, 0.0],
                tangent: [0.0, 1.0],
            },
            w,
        ));
        out.push((
            BoundaryPart::Left,
            BoundaryFrame {
                point: Point::new(-g.l, y),
                normal: [-1.0, 0.0],
                tangent: [0.0, -1.0],
            },
            w,
        ));
    }
    for (x, w) in composite_nodes(&uniform(-g.l, g.l, 2 * panels), &rule) {
        out.push((
            BoundaryPart::Top,
            BoundaryFrame {
                point: Point::new(x, g.lp),
                normal: [0.0, 1.0],
                tangent: [-1.0, 0.0],
            },
            w,
        ));
    }
    // lower arc parametrized by x1 (ds = dx1 / sqrt(1 - x1^2)), rest by angle
    for (x, w) in composite_nodes(&centre, &rule) {
        let frame = g.lower_disk_boundary(x)?;
        out.push((BoundaryPart::Disk, frame, w / (1.0 - x * x).sqrt()));
    }
    let t0 = -PI / 3.0;
    let t1 = 4.0 * PI / 3.0;
    for (t, w) in composite_nodes(&uniform(t0, t1, 4 * panels), &rule) {
        out.push((BoundaryPart::Disk, g.disk_boundary(t), w));
    }
    Ok(out)
}

/// `int_{dOmega_h} f ds` over the walls and the disk circle.
pub fn boundary_integral<F>(f: F, g: &GapGeometry, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(BoundaryPart, &BoundaryFrame) -> Result<f64> + Sync,
{
    let nodes = boundary_panels(g, spec)?;
    let vals: Vec<Result<f64>> = nodes.par_iter().map(|(part, frame, w)| f(*part, frame).map(|v| w * v)).collect();
    let vals: Result<Vec<f64>> = vals.into_iter().collect();
    let s = compensated_sum(vals?);
    if !s.is_finite() {
        return Err(Error::NonFinite("boundary integrand"));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    /// `int_{-a}^{a} gamma = a - (a sqrt(1 - a^2) + asin a)`... closed form of
    /// `int sqrt(1 - x^2)` is `(x sqrt(1-x^2) + asin x) / 2`.
    fn gamma_integral(a: f64) -> f64 {
        2.0 * (a - 0.5 * (a * (1.0 - a * a).sqrt() + a.asin()))
    }

    #[test]
    fn gap_area() {
        for &h in &[1.0, 0.1, 1e-3, 1e-5] {
            let g = GapGeometry::default().with_h(h);
            let area = integrate_gap(|_| Ok(1.0), &g, &spec()).unwrap();
            assert_relative_eq!(area, h / 2.0 + gamma_integral(0.25), max_relative = 1e-12);
            let half = integrate_gap(|p| Ok(p.x2 / g.gap_height(p.x1)?), &g, &spec()).unwrap();
            assert_relative_eq!(half, area / 2.0, max_relative = 1e-12);
            let odd = integrate_gap(|p| Ok(p.x1 * (1.0 + p.x2)), &g, &spec()).unwrap();
            assert!(odd.abs() < spec().abs_tol);
        }
    }

    #[test]
    fn half_band_area() {
        let g = GapGeometry::default().with_h(0.01);
        let area = integrate_half_band(|_| Ok(1.0), &g, &spec()).unwrap();
        let expected = 2.0 * (0.25 * 0.01) + gamma_integral(0.5) - gamma_integral(0.25);
        assert_relative_eq!(area, expected, max_relative = 1e-12);
    }

    #[test]
    fn annulus_area() {
        let g = GapGeometry::default().with_h(0.01);
        let area = integrate_annulus(|_| Ok(1.0), &g, &spec()).unwrap();
        // oracle: radial integral of the angular range, integrated symbolically
        let r1 = 1.0 + 2.0 * g.delta;
        let prim = |r: f64| {
            // int r (2 pi - 2 asin(1/(2r))) dr
            let s = (4.0 * r * r - 1.0).sqrt();
            PI * r * r - (r * r * (1.0 / (2.0 * r)).asin() + 0.25 * s)
        };
        assert_relative_eq!(area, prim(r1) - prim(1.0), max_relative = 1e-10);
    }

    #[test]
    fn boundary_perimeter() {
        let g = GapGeometry::default().with_h(0.3);
        let p = boundary_integral(|_, _| Ok(1.0), &g, &spec()).unwrap();
        assert_relative_eq!(p, 2.0 * (2.0 * g.l + g.lp) + 2.0 * PI, max_relative = 1e-12);
    }

    #[test]
    fn moment_e1_p1_against_parabolic_oracle() {
        for &h in &[1e-4, 1e-6] {
            let g = GapGeometry::default().with_h(h);
            let v = moment_integral(1, 1, &g).unwrap();
            let oracle = 2.0 * (1.0 + 0.0625 / (2.0 * h)).ln();
            assert!((v / oracle - 1.0).abs() < 0.02, "h={h} v={v} oracle={oracle}");
        }
    }

    #[test]
    fn moment_matches_exact_parabola_when_gamma_replaced() {
        // sanity of the adaptive path on the closed-form integrand
        let h: f64 = 1e-5;
        let breaks = gap_breakpoints(h, 12);
        let mut s = 0.0;
        for w in breaks.windows(2) {
            s += adaptive_gk(|x| x / (h + 0.5 * x * x), w[0], w[1], 0.0, 1e-13, 2000).unwrap().value;
        }
        assert_relative_eq!(2.0 * s, 2.0 * (1.0 + 0.0625 / (2.0 * h)).ln(), max_relative = 1e-11);
    }

    #[test]
    fn moment_rejects_bad_exponents() {
        let g = GapGeometry::default();
        assert!(moment_integral(2, 1, &g).is_err());
        assert!(moment_integral(0, 0, &g).is_err());
    }
}
