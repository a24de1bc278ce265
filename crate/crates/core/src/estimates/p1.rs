use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{validate_ladder, ScalingReport, SlopeAxis, SLOPE_TOLERANCE};
use crate::error::{Error, Result};
use crate::fields::{Branch, FieldParams, TestField, VelocityJet};
use crate::geometry::{GapGeometry, Point, HALF_GAP_HALF_WIDTH};
use crate::quadrature::rules::{compensated_sum, composite_nodes, GaussLegendre};
use crate::quadrature::{
    column_breaks, disk_force, integrate_gap, integrate_region, l2_norms, linf_disk_shear, lower_arc_breakpoints,
    moment_integral, IntegrationRegion, NormBundle, QuadratureSpec, PANEL_ORDER,
};

/// Relative step of the central difference in `h`.
const H_STEP: f64 = 1e-4;
const COLUMN_ORDER: usize = 16;

/// Everything the bounds on the test field refer to, at one gap height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct P1Measurement {
    pub h: f64,
    pub norms: NormBundle,
    /// `||int_0^{x2} d_h w_1||_{L2(G_h)}`.
    pub int_dh_w1_l2_gap: f64,
    /// Sampled `||int_0^{x2} grad w||_{Linf(G_h)}` (Frobenius norm).
    pub int_grad_w_linf_gap: f64,
    /// Sampled `||int_0^H grad w||_{Linf(-1/2, 1/2)}`.
    pub column_grad_linf: f64,
    /// `||d_h w_2||_{L2(G_h)}`.
    pub dh_w2_l2_gap: f64,
    /// `[int_{-1/2}^{1/2} (int_0^H d_h w_1)^2]^{1/2}`.
    pub column_dh_w1_l2: f64,
    pub dh_w_l2_outer: f64,
    pub lap_w_l2_outer: f64,
    pub grad_q_l2_outer: f64,
}

/// `d/dh` of the stream function at a fixed point, by central differences of
/// the closed-form branch that is active at the base height.
struct HDerivative {
    base: TestField,
    lo: TestField,
    hi: TestField,
    step: f64,
}

impl HDerivative {
    fn new(field: &TestField) -> Result<Self> {
        let g = field.geometry();
        let step = H_STEP * g.h;
        Ok(Self {
            base: *field,
            lo: TestField::new(*field.params(), g.with_h(g.h - step))?,
            hi: TestField::new(*field.params(), g.with_h(g.h + step))?,
            step,
        })
    }

    fn on(&self, branch: Branch, x: Point) -> Result<VelocityJet> {
        let a = self.lo.stream_jet_on(branch, x)?;
        let b = self.hi.stream_jet_on(branch, x)?;
        Ok(VelocityJet {
            point: x,
            branch,
            psi: (b.psi - a.psi).scale(0.5 / self.step),
        })
    }

    fn at(&self, x: Point) -> Result<VelocityJet> {
        self.on(self.base.branch_at(x)?, x)
    }
}

fn frob(m: [[f64; 2]; 2]) -> f64 {
    m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

/// Abscissae `0, +-x_k` with `x_k` geometric from far below `sqrt(h)` to `half`.
fn sup_abscissae(h: f64, half: f64, per_side: usize) -> Vec<f64> {
    let lo = 1e-3 * h.sqrt().min(1.0);
    let ratio = (half / lo).powf(1.0 / (per_side - 1) as f64);
    let mut xs = vec![0.0];
    let mut x = lo;
    for _ in 0..per_side {
        let v = x.min(half);
        xs.push(-v);
        xs.push(v);
        x *= ratio;
    }
    xs
}

/// `int_0^{x2} grad w(x1, s) ds` by Gauss rules on the smooth pieces of the column.
fn column_grad_integral(field: &TestField, x1: f64, x2: f64) -> Result<[[f64; 2]; 2]> {
    let g = field.geometry();
    let height = g.gap_height(x1)?;
    let top = x2 / height;
    let rule = GaussLegendre::new(COLUMN_ORDER);
    let mut parts: [Vec<f64>; 4] = Default::default();
    for w in column_breaks(g, x1, height).windows(2) {
        let (a, b) = (w[0], w[1].min(top));
        if b <= a {
            break;
        }
        for (t, wt) in rule.mapped(a, b) {
            let gr = field.velocity_jet(Point::new(x1, t * height))?.grad();
            for (k, v) in gr.iter().flatten().enumerate() {
                parts[k].push(wt * height * v);
            }
        }
    }
    let s: Vec<f64> = parts.into_iter().map(compensated_sum).collect();
    Ok([[s[0], s[1]], [s[2], s[3]]])
}

fn outer_integral<F>(field: &TestField, spec: &QuadratureSpec, f: F) -> Result<f64>
where
    F: Fn(Point) -> Result<f64> + Sync,
{
    let g = field.geometry();
    Ok(integrate_region(IntegrationRegion::HalfBand, &f, g, spec)? + integrate_region(IntegrationRegion::Annulus, &f, g, spec)?)
}

/// Measures every quantity of the test-field bounds at the height of `g`.
pub fn measure_p1(p: &FieldParams, g: &GapGeometry, spec: &QuadratureSpec) -> Result<P1Measurement> {
    let norms = l2_norms(p, g, spec)?;
    let field = TestField::new(*p, *g)?;
    let dh = HDerivative::new(&field)?;
    let sq = |v: f64| v * v;

    let int_dh_w1 = integrate_gap(
        |x| {
            // int_0^{x2} d_h w1 = -(d_h Psi(x) - d_h Psi(x1, 0))
            let top = dh.at(x)?.psi.value();
            let bottom = dh.on(Branch::Blend, Point::new(x.x1, 0.0))?.psi.value();
            Ok(sq(top - bottom))
        },
        g,
        spec,
    )?
    .sqrt();
    let dh_w2 = integrate_gap(|x| Ok(sq(dh.at(x)?.velocity()[1])), g, spec)?.sqrt();

    let gap_points: Vec<Point> = sup_abscissae(g.h, 0.25, 128)
        .into_iter()
        .map(|x1| g.gap_height(x1).map(|hh| (x1, hh)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flat_map(|(x1, hh)| (1..=16).map(move |k| Point::new(x1, hh * k as f64 / 16.0)))
        .collect();
    let int_grad_sup = gap_points
        .par_iter()
        .map(|x| column_grad_integral(&field, x.x1, x.x2).map(frob))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let column_sup = sup_abscissae(g.h, HALF_GAP_HALF_WIDTH - 1e-12, 1024)
        .par_iter()
        .map(|&x1| {
            let hh = g.gap_height(x1)?;
            column_grad_integral(&field, x1, hh).map(frob)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let rule = GaussLegendre::new(PANEL_ORDER);
    let column_dh = composite_nodes(&lower_arc_breakpoints(g.h, spec), &rule)
        .into_iter()
        .map(|(x1, w)| {
            let top = Point::new(x1, g.gap_height(x1)?);
            Ok(w * sq(dh.on(Branch::Blend, top)?.psi.value()))
        })
        .collect::<Result<Vec<f64>>>()?;
    let column_dh = compensated_sum(column_dh).sqrt();

    let dh_outer = outer_integral(&field, spec, |x| {
        let v = dh.at(x)?.velocity();
        Ok(sq(v[0]) + sq(v[1]))
    })?
    .sqrt();
    let lap_outer = outer_integral(&field, spec, |x| {
        let l = field.velocity_jet(x)?.laplacian();
        Ok(sq(l[0]) + sq(l[1]))
    })?
    .sqrt();
    let gq_outer = outer_integral(&field, spec, |x| {
        let jet = field.velocity_jet(x)?;
        if jet.branch != Branch::Blend {
            return Ok(0.0);
        }
        let gq = field.pressure_gradient(&jet)?;
        Ok(sq(gq[0]) + sq(gq[1]))
    })?
    .sqrt();

    Ok(P1Measurement {
        h: g.h,
        norms,
        int_dh_w1_l2_gap: int_dh_w1,
        int_grad_w_linf_gap: int_grad_sup,
        column_grad_linf: column_sup,
        dh_w2_l2_gap: dh_w2,
        column_dh_w1_l2: column_dh,
        dh_w_l2_outer: dh_outer,
        lap_w_l2_outer: lap_outer,
        grad_q_l2_outer: gq_outer,
    })
}

#[derive(Clone, Copy)]
enum Weight {
    One,
    QuarterPower,
    HalfPower,
    InverseLog,
}

impl Weight {
    fn apply(&self, h: f64, v: f64) -> f64 {
        match self {
            Weight::One => v,
            Weight::QuarterPower => h.powf(0.25) * v,
            Weight::HalfPower => h.sqrt() * v,
            Weight::InverseLog => v / h.ln().abs(),
        }
    }
}

type Extract = fn(&P1Measurement) -> f64;

const P1_TABLE: [(&str, &str, Extract, Weight); 17] = [
    ("w_l2_gap", "||w||_{L2(G_h)}", |m| m.norms.l2_gap, Weight::One),
    ("int_dh_w1_l2_gap", "||int_0^x2 d_h w1||_{L2(G_h)}", |m| m.int_dh_w1_l2_gap, Weight::One),
    ("int_grad_w_linf_gap", "||int_0^x2 grad w||_{Linf(G_h)}", |m| m.int_grad_w_linf_gap, Weight::One),
    ("disk_shear_linf", "||2D(w)n.tau||_{Linf(dB_h)}", |m| m.norms.linf_disk_shear, Weight::One),
    ("column_grad_linf", "||int_0^H grad w||_{Linf(-1/2,1/2)}", |m| m.column_grad_linf, Weight::One),
    ("slip_integral_log", "int_{dOmega_h}|(w-w*).tau| / |ln h|", |m| m.norms.slip_integral, Weight::InverseLog),
    ("grad_w_l2_gap", "h^{1/4} ||grad w||_{L2(G_h)}", |m| m.norms.grad_l2_gap, Weight::QuarterPower),
    ("dh_w2_l2_gap", "h^{1/4} ||d_h w2||_{L2(G_h)}", |m| m.dh_w2_l2_gap, Weight::QuarterPower),
    ("w_l2_disk_gap", "h^{1/4} ||w||_{L2(dB_h cap dG_h)}", |m| m.norms.boundary_l2_disk, Weight::QuarterPower),
    ("column_dh_w1_l2", "h^{1/4} ||int_0^H d_h w1||_{L2(-1/2,1/2)}", |m| m.column_dh_w1_l2, Weight::QuarterPower),
    ("residual_l2_gap", "||Delta w - grad q||_{L2(G_h)}", |m| m.norms.residual_l2_gap, Weight::One),
    ("disk_force", "h^{1/2} |e2 . int_{dB_h} Sigma(w,q) n|", |m| m.norms.disk_force.abs(), Weight::HalfPower),
    ("w_l2_outer", "||w||_{L2(Omega \\ G_h)}", |m| m.norms.l2_outer, Weight::One),
    ("dh_w_l2_outer", "||d_h w||_{L2(Omega \\ G_h)}", |m| m.dh_w_l2_outer, Weight::One),
    ("grad_w_linf_outer", "||grad w||_{Linf(Omega \\ G_h)}", |m| m.norms.linf_outer_grad, Weight::One),
    ("lap_w_l2_outer", "||Delta w||_{L2(Omega \\ G_h)}", |m| m.lap_w_l2_outer, Weight::One),
    ("grad_q_l2_outer", "||grad q||_{L2(Omega \\ G_h)}", |m| m.grad_q_l2_outer, Weight::One),
];

/// Ids of the reports produced by [`verify_p1`], in order.
pub fn p1_report_ids() -> Vec<&'static str> {
    P1_TABLE.iter().map(|r| r.0).collect()
}

/// One scaling report per displayed bound; every weighted quantity is
/// expected to have slope `0`.
pub fn verify_p1(
    p: &FieldParams,
    g: &GapGeometry,
    ladder: &[f64],
    spec: &QuadratureSpec,
) -> Result<(Vec<P1Measurement>, Vec<ScalingReport>)> {
    validate_ladder(ladder, 5, 4.0)?;
    let rows = ladder
        .par_iter()
        .map(|&h| measure_p1(p, &g.with_h(h), spec))
        .collect::<Result<Vec<_>>>()?;
    let reports = P1_TABLE
        .iter()
        .map(|(id, desc, extract, weight)| {
            let values: Vec<f64> = rows.iter().map(extract).collect();
            let weighted = rows.iter().zip(&values).map(|(m, &v)| weight.apply(m.h, v)).collect();
            ScalingReport::fit(*id, *desc, ladder, values, weighted, SlopeAxis::LogH, 0.0, SLOPE_TOLERANCE)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((rows, reports))
}

/// Sup of the disk shear across the ladder for alternative coefficients.
/// Expected exponent `0` for the reference coefficients, `-1/2` otherwise.
pub fn mu_sensitivity(
    mu1: f64,
    mu2: f64,
    g: &GapGeometry,
    ladder: &[f64],
) -> Result<ScalingReport> {
    validate_ladder(ladder, 5, 4.0)?;
    let params = FieldParams::with_mu(mu1, mu2);
    let values = ladder
        .par_iter()
        .map(|&h| {
            let gh = g.with_h(h);
            gh.ensure_valid()?;
            linf_disk_shear(&TestField::new(params, gh)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let expected = if params.is_reference() { 0.0 } else { -0.5 };
    ScalingReport::fit(
        format!("mu_sensitivity({mu1},{mu2})"),
        "sup_{dB_h} |2D(w)n.tau|",
        ladder,
        values.clone(),
        values,
        SlopeAxis::LogH,
        expected,
        SLOPE_TOLERANCE,
    )
}

/// `2 ln(1 + 1/(32 h))`: the `(e, p) = (1, 1)` moment with `H` replaced by its
/// parabolic approximation `h + x1^2 / 2`.
pub fn log_law_oracle(h: f64) -> f64 {
    2.0 * (1.0 / (32.0 * h)).ln_1p()
}

/// Slope of `int |x1|^e / H^p` across the ladder against the tabulated law:
/// `|ln h|` for `(1, 1)`, `h^{1-p}` for `e = 1, p >= 2`, `h^{1/2-p}` for `e = 0`.
pub fn moment_scaling(e: u32, p: u32, g: &GapGeometry, ladder: &[f64], tolerance: f64) -> Result<ScalingReport> {
    let values = ladder
        .iter()
        .map(|&h| moment_integral(e, p, &g.with_h(h)))
        .collect::<Result<Vec<f64>>>()?;
    let (axis, expected) = match (e, p) {
        (1, 1) => (SlopeAxis::LogAbsLogH, 1.0),
        (1, p) => (SlopeAxis::LogH, 1.0 - p as f64),
        (0, p) => (SlopeAxis::LogH, 0.5 - p as f64),
        _ => return Err(Error::invalid("e", "exponent must be 0 or 1")),
    };
    ScalingReport::fit(
        format!("moment(e={e},p={p})"),
        format!("int_{{-1/4}}^{{1/4}} |x1|^{e} / H^{p}"),
        ladder,
        values.clone(),
        values,
        axis,
        expected,
        tolerance,
    )
}

/// `int_h^1 Phi'(s) ds` with `Phi'(s) = e2 . int_{dB_s} Sigma(w_s, q_s) n`,
/// integrated in `ln s` with one Gauss panel per decade.
pub fn phi_integral(p: &FieldParams, g: &GapGeometry, spec: &QuadratureSpec) -> Result<f64> {
    if !(g.h > 0.0 && g.h < 1.0) {
        return Err(Error::invalid("h", "phi integral needs 0 < h < 1"));
    }
    let lo = g.h.ln();
    let panels = ((-g.h.log10()).ceil() as usize).max(1);
    let breaks: Vec<f64> = (0..=panels).map(|k| lo * (1.0 - k as f64 / panels as f64)).collect();
    let nodes = composite_nodes(&breaks, &GaussLegendre::new(PANEL_ORDER));
    let vals = nodes
        .par_iter()
        .map(|&(u, w)| {
            let s = u.exp();
            let field = TestField::new(*p, g.with_h(s))?;
            Ok(w * s * disk_force(&field, spec)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(compensated_sum(vals))
}
