//! Contact dynamics for the falling disk.
//!
//! The gap `h(t)` obeys `h' <= -g t / 2 + C# g h0 + (C*/m) int_0^t |ln h|`.
//! The simulator integrates the equality (the slowest admissible descent),
//! optionally capped by the energy speed bound `|h'| <= 2 sqrt(g h0)`, and
//! the induction of the contact proof is replayed on the resulting curve.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::rules::Neumaier;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsParams {
    pub g: f64,
    /// Disk mass, `pi rho_s` for a homogeneous disk.
    pub m: f64,
    pub h0: f64,
    pub rho_f: f64,
    pub rho_s: f64,
    /// Iteration parameter in `(0, 1/2)`.
    pub sigma: f64,
    pub c_sharp: f64,
    pub c_star: f64,
    /// `int |u0|^2` over the fluid.
    pub u0_energy: f64,
    /// Initial disk velocity. Only `0` is covered by the contact argument.
    pub lambda0: f64,
}

impl Default for DynamicsParams {
    fn default() -> Self {
        Self {
            g: 9.81,
            m: 2.0 * PI,
            h0: 0.01,
            rho_f: 1.0,
            rho_s: 2.0,
            sigma: 0.25,
            c_sharp: 4.0,
            c_star: 1.0,
            u0_energy: 0.0,
            lambda0: 0.0,
        }
    }
}

impl DynamicsParams {
    /// Homogeneous disk of density `rho_s`, so `m = pi rho_s`.
    pub fn homogeneous(rho_s: f64) -> Self {
        Self {
            rho_s,
            m: PI * rho_s,
            ..Self::default()
        }
    }

    pub fn with_mass(self, m: f64) -> Self {
        Self { m, ..self }
    }

    /// Added-mass corrected weight factor `m - pi rho_f`.
    pub fn buoyant_mass(&self) -> f64 {
        self.m - PI * self.rho_f
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("g", self.g), ("m", self.m), ("h0", self.h0), ("rho_f", self.rho_f)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        if !(self.rho_s > self.rho_f) {
            return Err(Error::invalid(
                "rho_s",
                format!("solid density {} must exceed fluid density {}", self.rho_s, self.rho_f),
            ));
        }
        if !(self.buoyant_mass() > 0.0) {
            return Err(Error::invalid("m", format!("m - pi rho_f = {} must be positive", self.buoyant_mass())));
        }
        validate_sigma(self.sigma)?;
        for (name, v) in [("c_sharp", self.c_sharp), ("c_star", self.c_star), ("u0_energy", self.u0_energy)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be nonnegative and finite, got {v}")));
            }
        }
        if !self.lambda0.is_finite() {
            return Err(Error::invalid("lambda0", "must be finite"));
        }
        Ok(())
    }
}

fn validate_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma < 0.5 {
        Ok(())
    } else {
        Err(Error::invalid("sigma", format!("{sigma} is outside (0, 1/2)")))
    }
}

/// `E0 = (rho_f / 2) int |u0|^2 + (m - pi rho_f) g h0`. No validation, so
/// neutral buoyancy evaluates to zero.
pub fn initial_energy(d: &DynamicsParams) -> f64 {
    0.5 * d.rho_f * d.u0_energy + d.buoyant_mass() * d.g * d.h0
}

/// `2 sqrt(g h0)`, valid once `E0 <= 2 m g h0`.
pub fn speed_bound(d: &DynamicsParams) -> Result<f64> {
    let e0 = initial_energy(d);
    let cap = 2.0 * d.m * d.g * d.h0;
    if e0 > cap {
        return Err(Error::invalid("u0_energy", format!("initial energy {e0} exceeds 2 m g h0 = {cap}")));
    }
    Ok(2.0 * (d.g * d.h0).sqrt())
}

/// How the two upper bounds on `h0` are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateMode {
    /// Both bounds must hold; the induction uses each of them.
    #[default]
    Min,
    /// Either bound suffices, as the condition is printed.
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateClause {
    Params,
    /// `h0 < 2 / (3 (1 + sigma))`.
    HeightConvex,
    /// `h0 < 1 / ((32 C#)^2 g)`.
    HeightLubrication,
    /// `m >= 8 C*/g (|ln(h0/2)| + 3 sigma |ln((1 - sigma) h0 / 2)|)`.
    MassLog,
    /// `E0 <= 2 m g h0`.
    Energy,
    /// `m >= minimal_mass`.
    MassSeries,
    /// `lambda0 = 0`.
    InitialVelocity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClauseResult {
    pub clause: GateClause,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateResult {
    pub mode: GateMode,
    pub clauses: Vec<ClauseResult>,
}

impl GateResult {
    pub fn passed(&self) -> bool {
        let ok = |c: GateClause| self.clauses.iter().filter(|r| r.clause == c).all(|r| r.passed);
        let convex = ok(GateClause::HeightConvex);
        let lub = ok(GateClause::HeightLubrication);
        let height = match self.mode {
            GateMode::Min => convex && lub,
            GateMode::Max => convex || lub,
        };
        height
            && self
                .clauses
                .iter()
                .filter(|r| !matches!(r.clause, GateClause::HeightConvex | GateClause::HeightLubrication))
                .all(|r| r.passed)
    }

    /// Clauses that decide the verdict and failed.
    pub fn failures(&self) -> Vec<GateClause> {
        let is_height = |c: &GateClause| matches!(c, GateClause::HeightConvex | GateClause::HeightLubrication);
        let failed: Vec<GateClause> = self.clauses.iter().filter(|r| !r.passed).map(|r| r.clause).collect();
        let heights = failed.iter().filter(|c| is_height(c)).count();
        if self.mode == GateMode::Max && heights == 1 {
            // the other height bound holds, which is enough under this reading
            return failed.into_iter().filter(|c| !is_height(c)).collect();
        }
        failed
    }
}

/// `8 C*/g (|ln(h0/2)| + 3 sigma |ln((1 - sigma) h0 / 2)|)`.
pub fn log_mass_bound(d: &DynamicsParams) -> f64 {
    let a = (0.5 * d.h0).ln().abs();
    let b = ((1.0 - d.sigma) * d.h0 * 0.5).ln().abs();
    8.0 * d.c_star / d.g * (a + 3.0 * d.sigma * b)
}

pub fn parameter_gate(d: &DynamicsParams, mode: GateMode) -> GateResult {
    let mut clauses = Vec::new();
    let mut push = |clause, passed, detail: String| clauses.push(ClauseResult { clause, passed, detail });
    if let Err(e) = d.validate() {
        push(GateClause::Params, false, e.to_string());
    }
    let convex = 2.0 / (3.0 * (1.0 + d.sigma));
    push(GateClause::HeightConvex, d.h0 < convex, format!("h0 = {} < {}", d.h0, convex));
    let lub = 1.0 / ((32.0 * d.c_sharp).powi(2) * d.g);
    push(GateClause::HeightLubrication, d.h0 < lub, format!("h0 = {} < {}", d.h0, lub));
    let mlog = log_mass_bound(d);
    push(GateClause::MassLog, d.m >= mlog, format!("m = {} >= {}", d.m, mlog));
    let e0 = initial_energy(d);
    let cap = 2.0 * d.m * d.g * d.h0;
    push(GateClause::Energy, e0 <= cap, format!("E0 = {e0} <= {cap}"));
    match minimal_mass(d) {
        Ok(mm) => push(GateClause::MassSeries, d.m >= mm, format!("m = {} >= {}", d.m, mm)),
        Err(e) => push(GateClause::MassSeries, false, e.to_string()),
    }
    push(GateClause::InitialVelocity, d.lambda0 == 0.0, format!("lambda0 = {}", d.lambda0));
    GateResult { mode, clauses }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSum {
    pub value: f64,
    pub terms: usize,
    /// Rigorous bound on the omitted tail.
    pub tail_bound: f64,
}

/// `sum_{k>=0} q^k |ln((1 - sigma)^{k+1} h0 / 2)|` with `q = 1 - sigma^2/32`,
/// stopped once the tail bound drops below `rel_tol` times the partial sum.
pub fn log_series(sigma: f64, h0: f64, rel_tol: f64) -> Result<SeriesSum> {
    validate_sigma(sigma)?;
    if !(h0 > 0.0 && h0 < 1.0) {
        return Err(Error::Domain {
            what: "log_series",
            value: h0,
            domain: "0 < h0 < 1",
        });
    }
    let q = 1.0 - sigma * sigma / 32.0;
    // |ln((1-sigma)^{k+1} h0/2)| = (k+1) a + b exactly for h0 < 2
    let a = -(1.0 - sigma).ln();
    let b = -(0.5 * h0).ln();
    let tail = |n: usize| {
        let qn = q.powi(n as i32);
        let nf = n as f64;
        a * qn * (nf + 1.0 - nf * q) / ((1.0 - q) * (1.0 - q)) + b * qn / (1.0 - q)
    };
    let mut acc = Neumaier::default();
    let mut qk = 1.0;
    let mut k = 0usize;
    loop {
        // the product itself underflows long before the tail is small
        acc.add(qk * ((k + 1) as f64 * a + b));
        qk *= q;
        k += 1;
        if k.is_multiple_of(64) {
            let s = acc.sum();
            let t = tail(k);
            if t < rel_tol * s {
                return Ok(SeriesSum {
                    value: s,
                    terms: k,
                    tail_bound: t,
                });
            }
        }
        if k > 10_000_000 {
            return Err(Error::NonFinite("log series did not reach its tail tolerance"));
        }
    }
}

/// Relative tail tolerance for the mass series.
pub const SERIES_REL_TOL: f64 = 1e-10;

/// Smallest mass allowed by both the logarithmic bound and the series
/// condition `m >= 3 C* sigma S / (4 g (1/32 - sigma/16))`.
pub fn minimal_mass(d: &DynamicsParams) -> Result<f64> {
    validate_sigma(d.sigma)?;
    if !(d.g > 0.0) {
        return Err(Error::invalid("g", format!("must be positive, got {}", d.g)));
    }
    let s = log_series(d.sigma, d.h0, SERIES_REL_TOL)?;
    let series = 3.0 * d.c_star * d.sigma * s.value / (4.0 * d.g * (1.0 / 32.0 - d.sigma / 16.0));
    Ok(series.max(log_mass_bound(d)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeOptions {
    pub dt: f64,
    /// `ln h` is evaluated at `max(h, h_floor)`.
    pub h_floor: f64,
    /// Cap the descent speed at `2 sqrt(g h0)`.
    pub adversarial: bool,
    /// Integrate even if the gate fails.
    pub force: bool,
    pub gate_mode: GateMode,
    /// Give up after this many steps.
    pub max_steps: usize,
}

impl EnvelopeOptions {
    /// `dt = scale * sqrt(h0 / g)`.
    pub fn scaled(d: &DynamicsParams, scale: f64) -> Self {
        Self {
            dt: scale * (d.h0 / d.g).sqrt(),
            ..Self::default()
        }
    }
}

impl Default for EnvelopeOptions {
    fn default() -> Self {
        Self {
            dt: 1e-5,
            h_floor: 1e-12,
            adversarial: false,
            force: false,
            gate_mode: GateMode::Min,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Contact,
    /// `h` rose above 1 where the inequality no longer applies.
    LeftValidity,
    StepLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub h: Vec<f64>,
    /// `I(t) = int_0^t |ln h|`.
    pub log_integral: Vec<f64>,
    pub contact_time: Option<f64>,
    pub termination: Termination,
    /// Steps where the speed cap was active.
    pub capped_steps: usize,
    /// `max |h'|` over the grid.
    pub max_speed: f64,
}

impl Trajectory {
    pub fn contact(&self) -> bool {
        self.contact_time.is_some()
    }

    pub fn end_time(&self) -> f64 {
        self.contact_time.unwrap_or_else(|| *self.t.last().expect("trajectory has a start"))
    }

    /// `h` at `t`, linear between grid points and `0` after contact.
    pub fn h_at(&self, t: f64) -> Result<f64> {
        if let Some(tc) = self.contact_time {
            if t >= tc {
                return Ok(0.0);
            }
        }
        let last = *self.t.last().expect("trajectory has a start");
        if t > last || t < 0.0 {
            return Err(Error::TrajectoryTooShort {
                required: t,
                available: last,
            });
        }
        let i = self.t.partition_point(|&s| s <= t).clamp(1, self.t.len() - 1);
        let (t0, t1) = (self.t[i - 1], self.t[i]);
        if t1 == t0 {
            return Ok(self.h[i]);
        }
        let w = (t - t0) / (t1 - t0);
        Ok(self.h[i - 1] + w * (self.h[i] - self.h[i - 1]))
    }
}

struct Envelope {
    g: f64,
    bias: f64,
    gain: f64,
    cap: Option<f64>,
    h_floor: f64,
}

impl Envelope {
    fn new(d: &DynamicsParams, o: &EnvelopeOptions) -> Self {
        Self {
            g: d.g,
            bias: d.c_sharp * d.g * d.h0,
            gain: d.c_star / d.m,
            cap: o.adversarial.then(|| 2.0 * (d.g * d.h0).sqrt()),
            h_floor: o.h_floor,
        }
    }

    fn speed(&self, t: f64, i: f64) -> f64 {
        let v = -0.5 * self.g * t + self.bias + self.gain * i;
        match self.cap {
            Some(c) => v.clamp(-c, c),
            None => v,
        }
    }

    fn rhs(&self, t: f64, y: [f64; 2]) -> [f64; 2] {
        [self.speed(t, y[1]), y[0].max(self.h_floor).ln().abs()]
    }

    fn rk4(&self, t: f64, y: [f64; 2], dt: f64) -> [f64; 2] {
        let add = |y: [f64; 2], k: [f64; 2], s: f64| [y[0] + s * k[0], y[1] + s * k[1]];
        let k1 = self.rhs(t, y);
        let k2 = self.rhs(t + 0.5 * dt, add(y, k1, 0.5 * dt));
        let k3 = self.rhs(t + 0.5 * dt, add(y, k2, 0.5 * dt));
        let k4 = self.rhs(t + dt, add(y, k3, dt));
        [
            y[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ]
    }
}

/// Fixed-step RK4 on `h' = -g t/2 + C# g h0 + (C*/m) I`, `I' = |ln h|`, up
/// to contact (located by bisection on the last step) or `h > 1`.
pub fn integrate_envelope(d: &DynamicsParams, opts: &EnvelopeOptions) -> Result<Trajectory> {
    d.validate()?;
    if !(opts.dt > 0.0 && opts.dt.is_finite()) {
        return Err(Error::invalid("dt", format!("must be positive, got {}", opts.dt)));
    }
    if !(opts.h_floor > 0.0) {
        return Err(Error::invalid("h_floor", format!("must be positive, got {}", opts.h_floor)));
    }
    if d.h0 > 1.0 {
        return Err(Error::invalid("h0", format!("{} exceeds 1, outside the envelope's validity", d.h0)));
    }
    if !opts.force {
        let gate = parameter_gate(d, opts.gate_mode);
        if !gate.passed() {
            return Err(Error::invalid("gate", format!("parameter gate failed on {:?}", gate.failures())));
        }
    }
    let env = Envelope::new(d, opts);
    let (mut t_grid, mut h_grid, mut i_grid) = (vec![0.0], vec![d.h0], vec![0.0]);
    let mut y = [d.h0, 0.0];
    let mut capped = 0usize;
    let mut max_speed = env.speed(0.0, 0.0).abs();
    for step in 0..opts.max_steps {
        let t = step as f64 * opts.dt;
        let next = env.rk4(t, y, opts.dt);
        if !(next[0].is_finite() && next[1].is_finite()) {
            return Err(Error::NonFinite("envelope integration"));
        }
        if next[0] <= 0.0 {
            let tau = bisect_contact(&env, t, y, opts.dt);
            let end = env.rk4(t, y, tau);
            t_grid.push(t + tau);
            h_grid.push(0.0);
            i_grid.push(end[1]);
            return Ok(Trajectory {
                t: t_grid,
                h: h_grid,
                log_integral: i_grid,
                contact_time: Some(t + tau),
                termination: Termination::Contact,
                capped_steps: capped,
                max_speed,
            });
        }
        y = next;
        let tn = (step + 1) as f64 * opts.dt;
        let raw = -0.5 * env.g * tn + env.bias + env.gain * y[1];
        let v = env.speed(tn, y[1]);
        if v != raw {
            capped += 1;
        }
        max_speed = max_speed.max(v.abs());
        t_grid.push(tn);
        h_grid.push(y[0]);
        i_grid.push(y[1]);
        if y[0] > 1.0 {
            return Ok(Trajectory {
                t: t_grid,
                h: h_grid,
                log_integral: i_grid,
                contact_time: None,
                termination: Termination::LeftValidity,
                capped_steps: capped,
                max_speed,
            });
        }
    }
    Ok(Trajectory {
        t: t_grid,
        h: h_grid,
        log_integral: i_grid,
        contact_time: None,
        termination: Termination::StepLimit,
        capped_steps: capped,
        max_speed,
    })
}

/// Sub-step `tau in (0, dt]` where the one-step map from `(t, y)` hits `h = 0`.
fn bisect_contact(env: &Envelope, t: f64, y: [f64; 2], dt: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, dt);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if env.rk4(t, y, mid)[0] > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub n: usize,
    pub t: f64,
    pub h: f64,
    /// `(1 - sigma)^n h0 / 2`.
    pub lower: f64,
    /// `(1 - sigma^2/32)^n (3/2) h0`.
    pub upper: f64,
    pub within_bounds: bool,
    /// `sigma (3/2) h0 (1 - sigma^2/32)^n / (2 sqrt(g h0))`, the bound on `t_{n+1} - t_n`.
    pub increment_bound: f64,
}

/// `t0 = sqrt(h0/g) / 4`.
pub fn first_time(d: &DynamicsParams) -> f64 {
    0.25 * (d.h0 / d.g).sqrt()
}

/// `t_{n+1} = t_n + sigma h(t_n) / (2 sqrt(g h0))` read off the trajectory,
/// for `n = 0..=n_max`. Stops early if `h(t_n) = 0`, where the sequence
/// would stall.
pub fn time_sequence(d: &DynamicsParams, traj: &Trajectory, n_max: usize) -> Result<Vec<IterationRecord>> {
    d.validate()?;
    let speed = 2.0 * (d.g * d.h0).sqrt();
    let q = 1.0 - d.sigma * d.sigma / 32.0;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut t = first_time(d);
    for n in 0..=n_max {
        let h = traj.h_at(t)?;
        let lower = (1.0 - d.sigma).powi(n as i32) * d.h0 * 0.5;
        let upper = q.powi(n as i32) * 1.5 * d.h0;
        out.push(IterationRecord {
            n,
            t,
            h,
            lower,
            upper,
            within_bounds: lower <= h && h <= upper,
            increment_bound: d.sigma * upper / speed,
        });
        if h <= 0.0 {
            break;
        }
        t += d.sigma * h / speed;
    }
    Ok(out)
}

/// `T* = (1/4 + 24/sigma) sqrt(h0/g)`, the limit of the `t_n` bounds.
pub fn contact_time_bound(d: &DynamicsParams) -> f64 {
    (0.25 + 24.0 / d.sigma) * (d.h0 / d.g).sqrt()
}

/// A `C*` stand-in from measured slip integrals: `max slip(h) / |ln h|`.
pub fn c_star_from_slip(samples: &[(f64, f64)]) -> Result<f64> {
    let mut best: f64 = 0.0;
    for &(h, slip) in samples {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::Domain {
                what: "c_star_from_slip",
                value: h,
                domain: "0 < h < 1",
            });
        }
        best = best.max(slip / h.ln().abs());
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub params: DynamicsParams,
    pub contact_time: Option<f64>,
    pub termination: Option<Termination>,
    pub error: Option<String>,
}

/// Independent trajectories, one per parameter set, in input order.
pub fn sweep_contact(params: &[DynamicsParams], opts: &EnvelopeOptions) -> Vec<SweepOutcome> {
    params
        .par_iter()
        .map(|d| match integrate_envelope(d, opts) {
            Ok(tr) => SweepOutcome {
                params: *d,
                contact_time: tr.contact_time,
                termination: Some(tr.termination),
                error: None,
            },
            Err(e) => SweepOutcome {
                params: *d,
                contact_time: None,
                termination: None,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn free_fall() -> DynamicsParams {
        DynamicsParams {
            c_sharp: 0.0,
            c_star: 0.0,
            ..DynamicsParams::default()
        }
    }

    #[test]
    fn energy_examples() {
        let d = DynamicsParams {
            m: PI,
            rho_f: 1.0,
            ..DynamicsParams::default()
        };
        assert_eq!(initial_energy(&d), 0.0);
        let d = DynamicsParams {
            m: PI + 1.0,
            rho_f: 1.0,
            u0_energy: 2.0,
            g: 9.81,
            h0: 0.01,
            ..DynamicsParams::default()
        };
        assert_relative_eq!(initial_energy(&d), 1.0981, max_relative = 1e-14);
    }

    #[test]
    fn speed_bound_examples() {
        let d = DynamicsParams::default();
        assert_relative_eq!(speed_bound(&d).unwrap(), 0.626418390534633, max_relative = 1e-12);
        let d = DynamicsParams {
            g: 1.0,
            h0: 1.0,
            ..DynamicsParams::default()
        };
        assert_eq!(speed_bound(&d).unwrap(), 2.0);
        let d = DynamicsParams {
            u0_energy: 1e6,
            ..DynamicsParams::default()
        };
        assert!(speed_bound(&d).is_err());
    }

    #[test]
    fn series_matches_closed_form() {
        // sum q^k ((k+1) a + b) = a / (1-q)^2 + b / (1-q)
        for &(sigma, h0) in &[(0.25, 1e-3), (0.1, 0.5), (0.45, 1e-7)] {
            let q: f64 = 1.0 - sigma * sigma / 32.0;
            let a = -(1.0f64 - sigma).ln();
            let b = -(0.5f64 * h0).ln();
            let exact = a / (1.0 - q).powi(2) + b / (1.0 - q);
            let s = log_series(sigma, h0, SERIES_REL_TOL).unwrap();
            assert_relative_eq!(s.value, exact, max_relative = 2e-10);
            assert!(s.tail_bound < SERIES_REL_TOL * s.value);
        }
    }

    #[test]
    fn minimal_mass_examples() {
        let d = DynamicsParams {
            sigma: 0.25,
            h0: 5e-6,
            c_star: 1.0,
            ..DynamicsParams::default()
        };
        // closed-form series value, 30 digits
        assert_relative_eq!(minimal_mass(&d).unwrap(), 100328.47676056, max_relative = 1e-9);
        let zero = DynamicsParams { c_star: 0.0, ..d };
        assert_eq!(minimal_mass(&zero).unwrap(), 0.0);
        assert!(minimal_mass(&DynamicsParams { sigma: 0.5, ..d }).is_err());
        let near = minimal_mass(&DynamicsParams { sigma: 0.4999, ..d }).unwrap();
        assert!(near > 100.0 * minimal_mass(&d).unwrap());
    }

    #[test]
    fn gate_interpretations() {
        let d = DynamicsParams {
            sigma: 0.25,
            g: 9.81,
            c_sharp: 4.0,
            h0: 1e-5,
            c_star: 1.0,
            m: 1e6,
            rho_s: 1e6 / PI,
            ..DynamicsParams::default()
        };
        assert!(parameter_gate(&d, GateMode::Max).passed());
        let min = parameter_gate(&d, GateMode::Min);
        assert!(!min.passed());
        assert_eq!(min.failures(), vec![GateClause::HeightLubrication]);
        assert!(parameter_gate(&DynamicsParams { h0: 5e-6, ..d }, GateMode::Min).passed());

        let tall = DynamicsParams { h0: 0.5, ..d };
        assert!(parameter_gate(&tall, GateMode::Min).failures().contains(&GateClause::HeightLubrication));
        let light = DynamicsParams { m: 10.0, rho_s: 10.0 / PI, h0: 5e-6, ..d };
        let f = parameter_gate(&light, GateMode::Min).failures();
        assert!(f.contains(&GateClause::MassLog) && f.contains(&GateClause::MassSeries));
        let moving = DynamicsParams { lambda0: 0.1, h0: 5e-6, ..d };
        assert_eq!(parameter_gate(&moving, GateMode::Min).failures(), vec![GateClause::InitialVelocity]);
    }

    #[test]
    fn free_fall_contact_time() {
        let d = free_fall();
        let o = EnvelopeOptions {
            force: true,
            ..EnvelopeOptions::scaled(&d, 1e-3)
        };
        let tr = integrate_envelope(&d, &o).unwrap();
        let exact = 2.0 * (d.h0 / d.g).sqrt();
        assert_relative_eq!(tr.contact_time.unwrap(), exact, max_relative = 1e-12);
        assert_relative_eq!(exact, 0.0638551, max_relative = 1e-6);
    }

    #[test]
    fn quadratic_root_with_lubrication_bias() {
        // h = h0 + 4 g h0 t - g t^2 / 4
        let d = DynamicsParams {
            c_star: 0.0,
            ..DynamicsParams::default()
        };
        let o = EnvelopeOptions {
            force: true,
            ..EnvelopeOptions::scaled(&d, 1e-3)
        };
        let tr = integrate_envelope(&d, &o).unwrap();
        let (a, b, c) = (d.g / 4.0, -4.0 * d.g * d.h0, -d.h0);
        let root = (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
        assert_relative_eq!(tr.contact_time.unwrap(), root, max_relative = 1e-12);
    }

    #[test]
    fn contact_time_grows_with_log_gain() {
        let base = DynamicsParams {
            c_star: 1.0,
            m: 50.0,
            rho_s: 50.0 / PI,
            ..DynamicsParams::default()
        };
        let o = EnvelopeOptions {
            force: true,
            ..EnvelopeOptions::scaled(&base, 1e-3)
        };
        let t1 = integrate_envelope(&base, &o).unwrap().contact_time.unwrap();
        let t2 = integrate_envelope(&DynamicsParams { c_star: 5.0, ..base }, &o).unwrap().contact_time.unwrap();
        assert!(t2 > t1);
        let tr = integrate_envelope(&base, &o).unwrap();
        assert!(tr.log_integral.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn sequence_start_and_bound() {
        let d = DynamicsParams::default();
        assert_relative_eq!(first_time(&d), 0.0079819, max_relative = 1e-5);
        let d3 = DynamicsParams { h0: 1e-3, ..d };
        assert_relative_eq!(contact_time_bound(&d3), 96.25 * (1e-3f64 / 9.81).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(contact_time_bound(&d3), 0.97175, max_relative = 1e-4);
    }

    #[test]
    fn short_trajectory_is_reported() {
        let d = free_fall();
        let tr = Trajectory {
            t: vec![0.0, 1e-4],
            h: vec![d.h0, d.h0],
            log_integral: vec![0.0, 0.0],
            contact_time: None,
            termination: Termination::StepLimit,
            capped_steps: 0,
            max_speed: 0.0,
        };
        match time_sequence(&d, &tr, 3) {
            Err(Error::TrajectoryTooShort { required, .. }) => assert_relative_eq!(required, first_time(&d)),
            other => panic!("expected a short-trajectory error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_mass_decreases_with_gap() {
        let mut prev = f64::INFINITY;
        for k in 1..40 {
            let h0 = 10f64.powf(-8.0 + 7.5 * k as f64 / 40.0);
            let m = minimal_mass(&DynamicsParams { h0, ..DynamicsParams::default() }).unwrap();
            assert!(m <= prev);
            prev = m;
        }
    }
}
