//! Suite orchestration: runs the verification tasks for a config, writes
//! CSV data and JSON summaries, and records verdicts in a manifest.
//!
//! Everything written under the output directory is a function of the
//! config alone, except `timings.txt`, which is not listed in the manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::dynamics::{
    contact_time_bound, integrate_envelope, log_mass_bound, log_series, minimal_mass, parameter_gate, speed_bound,
    time_sequence, GateResult, IterationRecord, Termination, SERIES_REL_TOL,
};
use crate::error::{Error, Result};
use crate::estimates::{
    check_fields, korn_ratio, lambda_flux_identity, log_law_oracle, moment_scaling, mu_sensitivity,
    tresca_classify, verify_p1, FieldCheckReport, SLOPE_TOLERANCE,
};
use crate::fields::TestField;
use crate::quadrature::moment_integral;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    VerifyFields,
    ScalingSweep,
    ContactSim,
    ParamGate,
    MinimalMass,
    All,
}

impl Suite {
    pub const TASKS: [Suite; 5] = [
        Suite::VerifyFields,
        Suite::ScalingSweep,
        Suite::ContactSim,
        Suite::ParamGate,
        Suite::MinimalMass,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::VerifyFields => "verify-fields",
            Suite::ScalingSweep => "scaling-sweep",
            Suite::ContactSim => "contact-sim",
            Suite::ParamGate => "param-gate",
            Suite::MinimalMass => "minimal-mass",
            Suite::All => "all",
        }
    }

    fn tasks(&self) -> Vec<Suite> {
        match self {
            Suite::All => Self::TASKS.to_vec(),
            s => vec![*s],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::TASKS
            .iter()
            .chain(&[Suite::All])
            .find(|t| t.as_str() == s)
            .copied()
            .ok_or_else(|| Error::invalid("suite", format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub id: String,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    fn new(id: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task: String,
    pub status: TaskStatus,
    pub verdicts: Vec<Verdict>,
    pub error: Option<String>,
    /// Kept out of the serialized manifest so reruns compare equal.
    #[serde(skip)]
    pub wall_clock: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub tool_version: String,
    pub suite: Suite,
    /// Settings that depart from the reference values.
    pub non_reference_values: Vec<String>,
    pub tasks: Vec<TaskRecord>,
    pub files: Vec<FileEntry>,
}

impl RunManifest {
    pub fn passed(&self) -> bool {
        self.tasks.iter().all(|t| t.status == TaskStatus::Pass)
    }

    pub fn verdict_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "suite {}  config {}", self.suite.as_str(), &self.config_hash[..16]);
        for v in &self.non_reference_values {
            let _ = writeln!(out, "note: non-reference value {v}");
        }
        for t in &self.tasks {
            let _ = writeln!(out, "\n[{}] {:?}", t.task, t.status);
            if let Some(e) = &t.error {
                let _ = writeln!(out, "  ERROR {e}");
            }
            for v in &t.verdicts {
                let mark = if v.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(out, "  {mark}  {:<34} {}", v.id, v.detail);
            }
        }
        let total = self.tasks.iter().map(|t| t.verdicts.len()).sum::<usize>();
        let failed = self
            .tasks
            .iter()
            .flat_map(|t| &t.verdicts)
            .filter(|v| !v.passed)
            .count();
        let _ = writeln!(out, "\n{} of {} verdicts passed", total - failed, total);
        out
    }
}

/// Collects output files and their checksums.
struct Writer {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl Writer {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.dir.join(name), bytes)?;
        self.files.push(FileEntry {
            path: name.to_string(),
            sha256: format!("{:x}", Sha256::digest(bytes)),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        self.write(name, &bytes)
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Runs `suite` with `cfg`, writing into `cfg.output_dir`.
pub fn run_suite(cfg: &RunConfig, suite: Suite) -> Result<RunManifest> {
    fs::create_dir_all(&cfg.output_dir)?;
    let mut w = Writer {
        dir: cfg.output_dir.clone(),
        files: Vec::new(),
    };
    let mut tasks = Vec::new();
    for task in suite.tasks() {
        let start = Instant::now();
        let outcome = match task {
            Suite::VerifyFields => verify_fields_task(cfg, &mut w),
            Suite::ScalingSweep => scaling_task(cfg, &mut w),
            Suite::ContactSim => contact_task(cfg, &mut w),
            Suite::ParamGate => gate_task(cfg, &mut w),
            Suite::MinimalMass => mass_task(cfg, &mut w),
            Suite::All => unreachable!("expanded above"),
        };
        let wall_clock = start.elapsed();
        tasks.push(match outcome {
            Ok(verdicts) => TaskRecord {
                task: task.as_str().into(),
                status: if verdicts.iter().all(|v| v.passed) {
                    TaskStatus::Pass
                } else {
                    TaskStatus::Fail
                },
                verdicts,
                error: None,
                wall_clock,
            },
            Err(e) => TaskRecord {
                task: task.as_str().into(),
                status: TaskStatus::Error,
                verdicts: Vec::new(),
                error: Some(e.in_task(task.as_str()).to_string()),
                wall_clock,
            },
        });
    }
    let mut manifest = RunManifest {
        config_hash: cfg.hash(),
        tool_version: TOOL_VERSION.into(),
        suite,
        non_reference_values: cfg.non_reference_values(),
        tasks,
        files: Vec::new(),
    };
    let table = manifest.verdict_table();
    w.write("verdicts.txt", table.as_bytes())?;
    manifest.files = w.files;
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    fs::write(cfg.output_dir.join("manifest.json"), bytes)?;
    let mut timings = String::new();
    for t in &manifest.tasks {
        let _ = writeln!(timings, "{}\t{:.3}s", t.task, t.wall_clock.as_secs_f64());
    }
    fs::write(cfg.output_dir.join("timings.txt"), timings)?;
    Ok(manifest)
}

/// Path of the manifest written by [`run_suite`].
pub fn manifest_path(dir: &Path) -> PathBuf {
    dir.join("manifest.json")
}

fn verify_fields_task(cfg: &RunConfig, w: &mut Writer) -> Result<Vec<Verdict>> {
    let reports = cfg
        .sweep
        .field_ladder
        .iter()
        .map(|&h| check_fields(&cfg.field, &cfg.geometry.with_h(h), &cfg.checks))
        .collect::<Result<Vec<FieldCheckReport>>>()?;
    let verdicts: Vec<Verdict> = reports
        .iter()
        .map(|r| {
            Verdict::new(
                format!("fields(h={})", r.h),
                r.passes(1e-6, 1e-8),
                format!(
                    "div {:.2e} normal {:.2e} rigid {:.2e} parity {:.2e} jump {:.2e}",
                    r.fd_divergence, r.normal_mismatch, r.rigid_error, r.parity_error, r.interface_jump
                ),
            )
        })
        .collect();
    w.csv("fields.csv", &reports)?;
    w.json("fields.json", &serde_json::json!({ "reports": reports, "verdicts": verdicts }))?;
    Ok(verdicts)
}

#[derive(Serialize)]
struct ScalingRow<'a> {
    estimate_id: &'a str,
    h: f64,
    value: f64,
    weighted_value: f64,
}

#[derive(Serialize)]
struct TrescaSummary {
    h: f64,
    stick_count: usize,
    slip_count: usize,
    slip_length: f64,
}

fn scaling_task(cfg: &RunConfig, w: &mut Writer) -> Result<Vec<Verdict>> {
    let ladder = &cfg.sweep.ladder;
    let (rows, mut reports) = verify_p1(&cfg.field, &cfg.geometry, ladder, &cfg.quadrature)?;
    reports.push(mu_sensitivity(cfg.field.mu1, cfg.field.mu2, &cfg.geometry, ladder)?);
    for (e, p) in [(1, 2), (0, 1)] {
        reports.push(moment_scaling(e, p, &cfg.geometry, &cfg.sweep.moment_ladder, 0.05)?);
    }
    let mut verdicts: Vec<Verdict> = reports
        .iter()
        .map(|r| {
            Verdict::new(
                &r.id,
                r.passed,
                format!("slope {:+.4} expected {:+.2} +- {}", r.slope, r.expected, r.tolerance),
            )
        })
        .collect();

    let korn = ladder
        .iter()
        .map(|&h| korn_ratio(&cfg.field, &cfg.geometry.with_h(h), &cfg.quadrature))
        .collect::<Result<Vec<_>>>()?;
    let lo = korn.iter().map(|k| k.ratio).fold(f64::INFINITY, f64::min);
    let hi = korn.iter().map(|k| k.ratio).fold(0.0, f64::max);
    verdicts.push(Verdict::new(
        "korn_band",
        lo >= 1.0 && hi / lo <= 3.0,
        format!("ratio in [{lo:.6}, {hi:.6}]"),
    ));

    let flux = ladder
        .iter()
        .map(|&h| {
            let field = TestField::new(cfg.field, cfg.geometry.with_h(h))?;
            Ok((h, lambda_flux_identity(&field, &cfg.geometry.with_h(h), &cfg.quadrature)?))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let worst = flux.iter().map(|(_, l)| (l - 1.0).abs()).fold(0.0, f64::max);
    verdicts.push(Verdict::new("flux_identity", worst <= 1e-6, format!("max |lambda - 1| = {worst:.2e}")));

    let oracle: Vec<(f64, f64, f64)> = cfg
        .sweep
        .moment_ladder
        .iter()
        .filter(|&&h| h <= 1e-4)
        .map(|&h| Ok((h, moment_integral(1, 1, &cfg.geometry.with_h(h))?, log_law_oracle(h))))
        .collect::<Result<_>>()?;
    if !oracle.is_empty() {
        let worst = oracle.iter().map(|(_, v, o)| (v / o - 1.0).abs()).fold(0.0, f64::max);
        verdicts.push(Verdict::new(
            "moment(e=1,p=1)_oracle",
            worst <= 0.2,
            format!("max |value / oracle - 1| = {worst:.3e}"),
        ));
    }

    let tresca = ladder
        .iter()
        .map(|&h| {
            let t = tresca_classify(
                &cfg.field,
                &cfg.geometry.with_h(h),
                cfg.sweep.tresca_threshold,
                cfg.sweep.shear_measure,
                &cfg.quadrature,
            )?;
            Ok(TrescaSummary {
                h,
                stick_count: t.stick_count,
                slip_count: t.slip_count,
                slip_length: t.slip_length,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut csv_rows = Vec::new();
    for r in &reports {
        for i in 0..r.h.len() {
            csv_rows.push(ScalingRow {
                estimate_id: &r.id,
                h: r.h[i],
                value: r.values[i],
                weighted_value: r.weighted[i],
            });
        }
    }
    w.csv("scaling.csv", &csv_rows)?;
    w.csv("tresca.csv", &tresca)?;
    w.json(
        "scaling.json",
        &serde_json::json!({
            "slope_tolerance": SLOPE_TOLERANCE,
            "reports": reports,
            "measurements": rows,
            "korn": korn,
            "flux_identity": flux,
            "moment_oracle": oracle,
            "tresca": tresca,
            "verdicts": verdicts,
        }),
    )?;
    Ok(verdicts)
}

#[derive(Serialize)]
struct TrajectoryRow {
    t: f64,
    h: f64,
    #[serde(rename = "I")]
    log_integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactSummary {
    pub gate: GateResult,
    pub gate_passed: bool,
    pub dt: f64,
    pub contact_time: Option<f64>,
    pub termination: Termination,
    pub t_star: f64,
    pub speed_bound: Option<f64>,
    pub max_speed: f64,
    pub capped_steps: usize,
    /// Quadratic-root contact time, only when `C* = 0`.
    pub closed_form: Option<f64>,
    pub records: Vec<IterationRecord>,
}

/// `t`, `h` and `I` columns of the envelope trajectory.
pub type TrajectoryColumns = (Vec<f64>, Vec<f64>, Vec<f64>);

/// Trajectory, iteration records and checks for the configured dynamics.
pub fn contact_summary(cfg: &RunConfig) -> Result<(ContactSummary, TrajectoryColumns)> {
    let d = &cfg.dynamics.params;
    let opts = cfg.dynamics.options();
    let gate = parameter_gate(d, cfg.dynamics.gate_mode);
    let traj = integrate_envelope(d, &opts)?;
    let records = time_sequence(d, &traj, cfg.dynamics.n_max)?;
    let closed_form = (d.c_star == 0.0).then(|| {
        let (a, b, c) = (d.g / 4.0, -d.c_sharp * d.g * d.h0, -d.h0);
        (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a)
    });
    let summary = ContactSummary {
        gate_passed: gate.passed(),
        gate,
        dt: opts.dt,
        contact_time: traj.contact_time,
        termination: traj.termination,
        t_star: contact_time_bound(d),
        speed_bound: speed_bound(d).ok(),
        max_speed: traj.max_speed,
        capped_steps: traj.capped_steps,
        closed_form,
        records,
    };
    Ok((summary, (traj.t, traj.h, traj.log_integral)))
}

/// Verdicts of the contact argument on a simulated summary.
pub fn contact_verdicts(s: &ContactSummary, n_max: usize) -> Vec<Verdict> {
    let mut v = vec![Verdict::new("gate", s.gate_passed, format!("failed clauses {:?}", s.gate.failures()))];
    v.push(Verdict::new(
        "contact_reached",
        s.contact_time.is_some(),
        format!("termination {:?}", s.termination),
    ));
    if let Some(tc) = s.contact_time {
        v.push(Verdict::new(
            "contact_within_bound",
            tc <= s.t_star,
            format!("T = {tc:.9e} <= T* = {:.9e}", s.t_star),
        ));
    }
    if let Some(exact) = s.closed_form {
        let rel = s.contact_time.map_or(f64::INFINITY, |t| (t / exact - 1.0).abs());
        v.push(Verdict::new("closed_form", rel <= 1e-6, format!("relative error {rel:.2e}")));
    }
    if let Some(bound) = s.speed_bound {
        v.push(Verdict::new(
            "speed_bound",
            s.max_speed <= bound * (1.0 + 1e-12),
            format!("max |h'| = {:.6e} <= {bound:.6e}", s.max_speed),
        ));
    }
    let bad: Vec<usize> = s.records.iter().filter(|r| !r.within_bounds).map(|r| r.n).collect();
    v.push(Verdict::new(
        "iteration_bounds",
        bad.is_empty() && s.records.len() == n_max + 1,
        format!("{} records, out of bounds at n = {bad:?}", s.records.len()),
    ));
    let dominated = s
        .records
        .windows(2)
        .all(|p| p[1].t - p[0].t <= p[0].increment_bound * (1.0 + 1e-12));
    v.push(Verdict::new("increments_dominated", dominated, "t_{n+1} - t_n <= geometric bound"));
    let decreasing = s.records.windows(2).all(|p| p[1].h < p[0].h);
    let last = s.records.last().map_or(f64::NAN, |r| r.h / s.records[0].h);
    v.push(Verdict::new(
        "gap_decreasing",
        decreasing,
        format!("h(t_n) / h(t_0) = {last:.3e} at the last record"),
    ));
    v
}

fn contact_task(cfg: &RunConfig, w: &mut Writer) -> Result<Vec<Verdict>> {
    let (summary, (t, h, i)) = contact_summary(cfg)?;
    let rows: Vec<TrajectoryRow> = t
        .iter()
        .zip(&h)
        .zip(&i)
        .map(|((&t, &h), &i)| TrajectoryRow { t, h, log_integral: i })
        .collect();
    let verdicts = contact_verdicts(&summary, cfg.dynamics.n_max);
    w.csv("trajectory.csv", &rows)?;
    w.csv("iterations.csv", &summary.records)?;
    w.json("contact.json", &serde_json::json!({ "summary": summary, "verdicts": verdicts }))?;
    Ok(verdicts)
}

#[derive(Serialize)]
struct ClauseRow<'a> {
    clause: String,
    passed: bool,
    detail: &'a str,
}

fn gate_task(cfg: &RunConfig, w: &mut Writer) -> Result<Vec<Verdict>> {
    let gate = parameter_gate(&cfg.dynamics.params, cfg.dynamics.gate_mode);
    let rows: Vec<ClauseRow> = gate
        .clauses
        .iter()
        .map(|c| ClauseRow {
            clause: serde_json::to_value(c.clause)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default(),
            passed: c.passed,
            detail: &c.detail,
        })
        .collect();
    let verdicts = vec![Verdict::new(
        "gate",
        gate.passed(),
        format!("mode {:?}, failed clauses {:?}", gate.mode, gate.failures()),
    )];
    w.csv("gate.csv", &rows)?;
    w.json("gate.json", &serde_json::json!({ "gate": gate, "verdicts": verdicts }))?;
    Ok(verdicts)
}

#[derive(Serialize)]
struct MassRow {
    h0: f64,
    log_bound: f64,
    series_sum: f64,
    series_terms: usize,
    tail_bound: f64,
    minimal_mass: f64,
}

fn mass_task(cfg: &RunConfig, w: &mut Writer) -> Result<Vec<Verdict>> {
    let base = cfg.dynamics.params;
    let mut grid = cfg.sweep.h0_grid.clone();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let rows = grid
        .iter()
        .map(|&h0| {
            let d = crate::dynamics::DynamicsParams { h0, ..base };
            let s = log_series(d.sigma, h0, SERIES_REL_TOL)?;
            Ok(MassRow {
                h0,
                log_bound: log_mass_bound(&d),
                series_sum: s.value,
                series_terms: s.terms,
                tail_bound: s.tail_bound,
                minimal_mass: minimal_mass(&d)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let configured = minimal_mass(&base)?;
    let monotone = rows.windows(2).all(|p| p[1].minimal_mass <= p[0].minimal_mass);
    let certified = rows.iter().all(|r| r.tail_bound < SERIES_REL_TOL * r.series_sum);
    let verdicts = vec![
        Verdict::new("monotone_in_h0", monotone, "minimal mass nonincreasing in h0"),
        Verdict::new("tail_certified", certified, format!("tail < {SERIES_REL_TOL:e} of the sum")),
        Verdict::new(
            "configured_mass",
            base.m >= configured,
            format!("m = {} against minimal {configured}", base.m),
        ),
    ];
    w.csv("minimal_mass.csv", &rows)?;
    w.json(
        "minimal_mass.json",
        &serde_json::json!({ "configured_h0": base.h0, "minimal_mass": configured, "table": rows, "verdicts": verdicts }),
    )?;
    Ok(verdicts)
}
