//! Plain-text run configuration: `key = value` lines under `[section]`
//! headers, `#` comments, defaults for anything absent. Every key can be
//! overridden from the environment as `TRESCA_<SECTION>_<KEY>`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cutoff::CutoffProfile;
use crate::dynamics::{DynamicsParams, EnvelopeOptions, GateMode};
use crate::error::{Error, Result};
use crate::estimates::{FieldCheckSpec, ShearMeasure, DEFAULT_LADDER};
use crate::fields::{FieldParams, REFERENCE_MU1, REFERENCE_MU2};
use crate::geometry::{validate_geometry, GapGeometry, GeometryViolation};
use crate::quadrature::QuadratureSpec;

pub const ENV_PREFIX: &str = "TRESCA_";

/// Reference value of `C#`.
pub const REFERENCE_C_SHARP: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsConfig {
    pub params: DynamicsParams,
    /// Absolute step; when absent `dt_scale * sqrt(h0 / g)` is used.
    pub dt: Option<f64>,
    pub dt_scale: f64,
    pub h_floor: f64,
    pub adversarial: bool,
    pub gate_mode: GateMode,
    /// Last index of the time sequence.
    pub n_max: usize,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        let rho_s = 65_000.0;
        Self {
            // a gap and mass that pass every clause of the gate
            params: DynamicsParams {
                h0: 5e-6,
                ..DynamicsParams::homogeneous(rho_s)
            },
            dt: None,
            dt_scale: 1e-4,
            h_floor: 1e-12,
            adversarial: false,
            gate_mode: GateMode::Min,
            n_max: 40,
        }
    }
}

impl DynamicsConfig {
    pub fn options(&self) -> EnvelopeOptions {
        let p = &self.params;
        EnvelopeOptions {
            dt: self.dt.unwrap_or(self.dt_scale * (p.h0 / p.g).sqrt()),
            h_floor: self.h_floor,
            adversarial: self.adversarial,
            force: true,
            gate_mode: self.gate_mode,
            ..EnvelopeOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Gap heights for the scaling fits.
    pub ladder: Vec<f64>,
    /// Gap heights for the structural field checks.
    pub field_ladder: Vec<f64>,
    /// Gap heights for the moment table, inside its asymptotic range.
    pub moment_ladder: Vec<f64>,
    /// Initial gaps for the minimal-mass table.
    pub h0_grid: Vec<f64>,
    pub tresca_threshold: f64,
    pub shear_measure: ShearMeasure,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            ladder: DEFAULT_LADDER.to_vec(),
            field_ladder: vec![1.0, 1e-1, 1e-3],
            moment_ladder: vec![1e-4, 1e-5, 1e-6, 1e-7],
            h0_grid: vec![1e-7, 1e-6, 5e-6, 1e-5, 1e-4, 1e-3, 1e-2],
            tresca_threshold: 1.0,
            shear_measure: ShearMeasure::Symmetric,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub geometry: GapGeometry,
    pub field: FieldParams,
    pub quadrature: QuadratureSpec,
    pub checks: FieldCheckSpec,
    pub dynamics: DynamicsConfig,
    pub sweep: SweepConfig,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: GapGeometry::default(),
            field: FieldParams::default(),
            quadrature: QuadratureSpec::default(),
            checks: FieldCheckSpec::default(),
            dynamics: DynamicsConfig::default(),
            sweep: SweepConfig::default(),
            output_dir: PathBuf::from("tresca-out"),
        }
    }
}

impl RunConfig {
    /// Settings that differ from the reference values.
    pub fn non_reference_values(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.field.mu1 != REFERENCE_MU1 {
            out.push(format!("mu1 = {} (reference 1/6)", self.field.mu1));
        }
        if self.field.mu2 != REFERENCE_MU2 {
            out.push(format!("mu2 = {} (reference -3/2)", self.field.mu2));
        }
        if self.dynamics.params.c_sharp != REFERENCE_C_SHARP {
            out.push(format!("c_sharp = {} (reference 4)", self.dynamics.params.c_sharp));
        }
        if self.dynamics.params.lambda0 != 0.0 {
            out.push(format!("lambda0 = {} (reference 0)", self.dynamics.params.lambda0));
        }
        out
    }

    /// SHA-256 of the canonical JSON form. The output location is not part
    /// of the identity of a run.
    pub fn hash(&self) -> String {
        let keyed = RunConfig {
            output_dir: PathBuf::new(),
            ..self.clone()
        };
        let json = serde_json::to_vec(&keyed).expect("config serializes");
        format!("{:x}", Sha256::digest(json))
    }
}

type Setter = fn(&mut RunConfig, &str) -> std::result::Result<(), String>;

fn num(v: &str) -> std::result::Result<f64, String> {
    let x: f64 = v.parse().map_err(|_| format!("expected a number, got `{v}`"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("expected a finite number, got `{v}`"))
    }
}

fn count(v: &str) -> std::result::Result<usize, String> {
    v.parse().map_err(|_| format!("expected a nonnegative integer, got `{v}`"))
}

fn flag(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got `{v}`")),
    }
}

fn list(v: &str) -> std::result::Result<Vec<f64>, String> {
    let items: Vec<f64> = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(num)
        .collect::<std::result::Result<_, _>>()?;
    if items.is_empty() {
        Err("expected a comma-separated list of numbers".into())
    } else {
        Ok(items)
    }
}

fn profile(v: &str) -> std::result::Result<CutoffProfile, String> {
    match v {
        "exponential" => Ok(CutoffProfile::Exponential),
        "septic" => Ok(CutoffProfile::Septic),
        _ => Err(format!("expected exponential or septic, got `{v}`")),
    }
}

/// Recognized keys: section, name, setter.
const KEYS: &[(&str, &str, Setter)] = &[
    ("geometry", "h", |c, v| num(v).map(|x| c.geometry.h = x)),
    ("geometry", "L", |c, v| num(v).map(|x| c.geometry.l = x)),
    ("geometry", "Lp", |c, v| num(v).map(|x| c.geometry.lp = x)),
    ("geometry", "delta", |c, v| num(v).map(|x| c.geometry.delta = x)),
    ("field", "mu1", |c, v| num(v).map(|x| c.field.mu1 = x)),
    ("field", "mu2", |c, v| num(v).map(|x| c.field.mu2 = x)),
    ("field", "chi_profile", |c, v| profile(v).map(|x| c.field.chi_profile = x)),
    ("field", "phi_profile", |c, v| profile(v).map(|x| c.field.phi_profile = x)),
    ("quadrature", "nodes_x1", |c, v| count(v).map(|x| c.quadrature.nodes_x1 = x)),
    ("quadrature", "nodes_x2", |c, v| count(v).map(|x| c.quadrature.nodes_x2 = x)),
    ("quadrature", "boundary_nodes", |c, v| count(v).map(|x| c.quadrature.boundary_nodes = x)),
    ("quadrature", "abs_tol", |c, v| num(v).map(|x| c.quadrature.abs_tol = x)),
    ("quadrature", "mapping", |c, v| flag(v).map(|x| c.quadrature.mapping = x)),
    ("checks", "samples", |c, v| count(v).map(|x| c.checks.samples = x)),
    ("checks", "fd_step", |c, v| num(v).map(|x| c.checks.fd_step = x)),
    ("checks", "seed", |c, v| {
        v.parse()
            .map(|x| c.checks.seed = x)
            .map_err(|_| format!("expected an integer seed, got `{v}`"))
    }),
    ("dynamics", "g", |c, v| num(v).map(|x| c.dynamics.params.g = x)),
    ("dynamics", "m", |c, v| num(v).map(|x| c.dynamics.params.m = x)),
    ("dynamics", "h0", |c, v| num(v).map(|x| c.dynamics.params.h0 = x)),
    ("dynamics", "rho_f", |c, v| num(v).map(|x| c.dynamics.params.rho_f = x)),
    ("dynamics", "rho_s", |c, v| num(v).map(|x| c.dynamics.params.rho_s = x)),
    ("dynamics", "sigma", |c, v| num(v).map(|x| c.dynamics.params.sigma = x)),
    ("dynamics", "c_sharp", |c, v| num(v).map(|x| c.dynamics.params.c_sharp = x)),
    ("dynamics", "c_star", |c, v| num(v).map(|x| c.dynamics.params.c_star = x)),
    ("dynamics", "u0_energy", |c, v| num(v).map(|x| c.dynamics.params.u0_energy = x)),
    ("dynamics", "lambda0", |c, v| num(v).map(|x| c.dynamics.params.lambda0 = x)),
    ("dynamics", "dt", |c, v| num(v).map(|x| c.dynamics.dt = Some(x))),
    ("dynamics", "dt_scale", |c, v| num(v).map(|x| c.dynamics.dt_scale = x)),
    ("dynamics", "h_floor", |c, v| num(v).map(|x| c.dynamics.h_floor = x)),
    ("dynamics", "adversarial", |c, v| flag(v).map(|x| c.dynamics.adversarial = x)),
    ("dynamics", "gate_mode", |c, v| {
        c.dynamics.gate_mode = match v {
            "min" => GateMode::Min,
            "max" => GateMode::Max,
            _ => return Err(format!("expected min or max, got `{v}`")),
        };
        Ok(())
    }),
    ("dynamics", "n_max", |c, v| count(v).map(|x| c.dynamics.n_max = x)),
    ("sweep", "ladder", |c, v| list(v).map(|x| c.sweep.ladder = x)),
    ("sweep", "field_ladder", |c, v| list(v).map(|x| c.sweep.field_ladder = x)),
    ("sweep", "moment_ladder", |c, v| list(v).map(|x| c.sweep.moment_ladder = x)),
    ("sweep", "h0_grid", |c, v| list(v).map(|x| c.sweep.h0_grid = x)),
    ("sweep", "tresca_threshold", |c, v| num(v).map(|x| c.sweep.tresca_threshold = x)),
    ("sweep", "shear_measure", |c, v| {
        c.sweep.shear_measure = match v {
            "symmetric" => ShearMeasure::Symmetric,
            "doubled" => ShearMeasure::Doubled,
            _ => return Err(format!("expected symmetric or doubled, got `{v}`")),
        };
        Ok(())
    }),
    ("output", "dir", |c, v| {
        c.output_dir = PathBuf::from(v);
        Ok(())
    }),
];

/// Environment variable overriding `key` of `section`.
pub fn env_name(section: &str, key: &str) -> String {
    format!("{ENV_PREFIX}{}_{}", section.to_uppercase(), key.to_uppercase())
}

/// Where each key got its value, for error reporting. Line `0` means the
/// environment.
type Origins = BTreeMap<&'static str, usize>;

fn lookup(section: Option<&str>, key: &str) -> Option<&'static (&'static str, &'static str, Setter)> {
    let mut hits = KEYS.iter().filter(|(s, k, _)| *k == key && section.is_none_or(|sec| sec == *s));
    let first = hits.next()?;
    // bare keys must be unambiguous
    if section.is_none() && hits.next().is_some() {
        return None;
    }
    Some(first)
}

/// Parses config text; environment overrides come from `env`.
pub fn parse_config<I>(text: &str, env: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = (String, String)>,
{
    let mut cfg = RunConfig::default();
    let mut origins = Origins::new();
    let mut section: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| Error::Config {
                line,
                key: content.to_string(),
                reason: "unterminated section header".into(),
            })?;
            let name = name.trim();
            if !KEYS.iter().any(|(s, _, _)| *s == name) {
                return Err(Error::Config {
                    line,
                    key: name.to_string(),
                    reason: "unknown section".into(),
                });
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            line,
            key: content.to_string(),
            reason: "expected `key = value`".into(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let entry = lookup(section.as_deref(), key).ok_or_else(|| Error::Config {
            line,
            key: key.to_string(),
            reason: match &section {
                Some(s) => format!("unknown key in section [{s}]"),
                None => "unknown key".into(),
            },
        })?;
        (entry.2)(&mut cfg, value).map_err(|reason| Error::Config {
            line,
            key: key.to_string(),
            reason,
        })?;
        origins.insert(entry.1, line);
    }

    let env: BTreeMap<String, String> = env.into_iter().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect();
    for (sec, key, set) in KEYS {
        if let Some(value) = env.get(&env_name(sec, key)) {
            set(&mut cfg, value.trim()).map_err(|reason| Error::Config {
                line: 0,
                key: env_name(sec, key),
                reason,
            })?;
            origins.insert(key, 0);
        }
    }
    if origins.contains_key("rho_s") && !origins.contains_key("m") {
        // homogeneous disk unless the mass is given
        cfg.dynamics.params.m = std::f64::consts::PI * cfg.dynamics.params.rho_s;
    }
    validate_config(&cfg, &origins)?;
    Ok(cfg)
}

/// Reads `path` and applies the process environment.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, std::env::vars())
}

impl RunConfig {
    /// Checks every block, e.g. after command-line overrides.
    pub fn validate(&self) -> Result<()> {
        validate_config(self, &Origins::new())
    }
}

fn invariant(origins: &Origins, key: &'static str, reason: String) -> Error {
    Error::Config {
        line: origins.get(key).copied().unwrap_or(0),
        key: key.to_string(),
        reason,
    }
}

fn validate_config(cfg: &RunConfig, origins: &Origins) -> Result<()> {
    let mut heights = vec![cfg.geometry.h];
    heights.extend(cfg.sweep.ladder.iter().chain(&cfg.sweep.field_ladder).filter(|&&h| h <= 1.0));
    for &h in &heights {
        if let Some(v) = validate_geometry(&cfg.geometry.with_h(h)).first_violation() {
            let key = match v {
                GeometryViolation::NonPositiveGap { .. } => "h",
                GeometryViolation::HalfWidth { .. } => "L",
                GeometryViolation::Height { .. } => "Lp",
                GeometryViolation::NonPositiveDelta { .. } | GeometryViolation::AnnulusOutside { .. } => "delta",
            };
            return Err(invariant(origins, key, format!("at h = {h}: {v}")));
        }
    }
    for (key, ladder) in [
        ("ladder", &cfg.sweep.ladder),
        ("field_ladder", &cfg.sweep.field_ladder),
        ("moment_ladder", &cfg.sweep.moment_ladder),
        ("h0_grid", &cfg.sweep.h0_grid),
    ] {
        if let Some(bad) = ladder.iter().find(|&&h| !(h > 0.0)) {
            return Err(invariant(origins, key, format!("heights must be positive, got {bad}")));
        }
    }
    if cfg.sweep.h0_grid.iter().any(|&h| h >= 1.0) {
        return Err(invariant(origins, "h0_grid", "initial gaps must lie in (0, 1)".into()));
    }
    if !(cfg.sweep.tresca_threshold >= 0.0) {
        return Err(invariant(origins, "tresca_threshold", "must be nonnegative".into()));
    }
    cfg.quadrature.validate().map_err(|e| {
        let key = match &e {
            Error::InvalidParameter { reason, .. } if reason.starts_with("nodes_x2") => "nodes_x2",
            Error::InvalidParameter { reason, .. } if reason.starts_with("boundary_nodes") => "boundary_nodes",
            Error::InvalidParameter { name: "abs_tol", .. } => "abs_tol",
            Error::InvalidParameter { name: "mapping", .. } => "mapping",
            _ => "nodes_x1",
        };
        invariant(origins, key, e.to_string())
    })?;
    if cfg.checks.samples == 0 {
        return Err(invariant(origins, "samples", "must be positive".into()));
    }
    if !(cfg.checks.fd_step > 0.0) {
        return Err(invariant(origins, "fd_step", "must be positive".into()));
    }
    cfg.dynamics.params.validate().map_err(|e| {
        let key = match &e {
            Error::InvalidParameter { name, .. } => KEYS
                .iter()
                .find(|(s, k, _)| *s == "dynamics" && k == name)
                .map(|(_, k, _)| *k)
                .unwrap_or("m"),
            _ => "m",
        };
        invariant(origins, key, e.to_string())
    })?;
    let d = &cfg.dynamics;
    if let Some(dt) = d.dt {
        if !(dt > 0.0) {
            return Err(invariant(origins, "dt", "must be positive".into()));
        }
    }
    if !(d.dt_scale > 0.0) {
        return Err(invariant(origins, "dt_scale", "must be positive".into()));
    }
    if !(d.h_floor > 0.0) {
        return Err(invariant(origins, "h_floor", "must be positive".into()));
    }
    if d.params.h0 > 1.0 {
        return Err(invariant(origins, "h0", "the envelope only holds for h0 <= 1".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        parse_config(text, Vec::new())
    }

    #[test]
    fn empty_file_gives_defaults() {
        let c = parse("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.sweep.ladder, DEFAULT_LADDER.to_vec());
        assert_eq!(c.field.mu1, 1.0 / 6.0);
        assert_eq!(c.field.mu2, -1.5);
        assert_eq!(c.dynamics.params.c_sharp, 4.0);
        assert!(c.non_reference_values().is_empty());
    }

    #[test]
    fn sections_comments_and_bare_keys() {
        let c = parse("# run\nmu1 = 0.2\n[geometry]\nL = 3 # wider\n[sweep]\nladder = 1e-1, 1e-2,1e-3\n").unwrap();
        assert_eq!(c.field.mu1, 0.2);
        assert_eq!(c.geometry.l, 3.0);
        assert_eq!(c.sweep.ladder, vec![1e-1, 1e-2, 1e-3]);
        assert_eq!(c.non_reference_values().len(), 1);
    }

    #[test]
    fn sigma_outside_range_names_key_and_line() {
        match parse("\n[dynamics]\nsigma = 0.7\n") {
            Err(Error::Config { line, key, .. }) => assert_eq!((line, key.as_str()), (3, "sigma")),
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_key_and_type_mismatch() {
        match parse("[field]\nmu3 = 1\n") {
            Err(Error::Config { line, key, .. }) => assert_eq!((line, key.as_str()), (2, "mu3")),
            other => panic!("unexpected {other:?}"),
        }
        match parse("[quadrature]\nnodes_x1 = many\n") {
            Err(Error::Config { line, key, .. }) => assert_eq!((line, key.as_str()), (2, "nodes_x1")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("[nowhere]\n").is_err());
        assert!(parse("[field\n").is_err());
    }

    #[test]
    fn geometry_invariant_is_attributed() {
        match parse("[geometry]\ndelta = 0.05\n") {
            Err(Error::Config { line, key, .. }) => assert_eq!((line, key.as_str()), (2, "delta")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn environment_overrides_file() {
        let env = vec![
            ("TRESCA_FIELD_MU1".to_string(), "0.25".to_string()),
            ("HOME".to_string(), "/root".to_string()),
        ];
        let c = parse_config("mu1 = 0.2\n", env).unwrap();
        assert_eq!(c.field.mu1, 0.25);
        let bad = vec![("TRESCA_DYNAMICS_SIGMA".to_string(), "0.9".to_string())];
        match parse_config("", bad) {
            Err(Error::Config { line: 0, key, .. }) => assert_eq!(key, "sigma"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn density_sets_mass_unless_given() {
        let c = parse("[dynamics]\nrho_s = 70000\n").unwrap();
        assert_eq!(c.dynamics.params.m, std::f64::consts::PI * 70000.0);
        let c = parse("[dynamics]\nm = 3e5\nrho_s = 70000\n").unwrap();
        assert_eq!(c.dynamics.params.m, 3e5);
    }

    #[test]
    fn hash_tracks_content() {
        let a = parse("").unwrap();
        let b = parse("mu1 = 0.2").unwrap();
        assert_eq!(a.hash(), parse("# nothing").unwrap().hash());
        assert_ne!(a.hash(), b.hash());
    }
}
