use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use tresca_core::dynamics::GateMode;
use tresca_core::{load_config, parse_config, run_suite, Point, RunConfig, Suite, TestField};

/// Verification suites for the disk-on-wall contact argument.
#[derive(Parser, Debug)]
#[command(name = "tresca", version)]
struct Cli {
    /// Plain-text `key = value` config with `[section]` headers.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `[output] dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Divergence, boundary, rigidity and parity checks of the test field.
    VerifyFields(FieldFlags),
    /// Evaluate the test field at points read from a CSV file (`x1,x2`).
    FieldEval {
        #[command(flatten)]
        field: FieldFlags,
        #[arg(long)]
        h: Option<f64>,
        /// CSV with columns `x1,x2`; `-` reads stdin.
        #[arg(long)]
        points: PathBuf,
    },
    /// Scaling fits of every bound across the gap ladder.
    ScalingSweep {
        #[command(flatten)]
        field: FieldFlags,
        /// Comma-separated gap heights.
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<f64>>,
    },
    /// Integrate the contact envelope and replay the time sequence.
    ContactSim(DynamicsFlags),
    /// Minimal disk mass for the configured parameters and `h0` grid.
    MinimalMass(DynamicsFlags),
    /// Evaluate each clause of the parameter gate.
    ParamGate(DynamicsFlags),
    /// Run a named suite: verify-fields, scaling-sweep, contact-sim, param-gate, minimal-mass or all.
    Run { suite: String },
}

#[derive(Args, Debug, Default)]
struct FieldFlags {
    #[arg(long)]
    mu1: Option<f64>,
    #[arg(long)]
    mu2: Option<f64>,
}

impl FieldFlags {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(v) = self.mu1 {
            cfg.field.mu1 = v;
        }
        if let Some(v) = self.mu2 {
            cfg.field.mu2 = v;
        }
    }
}

#[derive(Args, Debug, Default)]
struct DynamicsFlags {
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    h0: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long = "c-sharp")]
    c_sharp: Option<f64>,
    #[arg(long = "c-star")]
    c_star: Option<f64>,
    /// Absolute time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Cap the descent speed at `2 sqrt(g h0)`.
    #[arg(long)]
    adversarial: bool,
    /// Combine the two gap bounds of the gate with `max` instead of `min`.
    #[arg(long = "gate-max")]
    gate_max: bool,
}

impl DynamicsFlags {
    fn apply(&self, cfg: &mut RunConfig) {
        let p = &mut cfg.dynamics.params;
        for (slot, v) in [
            (&mut p.g, self.g),
            (&mut p.m, self.m),
            (&mut p.h0, self.h0),
            (&mut p.sigma, self.sigma),
            (&mut p.c_sharp, self.c_sharp),
            (&mut p.c_star, self.c_star),
        ] {
            if let Some(v) = v {
                *slot = v;
            }
        }
        if self.dt.is_some() {
            cfg.dynamics.dt = self.dt;
        }
        if self.adversarial {
            cfg.dynamics.adversarial = true;
        }
        if self.gate_max {
            cfg.dynamics.gate_mode = GateMode::Max;
        }
    }
}

#[derive(Debug, Deserialize)]
struct PointRow {
    x1: f64,
    x2: f64,
}

#[derive(Debug, Serialize)]
struct EvalRow {
    x1: f64,
    x2: f64,
    w1: f64,
    w2: f64,
    q: f64,
    residual: f64,
}

fn load(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path).map_err(|e| format!("{}: {e}", path.display()))?,
        None => parse_config("", std::env::vars()).map_err(|e| e.to_string())?,
    };
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn field_eval(cfg: &RunConfig, h: Option<f64>, points: &PathBuf, out: Option<&PathBuf>) -> Result<(), String> {
    let mut text = String::new();
    if points.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text).map_err(|e| e.to_string())?;
    } else {
        text = std::fs::read_to_string(points).map_err(|e| format!("{}: {e}", points.display()))?;
    }
    let geom = cfg.geometry.with_h(h.unwrap_or(cfg.geometry.h));
    geom.ensure_valid().map_err(|e| e.to_string())?;
    let field = TestField::new(cfg.field, geom).map_err(|e| e.to_string())?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in reader.deserialize::<PointRow>().enumerate() {
        let p = rec.map_err(|e| format!("points row {}: {e}", i + 1))?;
        let s = field
            .sample(Point::new(p.x1, p.x2))
            .map_err(|e| format!("points row {} ({}, {}): {e}", i + 1, p.x1, p.x2))?;
        rows.push(EvalRow {
            x1: p.x1,
            x2: p.x2,
            w1: s.w[0],
            w2: s.w[1],
            q: s.q,
            residual: s.residual[0].hypot(s.residual[1]),
        });
    }
    let sink: Box<dyn Write> = match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
            Box::new(std::fs::File::create(dir.join("field_eval.csv")).map_err(|e| e.to_string())?)
        }
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for r in &rows {
        w.serialize(r).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<bool, String> {
    let mut cfg = load(&cli)?;
    let suite = match &cli.command {
        Command::VerifyFields(f) => {
            f.apply(&mut cfg);
            Suite::VerifyFields
        }
        Command::FieldEval { field, h, points } => {
            field.apply(&mut cfg);
            cfg.validate().map_err(|e| e.to_string())?;
            field_eval(&cfg, *h, points, cli.out.as_ref())?;
            return Ok(true);
        }
        Command::ScalingSweep { field, ladder } => {
            field.apply(&mut cfg);
            if let Some(l) = ladder {
                cfg.sweep.ladder = l.clone();
            }
            Suite::ScalingSweep
        }
        Command::ContactSim(d) => {
            d.apply(&mut cfg);
            Suite::ContactSim
        }
        Command::MinimalMass(d) => {
            d.apply(&mut cfg);
            Suite::MinimalMass
        }
        Command::ParamGate(d) => {
            d.apply(&mut cfg);
            Suite::ParamGate
        }
        Command::Run { suite } => suite.parse().map_err(|e: tresca_core::Error| e.to_string())?,
    };
    cfg.validate().map_err(|e| e.to_string())?;
    let manifest = run_suite(&cfg, suite).map_err(|e| e.to_string())?;
    // a closed pipe (`tresca ... | head`) must not turn a verdict into a panic
    let mut stdout = io::stdout().lock();
    let _ = write!(stdout, "{}", manifest.verdict_table());
    let _ = writeln!(stdout, "outputs in {}", cfg.output_dir.display());
    Ok(manifest.passed())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
