//! Command-line entry point.
//!
//! Flags overlay the `--config` file; the merged object is validated against
//! the shipped schema before anything runs. Exit codes: 0 success, 2 invalid
//! input, 3 numerical failure.

mod config;

pub use config::{validate, FSpec, RunConfig, SCHEMA, SCHEMA_VERSION};

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::Rational64;
use serde_json::{Map, Value};

use crate::counting::{count_s_with, enumerate_simple_curves_with, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::exec::{with_threads, Exec};
use crate::experiments::report::fmt_f64;
use crate::experiments::{run_by_name, Estimate, ExperimentReport, EXPERIMENTS};
use crate::measures::{
    effective_sample_size, sample_horoball, sample_horosphere, sample_target_mirzakhani, SamplerConfig, SurfaceSample,
};
use crate::volumes::{
    asymptotic_mass_limit, assemble_v, horoball_mass, horosphere_mass, leading_w, MassKind, MassQuery, VolumeTable,
};

#[derive(Debug, Parser)]
#[command(name = "horolab", version, about = "Horoball and horosphere measures on low-complexity moduli spaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Simple closed geodesics on a fixed surface.
    #[command(subcommand)]
    Curves(CurvesOp),
    /// Volume polynomials of multicurve complements.
    #[command(subcommand)]
    Volumes(VolumesOp),
    /// Closed-form horoball and horosphere masses.
    #[command(subcommand)]
    Mass(KindOp),
    /// Draw points from a measure and dump them as CSV.
    #[command(subcommand)]
    Sample(SampleOp),
    /// Named reproducible experiments.
    #[command(subcommand)]
    Experiment(ExperimentOp),
    /// Normalization cross-checks.
    #[command(subcommand)]
    Oracle(OracleOp),
}

#[derive(Debug, Subcommand)]
enum CurvesOp {
    /// Slopes with length ≤ L, sorted by length.
    Enumerate,
    /// Number of curves of the configured type with length ≤ b₁·L.
    Count,
}

#[derive(Debug, Subcommand)]
enum VolumesOp {
    /// V(γ, L, …, L) and its polynomial.
    Eval,
}

#[derive(Debug, Subcommand)]
enum KindOp {
    Horoball,
    Horosphere,
}

#[derive(Debug, Subcommand)]
enum SampleOp {
    Horoball,
    Horosphere,
    /// Moduli-space draws weighted by B(X).
    Target,
}

#[derive(Debug, Subcommand)]
enum ExperimentOp {
    Run {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(EXPERIMENTS))]
        name: String,
    },
}

#[derive(Debug, Subcommand)]
enum OracleOp {
    MassConsistency,
}

/// Every flag maps onto the run-config key of the same meaning.
#[derive(Debug, Args)]
struct Opts {
    /// JSON run configuration; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (output does not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write `<name>-<seedhash>.{json,csv}` here instead of printing.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Surface signature `g,n` or `g,n,b`.
    #[arg(long, global = true)]
    surface: Option<String>,
    /// Multicurve key, e.g. `nonsep`.
    #[arg(long, global = true)]
    curve: Option<String>,
    /// Fenchel–Nielsen coordinates `ℓ,τ`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    point: Option<String>,
    #[arg(long = "L", global = true, allow_hyphen_values = true)]
    l: Option<String>,
    /// Comma-separated levels.
    #[arg(long, global = true)]
    schedule: Option<String>,
    /// Upper corner of the box indicator `f`, comma-separated.
    #[arg(long = "box", global = true, allow_hyphen_values = true)]
    box_hi: Option<String>,
    /// Multicurve weights, e.g. `1,1/2`.
    #[arg(short = 'a', long = "weights", global = true)]
    weights: Option<String>,
    /// Boundary lengths, comma-separated.
    #[arg(short = 'b', long = "boundary", global = true, allow_hyphen_values = true)]
    boundary: Option<String>,
    /// `half_cell` or `full_cell`.
    #[arg(long, global = true)]
    conv: Option<String>,
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Experiment parameters as a JSON object.
    #[arg(long, global = true)]
    params: Option<String>,
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Curves(CurvesOp::Enumerate) => "curves enumerate",
            Cmd::Curves(CurvesOp::Count) => "curves count",
            Cmd::Volumes(VolumesOp::Eval) => "volumes eval",
            Cmd::Mass(KindOp::Horoball) => "mass horoball",
            Cmd::Mass(KindOp::Horosphere) => "mass horosphere",
            Cmd::Sample(SampleOp::Horoball) => "sample horoball",
            Cmd::Sample(SampleOp::Horosphere) => "sample horosphere",
            Cmd::Sample(SampleOp::Target) => "sample target",
            Cmd::Experiment(_) => "experiment run",
            Cmd::Oracle(OracleOp::MassConsistency) => "oracle mass-consistency",
        }
    }
}

/// A number if it parses as one, else the raw string (so the schema reports it).
fn scalar(s: &str) -> Value {
    match serde_json::from_str::<Value>(s.trim()) {
        Ok(v @ Value::Number(_)) => v,
        _ => Value::String(s.trim().to_string()),
    }
}

fn list(s: &str) -> Value {
    Value::Array(s.split(',').map(scalar).collect())
}

/// Config file plus flag overrides, before validation.
fn merged(cli: &Cli) -> Result<Value> {
    let mut m = match &cli.opts.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?;
            match serde_json::from_str(&text) {
                Ok(Value::Object(m)) => m,
                Ok(_) => return Err(Error::InvalidInput(format!("{}: /: expected a JSON object", p.display()))),
                Err(e) => return Err(Error::InvalidInput(format!("{}: {e}", p.display()))),
            }
        }
        None => Map::new(),
    };
    let o = &cli.opts;
    m.insert("command".into(), cli.cmd.name().into());
    if let Cmd::Experiment(ExperimentOp::Run { name }) = &cli.cmd {
        m.insert("experiment".into(), name.as_str().into());
    }
    if matches!(cli.cmd, Cmd::Oracle(_)) {
        m.insert("experiment".into(), "mass-consistency".into());
    }
    let mut set = |k: &str, v: Option<Value>| {
        if let Some(v) = v {
            m.insert(k.into(), v);
        }
    };
    set("seed", o.seed.map(Value::from));
    set("thread_count", o.threads.map(Value::from));
    set("out", o.out.as_ref().map(|p| p.display().to_string().into()));
    set("surface", o.surface.as_deref().map(Value::from));
    set("curve", o.curve.as_deref().map(Value::from));
    set("point", o.point.as_deref().map(list));
    set("L", o.l.as_deref().map(scalar));
    set("schedule", o.schedule.as_deref().map(list));
    set("f", o.box_hi.as_deref().map(|s| serde_json::json!({"kind": "box", "hi": list(s)})));
    set("a", o.weights.as_deref().map(|s| {
        Value::Array(s.split(',').map(|t| match scalar(t) {
            Value::Number(n) if n.is_u64() => Value::Number(n),
            _ => Value::String(t.trim().into()),
        }).collect())
    }));
    set("b", o.boundary.as_deref().map(list));
    set("conv", o.conv.as_deref().map(Value::from));
    set("sample_count", o.samples.map(Value::from));
    if let Some(p) = &o.params {
        let v = serde_json::from_str(p).map_err(|e| Error::InvalidInput(format!("--params: {e}")))?;
        m.insert("params".into(), v);
    }
    Ok(Value::Object(m))
}

/// What a command produced: a report (JSON artifact), an optional wide CSV
/// replacing the long-format one, and the text printed without `--out`.
pub struct Output {
    pub report: ExperimentReport,
    pub csv: Option<String>,
    pub stdout: String,
}

impl Output {
    fn stem(&self) -> String {
        format!("{}-{}", self.report.name, self.report.seedhash())
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::InvalidInput(format!("{}: {e}", dir.display())))?;
        let stem = self.stem();
        let csv = self.csv.clone().unwrap_or_else(|| self.report.to_csv());
        let mut paths = Vec::new();
        for (ext, body) in [("json", self.report.to_json()), ("csv", csv)] {
            let p = dir.join(format!("{stem}.{ext}"));
            std::fs::write(&p, body).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?;
            paths.push(p);
        }
        Ok(paths)
    }
}

fn slug(command: &str) -> String {
    command.replace(' ', "-")
}

fn samples_csv(samples: &[SurfaceSample], seed: u64) -> String {
    let k = samples.first().map_or(1, |s| s.point.pants_curve_lengths.len());
    let mut out = String::from("seed,index");
    for i in 1..=k {
        let _ = write!(out, ",l{i}");
    }
    for i in 1..=k {
        let _ = write!(out, ",tau{i}");
    }
    out.push_str(",weight,provenance\n");
    for (i, s) in samples.iter().enumerate() {
        let _ = write!(out, "{seed},{i}");
        for v in s.point.pants_curve_lengths.iter().chain(&s.point.twists) {
            let _ = write!(out, ",{}", fmt_f64(*v));
        }
        let _ = writeln!(out, ",{},{}", fmt_f64(s.weight), s.provenance.as_str());
    }
    out
}

/// Runs a validated configuration.
pub fn execute(c: &RunConfig, exec: Exec) -> Result<Output> {
    let seed = c.seed.unwrap_or(0);
    let name = slug(&c.command);
    let mut materialized = c.clone();
    let mut report = |seeds: Vec<u64>| {
        if !seeds.is_empty() {
            materialized.seed = Some(seed);
        }
        ExperimentReport::new(&name, &materialized, seeds)
    };
    match c.command.as_str() {
        "curves enumerate" => {
            let x = c.fn_point()?;
            let l = c.level()?;
            let curves = enumerate_simple_curves_with(&x, l, DEFAULT_CAP, exec)?;
            let mut r = report(vec![]);
            r.estimates.push(Estimate::exact("count", curves.len() as f64));
            let mut csv = String::from("p,q,length\n");
            for (s, len) in &curves {
                let _ = writeln!(csv, "{},{},{}", s.p, s.q, fmt_f64(*len));
            }
            Ok(Output { report: r, stdout: csv.clone(), csv: Some(csv) })
        }
        "curves count" => {
            let x = c.fn_point()?;
            let config = c.multicurve()?;
            let f = c.weight_spec(config.k());
            let res = count_s_with(&x, &config, f.hi(), c.level()?, DEFAULT_CAP, exec)?;
            let mut r = report(vec![]);
            r.estimates.push(Estimate::exact("count", res.count as f64));
            r.estimates.push(Estimate::exact("normalized", res.normalized));
            let stdout = format!("count {}\nnormalized {}\n", res.count, fmt_f64(res.normalized));
            Ok(Output { report: r, csv: None, stdout })
        }
        "volumes eval" => {
            let config = c.multicurve()?;
            let l = c.level()?;
            let v = assemble_v(&config, VolumeTable::shipped())?;
            let value = v.eval(&vec![l; config.k()]);
            let mut r = report(vec![]);
            r.estimates.push(Estimate::exact("value", value));
            r.findings = serde_json::json!({"polynomial": v.to_string(), "leading": leading_w(&v).to_string()});
            let stdout = format!("value {}\npolynomial {v}\n", fmt_f64(value));
            Ok(Output { report: r, csv: None, stdout })
        }
        "mass horoball" | "mass horosphere" => {
            let config = c.multicurve()?;
            let f = c.weight_spec(config.k()).build()?;
            let q = MassQuery::new(config, f, c.level()?)?;
            let table = VolumeTable::shipped();
            let (kind, mass) = if c.command == "mass horoball" {
                (MassKind::Horoball, horoball_mass(&q, table)?)
            } else {
                (MassKind::Horosphere, horosphere_mass(&q, table)?)
            };
            let limit = asymptotic_mass_limit(&q, kind, table)?;
            let mut r = report(vec![]);
            r.estimates.push(Estimate::exact("mass", mass));
            r.estimates.push(Estimate::exact("limit", limit));
            let stdout = format!("mass {}\nlimit {}\n", fmt_f64(mass), fmt_f64(limit));
            Ok(Output { report: r, csv: None, stdout })
        }
        "sample horoball" | "sample horosphere" | "sample target" => {
            let cfg = SamplerConfig::new(seed, c.sample_count).with_exec(exec).with_convention(c.conv);
            let samples = match c.command.as_str() {
                "sample target" => sample_target_mirzakhani(c.moduli_surface()?, &cfg)?,
                cmd => {
                    let config = c.multicurve()?;
                    let f = c.weight_spec(config.k()).build()?;
                    if cmd == "sample horoball" {
                        sample_horoball(&config, &f, c.level()?, &cfg)?
                    } else {
                        let a: Vec<Rational64> = config.weights.clone();
                        sample_horosphere(&config, &a, &f, c.level()?, &cfg)?
                    }
                }
            };
            let mut r = report(vec![seed]);
            r.estimates.push(Estimate::exact("effective_sample_size", effective_sample_size(&samples)));
            let csv = samples_csv(&samples, seed);
            Ok(Output { report: r, stdout: csv.clone(), csv: Some(csv) })
        }
        "experiment run" | "oracle mass-consistency" => {
            let name = c.experiment.as_deref().unwrap_or("mass-consistency");
            let r = run_by_name(name, c.params.clone(), c.seed, exec)?;
            let stdout = r.to_json();
            Ok(Output { report: r, csv: None, stdout })
        }
        other => Err(Error::InvalidInput(format!("/command: unknown command `{other}`"))),
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        3
    } else {
        2
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let run = || -> Result<Output> {
        let c = RunConfig::from_value(merged(&cli)?)?;
        let threads = c.thread_count.unwrap_or(0);
        with_threads(threads, || execute(&c, Exec::default()))
    };
    match run() {
        Ok(out) => {
            if let Some(dir) = &cli.opts.out {
                match out.write(dir) {
                    Ok(paths) => paths.iter().for_each(|p| println!("{}", p.display())),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return exit_code(&e);
                    }
                }
            } else {
                print!("{}", out.stdout);
            }
            for c in out.report.criteria.iter().filter(|c| !c.pass) {
                eprintln!("criterion failed: {} = {} ({})", c.name, fmt_f64(c.value), c.rule);
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> i32 {
        main_with_args(std::iter::once("horolab").chain(args.iter().copied()))
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(&["volumes", "eval", "--L", "3"]), 0);
        assert_eq!(run(&["curves", "count", "--point", "-1,0", "--L", "5"]), 2);
        assert_eq!(run(&["curves", "frobnicate"]), 2);
        assert_eq!(run(&["mass", "horoball", "--surface", "7,7", "--L", "1"]), 2);
    }

    #[test]
    fn volumes_eval_prints_value_and_polynomial() {
        let c = RunConfig::from_value(serde_json::json!({"command": "volumes eval", "L": 3})).unwrap();
        let out = execute(&c, Exec::Sequential).unwrap();
        assert!(out.stdout.starts_with("value "));
        assert!(out.stdout.contains("polynomial "));
    }

    #[test]
    fn sample_csv_layout() {
        let c = RunConfig::from_value(serde_json::json!({"command": "sample target", "sample_count": 3, "seed": 5}))
            .unwrap();
        let out = execute(&c, Exec::Sequential).unwrap();
        let csv = out.csv.unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "seed,index,l1,tau1,weight,provenance");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("5,0,") && lines[1].ends_with(",target"));
    }
}
