//! Command-line front end for the `ctcsim` simulator.

pub mod config;
pub mod output;

use std::fmt::Write;

use clap::{Args, Parser, Subcommand};
use ctcsim_core::deutsch::{solve_deutsch_with, RANK_TOL};
use ctcsim_core::pctc::pctc_output_with_resource;
use ctcsim_core::{
    bloch_from_state, conjecture_harness, davies_apply, davies_superoperator, gibbs_state, is_cptp,
    noisy_bell, sweep, trace_distance, von_neumann_entropy, Circuit, CptpVerdict, DensityOperator,
    ParamGrids, Selection, SweepCircuit, SweepSpec,
};

pub use config::Settings;

/// A failed command, carrying its process exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Core(ctcsim_core::Error),
    Io(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        use ctcsim_core::Error as E;
        match self {
            Self::Usage(_) => 2,
            Self::Io(_) => 5,
            Self::Core(E::UnsupportedAmbiguity { .. }) => 3,
            Self::Core(E::ZeroPostselection { .. }) => 4,
            Self::Core(E::NoConvergence { .. } | E::Infeasible(_)) => 1,
            Self::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "{m}"),
            Self::Core(e) => write!(f, "{e}"),
            Self::Io(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ctcsim_core::Error> for CliError {
    fn from(e: ctcsim_core::Error) -> Self {
        Self::Core(e)
    }
}

#[derive(Debug, Parser)]
#[command(name = "ctcsim", version, about = "Noisy closed-timelike-curve circuit simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a qubit under the Davies map and check the channel.
    Davies(CommonArgs),
    /// Solve a Deutsch CTC circuit.
    Deutsch(CommonArgs),
    /// Solve the unproven-theorem circuit.
    Unproven(CommonArgs),
    /// Run the post-selected CTC circuit.
    Pctc(CommonArgs),
    /// Write a distinguishability sweep as CSV.
    Sweep(CommonArgs),
    /// Run the randomized never-enhancement harness.
    Conjecture(CommonArgs),
}

/// Flags shared by every subcommand. Values may also come from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long = "A")]
    pub a: Option<String>,
    #[arg(long = "G")]
    pub g: Option<String>,
    #[arg(long)]
    pub omega: Option<String>,
    #[arg(long)]
    pub t: Option<String>,
    /// Davies input state: 0, 1, plus, minus, or x,y,z.
    #[arg(long)]
    pub state: Option<String>,
    /// deutsch_fig1, unproven_fig5, pctc_fig4, or identity.
    #[arg(long)]
    pub circuit: Option<String>,
    /// Circuit input state: 0, 1, plus, minus, or x,y,z.
    #[arg(long)]
    pub input: Option<String>,
    /// P-CTC resource: bell (noisy), or a basis product 00, 01, 10, 11.
    #[arg(long)]
    pub resource: Option<String>,
    #[arg(long)]
    pub trials: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub config: Option<String>,
    /// Significant digits for numeric output, 6 to 17.
    #[arg(long)]
    pub precision: Option<String>,
}

impl CommonArgs {
    pub fn settings(&self) -> Result<Settings, CliError> {
        let mut s = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        let flags = [
            ("p", &self.p),
            ("A", &self.a),
            ("G", &self.g),
            ("omega", &self.omega),
            ("t", &self.t),
            ("state", &self.state),
            ("circuit", &self.circuit),
            ("input", &self.input),
            ("resource", &self.resource),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("out", &self.out),
            ("precision", &self.precision),
        ];
        for (key, value) in flags {
            s.overlay(key, value.as_deref());
        }
        Ok(s)
    }
}

/// Runs a parsed command and returns its standard output.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Davies(a) => cmd_davies(&a.settings()?),
        Command::Deutsch(a) => cmd_deutsch(&a.settings()?, None),
        Command::Unproven(a) => cmd_deutsch(&a.settings()?, Some(Circuit::UnprovenFig5)),
        Command::Pctc(a) => cmd_pctc(&a.settings()?),
        Command::Sweep(a) => cmd_sweep(&a.settings()?),
        Command::Conjecture(a) => cmd_conjecture(&a.settings()?),
    }
}

fn write_file(path: &str, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("cannot write {path}: {e}")))
}

pub fn cmd_davies(s: &Settings) -> Result<String, CliError> {
    let prec = s.precision()?;
    let d = s.params()?;
    let rho = s.state("state", "0")?;
    let out_state = davies_apply(&d, &rho)?;
    let r = bloch_from_state(&out_state)?;
    let verdict = match is_cptp(&davies_superoperator(&d)) {
        CptpVerdict::Valid => "valid".to_string(),
        CptpVerdict::TraceViolation(x) => format!("trace violation {}", output::real(x, prec)),
        CptpVerdict::CpViolation(x) => format!("CP violation {}", output::real(x, prec)),
    };
    let gibbs = trace_distance(&out_state, &gibbs_state(d.p())?)?;
    let mut out = String::new();
    writeln!(out, "state:").unwrap();
    out.push_str(&output::matrix(out_state.matrix(), prec));
    writeln!(out, "bloch: {}", r.0.map(|v| output::real(v, prec)).join(" ")).unwrap();
    writeln!(out, "cptp: {verdict}").unwrap();
    writeln!(out, "gibbs_distance: {}", output::real(gibbs, prec)).unwrap();
    Ok(out)
}

fn parse_circuit(name: &str) -> Result<Circuit, CliError> {
    match name {
        "deutsch_fig1" => Ok(Circuit::DeutschFig1),
        "unproven_fig5" => Ok(Circuit::UnprovenFig5),
        "identity" => Ok(Circuit::Identity),
        other => Err(CliError::usage(format!(
            "unknown Deutsch circuit '{other}' (expected deutsch_fig1, unproven_fig5 or identity)"
        ))),
    }
}

pub fn cmd_deutsch(s: &Settings, forced: Option<Circuit>) -> Result<String, CliError> {
    let prec = s.precision()?;
    let circuit = match forced {
        Some(c) => c,
        None => parse_circuit(s.get("circuit").unwrap_or("deutsch_fig1"))?,
    };
    let d = s.params()?;
    let rho_i = match circuit.fixed_input() {
        Some(fixed) => {
            if s.get("input").is_some() {
                return Err(CliError::usage("this circuit has a fixed input; drop --input"));
            }
            fixed
        }
        None => s.state("input", "minus")?,
    };
    let rank_tol = s.real("rank_tol", RANK_TOL)?;
    let res = solve_deutsch_with(&circuit.unitary(), &rho_i, &d, rank_tol)?;
    let selection = match res.selection {
        Selection::Unique => "unique",
        Selection::MaxEntropySelected => "max_entropy_selected",
    };
    let mut out = String::new();
    writeln!(out, "dimension: {}", res.solution_set.dimension()).unwrap();
    writeln!(out, "selection: {selection}").unwrap();
    writeln!(out, "tau:").unwrap();
    out.push_str(&output::matrix(res.tau.matrix(), prec));
    writeln!(out, "entropy: {}", output::real(von_neumann_entropy(&res.tau), prec)).unwrap();
    writeln!(out, "rho_f:").unwrap();
    out.push_str(&output::matrix(res.rho_f.matrix(), prec));
    Ok(out)
}

fn parse_resource(s: &Settings) -> Result<DensityOperator, CliError> {
    let name = s.get("resource").unwrap_or("bell");
    let k = match name {
        "bell" => return Ok(noisy_bell(&s.params()?)?),
        "00" => 0,
        "01" => 1,
        "10" => 2,
        "11" => 3,
        other => {
            return Err(CliError::usage(format!(
                "unknown resource '{other}' (expected bell, 00, 01, 10 or 11)"
            )))
        }
    };
    Ok(DensityOperator::basis(k, 2)?)
}

pub fn cmd_pctc(s: &Settings) -> Result<String, CliError> {
    let prec = s.precision()?;
    let rho_i = s.state("input", "1")?;
    s.params()?;
    let chi = parse_resource(s)?;
    let res = pctc_output_with_resource(&rho_i, &chi)?;
    let mut out = String::new();
    writeln!(out, "rho_f:").unwrap();
    out.push_str(&output::matrix(res.rho_f.matrix(), prec));
    writeln!(out, "postselection_weight: {}", output::real(res.postselection_weight, prec)).unwrap();
    Ok(out)
}

pub fn sweep_spec(s: &Settings) -> Result<SweepSpec, CliError> {
    let circuit = match s.get("circuit").unwrap_or("deutsch_fig1") {
        "deutsch_fig1" => SweepCircuit::DeutschFig1,
        "pctc_fig4" => SweepCircuit::PctcFig4,
        "unproven_fig5" => SweepCircuit::UnprovenFig5,
        other => return Err(CliError::usage(format!("unknown sweep circuit '{other}'"))),
    };
    Ok(SweepSpec {
        circuit,
        grids: ParamGrids {
            p: s.grid("p", 0.0)?,
            a: s.grid("A", 0.0)?,
            g: s.grid("G", 0.0)?,
            omega: s.grid("omega", 1.0)?,
            t: s.grid("t", 0.0)?,
        },
    })
}

pub fn cmd_sweep(s: &Settings) -> Result<String, CliError> {
    let prec = s.precision()?;
    let spec = sweep_spec(s)?;
    let rows = sweep(&spec)?;
    let csv = output::csv(&rows, prec);
    match s.get("out") {
        Some(path) => {
            write_file(path, &csv)?;
            Ok(format!("rows: {}\nwrote: {path}\n", rows.len()))
        }
        None => Ok(csv),
    }
}

pub fn cmd_conjecture(s: &Settings) -> Result<String, CliError> {
    let trials = s.trials(1000)?;
    let seed = s.seed()?;
    let prec = s.precision()?;
    let report = conjecture_harness(trials, seed)?;
    if let Some(path) = s.get("out") {
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::Io(format!("cannot serialize report: {e}")))?;
        write_file(path, &(json + "\n"))?;
    }
    let mut out = String::new();
    writeln!(out, "trials: {trials}").unwrap();
    writeln!(out, "seed: {seed}").unwrap();
    writeln!(out, "violations: {}", report.violations()).unwrap();
    writeln!(out, "max_enhancement: {}", output::real(report.max_violation, prec)).unwrap();
    writeln!(out, "contractivity_failures: {}", report.contractivity_failures).unwrap();
    writeln!(out, "skipped: {}", report.skipped).unwrap();
    Ok(out)
}
