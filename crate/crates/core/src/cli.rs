//! Command-line front end. Every subcommand emits a line-delimited JSON
//! report; exit codes are 0 (all pass), 1 (a certified failure) and 2
//! (usage, parse or size errors).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::asdim::{
    construct_witness, oracle_min_families, run_pipeline, scale_graph, verify_witness, DimensionWitness,
};
use crate::coarse::{
    check_coarsely_onto, check_expansive, check_proper, construct_coarse_inverse, push_witness, CoarseMap,
};
use crate::config::{read, RunConfig};
use crate::error::{Error, Result};
use crate::point::Window;
use crate::rational::Rational;
use crate::report::{CertReport, Record};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "fuzzy-asdim",
    version,
    about = "Exact certificates for fuzzy metric spaces at explicit scales"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Built-in space: standard, standard_reals, lattice:<dim>, pathological,
    /// reciprocal_product, ratio_minmax, ultrametric.
    #[arg(long)]
    pub space: Option<String>,
    /// Override the space's t-norm: product, min, lukasiewicz.
    #[arg(long)]
    pub tnorm: Option<String>,
    /// `a..b`, `grid:a..b/den`, `box:dim:a..b` or `{p1,p2,...}`.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Scale `r:t` with rationals `p/q`; repeatable.
    #[arg(long = "scale")]
    pub scales: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML file whose values override the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the fuzzy metric axioms exhaustively on a window.
    VerifyAxioms {
        #[command(flatten)]
        common: Common,
        /// Comma-separated times.
        #[arg(long, value_delimiter = ',')]
        t_grid: Vec<String>,
        /// Windows above this size are sampled (seeded).
        #[arg(long)]
        max_exhaustive: Option<usize>,
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Build and verify a witness with the space's constructor.
    Witness {
        #[command(flatten)]
        common: Common,
        /// Where to write the witness JSON.
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
    /// Verify a witness file, optionally at other scales.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Witness -> multiplicity cover -> Lebesgue cover -> refinement.
    Pipeline {
        #[command(flatten)]
        common: Common,
    },
    /// Check a coarse map and optionally transport a witness through it.
    Coarse {
        #[command(flatten)]
        common: Common,
        /// Map file, JSON or TOML.
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long)]
        target_space: Option<String>,
        #[arg(long)]
        target_tnorm: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        target_window: Option<String>,
        /// Target scale `r:t` for witness transport.
        #[arg(long)]
        transport: Option<String>,
    },
    /// Brute-force minimum family count on a tiny window, cross-checked
    /// against the constructor.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Bound parameters for members; the constructor's when absent.
        #[arg(long)]
        bound: Option<String>,
    },
}

impl Common {
    fn flags(&self) -> RunConfig {
        RunConfig {
            space: self.space.clone(),
            tnorm: self.tnorm.clone(),
            window: self.window.clone(),
            scales: self.scales.clone(),
            seed: Some(self.seed),
            out: self.out.clone(),
            ..Default::default()
        }
    }
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::VerifyAxioms { common, .. }
            | Command::Witness { common, .. }
            | Command::Check { common, .. }
            | Command::Pipeline { common }
            | Command::Coarse { common, .. }
            | Command::Oracle { common, .. } => common,
        }
    }

    /// Flags first, then the config file on top.
    fn config(&self) -> Result<RunConfig> {
        let mut c = self.common().flags();
        match self {
            Command::VerifyAxioms {
                t_grid,
                max_exhaustive,
                sample,
                ..
            } => {
                c.t_grid = t_grid.clone();
                c.max_exhaustive = *max_exhaustive;
                c.sample = *sample;
            }
            Command::Witness { witness_out, .. } => c.witness_out = witness_out.clone(),
            Command::Check { witness, .. } => c.witness = witness.clone(),
            Command::Pipeline { .. } => {}
            Command::Coarse {
                map,
                target_space,
                target_tnorm,
                target_window,
                transport,
                ..
            } => {
                c.map = map.clone();
                c.target_space = target_space.clone();
                c.target_tnorm = target_tnorm.clone();
                c.target_window = target_window.clone();
                c.transport = transport.clone();
            }
            Command::Oracle { bound, .. } => c.bound = bound.clone(),
        }
        match &self.common().config {
            Some(path) => Ok(c.overridden_by(RunConfig::load(path)?)),
            None => Ok(c),
        }
    }
}

/// Exit code for an error: certification-type failures are 1, everything
/// about inputs is 2.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Certification(_) | Error::SearchFailure(_) | Error::Derivation(_) | Error::NonArchimedean(_) => {
            EXIT_FAIL
        }
        Error::Domain(_)
        | Error::Unsupported(_)
        | Error::Precondition(_)
        | Error::Parse(_)
        | Error::Rational(_)
        | Error::Io { .. } => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
            } else {
                let _ = stdout.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let config = match cli.command.config() {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let (report, code) = match execute(&cli.command, &config) {
        Ok(report) => {
            let code = if report.passed() { EXIT_PASS } else { EXIT_FAIL };
            (report, code)
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            let code = exit_code(&e);
            if code != EXIT_FAIL {
                return code;
            }
            let mut report = CertReport::new(subject(&cli.command));
            report.push(Record::fail("error").note(e.to_string()));
            (report, code)
        }
    };
    let text = report.to_jsonl();
    let written = match &config.out {
        Some(path) => std::fs::write(path, &text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        }),
        None => stdout.write_all(text.as_bytes()).map_err(|source| Error::Io {
            path: "<stdout>".into(),
            source,
        }),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_USAGE;
    }
    code
}

fn subject(cmd: &Command) -> &'static str {
    match cmd {
        Command::VerifyAxioms { .. } => "verify-axioms",
        Command::Witness { .. } => "witness",
        Command::Check { .. } => "check",
        Command::Pipeline { .. } => "pipeline",
        Command::Coarse { .. } => "coarse",
        Command::Oracle { .. } => "oracle",
    }
}

fn execute(cmd: &Command, c: &RunConfig) -> Result<CertReport> {
    let mut report = CertReport::new(subject(cmd));
    match cmd {
        Command::VerifyAxioms { .. } => verify_axioms(c, &mut report)?,
        Command::Witness { .. } => witness(c, &mut report)?,
        Command::Check { .. } => check(c, &mut report)?,
        Command::Pipeline { .. } => pipeline(c, &mut report)?,
        Command::Coarse { .. } => coarse(c, &mut report)?,
        Command::Oracle { .. } => oracle(c, &mut report)?,
    }
    Ok(report)
}

const DEFAULT_MAX_EXHAUSTIVE: usize = 200;

fn verify_axioms(c: &RunConfig, report: &mut CertReport) -> Result<()> {
    let space = c.space()?;
    let mut window = c.window()?;
    let limit = c.max_exhaustive.unwrap_or(DEFAULT_MAX_EXHAUSTIVE);
    if window.len() > limit {
        let k = c.sample.unwrap_or(limit).min(window.len());
        let mut rng = ChaCha8Rng::seed_from_u64(c.seed.unwrap_or(0));
        let picked = rand::seq::index::sample(&mut rng, window.len(), k);
        let label = window.label();
        window = Window::from_points(picked.iter().map(|i| window.points()[i].clone()));
        report.push(Record::not_checked("exhaustive").note(format!(
            "{label} sampled down to {k} points with seed {}",
            c.seed.unwrap_or(0)
        )));
    }
    report.absorb(space.check_axioms(&window, &c.t_grid()?)?);
    Ok(())
}

fn witness(c: &RunConfig, report: &mut CertReport) -> Result<()> {
    let space = c.space()?;
    let window = c.window()?;
    let mut built = Vec::new();
    for p in c.required_scales()? {
        let w = construct_witness(&space, p, &window)?;
        report.absorb(verify_witness(&space, &w)?);
        built.push(w);
    }
    if let Some(path) = &c.witness_out {
        let text = if built.len() == 1 {
            built[0].to_json()
        } else {
            serde_json::to_string_pretty(&built).expect("witnesses serialize")
        };
        std::fs::write(path, text + "\n").map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(())
}

/// A single witness or a list of them.
pub fn read_witnesses(path: &Path) -> Result<Vec<DimensionWitness>> {
    let text = read(path)?;
    let parse = |e: serde_json::Error| Error::Parse(format!("{}: {e}", path.display()));
    if text.trim_start().starts_with('[') {
        serde_json::from_str(&text).map_err(parse)
    } else {
        serde_json::from_str(&text).map(|w| vec![w]).map_err(parse)
    }
}

fn check(c: &RunConfig, report: &mut CertReport) -> Result<()> {
    let space = c.space()?;
    let path = c
        .witness
        .as_deref()
        .ok_or_else(|| Error::Parse("--witness is required".into()))?;
    let scales = c.scales()?;
    for w in read_witnesses(path)? {
        if scales.is_empty() {
            report.absorb(verify_witness(&space, &w)?);
        }
        for &p in &scales {
            let at = DimensionWitness { params: p, ..w.clone() };
            report.absorb(verify_witness(&space, &at)?);
        }
    }
    Ok(())
}

fn pipeline(c: &RunConfig, report: &mut CertReport) -> Result<()> {
    let space = c.space()?;
    let window = c.window()?;
    for p in c.required_scales()? {
        let out = run_pipeline(&space, p, &window, &|pp| construct_witness(&space, pp, &window))?;
        report.absorb(out.report);
    }
    Ok(())
}

fn read_map(path: &Path) -> Result<CoarseMap> {
    let text = read(path)?;
    let is_toml = path.extension().is_some_and(|e| e == "toml");
    if is_toml {
        toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    } else {
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

fn coarse(c: &RunConfig, report: &mut CertReport) -> Result<()> {
    let path = c
        .map
        .as_deref()
        .ok_or_else(|| Error::Parse("--map is required".into()))?;
    let f = read_map(path)?;
    let (x, y) = (c.space()?, c.target_space()?);
    let (wx, wy) = (c.window()?, c.target_window()?);
    let transport = RunConfig::optional_scale(&c.transport)?;
    if f.expansive.is_empty() && f.proper.is_empty() && f.onto.is_none() && transport.is_none() {
        return Err(Error::Precondition(
            "map has no moduli, no onto parameters and no transport target".into(),
        ));
    }
    if !f.expansive.is_empty() {
        report.absorb(check_expansive(&x, &y, &f, &wx)?);
    }
    if !f.proper.is_empty() {
        report.absorb(check_proper(&x, &y, &f, &wx)?);
    }
    if let Some(p) = f.onto {
        let onto = check_coarsely_onto(&y, &f, p, &wy, &wx)?;
        let ok = onto.passed();
        report.absorb(onto);
        if ok && !f.proper.is_empty() {
            let inv = construct_coarse_inverse(&x, &y, &f, p, &wy, &wx)?;
            report.absorb(inv.report);
        }
    }
    if let Some(target) = transport {
        let (_, rep) = push_witness(&x, &y, &f, None, target, &wx, &wy)?;
        report.absorb(rep);
    }
    Ok(())
}

fn oracle(c: &RunConfig, report: &mut CertReport) -> Result<()> {
    let space = c.space()?;
    let window = c.window()?;
    let bound = RunConfig::optional_scale(&c.bound)?;
    for p in c.required_scales()? {
        let w = construct_witness(&space, p, &window)?;
        report.absorb(verify_witness(&space, &w)?);
        let b = bound.unwrap_or(w.bound_params);
        let res = oracle_min_families(&space, p, b, &window)?;
        let count = |v: usize| Rational::from_int(v as i128);
        report.push(
            Record::verdict("oracle-consistent", res.k <= w.n + 1)
                .params(p)
                .window(&window)
                .value("oracle", count(res.k))
                .value("constructor", count(w.n + 1))
                .note(format!("bound {b}")),
        );
        let graph = scale_graph(&space, p, &window)?;
        let obstructed = graph.single_family_obstruction(&space, b).is_some();
        report.push(
            Record::verdict("single-family-prediction", (res.k == 1) == !obstructed)
                .params(p)
                .window(&window)
                .value("components", count(graph.components.len())),
        );
    }
    Ok(())
}
