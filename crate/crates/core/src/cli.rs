//! Command-line front end: argument parsing, orchestration of the library
//! procedures, and the JSON result document.

use crate::error::{Error, Result};
use crate::inference::{
    confidence_region, dual_range, power_curve, reference_mot, summarize, test_h0, BootstrapConfig,
    CrMode, Decision, Method, PowerCurvePoint, ReferenceFamily, ReplicateSummary,
};
use crate::io::{read_measures, read_samples, Ingested};
use crate::limit::rate;
use crate::mot::{
    barycenter_pushforward, check_regularity, normalize_dual, w2_squared, MotOptions, MotSolver,
    SolveMode, SolverStats,
};
use crate::support::{Measure, MeasureCollection};
use crate::synthetic::{design_measures, rejection_rate, three_d_pair, Design};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// k-sample tests, confidence regions and power bounds from multimarginal
/// optimal transport on finite supports.
#[derive(Debug, Parser)]
#[command(name = "kmot", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Solve the MOT program for the input measures.
    Mot,
    /// Test equality of the input distributions.
    Test,
    /// Confidence region for the population MOT value.
    Cr,
    /// Lower bounds on the power of the two-sample test.
    Power(PowerArgs),
    /// Empirical rejection rates on synthetic designs.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Derivative,
    Mn,
    Ub0,
    Permutation,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Derivative => Method::Derivative,
            MethodArg::Mn => Method::Mn,
            MethodArg::Ub0 => Method::Ub0,
            MethodArg::Permutation => Method::Permutation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CrModeArg {
    Standard,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveModeArg {
    Auto,
    Dense,
    Lazy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Null,
    Clustered,
    Sparse,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Samples file with header group,x1,...,xd.
    #[arg(long, global = true)]
    pub samples: Option<PathBuf>,
    /// Support file with header x1,...,xd (samples input only).
    #[arg(long, global = true)]
    pub support: Option<PathBuf>,
    /// Measures file (JSON).
    #[arg(long, global = true)]
    pub measures: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, global = true, value_enum, default_value_t = MethodArg::Derivative)]
    pub method: MethodArg,
    /// Bootstrap replicates B.
    #[arg(long, global = true, default_value_t = 500)]
    pub replicates: usize,
    /// Label permutations R.
    #[arg(long, global = true, default_value_t = 999)]
    pub permutations: usize,
    /// Exponent p of the m-out-of-n subsample sizes m = n^p.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub subsample_exponent: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Largest number of cost-tensor entries solved by the dense program.
    #[arg(long, global = true)]
    pub memory_budget: Option<usize>,
    /// Draw the relaxed null on the derivative bootstrap streams.
    #[arg(long, global = true)]
    pub coupled: bool,
    /// Resample the pooled data in the null bootstraps.
    #[arg(long, global = true)]
    pub pool_all: bool,
    #[arg(long, global = true, value_enum, default_value_t = CrModeArg::Standard)]
    pub cr_mode: CrModeArg,
    #[arg(long, global = true, value_enum, default_value_t = SolveModeArg::Auto)]
    pub solve_mode: SolveModeArg,
    /// Write the result document here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Directory for plot-ready tables (CSV).
    #[arg(long, global = true)]
    pub tables: Option<PathBuf>,
    /// Record wall-clock time in the document.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct PowerArgs {
    /// Dual-range constant; computed from the input support when omitted.
    #[arg(long)]
    pub dual_constant: Option<f64>,
    /// Sample sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [50u64, 100, 200, 400, 800])]
    pub n_grid: Vec<u64>,
    /// Effect sizes (squared 2-Wasserstein), comma separated; the input
    /// pair's distance when omitted.
    #[arg(long, value_delimiter = ',')]
    pub delta_grid: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Clustered)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    pub clusters: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [100u64, 300, 500])]
    pub n_grid: Vec<u64>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Mot,
    Test,
    Cr,
    Power,
    Simulate,
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub samples: Option<PathBuf>,
    pub support: Option<PathBuf>,
    pub measures: Option<PathBuf>,
    pub alpha: f64,
    pub method: Method,
    pub replicates: usize,
    pub permutations: usize,
    pub subsample_exponent: f64,
    pub seed: u64,
    pub jobs: usize,
    pub memory_budget: Option<usize>,
    pub coupled: bool,
    pub pool_all: bool,
    pub cr_mode: CrMode,
    pub solve_mode: SolveMode,
    pub out: Option<PathBuf>,
    pub tables: Option<PathBuf>,
    pub timing: bool,
    pub power: Option<PowerArgs>,
    pub simulate: Option<SimulateArgs>,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let c = cli.common;
        let (command, power, simulate) = match cli.command {
            CommandArgs::Mot => (Command::Mot, None, None),
            CommandArgs::Test => (Command::Test, None, None),
            CommandArgs::Cr => (Command::Cr, None, None),
            CommandArgs::Power(p) => (Command::Power, Some(p), None),
            CommandArgs::Simulate(s) => (Command::Simulate, None, Some(s)),
        };
        let cfg = RunConfig {
            command,
            samples: c.samples,
            support: c.support,
            measures: c.measures,
            alpha: c.alpha,
            method: c.method.into(),
            replicates: c.replicates,
            permutations: c.permutations,
            subsample_exponent: c.subsample_exponent,
            seed: c.seed,
            jobs: c.jobs,
            memory_budget: c.memory_budget,
            coupled: c.coupled,
            pool_all: c.pool_all,
            cr_mode: match c.cr_mode {
                CrModeArg::Standard => CrMode::Standard,
                CrModeArg::Literal => CrMode::Literal,
            },
            solve_mode: match c.solve_mode {
                SolveModeArg::Auto => SolveMode::Auto,
                SolveModeArg::Dense => SolveMode::Dense,
                SolveModeArg::Lazy => SolveMode::Lazy,
            },
            out: c.out,
            tables: c.tables,
            timing: c.timing,
            power,
            simulate,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidInput(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.samples.is_some() && self.measures.is_some() {
            return Err(Error::InvalidInput("give either --samples or --measures, not both".into()));
        }
        if self.support.is_some() && self.samples.is_none() {
            return Err(Error::InvalidInput("--support goes with --samples".into()));
        }
        let needs_input = matches!(self.command, Command::Mot | Command::Test | Command::Cr);
        if needs_input && self.samples.is_none() && self.measures.is_none() {
            return Err(Error::InvalidInput("an input file (--samples or --measures) is required".into()));
        }
        if self.jobs == 0 {
            return Err(Error::InvalidInput("--jobs must be at least 1".into()));
        }
        if self.memory_budget == Some(0) {
            return Err(Error::InvalidInput("--memory-budget must be positive".into()));
        }
        self.bootstrap().validate()
    }

    pub fn mot_options(&self) -> MotOptions {
        let mut o = MotOptions {
            mode: self.solve_mode,
            ..MotOptions::default()
        };
        if let Some(b) = self.memory_budget {
            o.dense_limit = b;
        }
        o
    }

    pub fn bootstrap(&self) -> BootstrapConfig {
        BootstrapConfig {
            replicates: self.replicates,
            permutations: self.permutations,
            subsample_exponent: self.subsample_exponent,
            seed: self.seed,
            coupled: self.coupled,
            pool_all: self.pool_all,
            mot: self.mot_options(),
        }
    }

    fn ingest(&self) -> Result<Option<Ingested>> {
        match (&self.samples, &self.measures) {
            (Some(s), None) => read_samples(s, self.support.as_deref()).map(Some),
            (None, Some(m)) => read_measures(m).map(Some),
            _ => Ok(None),
        }
    }

    fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            input: self
                .samples
                .as_ref()
                .or(self.measures.as_ref())
                .map(|p| p.display().to_string()),
            support: self.support.as_ref().map(|p| p.display().to_string()),
            alpha: self.alpha,
            method: self.method,
            replicates: self.replicates,
            permutations: self.permutations,
            subsample_exponent: self.subsample_exponent,
            seed: self.seed,
            memory_budget: self.memory_budget,
            coupled: self.coupled,
            pool_all: self.pool_all,
            cr_mode: self.cr_mode,
            solve_mode: self.solve_mode,
            power: self.power.clone(),
            simulate: self.simulate.clone(),
        }
    }
}

/// The configuration as echoed in the document. Thread count and output
/// locations are left out so that documents do not depend on them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub input: Option<String>,
    pub support: Option<String>,
    pub alpha: f64,
    pub method: Method,
    pub replicates: usize,
    pub permutations: usize,
    pub subsample_exponent: f64,
    pub seed: u64,
    pub memory_budget: Option<usize>,
    pub coupled: bool,
    pub pool_all: bool,
    pub cr_mode: CrMode,
    pub solve_mode: SolveMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<PowerArgs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateArgs>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub name: String,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingAtom {
    pub tuple: Vec<usize>,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarycenterAtom {
    pub point: Vec<f64>,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotSection {
    pub value: f64,
    pub lazy: bool,
    pub regular: bool,
    /// Dual vector with the first entries of `u_2, ..., u_k` at zero.
    pub dual: Vec<Vec<f64>>,
    /// Tuples (0-based support indices) carrying mass; empty in lazy mode.
    pub coupling: Vec<CouplingAtom>,
    pub barycenter: Vec<BarycenterAtom>,
    pub stats: SolverStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSection {
    pub method: Method,
    pub mot_value: f64,
    pub rho_n: f64,
    pub statistic: f64,
    pub cutoff: f64,
    pub p_value: f64,
    pub decision: Decision,
    pub replicates: ReplicateSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrSection {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub mode: CrMode,
    pub mot_value: f64,
    pub rho_n: f64,
    pub replicates: ReplicateSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSection {
    pub alpha: f64,
    pub dual_constant: f64,
    pub points: Vec<PowerCurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRow {
    pub n: u64,
    pub trials: usize,
    pub rejections: usize,
    pub rate: f64,
    /// Population MOT value from the closed-form reference.
    pub truth: f64,
    /// Population MOT value from the dense program.
    pub truth_lp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSection {
    pub family: String,
    pub k: usize,
    pub method: Method,
    pub rows: Vec<SimulationRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub seconds: f64,
}

/// Everything a run reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub software: String,
    pub command: Command,
    pub config: ConfigEcho,
    #[serde(default)]
    pub groups: Vec<GroupSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mot: Option<MotSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test: Option<TestSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence_region: Option<CrSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<PowerSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl ResultDocument {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }
}

/// Machine-readable error object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorObject {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_solver_failure() {
        EXIT_SOLVER
    } else {
        EXIT_INVALID
    }
}

pub fn error_json(e: &Error) -> String {
    let obj = serde_json::json!({
        "error": ErrorObject {
            kind: e.kind().to_string(),
            message: e.to_string(),
            exit_code: exit_code(e),
        }
    });
    serde_json::to_string_pretty(&obj).expect("error object serializes")
}

/// Runs a command on a thread pool of `cfg.jobs` workers.
pub fn run(cfg: &RunConfig) -> Result<ResultDocument> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let mut doc = pool.install(|| run_inner(cfg))?;
    if cfg.timing {
        doc.timing = Some(Timing {
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    if let Some(dir) = &cfg.tables {
        write_tables(dir, &doc)?;
    }
    Ok(doc)
}

fn base_document(cfg: &RunConfig, input: Option<&Ingested>) -> ResultDocument {
    ResultDocument {
        software: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        command: cfg.command,
        config: cfg.echo(),
        groups: input
            .map(|ing| {
                ing.group_names
                    .iter()
                    .zip(ing.collection.sizes())
                    .map(|(name, &n)| GroupSummary { name: name.clone(), n })
                    .collect()
            })
            .unwrap_or_default(),
        support_size: input.map(|ing| ing.collection.support().len()),
        mot: None,
        test: None,
        confidence_region: None,
        power: None,
        simulation: None,
        timing: None,
    }
}

fn require(input: &Option<Ingested>) -> Result<&Ingested> {
    input
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("an input file is required".into()))
}

fn run_inner(cfg: &RunConfig) -> Result<ResultDocument> {
    let input = cfg.ingest()?;
    let mut doc = base_document(cfg, input.as_ref());
    match cfg.command {
        Command::Mot => doc.mot = Some(mot_section(&require(&input)?.collection, cfg)?),
        Command::Test => {
            let ing = require(&input)?;
            let bcfg = cfg.bootstrap();
            let r = match (cfg.method, &ing.samples) {
                (Method::Permutation, Some(s)) => {
                    crate::inference::permutation_test(s, cfg.permutations, cfg.alpha, &bcfg)?
                }
                (Method::Permutation, None) => {
                    return Err(Error::InvalidInput(
                        "the permutation test needs raw samples (--samples)".into(),
                    ))
                }
                (m, _) => test_h0(&ing.collection, cfg.alpha, m, &bcfg)?,
            };
            doc.test = Some(TestSection {
                method: r.method,
                mot_value: r.mot_value,
                rho_n: r.rho_n,
                statistic: r.statistic,
                cutoff: r.cutoff,
                p_value: r.p_value_estimate,
                decision: r.decision,
                replicates: summarize(&r.replicate_values, r.failures)?,
            });
        }
        Command::Cr => {
            let ing = require(&input)?;
            let ci = confidence_region(&ing.collection, cfg.alpha, cfg.cr_mode, &cfg.bootstrap())?;
            doc.confidence_region = Some(CrSection {
                lower: ci.lower,
                upper: ci.upper,
                level: ci.level,
                mode: ci.mode,
                mot_value: ci.mot_value,
                rho_n: ci.rho_n,
                replicates: summarize(&ci.replicate_values, ci.failures)?,
            });
        }
        Command::Power => doc.power = Some(power_section(cfg, input.as_ref())?),
        Command::Simulate => doc.simulation = Some(simulation_section(cfg, input.as_ref())?),
    }
    Ok(doc)
}

fn mot_section(collection: &MeasureCollection, cfg: &RunConfig) -> Result<MotSection> {
    let solver = MotSolver::new(collection.support().clone(), collection.k(), cfg.mot_options())?;
    let sol = solver.solve(collection)?;
    let support = collection.support();
    let (coupling, barycenter) = match &sol.coupling {
        Some(c) => (
            c.support_entries(support.len(), collection.k(), 1e-12)
                .into_iter()
                .map(|(tuple, mass)| CouplingAtom { tuple, mass })
                .collect(),
            barycenter_pushforward(support, collection.k(), c, 1e-12)
                .into_iter()
                .map(|(point, mass)| BarycenterAtom { point, mass })
                .collect(),
        ),
        None => (Vec::new(), Vec::new()),
    };
    Ok(MotSection {
        value: sol.value,
        lazy: sol.lazy,
        regular: check_regularity(collection),
        dual: normalize_dual(&sol.dual).blocks,
        coupling,
        barycenter,
        stats: sol.stats,
    })
}

fn power_section(cfg: &RunConfig, input: Option<&Ingested>) -> Result<PowerSection> {
    let args = cfg.power.clone().unwrap_or(PowerArgs {
        dual_constant: None,
        n_grid: vec![50, 100, 200, 400, 800],
        delta_grid: Vec::new(),
    });
    let dual_constant = match (args.dual_constant, input) {
        (Some(c), _) => c,
        (None, Some(ing)) => dual_range(ing.collection.support(), 2)?.constant,
        (None, None) => {
            return Err(Error::InvalidInput(
                "power needs --dual-constant or an input file".into(),
            ))
        }
    };
    let deltas = if !args.delta_grid.is_empty() {
        args.delta_grid.clone()
    } else {
        let ing = input.ok_or_else(|| {
            Error::InvalidInput("power needs --delta-grid or a two-group input file".into())
        })?;
        if ing.collection.k() != 2 {
            return Err(Error::InvalidInput("the effect size is defined for two groups".into()));
        }
        vec![w2_squared(ing.collection.measure(0), ing.collection.measure(1))?]
    };
    if args.n_grid.is_empty() {
        return Err(Error::InvalidInput("--n-grid is empty".into()));
    }
    Ok(PowerSection {
        alpha: cfg.alpha,
        dual_constant,
        points: power_curve(dual_constant, &args.n_grid, &deltas, cfg.alpha)?,
    })
}

fn simulation_section(cfg: &RunConfig, input: Option<&Ingested>) -> Result<SimulationSection> {
    let args = cfg.simulate.clone().unwrap_or(SimulateArgs {
        family: FamilyArg::Clustered,
        k: 4,
        clusters: 2,
        n_grid: vec![100, 300, 500],
        trials: 100,
    });
    let reps: Vec<Measure> = match input {
        Some(ing) => ing.collection.measures().to_vec(),
        None => {
            let (a, b) = three_d_pair();
            vec![a, b]
        }
    };
    let (design, family, name) = match args.family {
        FamilyArg::Null => (Design::Null, None, "null".to_string()),
        FamilyArg::Clustered => (
            Design::Clustered(args.clusters),
            Some(ReferenceFamily::Clustered(args.clusters)),
            format!("clustered({})", args.clusters),
        ),
        FamilyArg::Sparse => (Design::Sparse, Some(ReferenceFamily::Sparse), "sparse".to_string()),
    };
    let population = design_measures(design, &reps, args.k)?;
    let truth = match family {
        None => 0.0,
        Some(ReferenceFamily::Clustered(c)) => reference_mot(ReferenceFamily::Clustered(c), &reps[..c], args.k)?,
        Some(f) => reference_mot(f, &reps[..2], args.k)?,
    };
    let pop = MeasureCollection::without_sizes(population.clone())?;
    let truth_lp = MotSolver::new(pop.support().clone(), args.k, cfg.mot_options())?.value(&pop)?;
    if cfg.method == Method::Permutation && args.trials * cfg.permutations > 10_000_000 {
        return Err(Error::InvalidInput("trials times permutations is too large".into()));
    }
    let mut rows = Vec::with_capacity(args.n_grid.len());
    for &n in &args.n_grid {
        rate(&vec![n; args.k])?;
        let r = rejection_rate(&population, n, cfg.alpha, cfg.method, &cfg.bootstrap(), args.trials, cfg.seed)?;
        rows.push(SimulationRow {
            n,
            trials: r.trials,
            rejections: r.rejections,
            rate: r.rate,
            truth,
            truth_lp,
        });
    }
    Ok(SimulationSection {
        family: name,
        k: args.k,
        method: cfg.method,
        rows,
    })
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    w.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Plot-ready tables: quantile grids and power or rejection-rate tables.
pub fn write_tables(dir: &Path, doc: &ResultDocument) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let summaries = [
        doc.test.as_ref().map(|t| &t.replicates),
        doc.confidence_region.as_ref().map(|c| &c.replicates),
    ];
    if let Some(s) = summaries.into_iter().flatten().next() {
        let rows: Vec<Vec<String>> = s
            .quantiles
            .iter()
            .map(|q| vec![q.level.to_string(), q.value.to_string()])
            .collect();
        write_csv(&dir.join("quantiles.csv"), &["level", "value"], &rows)?;
        let rows: Vec<Vec<String>> = s
            .histogram
            .iter()
            .map(|b| vec![b.lower.to_string(), b.upper.to_string(), b.count.to_string()])
            .collect();
        write_csv(&dir.join("histogram.csv"), &["lower", "upper", "count"], &rows)?;
    }
    if let Some(p) = &doc.power {
        let rows: Vec<Vec<String>> = p
            .points
            .iter()
            .map(|pt| vec![pt.n.to_string(), pt.delta.to_string(), pt.bound.to_string()])
            .collect();
        write_csv(&dir.join("power_curve.csv"), &["n", "delta", "bound"], &rows)?;
    }
    if let Some(s) = &doc.simulation {
        let rows: Vec<Vec<String>> = s
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    r.trials.to_string(),
                    r.rejections.to_string(),
                    r.rate.to_string(),
                    r.truth.to_string(),
                ]
            })
            .collect();
        write_csv(&dir.join("rejection_rates.csv"), &["n", "trials", "rejections", "rate", "truth"], &rows)?;
    }
    Ok(())
}

/// Parses arguments, runs, and writes the document or an error object.
/// Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let out = cli.common.out.clone();
    let result = RunConfig::from_cli(cli).and_then(|cfg| run(&cfg)).and_then(|d| d.to_json());
    let (text, code) = match result {
        Ok(text) => (text, EXIT_OK),
        Err(e) => (error_json(&e), exit_code(&e)),
    };
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, format!("{text}\n")) {
                eprintln!("{}", error_json(&Error::Io(format!("{}: {e}", path.display()))));
                return EXIT_INVALID;
            }
            if code != EXIT_OK {
                eprintln!("{text}");
            }
        }
        None => println!("{text}"),
    }
    code
}
