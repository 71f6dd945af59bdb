//! Command-line front end: argument parsing, resolved run configurations and
//! output rendering. The `varlearn` binary only does file IO and exit codes.
//!
//! Every run is first resolved into a [`RunConfig`] that pins all inputs
//! (matrix entries, seed, schedules). CSV outputs echo it in a `# config:`
//! header line; JSON outputs get a `<out>.config.json` sidecar. Feeding either
//! back to `varlearn rerun` reproduces the output byte for byte.

use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::advantage::AdvantageMatrix;
use crate::dynamics::{self, StochasticSchedule};
use crate::error::{Error, Result};
use crate::npl::{self, NplSchedule, ToyUgSpec};
use crate::simplex::PopulationState;
use crate::stability::{self, RestPointOptions};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 65;
pub const EXIT_IO: u8 = 74;

const CONFIG_PREFIX: &str = "# config: ";

#[derive(Debug, Parser)]
#[command(
    name = "varlearn",
    version,
    about = "Grammar competition dynamics under variational learning"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterate the generational dynamics (reliable-learner map or stochastic learners).
    Simulate(SimulateArgs),
    /// Run LRP learners against a fixed population.
    Learn(LearnArgs),
    /// Locate rest points and classify their stability.
    Analyze(AnalyzeArgs),
    /// Orbit diagram of quasi-Babelian systems over a grid of rho = b/a.
    Sweep(SweepArgs),
    /// Naive Parameter Learner generations on a parametric grammar space.
    Npl(NplArgs),
    /// Tally the rest-point structure of random proper systems.
    Explore(ExploreArgs),
    /// Re-execute a run from an output file, a config sidecar or a config JSON.
    Rerun(RerunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixClass {
    TwoGrammar,
    Babelian,
    Symmetric,
    QuasiBabelian,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["matrix", "class"])))]
pub struct MatrixArgs {
    /// `two-grammar:a1,a2`, `babelian:n,a`, `symmetric:a,b,c`, `quasi-babelian:a,b` or a JSON matrix file.
    #[arg(long)]
    pub matrix: Option<String>,
    #[arg(long, value_enum, requires = "params")]
    pub class: Option<MatrixClass>,
    /// Comma-separated constructor parameters for `--class`.
    #[arg(long, value_delimiter = ',', requires = "class")]
    pub params: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub matrix: MatrixArgs,
    /// Initial state (default: uniform).
    #[arg(long, value_delimiter = ',')]
    pub start: Option<Vec<f64>>,
    #[arg(long, default_value_t = 30)]
    pub generations: usize,
    /// Replace the reliable-learner map by LRP learner ensembles.
    #[arg(long)]
    pub stochastic: bool,
    #[arg(long, default_value_t = 0.001)]
    pub gamma: f64,
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    pub tokens: u64,
    #[arg(long, default_value_t = 1)]
    pub learners: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Append ternary coordinates `tx,ty` (3 grammars only).
    #[arg(long)]
    pub ternary: bool,
    /// Write every learner's final state per generation to this CSV.
    #[arg(long, requires = "stochastic")]
    pub dump_learners: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LearnArgs {
    #[command(flatten)]
    pub matrix: MatrixArgs,
    /// Population the learners hear (default: uniform).
    #[arg(long, value_delimiter = ',')]
    pub population: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.001)]
    pub gamma: f64,
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    pub tokens: u64,
    #[arg(long, default_value_t = 1)]
    pub learners: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub matrix: MatrixArgs,
    /// Number of quasi-random Newton starts.
    #[arg(long, default_value_t = 50)]
    pub starts: usize,
    /// Newton residual tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Base advantage `a`; the distinguished advantage is `rho * a`.
    #[arg(long, default_value_t = 0.1)]
    pub a: f64,
    /// Grid `start:stop:step`, inclusive of `stop` within half a step.
    #[arg(long, default_value = "0.05:3:0.05")]
    pub rho_grid: String,
    /// Maximum iterations per grid point.
    #[arg(long, default_value_t = stability::DEFAULT_BURN_IN)]
    pub burn_in: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.98,0.01,0.01")]
    pub start: Vec<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NplPreset {
    /// Two parameters over the strings N, DN, ND.
    ToyUg,
}

#[derive(Debug, Clone, Args)]
pub struct NplArgs {
    /// Built-in grammar space (the default).
    #[arg(long, value_enum, conflicts_with = "space")]
    pub preset: Option<NplPreset>,
    /// JSON grammar-space file.
    #[arg(long)]
    pub space: Option<PathBuf>,
    /// Initial population parameter probabilities.
    #[arg(long, value_delimiter = ',', default_value = "0.99,0.99")]
    pub start: Vec<f64>,
    #[arg(long, default_value_t = 30)]
    pub generations: usize,
    #[arg(long, default_value_t = 0.01)]
    pub gamma: f64,
    #[arg(long, default_value = "1e5", value_parser = parse_count)]
    pub tokens: u64,
    #[arg(long, default_value_t = 100)]
    pub learners: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write every learner's final parameters per generation to this CSV.
    #[arg(long)]
    pub dump_learners: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ExploreArgs {
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Number of grammars per sampled system.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RerunArgs {
    /// CSV output with a `# config:` line, a `.config.json` sidecar or a bare config.
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub dump_learners: Option<PathBuf>,
}

/// Accepts plain integers and integral scientific notation such as `1e6`.
fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= 9.007_199_254_740_992e15 {
        Ok(v as u64)
    } else {
        Err(format!("`{s}` is not a non-negative integer"))
    }
}

/// A fully resolved run; everything needed to reproduce the output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub format: Format,
    pub task: Task,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Task {
    Simulate {
        matrix: MatrixConfig,
        start: Vec<f64>,
        generations: usize,
        /// `None` iterates the reliable-learner map.
        stochastic: Option<Schedule>,
        ternary: bool,
    },
    Learn {
        matrix: MatrixConfig,
        population: Vec<f64>,
        schedule: Schedule,
    },
    Analyze {
        matrix: MatrixConfig,
        starts: usize,
        tol: f64,
    },
    Sweep {
        a: f64,
        rho_grid: String,
        burn_in: usize,
        start: Vec<f64>,
    },
    Npl {
        grammar_space: GrammarSpaceConfig,
        start: Vec<f64>,
        generations: usize,
        schedule: Schedule,
    },
    Explore {
        trials: usize,
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub gamma: f64,
    pub tokens: u64,
    pub learners: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixConfig {
    /// How the matrix was specified on the command line.
    pub source: String,
    pub entries: Vec<Vec<f64>>,
}

impl MatrixConfig {
    fn build(&self) -> Result<AdvantageMatrix> {
        AdvantageMatrix::new(self.entries.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrammarSpaceConfig {
    pub source: String,
    pub space: ToyUgSpec,
}

impl RunConfig {
    pub fn subcommand(&self) -> &'static str {
        match self.task {
            Task::Simulate { .. } => "simulate",
            Task::Learn { .. } => "learn",
            Task::Analyze { .. } => "analyze",
            Task::Sweep { .. } => "sweep",
            Task::Npl { .. } => "npl",
            Task::Explore { .. } => "explore",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// A resolved config plus where its outputs go.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub config: RunConfig,
    pub out: Option<PathBuf>,
    pub dump_learners: Option<PathBuf>,
}

pub fn resolve(command: Command) -> Result<Invocation> {
    let (config, output, dump_learners) = match command {
        Command::Simulate(a) => {
            let matrix = resolve_matrix(&a.matrix)?;
            let start = a
                .start
                .unwrap_or_else(|| uniform(matrix.entries.len()));
            let stochastic = a.stochastic.then_some(Schedule {
                gamma: a.gamma,
                tokens: a.tokens,
                learners: a.learners,
            });
            let task = Task::Simulate {
                matrix,
                start,
                generations: a.generations,
                stochastic,
                ternary: a.ternary,
            };
            (config(a.seed, &a.output, Format::Csv, task), a.output, a.dump_learners)
        }
        Command::Learn(a) => {
            let matrix = resolve_matrix(&a.matrix)?;
            let population = a
                .population
                .unwrap_or_else(|| uniform(matrix.entries.len()));
            let task = Task::Learn {
                matrix,
                population,
                schedule: Schedule {
                    gamma: a.gamma,
                    tokens: a.tokens,
                    learners: a.learners,
                },
            };
            (config(a.seed, &a.output, Format::Csv, task), a.output, None)
        }
        Command::Analyze(a) => {
            let task = Task::Analyze {
                matrix: resolve_matrix(&a.matrix)?,
                starts: a.starts,
                tol: a.tol,
            };
            (config(0, &a.output, Format::Json, task), a.output, None)
        }
        Command::Sweep(a) => {
            let task = Task::Sweep {
                a: a.a,
                rho_grid: a.rho_grid,
                burn_in: a.burn_in,
                start: a.start,
            };
            (config(0, &a.output, Format::Csv, task), a.output, None)
        }
        Command::Npl(a) => {
            let grammar_space = match &a.space {
                Some(path) => GrammarSpaceConfig {
                    source: format!("file:{}", path.display()),
                    space: ToyUgSpec::from_json_str(&read_input(path)?)?,
                },
                None => GrammarSpaceConfig {
                    source: "preset:toy-ug".into(),
                    space: ToyUgSpec::toy_ug(),
                },
            };
            let task = Task::Npl {
                grammar_space,
                start: a.start,
                generations: a.generations,
                schedule: Schedule {
                    gamma: a.gamma,
                    tokens: a.tokens,
                    learners: a.learners,
                },
            };
            (config(a.seed, &a.output, Format::Csv, task), a.output, a.dump_learners)
        }
        Command::Explore(a) => {
            let task = Task::Explore {
                trials: a.trials,
                n: a.n,
            };
            (config(a.seed, &a.output, Format::Json, task), a.output, None)
        }
        Command::Rerun(a) => {
            let text = std::fs::read_to_string(&a.config)
                .map_err(|e| Error::Config(format!("{}: {e}", a.config.display())))?;
            return Ok(Invocation {
                config: load_config(&text)?,
                out: a.out,
                dump_learners: a.dump_learners,
            });
        }
    };
    Ok(Invocation {
        config,
        out: output.out,
        dump_learners,
    })
}

fn config(seed: u64, output: &OutputArgs, default: Format, task: Task) -> RunConfig {
    RunConfig {
        seed,
        format: output.format.unwrap_or(default),
        task,
    }
}

fn uniform(n: usize) -> Vec<f64> {
    PopulationState::uniform(n).into_vec()
}

fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::MatrixFile(format!("{}: {e}", path.display())))
}

fn resolve_matrix(args: &MatrixArgs) -> Result<MatrixConfig> {
    let (source, matrix) = match (&args.matrix, args.class, &args.params) {
        (Some(spec), None, _) => match spec.split_once(':') {
            Some((name, params)) if MatrixClass::from_str(name, false).is_ok() => {
                let class = MatrixClass::from_str(name, false).expect("checked");
                let params = params
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::Config(format!("bad matrix parameters in `{spec}`")))?;
                (spec.clone(), construct(class, &params)?)
            }
            _ => {
                let path = Path::new(spec);
                (
                    format!("file:{spec}"),
                    AdvantageMatrix::from_json_str(&read_input(path)?)?,
                )
            }
        },
        (None, Some(class), Some(params)) => {
            let name = class.to_possible_value().expect("no skipped variants");
            let joined: Vec<String> = params.iter().map(f64::to_string).collect();
            (
                format!("{}:{}", name.get_name(), joined.join(",")),
                construct(class, params)?,
            )
        }
        _ => {
            return Err(Error::Config(
                "give exactly one of --matrix or --class with --params".into(),
            ))
        }
    };
    Ok(MatrixConfig {
        source,
        entries: matrix.rows(),
    })
}

fn construct(class: MatrixClass, params: &[f64]) -> Result<AdvantageMatrix> {
    let want = match class {
        MatrixClass::TwoGrammar | MatrixClass::Babelian | MatrixClass::QuasiBabelian => 2,
        MatrixClass::Symmetric => 3,
    };
    if params.len() != want {
        return Err(Error::Config(format!(
            "{class:?} takes {want} parameters, got {}",
            params.len()
        )));
    }
    match class {
        MatrixClass::TwoGrammar => AdvantageMatrix::two_grammar(params[0], params[1]),
        MatrixClass::Babelian => {
            let n = params[0];
            if !(n >= 2.0 && n.fract() == 0.0 && n <= 64.0) {
                return Err(Error::param("n", n, "must be an integer >= 2"));
            }
            AdvantageMatrix::babelian(n as usize, params[1])
        }
        MatrixClass::Symmetric => AdvantageMatrix::symmetric(params[0], params[1], params[2]),
        MatrixClass::QuasiBabelian => AdvantageMatrix::quasi_babelian(params[0], params[1]),
    }
}

/// Extracts the config from an output CSV, a sidecar `{version, config}` or a bare config.
pub fn load_config(text: &str) -> Result<RunConfig> {
    let bad = |e: serde_json::Error| Error::Config(e.to_string());
    if text.starts_with('#') {
        let line = text
            .lines()
            .find_map(|l| l.strip_prefix(CONFIG_PREFIX))
            .ok_or_else(|| Error::Config("no `# config:` line found".into()))?;
        return serde_json::from_str(line).map_err(bad);
    }
    let value: serde_json::Value = serde_json::from_str(text).map_err(bad)?;
    match value.get("config") {
        Some(inner) if value.get("version").is_some() => {
            serde_json::from_value(inner.clone()).map_err(bad)
        }
        _ => serde_json::from_value(value).map_err(bad),
    }
}

/// The sidecar written next to JSON outputs.
pub fn config_document(config: &RunConfig) -> String {
    let doc = serde_json::json!({ "version": VERSION, "config": config });
    serde_json::to_string_pretty(&doc).expect("config serializes") + "\n"
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Improper { .. }
        | Error::InvalidMatrix(_)
        | Error::MatrixFile(_)
        | Error::RegionSum { .. }
        | Error::RegionKey(_)
        | Error::NotSquare { .. }
        | Error::BadShape { .. }
        | Error::InvalidGrammarSpace(_) => EXIT_DATA,
        _ => EXIT_USAGE,
    }
}

/// Rendered results of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub body: String,
    /// One line for the terminal.
    pub summary: String,
    pub warnings: Vec<String>,
    /// Per-learner CSV, when requested and the subcommand has learners.
    pub learner_dump: Option<String>,
}

/// 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn preamble(config: &RunConfig) -> String {
    format!(
        "# varlearn {VERSION} seed={}\n{CONFIG_PREFIX}{}\n",
        config.seed,
        config.to_json()
    )
}

fn csv_row(lead: &[String], values: &[f64]) -> String {
    let mut cells = lead.to_vec();
    cells.extend(values.iter().map(|&v| fmt17(v)));
    cells.join(",") + "\n"
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn json_body<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes") + "\n"
}

pub fn execute(config: &RunConfig, dump_learners: bool) -> Result<RunOutput> {
    match &config.task {
        Task::Simulate {
            matrix,
            start,
            generations,
            stochastic,
            ternary,
        } => run_simulate(
            config,
            &matrix.build()?,
            start,
            *generations,
            stochastic.as_ref(),
            *ternary,
            dump_learners,
        ),
        Task::Learn {
            matrix,
            population,
            schedule,
        } => run_learn(config, &matrix.build()?, population, schedule),
        Task::Analyze { matrix, starts, tol } => run_analyze(config, &matrix.build()?, *starts, *tol),
        Task::Sweep {
            a,
            rho_grid,
            burn_in,
            start,
        } => run_sweep(config, *a, rho_grid, *burn_in, start),
        Task::Npl {
            grammar_space,
            start,
            generations,
            schedule,
        } => run_npl(
            config,
            &grammar_space.space,
            start,
            *generations,
            schedule,
            dump_learners,
        ),
        Task::Explore { trials, n } => run_explore(config, *trials, *n),
    }
}

fn run_simulate(
    config: &RunConfig,
    a: &AdvantageMatrix,
    start: &[f64],
    generations: usize,
    stochastic: Option<&Schedule>,
    ternary: bool,
    dump_learners: bool,
) -> Result<RunOutput> {
    let n = a.n();
    if ternary && n != 3 {
        return Err(Error::Config("--ternary needs exactly 3 grammars".into()));
    }
    let p0 = PopulationState::new(start.to_vec())?;
    let mut dump = (dump_learners && stochastic.is_some()).then(|| {
        let mut header = vec!["generation".to_string(), "learner".to_string()];
        header.extend(numbered("pi", n));
        preamble(config) + &header.join(",") + "\n"
    });
    let traj = match stochastic {
        None => dynamics::trajectory(a, &p0, generations.max(1))
            .map(|mut t| {
                t.states.truncate(generations + 1);
                t.generations = generations;
                t
            })?,
        Some(s) => {
            let schedule = StochasticSchedule {
                gamma: s.gamma,
                tokens: s.tokens,
                learners: s.learners,
                seed: config.seed,
            };
            dynamics::generational_simulation_with(a, &p0, generations, &schedule, |g, ls| {
                if let Some(out) = dump.as_mut() {
                    for (l, learner) in ls.iter().enumerate() {
                        out.push_str(&csv_row(&[g.to_string(), l.to_string()], &learner.pi));
                    }
                }
            })?
        }
    };
    let ternary_of = |p: &PopulationState| p.ternary().expect("n = 3 checked");
    let body = match config.format {
        Format::Csv => {
            let mut header = vec!["generation".to_string()];
            header.extend(numbered("p", n));
            if ternary {
                header.extend(["tx".to_string(), "ty".to_string()]);
            }
            let mut body = preamble(config) + &header.join(",") + "\n";
            for (g, p) in traj.states.iter().enumerate() {
                let mut values = p.as_slice().to_vec();
                if ternary {
                    let (tx, ty) = ternary_of(p);
                    values.extend([tx, ty]);
                }
                body.push_str(&csv_row(&[g.to_string()], &values));
            }
            body
        }
        Format::Json => {
            let ternary: Option<Vec<(f64, f64)>> =
                ternary.then(|| traj.states.iter().map(ternary_of).collect());
            json_body(&serde_json::json!({ "states": traj.states, "ternary": ternary }))
        }
    };
    let last = traj.states.last().expect("trajectory is non-empty");
    Ok(RunOutput {
        body,
        summary: format!(
            "simulate: {} generation(s) ({}), final p = {}",
            generations,
            if stochastic.is_some() { "stochastic" } else { "reliable map" },
            fmt_vec(last.as_slice())
        ),
        warnings: Vec::new(),
        learner_dump: dump,
    })
}

fn run_learn(
    config: &RunConfig,
    a: &AdvantageMatrix,
    population: &[f64],
    s: &Schedule,
) -> Result<RunOutput> {
    let p = PopulationState::new(population.to_vec())?;
    let learners = if s.learners == 1 {
        vec![dynamics::simulate_lrp_learner(a, &p, s.gamma, s.tokens, config.seed)?]
    } else {
        dynamics::lrp_ensemble(a, &p, s.gamma, s.tokens, s.learners, config.seed)?
    };
    let mean = dynamics::ensemble_mean(&learners);
    let reliable = dynamics::reliable_map(a, &p)?;
    let body = match config.format {
        Format::Csv => {
            let mut header = vec!["learner".to_string()];
            header.extend(numbered("pi", a.n()));
            let mut body = preamble(config) + &header.join(",") + "\n";
            for (l, learner) in learners.iter().enumerate() {
                body.push_str(&csv_row(&[l.to_string()], &learner.pi));
            }
            body
        }
        Format::Json => json_body(&serde_json::json!({
            "learners": learners.iter().map(|l| &l.pi).collect::<Vec<_>>(),
            "mean": mean,
            "reliable": reliable,
        })),
    };
    Ok(RunOutput {
        body,
        summary: format!(
            "learn: {} learner(s), mean pi = {}, reliable map = {}",
            learners.len(),
            fmt_vec(&mean),
            fmt_vec(reliable.as_slice())
        ),
        warnings: Vec::new(),
        learner_dump: None,
    })
}

fn run_analyze(config: &RunConfig, a: &AdvantageMatrix, starts: usize, tol: f64) -> Result<RunOutput> {
    let opts = RestPointOptions {
        tol,
        starts,
        ..RestPointOptions::default()
    };
    let search = stability::search_rest_points(a, &opts)?;
    let reports = &search.reports;
    let body = match config.format {
        Format::Json => json_body(reports),
        Format::Csv => {
            let mut header = numbered("p", a.n());
            header.extend(["kind", "residual", "largest_modulus", "classification"].map(String::from));
            let mut body = preamble(config) + &header.join(",") + "\n";
            for r in reports {
                let mut cells: Vec<String> = r.location.as_slice().iter().map(|&v| fmt17(v)).collect();
                cells.push(serde_json::to_value(r.kind).expect("kind").as_str().unwrap_or("").to_string());
                cells.push(fmt17(r.residual));
                cells.push(fmt17(r.largest_modulus()));
                cells.push(label(&r.classification));
                body.push_str(&(cells.join(",") + "\n"));
            }
            body
        }
    };
    let interior: Vec<String> = search.interior().map(|r| label(&r.classification)).collect();
    let inconclusive = reports
        .iter()
        .filter(|r| r.classification == stability::Classification::Inconclusive)
        .count();
    let mut warnings = Vec::new();
    if inconclusive > 0 {
        warnings.push(format!("{inconclusive} rest point(s) classified inconclusive"));
    }
    if search.converged_starts == 0 && a.n() > 1 {
        warnings.push("no Newton start converged to an interior point".into());
    }
    Ok(RunOutput {
        body,
        summary: format!(
            "analyze: {} rest point(s), {} interior [{}]",
            reports.len(),
            interior.len(),
            interior.join(", ")
        ),
        warnings,
        learner_dump: None,
    })
}

fn label<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|j| j.as_str().map(String::from))
        .unwrap_or_default()
}

fn run_sweep(
    config: &RunConfig,
    a: f64,
    rho_grid: &str,
    burn_in: usize,
    start: &[f64],
) -> Result<RunOutput> {
    let grid = stability::parse_grid(rho_grid)?;
    let start = PopulationState::new(start.to_vec())?;
    let diagram = stability::bifurcation_sweep(a, &grid, burn_in, &start)?;
    let estimate = diagram
        .bifurcation_estimate
        .map_or_else(|| "none".to_string(), fmt17);
    let unconverged: Vec<f64> = diagram
        .points
        .iter()
        .filter(|p| !p.converged)
        .map(|p| p.rho)
        .collect();
    let body = match config.format {
        Format::Json => json_body(&diagram),
        Format::Csv => {
            let mut body = preamble(config) + "rho,p1,p2,p3\n";
            for p in &diagram.points {
                body.push_str(&csv_row(&[fmt17(p.rho)], p.limit.as_slice()));
            }
            body.push_str(&format!("# bifurcation_estimate={estimate}\n"));
            if !unconverged.is_empty() {
                body.push_str(&format!("# unconverged={}\n", unconverged.len()));
            }
            body
        }
    };
    let mut warnings = Vec::new();
    if !unconverged.is_empty() {
        warnings.push(format!(
            "{} grid point(s) did not settle within {burn_in} iterations (rho = {})",
            unconverged.len(),
            unconverged
                .iter()
                .map(|r| format!("{r:.4}"))
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }
    Ok(RunOutput {
        body,
        summary: format!(
            "sweep: {} grid point(s), bifurcation_estimate={}",
            grid.len(),
            diagram
                .bifurcation_estimate
                .map_or_else(|| "none".to_string(), |v| format!("{v:.4}"))
        ),
        warnings,
        learner_dump: None,
    })
}

fn run_npl(
    config: &RunConfig,
    space: &ToyUgSpec,
    start: &[f64],
    generations: usize,
    s: &Schedule,
    dump_learners: bool,
) -> Result<RunOutput> {
    let k = space.num_params();
    let schedule = NplSchedule {
        gamma: s.gamma,
        tokens: s.tokens,
        learners: s.learners,
        seed: config.seed,
    };
    let mut dump = dump_learners.then(|| {
        let mut header = vec!["generation".to_string(), "learner".to_string()];
        header.extend(numbered("xi", k));
        preamble(config) + &header.join(",") + "\n"
    });
    let states = npl::npl_generations_with(space, start, generations, &schedule, |g, ls| {
        if let Some(out) = dump.as_mut() {
            for (l, learner) in ls.iter().enumerate() {
                out.push_str(&csv_row(&[g.to_string(), l.to_string()], &learner.xi));
            }
        }
    })?;
    let body = match config.format {
        Format::Csv => {
            let mut header = vec!["generation".to_string()];
            header.extend(numbered("x", k));
            let mut body = preamble(config) + &header.join(",") + "\n";
            for (g, x) in states.iter().enumerate() {
                body.push_str(&csv_row(&[g.to_string()], x));
            }
            body
        }
        Format::Json => json_body(&serde_json::json!({ "states": states })),
    };
    let last = states.last().expect("non-empty");
    let distance = last.iter().map(|v| (1.0 - v).abs()).fold(0.0, f64::max);
    Ok(RunOutput {
        body,
        summary: format!(
            "npl: {generations} generation(s), final x = {}, distance to all-ones vertex = {distance:.4}",
            fmt_vec(last)
        ),
        warnings: Vec::new(),
        learner_dump: dump,
    })
}

fn run_explore(config: &RunConfig, trials: usize, n: usize) -> Result<RunOutput> {
    let report = stability::conjecture_explore(trials, n, config.seed)?;
    let body = match config.format {
        Format::Json => json_body(&report),
        Format::Csv => {
            let c = &report.rest_point_counts;
            let rows = [
                ("trials", report.trials as f64),
                ("n", report.n as f64),
                ("count_n", c.n as f64),
                ("count_n_plus_1", c.n_plus_1 as f64),
                ("count_other", c.other as f64),
                ("fraction_n_or_n_plus_1", report.fraction_n_or_n_plus_1()),
                ("interior_stable", report.interior_stable_count as f64),
                ("interior_unstable", report.interior_unstable_count as f64),
                ("interior_inconclusive", report.interior_inconclusive_count as f64),
                ("counterexamples", report.counterexamples.len() as f64),
            ];
            let mut body = preamble(config) + "metric,value\n";
            for (name, v) in rows {
                body.push_str(&format!("{name},{v}\n"));
            }
            body
        }
    };
    let mut warnings = Vec::new();
    if !report.counterexamples.is_empty() && config.format == Format::Csv {
        warnings.push(format!(
            "{} counterexample(s); rerun with --format json to get them in full",
            report.counterexamples.len()
        ));
    }
    Ok(RunOutput {
        body,
        summary: format!(
            "explore: {} trial(s), fraction with n or n+1 rest points = {:.4}, interior stable/unstable/inconclusive = {}/{}/{}, counterexamples = {}",
            report.trials,
            report.fraction_n_or_n_plus_1(),
            report.interior_stable_count,
            report.interior_unstable_count,
            report.interior_inconclusive_count,
            report.counterexamples.len()
        ),
        warnings,
        learner_dump: None,
    })
}
