mod output;
mod verify;

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use priverm::bounds::{self, BoundInputs, LogBase};
use priverm::constructions::{
    construct_lemma1_tight, construct_lemma2_witness, construct_theorem1, construct_theorem5_family, Theorem5Family,
};
use priverm::erm::{erm_privileged_with, SolverOptions, DEFAULT_PAIR_BUDGET};
use priverm::io::{class_to_json, read_text, write_text, ClassFile};
use priverm::sim::persist::{self, TRIALS_FILE};
use priverm::sim::{self, adversarial_theorem5, run_theorem5_experiment, with_threads, Candidates, ExperimentConfig};
use priverm::vc::{self, VcMode};
use priverm::{Error, FiniteDomain, HypothesisClass, Triple, TripleSample};

use output::{render, Format};
use verify::{render_table, run_suite, Suite};

const EXIT_VERIFY: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "priverm", version, about = "Exact VC, privileged ERM, bounds and simulations on finite domains")]
struct Cli {
    /// Master seed for sampling experiments.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for VC enumeration and simulations (default: all cores).
    #[arg(long, global = true, env = "PRIVERM_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Directory for written artifacts.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// VC dimension of a class file.
    Vc(VcArgs),
    /// Build one of the explicit constructions.
    Construct {
        #[command(subcommand)]
        which: Construct,
    },
    /// Privileged ERM over H × Φ on a sample.
    Erm(ErmArgs),
    /// Itemized generalization bounds and the comparison conditions.
    Bounds(BoundsArgs),
    /// Seeded Monte Carlo experiments.
    Sim(SimArgs),
    /// Run a verification suite end to end.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    LowerBound,
}

#[derive(Debug, Args)]
struct VcArgs {
    class_file: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Maximum number of shattering checks.
    #[arg(long, default_value_t = vc::DEFAULT_BUDGET)]
    budget: u64,
    /// Comma-separated point indices to certify in lower-bound mode.
    #[arg(long, value_delimiter = ',')]
    witness: Option<Vec<usize>>,
    /// Domain label used in messages.
    #[arg(long, default_value = "X")]
    label: String,
}

#[derive(Debug, Subcommand)]
enum Construct {
    /// Product classes H_d, Φ_d with VC(F) = 3d.
    Theorem1 {
        #[arg(long)]
        d: usize,
    },
    /// Pair attaining VC(H ∪ J) = d + d* + 1.
    Lemma1 {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        dstar: usize,
    },
    /// Shattered witness for the auxiliary class of two class files.
    Lemma2 {
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        phi: PathBuf,
    },
    /// Paired distribution family on a shattered set of Φ.
    Theorem5 {
        /// Class file over X*.
        #[arg(long, conflicts_with = "dstar", required_unless_present = "dstar")]
        phi: Option<PathBuf>,
        /// Use every labeling of d* privileged points as Φ.
        #[arg(long)]
        dstar: Option<usize>,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        /// Comma-separated booleans; `true` puts the heavy mass on the second point of a pair.
        #[arg(long, value_delimiter = ',')]
        heavy_side: Option<Vec<bool>>,
    },
}

#[derive(Debug, Args)]
struct ErmArgs {
    /// Class files for H (over X) and Φ (over X*).
    #[arg(long, num_args = 2, value_names = ["H", "PHI"])]
    classes: Vec<PathBuf>,
    /// Sample file: `{"triples": [...]}` or a bare array of triples.
    #[arg(long)]
    sample: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = DEFAULT_PAIR_BUDGET)]
    pair_budget: u64,
    #[arg(long)]
    node_limit: Option<u64>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// JSON file with any subset of the inputs; flags override it.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    dstar: Option<usize>,
    #[arg(long)]
    d_a: Option<usize>,
    #[arg(long)]
    eps_erm: Option<f64>,
    #[arg(long)]
    eps_ig: Option<f64>,
    #[arg(long)]
    eps_u: Option<f64>,
    #[arg(long, value_enum)]
    log_base: Option<LogBaseArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LogBaseArg {
    Natural,
    Two,
}

impl From<LogBaseArg> for LogBase {
    fn from(b: LogBaseArg) -> Self {
        match b {
            LogBaseArg::Natural => LogBase::Natural,
            LogBaseArg::Two => LogBase::Two,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialBoundInputs {
    m: Option<u64>,
    delta: Option<f64>,
    d: Option<usize>,
    dstar: Option<usize>,
    d_a: Option<usize>,
    eps_erm: Option<f64>,
    eps_ig: Option<f64>,
    eps_u: Option<f64>,
    log_base: Option<LogBase>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["config", "rerun", "deviation"])))]
struct SimArgs {
    /// Experiment config for a bound-coverage comparison run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Rerun the experiment recorded in a run directory and compare artifacts.
    #[arg(long)]
    rerun: Option<PathBuf>,
    /// Deviation experiment on the paired distribution family.
    #[arg(long)]
    deviation: bool,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    /// Deviation experiment: d* for the full class on d* privileged points.
    #[arg(long, default_value_t = 8)]
    dstar: usize,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Deviation experiment: try every heavy-side assignment.
    #[arg(long)]
    adversarial: bool,
    /// Deviation experiment: pick φ̂ from the whole class instead of members splitting every pair.
    #[arg(long)]
    full_class: bool,
    /// Deviation experiment: heavy-side assignment (ignored with --adversarial).
    #[arg(long, value_delimiter = ',')]
    heavy_side: Option<Vec<bool>>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    dstar: usize,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. } => EXIT_IO,
            Error::BudgetExhausted { .. } => EXIT_BUDGET,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(msg: impl Display) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: msg.to_string(),
    }
}

/// Parses a JSON file, naming the file in errors (serde reports line and column).
fn read_json_file<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_class(path: &Path, label: &str) -> Result<HypothesisClass, Failure> {
    Ok(read_json_file::<ClassFile>(path)?.into_class(label)?)
}

/// Result to print plus the process exit code.
struct Done {
    value: Value,
    /// Preformatted text replacing the generic renderer for some formats.
    text: Option<String>,
    code: u8,
}

impl Done {
    fn ok(value: Value) -> Self {
        Done { value, text: None, code: 0 }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::from(Error::from(e)))
}

fn cmd_vc(cli: &Cli, a: &VcArgs) -> Result<Done, Failure> {
    let cls = load_class(&a.class_file, &a.label)?;
    let mode = match a.mode {
        Mode::Exact => {
            if a.witness.is_some() {
                return Err(input_error("--witness only applies to --mode lower-bound"));
            }
            VcMode::Exact
        }
        Mode::LowerBound => VcMode::LowerBoundOnly {
            witness: a.witness.clone(),
        },
    };
    let report = with_threads(cli.threads, || vc::vc_dimension(&cls, &mode, a.budget))??;
    if matches!(a.mode, Mode::Exact) && !report.exact {
        return Err(Failure {
            code: EXIT_BUDGET,
            message: format!(
                "budget of {} checks exhausted; only VC ≥ {} is certified (witness {:?})",
                a.budget, report.vc, report.witness
            ),
        });
    }
    let mut value = to_value(&report)?;
    value["domain_size"] = json!(cls.domain().size());
    value["members"] = json!(cls.len());
    Ok(Done::ok(value))
}

fn write_artifacts(cli: &Cli, files: &[(&str, String)]) -> Result<Option<Vec<String>>, Failure> {
    let Some(dir) = &cli.output_dir else { return Ok(None) };
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    let mut written = Vec::new();
    for (name, text) in files {
        let path = dir.join(name);
        write_text(&path, text)?;
        written.push(path.display().to_string());
    }
    Ok(Some(written))
}

fn family_json(f: &Theorem5Family) -> Value {
    json!({
        "dstar": f.dstar(),
        "vc": f.vc,
        "eps": f.eps,
        "delta": f.delta,
        "alpha": f.alpha,
        "pairs": f.pairs,
        "heavy_side": f.heavy_side,
        "heavy_mass": f.heavy_mass(),
        "light_mass": f.light_mass(),
        "phi_star": f.phi_star.to_string(),
        "phi_star_prob": (1.0 - f.alpha) / 2.0,
        "sample_limit": (f.dstar() as f64 - 1.0) / (1280.0 * f.eps * f.eps),
    })
}

fn full_privileged_class(dstar: usize) -> Result<HypothesisClass, Failure> {
    if !(2..=16).contains(&dstar) {
        return Err(input_error(format!("--dstar must lie in 2..=16, got {dstar}")));
    }
    Ok(HypothesisClass::full(Arc::new(FiniteDomain::privileged(dstar)?))?)
}

fn cmd_construct(cli: &Cli, which: &Construct) -> Result<Done, Failure> {
    let (mut value, files) = match which {
        Construct::Theorem1 { d } => {
            let t = construct_theorem1(*d)?;
            let value = json!({
                "d": d,
                "h": ClassFile::from_class(&t.h),
                "phi": ClassFile::from_class(&t.phi),
                "diagonal_witness": t.diagonal_witness(),
                "additive_prediction": t.additive_prediction(),
                "expected_vc_f": 3 * d,
            });
            (value, vec![("h.json", class_to_json(&t.h)), ("phi.json", class_to_json(&t.phi))])
        }
        Construct::Lemma1 { d, dstar } => {
            let l = construct_lemma1_tight(*d, *dstar)?;
            let value = json!({
                "d": d,
                "dstar": dstar,
                "h": ClassFile::from_class(&l.h),
                "j": ClassFile::from_class(&l.j),
                "expected_union_vc": d + dstar + 1,
            });
            (value, vec![("h.json", class_to_json(&l.h)), ("j.json", class_to_json(&l.j))])
        }
        Construct::Lemma2 { h, phi } => {
            let h = load_class(h, priverm::domain::INSTANCE)?;
            let phi = load_class(phi, priverm::domain::PRIVILEGED)?;
            let w = construct_lemma2_witness(&h, &phi)?;
            (to_value(&w)?, Vec::new())
        }
        Construct::Theorem5 {
            phi,
            dstar,
            eps,
            delta,
            heavy_side,
        } => {
            let cls = match (phi, dstar) {
                (Some(p), _) => load_class(p, priverm::domain::PRIVILEGED)?,
                (None, Some(n)) => full_privileged_class(*n)?,
                (None, None) => unreachable!("clap requires one of --phi, --dstar"),
            };
            let (family, dist) = construct_theorem5_family(&cls, *eps, *delta, heavy_side.as_deref())?;
            let mut value = family_json(&family);
            value["distribution"] = to_value(&dist)?;
            let dist_text = serde_json::to_string_pretty(&dist).map_err(|e| Failure::from(Error::from(e)))?;
            (value, vec![("distribution.json", dist_text)])
        }
    };
    if let Some(written) = write_artifacts(cli, &files)? {
        value["written"] = json!(written);
    }
    Ok(Done::ok(value))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SampleFile {
    Wrapped(TripleSample),
    Bare(Vec<Triple>),
}

fn cmd_erm(a: &ErmArgs) -> Result<Done, Failure> {
    let h = load_class(&a.classes[0], priverm::domain::INSTANCE)?;
    let phi = load_class(&a.classes[1], priverm::domain::PRIVILEGED)?;
    let sample = match read_json_file::<SampleFile>(&a.sample)? {
        SampleFile::Wrapped(s) => s,
        SampleFile::Bare(t) => TripleSample::new(t),
    };
    if sample.is_empty() {
        return Err(input_error(format!("{}: sample has no triples", a.sample.display())));
    }
    let opts = SolverOptions {
        pair_budget: a.pair_budget,
        node_limit: a.node_limit,
    };
    let result = erm_privileged_with(&h, &phi, &sample, a.c, &opts)?;
    Ok(Done::ok(to_value(&result)?))
}

fn cmd_bounds(a: &BoundsArgs) -> Result<Done, Failure> {
    let file = match &a.input {
        Some(p) => read_json_file::<PartialBoundInputs>(p)?,
        None => PartialBoundInputs::default(),
    };
    let required = |flag: Option<f64>, file: Option<f64>, name: &str| {
        flag.or(file).ok_or_else(|| input_error(format!("missing --{name} (flag or input file)")))
    };
    let inputs = BoundInputs {
        m: a.m.or(file.m).ok_or_else(|| input_error("missing --m (flag or input file)"))?,
        delta: required(a.delta, file.delta, "delta")?,
        d: a.d.or(file.d).ok_or_else(|| input_error("missing --d (flag or input file)"))?,
        dstar: a.dstar.or(file.dstar).unwrap_or(0),
        d_a: a.d_a.or(file.d_a).unwrap_or(0),
        eps_erm: required(a.eps_erm, file.eps_erm, "eps-erm")?,
        eps_ig: a.eps_ig.or(file.eps_ig).unwrap_or(0.0),
        eps_u: a.eps_u.or(file.eps_u).unwrap_or(0.0),
        log_base: a.log_base.map(LogBase::from).or(file.log_base).unwrap_or_default(),
    };
    let erm = inputs.erm_terms()?;
    let pr = inputs.pr_terms()?;
    let or_reason = |r: priverm::Result<Value>| r.unwrap_or_else(|e| json!({ "not_applicable": e.to_string() }));
    let value = json!({
        "inputs": inputs,
        "a_constant": inputs.a_constant()?,
        "b_erm": erm,
        "b_pr": pr,
        "pr_leq_erm": pr.total <= erm.total,
        "sufficient": or_reason(bounds::sufficient_condition(&inputs).map(|r| json!(r))),
        "necessary": or_reason(bounds::necessary_condition(&inputs).map(|r| json!(r))),
        "alpha_threshold": bounds::alpha_threshold(),
    });
    Ok(Done::ok(value))
}

fn sim_config(cli: &Cli, a: &SimArgs, path: &Path) -> Result<Done, Failure> {
    let mut cfg: ExperimentConfig = read_json_file(path)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if let Some(m) = a.m {
        cfg.m = m;
    }
    if let Some(d) = a.delta {
        cfg.delta = d;
    }
    let dir = cli
        .output_dir
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("priverm-runs").join(format!("seed-{}", cfg.seed)));
    let run = sim::run_comparison(&cfg, cli.threads)?;
    let manifest = sim::persist_run(&run, &cfg, &dir)?;
    let text = match cli.format {
        Format::Csv => Some(read_text(&dir.join(TRIALS_FILE))?),
        _ => None,
    };
    let value = json!({
        "run_dir": dir.display().to_string(),
        "summary": run.summary,
        "manifest": manifest,
    });
    Ok(Done { value, text, code: 0 })
}

fn sim_rerun(cli: &Cli, run_dir: &Path) -> Result<Done, Failure> {
    let original: sim::Manifest = read_json_file(&run_dir.join(persist::MANIFEST_FILE))?;
    let out = cli.output_dir.clone().unwrap_or_else(|| run_dir.join("rerun"));
    let fresh = sim::rerun_from_manifest(run_dir, &out, cli.threads)?;
    let mismatched: Vec<&String> = original
        .sha256
        .iter()
        .filter(|(name, hash)| fresh.sha256.get(*name) != Some(hash))
        .map(|(name, _)| name)
        .collect();
    let identical = mismatched.is_empty();
    let value = json!({
        "run_dir": run_dir.display().to_string(),
        "rerun_dir": out.display().to_string(),
        "identical": identical,
        "mismatched": mismatched,
        "sha256": fresh.sha256,
    });
    Ok(Done {
        value,
        text: None,
        code: if identical { 0 } else { EXIT_VERIFY },
    })
}

fn sim_deviation(cli: &Cli, a: &SimArgs) -> Result<Done, Failure> {
    let phi = full_privileged_class(a.dstar)?;
    let delta = a.delta.unwrap_or(0.005);
    let m = a.m.unwrap_or(50);
    let trials = a.trials.unwrap_or(10_000);
    let seed = cli.seed.unwrap_or(0);
    let candidates = if a.full_class { Candidates::FullClass } else { Candidates::PhiPrime };
    let value = if a.adversarial {
        to_value(&adversarial_theorem5(&phi, a.eps, delta, m, trials, seed, candidates, cli.threads)?)?
    } else {
        let (family, _) = construct_theorem5_family(&phi, a.eps, delta, a.heavy_side.as_deref())?;
        let pool = match candidates {
            Candidates::PhiPrime => family.phi_prime(&phi)?,
            Candidates::FullClass => phi.clone(),
        };
        to_value(&run_theorem5_experiment(&family, &pool, m, trials, seed, cli.threads)?)?
    };
    Ok(Done::ok(value))
}

fn cmd_sim(cli: &Cli, a: &SimArgs) -> Result<Done, Failure> {
    if let Some(path) = &a.config {
        sim_config(cli, a, path)
    } else if let Some(dir) = &a.rerun {
        sim_rerun(cli, dir)
    } else {
        sim_deviation(cli, a)
    }
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> Result<Done, Failure> {
    let report = with_threads(cli.threads, || run_suite(a.suite, a.d, a.dstar))??;
    let text = matches!(cli.format, Format::Table).then(|| render_table(&report));
    Ok(Done {
        value: to_value(&report)?,
        text,
        code: if report.passed { 0 } else { EXIT_VERIFY },
    })
}

fn run(cli: &Cli) -> Result<Done, Failure> {
    if cli.threads == Some(0) {
        return Err(input_error("--threads must be at least 1"));
    }
    match &cli.command {
        Command::Vc(a) => cmd_vc(cli, a),
        Command::Construct { which } => cmd_construct(cli, which),
        Command::Erm(a) => cmd_erm(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Sim(a) => cmd_sim(cli, a),
        Command::Verify(a) => cmd_verify(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(done) => {
            let text = done.text.unwrap_or_else(|| render(&done.value, cli.format));
            print!("{text}");
            ExitCode::from(done.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
