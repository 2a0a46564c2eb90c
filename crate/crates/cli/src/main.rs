//! `czlab`: runs the experiments from flags or a JSON config and writes the
//! report as JSON plus a CSV table of its measurements.
//!
//! Exit codes: 0 when every verdict passes, 1 on a failed verdict, 2 on bad
//! flags or an unreadable config, 3 on an internal error.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use czlab::experiments::{
    run_appendix, run_carleson_bound, run_domination, run_example_2_1, run_example_2_3,
    run_hormander, run_weak_l1, AppendixSpec, CarlesonConfig, DominationConfig, HormanderConfig,
    WeakL1Config,
};
use czlab::grid::read_csv;
use czlab::kernels::by_name;
use czlab::sparse::{build, verify_sparsity};
use czlab::{CausalSign, ExperimentReport, SparseParams};

#[derive(Parser, Debug)]
#[command(
    name = "czlab",
    version,
    about = "Causal sparse domination experiments"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// JSON file with the experiment parameters; unknown keys are rejected.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report JSON path; the CSV table goes next to it with extension `.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid resolution: cells per axis is `2^J`.
    #[arg(long)]
    j: Option<u32>,
    /// Worker threads for the experiment internals.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The exact sparse identity and Carleson growth of the first example.
    Ex21 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n_min: Option<u32>,
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Closed-form horizontal Hilbert transform values.
    Ex23 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n_min: Option<u32>,
        #[arg(long)]
        n_max: Option<u32>,
    },
    /// The lacunary Poisson counterexample.
    Appendix {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k0: Option<u32>,
    },
    /// Pointwise sparse domination of the causal operator.
    Dominate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Carleson norm and pointwise bounds for the causal and sparse operators.
    Carleson {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Weak-type (1, 1) constant of the causal operator.
    Weakl1 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Hörmander integrals of the causal kernels.
    Hormander {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        samples: Option<usize>,
        /// Comma-separated kernel names such as `beurling-,lipgraph+`.
        #[arg(long, value_delimiter = ',')]
        kernels: Option<Vec<String>>,
    },
    /// Builds and verifies the sparse family of a grid function.
    SparseBuild {
        #[command(flatten)]
        common: Common,
        /// Grid function CSV with its window line.
        #[arg(long)]
        input: PathBuf,
        /// A downward causal kernel such as `beurling-` or `hilbert-`.
        #[arg(long, default_value = "beurling-")]
        kernel: String,
        /// Where to write the serialized family.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Version, defaults and the arithmetic in use.
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct Ex21Config {
    n_min: u32,
    n_max: u32,
    p: f64,
}

impl Default for Ex21Config {
    fn default() -> Self {
        Ex21Config {
            n_min: 1,
            n_max: 12,
            p: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct Ex23Config {
    n_min: u32,
    n_max: u32,
}

impl Default for Ex23Config {
    fn default() -> Self {
        Ex23Config { n_min: 0, n_max: 8 }
    }
}

/// Failures mapped onto the exit code contract.
enum Failure {
    Usage(String),
    Internal(String),
}

/// Precondition errors come from user parameters; everything else is internal.
impl From<czlab::Error> for Failure {
    fn from(e: czlab::Error) -> Self {
        match e {
            czlab::Error::Precondition(_) => Failure::Usage(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, Failure> {
    load_or(path, T::default)
}

fn load_or<T: DeserializeOwned>(
    path: Option<&Path>,
    default: impl FnOnce() -> T,
) -> Result<T, Failure> {
    let Some(path) = path else {
        return Ok(default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn write_report(rep: &ExperimentReport, out: Option<&Path>) -> Result<(), Failure> {
    let Some(path) = out else {
        return Ok(());
    };
    let io = |e: std::io::Error| Failure::Internal(format!("{}: {e}", path.display()));
    std::fs::write(path, rep.to_json()?).map_err(io)?;
    let csv = path.with_extension("csv");
    let file =
        File::create(&csv).map_err(|e| Failure::Internal(format!("{}: {e}", csv.display())))?;
    rep.write_csv(BufWriter::new(file))?;
    Ok(())
}

fn run(cmd: Command) -> Result<Option<ExperimentReport>, Failure> {
    let common = match &cmd {
        Command::Info => None,
        Command::Ex21 { common, .. }
        | Command::Ex23 { common, .. }
        | Command::Appendix { common, .. }
        | Command::Dominate { common, .. }
        | Command::Carleson { common, .. }
        | Command::Weakl1 { common, .. }
        | Command::Hormander { common, .. }
        | Command::SparseBuild { common, .. } => Some(common.clone()),
    };
    let common = common.unwrap_or_default();
    if let Some(t) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Internal(e.to_string()))?;
    }
    let cfg = common.config.as_deref();
    let rep = match cmd {
        Command::Info => {
            info();
            return Ok(None);
        }
        Command::Ex21 {
            n_min, n_max, p, ..
        } => {
            let mut c: Ex21Config = load(cfg)?;
            set(&mut c.n_min, n_min);
            set(&mut c.n_max, n_max);
            set(&mut c.p, p);
            run_example_2_1(c.n_min..=c.n_max, c.p)?
        }
        Command::Ex23 { n_min, n_max, .. } => {
            let mut c: Ex23Config = load(cfg)?;
            set(&mut c.n_min, n_min);
            set(&mut c.n_max, n_max);
            run_example_2_3(c.n_min..=c.n_max)?
        }
        Command::Appendix { k0, .. } => {
            let mut c: AppendixSpec = load(cfg)?;
            set(&mut c.k0, k0);
            run_appendix(&c)?
        }
        Command::Dominate { trials, n, .. } => {
            let mut c: DominationConfig = load(cfg)?;
            set(&mut c.seed, common.seed);
            set(&mut c.j, common.j);
            set(&mut c.trials, trials);
            set(&mut c.n, n);
            run_domination(&c)?
        }
        Command::Carleson {
            trials, p, q, n, ..
        } => {
            let mut c: CarlesonConfig = load(cfg)?;
            set(&mut c.seed, common.seed);
            set(&mut c.j, common.j);
            set(&mut c.trials, trials);
            set(&mut c.p, p);
            set(&mut c.q, q);
            set(&mut c.n, n);
            run_carleson_bound(&c)?
        }
        Command::Weakl1 { trials, n, .. } => {
            let mut c: WeakL1Config = load(cfg)?;
            set(&mut c.seed, common.seed);
            set(&mut c.j, common.j);
            set(&mut c.trials, trials);
            set(&mut c.n, n);
            run_weak_l1(&c)?
        }
        Command::Hormander {
            samples, kernels, ..
        } => {
            let mut c: HormanderConfig = load(cfg)?;
            set(&mut c.seed, common.seed);
            set(&mut c.samples, samples);
            set(&mut c.kernels, kernels);
            run_hormander(&c)?
        }
        Command::SparseBuild {
            input,
            kernel,
            json,
            ..
        } => sparse_build(cfg, &input, &kernel, json.as_deref())?,
    };
    write_report(&rep, common.out.as_deref())?;
    Ok(Some(rep))
}

fn sparse_build(
    cfg: Option<&Path>,
    input: &Path,
    kernel: &str,
    json: Option<&Path>,
) -> Result<ExperimentReport, Failure> {
    let file =
        File::open(input).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
    let f =
        read_csv(file, None).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
    let k = by_name(kernel)?;
    if k.sign != CausalSign::Minus {
        return Err(Failure::Usage(format!(
            "{kernel:?} is not a downward causal kernel"
        )));
    }
    let n = f.window().axes() - 1;
    let params = load_or(cfg, || SparseParams::for_dim(n))?;
    let start = std::time::Instant::now();
    let fam = build(&k, &f, &params)?;
    if let Some(path) = json {
        std::fs::write(path, fam.to_json()?)
            .map_err(|e| Failure::Internal(format!("{}: {e}", path.display())))?;
    }
    let sp = verify_sparsity(&fam);
    let mut rep = ExperimentReport::new("sparse-build", &params, None)?;
    let worst = *sp.worst_ratio.numer() as f64 / *sp.worst_ratio.denom() as f64;
    rep.measure("entries", 0.0, sp.entries as f64);
    rep.measure("worst_ratio", 0.0, worst);
    let detail = if sp.ok() {
        format!("{} cubes, worst |E_Q|/|Q| = {}", sp.entries, sp.worst_ratio)
    } else {
        sp.violations.join("; ")
    };
    rep.verdict("sparsity", sp.ok(), detail);
    Ok(rep.finish(start))
}

fn info() {
    println!("czlab {}", env!("CARGO_PKG_VERSION"));
    println!("geometry: exact dyadic coordinates (i128 numerators over powers of two)");
    println!("exact sums: arbitrary-precision rationals; grid quantities: f64");
    println!("threads: {}", rayon::current_num_threads());
    let defaults = serde_json::json!({
        "ex21": Ex21Config::default(),
        "ex23": Ex23Config::default(),
        "appendix": AppendixSpec::default(),
        "dominate": DominationConfig::default(),
        "carleson": CarlesonConfig::default(),
        "weakl1": WeakL1Config::default(),
        "hormander": HormanderConfig::default(),
        "sparse-build": SparseParams::for_dim(1),
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&defaults).expect("defaults serialize")
    );
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(rep)) => {
            println!("{}", rep.summary());
            if rep.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}
