//! The `dss` command line.

use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::dataset::{load_dataset, Dataset, LoadError};
use crate::fixtures;
use crate::goal::{self, LeadMode};
use crate::pipeline::allocation_model;
use crate::service::{self, merge_patch, AppState};
use crate::session::{load_session, run_pipeline, write_atomic, Session};
use crate::synth::{synth_dataset, SynthConfig};
use crate::topsis::{argmax, DistanceVariant, GroupFilter};

#[derive(Parser, Debug)]
#[command(name = "dss", version, about = "Fuzzy supplier ranking and order allocation")]
pub struct Cli {
    /// JSON file merged over the dataset's pipeline config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the main output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for synthetic data and seeded reliability sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a dataset bundle and list every violation.
    Validate { dataset: String },
    /// Rank suppliers by fuzzy closeness.
    Rank {
        dataset: String,
        #[arg(long, default_value = "all")]
        group: GroupFilter,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Supply-chain risk index at one alpha or over a sweep.
    Scri {
        dataset: String,
        #[arg(long, conflicts_with = "sweep", required_unless_present = "sweep")]
        alpha: Option<f64>,
        #[arg(long)]
        sweep: Option<f64>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Order quantities from the goal program.
    Allocate {
        dataset: String,
        #[arg(long, conflicts_with = "tvp_sweep")]
        tvp: Option<f64>,
        /// `start:end:step`, inclusive.
        #[arg(long)]
        tvp_sweep: Option<String>,
        #[arg(long)]
        mode: Option<LeadMode>,
        #[arg(long)]
        integerize: bool,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Generate a random dataset bundle.
    Synth {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=10_000))]
        suppliers: u32,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..=100))]
        decision_makers: u32,
        #[arg(long, default_value_t = 365, value_parser = clap::value_parser!(u32).range(3..))]
        series_len: u32,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Dataset to load as session `s1` at startup.
        #[arg(long)]
        dataset: Option<String>,
        /// Directory where sessions are saved on every write.
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Inspect or write session files.
    #[command(subcommand)]
    Session(SessionCommand),
}

#[derive(Subcommand, Debug)]
enum SessionCommand {
    /// Summarize a saved session and check its hashes.
    Show { file: PathBuf },
    /// Run the pipeline and save the session.
    Save {
        dataset: String,
        #[command(flatten)]
        run: RunFlags,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct RunFlags {
    #[arg(long)]
    distance_variant: Option<DistanceVariant>,
    /// Use raw series and ranges even where TFN overrides exist.
    #[arg(long)]
    from_raw: bool,
}

#[derive(Debug)]
enum CliError {
    /// Bad arguments, unreadable files.
    Usage(String),
    /// The data or the model says no.
    Domain(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Invalid(_) => CliError::Domain(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// A bundle directory, a JSON document, or a bundled case by name.
fn read_dataset(spec: &str) -> Result<Dataset, LoadError> {
    let path = Path::new(spec);
    if !path.exists() {
        if let Some(ds) = fixtures::by_name(spec) {
            return ds.validated();
        }
    }
    load_dataset(path)
}

struct Ctx {
    config: Option<PathBuf>,
    output: Option<PathBuf>,
    json: bool,
    seed: Option<u64>,
}

impl Ctx {
    fn dataset(&self, spec: &str, run: &RunFlags) -> Result<Dataset, CliError> {
        let mut ds = read_dataset(spec)?;
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let patch: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let mut doc = serde_json::to_value(&ds.manifest.config).expect("config serializes");
            merge_patch(&mut doc, &patch);
            ds.manifest.config = serde_json::from_value(doc).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        }
        let cfg = &mut ds.manifest.config;
        if let Some(v) = run.distance_variant {
            cfg.distance_variant = v;
        }
        if run.from_raw {
            cfg.from_raw = true;
        }
        if let Some(seed) = self.seed {
            cfg.reliability.seed = seed;
        }
        let violations = ds.validate();
        if !violations.is_empty() {
            return Err(LoadError::Invalid(violations).into());
        }
        Ok(ds)
    }

    fn session(&self, spec: &str, run: &RunFlags) -> Result<Session, CliError> {
        run_pipeline(&self.dataset(spec, run)?).map_err(domain)
    }

    fn emit(&self, text: &str) -> Result<(), CliError> {
        match &self.output {
            Some(path) => write_atomic(path, text.as_bytes()).map_err(usage),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(usage)
            }
        }
    }

    fn emit_json<T: serde::Serialize>(&self, value: &T) -> Result<(), CliError> {
        self.emit(&(serde_json::to_string_pretty(value).expect("serializable") + "\n"))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = Ctx {
        config: cli.config,
        output: cli.output,
        json: cli.json,
        seed: cli.seed,
    };
    match cli.command {
        Command::Validate { dataset } => {
            let ds = match dataset.as_str() {
                s if !Path::new(s).exists() && fixtures::by_name(s).is_some() => {
                    fixtures::by_name(s).expect("named fixture")
                }
                s if Path::new(s).is_file() => {
                    let text = std::fs::read_to_string(s).map_err(|e| usage(format!("{s}: {e}")))?;
                    Dataset::from_json(&text)?
                }
                s => Dataset::read_dir(Path::new(s))?,
            };
            let violations = ds.validate();
            if ctx.json {
                ctx.emit_json(&json!({ "valid": violations.is_empty(), "violations": violations }))?;
            }
            if violations.is_empty() {
                if !ctx.json {
                    eprintln!(
                        "{dataset}: ok ({} suppliers, {} attributes)",
                        ds.suppliers.len(),
                        ds.attributes.len()
                    );
                }
                Ok(())
            } else {
                for v in &violations {
                    eprintln!("{v}");
                }
                Err(CliError::Domain(format!("{} violation(s)", violations.len())))
            }
        }
        Command::Rank { dataset, group, run } => {
            let s = ctx.session(&dataset, &run)?;
            let result = s
                .artifacts
                .ranking
                .group(group)
                .ok_or_else(|| usage(format!("dataset has no {group} attributes")))?;
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            if ctx.json {
                ctx.emit_json(result)
            } else {
                ctx.emit(&result.to_csv())
            }
        }
        Command::Scri {
            dataset,
            alpha,
            sweep,
            run,
        } => {
            if let Some(a) = alpha {
                if !(0.0..=1.0).contains(&a) {
                    return Err(usage(format!("--alpha must lie in [0, 1], got {a}")));
                }
            }
            if let Some(step) = sweep {
                if !(step > 0.0 && step <= 0.5) {
                    return Err(usage(format!("--sweep step must lie in (0, 0.5], got {step}")));
                }
            }
            let s = ctx.session(&dataset, &run)?;
            let inputs = s
                .artifacts
                .ranking
                .scri_inputs()
                .ok_or_else(|| usage("dataset needs both resilience and cost attributes"))?;
            match alpha {
                Some(a) => {
                    let values = inputs.scri(a).map_err(usage)?;
                    let best = argmax(&values);
                    if ctx.json {
                        return ctx.emit_json(&json!({
                            "alpha": a,
                            "suppliers": inputs.suppliers,
                            "values": values,
                            "argmax": inputs.suppliers[best],
                        }));
                    }
                    let mut out = String::from("alpha,supplier,scri,is_argmax\n");
                    for (i, (id, v)) in inputs.suppliers.iter().zip(&values).enumerate() {
                        out.push_str(&format!("{a},{id},{v:.6},{}\n", i == best));
                    }
                    ctx.emit(&out)
                }
                None => {
                    let sweep = inputs.sweep(sweep.expect("clap requires one")).map_err(usage)?;
                    if ctx.json {
                        ctx.emit_json(&sweep)
                    } else {
                        ctx.emit(&sweep.to_csv())
                    }
                }
            }
        }
        Command::Allocate {
            dataset,
            tvp,
            tvp_sweep,
            mode,
            integerize,
            run,
        } => {
            let ds = ctx.dataset(&dataset, &run)?;
            if ds.mcgp.is_none() {
                return Err(usage(format!("{dataset} has no goal-program parameters (mcgp.json)")));
            }
            let tvps = tvp_sweep.as_deref().map(goal::parse_sweep).transpose().map_err(usage)?;
            let s = run_pipeline(&ds).map_err(domain)?;
            let mut model = allocation_model(&ds, &s.artifacts.ranking).expect("mcgp present");
            if let Some(t) = tvp {
                model = model.with_tvp(t);
            }
            let mut options = ds.config().allocation;
            if let Some(m) = mode {
                options.mode = m;
            }
            options.integerize |= integerize;
            if let Some(reference) = &model.reference_plan {
                let eval = goal::evaluate_plan(&model, reference, goal::LeadDenominator::Actual).map_err(domain)?;
                eprintln!(
                    "reference plan {:?}: penalty {:.5}, spend {}",
                    reference, eval.objective, eval.achieved.spend
                );
            }
            match tvps {
                Some(list) => {
                    let points = goal::tvp_sweep(&model, &list, &options).map_err(domain)?;
                    if ctx.json {
                        ctx.emit_json(&points)
                    } else {
                        ctx.emit(&goal::sweep_csv(&points))
                    }
                }
                None => {
                    let plan = goal::solve_allocation(&model, &options).map_err(domain)?;
                    eprintln!("{:?}: objective {:.5}", plan.solver_status, plan.objective);
                    ctx.emit_json(&plan)
                }
            }
        }
        Command::Synth {
            suppliers,
            decision_makers,
            series_len,
        } => {
            let ds = synth_dataset(&SynthConfig {
                suppliers: suppliers as usize,
                decision_makers: decision_makers as usize,
                series_len: series_len as usize,
                seed: ctx.seed.unwrap_or(SynthConfig::default().seed),
                ..SynthConfig::default()
            });
            match (&ctx.output, ctx.json) {
                (Some(dir), false) => {
                    for (name, text) in ds.to_files() {
                        write_atomic_in(dir, &name, &text)?;
                    }
                    eprintln!("wrote bundle {}", dir.display());
                    Ok(())
                }
                _ => ctx.emit(&(ds.to_json() + "\n")),
            }
        }
        Command::Serve {
            port,
            host,
            dataset,
            store,
        } => {
            let preload = dataset
                .as_deref()
                .map(|d| ctx.dataset(d, &RunFlags::default()))
                .transpose()?;
            if let Some(dir) = &store {
                std::fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
            }
            let runtime = tokio::runtime::Runtime::new().map_err(usage)?;
            let state = Arc::new(AppState::new(store));
            runtime
                .block_on(service::serve(SocketAddr::new(host, port), state, preload))
                .map_err(usage)
        }
        Command::Session(SessionCommand::Show { file }) => {
            let (s, warnings) = load_session(&file).map_err(|e| match e {
                crate::session::SessionError::Io { .. } => usage(e),
                other => domain(other),
            })?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            if ctx.json {
                return ctx.emit_json(&s);
            }
            let mut out = format!(
                "session v{} `{}`: {} suppliers, {} attributes\nartifact hash {}\n",
                s.version,
                s.dataset.manifest.name,
                s.dataset.suppliers.len(),
                s.dataset.attributes.len(),
                s.provenance.artifact_hash
            );
            for score in &s.artifacts.ranking.all.scores {
                out.push_str(&format!(
                    "  {:>3}  {}  {:.4}\n",
                    score.rank, score.supplier, score.closeness
                ));
            }
            if let Some(p) = &s.artifacts.allocation {
                out.push_str(&format!("allocation {:?} objective {:.5}\n", p.quantities, p.objective));
            }
            ctx.emit(&out)
        }
        Command::Session(SessionCommand::Save { dataset, run }) => {
            let s = ctx.session(&dataset, &run)?;
            ctx.emit(&(s.to_json() + "\n"))
        }
    }
}

fn write_atomic_in(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    write_atomic(&dir.join(name), text.as_bytes()).map_err(usage)
}

/// Parses arguments, runs, and maps failures to exit codes 1 (domain) or 2
/// (usage and I/O).
pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(m) | CliError::Domain(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(e.code())
        }
    }
}
