use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eegflow::pipeline::{cmd_eval, cmd_extract, cmd_run, cmd_select, cmd_synth, format_table4};
use eegflow::synth::SynthSpec;
use eegflow::RunConfig;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

/// EEG mental-workload pipeline: synthesize, extract, select, evaluate.
#[derive(Debug, Parser)]
#[command(name = "eegflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Run configuration (JSON); defaults are used for missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic dataset.
    Synth {
        /// Synthesis spec (JSON); the default spec when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Preprocess a dataset and write the feature matrix.
    Extract {
        #[arg(long)]
        dataset: PathBuf,
        #[command(flatten)]
        common: Common,
        /// One column per channel and feature instead of channel means.
        #[arg(long)]
        per_channel: bool,
    },
    /// Rank features by the three selectors and fuse them.
    Select {
        #[arg(long)]
        features: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Size of the fused feature set.
        #[arg(long)]
        selected_k: Option<usize>,
    },
    /// Train and evaluate every classifier on all and on selected features.
    Eval {
        #[arg(long)]
        features: PathBuf,
        /// `selection.json` written by `select`.
        #[arg(long)]
        selection: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Extract, select and evaluate in one go.
    Run {
        #[arg(long)]
        dataset: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        per_channel: bool,
        #[arg(long)]
        selected_k: Option<usize>,
    },
}

enum Failure {
    Usage(String),
    Lib(eegflow::Error),
}

impl From<eegflow::Error> for Failure {
    fn from(e: eegflow::Error) -> Self {
        Failure::Lib(e)
    }
}

fn existing(path: &Path, what: &str) -> Result<(), Failure> {
    if path.exists() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("{what} {} does not exist", path.display())))
    }
}

fn load_config(common: &Common, per_channel: bool, selected_k: Option<usize>) -> Result<RunConfig, Failure> {
    let mut cfg = match &common.config {
        Some(p) => {
            existing(p, "config file")?;
            RunConfig::load(p)?
        }
        None => RunConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if per_channel {
        cfg.per_channel_mode = true;
    }
    if let Some(k) = selected_k {
        cfg.selection.fused_k = k;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("EEGFLOW_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("EEGFLOW_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Lib(eegflow::Error::Internal(e.to_string())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Synth { spec, seed, out } => {
            let mut s = match spec {
                Some(p) => {
                    existing(&p, "spec file")?;
                    SynthSpec::load(&p)?
                }
                None => SynthSpec::default(),
            };
            if let Some(seed) = seed {
                s.seed = seed;
            }
            let summary = cmd_synth(&s, &out)?;
            println!(
                "wrote {} trials ({} subjects x {} types x {} per type) to {}",
                summary.n_trials,
                s.n_subjects,
                s.model_types.len(),
                s.trials_per_type,
                out.display()
            );
        }
        Command::Extract {
            dataset,
            common,
            per_channel,
        } => {
            existing(&dataset, "dataset directory")?;
            let cfg = load_config(&common, per_channel, None)?;
            let o = cmd_extract(&dataset, &cfg, &common.out)?;
            println!("{} rows x {} columns -> {}", o.n_rows, o.n_columns, o.features.display());
        }
        Command::Select {
            features,
            common,
            selected_k,
        } => {
            existing(&features, "feature file")?;
            let cfg = load_config(&common, false, selected_k)?;
            let (report, written) = cmd_select(&features, &cfg, &common.out)?;
            for m in &report.methods {
                let top: Vec<&str> = m.top.iter().map(|f| f.name.as_str()).collect();
                println!("{}: {}", m.method, top.join(", "));
            }
            println!("fused ({}): {}", report.fused.len(), report.fused_names().join(", "));
            println!("{} files written to {}", written.len(), common.out.display());
        }
        Command::Eval {
            features,
            selection,
            common,
        } => {
            existing(&features, "feature file")?;
            existing(&selection, "selection report")?;
            let cfg = load_config(&common, false, None)?;
            let (report, _) = cmd_eval(&features, &selection, &cfg, &common.out)?;
            print!("{}", format_table4(&report));
        }
        Command::Run {
            dataset,
            common,
            per_channel,
            selected_k,
        } => {
            existing(&dataset, "dataset directory")?;
            let cfg = load_config(&common, per_channel, selected_k)?;
            let o = cmd_run(&dataset, &cfg, &common.out)?;
            print!("{}", format_table4(&o.eval));
            println!("manifest: {} ({} artifacts)", o.manifest_path.display(), o.manifest.artifacts.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::Usage(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Ok(Err(Failure::Lib(e))) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_data_error() { EXIT_DATA } else { EXIT_INTERNAL })
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}
