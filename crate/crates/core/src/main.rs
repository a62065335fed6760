use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use speckle_core::pipeline::{
    cmd_extract, cmd_metrics, cmd_pipeline, cmd_reconstruct, cmd_simulate, Method, PipelineConfig,
    RunManifest,
};
use speckle_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "speckle",
    version,
    about = "Imaging through thin scattering layers from speckle frames"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct Common {
    /// Configuration file (`key = value` lines); defaults to the desk broadband preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, overrides `output_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Verb {
    /// Render the object and write speckle frames.
    Simulate,
    /// Correlation pattern from frame files or directories.
    Extract {
        #[arg(long, default_value = "raut")]
        method: Method,
        #[arg(required = true)]
        frames: Vec<PathBuf>,
    },
    /// Phase retrieval from a correlation pattern.
    Reconstruct {
        pattern: PathBuf,
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Print figures of merit for an image.
    Metrics {
        image: PathBuf,
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Full run: simulate, extract both ways, reconstruct both, compare.
    Pipeline,
}

fn load_config(c: &Common) -> Result<PipelineConfig> {
    let mut cfg = match &c.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(o) = &c.out {
        cfg.output_dir = o.clone();
    }
    Ok(cfg)
}

fn print_summary(m: &RunManifest) {
    for (k, v) in m.entries() {
        if k.starts_with("metric.") || k.starts_with("stage.") {
            println!("{}={v}", &k[k.find('.').unwrap_or(0) + 1..]);
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(&cli.common)?;
    let manifest = match cli.verb {
        Verb::Simulate => cmd_simulate(&cfg)?,
        Verb::Extract { method, frames } => cmd_extract(&frames, method, &cfg)?,
        Verb::Reconstruct { pattern, truth } => cmd_reconstruct(&pattern, &cfg, truth.as_deref())?,
        Verb::Metrics { image, truth } => {
            for r in cmd_metrics(&image, &cfg, truth.as_deref())? {
                println!("{r}");
            }
            return Ok(());
        }
        Verb::Pipeline => cmd_pipeline(&cfg)?,
    };
    print_summary(&manifest);
    println!(
        "manifest={}",
        cfg.output_dir
            .join(speckle_core::pipeline::MANIFEST)
            .display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli.common.workers;
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    e.exit_code().clamp(1, 255) as u8
}
