use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use log::info;

use rsma_relay::alloc::GridSpec;
use rsma_relay::config::{linear_to_db, BuMode};
use rsma_relay::error::{Error, Result};
use rsma_relay::ratecalc::Variant;
use rsma_relay::sim::{
    emit, parse_snr_range, run_experiment_with_threads, write_metadata, write_rows, ExperimentSpec, FileConfig,
    Method, OutputFormat, Preset,
};

/// Monte Carlo sum-rate sweeps for a two-phase rate-splitting relay network.
#[derive(Debug, Parser)]
#[command(name = "rsma-relay", version)]
struct Args {
    /// JSON configuration file (flat keys, unknown keys rejected).
    #[arg(long)]
    config: Option<PathBuf>,

    /// Figure preset: fig2a, fig2b, fig3a, fig3b, fig4a, fig4b or fig5.
    #[arg(long)]
    preset: Option<Preset>,

    /// SNR sweep in dB as start:step:stop, or a single value.
    #[arg(long, value_parser = parse_snr)]
    snr: Option<SnrList>,

    /// Channel realizations per sweep point.
    #[arg(long)]
    realizations: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,

    /// Comma-separated: rsma_closed, rsma_exhaustive, sdma.
    #[arg(long, value_delimiter = ',')]
    method: Option<Vec<Method>>,

    /// Comma-separated sum-rate variants R1..R4.
    #[arg(long, value_delimiter = ',')]
    variant: Option<Vec<Variant>>,

    /// Comma-separated BU phase-2 modes: PCI, FCI, NONE.
    #[arg(long = "bu-mode", value_delimiter = ',')]
    bu_mode: Option<Vec<BuMode>>,

    /// Output file. A `.meta.json` sidecar is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,

    /// csv or json (default: from the --out extension, else csv).
    #[arg(long)]
    format: Option<OutputFormat>,

    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    threads: usize,

    /// Exhaustive-search grid as coarse:refine points per axis.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,

    /// Store per-row wall time (output is then not reproducible).
    #[arg(long)]
    record_timing: bool,
}

#[derive(Debug, Clone)]
struct SnrList(Vec<f64>);

fn parse_snr(s: &str) -> std::result::Result<SnrList, String> {
    parse_snr_range(s).map(SnrList)
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected coarse:refine, got `{s}`"))?;
    let n = |p: &str| p.trim().parse::<usize>().map_err(|e| format!("bad count `{p}`: {e}"));
    Ok((n(a)?, n(b)?))
}

fn build_spec(args: &Args) -> Result<ExperimentSpec> {
    let file = match &args.config {
        Some(path) => Some(FileConfig::load(path)?),
        None => None,
    };
    let preset = match (&args.preset, file.as_ref().and_then(|f| f.preset.as_deref())) {
        (Some(p), _) => Some(*p),
        (None, Some(name)) => Some(
            name.parse::<Preset>()
                .map_err(|e| Error::InvalidConfig(vec![e]))?,
        ),
        (None, None) => None,
    };
    let mut spec = preset.map(|p| p.spec()).unwrap_or_default();
    if let Some(f) = &file {
        f.apply(&mut spec)?;
    }
    if let Some(snr) = &args.snr {
        spec.sweep.snr_db = snr.0.clone();
    }
    if spec.sweep.is_empty() {
        spec.sweep.snr_db = vec![linear_to_db(spec.base.p1)];
    }
    if let Some(n) = args.realizations {
        spec.n_realizations = n;
    }
    if let Some(seed) = args.seed {
        spec.base.seed = seed;
    }
    if let Some(m) = &args.method {
        spec.methods = m.clone();
    }
    if let Some(v) = &args.variant {
        spec.variants = v.clone();
    }
    if let Some(m) = &args.bu_mode {
        spec.bu_modes = m.clone();
    }
    if let Some((coarse, refine)) = args.grid {
        spec.grid = GridSpec {
            coarse,
            refine,
            ..spec.grid
        };
    }
    if args.record_timing {
        spec.record_timing = true;
    }
    if let Some(out) = &args.out {
        spec.output_path = Some(out.clone());
    }
    spec.format = match (args.format, &spec.output_path) {
        (Some(f), _) => f,
        (None, Some(p)) if args.out.is_some() => OutputFormat::from_path(p).unwrap_or(spec.format),
        _ => spec.format,
    };
    Ok(spec)
}

fn run(args: &Args) -> Result<()> {
    let spec = build_spec(args)?;
    spec.validate()?;
    info!(
        "{} sweep points, {} realizations each",
        spec.points().len(),
        spec.n_realizations
    );
    let rows = run_experiment_with_threads(&spec, args.threads)?;
    match &spec.output_path {
        Some(path) => {
            emit(&rows, spec.format, path)?;
            let meta = write_metadata(&spec, rows.len(), path)?;
            eprintln!("wrote {} rows to {} ({})", rows.len(), path.display(), meta.display());
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_rows(&rows, spec.format, &mut lock, Path::new("<stdout>"))?;
            lock.flush().map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
