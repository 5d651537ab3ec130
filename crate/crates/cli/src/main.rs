use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sphereqa_core::media::{read_yuv_sequence, write_feature_table, FrameSource, SequencePair};
use sphereqa_core::metrics::{compute_metrics, si_ti, MetricContext, MetricError, VideoMetric};
use sphereqa_core::pipeline::{
    load_config, render_metric_frames, render_metric_pooled, render_siti_frames,
    render_siti_pooled, run_grid, synthesize, workers_from_env, write_grid_outputs, PipelineError,
    SynthSpec,
};
use sphereqa_core::sphere::{load_sphere_points, ErpGeometry, ResizedSource};

#[derive(Parser)]
#[command(
    name = "sphereqa",
    version,
    about = "Quality metrics and fusion-model benchmarking for 360° audiovisual content"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full-reference video metrics between two raw YUV sequences.
    Metrics(MetricsArgs),
    /// Spatial and temporal information of one raw YUV sequence.
    Siti(SitiArgs),
    /// Runs the learner × metric evaluation grid described by a config file.
    Grid(GridArgs),
    /// Writes a synthetic feature table with a known ground truth.
    Synth(SynthArgs),
}

#[derive(Args)]
struct Geometry {
    /// Frame width in pixels.
    #[arg(long)]
    width: usize,
    /// Frame height in pixels.
    #[arg(long)]
    height: usize,
    /// Bits per sample (8 or 10; 10-bit samples are little-endian u16).
    #[arg(long, default_value_t = 8)]
    bit_depth: u8,
}

#[derive(Args)]
struct MetricsArgs {
    /// Reference sequence.
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Distorted sequence.
    #[arg(long = "dist")]
    distorted: PathBuf,
    #[command(flatten)]
    geometry: Geometry,
    /// Distorted width, when it differs from the reference.
    #[arg(long)]
    dist_width: Option<usize>,
    /// Distorted height, when it differs from the reference.
    #[arg(long)]
    dist_height: Option<usize>,
    /// Comma-separated metric names (default: all).
    #[arg(long, value_delimiter = ',')]
    metrics: Option<Vec<String>>,
    /// Resample the distorted frames to the reference geometry first.
    #[arg(long)]
    resize_to_ref: bool,
    /// Sphere sampling points (`lat lon` in degrees per line) for S-PSNR.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Output directory for metrics_frames.csv and metrics_pooled.csv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SitiArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    geometry: Geometry,
    /// Output directory for siti_frames.csv and siti_pooled.csv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct GridArgs {
    /// Experiment config (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; falls back to the SPHEREQA_WORKERS variable.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 5)]
    contents: usize,
    #[arg(long, default_value_t = 8)]
    conditions: usize,
    /// Standard deviation of the label noise in MOS units.
    #[arg(long, default_value_t = 0.2)]
    noise: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Feature table to write.
    #[arg(long)]
    out: PathBuf,
    /// Ground-truth file (default: the table path with `.truth.txt` appended).
    #[arg(long)]
    truth: Option<PathBuf>,
}

/// Failure classes mapped onto the process exit status.
enum Failure {
    Config(String),
    Data(String),
    Partial(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Data(_) => 3,
            Failure::Partial(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Data(m) | Failure::Partial(m) => m,
        }
    }
}

fn data(e: impl std::fmt::Display) -> Failure {
    Failure::Data(e.to_string())
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Config(_) | PipelineError::Invalid(_) => Failure::Config(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

fn write_report(
    dir: &Path,
    name: &str,
    render: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir).map_err(|e| data(format!("{}: {e}", dir.display())))?;
    let mut buf = Vec::new();
    render(&mut buf).map_err(data)?;
    let path = dir.join(name);
    fs::write(&path, buf).map_err(|e| data(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn parse_metrics(names: &Option<Vec<String>>) -> Result<Vec<VideoMetric>, Failure> {
    match names {
        None => Ok(VideoMetric::ALL.to_vec()),
        Some(list) => {
            let mut out: Vec<VideoMetric> = Vec::new();
            for n in list.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
                let m: VideoMetric = n
                    .parse()
                    .map_err(|e: MetricError| Failure::Config(e.to_string()))?;
                if !out.contains(&m) {
                    out.push(m);
                }
            }
            if out.is_empty() {
                return Err(Failure::Config("no metrics selected".into()));
            }
            Ok(out)
        }
    }
}

fn cmd_metrics(args: &MetricsArgs) -> Result<(), Failure> {
    let metrics = parse_metrics(&args.metrics)?;
    let g = &args.geometry;
    let mut reference =
        read_yuv_sequence(&args.reference, g.width, g.height, g.bit_depth).map_err(data)?;
    let mut distorted = read_yuv_sequence(
        &args.distorted,
        args.dist_width.unwrap_or(g.width),
        args.dist_height.unwrap_or(g.height),
        g.bit_depth,
    )
    .map_err(data)?;
    let mut ctx = match &args.points {
        Some(p) => MetricContext::with_points(load_sphere_points(p).map_err(data)?),
        None => MetricContext::default(),
    };
    let same = reference.width() == distorted.width() && reference.height() == distorted.height();
    let scores = if same || !args.resize_to_ref {
        let mut pair = SequencePair::new(&mut reference, &mut distorted).map_err(data)?;
        compute_metrics(&mut pair, &metrics, &mut ctx).map_err(data)?
    } else {
        let target = ErpGeometry::new(g.width, g.height).map_err(data)?;
        log::info!(
            "resizing distorted {}x{} to {}x{}",
            distorted.width(),
            distorted.height(),
            g.width,
            g.height
        );
        let mut resized = ResizedSource::new(&mut distorted, target);
        let mut pair = SequencePair::new(&mut reference, &mut resized).map_err(data)?;
        compute_metrics(&mut pair, &metrics, &mut ctx).map_err(data)?
    };
    write_report(&args.out, "metrics_frames.csv", |b| {
        render_metric_frames(&scores, b)
    })?;
    let pooled = write_report(&args.out, "metrics_pooled.csv", |b| {
        render_metric_pooled(&scores, b)
    })?;
    for s in &scores {
        println!("{}\t{}", s.metric_name, s.pooled);
    }
    log::info!("wrote {}", pooled.display());
    Ok(())
}

fn cmd_siti(args: &SitiArgs) -> Result<(), Failure> {
    let g = &args.geometry;
    let mut input = read_yuv_sequence(&args.input, g.width, g.height, g.bit_depth).map_err(data)?;
    let r = si_ti(&mut input).map_err(data)?;
    write_report(&args.out, "siti_frames.csv", |b| render_siti_frames(&r, b))?;
    write_report(&args.out, "siti_pooled.csv", |b| render_siti_pooled(&r, b))?;
    println!("si\t{}\nti\t{}\nti_defined\t{}", r.si, r.ti, r.ti_defined);
    Ok(())
}

fn cmd_grid(args: &GridArgs) -> Result<(), Failure> {
    let mut cfg = load_config(&args.config).map_err(PipelineError::from)?;
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    let table = sphereqa_core::media::load_feature_table(&cfg.feature_table).map_err(data)?;
    let workers = args.workers.or_else(workers_from_env);
    let run = run_grid(&cfg, &table, workers)?;
    let written = write_grid_outputs(&run, &cfg, &cfg.output_dir)?;
    for p in &written {
        log::info!("wrote {}", p.display());
    }
    println!(
        "{} of {} cells completed in {:.1}s; outputs in {}",
        run.result.cells.len(),
        run.result.axes.cell_count(),
        run.wall_seconds,
        cfg.output_dir.display()
    );
    if run.is_complete() {
        Ok(())
    } else {
        Err(Failure::Partial(format!(
            "{} cells failed; see {}",
            run.failures.len(),
            cfg.output_dir.join("failures.csv").display()
        )))
    }
}

fn cmd_synth(args: &SynthArgs) -> Result<(), Failure> {
    let out = synthesize(SynthSpec {
        contents: args.contents,
        conditions: args.conditions,
        noise: args.noise,
        seed: args.seed,
    })?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| data(format!("{}: {e}", dir.display())))?;
    }
    write_feature_table(&out.table, &args.out).map_err(data)?;
    let truth_path = args.truth.clone().unwrap_or_else(|| {
        let mut s = args.out.clone().into_os_string();
        s.push(".truth.txt");
        PathBuf::from(s)
    });
    fs::write(&truth_path, out.render_truth())
        .map_err(|e| data(format!("{}: {e}", truth_path.display())))?;
    println!(
        "wrote {} rows to {} (ground truth in {})",
        out.table.rows.len(),
        args.out.display(),
        truth_path.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Metrics(a) => cmd_metrics(a),
        Command::Siti(a) => cmd_siti(a),
        Command::Grid(a) => cmd_grid(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
