//! `blochmap` — seeded, reproducible simulation runs for chaotic qubit-pair
//! discrimination: correlation decay curves, K₃ series and their differences,
//! resolution heat maps, success-probability accounting, Julia-set rasters
//! and box dimensions, and the machine-precision probe.
//!
//! Every run writes a single output file whose header embeds the full
//! effective configuration; re-running with the same configuration reproduces
//! the file byte for byte.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::{ConfigOverlay, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "blochmap", version, about, max_term_width = 100)]
struct Cli {
    /// JSON config file; command-line flags override its fields
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output path (default: <command>.<format>; julia writes a PGM)
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format for data files
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,

    /// Working precision: f64 or dd (double-double, ~32 digits)
    #[arg(long, global = true, value_parser = ["f64", "dd"])]
    precision: Option<String>,

    /// Seed for every random choice in the run
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Cap the worker-thread count (0 = all cores); results are identical
    /// for any value
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct EnsembleArgs {
    /// Map parameter s (examples: 0, i, 0.5i, 0.1+0.3i)
    #[arg(long)]
    s: Option<String>,

    /// Geodesic separation of each state pair
    #[arg(long)]
    delta: Option<f64>,

    /// Ensemble size L
    #[arg(long)]
    ensemble: Option<usize>,

    /// Base-point layout: grid (equal-step lattice) or uniform (area-uniform
    /// random)
    #[arg(long, value_parser = ["grid", "uniform"])]
    sampling: Option<String>,

    /// Iterations to run
    #[arg(long)]
    n_max: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct AxisArgs {
    /// Measurement-axis colatitude θ_m (default π/2, the σ_x device)
    #[arg(long)]
    axis_theta: Option<f64>,

    /// Measurement-axis azimuth φ_m (default 0)
    #[arg(long)]
    axis_phi: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pearson correlation between partner K₃ ensembles vs iteration
    Rxy {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        axis: AxisArgs,
        /// Saturation band |r| < epsilon
        #[arg(long)]
        epsilon: Option<f64>,
        /// Consecutive iterations required inside the band
        #[arg(long)]
        window: Option<usize>,
    },

    /// Mean and standard deviation of pair fidelity vs iteration
    FidelityAvg {
        #[command(flatten)]
        ensemble: EnsembleArgs,
    },

    /// Average fidelity decay of equator-straddling pairs under s = 0
    FidelityFatou {
        /// Geodesic separation of each straddling pair
        #[arg(long)]
        delta: Option<f64>,
        /// Number of pairs
        #[arg(long)]
        ensemble: Option<usize>,
        /// Iterations to run
        #[arg(long)]
        n_max: Option<usize>,
    },

    /// r_XY and success-probability budget for a polar-patch ensemble
    PatchOptimize {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        axis: AxisArgs,
        /// Patch boundary colatitude (default π/10)
        #[arg(long)]
        theta_max: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        window: Option<usize>,
    },

    /// Ideal vs misaligned-device K₃ series with violation flags
    K3Faulty {
        /// Map parameter s
        #[arg(long)]
        s: Option<String>,
        /// Device colatitude error dθ
        #[arg(long)]
        d_theta: Option<f64>,
        /// Device azimuth error dφ (default 1e-8)
        #[arg(long)]
        d_phi: Option<f64>,
        /// Number of seeded random initial states
        #[arg(long)]
        samples: Option<usize>,
        /// Iterations to run
        #[arg(long)]
        n_max: Option<usize>,
    },

    /// K₃ difference of one pair vs iteration
    K3Diff {
        #[command(flatten)]
        axis: AxisArgs,
        /// Map parameter s
        #[arg(long)]
        s: Option<String>,
        /// Pair separation
        #[arg(long)]
        delta: Option<f64>,
        /// Anchor colatitude (seeded random point when omitted)
        #[arg(long)]
        theta: Option<f64>,
        /// Anchor azimuth
        #[arg(long)]
        phi: Option<f64>,
        /// Iterations to run
        #[arg(long)]
        n_max: Option<usize>,
        /// |ΔK₃| level that counts as detection
        #[arg(long)]
        threshold: Option<f64>,
    },

    /// First-detection iteration for pairs anchored across the southern
    /// hemisphere chart
    Heatmap {
        #[command(flatten)]
        axis: AxisArgs,
        /// Map parameter s
        #[arg(long)]
        s: Option<String>,
        /// Pair separation
        #[arg(long)]
        delta: Option<f64>,
        /// Cells per axis over the unit disk
        #[arg(long)]
        resolution: Option<usize>,
        /// Iterations to run per cell
        #[arg(long)]
        n_max: Option<usize>,
        /// |ΔK₃| level that counts as detection (default 0.05)
        #[arg(long)]
        threshold: Option<f64>,
    },

    /// Colatitude-gap histograms under s = 0
    HistogramFatou {
        /// random: independent uniform pairs; delta: straddling pairs at
        /// --delta
        #[arg(long, value_parser = ["random", "delta"])]
        pair_mode: Option<String>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        ensemble: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        /// Histogram bins over |θ₁−θ₂|/π ∈ [0, 1]
        #[arg(long)]
        bins: Option<usize>,
        /// Iterations at which to record a histogram
        #[arg(long, value_delimiter = ',')]
        histogram_at: Option<Vec<usize>>,
    },

    /// Critical iteration to macroscopic separation vs stipulated precision
    PrecisionProbe {
        /// Smallest separation exponent (δ = 10^-digits)
        #[arg(long)]
        digits_min: Option<u32>,
        /// Largest separation exponent
        #[arg(long)]
        digits_max: Option<u32>,
        /// Iteration cap per probe
        #[arg(long)]
        n_max: Option<usize>,
    },

    /// Julia-set raster (binary PGM, sensitive pixels black)
    Julia {
        #[command(flatten)]
        fractal: FractalArgs,
    },

    /// Box-counting dimension of the Julia-set raster
    Boxdim {
        #[command(flatten)]
        fractal: FractalArgs,
    },

    /// Circuit-vs-map equivalence sweep and resource accounting
    CircuitVerify {
        /// Map parameter s
        #[arg(long)]
        s: Option<String>,
        /// Random states to verify
        #[arg(long)]
        samples: Option<usize>,
        /// Length of the success-probability chain
        #[arg(long)]
        n_max: Option<usize>,
    },

    /// Single-step success probability over colatitude
    SuccessProb {
        /// Map parameter s (imaginary axis)
        #[arg(long)]
        s: Option<String>,
        /// Sample points over θ ∈ [0, π]
        #[arg(long)]
        points: Option<usize>,
    },
}

#[derive(Args, Debug, Default)]
struct FractalArgs {
    /// Map parameter s
    #[arg(long)]
    s: Option<String>,

    /// Pixels per axis
    #[arg(long)]
    resolution: Option<usize>,

    /// Iterations per pixel
    #[arg(long)]
    horizon: Option<usize>,

    /// Chordal separation that flags a sensitive pixel (default 0.5)
    #[arg(long)]
    threshold: Option<f64>,

    /// Window half-width: raster covers [-w, w]²
    #[arg(long)]
    half_width: Option<f64>,

    /// Absolute partner offset (default: half the pixel diagonal)
    #[arg(long)]
    perturb: Option<f64>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Rxy { .. } => "rxy",
            Command::FidelityAvg { .. } => "fidelity-avg",
            Command::FidelityFatou { .. } => "fidelity-fatou",
            Command::PatchOptimize { .. } => "patch-optimize",
            Command::K3Faulty { .. } => "k3-faulty",
            Command::K3Diff { .. } => "k3-diff",
            Command::Heatmap { .. } => "heatmap",
            Command::HistogramFatou { .. } => "histogram-fatou",
            Command::PrecisionProbe { .. } => "precision-probe",
            Command::Julia { .. } => "julia",
            Command::Boxdim { .. } => "boxdim",
            Command::CircuitVerify { .. } => "circuit-verify",
            Command::SuccessProb { .. } => "success-prob",
        }
    }

    fn overlay(&self) -> ConfigOverlay {
        let mut o = ConfigOverlay::default();
        match self {
            Command::Rxy { ensemble, axis, epsilon, window } => {
                apply_ensemble(&mut o, ensemble);
                apply_axis(&mut o, axis);
                o.epsilon = *epsilon;
                o.window = *window;
            }
            Command::FidelityAvg { ensemble } => apply_ensemble(&mut o, ensemble),
            Command::FidelityFatou { delta, ensemble, n_max } => {
                o.s = Some("0".to_string());
                o.delta = *delta;
                o.ensemble = *ensemble;
                o.n_max = *n_max;
            }
            Command::PatchOptimize { ensemble, axis, theta_max, epsilon, window } => {
                apply_ensemble(&mut o, ensemble);
                apply_axis(&mut o, axis);
                o.theta_max = *theta_max;
                o.epsilon = *epsilon;
                o.window = *window;
                if o.delta.is_none() {
                    o.delta = Some(1e-8);
                }
                if o.sampling.is_none() {
                    o.sampling = Some("uniform".to_string());
                }
            }
            Command::K3Faulty { s, d_theta, d_phi, samples, n_max } => {
                o.s = s.clone();
                o.d_theta = *d_theta;
                o.d_phi = *d_phi;
                o.samples = *samples;
                o.n_max = *n_max;
            }
            Command::K3Diff { axis, s, delta, theta, phi, n_max, threshold } => {
                apply_axis(&mut o, axis);
                o.s = s.clone();
                o.delta = *delta;
                o.theta = *theta;
                o.phi = *phi;
                o.n_max = *n_max;
                o.threshold = *threshold;
            }
            Command::Heatmap { axis, s, delta, resolution, n_max, threshold } => {
                apply_axis(&mut o, axis);
                o.s = s.clone();
                o.delta = *delta;
                o.resolution = *resolution;
                o.n_max = *n_max;
                o.threshold = *threshold;
            }
            Command::HistogramFatou { pair_mode, delta, ensemble, n_max, bins, histogram_at } => {
                o.s = Some("0".to_string());
                o.pair_mode = pair_mode.clone();
                o.delta = *delta;
                o.ensemble = *ensemble;
                o.n_max = *n_max;
                o.bins = *bins;
                o.histogram_at = histogram_at.clone();
            }
            Command::PrecisionProbe { digits_min, digits_max, n_max } => {
                o.s = Some("0".to_string());
                o.digits_min = *digits_min;
                o.digits_max = *digits_max;
                o.n_max = *n_max;
                if o.n_max.is_none() {
                    o.n_max = Some(400);
                }
            }
            Command::Julia { fractal } | Command::Boxdim { fractal } => {
                o.s = fractal.s.clone();
                o.resolution = fractal.resolution;
                o.horizon = fractal.horizon;
                o.threshold = fractal.threshold;
                o.half_width = fractal.half_width;
                o.perturb = fractal.perturb;
            }
            Command::CircuitVerify { s, samples, n_max } => {
                o.s = s.clone();
                o.samples = *samples;
                o.n_max = *n_max;
            }
            Command::SuccessProb { s, points } => {
                o.s = s.clone();
                o.points = *points;
            }
        }
        o
    }
}

fn apply_ensemble(o: &mut ConfigOverlay, a: &EnsembleArgs) {
    o.s = a.s.clone();
    o.delta = a.delta;
    o.ensemble = a.ensemble;
    o.sampling = a.sampling.clone();
    o.n_max = a.n_max;
}

fn apply_axis(o: &mut ConfigOverlay, a: &AxisArgs) {
    o.axis_theta_m = a.axis_theta;
    o.axis_phi_m = a.axis_phi;
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    let mut overlay = cli.command.overlay();
    overlay.precision = cli.precision.or(overlay.precision);
    overlay.seed = cli.seed.or(overlay.seed);
    overlay.format = cli.format.or(overlay.format);
    overlay.threads = cli.threads.or(overlay.threads);
    if let Some(path) = &cli.config {
        let file_overlay = ConfigOverlay::from_json_file(path)?;
        overlay = overlay.merged_over(file_overlay);
    }
    let cfg = RunConfig::resolve(cli.command.name(), overlay)?;

    if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global()
            .ok(); // a second invocation in-process keeps the first pool
    }

    let out = cli
        .out
        .unwrap_or_else(|| PathBuf::from(cfg.default_output_name()));
    match cfg.precision.as_str() {
        "f64" => commands::run::<f64>(&cfg, &out),
        _ => commands::run::<blochmap::dd::Dd>(&cfg, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
