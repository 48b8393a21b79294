use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use lcmetrics::bounds::CheckOptions;
use lcmetrics::harness::config::DistSpec;
use lcmetrics::harness::{config::ExperimentConfig, plot, report, sweep, verify};
use lcmetrics::{metrics, LogConcaveDensity};

/// Probability metrics and comparison-inequality checks for isotropic
/// log-concave distributions.
#[derive(Parser)]
#[command(name = "lcmetrics", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct NumericOpts {
    /// RNG seed for Monte-Carlo estimates.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Monte-Carlo sample count.
    #[arg(long, default_value_t = 200_000)]
    mc_samples: usize,
    /// Grid size for the bounded-Lipschitz LP.
    #[arg(long, default_value_t = 4096)]
    grid_size: usize,
    /// Slack tolerance for bound checks.
    #[arg(long, default_value_t = 1e-7)]
    tolerance: f64,
}

impl NumericOpts {
    fn check_options(&self) -> CheckOptions {
        CheckOptions {
            grid_size: self.grid_size,
            mc_samples: self.mc_samples,
            seed: self.seed,
            tolerance: self.tolerance,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute one metric for one pair of distributions.
    Compute {
        /// Metric id: tv, kolmogorov, bl, w1, w2, w4, kl, entropy.
        #[arg(long)]
        metric: String,
        /// First distribution as a JSON spec, e.g. '{"family":"uniform","n":1}'.
        #[arg(long)]
        mu: String,
        /// Second distribution as a JSON spec (unused for entropy).
        #[arg(long)]
        nu: Option<String>,
        #[command(flatten)]
        numeric: NumericOpts,
    },
    /// Run a sweep described by a JSON config file.
    Sweep {
        /// Path to the experiment config.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config's out_dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed override.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        mc_samples: Option<usize>,
        #[arg(long)]
        grid_size: Option<usize>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Regenerate the fit report from a saved records.json.
    Fit {
        /// Path to records.json produced by `sweep`.
        #[arg(long)]
        records: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Emit the comparison-envelope figure as a self-contained SVG.
    PlotEnvelope {
        /// Output path for the SVG.
        #[arg(long, default_value = "envelope.svg")]
        out: PathBuf,
        /// Optional records.json whose (d_BL, W_1) pairs are overlaid.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Run the full acceptance suite and print one line per criterion.
    Verify,
}

fn parse_dist(json: &str) -> anyhow::Result<LogConcaveDensity> {
    let spec: DistSpec = serde_json::from_str(json)
        .with_context(|| format!("invalid distribution spec: {json}"))?;
    let mut instances = spec.instantiate()?;
    if instances.len() != 1 {
        bail!("a compute spec must describe exactly one distribution (got {})", instances.len());
    }
    Ok(instances.pop().unwrap().1)
}

fn run_compute(
    metric: &str,
    mu: &str,
    nu: Option<&str>,
    numeric: &NumericOpts,
) -> anyhow::Result<()> {
    let mu = parse_dist(mu)?;
    let opts = numeric.check_options();
    let need_nu = metric != "entropy";
    let nu = match nu {
        Some(s) => Some(parse_dist(s)?),
        None if need_nu => bail!("metric {metric} needs --nu"),
        None => None,
    };
    let result = match metric {
        "entropy" => metrics::differential_entropy(&mu)?,
        "tv" => lcmetrics::bounds::tv_any(&mu, nu.as_ref().unwrap(), &opts)?,
        "kolmogorov" => metrics::kolmogorov_distance_1d(&mu, nu.as_ref().unwrap())?,
        "bl" => lcmetrics::bounds::bl_any(&mu, nu.as_ref().unwrap(), &opts)?.0,
        "w1" => lcmetrics::bounds::wp_any(&mu, nu.as_ref().unwrap(), 1.0, &opts)?,
        "w2" => lcmetrics::bounds::wp_any(&mu, nu.as_ref().unwrap(), 2.0, &opts)?,
        "w4" => lcmetrics::bounds::wp_any(&mu, nu.as_ref().unwrap(), 4.0, &opts)?,
        "kl" => metrics::relative_entropy_nd(&mu, nu.as_ref().unwrap())?,
        other => bail!("unknown metric: {other}"),
    };
    println!(
        "{} = {:.12e} (abs_error {:.3e}, {})",
        metric,
        result.value,
        result.abs_error,
        result.detail
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            // configuration and usage problems exit 2; everything else is
            // an internal failure
            if e.downcast_ref::<lcmetrics::Error>()
                .map(|le| matches!(le, lcmetrics::Error::InvalidConfig(_) | lcmetrics::Error::InvalidParameter(_)))
                .unwrap_or(false)
                || e.is::<serde_json::Error>()
            {
                ExitCode::from(2)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Compute {
            metric,
            mu,
            nu,
            numeric,
        } => {
            run_compute(&metric, &mu, nu.as_deref(), &numeric)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            config,
            out,
            seed,
            mc_samples,
            grid_size,
            tolerance,
        } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("cannot read config {}", config.display()))?;
            let mut cfg = ExperimentConfig::from_json(&text)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(m) = mc_samples {
                cfg.mc_samples = m;
            }
            if let Some(g) = grid_size {
                cfg.grid_size = g;
            }
            if let Some(t) = tolerance {
                cfg.tolerance = t;
            }
            let out_dir = out
                .or_else(|| cfg.out_dir.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("out"));
            let output = sweep::run_sweep(&cfg)?;
            report::write_outputs(&output, &out_dir)?;
            print!("{}", report::summary_text(&output));
            println!("outputs written to {}", out_dir.display());
            if output.any_failure() {
                Ok(ExitCode::from(1))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::Fit { records, out } => {
            let text = std::fs::read_to_string(&records)
                .with_context(|| format!("cannot read {}", records.display()))?;
            let output: sweep::SweepOutput = serde_json::from_str(&text)?;
            std::fs::create_dir_all(&out)?;
            std::fs::write(out.join("fit_report.csv"), report::fit_report_csv(&output)?)?;
            std::fs::write(out.join("summary.txt"), report::summary_text(&output))?;
            print!("{}", report::summary_text(&output));
            Ok(ExitCode::SUCCESS)
        }
        Command::PlotEnvelope { out, records } => {
            let scatter = match records {
                None => Vec::new(),
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("cannot read {}", path.display()))?;
                    let output: sweep::SweepOutput = serde_json::from_str(&text)?;
                    envelope_scatter(&output)
                }
            };
            plot::write_envelope_svg(&out, &scatter)?;
            println!("envelope written to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify => {
            let outcomes = verify::run_all();
            for o in &outcomes {
                println!("{}", o.line());
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            if failed == 0 {
                println!("all {} criteria passed", outcomes.len());
                Ok(ExitCode::SUCCESS)
            } else {
                println!("{failed} of {} criteria failed", outcomes.len());
                Ok(ExitCode::from(1))
            }
        }
    }
}

/// (d_BL, W_1) pairs from saved records, rescaled to the envelope's unit
/// coordinates: x = d_BL / sqrt(n), y = W_1 / (C sqrt(n)) with C fitted as
/// the max ratio so every point lies under the curve.
fn envelope_scatter(output: &sweep::SweepOutput) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for r in &output.records {
        let bl = r.metrics.get("bl").and_then(|m| m.as_ref());
        let w1 = r.metrics.get("w1").and_then(|m| m.as_ref());
        if let (Some(bl), Some(w1)) = (bl, w1) {
            if bl.value > 1e-9 {
                let sqrt_n = (r.n as f64).sqrt();
                pts.push((bl.value / sqrt_n, w1.value / sqrt_n));
            }
        }
    }
    let c = pts
        .iter()
        .map(|(x, y)| y / plot::envelope_f(*x))
        .fold(f64::NEG_INFINITY, f64::max);
    if c.is_finite() && c > 0.0 {
        for p in &mut pts {
            p.1 /= c;
        }
    }
    pts
}
