use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use roughness_kit::estimators::{rhat, rhat_star, rtilde};
use roughness_kit::faber_schauder::{analyze, takagi_antiderivative, takagi_landsberg};
use roughness_kit::generators::{antiderivative, apply_transform, fbm_sample, fou_euler, FbmSpec, FouSpec, Quadrature, TransformSpec};
use roughness_kit::harness::{run_experiment, summarize_to_csv, ExperimentSpec};
use roughness_kit::scale::{seq_scale_estimate, ScaleConfig};
use roughness_kit::theory::{alpha_beta_table, hurst_grid, write_alpha_beta_csv, GhTable};
use roughness_kit::{Result, RoughnessError, SampledPath};

#[derive(Parser)]
#[command(name = "roughness-kit", version, about = "Roughness exponent estimation from antiderivative samples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a Takagi–Landsberg function (or its antiderivative) on a dyadic grid.
    Synth {
        #[arg(long = "takagi", value_name = "R")]
        roughness: f64,
        #[arg(long)]
        level: u32,
        /// Number of generations in the series (defaults to `level`).
        #[arg(long)]
        depth: Option<u32>,
        /// Write the exact antiderivative instead of the function.
        #[arg(long)]
        antiderivative: bool,
        /// Also write Faber–Schauder coefficients as `m,k,theta` rows.
        #[arg(long, value_name = "PATH")]
        coeffs: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate the roughness exponent from a path CSV.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Method::Rhat)]
        method: Method,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x0_hat: f64,
        /// Window length of the sequential scale estimator.
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// Comma-separated window weights (defaults to all ones).
        #[arg(long, value_delimiter = ',')]
        alpha: Option<Vec<f64>>,
        /// Per-level series `k,rhat_k` (or the seq-scale report) goes here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate fBM or fOU, optionally transformed and integrated.
    Simulate {
        #[arg(long, value_enum, default_value_t = SimModel::Fbm)]
        model: SimModel,
        #[arg(long)]
        hurst: f64,
        #[arg(long)]
        level: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        rho: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x0: f64,
        /// identity, exp2, affine:A,B or power:P
        #[arg(long, default_value = "identity")]
        transform: TransformSpec,
        /// Output the antiderivative on this level instead of the path.
        #[arg(long, value_name = "LEVEL")]
        integrate_to: Option<u32>,
        #[arg(long, value_enum, default_value_t = QuadratureArg::RightRiemann)]
        quadrature: QuadratureArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate closed-form Gaussian constants.
    Theory {
        #[arg(long, value_enum, default_value_t = Table::AlphaBeta)]
        table: Table,
        /// `start:stop:step` for the alpha-beta table.
        #[arg(long, default_value = "0.01:0.99:0.01")]
        h_grid: String,
        /// Hurst parameter for the g-table.
        #[arg(long)]
        hurst: Option<f64>,
        #[arg(long, default_value_t = 16)]
        max_lag: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Monte Carlo experiment described by a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Rhat,
    RhatStar,
    Rtilde,
    SeqScale,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimModel {
    Fbm,
    Fou,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuadratureArg {
    RightRiemann,
    Trapezoid,
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    AlphaBeta,
    Gh,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| RoughnessError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn read_path(path: &Path) -> Result<SampledPath> {
    let file = File::open(path)
        .map_err(|e| RoughnessError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    SampledPath::read_csv(BufReader::new(file))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth {
            roughness,
            level,
            depth,
            antiderivative,
            coeffs,
            out,
        } => {
            let path = if antiderivative {
                takagi_antiderivative(roughness, level)?
            } else {
                takagi_landsberg(roughness, depth.unwrap_or(level), level)?
            };
            path.write_csv(create(&out)?)?;
            if let Some(c) = coeffs {
                let x = takagi_landsberg(roughness, depth.unwrap_or(level), level)?;
                analyze(&x)?.write_csv(create(&c)?)?;
            }
        }
        Command::Estimate {
            input,
            n,
            method,
            x0_hat,
            m,
            alpha,
            out,
        } => {
            let y = read_path(&input)?;
            match method {
                Method::SeqScale => {
                    let cfg = ScaleConfig::new(m, alpha.unwrap_or_else(|| vec![1.0; m + 1]))?;
                    let res = seq_scale_estimate(&y, n, &cfg)?;
                    println!("{}", res.r_s);
                    let mut w = csv::Writer::from_writer(output(out.as_deref())?);
                    w.write_record(["name", "k", "value"])?;
                    w.write_record(["lambda_s", "", &res.lambda_s.to_string()])?;
                    w.write_record(["r_s", "", &res.r_s.to_string()])?;
                    w.write_record(["c_s", "", &res.c_s.to_string()])?;
                    for ((k, b), r) in res.levels().zip(&res.beta).zip(&res.rhat_series) {
                        w.write_record(["beta", &k.to_string(), &b.to_string()])?;
                        w.write_record(["rhat", &k.to_string(), &r.to_string()])?;
                    }
                    w.flush()?;
                }
                _ => {
                    let value = match method {
                        Method::Rhat => rhat(&y, n)?,
                        Method::RhatStar => rhat_star(&y, n)?,
                        _ => rtilde(&y, n, x0_hat)?,
                    };
                    println!("{value}");
                    if let Some(path) = out {
                        let mut w = csv::Writer::from_writer(create(&path)?);
                        w.write_record(["k", "rhat_k"])?;
                        for k in 1..=y.level().saturating_sub(2) {
                            match rhat(&y, k) {
                                Ok(r) => w.write_record([k.to_string(), r.to_string()])?,
                                Err(e) if e.is_degenerate() => w.write_record([k.to_string(), "NaN".into()])?,
                                Err(e) => return Err(e),
                            }
                        }
                        w.flush()?;
                    }
                }
            }
        }
        Command::Simulate {
            model,
            hurst,
            level,
            seed,
            rho,
            mu,
            x0,
            transform,
            integrate_to,
            quadrature,
            out,
        } => {
            let raw = match model {
                SimModel::Fbm => fbm_sample(&FbmSpec::new(hurst, level, seed)?)?,
                SimModel::Fou => fou_euler(&FouSpec::new(hurst, x0, rho, mu, level, seed)?)?,
            };
            let x = apply_transform(&raw, &transform)?;
            let quadrature = match quadrature {
                QuadratureArg::RightRiemann => Quadrature::RightRiemann,
                QuadratureArg::Trapezoid => Quadrature::Trapezoid,
            };
            let path = match integrate_to {
                Some(l) => antiderivative(&x, l, quadrature)?,
                None => x,
            };
            path.write_csv(create(&out)?)?;
        }
        Command::Theory {
            table,
            h_grid,
            hurst,
            max_lag,
            out,
        } => match table {
            Table::AlphaBeta => {
                let parts: Vec<f64> = h_grid
                    .split(':')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| RoughnessError::InvalidParameter(format!("bad --h-grid {h_grid:?}")))?;
                let grid = match parts.as_slice() {
                    [a, b, step] => hurst_grid(*a, *b, *step)?,
                    _ => return Err(RoughnessError::InvalidParameter("--h-grid takes start:stop:step".into())),
                };
                write_alpha_beta_csv(&alpha_beta_table(&grid)?, output(out.as_deref())?)?;
            }
            Table::Gh => {
                let h = hurst.ok_or_else(|| RoughnessError::InvalidParameter("--table gh needs --hurst".into()))?;
                let t = GhTable::new(h, max_lag)?;
                let mut w = csv::Writer::from_writer(output(out.as_deref())?);
                w.write_record(["lag", "h1", "h2", "h3", "g"])?;
                for (lag, (c, g)) in t.components.iter().zip(&t.values).enumerate() {
                    w.write_record([lag as f64, c.h1, c.h2, c.h3, *g].map(|v| v.to_string()))?;
                }
                w.flush()?;
            }
        },
        Command::Experiment { config, out, workers } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| RoughnessError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", config.display()))))?;
            let spec = ExperimentSpec::from_json(&text)?;
            let result = run_experiment(&spec, workers)?;
            summarize_to_csv(&result, &out)?;
            for row in &result.rows {
                eprintln!(
                    "{:<10} n={:<3} median={:.4} iqr=[{:.4}, {:.4}] degenerate={}",
                    row.estimator, row.n, row.stats.median, row.stats.q1, row.stats.q3, row.stats.degenerate
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
