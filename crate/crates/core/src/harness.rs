//! Monte Carlo experiments: simulate many paths, integrate, estimate the
//! roughness at several levels and summarize the estimates per
//! `(estimator, n)`.
//!
//! Path `p` always uses `path_rng(base_seed, p)`, and results are gathered in
//! path order, so the output does not depend on the number of workers.
//! Quantiles are type 7 (linear interpolation between order statistics).

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, RoughnessError};
use crate::estimators::{rhat, rhat_star, rtilde};
use crate::faber_schauder::{takagi_antiderivative, takagi_landsberg};
use crate::generators::{
    antiderivative, apply_transform, fou_from_fbm, path_rng, FbmGenerator, Quadrature, TransformSpec,
    DEFAULT_MAX_FBM_LEVEL,
};
use crate::grid::SampledPath;
use crate::scale::{seq_scale_from_series, ScaleConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Fbm,
    Fou,
    Takagi,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Fbm => "fbm",
            Model::Fou => "fou",
            Model::Takagi => "takagi",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Model {
    type Err = RoughnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fbm" => Ok(Model::Fbm),
            "fou" => Ok(Model::Fou),
            "takagi" => Ok(Model::Takagi),
            _ => Err(invalid(format!("unknown model {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    Rhat,
    RhatStar,
    SeqScale,
    Rtilde,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 4] = [
        EstimatorKind::Rhat,
        EstimatorKind::RhatStar,
        EstimatorKind::SeqScale,
        EstimatorKind::Rtilde,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorKind::Rhat => "rhat",
            EstimatorKind::RhatStar => "rhat-star",
            EstimatorKind::SeqScale => "seq-scale",
            EstimatorKind::Rtilde => "rtilde",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for EstimatorKind {
    type Err = RoughnessError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown estimator {s:?}")))
    }
}

fn default_fine_offset() -> u32 {
    4
}

fn default_paths() -> u64 {
    200
}

fn default_estimators() -> Vec<EstimatorKind> {
    vec![EstimatorKind::Rhat, EstimatorKind::SeqScale]
}

/// Experiment configuration; the JSON form mirrors the fields one to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub model: Model,
    /// Hurst parameter for `fbm`/`fou`, roughness exponent for `takagi`.
    #[serde(alias = "R")]
    pub hurst: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub rho: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default)]
    pub transform: TransformSpec,
    pub n_values: Vec<u32>,
    /// The simulated path lives on level `max(n) + 2 + fine_offset`.
    #[serde(default = "default_fine_offset")]
    pub fine_offset: u32,
    #[serde(default = "default_paths")]
    pub paths: u64,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<EstimatorKind>,
    #[serde(default)]
    pub scale_cfg: ScaleConfig,
    /// Initial slope guess for `rtilde`.
    #[serde(default)]
    pub x0_hat: f64,
    #[serde(default)]
    pub quadrature: Quadrature,
}

impl ExperimentSpec {
    /// Defaults for everything except model, parameter and levels.
    pub fn new(model: Model, hurst: f64, n_values: Vec<u32>) -> Self {
        Self {
            model,
            hurst,
            x0: 0.0,
            rho: 0.0,
            mu: 0.0,
            transform: TransformSpec::Identity,
            n_values,
            fine_offset: default_fine_offset(),
            paths: default_paths(),
            base_seed: 0,
            estimators: default_estimators(),
            scale_cfg: ScaleConfig::default(),
            x0_hat: 0.0,
            quadrature: Quadrature::RightRiemann,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn max_n(&self) -> u32 {
        self.n_values.iter().copied().max().unwrap_or(0)
    }

    /// Level of the antiderivative handed to the estimators.
    pub fn observation_level(&self) -> u32 {
        self.max_n() + 2
    }

    /// Level of the simulated path.
    pub fn fine_level(&self) -> u32 {
        self.observation_level() + self.fine_offset
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(invalid("paths must be at least 1"));
        }
        if self.n_values.is_empty() {
            return Err(invalid("n_values must not be empty"));
        }
        if self.n_values.contains(&0) {
            return Err(invalid("estimator levels start at n = 1"));
        }
        if !(self.hurst > 0.0 && self.hurst < 1.0) && !(self.model == Model::Takagi && self.hurst == 1.0) {
            return Err(invalid(format!("parameter {} outside (0, 1)", self.hurst)));
        }
        self.transform.validate()?;
        match self.model {
            Model::Takagi if self.transform != TransformSpec::Identity => {
                return Err(invalid("the takagi model has an exact antiderivative only without a transform"));
            }
            Model::Fbm | Model::Fou if self.fine_level() > DEFAULT_MAX_FBM_LEVEL => {
                return Err(invalid(format!(
                    "fine level {} exceeds the generator limit {DEFAULT_MAX_FBM_LEVEL}",
                    self.fine_level()
                )));
            }
            _ => {}
        }
        if self.estimators.contains(&EstimatorKind::SeqScale) {
            let min = self.scale_cfg.min_level();
            if let Some(n) = self.n_values.iter().find(|&&n| n < min) {
                return Err(invalid(format!("seq-scale with m = {} needs n >= {min}, got {n}", self.scale_cfg.window())));
            }
        }
        Ok(())
    }
}

/// Statistics of the non-degenerate estimates for one `(estimator, n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SummaryStats {
    pub count: usize,
    pub degenerate: usize,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator; 0 for one value).
    pub std: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl SummaryStats {
    /// Statistics of `values`; `degenerate` is only recorded.
    pub fn from_values(values: &[f64], degenerate: usize) -> Self {
        let count = values.len();
        if count == 0 {
            return Self {
                count,
                degenerate,
                mean: f64::NAN,
                std: f64::NAN,
                min: f64::NAN,
                q1: f64::NAN,
                median: f64::NAN,
                q3: f64::NAN,
                max: f64::NAN,
            };
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mean = values.iter().sum::<f64>() / count as f64;
        let std = if count > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self {
            count,
            degenerate,
            mean,
            std,
            min: sorted[0],
            q1: quantile_type7(&sorted, 0.25),
            median: quantile_type7(&sorted, 0.5),
            q3: quantile_type7(&sorted, 0.75),
            max: sorted[count - 1],
        }
    }
}

/// Type-7 quantile of already sorted data: `x[⌊h⌋] + (h - ⌊h⌋)(x[⌊h⌋+1] - x[⌊h⌋])`,
/// `h = (len - 1) p`.
pub fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// One output row.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub model: Model,
    pub estimator: EstimatorKind,
    pub n: u32,
    pub stats: SummaryStats,
    /// Non-degenerate estimates in path order; empty when read back from CSV.
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub rows: Vec<SummaryRow>,
}

impl ExperimentResult {
    pub fn row(&self, estimator: EstimatorKind, n: u32) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.estimator == estimator && r.n == n)
    }
}

/// Column names of the summary CSV.
pub const SUMMARY_COLUMNS: [&str; 12] = [
    "model", "estimator", "n", "count", "degenerate", "mean", "std", "min", "q1", "median", "q3", "max",
];

enum PathSource {
    Gaussian(FbmGenerator),
    Takagi { x: SampledPath, y: SampledPath },
}

/// `(x, y)` for path `index`: the transformed fine path and its antiderivative
/// on the observation level.
fn simulate(spec: &ExperimentSpec, source: &PathSource, index: u64) -> Result<(SampledPath, SampledPath)> {
    match source {
        PathSource::Takagi { x, y } => Ok((x.clone(), y.clone())),
        PathSource::Gaussian(generator) => {
            let w = generator.sample(&mut path_rng(spec.base_seed, index));
            let raw = match spec.model {
                Model::Fou => fou_from_fbm(&w, spec.x0, spec.rho, spec.mu)?,
                _ => w,
            };
            let x = apply_transform(&raw, &spec.transform)?;
            let y = antiderivative(&x, spec.observation_level(), spec.quadrature)?;
            Ok((x, y))
        }
    }
}

type Estimate = Option<f64>;

/// Estimates for one path, in the order of `slots`; `None` marks a degenerate one.
fn estimate_path(
    spec: &ExperimentSpec,
    slots: &[(EstimatorKind, u32)],
    x: &SampledPath,
    y: &SampledPath,
) -> Result<Vec<Estimate>> {
    let keep = |r: Result<f64>| -> Result<Estimate> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(e) if e.is_degenerate() => Ok(None),
            Err(e) => Err(e),
        }
    };
    let mut rhat_cache: BTreeMap<u32, Estimate> = BTreeMap::new();
    let mut cached_rhat = |k: u32| -> Result<Estimate> {
        if let Some(v) = rhat_cache.get(&k) {
            return Ok(*v);
        }
        let v = keep(rhat(y, k))?;
        rhat_cache.insert(k, v);
        Ok(v)
    };
    slots
        .iter()
        .map(|&(kind, n)| match kind {
            EstimatorKind::Rhat => cached_rhat(n),
            EstimatorKind::RhatStar => keep(rhat_star(x, n)),
            EstimatorKind::Rtilde => keep(rtilde(y, n, spec.x0_hat)),
            EstimatorKind::SeqScale => {
                let window = (spec.scale_cfg.first_level(n)..=n)
                    .map(&mut cached_rhat)
                    .collect::<Result<Option<Vec<f64>>>>()?;
                match window {
                    Some(w) => keep(seq_scale_from_series(&w, n, &spec.scale_cfg).map(|r| r.r_s)),
                    None => Ok(None),
                }
            }
        })
        .collect()
}

/// Runs the experiment on `workers` threads (0 means rayon's default).
pub fn run_experiment(spec: &ExperimentSpec, workers: usize) -> Result<ExperimentResult> {
    spec.validate()?;
    let source = match spec.model {
        Model::Takagi => PathSource::Takagi {
            x: takagi_landsberg(spec.hurst, spec.fine_level(), spec.fine_level())?,
            y: takagi_antiderivative(spec.hurst, spec.observation_level())?,
        },
        Model::Fbm | Model::Fou => PathSource::Gaussian(FbmGenerator::new(spec.hurst, spec.fine_level())?),
    };
    let mut n_values = spec.n_values.clone();
    n_values.sort_unstable();
    n_values.dedup();
    let slots: Vec<(EstimatorKind, u32)> = spec
        .estimators
        .iter()
        .flat_map(|&e| n_values.iter().map(move |&n| (e, n)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    let per_path: Vec<Vec<Estimate>> = pool.install(|| {
        (0..spec.paths)
            .into_par_iter()
            .map(|p| {
                let (x, y) = simulate(spec, &source, p)
                    .map_err(|e| invalid(format!("path {p}: {e}")))?;
                let estimates = estimate_path(spec, &slots, &x, &y)?;
                for ((kind, n), e) in slots.iter().zip(&estimates) {
                    if e.is_none() {
                        log::warn!("path {p}: degenerate {kind} estimate at n = {n}");
                    }
                }
                Ok(estimates)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let rows = slots
        .iter()
        .enumerate()
        .map(|(i, &(estimator, n))| {
            let values: Vec<f64> = per_path.iter().filter_map(|e| e[i]).collect();
            let degenerate = per_path.len() - values.len();
            SummaryRow {
                model: spec.model,
                estimator,
                n,
                stats: SummaryStats::from_values(&values, degenerate),
                values,
            }
        })
        .collect();
    Ok(ExperimentResult {
        spec: spec.clone(),
        rows,
    })
}

/// Writes the 12-column summary with a header row.
pub fn write_summary<W: Write>(result: &ExperimentResult, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SUMMARY_COLUMNS)?;
    for row in &result.rows {
        let s = &row.stats;
        let mut record = vec![
            row.model.to_string(),
            row.estimator.to_string(),
            row.n.to_string(),
            s.count.to_string(),
            s.degenerate.to_string(),
        ];
        record.extend([s.mean, s.std, s.min, s.q1, s.median, s.q3, s.max].map(|v| v.to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// [`write_summary`] to a file; I/O errors name the file.
pub fn summarize_to_csv(result: &ExperimentResult, path: &Path) -> Result<()> {
    let with_path = |e: std::io::Error| std::io::Error::new(e.kind(), format!("{}: {e}", path.display()));
    let file = std::fs::File::create(path).map_err(with_path)?;
    write_summary(result, std::io::BufWriter::new(file))
}

/// Parses a summary written by [`write_summary`].
pub fn read_summary<R: Read>(reader: R) -> Result<Vec<SummaryRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().ne(SUMMARY_COLUMNS) {
        return Err(RoughnessError::Format(format!("unexpected summary header {header:?}")));
    }
    let bad = |what: &str, v: &str| RoughnessError::Format(format!("bad {what} {v:?}"));
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            let f = |i: usize| rec[i].parse::<f64>().map_err(|_| bad(SUMMARY_COLUMNS[i], &rec[i]));
            let u = |i: usize| rec[i].parse::<usize>().map_err(|_| bad(SUMMARY_COLUMNS[i], &rec[i]));
            Ok(SummaryRow {
                model: rec[0].parse()?,
                estimator: rec[1].parse()?,
                n: rec[2].parse().map_err(|_| bad("n", &rec[2]))?,
                stats: SummaryStats {
                    count: u(3)?,
                    degenerate: u(4)?,
                    mean: f(5)?,
                    std: f(6)?,
                    min: f(7)?,
                    q1: f(8)?,
                    median: f(9)?,
                    q3: f(10)?,
                    max: f(11)?,
                },
                values: Vec::new(),
            })
        })
        .collect()
}
