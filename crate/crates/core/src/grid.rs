//! Dyadic-grid path containers.
//!
//! A [`SampledPath`] of level `N` stores `f(j 2^-N)` for `j = 0..=2^N`. Times
//! are never stored; they are derived from the index so that restricting to a
//! coarser grid is plain subsampling.

use std::io::{Read, Write};

use crate::error::{level_error, invalid, Result, RoughnessError};

/// Values of a function on the dyadic grid `T_N = {j 2^-N : j = 0..=2^N}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledPath {
    level: u32,
    values: Vec<f64>,
    label: Option<String>,
}

/// Largest grid level accepted anywhere in the crate (keeps `1 << level` in range).
pub const MAX_GRID_LEVEL: u32 = 40;

/// Number of grid points on `T_level`.
pub fn grid_len(level: u32) -> usize {
    (1usize << level) + 1
}

/// Inverse of [`grid_len`]: the level `N` with `len == 2^N + 1`, if any.
pub fn level_for_len(len: usize) -> Option<u32> {
    if len < 2 {
        return None;
    }
    let cells = len - 1;
    cells.is_power_of_two().then(|| cells.trailing_zeros())
}

impl SampledPath {
    pub fn new(level: u32, values: Vec<f64>) -> Result<Self> {
        if level > MAX_GRID_LEVEL {
            return Err(level_error(level as i64, format!("exceeds {MAX_GRID_LEVEL}")));
        }
        if values.len() != grid_len(level) {
            return Err(RoughnessError::InvalidLength(values.len()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(RoughnessError::NonFinite(i));
        }
        Ok(Self {
            level,
            values,
            label: None,
        })
    }

    /// Infers the level from the number of samples.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let level = level_for_len(values.len()).ok_or(RoughnessError::InvalidLength(values.len()))?;
        Self::new(level, values)
    }

    /// Samples `f` on `T_level`.
    pub fn from_fn(level: u32, f: impl Fn(f64) -> f64) -> Result<Self> {
        if level > MAX_GRID_LEVEL {
            return Err(level_error(level as i64, format!("exceeds {MAX_GRID_LEVEL}")));
        }
        let values = (0..grid_len(level)).map(|j| f(grid_time(j, level))).collect();
        Self::new(level, values)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Time of grid index `j`.
    pub fn time(&self, j: usize) -> f64 {
        grid_time(j, self.level)
    }

    /// Subsamples onto `T_coarser_level`.
    pub fn restrict(&self, coarser_level: u32) -> Result<SampledPath> {
        if coarser_level > self.level {
            return Err(level_error(
                coarser_level as i64,
                format!("cannot restrict a level-{} path to a finer grid", self.level),
            ));
        }
        if coarser_level == self.level {
            return Ok(self.clone());
        }
        let stride = 1usize << (self.level - coarser_level);
        let values = self.values.iter().step_by(stride).copied().collect();
        Ok(SampledPath {
            level: coarser_level,
            values,
            label: self.label.clone(),
        })
    }

    /// `λ · path`.
    pub fn scaled(&self, lambda: f64) -> Result<SampledPath> {
        self.map(|v| lambda * v)
    }

    /// Applies `f` pointwise, rejecting non-finite results.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<SampledPath> {
        let values = self.values.iter().map(|&v| f(v)).collect();
        let mut out = SampledPath::new(self.level, values)?;
        out.label = self.label.clone();
        Ok(out)
    }

    /// Pointwise `self + other`; both paths must share a level.
    pub fn add(&self, other: &SampledPath) -> Result<SampledPath> {
        if other.level != self.level {
            return Err(level_error(
                other.level as i64,
                format!("cannot add paths of levels {} and {}", self.level, other.level),
            ));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        SampledPath::new(self.level, values)
    }

    /// Writes `t,value` rows with a header.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "value"])?;
        for (j, v) in self.values.iter().enumerate() {
            w.write_record([self.time(j).to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a path written as one row per grid point, either `t,value` or a
    /// single `value` column, with an optional header line.
    pub fn read_csv<R: Read>(reader: R) -> Result<SampledPath> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            let fields: Vec<&str> = record.iter().collect();
            let (t, v) = match fields.as_slice() {
                [v] => (None, *v),
                [t, v] => (Some(*t), *v),
                _ => {
                    return Err(RoughnessError::Format(format!(
                        "row {} has {} columns, expected 1 or 2",
                        row + 1,
                        fields.len()
                    )))
                }
            };
            let parsed_v = v.parse::<f64>();
            if row == 0 && parsed_v.is_err() {
                // header line
                continue;
            }
            let value = parsed_v
                .map_err(|_| RoughnessError::Format(format!("row {}: bad value {v:?}", row + 1)))?;
            let time = t
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| RoughnessError::Format(format!("row {}: bad time {t:?}", row + 1)))
                })
                .transpose()?;
            times.push(time);
            values.push(value);
        }
        let level = level_for_len(values.len()).ok_or_else(|| {
            RoughnessError::Format(format!("{} rows is not 2^N + 1 for any N", values.len()))
        })?;
        for (j, t) in times.iter().enumerate() {
            if let Some(t) = t {
                if (t - grid_time(j, level)).abs() > 1e-12 {
                    return Err(RoughnessError::Format(format!(
                        "row {j}: time {t} does not match grid time {}",
                        grid_time(j, level)
                    )));
                }
            }
        }
        SampledPath::new(level, values)
    }
}

/// `j · 2^-level`, exact in binary floating point.
pub fn grid_time(j: usize, level: u32) -> f64 {
    j as f64 / (1u64 << level) as f64
}

/// Index `(m, k)` of a Faber–Schauder function `e_{m,k}`; `m = -1` is the
/// linear function `e_{-1,0}(t) = t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DyadicIndex {
    generation: i32,
    position: usize,
}

impl DyadicIndex {
    pub fn new(generation: i32, position: usize) -> Result<Self> {
        let ok = match generation {
            -1 => position == 0,
            m if (0..63).contains(&m) => position < (1usize << m),
            _ => false,
        };
        if !ok {
            return Err(invalid(format!("dyadic index ({generation}, {position}) out of range")));
        }
        Ok(Self {
            generation,
            position,
        })
    }

    pub fn generation(&self) -> i32 {
        self.generation
    }

    pub fn position(&self) -> usize {
        self.position
    }

    /// Closed support `[k 2^-m, (k+1) 2^-m]` of `e_{m,k}`.
    pub fn support(&self) -> (f64, f64) {
        if self.generation < 0 {
            return (0.0, 1.0);
        }
        let w = 1.0 / (1u64 << self.generation) as f64;
        (self.position as f64 * w, (self.position + 1) as f64 * w)
    }
}
