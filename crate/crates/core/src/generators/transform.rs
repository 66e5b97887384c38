use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, RoughnessError};
use crate::grid::SampledPath;

/// Strictly increasing pointwise map applied before integration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TransformSpec {
    #[default]
    Identity,
    /// `e^{2x}`, squared volatility of a log-volatility path.
    Exp2,
    /// `a x + b`, `a != 0`.
    Affine { a: f64, b: f64 },
    /// Signed power `sign(x) |x|^p`, `p > 0`.
    Power { p: f64 },
}

impl TransformSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TransformSpec::Affine { a, b } if a == 0.0 || !a.is_finite() || !b.is_finite() => {
                Err(invalid(format!("affine transform needs finite a != 0, got a={a}, b={b}")))
            }
            TransformSpec::Power { p } if !(p > 0.0 && p.is_finite()) => {
                Err(invalid(format!("power transform needs p > 0, got {p}")))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            TransformSpec::Identity => x,
            TransformSpec::Exp2 => (2.0 * x).exp(),
            TransformSpec::Affine { a, b } => a * x + b,
            TransformSpec::Power { p } => x.signum() * x.abs().powf(p),
        }
    }
}

impl fmt::Display for TransformSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformSpec::Identity => write!(f, "identity"),
            TransformSpec::Exp2 => write!(f, "exp2"),
            TransformSpec::Affine { a, b } => write!(f, "affine:{a},{b}"),
            TransformSpec::Power { p } => write!(f, "power:{p}"),
        }
    }
}

/// Parses `identity`, `exp2`, `affine:A,B` or `power:P`.
impl FromStr for TransformSpec {
    type Err = RoughnessError;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let nums = || -> Result<Vec<f64>> {
            args.split(',')
                .map(|a| a.trim().parse::<f64>().map_err(|_| invalid(format!("bad transform argument {a:?}"))))
                .collect()
        };
        let spec = match (name.trim(), args.is_empty()) {
            ("identity", true) => TransformSpec::Identity,
            ("exp2", true) => TransformSpec::Exp2,
            ("affine", false) => match nums()?.as_slice() {
                [a, b] => TransformSpec::Affine { a: *a, b: *b },
                _ => return Err(invalid("affine takes two arguments: affine:A,B")),
            },
            ("power", false) => match nums()?.as_slice() {
                [p] => TransformSpec::Power { p: *p },
                _ => return Err(invalid("power takes one argument: power:P")),
            },
            _ => return Err(invalid(format!("unknown transform {s:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// `g(x_j)` at every grid point. A non-finite result is reported with the
/// index and input value that produced it.
pub fn apply_transform(x: &SampledPath, transform: &TransformSpec) -> Result<SampledPath> {
    transform.validate()?;
    let mut values = Vec::with_capacity(x.len());
    for (index, &v) in x.values().iter().enumerate() {
        let g = transform.eval(v);
        if !g.is_finite() {
            return Err(RoughnessError::Overflow { index, input: v });
        }
        values.push(g);
    }
    let out = SampledPath::new(x.level(), values)?;
    Ok(match x.label() {
        Some(l) => out.with_label(l),
        None => out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SampledPath {
        SampledPath::from_fn(4, |t| (6.0 * t).sin() - 0.2).unwrap()
    }

    #[test]
    fn identity_and_unit_affine() {
        let x = sample();
        assert_eq!(apply_transform(&x, &TransformSpec::Identity).unwrap(), x);
        assert_eq!(apply_transform(&x, &TransformSpec::Affine { a: 1.0, b: 0.0 }).unwrap(), x);
    }

    #[test]
    fn exp2_of_constant() {
        let x = SampledPath::from_fn(3, |_| 0.7).unwrap();
        let y = apply_transform(&x, &TransformSpec::Exp2).unwrap();
        assert!(y.values().iter().all(|&v| v == 1.4f64.exp()));
    }

    #[test]
    fn overflow_names_index() {
        let mut v = vec![0.0; 9];
        v[5] = 400.0;
        let x = SampledPath::new(3, v).unwrap();
        match apply_transform(&x, &TransformSpec::Exp2) {
            Err(RoughnessError::Overflow { index, input }) => {
                assert_eq!(index, 5);
                assert_eq!(input, 400.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn monotone() {
        let x = SampledPath::from_fn(6, |t| 4.0 * t - 2.0).unwrap();
        for spec in [
            TransformSpec::Exp2,
            TransformSpec::Affine { a: 2.5, b: -1.0 },
            TransformSpec::Power { p: 3.0 },
            TransformSpec::Power { p: 0.5 },
        ] {
            let y = apply_transform(&x, &spec).unwrap();
            assert!(y.values().windows(2).all(|w| w[1] > w[0]), "{spec}");
        }
    }

    #[test]
    fn parse_and_serde() {
        for s in ["identity", "exp2", "affine:2,-1", "power:1.5"] {
            let spec: TransformSpec = s.parse().unwrap();
            assert_eq!(spec.to_string().parse::<TransformSpec>().unwrap(), spec);
            let json = serde_json::to_string(&spec).unwrap();
            assert_eq!(serde_json::from_str::<TransformSpec>(&json).unwrap(), spec);
        }
        assert_eq!(serde_json::to_string(&TransformSpec::Exp2).unwrap(), r#"{"kind":"exp2"}"#);
        assert!("affine:0,1".parse::<TransformSpec>().is_err());
        assert!("power:-1".parse::<TransformSpec>().is_err());
        assert!("log".parse::<TransformSpec>().is_err());
        assert!("exp2:3".parse::<TransformSpec>().is_err());
    }
}
