//! Small summation helpers shared by the estimators and integrators.

const PAIRWISE_BLOCK: usize = 8;

/// Pairwise (tree) summation; rounding error grows like `O(log n)`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Euclidean norm via pairwise summation of squares.
pub fn l2_norm(xs: &[f64]) -> f64 {
    let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
    pairwise_sum(&sq).sqrt()
}

/// Neumaier compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `[0, x0, x0+x1, ...]`, compensated.
pub fn prefix_sums(xs: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut acc = CompensatedSum::default();
    let mut out = vec![0.0];
    for x in xs {
        acc.add(x);
        out.push(acc.value());
    }
    out
}

/// `2^e` for a real exponent.
pub fn pow2(e: f64) -> f64 {
    e.exp2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..1000 {
            s.add(1e-17);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-14).abs() < 1e-26);
        let mut naive = 1.0;
        for _ in 0..1000 {
            naive += 1e-17;
        }
        assert_eq!(naive - 1.0, 0.0);
    }

    #[test]
    fn prefix_sums_shape() {
        assert_eq!(prefix_sums([1.0, 2.0, 3.0]), vec![0.0, 1.0, 3.0, 6.0]);
    }
}
