//! Replicate-level summaries.

use crate::error::Result;
use crate::gini::{class_gini_estimate, GraphSample};
use crate::rng::RandomSource;

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

pub const BOOTSTRAP_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub se: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl Summary {
    pub fn from_point(mean: f64, se: f64) -> Self {
        Self { mean, se, ci_lo: mean - Z_99 * se, ci_hi: mean + Z_99 * se }
    }
}

/// Running mean and variance (Welford), folded in the given order. A run of
/// identical values yields that value exactly with zero variance.
#[derive(Debug, Clone, Copy, Default)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance; zero for fewer than two values.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn standard_error(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// Mean, standard error and normal-approximation 99% interval.
pub fn summarize(values: &[f64]) -> Summary {
    let mut w = Welford::default();
    values.iter().for_each(|&x| w.push(x));
    Summary::from_point(w.mean(), w.standard_error())
}

/// Class-relative estimate with a nonparametric bootstrap standard error
/// over replicates.
pub fn bootstrap_class_estimate(samples: &[GraphSample], rng: &mut RandomSource) -> Result<Summary> {
    let point = class_gini_estimate(samples)?;
    let r = samples.len() as u64;
    let mut spread = Welford::default();
    let mut resample = Vec::with_capacity(samples.len());
    for _ in 0..BOOTSTRAP_RESAMPLES {
        resample.clear();
        resample.extend((0..r).map(|_| samples[rng.below(r) as usize]));
        spread.push(class_gini_estimate(&resample)?);
    }
    let se = if r < 2 { 0.0 } else { spread.variance().sqrt() };
    Ok(Summary::from_point(point, se))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_values_are_exact() {
        let s = summarize(&vec![1.0 / 6.0; 100_000]);
        assert_eq!(s.mean, 1.0 / 6.0);
        assert_eq!(s.se, 0.0);
        assert_eq!(s.ci_lo, s.ci_hi);
    }

    #[test]
    fn matches_textbook_formulas() {
        let xs = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        let s = summarize(&xs);
        assert!((s.mean - 5.0).abs() < 1e-15);
        let var = xs.iter().map(|x| (x - 5.0) * (x - 5.0)).sum::<f64>() / 7.0;
        assert!((s.se - (var / 8.0).sqrt()).abs() < 1e-15);
        assert!(s.ci_lo < s.mean && s.mean < s.ci_hi);
    }

    #[test]
    fn single_value_has_zero_se() {
        let s = summarize(&[0.3]);
        assert_eq!((s.mean, s.se), (0.3, 0.0));
    }

    #[test]
    fn bootstrap_of_identical_samples_has_zero_spread() {
        let g = GraphSample { abs_diff_sum: 2.0, order: 3, degree_sum: 4 };
        let mut rng = RandomSource::new(1, 0);
        let s = bootstrap_class_estimate(&[g; 20], &mut rng).unwrap();
        assert!((s.mean - 1.0 / 6.0).abs() < 1e-15);
        assert!(s.se < 1e-15);
    }
}
