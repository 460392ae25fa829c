//! Compensated sums and Monte Carlo summaries.

use serde::{Deserialize, Serialize};

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub fn kahan_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = KahanSum::default();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

pub fn mean_se(xs: &[f64]) -> MeanEstimate {
    let n = xs.len();
    if n == 0 {
        return MeanEstimate { mean: f64::NAN, se: f64::NAN, n };
    }
    let mean = kahan_sum(xs.iter().copied()) / n as f64;
    if n == 1 {
        return MeanEstimate { mean, se: f64::INFINITY, n };
    }
    let ss = kahan_sum(xs.iter().map(|x| (x - mean) * (x - mean)));
    let var = ss / (n - 1) as f64;
    MeanEstimate { mean, se: (var / n as f64).sqrt(), n }
}

/// Raw moment `E|X|^p` and the p-norm `(E|X|^p)^{1/p}` with jackknife errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub p: f64,
    pub moment: f64,
    pub moment_se: f64,
    pub norm: f64,
    pub norm_se: f64,
    /// More than half of the moment sum comes from the top 1% of samples.
    pub heavy_tail: bool,
}

/// Errors of the norm come from a delete-one-block jackknife over 50
/// contiguous blocks.
pub fn p_norm(xs: &[f64], p: f64) -> NormEstimate {
    let powers: Vec<f64> = xs.iter().map(|x| x.abs().powf(p)).collect();
    let m = mean_se(&powers);
    let norm = m.mean.powf(1.0 / p);

    let blocks = 50.min(xs.len());
    let mut norm_se = f64::NAN;
    if blocks >= 2 {
        let block_sums: Vec<(f64, usize)> = (0..blocks)
            .map(|b| {
                let lo = b * xs.len() / blocks;
                let hi = (b + 1) * xs.len() / blocks;
                (kahan_sum(powers[lo..hi].iter().copied()), hi - lo)
            })
            .collect();
        let total = kahan_sum(block_sums.iter().map(|b| b.0));
        let leave_out: Vec<f64> = block_sums
            .iter()
            .map(|(s, c)| ((total - s) / (xs.len() - c) as f64).powf(1.0 / p))
            .collect();
        let mean_lo = kahan_sum(leave_out.iter().copied()) / blocks as f64;
        let ss = kahan_sum(leave_out.iter().map(|v| (v - mean_lo) * (v - mean_lo)));
        norm_se = ((blocks - 1) as f64 / blocks as f64 * ss).sqrt();
    }

    NormEstimate {
        p,
        moment: m.mean,
        moment_se: m.se,
        norm,
        norm_se,
        heavy_tail: heavy_tail(&powers),
    }
}

/// True when the largest 1% of the nonnegative `values` hold more than half
/// of their sum.
pub fn heavy_tail(values: &[f64]) -> bool {
    if values.len() < 100 {
        return false;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let top = values.len() / 100;
    let total = kahan_sum(sorted.iter().copied());
    total > 0.0 && kahan_sum(sorted[..top].iter().copied()) > 0.5 * total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut xs = vec![1e16];
        xs.extend(std::iter::repeat(1.0).take(1000));
        xs.push(-1e16);
        assert_eq!(kahan_sum(xs), 1000.0);
    }

    #[test]
    fn mean_and_se_of_known_sample() {
        let m = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        assert!((m.se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn p_norm_of_constant_sample_has_zero_error() {
        let xs = vec![-2.0; 500];
        let e = p_norm(&xs, 4.0);
        assert!((e.norm - 2.0).abs() < 1e-14);
        assert!(e.norm_se < 1e-12);
        assert!(!e.heavy_tail);
    }

    #[test]
    fn heavy_tail_flag() {
        let mut xs = vec![1.0; 1000];
        xs[0] = 1e6;
        assert!(heavy_tail(&xs));
    }
}
