//! Box-plot summary statistics.

use serde::Serialize;

use crate::error::{Error, Result};

/// Five-number box-plot summary with 1.5×IQR whiskers.
#[derive(Debug, Clone, Serialize)]
pub struct BoxStats {
    pub median: f64,
    pub lower_quartile: f64,
    pub upper_quartile: f64,
    /// Smallest datum ≥ `lower_quartile − 1.5·IQR`.
    pub whisker_low: f64,
    /// Largest datum ≤ `upper_quartile + 1.5·IQR`.
    pub whisker_high: f64,
    /// Data outside the whiskers, ascending.
    pub outliers: Vec<f64>,
}

/// Median of a sorted slice by linear interpolation (midpoint of the two
/// central values for even lengths).
fn sorted_median(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Computes box statistics with the midpoint quartile convention: the
/// quartiles are medians of the lower/upper halves, each half including the
/// overall median element when the count is odd (Tukey hinges).
pub fn box_stats(samples: &[f64]) -> Result<BoxStats> {
    if samples.is_empty() {
        return Err(Error::Spec("box_stats requires at least one sample".into()));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("box_stats requires finite samples".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    let median = sorted_median(&xs);
    let half = n.div_ceil(2);
    let lower_quartile = sorted_median(&xs[..half]);
    let upper_quartile = sorted_median(&xs[n - half..]);
    let iqr = upper_quartile - lower_quartile;
    let (lo_fence, hi_fence) = (lower_quartile - 1.5 * iqr, upper_quartile + 1.5 * iqr);
    let whisker_low = xs.iter().copied().find(|&x| x >= lo_fence).unwrap_or(lower_quartile);
    let whisker_high =
        xs.iter().rev().copied().find(|&x| x <= hi_fence).unwrap_or(upper_quartile);
    let outliers = xs.iter().copied().filter(|&x| x < lo_fence || x > hi_fence).collect();
    Ok(BoxStats { median, lower_quartile, upper_quartile, whisker_low, whisker_high, outliers })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_five_sample() {
        let b = box_stats(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(b.median, 3.0);
        assert_eq!(b.lower_quartile, 2.0);
        assert_eq!(b.upper_quartile, 4.0);
        assert_eq!(b.whisker_low, 1.0);
        assert_eq!(b.whisker_high, 5.0);
        assert!(b.outliers.is_empty());
    }

    #[test]
    fn degenerate_single_sample() {
        let b = box_stats(&[1.0]).unwrap();
        assert_eq!(
            (b.median, b.lower_quartile, b.upper_quartile, b.whisker_low, b.whisker_high),
            (1.0, 1.0, 1.0, 1.0, 1.0)
        );
        assert!(b.outliers.is_empty());
    }

    #[test]
    fn zero_iqr_flags_outlier() {
        let b = box_stats(&[1.0, 1.0, 1.0, 1.0, 100.0]).unwrap();
        assert_eq!(b.median, 1.0);
        assert_eq!(b.lower_quartile, 1.0);
        assert_eq!(b.upper_quartile, 1.0);
        assert_eq!(b.whisker_high, 1.0);
        assert_eq!(b.outliers, vec![100.0]);
    }

    #[test]
    fn ordering_invariant() {
        let b = box_stats(&[9.0, -3.0, 4.0, 0.5, 2.0, 2.0, 7.5, 100.0]).unwrap();
        assert!(b.whisker_low <= b.lower_quartile);
        assert!(b.lower_quartile <= b.median);
        assert!(b.median <= b.upper_quartile);
        assert!(b.upper_quartile <= b.whisker_high);
        for &o in &b.outliers {
            assert!(o < b.whisker_low || o > b.whisker_high);
        }
        assert!(box_stats(&[]).is_err());
    }
}
