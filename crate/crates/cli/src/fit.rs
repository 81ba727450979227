//! Ordinary least squares of mean `N_R` against `log₁₀(1/ε)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bench::Algorithm;
use crate::error::{CliError, Result};
use crate::records::BenchRecord;

/// `y = intercept + slope·x` with standard errors. The errors are NaN when
/// there are no residual degrees of freedom (two points).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr_slope: f64,
    pub stderr_intercept: f64,
}

pub fn ols(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let n = xs.len();
    if n != ys.len() || n < 2 {
        return Err(CliError::input(format!("fit needs ≥ 2 paired points, got {n}/{}", ys.len())));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(CliError::input("fit needs at least two distinct x values"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let (stderr_slope, stderr_intercept) = if n > 2 {
        let rss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| {
                let r = y - intercept - slope * x;
                r * r
            })
            .sum();
        let s2 = rss / (nf - 2.0);
        let sumx2: f64 = xs.iter().map(|x| x * x).sum();
        ((s2 / sxx).sqrt(), (s2 * sumx2 / (nf * sxx)).sqrt())
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(LinearFit {
        slope,
        intercept,
        stderr_slope,
        stderr_intercept,
    })
}

/// Scaling fit of a benchmark.
///
/// `slope_log3 = slope_log10 · log₁₀3` is the slope against `log₃(1/ε)`.
/// `c1` (exhaustive) equals `slope_log3`; `c2` (Householder) is half of it,
/// since the reflection gate has twice the vector's denominator exponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope_log10: f64,
    pub intercept: f64,
    pub slope_log3: f64,
    pub stderr_slope: f64,
    pub stderr_intercept: f64,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    /// `(ε, mean N_R)` per tolerance, in ascending `log₁₀(1/ε)`.
    pub means: Vec<(f64, f64)>,
}

/// Groups by `ε` (bit-exact), averages `N_R` and fits against `log₁₀(1/ε)`.
pub fn fit_records(records: &[BenchRecord]) -> Result<FitResult> {
    let algorithm = records.first().map(|r| r.algorithm);
    if records.iter().any(|r| Some(r.algorithm) != algorithm) {
        return Err(CliError::input("records mix algorithms"));
    }
    let means = group_means(records, |r| r.n_r as f64);
    let xs: Vec<f64> = means.iter().map(|m| (1.0 / m.0).log10()).collect();
    let ys: Vec<f64> = means.iter().map(|m| m.1).collect();
    let lf = ols(&xs, &ys)?;
    let slope_log3 = lf.slope * 3f64.log10();
    let (c1, c2) = match algorithm {
        Some(Algorithm::Exhaustive) => (Some(slope_log3), None),
        Some(Algorithm::Householder) => (None, Some(slope_log3 / 2.0)),
        None => (None, None),
    };
    Ok(FitResult {
        slope_log10: lf.slope,
        intercept: lf.intercept,
        slope_log3,
        stderr_slope: lf.stderr_slope,
        stderr_intercept: lf.stderr_intercept,
        c1,
        c2,
        means,
    })
}

/// Mean of `value` per distinct `ε`, ordered by decreasing `ε`.
fn group_means(records: &[BenchRecord], value: impl Fn(&BenchRecord) -> f64) -> Vec<(f64, f64)> {
    let mut groups: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for r in records {
        let g = groups.entry(r.eps.to_bits()).or_insert((0.0, 0));
        g.0 += value(r);
        g.1 += 1;
    }
    let mut out: Vec<(f64, f64)> = groups
        .into_iter()
        .map(|(bits, (sum, n))| (f64::from_bits(bits), sum / n as f64))
        .collect();
    out.sort_by(|a, b| b.0.total_cmp(&a.0));
    out
}

/// Wall time modelled as `t ∝ ε^{-exponent}`; informational only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuntimeFit {
    pub exponent: f64,
    pub stderr_exponent: f64,
    /// `log₁₀` of the mean time in milliseconds at `ε = 1`.
    pub intercept_log10_ms: f64,
}

/// Fits `log₁₀(mean wall time)` against `log₁₀(1/ε)`.
pub fn fit_runtime(records: &[BenchRecord]) -> Result<RuntimeFit> {
    let means = group_means(records, |r| r.wall_time_ms);
    // Sub-resolution timings carry no signal on a log scale.
    let pts: Vec<(f64, f64)> = means
        .iter()
        .filter(|m| m.1 > 0.0)
        .map(|m| ((1.0 / m.0).log10(), m.1.log10()))
        .collect();
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let lf = ols(&xs, &ys)?;
    Ok(RuntimeFit {
        exponent: lf.slope,
        stderr_exponent: lf.stderr_slope,
        intercept_log10_ms: lf.intercept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record(eps: f64, n_r: usize, ms: f64) -> BenchRecord {
        BenchRecord {
            theta: 0.0,
            eps,
            algorithm: Algorithm::Exhaustive,
            f: 0,
            n_r,
            distance: 0.0,
            wall_time_ms: ms,
        }
    }

    #[test]
    fn exact_line_is_recovered() {
        // N_R = 3 + 10·log₁₀(1/ε).
        let recs: Vec<_> = (1..=6)
            .map(|k| record(10f64.powi(-k), (3 + 10 * k) as usize, 1.0))
            .collect();
        let fit = fit_records(&recs).unwrap();
        assert!((fit.slope_log10 - 10.0).abs() < 1e-9);
        assert!((fit.intercept - 3.0).abs() < 1e-9);
        assert!(fit.stderr_slope.abs() < 1e-9);
        assert!(fit.stderr_intercept.abs() < 1e-9);
        assert!((fit.slope_log3 - 10.0 * 3f64.log10()).abs() < 1e-12);
        assert_eq!(fit.c1, Some(fit.slope_log3));
        assert_eq!(fit.c2, None);
    }

    #[test]
    fn means_average_per_eps() {
        let recs = vec![record(0.1, 4, 1.0), record(0.1, 6, 1.0), record(0.01, 10, 1.0), record(0.01, 14, 1.0)];
        let fit = fit_records(&recs).unwrap();
        assert_eq!(fit.means, vec![(0.1, 5.0), (0.01, 12.0)]);
        assert!((fit.slope_log10 - 7.0).abs() < 1e-12);
        assert!(fit.stderr_slope.is_nan());
    }

    #[test]
    fn householder_reports_c2() {
        let recs: Vec<_> = [(0.1, 12), (0.01, 22)]
            .iter()
            .map(|&(e, n)| BenchRecord {
                algorithm: Algorithm::Householder,
                ..record(e, n, 1.0)
            })
            .collect();
        let fit = fit_records(&recs).unwrap();
        assert_eq!(fit.c2, Some(fit.slope_log3 / 2.0));
        assert_eq!(fit.c1, None);
    }

    #[test]
    fn known_stderr() {
        // Residuals (0, 1, -1, 0) about y = x: rss = 2, s² = 1, sxx = 5.
        let fit = ols(&[0.0, 1.0, 2.0, 3.0], &[0.0, 2.0, 1.0, 3.0]).unwrap();
        assert!((fit.slope - 0.8).abs() < 1e-12);
        assert!((fit.intercept - 0.3).abs() < 1e-12);
        let s2 = (0.3f64.powi(2) + 0.9f64.powi(2) + 0.9f64.powi(2) + 0.3f64.powi(2)) / 2.0;
        assert!((fit.stderr_slope - (s2 / 5.0).sqrt()).abs() < 1e-12);
        assert!((fit.stderr_intercept - (s2 * 14.0 / 20.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert!(ols(&[1.0], &[1.0]).is_err());
        assert!(ols(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        assert!(fit_records(&[record(0.1, 3, 1.0)]).is_err());
        let mixed = vec![
            record(0.1, 3, 1.0),
            BenchRecord {
                algorithm: Algorithm::Householder,
                ..record(0.01, 3, 1.0)
            },
        ];
        assert!(fit_records(&mixed).is_err());
    }

    #[test]
    fn runtime_power_law() {
        // t = 2·ε^{-0.5} ms.
        let recs: Vec<_> = [1e-1, 1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&e: &f64| record(e, 0, 2.0 * e.powf(-0.5)))
            .collect();
        let rf = fit_runtime(&recs).unwrap();
        assert!((rf.exponent - 0.5).abs() < 1e-9);
        assert!((rf.intercept_log10_ms - 2f64.log10()).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn ols_recovers_any_line(a in -50.0f64..50.0, b in -20.0f64..20.0,
                                 xs in proptest::collection::btree_set(-100i32..100, 3..12)) {
            let xs: Vec<f64> = xs.into_iter().map(|x| x as f64 / 10.0).collect();
            let ys: Vec<f64> = xs.iter().map(|x| a + b * x).collect();
            let fit = ols(&xs, &ys).unwrap();
            prop_assert!((fit.slope - b).abs() < 1e-8);
            prop_assert!((fit.intercept - a).abs() < 1e-8);
        }

        #[test]
        fn slope_log3_is_consistent(k in proptest::collection::vec(0usize..60, 2..6)) {
            let recs: Vec<_> = k.iter().enumerate()
                .map(|(i, &n)| record(10f64.powi(-(i as i32) - 1), n, 1.0))
                .collect();
            let fit = fit_records(&recs).unwrap();
            prop_assert_eq!(fit.slope_log3, fit.slope_log10 * 3f64.log10());
        }
    }
}
