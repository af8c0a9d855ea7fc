//! Diversity–multiplexing tradeoff: closed-form curves and a finite-SIR
//! slope estimator built on the closed-form outage.

use std::fmt;

use crate::analytic::{outage_onc, SirVector};
use crate::error::{Error, Result};

/// Lower bound on the target rate used by [`estimate_diversity`]. At `r = 0`
/// the scaled rate `r·log₂λ` is identically zero and outage vanishes, so the
/// zero-multiplexing end is measured at this fixed rate instead.
pub const DIVERSITY_RATE_FLOOR: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmtPoint {
    pub r: f64,
    pub d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DmtScheme {
    Onc,
    NonCoop,
    /// Repetition-based decode-and-forward relaying.
    Conventional,
}

impl DmtScheme {
    pub const ALL: [DmtScheme; 3] = [DmtScheme::Onc, DmtScheme::NonCoop, DmtScheme::Conventional];

    pub fn name(self) -> &'static str {
        match self {
            DmtScheme::Onc => "onc",
            DmtScheme::NonCoop => "noncoop",
            DmtScheme::Conventional => "conventional",
        }
    }

    pub fn max_multiplexing(self) -> f64 {
        match self {
            DmtScheme::Onc => 2.0 / 3.0,
            DmtScheme::NonCoop => 1.0,
            DmtScheme::Conventional => 0.5,
        }
    }

    pub fn diversity(self, r: f64) -> Result<f64> {
        match self {
            DmtScheme::Onc => dmt_onc(r),
            DmtScheme::NonCoop => dmt_noncoop(r),
            DmtScheme::Conventional => dmt_conventional(r),
        }
    }
}

impl fmt::Display for DmtScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_domain(r: f64, hi: f64) -> Result<()> {
    if (0.0..=hi).contains(&r) {
        Ok(())
    } else {
        Err(Error::Domain { r, lo: 0.0, hi })
    }
}

/// `d = 2 − 3r` on `[0, 2/3]`.
pub fn dmt_onc(r: f64) -> Result<f64> {
    check_domain(r, 2.0 / 3.0)?;
    Ok((2.0 - 3.0 * r).max(0.0))
}

/// `d = 1 − r` on `[0, 1]`.
pub fn dmt_noncoop(r: f64) -> Result<f64> {
    check_domain(r, 1.0)?;
    Ok(1.0 - r)
}

/// `d = 2(1 − 2r)` on `[0, 1/2]`.
pub fn dmt_conventional(r: f64) -> Result<f64> {
    check_domain(r, 0.5)?;
    Ok(2.0 * (1.0 - 2.0 * r))
}

/// `n_points` evenly spaced samples of the scheme's closed-form curve, both
/// endpoints included.
pub fn dmt_curve(scheme: DmtScheme, n_points: usize) -> Result<Vec<DmtPoint>> {
    if n_points < 2 {
        return Err(Error::param(
            "n_points",
            format!("need at least 2, got {n_points}"),
        ));
    }
    let r_max = scheme.max_multiplexing();
    (0..n_points)
        .map(|i| {
            let r = if i + 1 == n_points {
                r_max
            } else {
                r_max * i as f64 / (n_points - 1) as f64
            };
            Ok(DmtPoint {
                r,
                d: scheme.diversity(r)?,
            })
        })
        .collect()
}

/// Outage of the relay scheme with every link at SIR `lambda` and rate
/// `max(r·log₂λ, DIVERSITY_RATE_FLOOR)`.
pub fn scaled_outage(r: f64, lambda: f64, k: usize) -> Result<f64> {
    let s = SirVector::equal(lambda, k)?;
    let rate = (r * lambda.log2()).max(DIVERSITY_RATE_FLOOR);
    Ok(outage_onc(rate, &s, &s, &s)?.p_total)
}

/// Negated least-squares slope of `ln Pout` against `ln λ` over the grid.
pub fn estimate_diversity(r: f64, lambda_grid: &[f64], k: usize) -> Result<f64> {
    if !(0.0..2.0 / 3.0).contains(&r) {
        return Err(Error::Domain {
            r,
            lo: 0.0,
            hi: 2.0 / 3.0,
        });
    }
    if lambda_grid.len() < 2 {
        return Err(Error::param("lambda_grid", "need at least 2 points"));
    }
    if lambda_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("lambda_grid", "must be strictly ascending"));
    }
    if lambda_grid[0] <= 1.0 {
        return Err(Error::param("lambda_grid", "SIRs must exceed 1"));
    }
    if k == 0 {
        return Err(Error::param("k", "must be at least 1"));
    }

    let mut xs = Vec::with_capacity(lambda_grid.len());
    let mut ys = Vec::with_capacity(lambda_grid.len());
    for &lambda in lambda_grid {
        let p = scaled_outage(r, lambda, k)?;
        if p.is_nan() || p <= 0.0 {
            return Err(Error::Numerical(format!(
                "outage underflowed to {p} at λ = {lambda:e}; use a lower grid"
            )));
        }
        xs.push(lambda.ln());
        ys.push(p.ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(-sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const GRID: [f64; 3] = [1e8, 1e9, 1e10];

    #[test]
    fn onc_curve_points() {
        assert_eq!(dmt_onc(0.0).unwrap(), 2.0);
        assert_eq!(dmt_onc(2.0 / 3.0).unwrap(), 0.0);
        assert_abs_diff_eq!(dmt_onc(1.0 / 3.0).unwrap(), 1.0, epsilon = 1e-15);
        assert!(matches!(dmt_onc(0.7), Err(Error::Domain { .. })));
        assert!(dmt_onc(-0.1).is_err());
    }

    #[test]
    fn noncoop_curve_points() {
        assert_eq!(dmt_noncoop(0.0).unwrap(), 1.0);
        assert_eq!(dmt_noncoop(1.0).unwrap(), 0.0);
        assert_eq!(dmt_noncoop(0.5).unwrap(), 0.5);
        assert!(dmt_noncoop(1.01).is_err());
    }

    #[test]
    fn conventional_curve_points() {
        assert_eq!(dmt_conventional(0.0).unwrap(), 2.0);
        assert_eq!(dmt_conventional(0.5).unwrap(), 0.0);
        assert_eq!(dmt_conventional(0.25).unwrap(), 1.0);
        assert!(dmt_conventional(0.51).is_err());
    }

    #[test]
    fn curves() {
        let onc = dmt_curve(DmtScheme::Onc, 3).unwrap();
        let want = [(0.0, 2.0), (1.0 / 3.0, 1.0), (2.0 / 3.0, 0.0)];
        for (p, (r, d)) in onc.iter().zip(want) {
            assert_abs_diff_eq!(p.r, r, epsilon = 1e-15);
            assert_abs_diff_eq!(p.d, d, epsilon = 1e-15);
        }
        assert_eq!(
            onc[2],
            DmtPoint {
                r: 2.0 / 3.0,
                d: 0.0
            }
        );
        let nc = dmt_curve(DmtScheme::NonCoop, 2).unwrap();
        assert_eq!(
            nc,
            vec![DmtPoint { r: 0.0, d: 1.0 }, DmtPoint { r: 1.0, d: 0.0 }]
        );
        let cv = dmt_curve(DmtScheme::Conventional, 2).unwrap();
        assert_eq!(
            cv,
            vec![DmtPoint { r: 0.0, d: 2.0 }, DmtPoint { r: 0.5, d: 0.0 }]
        );
        assert!(dmt_curve(DmtScheme::Onc, 1).is_err());
    }

    #[test]
    fn onc_dominates_conventional() {
        for i in 1..=100 {
            let r = 0.5 * i as f64 / 100.0;
            assert!(dmt_onc(r).unwrap() > dmt_conventional(r).unwrap());
        }
    }

    #[test]
    fn onc_versus_noncoop() {
        for i in 0..100 {
            let r = 0.5 * i as f64 / 100.0;
            assert!(dmt_onc(r).unwrap() > dmt_noncoop(r).unwrap());
        }
        for i in 1..=16 {
            let r = 0.5 + (2.0 / 3.0 - 0.5) * i as f64 / 16.0;
            assert!(dmt_onc(r).unwrap() < dmt_noncoop(r).unwrap());
        }
    }

    #[test]
    fn estimated_slope_at_low_multiplexing() {
        let d0 = estimate_diversity(0.0, &GRID, 7).unwrap();
        assert!((d0 - 2.0).abs() <= 0.05, "{d0}");
        let d13 = estimate_diversity(1.0 / 3.0, &GRID, 7).unwrap();
        assert!((d13 - 1.0).abs() <= 0.1, "{d13}");
    }

    #[test]
    fn estimate_converges_upward() {
        for &r in &[0.2, 0.5, 0.6] {
            let lo = estimate_diversity(r, &GRID, 7).unwrap();
            let hi = estimate_diversity(r, &[1e20, 1e21, 1e22], 7).unwrap();
            let target = 2.0 - 3.0 * r;
            assert!(
                (hi - target).abs() < (lo - target).abs(),
                "r={r}: {lo} → {hi}"
            );
        }
    }

    #[test]
    fn estimator_rejects_bad_input() {
        assert!(estimate_diversity(2.0 / 3.0, &GRID, 7).is_err());
        assert!(estimate_diversity(0.1, &[1e8], 7).is_err());
        assert!(estimate_diversity(0.1, &[1e9, 1e8], 7).is_err());
        assert!(estimate_diversity(0.1, &[0.5, 1e8], 7).is_err());
        assert!(matches!(
            estimate_diversity(0.0, &[1e200, 1e250], 7),
            Err(Error::Numerical(_))
        ));
    }
}
