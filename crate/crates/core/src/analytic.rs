//! Closed-form outage probabilities in the interference-limited regime.
//!
//! Everything reduces to one primitive, the tail of the ratio of an
//! exponential desired gain to a sum of independent exponential interferer
//! gains:
//!
//! ```text
//! Pr[X / Σ Y_k > t] = Π_k λ_k / (λ_k + t)
//! ```
//!
//! with `λ_k = E[X] / E[Y_k]`. The product holds for any multiplicities of
//! the `λ_k`. The partial-fraction expansion that is only valid for
//! pairwise-distinct `λ` is kept in [`ratio_tail_partial_fractions`] as an
//! independent cross-check; it is evaluated in exact rational arithmetic
//! because in floating point it cancels catastrophically for close `λ`.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::capacity::{RelayState, ONC_PREFACTOR};
use crate::error::{Error, Result};

/// Relative spacing below which two SIRs are treated as a near-tie by the
/// partial-fraction form.
pub const NEAR_TIE_RELATIVE: f64 = 1e-12;

/// Per-interferer SIRs `λ_k` at one receiver for one desired link.
#[derive(Debug, Clone, PartialEq)]
pub struct SirVector(Vec<f64>);

impl SirVector {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::param("lambdas", "need at least one interferer"));
        }
        if let Some(bad) = lambdas.iter().find(|&&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::param(
                "lambdas",
                format!("SIR must be positive and finite, got {bad}"),
            ));
        }
        Ok(Self(lambdas))
    }

    /// `k` copies of the same linear SIR.
    pub fn equal(lambda: f64, k: usize) -> Result<Self> {
        Self::new(vec![lambda; k])
    }

    pub fn equal_db(sir_db: f64, k: usize) -> Result<Self> {
        Self::equal(db_to_linear(sir_db), k)
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    /// Append one more interferer.
    pub fn with_interferer(&self, lambda: f64) -> Result<Self> {
        let mut v = self.0.clone();
        v.push(lambda);
        Self::new(v)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|l| l * factor).collect())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn check_t(t: f64) -> Result<()> {
    if t >= 0.0 && !t.is_nan() {
        Ok(())
    } else {
        Err(Error::param(
            "t",
            format!("threshold must be >= 0, got {t}"),
        ))
    }
}

/// `Pr[X/ΣY_k > t]` in product form.
pub fn ratio_tail(t: f64, sirs: &SirVector) -> Result<f64> {
    check_t(t)?;
    Ok(sirs.0.iter().fold(1.0, |acc, &l| acc * (l / (l + t))))
}

/// `Pr[X/ΣY_k ≤ t] = 1 − ratio_tail(t)`, computed without cancellation when
/// the tail is close to one.
pub fn ratio_cdf(t: f64, sirs: &SirVector) -> Result<f64> {
    check_t(t)?;
    let log_tail: f64 = sirs.0.iter().map(|&l| -(t / l).ln_1p()).sum();
    Ok(-log_tail.exp_m1())
}

/// The tail via the textbook case split: `(λ/(λ+t))^K` when all SIRs are
/// equal, the partial-fraction sum
///
/// ```text
/// Σ_k λ_k/(λ_k+t) · Π_{j≠k} λ_k⁻¹ / (λ_k⁻¹ − λ_j⁻¹)
/// ```
///
/// when they are pairwise distinct. Vectors with partial ties or SIRs closer
/// than [`NEAR_TIE_RELATIVE`] fit neither case and are rejected.
pub fn ratio_tail_partial_fractions(t: f64, sirs: &SirVector) -> Result<f64> {
    check_t(t)?;
    let l = &sirs.0;
    if l.iter().all(|&x| x == l[0]) {
        let x = l[0] / (l[0] + t);
        return Ok((0..l.len()).fold(1.0, |acc, _| acc * x));
    }
    for i in 0..l.len() {
        for j in i + 1..l.len() {
            let gap = (l[i] - l[j]).abs();
            if gap <= NEAR_TIE_RELATIVE * l[i].max(l[j]) {
                return Err(Error::IllConditioned(format!(
                    "λ[{i}] = {} and λ[{j}] = {} are (nearly) tied; the \
                     partial-fraction form needs pairwise-distinct SIRs",
                    l[i], l[j]
                )));
            }
        }
    }

    let exact = |x: f64| BigRational::from_float(x).expect("finite by construction");
    let t_q = exact(t);
    let lam: Vec<BigRational> = l.iter().map(|&x| exact(x)).collect();
    let inv: Vec<BigRational> = lam.iter().map(|x| x.recip()).collect();

    let mut sum = BigRational::zero();
    for k in 0..lam.len() {
        let mut term = &lam[k] / (&lam[k] + &t_q);
        for j in 0..lam.len() {
            if j != k {
                term *= &inv[k] / (&inv[k] - &inv[j]);
            }
        }
        sum += term;
    }
    rational_to_f64(&sum)
}

fn rational_to_f64(q: &BigRational) -> Result<f64> {
    q.to_f64()
        .ok_or_else(|| Error::Numerical("rational not representable as f64".into()))
}

/// Per-slot SINR threshold of the relay scheme, `2^{3R/2} − 1`.
pub fn onc_threshold(rate: f64) -> f64 {
    (rate / ONC_PREFACTOR * std::f64::consts::LN_2).exp_m1()
}

/// Per-slot SINR threshold of direct transmission, `2^R − 1`.
pub fn noncoop_threshold(rate: f64) -> f64 {
    (rate * std::f64::consts::LN_2).exp_m1()
}

fn check_rate(rate: f64) -> Result<()> {
    if rate >= 0.0 && rate.is_finite() {
        Ok(())
    } else {
        Err(Error::param("rate", format!("must be >= 0, got {rate}")))
    }
}

/// `[Pr(θ=1), Pr(θ=2), Pr(θ=3), Pr(θ=4)]` from the BS→RS SIRs. The two
/// relay slots are i.i.d., so with `q` the per-slot success probability
/// these are `q², q(1−q), q(1−q), (1−q)²`.
pub fn pr_theta(rate: f64, sirs_rs: &SirVector) -> Result<[f64; 4]> {
    check_rate(rate)?;
    let t = onc_threshold(rate);
    let q = ratio_tail(t, sirs_rs)?;
    let qbar = ratio_cdf(t, sirs_rs)?;
    let mixed = q * qbar;
    Ok([q * q, mixed, mixed, qbar * qbar])
}

/// Probability that U1 is in outage given the relay state.
///
/// With `a` the slot-`n` direct failure probability, `b` the slot-`n+1`
/// BS→U1 success probability and `c` the RS→U1 success probability:
/// θ=1 → `a − a·b·c`, θ=2 → `a·(1−c)`, θ=3,4 → `a`.
pub fn pr_outage_given_theta(
    theta: RelayState,
    rate: f64,
    sirs_b1: &SirVector,
    sirs_r1: &SirVector,
) -> Result<f64> {
    check_rate(rate)?;
    let t = onc_threshold(rate);
    let a = ratio_cdf(t, sirs_b1)?;
    Ok(match theta {
        RelayState::Both => {
            let b = ratio_tail(t, sirs_b1)?;
            let cbar = ratio_cdf(t, sirs_r1)?;
            // a·(1 − b·c) with 1 − b·c = (1 − b) + b·(1 − c)
            a * (a + b * cbar)
        }
        RelayState::FirstOnly => a * ratio_cdf(t, sirs_r1)?,
        RelayState::SecondOnly | RelayState::Neither => a,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageBreakdown {
    pub p_theta: [f64; 4],
    pub p_out_given_theta: [f64; 4],
    pub p_total: f64,
}

/// Total U1 outage of the relay scheme, `Σ_θ Pr(θ)·Pr[outage | θ]`.
pub fn outage_onc(
    rate: f64,
    sirs_rs: &SirVector,
    sirs_b1: &SirVector,
    sirs_r1: &SirVector,
) -> Result<OutageBreakdown> {
    let k = sirs_rs.k();
    if sirs_b1.k() != k || sirs_r1.k() != k {
        return Err(Error::Config(format!(
            "SIR vectors disagree on K: bs_rs={k}, bs_u1={}, rs_u1={}",
            sirs_b1.k(),
            sirs_r1.k()
        )));
    }
    let p_theta = pr_theta(rate, sirs_rs)?;
    let mut p_out_given_theta = [0.0; 4];
    for s in RelayState::ALL {
        p_out_given_theta[s.index()] = pr_outage_given_theta(s, rate, sirs_b1, sirs_r1)?;
    }
    let p_total = p_theta
        .iter()
        .zip(&p_out_given_theta)
        .map(|(p, o)| p * o)
        .sum::<f64>()
        .clamp(0.0, 1.0);
    Ok(OutageBreakdown {
        p_theta,
        p_out_given_theta,
        p_total,
    })
}

/// Outage of direct transmission: one slot per message, threshold `2^R − 1`.
pub fn outage_noncoop(rate: f64, sirs_b1: &SirVector) -> Result<f64> {
    check_rate(rate)?;
    ratio_cdf(noncoop_threshold(rate), sirs_b1)
}
