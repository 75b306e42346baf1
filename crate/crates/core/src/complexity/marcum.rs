//! Generalized Marcum Q function of integer order and the probability that
//! an accumulated tree metric stays within a pruning radius.

use serde::Serialize;

use crate::error::{Error, Result};

/// Truncation bound on the neglected tail of the Poisson-mixture series.
pub const SERIES_TOLERANCE: f64 = 1e-12;

/// `1 − Q_order(a, b)`: the CDF at `b²` of a non-central chi-squared
/// variable with `2·order` degrees of freedom and non-centrality `a²`.
///
/// Evaluated as the Poisson mixture
/// `Σ_k e^{−λ} λ^k / k! · P(order + k, x)` with `λ = a²/2`, `x = b²/2` and
/// `P` the regularized lower incomplete gamma function. All terms are
/// non-negative; the sum stops once the remaining Poisson mass (an upper
/// bound on the remainder) falls below [`SERIES_TOLERANCE`].
fn marcum_cdf(order: u32, a: f64, b: f64) -> f64 {
    let lambda = a * a / 2.0;
    let x = b * b / 2.0;
    if x == 0.0 {
        return 0.0;
    }

    // G(n) = e^{-x} Σ_{j<n} x^j / j!, so P(n, x) = 1 − G(n).
    let ln_x = x.ln();
    let mut ln_fact = 0.0; // ln j!
    let mut upper = 0.0;
    let mut j = 0u32;
    let push_term = |upper: &mut f64, j: &mut u32, ln_fact: &mut f64| {
        if *j > 0 {
            *ln_fact += (*j as f64).ln();
        }
        *upper += (-x + *j as f64 * ln_x - *ln_fact).exp();
        *j += 1;
    };
    while j < order {
        push_term(&mut upper, &mut j, &mut ln_fact);
    }

    if lambda == 0.0 {
        return (1.0 - upper).clamp(0.0, 1.0);
    }

    let ln_lambda = lambda.ln();
    let mut ln_k_fact = 0.0;
    let mut total = 0.0;
    let mut k = 0u64;
    loop {
        if k > 0 {
            ln_k_fact += (k as f64).ln();
        }
        let weight = (-lambda + k as f64 * ln_lambda - ln_k_fact).exp();
        let lower = (1.0 - upper).max(0.0);
        total += weight * lower;

        // Later factors P(order + j, x) never exceed `lower`, and once past
        // the Poisson mode the remaining weights fall off geometrically.
        let kf = k as f64;
        let tail = if kf + 2.0 > lambda {
            (weight * lambda / (kf + 1.0) / (1.0 - lambda / (kf + 2.0))).min(1.0)
        } else {
            1.0
        };
        if lower * tail < SERIES_TOLERANCE {
            break;
        }
        push_term(&mut upper, &mut j, &mut ln_fact);
        k += 1;
    }
    total.clamp(0.0, 1.0)
}

/// Generalized Marcum Q function `Q_order(a, b)` for integer order ≥ 1.
pub fn marcum_q(order: u32, a: f64, b: f64) -> Result<f64> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite(format!("marcum_q({order}, {a}, {b})")));
    }
    if order == 0 || a < 0.0 || b < 0.0 {
        return Err(Error::config(
            "marcum_q",
            "order must be >= 1 and arguments non-negative",
        ));
    }
    Ok(1.0 - marcum_cdf(order, a, b))
}

/// Probability that a metric with non-centrality `alpha2`, noise variance
/// `sigma2` and `order = r N_r` complex terms does not exceed `gamma`:
/// `1 − Q_order(α√2/σ, √(2γ)/σ)`.
pub fn survival_probability(alpha2: f64, sigma2: f64, gamma: f64, order: u32) -> Result<f64> {
    for (name, v) in [("alpha2", alpha2), ("sigma2", sigma2), ("gamma", gamma)] {
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("{name} = {v}")));
        }
        if v < 0.0 {
            return Err(Error::config(name, "must be non-negative"));
        }
    }
    if order == 0 {
        return Err(Error::config("order", "must be >= 1"));
    }
    if sigma2 == 0.0 {
        // the metric is deterministic and equals alpha2
        return Ok(if alpha2 <= gamma { 1.0 } else { 0.0 });
    }
    let sigma = sigma2.sqrt();
    let a = alpha2.sqrt() * std::f64::consts::SQRT_2 / sigma;
    let b = (2.0 * gamma).sqrt() / sigma;
    Ok(marcum_cdf(order, a, b))
}

/// Survival probability of the optimum path at one tree level for a chosen
/// pruning radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadiusDiagnostic {
    /// Tree level, 1-based.
    pub level: usize,
    pub alpha2: f64,
    pub sigma2: f64,
    pub gamma: f64,
    pub survival: f64,
}

impl RadiusDiagnostic {
    pub fn evaluate(
        level: usize,
        rx_antennas: usize,
        alpha2: f64,
        sigma2: f64,
        gamma: f64,
    ) -> Result<Self> {
        let order = (level * rx_antennas) as u32;
        Ok(RadiusDiagnostic {
            level,
            alpha2,
            sigma2,
            gamma,
            survival: survival_probability(alpha2, sigma2, gamma, order)?,
        })
    }
}
