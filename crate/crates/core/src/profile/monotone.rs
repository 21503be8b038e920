//! Finite-difference checks of complete monotonicity and subadditivity of
//! F̃_α = 1 − F_α.

use serde_json::json;

use super::{ProfileEvaluator, Route};
use crate::error::Result;
use crate::report::{CheckKind, VerificationReport};
use crate::special::binomial;

#[derive(Debug, Clone)]
pub struct MonotoneConfig {
    pub grid: Vec<f64>,
    pub k_max: usize,
    pub step: f64,
}

impl Default for MonotoneConfig {
    fn default() -> Self {
        MonotoneConfig { grid: (0..=20).map(|i| i as f64 * 0.25).collect(), k_max: 8, step: 0.25 }
    }
}

/// Checks (−1)^k Δ_h^k F̃(x) ≥ −2^k·tol for every grid point and k ≤ k_max.
///
/// The recorded slack is (−1)^k Δ_h^k F̃(x) / 2^k so that a single tolerance
/// (the evaluator's) applies to every order. Violations do not abort; the
/// first one is noted in the report.
pub fn complete_monotonicity_check(ev: &ProfileEvaluator, config: &MonotoneConfig) -> Result<VerificationReport> {
    let tol = ev.tolerance();
    let mut report = VerificationReport::new("monotone", CheckKind::Slack, tol)
        .param("alpha", ev.alpha())
        .param("k_max", config.k_max)
        .param("h", config.step)
        .param("grid_points", config.grid.len());
    let mut violations = 0usize;
    for &x in &config.grid {
        let values: Vec<f64> = (0..=config.k_max)
            .map(|j| ev.complement(x + j as f64 * config.step, Route::Auto))
            .collect::<Result<_>>()?;
        for k in 1..=config.k_max {
            let diff: f64 = (0..=k)
                .map(|j| {
                    let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
                    sign * binomial(k as f64, j) * values[j]
                })
                .sum();
            let signed = if k % 2 == 0 { diff } else { -diff };
            let slack = signed / 2f64.powi(k as i32);
            if slack < -tol {
                if violations == 0 {
                    report.note("first_violation", json!({ "x": x, "k": k, "value": signed }));
                }
                violations += 1;
            }
            report.record(slack);
        }
    }
    report.note("violations", violations);
    Ok(report)
}

/// Checks F̃(x) F̃(y) ≤ F̃(x + y)(1 + 1e−9) on the product grid.
pub fn subadditivity_check(ev: &ProfileEvaluator, grid: &[f64]) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("subadditive", CheckKind::Slack, 0.0)
        .param("alpha", ev.alpha())
        .param("grid_points", grid.len());
    let f = |x: f64| ev.complement(x, Route::Auto);
    for &x in grid {
        for &y in grid {
            let rhs = f(x + y)? * (1.0 + 1e-9);
            report.record(rhs - f(x)? * f(y)?);
        }
    }
    Ok(report)
}
