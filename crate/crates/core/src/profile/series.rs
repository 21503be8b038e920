//! Exponential series for the profile function and its constants.
//!
//! With t = e^{−αx}, 1 − F_α(x) = Σ_{k≥1} σ_k (γ_α t)^k. For α ∈ (0, 1]
//! every coefficient a_k = σ_k γ_α^k is nonnegative and Σ a_k = 1 (the
//! series at t = 1 is 1 − F_α(0)), so the tail after K terms is bounded
//! by |t|^{K+1} min(1 / (1 − |t|), 1 − Σ_{k≤K} a_k).

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};
use crate::special::{digamma, EULER_GAMMA};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaRoute {
    Quadrature,
    Digamma,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::param("alpha", format!("{alpha} outside (0, 1]")))
    }
}

/// γ_α = (1/α) exp(−∫₀¹ (1 − x^{(1−α)/α}) / (1 − x) dx).
///
/// The quadrature route also accepts α = 0 and returns the α → 0⁺ limit,
/// e^{−γ}: the integral grows like Ψ(1/α) + γ and cancels ln(1/α).
pub fn gamma_alpha(alpha: f64, route: GammaRoute) -> Result<f64> {
    if alpha == 0.0 && route == GammaRoute::Quadrature {
        return Ok((-EULER_GAMMA).exp());
    }
    check_alpha(alpha)?;
    if alpha == 1.0 {
        return Ok(1.0);
    }
    match route {
        GammaRoute::Digamma => {
            let z = 1.0 / alpha;
            Ok((z.ln() - digamma(z) - EULER_GAMMA).exp())
        }
        GammaRoute::Quadrature => {
            let beta = (1.0 - alpha) / alpha;
            let integrand = |x: f64| {
                if x >= 1.0 {
                    beta
                } else if x <= 0.0 {
                    1.0
                } else {
                    -(beta * x.ln()).exp_m1() / (1.0 - x)
                }
            };
            let r = quad::integrate(integrand, 0.0, 1.0, Tolerance::new(1e-15, 1e-13))?;
            Ok((-r.value).exp() / alpha)
        }
    }
}

/// σ_1..σ_K from σ_1 = 1, σ_k = Σ_ν σ_ν σ_{k−ν} [(1+α)ν − αk] ν / (k(k−1)).
pub fn sigma_coeffs(alpha: f64, order: usize) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    if order == 0 {
        return Err(Error::param("K", "must be at least 1"));
    }
    Ok(scaled_coeffs(alpha, 1.0, order))
}

/// The same recurrence seeded with a_1 = `first`; yields σ_k first^k.
fn scaled_coeffs(alpha: f64, first: f64, order: usize) -> Vec<f64> {
    let mut a = Vec::with_capacity(order);
    a.push(first);
    for k in 2..=order {
        let kf = k as f64;
        let mut acc = 0.0;
        for nu in 1..k {
            let nf = nu as f64;
            acc += a[nu - 1] * a[k - nu - 1] * ((1.0 + alpha) * nf - alpha * kf) * nf;
        }
        a.push(acc / (kf * (kf - 1.0)));
    }
    a
}

/// Truncated Taylor expansion of φ_α(t) = 1 − F_α(−ln(t)/α) at t = 0.
#[derive(Debug, Clone)]
pub struct TaylorProfile {
    alpha: f64,
    gamma_alpha: f64,
    sigma: Vec<f64>,
    scaled: Vec<f64>,
}

impl TaylorProfile {
    pub fn new(alpha: f64, order: usize) -> Result<Self> {
        let sigma = sigma_coeffs(alpha, order)?;
        let gamma_alpha = gamma_alpha(alpha, GammaRoute::Digamma)?;
        let scaled = scaled_coeffs(alpha, gamma_alpha, order);
        Ok(TaylorProfile { alpha, gamma_alpha, sigma, scaled })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma_alpha(&self) -> f64 {
        self.gamma_alpha
    }

    pub fn order(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// a_k = σ_k γ_α^k, computed directly so large orders do not overflow.
    pub fn coefficients(&self) -> &[f64] {
        &self.scaled
    }

    /// Bound on |Σ_{k>K} a_k t^k|, using a_k ≥ 0 and Σ a_k = 1.
    pub fn tail_bound(&self, t: f64) -> f64 {
        let at = t.abs();
        if at >= 1.0 {
            return f64::INFINITY;
        }
        let lead = at.powi(self.order() as i32 + 1);
        let remaining_mass = (1.0 - self.scaled.iter().sum::<f64>()).max(0.0);
        (lead / (1.0 - at)).min(lead * remaining_mass)
    }

    /// Σ_{k≤K} a_k t^k, refusing when the tail bound exceeds `tolerance`.
    pub fn eval(&self, t: f64, tolerance: f64) -> Result<f64> {
        if t.abs() >= 1.0 {
            return Err(Error::param("t", format!("|{t}| >= 1 is outside the disc of convergence")));
        }
        let tail = self.tail_bound(t);
        if tail > tolerance {
            return Err(Error::SeriesTail { order: self.order(), tail_bound: tail, tolerance });
        }
        // Horner from the top
        let mut acc = 0.0;
        for a in self.scaled.iter().rev() {
            acc = acc * t + a;
        }
        Ok(acc * t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_trivial_and_closed_values() {
        assert_eq!(gamma_alpha(1.0, GammaRoute::Quadrature).unwrap(), 1.0);
        assert_eq!(gamma_alpha(1.0, GammaRoute::Digamma).unwrap(), 1.0);
        // α = 1/2: γ = 2/e
        let two_over_e = 2.0 / std::f64::consts::E;
        assert_relative_eq!(gamma_alpha(0.5, GammaRoute::Quadrature).unwrap(), two_over_e, epsilon = 1e-13);
        assert_relative_eq!(gamma_alpha(0.5, GammaRoute::Digamma).unwrap(), two_over_e, epsilon = 1e-14);
    }

    #[test]
    fn gamma_two_thirds_cross_route() {
        let q = gamma_alpha(2.0 / 3.0, GammaRoute::Quadrature).unwrap();
        let d = (-digamma(1.5) - EULER_GAMMA + 1.5f64.ln()).exp();
        assert_relative_eq!(q, d, epsilon = 1e-12);
    }

    #[test]
    fn gamma_small_alpha_approaches_limit() {
        let limit = gamma_alpha(0.0, GammaRoute::Quadrature).unwrap();
        let near = gamma_alpha(1e-3, GammaRoute::Digamma).unwrap();
        // ln z − Ψ(z) ≈ 1/(2z)
        assert!((near / limit - 1.0).abs() < 1e-3);
        assert!(gamma_alpha(0.0, GammaRoute::Digamma).is_err());
        assert!(gamma_alpha(1.5, GammaRoute::Quadrature).is_err());
    }

    #[test]
    fn sigma_low_orders() {
        for &alpha in &[0.1, 0.5, 2.0 / 3.0, 0.9] {
            let s = sigma_coeffs(alpha, 3).unwrap();
            assert_eq!(s[0], 1.0);
            assert_relative_eq!(s[1], (1.0 - alpha) / 2.0, epsilon = 1e-15);
            assert_relative_eq!(s[2], (1.0 - alpha) * (5.0 - 4.0 * alpha) / 12.0, epsilon = 1e-15);
        }
        assert_eq!(sigma_coeffs(0.3, 1).unwrap(), vec![1.0]);
        let one = sigma_coeffs(1.0, 5).unwrap();
        assert_eq!(&one[1..], &[0.0; 4]);
    }

    #[test]
    fn coefficients_sum_to_one() {
        // Σ a_k = φ_α(1) = 1 − F_α(0) = 1; partial sums approach it from below
        let tp = TaylorProfile::new(2.0 / 3.0, 4000).unwrap();
        let s: f64 = tp.coefficients().iter().sum();
        assert!(s < 1.0 && s > 0.99, "{s}");
        assert!(tp.coefficients().iter().all(|&a| a > 0.0));
    }

    #[test]
    fn series_refuses_slow_tail() {
        let tp = TaylorProfile::new(0.5, 200).unwrap();
        assert!(matches!(tp.eval(0.99, 1e-12), Err(Error::SeriesTail { .. })));
        assert!(tp.eval(1.0, 1e-12).is_err());
        assert!(tp.eval(0.5, 1e-12).is_ok());
    }
}
