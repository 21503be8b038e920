//! Inversion of w(M) = ∫₀^M ds / (1 − s^α).
//!
//! Everything is carried out in the variable y = −ln(1 − M), in which
//!
//!   w(y) = y/α + R(y),   R(y) = ∫₀^y ρ(u) du,
//!   ρ(u) = (α ε − D) / (α D),   ε = e^{−u},  D = 1 − (1 − ε)^α.
//!
//! ρ is bounded on [0, ∞) and decays like e^{−u}, so R is finite and
//! smooth at infinity. The complement 1 − M = e^{−y} keeps full relative
//! precision even when M rounds to 1.

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};
use crate::special::binomial;

const TABLE_STEP: f64 = 0.5;
const TABLE_SPAN: f64 = 40.0;
const SERIES_EPS: f64 = 0.05;
const SERIES_TERMS: usize = 16;

#[derive(Debug, Clone)]
pub struct InverseTable {
    alpha: f64,
    /// cumulative R at y = i * TABLE_STEP
    cumulative: Vec<f64>,
    /// binomial terms (-1)^k C(α, k) for the small-ε expansion of αε − D
    small_eps: Vec<f64>,
}

impl InverseTable {
    pub fn new(alpha: f64) -> Result<Self> {
        let small_eps = (0..=SERIES_TERMS)
            .map(|k| if k % 2 == 0 { binomial(alpha, k) } else { -binomial(alpha, k) })
            .collect();
        let mut table = InverseTable { alpha, cumulative: vec![0.0], small_eps };
        let nodes = (TABLE_SPAN / TABLE_STEP).round() as usize;
        let mut acc = 0.0;
        for i in 0..nodes {
            let lo = i as f64 * TABLE_STEP;
            acc += table.integrate_density(lo, lo + TABLE_STEP)?;
            table.cumulative.push(acc);
        }
        Ok(table)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// ρ(u), the bounded remainder of dw/dy after removing 1/α.
    pub fn density(&self, u: f64) -> f64 {
        let alpha = self.alpha;
        if alpha == 1.0 {
            return 0.0;
        }
        let eps = (-u).exp();
        let ln_s = if u > 1.0 { (-eps).ln_1p() } else { (-(-u).exp_m1()).ln() };
        let d = -(alpha * ln_s).exp_m1();
        let numerator = if eps < SERIES_EPS {
            // αε − D = Σ_{k≥2} (−1)^k C(α,k) ε^k
            let mut sum = 0.0;
            let mut pow = eps * eps;
            for c in &self.small_eps[2..] {
                sum += c * pow;
                pow *= eps;
            }
            sum
        } else {
            alpha * eps - d
        };
        numerator / (alpha * d)
    }

    fn integrate_density(&self, lo: f64, hi: f64) -> Result<f64> {
        let tol = Tolerance { abs: 1e-15, rel: 1e-13, max_intervals: 400 };
        Ok(quad::integrate(|u| self.density(u), lo, hi, tol)?.value)
    }

    /// R(y) = ∫₀^y ρ.
    pub fn remainder(&self, y: f64) -> Result<f64> {
        let last = self.cumulative.len() - 1;
        let idx = ((y / TABLE_STEP).floor() as usize).min(last);
        let base = idx as f64 * TABLE_STEP;
        Ok(self.cumulative[idx] + self.integrate_density(base, y)?)
    }

    /// w as a function of y = −ln(1 − M).
    pub fn w_of_y(&self, y: f64) -> Result<f64> {
        Ok(y / self.alpha + self.remainder(y)?)
    }

    /// w(M) for M in [0, 1).
    pub fn w_of_m(&self, m: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&m) {
            return Err(Error::param("M", format!("{m} outside [0, 1)")));
        }
        self.w_of_y(-(-m).ln_1p())
    }

    /// R(∞); ρ decays like e^{−u}, so the tail beyond the table is below 1e−17.
    fn remainder_limit(&self) -> f64 {
        *self.cumulative.last().expect("table is nonempty")
    }

    /// Solves w(y) = w for y by safeguarded Newton iteration.
    pub fn solve_y(&self, w: f64) -> Result<f64> {
        if w == 0.0 {
            return Ok(0.0);
        }
        let alpha = self.alpha;
        if alpha == 1.0 {
            return Ok(w);
        }
        let r_inf = self.remainder_limit();
        // R is monotone between 0 and R(∞), which brackets y.
        let a = alpha * (w - r_inf);
        let b = alpha * w;
        let mut lo = a.min(b).max(0.0);
        let mut hi = a.max(b) + 1e-12 * (1.0 + w);
        let mut y = 0.5 * (lo + hi);
        for _ in 0..100 {
            let g = self.w_of_y(y)? - w;
            if g > 0.0 {
                hi = y;
            } else {
                lo = y;
            }
            let slope = 1.0 / alpha + self.density(y);
            let mut next = y - g / slope;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - y).abs();
            y = next;
            if step <= 4.0 * f64::EPSILON * y.max(1e-300) || hi - lo <= 4.0 * f64::EPSILON * hi {
                return Ok(y);
            }
        }
        Err(Error::RootNotConverged { lo, hi })
    }
}
