//! The profile function F_α (solution of F' = 1 − F^α, F(0) = 0) and its
//! companions: M_n = F_{2/n}, T_n, the bound Q_n, γ_α, σ_k, φ_α and H_k.
//!
//! Two evaluation routes exist. The inverse route solves w(M) = w, where
//! w(M) = ∫₀^M ds/(1 − s^α), by Newton iteration on a tabulated version of
//! the map. The series route sums the exponential expansion
//! 1 − F_α(w) = Σ σ_k (γ_α e^{−αw})^k and is only available for α ≤ 1.

mod hpoly;
mod inverse;
mod monotone;
mod series;

use serde::{Deserialize, Serialize};

pub use hpoly::{h_polynomials, HPolynomial};
pub use inverse::InverseTable;
pub use monotone::{complete_monotonicity_check, subadditivity_check, MonotoneConfig};
pub use series::{gamma_alpha, sigma_coeffs, GammaRoute, TaylorProfile};

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_SERIES_ORDER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileParams {
    alpha: f64,
    n: Option<u32>,
}

impl ProfileParams {
    pub fn from_dimension(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "dimension must be positive"));
        }
        Ok(ProfileParams { alpha: 2.0 / n as f64, n: Some(n) })
    }

    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::param("alpha", format!("{alpha} is not a positive real")));
        }
        Ok(ProfileParams { alpha, n: None })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dimension(&self) -> Option<u32> {
        self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Inverse,
    Series,
    Auto,
}

impl std::str::FromStr for Route {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inverse" => Ok(Route::Inverse),
            "series" => Ok(Route::Series),
            "auto" => Ok(Route::Auto),
            other => Err(Error::param("route", format!("unknown route `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiRoute {
    /// 1 − F_α(−ln(t)/α) through the inverse route; t ∈ (0, 1]
    Composition,
    /// Taylor series at t = 0; |t| < 1
    Series,
    Auto,
}

/// Cached evaluator for F_α and everything derived from it.
///
/// Immutable after construction and `Sync`, so one evaluator can be shared
/// across worker threads.
#[derive(Debug, Clone)]
pub struct ProfileEvaluator {
    params: ProfileParams,
    inverse: InverseTable,
    series: Option<TaylorProfile>,
    tolerance: f64,
}

impl ProfileEvaluator {
    pub fn new(params: ProfileParams) -> Result<Self> {
        Self::with_options(params, DEFAULT_TOLERANCE, DEFAULT_SERIES_ORDER)
    }

    pub fn for_dimension(n: u32) -> Result<Self> {
        Self::new(ProfileParams::from_dimension(n)?)
    }

    pub fn with_options(params: ProfileParams, tolerance: f64, series_order: usize) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(Error::param("tolerance", "must be positive"));
        }
        let inverse = InverseTable::new(params.alpha)?;
        let series = if params.alpha <= 1.0 { Some(TaylorProfile::new(params.alpha, series_order)?) } else { None };
        Ok(ProfileEvaluator { params, inverse, series, tolerance })
    }

    pub fn params(&self) -> ProfileParams {
        self.params
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn series(&self) -> Option<&TaylorProfile> {
        self.series.as_ref()
    }

    pub fn inverse_table(&self) -> &InverseTable {
        &self.inverse
    }

    /// F_α(w).
    pub fn eval(&self, w: f64, route: Route) -> Result<f64> {
        if w == 0.0 {
            return Ok(0.0);
        }
        match self.resolve(w, route)? {
            Route::Inverse => {
                let y = self.inverse.solve_y(w)?;
                Ok(-(-y).exp_m1())
            }
            _ => Ok(1.0 - self.series_complement(w)?),
        }
    }

    /// 1 − F_α(w), accurate in relative terms for large w.
    pub fn complement(&self, w: f64, route: Route) -> Result<f64> {
        if w == 0.0 {
            return Ok(1.0);
        }
        match self.resolve(w, route)? {
            Route::Inverse => Ok((-self.inverse.solve_y(w)?).exp()),
            _ => self.series_complement(w),
        }
    }

    fn check_w(w: f64) -> Result<()> {
        if w >= 0.0 && w.is_finite() {
            Ok(())
        } else {
            Err(Error::param("w", format!("{w} is not a finite nonnegative real")))
        }
    }

    fn resolve(&self, w: f64, route: Route) -> Result<Route> {
        Self::check_w(w)?;
        Ok(match route {
            Route::Auto => match &self.series {
                Some(s) if s.tail_bound((-self.alpha() * w).exp()) <= 0.01 * self.tolerance => Route::Series,
                _ => Route::Inverse,
            },
            r => r,
        })
    }

    fn series_complement(&self, w: f64) -> Result<f64> {
        let series = self
            .series
            .as_ref()
            .ok_or_else(|| Error::param("route", "series route needs alpha in (0, 1]"))?;
        series.eval((-self.alpha() * w).exp(), self.tolerance)
    }

    /// φ_α(t) = 1 − F_α(−ln(t)/α), continued to t ≤ 0 by its Taylor series.
    pub fn phi(&self, t: f64, route: PhiRoute) -> Result<f64> {
        let series_ok = |t: f64| self.series.as_ref().is_some_and(|s| s.tail_bound(t) <= self.tolerance);
        let route = match route {
            PhiRoute::Auto if t <= 0.0 || series_ok(t) => PhiRoute::Series,
            PhiRoute::Auto => PhiRoute::Composition,
            r => r,
        };
        match route {
            PhiRoute::Series => {
                let series = self
                    .series
                    .as_ref()
                    .ok_or_else(|| Error::param("alpha", "the Taylor series of phi needs alpha in (0, 1]"))?;
                series.eval(t, self.tolerance)
            }
            _ => {
                if !(t > 0.0 && t <= 1.0) {
                    return Err(Error::param("t", format!("{t} outside (0, 1] for the composition route")));
                }
                self.complement(-t.ln() / self.alpha(), Route::Inverse)
            }
        }
    }
}

/// Q_n(w) = (e^{2w/n} − 1) / (e^{2w/n} − (n−2)/n), an upper bound for M_n.
pub fn profile_bound_q(n: u32, w: f64) -> f64 {
    let nf = n as f64;
    let e = (2.0 * w / nf).exp_m1();
    e / (e + 1.0 - (nf - 2.0) / nf)
}

/// T_n(ξ) = n ∫₀^ξ tanh^{n−1}(t) dt.
pub fn t_n(n: u32, xi: f64) -> Result<f64> {
    if !(xi >= 0.0) {
        return Err(Error::param("xi", format!("{xi} is negative")));
    }
    if n == 0 {
        return Err(Error::param("n", "dimension must be positive"));
    }
    let power = (n - 1) as i32;
    let r = quad::integrate(|t: f64| t.tanh().powi(power), 0.0, xi, Tolerance::new(1e-300, 1e-14))?;
    Ok(n as f64 * r.value)
}

/// The unique ξ ≥ 0 with T_n(ξ) = w.
pub fn t_n_inverse(n: u32, w: f64) -> Result<f64> {
    if !(w >= 0.0 && w.is_finite()) {
        return Err(Error::param("w", format!("{w} is not a finite nonnegative real")));
    }
    if w == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    // T_n(ξ) ≤ nξ
    let mut lo = w / nf;
    let mut hi = w / nf + 1.0;
    while t_n(n, hi)? < w {
        lo = hi;
        hi *= 2.0;
    }
    let mut xi = if n == 1 { w } else { (w / nf + w.powf(1.0 / nf)).min(hi).max(lo) };
    for _ in 0..200 {
        let g = t_n(n, xi)? - w;
        if g > 0.0 {
            hi = xi;
        } else {
            lo = xi;
        }
        let slope = nf * xi.tanh().powi(n as i32 - 1);
        let mut next = if slope > 0.0 { xi - g / slope } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - xi).abs();
        xi = next;
        if step <= 2.0 * f64::EPSILON * xi || hi - lo <= 2.0 * f64::EPSILON * hi {
            return Ok(xi);
        }
    }
    Err(Error::RootNotConverged { lo, hi })
}

/// Convenience: M_n(w) through an evaluator built for dimension n.
pub fn profile_eval(params: ProfileParams, w: f64, route: Route) -> Result<f64> {
    ProfileEvaluator::new(params)?.eval(w, route)
}

/// 1 − M_n(x) ≈ Σ_{k≤K} σ_k γ_{2/n}^k e^{−2kx/n}, with the tail checked
/// against `tolerance`.
pub fn profile_series_eval(n: u32, x: f64, order: usize, tolerance: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("n", "the exponential series needs n >= 2"));
    }
    if !(x >= 0.0) {
        return Err(Error::param("x", format!("{x} is negative")));
    }
    let series = TaylorProfile::new(2.0 / n as f64, order)?;
    let t = (-2.0 * x / n as f64).exp();
    let tail_bound = series.tail_bound(t);
    if tail_bound > tolerance {
        return Err(Error::SeriesTail { order, tail_bound, tolerance });
    }
    series.eval(t, tolerance)
}
