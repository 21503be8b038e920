//! The extremal problem for Φ(ρ) = J²(φρ)/J(fρ) under the constraint
//! J(gρ) = w, its maximizing ball, and checks of the resulting sharp
//! inequality J²(φρ) ≤ M_n(J(gρ)) J(fρ) in direct and inverted form.

mod random;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

pub use random::{random_ball_density, random_grid_density, sample_rng};

use crate::error::{Error, Result};
use crate::potential::{j_functional, u_rho, v_rho, Ball, Density, KernelKind};
use crate::profile::{t_n_inverse, ProfileEvaluator, Route};
use crate::report::{CheckKind, VerificationReport};

/// Slack tolerance for densities integrated in closed form.
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-6;
/// Slack tolerance once grid quadrature is involved.
pub const GRID_TOLERANCE: f64 = 1e-4;

pub fn default_tolerance(rho: &Density) -> f64 {
    if rho.has_grid() {
        GRID_TOLERANCE
    } else {
        CLOSED_FORM_TOLERANCE
    }
}

fn origin(n: usize) -> Vec<f64> {
    vec![0.0; n]
}

/// Φ(ρ) = J²(φρ) / J(fρ), all kernels based at the origin.
pub fn phi_functional(rho: &Density) -> Result<f64> {
    let o = origin(rho.dim());
    let f = j_functional(rho, KernelKind::F, &o)?.value;
    if f <= 0.0 {
        return Err(Error::Degenerate("J(f rho) vanishes; the density is zero".into()));
    }
    let phi = j_functional(rho, KernelKind::Phi, &o)?.value;
    Ok(phi * phi / f)
}

/// The ball D(α, τ) = B((τ, 0, …, 0), √(τ² − α²)) normalized so that
/// J(fχ) = 1 and J(gχ) = w.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremalBall {
    pub n: usize,
    pub w: f64,
    pub xi: f64,
    pub alpha_param: f64,
    pub tau: f64,
}

impl ExtremalBall {
    pub fn radius(&self) -> f64 {
        self.alpha_param * self.xi.sinh()
    }

    pub fn center(&self) -> Vec<f64> {
        let mut c = origin(self.n);
        c[0] = self.tau;
        c
    }

    pub fn density(&self) -> Density {
        Density::new(self.n)
            .and_then(|d| d.with_ball(Ball::new(self.center(), self.radius(), 1.0)))
            .expect("extremal ball parameters are valid")
    }
}

/// The maximizer of Φ among densities with J(gρ) = w: ξ solves T_n(ξ) = w,
/// α = (cosh^{n−2}ξ / sinh^n ξ)^{1/2} and τ = α cosh ξ.
pub fn extremal_ball(n: usize, w: f64) -> Result<ExtremalBall> {
    if n < 2 {
        return Err(Error::UnsupportedDimension { dim: n, reason: "the extremal problem needs n >= 2" });
    }
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::param("w", format!("{w} must be positive")));
    }
    let xi = t_n_inverse(n as u32, w)?;
    // ln α = ((n−2) ln cosh ξ − n ln sinh ξ) / 2 keeps large ξ finite
    let ln_alpha = 0.5 * ((n as f64 - 2.0) * crate::special::ln_cosh(xi) - n as f64 * ln_sinh(xi));
    let alpha_param = ln_alpha.exp();
    Ok(ExtremalBall { n, w, xi, alpha_param, tau: alpha_param * xi.cosh() })
}

fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// Both sides of a sharp inequality lhs ≤ rhs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalitySlack {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub w: f64,
    pub relative_scale: f64,
}

impl InequalitySlack {
    pub fn new(lhs: f64, rhs: f64, w: f64) -> Self {
        InequalitySlack { lhs, rhs, slack: rhs - lhs, w, relative_scale: lhs.abs().max(rhs.abs()).max(1.0) }
    }

    /// slack / relative_scale
    pub fn normalized(&self) -> f64 {
        self.slack / self.relative_scale
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.slack >= -tol * self.relative_scale
    }
}

fn check_evaluator(rho: &Density, ev: &ProfileEvaluator) -> Result<()> {
    match ev.params().dimension() {
        Some(n) if n as usize == rho.dim() => Ok(()),
        _ => Err(Error::param("evaluator", format!("needs an evaluator for M_{}", rho.dim()))),
    }
}

/// J²(φρ) ≤ M_n(J(gρ)) · J(fρ).
pub fn verify_main_inequality(rho: &Density, ev: &ProfileEvaluator) -> Result<InequalitySlack> {
    check_evaluator(rho, ev)?;
    let o = origin(rho.dim());
    let w = j_functional(rho, KernelKind::G, &o)?.value;
    let phi = j_functional(rho, KernelKind::Phi, &o)?.value;
    let f = j_functional(rho, KernelKind::F, &o)?.value;
    Ok(InequalitySlack::new(phi * phi, ev.eval(w, Route::Auto)? * f, w))
}

/// (J(x₁|x|^{−n−2} ρ))² ≤ M_n(J(gρ)) · J(|x|^{−n−2} ρ).
pub fn verify_inverted_inequality(rho: &Density, ev: &ProfileEvaluator) -> Result<InequalitySlack> {
    check_evaluator(rho, ev)?;
    let o = origin(rho.dim());
    let w = j_functional(rho, KernelKind::G, &o)?.value;
    let phi = j_functional(rho, KernelKind::InvertedPhi, &o)?.value;
    let g2 = j_functional(rho, KernelKind::InvertedG, &o)?.value;
    Ok(InequalitySlack::new(phi * phi, ev.eval(w, Route::Auto)? * g2, w))
}

/// |∇U_ρ(x)|² ≤ (n−2)² M_n(V_ρ(x)) U_ρ(x), the pointwise form of the
/// inverted inequality; balls attain equality. ∇U comes from the five-point
/// central difference at steps h and h/2 combined by Richardson, with
/// h = dist(x, supp ρ)/16.
pub fn coulomb_estimate(rho: &Density, x: &[f64], ev: &ProfileEvaluator) -> Result<InequalitySlack> {
    check_evaluator(rho, ev)?;
    let n = rho.dim();
    let dist = rho.require_exterior(x)?;
    let u = u_rho(rho, x)?;
    let h = dist / 16.0;
    let mut p = x.to_vec();
    let mut derivative = |k: usize, step: f64| -> Result<f64> {
        let mut at = |offset: f64| -> Result<f64> {
            p[k] = x[k] + offset;
            let v = u_rho(rho, &p);
            p[k] = x[k];
            v
        };
        Ok((at(-2.0 * step)? - 8.0 * at(-step)? + 8.0 * at(step)? - at(2.0 * step)?) / (12.0 * step))
    };
    let mut grad2 = 0.0;
    for k in 0..n {
        let (coarse, fine) = (derivative(k, h)?, derivative(k, 0.5 * h)?);
        grad2 += ((16.0 * fine - coarse) / 15.0).powi(2);
    }
    let m = ev.eval(v_rho(rho, x)?, Route::Auto)?;
    Ok(InequalitySlack::new(grad2, (n as f64 - 2.0).powi(2) * m * u, u))
}

/// Compares membership in D(α, τ) with the superlevel set
/// {x : x₁/(|x|² + α²) > 1/(2τ)} at random points of a box around the ball.
pub fn bathtub_level_set_check(n: usize, alpha_param: f64, tau: f64, samples: usize, seed: u64) -> Result<VerificationReport> {
    if !(alpha_param > 0.0 && tau > alpha_param) {
        return Err(Error::param("tau", format!("need tau > alpha > 0, got alpha={alpha_param}, tau={tau}")));
    }
    if n < 2 {
        return Err(Error::UnsupportedDimension { dim: n, reason: "the level-set check needs n >= 2" });
    }
    let radius = ((tau - alpha_param) * (tau + alpha_param)).sqrt();
    let threshold = 0.5 / tau;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerificationReport::new("bathtub", CheckKind::Defect, 0.0)
        .param("n", n)
        .param("alpha", alpha_param)
        .param("tau", tau)
        .param("seed", seed);
    let (mut inside, mut skipped, mut mismatches) = (0usize, 0usize, 0usize);
    let mut x = vec![0.0; n];
    for _ in 0..samples {
        x[0] = rng.gen_range(-0.5 * tau..2.5 * tau);
        for xk in x.iter_mut().skip(1) {
            *xk = rng.gen_range(-1.5 * tau..1.5 * tau);
        }
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let h = x[0] / (r2 + alpha_param * alpha_param);
        if (h - threshold).abs() <= 1e-12 * threshold {
            skipped += 1;
            continue;
        }
        let dc2: f64 = (x[0] - tau).powi(2) + x[1..].iter().map(|v| v * v).sum::<f64>();
        let in_ball = dc2 < radius * radius;
        inside += usize::from(in_ball);
        let agree = in_ball == (h > threshold);
        if !agree {
            if mismatches == 0 {
                report.note("first_mismatch", json!({ "x": x, "h": h, "in_ball": in_ball }));
            }
            mismatches += 1;
        }
        report.record(if agree { 0.0 } else { 1.0 });
    }
    report.note("inside", inside);
    report.note("skipped_ties", skipped);
    report.note("mismatches", mismatches);
    Ok(report)
}
