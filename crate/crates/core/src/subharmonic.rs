//! Finite-difference Laplacians of the transformed potentials off the
//! support, the pointwise inequality behind their sign, and the composed
//! transform 𝔼_ρ = 1 − M_n(V_ρ).
//!
//! For n = 2 the E-form ln(1 − E_ρ) and the M-form ln M_2(V_ρ) coincide,
//! since M_2(V) = 1 − e^{−V} = 1 − E_ρ.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::{point_integrals, Density, PointIntegrals};
use crate::profile::{ProfileEvaluator, Route, TaylorProfile};
use crate::variational::{sample_rng, InequalitySlack};

/// Largest stencil step; the step is also capped at dist(x, supp ρ)/8.
pub const MAX_STEP: f64 = 0.05;
/// Relative accuracy assumed for potential-derived field values.
pub const FIELD_NOISE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    /// ln(1 − E_ρ) for n = 2, (1 − E_ρ)^{(n−2)/n}/(n−2) for n ≥ 3
    #[serde(rename = "e-form")]
    EForm,
    /// ln M_2(V_ρ) for n = 2, M_n(V_ρ)^{(n−2)/n} for n ≥ 3
    #[serde(rename = "m-form")]
    MForm,
}

impl std::str::FromStr for FieldKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" | "e-form" => Ok(FieldKind::EForm),
            "m" | "m-form" => Ok(FieldKind::MForm),
            other => Err(Error::param("form", format!("unknown field form `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplacianEstimate {
    pub value: f64,
    pub stencil_h: f64,
    /// |L_h − L_{h/2}|/3 plus the propagated roundoff of the field values
    pub richardson_error: f64,
    /// change of the Laplacian when the field is built from unextrapolated
    /// quadrature; zero for closed-form densities
    pub integral_error: f64,
}

impl LaplacianEstimate {
    pub fn error_budget(&self) -> f64 {
        self.richardson_error + self.integral_error
    }
}

fn stencil_sum<F: FnMut(&[f64]) -> Result<f64>>(field: &mut F, x: &[f64], h: f64, centre: f64) -> Result<f64> {
    let mut p = x.to_vec();
    let mut acc = 0.0;
    for k in 0..x.len() {
        p[k] = x[k] + h;
        let plus = field(&p)?;
        p[k] = x[k] - h;
        let minus = field(&p)?;
        p[k] = x[k];
        acc += plus + minus - 2.0 * centre;
    }
    Ok(acc / (h * h))
}

/// Central-difference Laplacian on the 2n+1 point stencil, extrapolated
/// from steps h and h/2. `rel_noise` is the relative accuracy of the
/// field values and feeds a roundoff floor into the error.
pub fn fd_laplacian_with_noise<F>(mut field: F, x: &[f64], h: f64, rel_noise: f64) -> Result<LaplacianEstimate>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if !(h > 0.0) {
        return Err(Error::param("h", format!("{h} must be positive")));
    }
    let centre = field(x)?;
    let coarse = stencil_sum(&mut field, x, h, centre)?;
    let fine = stencil_sum(&mut field, x, 0.5 * h, centre)?;
    let n = x.len() as f64;
    let delta = rel_noise.max(4.0 * f64::EPSILON) * centre.abs().max(f64::MIN_POSITIVE);
    let roundoff = 68.0 * n * delta / (3.0 * h * h);
    Ok(LaplacianEstimate {
        value: (4.0 * fine - coarse) / 3.0,
        stencil_h: h,
        richardson_error: (fine - coarse).abs() / 3.0 + roundoff,
        integral_error: 0.0,
    })
}

pub fn fd_laplacian<F>(field: F, x: &[f64], h: f64) -> Result<LaplacianEstimate>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    fd_laplacian_with_noise(field, x, h, 0.0)
}

fn check_evaluator(n: usize, ev: &ProfileEvaluator) -> Result<()> {
    match ev.params().dimension() {
        Some(m) if m as usize == n => Ok(()),
        _ => Err(Error::param("evaluator", format!("needs an evaluator for M_{n}"))),
    }
}

/// Field value from a potential V.
fn field_of(form: FieldKind, n: usize, v: f64, ev: &ProfileEvaluator) -> Result<f64> {
    let nf = n as f64;
    Ok(match (form, n) {
        (_, 2) => (-(-v).exp_m1()).ln(),
        (FieldKind::EForm, _) => (-(-2.0 * v / nf).exp_m1()).powf((nf - 2.0) / nf) / (nf - 2.0),
        (FieldKind::MForm, _) => ev.eval(v, Route::Auto)?.powf((nf - 2.0) / nf),
    })
}

/// The stencil step used at `x`.
pub fn stencil_step(rho: &Density, x: &[f64]) -> Result<f64> {
    let dist = rho.require_exterior(x)?;
    Ok(MAX_STEP.min(dist / 8.0))
}

/// Δ(field)(x) by finite differences; grid refinement stays anchored at x.
pub fn subharmonic_defect(rho: &Density, x: &[f64], form: FieldKind, ev: &ProfileEvaluator) -> Result<LaplacianEstimate> {
    let n = rho.dim();
    check_evaluator(n, ev)?;
    let h = stencil_step(rho, x)?;
    let dist = rho.support_distance(x);
    if dist < 8.0 * h - 1e-15 {
        return Err(Error::StencilIntersectsSupport { step: h, distance: dist });
    }
    let anchor = x.to_vec();
    let field = |p: &[f64], fine: bool| -> Result<f64> {
        let pi = point_integrals(rho, p, &anchor)?;
        field_of(form, n, if fine { pi.v_fine } else { pi.v.value }, ev)
    };
    let mut est = fd_laplacian_with_noise(|p| field(p, false), x, h, FIELD_NOISE)?;
    if rho.has_grid() {
        let alt = fd_laplacian_with_noise(|p| field(p, true), x, h, FIELD_NOISE)?;
        est.integral_error = (alt.value - est.value).abs();
    }
    Ok(est)
}

/// (1 − ((n−2)/n) E_ρ)|A|² ≤ (1 − E_ρ) B at an exterior point.
pub fn pointwise_inequality_check(rho: &Density, x: &[f64]) -> Result<InequalitySlack> {
    let p = point_integrals(rho, x, x)?;
    let nf = rho.dim() as f64;
    let e = (-2.0 * p.v.value / nf).exp();
    let one_minus_e = -(-2.0 * p.v.value / nf).exp_m1();
    let a2: f64 = p.a.iter().map(|v| v * v).sum();
    Ok(InequalitySlack::new((1.0 - (nf - 2.0) / nf * e) * a2, one_minus_e * p.b.value, p.v.value))
}

/// Δ of either field in closed form from V, A and B:
///
/// E-form: (4E/n)(1−E)^{p−2} [(1−E)B − (1 − ((n−2)/n)E)|A|²], p = (n−2)/n;
/// M-form: 2(n−2) M^{p−2} (1 − M^{2/n}) [M B − |A|²];
/// n = 2:  4E [(1−E)B − |A|²] / (1−E)².
pub fn analytic_laplacian(p: &PointIntegrals, n: usize, form: FieldKind, ev: &ProfileEvaluator) -> Result<f64> {
    let nf = n as f64;
    let v = p.v.value;
    let a2: f64 = p.a.iter().map(|x| x * x).sum();
    let b = p.b.value;
    let e = (-2.0 * v / nf).exp();
    let one_minus_e = -(-2.0 * v / nf).exp_m1();
    if n == 2 {
        return Ok(4.0 * e * (one_minus_e * b - a2) / (one_minus_e * one_minus_e));
    }
    let pw = (nf - 2.0) / nf;
    Ok(match form {
        FieldKind::EForm => {
            4.0 * e / nf * one_minus_e.powf(pw - 2.0) * (one_minus_e * b - (1.0 - pw * e) * a2)
        }
        FieldKind::MForm => {
            let m = ev.eval(v, Route::Auto)?;
            2.0 * (nf - 2.0) * m.powf(pw - 2.0) * (1.0 - m.powf(2.0 / nf)) * (m * b - a2)
        }
    })
}

/// The bracket M_n(V)B − |A|² deciding the sign of Δ(M-form), compared
/// with the finite-difference Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignBridge {
    pub laplacian: LaplacianEstimate,
    pub bracket: f64,
    /// `None` when either quantity is within ten error bars of zero
    pub agree: Option<bool>,
}

pub fn sign_bridge(rho: &Density, x: &[f64], ev: &ProfileEvaluator) -> Result<SignBridge> {
    let laplacian = subharmonic_defect(rho, x, FieldKind::MForm, ev)?;
    let p = point_integrals(rho, x, x)?;
    let m = ev.eval(p.v.value, Route::Auto)?;
    let a2: f64 = p.a.iter().map(|v| v * v).sum();
    let bracket = m * p.b.value - a2;
    let bracket_err = 1e-12 * (m * p.b.value).abs()
        + m * p.b.abs_error
        + 2.0 * a2.sqrt() * p.a_error
        + p.v.abs_error * p.b.value;
    let decided = laplacian.value.abs() > 10.0 * laplacian.error_budget() && bracket.abs() > 10.0 * bracket_err;
    let agree = decided.then(|| (laplacian.value > 0.0) == (bracket > 0.0));
    Ok(SignBridge { laplacian, bracket, agree })
}

/// 𝔼_ρ(x) = 1 − M_n(V_ρ(x)).
pub fn composed_transform(rho: &Density, x: &[f64], ev: &ProfileEvaluator) -> Result<f64> {
    check_evaluator(rho.dim(), ev)?;
    let v = point_integrals(rho, x, x)?.v.value;
    ev.complement(v, Route::Auto)
}

/// 𝔼_ρ(x) − φ_{2/n}(E_ρ(x)) with φ summed from its Taylor series, which
/// must be truncated at an order whose tail bound is below `tolerance`.
pub fn composed_identity_defect(
    rho: &Density,
    x: &[f64],
    ev: &ProfileEvaluator,
    series: &TaylorProfile,
    tolerance: f64,
) -> Result<f64> {
    let n = rho.dim() as f64;
    let v = point_integrals(rho, x, x)?.v.value;
    let big_e = ev.complement(v, Route::Auto)?;
    let e = (-2.0 * v / n).exp();
    Ok(big_e - series.eval(e, tolerance)?)
}

/// `count` seeded points on spheres of radii {1.5, 2, 4} × the enclosing
/// radius of supp ρ, centred at its bounding-box centre.
pub fn exterior_points(rho: &Density, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    exterior_points_at(rho, count, seed, &[1.5, 2.0, 4.0])
}

pub fn exterior_points_at(rho: &Density, count: usize, seed: u64, factors: &[f64]) -> Result<Vec<Vec<f64>>> {
    let (centre, radius) =
        rho.enclosing_sphere().ok_or_else(|| Error::Degenerate("the zero density has no exterior sampler".into()))?;
    let n = rho.dim();
    let mut rng = sample_rng(seed, u64::MAX);
    Ok((0..count)
        .map(|i| {
            let r = factors[i % factors.len()] * radius;
            let mut v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let len = v.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-300);
            for (k, vk) in v.iter_mut().enumerate() {
                *vk = centre[k] + r * *vk / len;
            }
            v
        })
        .collect())
}
