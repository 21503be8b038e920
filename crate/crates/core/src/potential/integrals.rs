use serde::Serialize;

use super::density::{Ball, Density};
use super::grid::{grid_integrate, GridSums};
use super::{norm, sub};
use crate::error::{Error, Result};
use crate::profile::t_n;

/// Relative accuracy credited to closed forms that go through T_n.
const T_N_REL_ERROR: f64 = 1e-13;

/// Kernels h(y), y = ζ − x, for the normalized integral J.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// f(y) = |y|^{2−n}, identically 1 when n = 2
    F,
    /// g(y) = |y|^{−n}
    G,
    /// φ(y) = y₁ |y|^{−n}
    Phi,
    /// |y|^{−n−2}
    InvertedG,
    /// y₁ |y|^{−n−2}
    InvertedPhi,
}

impl KernelKind {
    pub fn eval(self, y: &[f64]) -> f64 {
        let n = y.len() as f64;
        let r2: f64 = y.iter().map(|v| v * v).sum();
        match self {
            KernelKind::F if y.len() == 2 => 1.0,
            KernelKind::F => r2.powf(1.0 - 0.5 * n),
            KernelKind::G => r2.powf(-0.5 * n),
            KernelKind::Phi => y[0] * r2.powf(-0.5 * n),
            KernelKind::InvertedG => r2.powf(-0.5 * n - 1.0),
            KernelKind::InvertedPhi => y[0] * r2.powf(-0.5 * n - 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizedIntegral {
    pub value: f64,
    pub abs_error: f64,
}

impl NormalizedIntegral {
    fn exact(value: f64) -> Self {
        NormalizedIntegral { value, abs_error: 0.0 }
    }
}

/// Closed-form J of one weighted ball seen from `base`.
///
/// f and φ follow from the mean-value property of harmonic functions, g
/// from T_n at tanh ξ = r/|c|, and the two inverted kernels from the
/// image ball under x ↦ x/|x|².
pub fn ball_integral(ball: &Ball, kernel: KernelKind, base: &[f64]) -> Result<f64> {
    let c = sub(&ball.center, base);
    let n = c.len() as i32;
    let d = norm(&c);
    let r = ball.radius;
    if d <= r {
        return Err(Error::InsideSupport { distance: d - r });
    }
    let rn = r.powi(n);
    let power = (d - r) * (d + r);
    let value = match kernel {
        KernelKind::F => rn / d.powi(n - 2),
        KernelKind::G => t_n(n as u32, (r / d).atanh())?,
        KernelKind::Phi => rn * c[0] / d.powi(n),
        KernelKind::InvertedG => rn / (power * power * d.powi(n - 2)),
        KernelKind::InvertedPhi => rn * c[0] / (power * d.powi(n)),
    };
    Ok(ball.weight * value)
}

fn check_grid_dim(rho: &Density) -> Result<()> {
    if rho.has_grid() && rho.dim() > 5 {
        return Err(Error::UnsupportedDimension { dim: rho.dim(), reason: "grid quadrature supports n <= 5" });
    }
    Ok(())
}

/// J(ρ h(· − base)).
pub fn j_functional(rho: &Density, kernel: KernelKind, base: &[f64]) -> Result<NormalizedIntegral> {
    j_functional_anchored(rho, kernel, base, base)
}

/// As [`j_functional`], with grid refinement placed around `anchor`.
pub fn j_functional_anchored(
    rho: &Density,
    kernel: KernelKind,
    base: &[f64],
    anchor: &[f64],
) -> Result<NormalizedIntegral> {
    rho.require_exterior(base)?;
    check_grid_dim(rho)?;
    let mut out = NormalizedIntegral::exact(0.0);
    for ball in rho.balls().iter().filter(|b| b.weight > 0.0) {
        let v = ball_integral(ball, kernel, base)?;
        out.value += v;
        if kernel == KernelKind::G {
            out.abs_error += T_N_REL_ERROR * v.abs();
        }
    }
    if let Some(grid) = rho.grid().filter(|_| rho.has_grid()) {
        let sums = grid_integrate(grid, base, anchor, 1, |y, o| o[0] = kernel.eval(y));
        out.value += sums.value[0];
        out.abs_error += sums.error[0];
    }
    Ok(out)
}

/// V_ρ(x) = J(ρ |· − x|^{−n}).
pub fn v_rho(rho: &Density, x: &[f64]) -> Result<f64> {
    Ok(j_functional(rho, KernelKind::G, x)?.value)
}

/// E_ρ(x) = exp(−2 V_ρ(x) / n).
pub fn e_rho(rho: &Density, x: &[f64]) -> Result<f64> {
    Ok((-2.0 * v_rho(rho, x)? / rho.dim() as f64).exp())
}

/// U_ρ(x) = J(ρ |· − x|^{2−n}), n ≥ 3.
pub fn u_rho(rho: &Density, x: &[f64]) -> Result<f64> {
    if rho.dim() < 3 {
        return Err(Error::UnsupportedDimension { dim: rho.dim(), reason: "the Coulomb potential needs n >= 3" });
    }
    Ok(j_functional(rho, KernelKind::F, x)?.value)
}

/// A = J(ρ (x − ζ) |x − ζ|^{−n−2}) and B = J(ρ |x − ζ|^{−n−2}).
///
/// ∇V = −n A, ΔV = 2n B and ∇E = 2 E A.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientIntegrals {
    pub a: Vec<f64>,
    pub b: f64,
}

pub fn gradient_integrals(rho: &Density, x: &[f64]) -> Result<GradientIntegrals> {
    let p = point_integrals(rho, x, x)?;
    Ok(GradientIntegrals { a: p.a, b: p.b.value })
}

/// Everything the pointwise checks need at one exterior point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointIntegrals {
    pub v: NormalizedIntegral,
    /// the finer midpoint value of V alone, without extrapolation
    pub v_fine: f64,
    pub a: Vec<f64>,
    pub a_error: f64,
    pub b: NormalizedIntegral,
    /// J(ρ f(· − x)); U_ρ(x) when n ≥ 3
    pub f: NormalizedIntegral,
}

pub fn point_integrals(rho: &Density, x: &[f64], anchor: &[f64]) -> Result<PointIntegrals> {
    rho.require_exterior(x)?;
    check_grid_dim(rho)?;
    let n = rho.dim();
    let mut out = PointIntegrals {
        v: NormalizedIntegral::exact(0.0),
        v_fine: 0.0,
        a: vec![0.0; n],
        a_error: 0.0,
        b: NormalizedIntegral::exact(0.0),
        f: NormalizedIntegral::exact(0.0),
    };
    for ball in rho.balls().iter().filter(|b| b.weight > 0.0) {
        let v = ball_integral(ball, KernelKind::G, x)?;
        out.v.value += v;
        out.v.abs_error += T_N_REL_ERROR * v;
        out.v_fine += v;
        out.f.value += ball_integral(ball, KernelKind::F, x)?;
        out.b.value += ball_integral(ball, KernelKind::InvertedG, x)?;
        // A = −J(y|y|^{−n−2}): the x₁ formula applied along every axis
        let c = sub(&ball.center, x);
        let d = norm(&c);
        let r = ball.radius;
        let scale = ball.weight * r.powi(n as i32) / ((d - r) * (d + r) * d.powi(n as i32));
        for (ak, ck) in out.a.iter_mut().zip(&c) {
            *ak -= scale * ck;
        }
    }
    if let Some(grid) = rho.grid().filter(|_| rho.has_grid()) {
        let sums: GridSums = grid_integrate(grid, x, anchor, n + 3, |y, o| {
            let r2: f64 = y.iter().map(|v| v * v).sum();
            let g = r2.powf(-0.5 * n as f64);
            let b = g / r2;
            o[0] = g;
            o[1] = if n == 2 { 1.0 } else { g * r2 };
            o[2] = b;
            for k in 0..n {
                o[3 + k] = -y[k] * b;
            }
        });
        out.v.value += sums.value[0];
        out.v.abs_error += sums.error[0];
        out.v_fine += sums.fine[0];
        out.f.value += sums.value[1];
        out.f.abs_error += sums.error[1];
        out.b.value += sums.value[2];
        out.b.abs_error += sums.error[2];
        for k in 0..n {
            out.a[k] += sums.value[3 + k];
        }
        out.a_error += norm(&sums.error[3..]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::cubature::{ball_cubature, CubatureOrder};
    use super::super::density::Grid;
    use super::*;
    use crate::profile::{t_n_inverse, ProfileEvaluator, Route};
    use proptest::prelude::*;

    fn ball_density(center: Vec<f64>, r: f64) -> Density {
        Density::ball(center, r).unwrap()
    }

    /// ball D(α, τ) with τ = α cosh ξ and radius α sinh ξ
    fn d_ball(n: usize, alpha: f64, xi: f64) -> Ball {
        let mut c = vec![0.0; n];
        c[0] = alpha * xi.cosh();
        Ball::new(c, alpha * xi.sinh(), 1.0)
    }

    #[test]
    fn ball_closed_forms_in_hyperbolic_parameters() {
        for n in 2..=5usize {
            let (alpha, xi) = (0.7, 1.3);
            let b = d_ball(n, alpha, xi);
            let o = vec![0.0; n];
            let (s, c) = (xi.sinh(), xi.cosh());
            let f = ball_integral(&b, KernelKind::F, &o).unwrap();
            let phi = ball_integral(&b, KernelKind::Phi, &o).unwrap();
            let g = ball_integral(&b, KernelKind::G, &o).unwrap();
            assert!((f - alpha * alpha * s.powi(n as i32) / c.powi(n as i32 - 2)).abs() < 1e-13 * f);
            assert!((phi - alpha * s.powi(n as i32) / c.powi(n as i32 - 1)).abs() < 1e-13 * phi);
            assert!((g - t_n(n as u32, xi).unwrap()).abs() < 1e-13 * g);
        }
    }

    #[test]
    fn closed_forms_match_cubature() {
        let cases: [(Vec<f64>, f64, Vec<f64>); 4] = [
            (vec![2.0, 0.5], 0.8, vec![0.1, -0.2]),
            (vec![1.5, -1.0, 0.5], 0.6, vec![0.0, 0.0, 0.0]),
            (vec![-2.0, 0.3, 0.4], 1.0, vec![0.5, 0.0, -0.3]),
            (vec![1.0, 2.0, 0.0, 0.5], 0.9, vec![0.0, 0.0, 0.0, 0.0]),
        ];
        for (c, r, x) in cases {
            let n = c.len();
            let ball = Ball::new(c.clone(), r, 1.0);
            for k in [KernelKind::F, KernelKind::G, KernelKind::Phi, KernelKind::InvertedG, KernelKind::InvertedPhi] {
                let exact = ball_integral(&ball, k, &x).unwrap();
                let quad = ball_cubature(&c, r, &x, |y| k.eval(y), CubatureOrder::default_for(n));
                let scale = exact.abs().max(ball_integral(&ball, KernelKind::G, &x).unwrap() * 1e-3);
                assert!((quad - exact).abs() < 1e-6 * scale, "n={n} {k:?}: {quad} vs {exact}");
            }
        }
    }

    #[test]
    fn single_ball_potential_inverts_to_volume_ratio() {
        // M_n(V) = (R/|x|)^n
        for n in 2..=5u32 {
            let ev = ProfileEvaluator::for_dimension(n).unwrap();
            let mut x = vec![0.0; n as usize];
            x[1] = 2.5;
            let rho = ball_density(vec![0.0; n as usize], 1.2);
            let v = v_rho(&rho, &x).unwrap();
            let m = ev.eval(v, Route::Auto).unwrap();
            assert!((m - (1.2f64 / 2.5).powi(n as i32)).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn n3_unit_ball_at_distance_two() {
        // V = w(1/8) with w(M) = ∫₀^M ds/(1 − s^{2/3}); Simpson after s = v³
        let steps = 100_000;
        let top = 0.5f64;
        let h = top / steps as f64;
        let f = |v: f64| 3.0 * v * v / (1.0 - v * v);
        let mut acc = f(0.0) + f(top);
        for i in 1..steps {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        let oracle = acc * h / 3.0;
        let rho = ball_density(vec![0.0; 3], 1.0);
        let v = v_rho(&rho, &[2.0, 0.0, 0.0]).unwrap();
        assert!((v - oracle).abs() < 1e-12, "{v} vs {oracle}");
        let e = e_rho(&rho, &[2.0, 0.0, 0.0]).unwrap();
        assert!((e - (-2.0 * oracle / 3.0).exp()).abs() < 1e-12);
    }

    #[test]
    fn n2_transform_of_disc() {
        let rho = ball_density(vec![0.0, 0.0], 1.0);
        for r in [1.1, 2.0, 7.0] {
            let e = e_rho(&rho, &[0.0, r]).unwrap();
            assert!((e - (1.0 - 1.0 / (r * r))).abs() < 1e-13);
        }
    }

    #[test]
    fn coulomb_potential_of_balls() {
        let rho = ball_density(vec![0.0, 0.0, 0.0], 1.5);
        let x = [0.0, 3.0, 4.0];
        assert!((u_rho(&rho, &x).unwrap() - 1.5f64.powi(3) / 5.0).abs() < 1e-14);
        assert!(u_rho(&ball_density(vec![0.0, 0.0], 1.0), &[3.0, 0.0]).is_err());
        // linearity against the quadrature oracle
        let two = Density::new(3)
            .unwrap()
            .with_ball(Ball::new(vec![2.0, 0.0, 0.0], 0.5, 1.0))
            .unwrap()
            .with_ball(Ball::new(vec![-1.0, 2.0, 0.0], 0.7, 1.0))
            .unwrap();
        let o = [0.0, 0.0, 0.0];
        let quad: f64 = two
            .balls()
            .iter()
            .map(|b| ball_cubature(&b.center, b.radius, &o, |y| KernelKind::F.eval(y), CubatureOrder::default_for(3)))
            .sum();
        assert!((u_rho(&two, &o).unwrap() - quad).abs() < 1e-10);
    }

    #[test]
    fn empty_density() {
        let rho = Density::new(3).unwrap();
        let x = [1.0, 0.0, 0.0];
        for k in [KernelKind::F, KernelKind::G, KernelKind::Phi] {
            assert_eq!(j_functional(&rho, k, &x).unwrap().value, 0.0);
        }
        assert_eq!(e_rho(&rho, &x).unwrap(), 1.0);
        let g = gradient_integrals(&rho, &x).unwrap();
        assert_eq!((g.a, g.b), (vec![0.0; 3], 0.0));
    }

    #[test]
    fn inside_support_is_rejected() {
        let rho = ball_density(vec![0.0, 0.0, 0.0], 1.0);
        assert!(matches!(v_rho(&rho, &[0.5, 0.0, 0.0]), Err(Error::InsideSupport { .. })));
        assert!(v_rho(&rho, &[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn symmetric_density_has_no_gradient() {
        let rho = Density::new(3)
            .unwrap()
            .with_ball(Ball::new(vec![2.0, 0.0, 0.0], 0.5, 1.0))
            .unwrap()
            .with_ball(Ball::new(vec![-2.0, 0.0, 0.0], 0.5, 1.0))
            .unwrap()
            .with_ball(Ball::new(vec![0.0, 3.0, 0.0], 0.4, 0.5))
            .unwrap()
            .with_ball(Ball::new(vec![0.0, -3.0, 0.0], 0.4, 0.5))
            .unwrap();
        let g = gradient_integrals(&rho, &[0.0, 0.0, 0.0]).unwrap();
        assert!(norm(&g.a) < 1e-15 && g.b > 0.0);
    }

    fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
        (0..x.len())
            .map(|k| {
                let mut p = x.to_vec();
                let mut m = x.to_vec();
                p[k] += h;
                m[k] -= h;
                (f(&p) - f(&m)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn gradient_of_v_and_e() {
        let rho = Density::new(3)
            .unwrap()
            .with_ball(Ball::new(vec![1.0, 0.5, 0.0], 0.5, 1.0))
            .unwrap()
            .with_ball(Ball::new(vec![-0.5, -1.5, 0.8], 0.6, 0.7))
            .unwrap();
        let x = [2.2, -0.4, 0.9];
        let g = gradient_integrals(&rho, &x).unwrap();
        let gv = fd_gradient(|p| v_rho(&rho, p).unwrap(), &x, 1e-4);
        let ge = fd_gradient(|p| e_rho(&rho, p).unwrap(), &x, 1e-4);
        let e = e_rho(&rho, &x).unwrap();
        for k in 0..3 {
            assert!((gv[k] + 3.0 * g.a[k]).abs() < 1e-7, "{gv:?} vs {:?}", g.a);
            assert!((ge[k] - 2.0 * e * g.a[k]).abs() < 1e-7);
        }
        // ΔV = 2n B
        let h = 1e-3;
        let v0 = v_rho(&rho, &x).unwrap();
        let mut lap = 0.0;
        for k in 0..3 {
            let mut p = x.to_vec();
            p[k] += h;
            let mut m = x.to_vec();
            m[k] -= h;
            lap += (v_rho(&rho, &p).unwrap() + v_rho(&rho, &m).unwrap() - 2.0 * v0) / (h * h);
        }
        assert!((lap - 6.0 * g.b).abs() < 1e-5 * g.b.max(1.0));
    }

    #[test]
    fn grid_rasterized_ball_approaches_closed_form() {
        let center = [2.0, 0.0, 0.0];
        let r = 0.6;
        let ball = Ball::new(center.to_vec(), r, 1.0);
        let h = 0.04;
        let cells = (2.0 * r / h).round() as usize + 2;
        let origin: Vec<f64> = center.iter().map(|c| c - r - h).collect();
        // cell values are volume fractions estimated on a 4³ subgrid
        let grid = Grid::sample(origin, h, vec![cells; 3], |p| {
            let mut inside = 0;
            for i in 0..64 {
                let q = [
                    p[0] + ((i % 4) as f64 - 1.5) * h / 4.0,
                    p[1] + ((i / 4 % 4) as f64 - 1.5) * h / 4.0,
                    p[2] + ((i / 16) as f64 - 1.5) * h / 4.0,
                ];
                if ball.contains(&q) {
                    inside += 1;
                }
            }
            inside as f64 / 64.0
        })
        .unwrap();
        let rho = Density::new(3).unwrap().with_grid(grid).unwrap();
        let o = [0.0, 0.0, 0.0];
        for k in [KernelKind::F, KernelKind::G, KernelKind::Phi] {
            let exact = ball_integral(&ball, k, &o).unwrap();
            let got = j_functional(&rho, k, &o).unwrap();
            assert!((got.value - exact).abs() < 2e-3 * exact, "{k:?}: {} vs {exact}", got.value);
        }
    }

    #[test]
    fn extremal_ball_normalization() {
        for n in 2..=5u32 {
            let w = 1.0;
            let xi = t_n_inverse(n, w).unwrap();
            let alpha = (xi.cosh().powi(n as i32 - 2) / xi.sinh().powi(n as i32)).sqrt();
            let b = d_ball(n as usize, alpha, xi);
            let o = vec![0.0; n as usize];
            assert!((ball_integral(&b, KernelKind::F, &o).unwrap() - 1.0).abs() < 1e-13);
            assert!((ball_integral(&b, KernelKind::G, &o).unwrap() - w).abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn homothety_invariance(a in 0.2f64..5.0, cx in 1.2f64..4.0, cy in -2.0f64..2.0, r in 0.1f64..1.0) {
            let rho = Density::ball(vec![cx, cy, 0.3], r).unwrap();
            let o = [0.0, 0.0, 0.0];
            let ratio = |d: &Density| {
                let phi = j_functional(d, KernelKind::Phi, &o).unwrap().value;
                phi * phi / j_functional(d, KernelKind::F, &o).unwrap().value
            };
            let scaled = rho.scaled(a);
            prop_assert!((ratio(&scaled) / ratio(&rho) - 1.0).abs() < 1e-12);
            let g0 = j_functional(&rho, KernelKind::G, &o).unwrap().value;
            let g1 = j_functional(&scaled, KernelKind::G, &o).unwrap().value;
            prop_assert!((g0 - g1).abs() < 1e-12 * g0);
        }

        #[test]
        fn linearity_of_disjoint_pieces(d1 in 2.0f64..4.0, d2 in 5.0f64..7.0, w1 in 0.1f64..1.0) {
            let b1 = Ball::new(vec![d1, 0.0], 0.5, w1);
            let b2 = Ball::new(vec![0.0, -d2], 1.0, 1.0);
            let both = Density::new(2).unwrap().with_ball(b1.clone()).unwrap().with_ball(b2.clone()).unwrap();
            let o = [0.0, 0.0];
            for k in [KernelKind::F, KernelKind::G, KernelKind::Phi, KernelKind::InvertedG] {
                let sum = ball_integral(&b1, k, &o).unwrap() + ball_integral(&b2, k, &o).unwrap();
                prop_assert!((j_functional(&both, k, &o).unwrap().value - sum).abs() <= 1e-14 * sum.abs().max(1.0));
            }
        }

        #[test]
        fn inverted_kernels_are_kernels_of_the_image(cx in 0.5f64..3.0, cy in -2.0f64..2.0, r in 0.05f64..0.45) {
            let ball = Ball::new(vec![cx, cy, 0.2], r, 1.0);
            let img = ball.inverted().unwrap();
            let o = [0.0, 0.0, 0.0];
            let pairs = [
                (KernelKind::InvertedG, KernelKind::F),
                (KernelKind::InvertedPhi, KernelKind::Phi),
                (KernelKind::G, KernelKind::G),
            ];
            for (k, k_img) in pairs {
                let a = ball_integral(&ball, k, &o).unwrap();
                let b = ball_integral(&img, k_img, &o).unwrap();
                prop_assert!((a - b).abs() < 1e-11 * a.abs().max(b.abs()), "{:?}: {} vs {}", k, a, b);
            }
        }
    }
}
