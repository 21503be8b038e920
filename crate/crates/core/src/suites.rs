//! Named verification suites behind `xtransform verify <suite>`.
//!
//! Every suite is deterministic in its configuration: randomness comes from
//! `seed` through per-sample streams, and parallel work is collected in
//! sample order before it touches the report.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::moments::{
    exp_transform_sequence, hankel_determinants, j_fraction, l_sequence_check, random_rational,
    random_rational_sequence, reciprocal_shift, MomentSequence, Scalar, Termination,
};
use crate::potential::{Ball, Density};
use crate::profile::{
    complete_monotonicity_check, subadditivity_check, t_n, MonotoneConfig, ProfileEvaluator, ProfileParams,
};
use crate::report::{CheckKind, VerificationReport};
use crate::subharmonic::{exterior_points, exterior_points_at, subharmonic_defect, FieldKind};
use crate::variational::{
    bathtub_level_set_check, default_tolerance, extremal_ball, phi_functional, random_ball_density, sample_rng,
    verify_inverted_inequality, verify_main_inequality, InequalitySlack, CLOSED_FORM_TOLERANCE,
};

/// Inputs shared by all suites; each suite reads the fields it needs.
#[derive(Debug, Clone, Default)]
pub struct SuiteConfig {
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub w: Option<f64>,
    pub xi: Option<f64>,
    pub radius: Option<f64>,
    pub density: Option<Density>,
    pub seq: Option<MomentSequence>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub tol: Option<f64>,
}

/// Per-point rows for the subharmonic suite.
#[derive(Debug, Clone, PartialEq)]
pub struct Details {
    pub csv: String,
    pub summary: Value,
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub report: VerificationReport,
    pub details: Option<Details>,
}

impl From<VerificationReport> for SuiteOutcome {
    fn from(report: VerificationReport) -> Self {
        SuiteOutcome { report, details: None }
    }
}

pub trait Suite: Send + Sync {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn run(&self, config: &SuiteConfig) -> Result<SuiteOutcome>;
}

pub fn registry() -> BTreeMap<&'static str, Box<dyn Suite>> {
    let suites: Vec<Box<dyn Suite>> = vec![
        Box::new(Subharmonic),
        Box::new(HarmonicBall),
        Box::new(Inequality { inverted: false }),
        Box::new(Inequality { inverted: true }),
        Box::new(Extremal),
        Box::new(Monotone),
        Box::new(Bathtub),
        Box::new(Moments),
    ];
    suites.into_iter().map(|s| (s.name(), s)).collect()
}

pub fn find(name: &str) -> Option<Box<dyn Suite>> {
    registry().remove(name)
}

fn dimension(config: &SuiteConfig, default: usize) -> Result<usize> {
    let n = config.density.as_ref().map(Density::dim).or(config.n).unwrap_or(default);
    if let (Some(d), Some(m)) = (config.density.as_ref(), config.n) {
        if d.dim() != m {
            return Err(Error::param("n", format!("--n {m} disagrees with the density dimension {}", d.dim())));
        }
    }
    if n < 2 {
        return Err(Error::param("n", "this suite needs n >= 2"));
    }
    Ok(n)
}

fn evaluator(n: usize) -> Result<ProfileEvaluator> {
    ProfileEvaluator::for_dimension(n as u32)
}

/// `w` directly, or T_n(ξ).
fn parameter_w(config: &SuiteConfig, n: usize) -> Result<Option<f64>> {
    match (config.w, config.xi) {
        (Some(_), Some(_)) => Err(Error::param("w", "give either --w or --xi, not both")),
        (Some(w), None) => Ok(Some(w)),
        (None, Some(xi)) => t_n(n as u32, xi).map(Some),
        (None, None) => Ok(None),
    }
}

struct Subharmonic;

impl Suite for Subharmonic {
    fn name(&self) -> &'static str {
        "subharmonic"
    }

    fn describe(&self) -> &'static str {
        "Laplacians of both transformed fields are nonnegative off the support, up to the error budget"
    }

    fn run(&self, config: &SuiteConfig) -> Result<SuiteOutcome> {
        let n = dimension(config, 3)?;
        let ev = evaluator(n)?;
        let rho = match &config.density {
            Some(d) => d.clone(),
            None => random_ball_density(&mut sample_rng(config.seed, 0), n),
        };
        let samples = config.samples.unwrap_or(100);
        let tol = config.tol.unwrap_or(0.0);
        let points = exterior_points(&rho, samples, config.seed)?;
        let rows: Vec<(usize, FieldKind, f64, f64)> = points
            .par_iter()
            .enumerate()
            .map(|(i, x)| {
                [FieldKind::EForm, FieldKind::MForm]
                    .into_iter()
                    .map(|form| subharmonic_defect(&rho, x, form, &ev).map(|d| (i, form, d.value, d.error_budget())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        let mut report = VerificationReport::new(self.name(), CheckKind::Slack, tol)
            .param("n", n)
            .param("seed", config.seed)
            .param("points", samples)
            .param("density", if config.density.is_some() { "file" } else { "random" });
        let mut csv = String::from("x,field,laplacian,error,pass\n");
        let mut failures = 0usize;
        for &(i, form, lap, err) in &rows {
            let slack = lap + err;
            report.record(slack);
            let pass = report.passes(slack);
            failures += usize::from(!pass);
            let coords: Vec<String> = points[i].iter().map(|c| format!("{c:.17e}")).collect();
            let field = match form {
                FieldKind::EForm => "e-form",
                FieldKind::MForm => "m-form",
            };
            csv.push_str(&format!("{},{field},{lap:.17e},{err:.17e},{pass}\n", coords.join(" ")));
        }
        report.note("failures", failures);
        let summary = json!({
            "schema": crate::report::REPORT_SCHEMA,
            "suite": self.name(),
            "rows": rows.len(),
            "failures": failures,
            "worst_slack": report.worst_slack_or_defect,
            "pass": report.pass,
        });
        Ok(SuiteOutcome { report, details: Some(Details { csv, summary }) })
    }
}

struct HarmonicBall;

impl Suite for HarmonicBall {
    fn name(&self) -> &'static str {
        "harmonic-ball"
    }

    fn describe(&self) -> &'static str {
        "the M-form field of a single ball is harmonic outside it: |Laplacian| <= 3 x Richardson error"
    }

    fn run(&self, config: &SuiteConfig) -> Result<SuiteOutcome> {
        let n = dimension(config, 2)?;
        let radius = config.radius.unwrap_or(1.0);
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::param("R", format!("{radius} is not a positive radius")));
        }
        let ev = evaluator(n)?;
        let rho = Density::new(n)?.with_ball(Ball::new(vec![0.0; n], radius, 1.0))?;
        let samples = config.samples.unwrap_or(50);
        let points = exterior_points_at(&rho, samples, config.seed, &[2.0, 3.0, 4.0])?;
        let slacks: Vec<f64> = points
            .par_iter()
            .map(|x| subharmonic_defect(&rho, x, FieldKind::MForm, &ev).map(|d| 3.0 * d.richardson_error - d.value.abs()))
            .collect::<Result<_>>()?;
        let mut report = VerificationReport::new(self.name(), CheckKind::Slack, config.tol.unwrap_or(0.0))
            .param("n", n)
            .param("R", radius)
            .param("seed", config.seed);
        for s in slacks {
            report.record(s);
        }
        Ok(report.into())
    }
}

struct Inequality {
    inverted: bool,
}

impl Suite for Inequality {
    fn name(&self) -> &'static str {
        if self.inverted {
            "inverted-inequality"
        } else {
            "inequality"
        }
    }

    fn describe(&self) -> &'static str {
        if self.inverted {
            "the inverted sharp inequality on a density file or seeded random densities"
        } else {
            "the sharp inequality J(phi rho)^2 <= M_n(J(g rho)) J(f rho) on a density file or seeded random densities"
        }
    }

    fn run(&self, config: &SuiteConfig) -> Result<SuiteOutcome> {
        let n = dimension(config, 3)?;
        let ev = evaluator(n)?;
        let check = |rho: &Density| -> Result<InequalitySlack> {
            if self.inverted {
                verify_inverted_inequality(rho, &ev)
            } else {
                verify_main_inequality(rho, &ev)
            }
        };
        let (slacks, tol) = match &config.density {
            Some(rho) => (vec![check(rho)?], config.tol.unwrap_or(default_tolerance(rho))),
            None => {
                let samples = config.samples.unwrap_or(1000);
                let slacks = (0..samples as u64)
                    .into_par_iter()
                    .map(|i| check(&random_ball_density(&mut sample_rng(config.seed, i), n)))
                    .collect::<Result<Vec<_>>>()?;
                (slacks, config.tol.unwrap_or(CLOSED_FORM_TOLERANCE))
            }
        };
        let mut report = VerificationReport::new(self.name(), CheckKind::Slack, tol)
            .param("n", n)
            .param("seed", config.seed)
            .param("density", if config.density.is_some() { "file" } else { "random" });
        let mut worst: Option<InequalitySlack> = None;
        for s in &slacks {
            report.record(s.normalized());
            if worst.map_or(true, |w| s.normalized() < w.normalized()) {
                worst = Some(*s);
            }
        }
        if let Some(w) = worst {
            report.note("worst", serde_json::to_value(w).expect("plain data serializes"));
        }
        Ok(report.into())
    }
}

struct Extremal;

impl Suite for Extremal {
    fn name(&self) -> &'static str {
        "extremal"
    }

    fn describe(&self) -> &'static str {
        "the extremal ball attains equality: |Phi - M_n(w)| within tolerance (sweeps n, w when not given)"
    }

    fn run(&self, config: &SuiteConfig) -> Result<SuiteOutcome> {
        let tol = config.tol.unwrap_or(1e-10);
        let mut report = VerificationReport::new(self.name(), CheckKind::Defect, tol);
        let dims: Vec<usize> = match config.n {
            Some(n) => vec![dimension(config, n)?],
            None => (2..=5).collect(),
        };
        let mut cases = Vec::new();
        for &n in &dims {
            let ev = evaluator(n)?;
            let ws = match parameter_w(config, n)? {
                Some(w) => vec![w],
                None => vec![0.1, 0.5, 1.0, 2.0, 5.0],
            };
            for w in ws {
                let ball = extremal_ball(n, w)?;
                let phi = phi_functional(&ball.density())?;
                let m = ev.eval(w, crate::profile::Route::Auto)?;
                report.record(phi - m);
                cases.push(json!({ "n": n, "w": w, "phi": phi, "m": m, "alpha": ball.alpha_param, "tau": ball.tau }));
            }
        }
        report = report.param("seed", config.seed);
        report.note("cases", cases);
        Ok(report.into())
    }
}

struct Monotone;

impl Suite for Monotone {
    fn name(&self) -> &'static str {
        "monotone"
    }

    fn describe(&self) -> &'static str {
        "finite differences of 1 - F_alpha alternate in sign up to order 8, and 1 - F_alpha is supermultiplicative"
    }

    fn run(&self, config: &SuiteConfig) -> Result<SuiteOutcome> {
        let params: Vec<ProfileParams> = match (config.alpha, config.n) {
            (Some(_), Some(_)) => return Err(Error::param("alpha", "give either --alpha or --n, not both")),
            (Some(a), None) => vec![ProfileParams::from_alpha(a)?],
            (None, Some(n)) => vec![ProfileParams::from_dimension(n as u32)?],
            (None, None) => [0.25, 0.5, 2.0 / 3.0, 1.0].iter().map(|&a| ProfileParams::from_alpha(a)).collect::<Result<_>>()?,
        };
        let mut report = VerificationReport::new(self.name(), CheckKind::Slack, config.tol.unwrap_or(1e-12));
        let grid: Vec<f64> = (0..20).map(|i| i as f64 * 0.25).collect();
        let mut runs = Vec::new();
        for p in params {
            let ev = ProfileEvaluator::new(p)?;
            let mono = complete_monotonicity_check(&ev, &MonotoneConfig::default())?;
            let sub = subadditivity_check(&ev, &grid)?;
            runs.push(json!({
                "alpha": p.alpha(),
                "monotone": { "pass": mono.pass, "worst": mono.worst_slack_or_defect, "violations": mono.findings.get("violations") },
                "subadditive": { "pass": sub.pass, "worst": sub.worst_slack_or_defect },
            }));
            report.absorb(&mono);
            report.absorb(&sub);
        }
        report.note("runs", runs);
        Ok(report.into())
    }
}

struct Bathtub;

impl Suite for Bathtub {
    fn name(&self) -> &'static str {
        "bathtub"
    }

    fn describe(&self) -> &'static str {
        "the extremal ball coincides with the superlevel set of x1/(|x|^2 + alpha^2)"
    }

    fn run(&self, config: &SuiteConfig) -> Result<SuiteOutcome> {
        let n = dimension(config, 3)?;
        let w = parameter_w(config, n)?.unwrap_or(1.0);
        let ball = extremal_ball(n, w)?;
        let alpha = config.alpha.unwrap_or(ball.alpha_param);
        let mut report = bathtub_level_set_check(n, alpha, ball.tau, config.samples.unwrap_or(10_000), config.seed)?;
        report.params.insert("w".into(), json!(w));
        Ok(report.into())
    }
}

struct Moments;

impl Moments {
    /// Consistency checks on a user sequence s; psd of a = exp transform of
    /// s is the finite-order L-sequence condition.
    fn check_sequence(&self, s: &MomentSequence, report: &mut VerificationReport) -> Result<()> {
        if s.is_empty() {
            return Err(Error::Arity { needed: 1, have: 0 });
        }
        let order = (s.len() - 1) / 2;
        let a = exp_transform_sequence(s);
        let ha = hankel_determinants(&a, order)?;
        let l = l_sequence_check(s, order)?;
        report.record(f64::from(u8::from(!ha.all_psd())));
        report.record(f64::from(u8::from(!l.hankel.all_psd())));
        // 1/b̂ = 2/â − 1
        if !a.coeffs()[0].is_zero() {
            let shifted = reciprocal_shift(&a.scaled(&BigRational::from_ratio(1, 2)), &BigRational::from_i64(-1))?;
            report.record(f64::from(u8::from(shifted != l.b)));
        }
        let j = j_fraction(&a, order);
        let known = match j.termination {
            Termination::Complete | Termination::Finite { .. } => j.alphas.len(),
            Termination::Singular { depth } | Termination::Exhausted { depth } => depth,
        };
        for m in 0..known.min(order + 1) {
            report.record(f64::from(u8::from(j.determinant(m).as_ref() != Some(&ha.determinants[m]))));
        }
        report.note("a", a.to_strings());
        report.note("b", l.b.to_strings());
        report.note("hankel_a", ha.to_json());
        report.note("hankel_b", l.hankel.to_json());
        report.note("j_fraction", j.to_json());
        Ok(())
    }

    fn builtin(&self, seed: u64, report: &mut VerificationReport) -> Result<()> {
        let mut checks = BTreeMap::new();
        let unit = MomentSequence::unit_interval(11);
        let delta = MomentSequence::from_fn(11, |k| Scalar::from_i64(i64::from(k == 0)));
        checks.insert("exp_transform_unit_interval", exp_transform_sequence(&unit) == delta);

        let mut preserved = true;
        for i in 0..50 {
            let mut rng = sample_rng(seed, i);
            let a = random_rational_sequence(&mut rng, 11);
            let c = random_rational(&mut rng);
            let b = reciprocal_shift(&a, &c)?;
            preserved &= hankel_determinants(&a, 5)?.determinants == hankel_determinants(&b, 5)?.determinants;
        }
        checks.insert("shift_preserves_determinants", preserved);

        let hilbert = hankel_determinants(&unit, 4)?;
        let j = j_fraction(&unit, 4);
        let product = (0..=4).all(|m| j.determinant(m).as_ref() == Some(&hilbert.determinants[m]));
        checks.insert("j_fraction_product_formula", product && j.termination == Termination::Complete);

        let l = l_sequence_check(&unit, 5)?;
        let geometric = MomentSequence::from_fn(11, |k| Scalar::from_ratio(1, 1i64 << (k + 1)));
        checks.insert("l_sequence_unit_interval", l.b == geometric && l.hankel.all_psd());

        for &ok in checks.values() {
            report.record(f64::from(u8::from(!ok)));
        }
        report.note("checks", serde_json::to_value(&checks).expect("plain data serializes"));
        Ok(())
    }
}

impl Suite for Moments {
    fn name(&self) -> &'static str {
        "moments"
    }

    fn describe(&self) -> &'static str {
        "exact Hankel, J-fraction and L-sequence checks on --seq, or the built-in rational battery"
    }

    fn run(&self, config: &SuiteConfig) -> Result<SuiteOutcome> {
        let mut report =
            VerificationReport::new(self.name(), CheckKind::Defect, 0.0).param("arithmetic", "exact-rational");
        match &config.seq {
            Some(s) => {
                report = report.param("length", s.len());
                self.check_sequence(s, &mut report)?;
            }
            None => {
                report = report.param("seed", config.seed);
                self.builtin(config.seed, &mut report)?;
            }
        }
        Ok(report.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_has_every_suite() {
        let names: Vec<&str> = registry().keys().copied().collect();
        assert_eq!(
            names,
            ["bathtub", "extremal", "harmonic-ball", "inequality", "inverted-inequality", "moments", "monotone", "subharmonic"]
        );
        assert!(find("nope").is_none());
    }

    #[test]
    fn quick_suites_pass_and_repeat() {
        let cfg = SuiteConfig { n: Some(3), samples: Some(20), seed: 3, ..Default::default() };
        for name in ["inequality", "inverted-inequality", "bathtub", "moments"] {
            let a = find(name).unwrap().run(&cfg).unwrap();
            let b = find(name).unwrap().run(&cfg).unwrap();
            assert!(a.report.pass, "{name}: {}", a.report.to_json());
            assert_eq!(a.report.to_json(), b.report.to_json());
        }
        let ext = find("extremal").unwrap().run(&SuiteConfig { n: Some(3), w: Some(1.0), ..Default::default() }).unwrap();
        assert!(ext.report.pass && ext.report.samples == 1);
    }

    #[test]
    fn moments_rejects_non_l_sequences() {
        let good = SuiteConfig { seq: Some(MomentSequence::parse("1, 1/2, 1/3, 1/4, 1/5").unwrap()), ..Default::default() };
        assert!(find("moments").unwrap().run(&good).unwrap().report.pass);
        let bad = SuiteConfig { seq: Some(MomentSequence::parse("2, 1, 2/3, 1/2, 2/5").unwrap()), ..Default::default() };
        assert!(!find("moments").unwrap().run(&bad).unwrap().report.pass);
    }

    #[test]
    fn monotone_flags_alpha_above_one() {
        let cfg = SuiteConfig { alpha: Some(1.5), ..Default::default() };
        assert!(!find("monotone").unwrap().run(&cfg).unwrap().report.pass);
        let cfg = SuiteConfig { alpha: Some(0.5), ..Default::default() };
        assert!(find("monotone").unwrap().run(&cfg).unwrap().report.pass);
    }

    #[test]
    fn subharmonic_details_have_a_row_per_point_and_form() {
        let cfg = SuiteConfig { n: Some(3), samples: Some(5), seed: 1, ..Default::default() };
        let out = find("subharmonic").unwrap().run(&cfg).unwrap();
        let details = out.details.unwrap();
        assert_eq!(details.csv.lines().count(), 11);
        assert!(details.csv.starts_with("x,field,laplacian,error,pass\n"));
        assert!(out.report.pass, "{}", out.report.to_json());
    }

    #[test]
    fn harmonic_ball_passes() {
        let cfg = SuiteConfig { n: Some(2), radius: Some(1.0), samples: Some(10), ..Default::default() };
        assert!(find("harmonic-ball").unwrap().run(&cfg).unwrap().report.pass);
    }
}
