//! Moment sequences as formal Laurent series â(z) = Σ a_k / z^{k+1}.
//!
//! All series arithmetic runs in u = 1/z, where â = u·A(u) with
//! A(u) = Σ a_k u^k. Exact rationals are the default field; f64 sequences
//! are marked approximate in every report.

mod scalar;

use nalgebra::{DMatrix, SymmetricEigen};
use num_rational::BigRational;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

pub use scalar::{parse_rational, parse_rational_list, Scalar};

/// Relative eigenvalue tolerance of the float psd test.
pub const FLOAT_PSD_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence<T: Scalar = BigRational> {
    coeffs: Vec<T>,
}

impl<T: Scalar> MomentSequence<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        MomentSequence { coeffs }
    }

    pub fn zeros(len: usize) -> Self {
        MomentSequence { coeffs: vec![T::zero(); len] }
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> T) -> Self {
        MomentSequence { coeffs: (0..len).map(f).collect() }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        T::EXACT
    }

    pub fn scaled(&self, factor: &T) -> Self {
        MomentSequence { coeffs: self.coeffs.iter().map(|c| c.clone() * factor.clone()).collect() }
    }

    pub fn to_float(&self) -> MomentSequence<f64> {
        MomentSequence { coeffs: self.coeffs.iter().map(Scalar::to_f64).collect() }
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(Scalar::to_text).collect()
    }
}

impl MomentSequence<BigRational> {
    pub fn parse(text: &str) -> Result<Self> {
        parse_rational_list(text).map(MomentSequence::new)
    }

    /// s_k = 1/(k+1), the moments of the indicator of [0, 1].
    pub fn unit_interval(len: usize) -> Self {
        Self::from_fn(len, |k| BigRational::from_ratio(1, k as i64 + 1))
    }
}

/// Random rational sequence with a_0 ≠ 0; entries p/q, |p| ≤ 20, 1 ≤ q ≤ 10.
pub fn random_rational_sequence<R: Rng>(rng: &mut R, len: usize) -> MomentSequence<BigRational> {
    MomentSequence::from_fn(len, |k| loop {
        let v = random_rational(rng);
        if k > 0 || v != BigRational::from_i64(0) {
            return v;
        }
    })
}

pub fn random_rational<R: Rng>(rng: &mut R) -> BigRational {
    BigRational::from_ratio(rng.gen_range(-20..=20), rng.gen_range(1..=10))
}

// power series in u, truncated to `len` terms

/// a / b with b_0 ≠ 0.
fn div<T: Scalar>(a: &[T], b: &[T], len: usize) -> Vec<T> {
    let mut q: Vec<T> = Vec::with_capacity(len);
    for m in 0..len {
        let mut acc = a.get(m).cloned().unwrap_or_else(T::zero);
        for j in 1..=m.min(b.len().saturating_sub(1)) {
            acc = acc - b[j].clone() * q[m - j].clone();
        }
        q.push(acc / b[0].clone());
    }
    q
}

/// exp(q) for q_0 = 0, from m E_m = Σ_{j=1}^m j q_j E_{m−j}.
fn exp<T: Scalar>(q: &[T], len: usize) -> Vec<T> {
    let mut e: Vec<T> = Vec::with_capacity(len);
    for m in 0..len {
        if m == 0 {
            e.push(T::one());
            continue;
        }
        let mut acc = T::zero();
        for j in 1..=m.min(q.len().saturating_sub(1)) {
            acc = acc + T::from_i64(j as i64) * q[j].clone() * e[m - j].clone();
        }
        e.push(acc / T::from_i64(m as i64));
    }
    e
}

/// ln(p) for p_0 = 1, from m p_0 L_m = m p_m − Σ_{j=1}^{m−1} j L_j p_{m−j}.
fn ln<T: Scalar>(p: &[T], len: usize) -> Vec<T> {
    let mut l: Vec<T> = Vec::with_capacity(len);
    for m in 0..len {
        if m == 0 {
            l.push(T::zero());
            continue;
        }
        let mut acc = T::from_i64(m as i64) * p.get(m).cloned().unwrap_or_else(T::zero);
        for j in 1..m {
            if m - j < p.len() {
                acc = acc - T::from_i64(j as i64) * l[j].clone() * p[m - j].clone();
            }
        }
        l.push(acc / T::from_i64(m as i64));
    }
    l
}

/// The series u·A(u) of â, of length len + 1.
fn hat<T: Scalar>(a: &MomentSequence<T>) -> Vec<T> {
    std::iter::once(T::zero()).chain(a.coeffs.iter().cloned()).collect()
}

/// Coefficients of u^1..u^len as a sequence.
fn unhat<T: Scalar>(series: Vec<T>) -> MomentSequence<T> {
    MomentSequence { coeffs: series.into_iter().skip(1).collect() }
}

/// a with â = 1 − exp(−ŝ), truncated at the length of s.
pub fn exp_transform_sequence<T: Scalar>(s: &MomentSequence<T>) -> MomentSequence<T> {
    let len = s.len() + 1;
    let q: Vec<T> = hat(s).into_iter().map(|c| -c).collect();
    let e = exp(&q, len);
    unhat(e.into_iter().map(|c| -c).collect())
}

/// s with ŝ = −ln(1 − â); inverse of [`exp_transform_sequence`].
pub fn log_transform_sequence<T: Scalar>(a: &MomentSequence<T>) -> MomentSequence<T> {
    let len = a.len() + 1;
    let mut p: Vec<T> = hat(a).into_iter().map(|c| -c).collect();
    p[0] = T::one();
    unhat(ln(&p, len).into_iter().map(|c| -c).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HankelReport<T: Scalar = BigRational> {
    /// det(a_{i+j})_{i,j=0..m} for m = 0..=M
    pub determinants: Vec<T>,
    /// whether (a_{i+j})_{i,j=0..m} is positive semidefinite
    pub psd: Vec<bool>,
    /// float mode: values come from pivoted elimination and eigenvalues
    pub approximate: bool,
}

impl<T: Scalar> HankelReport<T> {
    pub fn all_psd(&self) -> bool {
        self.psd.iter().all(|&p| p)
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Out {
            determinants: Vec<String>,
            psd: Vec<bool>,
            approximate: bool,
        }
        serde_json::to_value(Out {
            determinants: self.determinants.iter().map(Scalar::to_text).collect(),
            psd: self.psd.clone(),
            approximate: self.approximate,
        })
        .expect("plain data serializes")
    }
}

fn hankel_matrix<T: Scalar>(a: &[T], m: usize) -> Vec<Vec<T>> {
    (0..=m).map(|i| (0..=m).map(|j| a[i + j].clone()).collect()).collect()
}

/// Gaussian elimination with partial pivoting by magnitude.
fn determinant<T: Scalar>(mut h: Vec<Vec<T>>) -> T {
    let n = h.len();
    let mut det = T::one();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            h[i][col].abs().partial_cmp(&h[j][col].abs()).unwrap_or(std::cmp::Ordering::Equal)
        });
        let p = match pivot {
            Some(p) if !h[p][col].is_zero() => p,
            _ => return T::zero(),
        };
        if p != col {
            h.swap(p, col);
            det = -det;
        }
        let d = h[col][col].clone();
        det = det * d.clone();
        for r in col + 1..n {
            if h[r][col].is_zero() {
                continue;
            }
            let f = h[r][col].clone() / d.clone();
            for c in col..n {
                let v = h[col][c].clone();
                h[r][c] = h[r][c].clone() - f.clone() * v;
            }
        }
    }
    det
}

/// Exact semidefiniteness: symmetric elimination on diagonal pivots. A
/// negative pivot fails; a zero pivot needs a zero row.
fn psd_exact<T: Scalar>(mut h: Vec<Vec<T>>) -> bool {
    let n = h.len();
    for k in 0..n {
        let d = h[k][k].clone();
        if d.is_negative() {
            return false;
        }
        if d.is_zero() {
            if (k + 1..n).any(|j| !h[k][j].is_zero()) {
                return false;
            }
            continue;
        }
        for i in k + 1..n {
            if h[i][k].is_zero() {
                continue;
            }
            let f = h[i][k].clone() / d.clone();
            for j in k + 1..n {
                let v = h[k][j].clone();
                h[i][j] = h[i][j].clone() - f.clone() * v;
            }
        }
    }
    true
}

fn psd_float<T: Scalar>(h: &[Vec<T>]) -> bool {
    let n = h.len();
    let m = DMatrix::from_fn(n, n, |i, j| h[i][j].to_f64());
    let eig = SymmetricEigen::new(m).eigenvalues;
    let scale = eig.iter().fold(0.0f64, |acc, e| acc.max(e.abs()));
    eig.iter().all(|&e| e >= -FLOAT_PSD_TOLERANCE * scale)
}

/// Determinants and psd flags of the Hankel forms of orders 0..=M.
pub fn hankel_determinants<T: Scalar>(a: &MomentSequence<T>, max_order: usize) -> Result<HankelReport<T>> {
    let needed = 2 * max_order + 1;
    if a.len() < needed {
        return Err(Error::Arity { needed, have: a.len() });
    }
    let mut determinants = Vec::with_capacity(max_order + 1);
    let mut psd = Vec::with_capacity(max_order + 1);
    for m in 0..=max_order {
        let h = hankel_matrix(&a.coeffs, m);
        determinants.push(determinant(h.clone()));
        psd.push(if T::EXACT { psd_exact(h) } else { psd_float(&h) });
    }
    Ok(HankelReport { determinants, psd, approximate: !T::EXACT })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Termination {
    /// all requested levels were extracted
    Complete,
    /// the remainder vanished through the available order after `depth`
    /// levels; later α are zero
    Finite { depth: usize },
    /// a vanishing Hankel determinant stopped the peel after `depth` levels
    Singular { depth: usize },
    /// the sequence ran out after `depth` levels
    Exhausted { depth: usize },
}

/// â(z) = α_0/(z + β_1 − α_1/(z + β_2 − ⋯)).
#[derive(Debug, Clone, PartialEq)]
pub struct JFraction<T: Scalar = BigRational> {
    pub alphas: Vec<T>,
    pub betas: Vec<T>,
    pub termination: Termination,
}

impl<T: Scalar> JFraction<T> {
    /// Levels with a known α.
    pub fn depth(&self) -> usize {
        self.alphas.len()
    }

    /// α_0^{m+1} α_1^m ⋯ α_m, when α_0..α_m are known.
    pub fn determinant(&self, m: usize) -> Option<T> {
        if m >= self.alphas.len() {
            return None;
        }
        let mut det = T::one();
        for (i, a) in self.alphas[..=m].iter().enumerate() {
            for _ in 0..(m + 1 - i) {
                det = det * a.clone();
            }
        }
        Some(det)
    }

    /// The first `len` moments of the fraction; missing β are taken as 0.
    pub fn expand(&self, len: usize) -> MomentSequence<T> {
        // F_i = α_i / (1 + β_{i+1} u − u² F_{i+1}), â = u F_0
        let mut f: Vec<T> = vec![T::zero(); len];
        for i in (0..self.alphas.len()).rev() {
            let mut den = vec![T::zero(); len.max(2)];
            den[0] = T::one();
            den[1] = self.betas.get(i).cloned().unwrap_or_else(T::zero);
            for k in 2..len {
                den[k] = -f[k - 2].clone();
            }
            f = div(&[self.alphas[i].clone()], &den, len);
        }
        MomentSequence { coeffs: f }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "alphas": self.alphas.iter().map(Scalar::to_text).collect::<Vec<_>>(),
            "betas": self.betas.iter().map(Scalar::to_text).collect::<Vec<_>>(),
            "termination": self.termination,
        })
    }
}

/// Peels α_0..α_depth and β_1..β_{depth+1} off â: with S = f/α_i and
/// R = 1/S, β_{i+1} = R_1 and the next level is f = −(R_2, R_3, …).
pub fn j_fraction<T: Scalar>(a: &MomentSequence<T>, depth: usize) -> JFraction<T> {
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let mut f = a.coeffs.clone();
    for level in 0..=depth {
        if f.is_empty() {
            return JFraction { alphas, betas, termination: Termination::Exhausted { depth: level } };
        }
        if f.iter().all(|c| c.is_zero()) {
            alphas.resize(depth + 1, T::zero());
            return JFraction { alphas, betas, termination: Termination::Finite { depth: level } };
        }
        if f[0].is_zero() {
            return JFraction { alphas, betas, termination: Termination::Singular { depth: level } };
        }
        let alpha = f[0].clone();
        let s: Vec<T> = f.iter().map(|c| c.clone() / alpha.clone()).collect();
        let r = div(&[T::one()], &s, s.len());
        alphas.push(alpha);
        if r.len() < 2 {
            f = Vec::new();
            continue;
        }
        betas.push(r[1].clone());
        f = r[2..].iter().map(|c| -c.clone()).collect();
    }
    JFraction { alphas, betas, termination: Termination::Complete }
}

/// b with 1/b̂ − 1/â = c, i.e. b̂ = â/(1 + c â).
pub fn reciprocal_shift<T: Scalar>(a: &MomentSequence<T>, c: &T) -> Result<MomentSequence<T>> {
    if a.coeffs.first().map_or(true, |a0| a0.is_zero()) {
        return Err(Error::NotInvertible);
    }
    // B = A/(1 + c u A)
    let len = a.len();
    let mut den = vec![T::zero(); len];
    den[0] = T::one();
    for k in 1..len {
        den[k] = c.clone() * a.coeffs[k - 1].clone();
    }
    Ok(MomentSequence { coeffs: div(&a.coeffs, &den, len) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LSequenceReport<T: Scalar = BigRational> {
    pub b: MomentSequence<T>,
    pub hankel: HankelReport<T>,
}

/// b̂ = M₁(ŝ/2) = (1 − v)/(1 + v) with v = exp(−ŝ), and the Hankel report
/// of b through order M.
pub fn l_sequence_check<T: Scalar>(s: &MomentSequence<T>, max_order: usize) -> Result<LSequenceReport<T>> {
    let needed = 2 * max_order + 1;
    if s.len() < needed {
        return Err(Error::Arity { needed, have: s.len() });
    }
    let len = s.len() + 1;
    let q: Vec<T> = hat(s).into_iter().map(|c| -c).collect();
    let v = exp(&q, len);
    let num: Vec<T> = v.iter().enumerate().map(|(k, c)| if k == 0 { T::one() - c.clone() } else { -c.clone() }).collect();
    let den: Vec<T> = v.iter().enumerate().map(|(k, c)| if k == 0 { T::one() + c.clone() } else { c.clone() }).collect();
    let b = unhat(div(&num, &den, len));
    let hankel = hankel_determinants(&b, max_order)?;
    Ok(LSequenceReport { b, hankel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variational::sample_rng;
    use num_traits::Zero;
    use proptest::prelude::*;

    type Q = BigRational;

    fn q(p: i64, d: i64) -> Q {
        Q::from_ratio(p, d)
    }

    fn seq(v: &[(i64, i64)]) -> MomentSequence {
        MomentSequence::new(v.iter().map(|&(p, d)| q(p, d)).collect())
    }

    fn delta(len: usize) -> MomentSequence {
        MomentSequence::from_fn(len, |k| if k == 0 { q(1, 1) } else { q(0, 1) })
    }

    fn geometric(len: usize) -> MomentSequence {
        MomentSequence::from_fn(len, |k| Q::new(1.into(), num_bigint::BigInt::from(2).pow(k as u32 + 1)))
    }

    /// det of the (m+1)×(m+1) Hilbert matrix: c_m^4 / c_{2m+1}, c_k = Π_{i<k} i!
    fn hilbert_det(m: usize) -> Q {
        let fact = |k: usize| (1..=k as i64).fold(num_bigint::BigInt::from(1), |acc, i| acc * i);
        let c = |k: usize| (0..k).fold(num_bigint::BigInt::from(1), |acc, i| acc * fact(i));
        let cm = c(m + 1);
        Q::new(cm.pow(4), c(2 * m + 2))
    }

    #[test]
    fn exp_transform_examples() {
        let a = exp_transform_sequence(&MomentSequence::unit_interval(12));
        assert_eq!(a, delta(12));
        let s = seq(&[(3, 1), (0, 1), (0, 1), (0, 1)]);
        assert_eq!(exp_transform_sequence(&s), seq(&[(3, 1), (-9, 2), (27, 6), (-81, 24)]));
        assert_eq!(exp_transform_sequence(&MomentSequence::<Q>::zeros(5)), MomentSequence::zeros(5));
    }

    #[test]
    fn hankel_examples() {
        let r = hankel_determinants(&delta(3), 1).unwrap();
        assert_eq!(r.determinants, vec![q(1, 1), q(0, 1)]);
        assert!(r.all_psd() && !r.approximate);
        let r = hankel_determinants(&geometric(7), 3).unwrap();
        assert_eq!(r.determinants, vec![q(1, 2), q(0, 1), q(0, 1), q(0, 1)]);
        assert!(r.all_psd());
        let r = hankel_determinants(&MomentSequence::unit_interval(11), 5).unwrap();
        for (m, d) in r.determinants.iter().enumerate() {
            assert_eq!(*d, hilbert_det(m));
            assert!(d > &q(0, 1));
        }
        assert!(r.all_psd());
        assert_eq!(hankel_determinants(&delta(4), 2), Err(Error::Arity { needed: 5, have: 4 }));
    }

    #[test]
    fn psd_needs_more_than_leading_minors() {
        // leading minors 0, 0 but a_2 < 0
        let r = hankel_determinants(&seq(&[(0, 1), (0, 1), (-1, 1)]), 1).unwrap();
        assert_eq!(r.determinants, vec![q(0, 1), q(0, 1)]);
        assert_eq!(r.psd, vec![true, false]);
        let r = hankel_determinants(&seq(&[(1, 1), (2, 1), (1, 1)]), 1).unwrap();
        assert_eq!(r.psd, vec![true, false]);
    }

    #[test]
    fn float_mode_is_flagged_and_close() {
        let exact = hankel_determinants(&MomentSequence::unit_interval(9), 4).unwrap();
        let float = hankel_determinants(&MomentSequence::unit_interval(9).to_float(), 4).unwrap();
        assert!(float.approximate);
        assert!(float.all_psd());
        for (e, f) in exact.determinants.iter().zip(&float.determinants) {
            let e = Scalar::to_f64(e);
            assert!((e - f).abs() < 1e-6 * e.abs(), "{e} vs {f}");
        }
        let neg = hankel_determinants(&MomentSequence::new(vec![1.0, 2.0, 1.0]), 1).unwrap();
        assert_eq!(neg.psd, vec![true, false]);
    }

    #[test]
    fn j_fraction_examples() {
        let j = j_fraction(&geometric(8), 3);
        assert_eq!(j.alphas[0], q(1, 2));
        assert_eq!(j.betas[0], q(-1, 2));
        assert_eq!(j.termination, Termination::Finite { depth: 1 });
        assert_eq!(j.alphas, vec![q(1, 2), q(0, 1), q(0, 1), q(0, 1)]);

        let j = j_fraction(&delta(6), 2);
        assert_eq!(j.alphas, vec![q(1, 1), q(0, 1), q(0, 1)]);
        assert_eq!(j.betas, vec![q(0, 1)]);

        // Legendre on [0, 1]: β = −1/2, α_i = i²/(4(4i²−1))
        let h = MomentSequence::unit_interval(10);
        let j = j_fraction(&h, 4);
        assert_eq!(j.termination, Termination::Complete);
        assert_eq!(j.alphas[0], q(1, 1));
        for i in 1..=4i64 {
            assert_eq!(j.alphas[i as usize], q(i * i, 4 * (4 * i * i - 1)));
        }
        assert!(j.betas.iter().all(|b| *b == q(-1, 2)));
        let r = hankel_determinants(&h, 4).unwrap();
        for m in 0..=4 {
            assert_eq!(j.determinant(m).unwrap(), r.determinants[m]);
        }
        assert_eq!(j.expand(10), h);
    }

    #[test]
    fn j_fraction_stops_early() {
        let j = j_fraction(&seq(&[(1, 1), (0, 1), (0, 1), (5, 1), (1, 1)]), 3);
        // after α_0 = 1, β_1 = 0 the remainder starts with 0 and then 5
        assert_eq!(j.termination, Termination::Singular { depth: 1 });
        assert_eq!(j.depth(), 1);
        let j = j_fraction(&MomentSequence::unit_interval(3), 5);
        assert_eq!(j.termination, Termination::Exhausted { depth: 2 });
    }

    #[test]
    fn reciprocal_shift_examples() {
        let h = MomentSequence::unit_interval(9);
        assert_eq!(reciprocal_shift(&h, &q(0, 1)).unwrap(), h);
        let c = q(-3, 7);
        let b = reciprocal_shift(&delta(6), &c).unwrap();
        assert_eq!(b, MomentSequence::from_fn(6, |k| num_traits::pow(-c.clone(), k)));
        let b = reciprocal_shift(&h, &q(3, 1)).unwrap();
        let (ra, rb) = (hankel_determinants(&h, 4).unwrap(), hankel_determinants(&b, 4).unwrap());
        assert_eq!(ra.determinants, rb.determinants);
        assert_eq!(reciprocal_shift(&seq(&[(0, 1), (1, 1)]), &c), Err(Error::NotInvertible));
    }

    #[test]
    fn l_sequence_examples() {
        let r = l_sequence_check(&MomentSequence::unit_interval(9), 4).unwrap();
        assert_eq!(r.b, geometric(9));
        assert!(r.hankel.all_psd());
        let z = l_sequence_check(&MomentSequence::<Q>::zeros(5), 2).unwrap();
        assert_eq!(z.b, MomentSequence::zeros(5));
        assert!(z.hankel.all_psd());
        assert!(l_sequence_check(&MomentSequence::unit_interval(4), 2).is_err());
    }

    #[test]
    fn l_sequence_matches_shifted_exp_transform() {
        // 1/b̂ = 2/â − 1: b = reciprocal_shift(a/2, −1)
        for i in 0..20 {
            let s = random_rational_sequence(&mut sample_rng(6, i), 9);
            let a = exp_transform_sequence(&s);
            let shifted = reciprocal_shift(&a.scaled(&q(1, 2)), &q(-1, 1)).unwrap();
            assert_eq!(l_sequence_check(&s, 4).unwrap().b, shifted);
        }
    }

    #[test]
    fn sequences_of_bounded_densities_pass() {
        // ρ = χ_{[0,1/2]} + ½χ_{[1,2]}
        let s = MomentSequence::from_fn(11, |k| {
            let k1 = k as i64 + 1;
            let half = Q::new(1.into(), num_bigint::BigInt::from(2).pow(k as u32 + 1));
            half / q(k1, 1) + (num_traits::pow(q(2, 1), k + 1) - q(1, 1)) / q(2 * k1, 1)
        });
        assert!(hankel_determinants(&exp_transform_sequence(&s), 5).unwrap().all_psd());
        assert!(l_sequence_check(&s, 5).unwrap().hankel.all_psd());
        // 2χ_{[0,1]} is not bounded by 1
        let s2 = MomentSequence::unit_interval(11).scaled(&q(2, 1));
        assert!(!hankel_determinants(&exp_transform_sequence(&s2), 5).unwrap().all_psd());
    }

    fn rational() -> impl Strategy<Value = Q> {
        (-20i64..=20, 1i64..=10).prop_map(|(p, d)| q(p, d))
    }

    fn sequence(len: usize) -> impl Strategy<Value = MomentSequence> {
        proptest::collection::vec(rational(), len).prop_map(MomentSequence::new)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn shift_preserves_determinants(a in sequence(11), c in rational()) {
            prop_assume!(!a.coeffs()[0].is_zero());
            let b = reciprocal_shift(&a, &c).unwrap();
            let ra = hankel_determinants(&a, 5).unwrap();
            let rb = hankel_determinants(&b, 5).unwrap();
            prop_assert_eq!(&ra.determinants, &rb.determinants);
            prop_assert_eq!(ra.psd, rb.psd);
        }

        #[test]
        fn j_fraction_round_trip_and_product(a in sequence(10)) {
            let j = j_fraction(&a, 4);
            let r = hankel_determinants(&a, 4).unwrap();
            let known = match j.termination {
                Termination::Complete | Termination::Finite { .. } => j.alphas.len(),
                Termination::Singular { depth } | Termination::Exhausted { depth } => depth,
            };
            for m in 0..known {
                prop_assert_eq!(j.determinant(m).unwrap(), r.determinants[m].clone());
            }
            if j.termination == Termination::Complete {
                let back = j.expand(10);
                prop_assert_eq!(&back.coeffs()[..9], &a.coeffs()[..9]);
            }
        }

        #[test]
        fn exp_and_log_are_inverse(s in sequence(9)) {
            let a = exp_transform_sequence(&s);
            prop_assert_eq!(log_transform_sequence(&a), s);
        }
    }
}
