//! Normalized local Whittaker functions built from density polynomials.
//!
//! With σ = s − s0 and X = q^{−2σ},
//!
//!   W*(s) = (q·X^{−1/2})^{v} · Den(S,T,X) / Den(S,T°,X)
//!
//! where T° is a self-dual lattice of rank m and v = v_p(det T) − v_p(det T°).
//! Over a ramified extension with m odd no self-dual T° exists; the
//! denominator is then the Euler factor ∏_{j<m, j+n even} (1 − q^{j−n}X),
//! which is Den(S,T°ₐ,X) for an almost self-dual T°ₐ.

use crate::arith::{factorize, rat, rat_pow, rat_to_f64, rat_to_string, val_rat, Rat, Surd};
use crate::density::DensityEngine;
use crate::density_poly::{coeffs_json, default_max_degree, reduce_fraction, poly_derivative, poly_eval, DensityPolynomial, Interpolator};
use crate::error::{Error, Result};
use crate::field_data::LocalQuadExt;
use crate::hermitian::{almost_self_dual, standard_self_dual, GramMatrix};
use crate::weil_index::{weil_index, FourthRoot, SpaceDescriptor};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;
use std::collections::BTreeMap;
use std::fmt;

/// constant + Σ coeff(p)·ln p, kept in canonical form (no zero terms).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LogLinear {
    pub constant: Rat,
    pub terms: BTreeMap<u64, Rat>,
}

impl LogLinear {
    pub fn zero() -> Self {
        LogLinear { constant: Rat::zero(), terms: BTreeMap::new() }
    }

    pub fn constant(c: Rat) -> Self {
        LogLinear { constant: c, terms: BTreeMap::new() }
    }

    /// c·ln p for a prime p.
    pub fn log_prime(p: u64, c: Rat) -> Self {
        let mut l = LogLinear::zero();
        l.add_term(p, c);
        l
    }

    /// c·ln(x) for a positive rational x, expanded over primes.
    pub fn log_of(x: &Rat, c: &Rat) -> Self {
        assert!(x.is_positive(), "logarithm of a non-positive number");
        let mut l = LogLinear::zero();
        for (big, sign) in [(x.numer(), 1i64), (x.denom(), -1i64)] {
            let n = big.to_u64().expect("log argument fits in u64");
            for (p, e) in factorize(n) {
                l.add_term(p, c * rat(sign * e as i64));
            }
        }
        l
    }

    fn add_term(&mut self, p: u64, c: Rat) {
        let e = self.terms.entry(p).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn add(&self, o: &LogLinear) -> LogLinear {
        let mut r = self.clone();
        r.constant += &o.constant;
        for (p, c) in &o.terms {
            r.add_term(*p, c.clone());
        }
        r
    }

    pub fn scale(&self, c: &Rat) -> LogLinear {
        if c.is_zero() {
            return LogLinear::zero();
        }
        LogLinear {
            constant: &self.constant * c,
            terms: self.terms.iter().map(|(p, x)| (*p, x * c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }

    pub fn coefficient(&self, p: u64) -> Rat {
        self.terms.get(&p).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.constant) + self.terms.iter().map(|(p, c)| rat_to_f64(c) * (*p as f64).ln()).sum::<f64>()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: serde_json::Map<String, serde_json::Value> =
            self.terms.iter().map(|(p, c)| (p.to_string(), json!(rat_to_string(c)))).collect();
        json!({"constant": rat_to_string(&self.constant), "terms": terms})
    }
}

impl fmt::Display for LogLinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.constant.is_zero() || self.terms.is_empty() {
            parts.push(self.constant.to_string());
        }
        for (p, c) in &self.terms {
            parts.push(format!("{c}*ln({p})"));
        }
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DenominatorKind {
    SelfDualTarget,
    AlmostSelfDualEuler,
}

impl DenominatorKind {
    pub fn name(self) -> &'static str {
        match self {
            DenominatorKind::SelfDualTarget => "self_dual_target",
            DenominatorKind::AlmostSelfDualEuler => "almost_self_dual_euler",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Denominator {
    Poly(DensityPolynomial),
    /// closed-form polynomial in X
    Euler(Vec<Rat>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedWhittaker {
    pub numerator: DensityPolynomial,
    pub kind: DenominatorKind,
    pub denominator: Denominator,
    pub ext: LocalQuadExt,
    pub n: usize,
    pub m: usize,
    /// (n − m)/2
    pub s0: Rat,
    /// v_p(det T) − v_p(det T°)
    pub det_valuation: i64,
    pub det_t: Rat,
    /// numerator and denominator with common factors cancelled
    reduced: (Vec<Rat>, Vec<Rat>),
}

impl NormalizedWhittaker {
    fn den_coeffs(&self) -> Vec<Rat> {
        match &self.denominator {
            Denominator::Poly(p) => p.coeffs.clone(),
            Denominator::Euler(c) => c.clone(),
        }
    }

    /// X = q^{−2(s − s0)} for 2s ∈ Z.
    fn node(&self, s: &Rat) -> Result<(i64, Rat)> {
        let two_sigma = (s - &self.s0) * rat(2);
        if !two_sigma.is_integer() {
            return Err(Error::IrrationalPoint(format!("s = {s}")));
        }
        let ts = two_sigma.to_integer().to_i64().ok_or_else(|| Error::InvalidInput("s too large".into()))?;
        Ok((ts, rat_pow(self.ext.q, -ts)))
    }

    /// Whether W* is the constant 1 as a formal function.
    pub fn is_identically_one(&self) -> bool {
        self.det_valuation == 0 && self.numerator.coeffs == self.den_coeffs()
    }

    /// Exact W*(s) for 2s ∈ Z.
    pub fn eval(&self, s: &Rat) -> Result<Surd> {
        let (two_sigma, x) = self.node(s)?;
        let d = poly_eval(&self.reduced.1, &x);
        if d.is_zero() {
            return Err(Error::DenominatorVanishes);
        }
        let ratio = poly_eval(&self.reduced.0, &x) / d;
        // (q·X^{−1/2})^v = q^{v(2 + 2σ)/2}
        Ok(Surd::half_power(self.ext.q, self.det_valuation * (2 + two_sigma)).scale(&ratio))
    }

    pub fn eval_f64(&self, s: f64) -> f64 {
        let q = self.ext.q as f64;
        let sigma = s - rat_to_f64(&self.s0);
        let x = q.powf(-2.0 * sigma);
        let ev = |c: &[Rat]| c.iter().rev().fold(0.0, |acc, a| acc * x + rat_to_f64(a));
        q.powf(self.det_valuation as f64 * (1.0 + sigma)) * ev(&self.reduced.0) / ev(&self.reduced.1)
    }

    /// The sign η(det T)^{n−m−1} relating W*(−s) and W*(s).
    pub fn predicted_sign(&self) -> i32 {
        let e = self.n as i64 - self.m as i64 - 1;
        if self.det_t.is_zero() || e.rem_euclid(2) == 0 {
            1
        } else {
            self.ext.eta(&self.det_t)
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let den = match &self.denominator {
            Denominator::Poly(p) => coeffs_json(&p.coeffs),
            Denominator::Euler(c) => coeffs_json(c),
        };
        json!({
            "p": self.ext.p.to_string(),
            "splitting": self.ext.splitting.name(),
            "n": self.n.to_string(),
            "m": self.m.to_string(),
            "s0": rat_to_string(&self.s0),
            "kind": self.kind.name(),
            "numerator": coeffs_json(&self.numerator.coeffs),
            "denominator": den,
            "det_valuation": self.det_valuation.to_string(),
        })
    }
}

/// γ^{−m}·|det S|_p^m·|Δ|_p^e with e = nm/2 + m(m−1)/4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawConstant {
    pub root: FourthRoot,
    pub value: Surd,
}

pub fn raw_whittaker_constant(s: &GramMatrix, m: usize) -> Result<RawConstant> {
    if m == 0 {
        return Ok(RawConstant { root: FourthRoot::ONE, value: Surd::rational(Rat::one()) });
    }
    let gamma = weil_index(&SpaceDescriptor::of_gram(s)?)?;
    let n = s.rank() as i64;
    let m = m as i64;
    let p = s.ext.p;
    let vdet = val_rat(&s.det(), p).ok_or(Error::Singular)?;
    // |x|_p = p^{−v}; |Δ|_p = p^{−different exponent}
    let dexp = s.ext.different_exponent as i64;
    // exponent of p, doubled and times 2 again to keep e = (2nm + m(m−1))/4 exact
    let four_e = 2 * n * m + m * (m - 1);
    let four_exp = -4 * vdet * m - dexp * four_e;
    if four_exp % 2 != 0 {
        return Err(Error::IrrationalPoint(format!("p^({four_exp}/4)")));
    }
    Ok(RawConstant { root: gamma.pow(-m), value: Surd::half_power(p, four_exp / 2) })
}

/// Builds normalized Whittaker functions, sharing one counting engine.
pub struct WhittakerBuilder<'a> {
    interp: Interpolator<'a>,
}

impl<'a> WhittakerBuilder<'a> {
    pub fn new(engine: &'a DensityEngine) -> Self {
        WhittakerBuilder { interp: Interpolator::new(engine) }
    }

    pub fn normalize(&self, s: &GramMatrix, t: &GramMatrix) -> Result<NormalizedWhittaker> {
        if s.ext != t.ext {
            return Err(Error::ContextMismatch(format!("{} vs {}", s.ext, t.ext)));
        }
        if !s.is_self_dual() {
            return Err(Error::InvalidInput("S must be self-dual".into()));
        }
        let (ext, n, m) = (s.ext, s.rank(), t.rank());
        if m > n {
            return Err(Error::InvalidInput(format!("rank T = {m} exceeds rank S = {n}")));
        }
        let det_t = t.det();
        if det_t.is_zero() {
            return Err(Error::Singular);
        }
        let numerator = self.interp.interpolate(s, t, default_max_degree(s, t))?;
        let (kind, denominator, reference) = match standard_self_dual(ext, m) {
            Some(t0) => {
                let d = self.interp.interpolate(s, &t0, default_max_degree(s, &t0))?;
                if d.coeffs.first().is_none_or(Zero::is_zero) {
                    return Err(Error::DenominatorVanishes);
                }
                (DenominatorKind::SelfDualTarget, Denominator::Poly(d), t0)
            }
            None => {
                let c = almost_self_dual_denominator(&ext, n, m);
                (DenominatorKind::AlmostSelfDualEuler, Denominator::Euler(c), almost_self_dual(ext, m))
            }
        };
        let v = |d: &Rat| val_rat(d, ext.p).unwrap_or(0);
        let den_coeffs = match &denominator {
            Denominator::Poly(p) => p.coeffs.clone(),
            Denominator::Euler(c) => c.clone(),
        };
        let reduced = reduce_fraction(&numerator.coeffs, &den_coeffs);
        Ok(NormalizedWhittaker {
            reduced,
            numerator,
            kind,
            denominator,
            ext,
            n,
            m,
            s0: Rat::new(BigInt::from(n as i64 - m as i64), BigInt::from(2)),
            det_valuation: v(&det_t) - v(&reference.det()),
            det_t,
        })
    }
}

/// ∏_{0≤j<m, j+n even} (1 − q^{j−n}X): the local Euler factors of the
/// trivial-character L-values in Λ_m(s), at a ramified prime.
pub fn almost_self_dual_denominator(ext: &LocalQuadExt, n: usize, m: usize) -> Vec<Rat> {
    let mut c = vec![Rat::one()];
    for j in (0..m).filter(|j| (j + n) % 2 == 0) {
        let a = -rat_pow(ext.q, j as i64 - n as i64);
        let mut next = vec![Rat::zero(); c.len() + 1];
        for (i, x) in c.iter().enumerate() {
            next[i] += x;
            next[i + 1] += x * &a;
        }
        c = next;
    }
    c
}

pub fn normalize(engine: &DensityEngine, s: &GramMatrix, t: &GramMatrix) -> Result<NormalizedWhittaker> {
    WhittakerBuilder::new(engine).normalize(s, t)
}

/// s ↦ p^{v(s+1/2)}·Σ_{i=0}^{v} p^{−2si}, the rank-one unramified Whittaker function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rank1ClosedForm {
    pub p: u64,
    pub v: u32,
}

pub fn rank1_closed_form(j: i64, ext: &LocalQuadExt) -> Result<Rank1ClosedForm> {
    if j == 0 {
        return Err(Error::InvalidInput("j must be nonzero".into()));
    }
    if ext.is_ramified() {
        return Err(Error::RamifiedUnsupported);
    }
    let v = crate::arith::val_int(&BigInt::from(j), ext.p);
    Ok(Rank1ClosedForm { p: ext.p, v })
}

impl Rank1ClosedForm {
    /// Exact value for 2s ∈ Z.
    pub fn eval(&self, s: &Rat) -> Result<Surd> {
        let two_s = s * rat(2);
        if !two_s.is_integer() {
            return Err(Error::IrrationalPoint(format!("s = {s}")));
        }
        let ts = two_s.to_integer().to_i64().ok_or_else(|| Error::InvalidInput("s too large".into()))?;
        let sum: Rat = (0..=self.v as i64).map(|i| rat_pow(self.p, -ts * i)).sum();
        // p^{v(s+1/2)} = p^{v(2s+1)/2}
        Ok(Surd::half_power(self.p, self.v as i64 * (ts + 1)).scale(&sum))
    }

    pub fn eval_f64(&self, s: f64) -> f64 {
        let p = self.p as f64;
        let v = self.v as f64;
        p.powf(v * (s + 0.5)) * (0..=self.v).map(|i| p.powf(-2.0 * s * i as f64)).sum::<f64>()
    }

    /// Exact d/ds at s (rational, with v(2s+1) even).
    pub fn derivative(&self, s: &Rat) -> Result<LogLinear> {
        let two_s = s * rat(2);
        let ts = two_s.to_integer().to_i64().filter(|_| two_s.is_integer());
        let ts = ts.ok_or_else(|| Error::IrrationalPoint(format!("s = {s}")))?;
        let e2 = self.v as i64 * (ts + 1);
        if e2 % 2 != 0 {
            return Err(Error::IrrationalPoint(format!("p^({e2}/2)")));
        }
        // d/ds p^{v(s+1/2) − 2si} = (v − 2i)·ln p·p^{...}
        let c: Rat = (0..=self.v as i64)
            .map(|i| rat(self.v as i64 - 2 * i) * rat_pow(self.p, e2 / 2 - ts * i))
            .sum();
        Ok(LogLinear::log_prime(self.p, c))
    }
}

/// d/ds W*(s) at s_star, exact. Needs 2·s_star ∈ Z and a rational prefactor.
pub fn whittaker_derivative(w: &NormalizedWhittaker, s_star: &Rat) -> Result<LogLinear> {
    let (two_sigma, x) = w.node(s_star)?;
    let (num, den) = &w.reduced;
    let d = poly_eval(den, &x);
    if d.is_zero() {
        return Err(Error::DenominatorVanishes);
    }
    let n = poly_eval(num, &x);
    let r = &n / &d;
    let dr = (poly_eval(&poly_derivative(num), &x) * &d - &n * poly_eval(&poly_derivative(den), &x)) / (&d * &d);
    let e2 = w.det_valuation * (2 + two_sigma);
    if e2 % 2 != 0 {
        return Err(Error::IrrationalPoint(format!("q^({e2}/2)")));
    }
    // W* = q^{v(1+σ)}·R(X), dX/ds = −2·ln q·X
    let c = rat_pow(w.ext.q, e2 / 2) * (rat(w.det_valuation) * r - rat(2) * &x * dr);
    Ok(LogLinear::log_prime(w.ext.q, c))
}

/// Ratios W*(s)/W*(−s); constant (equal to `predicted_sign`) on every
/// computed instance.
pub fn functional_equation_probe(w: &NormalizedWhittaker, samples: &[Rat]) -> Result<Vec<Surd>> {
    samples
        .iter()
        .map(|s| {
            let a = w.eval(s)?;
            let b = w.eval(&-s)?;
            a.div(&b).ok_or(Error::DenominatorVanishes)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::density::DensityConfig;
    use crate::field_data::Splitting;

    #[test]
    fn loglinear_arithmetic() {
        let a = LogLinear::log_of(&ratio(12, 5), &rat(1));
        assert_eq!(a.coefficient(2), rat(2));
        assert_eq!(a.coefficient(5), rat(-1));
        assert!(a.add(&a.scale(&rat(-1))).is_zero());
        assert!((a.to_f64() - (12.0f64 / 5.0).ln()).abs() < 1e-14);
        assert_eq!(
            LogLinear::log_prime(3, rat(2)).to_json(),
            json!({"constant": "0/1", "terms": {"3": "2/1"}})
        );
    }

    #[test]
    fn closed_form_values() {
        let ext = LocalQuadExt::new(3, Splitting::Inert).unwrap();
        let f = rank1_closed_form(3, &ext).unwrap();
        assert_eq!(f.eval(&ratio(1, 2)).unwrap(), Surd::rational(rat(4)));
        assert_eq!(f.eval(&rat(1)).unwrap(), f.eval(&rat(-1)).unwrap());
        assert_eq!(rank1_closed_form(7, &ext).unwrap().eval(&rat(2)).unwrap(), Surd::rational(rat(1)));
        assert_eq!(f.derivative(&ratio(1, 2)).unwrap(), LogLinear::log_prime(3, rat(2)));
    }

    #[test]
    fn rank_one_matches_closed_form() {
        let engine = DensityEngine::new(DensityConfig::default());
        let ext = LocalQuadExt::new(3, Splitting::Inert).unwrap();
        let s = GramMatrix::diagonal_int(ext, &[1, 1]);
        let w = normalize(&engine, &s, &GramMatrix::diagonal_int(ext, &[3])).unwrap();
        let f = rank1_closed_form(3, &ext).unwrap();
        assert_eq!(w.eval(&ratio(1, 2)).unwrap(), Surd::rational(rat(4)));
        for s in [rat(0), ratio(1, 2), ratio(-1, 2), rat(1)] {
            assert_eq!(w.eval(&s).unwrap(), f.eval(&s).unwrap());
        }
        assert_eq!(whittaker_derivative(&w, &ratio(1, 2)).unwrap(), LogLinear::log_prime(3, rat(2)));
        let unit = normalize(&engine, &s, &GramMatrix::diagonal_int(ext, &[1])).unwrap();
        assert!(unit.is_identically_one());
        assert!(whittaker_derivative(&unit, &ratio(1, 2)).unwrap().is_zero());
    }

    #[test]
    fn raw_constant_cases() {
        let inert = LocalQuadExt::new(5, Splitting::Inert).unwrap();
        let s = GramMatrix::diagonal_int(inert, &[1, 1]);
        let c = raw_whittaker_constant(&s, 1).unwrap();
        assert_eq!((c.root, c.value), (FourthRoot::ONE, Surd::rational(rat(1))));
        let ram = LocalQuadExt::new(7, Splitting::Ramified).unwrap();
        let h = standard_self_dual(ram, 2).unwrap();
        // |det S| = 7, e = 1 for n = 2, m = 1: 7·7^{−1} = 1
        assert_eq!(raw_whittaker_constant(&h, 1).unwrap().value, Surd::rational(rat(1)));
        // m = 2: e = 5/2, so 7²·7^{−5/2} = 7^{−1/2}
        assert_eq!(raw_whittaker_constant(&h, 2).unwrap().value, Surd::half_power(7, -1));
        assert!(raw_whittaker_constant(&GramMatrix::diagonal_int(inert, &[1, 5]), 1).is_err());
    }

    #[test]
    fn ramified_euler_denominator_matches_counting() {
        let engine = DensityEngine::new(DensityConfig::default());
        let interp = Interpolator::new(&engine);
        for (p, n) in [(3, 2), (5, 2), (3, 4)] {
            let ext = LocalQuadExt::new(p, Splitting::Ramified).unwrap();
            let s = standard_self_dual(ext, n).unwrap();
            let ta = almost_self_dual(ext, 1);
            let counted = interp.interpolate(&s, &ta, 2 * n + 1).unwrap();
            assert_eq!(counted.coeffs, almost_self_dual_denominator(&ext, n, 1), "p={p} n={n}");
            let w = normalize(&engine, &s, &ta).unwrap();
            assert!(w.is_identically_one());
            assert_eq!(w.eval(&w.s0.clone()).unwrap(), Surd::rational(rat(1)));
        }
    }
}
