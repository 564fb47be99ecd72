//! Global assembly: finite parts of Fourier coefficients as products of local
//! Whittaker functions, the corank-one unfolding combinator, and the Hecke
//! degree / Faltings height identities for rank-one coefficients.
//!
//! The Archimedean factor only ever enters through its positive-definite
//! near-central value 1, so everything here is a finite part.

use crate::analytic::{lambda_factor, ComplexValue, Real};
use crate::arith::{factorize, rat, ratio, rat_to_f64, Rat, Surd};
use crate::density::DensityEngine;
use crate::error::{Error, Result};
use crate::field_data::{classify_prime, Discriminant, Splitting};
use crate::hermitian::{standard_self_dual, FieldElement, GramMatrix};
use crate::whittaker::{LogLinear, NormalizedWhittaker, WhittakerBuilder};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// A Hermitian matrix with rational entries, viewed over F = Q(√Δ).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalGram {
    entries: Vec<Vec<Rat>>,
}

impl GlobalGram {
    pub fn new(entries: Vec<Vec<Rat>>) -> Result<Self> {
        let n = entries.len();
        if entries.iter().any(|r| r.len() != n) {
            return Err(Error::NotHermitian("matrix is not square".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(Error::NotHermitian(format!("entry ({i},{j}) differs from ({j},{i})")));
                }
            }
        }
        Ok(GlobalGram { entries })
    }

    pub fn diagonal(d: &[i64]) -> Self {
        let n = d.len();
        let entries = (0..n).map(|i| (0..n).map(|j| if i == j { rat(d[i]) } else { Rat::zero() }).collect()).collect();
        GlobalGram { entries }
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn det(&self) -> Rat {
        let mut a = self.entries.clone();
        let n = a.len();
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
                return Rat::zero();
            };
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            det *= &a[c][c];
            for r in c + 1..n {
                let f = &a[r][c] / &a[c][c];
                for k in c..n {
                    let t = &f * &a[c][k];
                    a[r][k] -= t;
                }
            }
        }
        det
    }

    pub fn localize(&self, ext: crate::field_data::LocalQuadExt) -> Result<GramMatrix> {
        let e = self.entries.iter().map(|r| r.iter().map(|x| FieldElement::from_rat(x.clone())).collect()).collect();
        GramMatrix::new(ext, e)
    }
}

#[derive(Debug, Clone)]
pub enum LocalFactor {
    /// self-dual local lattice: the constant 1
    Unit,
    Whittaker(Box<NormalizedWhittaker>),
}

/// ∏_p W*_{T,p}(s) over the finite primes.
#[derive(Debug, Clone)]
pub struct CoefficientSeries {
    pub finite_local_data: BTreeMap<u64, LocalFactor>,
    pub delta: Discriminant,
    pub n: usize,
    pub m: usize,
}

impl CoefficientSeries {
    /// Exact product at s with 2s ∈ Z.
    pub fn eval(&self, s: &Rat) -> Result<Surd> {
        let mut acc = Surd::rational(Rat::one());
        for f in self.finite_local_data.values() {
            if let LocalFactor::Whittaker(w) = f {
                acc = acc.mul(&w.eval(s)?);
            }
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, s: f64) -> f64 {
        self.finite_local_data
            .values()
            .map(|f| match f {
                LocalFactor::Unit => 1.0,
                LocalFactor::Whittaker(w) => w.eval_f64(s),
            })
            .product()
    }

    pub fn is_identically_one(&self) -> bool {
        self.finite_local_data.values().all(|f| match f {
            LocalFactor::Unit => true,
            LocalFactor::Whittaker(w) => w.is_identically_one(),
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let local: serde_json::Map<String, serde_json::Value> = self
            .finite_local_data
            .iter()
            .map(|(p, f)| {
                let v = match f {
                    LocalFactor::Unit => serde_json::Value::String("unit".into()),
                    LocalFactor::Whittaker(w) => w.to_json(),
                };
                (p.to_string(), v)
            })
            .collect();
        serde_json::json!({
            "delta": self.delta.value().to_string(),
            "n": self.n.to_string(),
            "m": self.m.to_string(),
            "identically_one": self.is_identically_one(),
            "local": local,
        })
    }
}

fn prime_support(x: &BigInt) -> Vec<u64> {
    let a = x.abs();
    if a.is_zero() {
        return Vec::new();
    }
    crate::arith::factorize_big(&a.to_biguint().expect("non-negative")).into_iter().map(|(p, _)| p).collect()
}

/// Local factors of the finite part of E*_T at every prime dividing
/// 2·Δ·det T; all other primes contribute 1.
pub fn finite_coefficient(engine: &DensityEngine, t: &GlobalGram, delta: Discriminant, n: usize) -> Result<CoefficientSeries> {
    let m = t.rank();
    if m > n {
        return Err(Error::InvalidInput(format!("rank T = {m} exceeds n = {n}")));
    }
    let det = t.det();
    if det.is_zero() {
        return Err(Error::Singular);
    }
    let mut primes: Vec<u64> = vec![2];
    primes.extend(factorize(delta.abs()).into_iter().map(|(p, _)| p));
    primes.extend(prime_support(det.numer()));
    primes.extend(prime_support(det.denom()));
    primes.sort_unstable();
    primes.dedup();
    let builder = WhittakerBuilder::new(engine);
    let mut local = BTreeMap::new();
    for p in primes {
        let ext = classify_prime(delta, p)?;
        if ext.splitting == Splitting::Ramified && p == 2 {
            return Err(Error::RamifiedTwo);
        }
        let s = standard_self_dual(ext, n)
            .ok_or_else(|| Error::InvalidInput(format!("no self-dual lattice of rank {n} at {p}")))?;
        let w = builder.normalize(&s, &t.localize(ext)?)?;
        let f = if w.is_identically_one() { LocalFactor::Unit } else { LocalFactor::Whittaker(Box::new(w)) };
        local.insert(p, f);
    }
    Ok(CoefficientSeries { finite_local_data: local, delta, n, m })
}

/// j^{s+1/2} σ_{−2s}(j) exactly, for 2s ∈ Z.
pub fn rank1_global_closed_form(j: u64, s: &Rat) -> Result<Surd> {
    let two_s = s * rat(2);
    if !two_s.is_integer() {
        return Err(Error::IrrationalPoint(format!("s = {s}")));
    }
    let ts = two_s.to_integer().to_i64().ok_or_else(|| Error::InvalidInput("s too large".into()))?;
    let mut acc = Surd::rational(Rat::one());
    for (p, e) in factorize(j) {
        acc = acc.mul(&Surd::half_power(p, e as i64 * (ts + 1)));
    }
    Ok(acc.scale(&sigma(-ts, j)))
}

/// Σ_{d | j} d^k
pub fn sigma(k: i64, j: u64) -> Rat {
    assert!(j >= 1, "sigma needs j >= 1");
    divisors(j).into_iter().map(|d| crate::arith::rat_pow(d, k)).sum()
}

pub fn divisors(j: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(j) {
        let mut next = Vec::with_capacity(ds.len() * (e as usize + 1));
        for &d in &ds {
            let mut x = d;
            for _ in 0..=e {
                next.push(x);
                x *= p;
            }
        }
        ds = next;
    }
    ds.sort_unstable();
    ds
}

/// (deg T_j, ½ d/ds|_{s=1/2} j^{s+1/2}σ_{−2s}(j)) with the height exact:
/// ½ Σ_{d|j} (j/d)·ln(j/d²).
pub fn hecke_faltings(j: u64) -> (u64, LogLinear) {
    let degree = sigma(1, j).to_integer().to_u64().expect("sigma_1 fits");
    let half = ratio(1, 2);
    let h = divisors(j).into_iter().fold(LogLinear::zero(), |acc, d| {
        let x = Rat::new(BigInt::from(j), BigInt::from(d * d));
        acc.add(&LogLinear::log_of(&x, &rat((j / d) as i64)))
    });
    (degree, h.scale(&half))
}

/// ½ times the central difference of j^{s+1/2}σ_{−2s}(j) at s = 1/2.
pub fn hecke_height_numeric(j: u64, h: f64) -> f64 {
    let f = |s: f64| {
        let jf = j as f64;
        jf.powf(s + 0.5) * divisors(j).iter().map(|&d| (d as f64).powf(-2.0 * s)).sum::<f64>()
    };
    0.5 * (f(0.5 + h) - f(0.5 - h)) / (2.0 * h)
}

/// Sign exponent m(m−1)(n−m−1)/2 of the global functional equation.
pub fn functional_equation_exponent(n: i64, m: i64) -> i64 {
    m * (m - 1) * (n - m - 1) / 2
}

pub fn functional_equation_sign(n: i64, m: i64) -> i64 {
    if functional_equation_exponent(n, m).is_even() {
        1
    } else {
        -1
    }
}

/// |a♯|^{s−s0} Λ_m(s)/Λ_{m−1}(s+1/2) flat(s+1/2)
///   + (−1)^e |a♯|^{−s−s0} Λ_m(−s)/Λ_{m−1}(−s+1/2) flat(s−1/2).
pub fn corank1_unfold<F>(n: u32, m: u32, delta: Discriminant, a_sharp_norm: &Real, flat: F, s: &Real) -> Result<ComplexValue>
where
    F: Fn(&Real) -> Result<ComplexValue>,
{
    if m == 0 || m > n {
        return Err(Error::InvalidInput(format!("corank-one unfolding needs 1 <= m <= n, got m = {m}")));
    }
    if a_sharp_norm.is_negative() || a_sharp_norm.is_zero() {
        return Err(Error::InvalidInput("|det a#| must be positive".into()));
    }
    let (ni, mi) = (n as i64, m as i64);
    let e = functional_equation_exponent(ni, mi) - functional_equation_exponent(ni, mi - 1);
    let s0 = Real::from_rat(&ratio(ni - mi, 2));
    let half = Real::from_rat(&ratio(1, 2));
    let ratio_at = |x: &Real| -> Result<ComplexValue> {
        Ok(lambda_factor(m, n, x, delta)?.div(&lambda_factor(m - 1, n, &(x + &half), delta)?))
    };
    let t1 = ratio_at(s)?
        .mul(&flat(&(s + &half))?)
        .scale(&a_sharp_norm.pow(&(s - &s0)));
    let neg_s = -s;
    let mut t2 = ratio_at(&neg_s)?
        .mul(&flat(&(s - &half))?)
        .scale(&a_sharp_norm.pow(&(&neg_s - &s0)));
    if e.rem_euclid(2) == 1 {
        t2 = t2.neg();
    }
    Ok(t1.add(&t2))
}

/// s ↦ j^{s+1/2}σ_{−2s}(j) at a real point, as a flat series for unfolding.
pub fn rank1_flat_series(j: u64) -> impl Fn(&Real) -> Result<ComplexValue> {
    move |s: &Real| {
        let jr = Real::from_i64(j as i64);
        let half = Real::from_rat(&ratio(1, 2));
        let mut acc = Real::zero();
        for d in divisors(j) {
            acc = &acc + &Real::from_i64(d as i64).pow(&(&Real::from_i64(-2) * s));
        }
        Ok(ComplexValue::exact(&jr.pow(&(s + &half)) * &acc))
    }
}

/// Decimal value of a LogLinear, for tables.
pub fn loglinear_decimal(l: &LogLinear) -> String {
    format!("{:.12}", l.to_f64())
}

pub fn rat_decimal(x: &Rat) -> String {
    format!("{:.12}", rat_to_f64(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::DensityConfig;

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(1, 12), rat(28));
        assert_eq!(sigma(0, 12), rat(6));
        assert_eq!(sigma(0, 1), rat(1));
        assert_eq!(sigma(1, 7), rat(8));
        assert_eq!(sigma(-2, 2), ratio(5, 4));
    }

    #[test]
    fn hecke_examples() {
        assert_eq!(hecke_faltings(1), (1, LogLinear::zero()));
        let (deg, h) = hecke_faltings(5);
        assert_eq!(deg, 6);
        assert_eq!(h, LogLinear::log_prime(5, rat(2)));
        let (deg, h) = hecke_faltings(4);
        assert_eq!(deg, 7);
        assert_eq!(h, LogLinear::log_prime(2, rat(3)));
        for j in [6, 12, 30, 97] {
            let (_, h) = hecke_faltings(j);
            let num = hecke_height_numeric(j, 1e-6);
            assert!((h.to_f64() - num).abs() <= 1e-6 * num.abs().max(1.0), "{j}");
        }
    }

    #[test]
    fn rank_one_coefficients() {
        let engine = DensityEngine::new(DensityConfig::default());
        let d7 = Discriminant::new(-7).unwrap();
        let one = finite_coefficient(&engine, &GlobalGram::diagonal(&[1]), d7, 2).unwrap();
        assert!(one.is_identically_one(), "{}", one.to_json());
        // 3 is inert for Δ = −7, 2 splits, 7 ramifies
        for j in [2u64, 3, 6, 7, 14] {
            let c = finite_coefficient(&engine, &GlobalGram::diagonal(&[j as i64]), d7, 2).unwrap();
            for s in [ratio(0, 1), ratio(1, 2), ratio(-1, 2), ratio(1, 1)] {
                assert_eq!(c.eval(&s).unwrap(), rank1_global_closed_form(j, &s).unwrap(), "j={j} s={s}");
            }
            assert_eq!(c.eval(&ratio(1, 2)).unwrap(), Surd::rational(sigma(1, j)));
        }
    }

    #[test]
    fn unfolding_symmetry() {
        let d = Discriminant::new(-7).unwrap();
        let one = Real::one();
        for s in [ratio(1, 5), ratio(7, 10)] {
            let s = Real::from_rat(&s);
            let a = corank1_unfold(2, 2, d, &one, rank1_flat_series(3), &s).unwrap();
            let b = corank1_unfold(2, 2, d, &one, rank1_flat_series(3), &-&s).unwrap();
            assert!(a.add(&b).abs_f64() < 1e-9 * a.abs_f64().max(1.0));
            let c = corank1_unfold(2, 2, d, &one, |_: &Real| Ok(ComplexValue::one()), &s).unwrap();
            let c2 = corank1_unfold(2, 2, d, &one, |_: &Real| Ok(ComplexValue::one()), &-&s).unwrap();
            assert!(c.add(&c2).abs_f64() < 1e-9 * c.abs_f64().max(1.0));
        }
        // odd sign and even flat series: the value at the centre vanishes
        let z = corank1_unfold(2, 2, d, &one, rank1_flat_series(5), &Real::zero()).unwrap();
        assert!(z.abs_f64() < 1e-30);
    }
}
