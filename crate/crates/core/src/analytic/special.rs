//! Γ, Hurwitz ζ and Dirichlet L-functions at real arguments.
//!
//! Γ uses Stirling's series after shifting the argument past 40; ζ(s, x) uses
//! Euler–Maclaurin, which also continues it to s < 1. Both report an absolute
//! error bound built from the first omitted term plus rounding.

use super::real::{unit_roundoff, ComplexValue, Real};
use crate::arith::{rat, Rat};
use crate::error::{Error, Result};
use crate::field_data::Discriminant;
use num_traits::{One, Zero};
use std::sync::OnceLock;

const STIRLING_SHIFT: i64 = 40;
const STIRLING_TERMS: usize = 30;
const EM_TERMS: usize = 25;

/// B_0, B_1, …, B_{2·EM_TERMS+2} (B_1 = −1/2).
pub fn bernoulli() -> &'static [Rat] {
    static B: OnceLock<Vec<Rat>> = OnceLock::new();
    B.get_or_init(|| bernoulli_numbers(2 * STIRLING_TERMS.max(EM_TERMS) + 2))
}

fn bernoulli_numbers(max: usize) -> Vec<Rat> {
    // Σ_{k=0}^{n} C(n+1, k) B_k = 0
    let mut b: Vec<Rat> = vec![Rat::one()];
    for n in 1..=max {
        let mut binom = Rat::one();
        let mut acc = Rat::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += &binom * bk;
            binom = binom * rat((n + 1 - k) as i64) / rat(k as i64 + 1);
        }
        b.push(-acc / rat(n as i64 + 1));
    }
    b
}

fn pole_check(x: &Real, what: &str) -> Result<()> {
    if let Some(k) = x.near_integer(1e-30) {
        if k <= 0 {
            return Err(Error::PoleEncountered(format!("{what} at {k}")));
        }
    }
    Ok(())
}

/// Γ(x) for real x off the non-positive integers.
pub fn gamma(x: &Real) -> Result<ComplexValue> {
    pole_check(x, "Gamma")?;
    let half = Real::from_f64(0.5);
    if *x < half {
        // Γ(x) = π / (sin(πx) Γ(1−x))
        let pi = Real::pi();
        let g = gamma(&(&Real::one() - x))?;
        let denom = ComplexValue::exact((&pi * x).sin()).mul(&g);
        return Ok(ComplexValue::exact(pi).div(&denom));
    }
    let shift = (STIRLING_SHIFT - x.to_f64().floor() as i64).max(0);
    let z = x + &Real::from_i64(shift);
    let mut product = Real::one();
    for i in 0..shift {
        product = &product * &(x + &Real::from_i64(i));
    }
    let b = bernoulli();
    let half_ln_2pi = &(&Real::from_i64(2) * &Real::pi()).ln() * &half;
    let mut lg = &(&(&(&z - &half) * &z.ln()) - &z) + &half_ln_2pi;
    let z2 = &z * &z;
    let mut zpow = z.clone();
    let mut last = 0.0;
    for k in 1..=STIRLING_TERMS {
        let c = &b[2 * k] / rat((2 * k * (2 * k - 1)) as i64);
        let term = &Real::from_rat(&c) / &zpow;
        last = term.abs().to_f64();
        lg = &lg + &term;
        zpow = &zpow * &z2;
    }
    let value = &lg.exp() / &product;
    let rel = last + 64.0 * unit_roundoff() * (1.0 + lg.abs().to_f64());
    let err = value.abs().to_f64() * rel;
    Ok(ComplexValue::real(value, err))
}

/// ζ(s, x) split as (regular part, (N+x)^{1−s}/(s−1)); at s = 1 the second
/// slot holds the finite part −ln(N+x), meaningful only in sums whose
/// weights total zero.
fn hurwitz_parts(s: &Real, x: &Real) -> (Real, Real, f64) {
    let n = 20 + s.abs().to_f64().ceil() as i64;
    let neg_s = -s;
    let mut sum = Real::zero();
    for k in 0..n {
        sum = &sum + &(&Real::from_i64(k) + x).pow(&neg_s);
    }
    let a = &Real::from_i64(n) + x;
    let one = Real::one();
    let s_minus_1 = s - &one;
    let singular = if s_minus_1.is_zero() {
        -a.ln()
    } else {
        &a.pow(&(&one - s)) / &s_minus_1
    };
    let a_neg_s = a.pow(&neg_s);
    sum = &sum + &(&a_neg_s * &Real::from_f64(0.5));
    // Σ B_{2j}/(2j)! · s(s+1)…(s+2j−2) · a^{−s−2j+1}
    let b = bernoulli();
    let a_inv = &one / &a;
    let a_inv2 = &a_inv * &a_inv;
    let mut rising = s.clone();
    let mut fact = Rat::from_integer(2.into());
    let mut apow = &a_neg_s * &a_inv;
    let mut last = 0.0;
    for j in 1..=EM_TERMS {
        let term = &(&Real::from_rat(&(&b[2 * j] / &fact)) * &rising) * &apow;
        last = term.abs().to_f64();
        sum = &sum + &term;
        let k = 2 * j as i64;
        rising = &(&rising * &(s + &Real::from_i64(k - 1))) * &(s + &Real::from_i64(k));
        fact = fact * rat(k + 1) * rat(k + 2);
        apow = &apow * &a_inv2;
    }
    let scale = sum.abs().to_f64() + singular.abs().to_f64();
    let err = last + (n as f64 + 60.0) * unit_roundoff() * scale.max(1.0);
    (sum, singular, err)
}

/// Hurwitz ζ(s, x) for x ∈ (0, 1], s ≠ 1.
pub fn hurwitz_zeta(s: &Real, x: &Real) -> Result<ComplexValue> {
    if s.near_integer(1e-30) == Some(1) {
        return Err(Error::PoleAtOne);
    }
    let (r, sing, err) = hurwitz_parts(s, x);
    Ok(ComplexValue::real(&r + &sing, err))
}

/// Either the trivial character or the Kronecker character of Δ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Character {
    Trivial,
    Quadratic(Discriminant),
}

impl Character {
    /// η^k
    pub fn power(delta: Discriminant, k: i64) -> Character {
        if k.rem_euclid(2) == 0 {
            Character::Trivial
        } else {
            Character::Quadratic(delta)
        }
    }
}

pub fn riemann_zeta(s: &Real) -> Result<ComplexValue> {
    hurwitz_zeta(s, &Real::one())
}

/// L(s, χ) = |Δ|^{−s} Σ_{a=1}^{|Δ|} χ(a) ζ(s, a/|Δ|).
pub fn dirichlet_l(s: &Real, chi: Character) -> Result<ComplexValue> {
    let delta = match chi {
        Character::Trivial => return riemann_zeta(s),
        Character::Quadratic(d) => d,
    };
    let k = delta.abs();
    let kr = Real::from_i64(k as i64);
    let mut total = Real::zero();
    let mut err = 0.0;
    for a in 1..=k {
        let c = delta.character(a);
        if c == 0 {
            continue;
        }
        let (r, sing, e) = hurwitz_parts(s, &(&Real::from_i64(a as i64) / &kr));
        let part = &r + &sing;
        total = if c > 0 { &total + &part } else { &total - &part };
        err += e;
    }
    let scale = kr.pow(&-s);
    let value = &total * &scale;
    let err = err * scale.to_f64() + value.abs().to_f64() * unit_roundoff() * 8.0;
    Ok(ComplexValue::real(value, err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::field_data::{class_number, unit_count};

    fn r(n: i64, d: i64) -> Real {
        Real::from_rat(&ratio(n, d))
    }

    #[test]
    fn bernoulli_values() {
        let b = bernoulli();
        assert_eq!(b[1], ratio(-1, 2));
        assert_eq!(b[2], ratio(1, 6));
        assert_eq!(b[3], rat(0));
        assert_eq!(b[12], ratio(-691, 2730));
    }

    #[test]
    fn gamma_values() {
        let g = gamma(&r(1, 2)).unwrap();
        let sqrt_pi = Real::pi().sqrt();
        assert!((&g.re - &sqrt_pi).abs().to_f64() < 1e-40);
        assert!(g.err < 1e-40);
        assert!((gamma(&r(7, 1)).unwrap().re.to_f64() - 720.0).abs() < 1e-9);
        // Γ(−1/2) = −2√π
        let g = gamma(&r(-1, 2)).unwrap();
        assert!((&g.re + &(&Real::from_i64(2) * &sqrt_pi)).abs().to_f64() < 1e-40);
        assert!(matches!(gamma(&r(-2, 1)), Err(Error::PoleEncountered(_))));
    }

    #[test]
    fn zeta_values() {
        let z2 = riemann_zeta(&r(2, 1)).unwrap();
        let pi = Real::pi();
        let expected = &(&pi * &pi) / &Real::from_i64(6);
        assert!((&z2.re - &expected).abs().to_f64() < 1e-40);
        // ζ(0) = −1/2, ζ(−1) = −1/12
        assert!((riemann_zeta(&r(0, 1)).unwrap().re.to_f64() + 0.5).abs() < 1e-30);
        assert!((riemann_zeta(&r(-1, 1)).unwrap().re.to_f64() + 1.0 / 12.0).abs() < 1e-30);
        assert!(matches!(riemann_zeta(&r(1, 1)), Err(Error::PoleAtOne)));
    }

    #[test]
    fn euler_maclaurin_matches_direct_sum() {
        // ζ(3, 1/2) = 7ζ(3) and also Σ (k+1/2)^{-3} with an integral tail
        let s = r(3, 1);
        let x = r(1, 2);
        let em = hurwitz_zeta(&s, &x).unwrap();
        let mut direct = Real::zero();
        let n = 2000;
        for k in 0..n {
            direct = &direct + &(&Real::from_i64(k) + &x).powi(-3);
        }
        // tail via Euler–Maclaurin by hand: a^{-2}/2 + a^{-3}/2 + 3a^{-4}/12 − …
        let a = &Real::from_i64(n) + &x;
        let tail = &(&(&a.powi(-2) / &Real::from_i64(2)) + &(&a.powi(-3) / &Real::from_i64(2)))
            + &(&(&a.powi(-4) / &Real::from_i64(4)) - &(&a.powi(-6) / &Real::from_i64(12)));
        let direct = &direct + &tail;
        assert!((&em.re - &direct).abs().to_f64() < 1e-25);
        let z3 = riemann_zeta(&s).unwrap();
        assert!((&em.re - &(&z3.re * &Real::from_i64(7))).abs().to_f64() < 1e-40);
    }

    #[test]
    fn leibniz_and_class_number_formula() {
        let d4 = Discriminant::new(-4).unwrap();
        let l = dirichlet_l(&Real::one(), Character::Quadratic(d4)).unwrap();
        let pi4 = &Real::pi() / &Real::from_i64(4);
        assert!((&l.re - &pi4).abs().to_f64() < 1e-30);
        for d in [-4, -7, -23, -8, -15] {
            let delta = Discriminant::new(d).unwrap();
            let l = dirichlet_l(&Real::one(), Character::Quadratic(delta)).unwrap();
            let h = class_number(delta) as f64;
            let w = unit_count(delta) as f64;
            let expected = 2.0 * std::f64::consts::PI * h / (w * (delta.abs() as f64).sqrt());
            assert!((l.re.to_f64() - expected).abs() < 1e-12, "{d}");
        }
    }
}
