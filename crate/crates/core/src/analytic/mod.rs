//! The global normalizing factor Λ_m(s)°_n over F⁺ = Q and the identities it
//! satisfies: the closed-form volume, the corank-one ratio, the two forms of
//! the Archimedean intertwining coefficient, and the volume of the Shimura
//! variety at hyperspecial and self-dual-trace level.

pub mod real;
pub mod special;

pub use real::{set_precision_digits, ComplexValue, Real};
pub use special::{dirichlet_l, gamma, hurwitz_zeta, riemann_zeta, Character};

use crate::arith::{ratio, Rat};
use crate::error::{Error, Result};
use crate::field_data::{class_number, ramified_primes, unit_count, Discriminant};
use crate::finite_groups::stabilizer_ratio;

fn r(x: &Rat) -> Real {
    Real::from_rat(x)
}

fn int(x: i64) -> Real {
    Real::from_i64(x)
}

fn gamma_at(x: Real, label: &str) -> Result<ComplexValue> {
    gamma(&x).map_err(|e| match e {
        Error::PoleEncountered(_) => Error::PoleEncountered(format!("{label}: Gamma({})", x.to_decimal(8))),
        e => e,
    })
}

fn l_at(x: Real, chi: Character, label: &str) -> Result<ComplexValue> {
    dirichlet_l(&x, chi).map_err(|e| match e {
        Error::PoleAtOne => Error::PoleEncountered(format!("{label}: zeta(1)")),
        e => e,
    })
}

/// Λ_m(s)°_n with s0 = (n − m)/2.
pub fn lambda_factor(m: u32, n: u32, s: &Real, delta: Discriminant) -> Result<ComplexValue> {
    let (mi, ni) = (m as i64, n as i64);
    let s0 = r(&ratio(ni - mi, 2));
    let pi = Real::pi();
    let two_pi = &int(2) * &pi;
    let abs_d = int(delta.abs() as i64);
    // (2π)^{m(m−1)/2} (−2πi)^{−nm}: 1/(−i)^{nm} = i^{nm}
    let mut acc = ComplexValue::i_pow(ni * mi);
    let mag = &(&two_pi.powi(mi * (mi - 1) / 2 - ni * mi) * &pi.pow(&(&int(mi) * &(&s0 - s))))
        * &abs_d.pow(&(&r(&ratio(mi * (mi - 1), 4)) + &(&int(mi / 2) * &(s + &s0))));
    acc = acc.scale(&mag);
    for j in 0..mi {
        let g = gamma_at(&(s - &s0) + &int(ni - j), "lambda_factor")?;
        let l = l_at(&(&int(2) * s) + &int(mi - j), Character::power(delta, j + ni), "lambda_factor")?;
        acc = acc.mul(&g).mul(&l);
    }
    Ok(acc)
}

/// |Δ|^{n/2(s−1)} ∏_{j=1}^n |Δ|^{j/2} Γ(s+j) L(2s+j, η^j) / (2^j π^{s+j}).
pub fn closed_form_volume(n: u32, s: &Real, delta: Discriminant) -> Result<ComplexValue> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidInput(format!("closed-form volume needs even n >= 2, got {n}")));
    }
    let pi = Real::pi();
    let abs_d = int(delta.abs() as i64);
    let half_n = r(&ratio(n as i64, 2));
    let mut acc = ComplexValue::exact(abs_d.pow(&(&half_n * &(s - &Real::one()))));
    for j in 1..=n as i64 {
        let g = gamma_at(s + &int(j), "closed_form_volume")?;
        let l = l_at(&(&int(2) * s) + &int(j), Character::power(delta, j), "closed_form_volume")?;
        let c = &abs_d.pow(&r(&ratio(j, 2))) / &(&int(2).powi(j) * &pi.pow(&(s + &int(j))));
        acc = acc.mul(&g).mul(&l).scale(&c);
    }
    Ok(acc)
}

/// Λ_n(s)°_n / Λ_{n−1}(s+1/2)°_n computed from the definition and from
/// −½ L(2s+1, η) Γ(s+1) |Δ|^{s+1/2} π^{−s−1}.
pub fn corank1_ratio(n: u32, s: &Real, delta: Discriminant) -> Result<(ComplexValue, ComplexValue)> {
    if n % 4 != 2 {
        return Err(Error::InvalidInput(format!("corank-one ratio needs n = 2 mod 4, got {n}")));
    }
    let half = r(&ratio(1, 2));
    let top = lambda_factor(n, n, s, delta)?;
    let bottom = lambda_factor(n - 1, n, &(s + &half), delta)?;
    let via_lambda = top.div(&bottom);
    let l = l_at(&(&int(2) * s) + &Real::one(), Character::Quadratic(delta), "corank1_ratio")?;
    let g = gamma_at(s + &Real::one(), "corank1_ratio")?;
    let c = &int(delta.abs() as i64).pow(&(s + &half)) / &Real::pi().pow(&(s + &Real::one()));
    let closed = l.mul(&g).scale(&c).scale(&-&half);
    Ok((via_lambda, closed))
}

/// −h_F / w_F, the value of the corank-one ratio at s = 0.
pub fn class_number_ratio(delta: Discriminant) -> Rat {
    -ratio(class_number(delta) as i64, unit_count(delta) as i64)
}

/// h^CM defined through ratio'(0) = 2 (h_F/w_F) h^CM, by a central difference.
pub fn cm_height_constant(n: u32, delta: Discriminant) -> Result<f64> {
    let h = Real::from_rat(&ratio(1, 1_000_000));
    let (plus, _) = corank1_ratio(n, &h, delta)?;
    let (minus, _) = corank1_ratio(n, &-&h, delta)?;
    let deriv = (&(&plus.re - &minus.re) / &(&int(2) * &h)).to_f64();
    let hw = -crate::arith::rat_to_f64(&class_number_ratio(delta));
    Ok(deriv / (2.0 * hw))
}

/// L_∞(x, sgn^δ) = π^{−(x+δ)/2} Γ((x+δ)/2).
fn l_infinity(x: &Real, delta: i64) -> Result<ComplexValue> {
    let y = &(x + &int(delta)) / &int(2);
    let g = gamma_at(y.clone(), "L_infinity")?;
    Ok(g.scale(&Real::pi().pow(&-&y)))
}

/// The intertwining coefficient for scalar weight n on U(m, m), as stated in
/// the lemma (via L_∞ and ε_∞) and as in Shimura's form (via Γ only).
pub fn shimura_intertwining_check(m: u32, n: u32, s: &Real) -> Result<(ComplexValue, ComplexValue)> {
    let (mi, ni) = (m as i64, n as i64);
    let s0 = r(&ratio(ni - mi, 2));
    let pi = Real::pi();
    let two_s = &int(2) * s;

    let mut lemma = ComplexValue::i_pow(2 * ni * mi + mi * (mi - 1) / 2)
        .scale(&pi.pow(&(&int(2 * mi) * s)));
    for j in 0..mi {
        let delta = (ni + j).rem_euclid(2);
        let num_l = l_infinity(&(&two_s + &int(j - mi + 1)), delta)?;
        let num_g = gamma_at(&(&int(ni - j) - s) - &s0, "lemma")?;
        let den_l = l_infinity(&(&int(mi - j) - &two_s), delta)?;
        let den_g = gamma_at(&(s - &s0) + &int(ni - j), "lemma")?;
        // ε_∞(sgn^δ, ψ̄) = 1 or −i
        let eps = if delta == 0 { ComplexValue::one() } else { ComplexValue::i_pow(3) };
        lemma = lemma.mul(&num_l).mul(&num_g).div(&eps.mul(&den_l).mul(&den_g));
    }

    let exp2 = &int(mi * (mi - 1) / 2) + &(&int(2 * mi) * s);
    let c = &(&(&int(2) * &pi).powi(mi * mi) * &pi.powi(-mi * (mi - 1) / 2)) / &int(2).pow(&exp2);
    let mut shimura = ComplexValue::i_pow(-mi * ni).scale(&c);
    for j in 0..mi {
        let g = gamma_at(&two_s - &int(j), "shimura")?;
        let d1 = gamma_at(&(s - &s0) + &int(ni - j), "shimura")?;
        let d2 = gamma_at(&(s - &s0) - &int(j), "shimura")?;
        shimura = shimura.mul(&g).div(&d1.mul(&d2));
    }
    Ok((lemma, shimura))
}

/// Product over ℓ | Δ of the self-dual-trace change-of-level factor (1+ℓ^{n/2})/2.
pub fn level_change_factor(n: u32, delta: Discriminant) -> Rat {
    ramified_primes(delta)
        .into_iter()
        .map(|l| stabilizer_ratio(n / 2, l))
        .fold(ratio(1, 1), |a, b| a * b)
}

/// Complex volume from the hyperspecial-level formula
/// 2^{1−o(Δ)} ∏_{ℓ|Δ}(1+ℓ^{−n/2}) ∏_j |Δ|^{j/2} Γ(j) L(j, η^j)/(2π)^j;
/// at self-dual-trace level this is divided by the change-of-level factor.
pub fn shimura_volume(n: u32, delta: Discriminant, self_dual_trace_level: bool) -> Result<ComplexValue> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidInput(format!("volume needs even n >= 2, got {n}")));
    }
    let primes = ramified_primes(delta);
    let half_n = r(&ratio(n as i64, 2));
    let mut c = int(2).powi(1 - primes.len() as i64);
    for &l in &primes {
        c = &c * &(&Real::one() + &int(l as i64).pow(&-&half_n));
    }
    let mut acc = ComplexValue::exact(c);
    let zero = Real::zero();
    let two_pi = &int(2) * &Real::pi();
    let abs_d = int(delta.abs() as i64);
    for j in 1..=n as i64 {
        let g = gamma_at(&zero + &int(j), "shimura_volume")?;
        let l = l_at(int(j), Character::power(delta, j), "shimura_volume")?;
        acc = acc.mul(&g).mul(&l).scale(&(&abs_d.pow(&r(&ratio(j, 2))) / &two_pi.powi(j)));
    }
    if self_dual_trace_level {
        acc = acc.div(&ComplexValue::exact(r(&level_change_factor(n, delta))));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(x: i64) -> Discriminant {
        Discriminant::new(x).unwrap()
    }

    fn q(n: i64, den: i64) -> Real {
        Real::from_rat(&ratio(n, den))
    }

    #[test]
    fn rank_zero_is_one() {
        let v = lambda_factor(0, 3, &q(3, 10), d(-7)).unwrap();
        assert!((v.re.to_f64() - 1.0).abs() < 1e-30 && v.im.is_zero());
    }

    #[test]
    fn volume_closed_form() {
        for (n, s, delta) in [(2, q(0, 1), -4), (4, q(1, 2), -7), (6, q(1, 4), -23), (2, q(3, 10), -7)] {
            let a = lambda_factor(n, n, &s, d(delta)).unwrap();
            let b = closed_form_volume(n, &s, d(delta)).unwrap();
            assert!(a.distance(&b) < 1e-9 * b.abs_f64().max(1.0), "n={n} delta={delta}");
            assert!(a.err < 1e-30);
        }
    }

    #[test]
    fn corank_one() {
        for delta in [-4, -7, -8, -23] {
            let (a, b) = corank1_ratio(2, &Real::zero(), d(delta)).unwrap();
            assert!(a.distance(&b) < 1e-9);
            let expect = crate::arith::rat_to_f64(&class_number_ratio(d(delta)));
            assert!((b.re.to_f64() - expect).abs() < 1e-8, "{delta}");
        }
        assert!(corank1_ratio(4, &Real::zero(), d(-7)).is_err());
    }

    #[test]
    fn intertwining() {
        for (m, n, s) in [(1, 2, q(37, 100)), (2, 2, q(61, 100)), (1, 1, q(1, 4))] {
            let (a, b) = shimura_intertwining_check(m, n, &s).unwrap();
            assert!(a.distance(&b) < 1e-8 * b.abs_f64().max(1.0), "m={m} n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn volume_chain() {
        for (n, delta) in [(2, -7), (2, -23), (6, -15)] {
            let v = shimura_volume(n, d(delta), true).unwrap();
            let l = lambda_factor(n, n, &Real::zero(), d(delta)).unwrap();
            let twice = l.scale(&Real::from_i64(2));
            assert!(v.distance(&twice) < 1e-8 * twice.abs_f64().max(1.0), "{n} {delta}: {v} vs {twice}");
        }
        let hyper = shimura_volume(2, d(-7), false).unwrap();
        let trace = shimura_volume(2, d(-7), true).unwrap();
        let ratio_ = hyper.div(&trace);
        assert!((ratio_.re.to_f64() - 4.0).abs() < 1e-20);
    }

    #[test]
    fn poles_are_reported() {
        // Λ_2(s)°_2 at s = −1/2 hits ζ(1)
        assert!(matches!(lambda_factor(2, 2, &q(-1, 2), d(-7)), Err(Error::PoleEncountered(_))));
    }
}
