//! Small exact-arithmetic helpers shared across modules: primality, factoring,
//! p-adic valuations of rationals, modular inverses.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Trial-division factorization, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn factorize_big(n: &BigUint) -> Vec<(u64, u32)> {
    let n = n
        .to_u64()
        .expect("factorization is only needed for machine-size integers");
    factorize(n)
}

/// p-adic valuation of a nonzero integer.
pub fn val_int(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a rational; `None` for zero.
pub fn val_rat(x: &Rat, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(val_int(x.numer(), p) as i64 - val_int(x.denom(), p) as i64)
}

pub fn is_p_integral(x: &Rat, p: u64) -> bool {
    x.is_zero() || val_int(x.denom(), p) == 0
}

pub fn pow_u64(p: u64, e: u32) -> u64 {
    p.checked_pow(e).expect("u64 overflow in pow")
}

pub fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inv(a: u64, m: u64) -> Option<u64> {
    let e = BigInt::from(a).extended_gcd(&BigInt::from(m));
    if !e.gcd.is_one() {
        return None;
    }
    let x = e.x.mod_floor(&BigInt::from(m));
    x.to_u64()
}

/// Reduce a p-integral rational into Z/m where m is a power of p.
pub fn rat_mod(x: &Rat, p: u64, m: u64) -> Option<u64> {
    if !is_p_integral(x, p) {
        return None;
    }
    let mb = BigInt::from(m);
    let n = x.numer().mod_floor(&mb).to_u64()?;
    let d = x.denom().mod_floor(&mb).to_u64()?;
    let di = mod_inv(d, m)?;
    Some(((n as u128 * di as u128) % m as u128) as u64)
}

/// Legendre symbol (a/p) for an odd prime p.
pub fn legendre(a: i64, p: u64) -> i32 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if mod_pow(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Smallest positive quadratic non-residue modulo an odd prime.
pub fn smallest_nonresidue(p: u64) -> u64 {
    (2..p).find(|&a| legendre(a as i64, p) == -1).expect("odd prime has non-residues")
}

/// Kronecker symbol (d/n) for n ≥ 1.
pub fn kronecker(d: i64, n: u64) -> i32 {
    assert!(n >= 1);
    let mut r = 1;
    for (p, e) in factorize(n) {
        let s = if p == 2 {
            if d % 2 == 0 {
                0
            } else {
                match d.rem_euclid(8) {
                    1 | 7 => 1,
                    _ => -1,
                }
            }
        } else {
            legendre(d, p)
        };
        if e % 2 == 1 {
            r *= s;
        } else if s == 0 {
            r = 0;
        }
    }
    r
}

pub fn rat_to_string(x: &Rat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parse "a", "-a" or "a/b".
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rat::from_integer(n))
    }
}

/// q^e for possibly negative e as an exact rational.
pub fn rat_pow(q: u64, e: i64) -> Rat {
    let b = BigInt::from(q).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rat::from_integer(b)
    } else {
        Rat::new(BigInt::one(), b)
    }
}

pub fn rat_abs(x: &Rat) -> Rat {
    x.abs()
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact real number c·√r with c rational and r a squarefree positive integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd {
    pub coeff: Rat,
    pub radicand: u64,
}

impl Surd {
    pub fn rational(c: Rat) -> Self {
        Surd { coeff: c, radicand: 1 }
    }

    /// c·√r for arbitrary r ≥ 1, pulling square factors out.
    pub fn new(c: Rat, r: u64) -> Self {
        if c.is_zero() {
            return Surd::rational(c);
        }
        let mut out = BigInt::one();
        let mut rad = 1u64;
        for (p, e) in factorize(r) {
            out *= BigInt::from(p).pow(e / 2);
            if e % 2 == 1 {
                rad *= p;
            }
        }
        Surd { coeff: c * Rat::from_integer(out), radicand: rad }
    }

    /// p^{e/2}
    pub fn half_power(p: u64, e: i64) -> Self {
        let c = rat_pow(p, e.div_euclid(2));
        if e.rem_euclid(2) == 0 {
            Surd::rational(c)
        } else {
            Surd::new(c, p)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        (self.radicand == 1 || self.coeff.is_zero()).then_some(&self.coeff)
    }

    pub fn mul(&self, o: &Surd) -> Surd {
        let g = self.radicand.gcd(&o.radicand);
        let r = (self.radicand / g) * (o.radicand / g);
        Surd::new(&self.coeff * &o.coeff * rat(g as i64), r)
    }

    pub fn scale(&self, c: &Rat) -> Surd {
        Surd::new(&self.coeff * c, self.radicand)
    }

    pub fn div(&self, o: &Surd) -> Option<Surd> {
        if o.is_zero() {
            return None;
        }
        // 1/(c√r) = √r/(c·r)
        let inv = Surd { coeff: Rat::one() / (&o.coeff * rat(o.radicand as i64)), radicand: o.radicand };
        Some(self.mul(&inv))
    }

    /// Sum, defined when the radicands agree or one side is zero.
    pub fn add(&self, o: &Surd) -> Option<Surd> {
        if o.is_zero() {
            return Some(self.clone());
        }
        if self.is_zero() {
            return Some(o.clone());
        }
        (self.radicand == o.radicand).then(|| Surd::new(&self.coeff + &o.coeff, self.radicand))
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.coeff) * (self.radicand as f64).sqrt()
    }
}

impl std::fmt::Display for Surd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.radicand == 1 || self.coeff.is_zero() {
            write!(f, "{}", rat_to_string(&self.coeff))
        } else {
            write!(f, "{}*sqrt({})", rat_to_string(&self.coeff), self.radicand)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_and_primes() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert!(is_prime(97) && !is_prime(91));
        assert_eq!(smallest_nonresidue(7), 3);
        assert_eq!(smallest_nonresidue(3), 2);
    }

    #[test]
    fn modular_reduction_of_rationals() {
        assert_eq!(rat_mod(&ratio(1, 2), 3, 9), Some(5));
        assert_eq!(rat_mod(&ratio(1, 3), 3, 9), None);
        assert_eq!(rat_mod(&rat(-1), 5, 25), Some(24));
    }

    #[test]
    fn kronecker_small_table() {
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-4, 2), 0);
    }

    #[test]
    fn valuations() {
        assert_eq!(val_rat(&ratio(18, 5), 3), Some(2));
        assert_eq!(val_rat(&ratio(2, 9), 3), Some(-2));
        assert_eq!(parse_rat("-3/6"), Some(ratio(-1, 2)));
    }

    #[test]
    fn surds() {
        let a = Surd::half_power(3, 3);
        assert_eq!(a, Surd::new(rat(3), 3));
        assert_eq!(a.mul(&Surd::half_power(3, 1)), Surd::rational(rat(9)));
        assert_eq!(Surd::new(rat(1), 12), Surd::new(rat(2), 3));
        assert_eq!(a.div(&a).unwrap(), Surd::rational(rat(1)));
        assert!(a.add(&Surd::rational(rat(1))).is_none());
        assert!((Surd::half_power(5, -1).to_f64() - 5f64.powf(-0.5)).abs() < 1e-15);
    }
}
