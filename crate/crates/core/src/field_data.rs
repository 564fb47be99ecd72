//! Imaginary quadratic fields F = Q(√Δ): discriminant validation, splitting
//! of rational primes, and the global constants h_F, w_F, o(Δ).

use crate::arith::{factorize, is_prime, kronecker, legendre, rat_mod, rat_pow, smallest_nonresidue, val_rat, Rat};
use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Discriminant(i64);

fn squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e == 1)
}

impl Discriminant {
    pub fn new(delta: i64) -> Result<Self> {
        if delta >= 0 {
            return Err(Error::InvalidDiscriminant(delta));
        }
        let a = delta.unsigned_abs();
        let ok = match delta.rem_euclid(16) {
            r if r % 4 == 1 => squarefree(a),
            8 | 12 => squarefree(a / 4),
            _ => false,
        };
        if ok {
            Ok(Discriminant(delta))
        } else {
            Err(Error::InvalidDiscriminant(delta))
        }
    }

    pub fn value(&self) -> i64 {
        self.0
    }

    pub fn abs(&self) -> u64 {
        self.0.unsigned_abs()
    }

    /// The quadratic character η(n) = (Δ/n) for n ≥ 1.
    pub fn character(&self, n: u64) -> i32 {
        kronecker(self.0, n)
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Splitting {
    Inert,
    Split,
    Ramified,
}

impl Splitting {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "inert" => Ok(Splitting::Inert),
            "split" => Ok(Splitting::Split),
            "ramified" => Ok(Splitting::Ramified),
            other => Err(Error::InvalidInput(format!("unknown splitting type {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Splitting::Inert => "inert",
            Splitting::Split => "split",
            Splitting::Ramified => "ramified",
        }
    }
}

/// Splitting data of F at one rational prime, together with the local model:
/// the trace-zero generator δ of F_v over Q_p satisfies δ² = `delta_sq`.
///
/// * inert, p odd: δ² = smallest non-residue u
/// * inert, p = 2: δ = 2ω+1 with ω²+ω+1 = 0, so δ² = −3
/// * split: δ ↦ (1, −1) in Q_p × Q_p, δ² = 1
/// * ramified: δ = π with π² = c·p
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LocalQuadExt {
    pub p: u64,
    pub splitting: Splitting,
    pub q: u64,
    pub different_exponent: u32,
    pub delta_sq: i64,
}

impl LocalQuadExt {
    /// Local model with default constants. Ramified defaults to π² = −p.
    pub fn new(p: u64, splitting: Splitting) -> Result<Self> {
        match splitting {
            Splitting::Ramified => Self::ramified(p, -1),
            _ => Self::unramified(p, splitting),
        }
    }

    pub fn unramified(p: u64, splitting: Splitting) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let delta_sq = match splitting {
            Splitting::Split => 1,
            Splitting::Inert if p == 2 => -3,
            Splitting::Inert => smallest_nonresidue(p) as i64,
            Splitting::Ramified => return Self::ramified(p, -1),
        };
        Ok(LocalQuadExt {
            p,
            splitting,
            q: p,
            different_exponent: 0,
            delta_sq,
        })
    }

    /// Ramified model with π² = c·p; `c` must be a p-adic unit.
    pub fn ramified(p: u64, c: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p == 2 {
            return Err(Error::RamifiedTwo);
        }
        if c.rem_euclid(p as i64) == 0 {
            return Err(Error::InvalidInput(format!("{c} is not a unit at {p}")));
        }
        Ok(LocalQuadExt {
            p,
            splitting: Splitting::Ramified,
            q: p,
            different_exponent: 1,
            delta_sq: c * p as i64,
        })
    }

    pub fn is_ramified(&self) -> bool {
        self.splitting == Splitting::Ramified
    }

    /// For ramified models, the unit c with π² = c·p.
    pub fn ramified_unit(&self) -> Option<i64> {
        self.is_ramified().then(|| self.delta_sq / self.p as i64)
    }

    /// Character of the extension evaluated at −1 (η_v(−1)), for unramified
    /// models always 1; for ramified odd p this is the Legendre symbol of −1
    /// twisted by the model (Hilbert symbol (−1, c·p)_p = (−1/p)).
    pub fn eta_minus_one(&self) -> i32 {
        match self.splitting {
            Splitting::Ramified => legendre(-1, self.p),
            _ => 1,
        }
    }

    /// The quadratic character η_v(x) = (x, δ²)_p of the extension, x ≠ 0.
    pub fn eta(&self, x: &Rat) -> i32 {
        let p = self.p;
        let a = val_rat(x, p).expect("nonzero argument");
        let unit = x / rat_pow(p, a);
        let sign = |e: i64| if e.rem_euclid(2) == 0 { 1 } else { -1 };
        match self.splitting {
            Splitting::Split => 1,
            Splitting::Inert => sign(a),
            Splitting::Ramified => {
                let u = rat_mod(&unit, p, p).expect("unit") as i64;
                let c = self.delta_sq / p as i64;
                let eps = ((p - 1) / 2) as i64;
                sign(a * eps) * legendre(u, p) * legendre(c, p).pow(a.rem_euclid(2) as u32)
            }
        }
    }
}

impl fmt::Display for LocalQuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at p = {}", self.splitting.name(), self.p)
    }
}

pub fn classify_prime(delta: Discriminant, p: u64) -> Result<LocalQuadExt> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    match delta.character(p) {
        1 => LocalQuadExt::unramified(p, Splitting::Split),
        -1 => LocalQuadExt::unramified(p, Splitting::Inert),
        _ => {
            if p == 2 {
                return Err(Error::RamifiedTwo);
            }
            // choose c ∈ {−1, −u} with c ≡ Δ/p modulo unit squares
            let rest = delta.value() / p as i64;
            let c = if legendre(-rest, p) == 1 {
                -1
            } else {
                -(smallest_nonresidue(p) as i64)
            };
            LocalQuadExt::ramified(p, c)
        }
    }
}

/// Number of reduced primitive positive definite forms of discriminant Δ.
pub fn class_number(delta: Discriminant) -> u64 {
    let d = delta.value();
    let mut h = 0;
    let mut a: i64 = 1;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && c == a {
                continue;
            }
            if num_integer::gcd(num_integer::gcd(a, b.abs()), c) != 1 {
                continue;
            }
            h += 1;
        }
        a += 1;
    }
    h
}

pub fn unit_count(delta: Discriminant) -> u64 {
    match delta.value() {
        -3 => 6,
        -4 => 4,
        _ => 2,
    }
}

/// o(Δ): number of distinct primes dividing Δ.
pub fn ramified_prime_count(delta: Discriminant) -> usize {
    factorize(delta.abs()).len()
}

pub fn ramified_primes(delta: Discriminant) -> Vec<u64> {
    factorize(delta.abs()).into_iter().map(|(p, _)| p).collect()
}
