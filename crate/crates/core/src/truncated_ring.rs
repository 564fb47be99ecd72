//! The finite rings O_{F_v}/p^k with involution. Elements are coordinate
//! pairs of residues mod p^k in a fixed Z_p-basis {1, θ} of O_{F_v}:
//!
//! * inert p odd: θ = δ, θ² = u
//! * inert p = 2: θ = ω, ω² = −1 − ω (Galois ring GR(2^k, 2))
//! * split: the two idempotent components, conjugation swaps them
//! * ramified: θ = π, π² = c·p, conj π = −π

use crate::error::{Error, Result};
use crate::field_data::{LocalQuadExt, Splitting};
use crate::hermitian::FieldElement;
use crate::arith::{mod_inv, rat_mod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RingKind {
    InertOdd,
    InertTwo,
    Split,
    Ramified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Elem {
    pub c0: u64,
    pub c1: u64,
}

impl Elem {
    pub const ZERO: Elem = Elem { c0: 0, c1: 0 };

    pub fn new(c0: u64, c1: u64) -> Self {
        Elem { c0, c1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruncatedRing {
    pub ext: LocalQuadExt,
    pub k: u32,
    pub modulus: u64,
    pub kind: RingKind,
    /// θ² mod p^k for the δ-models
    d: u64,
}

const MAX_MODULUS: u64 = 1 << 31;

impl TruncatedRing {
    pub fn new(ext: LocalQuadExt, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("truncation level must be >= 1".into()));
        }
        let modulus = ext
            .p
            .checked_pow(k)
            .filter(|&m| m < MAX_MODULUS)
            .ok_or(Error::ModulusTooLarge(ext.p, k))?;
        let kind = match ext.splitting {
            Splitting::Inert if ext.p == 2 => RingKind::InertTwo,
            Splitting::Inert => RingKind::InertOdd,
            Splitting::Split => RingKind::Split,
            Splitting::Ramified => RingKind::Ramified,
        };
        let d = ext.delta_sq.rem_euclid(modulus as i64) as u64;
        Ok(TruncatedRing { ext, k, modulus, kind, d })
    }

    pub fn p(&self) -> u64 {
        self.ext.p
    }

    /// Number of elements, p^{2k}.
    pub fn size(&self) -> u64 {
        self.modulus * self.modulus
    }

    pub fn is_unramified(&self) -> bool {
        self.kind != RingKind::Ramified
    }

    /// The same ring at another truncation level.
    pub fn with_level(&self, k: u32) -> Result<Self> {
        TruncatedRing::new(self.ext, k)
    }

    #[inline]
    pub fn zmul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.modulus
    }

    #[inline]
    pub fn zadd(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    pub fn zneg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub fn zsub(&self, a: u64, b: u64) -> u64 {
        self.zadd(a, self.zneg(b))
    }

    #[inline]
    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        Elem::new(self.zadd(x.c0, y.c0), self.zadd(x.c1, y.c1))
    }

    #[inline]
    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        Elem::new(self.zsub(x.c0, y.c0), self.zsub(x.c1, y.c1))
    }

    #[inline]
    pub fn neg(&self, x: Elem) -> Elem {
        Elem::new(self.zneg(x.c0), self.zneg(x.c1))
    }

    #[inline]
    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        let m = self.modulus;
        match self.kind {
            RingKind::Split => Elem::new(x.c0 * y.c0 % m, x.c1 * y.c1 % m),
            RingKind::InertTwo => {
                let a = x.c0 * y.c0 % m;
                let b = x.c1 * y.c1 % m;
                let c = (x.c0 * y.c1 % m + x.c1 * y.c0 % m) % m;
                Elem::new(self.zsub(a, b), self.zsub(c, b))
            }
            _ => {
                let b = x.c1 * y.c1 % m * self.d % m;
                Elem::new((x.c0 * y.c0 % m + b) % m, (x.c0 * y.c1 % m + x.c1 * y.c0 % m) % m)
            }
        }
    }

    #[inline]
    pub fn scale(&self, a: u64, x: Elem) -> Elem {
        Elem::new(self.zmul(a, x.c0), self.zmul(a, x.c1))
    }

    #[inline]
    pub fn conj(&self, x: Elem) -> Elem {
        match self.kind {
            RingKind::Split => Elem::new(x.c1, x.c0),
            RingKind::InertTwo => Elem::new(self.zsub(x.c0, x.c1), self.zneg(x.c1)),
            _ => Elem::new(x.c0, self.zneg(x.c1)),
        }
    }

    /// Embedding of Z/p^k.
    #[inline]
    pub fn from_z(&self, a: u64) -> Elem {
        let a = a % self.modulus;
        match self.kind {
            RingKind::Split => Elem::new(a, a),
            _ => Elem::new(a, 0),
        }
    }

    /// The Z/p^k-coordinate of a conjugation-fixed element.
    #[inline]
    pub fn to_z(&self, x: Elem) -> u64 {
        x.c0
    }

    /// x·conj(x) ∈ Z/p^k.
    pub fn norm(&self, x: Elem) -> u64 {
        self.to_z(self.mul(x, self.conj(x)))
    }

    /// x + conj(x) ∈ Z/p^k.
    pub fn trace(&self, x: Elem) -> u64 {
        self.to_z(self.add(x, self.conj(x)))
    }

    /// Coordinate carrying a Hermitian diagonal value in 𝔡-scaled form:
    /// unscaled a ∈ Z_p appears as a (unramified) or as π·a = (0, a) (ramified).
    #[inline]
    pub fn diag_coord(&self, x: Elem) -> u64 {
        match self.kind {
            RingKind::Ramified => x.c1,
            _ => x.c0,
        }
    }

    /// The scaled image of a ∈ Z/p^k on a Hermitian diagonal.
    pub fn diag_elem(&self, a: u64) -> Elem {
        match self.kind {
            RingKind::Ramified => Elem::new(0, a % self.modulus),
            _ => self.from_z(a),
        }
    }

    pub fn is_fixed_by_conj(&self, x: Elem) -> bool {
        self.conj(x) == x
    }

    /// Reduce a p-integral field element into the ring.
    pub fn from_field(&self, x: &FieldElement) -> Option<Elem> {
        let (a, b) = x.ring_coords(&self.ext);
        Some(Elem::new(rat_mod(&a, self.p(), self.modulus)?, rat_mod(&b, self.p(), self.modulus)?))
    }

    /// p-adic valuation of a Z/p^k residue (k for zero).
    #[inline]
    pub fn zval(&self, mut a: u64) -> u32 {
        if a == 0 {
            return self.k;
        }
        let p = self.p();
        let mut v = 0;
        while a % p == 0 {
            a /= p;
            v += 1;
        }
        v
    }

    /// Largest j with x ∈ p^j·R (k for zero).
    #[inline]
    pub fn pval(&self, x: Elem) -> u32 {
        self.zval(x.c0).min(self.zval(x.c1))
    }

    pub fn zinv(&self, a: u64) -> Option<u64> {
        mod_inv(a, self.modulus)
    }

    /// Inverse of a unit.
    pub fn inv(&self, x: Elem) -> Option<Elem> {
        let n = self.norm(x);
        let ni = self.zinv(n)?;
        Some(self.scale(ni, self.conj(x)))
    }

    /// Reduction to level j ≤ k.
    pub fn reduce(&self, x: Elem, j: u32) -> Elem {
        let m = self.p().pow(j);
        Elem::new(x.c0 % m, x.c1 % m)
    }

    pub fn element_at(&self, i: u64) -> Elem {
        Elem::new(i % self.modulus, i / self.modulus)
    }

    /// All p^{2k} elements, each exactly once.
    pub fn enumerate(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.size()).map(move |i| self.element_at(i))
    }

    /// The two basis elements {1, θ} (coordinate unit vectors).
    pub fn basis(&self) -> [Elem; 2] {
        [Elem::new(1, 0), Elem::new(0, 1)]
    }
}

/// Test a 𝔡-scaled residue matrix for membership in p^k·Herm*: every
/// diagonal coordinate and every off-diagonal element must vanish. For
/// ramified rings the off-diagonal entries are passed as π·entry, so the
/// condition reads π·entry ≡ 0; unramified rings need no scaling.
pub fn herm_residue_test(val: &[Vec<Elem>], ring: &TruncatedRing) -> bool {
    let n = val.len();
    for i in 0..n {
        if ring.diag_coord(val[i][i]) != 0 {
            return false;
        }
        for j in i + 1..n {
            if val[i][j] != Elem::ZERO || val[j][i] != Elem::ZERO {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn ring(p: u64, s: Splitting, k: u32) -> TruncatedRing {
        TruncatedRing::new(LocalQuadExt::new(p, s).unwrap(), k).unwrap()
    }

    fn all_rings() -> Vec<TruncatedRing> {
        let mut v = Vec::new();
        for (p, s) in [
            (2, Splitting::Inert),
            (3, Splitting::Inert),
            (5, Splitting::Inert),
            (2, Splitting::Split),
            (3, Splitting::Split),
            (3, Splitting::Ramified),
            (7, Splitting::Ramified),
        ] {
            for k in 1..=2 {
                v.push(ring(p, s, k));
            }
        }
        v
    }

    #[test]
    fn sizes() {
        assert_eq!(ring(3, Splitting::Inert, 1).enumerate().count(), 9);
        assert_eq!(ring(2, Splitting::Split, 2).enumerate().count(), 16);
        assert_eq!(ring(7, Splitting::Ramified, 1).enumerate().count(), 49);
    }

    #[test]
    fn ring_axioms_exhaustive_small() {
        for r in all_rings().into_iter().filter(|r| r.size() <= 81) {
            let els: Vec<Elem> = r.enumerate().collect();
            for &x in &els {
                assert_eq!(r.conj(r.conj(x)), x);
                for &y in &els {
                    assert_eq!(r.mul(x, y), r.mul(y, x));
                    assert_eq!(r.conj(r.mul(x, y)), r.mul(r.conj(x), r.conj(y)));
                    assert_eq!(r.conj(r.add(x, y)), r.add(r.conj(x), r.conj(y)));
                }
            }
            for &x in els.iter().take(20) {
                for &y in els.iter().take(20) {
                    for &z in els.iter().take(20) {
                        assert_eq!(r.mul(r.mul(x, y), z), r.mul(x, r.mul(y, z)));
                        assert_eq!(r.mul(x, r.add(y, z)), r.add(r.mul(x, y), r.mul(x, z)));
                    }
                }
            }
        }
    }

    #[test]
    fn inert_residue_field_is_a_field() {
        for p in [2, 3, 5] {
            let r = ring(p, Splitting::Inert, 1);
            for x in r.enumerate().filter(|&x| x != Elem::ZERO) {
                let xi = r.inv(x).expect("nonzero element of F_{p^2} is a unit");
                assert_eq!(r.mul(x, xi), r.from_z(1));
            }
        }
    }

    #[test]
    fn norm_surjective_with_equal_fibers() {
        for (p, k) in [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1), (5, 2)] {
            let r = ring(p, Splitting::Inert, k);
            let mut fib: HashMap<u64, u64> = HashMap::new();
            for x in r.enumerate().filter(|&x| r.pval(x) == 0) {
                *fib.entry(r.norm(x)).or_default() += 1;
            }
            let units = (0..r.modulus).filter(|a| a % p != 0).count();
            assert_eq!(fib.len(), units);
            let expect = p.pow(k - 1) * (p + 1);
            assert!(fib.values().all(|&c| c == expect), "p={p} k={k}");
        }
    }

    #[test]
    fn fixed_points_of_conjugation() {
        for r in all_rings() {
            let fixed: Vec<Elem> = r.enumerate().filter(|&x| r.is_fixed_by_conj(x)).collect();
            let expect: Vec<Elem> = {
                let mut v: Vec<Elem> = (0..r.modulus).map(|a| r.from_z(a)).collect();
                v.sort();
                v
            };
            let mut got = fixed.clone();
            got.sort();
            assert_eq!(got, expect, "{:?} k={}", r.kind, r.k);
        }
    }

    #[test]
    fn reduction_is_a_homomorphism() {
        for r in all_rings().into_iter().filter(|r| r.k == 2 && r.size() <= 625) {
            let r1 = r.with_level(1).unwrap();
            let els: Vec<Elem> = r.enumerate().collect();
            for &x in els.iter().step_by(3) {
                for &y in els.iter().step_by(5) {
                    assert_eq!(r.reduce(r.mul(x, y), 1), r1.mul(r.reduce(x, 1), r.reduce(y, 1)));
                    assert_eq!(r.reduce(r.conj(x), 1), r1.conj(r.reduce(x, 1)));
                }
            }
            // fibers of reduction all have p^2 elements
            let mut fib: HashMap<Elem, u64> = HashMap::new();
            for &x in &els {
                *fib.entry(r.reduce(x, 1)).or_default() += 1;
            }
            assert!(fib.values().all(|&c| c == r.p() * r.p()));
        }
    }

    #[test]
    fn field_element_reduction() {
        let r = ring(2, Splitting::Inert, 2);
        // δ = 2ω + 1 has norm 3 and trace 0
        let d = r.from_field(&FieldElement::delta()).unwrap();
        assert_eq!(d, Elem::new(1, 2));
        assert_eq!(r.norm(d), 3);
        assert_eq!(r.trace(d), 0);
        let s = ring(3, Splitting::Split, 1);
        let d = s.from_field(&FieldElement::delta()).unwrap();
        assert_eq!(d, Elem::new(1, 2));
    }

    #[test]
    fn residue_test_examples() {
        let r = ring(3, Splitting::Inert, 1);
        let z = vec![vec![Elem::ZERO; 2]; 2];
        assert!(herm_residue_test(&z, &r));
        let r2 = ring(3, Splitting::Inert, 2);
        // p^k on the diagonal reduces to zero
        let m = vec![vec![r2.from_z(9)]];
        assert!(herm_residue_test(&m, &r2));
        // ramified p = 7, k = 1: off-diagonal entry p·π⁻¹ passed as π·(p·π⁻¹) = p ≡ 0
        let r7 = ring(7, Splitting::Ramified, 1);
        let e = r7.from_z(7);
        let m = vec![vec![Elem::ZERO, e], vec![r7.neg(e), Elem::ZERO]];
        assert!(herm_residue_test(&m, &r7));
        let m = vec![vec![Elem::ZERO, r7.from_z(1)], vec![r7.from_z(6), Elem::ZERO]];
        assert!(!herm_residue_test(&m, &r7));
    }
}
