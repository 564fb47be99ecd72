//! Orders of finite symplectic and split orthogonal groups and their Siegel
//! parabolics, with brute-force oracles, plus finite-level probes of the
//! lattice Witt theorem and of the stabilizer index of a vector.
//!
//! The probes run over O/p^k. They are finite-level evidence for statements
//! about O_{F_v}-points, not proofs.

use crate::arith::{ratio, Rat};
use crate::error::{Error, Result};
use crate::field_data::{LocalQuadExt, Splitting};
use crate::truncated_ring::{Elem, RingKind, TruncatedRing};
use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;
use std::collections::HashSet;

pub const ENUMERATION_BUDGET: u64 = 100_000_000;

fn big(q: u64) -> BigUint {
    BigUint::from(q)
}

fn gl_order(d: u32, q: u64) -> BigUint {
    (1..=d).fold(BigUint::one(), |acc, i| acc * (big(q).pow(d) - big(q).pow(i - 1)))
}

fn prod_q2i(d: u32, q: u64) -> BigUint {
    (1..=d).fold(BigUint::one(), |acc, i| acc * (big(q).pow(2 * i) - 1u32))
}

/// #Sp_{2d}(F_q) = q^{d²} ∏ (q^{2i} − 1)
pub fn sp_order(d: u32, q: u64) -> BigUint {
    big(q).pow(d * d) * prod_q2i(d, q)
}

/// #O(V) for V = (hyperbolic plane)^d over F_q
pub fn o_split_order(d: u32, q: u64) -> BigUint {
    big(q).pow(d * (d - 1)) * prod_q2i(d, q) * 2u32 / (big(q).pow(d) + 1u32)
}

/// Stabilizer of a Lagrangian in Sp_{2d}(F_q)
pub fn parabolic_sp_order(d: u32, q: u64) -> BigUint {
    big(q).pow(d * (d + 1) / 2) * gl_order(d, q)
}

/// Stabilizer of a maximal isotropic subspace in the split O_{2d}(F_q)
pub fn parabolic_o_order(d: u32, q: u64) -> BigUint {
    big(q).pow(d * (d - 1) / 2) * gl_order(d, q)
}

fn to_rat(x: &BigUint) -> Rat {
    Rat::from_integer(x.clone().into())
}

/// [Sp : P_Sp] / [O : P_O], which should be (1 + q^d)/2.
pub fn stabilizer_ratio(d: u32, q: u64) -> Rat {
    let sp = to_rat(&sp_order(d, q)) / to_rat(&parabolic_sp_order(d, q));
    let o = to_rat(&o_split_order(d, q)) / to_rat(&parabolic_o_order(d, q));
    sp / o
}

pub fn expected_stabilizer_ratio(d: u32, q: u64) -> Rat {
    (Rat::from_integer(big(q).pow(d).into()) + ratio(1, 1)) / ratio(2, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Sp,
    OSplit,
}

impl GroupKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sp" => Ok(GroupKind::Sp),
            "o" | "o_split" | "o-split" => Ok(GroupKind::OSplit),
            _ => Err(Error::InvalidInput(format!("unknown group kind {s}"))),
        }
    }

    pub fn formula(self, d: u32, q: u64) -> BigUint {
        match self {
            GroupKind::Sp => sp_order(d, q),
            GroupKind::OSplit => o_split_order(d, q),
        }
    }

    pub fn parabolic_formula(self, d: u32, q: u64) -> BigUint {
        match self {
            GroupKind::Sp => parabolic_sp_order(d, q),
            GroupKind::OSplit => parabolic_o_order(d, q),
        }
    }

    /// Gram matrix [[0, I], [±I, 0]] mod q
    fn gram(self, d: usize, q: u64) -> Vec<Vec<u64>> {
        let mut j = vec![vec![0; 2 * d]; 2 * d];
        for i in 0..d {
            j[i][d + i] = 1;
            j[d + i][i] = if self == GroupKind::Sp { q - 1 } else { 1 };
        }
        j
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupOrderReport {
    pub kind: GroupKind,
    pub parabolic: bool,
    pub d: u32,
    pub q: u64,
    #[serde(serialize_with = "ser_big")]
    pub formula_value: BigUint,
    #[serde(serialize_with = "ser_opt_big")]
    pub enumerated_value: Option<BigUint>,
}

fn ser_big<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_opt_big<S: serde::Serializer>(x: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

impl GroupOrderReport {
    pub fn matches(&self) -> bool {
        self.enumerated_value.as_ref().map_or(true, |e| *e == self.formula_value)
    }
}

fn bilinear(j: &[Vec<u64>], x: &[u64], y: &[u64], q: u64) -> u64 {
    let mut acc = 0;
    for (a, row) in j.iter().enumerate() {
        for (b, &jab) in row.iter().enumerate() {
            if jab != 0 {
                acc = (acc + x[a] * jab % q * y[b]) % q;
            }
        }
    }
    acc
}

/// Count g ∈ GL_{2d}(F_q) with ᵗg J g = J column by column; with `parabolic`
/// also require g to stabilize span(e_1, …, e_d).
pub fn enumerate_group_order(kind: GroupKind, d: u32, q: u64, parabolic: bool) -> Result<BigUint> {
    if !crate::arith::is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    let n = 2 * d as usize;
    let nominal = (q as f64).powi((n * n) as i32);
    if nominal > ENUMERATION_BUDGET as f64 {
        return Err(Error::BudgetExceeded { needed: format!("{nominal:.3e}"), cap: ENUMERATION_BUDGET });
    }
    let j = kind.gram(d as usize, q);
    let vectors: Vec<Vec<u64>> = (0..q.pow(n as u32))
        .map(|mut i| {
            (0..n)
                .map(|_| {
                    let c = i % q;
                    i /= q;
                    c
                })
                .collect()
        })
        .collect();
    fn extend(
        cols: &mut Vec<usize>,
        vectors: &[Vec<u64>],
        j: &[Vec<u64>],
        q: u64,
        d: usize,
        parabolic: bool,
    ) -> u64 {
        let c = cols.len();
        let n = 2 * d;
        if c == n {
            return 1;
        }
        let mut total = 0;
        for (idx, v) in vectors.iter().enumerate() {
            if parabolic && c < d && v[d..].iter().any(|&x| x != 0) {
                continue;
            }
            let ok = bilinear(j, v, v, q) == j[c][c]
                && cols.iter().enumerate().all(|(i, &w)| {
                    bilinear(j, &vectors[w], v, q) == j[i][c] && bilinear(j, v, &vectors[w], q) == j[c][i]
                });
            if ok {
                cols.push(idx);
                total += extend(cols, vectors, j, q, d, parabolic);
                cols.pop();
            }
        }
        total
    }
    // preserving a nondegenerate form forces invertibility
    Ok(BigUint::from(extend(&mut Vec::new(), &vectors, &j, q, d as usize, parabolic)))
}

pub fn group_order_report(kind: GroupKind, d: u32, q: u64, parabolic: bool, enumerate: bool) -> Result<GroupOrderReport> {
    let formula_value = if parabolic { kind.parabolic_formula(d, q) } else { kind.formula(d, q) };
    let enumerated_value = if enumerate { Some(enumerate_group_order(kind, d, q, parabolic)?) } else { None };
    Ok(GroupOrderReport { kind, parabolic, d, q, formula_value, enumerated_value })
}

/// The stabilizer ratio recomputed from enumerated group and parabolic orders.
pub fn enumerated_stabilizer_ratio(d: u32, q: u64) -> Result<Rat> {
    let e = |k, p| enumerate_group_order(k, d, q, p).map(|x| to_rat(&x));
    Ok((e(GroupKind::Sp, false)? / e(GroupKind::Sp, true)?) / (e(GroupKind::OSplit, false)? / e(GroupKind::OSplit, true)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub orbit_count: usize,
    pub vector_count: usize,
    pub group_order: usize,
}

type Vec2 = (Elem, Elem);

/// The reduction mod p^k of the self-dual hyperbolic plane: h(x, y) =
/// x̄₁y₂ ± x̄₂y₁ (minus sign, after scaling by π, in the ramified case).
struct HyperbolicPlane {
    ring: TruncatedRing,
}

impl HyperbolicPlane {
    fn pair(&self, x: Vec2, y: Vec2) -> Elem {
        let r = &self.ring;
        let a = r.mul(r.conj(x.0), y.1);
        let b = r.mul(r.conj(x.1), y.0);
        if r.kind == RingKind::Ramified {
            r.sub(a, b)
        } else {
            r.add(a, b)
        }
    }

    /// The Hermitian norm of x as a residue in Z/p^k.
    fn norm(&self, x: Vec2) -> u64 {
        let r = &self.ring;
        let z = r.mul(r.conj(x.0), x.1);
        if r.kind == RingKind::Ramified {
            r.zmul(2, z.c1)
        } else {
            r.trace(z)
        }
    }

    fn apply(&self, g: &[Vec2; 2], x: Vec2) -> Vec2 {
        let r = &self.ring;
        (
            r.add(r.mul(g[0].0, x.0), r.mul(g[1].0, x.1)),
            r.add(r.mul(g[0].1, x.0), r.mul(g[1].1, x.1)),
        )
    }

    fn vectors(&self) -> Vec<Vec2> {
        let elems: Vec<Elem> = self.ring.enumerate().collect();
        elems.iter().flat_map(|&a| elems.iter().map(move |&b| (a, b))).collect()
    }

    /// Matrices [v w] (columns) preserving h.
    fn group(&self) -> Vec<[Vec2; 2]> {
        let vs = self.vectors();
        let zero = Elem::ZERO;
        let e1 = (self.ring.from_z(1), zero);
        let e2 = (zero, self.ring.from_z(1));
        let h12 = self.pair(e1, e2);
        let h21 = self.pair(e2, e1);
        let isotropic: Vec<Vec2> = vs.iter().copied().filter(|&v| self.pair(v, v) == zero).collect();
        let mut out = Vec::new();
        for &v in &isotropic {
            for &w in &isotropic {
                if self.pair(v, w) == h12 && self.pair(w, v) == h21 {
                    out.push([v, w]);
                }
            }
        }
        out
    }
}

fn hyperbolic_plane(ext: LocalQuadExt, k: u32) -> Result<HyperbolicPlane> {
    let ring = TruncatedRing::new(ext, k)?;
    let nominal = (ring.size() as f64).powi(2);
    if nominal * nominal > ENUMERATION_BUDGET as f64 * 100.0 {
        return Err(Error::BudgetExceeded { needed: format!("{:.3e}", nominal * nominal), cap: ENUMERATION_BUDGET });
    }
    Ok(HyperbolicPlane { ring })
}

/// Orbits of U(M°₂)(O/p^k) on {x : h(x, x) ≡ c mod p^k}.
pub fn witt_orbit_check(ext: LocalQuadExt, c: u64, k: u32) -> Result<OrbitReport> {
    let plane = hyperbolic_plane(ext, k)?;
    let c = c % plane.ring.modulus;
    let targets: Vec<Vec2> = plane
        .vectors()
        .into_iter()
        .filter(|&x| plane.norm(x) == c && plane.ring.pval(x.0).min(plane.ring.pval(x.1)) == 0)
        .collect();
    let group = plane.group();
    let mut seen: HashSet<Vec2> = HashSet::new();
    let mut orbits = 0;
    for &x in &targets {
        if seen.contains(&x) {
            continue;
        }
        orbits += 1;
        for g in &group {
            seen.insert(plane.apply(g, x));
        }
    }
    Ok(OrbitReport { orbit_count: orbits, vector_count: targets.len(), group_order: group.len() })
}

/// Index of {α ≡ 1 mod c𝔡} in the norm-one elements of O/p^k.
pub fn stabilizer_index_check(ext: LocalQuadExt, c: u64, k: u32) -> Result<u64> {
    let ring = TruncatedRing::new(ext, k)?;
    let p = ext.p;
    let vc = {
        let (mut v, mut x) = (0u32, c);
        while x > 0 && x % p == 0 {
            x /= p;
            v += 1;
        }
        v
    };
    let one = ring.from_z(1);
    let norm_one: Vec<Elem> = ring.enumerate().filter(|&a| ring.norm(a) == 1 % ring.modulus).collect();
    // required valuation of α − 1 measured in p (unramified) or π (ramified)
    let congruent = |a: Elem| {
        let d = ring.sub(a, one);
        match ext.splitting {
            Splitting::Ramified => {
                let e = 2 * vc + 1;
                let vpi = (2 * ring.zval(d.c0)).min(2 * ring.zval(d.c1) + 1);
                vpi >= e.min(2 * k)
            }
            _ => ring.pval(d) >= vc.min(k),
        }
    };
    let sub = norm_one.iter().filter(|&&a| congruent(a)).count() as u64;
    Ok(norm_one.len() as u64 / sub)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formulas() {
        assert_eq!(sp_order(1, 3), big(24));
        assert_eq!(o_split_order(1, 3), big(4));
        assert_eq!(sp_order(2, 3), big(51840));
        for (d, q) in [(1, 3), (2, 3), (1, 5), (3, 7)] {
            assert_eq!(stabilizer_ratio(d, q), expected_stabilizer_ratio(d, q));
        }
    }

    #[test]
    fn enumeration_matches() {
        for (kind, d, q) in [(GroupKind::Sp, 1, 3), (GroupKind::OSplit, 1, 3), (GroupKind::Sp, 1, 5), (GroupKind::OSplit, 1, 5)] {
            for parabolic in [false, true] {
                let r = group_order_report(kind, d, q, parabolic, true).unwrap();
                assert!(r.matches(), "{r:?}");
            }
        }
        assert_eq!(enumerated_stabilizer_ratio(1, 3).unwrap(), ratio(2, 1));
        assert!(matches!(enumerate_group_order(GroupKind::Sp, 2, 5, false), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn witt_orbits() {
        let inert = LocalQuadExt::new(3, Splitting::Inert).unwrap();
        let ram = LocalQuadExt::new(7, Splitting::Ramified).unwrap();
        for c in [1, 2] {
            assert_eq!(witt_orbit_check(inert, c, 1).unwrap().orbit_count, 1);
        }
        for c in 1..7 {
            assert_eq!(witt_orbit_check(ram, c, 1).unwrap().orbit_count, 1, "c={c}");
        }
        assert_eq!(witt_orbit_check(inert, 3, 2).unwrap().orbit_count, 1);
    }

    #[test]
    fn stabilizer_indices() {
        let inert = LocalQuadExt::new(3, Splitting::Inert).unwrap();
        let ram = LocalQuadExt::new(7, Splitting::Ramified).unwrap();
        assert_eq!(stabilizer_index_check(inert, 1, 1).unwrap(), 1);
        assert_eq!(stabilizer_index_check(ram, 1, 1).unwrap(), 2);
        assert_eq!(stabilizer_index_check(inert, 3, 2).unwrap(), 4);
    }
}
