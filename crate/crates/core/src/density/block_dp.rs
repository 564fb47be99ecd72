//! Counting by convolution of value distributions: S splits into orthogonal
//! blocks, the value x̄ᵀSx is the sum of the block values, so the solution
//! count is a convolution over the finite group H of Hermitian residues.
//!
//! Zero-diagonal rank-2 blocks (hyperbolic planes) are handled without
//! enumerating both rows: for a fixed first row the value is additive in the
//! second row, hence uniformly distributed on a subgroup.

use super::problem::{budget_error, checked_pow, form, Mat, Problem};
use crate::error::Result;
use crate::truncated_ring::{Elem, TruncatedRing};
use num_bigint::BigUint;
use num_traits::Zero;
use std::collections::HashMap;

/// Largest residue group handled densely.
const MAX_H: u64 = 1 << 22;

/// H = {diag ∈ Z/p^k} × {upper off-diagonal entries ∈ R}, mixed radix.
struct HSpace {
    m: usize,
    base: u64,
    len: usize,
    size: usize,
}

impl HSpace {
    fn new(ring: &TruncatedRing, m: usize) -> Option<Self> {
        let len = m * m;
        let size = checked_pow(ring.modulus, len as u64).filter(|&s| s <= MAX_H)?;
        Some(HSpace { m, base: ring.modulus, len, size: size as usize })
    }

    fn digits(&self, ring: &TruncatedRing, v: &Mat) -> Vec<u64> {
        let mut d = Vec::with_capacity(self.len);
        for i in 0..self.m {
            d.push(ring.diag_coord(v[i][i]));
        }
        for i in 0..self.m {
            for j in i + 1..self.m {
                d.push(v[i][j].c0);
                d.push(v[i][j].c1);
            }
        }
        d
    }

    fn encode_digits(&self, d: &[u64]) -> usize {
        d.iter().rev().fold(0u64, |acc, &x| acc * self.base + x) as usize
    }

    fn encode(&self, ring: &TruncatedRing, v: &Mat) -> usize {
        self.encode_digits(&self.digits(ring, v))
    }

    fn combine(&self, mut a: usize, mut b: usize, sub: bool) -> usize {
        let base = self.base as usize;
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.len {
            let (x, y) = (a % base, b % base);
            let z = if sub { (x + base - y) % base } else { (x + y) % base };
            out += z * scale;
            scale *= base;
            a /= base;
            b /= base;
        }
        out
    }
}

fn value_matrix(ring: &TruncatedRing, w: &Mat, cols: &[Vec<Elem>]) -> Mat {
    let m = cols.len();
    let mut v = vec![vec![Elem::ZERO; m]; m];
    for i in 0..m {
        for j in i..m {
            v[i][j] = form(ring, w, &cols[i], &cols[j]);
        }
    }
    v
}

fn block_dist(ring: &TruncatedRing, wb: &Mat, hs: &HSpace, budget: u64) -> Result<Vec<u128>> {
    let r = wb.len();
    let m = hs.m;
    let mut dist = vec![0u128; hs.size];
    let zero_diag_plane = r == 2 && wb[0][0] == Elem::ZERO && wb[1][1] == Elem::ZERO;
    if zero_diag_plane {
        let firsts = checked_pow(ring.size(), m as u64).filter(|&t| t <= budget).ok_or_else(|| {
            budget_error(format!("{}^{}", ring.size(), m), budget)
        })?;
        let rm = firsts as u128;
        let mut x1 = vec![Elem::ZERO; m];
        let mut level_weight = vec![0u128; ring.k as usize + 1];
        let mut by_subgroup: HashMap<Vec<Vec<u64>>, u128> = HashMap::new();
        for idx in 0..firsts {
            super::problem::decode_vector(ring, idx, &mut x1);
            // images of the additive generators e_l·θ_c of the second row
            let mut gens: Vec<Vec<u64>> = Vec::with_capacity(2 * m);
            for l in 0..m {
                for b in ring.basis() {
                    let cols: Vec<Vec<Elem>> = (0..m)
                        .map(|j| vec![x1[j], if j == l { b } else { Elem::ZERO }])
                        .collect();
                    gens.push(hs.digits(ring, &value_matrix(ring, wb, &cols)));
                }
            }
            if m == 1 {
                let v = gens.iter().map(|g| ring.zval(g[0])).min().unwrap_or(ring.k);
                let sub = ring.modulus / ring.p().pow(v);
                level_weight[v as usize] += rm / sub as u128;
            } else {
                *by_subgroup.entry(howell(ring, gens)).or_default() += 1;
            }
        }
        for (basis, count) in by_subgroup {
            let elems = subgroup(hs, &basis);
            let fiber = rm / elems.len() as u128;
            for h in elems {
                dist[h] += fiber * count;
            }
        }
        if m == 1 {
            for (h, d) in dist.iter_mut().enumerate() {
                let vh = ring.zval(h as u64);
                *d += level_weight[..=vh as usize].iter().sum::<u128>();
            }
        }
        return Ok(dist);
    }
    let total = checked_pow(ring.size(), (r * m) as u64).filter(|&t| t <= budget).ok_or_else(|| {
        budget_error(format!("{}^{}", ring.size(), r * m), budget)
    })?;
    let mut flat = vec![Elem::ZERO; r * m];
    for idx in 0..total {
        super::problem::decode_vector(ring, idx, &mut flat);
        let cols: Vec<Vec<Elem>> = flat.chunks(r).map(|c| c.to_vec()).collect();
        dist[hs.encode(ring, &value_matrix(ring, wb, &cols))] += 1;
    }
    Ok(dist)
}

/// Echelon basis of the Z/p^k-span of `gens`, reduced so that equal spans
/// give equal bases (used only as a memo key; the span is what matters).
fn howell(ring: &TruncatedRing, mut rows: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    let modulus = ring.modulus;
    let len = rows.first().map_or(0, |r| r.len());
    let mut out: Vec<(usize, u64, Vec<u64>)> = Vec::new();
    for col in 0..len {
        rows.retain(|r| r.iter().any(|&x| x != 0));
        let Some(pi) = (0..rows.len()).min_by_key(|&i| ring.zval(rows[i][col])) else { break };
        let v = ring.zval(rows[pi][col]);
        if v >= ring.k {
            continue;
        }
        let mut piv = rows.swap_remove(pi);
        let pv = ring.p().pow(v);
        let uinv = ring.zinv(piv[col] / pv).expect("unit");
        for x in piv.iter_mut() {
            *x = ring.zmul(*x, uinv);
        }
        for r in rows.iter_mut() {
            let f = r[col] / pv;
            if f != 0 {
                for (x, y) in r.iter_mut().zip(&piv) {
                    *x = ring.zsub(*x, ring.zmul(f, *y));
                }
            }
        }
        // annihilator multiple keeps the span closed under p^{k−v}
        let ann: Vec<u64> = piv.iter().map(|&x| ring.zmul(x, modulus / pv)).collect();
        rows.push(ann);
        for (_, _, q) in out.iter_mut() {
            let f = q[col] / pv;
            if f != 0 {
                for (x, y) in q.iter_mut().zip(&piv) {
                    *x = ring.zsub(*x, ring.zmul(f, *y));
                }
            }
        }
        out.push((col, v as u64, piv));
    }
    out.into_iter().map(|(_, _, r)| r).collect()
}

/// Elements of the subgroup of H generated by `gens` (breadth-first closure).
fn subgroup(hs: &HSpace, gens: &[Vec<u64>]) -> Vec<usize> {
    let g: Vec<usize> = gens.iter().map(|d| hs.encode_digits(d)).filter(|&x| x != 0).collect();
    let mut seen = HashMap::new();
    seen.insert(0usize, ());
    let mut out = vec![0usize];
    let mut i = 0;
    while i < out.len() {
        let a = out[i];
        for &x in &g {
            let b = hs.combine(a, x, false);
            if seen.insert(b, ()).is_none() {
                out.push(b);
            }
        }
        i += 1;
    }
    out
}

pub(crate) fn feasible(pr: &Problem) -> bool {
    HSpace::new(&pr.ring, pr.m).is_some()
}

pub(crate) fn count(pr: &Problem, budget: u64) -> Result<BigUint> {
    let ring = &pr.ring;
    if pr.m == 0 {
        return Ok(BigUint::from(1u32));
    }
    let hs = HSpace::new(ring, pr.m)
        .ok_or_else(|| budget_error(format!("residue group {}^{}", ring.modulus, pr.m * pr.m), MAX_H))?;
    let target = hs.encode(ring, &pr.t);
    let mut cache: HashMap<Mat, Vec<u128>> = HashMap::new();
    let mut acc: Vec<BigUint> = vec![BigUint::zero(); hs.size];
    acc[0] = BigUint::from(1u32);
    let nb = pr.blocks.len();
    for (bi, b) in pr.blocks.iter().enumerate() {
        let wb = pr.block_matrix(b);
        if !cache.contains_key(&wb) {
            let d = block_dist(ring, &wb, &hs, budget)?;
            cache.insert(wb.clone(), d);
        }
        let dist = &cache[&wb];
        let support: Vec<(usize, u128)> =
            dist.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c)).collect();
        if bi + 1 == nb {
            let mut total = BigUint::zero();
            for &(h, c) in &support {
                let a = &acc[hs.combine(target, h, true)];
                if !a.is_zero() {
                    total += a * BigUint::from(c);
                }
            }
            return Ok(total);
        }
        let mut next = vec![BigUint::zero(); hs.size];
        for (a, va) in acc.iter().enumerate() {
            if va.is_zero() {
                continue;
            }
            for &(h, c) in &support {
                next[hs.combine(a, h, false)] += va * BigUint::from(c);
            }
        }
        acc = next;
    }
    // S has rank 0: only the zero value is attained
    Ok(if target == 0 { BigUint::from(1u32) } else { BigUint::zero() })
}
