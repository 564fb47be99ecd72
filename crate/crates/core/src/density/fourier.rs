//! Counting over unramified rings by finite Fourier analysis on the group H
//! of Hermitian residues:
//!
//!   N = |H|⁻¹ · Σ_{b ∈ Herm_m(O/p^k)} ψ(−tr bT) · Ĝ(b),
//!   Ĝ(b) = Σ_x ψ(tr(b·x̄ᵀSx)).
//!
//! Ĝ is invariant under b ↦ g·b·ḡᵀ, so it only depends on the valuation type
//! (v₁..v_m) of a diagonalization of b, and factors as ∏_blocks ∏_i γ_B(p^{v_i})
//! with one-variable Gauss sums γ_B. These are rational integers and are
//! evaluated by Galois averaging the character: Σ_u ζ^{ue}/φ(p^k) is 1 for
//! e = 0, −1/(p−1) when v(e) = k−1 and 0 otherwise.
//!
//! The sum over b is stratified by its top p-adic digit: write
//! b = b' + p^{k−1}·b_top. Pivoting b' on entries of valuation ≤ k−2 leaves a
//! block E of valuation k−1, the type of b only depends on the rank of
//! E + (g·b_top·ḡᵀ)₂₂, and the character sum over the remaining entries of
//! b_top vanishes unless the transformed T is zero there. This reduces the
//! enumeration from p^{k m²} to about p^{(k−1)m²} + p^{m²} terms.

use super::diag::{reduce_hermitian, residue_rank};
use super::problem::{budget_error, checked_pow, form, Mat, Problem};
use crate::error::Result;
use crate::truncated_ring::{Elem, TruncatedRing};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use std::collections::HashMap;

/// Histogram over (valuation-count key) of Galois weights: `.0` counts terms
/// with phase exponent 0, `.1` terms with exponent of valuation k−1.
pub(crate) type TargetTable = HashMap<Vec<u8>, (u128, u128)>;

#[inline]
fn phase_class(ring: &TruncatedRing, e: u64) -> Option<bool> {
    if e == 0 {
        Some(true)
    } else if ring.zval(e) == ring.k - 1 {
        Some(false)
    } else {
        None
    }
}

/// Σ_{v ∈ values} Galois-averaged ψ(v), given (p−1)·A − B over the tallies.
fn galois_sum(ring: &TruncatedRing, zero: u128, top: u128) -> BigInt {
    let p1 = BigInt::from(ring.p() - 1);
    let num = &p1 * BigInt::from(zero) - BigInt::from(top);
    let (q, r) = num.div_rem(&p1);
    assert!(r.is_zero(), "Gauss sum is not an integer");
    q
}

/// γ_B(p^j) for j = 0..=k for one orthogonal block of 𝔡·S.
pub(crate) fn block_gauss(ring: &TruncatedRing, wb: &Mat, budget: u64) -> Result<Vec<BigInt>> {
    let r = wb.len();
    let k = ring.k;
    let p = ring.p();
    let pows: Vec<u64> = (0..=k).map(|j| p.pow(j) % ring.modulus).collect();
    if r == 2 && wb[0][0] == Elem::ZERO && wb[1][1] == Elem::ZERO {
        // Q(y) = Tr(ȳ₁·w·y₂): the y₂-sum is |R| or 0
        let w = wb[0][1];
        let rsize = BigInt::from(ring.size());
        return Ok(pows
            .iter()
            .map(|&pj| {
                let good = ring
                    .enumerate()
                    .filter(|&y1| {
                        let a = ring.mul(ring.conj(y1), w);
                        ring.basis().iter().all(|&b| ring.zmul(pj, ring.trace(ring.mul(a, b))) == 0)
                    })
                    .count();
                &rsize * BigInt::from(good)
            })
            .collect());
    }
    let total = checked_pow(ring.size(), r as u64).filter(|&t| t <= budget).ok_or_else(|| {
        budget_error(format!("{}^{}", ring.size(), r), budget)
    })?;
    let mut hist: HashMap<u64, u128> = HashMap::new();
    let mut y = vec![Elem::ZERO; r];
    for idx in 0..total {
        super::problem::decode_vector(ring, idx, &mut y);
        *hist.entry(ring.to_z(form(ring, wb, &y, &y))).or_default() += 1;
    }
    Ok(pows
        .iter()
        .map(|&pj| {
            let (mut zero, mut top) = (0u128, 0u128);
            for (&q, &c) in &hist {
                match phase_class(ring, ring.zmul(pj, q)) {
                    Some(true) => zero += c,
                    Some(false) => top += c,
                    None => {}
                }
            }
            galois_sum(ring, zero, top)
        })
        .collect())
}

pub(crate) fn table_cost(ring: &TruncatedRing, m: usize) -> Option<u64> {
    let strata = checked_pow(ring.p(), (ring.k as u64 - 1) * (m * m) as u64)?;
    let top = checked_pow(ring.p(), (m * m) as u64)?;
    strata.checked_add(top.checked_mul(4)?)
}

/// Enumerate the valuation-type/phase histogram of Herm_m(O/p^k) against T.
pub(crate) fn target_table(ring: &TruncatedRing, t: &Mat, budget: u64) -> Result<TargetTable> {
    let m = t.len();
    let k = ring.k;
    let p = ring.p();
    match table_cost(ring, m) {
        Some(c) if c <= budget => {}
        Some(c) => return Err(budget_error(c, budget)),
        None => return Err(budget_error(format!("more than {}^{}", p, (k as usize - 1) * m * m), budget)),
    }
    let r1 = ring.with_level(1)?;
    let low = p.pow(k - 1);
    let strata = checked_pow(low, (m * m) as u64).expect("checked by table_cost");
    let top_shift = p.pow(k - 1);
    let process = |idx: u64, hist: &mut TargetTable| {
        let mut b = vec![vec![Elem::ZERO; m]; m];
        let mut x = idx;
        for i in 0..m {
            b[i][i] = ring.from_z(x % low);
            x /= low;
        }
        for i in 0..m {
            for j in i + 1..m {
                let c0 = x % low;
                x /= low;
                let c1 = x % low;
                x /= low;
                b[i][j] = Elem::new(c0, c1);
                b[j][i] = ring.conj(b[i][j]);
            }
        }
        let mut tr = Elem::ZERO;
        for i in 0..m {
            for j in 0..m {
                tr = ring.add(tr, ring.mul(b[i][j], t[j][i]));
            }
        }
        let e0 = ring.zneg(ring.to_z(tr));
        let red = reduce_hermitian(ring, &mut b, k.checked_sub(2), true);
        let ginv = red.ginv.expect("tracked");
        // T'' = ginv*·T·ginv modulo p
        let mut tg = vec![vec![Elem::ZERO; m]; m];
        for i in 0..m {
            for j in 0..m {
                let mut acc = Elem::ZERO;
                for l in 0..m {
                    acc = ring.add(acc, ring.mul(t[i][l], ginv[l][j]));
                }
                tg[i][j] = acc;
            }
        }
        let mut tpp = vec![vec![Elem::ZERO; m]; m];
        for i in 0..m {
            for j in 0..m {
                let mut acc = Elem::ZERO;
                for l in 0..m {
                    acc = ring.add(acc, ring.mul(ring.conj(ginv[l][i]), tg[l][j]));
                }
                tpp[i][j] = ring.reduce(acc, 1);
            }
        }
        let piv: Vec<usize> = red.pivots.iter().map(|&(i, _)| i).collect();
        for &a in &piv {
            for c in 0..m {
                if tpp[a][c] != Elem::ZERO {
                    return;
                }
            }
        }
        let rest = &red.rest;
        let mu = rest.len();
        let rho = piv.len();
        let free: u128 = (p as u128).pow((rho * rho + 2 * rho * mu) as u32);
        let mut key = vec![0u8; k as usize + 1];
        for &(_, v) in &red.pivots {
            key[v as usize] += 1;
        }
        let e22: Mat = rest
            .iter()
            .map(|&a| {
                rest.iter()
                    .map(|&c| {
                        let x = b[a][c];
                        r1.reduce(Elem::new(x.c0 / top_shift, x.c1 / top_shift), 1)
                    })
                    .collect()
            })
            .collect();
        let t22: Mat = rest.iter().map(|&a| rest.iter().map(|&c| tpp[a][c]).collect()).collect();
        let inner = p.pow((mu * mu) as u32);
        let mut c = vec![vec![Elem::ZERO; mu]; mu];
        for cidx in 0..inner {
            let mut y = cidx;
            for i in 0..mu {
                c[i][i] = r1.from_z(y % p);
                y /= p;
            }
            for i in 0..mu {
                for j in i + 1..mu {
                    let c0 = y % p;
                    y /= p;
                    let c1 = y % p;
                    y /= p;
                    c[i][j] = Elem::new(c0, c1);
                    c[j][i] = r1.conj(c[i][j]);
                }
            }
            let mut trc = Elem::ZERO;
            for i in 0..mu {
                for j in 0..mu {
                    trc = r1.add(trc, r1.mul(c[i][j], t22[j][i]));
                }
            }
            let e = ring.zsub(e0, ring.zmul(top_shift, r1.to_z(trc)));
            let Some(is_zero) = phase_class(ring, e) else { continue };
            let sum: Mat = (0..mu).map(|i| (0..mu).map(|j| r1.add(e22[i][j], c[i][j])).collect()).collect();
            let rank = residue_rank(&r1, sum);
            let mut kk = key.clone();
            kk[k as usize - 1] += rank as u8;
            kk[k as usize] += (mu - rank) as u8;
            let slot = hist.entry(kk).or_insert((0, 0));
            if is_zero {
                slot.0 += free;
            } else {
                slot.1 += free;
            }
        }
    };
    let merged = (0..strata)
        .into_par_iter()
        .fold(TargetTable::new, |mut h, idx| {
            process(idx, &mut h);
            h
        })
        .reduce(TargetTable::new, |mut a, b| {
            for (kk, (x, y)) in b {
                let s = a.entry(kk).or_insert((0, 0));
                s.0 += x;
                s.1 += y;
            }
            a
        });
    Ok(merged)
}

/// Combine the target table with the Gauss sums Γ_v = ∏_B γ_B(p^v).
pub(crate) fn combine(ring: &TruncatedRing, m: usize, table: &TargetTable, gamma: &[BigInt]) -> BigUint {
    let mut total = BigInt::zero();
    let p1 = BigInt::from(ring.p() - 1);
    for (key, &(zero, top)) in table {
        let mut f = BigInt::one();
        for (v, &c) in key.iter().enumerate() {
            for _ in 0..c {
                f *= &gamma[v];
            }
        }
        total += f * (&p1 * BigInt::from(zero) - BigInt::from(top));
    }
    let h = BigInt::from(ring.p()).pow(ring.k * (m * m) as u32) * p1;
    let (q, r) = total.div_rem(&h);
    assert!(r.is_zero() && !q.is_negative(), "character sum did not produce a count");
    q.to_biguint().expect("nonnegative")
}

pub(crate) fn gauss_product(pr: &Problem, mut block: impl FnMut(&Mat) -> Result<Vec<BigInt>>) -> Result<Vec<BigInt>> {
    let mut gamma = vec![BigInt::one(); pr.ring.k as usize + 1];
    for b in &pr.blocks {
        let g = block(&pr.block_matrix(b))?;
        for (x, y) in gamma.iter_mut().zip(g) {
            *x *= y;
        }
    }
    Ok(gamma)
}
