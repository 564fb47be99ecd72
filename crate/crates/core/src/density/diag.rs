//! Diagonalization of Hermitian matrices over unramified O/p^k by
//! congruence b ↦ g·b·ḡᵀ. Over an unramified ring every Hermitian matrix is
//! congruent to a diagonal one, and the multiset of diagonal valuations is a
//! complete invariant of the orbit.

use super::problem::Mat;
use crate::truncated_ring::{Elem, TruncatedRing};

pub(crate) struct Reduced {
    /// pivot positions with the valuation of their diagonal entry
    pub pivots: Vec<(usize, u32)>,
    /// positions never pivoted; their block has all valuations > vmax
    pub rest: Vec<usize>,
    /// g⁻¹ with b_now = g·b_orig·ḡᵀ, when tracked
    pub ginv: Option<Mat>,
}

pub(crate) fn identity(ring: &TruncatedRing, m: usize) -> Mat {
    (0..m)
        .map(|i| (0..m).map(|j| if i == j { ring.from_z(1) } else { Elem::ZERO }).collect())
        .collect()
}

/// row_dst += λ·row_src, col_dst += conj(λ)·col_src, keeping g⁻¹ in sync.
fn add_multiple(ring: &TruncatedRing, b: &mut Mat, ginv: &mut Option<Mat>, dst: usize, src: usize, lam: Elem) {
    let m = b.len();
    for l in 0..m {
        let t = ring.mul(lam, b[src][l]);
        b[dst][l] = ring.add(b[dst][l], t);
    }
    let cl = ring.conj(lam);
    for l in 0..m {
        let t = ring.mul(b[l][src], cl);
        b[l][dst] = ring.add(b[l][dst], t);
    }
    if let Some(gi) = ginv {
        for row in gi.iter_mut() {
            let t = ring.mul(row[dst], lam);
            row[src] = ring.sub(row[src], t);
        }
    }
}

#[inline]
fn div_pv(ring: &TruncatedRing, x: Elem, v: u32) -> Elem {
    let pv = ring.p().pow(v);
    Elem::new(x.c0 / pv, x.c1 / pv)
}

/// Pivot on entries of valuation ≤ `vmax` until none remain.
pub(crate) fn reduce_hermitian(ring: &TruncatedRing, b: &mut Mat, vmax: Option<u32>, track: bool) -> Reduced {
    let m = b.len();
    let mut ginv = track.then(|| identity(ring, m));
    let mut active: Vec<usize> = (0..m).collect();
    let mut pivots = Vec::new();
    let Some(vmax) = vmax else {
        return Reduced { pivots, rest: active, ginv };
    };
    loop {
        let mut best_diag = (u32::MAX, usize::MAX);
        let mut best_off = (u32::MAX, usize::MAX, usize::MAX);
        for (ai, &i) in active.iter().enumerate() {
            let v = ring.zval(ring.to_z(b[i][i]));
            if v < best_diag.0 {
                best_diag = (v, i);
            }
            for &j in &active[ai + 1..] {
                let v = ring.pval(b[i][j]);
                if v < best_off.0 {
                    best_off = (v, i, j);
                }
            }
        }
        let vmin = best_diag.0.min(best_off.0);
        if vmin > vmax || vmin >= ring.k {
            break;
        }
        let piv = if best_diag.0 == vmin {
            best_diag.1
        } else {
            let (_, i, j) = best_off;
            let bji = b[j][i];
            let lam = ring
                .basis()
                .into_iter()
                .find(|&l| ring.zval(ring.trace(ring.mul(l, bji))) == vmin)
                .expect("trace form is perfect on an unramified ring");
            add_multiple(ring, b, &mut ginv, i, j, lam);
            i
        };
        let d = ring.to_z(b[piv][piv]);
        let v = ring.zval(d);
        debug_assert_eq!(v, vmin);
        let pv = ring.p().pow(v);
        let uinv = ring.zinv(d / pv).expect("unit part is invertible");
        for &j in &active {
            if j == piv || b[j][piv] == Elem::ZERO {
                continue;
            }
            let t = ring.scale(uinv, div_pv(ring, b[j][piv], v));
            add_multiple(ring, b, &mut ginv, j, piv, ring.neg(t));
        }
        active.retain(|&x| x != piv);
        pivots.push((piv, v));
    }
    Reduced { pivots, rest: active, ginv }
}

/// Rank of a Hermitian matrix over the residue ring (k = 1).
pub(crate) fn residue_rank(r1: &TruncatedRing, mut b: Mat) -> usize {
    reduce_hermitian(r1, &mut b, Some(0), false).pivots.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_data::{LocalQuadExt, Splitting};

    fn mat_mul(ring: &TruncatedRing, a: &Mat, b: &Mat) -> Mat {
        let m = a.len();
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| (0..m).fold(Elem::ZERO, |acc, l| ring.add(acc, ring.mul(a[i][l], b[l][j]))))
                    .collect()
            })
            .collect()
    }

    fn conj_t(ring: &TruncatedRing, a: &Mat) -> Mat {
        let m = a.len();
        (0..m).map(|i| (0..m).map(|j| ring.conj(a[j][i])).collect()).collect()
    }

    #[test]
    fn diagonalizes_and_tracks_inverse() {
        for (p, s) in [(2, Splitting::Inert), (3, Splitting::Inert), (2, Splitting::Split), (5, Splitting::Split)] {
            let ring = TruncatedRing::new(LocalQuadExt::new(p, s).unwrap(), 3).unwrap();
            let mut seed = 12345u64;
            let mut rnd = || {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (seed >> 33) % ring.modulus
            };
            for _ in 0..200 {
                let m = 3;
                let mut b = vec![vec![Elem::ZERO; m]; m];
                for i in 0..m {
                    b[i][i] = ring.from_z(rnd() * [1, p, p * p][i % 3]);
                    for j in i + 1..m {
                        b[i][j] = Elem::new(rnd() * p % ring.modulus, rnd());
                        b[j][i] = ring.conj(b[i][j]);
                    }
                }
                let orig = b.clone();
                let red = reduce_hermitian(&ring, &mut b, Some(ring.k - 1), true);
                for i in 0..m {
                    for j in 0..m {
                        if i != j {
                            assert_eq!(b[i][j], Elem::ZERO);
                        }
                    }
                }
                // ginv·b·ginv* = orig
                let gi = red.ginv.unwrap();
                let back = mat_mul(&ring, &mat_mul(&ring, &gi, &b), &conj_t(&ring, &gi));
                assert_eq!(back, orig);
            }
        }
    }
}
