//! Reduction of a density problem (S, T, k) to ring data: 𝔡-scaled Gram
//! matrices over O/p^k and the orthogonal block structure of S.

use crate::error::{Error, Result};
use crate::hermitian::{FieldElement, GramMatrix};
use crate::truncated_ring::{Elem, TruncatedRing};

pub(crate) type Mat = Vec<Vec<Elem>>;

#[derive(Debug, Clone)]
pub(crate) struct Problem {
    pub ring: TruncatedRing,
    pub n: usize,
    pub m: usize,
    /// 𝔡·S over the ring
    pub w: Mat,
    /// 𝔡·T over the ring
    pub t: Mat,
    /// index sets of the connected components of S
    pub blocks: Vec<Vec<usize>>,
}

/// 𝔡·G reduced into the ring; fails if G ∉ Herm*.
pub(crate) fn scaled(g: &GramMatrix, ring: &TruncatedRing) -> Result<Mat> {
    let pi = FieldElement::delta();
    let n = g.rank();
    let mut out = vec![vec![Elem::ZERO; n]; n];
    for i in 0..n {
        for j in 0..n {
            let x = g.entry(i, j);
            let x = if ring.ext.is_ramified() { x.mul(&pi, ring.ext.delta_sq) } else { x.clone() };
            out[i][j] = ring
                .from_field(&x)
                .ok_or_else(|| Error::NotIntegral(format!("entry ({i},{j}) = {}", g.entry(i, j))))?;
        }
    }
    Ok(out)
}

pub(crate) fn components(w: &Mat) -> Vec<Vec<usize>> {
    let n = w.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut i = 0;
        while i < comp.len() {
            let a = comp[i];
            for b in 0..n {
                if !seen[b] && (w[a][b] != Elem::ZERO || w[b][a] != Elem::ZERO) {
                    seen[b] = true;
                    comp.push(b);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

impl Problem {
    pub fn new(s: &GramMatrix, t: &GramMatrix, k: u32) -> Result<Self> {
        if s.ext != t.ext {
            return Err(Error::ContextMismatch(format!("{} vs {}", s.ext, t.ext)));
        }
        let ring = TruncatedRing::new(s.ext, k)?;
        let w = scaled(s, &ring)?;
        let tt = scaled(t, &ring)?;
        let blocks = components(&w);
        Ok(Problem { ring, n: s.rank(), m: t.rank(), w, t: tt, blocks })
    }

    pub fn block_matrix(&self, b: &[usize]) -> Mat {
        b.iter().map(|&i| b.iter().map(|&j| self.w[i][j]).collect()).collect()
    }
}

/// Σ_{a,b} conj(x_a)·W_ab·y_b.
#[inline]
pub(crate) fn form(ring: &TruncatedRing, w: &Mat, x: &[Elem], y: &[Elem]) -> Elem {
    let mut acc = Elem::ZERO;
    for (a, xa) in x.iter().enumerate() {
        if *xa == Elem::ZERO {
            continue;
        }
        let mut row = Elem::ZERO;
        for (b, yb) in y.iter().enumerate() {
            if w[a][b] != Elem::ZERO && *yb != Elem::ZERO {
                row = ring.add(row, ring.mul(w[a][b], *yb));
            }
        }
        acc = ring.add(acc, ring.mul(ring.conj(*xa), row));
    }
    acc
}

/// Decode `idx` into `len` ring elements (base p^{2k} digits).
#[inline]
pub(crate) fn decode_vector(ring: &TruncatedRing, mut idx: u64, out: &mut [Elem]) {
    let size = ring.size();
    for e in out.iter_mut() {
        *e = ring.element_at(idx % size);
        idx /= size;
    }
}

pub(crate) fn checked_pow(base: u64, e: u64) -> Option<u64> {
    let e = u32::try_from(e).ok()?;
    base.checked_pow(e)
}

pub(crate) fn budget_error(needed: impl std::fmt::Display, cap: u64) -> Error {
    Error::BudgetExceeded { needed: needed.to_string(), cap }
}
