//! Exhaustive count with column pruning: column j of x is drawn from the
//! vectors y with Q(y) ≡ T_jj, then checked against all earlier columns.
//! This is the reference oracle for the faster strategies.

use super::problem::{budget_error, checked_pow, decode_vector, form, Problem};
use crate::error::Result;
use crate::truncated_ring::Elem;
use num_bigint::BigUint;
use rayon::prelude::*;
use std::sync::atomic::{AtomicU64, Ordering};

pub(crate) fn count(pr: &Problem, budget: u64) -> Result<BigUint> {
    let (n, m, ring) = (pr.n, pr.m, &pr.ring);
    if m == 0 {
        return Ok(BigUint::from(1u32));
    }
    let total = checked_pow(ring.size(), n as u64).filter(|&t| t <= budget).ok_or_else(|| {
        budget_error(format!("{}^{}", ring.size(), n), budget)
    })?;
    let targets: Vec<u64> = (0..m).map(|j| ring.diag_coord(pr.t[j][j])).collect();
    let mut cands: Vec<Vec<Vec<Elem>>> = vec![Vec::new(); m];
    let mut y = vec![Elem::ZERO; n];
    for idx in 0..total {
        decode_vector(ring, idx, &mut y);
        let q = ring.diag_coord(form(ring, &pr.w, &y, &y));
        for j in 0..m {
            if q == targets[j] {
                cands[j].push(y.clone());
            }
        }
    }
    let visited = AtomicU64::new(total);
    let counts: Result<Vec<u64>> = cands[0]
        .par_iter()
        .map(|first| {
            let mut chosen = vec![first.as_slice()];
            extend(pr, &cands, &mut chosen, &visited, budget)
        })
        .collect();
    Ok(counts?.into_iter().map(BigUint::from).sum())
}

fn extend<'a>(
    pr: &Problem,
    cands: &'a [Vec<Vec<Elem>>],
    chosen: &mut Vec<&'a [Elem]>,
    visited: &AtomicU64,
    budget: u64,
) -> Result<u64> {
    let j = chosen.len();
    if j == pr.m {
        return Ok(1);
    }
    let v = visited.fetch_add(cands[j].len() as u64, Ordering::Relaxed);
    if v > budget {
        return Err(budget_error(format!("more than {v}"), budget));
    }
    let mut total = 0;
    for y in &cands[j] {
        let ok = (0..j).all(|i| form(&pr.ring, &pr.w, chosen[i], y) == pr.t[i][j]);
        if ok {
            chosen.push(y);
            total += extend(pr, cands, chosen, visited, budget)?;
            chosen.pop();
        }
    }
    Ok(total)
}
