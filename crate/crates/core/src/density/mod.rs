//! Local densities Den(S,T) = lim_k #{x ∈ M_{n,m}(O/p^k) : x̄ᵀSx ≡ T} / q^{k·m(2n−m)},
//! the congruence taken in p^k·Herm_m(O)^*.
//!
//! Three interchangeable counting strategies are provided and cross-checked in
//! the tests: pruned enumeration (the oracle), convolution of block value
//! distributions, and a Fourier/Gauss-sum method for unramified rings.

mod block_dp;
mod brute;
pub(crate) mod diag;
mod fourier;
pub(crate) mod problem;

use crate::arith::{val_rat, Rat};
use crate::error::{Error, Result};
use crate::hermitian::GramMatrix;
use crate::truncated_ring::TruncatedRing;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use problem::{Mat, Problem};
use serde_json::json;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Fourier for unramified rings, block convolution otherwise.
    Auto,
    BruteForce,
    BlockConvolution,
    Fourier,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityConfig {
    pub k_max: u32,
    /// cap on elementary enumeration steps
    pub budget: u64,
    pub strategy: Strategy,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig { k_max: 4, budget: 1_000_000_000, strategy: Strategy::Auto }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityResult {
    pub value: Rat,
    /// level at which two consecutive normalized counts agreed (0 when the
    /// value was decided without counting)
    pub stabilized_at: u32,
    pub raw_counts: Vec<(u32, BigUint)>,
    /// reason when the value was decided without counting
    pub shortcut: Option<String>,
}

impl DensityResult {
    fn decided(value: Rat, why: &str) -> Self {
        DensityResult { value, stabilized_at: 0, raw_counts: Vec::new(), shortcut: Some(why.to_string()) }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "value": crate::arith::rat_to_string(&self.value),
            "stabilized_at": self.stabilized_at.to_string(),
            "raw_counts": self.raw_counts.iter().map(|(k, c)| json!({"k": k.to_string(), "count": c.to_string()})).collect::<Vec<_>>(),
            "shortcut": self.shortcut,
        })
    }
}

type TableKey = (TruncatedRing, Mat);

/// Counting engine with caches shared across calls (interpolation evaluates
/// many S against the same T).
pub struct DensityEngine {
    pub config: DensityConfig,
    tables: Mutex<HashMap<TableKey, Arc<fourier::TargetTable>>>,
    gauss: Mutex<HashMap<TableKey, Arc<Vec<BigInt>>>>,
}

impl DensityEngine {
    pub fn new(config: DensityConfig) -> Self {
        DensityEngine { config, tables: Mutex::new(HashMap::new()), gauss: Mutex::new(HashMap::new()) }
    }

    fn resolve(&self, pr: &Problem) -> Strategy {
        match self.config.strategy {
            Strategy::Auto if pr.ring.is_unramified() => Strategy::Fourier,
            Strategy::Auto if block_dp::feasible(pr) => Strategy::BlockConvolution,
            Strategy::Auto => Strategy::BruteForce,
            s => s,
        }
    }

    /// Exact number of x ∈ M_{n,m}(O/p^k) with x̄ᵀSx ≡ T modulo p^k·Herm*.
    pub fn count_solutions(&self, s: &GramMatrix, t: &GramMatrix, k: u32) -> Result<BigUint> {
        let pr = Problem::new(s, t, k)?;
        if pr.m == 0 {
            return Ok(BigUint::one());
        }
        let budget = self.config.budget;
        match self.resolve(&pr) {
            Strategy::BruteForce => brute::count(&pr, budget),
            Strategy::BlockConvolution => block_dp::count(&pr, budget),
            Strategy::Fourier => {
                if !pr.ring.is_unramified() {
                    return Err(Error::InvalidInput("the Fourier strategy needs an unramified ring".into()));
                }
                let table = self.table(&pr)?;
                let gamma = fourier::gauss_product(&pr, |wb| self.block_gauss(&pr.ring, wb))?;
                Ok(fourier::combine(&pr.ring, pr.m, &table, &gamma))
            }
            Strategy::Auto => unreachable!("resolved above"),
        }
    }

    fn table(&self, pr: &Problem) -> Result<Arc<fourier::TargetTable>> {
        let key = (pr.ring, pr.t.clone());
        if let Some(t) = self.tables.lock().expect("cache lock").get(&key) {
            return Ok(t.clone());
        }
        let t = Arc::new(fourier::target_table(&pr.ring, &pr.t, self.config.budget)?);
        self.tables.lock().expect("cache lock").insert(key, t.clone());
        Ok(t)
    }

    fn block_gauss(&self, ring: &TruncatedRing, wb: &Mat) -> Result<Vec<BigInt>> {
        let key = (*ring, wb.clone());
        if let Some(g) = self.gauss.lock().expect("cache lock").get(&key) {
            return Ok(g.as_ref().clone());
        }
        let g = fourier::block_gauss(ring, wb, self.config.budget)?;
        self.gauss.lock().expect("cache lock").insert(key, Arc::new(g.clone()));
        Ok(g)
    }

    /// Den(S,T) with stabilization detection.
    pub fn local_density(&self, s: &GramMatrix, t: &GramMatrix) -> Result<DensityResult> {
        if s.ext != t.ext {
            return Err(Error::ContextMismatch(format!("{} vs {}", s.ext, t.ext)));
        }
        let (n, m) = (s.rank(), t.rank());
        if m == 0 {
            return Ok(DensityResult::decided(Rat::one(), "m = 0"));
        }
        if n < m {
            return Ok(DensityResult::decided(Rat::zero(), "n < m"));
        }
        if !s.in_dual_star() {
            return Err(Error::NotIntegral("S".into()));
        }
        if !t.in_dual_star() {
            return Ok(DensityResult::decided(Rat::zero(), "T not integral"));
        }
        let det_t = t.det();
        if det_t.is_zero() || s.det().is_zero() {
            return Err(Error::Singular);
        }
        let q = BigInt::from(s.ext.q);
        // Levels below v(det T)+1 cannot see T yet; comparisons start there.
        let first = 1 + val_rat(&det_t, s.ext.p).unwrap_or(0).max(0) as u32;
        let k_max = self.config.k_max.max(first + 1);
        let exponent = (m * (2 * n - m)) as u32;
        let mut raw = Vec::new();
        let mut values: Vec<Rat> = Vec::new();
        for k in 1..=k_max {
            let c = self.count_solutions(s, t, k)?;
            let v = Rat::new(BigInt::from(c.clone()), q.pow(k * exponent));
            raw.push((k, c));
            values.push(v);
            if k > first && values[k as usize - 1] == values[k as usize - 2] {
                return Ok(DensityResult {
                    value: values[k as usize - 1].clone(),
                    stabilized_at: k,
                    raw_counts: raw,
                    shortcut: None,
                });
            }
        }
        let last = values.len() - 1;
        Err(Error::NotStabilized {
            k_max,
            previous: crate::arith::rat_to_string(&values[last - 1]),
            last: crate::arith::rat_to_string(&values[last]),
        })
    }
}

pub fn count_solutions(s: &GramMatrix, t: &GramMatrix, k: u32, config: &DensityConfig) -> Result<BigUint> {
    DensityEngine::new(config.clone()).count_solutions(s, t, k)
}

pub fn local_density(s: &GramMatrix, t: &GramMatrix, config: &DensityConfig) -> Result<DensityResult> {
    DensityEngine::new(config.clone()).local_density(s, t)
}

#[cfg(test)]
mod tests;
