//! Den(S,T,X): the polynomial with Den(S ⊕ (M°₂)^r, T) = Den(S,T,q^{−2r}).
//!
//! Values at the nodes come from the counting engine; the polynomial is the
//! Newton interpolant of minimal degree that also matches two further nodes.

use crate::arith::{rat, rat_pow, rat_to_string, val_rat, Rat};
use crate::density::{DensityConfig, DensityEngine};
use crate::error::{Error, Result};
use crate::field_data::{LocalQuadExt, Splitting};
use crate::hermitian::{direct_sum, standard_hyperbolic, unit_rank_one, GramMatrix};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::json;

/// Extra nodes checked beyond the interpolation nodes.
pub const CERTIFY_NODES: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityPolynomial {
    /// ascending powers of X; empty for the zero polynomial
    pub coeffs: Vec<Rat>,
    pub ext: LocalQuadExt,
    pub n: usize,
    pub m: usize,
    pub degree_certified_to: usize,
}

impl DensityPolynomial {
    pub fn constant(ext: LocalQuadExt, n: usize, m: usize, c: Rat) -> Self {
        DensityPolynomial { coeffs: trim(vec![c]), ext, n, m, degree_certified_to: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        poly_eval(&self.coeffs, x)
    }

    pub fn derivative(&self) -> Vec<Rat> {
        poly_derivative(&self.coeffs)
    }

    /// X = q^{−2r}
    pub fn node(&self, r: i64) -> Rat {
        rat_pow(self.ext.q, -2 * r)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "p": self.ext.p.to_string(),
            "splitting": self.ext.splitting.name(),
            "n": self.n.to_string(),
            "m": self.m.to_string(),
            "coeffs": coeffs_json(&self.coeffs),
            "degree_certified_to": self.degree_certified_to.to_string(),
        })
    }
}

pub fn coeffs_json(c: &[Rat]) -> serde_json::Value {
    if c.is_empty() {
        return json!(["0"]);
    }
    json!(c.iter().map(rat_to_string).collect::<Vec<_>>())
}

fn trim(mut c: Vec<Rat>) -> Vec<Rat> {
    while c.last().is_some_and(Zero::is_zero) {
        c.pop();
    }
    c
}

pub fn poly_eval(c: &[Rat], x: &Rat) -> Rat {
    c.iter().rev().fold(Rat::zero(), |acc, a| acc * x + a)
}

pub fn poly_derivative(c: &[Rat]) -> Vec<Rat> {
    c.iter().enumerate().skip(1).map(|(i, a)| a * rat(i as i64)).collect()
}

/// Quotient and remainder of a by b (b nonzero).
pub fn poly_divmod(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut r = trim(a.to_vec());
    let lead = b.last().expect("nonzero").clone();
    let mut q = vec![Rat::zero(); r.len().saturating_sub(b.len()) + 1];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = r.last().expect("nonzero") / &lead;
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] -= &c * bi;
        }
        q[shift] = c;
        r = trim(r);
    }
    (trim(q), r)
}

/// Monic greatest common divisor.
pub fn poly_gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_divmod(&a, &b).1;
        a = b;
        b = r;
    }
    match a.last().cloned() {
        Some(l) => a.iter().map(|x| x / &l).collect(),
        None => a,
    }
}

/// N/D with common factors cancelled, scaled so D(0) = 1 when D(0) ≠ 0.
pub fn reduce_fraction(n: &[Rat], d: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let g = poly_gcd(n, d);
    let (n, d) = if g.len() <= 1 { (trim(n.to_vec()), trim(d.to_vec())) } else { (poly_divmod(n, &g).0, poly_divmod(d, &g).0) };
    match d.first().filter(|c| !c.is_zero()).cloned() {
        Some(c) => (n.iter().map(|x| x / &c).collect(), d.iter().map(|x| x / &c).collect()),
        None => (n, d),
    }
}

/// Monomial coefficients of the Newton interpolant through (xs[i], ys[i]).
pub fn newton_interpolate(xs: &[Rat], ys: &[Rat]) -> Vec<Rat> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let mut dd = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    // Horner on the Newton basis: p = dd[n-1]; p = p·(X − x_i) + dd[i]
    let mut p: Vec<Rat> = Vec::new();
    for i in (0..n).rev() {
        let mut next = vec![Rat::zero(); p.len() + 1];
        for (e, a) in p.iter().enumerate() {
            next[e + 1] += a;
            next[e] -= a * &xs[i];
        }
        next[0] += &dd[i];
        p = next;
    }
    trim(p)
}

/// S ⊕ (M°₂)^r.
pub fn augment_hyperbolic(s: &GramMatrix, r: usize) -> GramMatrix {
    let h = standard_hyperbolic(s.ext);
    (0..r).fold(s.clone(), |acc, _| direct_sum(&acc, &h).expect("same context"))
}

/// S ⊕ ⟨1⟩^r (unramified only).
pub fn augment_unit(s: &GramMatrix, r: usize) -> Result<GramMatrix> {
    let one = unit_rank_one(s.ext)?;
    Ok((0..r).fold(s.clone(), |acc, _| direct_sum(&acc, &one).expect("same context")))
}

/// Default degree cap: 2mn plus the valuation of det T.
pub fn default_max_degree(s: &GramMatrix, t: &GramMatrix) -> usize {
    let vt = val_rat(&t.det(), s.ext.p).unwrap_or(0).max(0) as usize;
    2 * s.rank() * t.rank() + vt
}

/// Interpolation that shares one counting engine (and its caches) across nodes.
pub struct Interpolator<'a> {
    pub engine: &'a DensityEngine,
}

impl<'a> Interpolator<'a> {
    pub fn new(engine: &'a DensityEngine) -> Self {
        Interpolator { engine }
    }

    fn node_values(&self, s: &GramMatrix, t: &GramMatrix, rs: std::ops::Range<usize>) -> Result<Vec<Rat>> {
        rs.into_par_iter()
            .map(|r| self.engine.local_density(&augment_hyperbolic(s, r), t).map(|d| d.value))
            .collect()
    }

    pub fn interpolate(&self, s: &GramMatrix, t: &GramMatrix, max_degree: usize) -> Result<DensityPolynomial> {
        if s.ext != t.ext {
            return Err(Error::ContextMismatch(format!("{} vs {}", s.ext, t.ext)));
        }
        let q = s.ext.q;
        let mut ys = self.node_values(s, t, 0..1 + CERTIFY_NODES)?;
        let xs: Vec<Rat> = (0..=max_degree + CERTIFY_NODES).map(|r| rat_pow(q, -2 * r as i64)).collect();
        for d in 0..=max_degree {
            let need = d + 1 + CERTIFY_NODES;
            if ys.len() < need {
                let more = self.node_values(s, t, ys.len()..need)?;
                ys.extend(more);
            }
            let coeffs = newton_interpolate(&xs[..=d], &ys[..=d]);
            if (d + 1..need).all(|r| poly_eval(&coeffs, &xs[r]) == ys[r]) {
                return Ok(DensityPolynomial {
                    coeffs,
                    ext: s.ext,
                    n: s.rank(),
                    m: t.rank(),
                    degree_certified_to: CERTIFY_NODES,
                });
            }
        }
        Err(Error::DegreeCapExceeded(max_degree))
    }

    /// Den(S ⊕ ⟨1⟩^r, T) against P((−q)^{−r}) (inert) or P(q^{−r}) (split), r = 1..=r_max.
    pub fn unit_augment_check(&self, s: &GramMatrix, t: &GramMatrix, p: &DensityPolynomial, r_max: usize) -> Result<bool> {
        Ok(self.unit_augment_report(s, t, p, r_max)?.iter().all(|(_, lhs, rhs)| lhs == rhs))
    }

    /// (r, Den(S_r,T), P(x_r)) for r = 1..=r_max.
    pub fn unit_augment_report(
        &self,
        s: &GramMatrix,
        t: &GramMatrix,
        p: &DensityPolynomial,
        r_max: usize,
    ) -> Result<Vec<(usize, Rat, Rat)>> {
        let q = s.ext.q as i64;
        let base = match s.ext.splitting {
            Splitting::Inert => Rat::one() / rat(-q),
            Splitting::Split => Rat::one() / rat(q),
            Splitting::Ramified => return Err(Error::RamifiedUnsupported),
        };
        (1..=r_max)
            .into_par_iter()
            .map(|r| {
                let lhs = self.engine.local_density(&augment_unit(s, r)?, t)?.value;
                let x = num_traits::pow(base.clone(), r);
                Ok((r, lhs, p.eval(&x)))
            })
            .collect()
    }
}

pub fn interpolate(s: &GramMatrix, t: &GramMatrix, max_degree: usize, config: &DensityConfig) -> Result<DensityPolynomial> {
    let engine = DensityEngine::new(config.clone());
    Interpolator::new(&engine).interpolate(s, t, max_degree)
}

pub fn unit_augment_check(
    s: &GramMatrix,
    t: &GramMatrix,
    p: &DensityPolynomial,
    r_max: usize,
    config: &DensityConfig,
) -> Result<bool> {
    let engine = DensityEngine::new(config.clone());
    Interpolator::new(&engine).unit_augment_check(s, t, p, r_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    fn inert(p: u64) -> LocalQuadExt {
        LocalQuadExt::new(p, Splitting::Inert).unwrap()
    }

    #[test]
    fn newton_recovers_polynomials() {
        let c = vec![ratio(1, 3), rat(-2), ratio(5, 7)];
        let xs: Vec<Rat> = (0..3).map(|r| rat_pow(3, -2 * r)).collect();
        let ys: Vec<Rat> = xs.iter().map(|x| poly_eval(&c, x)).collect();
        assert_eq!(newton_interpolate(&xs, &ys), c);
        assert!(newton_interpolate(&xs, &[rat(0), rat(0), rat(0)]).is_empty());
    }

    #[test]
    fn division_and_gcd() {
        // (1 − X/9)(1 + X/3) over (1 − X/9)
        let d = vec![rat(1), ratio(-1, 9)];
        let n = vec![rat(1), ratio(2, 9), ratio(-1, 27)];
        let (q, r) = poly_divmod(&n, &d);
        assert_eq!((q.clone(), r), (vec![rat(1), ratio(1, 3)], vec![]));
        assert_eq!(reduce_fraction(&n, &d), (q, vec![rat(1)]));
        assert_eq!(poly_gcd(&[rat(1), rat(1)], &[rat(2)]), vec![rat(1)]);
    }

    #[test]
    fn augmentation_shapes() {
        let s = GramMatrix::diagonal_int(inert(3), &[1]);
        assert_eq!(augment_hyperbolic(&s, 0), s);
        let a = augment_hyperbolic(&s, 2);
        assert_eq!(a.rank(), 5);
        assert_eq!(a.entry(1, 2), &crate::hermitian::FieldElement::one());
        assert_eq!(augment_unit(&s, 2).unwrap(), GramMatrix::diagonal_int(inert(3), &[1, 1, 1]));
        let ram = LocalQuadExt::new(7, Splitting::Ramified).unwrap();
        assert!(matches!(augment_unit(&GramMatrix::diagonal_int(ram, &[1]), 1), Err(Error::RamifiedUnsupported)));
    }

    #[test]
    fn base_polynomials() {
        let ext = inert(3);
        let cfg = DensityConfig::default();
        let s = GramMatrix::diagonal_int(ext, &[1]);
        let p = interpolate(&s, &GramMatrix::diagonal_int(ext, &[1]), 4, &cfg).unwrap();
        assert_eq!(p.eval(&rat(1)), ratio(4, 3));
        let p3 = interpolate(&s, &GramMatrix::diagonal_int(ext, &[3]), 4, &cfg).unwrap();
        assert_eq!(p3.eval(&rat(1)), rat(0));
        assert!(p3.eval(&ratio(1, 9)) > rat(0));
        let half = GramMatrix::diagonal(ext, &[ratio(1, 3)]);
        assert!(interpolate(&s, &half, 4, &cfg).unwrap().is_zero());
    }
}
