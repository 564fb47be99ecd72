use super::*;
use crate::arith::{rat, ratio};
use crate::field_data::{LocalQuadExt, Splitting};
use crate::hermitian::{direct_sum, standard_hyperbolic, FieldElement};

fn ext(p: u64, s: Splitting) -> LocalQuadExt {
    LocalQuadExt::new(p, s).unwrap()
}

fn cfg(strategy: Strategy) -> DensityConfig {
    DensityConfig { strategy, ..DensityConfig::default() }
}

fn diag(e: LocalQuadExt, d: &[i64]) -> GramMatrix {
    GramMatrix::diagonal_int(e, d)
}

/// Independent oracle: norms of all elements of O/p^k, from the ring only.
fn norm_count(e: LocalQuadExt, k: u32, target: u64) -> u64 {
    let r = TruncatedRing::new(e, k).unwrap();
    r.enumerate().filter(|&x| r.norm(x) == target % r.modulus).count() as u64
}

#[test]
fn base_counts() {
    let e = ext(3, Splitting::Inert);
    let c = |s: &GramMatrix, t: &GramMatrix, k| count_solutions(s, t, k, &DensityConfig::default()).unwrap();
    assert_eq!(c(&diag(e, &[1]), &diag(e, &[1]), 1), BigUint::from(4u32));
    assert_eq!(c(&diag(e, &[1]), &diag(e, &[3]), 2), BigUint::from(0u32));
    assert_eq!(c(&diag(e, &[1]), &GramMatrix::empty(e), 1), BigUint::from(1u32));
    assert_eq!(norm_count(e, 1, 1), 4);
}

#[test]
fn base_densities() {
    let e = ext(3, Splitting::Inert);
    let d = local_density(&diag(e, &[1]), &diag(e, &[1]), &DensityConfig::default()).unwrap();
    assert_eq!(d.value, ratio(4, 3));
    assert_eq!(d.stabilized_at, 2);
    assert_eq!(d.raw_counts[0].1, BigUint::from(4u32));
    assert_eq!(d.raw_counts[1].1, BigUint::from(12u32));
    let d = local_density(&diag(e, &[1]), &diag(e, &[3]), &DensityConfig::default()).unwrap();
    assert_eq!(d.value, rat(0));
    assert_eq!(d.stabilized_at, 3);
    let counts: Vec<u64> = d.raw_counts.iter().map(|(_, c)| c.try_into().unwrap()).collect();
    assert_eq!(counts, vec![1, 0, 0]);
    let d = local_density(&diag(e, &[1]), &diag(e, &[1, 1]), &DensityConfig::default()).unwrap();
    assert_eq!(d.value, rat(0));
    let t = GramMatrix::diagonal(e, &[ratio(1, 3)]);
    let d = local_density(&diag(e, &[1]), &t, &DensityConfig::default()).unwrap();
    assert_eq!(d.value, rat(0));
    assert_eq!(d.shortcut.as_deref(), Some("T not integral"));
}

#[test]
fn rank_one_counts_match_norm_oracle() {
    for (p, s) in [(2, Splitting::Inert), (3, Splitting::Inert), (5, Splitting::Inert), (2, Splitting::Split), (3, Splitting::Split)] {
        let e = ext(p, s);
        for k in 1..=3 {
            for t in [1, p, p * p, 2 * p + 1] {
                let got = count_solutions(&diag(e, &[1]), &diag(e, &[t as i64]), k, &DensityConfig::default()).unwrap();
                assert_eq!(got, BigUint::from(norm_count(e, k, t)), "p={p} {s:?} k={k} t={t}");
            }
        }
    }
}

#[test]
fn squared_valuation_stabilizes_at_four() {
    for p in [3u64, 5] {
        let e = ext(p, Splitting::Inert);
        let d = local_density(&diag(e, &[1]), &diag(e, &[(p * p) as i64]), &DensityConfig::default()).unwrap();
        assert_eq!(d.value, ratio(p as i64 + 1, p as i64));
        assert_eq!(d.stabilized_at, 4);
    }
}

fn corpus() -> Vec<(GramMatrix, GramMatrix)> {
    let mut v = Vec::new();
    for (p, s) in [(2, Splitting::Inert), (3, Splitting::Inert), (2, Splitting::Split), (3, Splitting::Split), (3, Splitting::Ramified), (5, Splitting::Ramified)] {
        let e = ext(p, s);
        let h = standard_hyperbolic(e);
        let pp = p as i64;
        if e.is_ramified() {
            let one = diag(e, &[1]);
            v.push((h.clone(), one.clone()));
            v.push((h.clone(), diag(e, &[pp])));
            v.push((direct_sum(&one, &h).unwrap(), diag(e, &[2])));
            v.push((direct_sum(&h, &h).unwrap(), h.clone()));
        } else {
            v.push((diag(e, &[1, 1]), diag(e, &[1])));
            v.push((diag(e, &[1, 1]), diag(e, &[pp])));
            v.push((direct_sum(&diag(e, &[1]), &h).unwrap(), diag(e, &[pp])));
            v.push((diag(e, &[1, pp]), diag(e, &[1, pp])));
            v.push((direct_sum(&diag(e, &[1]), &h).unwrap(), diag(e, &[1, 1])));
            v.push((h.clone(), h.clone()));
        }
    }
    v
}

#[test]
fn strategies_agree() {
    for (s, t) in corpus() {
        for k in 1..=2 {
            let conv = count_solutions(&s, &t, k, &cfg(Strategy::BlockConvolution)).unwrap();
            let ring_size = s.ext.p.pow(2 * k);
            if ring_size.pow(s.rank() as u32) <= 2_000_000 && (t.rank() == 1 || ring_size.pow(s.rank() as u32) <= 10_000) {
                let brute = count_solutions(&s, &t, k, &cfg(Strategy::BruteForce)).unwrap();
                assert_eq!(brute, conv, "conv S={s} T={t} k={k} {}", s.ext);
            }
            if s.ext.is_ramified() {
                assert!(count_solutions(&s, &t, k, &cfg(Strategy::Fourier)).is_err());
            } else {
                let four = count_solutions(&s, &t, k, &cfg(Strategy::Fourier)).unwrap();
                assert_eq!(conv, four, "fourier S={s} T={t} k={k} {}", s.ext);
            }
        }
    }
}

#[test]
fn strategies_agree_at_level_three() {
    for (p, s) in [(2, Splitting::Inert), (3, Splitting::Inert), (2, Splitting::Split)] {
        let e = ext(p, s);
        let h = standard_hyperbolic(e);
        let pp = p as i64;
        let cases = [
            (direct_sum(&diag(e, &[1]), &h).unwrap(), diag(e, &[pp * pp])),
            (diag(e, &[1, 1]), diag(e, &[pp, pp])),
            (diag(e, &[1, 1]), diag(e, &[1, pp * pp])),
        ];
        for (s, t) in cases {
            let conv = count_solutions(&s, &t, 3, &cfg(Strategy::BlockConvolution));
            let four = count_solutions(&s, &t, 3, &cfg(Strategy::Fourier)).unwrap();
            if let Ok(conv) = conv {
                assert_eq!(conv, four, "S={s} T={t}");
            }
            if s.rank() <= 2 && p == 2 {
                let brute = count_solutions(&s, &t, 3, &cfg(Strategy::BruteForce)).unwrap();
                assert_eq!(brute, four, "S={s} T={t}");
            }
        }
    }
}

#[test]
fn uniformizer_sign_is_irrelevant() {
    // replacing π by −π turns M°₂ into its image under e₁ ↦ −e₁
    for p in [3u64, 5, 7] {
        let e = ext(p, Splitting::Ramified);
        let h = standard_hyperbolic(e);
        let flipped = GramMatrix::new(
            e,
            vec![
                vec![FieldElement::zero(), h.entry(0, 1).neg()],
                vec![h.entry(1, 0).neg(), FieldElement::zero()],
            ],
        )
        .unwrap();
        for t in [diag(e, &[1]), diag(e, &[p as i64])] {
            for k in 1..=2 {
                let a = count_solutions(&h, &t, k, &DensityConfig::default()).unwrap();
                let b = count_solutions(&flipped, &t, k, &DensityConfig::default()).unwrap();
                assert_eq!(a, b);
            }
        }
    }
}

#[test]
fn gl_invariance() {
    // g = [[1, 1+δ], [0, 1]] is unimodular in every unramified model
    for (p, s) in [(3, Splitting::Inert), (2, Splitting::Split), (2, Splitting::Inert)] {
        let e = ext(p, s);
        let g = vec![
            vec![FieldElement::one(), FieldElement::new(rat(1), rat(1))],
            vec![FieldElement::zero(), FieldElement::one()],
        ];
        let sm = diag(e, &[1, p as i64]);
        let sg = sm.transform(&g).unwrap();
        assert_ne!(sm, sg);
        let t = diag(e, &[1]);
        let a = local_density(&sm, &t, &DensityConfig::default()).unwrap();
        let b = local_density(&sg, &t, &DensityConfig::default()).unwrap();
        assert_eq!(a.value, b.value);
        let ta = diag(e, &[1, 1]);
        let tb = ta.transform(&g).unwrap();
        let s2 = direct_sum(&diag(e, &[1]), &standard_hyperbolic(e)).unwrap();
        let a = local_density(&s2, &ta, &DensityConfig::default()).unwrap();
        let b = local_density(&s2, &tb, &DensityConfig::default()).unwrap();
        assert_eq!(a.value, b.value);
    }
}

#[test]
fn normalization_ratio_after_stabilization() {
    let e = ext(5, Splitting::Inert);
    let s = diag(e, &[1, 1]);
    let t = diag(e, &[5]);
    let eng = DensityEngine::new(DensityConfig::default());
    let c3 = eng.count_solutions(&s, &t, 3).unwrap();
    let c4 = eng.count_solutions(&s, &t, 4).unwrap();
    assert_eq!(c4, c3 * BigUint::from(5u32).pow(3));
}

#[test]
fn budget_is_enforced() {
    let e = ext(5, Splitting::Inert);
    let tiny = DensityConfig { budget: 10, strategy: Strategy::BruteForce, ..DensityConfig::default() };
    let err = count_solutions(&diag(e, &[1, 1]), &diag(e, &[1]), 2, &tiny).unwrap_err();
    assert!(matches!(err, Error::BudgetExceeded { .. }));
    assert!(err.is_computational_limit());
}
