use hermlab_core::arith::{rat, rat_to_f64, ratio, Rat, Surd};
use hermlab_core::assembly::{divisors, hecke_faltings, sigma};
use hermlab_core::density::{DensityConfig, DensityEngine};
use hermlab_core::field_data::{LocalQuadExt, Splitting};
use hermlab_core::hermitian::{FieldElement, GramMatrix};
use hermlab_core::weil_index::{weil_index, Block, FourthRoot, SpaceDescriptor};
use hermlab_core::whittaker::{functional_equation_probe, normalize, LogLinear};
use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;
use std::sync::OnceLock;

fn engine() -> &'static DensityEngine {
    static E: OnceLock<DensityEngine> = OnceLock::new();
    E.get_or_init(|| DensityEngine::new(DensityConfig::default()))
}

fn unramified() -> impl Strategy<Value = LocalQuadExt> {
    prop_oneof![
        Just(LocalQuadExt::new(3, Splitting::Inert).unwrap()),
        Just(LocalQuadExt::new(5, Splitting::Inert).unwrap()),
        Just(LocalQuadExt::new(2, Splitting::Split).unwrap()),
        Just(LocalQuadExt::new(3, Splitting::Split).unwrap()),
    ]
}

fn small_int_elem() -> impl Strategy<Value = FieldElement> {
    (-2i64..=2, -2i64..=2).prop_map(|(a, b)| FieldElement::new(rat(a), rat(b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Den(S, ḡᵀTg) = Den(S, T) for unipotent g over O (det T of valuation
    /// at most 1; larger ones need counting at p^5 and take minutes).
    #[test]
    fn density_is_gl_invariant(ext in unramified(), (a, b) in prop_oneof![Just((0u32, 0u32)), Just((1, 0)), Just((0, 1))], x in small_int_elem(), upper in any::<bool>()) {
        let p = ext.p as i64;
        let s = GramMatrix::diagonal_int(ext, &[1, 1]);
        let t = GramMatrix::diagonal_int(ext, &[p.pow(a), p.pow(b)]);
        let (o, z) = (FieldElement::one(), FieldElement::zero());
        let g = if upper { vec![vec![o.clone(), x], vec![z, o]] } else { vec![vec![o.clone(), z], vec![x, o]] };
        let gt = t.transform(&g).unwrap();
        let e = engine();
        prop_assert_eq!(e.local_density(&s, &t).unwrap().value, e.local_density(&s, &gt).unwrap().value);
    }

    /// Scaling T by a unit norm leaves the density unchanged.
    #[test]
    fn density_unit_scaling(ext in unramified(), v in 0u32..3, x in small_int_elem()) {
        let n = x.norm(ext.delta_sq);
        prop_assume!(!n.is_zero() && hermlab_core::arith::val_rat(&n, ext.p) == Some(0));
        let p = ext.p as i64;
        let s = GramMatrix::diagonal_int(ext, &[1, 1]);
        let t = GramMatrix::diagonal_int(ext, &[p.pow(v)]);
        let scaled = t.transform(&[vec![x]]).unwrap();
        let e = engine();
        prop_assert_eq!(e.local_density(&s, &t).unwrap().value, e.local_density(&s, &scaled).unwrap().value);
    }

    /// W*(s)/W*(−s) is the constant predicted sign.
    #[test]
    fn functional_equation(ext in unramified(), n in 2usize..=3, v in 0u32..3) {
        let p = ext.p as i64;
        let s = GramMatrix::diagonal_int(ext, &vec![1; n]);
        let t = GramMatrix::diagonal_int(ext, &[p.pow(v)]);
        let w = normalize(engine(), &s, &t).unwrap();
        let samples = [ratio(1, 2), rat(1), ratio(3, 2), rat(2)];
        let sign = Surd::rational(rat(w.predicted_sign() as i64));
        for r in functional_equation_probe(&w, &samples).unwrap() {
            prop_assert_eq!(&r, &sign);
        }
    }
}

#[test]
fn functional_equation_ramified_rank_one() {
    for p in [3u64, 5] {
        let ext = LocalQuadExt::new(p, Splitting::Ramified).unwrap();
        let s = hermlab_core::hermitian::standard_self_dual(ext, 2).unwrap();
        for t in [1i64, p as i64, (p * p) as i64] {
            let w = normalize(engine(), &s, &GramMatrix::diagonal_int(ext, &[t])).unwrap();
            let one = Surd::rational(rat(1));
            for r in functional_equation_probe(&w, &[ratio(1, 2), rat(1), rat(2)]).unwrap() {
                assert_eq!(r, one, "p={p} t={t}");
            }
        }
    }
}

fn block() -> impl Strategy<Value = Block> {
    let inert = LocalQuadExt::new(3, Splitting::Inert).unwrap();
    let ram = LocalQuadExt::new(5, Splitting::Ramified).unwrap();
    let base = prop_oneof![
        (1usize..4).prop_map(|d| Block::HermitianHyperbolic { d }),
        (1usize..4).prop_map(|rank| Block::SplitAlgebra { rank }),
        (1usize..3).prop_map(move |h| Block::EvenSelfDual { ext: ram, rank: 2 * h }),
        (1usize..4).prop_map(move |rank| Block::UnramifiedSelfDual { ext: inert, rank, psi_unramified: true }),
        (1usize..4).prop_map(|d| Block::QuadraticHyperbolic { d }),
        Just(Block::ArchimedeanLine),
        Just(Block::LineSquared { ext: inert }),
        Just(Block::LineSquared { ext: ram }),
    ];
    (base, any::<bool>()).prop_map(|(b, c)| if c { Block::Conjugate(Box::new(b)) } else { b })
}

fn descriptor() -> impl Strategy<Value = SpaceDescriptor> {
    prop::collection::vec(block(), 0..5).prop_map(SpaceDescriptor::new)
}

proptest! {
    #[test]
    fn weil_index_is_multiplicative(a in descriptor(), b in descriptor()) {
        let (ga, gb) = (weil_index(&a).unwrap(), weil_index(&b).unwrap());
        prop_assert_eq!(weil_index(&a.direct_sum(&b)).unwrap(), ga.mul(gb));
    }

    #[test]
    fn weil_index_fourth_power_and_conjugation(a in descriptor()) {
        let g = weil_index(&a).unwrap();
        prop_assert_eq!(g.pow(4), FourthRoot::ONE);
        prop_assert_eq!(weil_index(&a.conjugate()).unwrap(), g.conj());
        prop_assert_eq!(g.mul(g.conj()), FourthRoot::ONE);
        prop_assert_eq!(a.conjugate().conjugate(), a);
    }

    #[test]
    fn sigma_is_multiplicative(a in 1u64..300, b in 1u64..300, k in -3i64..=3) {
        prop_assume!(a.gcd(&b) == 1);
        prop_assert_eq!(sigma(k, a * b), sigma(k, a) * sigma(k, b));
    }

    #[test]
    fn sigma_matches_divisor_sum(j in 1u64..2000) {
        let brute: u64 = (1..=j).filter(|d| j % d == 0).sum();
        prop_assert_eq!(sigma(1, j), rat(brute as i64));
        prop_assert_eq!(rat(divisors(j).len() as i64), sigma(0, j));
    }

    /// The height delta is additive under coprime products in the sense
    /// h(ab) = σ₁(b)h(a) + σ₁(a)h(b).
    #[test]
    fn hecke_height_twisted_additivity(a in 1u64..200, b in 1u64..200) {
        prop_assume!(a.gcd(&b) == 1);
        let (da, ha) = hecke_faltings(a);
        let (db, hb) = hecke_faltings(b);
        let (dab, hab) = hecke_faltings(a * b);
        prop_assert_eq!(dab, da * db);
        prop_assert_eq!(hab, ha.scale(&rat(db as i64)).add(&hb.scale(&rat(da as i64))));
    }

    #[test]
    fn loglinear_is_a_homomorphism(n1 in 1i64..500, d1 in 1i64..500, n2 in 1i64..500, d2 in 1i64..500) {
        let x = ratio(n1, d1);
        let y = ratio(n2, d2);
        let lhs = LogLinear::log_of(&(&x * &y), &rat(1));
        let rhs = LogLinear::log_of(&x, &rat(1)).add(&LogLinear::log_of(&y, &rat(1)));
        prop_assert_eq!(&lhs, &rhs);
        let f = (rat_to_f64(&x) * rat_to_f64(&y)).ln();
        prop_assert!((lhs.to_f64() - f).abs() < 1e-9 * f.abs().max(1.0));
        prop_assert!(lhs.add(&lhs.scale(&rat(-1))).is_zero());
    }

    #[test]
    fn surd_arithmetic(a in -50i64..50, b in 1i64..50, r in 1u64..60, c in 1i64..50, s in 1u64..60) {
        prop_assume!(a != 0);
        let x = Surd::new(ratio(a, b), r);
        let y = Surd::new(rat(c), s);
        prop_assert_eq!(x.mul(&y), y.mul(&x));
        prop_assert!((x.mul(&y).to_f64() - x.to_f64() * y.to_f64()).abs() < 1e-9 * (x.to_f64() * y.to_f64()).abs());
        let q = x.mul(&y).div(&y).unwrap();
        prop_assert_eq!(q, x.clone());
        let two: Rat = rat(2);
        prop_assert_eq!(x.add(&x).unwrap(), x.scale(&two));
    }
}
