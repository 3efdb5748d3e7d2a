//! Algebraic invariants checked on random inputs.

use bireflect::algebra::{factor_rational_poly, rat, Matrix, Poly, Rational, Sign};
use bireflect::bilinear::{signature_of_gram, QuadSpace, Subspace};
use bireflect::calculus::DetThetaProfile;
use bireflect::oracle::{random_reflection_product, random_unimodular};
use bireflect::transform::{spinor_norm, spinor_norm_wall, OrthoMap};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn diag_space(entries: &[i64]) -> QuadSpace {
    let d: Vec<Rational> = entries.iter().map(|&e| rat(e)).collect();
    QuadSpace::nondegenerate(Matrix::diag(&d)).unwrap()
}

fn nonzero_diag(max_dim: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(prop_oneof![-3i64..=-1, 1i64..=3], 1..=max_dim)
}

fn commutator(a: &OrthoMap, b: &OrthoMap) -> OrthoMap {
    a.compose(b).compose(&a.inverse()).compose(&b.inverse())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn factorization_recovers_input(roots in prop::collection::vec(-3i64..=3, 0..4), quad in prop::option::of((-2i64..=2, 1i64..=3)), lead in 1i64..=4) {
        let mut f = Poly::constant(rat(lead));
        for r in &roots {
            f = &f * &Poly::linear(&rat(*r));
        }
        if let Some((b, c)) = quad {
            f = &f * &Poly::from_ints(&[c, b, 1]);
        }
        let factors = factor_rational_poly(&f).unwrap();
        let mut back = Poly::constant(f.lead());
        for (g, e) in &factors {
            prop_assert!(g.is_monic());
            back = &back * &g.pow(*e);
        }
        prop_assert_eq!(back, f);
    }

    #[test]
    fn reciprocal_is_an_involution(coeffs in prop::collection::vec(-5i64..=5, 1..6), c0 in prop_oneof![-4i64..=-1, 1i64..=4], lead in 1i64..=3) {
        let mut c = vec![c0];
        c.extend(coeffs);
        c.push(lead);
        let f = Poly::from_ints(&c);
        let r = f.reciprocal().unwrap();
        prop_assert_eq!(r.reciprocal().unwrap(), f.monic());
    }

    #[test]
    fn signature_is_a_congruence_invariant(d in nonzero_diag(5), seed in any::<u64>()) {
        let g = Matrix::diag(&d.iter().map(|&e| rat(e)).collect::<Vec<_>>());
        let p = random_unimodular(d.len(), &mut ChaCha8Rng::seed_from_u64(seed));
        let h = &(&p.transpose() * &g) * &p;
        prop_assert_eq!(signature_of_gram(&h), signature_of_gram(&g));
    }

    #[test]
    fn disc_is_multiplicative(a in nonzero_diag(3), b in nonzero_diag(3)) {
        let (x, y) = (diag_space(&a), diag_space(&b));
        let s = x.direct_sum(&y);
        prop_assert_eq!(s.disc_sign().unwrap(), x.disc_sign().unwrap() * y.disc_sign().unwrap());
    }

    #[test]
    fn orthogonal_complement(d in nonzero_diag(5), cols in prop::collection::vec(prop::collection::vec(-2i64..=2, 5), 1..3)) {
        let v = diag_space(&d);
        let n = v.dim();
        let vecs: Vec<Vec<Rational>> = cols.iter().map(|c| c[..n].iter().map(|&x| rat(x)).collect()).collect();
        let s = Subspace::span(&Matrix::from_columns(n, &vecs));
        let perp = v.orthogonal_complement(&s);
        prop_assert_eq!(perp.dim() + s.dim(), n);
        prop_assert!(v.are_orthogonal(&s, &perp));
        prop_assert!(v.orthogonal_complement(&perp).same_as(&s));
        if v.is_nondegenerate_on(&s) {
            prop_assert!(s.sum(&perp).same_as(&Subspace::full(n)));
        }
    }

    #[test]
    fn det_and_theta_are_multiplicative(d in nonzero_diag(4), seed in any::<u64>(), ka in 1usize..4, kb in 1usize..4) {
        let v = diag_space(&d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, sa) = random_reflection_product(&v, &mut rng, ka);
        let (b, sb) = random_reflection_product(&v, &mut rng, kb);
        let theta = |s: &[Sign]| s.iter().fold(Sign::Plus, |acc, &x| acc * x);
        prop_assert_eq!(spinor_norm_wall(&a), theta(&sa));
        prop_assert_eq!(spinor_norm(&a, seed), theta(&sa));
        prop_assert_eq!(spinor_norm_wall(&b), theta(&sb));
        let ab = a.compose(&b);
        prop_assert_eq!(ab.det(), a.det() * b.det());
        prop_assert_eq!(spinor_norm_wall(&ab), spinor_norm_wall(&a) * spinor_norm_wall(&b));
    }

    #[test]
    fn commutators_lie_in_omega(d in nonzero_diag(4), seed in any::<u64>()) {
        let v = diag_space(&d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, _) = random_reflection_product(&v, &mut rng, 3);
        let (b, _) = random_reflection_product(&v, &mut rng, 2);
        let c = commutator(&a, &b);
        prop_assert_eq!(c.det(), Sign::Plus);
        prop_assert_eq!(spinor_norm_wall(&c), Sign::Plus);
    }

    #[test]
    fn profile_product_is_setwise(a in 0u8..16, b in 0u8..16) {
        let all = [(Sign::Plus, Sign::Plus), (Sign::Plus, Sign::Minus), (Sign::Minus, Sign::Plus), (Sign::Minus, Sign::Minus)];
        let pick = |m: u8| DetThetaProfile::from_pairs(&all.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, p)| *p).collect::<Vec<_>>());
        let (pa, pb) = (pick(a), pick(b));
        let prod = pa.product(&pb);
        for &(d, t) in &all {
            let expected = pa.pairs().iter().any(|&(d1, t1)| pb.pairs().iter().any(|&(d2, t2)| d1 * d2 == d && t1 * t2 == t));
            prop_assert_eq!(prod.contains(d, t), expected);
        }
    }
}

