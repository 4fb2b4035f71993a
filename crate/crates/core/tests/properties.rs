//! Property tests across the layers.

use proptest::prelude::*;

use drinfeld_core::coeff::Mode;
use drinfeld_core::dims;
use drinfeld_core::fq::{gf_q, prime_power};
use drinfeld_core::goss::{goss, MPoly};
use drinfeld_core::hecke::{check_local, DEFAULT_BUDGET};
use drinfeld_core::poly::{Poly, RatF};
use drinfeld_core::ring::{self, Group, RingCtx, RingElement};
use drinfeld_core::tail::{tail_ctx, Tail};

fn q_strategy() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 4, 5, 7, 8, 9])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(q in q_strategy(), a in 0u32..9, b in 0u32..9, c in 0u32..9) {
        let f = gf_q(q).unwrap();
        let (a, b, c) = (a % q, b % q, c % q);
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            prop_assert_eq!(f.pow(a, q as u64 - 1), 1);
        }
        // Frobenius is additive
        let p = f.p() as u64;
        prop_assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
    }

    #[test]
    fn polynomial_division(q in prop::sample::select(vec![2u32, 3, 4]), a in prop::collection::vec(0u32..4, 0..8), b in prop::collection::vec(0u32..4, 1..5)) {
        let f = gf_q(q).unwrap();
        let a = Poly::new(&f, a.into_iter().map(|x| x % q).collect());
        let b = Poly::new(&f, b.into_iter().map(|x| x % q).collect());
        prop_assume!(!b.is_zero());
        let (quo, rem) = a.divmod(&b).unwrap();
        prop_assert_eq!(&(&quo * &b) + &rem, a.clone());
        prop_assert!(rem.degree() < b.degree());
        let g = a.gcd(&b);
        prop_assert!(g.divides(&a) && g.divides(&b));
        // rendering parses back
        prop_assert_eq!(RatF::parse(&f, &a.to_string()).unwrap(), RatF::from_poly(a));
    }

    #[test]
    fn tail_ring_laws(q in prop::sample::select(vec![2u32, 3]), xs in prop::collection::vec((0u32..3, -6i128..6), 1..5), ys in prop::collection::vec((0u32..3, -6i128..6), 1..5)) {
        let ctx = tail_ctx(q, 1).unwrap();
        let build = |v: &[(u32, i128)]| v.iter().fold(Tail::zero(&ctx), |s, &(c, n)| s.add(&Tail::monomial(&ctx, c % q, 2, n)));
        let (x, y) = (build(&xs), build(&ys));
        prop_assert!(x.mul(&y).sub(&y.mul(&x)).is_zero());
        prop_assert!(x.add(&y).frob().sub(&x.frob().add(&y.frob())).is_zero());
        prop_assert!(x.mul(&y).frob().sub(&x.frob().mul(&y.frob())).is_zero());
        if !x.is_zero() {
            // x·x⁻¹ = 1 to the working precision of the inverse
            let d = x.mul(&x.inv_to(40).unwrap()).sub(&Tail::one(&ctx));
            prop_assert!(d.norm_exp().is_none());
        }
    }

    #[test]
    fn goss_identities(q in prop::sample::select(vec![2u32, 3, 4]), k in 1usize..40) {
        let p = prime_power(q).unwrap().0;
        let x = MPoly::x(p);
        let lhs = x.pow(2).mul(&goss(k, q).unwrap().deriv_x());
        prop_assert_eq!(lhs, goss(k + 1, q).unwrap().scale(k as u32 % p));
        if k <= 15 {
            prop_assert_eq!(goss(p as usize * k, q).unwrap(), std::sync::Arc::new(goss(k, q).unwrap().pow(p as u64)));
        }
        prop_assert_eq!(goss(k, q).unwrap().deg_x(), Some(k as u32));
    }

    #[test]
    fn dimension_recurrences(r in 2usize..6, k in 0u64..30) {
        // adding a variable: C(k+r−1, r−1) = Σ_{j≤k} C(j+r−2, r−2)
        let lhs = dims::dim_gamma1_t(r, k).unwrap();
        let rhs: u128 = (0..=k).map(|j| dims::dim_gamma1_t(r - 1, j).unwrap()).sum();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(dims::binomial(k + 5, 5).unwrap(), dims::binomial(k + 5, k).unwrap());
    }

    #[test]
    fn type_dims_are_bounded(q in prop::sample::select(vec![3u64, 4, 5]), r in 2usize..4, k in 0u64..40) {
        // P_S(k) counts the type-0 part; all type dims are at most the level-t slice
        let slice = dims::dim_gamma_t(q, r, k).unwrap();
        let total: u128 = (0..q - 1).map(|m| dims::dim_type_m(q, r, k, m).unwrap()).sum();
        prop_assert!(total <= slice);
        prop_assert_eq!(dims::dim_type_m(q, r, k, 0).unwrap(), dims::partitions_ps(q, r, k).unwrap());
    }
}

fn small_element(ctx: &std::sync::Arc<RingCtx>, terms: &[(usize, usize, u32)]) -> RingElement {
    let q = ctx.q;
    let n = ctx.nvars();
    terms.iter().fold(RingElement::zero(ctx), |s, &(i, j, c)| {
        let m = RingElement::var(ctx, i % n).mul(&RingElement::var(ctx, j % n));
        let c = drinfeld_core::coeff::K0::constant(&ctx.f, ctx.mode, c % q);
        s.add(&m.scale(&c))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ring_laws_in_normal_form(
        q in prop::sample::select(vec![2u32, 3]),
        a in prop::collection::vec((0usize..4, 0usize..4, 1u32..3), 1..4),
        b in prop::collection::vec((0usize..4, 0usize..4, 1u32..3), 1..4),
        gi in 0usize..16,
    ) {
        let ctx = RingCtx::new(q, 2, Mode::Extended, 50_000).unwrap();
        let (x, y) = (small_element(&ctx, &a), small_element(&ctx, &b));
        prop_assert!(x.mul(&y).equals(&y.mul(&x)).unwrap());
        prop_assert!(x.mul(&y).frob().equals(&x.frob().mul(&y.frob())).unwrap());
        let gens = ring::generators(&ctx.f, 2, Group::Gl);
        let g = &gens[gi % gens.len()];
        // the action is a ring homomorphism and respects the relations
        prop_assert!(x.mul(&y).act(g).equals(&x.act(g).mul(&y.act(g))).unwrap());
        let reduced = x.reduced().unwrap();
        prop_assert!(reduced.equals(&x).unwrap());
        prop_assert!(reduced.act(g).equals(&x.act(g)).unwrap());
    }

    #[test]
    fn local_counts_match_prediction(q in prop::sample::select(vec![2u32, 3]), m1 in 0usize..3, pi_plus_one in any::<bool>()) {
        let f = gf_q(q).unwrap();
        let pi = if pi_plus_one { RatF::parse(&f, "t+1").unwrap() } else { RatF::parse(&f, "t").unwrap() };
        let rep = check_local(q, pi.as_poly().unwrap(), &[m1, 0], DEFAULT_BUDGET).unwrap();
        prop_assert!(rep.pass(), "{}", rep.to_json());
    }
}
