mod common;

use common::*;
use jackvertex::exactscalar::{int, rat, Coeff, RatFn};
use jackvertex::partitions::{partitions_cached, Partition};
use jackvertex::symfunc::{Basis, SymFunc, SymRing};
use num_traits::{One, Zero};
use proptest::prelude::*;

#[test]
fn jack_p_matches_gram_schmidt() {
    for alpha in [int(1), int(2), rat(1, 2), rat(3, 7)] {
        let ring = SymRing::at(alpha.clone()).unwrap();
        for weight in 0..=6 {
            for (lambda, expected) in gram_schmidt_jack_p(&ring, weight) {
                let got = ring
                    .to_power_sum(&SymFunc::basis_element(Basis::JackP, lambda.clone()))
                    .unwrap();
                assert!(got.sub(&expected).unwrap().is_zero(), "α={alpha} λ={lambda}");
            }
        }
    }
}

#[test]
fn jack_p_at_one_is_schur() {
    let ring = SymRing::at(int(1)).unwrap();
    for weight in 0..=6 {
        for lambda in partitions_cached(weight).iter() {
            let got = ring
                .to_power_sum(&SymFunc::basis_element(Basis::JackP, lambda.clone()))
                .unwrap();
            assert!(got.sub(&schur_jacobi_trudi(lambda)).unwrap().is_zero(), "λ={lambda}");
        }
    }
}

#[test]
fn known_two_box_jacks() {
    // P_2 = m_2 + 2α/(1+α) m_11 under ⟨p_λ, p_λ⟩ = α^{-l} z_λ.
    let ring = SymRing::symbolic();
    let c = ring.jack_p(&p("2")).unwrap().coeff(&p("1,1"));
    let a = RatFn::alpha();
    assert_eq!(c, (a.clone() + a.clone()).checked_div(&(a + RatFn::one())).unwrap());
    assert_eq!(c.to_string(), "(2*a)/(1 + a)");
}

#[test]
fn symbolic_specializes_to_numeric() {
    let sym = SymRing::symbolic();
    for x in [int(1), int(3), rat(2, 5)] {
        let num = SymRing::at(x.clone()).unwrap();
        for lambda in partitions_cached(5).iter() {
            let s = sym.jack_q(lambda).unwrap().specialize(&x).unwrap();
            assert_eq!(s, num.jack_q(lambda).unwrap(), "α={x} λ={lambda}");
        }
    }
}

#[test]
fn triangular_pair_symbolic_through_weight_six() {
    let ring = SymRing::symbolic();
    for n in 0..=6 {
        let up = ring.transition_matrix(n, Basis::GenHomogeneous, Basis::JackQ).unwrap();
        let down = ring.transition_matrix(n, Basis::JackQ, Basis::GenHomogeneous).unwrap();
        let pm = ring.transition_matrix(n, Basis::JackP, Basis::Monomial).unwrap();
        assert!(up.is_upper_in_dominance() && up.has_unit_diagonal());
        assert!(pm.is_lower_in_dominance() && pm.has_unit_diagonal());
        assert!(up.compose(&down).unwrap().is_identity());
        assert_eq!(up.entries(), pm.transpose().entries());
    }
}

#[test]
fn symfunc_json_shape() {
    let ring = SymRing::symbolic();
    let f = ring.jack_p(&p("2")).unwrap();
    let v = serde_json::to_value(&f).unwrap();
    assert_eq!(v["basis"], "monomial");
    assert_eq!(v["terms"][0]["coeff"], "1");
    let back: SymFunc<RatFn> = serde_json::from_value(v).unwrap();
    assert_eq!(back, f);
    let dup = serde_json::json!({"basis": "powerSum", "terms": [
        {"partition": [1], "coeff": "1"}, {"partition": [1], "coeff": "2"}]});
    assert!(serde_json::from_value::<SymFunc<RatFn>>(dup).is_err());
}

fn arb_partition(max_weight: u32) -> impl Strategy<Value = Partition> {
    (0..=max_weight).prop_flat_map(|n| {
        let parts = partitions_cached(n);
        (0..parts.len()).prop_map(move |i| parts[i].clone())
    })
}

fn arb_alpha() -> impl Strategy<Value = num_rational::BigRational> {
    (1i64..6, 1i64..6).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jack_p_orthogonal_and_dual(alpha in arb_alpha(), a in arb_partition(6), b in arb_partition(6)) {
        let ring = SymRing::at(alpha).unwrap();
        let pa = SymFunc::basis_element(Basis::JackP, a.clone());
        let qb = SymFunc::basis_element(Basis::JackQ, b.clone());
        let v = ring.inner_product(&pa, &qb).unwrap();
        prop_assert_eq!(v.is_one(), a == b);
        prop_assert_eq!(v.is_zero(), a != b);
    }

    #[test]
    fn q_and_m_are_dual(alpha in arb_alpha(), a in arb_partition(6), b in arb_partition(6)) {
        let ring = SymRing::at(alpha).unwrap();
        let v = ring.inner_product(&ring.q_product(&a), &SymFunc::basis_element(Basis::Monomial, b.clone())).unwrap();
        prop_assert_eq!(v, if a == b { int(1) } else { int(0) });
    }

    #[test]
    fn conversions_round_trip(alpha in arb_alpha(), a in arb_partition(5)) {
        let ring = SymRing::at(alpha).unwrap();
        let f = SymFunc::basis_element(Basis::Monomial, a);
        for basis in Basis::ALL {
            let there = ring.to_basis(&f, basis).unwrap();
            let back = ring.to_basis(&there, Basis::Monomial).unwrap();
            prop_assert_eq!(&back, &f);
        }
    }

    #[test]
    fn jack_p_is_monic_and_dominance_lower(alpha in arb_alpha(), a in arb_partition(6)) {
        let ring = SymRing::at(alpha).unwrap();
        let f = ring.jack_p(&a).unwrap();
        prop_assert!(f.coeff(&a).is_one());
        for (mu, c) in f.terms() {
            prop_assert!(c.is_zero() || a.dominates(mu));
        }
    }
}
