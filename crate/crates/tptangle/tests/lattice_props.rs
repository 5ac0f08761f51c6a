mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use std::time::Instant;
use tptangle::lattice::{decompose_sl3, hnf, lattice_join, recompose, RationalBasis3, ShearWord};

#[test]
fn hnf_matches_oracle_on_seeded_matrices() {
    let mut r = rng(20);
    let start = Instant::now();
    for _ in 0..200 {
        let a = random_nonsingular(&mut r);
        let hd = hnf(&to_int(&a)).unwrap();
        assert!(hermite_invariants_hold(&a, &hd), "{a:?}");
        assert_eq!(to_m3(&hd.h), oracle_hnf(&a), "{a:?}");
    }
    assert!(start.elapsed().as_secs_f64() < 1.0, "took {:?}", start.elapsed());
}

#[test]
fn decompose_recomposes_seeded_words() {
    let mut r = rng(30);
    for _ in 0..100 {
        let n = r.gen_range(0..=12);
        let w = ShearWord::new((0..n).map(|_| (r.gen_range(1..=6), if r.gen_bool(0.5) { 1 } else { -1 })).collect());
        let m = recompose(&w);
        assert_eq!(recompose(&decompose_sl3(&m).unwrap()), m, "{}", w.to_text());
    }
}

fn matrix() -> impl Strategy<Value = M3> {
    prop::array::uniform3(prop::array::uniform3(-9i128..=9)).prop_filter("nonsingular", |m| det(m) != 0)
}

fn word() -> impl Strategy<Value = ShearWord> {
    prop::collection::vec((1u8..=6, prop_oneof![Just(-1i64), Just(1i64), -3i64..=3]), 0..16)
        .prop_map(|l| ShearWord::new(l.into_iter().filter(|&(_, e)| e != 0).collect()))
}

proptest! {
    #[test]
    fn hnf_invariants(a in matrix()) {
        let hd = hnf(&to_int(&a)).unwrap();
        prop_assert!(hermite_invariants_hold(&a, &hd));
        prop_assert_eq!(to_m3(&hd.h), oracle_hnf(&a));
    }

    #[test]
    fn hnf_ignores_right_unimodular_factor(a in matrix(), w in word()) {
        let u = to_m3(&recompose(&w));
        let au = mul(&a, &u);
        prop_assert_eq!(hnf(&to_int(&au)).unwrap().h, hnf(&to_int(&a)).unwrap().h);
    }

    #[test]
    fn decompose_is_sound(w in word()) {
        let m = recompose(&w);
        let d = decompose_sl3(&m).unwrap();
        prop_assert_eq!(recompose(&d), m);
        prop_assert!(d.letters.iter().all(|&(g, e)| (1..=6).contains(&g) && e != 0));
    }

    #[test]
    fn word_text_round_trips(w in word()) {
        prop_assert_eq!(ShearWord::parse(&w.to_text()).unwrap(), w);
    }

    #[test]
    fn join_with_a_sublattice_is_the_superlattice(a in matrix()) {
        let a = if det(&a) < 0 { a.map(|r| [-r[0], r[1], r[2]]) } else { a };
        let sup = RationalBasis3::standard();
        let j = lattice_join(&sup, &RationalBasis3::from_int(&to_int(&a))).unwrap();
        prop_assert_eq!(j.det(), sup.det());
    }
}
