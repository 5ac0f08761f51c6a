use num_traits::ToPrimitive;
use proptest::prelude::*;
use tptangle::diagram::{canonical_code, cover2, twist2, Axis, Orient, Twist2};
use tptangle::exact::{q, Q3};
use tptangle::fixtures::{diagram_corpus, FixtureId};
use tptangle::lattice::{hnf, Hnf2, IntMatrix3, RationalBasis3};
use tptangle::projection::{tridiagram, ProjectionSpec};
use tptangle::unit_cell::{cover, quotient, UnitCell};

fn codes(cell: &UnitCell) -> Vec<String> {
    tridiagram(cell, &ProjectionSpec::new(Axis::Z, Orient::Plus)).unwrap().diagrams.iter().map(canonical_code).collect()
}

/// A deck translation generating the whole (cyclic) deck group, with its order.
fn deck_generator(h: &IntMatrix3, sheets: u32) -> Option<(Q3, u32)> {
    let basis = RationalBasis3::from_int(h);
    for j in 0..3 {
        let mut e: Q3 = std::array::from_fn(|_| q(0, 1));
        e[j] = q(1, 1);
        let t = basis.coordinates_of(&e)?;
        let order = t.iter().map(|x| x.denom().to_u32().unwrap()).fold(1, num_integer::lcm);
        if order == sheets {
            return Some((t, order));
        }
    }
    None
}

#[test]
fn cover_then_quotient_restores_the_tridiagram() {
    let covers = [
        IntMatrix3::diag(2, 1, 1),
        IntMatrix3::diag(1, 1, 3),
        IntMatrix3::from_i64([[2, 0, 0], [1, 1, 0], [0, 0, 1]]),
        IntMatrix3::from_i64([[1, 0, 0], [0, 2, 0], [0, 1, 1]]),
    ];
    for f in [FixtureId::PiPlus, FixtureId::LayerPacking, FixtureId::ZLine, FixtureId::HelixPack] {
        let cell = f.cell();
        let want = codes(&cell);
        for m in &covers {
            let hd = hnf(m).unwrap();
            let sheets = hd.sheets.to_u32().unwrap();
            let up = cover(&cell, &hd);
            let (t, n) = deck_generator(&hd.h, sheets).expect("cyclic deck group");
            let down = quotient(&up, &t, n).unwrap();
            assert_eq!(codes(&down), want, "{} under {}", f.name(), m.to_text());
        }
    }
}

#[test]
fn twists_keep_crossings_and_map_homology() {
    for (i, d) in diagram_corpus().iter().enumerate() {
        for k in [Twist2::Psi1, Twist2::Psi2] {
            for sign in [1, -1] {
                let t = twist2(d, k, sign).unwrap();
                assert_eq!(t.crossing_count(), d.crossing_count(), "diagram {i}");
                let m = k.matrix(sign);
                let mut want: Vec<[i64; 3]> = d
                    .homologies()
                    .iter()
                    .map(|h| [m[0][0] * h[0] + m[0][1] * h[1], m[1][0] * h[0] + m[1][1] * h[1], h[2]])
                    .collect();
                want.sort();
                assert_eq!(t.sorted_homologies(), want, "diagram {i}");
                assert_eq!(canonical_code(&twist2(&t, k, -sign).unwrap()), canonical_code(d), "diagram {i}");
            }
        }
    }
}

fn hnf2() -> impl Strategy<Value = Hnf2> {
    (1i64..=3, 1i64..=3).prop_flat_map(|(a, c)| (Just(a), 0..c, Just(c))).prop_map(|(a, b, c)| Hnf2::new(a, b, c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn covers_multiply_crossings(pick in 0usize..20, h in hnf2()) {
        let d = &diagram_corpus()[pick];
        let c = cover2(d, &h).unwrap();
        prop_assert_eq!(c.crossing_count() as i64, d.crossing_count() as i64 * h.sheets());
        prop_assert_eq!(c.n_count() as i64, d.n_count() as i64 * h.sheets());
    }
}
