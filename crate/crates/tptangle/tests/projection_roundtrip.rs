use proptest::prelude::*;
use tptangle::diagram::{canonical_code, Axis, Orient};
use tptangle::fixtures::{diagram_corpus, FixtureId};
use tptangle::projection::{lift, make_regular, project, tridiagram, ProjectionSpec};
use tptangle::unit_cell::validate;

#[test]
fn corpus_survives_lift_and_project() {
    for (i, d) in diagram_corpus().iter().enumerate() {
        let cell = lift(d).unwrap();
        assert!(validate(&cell).is_valid(), "diagram {i}");
        let back = project(&cell, &ProjectionSpec::new(d.axis, d.orient)).unwrap();
        assert_eq!(canonical_code(&back), canonical_code(d), "diagram {i}");
    }
}

#[test]
fn fixture_views_carry_cell_homology() {
    for f in FixtureId::ALL {
        let cell = f.cell();
        let mut want = cell.homologies();
        want.sort();
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            for orient in [Orient::Plus, Orient::Minus] {
                let s = ProjectionSpec::new(axis, orient);
                let d = project(&make_regular(&cell, &s).unwrap(), &s).unwrap();
                let mut got = d.cell_homologies();
                got.sort();
                assert_eq!(got, want, "{} {axis:?} {orient:?}", f.name());
            }
        }
    }
}

fn small_fixture() -> impl Strategy<Value = FixtureId> {
    prop::sample::select(vec![FixtureId::PiPlus, FixtureId::LayerPacking, FixtureId::LayerPackingTwisted, FixtureId::ZLine])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn any_seed_gives_a_faithful_view(f in small_fixture(), seed in 0u64..1000, axis in 0usize..3) {
        let axis = [Axis::X, Axis::Y, Axis::Z][axis];
        let s = ProjectionSpec::new(axis, Orient::Plus).with_seed(seed);
        let cell = make_regular(&f.cell(), &s).unwrap();
        let d = project(&cell, &s).unwrap();
        let mut want = cell.homologies();
        want.sort();
        let mut got = d.cell_homologies();
        got.sort();
        prop_assert_eq!(got, want);
        let back = project(&lift(&d).unwrap(), &s).unwrap();
        prop_assert_eq!(canonical_code(&back), canonical_code(&d));
    }

    #[test]
    fn tridiagram_is_deterministic(f in small_fixture(), seed in 0u64..1000) {
        let s = ProjectionSpec::new(Axis::Z, Orient::Plus).with_seed(seed);
        let a = tridiagram(&f.cell(), &s).unwrap();
        let b = tridiagram(&f.cell(), &s).unwrap();
        for (x, y) in a.diagrams.iter().zip(&b.diagrams) {
            prop_assert_eq!(canonical_code(x), canonical_code(y));
        }
    }
}
