use super::*;
use crate::fixtures::FixtureId;
use crate::projection::{make_regular, project, ProjectionSpec};

fn view(f: FixtureId, axis: Axis) -> TorusDiagram {
    let s = ProjectionSpec::new(axis, Orient::Plus).with_seed(5);
    let c = make_regular(&f.cell(), &s).unwrap();
    project(&c, &s).unwrap()
}

fn check_round_trip(d: &TorusDiagram, site: &MoveSite) {
    let (e, inv) = apply_move_with_inverse(d, site).unwrap_or_else(|err| panic!("{site}: {err}"));
    assert_eq!(
        e.crossing_count() as i64 - d.crossing_count() as i64,
        site.kind.crossing_delta(site.dir),
        "{site}"
    );
    assert_eq!(e.sorted_homologies(), d.sorted_homologies(), "{site}");
    assert_eq!(e.component_count(), d.component_count(), "{site}");
    let back = apply_move(&e, &inv).unwrap_or_else(|err| panic!("{site} then {inv}: {err}"));
    assert_eq!(canonical_code(&back), canonical_code(d), "{site} then {inv}");
}

#[test]
fn empty_code() {
    assert_eq!(canonical_code(&TorusDiagram::empty(Axis::Z, Orient::Plus)), code::EMPTY_CODE);
}

#[test]
fn code_ignores_translation_and_relabelling() {
    let d = view(FixtureId::PiPlus, Axis::Z);
    let strands = d.strands().unwrap().to_vec();
    let moved = layout::translate(&strands, &[q(1, 3), q(2, 7)]);
    let moved = TorusDiagram::from_layout(d.axis, d.orient, layout::renormalize(moved).unwrap()).unwrap();
    assert_eq!(canonical_code(&moved), canonical_code(&d));
    let mut rev = strands.clone();
    rev.reverse();
    let rev: Vec<Strand> = rev.iter().map(|s| s.rotated(s.len() / 2)).collect();
    let r = TorusDiagram::from_layout(d.axis, d.orient, rev).unwrap();
    assert_eq!(canonical_code(&r), canonical_code(&d));
}

#[test]
fn code_distinguishes_layer_from_pi() {
    assert_ne!(canonical_code(&view(FixtureId::PiPlus, Axis::Z)), canonical_code(&view(FixtureId::LayerPacking, Axis::Z)));
}

#[test]
fn flip_twice_is_identity() {
    for f in [FixtureId::LayerPacking, FixtureId::PiPlus, FixtureId::HelixPack] {
        let d = view(f, Axis::Z);
        assert_eq!(canonical_code(&v_flip(&v_flip(&d))), canonical_code(&d));
        let mut comb = d.clone();
        comb.layout = None;
        assert_eq!(v_flip(&v_flip(&comb)), comb);
    }
}

#[test]
fn pi_plus_has_no_reducing_sites() {
    let d = view(FixtureId::PiPlus, Axis::Z);
    let sites = find_moves(&d);
    assert!(sites.iter().all(|s| s.kind.crossing_delta(s.dir) >= 0));
}

#[test]
fn layer_moves_round_trip() {
    let d = view(FixtureId::LayerPacking, Axis::Z);
    let sites = find_moves(&d);
    assert!(!sites.is_empty());
    for site in &sites {
        check_round_trip(&d, site);
    }
}

#[test]
fn curl_then_kink() {
    let d = view(FixtureId::LayerPacking, Axis::Z);
    let curl = MoveSite { kind: MoveKind::R1a, dir: MoveDir::Apply, anchor: Anchor::Curl { arc: (0, 0), left: true } };
    let e = apply_move(&d, &curl).unwrap();
    assert_eq!(e.crossing_count(), 2);
    let kinks: Vec<_> = find_moves(&e).into_iter().filter(|s| matches!(s.anchor, Anchor::Kink { .. })).collect();
    assert_eq!(kinks.len(), 1);
    let back = apply_move(&e, &kinks[0]).unwrap();
    assert_eq!(canonical_code(&back), canonical_code(&d));
}

#[test]
fn n_pair_round_trip() {
    let d = view(FixtureId::LayerPacking, Axis::Z);
    let ins = MoveSite { kind: MoveKind::R5a, dir: MoveDir::Apply, anchor: Anchor::NInsert { arc: (0, 0) } };
    let e = apply_move(&d, &ins).unwrap();
    assert_eq!(e.n_count(), 2);
    assert_eq!(e.sorted_homologies(), d.sorted_homologies());
    let pairs: Vec<_> = find_moves(&e).into_iter().filter(|s| matches!(s.anchor, Anchor::NPair { .. })).collect();
    assert_eq!(pairs.len(), 1);
    assert_eq!(canonical_code(&apply_move(&e, &pairs[0]).unwrap()), canonical_code(&d));
}

#[test]
fn twist_maps_homology() {
    let d = view(FixtureId::LayerPacking, Axis::Z);
    for (k, sign) in [(Twist2::Psi1, 1), (Twist2::Psi1, -1), (Twist2::Psi2, 1)] {
        let t = twist2(&d, k, sign).unwrap();
        assert_eq!(t.crossing_count(), d.crossing_count());
        let m = k.matrix(sign);
        let mut want: Vec<[i64; 3]> = d
            .homologies()
            .iter()
            .map(|h| [m[0][0] * h[0] + m[0][1] * h[1], m[1][0] * h[0] + m[1][1] * h[1], h[2]])
            .collect();
        want.sort();
        assert_eq!(t.sorted_homologies(), want);
        let back = twist2(&t, k, -sign).unwrap();
        assert_eq!(canonical_code(&back), canonical_code(&d));
    }
}

#[test]
fn psi1_on_vertical_class() {
    assert_eq!(Twist2::Psi1.matrix(1), [[1, 1], [0, 1]]);
    let m = Twist2::Psi1.matrix(1);
    assert_eq!([m[0][0] * 0 + m[0][1], m[1][0] * 0 + m[1][1]], [1, 1]);
}

#[test]
fn cover_multiplies_crossings() {
    let d = view(FixtureId::PiPlus, Axis::Z);
    let c = cover2(&d, &Hnf2::new(2, 0, 2).unwrap()).unwrap();
    assert_eq!(c.crossing_count(), 16);
    for h in [Hnf2::new(2, 0, 1).unwrap(), Hnf2::new(1, 0, 3).unwrap(), Hnf2::new(2, 1, 2).unwrap()] {
        let c = cover2(&d, &h).unwrap();
        assert_eq!(c.crossing_count() as i64, d.crossing_count() as i64 * h.sheets());
        assert_eq!(c.n_count() as i64, d.n_count() as i64 * h.sheets());
    }
}
