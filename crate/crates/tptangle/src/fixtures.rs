//! Built-in unit cells. The shipped files under `fixtures/` are generated from these.

use crate::exact::*;
use crate::lattice::IntMatrix3;
use crate::unit_cell::{apply_twist, rod_cell, translate, PLCurve, UnitCell};
use crate::diagram::{apply_move, Anchor, Axis, MoveDir, MoveKind, MoveSite, Orient, TorusDiagram};
use crate::projection::{tridiagram, ProjectionSpec};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureId {
    PiPlus,
    SigmaPlus,
    LayerPacking,
    LayerPackingTwisted,
    ZLine,
    HelixPack,
}

impl FixtureId {
    pub const ALL: [FixtureId; 6] = [
        FixtureId::PiPlus,
        FixtureId::SigmaPlus,
        FixtureId::LayerPacking,
        FixtureId::LayerPackingTwisted,
        FixtureId::ZLine,
        FixtureId::HelixPack,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FixtureId::PiPlus => "pi_plus",
            FixtureId::SigmaPlus => "sigma_plus",
            FixtureId::LayerPacking => "layer_packing",
            FixtureId::LayerPackingTwisted => "layer_packing_twisted",
            FixtureId::ZLine => "z_line",
            FixtureId::HelixPack => "helix_pack",
        }
    }

    pub fn parse(s: &str) -> Option<FixtureId> {
        FixtureId::ALL.into_iter().find(|f| f.name() == s)
    }

    pub fn cell(self) -> UnitCell {
        match self {
            FixtureId::PiPlus => pi_plus(),
            FixtureId::SigmaPlus => sigma_plus(),
            FixtureId::LayerPacking => layer_packing(),
            FixtureId::LayerPackingTwisted => layer_packing_twisted(),
            FixtureId::ZLine => z_line(),
            FixtureId::HelixPack => helix_pack(),
        }
    }
}

fn p3(x: Q, y: Q, z: Q) -> Q3 {
    [x, y, z]
}

/// Generic offset keeping rod vertices off the cube faces and away from each other's shadows.
fn generic() -> Q3 {
    p3(q(1, 16), q(3, 32), q(5, 64))
}

/// Cubic packing of rods along the three axes, two per direction.
pub fn pi_plus() -> UnitCell {
    let mut rods = Vec::new();
    for (a, b) in [(q(0, 1), q(1, 4)), (q(1, 2), q(3, 4))] {
        rods.push((p3(q(1, 3), a.clone(), b.clone()), [1, 0, 0]));
        rods.push((p3(b.clone(), q(1, 3), a.clone()), [0, 1, 0]));
        rods.push((p3(a, b, q(1, 3)), [0, 0, 1]));
    }
    translate(&rod_cell(&rods, q(1, 8)), &generic())
}

/// One rod along each of the four body diagonals.
pub fn sigma_plus() -> UnitCell {
    let h = q(1, 2);
    let z = zero();
    let rods = vec![
        (p3(z.clone(), z.clone(), z.clone()), [1, 1, 1]),
        (p3(h.clone(), z.clone(), z.clone()), [1, 1, -1]),
        (p3(z.clone(), z.clone(), h.clone()), [1, -1, 1]),
        (p3(z.clone(), h, z), [-1, 1, 1]),
    ];
    translate(&rod_cell(&rods, q(1, 8)), &generic())
}

/// An x-rod over a y-rod.
pub fn layer_packing() -> UnitCell {
    let rods = vec![(p3(q(1, 3), q(1, 2), q(1, 4)), [1, 0, 0]), (p3(q(1, 2), q(1, 3), q(3, 4)), [0, 1, 0])];
    rod_cell(&rods, q(1, 4))
}

/// The shear taking the layer packing to its twisted cell (`z += y` on homology).
pub fn layer_twist() -> IntMatrix3 {
    IntMatrix3::shear(6, -1)
}

/// Layer packing after a change of basis that tilts the y-rod to homology `(0,1,1)`.
pub fn layer_packing_twisted() -> UnitCell {
    apply_twist(&layer_packing(), &layer_twist()).expect("shear is unimodular")
}

pub fn z_line() -> UnitCell {
    rod_cell(&[(p3(q(1, 4), q(1, 4), q(1, 8)), [0, 0, 1])], q(1, 4))
}

/// Double helix along z: two square-section helices half a turn apart.
pub fn helix_pack() -> UnitCell {
    let r = q(3, 16);
    let c = [q(1, 2), q(1, 2)];
    let corners = [(1, 0), (0, 1), (-1, 0), (0, -1)];
    let strand = |phase: usize| -> PLCurve {
        let pts: Vec<Q3> = (0..=4)
            .map(|k| {
                let (dx, dy) = corners[(k + phase) % 4];
                p3(&c[0] + &r * qi(dx), &c[1] + &r * qi(dy), q(1, 8) + q(k as i64, 4))
            })
            .collect();
        PLCurve::from_lifted(&pts)
    };
    translate(&UnitCell::new(vec![strand(0), strand(2)], q(1, 8)), &p3(q(1, 32), q(1, 64), zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unit_cell::validate;

    #[test]
    fn fixtures_are_valid() {
        for f in FixtureId::ALL {
            assert!(validate(&f.cell()).is_valid(), "{}", f.name());
            assert_eq!(FixtureId::parse(f.name()), Some(f));
        }
    }

    #[test]
    fn pi_plus_components_are_axis_rods() {
        for h in pi_plus().homologies() {
            assert_eq!(h.iter().map(|x| x.abs()).sum::<i64>(), 1);
        }
    }

    #[test]
    fn twisted_layer_rod_homology() {
        let mut h = layer_packing_twisted().homologies();
        h.sort();
        assert_eq!(h, vec![[0, 1, 1], [1, 0, 0]]);
    }
}

/// Twenty laid-out diagrams: the three views of every fixture, plus two decorated layer diagrams.
pub fn diagram_corpus() -> Vec<TorusDiagram> {
    let mut out = Vec::new();
    for f in FixtureId::ALL {
        let t = tridiagram(&f.cell(), &ProjectionSpec::new(Axis::Z, Orient::Plus)).expect("fixtures project");
        out.extend(t.diagrams);
    }
    let layer = out[6 + 1].clone();
    let curl = MoveSite { kind: MoveKind::R1b, dir: MoveDir::Apply, anchor: Anchor::Curl { arc: (0, 0), left: false } };
    out.push(apply_move(&layer, &curl).expect("curl on a straight arc"));
    let pair = MoveSite { kind: MoveKind::R5a, dir: MoveDir::Apply, anchor: Anchor::NInsert { arc: (1, 0) } };
    out.push(apply_move(&layer, &pair).expect("N-pair on a straight arc"));
    out
}
