//! Adds a kink and a bigon to a one-crossing diagram and lets the search remove them.

use tptangle::diagram::{apply_move, find_moves, Anchor, MoveDir, MoveKind, MoveSite};
use tptangle::diagram::{Axis, Orient};
use tptangle::fixtures::FixtureId;
use tptangle::projection::{project, ProjectionSpec};
use tptangle::search::{simplify_diagram, SearchConfig};

fn main() -> tptangle::Result<()> {
    let d = project(&FixtureId::LayerPacking.cell(), &ProjectionSpec::new(Axis::Z, Orient::Plus))?;
    let curl = MoveSite { kind: MoveKind::R1a, dir: MoveDir::Apply, anchor: Anchor::Curl { arc: (0, 0), left: true } };
    let d = apply_move(&d, &curl)?;
    let finger = find_moves(&d).into_iter().find(|s| s.kind == MoveKind::R2 && s.dir == MoveDir::Apply).expect("a finger site");
    let d = apply_move(&d, &finger)?;
    println!("start: {} crossings", d.crossing_count());
    let r = simplify_diagram(&d, &SearchConfig::default())?;
    println!("after {} states: {} crossings", r.states, r.diagram.crossing_count());
    for m in &r.moves {
        println!("  {m}");
    }
    Ok(())
}
