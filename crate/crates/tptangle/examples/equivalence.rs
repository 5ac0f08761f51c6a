//! Twists, covers and quotients of a cell.

use tptangle::exact::{q, zero};
use tptangle::fixtures::{layer_twist, FixtureId};
use tptangle::lattice::{hnf, IntMatrix3};
use tptangle::projection::{tridiagram, ProjectionSpec};
use tptangle::diagram::{Axis, Orient};
use tptangle::unit_cell::{apply_twist, cover, quotient, UnitCell};

fn triplet(c: &UnitCell) -> tptangle::Result<[usize; 3]> {
    Ok(tridiagram(c, &ProjectionSpec::new(Axis::Z, Orient::Plus))?.crossing_triplet())
}

fn main() -> tptangle::Result<()> {
    let layers = FixtureId::LayerPacking.cell();
    let twisted = apply_twist(&layers, &layer_twist())?;
    println!("layers {:?}, twisted {:?}", triplet(&layers)?, triplet(&twisted)?);

    let z = FixtureId::ZLine.cell();
    let double = cover(&z, &hnf(&IntMatrix3::diag(2, 1, 1))?);
    println!("double cover of the z line: {} components", double.components.len());
    let back = quotient(&double, &[q(1, 2), zero(), zero()], 2)?;
    println!("quotient back: {} component, homology {:?}", back.components.len(), back.homologies());
    Ok(())
}
