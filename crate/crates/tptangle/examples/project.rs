//! Regular projection of a built-in cell along each axis.

use tptangle::diagram::{canonical_code, Axis, Orient};
use tptangle::fixtures::FixtureId;
use tptangle::projection::{make_regular, project, ProjectionSpec};

fn main() -> tptangle::Result<()> {
    let cell = FixtureId::PiPlus.cell();
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        let spec = ProjectionSpec::new(axis, Orient::Plus).with_seed(3);
        let d = project(&make_regular(&cell, &spec)?, &spec)?;
        println!("{}: {} crossings, {} N-points", axis.name(), d.crossing_count(), d.n_count());
        println!("  {}", canonical_code(&d));
    }
    Ok(())
}
