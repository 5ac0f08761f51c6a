//! Front, top and right views of every built-in cell.

use tptangle::diagram::{Axis, Orient};
use tptangle::fixtures::FixtureId;
use tptangle::projection::{tridiagram, ProjectionSpec};

fn main() -> tptangle::Result<()> {
    for f in FixtureId::ALL {
        let t = tridiagram(&f.cell(), &ProjectionSpec::new(Axis::Z, Orient::Plus))?;
        println!("{:<22} crossings {:?}  N-points {:?}", f.name(), t.crossing_triplet(), t.n_triplet());
    }
    Ok(())
}
