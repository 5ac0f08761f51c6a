//! Writes the tridiagram of a built-in cell as SVG to stdout.

use tptangle::diagram::{Axis, Orient};
use tptangle::fixtures::FixtureId;
use tptangle::io::svg::{render_tridiagram, RenderStyle};
use tptangle::projection::{tridiagram, ProjectionSpec};

fn main() -> tptangle::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "pi_plus".into());
    let f = FixtureId::parse(&name).unwrap_or(FixtureId::PiPlus);
    let t = tridiagram(&f.cell(), &ProjectionSpec::new(Axis::Z, Orient::Plus))?;
    print!("{}", render_tridiagram(&t, &RenderStyle::default())?);
    Ok(())
}
