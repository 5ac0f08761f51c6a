//! Hermite normal form of a sublattice basis and the covering map it describes.

use tptangle::io::json::hermite_to_json;
use tptangle::lattice::{hnf, IntMatrix3};

fn main() -> tptangle::Result<()> {
    let a = IntMatrix3::parse("2,1,0;0,3,1;1,0,1")?;
    let hd = hnf(&a)?;
    println!("H = {}", hd.h.to_text());
    println!("U = {}", hd.u.to_text());
    println!("sheets = {}", hd.sheets);
    println!("{}", hd.covering_map_text());
    print!("{}", hermite_to_json(&hd));
    Ok(())
}
