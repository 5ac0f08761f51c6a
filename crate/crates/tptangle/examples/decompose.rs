//! Writes a determinant-1 integer matrix as a word in the six shear generators.

use tptangle::lattice::{decompose_sl3, recompose, IntMatrix3};

fn main() -> tptangle::Result<()> {
    let m = IntMatrix3::parse("1,2,0;0,1,0;3,6,1")?;
    let w = decompose_sl3(&m)?;
    println!("word: {}", w.to_text());
    assert_eq!(recompose(&w), m);
    println!("recomposes to {}", recompose(&w).to_text());
    Ok(())
}
