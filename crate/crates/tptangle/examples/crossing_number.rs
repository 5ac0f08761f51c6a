//! Crossing-number upper bounds, including one found only after an untwisting.

use tptangle::fixtures::FixtureId;
use tptangle::io::json::result_to_json;
use tptangle::search::{tp_crossing_number, SearchConfig};

fn main() -> tptangle::Result<()> {
    for f in [FixtureId::PiPlus, FixtureId::LayerPacking, FixtureId::HelixPack] {
        let r = tp_crossing_number(&f.cell(), &SearchConfig::default())?;
        println!("{:<14} {:?} score {} ({})", f.name(), r.triplet, r.score, r.status());
    }
    let cfg = SearchConfig { twist_word_length: 1, ..SearchConfig::default() };
    let r = tp_crossing_number(&FixtureId::LayerPackingTwisted.cell(), &cfg)?;
    print!("{}", result_to_json(&r, None));
    Ok(())
}
