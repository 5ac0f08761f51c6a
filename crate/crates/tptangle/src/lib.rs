pub mod cli;
pub mod diagram;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod geom;
pub mod io;
pub mod lattice;
pub mod projection;
pub mod search;
pub mod unit_cell;

pub use error::{Error, Result};
