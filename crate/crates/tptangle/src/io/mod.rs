//! File formats and rendering.

pub mod json;
pub mod svg;
