//! Command-line surface for the `aztec` binary: the JSON tiling document,
//! SVG rendering, the regions report and the verification suites.

pub mod commands;
pub mod document;
pub mod render;
pub mod report;
pub mod verify;
