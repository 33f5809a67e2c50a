//! Domino tilings of the Aztec diamond: exact sampling by shuffling, frozen
//! regions and their TASEP description, and the limit-shape checks built on
//! top of them.

pub mod enumerate;
pub mod geometry;
pub mod shuffle;
pub mod tasep;
pub mod measures;
pub mod regions;
pub mod height;
