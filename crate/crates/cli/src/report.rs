//! Frozen-region summary of a single tiling.

use aztec_core::geometry::{Heading, Tiling};
use aztec_core::regions::{circle_deviation, ellipse_deviation, frozen_regions};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FrozenCounts {
    pub north: usize,
    pub south: usize,
    pub east: usize,
    pub west: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionsReport {
    pub order: u32,
    pub bias: f64,
    pub dominoes: usize,
    /// Dominoes in each frozen region.
    pub frozen: FrozenCounts,
    pub temperate_dominoes: usize,
    /// Temperate area in unit cells.
    pub temperate_area: usize,
    pub circle_deviation: Option<f64>,
    pub ellipse_deviation: Option<f64>,
    /// The ellipse for bias above one half has only been checked numerically
    /// against samples, not proved.
    pub ellipse_conjectural: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

pub fn regions_report(t: &Tiling, bias: f64) -> RegionsReport {
    let regions = frozen_regions(t);
    let temperate = regions.temperate_count();
    let mut errors = Vec::new();
    let circle = circle_deviation(t)
        .map_err(|e| errors.push(format!("circle_deviation: {e}")))
        .ok();
    let ellipse = ellipse_deviation(t, bias)
        .map_err(|e| errors.push(format!("ellipse_deviation: {e}")))
        .ok();
    RegionsReport {
        order: t.order(),
        bias,
        dominoes: t.len(),
        frozen: FrozenCounts {
            north: regions.count(Heading::North),
            south: regions.count(Heading::South),
            east: regions.count(Heading::East),
            west: regions.count(Heading::West),
        },
        temperate_dominoes: temperate,
        temperate_area: 2 * temperate,
        circle_deviation: circle,
        ellipse_deviation: ellipse,
        ellipse_conjectural: bias > 0.5,
        errors,
    }
}
