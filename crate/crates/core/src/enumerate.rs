//! Exhaustive enumeration of small Aztec diamond tilings and the
//! chi-square harness that checks shuffling against them.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::geometry::{cells_of_order, Cell, Domino, PartialTiling, Tiling};
use crate::shuffle::{check_bias, generate, ShuffleError};

/// Largest order the enumerator accepts (1024 tilings).
pub const MAX_ENUMERATION_ORDER: u32 = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnumerateError {
    #[error("order {0} exceeds the enumeration cap of {MAX_ENUMERATION_ORDER}")]
    OrderTooLarge(u32),
    #[error("{samples} samples is below 100 per tiling ({cells} tilings)")]
    TooFewSamples { samples: usize, cells: usize },
    #[error(transparent)]
    Shuffle(#[from] ShuffleError),
}

/// Every tiling of one order, in canonical form.
#[derive(Debug, Clone)]
pub struct TilingCensus {
    pub order: u32,
    pub tilings: Vec<Tiling>,
    /// Number of tilings with `2k` horizontal dominoes, keyed by `k`.
    pub horizontal_histogram: BTreeMap<usize, usize>,
}

impl TilingCensus {
    /// Position of each tiling keyed by its canonical domino list.
    pub fn index(&self) -> HashMap<Vec<Domino>, usize> {
        self.tilings
            .iter()
            .enumerate()
            .map(|(i, t)| (t.canonical(), i))
            .collect()
    }
}

/// Depth-first fill of the diamond: the first uncovered cell in row-major
/// order (top row first) is covered by a horizontal domino reaching right or
/// a vertical domino reaching down.
pub fn enumerate_tilings(n: u32) -> Result<TilingCensus, EnumerateError> {
    if n > MAX_ENUMERATION_ORDER {
        return Err(EnumerateError::OrderTooLarge(n));
    }
    let order = cells_of_order(n);
    let mut found = Vec::new();
    let mut pt = PartialTiling::empty(n);
    let mut stack = Vec::new();
    fill(&order, 0, &mut pt, &mut stack, &mut found);

    let mut tilings: Vec<Tiling> = found
        .into_iter()
        .map(|mut ds: Vec<Domino>| {
            ds.sort_unstable();
            Tiling::new(n, ds).expect("enumerated tilings are complete")
        })
        .collect();
    tilings.sort_by_key(|t| t.canonical());
    let mut horizontal_histogram = BTreeMap::new();
    for t in &tilings {
        *horizontal_histogram.entry(t.horizontal_count() / 2).or_insert(0) += 1;
    }
    Ok(TilingCensus {
        order: n,
        tilings,
        horizontal_histogram,
    })
}

fn fill(
    order: &[Cell],
    mut pos: usize,
    pt: &mut PartialTiling,
    stack: &mut Vec<Domino>,
    found: &mut Vec<Vec<Domino>>,
) {
    while pos < order.len() && pt.is_covered(order[pos]) {
        pos += 1;
    }
    let Some(&c) = order.get(pos) else {
        found.push(stack.clone());
        return;
    };
    for d in [Domino::horizontal(c.x, c.y), Domino::vertical(c.x, c.y - 1)] {
        let mut trial = pt.clone();
        if trial.insert(d).is_ok() {
            stack.push(d);
            fill(order, pos + 1, &mut trial, stack, found);
            stack.pop();
        }
    }
}

/// `2^(n(n+1)/2)` as a float; exact for every order the suites use.
pub fn tiling_count(n: u32) -> f64 {
    2f64.powi((n * (n + 1) / 2) as i32)
}

/// Gibbs weight `p^k (1-p)^(N-k)` of a tiling with `2k` horizontal
/// dominoes, `N = n(n+1)/2`.
pub fn gibbs_weight(t: &Tiling, p: f64) -> f64 {
    let n = t.order();
    let pairs = (n * (n + 1) / 2) as i32;
    let k = (t.horizontal_count() / 2) as i32;
    p.powi(k) * (1.0 - p).powi(pairs - k)
}

#[derive(Debug, Clone)]
pub struct ChiSquareReport {
    pub order: u32,
    pub bias: f64,
    pub samples: usize,
    pub counts: Vec<usize>,
    pub expected: Vec<f64>,
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Samples `samples` tilings by shuffling (replica `i` seeded `seed + i`),
/// bins them by canonical form and compares against the Gibbs law
/// `p^k (1-p)^(N-k)`, which is uniform at `p = 1/2`.
pub fn uniformity_test(n: u32, samples: usize, seed: u64, p: f64) -> Result<ChiSquareReport, EnumerateError> {
    check_bias(p)?;
    let census = enumerate_tilings(n)?;
    let cells = census.tilings.len();
    if samples < 100 * cells {
        return Err(EnumerateError::TooFewSamples { samples, cells });
    }
    let index = census.index();
    let draws: Vec<usize> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let t = generate(n, p, seed.wrapping_add(i))?;
            Ok(index[&t.canonical()])
        })
        .collect::<Result<_, ShuffleError>>()?;
    let mut counts = vec![0usize; cells];
    for i in draws {
        counts[i] += 1;
    }
    let expected: Vec<f64> = census
        .tilings
        .iter()
        .map(|t| gibbs_weight(t, p) * samples as f64)
        .collect();
    Ok(chi_square(n, p, samples, counts, expected))
}

fn chi_square(order: u32, bias: f64, samples: usize, counts: Vec<usize>, expected: Vec<f64>) -> ChiSquareReport {
    let mut statistic = 0.0;
    let mut live = 0usize;
    let mut impossible = false;
    for (&o, &e) in counts.iter().zip(&expected) {
        if e > 0.0 {
            live += 1;
            let diff = o as f64 - e;
            statistic += diff * diff / e;
        } else if o > 0 {
            impossible = true;
        }
    }
    let degrees_of_freedom = live.saturating_sub(1);
    let p_value = if impossible {
        statistic = f64::INFINITY;
        0.0
    } else if degrees_of_freedom == 0 {
        1.0
    } else {
        ChiSquared::new(degrees_of_freedom as f64)
            .expect("positive degrees of freedom")
            .sf(statistic)
    };
    ChiSquareReport {
        order,
        bias,
        samples,
        counts,
        expected,
        statistic,
        degrees_of_freedom,
        p_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::validate_tiling;
    use std::collections::HashSet;

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn counts_match_closed_form() {
        let want = [1, 2, 8, 64, 1024];
        for n in 0..=4u32 {
            let census = enumerate_tilings(n).unwrap();
            assert_eq!(census.tilings.len(), want[n as usize], "order {n}");
            let distinct: HashSet<_> = census.tilings.iter().map(|t| t.canonical()).collect();
            assert_eq!(distinct.len(), census.tilings.len());
            for t in &census.tilings {
                assert!(validate_tiling(n, t.dominoes()).is_valid());
            }
        }
    }

    #[test]
    fn horizontal_histogram_is_binomial() {
        let census = enumerate_tilings(2).unwrap();
        let want: BTreeMap<usize, usize> = [(0, 1), (1, 3), (2, 3), (3, 1)].into_iter().collect();
        assert_eq!(census.horizontal_histogram, want);
        for n in 0..=4u32 {
            let census = enumerate_tilings(n).unwrap();
            let pairs = (n * (n + 1) / 2) as usize;
            for t in &census.tilings {
                assert_eq!(t.horizontal_count() % 2, 0);
                assert_eq!((t.len() - t.horizontal_count()) % 2, 0);
            }
            for (k, &count) in &census.horizontal_histogram {
                assert_eq!(count, binomial(pairs, *k));
            }
            assert_eq!(census.horizontal_histogram.values().sum::<usize>(), census.tilings.len());
        }
    }

    #[test]
    fn order_cap() {
        assert!(matches!(enumerate_tilings(5), Err(EnumerateError::OrderTooLarge(5))));
    }

    #[test]
    fn gibbs_weights_sum_to_one() {
        for n in 1..=3 {
            let census = enumerate_tilings(n).unwrap();
            for p in [0.5, 0.3, 0.9] {
                let total: f64 = census.tilings.iter().map(|t| gibbs_weight(t, p)).sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fully_biased_sampling_is_degenerate() {
        let report = uniformity_test(1, 1000, 5, 1.0).unwrap();
        let census = enumerate_tilings(1).unwrap();
        let horizontal = census.index()[&Tiling::all_horizontal(1).canonical()];
        assert_eq!(report.counts[horizontal], 1000);
        assert_eq!(report.p_value, 1.0);
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            uniformity_test(2, 500, 0, 0.5),
            Err(EnumerateError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn order_two_uniform_and_biased() {
        let r = uniformity_test(2, 80_000, 11, 0.5).unwrap();
        assert!(r.p_value > 1e-3, "{r:?}");
        let r = uniformity_test(2, 100_000, 12, 0.3).unwrap();
        assert!(r.p_value > 1e-3, "{r:?}");
    }

    #[test]
    fn order_one_frequencies() {
        let r = uniformity_test(1, 100_000, 1, 0.5).unwrap();
        for &c in &r.counts {
            let f = c as f64 / 100_000.0;
            assert!((f - 0.5).abs() < 0.01, "{f}");
        }
    }
}
