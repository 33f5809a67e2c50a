//! Markov measures on `{0,1}^Z` that are stationary for the line dynamics,
//! their cylinder probabilities, and exact and statistical checks of
//! stationarity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("density {0} is outside [0, 1]")]
    InvalidDensity(f64),
    #[error("bias {0} is outside (0, 1]")]
    InvalidBias(f64),
    #[error("pattern must start with 0 and end with 1 (got {0:?})")]
    NotSpecial(String),
    #[error("empty pattern")]
    EmptyPattern,
    #[error("pattern of length {0} is too long for exact enumeration")]
    PatternTooLong(usize),
    #[error("window of length {length} leaves no interior after margins of {margin}")]
    NoInterior { length: usize, margin: usize },
    #[error("at least two replicas are needed for a z-score")]
    TooFewReplicas,
}

/// A two-state Markov chain read left to right: `P(x_0 = b) = p_b` and
/// `P(x_{i+1} = c | x_i = b) = q_bc`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovParams {
    pub d: f64,
    pub bias: f64,
    pub p0: f64,
    pub p1: f64,
    pub q00: f64,
    pub q01: f64,
    pub q10: f64,
    pub q11: f64,
}

impl MarkovParams {
    /// Arbitrary chain with `P(0 -> 1) = q01`, `P(1 -> 0) = q10`, started
    /// from its own stationary marginal.
    pub fn from_transitions(q01: f64, q10: f64, bias: f64) -> Self {
        let d = if q01 + q10 == 0.0 { 0.0 } else { q01 / (q01 + q10) };
        Self {
            d,
            bias,
            p0: 1.0 - d,
            p1: d,
            q00: 1.0 - q01,
            q01,
            q10,
            q11: 1.0 - q10,
        }
    }

    pub fn q(&self, a: bool, b: bool) -> f64 {
        match (a, b) {
            (false, false) => self.q00,
            (false, true) => self.q01,
            (true, false) => self.q10,
            (true, true) => self.q11,
        }
    }

    pub fn marginal(&self, b: bool) -> f64 {
        if b {
            self.p1
        } else {
            self.p0
        }
    }
}

fn check_density(d: f64) -> Result<(), MeasureError> {
    if (0.0..=1.0).contains(&d) {
        Ok(())
    } else {
        Err(MeasureError::InvalidDensity(d))
    }
}

/// The fair-coin stationary measure of density `d`.
pub fn mu_params(d: f64) -> Result<MarkovParams, MeasureError> {
    check_density(d)?;
    let (q00, q01, q10, q11) = if d == 0.0 {
        (1.0, 0.0, 1.0, 0.0)
    } else if d == 1.0 {
        (0.0, 1.0, 0.0, 1.0)
    } else {
        let s = (d * d + (1.0 - d) * (1.0 - d)).sqrt();
        (
            (s - d) / (1.0 - d),
            (1.0 - s) / (1.0 - d),
            (1.0 - s) / d,
            (s - (1.0 - d)) / d,
        )
    };
    Ok(MarkovParams {
        d,
        bias: 0.5,
        p0: 1.0 - d,
        p1: d,
        q00,
        q01,
        q10,
        q11,
    })
}

/// The stationary measure of density `d` when particles jump with
/// probability `p`.
///
/// `q01 = (1 - sqrt(D)) / (2p(1-d))` with `D = 1 - 4pd(1-d)`, evaluated in
/// the equivalent form `2d / (1 + sqrt(D))` (and likewise for `q10`), which
/// has no cancellation as `p -> 0`.
pub fn biased_params(p: f64, d: f64) -> Result<MarkovParams, MeasureError> {
    check_density(d)?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(MeasureError::InvalidBias(p));
    }
    let disc = 1.0 - 4.0 * p * d * (1.0 - d);
    assert!(disc >= 0.0, "negative discriminant");
    let root = 1.0 + disc.sqrt();
    let q01 = 2.0 * d / root;
    let q10 = 2.0 * (1.0 - d) / root;
    Ok(MarkovParams {
        d,
        bias: p,
        p0: 1.0 - d,
        p1: d,
        q00: 1.0 - q01,
        q01,
        q10,
        q11: 1.0 - q10,
    })
}

/// `p(b_0) q(b_0, b_1) ... q(b_{k-1}, b_k)`.
pub fn cylinder_prob(m: &MarkovParams, bits: &[bool]) -> f64 {
    let Some(&first) = bits.first() else {
        return 1.0;
    };
    bits.windows(2)
        .fold(m.marginal(first), |acc, w| acc * m.q(w[0], w[1]))
}

pub fn parse_bits(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}

/// One-step image of the fair-coin measure on a cylinder `B` that starts with
/// 0 and ends with 1: a sum over the `2^N` predecessors `A` obtained by
/// turning any subset of the "01"s of `B` into "10", each weighted by
/// `2^{-M(A)}` and the edge factors `r(A)`, `s(A)`.
pub fn pushforward_special(m: &MarkovParams, bits: &[bool]) -> Result<f64, MeasureError> {
    if bits.len() < 2 || bits[0] || !bits[bits.len() - 1] {
        return Err(MeasureError::NotSpecial(
            bits.iter().map(|&b| if b { '1' } else { '0' }).collect(),
        ));
    }
    let ups: Vec<usize> = (0..bits.len() - 1)
        .filter(|&i| !bits[i] && bits[i + 1])
        .collect();
    let last = bits.len() - 1;
    let mut total = 0.0;
    for mask in 0u64..(1u64 << ups.len()) {
        let mut a = bits.to_vec();
        for (k, &i) in ups.iter().enumerate() {
            if mask >> k & 1 == 1 {
                a[i] = true;
                a[i + 1] = false;
            }
        }
        let descents = a.windows(2).filter(|w| w[0] && !w[1]).count();
        let r = if a[0] { 1.0 } else { 0.5 * (1.0 + m.q00) };
        let s = if a[last] { 1.0 / (1.0 + m.q00) } else { 1.0 };
        total += cylinder_prob(m, &a) * 0.5f64.powi(descents as i32) * r * s;
    }
    Ok(total)
}

/// Largest pattern accepted by [`pushforward_exact`].
pub const MAX_EXACT_PATTERN: usize = 12;

/// One-step image of the measure `m` under jumps with probability `p`, by
/// brute force: every configuration on sites `-1..=L+1` is weighted by its
/// cylinder probability, and every pattern of coins on its mobile bonds is
/// pushed through the update. Holds for any pattern and any bias.
pub fn pushforward_exact(m: &MarkovParams, p: f64, bits: &[bool]) -> Result<f64, MeasureError> {
    if bits.is_empty() {
        return Err(MeasureError::EmptyPattern);
    }
    if bits.len() > MAX_EXACT_PATTERN {
        return Err(MeasureError::PatternTooLong(bits.len()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(MeasureError::InvalidBias(p));
    }
    // Site j of `x` is lattice site j - 1; B occupies lattice sites 0..len.
    let width = bits.len() + 2;
    let mut total = 0.0;
    let mut x = vec![false; width];
    for cfg in 0u64..(1u64 << width) {
        for (j, slot) in x.iter_mut().enumerate() {
            *slot = cfg >> j & 1 == 1;
        }
        let weight = cylinder_prob(m, &x);
        if weight == 0.0 {
            continue;
        }
        // Bond (j, j+1) fires only for j + 1 < width; the last site's jump
        // leaves the observed range and does not affect B.
        let mobile: Vec<usize> = (0..width - 1).filter(|&j| x[j] && !x[j + 1]).collect();
        let k = mobile.len();
        for coins in 0u64..(1u64 << k) {
            let mut y = x.clone();
            let mut fired = 0;
            for (c, &j) in mobile.iter().enumerate() {
                if coins >> c & 1 == 1 {
                    y.swap(j, j + 1);
                    fired += 1;
                }
            }
            if y[1..=bits.len()] == *bits {
                total += weight * p.powi(fired) * (1.0 - p).powi((k - fired as usize) as i32);
            }
        }
    }
    Ok(total)
}

/// A window of length `len` drawn from the chain.
pub fn sample_window<R: Rng + ?Sized>(m: &MarkovParams, len: usize, rng: &mut R) -> Vec<bool> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    let mut b = rng.gen_bool(m.p1.clamp(0.0, 1.0));
    out.push(b);
    for _ in 1..len {
        let up = if b { m.q11 } else { m.q01 };
        b = rng.gen_bool(up.clamp(0.0, 1.0));
        out.push(b);
    }
    out
}

/// One update of a finite window with closed ends: nothing enters on the
/// left and the last site cannot jump. Boundary effects travel at most one
/// site per step.
fn step_open<R: Rng + ?Sized>(bits: &mut [bool], p: f64, rng: &mut R) {
    let mut j = 0;
    while j + 1 < bits.len() {
        if bits[j] && !bits[j + 1] {
            if rng.gen_bool(p) {
                bits.swap(j, j + 1);
            }
            j += 2;
        } else {
            j += 1;
        }
    }
}

/// Every 0/1 pattern of length `1..=max_len`, shortest first.
pub fn all_patterns(max_len: usize) -> Vec<Vec<bool>> {
    (1..=max_len)
        .flat_map(|len| {
            (0u32..(1 << len)).map(move |m| (0..len).map(|i| m >> (len - 1 - i) & 1 == 1).collect())
        })
        .collect()
}

fn frequency(bits: &[bool], pattern: &[bool], range: std::ops::Range<usize>) -> f64 {
    let k = pattern.len();
    let starts = range.start..range.end + 1 - k;
    let n = starts.len();
    let hits = starts.filter(|&i| bits[i..i + k] == *pattern).count();
    hits as f64 / n as f64
}

#[derive(Debug, Clone)]
pub struct PatternShift {
    pub pattern: String,
    /// Mean interior frequency before the updates.
    pub before: f64,
    pub after: f64,
    pub theory: f64,
    /// Paired z-score of `after - before` across replicas.
    pub z: f64,
}

#[derive(Debug, Clone)]
pub struct StationarityReport {
    pub params: MarkovParams,
    pub bias: f64,
    pub length: usize,
    pub steps: usize,
    pub replicas: usize,
    pub patterns: Vec<PatternShift>,
    pub threshold: f64,
}

impl StationarityReport {
    pub fn max_abs_z(&self) -> f64 {
        self.patterns.iter().map(|s| s.z.abs()).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_abs_z() <= self.threshold
    }
}

/// Draws `replicas` windows of length `len` from `m` (replica `i` seeded
/// `seed + i`), applies `steps` updates with jump probability `p`, and
/// compares the frequencies of every pattern of length at most 3 on the
/// interior (margins `steps + 10`) before and after.
pub fn stationarity_stat_test(
    m: &MarkovParams,
    p: f64,
    len: usize,
    steps: usize,
    replicas: usize,
    seed: u64,
) -> Result<StationarityReport, MeasureError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(MeasureError::InvalidBias(p));
    }
    if replicas < 2 {
        return Err(MeasureError::TooFewReplicas);
    }
    let margin = steps + 10;
    if len < 2 * margin + 3 {
        return Err(MeasureError::NoInterior { length: len, margin });
    }
    let interior = margin..len - margin;
    let patterns = all_patterns(3);
    let per_replica: Vec<Vec<(f64, f64)>> = (0..replicas as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
            let mut bits = sample_window(m, len, &mut rng);
            let before: Vec<f64> = patterns
                .iter()
                .map(|b| frequency(&bits, b, interior.clone()))
                .collect();
            for _ in 0..steps {
                step_open(&mut bits, p, &mut rng);
            }
            before
                .into_iter()
                .zip(&patterns)
                .map(|(f, b)| (f, frequency(&bits, b, interior.clone())))
                .collect()
        })
        .collect();
    let r = replicas as f64;
    let shifts = patterns
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let before = per_replica.iter().map(|v| v[k].0).sum::<f64>() / r;
            let after = per_replica.iter().map(|v| v[k].1).sum::<f64>() / r;
            let diffs: Vec<f64> = per_replica.iter().map(|v| v[k].1 - v[k].0).collect();
            let mean = diffs.iter().sum::<f64>() / r;
            let var = diffs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (r - 1.0);
            let se = (var / r).sqrt();
            let z = if se > 0.0 {
                mean / se
            } else if mean == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            PatternShift {
                pattern: b.iter().map(|&x| if x { '1' } else { '0' }).collect(),
                before,
                after,
                theory: cylinder_prob(m, b),
                z,
            }
        })
        .collect();
    Ok(StationarityReport {
        params: *m,
        bias: p,
        length: len,
        steps,
        replicas,
        patterns: shifts,
        threshold: 4.0,
    })
}
