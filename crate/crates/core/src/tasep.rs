//! Discrete-time TASEP on the line and on a ring, the block coupling of two
//! line configurations, the slowed-lead gap process, and the closed-form
//! limit profile.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TasepError {
    #[error("window [{lo}, {hi}] is too narrow: a particle would cross its edge")]
    WindowExhausted { lo: i64, hi: i64 },
    #[error("a particle window needs at least one site")]
    EmptyWindow,
    #[error("site {0} violates the boundary convention of the target window")]
    BoundaryViolation(i64),
    #[error("site {site} lies outside [{lo}, {hi}]")]
    OutsideWindow { site: i64, lo: i64, hi: i64 },
    #[error("windows [{0}, {1}] and [{2}, {3}] differ")]
    WindowMismatch(i64, i64, i64, i64),
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("state space too large: order {0} exceeds {1}")]
    TooLarge(u32, u32),
    #[error("ring must have at least one site, and k ≤ sites (got k = {k}, sites = {sites})")]
    BadRing { sites: usize, k: usize },
    #[error("gap sequence must be non-empty with every gap ≥ 1")]
    BadGaps,
}

/// Exact or floating weights used by the exact-law routines.
pub trait Probability:
    Clone + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
}

impl<T> Probability for T where
    T: Clone + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T>
{
}

fn check_probability(p: f64) -> Result<(), TasepError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(TasepError::InvalidProbability(p))
    }
}

fn pow<T: Probability>(base: &T, e: usize) -> T {
    (0..e).fold(T::one(), |acc, _| acc * base.clone())
}

/// A window `[lo, hi]` of a configuration in `{0,1}^Z`. Sites left of the
/// window are occupied and sites right of it are vacant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParticleState {
    lo: i64,
    bits: Vec<bool>,
}

impl ParticleState {
    pub fn new(lo: i64, bits: Vec<bool>) -> Result<Self, TasepError> {
        if bits.is_empty() {
            return Err(TasepError::EmptyWindow);
        }
        Ok(Self { lo, bits })
    }

    /// Parses a 0/1 string whose first character is site `lo`.
    pub fn from_str_at(lo: i64, s: &str) -> Result<Self, TasepError> {
        let bits = s.chars().filter(|c| !c.is_whitespace()).map(|c| c == '1').collect();
        Self::new(lo, bits)
    }

    /// The wedge `x*`: occupied at `i ≤ 0`, vacant at `i > 0`.
    pub fn wedge(lo: i64, hi: i64) -> Result<Self, TasepError> {
        if hi < lo {
            return Err(TasepError::EmptyWindow);
        }
        Ok(Self {
            lo,
            bits: (lo..=hi).map(|i| i <= 0).collect(),
        })
    }

    /// The wedge on `[-steps-2, steps+2]`, wide enough for `steps` updates.
    pub fn wedge_for(steps: u32) -> Self {
        let r = steps as i64 + 2;
        Self::wedge(-r, r).expect("non-empty window")
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.bits.len() as i64 - 1
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Occupancy at any site, using the boundary convention outside the window.
    pub fn get(&self, i: i64) -> bool {
        if i < self.lo {
            true
        } else if i > self.hi() {
            false
        } else {
            self.bits[(i - self.lo) as usize]
        }
    }

    /// Number of particles strictly right of `k`, for `k ≥ lo - 1`.
    pub fn count_right(&self, k: i64) -> Result<usize, TasepError> {
        if k < self.lo - 1 {
            return Err(TasepError::OutsideWindow {
                site: k,
                lo: self.lo,
                hi: self.hi(),
            });
        }
        let start = (k + 1 - self.lo).clamp(0, self.bits.len() as i64) as usize;
        Ok(self.bits[start..].iter().filter(|&&b| b).count())
    }

    /// Rightmost particle, or `lo - 1` when the window is empty of particles.
    pub fn lead_particle(&self) -> i64 {
        match self.bits.iter().rposition(|&b| b) {
            Some(i) => self.lo + i as i64,
            None => self.lo - 1,
        }
    }

    /// The same configuration viewed through `[lo, hi]`; sites dropped from the
    /// window must agree with the boundary convention.
    pub fn rewindow(&self, lo: i64, hi: i64) -> Result<Self, TasepError> {
        if hi < lo {
            return Err(TasepError::EmptyWindow);
        }
        for i in self.lo..=self.hi() {
            if (i < lo && !self.get(i)) || (i > hi && self.get(i)) {
                return Err(TasepError::BoundaryViolation(i));
            }
        }
        Ok(Self {
            lo,
            bits: (lo..=hi).map(|i| self.get(i)).collect(),
        })
    }

    fn check_edges(&self) -> Result<(), TasepError> {
        if !self.bits[0] || *self.bits.last().expect("non-empty") {
            return Err(TasepError::WindowExhausted {
                lo: self.lo,
                hi: self.hi(),
            });
        }
        Ok(())
    }

    /// Window offsets `j` with a particle at `j` and a hole at `j + 1`.
    pub fn mobile(&self) -> Vec<usize> {
        mobile_sites(&self.bits)
    }

    /// One simultaneous update: every particle with a vacancy to its right
    /// jumps with probability `p`.
    pub fn step_line<R: Rng + ?Sized>(&mut self, p: f64, rng: &mut R) -> Result<(), TasepError> {
        check_probability(p)?;
        self.check_edges()?;
        let mut j = 0;
        while j + 1 < self.bits.len() {
            if self.bits[j] && !self.bits[j + 1] {
                if rng.gen_bool(p) {
                    self.bits.swap(j, j + 1);
                }
                // j+1 was vacant before the update, so it cannot move this round.
                j += 2;
            } else {
                j += 1;
            }
        }
        Ok(())
    }

    /// Every successor of one update with its probability.
    pub fn transitions<T: Probability>(&self, p: &T) -> Result<Vec<(ParticleState, T)>, TasepError> {
        self.check_edges()?;
        let mobile = self.mobile();
        let q = T::one() - p.clone();
        let m = mobile.len();
        let mut out = Vec::with_capacity(1 << m);
        for mask in 0u64..(1u64 << m) {
            let mut next = self.clone();
            let mut moved = 0;
            for (b, &j) in mobile.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    next.bits.swap(j, j + 1);
                    moved += 1;
                }
            }
            out.push((next, pow(p, moved) * pow(&q, m - moved)));
        }
        Ok(out)
    }
}

impl fmt::Display for ParticleState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn mobile_sites(bits: &[bool]) -> Vec<usize> {
    (0..bits.len().saturating_sub(1))
        .filter(|&j| bits[j] && !bits[j + 1])
        .collect()
}

/// Largest order accepted by [`exact_distribution`].
pub const MAX_EXACT_STEPS: u32 = 6;

/// Exact law after `n` updates from the wedge, on the window `[-n-2, n+2]`.
pub fn exact_distribution<T: Probability>(n: u32, p: &T) -> Result<BTreeMap<ParticleState, T>, TasepError> {
    if n > MAX_EXACT_STEPS {
        return Err(TasepError::TooLarge(n, MAX_EXACT_STEPS));
    }
    let mut law = BTreeMap::new();
    law.insert(ParticleState::wedge_for(n), T::one());
    for _ in 0..n {
        let mut next: BTreeMap<ParticleState, T> = BTreeMap::new();
        for (s, w) in &law {
            for (t, q) in s.transitions(p)? {
                let add = w.clone() * q;
                let slot = next.entry(t).or_insert_with(T::zero);
                *slot = slot.clone() + add;
            }
        }
        law = next;
    }
    Ok(law)
}

/// Runs the wedge for `steps` updates.
pub fn run_wedge<R: Rng + ?Sized>(steps: u32, p: f64, rng: &mut R) -> Result<ParticleState, TasepError> {
    let mut s = ParticleState::wedge_for(steps);
    for _ in 0..steps {
        s.step_line(p, rng)?;
    }
    Ok(s)
}

/// One row of a binned density profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileBin {
    pub center: f64,
    pub width: f64,
    pub empirical: f64,
    /// Average of `f` over the bin, `(h(a) - h(b)) / (b - a)`.
    pub theory: f64,
}

/// Bins occupancy of a state evolved for `steps` updates over `u = i / steps`
/// in `[-1, 1]`. Site `i` belongs to the bin containing `i / steps`.
pub fn density_profile(s: &ParticleState, steps: u32, bins: usize) -> Vec<ProfileBin> {
    assert!(steps > 0 && bins > 0);
    let width = 2.0 / bins as f64;
    let mut occupied = vec![0usize; bins];
    let mut total = vec![0usize; bins];
    let span = 2 * steps as i64;
    for i in -(steps as i64)..=steps as i64 {
        // Integer form of floor((u + 1) / width), so sites on bin edges land
        // in the bin they start.
        let b = (((i + steps as i64) * bins as i64 / span) as usize).min(bins - 1);
        total[b] += 1;
        if s.get(i) {
            occupied[b] += 1;
        }
    }
    (0..bins)
        .map(|b| {
            let a = -1.0 + b as f64 * width;
            ProfileBin {
                center: a + width / 2.0,
                width,
                empirical: if total[b] == 0 { f64::NAN } else { occupied[b] as f64 / total[b] as f64 },
                theory: (h_theory(a) - h_theory(a + width)) / width,
            }
        })
        .collect()
}

/// Limiting scaled count of particles right of `un`.
pub fn h_theory(u: f64) -> f64 {
    if u < -0.5 {
        -u
    } else if u <= 0.5 {
        (1.0 - u) / 2.0 - 0.5 * (0.5 - u * u).max(0.0).sqrt()
    } else {
        0.0
    }
}

/// Limiting density at `un`; right-continuous at `-1/2`.
pub fn f_theory(u: f64) -> f64 {
    if u < -0.5 {
        1.0
    } else if u <= 0.5 {
        0.5 - u / (2.0 - 4.0 * u * u).sqrt()
    } else {
        0.0
    }
}

/// Upward drift of a lattice path of slope `s` under the update.
pub fn drift_rate(s: f64) -> f64 {
    ((1.0 - s) + (1.0 + s * s).sqrt()) / 2.0
}

/// `|y - x y' - drift(y')|` along `y = 1/2 + sqrt(x - x^2)`.
pub fn ode_residual(x: f64) -> f64 {
    let root = (x - x * x).sqrt();
    let y = 0.5 + root;
    let dy = (1.0 - 2.0 * x) / (2.0 * root);
    (y - x * dy - drift_rate(dy)).abs()
}

/// Occupancy of `Z / n_sites`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingState {
    bits: Vec<bool>,
}

impl RingState {
    pub fn new(bits: Vec<bool>) -> Result<Self, TasepError> {
        if bits.is_empty() {
            return Err(TasepError::BadRing { sites: 0, k: 0 });
        }
        Ok(Self { bits })
    }

    pub fn parse(s: &str) -> Result<Self, TasepError> {
        Self::new(s.chars().map(|c| c == '1').collect())
    }

    pub fn n_sites(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn particles(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    fn mobile(&self) -> Vec<usize> {
        let n = self.bits.len();
        (0..n).filter(|&i| self.bits[i] && !self.bits[(i + 1) % n]).collect()
    }

    /// Number of cyclic "10" patterns.
    pub fn descents(&self) -> usize {
        self.mobile().len()
    }

    pub fn step_ring<R: Rng + ?Sized>(&mut self, p: f64, rng: &mut R) -> Result<(), TasepError> {
        check_probability(p)?;
        let n = self.bits.len();
        for i in self.mobile() {
            if rng.gen_bool(p) {
                self.bits.swap(i, (i + 1) % n);
            }
        }
        Ok(())
    }

    pub fn transitions<T: Probability>(&self, p: &T) -> Vec<(RingState, T)> {
        let n = self.bits.len();
        let mobile = self.mobile();
        let m = mobile.len();
        let q = T::one() - p.clone();
        (0u64..(1u64 << m))
            .map(|mask| {
                let mut next = self.clone();
                let mut moved = 0;
                for (b, &i) in mobile.iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        next.bits.swap(i, (i + 1) % n);
                        moved += 1;
                    }
                }
                (next, pow(p, moved) * pow(&q, m - moved))
            })
            .collect()
    }
}

impl fmt::Display for RingState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// All rings with `k` particles on `n_sites` sites, in lexicographic order.
pub fn ring_states(n_sites: usize, k: usize) -> Result<Vec<RingState>, TasepError> {
    if n_sites == 0 || k > n_sites || n_sites > 20 {
        return Err(TasepError::BadRing { sites: n_sites, k });
    }
    Ok((0u32..(1u32 << n_sites))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| RingState {
            bits: (0..n_sites).map(|i| m >> (n_sites - 1 - i) & 1 == 1).collect(),
        })
        .collect())
}

/// Normalized weights proportional to `2^(number of "10" patterns)`.
pub fn ring_weights(n_sites: usize, k: usize) -> Result<BTreeMap<RingState, f64>, TasepError> {
    let states = ring_states(n_sites, k)?;
    let total: f64 = states.iter().map(|s| 2f64.powi(s.descents() as i32)).sum();
    Ok(states
        .into_iter()
        .map(|s| {
            let w = 2f64.powi(s.descents() as i32) / total;
            (s, w)
        })
        .collect())
}

/// `max |πP - π|` for the fair ring dynamics and `π ∝ 2^(#10)`.
pub fn ring_stationarity_check(n_sites: usize, k: usize) -> Result<f64, TasepError> {
    let pi = ring_weights(n_sites, k)?;
    let mut image: BTreeMap<&RingState, f64> = pi.keys().map(|s| (s, 0.0)).collect();
    for (s, w) in &pi {
        for (t, q) in s.transitions(&0.5f64) {
            let (key, _) = pi.get_key_value(&t).expect("dynamics conserve particles");
            *image.get_mut(key).expect("present") += w * q;
        }
    }
    Ok(pi
        .iter()
        .map(|(s, w)| (image[s] - w).abs())
        .fold(0.0, f64::max))
}

/// Two configurations on a common window, stepped jointly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoupledPair {
    pub upper: ParticleState,
    pub lower: ParticleState,
}

/// A maximal run of linked sites, as window offsets `start..start + len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockClass {
    Stable,
    Unstable,
}

impl CoupledPair {
    pub fn new(upper: ParticleState, lower: ParticleState) -> Result<Self, TasepError> {
        if upper.lo != lower.lo || upper.bits.len() != lower.bits.len() {
            return Err(TasepError::WindowMismatch(upper.lo, upper.hi(), lower.lo, lower.hi()));
        }
        Ok(Self { upper, lower })
    }

    pub fn parse(lo: i64, upper: &str, lower: &str) -> Result<Self, TasepError> {
        Self::new(ParticleState::from_str_at(lo, upper)?, ParticleState::from_str_at(lo, lower)?)
    }

    pub fn mismatch_count(&self) -> usize {
        self.upper
            .bits
            .iter()
            .zip(&self.lower.bits)
            .filter(|(a, b)| a != b)
            .count()
    }

    /// Sites `j` and `j + 1` are linked when either row reads "10" there.
    pub fn blocks(&self) -> Vec<Block> {
        let (u, l) = (&self.upper.bits, &self.lower.bits);
        let len = u.len();
        let linked = |j: usize| (u[j] && !u[j + 1]) || (l[j] && !l[j + 1]);
        let mut out = Vec::new();
        let mut start = 0;
        for j in 0..len {
            if j + 1 == len || !linked(j) {
                out.push(Block {
                    start,
                    len: j + 1 - start,
                });
                start = j + 1;
            }
        }
        out
    }

    pub fn block_rows(&self, b: Block) -> (&[bool], &[bool]) {
        let r = b.start..b.start + b.len;
        (&self.upper.bits[r.clone()], &self.lower.bits[r])
    }

    /// One step of the fair block coupling: the block `[10/10]` shares a coin,
    /// and elsewhere the k-th "10" of the upper row and the k-th "10" of the
    /// lower row within a block receive complementary coins.
    pub fn coupled_step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(), TasepError> {
        self.upper.check_edges()?;
        self.lower.check_edges()?;
        for b in self.blocks() {
            if b.len < 2 {
                continue;
            }
            let (u, l) = self.block_rows(b);
            let um: Vec<usize> = mobile_sites(u).into_iter().map(|j| j + b.start).collect();
            let lm: Vec<usize> = mobile_sites(l).into_iter().map(|j| j + b.start).collect();
            if b.len == 2 && um.len() == 1 && lm.len() == 1 {
                if rng.gen_bool(0.5) {
                    self.upper.bits.swap(b.start, b.start + 1);
                    self.lower.bits.swap(b.start, b.start + 1);
                }
                continue;
            }
            let paired = um.len().min(lm.len());
            for k in 0..paired {
                if rng.gen_bool(0.5) {
                    self.upper.bits.swap(um[k], um[k] + 1);
                } else {
                    self.lower.bits.swap(lm[k], lm[k] + 1);
                }
            }
            for &j in &um[paired..] {
                if rng.gen_bool(0.5) {
                    self.upper.bits.swap(j, j + 1);
                }
            }
            for &j in &lm[paired..] {
                if rng.gen_bool(0.5) {
                    self.lower.bits.swap(j, j + 1);
                }
            }
        }
        Ok(())
    }

    /// One step where both rows read the same coin at each site; this is the
    /// coupling under which mismatches can multiply when `p > 1/2`.
    pub fn naive_step<R: Rng + ?Sized>(&mut self, p: f64, rng: &mut R) -> Result<(), TasepError> {
        check_probability(p)?;
        self.upper.check_edges()?;
        self.lower.check_edges()?;
        let len = self.upper.bits.len();
        let um = self.upper.mobile();
        let lm = self.lower.mobile();
        let mut coins = vec![false; len];
        let mut need = vec![false; len];
        for &j in um.iter().chain(&lm) {
            need[j] = true;
        }
        for j in 0..len {
            if need[j] {
                coins[j] = rng.gen_bool(p);
            }
        }
        for j in um {
            if coins[j] {
                self.upper.bits.swap(j, j + 1);
            }
        }
        for j in lm {
            if coins[j] {
                self.lower.bits.swap(j, j + 1);
            }
        }
        Ok(())
    }

    /// Mismatches over window offsets `range`.
    pub fn mismatches_in(&self, range: std::ops::Range<usize>) -> usize {
        range.filter(|&j| self.upper.bits[j] != self.lower.bits[j]).count()
    }
}

/// Stable blocks: length 1, `[10/10]`, `[11/10]`, `[00/10]`, `[110/100]`, and
/// their row swaps.
pub fn classify_block(upper: &[bool], lower: &[bool]) -> BlockClass {
    const STABLE: [(&str, &str); 4] = [("10", "10"), ("11", "10"), ("00", "10"), ("110", "100")];
    if upper.len() == 1 {
        return BlockClass::Stable;
    }
    let as_str = |bits: &[bool]| bits.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
    let (u, l) = (as_str(upper), as_str(lower));
    let hit = STABLE
        .iter()
        .any(|&(a, b)| (u == a && l == b) || (u == b && l == a));
    if hit {
        BlockClass::Stable
    } else {
        BlockClass::Unstable
    }
}

/// One update of the first `K = gaps.len()` gaps behind a lead particle that
/// advances with probability `b / 2`. Gap `i` is the distance from particle
/// `i` to particle `i + 1`; particle `K + 1` moves with probability ½ when
/// its gap allows, so the first `K` gaps evolve exactly as in the infinite
/// system.
pub fn y_process_step<R: Rng + ?Sized>(gaps: &mut [u64], b: f64, rng: &mut R) -> Result<(), TasepError> {
    check_probability(b)?;
    if gaps.is_empty() || gaps.contains(&0) {
        return Err(TasepError::BadGaps);
    }
    let k = gaps.len();
    // alpha[i] is the move indicator of particle i + 1.
    let mut alpha = Vec::with_capacity(k + 1);
    alpha.push(rng.gen_bool(b / 2.0));
    for i in 1..=k {
        alpha.push(gaps[i - 1] > 1 && rng.gen_bool(0.5));
    }
    for i in 0..k {
        let y = gaps[i] as i64 + alpha[i] as i64 - alpha[i + 1] as i64;
        assert!(y >= 1, "gap fell below 1");
        gaps[i] = y as u64;
    }
    Ok(())
}

/// `γ^b(y > m)`.
pub fn gamma_tail(b: f64, m: u64) -> f64 {
    if m == 0 {
        1.0
    } else {
        b * (b / (2.0 - b)).powi((m - 1) as i32)
    }
}

/// Mean gap under `γ^b`.
pub fn gamma_mean(b: f64) -> f64 {
    (2.0 - b * b) / (2.0 - 2.0 * b)
}

/// Draws one gap from `γ^b` for `b < 1`.
pub fn sample_gamma_gap<R: Rng + ?Sized>(b: f64, rng: &mut R) -> u64 {
    assert!((0.0..1.0).contains(&b));
    if !rng.gen_bool(b) {
        return 1;
    }
    let r = b / (2.0 - b);
    let mut y = 2;
    while rng.gen_bool(r) {
        y += 1;
    }
    y
}
