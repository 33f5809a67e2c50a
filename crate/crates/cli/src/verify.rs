//! Named verification suites. Each one runs at fixed sizes and seeds and
//! returns a pass/fail verdict with a few lines of detail.

use std::collections::BTreeMap;
use std::fmt;

use aztec_core::enumerate::{enumerate_tilings, uniformity_test, EnumerateError};
use aztec_core::geometry::Heading;
use aztec_core::measures::{
    all_patterns, biased_params, cylinder_prob, mu_params, pushforward_special, stationarity_stat_test,
    MeasureError,
};
use aztec_core::regions::{
    circle_deviation, ellipse_deviation, growth_distribution_exact, partition_to_bits, region_partition,
    Partition, RegionsError,
};
use aztec_core::shuffle::{map_replicas, ShuffleError};
use aztec_core::tasep::{
    density_profile, exact_distribution, h_theory, ode_residual, ring_stationarity_check, run_wedge,
    CoupledPair, ParticleState, TasepError,
};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    #[error(transparent)]
    Shuffle(#[from] ShuffleError),
    #[error(transparent)]
    Tasep(#[from] TasepError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Regions(#[from] RegionsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Counts,
    Uniformity,
    Ring,
    Pushforward,
    Equivalence,
    Profile,
    Circle,
    Ode,
    Coupling,
    Bias,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Counts,
        Suite::Uniformity,
        Suite::Ring,
        Suite::Pushforward,
        Suite::Equivalence,
        Suite::Profile,
        Suite::Circle,
        Suite::Ode,
        Suite::Coupling,
        Suite::Bias,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Counts => "counts",
            Suite::Uniformity => "uniformity",
            Suite::Ring => "ring",
            Suite::Pushforward => "pushforward",
            Suite::Equivalence => "equivalence",
            Suite::Profile => "profile",
            Suite::Circle => "circle",
            Suite::Ode => "ode",
            Suite::Coupling => "coupling",
            Suite::Bias => "bias",
        }
    }

    pub fn run(self) -> Result<SuiteReport, VerifyError> {
        match self {
            Suite::Counts => counts(),
            Suite::Uniformity => uniformity(),
            Suite::Ring => ring(),
            Suite::Pushforward => pushforward(),
            Suite::Equivalence => equivalence(),
            Suite::Profile => profile(),
            Suite::Circle => circle(),
            Suite::Ode => ode(),
            Suite::Coupling => coupling(),
            Suite::Bias => bias(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            passed: true,
            details: Vec::new(),
        }
    }

    /// Records one check; the suite passes only if every check does.
    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        let mark = if ok { "ok" } else { "FAILED" };
        self.details.push(format!("{mark}: {line}"));
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {}: {}", self.name, if self.passed { "PASS" } else { "FAIL" })?;
        for d in &self.details {
            writeln!(f, "  {d}")?;
        }
        Ok(())
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn counts() -> Result<SuiteReport, VerifyError> {
    let mut r = SuiteReport::new("counts");
    for n in 1..=4u32 {
        let census = enumerate_tilings(n)?;
        let pairs = (n * (n + 1) / 2) as u64;
        let want = BigUint::one() << pairs;
        let got = BigUint::from(census.tilings.len());
        r.check(got == want, format!("order {n}: {got} tilings, expected {want}"));
        if n <= 3 {
            let hist_ok = (0..=pairs).all(|k| {
                let got = census.horizontal_histogram.get(&(k as usize)).copied().unwrap_or(0);
                BigUint::from(got) == binomial(pairs, k)
            }) && census.horizontal_histogram.keys().all(|&k| k as u64 <= pairs);
            r.check(hist_ok, format!("order {n}: horizontal pair histogram is C({pairs}, k)"));
        }
    }
    Ok(r)
}

pub fn uniformity() -> Result<SuiteReport, VerifyError> {
    let mut r = SuiteReport::new("uniformity");
    let rep = uniformity_test(3, 64_000, 0, 0.5)?;
    r.check(
        rep.p_value > 1e-3,
        format!(
            "order 3, {} samples over {} tilings: chi2 = {:.2} on {} dof, p = {:.4}",
            rep.samples,
            rep.counts.len(),
            rep.statistic,
            rep.degrees_of_freedom,
            rep.p_value
        ),
    );
    Ok(r)
}

pub fn ring() -> Result<SuiteReport, VerifyError> {
    let mut r = SuiteReport::new("ring");
    for sites in 1..=8usize {
        let mut worst: f64 = 0.0;
        for k in 0..=sites {
            worst = worst.max(ring_stationarity_check(sites, k)?);
        }
        r.check(worst <= 1e-12, format!("{sites} sites, all k: max residual {worst:.2e}"));
    }
    Ok(r)
}

pub fn pushforward() -> Result<SuiteReport, VerifyError> {
    let mut r = SuiteReport::new("pushforward");
    let special: Vec<Vec<bool>> = all_patterns(8)
        .into_iter()
        .filter(|b| b.len() >= 2 && !b[0] && b[b.len() - 1])
        .collect();
    for i in 1..=9 {
        let d = i as f64 / 10.0;
        let m = mu_params(d)?;
        let mut worst: f64 = 0.0;
        for b in &special {
            worst = worst.max((pushforward_special(&m, b)? - cylinder_prob(&m, b)).abs());
        }
        r.check(
            worst <= 1e-12,
            format!("d = {d:.1}: {} patterns, max deviation {worst:.2e}", special.len()),
        );
    }
    Ok(r)
}

fn bits_law(
    law: &BTreeMap<Partition, BigRational>,
    lo: i64,
    hi: i64,
) -> Result<BTreeMap<ParticleState, BigRational>, VerifyError> {
    let mut out = BTreeMap::new();
    for (part, w) in law {
        let s = partition_to_bits(part, lo, hi)?;
        *out.entry(s).or_insert_with(BigRational::zero) += w;
    }
    Ok(out)
}

fn max_gap<K: Ord>(a: &BTreeMap<K, BigRational>, b: &BTreeMap<K, BigRational>) -> BigRational {
    let zero = BigRational::zero();
    a.keys()
        .chain(b.keys())
        .map(|k| {
            let d = a.get(k).unwrap_or(&zero) - b.get(k).unwrap_or(&zero);
            if d < zero {
                -d
            } else {
                d
            }
        })
        .max()
        .unwrap_or(zero)
}

pub fn equivalence() -> Result<SuiteReport, VerifyError> {
    let mut r = SuiteReport::new("equivalence");
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for n in 0..=3u32 {
        let census = enumerate_tilings(n)?;
        let w = BigRational::new(BigInt::one(), BigInt::from(census.tilings.len()));
        let mut frozen = BTreeMap::new();
        for t in &census.tilings {
            let part = region_partition(t, Heading::North)?;
            *frozen.entry(part).or_insert_with(BigRational::zero) += &w;
        }
        let growth = growth_distribution_exact(n, &half)?;
        let reach = n as i64 + 2;
        let tasep = exact_distribution(n, &half)?;
        let via_bits = bits_law(&growth, -reach, reach)?;
        let g1 = max_gap(&frozen, &growth);
        let g2 = max_gap(&via_bits, &tasep);
        r.check(
            g1.is_zero() && g2.is_zero(),
            format!(
                "order {n}: {} partitions; census vs growth gap {g1}, growth vs particle law gap {g2}",
                growth.len()
            ),
        );
    }
    Ok(r)
}

pub const PROFILE_STEPS: u32 = 2000;
pub const PROFILE_BINS: usize = 10;
pub const PROFILE_SEED: u64 = 0;

pub fn profile() -> Result<SuiteReport, VerifyError> {
    let mut r = SuiteReport::new("profile");
    let mut rng = ChaCha8Rng::seed_from_u64(PROFILE_SEED);
    let s = run_wedge(PROFILE_STEPS, 0.5, &mut rng)?;
    let bins = density_profile(&s, PROFILE_STEPS, PROFILE_BINS);
    let worst = bins
        .iter()
        .filter(|b| b.center.abs() <= 0.45 + 1e-12)
        .map(|b| (b.empirical - b.theory).abs())
        .fold(0.0, f64::max);
    r.check(
        worst <= 0.03,
        format!("{PROFILE_STEPS} steps, {PROFILE_BINS} bins: max bin error on [-0.45, 0.45] is {worst:.4}"),
    );
    let n = PROFILE_STEPS as f64;
    for u in [-0.4, -0.2, 0.0, 0.2, 0.4] {
        let k = (u * n).floor() as i64;
        let scaled = s.count_right(k)? as f64 / n;
        let err = (scaled - h_theory(u)).abs();
        r.check(err <= 0.02, format!("u = {u}: S/n = {scaled:.4}, h = {:.4}", h_theory(u)));
    }
    Ok(r)
}

pub const CIRCLE_ORDER: u32 = 512;
pub const CIRCLE_RUNS: usize = 20;
pub const CIRCLE_SEED: u64 = 1;

pub fn circle() -> Result<SuiteReport, VerifyError> {
    let mut r = SuiteReport::new("circle");
    let devs = map_replicas(CIRCLE_ORDER, 0.5, CIRCLE_SEED, CIRCLE_RUNS, |_, t| circle_deviation(&t))?;
    let devs: Vec<f64> = devs.into_iter().collect::<Result<_, _>>()?;
    let within = devs.iter().filter(|&&d| d <= 0.06).count();
    let worst = devs.iter().copied().fold(0.0, f64::max);
    r.check(
        within * 100 >= 95 * CIRCLE_RUNS,
        format!("order {CIRCLE_ORDER}: {within}/{CIRCLE_RUNS} runs within 0.06, largest deviation {worst:.4}"),
    );
    Ok(r)
}

pub fn ode() -> Result<SuiteReport, VerifyError> {
    let mut r = SuiteReport::new("ode");
    let worst = (1..=99)
        .map(|i| ode_residual(i as f64 / 100.0))
        .fold(0.0, f64::max);
    r.check(worst <= 1e-9, format!("99 grid points: max residual {worst:.2e}"));
    Ok(r)
}

fn padded(left: usize, middle: &[bool], right: usize) -> Vec<bool> {
    let mut v = vec![true; left];
    v.extend_from_slice(middle);
    v.extend(std::iter::repeat_n(false, right));
    v
}

/// Counts steps at which the coupled mismatch count went up, over `pairs`
/// random pairs of 40-site configurations.
pub fn mismatch_increases(pairs: usize, steps: usize, seed: u64) -> Result<usize, VerifyError> {
    let pad = steps + 10;
    let counts: Vec<usize> = (0..pairs as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
            let a: Vec<bool> = (0..40).map(|_| rng.gen_bool(0.5)).collect();
            let b: Vec<bool> = (0..40).map(|_| rng.gen_bool(0.5)).collect();
            let mut pair = CoupledPair::new(
                ParticleState::new(0, padded(pad, &a, pad))?,
                ParticleState::new(0, padded(pad, &b, pad))?,
            )?;
            let mut last = pair.mismatch_count();
            let mut bad = 0;
            for _ in 0..steps {
                pair.coupled_step(&mut rng)?;
                let now = pair.mismatch_count();
                if now > last {
                    bad += 1;
                }
                last = now;
            }
            Ok(bad)
        })
        .collect::<Result<_, TasepError>>()?;
    Ok(counts.into_iter().sum())
}

/// Periodic pair whose two rows disagree at one site in three. Under the
/// naive coupling with shared site coins at `p = 0.9` the disagreement
/// spreads; returns how many of `seeds` runs saw the mismatch density on
/// the unaffected interior exceed one half.
pub fn naive_growth_runs(seeds: u64) -> Result<u64, VerifyError> {
    let (periods, steps, pad) = (100, 50, 60);
    let upper: Vec<bool> = "100110".repeat(periods).chars().map(|c| c == '1').collect();
    let lower: Vec<bool> = "110100".repeat(periods).chars().map(|c| c == '1').collect();
    let start = CoupledPair::new(
        ParticleState::new(0, padded(pad, &upper, pad))?,
        ParticleState::new(0, padded(pad, &lower, pad))?,
    )?;
    let measured = pad + steps..pad + upper.len() - steps;
    let width = measured.len() as f64;
    let grew: Vec<bool> = (0..seeds)
        .into_par_iter()
        .map(|seed| {
            let mut pair = start.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut peak: f64 = 0.0;
            for _ in 0..steps {
                pair.naive_step(0.9, &mut rng)?;
                peak = peak.max(pair.mismatches_in(measured.clone()) as f64 / width);
            }
            Ok(peak > 0.5)
        })
        .collect::<Result<_, TasepError>>()?;
    Ok(grew.into_iter().filter(|&g| g).count() as u64)
}

pub fn coupling() -> Result<SuiteReport, VerifyError> {
    let mut r = SuiteReport::new("coupling");
    let bad = mismatch_increases(1000, 100, 0)?;
    r.check(bad == 0, format!("1000 pairs x 100 steps at p = 1/2: {bad} increases"));
    let grew = naive_growth_runs(100)?;
    r.check(grew >= 90, format!("naive coupling at p = 0.9: mismatches spread in {grew}/100 seeds"));
    Ok(r)
}

pub const ELLIPSE_ORDER: u32 = 256;
pub const ELLIPSE_RUNS: usize = 20;
pub const ELLIPSE_BIAS: f64 = 0.3;

pub fn bias() -> Result<SuiteReport, VerifyError> {
    let mut r = SuiteReport::new("bias");
    let mut worst: f64 = 0.0;
    for i in 1..=99 {
        let d = i as f64 / 100.0;
        let (a, b) = (biased_params(0.5, d)?, mu_params(d)?);
        for (x, y) in [(a.q01, b.q01), (a.q10, b.q10), (a.p1, b.p1)] {
            worst = worst.max((x - y).abs());
        }
    }
    r.check(worst <= 1e-12, format!("biased(1/2, d) vs fair measure over 99 densities: {worst:.2e}"));
    for (i, p) in [0.3, 0.5, 0.7].into_iter().enumerate() {
        for (j, d) in [0.3, 0.5, 0.7].into_iter().enumerate() {
            let m = biased_params(p, d)?;
            let rep = stationarity_stat_test(&m, p, 3000, 50, 100, 1000 * (3 * i + j) as u64)?;
            r.check(
                rep.passed(),
                format!("p = {p}, d = {d}: max |z| = {:.2} over {} patterns", rep.max_abs_z(), rep.patterns.len()),
            );
        }
    }
    let devs = map_replicas(ELLIPSE_ORDER, ELLIPSE_BIAS, 2, ELLIPSE_RUNS, |_, t| {
        ellipse_deviation(&t, ELLIPSE_BIAS)
    })?;
    let devs: Vec<f64> = devs.into_iter().collect::<Result<_, _>>()?;
    let within = devs.iter().filter(|&&d| d <= 0.08).count();
    let largest = devs.iter().copied().fold(0.0, f64::max);
    r.check(
        within * 10 >= 9 * ELLIPSE_RUNS,
        format!(
            "order {ELLIPSE_ORDER}, p = {ELLIPSE_BIAS}: {within}/{ELLIPSE_RUNS} runs within 0.08 of the ellipse, largest {largest:.4}"
        ),
    );
    Ok(r)
}
