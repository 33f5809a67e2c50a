use aztec_core::tasep::{
    exact_distribution, gamma_tail, run_wedge, sample_gamma_gap, y_process_step, CoupledPair, ParticleState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF, Discrete};
use std::collections::BTreeMap;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn lead_particle_is_binomial() {
    let n = 20u32;
    let runs = 10_000;
    let mut counts = vec![0usize; n as usize + 1];
    let mut r = rng(11);
    for _ in 0..runs {
        let s = run_wedge(n, 0.5, &mut r).unwrap();
        counts[s.lead_particle() as usize] += 1;
    }
    let law = Binomial::new(0.5, n as u64).unwrap();
    // Pool the tails so every expected count is at least 5.
    let (mut obs, mut exp) = (Vec::new(), Vec::new());
    let (mut o_acc, mut e_acc) = (0.0, 0.0);
    for k in 0..=n as u64 {
        o_acc += counts[k as usize] as f64;
        e_acc += law.pmf(k) * runs as f64;
        if e_acc >= 5.0 && law.sf(k) * runs as f64 >= 5.0 {
            obs.push(o_acc);
            exp.push(e_acc);
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    *obs.last_mut().unwrap() += o_acc;
    *exp.last_mut().unwrap() += e_acc;
    let stat: f64 = obs.iter().zip(&exp).map(|(o, e)| (o - e) * (o - e) / e).sum();
    let p = ChiSquared::new((obs.len() - 1) as f64).unwrap().sf(stat);
    assert!(p > 1e-3, "chi2 = {stat}, p = {p}");
}

#[test]
fn exact_law_matches_simulation() {
    let p = 0.3;
    let law = exact_distribution(2, &p).unwrap();
    let samples = 1_000_000;
    let mut counts: BTreeMap<ParticleState, usize> = BTreeMap::new();
    let mut r = rng(5);
    for _ in 0..samples {
        *counts.entry(run_wedge(2, p, &mut r).unwrap()).or_default() += 1;
    }
    assert!(counts.keys().all(|s| law.contains_key(s)));
    for (s, &w) in &law {
        let f = counts.get(s).copied().unwrap_or(0) as f64 / samples as f64;
        let sigma = (w * (1.0 - w) / samples as f64).sqrt();
        assert!((f - w).abs() <= 3.0 * sigma, "{s}: {f} vs {w}");
    }
}

fn random_bits(r: &mut ChaCha8Rng, len: usize) -> Vec<bool> {
    (0..len).map(|_| r.gen_bool(0.5)).collect()
}

fn padded(left: usize, middle: &[bool], right: usize) -> Vec<bool> {
    let mut v = vec![true; left];
    v.extend_from_slice(middle);
    v.extend(std::iter::repeat_n(false, right));
    v
}

#[test]
fn coupling_preserves_sitewise_order() {
    let mut r = rng(21);
    for _ in 0..10_000 {
        let low = random_bits(&mut r, 12);
        let high: Vec<bool> = low.iter().map(|&b| b || r.gen_bool(0.3)).collect();
        let mut pair = CoupledPair::new(
            ParticleState::new(0, padded(6, &high, 6)).unwrap(),
            ParticleState::new(0, padded(6, &low, 6)).unwrap(),
        )
        .unwrap();
        for _ in 0..5 {
            pair.coupled_step(&mut r).unwrap();
            let ok = pair.upper.bits().iter().zip(pair.lower.bits()).all(|(&u, &l)| u >= l);
            assert!(ok, "{} / {}", pair.upper, pair.lower);
        }
    }
}

#[test]
fn mismatches_never_increase() {
    let mut r = rng(3);
    let steps = 100;
    for _ in 0..1000 {
        let a = random_bits(&mut r, 40);
        let b = random_bits(&mut r, 40);
        let pad = steps + 10;
        let mut pair = CoupledPair::new(
            ParticleState::new(0, padded(pad, &a, pad)).unwrap(),
            ParticleState::new(0, padded(pad, &b, pad)).unwrap(),
        )
        .unwrap();
        let mut last = pair.mismatch_count();
        for _ in 0..steps {
            pair.coupled_step(&mut r).unwrap();
            let now = pair.mismatch_count();
            assert!(now <= last);
            last = now;
        }
    }
}

#[test]
fn naive_coupling_spreads_mismatches_when_biased() {
    let periods = 100;
    let steps = 50;
    let pad = 60;
    let upper: Vec<bool> = "100110".repeat(periods).chars().map(|c| c == '1').collect();
    let lower: Vec<bool> = "110100".repeat(periods).chars().map(|c| c == '1').collect();
    let start = CoupledPair::new(
        ParticleState::new(0, padded(pad, &upper, pad)).unwrap(),
        ParticleState::new(0, padded(pad, &lower, pad)).unwrap(),
    )
    .unwrap();
    let measured = pad + steps..pad + upper.len() - steps;
    let width = measured.len() as f64;
    let initial = start.mismatches_in(measured.clone()) as f64 / width;
    assert!((initial - 1.0 / 3.0).abs() < 0.01);
    let mut grew = 0;
    for seed in 0..100 {
        let mut pair = start.clone();
        let mut r = rng(seed);
        let mut peak: f64 = 0.0;
        for _ in 0..steps {
            pair.naive_step(0.9, &mut r).unwrap();
            peak = peak.max(pair.mismatches_in(measured.clone()) as f64 / width);
        }
        if peak > 0.5 {
            grew += 1;
        }
    }
    assert!(grew >= 90, "{grew}");
}

#[test]
fn gap_law_is_stationary() {
    let b = 0.5;
    let k = 10_000;
    let mut r = rng(8);
    let mut gaps: Vec<u64> = (0..k).map(|_| sample_gamma_gap(b, &mut r)).collect();
    for _ in 0..1000 {
        y_process_step(&mut gaps, b, &mut r).unwrap();
    }
    let top = 7u64;
    for m in 1..=top {
        let prob = if m < top {
            gamma_tail(b, m - 1) - gamma_tail(b, m)
        } else {
            gamma_tail(b, top - 1)
        };
        let obs = gaps
            .iter()
            .filter(|&&g| if m < top { g == m } else { g >= top })
            .count() as f64;
        let exp = prob * k as f64;
        let sigma = (k as f64 * prob * (1.0 - prob)).sqrt();
        assert!((obs - exp).abs() <= 3.0 * sigma, "gap {m}: {obs} vs {exp}");
    }
}
