use aztec_core::measures::{
    all_patterns, biased_params, cylinder_prob, mu_params, pushforward_exact, pushforward_special,
    stationarity_stat_test,
};

fn special_patterns(max_len: usize) -> Vec<Vec<bool>> {
    all_patterns(max_len)
        .into_iter()
        .filter(|b| b.len() >= 2 && !b[0] && b[b.len() - 1])
        .collect()
}

#[test]
fn special_cylinders_are_stationary() {
    let pats = special_patterns(8);
    assert_eq!(pats.len(), (2..=8).map(|l| 1usize << (l - 2)).sum());
    for i in 1..=9 {
        let m = mu_params(i as f64 / 10.0).unwrap();
        for b in &pats {
            let moved = pushforward_special(&m, b).unwrap();
            assert!((moved - cylinder_prob(&m, b)).abs() <= 1e-12);
        }
    }
}

#[test]
fn special_formula_agrees_with_brute_force() {
    for d in [0.2, 0.5, 0.85] {
        let m = mu_params(d).unwrap();
        for b in special_patterns(6) {
            let a = pushforward_special(&m, &b).unwrap();
            let e = pushforward_exact(&m, 0.5, &b).unwrap();
            assert!((a - e).abs() <= 1e-12);
        }
    }
}

#[test]
fn every_cylinder_is_stationary_under_bias() {
    for p in [0.2, 0.5, 0.8, 1.0] {
        for d in [0.1, 0.35, 0.5, 0.9] {
            let m = biased_params(p, d).unwrap();
            for b in all_patterns(5) {
                let moved = pushforward_exact(&m, p, &b).unwrap();
                assert!((moved - cylinder_prob(&m, &b)).abs() <= 1e-12, "p = {p}, d = {d}, {b:?}");
            }
        }
    }
}

#[test]
fn fair_measure_is_not_stationary_under_bias() {
    let m = mu_params(0.4).unwrap();
    let b = [true, false];
    let moved = pushforward_exact(&m, 0.8, &b).unwrap();
    assert!((moved - cylinder_prob(&m, &b)).abs() > 1e-3);
}

#[test]
fn biased_measure_passes_statistical_check() {
    let m = biased_params(0.3, 0.4).unwrap();
    let r = stationarity_stat_test(&m, 0.3, 3000, 50, 100, 17).unwrap();
    assert!(r.passed(), "max |z| = {}", r.max_abs_z());
}
