use std::collections::BTreeMap;

use aztec_core::height::{average_height, fit_affine, height_function};
use aztec_core::regions::{arctic_to_partition, circle_deviation, growth_distribution_exact, Partition};
use aztec_core::geometry::Tiling;
use aztec_core::shuffle::map_replicas;

#[test]
fn biased_north_region_matches_growth_law() {
    let (n, p, samples) = (3, 0.3, 100_000usize);
    let parts = map_replicas(n, p, 1_000, samples, |_, t| arctic_to_partition(&t).unwrap()).unwrap();
    let mut counts: BTreeMap<Partition, usize> = BTreeMap::new();
    for part in parts {
        *counts.entry(part).or_default() += 1;
    }
    let law = growth_distribution_exact(n, &p).unwrap();
    assert!(counts.keys().all(|k| law.contains_key(k)));
    for (part, &w) in &law {
        let f = counts.get(part).copied().unwrap_or(0) as f64 / samples as f64;
        let sigma = (w * (1.0 - w) / samples as f64).sqrt();
        assert!((f - w).abs() <= 3.0 * sigma, "{part}: {f} vs {w}");
    }
}

#[test]
fn average_height_is_not_a_plane() {
    let n = 32;
    let avg = average_height(n, 1000, 0.5, 77).unwrap();
    let fixed = height_function(&Tiling::all_horizontal(n)).unwrap();
    for &(x, y, h) in &avg.values {
        if x.abs() + y.abs() == n as i32 {
            assert_eq!(h, fixed.get(x, y).unwrap() as f64);
        }
    }
    let fit = fit_affine(&avg.values);
    assert!(fit.max_residual > 0.5, "{fit:?}");
}

#[test]
fn moderate_order_tracks_the_circle() {
    let devs = map_replicas(128, 0.5, 40, 4, |_, t| circle_deviation(&t).unwrap()).unwrap();
    for d in devs {
        assert!(d < 0.12, "{d}");
    }
}
