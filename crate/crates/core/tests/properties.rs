use aztec_core::geometry::{validate_tiling, Orientation, Tiling};
use aztec_core::height::height_function;
use aztec_core::measures::{all_patterns, biased_params, cylinder_prob};
use aztec_core::regions::{growth_step, partition_to_bits, Partition};
use aztec_core::shuffle::{
    generate, generate_with_tape, replay, reverse_holes, reverse_step, shuffle_step, BiasedCoins,
};
use aztec_core::tasep::ParticleState;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shuffling_yields_valid_tilings(order in 0u32..16, p in 0.0f64..=1.0, seed: u64) {
        let (t, tape) = generate_with_tape(order, p, seed).unwrap();
        prop_assert!(validate_tiling(order, t.dominoes()).is_valid());
        prop_assert_eq!(t.len() as u32, order * (order + 1));
        prop_assert_eq!(replay(order, &tape).unwrap(), t.clone());
        prop_assert_eq!(generate(order, p, seed).unwrap(), t);
    }

    #[test]
    fn reverse_step_recovers_the_predecessor(order in 0u32..12, seed: u64, step_seed: u64) {
        let s = generate(order, 0.5, seed).unwrap();
        let mut coins = BiasedCoins::seeded(step_seed, 0.5).unwrap();
        let out = shuffle_step(&s, &mut coins).unwrap();
        prop_assert_eq!(out.holes.len(), out.destroyed + order as usize + 1);
        let choices: Vec<bool> = reverse_holes(&out.tiling)
            .unwrap()
            .into_iter()
            .map(|h| s.dominoes()[s.domino_at(h).unwrap()].orientation == Orientation::Horizontal)
            .collect();
        prop_assert_eq!(reverse_step(&out.tiling, &choices).unwrap(), s);
    }

    #[test]
    fn rotation_has_order_four(order in 0u32..12, seed: u64) {
        let t = generate(order, 0.5, seed).unwrap();
        let r = t.rotate_quarter();
        prop_assert_eq!(r.horizontal_count(), t.len() - t.horizontal_count());
        prop_assert_eq!(r.rotate_quarter().rotate_quarter().rotate_quarter(), t);
    }

    #[test]
    fn height_boundary_is_fixed(order in 1u32..14, seed: u64) {
        let t = generate(order, 0.5, seed).unwrap();
        let f = height_function(&t).unwrap();
        let base = height_function(&Tiling::all_horizontal(order)).unwrap();
        prop_assert_eq!(f.boundary(), base.boundary());
    }

    #[test]
    fn corners_are_mobile_particles(seed: u64, steps in 0u32..25) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut part = Partition::empty();
        for _ in 0..steps {
            part = growth_step(&part, 0.5, &mut rng).unwrap();
        }
        let r = steps as i64 + 2;
        let bits = partition_to_bits(&part, -r, r).unwrap();
        prop_assert_eq!(bits.mobile().len(), part.growth_corners().len());
        let wedge = ParticleState::wedge_for(steps);
        prop_assert_eq!(bits.count_right(-r - 1).unwrap(), wedge.count_right(-r - 1).unwrap());
    }

    #[test]
    fn line_steps_conserve_particles(seed: u64, p in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = ParticleState::wedge_for(30);
        let total = s.count_right(s.lo() - 1).unwrap();
        for _ in 0..30 {
            s.step_line(p, &mut rng).unwrap();
        }
        prop_assert_eq!(s.count_right(s.lo() - 1).unwrap(), total);
    }

    #[test]
    fn cylinders_sum_to_one(p in 0.01f64..=1.0, d in 0.0f64..=1.0, len in 1usize..7) {
        let m = biased_params(p, d).unwrap();
        let total: f64 = all_patterns(len)
            .into_iter()
            .filter(|b| b.len() == len)
            .map(|b| cylinder_prob(&m, &b))
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }
}
