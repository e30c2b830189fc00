use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spikescore::lab::properness::RESOLUTION;
use spikescore::lab::{
    brute_force_argmax, expected_score, gamma_t, random_instance, DiscreteDistribution, UsefulnessEstimator,
    WeightGrid,
};
use spikescore::{Regularizer, ScoringConfig, StateVector, WeightVector};

fn regularizer() -> impl Strategy<Value = Regularizer> {
    prop_oneof![Just(Regularizer::L2), Just(Regularizer::LH), Just(Regularizer::L1)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn l1_oracle_lands_on_corners(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, cfg) = random_instance(&mut rng, Regularizer::L1, -1.0).unwrap();
        let grid = WeightGrid::covering(&p, &cfg);
        for selective in [false, true] {
            let w = brute_force_argmax(&p, &cfg, &grid, selective).unwrap();
            for v in w {
                prop_assert!(v <= RESOLUTION || v >= 1.0 - RESOLUTION, "{v}");
            }
        }
    }

    #[test]
    fn expected_score_is_linear_in_the_mixture(
        seed in any::<u64>(),
        lambda in 0.0f64..=1.0,
        reg in regularizer(),
        selective in any::<bool>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = 3;
        let a = DiscreteDistribution::random(&mut rng, dim, 4, -1.0, 1.0).unwrap();
        // Reuse a's utilities on shared states so the mixture is defined.
        let mut b = DiscreteDistribution::random(&mut rng, dim, 4, -1.0, 1.0).unwrap();
        let rows: Vec<_> = b
            .outcomes()
            .iter()
            .map(|o| {
                let mut o = o.clone();
                if let Some(shared) = a.outcomes().iter().find(|q| q.state == o.state) {
                    o.utility = shared.utility;
                }
                o
            })
            .collect();
        b = DiscreteDistribution::new(rows).unwrap();
        let cfg = ScoringConfig::new(reg, 1.3, 0.4).unwrap();
        let w = WeightVector::dense(vec![0.2, 0.7, 0.9]);
        let m = DiscreteDistribution::mix(&a, &b, lambda).unwrap();
        let lhs = expected_score(&m, &w, &cfg, selective).unwrap();
        let rhs = lambda * expected_score(&a, &w, &cfg, selective).unwrap()
            + (1.0 - lambda) * expected_score(&b, &w, &cfg, selective).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn gamma_t_beats_every_grid_point(seed in any::<u64>(), reg in regularizer()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, cfg) = random_instance(&mut rng, reg, -1.0).unwrap();
        let best = expected_score(&p, &WeightVector::dense(gamma_t(&p, &cfg)), &cfg, false).unwrap();
        let grid = WeightGrid::covering(&p, &cfg);
        let mut point = vec![0.0; p.dim()];
        for code in 0..(grid.steps.pow(p.dim() as u32)) {
            let mut c = code;
            for (a, v) in point.iter_mut().enumerate() {
                *v = grid.lo[a] + (c % grid.steps) as f64 * grid.step(a);
                c /= grid.steps;
            }
            let s = expected_score(&p, &WeightVector::dense(point.clone()), &cfg, false).unwrap();
            prop_assert!(s <= best + 1e-12, "grid point {point:?} scores {s} > {best}");
        }
    }

    #[test]
    fn l2_gap_tracks_the_difference(
        drive in prop::collection::vec(0.0f64..1.0, 1..20),
        shift in 0.0f64..1.0,
        eta in 0.1f64..3.0,
    ) {
        let cfg = ScoringConfig::new(Regularizer::L2, eta, 0.5).unwrap();
        let mut near = UsefulnessEstimator::new(1, 1);
        let mut far = UsefulnessEstimator::new(1, 1);
        for &d in &drive {
            near.observe(&[true], &[true], &[d], &[d + 0.5 * shift]).unwrap();
            far.observe(&[true], &[true], &[d], &[d + shift]).unwrap();
        }
        let g_near = near.gap(0, true, &[true], &cfg).unwrap();
        let g_far = far.gap(0, true, &[true], &cfg).unwrap();
        prop_assert!(g_near >= 0.0 && g_near <= g_far + 1e-12);
        prop_assert!((g_far - eta * shift).abs() < 1e-9);
    }
}

#[test]
fn zero_utility_oracle_is_silent() {
    let p = DiscreteDistribution::from_table(&[(&[1, 0, 1], 0.5, 0.0), (&[0, 1, 1], 0.5, 0.0)]).unwrap();
    for reg in [Regularizer::L2, Regularizer::L1] {
        let cfg = ScoringConfig::new(reg, 1.0, 0.5).unwrap();
        let w = brute_force_argmax(&p, &cfg, &WeightGrid::covering(&p, &cfg), false).unwrap();
        assert!(w.iter().all(|v| v.abs() <= RESOLUTION), "{reg}: {w:?}");
    }
}

#[test]
fn point_mass_score_equals_outcome_score() {
    let x = StateVector::from_bits(&[1, 1, 0]).unwrap();
    let mu = spikescore::Utility::new(-0.3).unwrap();
    let p = DiscreteDistribution::point_mass(x.clone(), mu);
    let cfg = ScoringConfig::new(Regularizer::LH, 0.7, 0.2).unwrap();
    let w = WeightVector::dense(vec![0.4, 0.1, 0.8]);
    let direct = spikescore::scoring::score(&x, &w, mu, &cfg).unwrap();
    assert_eq!(expected_score(&p, &w, &cfg, true).unwrap(), direct);
}
