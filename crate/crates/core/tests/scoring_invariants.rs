use proptest::prelude::*;
use spikescore::bregman::{bregman, proper_score_from_convex, NegEntropy, Quadratic};
use spikescore::scoring::{
    activate, grad_update, g_scalar, penalty_gradient, reward, score, synapse_score, WEIGHT_FLOOR,
};
use spikescore::{Regularizer, ScoringConfig, StateVector, Utility, WeightVector};

const DIM: usize = 5;

fn regularizer() -> impl Strategy<Value = Regularizer> {
    prop_oneof![Just(Regularizer::L2), Just(Regularizer::LH), Just(Regularizer::L1)]
}

fn state() -> impl Strategy<Value = StateVector> {
    prop::collection::vec(any::<bool>(), DIM).prop_map(|b| StateVector::from_bools(&b))
}

/// Weights inside every regularizer's domain, away from the LH floor.
fn weights() -> impl Strategy<Value = WeightVector> {
    (prop::collection::vec(0.01f64..0.99, DIM), prop::collection::vec(prop::bool::weighted(0.8), DIM))
        .prop_map(|(w, m)| WeightVector::masked(w, m).unwrap())
}

fn utility() -> impl Strategy<Value = Utility> {
    (-2.0f64..2.0).prop_map(|v| Utility::new(v).unwrap())
}

fn scoring(reg: Regularizer, eta: f64, theta: f64) -> ScoringConfig {
    ScoringConfig::new(reg, eta, theta).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn reward_is_gated_by_the_spike(x in state(), w in weights(), mu in utility(), theta in 0.0f64..3.0) {
        if !activate(&w, &x, theta).unwrap() {
            prop_assert_eq!(reward(&x, &w, mu, theta).unwrap(), 0.0);
        }
    }

    #[test]
    fn update_matches_finite_differences(
        x in state(), w in weights(), mu in utility(), reg in regularizer(),
        eta in 0.3f64..3.0, theta in 0.0f64..3.0,
    ) {
        let margin = w.dot(&x).unwrap() - theta;
        prop_assume!(margin.abs() > 1e-3);
        let cfg = scoring(reg, eta, theta);
        let lr = 1e-3;
        let next = grad_update(&cfg, &w, &x, mu, lr).unwrap();
        let h = 1e-6;
        for i in w.active() {
            let at = |shift: f64| {
                let mut v = w.clone();
                v.set(i, w.get(i) + shift);
                score(&x, &v, mu, &cfg).unwrap()
            };
            let fd = (at(h) - at(-h)) / (2.0 * h);
            let step = (next.get(i) - w.get(i)) / lr;
            let scale = fd.abs().max(step.abs());
            let err = if scale < 1e-3 { (fd - step).abs() } else { (fd - step).abs() / scale };
            prop_assert!(err <= 1e-5, "{reg} synapse {i}: step {step} vs fd {fd}");
        }
    }

    #[test]
    fn updates_stay_in_the_domain(
        steps in prop::collection::vec((state(), utility()), 1..60),
        reg in regularizer(), eta in 0.1f64..3.0, lr in 0.01f64..2.0,
    ) {
        let cfg = scoring(reg, eta, 0.5);
        let mut w = WeightVector::dense(vec![0.5; DIM]);
        for (x, mu) in &steps {
            w = grad_update(&cfg, &w, x, *mu, lr).unwrap();
            for &v in w.as_slice() {
                match reg {
                    Regularizer::L1 => prop_assert!((0.0..=1.0).contains(&v)),
                    Regularizer::LH => prop_assert!(v >= WEIGHT_FLOOR),
                    Regularizer::L2 => prop_assert!(v.is_finite()),
                }
            }
        }
    }

    #[test]
    fn synapse_scores_add_up(
        x in state(), w in weights(), mu in utility(), reg in regularizer(),
        eta in 0.3f64..3.0, theta in 0.0f64..3.0,
    ) {
        prop_assume!(w.active_count() > 0);
        let cfg = scoring(reg, eta, theta);
        let parts: f64 = (0..DIM).map(|i| synapse_score(&x, &w, mu, &cfg, i).unwrap()).sum();
        let whole = score(&x, &w, mu, &cfg).unwrap();
        prop_assert!((parts - whole).abs() <= 1e-12 * whole.abs().max(1.0), "{parts} vs {whole}");
    }

    #[test]
    fn penalty_vanishes_at_the_link(v in -1.0f64..1.0, eta in 0.1f64..3.0) {
        for reg in [Regularizer::L2, Regularizer::LH] {
            let cfg = scoring(reg, eta, 0.0);
            prop_assert!((v - penalty_gradient(&cfg, g_scalar(&cfg, v))).abs() < 1e-12);
        }
    }

    #[test]
    fn bregman_is_nonnegative(
        a in prop::collection::vec(0.01f64..5.0, DIM),
        b in prop::collection::vec(0.01f64..5.0, DIM),
        eta in 0.1f64..3.0,
    ) {
        let (q, h) = (Quadratic { eta }, NegEntropy { eta });
        for d in [bregman(&q, &a, &b).unwrap(), bregman(&h, &a, &b).unwrap()] {
            prop_assert!(d >= -1e-12, "{d}");
        }
        prop_assert!(bregman(&q, &a, &a).unwrap().abs() < 1e-12);
        prop_assert!(bregman(&h, &a, &a).unwrap().abs() < 1e-12);
    }

    /// The quadratic Bregman score differs from the ungated L2 score by a
    /// quantity that does not depend on the weights.
    #[test]
    fn quadratic_bregman_score_is_l2_up_to_a_constant(
        x in state(), mu in utility(), eta in 0.3f64..3.0,
        w1 in prop::collection::vec(-2.0f64..2.0, DIM),
        w2 in prop::collection::vec(-2.0f64..2.0, DIM),
    ) {
        let q = Quadratic { eta };
        let rho = |s: &StateVector| s.to_f64().iter().map(|v| eta * mu.get() * v).collect::<Vec<_>>();
        let t2 = |w: &[f64]| {
            let reward: f64 = w.iter().zip(x.to_f64()).map(|(wi, xi)| mu.get() * xi * wi).sum();
            reward - w.iter().map(|v| v * v).sum::<f64>() / (2.0 * eta)
        };
        let d1 = proper_score_from_convex(&q, rho, &x, &w1).unwrap() - t2(&w1);
        let d2 = proper_score_from_convex(&q, rho, &x, &w2).unwrap() - t2(&w2);
        prop_assert!((d1 - d2).abs() < 1e-9, "{d1} vs {d2}");
    }
}
