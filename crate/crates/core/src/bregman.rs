//! Bregman divergences and the scoring rules built from convex potentials.
//!
//! For convex `F`, `S_F(x; w) = -D_F(rho(x), w) - F(rho(x))` is maximized in
//! expectation by `w = E[rho(x)]`. With `F = ‖·‖² / 2η` and
//! `rho(x) = η mu(x) x` this is the selectivity-free `L2` score up to a
//! constant that does not depend on `w`.

use crate::error::{check_len, Result};
use crate::state::StateVector;

/// A differentiable convex function supplied pointwise.
pub trait ConvexPotential {
    fn value(&self, v: &[f64]) -> f64;
    fn gradient(&self, v: &[f64]) -> Vec<f64>;
}

/// Wraps a pair of closures `(F, ∇F)`.
pub struct FnPotential<F, G> {
    pub f: F,
    pub grad: G,
}

impl<F, G> ConvexPotential for FnPotential<F, G>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    fn value(&self, v: &[f64]) -> f64 {
        (self.f)(v)
    }

    fn gradient(&self, v: &[f64]) -> Vec<f64> {
        (self.grad)(v)
    }
}

/// `‖v‖² / 2η`.
#[derive(Clone, Copy, Debug)]
pub struct Quadratic {
    pub eta: f64,
}

impl ConvexPotential for Quadratic {
    fn value(&self, v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>() / (2.0 * self.eta)
    }

    fn gradient(&self, v: &[f64]) -> Vec<f64> {
        v.iter().map(|x| x / self.eta).collect()
    }
}

/// `η log Σ exp(v_i / η)`.
#[derive(Clone, Copy, Debug)]
pub struct LogSumExp {
    pub eta: f64,
}

impl ConvexPotential for LogSumExp {
    fn value(&self, v: &[f64]) -> f64 {
        let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !m.is_finite() {
            return m;
        }
        let s: f64 = v.iter().map(|x| ((x - m) / self.eta).exp()).sum();
        m + self.eta * s.ln()
    }

    fn gradient(&self, v: &[f64]) -> Vec<f64> {
        let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = v.iter().map(|x| ((x - m) / self.eta).exp()).collect();
        let s: f64 = e.iter().sum();
        e.into_iter().map(|x| x / s).collect()
    }
}

/// `Σ v log v / η` on the positive orthant.
#[derive(Clone, Copy, Debug)]
pub struct NegEntropy {
    pub eta: f64,
}

impl ConvexPotential for NegEntropy {
    fn value(&self, v: &[f64]) -> f64 {
        v.iter().map(|&x| x * x.ln()).sum::<f64>() / self.eta
    }

    fn gradient(&self, v: &[f64]) -> Vec<f64> {
        v.iter().map(|&x| (x.ln() + 1.0) / self.eta).collect()
    }
}

/// `D_F(a, b) = F(a) - F(b) - <∇F(b), a - b>`.
pub fn bregman<P: ConvexPotential + ?Sized>(potential: &P, a: &[f64], b: &[f64]) -> Result<f64> {
    check_len(a.len(), b.len())?;
    let grad = potential.gradient(b);
    check_len(a.len(), grad.len())?;
    let inner: f64 = grad.iter().zip(a.iter().zip(b)).map(|(g, (x, y))| g * (x - y)).sum();
    Ok(potential.value(a) - potential.value(b) - inner)
}

/// `S_F(x; w) = -D_F(rho(x), w) - F(rho(x))`.
pub fn proper_score_from_convex<P, R>(potential: &P, rho: R, x: &StateVector, w: &[f64]) -> Result<f64>
where
    P: ConvexPotential + ?Sized,
    R: Fn(&StateVector) -> Vec<f64>,
{
    let r = rho(x);
    Ok(-bregman(potential, &r, w)? - potential.value(&r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_and_half_squared_distance() {
        let q = Quadratic { eta: 1.0 };
        assert_eq!(bregman(&q, &[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(bregman(&q, &[1.0, 0.0], &[0.0, 0.0]).unwrap(), 0.5);
        assert!(bregman(&q, &[1.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn closure_handles_match_builtin() {
        let handles = FnPotential {
            f: |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>() / 2.0,
            grad: |v: &[f64]| v.to_vec(),
        };
        let a = [0.3, -1.2, 2.0];
        let b = [1.0, 0.5, -0.25];
        let d1 = bregman(&handles, &a, &b).unwrap();
        let d2 = bregman(&Quadratic { eta: 1.0 }, &a, &b).unwrap();
        assert!((d1 - d2).abs() < 1e-14);
    }

    #[test]
    fn score_at_report_equal_to_rho() {
        let q = Quadratic { eta: 2.0 };
        let x = StateVector::from_bits(&[1, 0, 1]).unwrap();
        let rho = |x: &StateVector| x.to_f64();
        let r = rho(&x);
        let s = proper_score_from_convex(&q, rho, &x, &r).unwrap();
        assert!((s + q.value(&r)).abs() < 1e-15);
    }

    #[test]
    fn quadratic_instance_matches_selectivity_free_l2_score() {
        // With rho(x) = η mu x the construction equals <mu x, w> - ‖w‖²/2η
        // plus a constant that depends on x only.
        let eta = 1.7;
        let q = Quadratic { eta };
        let x = StateVector::from_bits(&[1, 1, 0]).unwrap();
        let mu = -0.6;
        let rho = |x: &StateVector| x.to_f64().into_iter().map(|v| eta * mu * v).collect::<Vec<_>>();
        let direct = |w: &[f64]| {
            let lin: f64 = x.to_f64().iter().zip(w).map(|(a, b)| mu * a * b).sum();
            lin - w.iter().map(|v| v * v).sum::<f64>() / (2.0 * eta)
        };
        let mut offsets = Vec::new();
        for a in -4..=4 {
            for b in -4..=4 {
                for c in -4..=4 {
                    let w = [a as f64 * 0.25, b as f64 * 0.25, c as f64 * 0.25];
                    let s = proper_score_from_convex(&q, rho, &x, &w).unwrap();
                    offsets.push(s - direct(&w));
                }
            }
        }
        let first = offsets[0];
        assert!(offsets.iter().all(|o| (o - first).abs() < 1e-12));
    }

    fn vec3() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-3.0f64..3.0, 3)
    }

    proptest! {
        #[test]
        fn quadratic_divergence_nonnegative(a in vec3(), b in vec3(), eta in 0.1f64..5.0) {
            let q = Quadratic { eta };
            prop_assert!(bregman(&q, &a, &b).unwrap() >= -1e-12);
            prop_assert!(bregman(&q, &a, &a).unwrap().abs() < 1e-12);
        }

        #[test]
        fn log_sum_exp_divergence_nonnegative(a in vec3(), b in vec3(), eta in 0.1f64..5.0) {
            let p = LogSumExp { eta };
            prop_assert!(bregman(&p, &a, &b).unwrap() >= -1e-9);
            prop_assert!(bregman(&p, &a, &a).unwrap().abs() < 1e-9);
        }

        #[test]
        fn random_convex_quadratic_nonnegative(
            l in prop::collection::vec(-2.0f64..2.0, 9),
            a in vec3(),
            b in vec3(),
        ) {
            // F(v) = ½ vᵀ LLᵀ v is convex for any L.
            let m = |i: usize, j: usize| (0..3).map(|k| l[i * 3 + k] * l[j * 3 + k]).sum::<f64>();
            let p = FnPotential {
                f: |v: &[f64]| {
                    let mut s = 0.0;
                    for i in 0..3 { for j in 0..3 { s += 0.5 * v[i] * m(i, j) * v[j]; } }
                    s
                },
                grad: |v: &[f64]| (0..3).map(|i| (0..3).map(|j| m(i, j) * v[j]).sum()).collect(),
            };
            prop_assert!(bregman(&p, &a, &b).unwrap() >= -1e-9);
        }
    }
}
