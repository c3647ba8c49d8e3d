//! Lower bound on the variance of any change-time estimator.
//!
//! For a step input through a noisy LTI model, every estimator of the change
//! time has variance at least `max_tau tau^2 / (e^{u^T S(tau) u} - 1)`, where
//! `S(tau)` accumulates the whitened output discrepancy between the two
//! hypotheses "change at `k*`" and "change at `k* + tau`". This module
//! computes that discrepancy matrix, the bound, and an independent
//! trajectory-based evaluation used to cross-check the closed form.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lti::{simulate_noiseless, StepScenario, SystemModel};
use crate::numerics::{forward_substitute, quadratic_form, tol, vec_sub, Matrix};

/// One shift hypothesis: the discrepancy exponent `u^T S(tau) u` and the
/// variance candidate `tau^2 / (e^exponent - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauCandidate {
    pub tau: usize,
    pub exponent: f64,
    pub candidate: f64,
}

/// Result of the bound search over all shifts `tau in {1 .. N - k*}`.
///
/// `bound` is the largest candidate (possibly infinite) and `tau_star` the
/// smallest shift attaining it.
#[derive(Debug, Clone)]
pub struct BoundResult {
    pub tau_star: usize,
    pub bound: f64,
    pub per_tau: Vec<TauCandidate>,
}

/// Variance candidate for one shift, with IEEE-range guards: exponents above
/// `EXPONENT_OVERFLOW` map to exactly zero, exponents at or below
/// `EXPONENT_UNDERFLOW` (including rounding-noise negatives) map to infinity.
pub fn candidate_bound(tau: usize, exponent: f64) -> f64 {
    if exponent > tol::EXPONENT_OVERFLOW {
        0.0
    } else if exponent < tol::EXPONENT_UNDERFLOW {
        f64::INFINITY
    } else {
        (tau * tau) as f64 / exponent.exp_m1()
    }
}

/// Partial sum of state-transition powers weighting the input discrepancy at
/// sample `k` for a change-time shift of `tau`:
/// the sum of `A^(k-1-l)` over `l` from `k*` to `min(k* + tau - 1, k - 1)`.
///
/// Powers are accumulated incrementally, one multiplication per term.
pub fn transition_sum(
    model: &SystemModel,
    k: usize,
    tau: usize,
    k_star: usize,
) -> Result<Matrix> {
    if tau == 0 {
        return Err(Error::DimensionMismatch("shift must be positive".into()));
    }
    if k <= k_star {
        return Err(Error::TimeIndex { k, k_star });
    }
    let a = model.state_matrix();
    let lo = (k - 1) - (k_star + tau - 1).min(k - 1);
    let hi = (k - 1) - k_star;

    let mut power = Matrix::identity(model.state_dim());
    for _ in 0..lo {
        power = a.mul(&power);
    }
    let mut sum = power.clone();
    for _ in lo..hi {
        power = a.mul(&power);
        sum = sum.add(&power);
    }
    Ok(sum)
}

/// Discrepancy matrix `S(tau)`: the sum over `k = k*+1 .. N` of
/// `(C T B)^T Sigma_e^{-1} (C T B)` with `T` the transition sum for sample
/// `k`. The inverse covariance is applied through Cholesky solves and the
/// result is symmetrized.
pub fn energy_matrix(
    model: &SystemModel,
    tau: usize,
    k_star: usize,
    horizon: usize,
) -> Result<Matrix> {
    if tau == 0 || k_star + tau > horizon {
        return Err(Error::DimensionMismatch(format!(
            "shift {tau} outside 1..={}",
            horizon.saturating_sub(k_star)
        )));
    }
    let a = model.state_matrix();
    let b = model.input_matrix();
    let c = model.output_matrix();
    let l = model.noise_cholesky();
    let p = model.input_dim();
    let m = model.output_dim();
    let identity = Matrix::identity(model.state_dim());

    let mut s = Matrix::zeros(p, p);
    // transition = transition_sum(model, k, tau, k_star) maintained
    // incrementally across k: it gains a factor A each step and, while the
    // window is still filling (k - k* <= tau), an extra identity term.
    let mut transition = identity.clone();
    for j in 1..=(horizon - k_star) {
        if j > 1 {
            transition = a.mul(&transition);
            if j <= tau {
                transition = transition.add(&identity);
            }
        }
        let w = c.mul(&transition).mul(b);
        let mut whitened = Matrix::zeros(m, p);
        for col in 0..p {
            whitened.set_column(col, &forward_substitute(l, &w.column(col)));
        }
        s = s.add(&whitened.gram());
    }
    Ok(s.symmetrized())
}

/// Variance lower bound for the scenario's step input, searching all shifts.
///
/// # Examples
///
/// ```
/// use privleak::numerics::Matrix;
/// use privleak::lti::{StepScenario, SystemModel};
/// use privleak::chapman_robbins::bound;
///
/// let model = SystemModel::new(
///     Matrix::from_rows(&[vec![0.0]]).unwrap(),
///     Matrix::from_rows(&[vec![1.0]]).unwrap(),
///     Matrix::from_rows(&[vec![1.0]]).unwrap(),
///     Matrix::from_rows(&[vec![1.0]]).unwrap(),
/// ).unwrap();
/// let scenario = StepScenario::new(vec![1.0], 0, 2, 1).unwrap();
/// let result = bound(&model, &scenario).unwrap();
/// // The two-sample shift wins: 4 / (e^2 - 1) beats 1 / (e - 1).
/// assert_eq!(result.tau_star, 2);
/// assert!((result.bound - 0.6260).abs() < 1e-4);
/// ```
pub fn bound(model: &SystemModel, scenario: &StepScenario) -> Result<BoundResult> {
    let exponents = per_tau_exponents(model, scenario, |tau| {
        let s = energy_matrix(model, tau, scenario.change_time(), scenario.horizon())?;
        Ok(quadratic_form(&s, scenario.step_value()))
    })?;
    Ok(assemble(exponents))
}

/// Same bound re-derived from raw trajectories: for each shift, simulate the
/// two noiseless hypotheses, whiten their per-sample difference with the
/// Cholesky factor of the noise covariance, and sum squared norms. An
/// independent implementation path for cross-checking [`bound`].
pub fn bound_via_trajectories(
    model: &SystemModel,
    scenario: &StepScenario,
) -> Result<BoundResult> {
    let l = model.noise_cholesky();
    let nominal = simulate_noiseless(model, scenario)?;
    let exponents = per_tau_exponents(model, scenario, |tau| {
        let shifted_scenario = scenario.with_change_time(scenario.change_time() + tau)?;
        let shifted = simulate_noiseless(model, &shifted_scenario)?;
        let mut exponent = 0.0;
        for (ya, yb) in nominal.iter().zip(&shifted) {
            let d = forward_substitute(l, &vec_sub(ya, yb));
            exponent += d.iter().map(|x| x * x).sum::<f64>();
        }
        Ok(exponent)
    })?;
    Ok(assemble(exponents))
}

/// Evaluates the exponent for every shift in `1..=N-k*`, in parallel.
fn per_tau_exponents(
    _model: &SystemModel,
    scenario: &StepScenario,
    exponent_at: impl Fn(usize) -> Result<f64> + Sync,
) -> Result<Vec<(usize, f64)>> {
    if scenario.horizon() == scenario.change_time() {
        return Err(Error::EmptyTauRange);
    }
    let range = scenario.horizon() - scenario.change_time();
    (1..=range)
        .into_par_iter()
        .map(|tau| Ok((tau, exponent_at(tau)?)))
        .collect()
}

/// Builds the result table and picks the winning shift: largest candidate,
/// smallest shift on ties. Stored exponents are clamped at zero.
fn assemble(exponents: Vec<(usize, f64)>) -> BoundResult {
    let per_tau: Vec<TauCandidate> = exponents
        .into_iter()
        .map(|(tau, raw)| TauCandidate {
            tau,
            exponent: raw.max(0.0),
            candidate: candidate_bound(tau, raw),
        })
        .collect();
    let best = per_tau
        .iter()
        .fold(None::<&TauCandidate>, |acc, c| match acc {
            Some(prev) if c.candidate > prev.candidate => Some(c),
            None => Some(c),
            _ => acc,
        })
        .expect("shift range is non-empty");
    BoundResult {
        tau_star: best.tau,
        bound: best.candidate,
        per_tau,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{cholesky_solve, dot};

    fn scalar_model(a: f64) -> SystemModel {
        SystemModel::new(
            Matrix::from_rows(&[vec![a]]).unwrap(),
            Matrix::from_rows(&[vec![1.0]]).unwrap(),
            Matrix::from_rows(&[vec![1.0]]).unwrap(),
            Matrix::from_rows(&[vec![1.0]]).unwrap(),
        )
        .unwrap()
    }

    /// Literal triple-loop evaluation of the discrepancy sum with naive
    /// matrix powers; deliberately independent of the incremental path.
    fn energy_matrix_brute(
        model: &SystemModel,
        tau: usize,
        k_star: usize,
        horizon: usize,
    ) -> Matrix {
        let a = model.state_matrix();
        let b = model.input_matrix();
        let c = model.output_matrix();
        let l = model.noise_cholesky();
        let p = model.input_dim();
        let mut s = Matrix::zeros(p, p);
        for k in (k_star + 1)..=horizon {
            let mut t = Matrix::zeros(model.state_dim(), model.state_dim());
            for lidx in k_star..=(k_star + tau - 1).min(k - 1) {
                let mut power = Matrix::identity(model.state_dim());
                for _ in 0..(k - 1 - lidx) {
                    power = a.mul(&power);
                }
                t = t.add(&power);
            }
            let w = c.mul(&t).mul(b);
            let mut term = Matrix::zeros(p, p);
            for i in 0..p {
                let sol = cholesky_solve(l, &w.column(i));
                for j in 0..p {
                    term[(i, j)] = dot(&sol, &w.column(j));
                }
            }
            s = s.add(&term);
        }
        s.symmetrized()
    }

    #[test]
    fn transition_sum_single_term_is_identity() {
        let model = scalar_model(0.7);
        let t = transition_sum(&model, 4, 1, 3).unwrap();
        assert_eq!(t, Matrix::identity(1));
    }

    #[test]
    fn transition_sum_two_terms() {
        let model = SystemModel::new(
            Matrix::from_rows(&[vec![0.2, 0.1], vec![0.0, 0.4]]).unwrap(),
            Matrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap(),
            Matrix::from_rows(&[vec![1.0, 0.0]]).unwrap(),
            Matrix::from_rows(&[vec![1.0]]).unwrap(),
        )
        .unwrap();
        let t = transition_sum(&model, 5, 2, 3).unwrap();
        let expected = model.state_matrix().add(&Matrix::identity(2));
        assert!(t.sub(&expected).frobenius_norm() < 1e-14);
    }

    #[test]
    fn transition_sum_deadbeat_vanishes() {
        let model = scalar_model(0.0);
        let t = transition_sum(&model, 5, 1, 3).unwrap();
        assert_eq!(t[(0, 0)], 0.0);
    }

    #[test]
    fn transition_sum_rejects_early_sample() {
        let model = scalar_model(0.5);
        assert_eq!(
            transition_sum(&model, 3, 1, 3),
            Err(Error::TimeIndex { k: 3, k_star: 3 })
        );
    }

    #[test]
    fn energy_scalar_cases() {
        let model = scalar_model(0.0);
        let s1 = energy_matrix(&model, 1, 0, 2).unwrap();
        assert!((s1[(0, 0)] - 1.0).abs() < 1e-14);
        let s2 = energy_matrix(&model, 2, 0, 2).unwrap();
        assert!((s2[(0, 0)] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn energy_zero_output_map() {
        let model = SystemModel::new(
            Matrix::from_rows(&[vec![0.5]]).unwrap(),
            Matrix::from_rows(&[vec![1.0]]).unwrap(),
            Matrix::from_rows(&[vec![0.0]]).unwrap(),
            Matrix::from_rows(&[vec![1.0]]).unwrap(),
        )
        .unwrap();
        let s = energy_matrix(&model, 2, 1, 6).unwrap();
        assert_eq!(s.frobenius_norm(), 0.0);
    }

    #[test]
    fn energy_matches_brute_force() {
        let model = SystemModel::new(
            Matrix::from_rows(&[vec![0.3, -0.2, 0.0], vec![0.1, 0.4, 0.1], vec![0.0, 0.2, 0.1]])
                .unwrap(),
            Matrix::from_rows(&[vec![1.0, 0.0], vec![0.5, 1.0], vec![0.0, -1.0]]).unwrap(),
            Matrix::from_rows(&[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]]).unwrap(),
            Matrix::from_rows(&[vec![2.0, 0.3], vec![0.3, 1.0]]).unwrap(),
        )
        .unwrap();
        for tau in 1..=4 {
            let fast = energy_matrix(&model, tau, 2, 9).unwrap();
            let brute = energy_matrix_brute(&model, tau, 2, 9);
            assert!(
                fast.sub(&brute).frobenius_norm() <= 1e-12 * brute.frobenius_norm().max(1.0),
                "tau {tau}"
            );
        }
    }

    #[test]
    fn scalar_bound_candidates() {
        let model = scalar_model(0.0);
        let scenario = StepScenario::new(vec![1.0], 0, 2, 1).unwrap();
        let r = bound(&model, &scenario).unwrap();
        assert_eq!(r.per_tau.len(), 2);
        assert!((r.per_tau[0].candidate - 1.0 / 1.0_f64.exp_m1()).abs() < 1e-12);
        assert!((r.per_tau[1].candidate - 4.0 / 2.0_f64.exp_m1()).abs() < 1e-12);
        assert!((r.per_tau[0].candidate - 0.5820).abs() < 1e-4);
        assert!((r.per_tau[1].candidate - 0.6260).abs() < 1e-4);
        assert_eq!(r.tau_star, 2);
        assert!((r.bound - 0.6260).abs() < 1e-4);
    }

    #[test]
    fn larger_step_switches_tau_star() {
        let model = scalar_model(0.0);
        let scenario = StepScenario::new(vec![2.0], 0, 2, 1).unwrap();
        let r = bound(&model, &scenario).unwrap();
        assert!((r.per_tau[0].exponent - 4.0).abs() < 1e-12);
        assert!((r.per_tau[1].exponent - 8.0).abs() < 1e-12);
        assert_eq!(r.tau_star, 1);
        assert!((r.bound - 0.01866).abs() < 1e-5);
    }

    #[test]
    fn zero_step_is_unbounded() {
        let model = scalar_model(0.4);
        let scenario = StepScenario::new(vec![0.0], 1, 5, 1).unwrap();
        let r = bound(&model, &scenario).unwrap();
        assert!(r.bound.is_infinite());
        assert!(r.per_tau.iter().all(|c| c.exponent == 0.0));
        assert_eq!(r.tau_star, 1);
        let o = bound_via_trajectories(&model, &scenario).unwrap();
        assert!(o.bound.is_infinite());
    }

    #[test]
    fn null_direction_is_unbounded() {
        // Second input column is the exact negation of the first, so the
        // direction (1, 1)/sqrt 2 never reaches the output.
        let model = SystemModel::new(
            Matrix::from_rows(&[vec![0.5, 0.1], vec![0.0, 0.3]]).unwrap(),
            Matrix::from_rows(&[vec![1.0, -1.0], vec![0.5, -0.5]]).unwrap(),
            Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap(),
            Matrix::from_rows(&[vec![1.0]]).unwrap(),
        )
        .unwrap();
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        let scenario = StepScenario::new(vec![inv_sqrt2, inv_sqrt2], 1, 8, 2).unwrap();
        let r = bound(&model, &scenario).unwrap();
        assert!(r.bound.is_infinite());
    }

    #[test]
    fn empty_shift_range_is_rejected() {
        let model = scalar_model(0.0);
        let scenario = StepScenario::new(vec![1.0], 3, 3, 1).unwrap();
        assert!(matches!(bound(&model, &scenario), Err(Error::EmptyTauRange)));
    }

    #[test]
    fn matches_trajectory_oracle() {
        let model = SystemModel::new(
            Matrix::from_rows(&[vec![0.3, -0.2], vec![0.1, 0.4]]).unwrap(),
            Matrix::from_rows(&[vec![1.0, 0.2], vec![0.5, 1.0]]).unwrap(),
            Matrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap(),
            Matrix::from_rows(&[vec![1.5, 0.2], vec![0.2, 0.8]]).unwrap(),
        )
        .unwrap();
        let scenario = StepScenario::new(vec![0.7, -0.4], 2, 12, 2).unwrap();
        let fast = bound(&model, &scenario).unwrap();
        let oracle = bound_via_trajectories(&model, &scenario).unwrap();
        for (a, b) in fast.per_tau.iter().zip(&oracle.per_tau) {
            assert!(
                (a.exponent - b.exponent).abs() <= 1e-9 * b.exponent.max(1.0),
                "tau {}: {} vs {}",
                a.tau,
                a.exponent,
                b.exponent
            );
        }
        assert_eq!(fast.tau_star, oracle.tau_star);
    }

    #[test]
    fn exponent_scale_law() {
        let model = scalar_model(0.6);
        let base = StepScenario::new(vec![0.9], 1, 7, 1).unwrap();
        let scaled = StepScenario::new(vec![2.7], 1, 7, 1).unwrap();
        let rb = bound(&model, &base).unwrap();
        let rs = bound(&model, &scaled).unwrap();
        for (a, b) in rb.per_tau.iter().zip(&rs.per_tau) {
            assert!((9.0 * a.exponent - b.exponent).abs() <= 1e-10 * b.exponent.max(1.0));
        }
    }

    #[test]
    fn overflow_and_underflow_guards() {
        assert_eq!(candidate_bound(3, 701.0), 0.0);
        assert!(candidate_bound(3, 0.0).is_infinite());
        assert!(candidate_bound(3, -1e-18).is_infinite());
        assert!(candidate_bound(2, 1.0).is_finite());
    }
}
