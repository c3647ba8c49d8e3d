//! Discrete-time LTI model with additive Gaussian output noise, and the step
//! scenario whose change time is the quantity under attack.

use crate::error::{Error, Result};
use crate::noise;
use crate::numerics::{cholesky, solve_linear, tol, vec_add, Matrix};

/// State-space model `x_{k+1} = A x_k + B u_k`, `y_k = C x_k + e_k` with
/// `e_k ~ N(0, sigma_e)`.
///
/// Construction validates dimensions, requires `sigma_e` to be positive
/// definite, and caches a stability flag. Simulation tolerates unstable
/// state matrices; steady-state and optimization routines refuse them.
#[derive(Debug, Clone)]
pub struct SystemModel {
    a: Matrix,
    b: Matrix,
    c: Matrix,
    sigma_e: Matrix,
    noise_factor: Matrix,
    stable: bool,
}

impl SystemModel {
    pub fn new(a: Matrix, b: Matrix, c: Matrix, sigma_e: Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "state matrix must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        if b.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "input matrix has {} rows, expected {}",
                b.rows(),
                n
            )));
        }
        if c.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "output matrix has {} columns, expected {}",
                c.cols(),
                n
            )));
        }
        if sigma_e.rows() != c.rows() || !sigma_e.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "noise covariance is {}x{}, expected {}x{}",
                sigma_e.rows(),
                sigma_e.cols(),
                c.rows(),
                c.rows()
            )));
        }
        let noise_factor = cholesky(&sigma_e)?;
        let stable = spectral_radius_upper(&a) < 1.0 - tol::STABILITY_MARGIN;
        Ok(Self {
            a,
            b,
            c,
            sigma_e,
            noise_factor,
            stable,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.c.rows()
    }

    pub fn state_matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn input_matrix(&self) -> &Matrix {
        &self.b
    }

    pub fn output_matrix(&self) -> &Matrix {
        &self.c
    }

    pub fn noise_covariance(&self) -> &Matrix {
        &self.sigma_e
    }

    /// Lower-triangular Cholesky factor of the noise covariance.
    pub fn noise_cholesky(&self) -> &Matrix {
        &self.noise_factor
    }

    pub fn is_stable(&self) -> bool {
        self.stable
    }
}

/// Step input: zero before the change time, `u` from it onward.
#[derive(Debug, Clone)]
pub struct StepScenario {
    u: Vec<f64>,
    k_star: usize,
    horizon: usize,
    x0: Vec<f64>,
}

impl StepScenario {
    /// Scenario with explicit initial state.
    pub fn with_initial_state(
        u: Vec<f64>,
        k_star: usize,
        horizon: usize,
        x0: Vec<f64>,
    ) -> Result<Self> {
        if horizon < k_star {
            return Err(Error::DimensionMismatch(format!(
                "horizon {horizon} is shorter than the change time {k_star}"
            )));
        }
        if u.iter().chain(x0.iter()).any(|x| !x.is_finite()) {
            return Err(Error::DimensionMismatch(
                "step value and initial state must be finite".into(),
            ));
        }
        Ok(Self {
            u,
            k_star,
            horizon,
            x0,
        })
    }

    /// Scenario started from the zero state.
    pub fn new(u: Vec<f64>, k_star: usize, horizon: usize, state_dim: usize) -> Result<Self> {
        Self::with_initial_state(u, k_star, horizon, vec![0.0; state_dim])
    }

    pub fn step_value(&self) -> &[f64] {
        &self.u
    }

    pub fn change_time(&self) -> usize {
        self.k_star
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn initial_state(&self) -> &[f64] {
        &self.x0
    }

    /// Same step and horizon with a different change time.
    pub fn with_change_time(&self, k_star: usize) -> Result<Self> {
        Self::with_initial_state(self.u.clone(), k_star, self.horizon, self.x0.clone())
    }

    fn check_dims(&self, model: &SystemModel) -> Result<()> {
        if self.u.len() != model.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "step value has {} entries, model has {} inputs",
                self.u.len(),
                model.input_dim()
            )));
        }
        if self.x0.len() != model.state_dim() {
            return Err(Error::DimensionMismatch(format!(
                "initial state has {} entries, model has {} states",
                self.x0.len(),
                model.state_dim()
            )));
        }
        Ok(())
    }
}

/// Noise-free output sequence `y_0 .. y_N` under the step scenario.
///
/// # Examples
///
/// ```
/// use privleak::numerics::Matrix;
/// use privleak::lti::{simulate_noiseless, StepScenario, SystemModel};
///
/// // One-sample delay: the step at k* = 2 first shows up in y_3.
/// let model = SystemModel::new(
///     Matrix::from_rows(&[vec![0.0]]).unwrap(),
///     Matrix::from_rows(&[vec![1.0]]).unwrap(),
///     Matrix::from_rows(&[vec![1.0]]).unwrap(),
///     Matrix::from_rows(&[vec![1.0]]).unwrap(),
/// ).unwrap();
/// let scenario = StepScenario::new(vec![1.0], 2, 4, 1).unwrap();
/// let y: Vec<f64> = simulate_noiseless(&model, &scenario)
///     .unwrap()
///     .iter()
///     .map(|yk| yk[0])
///     .collect();
/// assert_eq!(y, vec![0.0, 0.0, 0.0, 1.0, 1.0]);
/// ```
pub fn simulate_noiseless(
    model: &SystemModel,
    scenario: &StepScenario,
) -> Result<Vec<Vec<f64>>> {
    scenario.check_dims(model)?;
    let forced = model.b.matvec(&scenario.u);
    let mut x = scenario.x0.clone();
    let mut outputs = Vec::with_capacity(scenario.horizon + 1);
    for k in 0..=scenario.horizon {
        outputs.push(model.c.matvec(&x));
        if k == scenario.horizon {
            break;
        }
        let mut next = model.a.matvec(&x);
        if k >= scenario.k_star {
            next = vec_add(&next, &forced);
        }
        x = next;
    }
    Ok(outputs)
}

/// Noisy output sequence: the noiseless response plus `L z_k`, where `L` is
/// the Cholesky factor of the noise covariance and `z_k` are standard-normal
/// draws from a counter-based generator keyed by `(seed, k)`. Identical
/// `(model, scenario, seed)` gives bit-identical output.
pub fn simulate_noisy(
    model: &SystemModel,
    scenario: &StepScenario,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let mut outputs = simulate_noiseless(model, scenario)?;
    let m = model.output_dim();
    for (k, y) in outputs.iter_mut().enumerate() {
        let z: Vec<f64> = (0..m)
            .map(|i| noise::standard_normal(seed, (k * m + i) as u64))
            .collect();
        let e = model.noise_factor.matvec(&z);
        for (yi, ei) in y.iter_mut().zip(&e) {
            *yi += ei;
        }
    }
    Ok(outputs)
}

/// Steady state `x_ss = (I - A)^{-1} B u`.
///
/// Reports [`Error::Singular`] when `I - A` is numerically singular, which
/// signals an integrator or marginally stable mode.
pub fn steady_state(model: &SystemModel, u: &[f64]) -> Result<Vec<f64>> {
    if u.len() != model.input_dim() {
        return Err(Error::DimensionMismatch(format!(
            "input has {} entries, model has {} inputs",
            u.len(),
            model.input_dim()
        )));
    }
    let i_minus_a = Matrix::identity(model.state_dim()).sub(&model.a);
    solve_linear(&i_minus_a, &model.b.matvec(u))
}

/// Input-to-steady-state map `G = (I - A)^{-1} B`, solved column by column.
pub(crate) fn steady_state_map(model: &SystemModel) -> Result<Matrix> {
    let n = model.state_dim();
    let p = model.input_dim();
    let i_minus_a = Matrix::identity(n).sub(&model.a);
    let mut g = Matrix::zeros(n, p);
    for j in 0..p {
        let col = solve_linear(&i_minus_a, &model.b.column(j))?;
        g.set_column(j, &col);
    }
    Ok(g)
}

/// Upper estimate of the spectral radius via Gelfand's formula with repeated
/// squaring: `rho(A) <= ||A^k||_F^(1/k)`, evaluated at `k = 2^40`.
fn spectral_radius_upper(a: &Matrix) -> f64 {
    let mut m = a.clone();
    let mut log_scale = 0.0_f64;
    let squarings = 40;
    for _ in 0..squarings {
        let f = m.frobenius_norm();
        if f == 0.0 {
            return 0.0;
        }
        log_scale = 2.0 * (log_scale + f.ln());
        let normalized = m.scale(1.0 / f);
        m = normalized.mul(&normalized);
    }
    let total = log_scale + m.frobenius_norm().ln();
    (total / 2f64.powi(squarings)).exp()
}
