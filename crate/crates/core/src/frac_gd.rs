//! Fractional gradient descent on ℓ₁-regularized quadratics.
//!
//! The harness replaces each partial derivative ∂J/∂x_i with the order-α
//! Caputo derivative of the one-dimensional slice t ↦ J(x with x_i = t),
//! anchored a fixed `base_offset` below the current coordinate. The moving
//! terminal keeps the operator translation-covariant and collapses to the
//! classical gradient at α = 1 (where the Caputo path reduces to a plain
//! derivative, exact on quadratics up to round-off).
//!
//! No convergence guarantee is claimed for α < 1; the harness measures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rl_caputo::caputo_derivative;
use crate::types::{FracOrder, Grid, SignalSource};

/// ½xᵀAx − bᵀx + λ‖x‖₁ with A symmetric positive definite and λ ≥ 0.
#[derive(Debug, Clone)]
pub struct Objective {
    dim: usize,
    a: Vec<f64>, // row-major d×d
    b: Vec<f64>,
    lambda: f64,
}

impl Objective {
    pub fn new(a: Vec<f64>, b: Vec<f64>, lambda: f64) -> Result<Objective> {
        let dim = b.len();
        if a.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "matrix has {} entries, expected {dim}×{dim}",
                a.len()
            )));
        }
        if !(lambda >= 0.0) {
            return Err(Error::InvalidArgument(format!("λ = {lambda} must be ≥ 0")));
        }
        for i in 0..dim {
            for j in 0..i {
                if (a[i * dim + j] - a[j * dim + i]).abs()
                    > 1e-12 * (1.0 + a[i * dim + j].abs())
                {
                    return Err(Error::InvalidArgument(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        if cholesky(&a, dim).is_none() {
            return Err(Error::InvalidArgument(
                "matrix is not positive definite (Cholesky factorization failed)".into(),
            ));
        }
        Ok(Objective { dim, a, b, lambda })
    }

    /// Seeded diagonally dominant test problem: off-diagonal entries are
    /// uniform in (−1, 1), the diagonal exceeds each row's absolute sum.
    pub fn seeded(dim: usize, lambda: f64, seed: u64) -> Result<Objective> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = vec![0.0f64; dim * dim];
        for i in 0..dim {
            for j in (i + 1)..dim {
                let v = rng.gen_range(-1.0..1.0);
                a[i * dim + j] = v;
                a[j * dim + i] = v;
            }
        }
        for i in 0..dim {
            let row: f64 = (0..dim).filter(|j| *j != i).map(|j| a[i * dim + j].abs()).sum();
            a[i * dim + i] = row + rng.gen_range(0.5..1.5);
        }
        let b = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Objective::new(a, b, lambda)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn matrix(&self) -> &[f64] {
        &self.a
    }

    pub fn linear_term(&self) -> &[f64] {
        &self.b
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let mut quad = 0.0;
        for i in 0..self.dim {
            let mut row = 0.0;
            for j in 0..self.dim {
                row += self.a[i * self.dim + j] * x[j];
            }
            quad += 0.5 * x[i] * row - self.b[i] * x[i];
        }
        quad + self.lambda * x.iter().map(|v| v.abs()).sum::<f64>()
    }

    /// Ax − b.
    pub fn smooth_gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim).map(|j| self.a[i * self.dim + j] * x[j]).sum::<f64>()
                    - self.b[i]
            })
            .collect()
    }

    /// Ax − b + λ·sign(x) with the library's sign(0) = +1 convention.
    pub fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.smooth_gradient(x);
        for (gi, xi) in g.iter_mut().zip(x) {
            *gi += self.lambda * if *xi >= 0.0 { 1.0 } else { -1.0 };
        }
        g
    }

    /// A⁻¹ b, the minimizer of the unregularized part.
    pub fn smooth_minimizer(&self) -> Result<Vec<f64>> {
        let l = cholesky(&self.a, self.dim).ok_or_else(|| {
            Error::InvalidArgument("matrix is not positive definite".into())
        })?;
        // forward then backward substitution with the lower factor
        let d = self.dim;
        let mut y = self.b.clone();
        for i in 0..d {
            for j in 0..i {
                y[i] -= l[i * d + j] * y[j];
            }
            y[i] /= l[i * d + i];
        }
        let mut x = y;
        for i in (0..d).rev() {
            for j in (i + 1)..d {
                x[i] -= l[j * d + i] * x[j];
            }
            x[i] /= l[i * d + i];
        }
        Ok(x)
    }

    /// Gershgorin upper bound on the largest eigenvalue; 2/bound is a safe
    /// classical step size.
    pub fn eigen_upper_bound(&self) -> f64 {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.a[i * self.dim + j].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

fn cholesky(a: &[f64], d: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut sum = a[i * d + j];
            for k in 0..j {
                sum -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l[i * d + i] = sum.sqrt();
            } else {
                l[i * d + j] = sum / l[j * d + j];
            }
        }
    }
    Some(l)
}

/// Step rule and fractional-order parameters of a descent run.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentConfig {
    /// order α ∈ (0, 1]; α = 1 reproduces classical gradient descent
    pub alpha: f64,
    pub step: f64,
    pub max_iters: usize,
    pub tolerance: f64,
    /// per-coordinate Caputo terminal sits at x_i − base_offset
    pub base_offset: f64,
    /// nodes of the per-coordinate quadrature grid
    pub coord_nodes: usize,
}

impl DescentConfig {
    pub fn new(alpha: f64, step: f64) -> Result<DescentConfig> {
        let cfg = DescentConfig {
            alpha,
            step,
            max_iters: 1000,
            tolerance: 1e-8,
            base_offset: 1.0,
            coord_nodes: 129,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha = {} must lie in (0, 1]",
                self.alpha
            )));
        }
        if !(self.step > 0.0) {
            return Err(Error::InvalidArgument("step must be positive".into()));
        }
        if !(self.base_offset > 0.0) {
            return Err(Error::InvalidArgument("base_offset must be positive".into()));
        }
        if self.coord_nodes < 3 {
            return Err(Error::InvalidArgument("need at least 3 coordinate nodes".into()));
        }
        Ok(())
    }
}

/// Order-α Caputo gradient: coordinate i carries the Caputo derivative of
/// the objective restricted to that coordinate, taken on
/// [x_i − base_offset, x_i] and evaluated at x_i.
pub fn fractional_gradient(
    obj: &Objective,
    x: &[f64],
    cfg: &DescentConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    if x.len() != obj.dim() {
        return Err(Error::InvalidArgument(format!(
            "point has {} coordinates, objective expects {}",
            x.len(),
            obj.dim()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("point has non-finite coordinates".into()));
    }
    let order = FracOrder::new(cfg.alpha)?;
    let grid = Grid::new(0.0, cfg.base_offset, cfg.coord_nodes)?;

    (0..obj.dim())
        .into_par_iter()
        .map(|i| {
            // slice J along coordinate i, re-parametrized to τ ∈ [0, offset]
            let lo = x[i] - cfg.base_offset;
            let mut point = x.to_vec();
            let samples: Vec<f64> = grid
                .nodes()
                .map(|tau| {
                    point[i] = lo + tau;
                    obj.value(&point)
                })
                .collect();
            if samples.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "objective is not finite along coordinate {i}"
                )));
            }
            let slice = SignalSource::from_samples(grid.clone(), samples)?;
            let caputo = caputo_derivative(&slice, order, &grid)?;
            Ok(caputo.value(cfg.coord_nodes - 1))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DescentStatus {
    /// ‖Δx‖₂ fell below the tolerance
    Converged { iterations: usize },
    MaxIterations,
    /// objective rose for ten consecutive iterations
    Diverged { at_iteration: usize },
}

/// Iterates and objective values, one row per iteration (the initial point
/// included as row zero).
#[derive(Debug, Clone, PartialEq)]
pub struct DescentTrace {
    pub iterates: Vec<Vec<f64>>,
    pub objectives: Vec<f64>,
    pub status: DescentStatus,
}

const DIVERGENCE_STREAK: usize = 10;

/// x ← x − step·fractional_gradient until the update norm drops below the
/// tolerance, the iteration budget runs out, or the objective has risen for
/// ten straight iterations.
pub fn descend(obj: &Objective, x0: &[f64], cfg: &DescentConfig) -> Result<DescentTrace> {
    cfg.validate()?;
    let mut x = x0.to_vec();
    let mut iterates = vec![x.clone()];
    let mut objectives = vec![obj.value(&x)];
    let mut rising = 0usize;

    for iter in 1..=cfg.max_iters {
        let g = fractional_gradient(obj, &x, cfg)?;
        let mut step_norm_sq = 0.0;
        for (xi, gi) in x.iter_mut().zip(&g) {
            let delta = cfg.step * gi;
            *xi -= delta;
            step_norm_sq += delta * delta;
        }
        let value = obj.value(&x);
        iterates.push(x.clone());
        objectives.push(value);

        if value > objectives[objectives.len() - 2] {
            rising += 1;
            if rising >= DIVERGENCE_STREAK {
                return Ok(DescentTrace {
                    iterates,
                    objectives,
                    status: DescentStatus::Diverged { at_iteration: iter },
                });
            }
        } else {
            rising = 0;
        }
        if step_norm_sq.sqrt() < cfg.tolerance {
            return Ok(DescentTrace {
                iterates,
                objectives,
                status: DescentStatus::Converged { iterations: iter },
            });
        }
    }
    Ok(DescentTrace { iterates, objectives, status: DescentStatus::MaxIterations })
}
