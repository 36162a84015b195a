//! Grünwald–Letnikov differintegral on a uniform grid.
//!
//! The operator at node t_j is the weighted backward sum
//! h^{−α} Σ_{k=0}^{j} w_k f(t_j − kh) with w_k = (−1)^k C(α, k). Negative α
//! turns the same sum into the fractional integral. Weights are produced
//! once per plan by the multiplicative recurrence, which avoids the gamma
//! poles and overflow of a ratio-of-gammas formulation.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::types::{DistributionalSignal, FracOrder, Grid, SignalSource};

/// Precomputed weights and truncation policy for a GL evaluation.
#[derive(Debug, Clone)]
pub struct GLPlan {
    order: FracOrder,
    grid: Grid,
    coefficients: Vec<f64>,
    memory_length: Option<f64>,
}

impl GLPlan {
    pub fn new(order: FracOrder, grid: Grid) -> GLPlan {
        let alpha = order.alpha();
        let n = grid.n_points();
        let mut w = Vec::with_capacity(n);
        w.push(1.0);
        for k in 1..n {
            let k = k as f64;
            w.push(w[w.len() - 1] * (k - 1.0 - alpha) / k);
        }
        GLPlan { order, grid, coefficients: w, memory_length: None }
    }

    /// Short-memory variant: only the trailing window of length `memory`
    /// (in time units) contributes to each node. Off by default; the
    /// full-memory sum is the defining limit.
    pub fn with_memory_length(order: FracOrder, grid: Grid, memory: f64) -> Result<GLPlan> {
        if !(memory > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "memory length {memory} must be positive"
            )));
        }
        let mut plan = GLPlan::new(order, grid);
        plan.memory_length = Some(memory);
        Ok(plan)
    }

    pub fn order(&self) -> FracOrder {
        self.order
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Weights w_k = (−1)^k C(α, k), one per grid node.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    fn max_lag(&self) -> usize {
        match self.memory_length {
            Some(len) => (len / self.grid.step()).floor() as usize,
            None => self.grid.n_points(),
        }
    }
}

/// Grünwald–Letnikov differintegral of `f` under `plan`.
///
/// The scheme is pointwise, so the delta list of the result is empty.
pub fn gl_derivative(f: &SignalSource, plan: &GLPlan) -> Result<DistributionalSignal> {
    let grid = plan.grid();
    let samples = f.sample_on(grid)?;
    let alpha = plan.order().alpha();
    let scale = grid.step().powf(-alpha);
    let w = plan.coefficients();
    let max_lag = plan.max_lag();
    let out: Vec<f64> = (0..samples.len())
        .into_par_iter()
        .map(|j| {
            let lo = j.saturating_sub(max_lag);
            let mut acc = 0.0;
            for k in lo..=j {
                acc += w[j - k] * samples[k];
            }
            scale * acc
        })
        .collect();
    DistributionalSignal::regular_only(grid.clone(), out)
}

/// Fractional integral: the same backward sum with a negative order.
pub fn gl_integral(f: &SignalSource, plan: &GLPlan) -> Result<DistributionalSignal> {
    if plan.order().alpha() >= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "gl_integral needs a negative order, got {}",
            plan.order().alpha()
        )));
    }
    gl_derivative(f, plan)
}
