//! Shared value types and the distributional result model.
//!
//! Every operator in the crate produces a [`DistributionalSignal`]: a
//! pointwise regular part sampled on a uniform [`Grid`] plus a finite,
//! sorted list of symbolic [`DiracTerm`]s. Dirac terms are never sampled
//! onto the grid — any pointwise representation of δ would be arbitrary —
//! and their order is capped at 2 because no supported operator produces
//! anything beyond δ′′.
//!
//! All types here are immutable values after construction and safe to share
//! across threads.

use crate::error::{Error, Result};
use crate::expr::ExprAst;

/// Uniform sample lattice on [t_start, t_end].
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    t_start: f64,
    t_end: f64,
    n_points: usize,
    step: f64,
}

impl Grid {
    /// `n_points ≥ 2`, `t_end > t_start ≥ 0`.
    pub fn new(t_start: f64, t_end: f64, n_points: usize) -> Result<Grid> {
        if !(t_start.is_finite() && t_end.is_finite()) {
            return Err(Error::InvalidGrid("endpoints must be finite".into()));
        }
        if t_start < 0.0 {
            return Err(Error::InvalidGrid(format!("t_start = {t_start} must be ≥ 0")));
        }
        if t_end <= t_start {
            return Err(Error::InvalidGrid(format!(
                "t_end = {t_end} must exceed t_start = {t_start}"
            )));
        }
        if n_points < 2 {
            return Err(Error::InvalidGrid(format!("n_points = {n_points} must be ≥ 2")));
        }
        let step = (t_end - t_start) / (n_points - 1) as f64;
        Ok(Grid { t_start, t_end, n_points, step })
    }

    /// Grid on [t_start, t_end] with the node count nearest to step `h`.
    pub fn from_step(t_start: f64, t_end: f64, h: f64) -> Result<Grid> {
        if !(h > 0.0) {
            return Err(Error::InvalidGrid(format!("step {h} must be positive")));
        }
        let n = ((t_end - t_start) / h).round() as usize + 1;
        Grid::new(t_start, t_end, n.max(2))
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Node t_k = t_start + k·h.
    pub fn node(&self, k: usize) -> f64 {
        self.t_start + k as f64 * self.step
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|k| self.node(k))
    }

    /// Index of the first node with t ≥ x (clamped to the grid).
    pub fn first_node_at_or_after(&self, x: f64) -> usize {
        if x <= self.t_start {
            return 0;
        }
        let k = ((x - self.t_start) / self.step).ceil() as usize;
        k.min(self.n_points - 1)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.t_start - 1e-12 && x <= self.t_end + 1e-12
    }
}

/// Real differintegration order α with its integer ceiling n = ⌈α⌉ (zero
/// for α ≤ 0; negative α means fractional integration).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder {
    alpha: f64,
    n: i32,
}

impl FracOrder {
    pub fn new(alpha: f64) -> Result<FracOrder> {
        if !alpha.is_finite() {
            return Err(Error::InvalidArgument(format!("order {alpha} must be finite")));
        }
        let n = if alpha > 0.0 { alpha.ceil() as i32 } else { 0 };
        Ok(FracOrder { alpha, n })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// ⌈α⌉ for positive orders, 0 otherwise.
    pub fn ceil(&self) -> i32 {
        self.n
    }

    pub fn is_integer(&self) -> bool {
        self.alpha == self.alpha.round()
    }
}

/// A single symbolic term c·δ^{(m)}(t − t₀).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracTerm {
    pub location: f64,
    pub order: usize,
    pub coefficient: f64,
}

/// Hard cap on the derivative order of tracked Dirac terms.
pub const MAX_DIRAC_ORDER: usize = 2;

impl DiracTerm {
    pub fn new(location: f64, order: usize, coefficient: f64) -> Result<DiracTerm> {
        if order > MAX_DIRAC_ORDER {
            return Err(Error::DeltaOrderOverflow(order));
        }
        if !coefficient.is_finite() || !location.is_finite() {
            return Err(Error::InvalidArgument(
                "Dirac term location and coefficient must be finite".into(),
            ));
        }
        Ok(DiracTerm { location, order, coefficient })
    }
}

/// Regular sampled part plus a finite list of Dirac terms.
///
/// The delta list is kept sorted by (location, order) with no duplicate
/// keys; zero-coefficient terms are dropped on construction and merging.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionalSignal {
    grid: Grid,
    regular: Vec<f64>,
    deltas: Vec<DiracTerm>,
}

impl DistributionalSignal {
    pub fn new(grid: Grid, regular: Vec<f64>, deltas: Vec<DiracTerm>) -> Result<Self> {
        if regular.len() != grid.n_points() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a {}-node grid",
                regular.len(),
                grid.n_points()
            )));
        }
        let deltas = normalize_deltas(deltas)?;
        Ok(DistributionalSignal { grid, regular, deltas })
    }

    pub fn regular_only(grid: Grid, regular: Vec<f64>) -> Result<Self> {
        Self::new(grid, regular, Vec::new())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn regular(&self) -> &[f64] {
        &self.regular
    }

    pub fn deltas(&self) -> &[DiracTerm] {
        &self.deltas
    }

    /// Regular-part value at node k.
    pub fn value(&self, k: usize) -> f64 {
        self.regular[k]
    }

    /// Regular-part value at the node closest to time `t`.
    pub fn value_near(&self, t: f64) -> f64 {
        let k = ((t - self.grid.t_start()) / self.grid.step()).round() as isize;
        let k = k.clamp(0, self.grid.n_points() as isize - 1) as usize;
        self.regular[k]
    }

    /// Pointwise sum; delta lists merge with coefficients added on matching
    /// (location, order) keys and exact cancellations removed.
    pub fn add(&self, other: &DistributionalSignal) -> Result<DistributionalSignal> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(
                "cannot add signals sampled on different grids".into(),
            ));
        }
        let regular = self
            .regular
            .iter()
            .zip(&other.regular)
            .map(|(a, b)| a + b)
            .collect();
        let mut deltas = self.deltas.clone();
        deltas.extend_from_slice(&other.deltas);
        DistributionalSignal::new(self.grid.clone(), regular, deltas)
    }

    pub fn scale(&self, c: f64) -> DistributionalSignal {
        DistributionalSignal {
            grid: self.grid.clone(),
            regular: self.regular.iter().map(|v| c * v).collect(),
            deltas: if c == 0.0 {
                Vec::new()
            } else {
                self.deltas
                    .iter()
                    .map(|d| DiracTerm { coefficient: c * d.coefficient, ..*d })
                    .collect()
            },
        }
    }

    /// max |a.regular − b.regular| over grid nodes with t ≥ t_min.
    pub fn max_regular_diff(
        &self,
        other: &DistributionalSignal,
        t_min: f64,
    ) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(
                "cannot compare signals sampled on different grids".into(),
            ));
        }
        if !self.grid.contains(t_min) {
            return Err(Error::InvalidArgument(format!(
                "t_min = {t_min} lies outside [{}, {}]",
                self.grid.t_start(),
                self.grid.t_end()
            )));
        }
        let k0 = self.grid.first_node_at_or_after(t_min);
        Ok(self.regular[k0..]
            .iter()
            .zip(&other.regular[k0..])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Free-standing form of [`DistributionalSignal::add`].
pub fn distributional_add(
    a: &DistributionalSignal,
    b: &DistributionalSignal,
) -> Result<DistributionalSignal> {
    a.add(b)
}

/// Free-standing form of [`DistributionalSignal::max_regular_diff`].
pub fn max_regular_diff(
    a: &DistributionalSignal,
    b: &DistributionalSignal,
    t_min: f64,
) -> Result<f64> {
    a.max_regular_diff(b, t_min)
}

fn normalize_deltas(mut deltas: Vec<DiracTerm>) -> Result<Vec<DiracTerm>> {
    for d in &deltas {
        if d.order > MAX_DIRAC_ORDER {
            return Err(Error::DeltaOrderOverflow(d.order));
        }
        if !d.coefficient.is_finite() {
            return Err(Error::InvalidArgument("non-finite Dirac coefficient".into()));
        }
    }
    deltas.sort_by(|a, b| {
        a.location
            .partial_cmp(&b.location)
            .expect("finite locations")
            .then(a.order.cmp(&b.order))
    });
    let mut merged: Vec<DiracTerm> = Vec::with_capacity(deltas.len());
    for d in deltas {
        match merged.last_mut() {
            Some(last) if last.location == d.location && last.order == d.order => {
                last.coefficient += d.coefficient;
            }
            _ => merged.push(d),
        }
    }
    merged.retain(|d| d.coefficient != 0.0);
    Ok(merged)
}

/// A function of t, given either as a parsed expression or as sampled data
/// with piecewise-linear interpolation between nodes.
#[derive(Debug, Clone)]
pub enum SignalSource {
    Expr(ExprAst),
    Samples { grid: Grid, values: Vec<f64> },
}

impl SignalSource {
    pub fn from_expr_str(src: &str) -> Result<SignalSource> {
        Ok(SignalSource::Expr(ExprAst::parse_as(src, "t")?))
    }

    pub fn from_samples(grid: Grid, values: Vec<f64>) -> Result<SignalSource> {
        if values.len() != grid.n_points() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a {}-node grid",
                values.len(),
                grid.n_points()
            )));
        }
        Ok(SignalSource::Samples { grid, values })
    }

    pub fn value_at(&self, t: f64) -> Result<f64> {
        match self {
            SignalSource::Expr(ast) => ast.eval(t),
            SignalSource::Samples { grid, values } => {
                if !grid.contains(t) {
                    return Err(Error::Domain {
                        at: t,
                        message: format!(
                            "sampled source is defined on [{}, {}]",
                            grid.t_start(),
                            grid.t_end()
                        ),
                    });
                }
                let x = (t - grid.t_start()) / grid.step();
                let k = (x.floor().max(0.0) as usize).min(grid.n_points() - 2);
                let w = (x - k as f64).clamp(0.0, 1.0);
                Ok(values[k] * (1.0 - w) + values[k + 1] * w)
            }
        }
    }

    /// Sample onto `grid`; expression sources evaluate, sampled sources
    /// resample by linear interpolation (and must cover the target span).
    pub fn sample_on(&self, grid: &Grid) -> Result<Vec<f64>> {
        match self {
            SignalSource::Expr(ast) => grid
                .nodes()
                .enumerate()
                .map(|(k, t)| {
                    ast.eval(t).map_err(|e| Error::NodeEvaluation {
                        node: k,
                        t,
                        message: e.to_string(),
                    })
                })
                .collect(),
            SignalSource::Samples { grid: own, values } => {
                if own == grid {
                    return Ok(values.clone());
                }
                grid.nodes()
                    .enumerate()
                    .map(|(k, t)| {
                        self.value_at(t).map_err(|e| Error::NodeEvaluation {
                            node: k,
                            t,
                            message: e.to_string(),
                        })
                    })
                    .collect()
            }
        }
    }

    /// Symbolic first derivative when the source is an expression.
    pub fn derivative_expr(&self) -> Option<ExprAst> {
        match self {
            SignalSource::Expr(ast) => Some(ast.diff()),
            SignalSource::Samples { .. } => None,
        }
    }

    pub fn as_expr(&self) -> Option<&ExprAst> {
        match self {
            SignalSource::Expr(ast) => Some(ast),
            SignalSource::Samples { .. } => None,
        }
    }

    /// Exponential-order bound σ₀ (zero for sampled data).
    pub fn growth_rate(&self) -> f64 {
        match self {
            SignalSource::Expr(ast) => ast.growth_rate(),
            SignalSource::Samples { .. } => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_grid(n: usize) -> Grid {
        Grid::new(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn grid_invariants() {
        let g = unit_grid(11);
        assert_eq!(g.step(), 0.1);
        assert_eq!(g.node(0), 0.0);
        assert!((g.node(10) - 1.0).abs() < 1e-15);
        assert!(Grid::new(0.0, 1.0, 1).is_err());
        assert!(Grid::new(1.0, 1.0, 5).is_err());
        assert!(Grid::new(-0.5, 1.0, 5).is_err());
        let h = Grid::from_step(0.0, 1.0, 1e-3).unwrap();
        assert_eq!(h.n_points(), 1001);
    }

    #[test]
    fn frac_order_ceiling() {
        assert_eq!(FracOrder::new(0.5).unwrap().ceil(), 1);
        assert_eq!(FracOrder::new(1.0).unwrap().ceil(), 1);
        assert_eq!(FracOrder::new(1.01).unwrap().ceil(), 2);
        assert_eq!(FracOrder::new(-0.5).unwrap().ceil(), 0);
        assert_eq!(FracOrder::new(0.0).unwrap().ceil(), 0);
    }

    #[test]
    fn delta_cancellation_is_exact() {
        let g = unit_grid(3);
        let a = DistributionalSignal::new(
            g.clone(),
            vec![0.0; 3],
            vec![DiracTerm::new(0.0, 0, 3.0).unwrap()],
        )
        .unwrap();
        let b = DistributionalSignal::new(
            g,
            vec![0.0; 3],
            vec![DiracTerm::new(0.0, 0, -3.0).unwrap()],
        )
        .unwrap();
        let sum = a.add(&b).unwrap();
        assert!(sum.deltas().is_empty());
        assert!(sum.regular().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn regular_parts_add_pointwise() {
        let g = unit_grid(5);
        let t: Vec<f64> = g.nodes().collect();
        let a = DistributionalSignal::regular_only(g.clone(), t.clone()).unwrap();
        let b = DistributionalSignal::regular_only(
            g,
            t.iter().map(|x| 1.0 - x).collect(),
        )
        .unwrap();
        let sum = a.add(&b).unwrap();
        assert!(sum.regular().iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn add_rejects_grid_mismatch() {
        let a = DistributionalSignal::regular_only(unit_grid(5), vec![0.0; 5]).unwrap();
        let b = DistributionalSignal::regular_only(unit_grid(6), vec![0.0; 6]).unwrap();
        assert!(matches!(a.add(&b), Err(Error::GridMismatch(_))));
        assert!(matches!(a.max_regular_diff(&b, 0.5), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn max_diff_examples() {
        let g = unit_grid(11);
        let t: Vec<f64> = g.nodes().collect();
        let a = DistributionalSignal::regular_only(g.clone(), t.clone()).unwrap();
        assert_eq!(a.max_regular_diff(&a, 0.0).unwrap(), 0.0);
        let shifted = DistributionalSignal::regular_only(
            g.clone(),
            t.iter().map(|x| x + g.step()).collect(),
        )
        .unwrap();
        let d = a.max_regular_diff(&shifted, 0.0).unwrap();
        assert!((d - g.step()).abs() < 1e-15);
        assert!(a.max_regular_diff(&a, 2.0).is_err());
    }

    #[test]
    fn delta_order_cap_enforced() {
        assert!(DiracTerm::new(0.0, 2, 1.0).is_ok());
        assert!(matches!(
            DiracTerm::new(0.0, 3, 1.0),
            Err(Error::DeltaOrderOverflow(3))
        ));
    }

    #[test]
    fn delta_list_sorted_and_merged() {
        let g = unit_grid(3);
        let sig = DistributionalSignal::new(
            g,
            vec![0.0; 3],
            vec![
                DiracTerm::new(0.5, 1, 2.0).unwrap(),
                DiracTerm::new(0.0, 0, 1.0).unwrap(),
                DiracTerm::new(0.5, 0, 4.0).unwrap(),
                DiracTerm::new(0.5, 1, 0.5).unwrap(),
            ],
        )
        .unwrap();
        let keys: Vec<(f64, usize, f64)> = sig
            .deltas()
            .iter()
            .map(|d| (d.location, d.order, d.coefficient))
            .collect();
        assert_eq!(keys, vec![(0.0, 0, 1.0), (0.5, 0, 4.0), (0.5, 1, 2.5)]);
    }

    #[test]
    fn sampled_source_interpolates_linearly() {
        let g = unit_grid(3); // nodes 0, 0.5, 1
        let src = SignalSource::from_samples(g, vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(src.value_at(0.25).unwrap(), 0.5);
        assert_eq!(src.value_at(0.75).unwrap(), 0.5);
        assert!(src.value_at(1.5).is_err());
    }

    #[test]
    fn expression_source_samples_and_differentiates() {
        let src = SignalSource::from_expr_str("t^2").unwrap();
        let g = unit_grid(5);
        let v = src.sample_on(&g).unwrap();
        assert!((v[4] - 1.0).abs() < 1e-15);
        let d = src.derivative_expr().unwrap();
        assert!((d.eval(3.0).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn value_types_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Grid>();
        assert_send_sync::<FracOrder>();
        assert_send_sync::<DiracTerm>();
        assert_send_sync::<DistributionalSignal>();
        assert_send_sync::<SignalSource>();
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn delta_strategy() -> impl Strategy<Value = Vec<DiracTerm>> {
            prop::collection::vec(
                (
                    prop::sample::select(vec![0.0f64, 0.5, 1.0]),
                    0usize..=2,
                    -10.0f64..10.0,
                )
                    .prop_map(|(loc, order, c)| DiracTerm::new(loc, order, c).unwrap()),
                0..4,
            )
        }

        fn signal(values: &[f64], deltas: Vec<DiracTerm>) -> DistributionalSignal {
            let grid = Grid::new(0.0, 1.0, values.len()).unwrap();
            DistributionalSignal::new(grid, values.to_vec(), deltas).unwrap()
        }

        proptest! {
            // a + b == b + a exactly: IEEE addition commutes and delta
            // coefficients merge in sorted order
            #[test]
            fn add_commutes_exactly(
                va in prop::collection::vec(-1e6f64..1e6, 8),
                vb in prop::collection::vec(-1e6f64..1e6, 8),
                da in delta_strategy(),
                db in delta_strategy(),
            ) {
                let a = signal(&va, da);
                let b = signal(&vb, db);
                prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            }

            // (a + b) + c ≈ a + (b + c) up to floating round-off
            #[test]
            fn add_associates_to_roundoff(
                va in prop::collection::vec(-1e6f64..1e6, 8),
                vb in prop::collection::vec(-1e6f64..1e6, 8),
                vc in prop::collection::vec(-1e6f64..1e6, 8),
                da in delta_strategy(),
                db in delta_strategy(),
                dc in delta_strategy(),
            ) {
                let a = signal(&va, da);
                let b = signal(&vb, db);
                let c = signal(&vc, dc);
                let left = a.add(&b).unwrap().add(&c).unwrap();
                let right = a.add(&b.add(&c).unwrap()).unwrap();
                for (x, y) in left.regular().iter().zip(right.regular()) {
                    prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
                }
                prop_assert_eq!(left.deltas().len(), right.deltas().len());
                for (x, y) in left.deltas().iter().zip(right.deltas()) {
                    prop_assert_eq!((x.location, x.order), (y.location, y.order));
                    prop_assert!(
                        (x.coefficient - y.coefficient).abs()
                            <= 1e-12 * (1.0 + x.coefficient.abs())
                    );
                }
            }
        }
    }
}
