//! Cross-module consistency checks: independent evaluation routes of the
//! same operator compared against each other and against closed forms.

use fracops_core::ell1::{ell1_derivative, Ell1Path};
use fracops_core::gl::{gl_derivative, GLPlan};
use fracops_core::laplace::lt_derivative;
use fracops_core::rl_caputo::{
    caputo_derivative, power_rule_oracle, rl_derivative, Side,
};
use fracops_core::types::{FracOrder, Grid, SignalSource};

fn expr(s: &str) -> SignalSource {
    SignalSource::from_expr_str(s).unwrap()
}

#[test]
fn gl_and_rl_routes_stay_close_on_smooth_signals() {
    let grid = Grid::new(0.0, 1.0, 1001).unwrap();
    let f = expr("t^2");
    let order = FracOrder::new(0.5).unwrap();
    let gl = gl_derivative(&f, &GLPlan::new(order, grid.clone())).unwrap();
    let rl = rl_derivative(&f, order, &grid, Side::Left).unwrap();
    let diff = gl.max_regular_diff(&rl, 0.1).unwrap();
    assert!(diff < 1e-2, "GL vs RL gap {diff}");
}

#[test]
fn transform_route_agrees_with_rl_when_boundary_vanishes() {
    // f(0) = 0 makes the transform-domain operator the left RL derivative
    let grid = Grid::new(0.0, 1.0, 1001).unwrap();
    let f = expr("t^2");
    let lt = lt_derivative(&f, 0.5, &grid).unwrap();
    let rl = rl_derivative(&f, FracOrder::new(0.5).unwrap(), &grid, Side::Left).unwrap();
    let diff = lt.max_regular_diff(&rl, 0.1).unwrap();
    assert!(diff <= 1e-2, "transform vs RL gap {diff}");
}

#[test]
fn caputo_agrees_with_rl_when_boundary_vanishes() {
    let grid = Grid::new(0.0, 1.0, 1001).unwrap();
    let f = expr("t^2");
    let order = FracOrder::new(0.5).unwrap();
    let ca = caputo_derivative(&f, order, &grid).unwrap();
    let rl = rl_derivative(&f, order, &grid, Side::Left).unwrap();
    let diff = ca.max_regular_diff(&rl, 0.1).unwrap();
    assert!(diff <= 1e-2, "Caputo vs RL gap {diff}");
}

#[test]
fn shifted_power_rule_with_matching_terminal() {
    // operators anchored at a = 0.2 see (t − 0.2)^1.5 as a pure power
    let grid = Grid::new(0.2, 1.2, 1001).unwrap();
    let f = expr("(t-0.2)^1.5");
    let order = FracOrder::new(0.5).unwrap();
    let exact = power_rule_oracle(0.2, 1.5, 0.5, 1.2).unwrap();

    let gl = gl_derivative(&f, &GLPlan::new(order, grid.clone())).unwrap();
    let rl = rl_derivative(&f, order, &grid, Side::Left).unwrap();
    let last = grid.n_points() - 1;
    assert!(
        ((gl.value(last) - exact) / exact).abs() < 1e-2,
        "GL: {} vs {exact}",
        gl.value(last)
    );
    assert!(
        ((rl.value(last) - exact) / exact).abs() < 1e-2,
        "RL: {} vs {exact}",
        rl.value(last)
    );
}

#[test]
fn ell1_additivity_matches_summed_pieces_on_constants() {
    // ℓ₁D(2) + ℓ₁D(3) against ℓ₁D(5): regular parts zero, deltas 5δ − 5δ′
    let grid = Grid::new(0.0, 1.0, 51).unwrap();
    let two = ell1_derivative(&expr("2"), &grid, Ell1Path::ClosedForm).unwrap().value;
    let three = ell1_derivative(&expr("3"), &grid, Ell1Path::ClosedForm).unwrap().value;
    let five = ell1_derivative(&expr("5"), &grid, Ell1Path::ClosedForm).unwrap().value;

    let summed = two.add(&three).unwrap();
    assert_eq!(summed, five);
    let pairs: Vec<(usize, f64)> =
        summed.deltas().iter().map(|d| (d.order, d.coefficient)).collect();
    assert_eq!(pairs, vec![(0, 5.0), (1, -5.0)]);
}
