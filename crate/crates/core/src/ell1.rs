//! The ℓ₁ derivative and its fractional generalization.
//!
//! The operator acts through the transform of the absolute value:
//! ℓ₁D f = L⁻¹( s·L(|f|)(s) − s·|f(0)| ). For f with absolutely continuous
//! |f| this decomposes exactly as
//!
//! ```text
//! ℓ₁D f = sign(f(t))·f′(t)  +  |f(0)|·δ(t)  −  |f(0)|·δ′(t)
//! ```
//!
//! and the crate evaluates it along two deliberately independent routes:
//! a closed-form path that emits the decomposition directly, and a numeric
//! path that forward-transforms |f|, multiplies by s, subtracts s|f(0)|,
//! splits the polynomial-in-s content into Dirac terms and inverts the
//! remainder by shifted Stehfest. Their agreement is one of the library's
//! standing cross-checks.
//!
//! The modified fractional operator of order α ∈ (0, 1) is the ε→0 limit of
//! the convolution representation g_{1−α} ⋆ (|f|)′, i.e. the order-α Caputo
//! derivative of |f| anchored at 0; it annihilates constants.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::laplace::{
    invert_stehfest, split_integer_powers, stehfest_convergence_gap, LaplaceField,
    STEHFEST_TERMS,
};
use crate::rl_caputo::SingularQuadrature;
use crate::special::gamma_fn;
use crate::types::{DiracTerm, DistributionalSignal, Grid, SignalSource};

/// Which evaluation route produced an [`Ell1Result`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ell1Path {
    /// sign(f)·f′ plus exact boundary Dirac terms
    ClosedForm,
    /// forward transform, polynomial split, Stehfest inversion
    LaplaceNumeric,
}

/// Distributional value together with the path that computed it and any
/// numeric warnings raised along the way.
#[derive(Debug, Clone)]
pub struct Ell1Result {
    pub value: DistributionalSignal,
    pub path: Ell1Path,
    pub warnings: Vec<String>,
}

/// Maximum number of sign changes tolerated before a signal is declared to
/// have accumulating zeros.
const MAX_SIGN_CHANGES: usize = 1000;

/// First-order ℓ₁ derivative along the requested path.
///
/// The closed-form path needs an expression source with finitely many
/// zeros; the numeric path needs the signal evaluable far enough out for
/// the forward transform's truncation.
pub fn ell1_derivative(f: &SignalSource, grid: &Grid, path: Ell1Path) -> Result<Ell1Result> {
    let f0 = f.value_at(0.0).map_err(|_| {
        Error::Precondition("ℓ₁ derivative needs f continuous (evaluable) at 0".into())
    })?;
    if !f0.is_finite() {
        return Err(Error::Precondition("f(0) is not finite".into()));
    }
    match path {
        Ell1Path::ClosedForm => closed_form_first(f, grid, f0.abs()),
        Ell1Path::LaplaceNumeric => {
            numeric_transform_path(f, grid, 1.0, f0.abs(), true, STEHFEST_TERMS)
        }
    }
}

fn closed_form_first(f: &SignalSource, grid: &Grid, abs_f0: f64) -> Result<Ell1Result> {
    let ast = f.as_expr().ok_or_else(|| {
        Error::Unsupported("the closed-form ℓ₁ path needs an expression source".into())
    })?;
    let deriv = ast.diff();

    let values = f.sample_on(grid)?;
    let crossings = values.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
    if crossings > MAX_SIGN_CHANGES {
        return Err(Error::Unsupported(format!(
            "signal changes sign {crossings} times on the grid; zeros accumulate"
        )));
    }

    // regular part: sign(f)·f′ with the sign(0)=+1 one-sided convention
    let regular: Vec<f64> = grid
        .nodes()
        .zip(&values)
        .enumerate()
        .map(|(k, (t, &v))| {
            let sgn = if v >= 0.0 { 1.0 } else { -1.0 };
            deriv.eval(t).map(|d| sgn * d).map_err(|e| Error::NodeEvaluation {
                node: k,
                t,
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<f64>>>()?;

    let deltas = vec![
        DiracTerm::new(0.0, 0, abs_f0)?,
        DiracTerm::new(0.0, 1, -abs_f0)?,
    ];
    Ok(Ell1Result {
        value: DistributionalSignal::new(grid.clone(), regular, deltas)?,
        path: Ell1Path::ClosedForm,
        warnings: Vec::new(),
    })
}

/// Shared numeric route. With `subtract_linear` the boundary term enters as
/// −s·|f(0)| (first and second derivative); otherwise the fractional form
/// s^α (L(|f|) − |f(0)|/s) is assembled.
fn numeric_transform_path(
    f: &SignalSource,
    grid: &Grid,
    power: f64,
    abs_f0: f64,
    subtract_linear: bool,
    stehfest_terms: usize,
) -> Result<Ell1Result> {
    let abs_signal = abs_source(f)?;
    let t_hint = grid.t_end().max(3.0);
    let field = Arc::new(LaplaceField::forward_of_source(&abs_signal, t_hint));
    let sigma0 = field.sigma0();

    let p_field = field.clone();
    let p = move |s: f64| -> Result<f64> {
        let base = p_field.eval_real(s)?;
        if subtract_linear {
            Ok(s.powf(power) * base - s * abs_f0)
        } else {
            Ok(s.powf(power) * (base - abs_f0 / s))
        }
    };
    let p = Arc::new(p);

    let split = split_integer_powers(p.as_ref())?;
    let mut deltas = Vec::new();
    for (order, c) in split.detected() {
        deltas.push(DiracTerm::new(0.0, order, c)?);
    }

    let split_rem = split.clone();
    let p_rem = p.clone();
    let remainder = LaplaceField::from_real_fn(
        Arc::new(move |s: f64| Ok(p_rem(s)? - split_rem.poly_at(s))),
        sigma0,
    );

    let h = grid.step();
    let regular: Vec<f64> = grid
        .nodes()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|t| {
            let t_eff = if t <= 0.0 { 0.25 * h } else { t };
            invert_stehfest(&remainder, t_eff, stehfest_terms)
        })
        .collect::<Result<Vec<f64>>>()?;

    // divergence screen at a few representative times
    let mut warnings = Vec::new();
    for frac in [0.35, 0.7, 1.0] {
        let t = grid.t_start() + frac * (grid.t_end() - grid.t_start());
        if t <= 0.0 {
            continue;
        }
        if let Ok(gap) = stehfest_convergence_gap(&remainder, t, stehfest_terms) {
            if gap > 1e-3 {
                warnings.push(format!(
                    "Stehfest estimates differ by {gap:.2e} at t = {t:.3}; the numeric \
                     inversion may be diverging"
                ));
                break;
            }
        }
    }

    Ok(Ell1Result {
        value: DistributionalSignal::new(grid.clone(), regular, deltas)?,
        path: Ell1Path::LaplaceNumeric,
        warnings,
    })
}

fn abs_source(f: &SignalSource) -> Result<SignalSource> {
    Ok(match f {
        SignalSource::Expr(ast) => SignalSource::Expr(crate::expr::ExprAst::from_parts(
            crate::expr::Expr::Abs(Box::new(ast.root().clone())),
            ast.var(),
        )),
        SignalSource::Samples { grid, values } => SignalSource::Samples {
            grid: grid.clone(),
            values: values.iter().map(|v| v.abs()).collect(),
        },
    })
}

/// Second ℓ₁ derivative: L⁻¹( s²·L(|f|) − s·|f(0)| ), the ε→0 limit of the
/// composition identity. Dirac content through δ′ is tracked; an s² term
/// would need δ′′ and raises the cap error instead of being truncated.
pub fn ell1_second_derivative(f: &SignalSource, grid: &Grid) -> Result<Ell1Result> {
    let f0 = f.value_at(0.0).map_err(|_| {
        Error::Precondition("second ℓ₁ derivative needs f continuous at 0".into())
    })?;
    // the s² multiplier amplifies transform noise ~s²-fold at the Stehfest
    // nodes; the 14-term sum has a ~20x smaller coefficient mass than the
    // 16-term default and trades a little truncation for that headroom
    let out = numeric_transform_path(f, grid, 2.0, f0.abs(), true, 14)?;
    if out.value.deltas().iter().any(|d| d.order >= 2) {
        return Err(Error::DeltaOrderOverflow(3));
    }
    Ok(out)
}

/// Modified ℓ₁ fractional derivative of order α ∈ (0, 1).
///
/// Closed form: the order-α Caputo derivative of |f| from base 0, i.e.
/// g_{1−α} ⋆ (|f|)′ by weakly-singular product integration. Numeric cross
/// path: L⁻¹( s^α (L(|f|) − |f(0)|/s) ).
pub fn ell1_frac_derivative(
    f: &SignalSource,
    alpha: f64,
    grid: &Grid,
    path: Ell1Path,
) -> Result<Ell1Result> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "ℓ₁ fractional derivative needs α ∈ (0,1), got {alpha}"
        )));
    }
    let f0 = f.value_at(0.0).map_err(|_| {
        Error::Precondition("ℓ₁ fractional derivative needs f continuous at 0".into())
    })?;
    match path {
        Ell1Path::LaplaceNumeric => {
            numeric_transform_path(f, grid, alpha, f0.abs(), false, STEHFEST_TERMS)
        }
        Ell1Path::ClosedForm => {
            let ast = f.as_expr().ok_or_else(|| {
                Error::Unsupported(
                    "the closed-form ℓ₁ fractional path needs an expression source".into(),
                )
            })?;
            let deriv = ast.diff();
            let values = f.sample_on(grid)?;
            let crossings =
                values.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
            if crossings > MAX_SIGN_CHANGES {
                return Err(Error::Unsupported(
                    "zeros accumulate on the grid; |f|′ is not integrable enough".into(),
                ));
            }
            // (|f|)′ = sign(f)·f′ almost everywhere
            let mut p: Vec<f64> = grid
                .nodes()
                .zip(&values)
                .map(|(t, &v)| {
                    let sgn = if v >= 0.0 { 1.0 } else { -1.0 };
                    deriv.eval(t).map(|d| sgn * d).unwrap_or(f64::NAN)
                })
                .collect();
            // singular slope at the terminal: difference quotient of |f|
            let guard = if !p[0].is_finite() {
                Some((values[1].abs() - values[0].abs()) / grid.step())
            } else {
                None
            };
            for (k, v) in p.iter_mut().enumerate() {
                if !v.is_finite() {
                    if k == 0 && guard.is_some() {
                        continue;
                    }
                    return Err(Error::NodeEvaluation {
                        node: k,
                        t: grid.node(k),
                        message: "(|f|)′ is not finite".into(),
                    });
                }
            }
            let quad = SingularQuadrature::new(grid.clone(), -alpha)?;
            let scale = 1.0 / gamma_fn(1.0 - alpha)?;
            let regular: Vec<f64> = quad
                .apply_all(&p, guard)
                .into_iter()
                .map(|v| scale * v)
                .collect();
            Ok(Ell1Result {
                value: DistributionalSignal::regular_only(grid.clone(), regular)?,
                path: Ell1Path::ClosedForm,
                warnings: Vec::new(),
            })
        }
    }
}

/// Outcome of the additivity check over nonnegative combinations.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearityOutcome {
    /// max of the regular-part difference and the exact delta-coefficient
    /// difference between ℓ₁D(Σ c_k f_k) and Σ c_k ℓ₁D(f_k)
    Checked(f64),
    /// inputs left the regime where |Σ c_k f_k| = Σ c_k |f_k| holds
    PreconditionRestricted(String),
}

/// Additivity of the ℓ₁ derivative on nonnegative signals with nonnegative
/// coefficients. The identity pulls |·| through the sum, which is only
/// valid in that regime; anything outside reports a restricted status.
pub fn ell1_linearity_check(
    fs: &[SignalSource],
    cs: &[f64],
    grid: &Grid,
) -> Result<LinearityOutcome> {
    if fs.is_empty() || fs.len() != cs.len() {
        return Err(Error::InvalidArgument(
            "need matching, non-empty signal and coefficient lists".into(),
        ));
    }
    if let Some(c) = cs.iter().find(|c| **c < 0.0 || !c.is_finite()) {
        return Ok(LinearityOutcome::PreconditionRestricted(format!(
            "coefficient {c} is negative; |c·f| = c·|f| fails"
        )));
    }
    for (i, f) in fs.iter().enumerate() {
        let at0 = f.value_at(0.0)?;
        if at0 < 0.0 {
            return Ok(LinearityOutcome::PreconditionRestricted(format!(
                "signal {i} is negative at 0"
            )));
        }
        for (k, t) in grid.nodes().enumerate() {
            let v = f.value_at(t).map_err(|e| Error::NodeEvaluation {
                node: k,
                t,
                message: e.to_string(),
            })?;
            if v < 0.0 {
                return Ok(LinearityOutcome::PreconditionRestricted(format!(
                    "signal {i} changes sign at t = {t}"
                )));
            }
        }
    }

    // Σ c_k f_k as a single expression source
    use crate::expr::{Expr, ExprAst};
    let mut combo: Option<Expr> = None;
    for (f, &c) in fs.iter().zip(cs) {
        let ast = f.as_expr().ok_or_else(|| {
            Error::Unsupported("linearity check needs expression sources".into())
        })?;
        let scaled = Expr::Mul(Box::new(Expr::Num(c)), Box::new(ast.root().clone()));
        combo = Some(match combo {
            None => scaled,
            Some(acc) => Expr::Add(Box::new(acc), Box::new(scaled)),
        });
    }
    let combo = SignalSource::Expr(ExprAst::from_parts(combo.unwrap(), "t"));

    let lhs = ell1_derivative(&combo, grid, Ell1Path::ClosedForm)?.value;
    let mut rhs: Option<DistributionalSignal> = None;
    for (f, &c) in fs.iter().zip(cs) {
        let term = ell1_derivative(f, grid, Ell1Path::ClosedForm)?.value.scale(c);
        rhs = Some(match rhs {
            None => term,
            Some(acc) => acc.add(&term)?,
        });
    }
    let rhs = rhs.unwrap();

    let reg = lhs.max_regular_diff(&rhs, grid.t_start())?;
    let delta = delta_coefficient_diff(lhs.deltas(), rhs.deltas());
    Ok(LinearityOutcome::Checked(reg.max(delta)))
}

/// Largest coefficient difference across the union of two delta lists.
pub fn delta_coefficient_diff(a: &[DiracTerm], b: &[DiracTerm]) -> f64 {
    let mut worst = 0.0f64;
    let coeff = |list: &[DiracTerm], loc: f64, order: usize| {
        list.iter()
            .find(|d| d.location == loc && d.order == order)
            .map_or(0.0, |d| d.coefficient)
    };
    for d in a.iter().chain(b) {
        let ca = coeff(a, d.location, d.order);
        let cb = coeff(b, d.location, d.order);
        worst = worst.max((ca - cb).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(t_end: f64, n: usize) -> Grid {
        Grid::new(0.0, t_end, n).unwrap()
    }

    fn expr(s: &str) -> SignalSource {
        SignalSource::from_expr_str(s).unwrap()
    }

    fn delta_pairs(sig: &DistributionalSignal) -> Vec<(usize, f64)> {
        sig.deltas().iter().map(|d| (d.order, d.coefficient)).collect()
    }

    #[test]
    fn constant_gives_exact_delta_pair() {
        let g = grid(1.0, 51);
        let out = ell1_derivative(&expr("3"), &g, Ell1Path::ClosedForm).unwrap();
        assert!(out.value.regular().iter().all(|&v| v == 0.0));
        assert_eq!(delta_pairs(&out.value), vec![(0, 3.0), (1, -3.0)]);

        // |C| enters, not C
        let neg = ell1_derivative(&expr("-3"), &g, Ell1Path::ClosedForm).unwrap();
        assert_eq!(delta_pairs(&neg.value), vec![(0, 3.0), (1, -3.0)]);
    }

    #[test]
    fn exponential_closed_form() {
        let g = grid(2.0, 101);
        let out = ell1_derivative(&expr("exp(2*t)"), &g, Ell1Path::ClosedForm).unwrap();
        for (t, v) in g.nodes().zip(out.value.regular()) {
            let want = 2.0 * (2.0 * t).exp();
            assert!((v - want).abs() < 1e-10 * (1.0 + want));
        }
        assert_eq!(delta_pairs(&out.value), vec![(0, 1.0), (1, -1.0)]);
    }

    #[test]
    fn shifted_sine_closed_form() {
        // nonvanishing periodic signal: the regular part is plain cos t
        let g = grid(3.0, 61);
        let out = ell1_derivative(&expr("sin(t) + 2"), &g, Ell1Path::ClosedForm).unwrap();
        for (t, v) in g.nodes().zip(out.value.regular()) {
            assert!((v - t.cos()).abs() < 1e-12);
        }
        assert_eq!(delta_pairs(&out.value), vec![(0, 2.0), (1, -2.0)]);
    }

    #[test]
    fn numeric_path_recovers_exponential() {
        let g = grid(2.0, 37);
        let out = ell1_derivative(&expr("exp(2*t)"), &g, Ell1Path::LaplaceNumeric).unwrap();
        assert!(out.warnings.is_empty(), "{:?}", out.warnings);
        let k0 = g.first_node_at_or_after(0.2);
        for j in k0..g.n_points() {
            let want = 2.0 * (2.0 * g.node(j)).exp();
            let got = out.value.value(j);
            assert!(
                (got - want).abs() <= 1e-3 * (1.0 + want.abs()),
                "t={}: {got} vs {want}",
                g.node(j)
            );
        }
        let d = delta_pairs(&out.value);
        assert_eq!(d.len(), 2, "{d:?}");
        assert!((d[0].1 - 1.0).abs() < 1e-2, "{d:?}");
        assert!((d[1].1 + 1.0).abs() < 1e-2, "{d:?}");
    }

    #[test]
    fn paths_agree_for_constants() {
        let g = grid(2.0, 41);
        let closed = ell1_derivative(&expr("3"), &g, Ell1Path::ClosedForm).unwrap();
        let numeric = ell1_derivative(&expr("3"), &g, Ell1Path::LaplaceNumeric).unwrap();
        let reg = closed.value.max_regular_diff(&numeric.value, 0.2).unwrap();
        assert!(reg < 1e-3, "regular parts differ by {reg}");
        let dd = delta_coefficient_diff(closed.value.deltas(), numeric.value.deltas());
        assert!(dd < 1e-2, "delta coefficients differ by {dd}");
    }

    #[test]
    fn even_powers_drop_one_degree() {
        // f = t^{2k} with f(0) = 0: no deltas, regular 2k·t^{2k−1}
        let g = grid(1.0, 101);
        for k in [1usize, 2] {
            let p = 2 * k;
            let out =
                ell1_derivative(&expr(&format!("t^{p}")), &g, Ell1Path::ClosedForm).unwrap();
            assert!(out.value.deltas().is_empty());
            for (t, v) in g.nodes().zip(out.value.regular()) {
                let want = p as f64 * t.powi(p as i32 - 1);
                assert!((v - want).abs() < 1e-12 * (1.0 + want));
            }
        }
    }

    #[test]
    fn nonnegative_vanishing_signal_matches_classical_derivative() {
        let g = grid(1.0, 101);
        let out = ell1_derivative(&expr("t^2"), &g, Ell1Path::ClosedForm).unwrap();
        assert!(out.value.deltas().is_empty());
        for (t, v) in g.nodes().zip(out.value.regular()) {
            assert!((v - 2.0 * t).abs() < 1e-13);
        }
    }

    #[test]
    fn argument_scaling_rule() {
        // regular part of ℓ₁D f(at) is a·sign(f(at))·f′(at) for f = e^t, a = 2
        let g = grid(1.5, 76);
        let out = ell1_derivative(&expr("exp(2*t)"), &g, Ell1Path::ClosedForm).unwrap();
        for (t, v) in g.nodes().zip(out.value.regular()) {
            let want = 2.0 * (2.0 * t).exp();
            assert!((v - want).abs() < 1e-10 * (1.0 + want));
        }
    }

    #[test]
    fn second_derivative_of_ramp_is_delta() {
        let g = grid(1.0, 41);
        let out = ell1_second_derivative(&expr("t"), &g).unwrap();
        let d = delta_pairs(&out.value);
        assert_eq!(d.len(), 1, "{d:?}");
        assert_eq!(d[0].0, 0);
        assert!((d[0].1 - 1.0).abs() < 1e-2, "{d:?}");
        let k0 = g.first_node_at_or_after(0.2);
        for j in k0..g.n_points() {
            assert!(out.value.value(j).abs() < 1e-3, "t={}", g.node(j));
        }
    }

    #[test]
    fn second_derivative_of_exponential() {
        let g = grid(1.5, 31);
        let out = ell1_second_derivative(&expr("exp(t)"), &g).unwrap();
        // s²/(s−1) − s = 1 + 1/(s−1): one δ plus a regular e^t part
        let d = delta_pairs(&out.value);
        assert_eq!(d.len(), 1, "{d:?}");
        assert_eq!(d[0].0, 0);
        assert!((d[0].1 - 1.0).abs() < 1e-2, "{d:?}");
        let k0 = g.first_node_at_or_after(0.3);
        for j in k0..g.n_points() {
            let want = g.node(j).exp();
            assert!(
                (out.value.value(j) - want).abs() < 1e-2 * (1.0 + want),
                "t={}: {} vs {want}",
                g.node(j),
                out.value.value(j)
            );
        }
    }

    #[test]
    fn second_derivative_of_zero() {
        let g = grid(1.0, 21);
        let out = ell1_second_derivative(&expr("0"), &g).unwrap();
        assert!(out.value.deltas().is_empty());
        let k0 = g.first_node_at_or_after(0.2);
        for j in k0..g.n_points() {
            assert!(out.value.value(j).abs() < 1e-8);
        }
    }

    #[test]
    fn fractional_of_ramp_matches_power_rule() {
        let g = grid(1.0, 1001);
        let out = ell1_frac_derivative(&expr("t"), 0.5, &g, Ell1Path::ClosedForm).unwrap();
        assert!(out.value.deltas().is_empty());
        let k0 = g.first_node_at_or_after(0.1);
        for j in k0..g.n_points() {
            let want = std::f64::consts::FRAC_2_SQRT_PI * g.node(j).sqrt();
            assert!(
                ((out.value.value(j) - want) / want).abs() < 1e-6,
                "t={}",
                g.node(j)
            );
        }
    }

    #[test]
    fn fractional_annihilates_constants() {
        let g = grid(1.0, 101);
        let out = ell1_frac_derivative(&expr("5"), 0.5, &g, Ell1Path::ClosedForm).unwrap();
        assert!(out.value.regular().iter().all(|&v| v == 0.0));
        assert!(out.value.deltas().is_empty());
    }

    #[test]
    fn fractional_near_one_approaches_first_order() {
        let g = grid(1.0, 1001);
        let frac = ell1_frac_derivative(&expr("t"), 0.999, &g, Ell1Path::ClosedForm).unwrap();
        let first = ell1_derivative(&expr("t"), &g, Ell1Path::ClosedForm).unwrap();
        let diff = frac.value.max_regular_diff(&first.value, 0.1).unwrap();
        assert!(diff < 1e-2, "α→1 gap {diff}");
    }

    #[test]
    fn fractional_numeric_cross_path() {
        let g = grid(1.0, 31);
        let numeric =
            ell1_frac_derivative(&expr("t"), 0.5, &g, Ell1Path::LaplaceNumeric).unwrap();
        let closed = ell1_frac_derivative(&expr("t"), 0.5, &g, Ell1Path::ClosedForm).unwrap();
        let diff = numeric.value.max_regular_diff(&closed.value, 0.2).unwrap();
        assert!(diff < 1e-3, "cross-path gap {diff}");
    }

    #[test]
    fn fractional_rejects_bad_alpha() {
        let g = grid(1.0, 11);
        assert!(ell1_frac_derivative(&expr("t"), 1.0, &g, Ell1Path::ClosedForm).is_err());
        assert!(ell1_frac_derivative(&expr("t"), 0.0, &g, Ell1Path::ClosedForm).is_err());
    }

    #[test]
    fn linearity_on_constants_is_exact() {
        let g = grid(1.0, 21);
        let fs = [expr("2"), expr("3")];
        match ell1_linearity_check(&fs, &[1.0, 1.0], &g).unwrap() {
            LinearityOutcome::Checked(d) => assert_eq!(d, 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn linearity_identity_and_zero_coefficient() {
        let g = grid(1.0, 21);
        match ell1_linearity_check(&[expr("exp(t)")], &[1.0], &g).unwrap() {
            LinearityOutcome::Checked(d) => assert!(d < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        let fs = [expr("exp(t)"), expr("1")];
        match ell1_linearity_check(&fs, &[2.0, 0.0], &g).unwrap() {
            LinearityOutcome::Checked(d) => assert!(d < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn linearity_restricts_outside_regime() {
        let g = grid(1.0, 21);
        let fs = [expr("2"), expr("3")];
        assert!(matches!(
            ell1_linearity_check(&fs, &[1.0, -1.0], &g).unwrap(),
            LinearityOutcome::PreconditionRestricted(_)
        ));
        let sign_changer = [expr("t - 0.5")];
        assert!(matches!(
            ell1_linearity_check(&sign_changer, &[1.0], &g).unwrap(),
            LinearityOutcome::PreconditionRestricted(_)
        ));
    }
}
