use super::*;
use crate::error::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn p(src: &str) -> ExprAst {
    ExprAst::parse(src).unwrap()
}

#[test]
fn parses_power_with_real_exponent() {
    let ast = p("t^2.5");
    assert_eq!(*ast.root(), Expr::Pow(Box::new(Expr::Var), 2.5));
    assert_eq!(ast.var(), "t");
}

#[test]
fn parses_shifted_abs() {
    let ast = p("abs(t-1)");
    assert_eq!(
        *ast.root(),
        Expr::Abs(Box::new(Expr::Sub(Box::new(Expr::Var), Box::new(Expr::Num(1.0)))))
    );
}

#[test]
fn parses_mixed_functions() {
    let ast = p("exp(0.5*t) + sin(t)");
    match ast.root() {
        Expr::Add(a, b) => {
            assert!(matches!(**a, Expr::Exp(_)));
            assert!(matches!(**b, Expr::Sin(_)));
        }
        other => panic!("unexpected shape {other:?}"),
    }
}

#[test]
fn precedence_and_associativity() {
    // ^ binds tighter than unary minus, which binds tighter than *
    assert_eq!(p("-t^2").eval(3.0).unwrap(), -9.0);
    assert_eq!(p("2*t^2").eval(3.0).unwrap(), 18.0);
    // left associativity of - ; right associativity of ^
    assert_eq!(p("1 - 2 - 3").eval(0.0).unwrap(), -4.0);
    assert_eq!(p("t^2^3").eval(2.0).unwrap(), 256.0); // t^(2^3) = t^8
    // exponent may be a parenthesized negative literal
    assert_eq!(p("t^(-1)").eval(4.0).unwrap(), 0.25);
}

#[test]
fn eval_examples() {
    assert_eq!(p("t^2").eval(3.0).unwrap(), 9.0);
    assert_eq!(p("abs(t-1)").eval(0.25).unwrap(), 0.75);
    assert_eq!(p("heaviside(t-2)").eval(1.0).unwrap(), 0.0);
    assert_eq!(p("heaviside(t-2)").eval(2.0).unwrap(), 1.0); // right-continuous
    assert_eq!(p("sign(t)").eval(0.0).unwrap(), 1.0); // sign(0) = +1
}

#[test]
fn domain_and_error_cases() {
    assert!(matches!(p("t^0.5").eval(-1.0), Err(Error::Domain { .. })));
    // syntax error carries a byte offset
    match ExprAst::parse("t +* 2") {
        Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 3),
        other => panic!("expected syntax error, got {other:?}"),
    }
    match ExprAst::parse("2 * x") {
        Err(Error::UnknownIdentifier { name, offset }) => {
            assert_eq!(name, "x");
            assert_eq!(offset, 4);
        }
        other => panic!("expected unknown identifier, got {other:?}"),
    }
    // no implicit multiplication
    assert!(ExprAst::parse("2 t").is_err());
    // mixing both variable names is rejected
    assert!(ExprAst::parse("t + s").is_err());
    // fixed-variable parse rejects the other name
    assert!(ExprAst::parse_as("1/s", "s").is_ok());
    assert!(ExprAst::parse_as("1/t", "s").is_err());
}

#[test]
fn overflow_is_signed_infinity() {
    assert_eq!(p("exp(t)").eval(1000.0).unwrap(), f64::INFINITY);
    assert_eq!(p("1/t").eval(0.0).unwrap(), f64::INFINITY);
    assert_eq!(p("-1/t").eval(0.0).unwrap(), f64::NEG_INFINITY);
}

#[test]
fn diff_power_rule() {
    let d = p("t^2.5").diff();
    for &t in &[0.3f64, 1.0, 2.7] {
        let expected = 2.5 * t.powf(1.5);
        assert!((d.eval(t).unwrap() - expected).abs() < 1e-12 * (1.0 + expected.abs()));
    }
}

#[test]
fn diff_abs_is_sign() {
    let d = p("abs(t-1)").diff();
    assert_eq!(
        *d.root(),
        Expr::Sign(Box::new(Expr::Sub(Box::new(Expr::Var), Box::new(Expr::Num(1.0)))))
    );
    assert_eq!(d.eval(0.0).unwrap(), -1.0);
    assert_eq!(d.eval(2.0).unwrap(), 1.0);
    // at the kink the one-sided convention applies
    assert_eq!(d.eval(1.0).unwrap(), 1.0);
}

#[test]
fn diff_exponential() {
    let d = p("exp(2*t)").diff();
    for &t in &[0.0f64, 0.5, 1.3] {
        let expected = 2.0 * (2.0 * t).exp();
        assert!((d.eval(t).unwrap() - expected).abs() < 1e-12 * expected);
    }
}

#[test]
fn diff_heaviside_flags_dirac() {
    let d = p("heaviside(t-2)").diff();
    assert!(d.has_dirac());
    assert_eq!(d.eval(5.0).unwrap(), 0.0); // zero almost everywhere
    assert!(!p("sin(t)").diff().has_dirac());
}

#[test]
fn derivative_matches_finite_differences() {
    let smooth = [
        "t^2.5",
        "exp(0.5*t) + sin(t)",
        "cos(2*t)*t",
        "t^3 - 2*t + 1",
        "exp(-t)*sin(t)",
        "1/(1+t)",
    ];
    let mut rng = rand::rngs::StdRng::seed_from_u64(42);
    for src in smooth {
        let f = p(src);
        let d = f.diff();
        for _ in 0..100 {
            let t: f64 = rng.gen_range(0.1..3.0);
            let h = 1e-6 * (1.0 + t.abs());
            let fd = (f.eval(t + h).unwrap() - f.eval(t - h).unwrap()) / (2.0 * h);
            let sym = d.eval(t).unwrap();
            assert!(
                (fd - sym).abs() <= 1e-5 * (1.0 + sym.abs()),
                "{src} at t={t}: fd={fd} sym={sym}"
            );
        }
    }
}

#[test]
fn growth_rate_estimates() {
    assert_eq!(p("exp(2*t)").growth_rate(), 2.0);
    assert_eq!(p("sin(t) + 2").growth_rate(), 0.0);
    assert_eq!(p("t^2").growth_rate(), 0.0);
    assert_eq!(p("t^2*exp(t)").growth_rate(), 1.0);
    assert_eq!(p("exp(t^2)").growth_rate(), f64::INFINITY);
    // decaying exponentials report their (negative) order, which widens
    // the usable half-plane of the transform
    assert_eq!(p("exp(-3*t)").growth_rate(), -3.0);
}

#[test]
fn complex_eval_matches_real_on_axis() {
    let f = ExprAst::parse_as("1/(s+1) + s^(-2)", "s").unwrap();
    let re = f.eval(2.0).unwrap();
    let z = f.eval_complex(num_complex::Complex64::new(2.0, 0.0)).unwrap();
    assert!((z.re - re).abs() < 1e-14 && z.im.abs() < 1e-14);
    // non-analytic nodes are rejected in the complex evaluator
    let g = ExprAst::parse_as("abs(s)", "s").unwrap();
    assert!(g.eval_complex(num_complex::Complex64::new(1.0, 1.0)).is_err());
}

// strategy over the surface grammar (no Dirac markers, finite literals)
fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-100.0f64..100.0).prop_map(Expr::Num),
        Just(Expr::Var),
    ];
    leaf.prop_recursive(5, 64, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            (inner.clone(), -4.0f64..4.0).prop_map(|(a, p)| Expr::Pow(Box::new(a), p)),
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Abs(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Sign(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Exp(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Sin(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Cos(Box::new(a))),
            inner.prop_map(|a| Expr::Heaviside(Box::new(a))),
        ]
    })
}

proptest! {
    // parse ∘ print ∘ parse is the identity on ASTs
    #[test]
    fn print_parse_roundtrip(root in expr_strategy()) {
        let ast = ExprAst::from_parts(root, "t");
        let printed = ast.to_string();
        let reparsed = ExprAst::parse_as(&printed, "t")
            .unwrap_or_else(|e| panic!("could not reparse `{printed}`: {e}"));
        prop_assert_eq!(&reparsed, &ast, "printed form: {}", printed);
    }
}
