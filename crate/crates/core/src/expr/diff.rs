//! Symbolic differentiation and the light simplifier applied after it.

use super::{const_fold, Expr};

pub fn derivative(e: &Expr) -> Expr {
    match e {
        Expr::Num(_) => Expr::Num(0.0),
        Expr::Var => Expr::Num(1.0),
        Expr::Add(a, b) => Expr::Add(Box::new(derivative(a)), Box::new(derivative(b))),
        Expr::Sub(a, b) => Expr::Sub(Box::new(derivative(a)), Box::new(derivative(b))),
        Expr::Mul(a, b) => Expr::Add(
            Box::new(Expr::Mul(Box::new(derivative(a)), b.clone())),
            Box::new(Expr::Mul(a.clone(), Box::new(derivative(b)))),
        ),
        Expr::Div(a, b) => Expr::Div(
            Box::new(Expr::Sub(
                Box::new(Expr::Mul(Box::new(derivative(a)), b.clone())),
                Box::new(Expr::Mul(a.clone(), Box::new(derivative(b)))),
            )),
            Box::new(Expr::Pow(b.clone(), 2.0)),
        ),
        Expr::Pow(a, p) => Expr::Mul(
            Box::new(Expr::Mul(
                Box::new(Expr::Num(*p)),
                Box::new(Expr::Pow(a.clone(), p - 1.0)),
            )),
            Box::new(derivative(a)),
        ),
        Expr::Neg(a) => Expr::Neg(Box::new(derivative(a))),
        // d|u| = sign(u)·u'; the sign(0)=+1 convention handles the kink
        Expr::Abs(a) => Expr::Mul(Box::new(Expr::Sign(a.clone())), Box::new(derivative(a))),
        // d sign(u) = 2δ(u)·u' in the distributional sense
        Expr::Sign(a) => Expr::Mul(
            Box::new(Expr::Mul(
                Box::new(Expr::Num(2.0)),
                Box::new(Expr::Dirac { inner: a.clone(), order: 0 }),
            )),
            Box::new(derivative(a)),
        ),
        Expr::Exp(a) => Expr::Mul(Box::new(Expr::Exp(a.clone())), Box::new(derivative(a))),
        Expr::Sin(a) => Expr::Mul(Box::new(Expr::Cos(a.clone())), Box::new(derivative(a))),
        Expr::Cos(a) => Expr::Neg(Box::new(Expr::Mul(
            Box::new(Expr::Sin(a.clone())),
            Box::new(derivative(a)),
        ))),
        // dH(u) = δ(u)·u': flagged for downstream conversion to a DiracTerm
        Expr::Heaviside(a) => Expr::Mul(
            Box::new(Expr::Dirac { inner: a.clone(), order: 0 }),
            Box::new(derivative(a)),
        ),
        Expr::Dirac { inner, order } => Expr::Mul(
            Box::new(Expr::Dirac {
                inner: inner.clone(),
                order: order.saturating_add(1),
            }),
            Box::new(derivative(inner)),
        ),
    }
}

/// Bottom-up constant folding plus identity elimination. Keeps derivative
/// output readable and cheap to evaluate; not a CAS.
pub fn simplify(e: Expr) -> Expr {
    let e = map_children(e, simplify);
    if let Some(v) = const_fold(&e) {
        if v.is_finite() {
            return Expr::Num(v);
        }
    }
    match e {
        Expr::Add(a, b) => match (*a, *b) {
            (Expr::Num(x), rhs) if x == 0.0 => rhs,
            (lhs, Expr::Num(x)) if x == 0.0 => lhs,
            (lhs, rhs) => Expr::Add(Box::new(lhs), Box::new(rhs)),
        },
        Expr::Sub(a, b) => match (*a, *b) {
            (lhs, Expr::Num(x)) if x == 0.0 => lhs,
            (Expr::Num(x), rhs) if x == 0.0 => negated(rhs),
            (lhs, rhs) => Expr::Sub(Box::new(lhs), Box::new(rhs)),
        },
        Expr::Mul(a, b) => match (*a, *b) {
            (Expr::Num(x), _) | (_, Expr::Num(x)) if x == 0.0 => Expr::Num(0.0),
            (Expr::Num(x), rhs) if x == 1.0 => rhs,
            (lhs, Expr::Num(x)) if x == 1.0 => lhs,
            (Expr::Num(x), rhs) if x == -1.0 => negated(rhs),
            (lhs, Expr::Num(x)) if x == -1.0 => negated(lhs),
            (lhs, rhs) => Expr::Mul(Box::new(lhs), Box::new(rhs)),
        },
        Expr::Div(a, b) => match (*a, *b) {
            (Expr::Num(x), rhs) if x == 0.0 && !matches!(rhs, Expr::Num(y) if y == 0.0) => {
                Expr::Num(0.0)
            }
            (lhs, Expr::Num(x)) if x == 1.0 => lhs,
            (lhs, rhs) => Expr::Div(Box::new(lhs), Box::new(rhs)),
        },
        Expr::Pow(a, p) => {
            if p == 0.0 {
                Expr::Num(1.0)
            } else if p == 1.0 {
                *a
            } else {
                Expr::Pow(a, p)
            }
        }
        Expr::Neg(a) => negated(*a),
        other => other,
    }
}

// negation that never stacks Neg(Neg(…)), keeping simplify idempotent
fn negated(e: Expr) -> Expr {
    match e {
        Expr::Neg(inner) => *inner,
        Expr::Num(v) => Expr::Num(-v),
        other => Expr::Neg(Box::new(other)),
    }
}

fn map_children(e: Expr, f: impl Fn(Expr) -> Expr + Copy) -> Expr {
    match e {
        Expr::Add(a, b) => Expr::Add(Box::new(f(*a)), Box::new(f(*b))),
        Expr::Sub(a, b) => Expr::Sub(Box::new(f(*a)), Box::new(f(*b))),
        Expr::Mul(a, b) => Expr::Mul(Box::new(f(*a)), Box::new(f(*b))),
        Expr::Div(a, b) => Expr::Div(Box::new(f(*a)), Box::new(f(*b))),
        Expr::Pow(a, p) => Expr::Pow(Box::new(f(*a)), p),
        Expr::Neg(a) => Expr::Neg(Box::new(f(*a))),
        Expr::Abs(a) => Expr::Abs(Box::new(f(*a))),
        Expr::Sign(a) => Expr::Sign(Box::new(f(*a))),
        Expr::Exp(a) => Expr::Exp(Box::new(f(*a))),
        Expr::Sin(a) => Expr::Sin(Box::new(f(*a))),
        Expr::Cos(a) => Expr::Cos(Box::new(f(*a))),
        Expr::Heaviside(a) => Expr::Heaviside(Box::new(f(*a))),
        Expr::Dirac { inner, order } => Expr::Dirac { inner: Box::new(f(*inner)), order },
        leaf => leaf,
    }
}
