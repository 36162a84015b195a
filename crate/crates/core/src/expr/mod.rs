//! A small expression language for signals f(t) and transforms F(s).
//!
//! The grammar covers literals, one free variable, `+ - * /`, powers with
//! real literal exponents, `abs`, `sign`, `exp`, `sin`, `cos`, `heaviside`
//! and arbitrary shifted compositions like `abs(t-1)`. Precedence is
//! `^` > unary `-` > `* /` > `+ -`, `^` is right-associative, and there is
//! no implicit multiplication.
//!
//! Differentiation is symbolic and total: `abs` differentiates to
//! `sign(·)`, `heaviside` to a Dirac marker node that evaluates to zero
//! almost everywhere and that downstream operators convert to symbolic
//! Dirac terms.

mod diff;
mod parse;

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum tree depth accepted by the parser.
pub const MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Power with a real literal exponent.
    Pow(Box<Expr>, f64),
    Neg(Box<Expr>),
    Abs(Box<Expr>),
    Sign(Box<Expr>),
    Exp(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Heaviside(Box<Expr>),
    /// δ^{(order)}(inner): produced by differentiation, zero a.e.
    Dirac { inner: Box<Expr>, order: u8 },
}

/// A parsed expression together with the name of its free variable.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprAst {
    root: Expr,
    var: String,
}

impl ExprAst {
    /// Parse `src`, accepting either `t` or `s` as the free variable
    /// (whichever occurs; a constant expression defaults to `t`).
    pub fn parse(src: &str) -> Result<ExprAst> {
        parse::parse(src, None)
    }

    /// Parse `src` with a fixed variable name; any other identifier that is
    /// not a known function is rejected.
    pub fn parse_as(src: &str, var: &str) -> Result<ExprAst> {
        parse::parse(src, Some(var))
    }

    pub fn from_parts(root: Expr, var: &str) -> ExprAst {
        ExprAst { root: diff::simplify(root), var: var.to_string() }
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    /// Evaluate at a real point. Domain violations (negative base with a
    /// fractional exponent, 0/0) are errors; overflow follows IEEE and
    /// comes back as a signed infinity.
    pub fn eval(&self, x: f64) -> Result<f64> {
        eval_real(&self.root, x)
    }

    /// Evaluate at a complex point (used for transforms in `s`). The
    /// non-analytic nodes `abs`, `sign`, `heaviside` and Dirac markers are
    /// rejected here.
    pub fn eval_complex(&self, s: Complex64) -> Result<Complex64> {
        eval_complex(&self.root, s)
    }

    /// Symbolic derivative with respect to the free variable.
    pub fn diff(&self) -> ExprAst {
        ExprAst {
            root: diff::simplify(diff::derivative(&self.root)),
            var: self.var.clone(),
        }
    }

    /// Constant value of a variable-free expression.
    pub fn const_value(&self) -> Option<f64> {
        const_fold(&self.root)
    }

    /// True if the tree contains `abs`, `sign`, `heaviside` or a Dirac
    /// marker, i.e. anything that is not smooth everywhere.
    pub fn has_nonsmooth(&self) -> bool {
        contains(&self.root, &|e| {
            matches!(
                e,
                Expr::Abs(_) | Expr::Sign(_) | Expr::Heaviside(_) | Expr::Dirac { .. }
            )
        })
    }

    /// True if the tree contains a Dirac marker.
    pub fn has_dirac(&self) -> bool {
        contains(&self.root, &|e| matches!(e, Expr::Dirac { .. }))
    }

    /// Crude bound on the exponential order of the signal: the smallest σ
    /// with |f(t)| ≲ e^{σt}. Infinite when a super-exponential factor such
    /// as exp(t^2) is present.
    pub fn growth_rate(&self) -> f64 {
        growth(&self.root)
    }
}

fn contains(e: &Expr, pred: &dyn Fn(&Expr) -> bool) -> bool {
    if pred(e) {
        return true;
    }
    match e {
        Expr::Num(_) | Expr::Var => false,
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            contains(a, pred) || contains(b, pred)
        }
        Expr::Pow(a, _) => contains(a, pred),
        Expr::Neg(a)
        | Expr::Abs(a)
        | Expr::Sign(a)
        | Expr::Exp(a)
        | Expr::Sin(a)
        | Expr::Cos(a)
        | Expr::Heaviside(a) => contains(a, pred),
        Expr::Dirac { inner, .. } => contains(inner, pred),
    }
}

pub(crate) fn const_fold(e: &Expr) -> Option<f64> {
    Some(match e {
        Expr::Num(v) => *v,
        Expr::Var => return None,
        Expr::Add(a, b) => const_fold(a)? + const_fold(b)?,
        Expr::Sub(a, b) => const_fold(a)? - const_fold(b)?,
        Expr::Mul(a, b) => const_fold(a)? * const_fold(b)?,
        Expr::Div(a, b) => const_fold(a)? / const_fold(b)?,
        Expr::Pow(a, p) => const_fold(a)?.powf(*p),
        Expr::Neg(a) => -const_fold(a)?,
        Expr::Abs(a) => const_fold(a)?.abs(),
        Expr::Sign(a) => {
            if const_fold(a)? >= 0.0 {
                1.0
            } else {
                -1.0
            }
        }
        Expr::Exp(a) => const_fold(a)?.exp(),
        Expr::Sin(a) => const_fold(a)?.sin(),
        Expr::Cos(a) => const_fold(a)?.cos(),
        Expr::Heaviside(a) => {
            if const_fold(a)? >= 0.0 {
                1.0
            } else {
                0.0
            }
        }
        Expr::Dirac { .. } => return None,
    })
}

fn eval_real(e: &Expr, x: f64) -> Result<f64> {
    let v = match e {
        Expr::Num(v) => *v,
        Expr::Var => x,
        Expr::Add(a, b) => eval_real(a, x)? + eval_real(b, x)?,
        Expr::Sub(a, b) => eval_real(a, x)? - eval_real(b, x)?,
        Expr::Mul(a, b) => eval_real(a, x)? * eval_real(b, x)?,
        Expr::Div(a, b) => eval_real(a, x)? / eval_real(b, x)?,
        Expr::Pow(a, p) => {
            let base = eval_real(a, x)?;
            if base < 0.0 && p.fract() != 0.0 {
                return Err(Error::Domain {
                    at: x,
                    message: format!("negative base {base} with fractional exponent {p}"),
                });
            }
            base.powf(*p)
        }
        Expr::Neg(a) => -eval_real(a, x)?,
        Expr::Abs(a) => eval_real(a, x)?.abs(),
        // sign(0) = +1 by the library's one-sided convention
        Expr::Sign(a) => {
            if eval_real(a, x)? >= 0.0 {
                1.0
            } else {
                -1.0
            }
        }
        Expr::Exp(a) => eval_real(a, x)?.exp(),
        Expr::Sin(a) => eval_real(a, x)?.sin(),
        Expr::Cos(a) => eval_real(a, x)?.cos(),
        // right-continuous: H(0) = 1
        Expr::Heaviside(a) => {
            if eval_real(a, x)? >= 0.0 {
                1.0
            } else {
                0.0
            }
        }
        Expr::Dirac { .. } => 0.0,
    };
    if v.is_nan() {
        return Err(Error::Domain {
            at: x,
            message: "expression evaluated to NaN".into(),
        });
    }
    Ok(v)
}

fn eval_complex(e: &Expr, s: Complex64) -> Result<Complex64> {
    let v = match e {
        Expr::Num(v) => Complex64::new(*v, 0.0),
        Expr::Var => s,
        Expr::Add(a, b) => eval_complex(a, s)? + eval_complex(b, s)?,
        Expr::Sub(a, b) => eval_complex(a, s)? - eval_complex(b, s)?,
        Expr::Mul(a, b) => eval_complex(a, s)? * eval_complex(b, s)?,
        Expr::Div(a, b) => eval_complex(a, s)? / eval_complex(b, s)?,
        Expr::Pow(a, p) => eval_complex(a, s)?.powf(*p),
        Expr::Neg(a) => -eval_complex(a, s)?,
        Expr::Exp(a) => eval_complex(a, s)?.exp(),
        Expr::Sin(a) => eval_complex(a, s)?.sin(),
        Expr::Cos(a) => eval_complex(a, s)?.cos(),
        Expr::Abs(_) | Expr::Sign(_) | Expr::Heaviside(_) | Expr::Dirac { .. } => {
            return Err(Error::Domain {
                at: s.re,
                message: "non-analytic node in complex evaluation".into(),
            })
        }
    };
    if v.re.is_nan() || v.im.is_nan() {
        return Err(Error::Domain {
            at: s.re,
            message: "complex evaluation produced NaN".into(),
        });
    }
    Ok(v)
}

fn growth(e: &Expr) -> f64 {
    match e {
        Expr::Num(_) | Expr::Var => 0.0,
        Expr::Add(a, b) | Expr::Sub(a, b) => growth(a).max(growth(b)),
        Expr::Mul(a, b) => growth(a) + growth(b),
        Expr::Div(a, _) => growth(a).max(0.0),
        Expr::Pow(a, p) => {
            if *p > 0.0 {
                p * growth(a)
            } else {
                0.0
            }
        }
        Expr::Neg(a) | Expr::Abs(a) => growth(a),
        // bounded range regardless of the inner growth
        Expr::Sin(_) | Expr::Cos(_) | Expr::Sign(_) | Expr::Heaviside(_) => 0.0,
        Expr::Dirac { .. } => 0.0,
        Expr::Exp(a) => {
            // exp(c·t + d) has exponential order c (negative orders widen
            // the transform's convergence half-plane); anything superlinear
            // is unbounded
            let d = diff::simplify(diff::derivative(a));
            const_fold(&d).unwrap_or(f64::INFINITY)
        }
    }
}

// Precedence levels used by the printer; must agree with the parser.
fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, &self.root, &self.var)
    }
}

fn write_child(
    f: &mut fmt::Formatter<'_>,
    child: &Expr,
    var: &str,
    min_prec: u8,
) -> fmt::Result {
    let needs_parens = prec(child) < min_prec
        || matches!(child, Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()));
    if needs_parens {
        write!(f, "(")?;
        write_expr(f, child, var)?;
        write!(f, ")")
    } else {
        write_expr(f, child, var)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr, var: &str) -> fmt::Result {
    match e {
        Expr::Num(v) => write!(f, "{v}"),
        Expr::Var => write!(f, "{var}"),
        Expr::Add(a, b) => {
            write_child(f, a, var, 1)?;
            write!(f, " + ")?;
            write_child(f, b, var, 2)
        }
        Expr::Sub(a, b) => {
            write_child(f, a, var, 1)?;
            write!(f, " - ")?;
            write_child(f, b, var, 2)
        }
        Expr::Mul(a, b) => {
            write_child(f, a, var, 2)?;
            write!(f, "*")?;
            write_child(f, b, var, 3)
        }
        Expr::Div(a, b) => {
            write_child(f, a, var, 2)?;
            write!(f, "/")?;
            write_child(f, b, var, 3)
        }
        Expr::Pow(a, p) => {
            write_child(f, a, var, 5)?;
            if *p < 0.0 {
                write!(f, "^({p})")
            } else {
                write!(f, "^{p}")
            }
        }
        Expr::Neg(a) => {
            write!(f, "-")?;
            write_child(f, a, var, 3)
        }
        Expr::Abs(a) => write_fn(f, "abs", a, var),
        Expr::Sign(a) => write_fn(f, "sign", a, var),
        Expr::Exp(a) => write_fn(f, "exp", a, var),
        Expr::Sin(a) => write_fn(f, "sin", a, var),
        Expr::Cos(a) => write_fn(f, "cos", a, var),
        Expr::Heaviside(a) => write_fn(f, "heaviside", a, var),
        Expr::Dirac { inner, order } => {
            // not part of the surface grammar; printed for diagnostics only
            write!(f, "dirac{order}(")?;
            write_expr(f, inner, var)?;
            write!(f, ")")
        }
    }
}

fn write_fn(f: &mut fmt::Formatter<'_>, name: &str, a: &Expr, var: &str) -> fmt::Result {
    write!(f, "{name}(")?;
    write_expr(f, a, var)?;
    write!(f, ")")
}

#[cfg(test)]
mod tests;
