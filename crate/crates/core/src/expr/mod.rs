//! Scalar expressions over named variables with exact first and second
//! partial derivatives (forward mode on second-order jets).

mod ast;
mod jet;
mod parser;

pub use ast::{BinOp, Expr, Func, Node};
pub use jet::Jet2;
pub use parser::parse_expr;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("undeclared identifier \"{name}\" at byte {offset}")]
    Undeclared { name: String, offset: usize },
    #[error("invalid variable name \"{0}\"")]
    InvalidVariable(String),
    #[error("expression has {expected} variables but the point has {got} coordinates")]
    Arity { expected: usize, got: usize },
    #[error("domain error in `{node}`: {reason}")]
    Domain { node: String, reason: String },
}

fn domain<S: Scalar>(node: &Node<S>, vars: &[String], reason: &str) -> ExprError {
    let mut text = String::new();
    let _ = node.write(vars, &mut text);
    ExprError::Domain { node: text, reason: reason.to_string() }
}

/// Evaluates value, gradient and Hessian at `point`.
pub fn eval_jet2<S: Scalar, const N: usize>(expr: &Expr<S>, point: &[S; N]) -> Result<Jet2<S, N>, ExprError> {
    if expr.vars.len() != N {
        return Err(ExprError::Arity { expected: expr.vars.len(), got: N });
    }
    jet_node(&expr.root, point, &expr.vars)
}

/// Evaluates the value only. Unlike [`eval_jet2`] it accepts `sqrt(0)`.
pub fn eval<S: Scalar>(expr: &Expr<S>, point: &[S]) -> Result<S, ExprError> {
    if expr.vars.len() != point.len() {
        return Err(ExprError::Arity { expected: expr.vars.len(), got: point.len() });
    }
    eval_value_named(&expr.root, point, &expr.vars)
}

pub(crate) fn eval_value<S: Scalar>(node: &Node<S>, point: &[S]) -> Result<S, ExprError> {
    eval_value_named(node, point, &[])
}

fn eval_value_named<S: Scalar>(node: &Node<S>, point: &[S], vars: &[String]) -> Result<S, ExprError> {
    let ev = |n: &Node<S>| eval_value_named(n, point, vars);
    let v = match node {
        Node::Const(c) => *c,
        Node::Var(i) => point[*i],
        Node::Neg(a) => -ev(a)?,
        Node::Binary(op, a, b) => {
            let (x, y) = (ev(a)?, ev(b)?);
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y == S::zero() {
                        return Err(domain(node, vars, "division by zero"));
                    }
                    x / y
                }
            }
        }
        Node::PowInt(a, k) => {
            let x = ev(a)?;
            if *k < 0 && x == S::zero() {
                return Err(domain(node, vars, "division by zero"));
            }
            x.powi(*k)
        }
        Node::PowReal(a, p) => {
            let x = ev(a)?;
            if x <= S::zero() {
                return Err(domain(node, vars, "non-integer power of a non-positive base"));
            }
            x.powf(*p)
        }
        Node::Call(f, a) => {
            let x = ev(a)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => {
                    if x.cos() == S::zero() {
                        return Err(domain(node, vars, "tan at a pole"));
                    }
                    x.tan()
                }
                Func::Exp => x.exp(),
                Func::Ln => {
                    if x <= S::zero() {
                        return Err(domain(node, vars, "ln of a non-positive argument"));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if x < S::zero() {
                        return Err(domain(node, vars, "sqrt of a negative argument"));
                    }
                    x.sqrt()
                }
            }
        }
    };
    if !v.is_finite() {
        return Err(domain(node, vars, "non-finite result"));
    }
    Ok(v)
}

fn jet_node<S: Scalar, const N: usize>(node: &Node<S>, point: &[S; N], vars: &[String]) -> Result<Jet2<S, N>, ExprError> {
    let ev = |n: &Node<S>| jet_node(n, point, vars);
    let j = match node {
        Node::Const(c) => Jet2::constant(*c),
        Node::Var(i) => Jet2::variable(*i, point[*i]),
        Node::Neg(a) => ev(a)?.neg(),
        Node::Binary(op, a, b) => {
            let (x, y) = (ev(a)?, ev(b)?);
            match op {
                BinOp::Add => x.add(&y),
                BinOp::Sub => x.sub(&y),
                BinOp::Mul => x.mul(&y),
                BinOp::Div => {
                    if y.value == S::zero() {
                        return Err(domain(node, vars, "division by zero"));
                    }
                    x.mul(&reciprocal(&y))
                }
            }
        }
        Node::PowInt(a, k) => {
            let x = ev(a)?;
            let p = x.powi_nonneg(k.unsigned_abs());
            if *k < 0 {
                if x.value == S::zero() {
                    return Err(domain(node, vars, "division by zero"));
                }
                reciprocal(&p)
            } else {
                p
            }
        }
        Node::PowReal(a, p) => {
            let x = ev(a)?;
            let b = x.value;
            if b <= S::zero() {
                return Err(domain(node, vars, "non-integer power of a non-positive base"));
            }
            let one = S::one();
            let f = b.powf(*p);
            x.chain(f, *p * b.powf(*p - one), *p * (*p - one) * b.powf(*p - one - one))
        }
        Node::Call(func, a) => {
            let x = ev(a)?;
            let t = x.value;
            match func {
                Func::Sin => x.chain(t.sin(), t.cos(), -t.sin()),
                Func::Cos => x.chain(t.cos(), -t.sin(), -t.cos()),
                Func::Tan => {
                    let c = t.cos();
                    if c == S::zero() {
                        return Err(domain(node, vars, "tan at a pole"));
                    }
                    let tn = t.tan();
                    let sec2 = S::one() / (c * c);
                    x.chain(tn, sec2, S::lit(2.0) * sec2 * tn)
                }
                Func::Exp => {
                    let e = t.exp();
                    x.chain(e, e, e)
                }
                Func::Ln => {
                    if t <= S::zero() {
                        return Err(domain(node, vars, "ln of a non-positive argument"));
                    }
                    x.chain(t.ln(), S::one() / t, -S::one() / (t * t))
                }
                Func::Sqrt => {
                    if t <= S::zero() {
                        return Err(domain(node, vars, "sqrt of a non-positive argument (derivative undefined)"));
                    }
                    let r = t.sqrt();
                    let half = S::lit(0.5);
                    x.chain(r, half / r, -half * half / (t * r))
                }
            }
        }
    };
    if !j.is_finite() {
        return Err(domain(node, vars, "non-finite result"));
    }
    Ok(j)
}

fn reciprocal<S: Scalar, const N: usize>(x: &Jet2<S, N>) -> Jet2<S, N> {
    let b = x.value;
    let r = S::one() / b;
    x.chain(r, -r * r, S::lit(2.0) * r * r * r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p<const N: usize>(src: &str, vars: &[&str]) -> Expr<f64> {
        let e = parse_expr(src, vars).unwrap();
        assert_eq!(e.vars.len(), N);
        e
    }

    #[test]
    fn circle_polynomial() {
        let e = p::<2>("x^2+y^2-1", &["x", "y"]);
        let j = eval_jet2(&e, &[1.0, 0.0]).unwrap();
        assert_eq!(j.value, 0.0);
        assert_eq!(j.grad, [2.0, 0.0]);
        assert_eq!(j.hess, [[2.0, 0.0], [0.0, 2.0]]);
    }

    #[test]
    fn triple_product_matches_finite_differences() {
        let e = p::<3>("x*y*z", &["x", "y", "z"]);
        let pt = [1.0, 2.0, 3.0];
        let j = eval_jet2(&e, &pt).unwrap();
        assert_eq!(j.value, 6.0);
        assert_eq!(j.grad, [6.0, 3.0, 2.0]);
        assert_eq!(j.hess, [[0.0, 3.0, 2.0], [3.0, 0.0, 1.0], [2.0, 1.0, 0.0]]);
        // central-difference oracle: step 1e-5 for the gradient, 1e-3 for the
        // (exact on multilinear functions) second differences
        let h = 1e-5;
        let hh = 1e-3;
        let f = |q: [f64; 3]| eval(&e, &q).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let shift = |q: [f64; 3], i: usize, d: f64| {
                    let mut r = q;
                    r[i] += d;
                    r
                };
                let fd = (f(shift(shift(pt, a, hh), b, hh)) - f(shift(shift(pt, a, hh), b, -hh))
                    - f(shift(shift(pt, a, -hh), b, hh))
                    + f(shift(shift(pt, a, -hh), b, -hh)))
                    / (4.0 * hh * hh);
                assert!((fd - j.hess[a][b]).abs() < 1e-6, "hess[{a}][{b}] fd={fd}");
            }
            let fd = (f(shift1(pt, a, h)) - f(shift1(pt, a, -h))) / (2.0 * h);
            assert!((fd - j.grad[a]).abs() < 1e-6);
        }
        fn shift1(q: [f64; 3], i: usize, d: f64) -> [f64; 3] {
            let mut r = q;
            r[i] += d;
            r
        }
    }

    #[test]
    fn sine_at_half_pi() {
        let e = p::<1>("sin(u)", &["u"]);
        let j = eval_jet2(&e, &[std::f64::consts::FRAC_PI_2]).unwrap();
        assert_eq!(j.value, 1.0);
        assert!(j.grad[0].abs() < 1e-16);
        assert_eq!(j.hess[0][0], -1.0);
    }

    #[test]
    fn domain_errors_name_the_node() {
        let e = p::<1>("1/(x-1)", &["x"]);
        match eval_jet2(&e, &[1.0]).unwrap_err() {
            ExprError::Domain { node, reason } => {
                assert!(node.contains('/'), "{node}");
                assert_eq!(reason, "division by zero");
            }
            other => panic!("{other:?}"),
        }
        let e = p::<1>("ln(x)", &["x"]);
        assert!(matches!(eval_jet2(&e, &[0.0]), Err(ExprError::Domain { .. })));
        let e = p::<1>("sqrt(x)", &["x"]);
        assert!(matches!(eval_jet2(&e, &[-1.0]), Err(ExprError::Domain { .. })));
        assert_eq!(eval(&e, &[0.0]).unwrap(), 0.0);
        let e = p::<1>("x^0.5", &["x"]);
        assert!(matches!(eval_jet2(&e, &[-2.0]), Err(ExprError::Domain { .. })));
        let e = p::<1>("x^-1", &["x"]);
        assert!(matches!(eval_jet2(&e, &[0.0]), Err(ExprError::Domain { .. })));
    }

    #[test]
    fn arity_mismatch() {
        let e = p::<2>("u+v", &["u", "v"]);
        assert_eq!(eval_jet2(&e, &[1.0, 2.0, 3.0]).unwrap_err(), ExprError::Arity { expected: 2, got: 3 });
    }

    #[test]
    fn real_powers_and_quotients() {
        let e = p::<1>("x^1.5 / exp(x)", &["x"]);
        let x: f64 = 0.7;
        let j = eval_jet2(&e, &[x]).unwrap();
        let f = |t: f64| t.powf(1.5) * (-t).exp();
        let df = |t: f64| (1.5 * t.powf(0.5) - t.powf(1.5)) * (-t).exp();
        let d2f = |t: f64| (0.75 * t.powf(-0.5) - 3.0 * t.powf(0.5) + t.powf(1.5)) * (-t).exp();
        assert!((j.value - f(x)).abs() < 1e-15);
        assert!((j.grad[0] - df(x)).abs() < 1e-14);
        assert!((j.hess[0][0] - d2f(x)).abs() < 1e-13);
    }

    #[test]
    fn works_in_single_precision() {
        let e: Expr<f32> = parse_expr("x*x*y", &["x", "y"]).unwrap();
        let j = eval_jet2(&e, &[2.0_f32, 3.0]).unwrap();
        assert_eq!(j.grad, [12.0, 4.0]);
        assert_eq!(j.hess, [[6.0, 4.0], [4.0, 0.0]]);
    }
}
