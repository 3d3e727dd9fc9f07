use std::fmt;

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Expression tree node. Variables are stored by index into the owning
/// [`Expr`]'s variable list.
#[derive(Clone, Debug, PartialEq)]
pub enum Node<S> {
    Const(S),
    Var(usize),
    Neg(Box<Node<S>>),
    Binary(BinOp, Box<Node<S>>, Box<Node<S>>),
    /// Integer power, expanded by repeated multiplication at evaluation.
    PowInt(Box<Node<S>>, i32),
    /// Real power; the base must be positive where evaluated.
    PowReal(Box<Node<S>>, S),
    Call(Func, Box<Node<S>>),
}

impl<S: Scalar> Node<S> {
    pub fn binary(op: BinOp, a: Node<S>, b: Node<S>) -> Self {
        Node::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn call(f: Func, a: Node<S>) -> Self {
        Node::Call(f, Box::new(a))
    }

    pub fn has_variables(&self) -> bool {
        match self {
            Node::Const(_) => false,
            Node::Var(_) => true,
            Node::Neg(a) | Node::PowInt(a, _) | Node::PowReal(a, _) | Node::Call(_, a) => a.has_variables(),
            Node::Binary(_, a, b) => a.has_variables() || b.has_variables(),
        }
    }

    /// Writes the canonical form: every compound node is parenthesized, so
    /// reparsing never depends on precedence.
    pub(crate) fn write(&self, vars: &[String], out: &mut impl fmt::Write) -> fmt::Result {
        match self {
            Node::Const(c) => {
                if *c < S::zero() {
                    write!(out, "(-{:e})", -*c)
                } else {
                    write!(out, "{:e}", c)
                }
            }
            Node::Var(i) => out.write_str(&vars[*i]),
            Node::Neg(a) => {
                out.write_str("(-")?;
                a.write(vars, out)?;
                out.write_char(')')
            }
            Node::Binary(op, a, b) => {
                out.write_char('(')?;
                a.write(vars, out)?;
                write!(out, " {} ", op.symbol())?;
                b.write(vars, out)?;
                out.write_char(')')
            }
            Node::PowInt(a, k) => {
                out.write_char('(')?;
                a.write(vars, out)?;
                write!(out, "^{k})")
            }
            Node::PowReal(a, p) => {
                out.write_char('(')?;
                a.write(vars, out)?;
                if *p < S::zero() {
                    write!(out, "^-{:e})", -*p)
                } else {
                    write!(out, "^{:e})", p)
                }
            }
            Node::Call(f, a) => {
                write!(out, "{}(", f.name())?;
                a.write(vars, out)?;
                out.write_char(')')
            }
        }
    }
}

/// A parsed expression together with its ordered variable list.
///
/// Immutable after construction; evaluation borrows it.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr<S> {
    pub(crate) root: Node<S>,
    pub(crate) vars: Vec<String>,
}

impl<S: Scalar> Expr<S> {
    /// Builds an expression from an already validated tree.
    ///
    /// Panics if a variable index is out of range.
    pub fn from_node(root: Node<S>, vars: Vec<String>) -> Self {
        fn check<S: Scalar>(n: &Node<S>, nv: usize) {
            match n {
                Node::Var(i) => assert!(*i < nv, "variable index {i} out of range"),
                Node::Const(_) => {}
                Node::Neg(a) | Node::PowInt(a, _) | Node::PowReal(a, _) | Node::Call(_, a) => check(a, nv),
                Node::Binary(_, a, b) => {
                    check(a, nv);
                    check(b, nv);
                }
            }
        }
        check(&root, vars.len());
        Self { root, vars }
    }

    pub fn root(&self) -> &Node<S> {
        &self.root
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    /// Canonical text serialization. Reparsing it with the same variable list
    /// yields an expression that evaluates identically.
    pub fn to_canonical(&self) -> String {
        let mut s = String::new();
        self.root.write(&self.vars, &mut s).expect("writing to String");
        s
    }
}

impl<S: Scalar> fmt::Display for Expr<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.write(&self.vars, f)
    }
}
