//! Recursive-descent parser for scalar expressions.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' exponent)?
//! exponent:= ('-' | '+') exponent | power        (must be variable-free)
//! primary := number | 'pi' | ident | func '(' expr ')' | '(' expr ')'
//! ```

use super::ast::{BinOp, Expr, Func, Node};
use super::ExprError;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokenize(src: &'a str) -> Result<Vec<(Tok, usize)>, ExprError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (t, at) = lx.next()?;
            let end = t == Tok::End;
            out.push((t, at));
            if end {
                return Ok(out);
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize), ExprError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = bytes.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        let tok = match c {
            b'0'..=b'9' | b'.' => return self.number(start),
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                    self.pos += 1;
                }
                return Ok((Tok::Ident(self.src[start..self.pos].to_string()), start));
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                return Err(ExprError::Syntax {
                    offset: start,
                    message: format!("unexpected character '{ch}'"),
                });
            }
        };
        self.pos += 1;
        Ok((tok, start))
    }

    fn number(&mut self, start: usize) -> Result<(Tok, usize), ExprError> {
        let bytes = self.src.as_bytes();
        let digits = |pos: &mut usize| {
            let from = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            *pos - from
        };
        let mut n = digits(&mut self.pos);
        if self.pos < bytes.len() && bytes[self.pos] == b'.' {
            self.pos += 1;
            n += digits(&mut self.pos);
        }
        if n == 0 {
            return Err(ExprError::Syntax { offset: start, message: "malformed number".into() });
        }
        if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
            let mut p = self.pos + 1;
            if p < bytes.len() && (bytes[p] == b'+' || bytes[p] == b'-') {
                p += 1;
            }
            if digits(&mut p) == 0 {
                return Err(ExprError::Syntax { offset: self.pos, message: "malformed exponent in number".into() });
            }
            self.pos = p;
        }
        let text = &self.src[start..self.pos];
        let value: f64 = text
            .parse()
            .map_err(|_| ExprError::Syntax { offset: start, message: format!("invalid number '{text}'") })?;
        Ok((Tok::Num(value), start))
    }
}

struct Parser<'v> {
    toks: Vec<(Tok, usize)>,
    i: usize,
    vars: &'v [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn offset(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax { offset: self.offset(), message: message.into() })
    }

    fn expr<S: Scalar>(&mut self) -> Result<Node<S>, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Node::binary(op, lhs, rhs);
        }
    }

    fn term<S: Scalar>(&mut self) -> Result<Node<S>, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Node::binary(op, lhs, rhs);
        }
    }

    fn unary<S: Scalar>(&mut self) -> Result<Node<S>, ExprError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power<S: Scalar>(&mut self) -> Result<Node<S>, ExprError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let exponent: Node<S> = self.exponent()?;
        if exponent.has_variables() {
            return Err(ExprError::Syntax { offset: at, message: "exponent must be a constant expression".into() });
        }
        let p = super::eval_value(&exponent, &[]).map_err(|e| ExprError::Syntax {
            offset: at,
            message: format!("exponent does not evaluate: {e}"),
        })?;
        Ok(make_power(base, p))
    }

    fn exponent<S: Scalar>(&mut self) -> Result<Node<S>, ExprError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(Node::Neg(Box::new(self.exponent()?)))
            }
            Tok::Op('+') => {
                self.bump();
                self.exponent()
            }
            _ => self.power(),
        }
    }

    fn primary<S: Scalar>(&mut self) -> Result<Node<S>, ExprError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Node::Const(S::lit(v))),
            Tok::LParen => {
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.err("expected ')'");
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    let Some(func) = Func::from_name(&name) else {
                        return Err(ExprError::Syntax { offset: at, message: format!("unknown function '{name}'") });
                    };
                    self.bump();
                    let arg = self.expr()?;
                    if *self.peek() != Tok::RParen {
                        return self.err(format!("expected ')' to close {name}("));
                    }
                    self.bump();
                    return Ok(Node::call(func, arg));
                }
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    Ok(Node::Var(i))
                } else if name == "pi" {
                    Ok(Node::Const(S::PI()))
                } else if Func::from_name(&name).is_some() {
                    Err(ExprError::Syntax { offset: at, message: format!("function '{name}' requires an argument") })
                } else {
                    Err(ExprError::Undeclared { name, offset: at })
                }
            }
            Tok::End => Err(ExprError::Syntax { offset: at, message: "unexpected end of input".into() }),
            Tok::Op(c) => Err(ExprError::Syntax { offset: at, message: format!("unexpected operator '{c}'") }),
            Tok::RParen => Err(ExprError::Syntax { offset: at, message: "unexpected ')'".into() }),
        }
    }
}

fn make_power<S: Scalar>(base: Node<S>, p: S) -> Node<S> {
    let as_int = p.to_i32().filter(|k| S::lit(f64::from(*k)) == p);
    match as_int {
        Some(k) => Node::PowInt(Box::new(base), k),
        None => Node::PowReal(Box::new(base), p),
    }
}

/// Parses `source` over the ordered variable list.
pub fn parse_expr<S: Scalar>(source: &str, variables: &[&str]) -> Result<Expr<S>, ExprError> {
    if source.trim().is_empty() {
        return Err(ExprError::Empty);
    }
    let vars: Vec<String> = variables.iter().map(|v| v.to_string()).collect();
    for v in &vars {
        let valid = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid || Func::from_name(v).is_some() {
            return Err(ExprError::InvalidVariable(v.clone()));
        }
    }
    let toks = Lexer::tokenize(source)?;
    let mut p = Parser { toks, i: 0, vars: &vars };
    let root = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(Expr { root, vars })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str, vars: &[&str]) -> Result<Expr<f64>, ExprError> {
        parse_expr(src, vars)
    }

    #[test]
    fn product_with_call() {
        let e = parse("u*cos(v)", &["u", "v"]).unwrap();
        assert_eq!(
            e.root,
            Node::binary(BinOp::Mul, Node::Var(0), Node::call(Func::Cos, Node::Var(1)))
        );
    }

    #[test]
    fn top_level_subtraction() {
        let e = parse("x^2+y^2+z^2-1", &["x", "y", "z"]).unwrap();
        match e.root {
            Node::Binary(BinOp::Sub, lhs, rhs) => {
                assert_eq!(*rhs, Node::Const(1.0));
                assert!(matches!(*lhs, Node::Binary(BinOp::Add, _, _)));
            }
            other => panic!("expected subtraction at the root, got {other:?}"),
        }
    }

    #[test]
    fn undeclared_identifier() {
        let err = parse("u*cos(w)", &["u", "v"]).unwrap_err();
        assert_eq!(err, ExprError::Undeclared { name: "w".into(), offset: 6 });
    }

    #[test]
    fn empty_input() {
        assert_eq!(parse("  ", &["x"]).unwrap_err(), ExprError::Empty);
    }

    #[test]
    fn syntax_error_carries_offset() {
        match parse("x + * y", &["x", "y"]).unwrap_err() {
            ExprError::Syntax { offset, .. } => assert_eq!(offset, 4),
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(parse("(x", &["x"]), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("x $ 2", &["x"]), Err(ExprError::Syntax { offset: 2, .. })));
    }

    #[test]
    fn precedence_and_associativity() {
        // -x^2 is -(x^2)
        let e = parse("-x^2", &["x"]).unwrap();
        assert_eq!(e.root, Node::Neg(Box::new(Node::PowInt(Box::new(Node::Var(0)), 2))));
        // a - b - c is (a - b) - c
        let e = parse("a-b-c", &["a", "b", "c"]).unwrap();
        assert_eq!(
            e.root,
            Node::binary(BinOp::Sub, Node::binary(BinOp::Sub, Node::Var(0), Node::Var(1)), Node::Var(2))
        );
        // a / b * c is (a / b) * c
        let e = parse("a/b*c", &["a", "b", "c"]).unwrap();
        assert_eq!(
            e.root,
            Node::binary(BinOp::Mul, Node::binary(BinOp::Div, Node::Var(0), Node::Var(1)), Node::Var(2))
        );
    }

    #[test]
    fn exponents_fold_to_constants() {
        let e = parse("x^(1/2)", &["x"]).unwrap();
        assert_eq!(e.root, Node::PowReal(Box::new(Node::Var(0)), 0.5));
        let e = parse("x^-2", &["x"]).unwrap();
        assert_eq!(e.root, Node::PowInt(Box::new(Node::Var(0)), -2));
        assert!(parse("x^y", &["x", "y"]).is_err());
    }

    #[test]
    fn pi_and_scientific_literals() {
        let e = parse("pi/3 + 1.5e-3", &[]).unwrap();
        let v = crate::expr::eval_value(&e.root, &[]).unwrap();
        assert!((v - (std::f64::consts::PI / 3.0 + 1.5e-3)).abs() < 1e-15);
        assert!(parse("1e", &[]).is_err());
    }

    #[test]
    fn function_names_are_not_variables() {
        assert!(matches!(parse("sin", &["x"]), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("x", &["sin"]), Err(ExprError::InvalidVariable(_))));
    }
}
