//! Expressions in one variable `x`: literals, `+ - * / ^`, unary minus,
//! `sin cos exp log atan abs sqrt`, the constant `pi`, and
//! `piecewise(b1, …, bk, e0, …, ek)`.
//!
//! Precedence from loose to tight: `+ -`, `* /`, unary minus, `^`.
//! Binary operators associate left except `^`, which associates right and
//! takes a signed exponent, so `x^-2` is `x^(-2)` and `-x^2` is `-(x^2)`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("evaluation failed at x = {0}")]
    Eval(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Atan,
    Abs,
    Sqrt,
}

impl Func {
    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "atan" => Func::Atan,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Atan => "atan",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
            Func::Log => v.ln(),
            Func::Atan => v.atan(),
            Func::Abs => v.abs(),
            Func::Sqrt => v.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Num(f64),
    X,
    Pi,
    Neg(Box<Expression>),
    Bin(BinOp, Box<Expression>, Box<Expression>),
    Call(Func, Box<Expression>),
    /// Breakpoints (constant) and one more branch than breakpoints.
    Piecewise(Vec<f64>, Vec<Expression>),
}

impl Expression {
    /// Raw evaluation; may return NaN or infinities.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expression::Num(v) => *v,
            Expression::X => x,
            Expression::Pi => std::f64::consts::PI,
            Expression::Neg(e) => -e.eval(x),
            Expression::Bin(op, a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => pow(a, b),
                }
            }
            Expression::Call(f, e) => f.apply(e.eval(x)),
            Expression::Piecewise(bs, es) => {
                let i = bs.partition_point(|&b| b <= x);
                es[i].eval(x)
            }
        }
    }

    pub fn try_eval(&self, x: f64) -> Result<f64, ExprError> {
        let v = self.eval(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ExprError::Eval(x))
        }
    }

    /// Whether `x` occurs.
    pub fn depends_on_x(&self) -> bool {
        match self {
            Expression::X => true,
            Expression::Num(_) | Expression::Pi => false,
            Expression::Neg(e) | Expression::Call(_, e) => e.depends_on_x(),
            Expression::Bin(_, a, b) => a.depends_on_x() || b.depends_on_x(),
            Expression::Piecewise(_, es) => es.iter().any(Expression::depends_on_x),
        }
    }

    /// Breakpoints of every `piecewise` in the tree.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breaks(&mut out);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn collect_breaks(&self, out: &mut Vec<f64>) {
        match self {
            Expression::Num(_) | Expression::X | Expression::Pi => {}
            Expression::Neg(e) | Expression::Call(_, e) => e.collect_breaks(out),
            Expression::Bin(_, a, b) => {
                a.collect_breaks(out);
                b.collect_breaks(out);
            }
            Expression::Piecewise(bs, es) => {
                out.extend_from_slice(bs);
                for e in es {
                    e.collect_breaks(out);
                }
            }
        }
    }

    /// For a primitive claimed continuous: adjacent branches of each
    /// `piecewise` must agree at their common breakpoint.
    pub fn check_piecewise_continuity(&self, tol: f64) -> Result<(), String> {
        match self {
            Expression::Num(_) | Expression::X | Expression::Pi => Ok(()),
            Expression::Neg(e) | Expression::Call(_, e) => e.check_piecewise_continuity(tol),
            Expression::Bin(_, a, b) => {
                a.check_piecewise_continuity(tol)?;
                b.check_piecewise_continuity(tol)
            }
            Expression::Piecewise(bs, es) => {
                for (i, &b) in bs.iter().enumerate() {
                    let (l, r) = (es[i].eval(b), es[i + 1].eval(b));
                    if !((l - r).abs() <= tol * (1.0 + l.abs().max(r.abs()))) {
                        return Err(format!("piecewise branches disagree at breakpoint {b}: {l} vs {r}"));
                    }
                }
                es.iter().try_for_each(|e| e.check_piecewise_continuity(tol))
            }
        }
    }
}

fn pow(a: f64, b: f64) -> f64 {
    if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 {
        a.powi(b as i32)
    } else {
        a.powf(b)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Num(v) if v.is_sign_negative() => write!(f, "(-{:?})", -v),
            Expression::Num(v) => write!(f, "{v:?}"),
            Expression::X => f.write_str("x"),
            Expression::Pi => f.write_str("pi"),
            Expression::Neg(e) => write!(f, "(-{e})"),
            Expression::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expression::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expression::Piecewise(bs, es) => {
                f.write_str("piecewise(")?;
                let parts: Vec<String> = bs.iter().map(|b| format!("{b:?}")).chain(es.iter().map(|e| e.to_string())).collect();
                f.write_str(&parts.join(", "))?;
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s = &text[start..i];
            let v = s.parse::<f64>().map_err(|_| ExprError::Syntax { pos: start, msg: format!("bad number `{s}`") })?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else {
            let t = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                _ => return Err(ExprError::Syntax { pos: i, msg: format!("unexpected character `{c}`") }),
            };
            out.push((i, t));
            i += c.len_utf8();
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: &str) -> Result<T, ExprError> {
        Err(ExprError::Syntax { pos: self.pos(), msg: msg.to_string() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ExprError> {
        if self.peek() == Some(&t) {
            self.at += 1;
            Ok(())
        } else {
            self.err(&format!("expected {what}"))
        }
    }

    fn sum(&mut self) -> Result<Expression, ExprError> {
        let mut lhs = self.product()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.at += 1;
            let rhs = self.product()?;
            lhs = Expression::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expression, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.at += 1;
            let rhs = self.unary()?;
            lhs = Expression::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expression, ExprError> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.at += 1;
            return Ok(Expression::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expression, ExprError> {
        let base = self.primary()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.at += 1;
            let exp = self.unary()?;
            return Ok(Expression::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expression, ExprError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.at += 1;
                Ok(Expression::Num(v))
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let e = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                match name.as_str() {
                    "x" => return Ok(Expression::X),
                    "pi" => return Ok(Expression::Pi),
                    "inf" => return Ok(Expression::Num(f64::INFINITY)),
                    _ => {}
                }
                if self.peek() != Some(&Tok::LParen) {
                    return Err(ExprError::Syntax { pos, msg: format!("unknown identifier `{name}`") });
                }
                self.at += 1;
                let mut args = vec![self.sum()?];
                while self.peek() == Some(&Tok::Comma) {
                    self.at += 1;
                    args.push(self.sum()?);
                }
                self.expect(Tok::RParen, "`)`")?;
                if name == "piecewise" {
                    return piecewise(pos, args);
                }
                let func = Func::from_name(&name).ok_or(ExprError::UnknownFunction(name.clone()))?;
                if args.len() != 1 {
                    return Err(ExprError::Syntax { pos, msg: format!("`{name}` takes one argument") });
                }
                Ok(Expression::Call(func, Box::new(args.pop().unwrap())))
            }
            Some(_) => self.err("expected a number, `x`, a call or `(`"),
            None => self.err("unexpected end of input"),
        }
    }
}

fn piecewise(pos: usize, args: Vec<Expression>) -> Result<Expression, ExprError> {
    let n = args.len();
    if n < 3 || n.is_multiple_of(2) {
        return Err(ExprError::Syntax { pos, msg: "piecewise needs k breakpoints and k + 1 branches".into() });
    }
    let k = (n - 1) / 2;
    let mut bs = Vec::with_capacity(k);
    for a in &args[..k] {
        if a.depends_on_x() {
            return Err(ExprError::Syntax { pos, msg: "piecewise breakpoints must be constants".into() });
        }
        bs.push(a.eval(0.0));
    }
    if bs.windows(2).any(|w| !(w[0] < w[1])) || bs.iter().any(|b| !b.is_finite()) {
        return Err(ExprError::Syntax { pos, msg: "piecewise breakpoints must be finite and increasing".into() });
    }
    Ok(Expression::Piecewise(bs, args[k..].to_vec()))
}

pub fn parse_expression(text: &str) -> Result<Expression, ExprError> {
    if text.trim().is_empty() {
        return Err(ExprError::Syntax { pos: 0, msg: "empty expression".into() });
    }
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, end: text.len() };
    let e = p.sum()?;
    if p.at < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ev(s: &str, x: f64) -> f64 {
        parse_expression(s).unwrap().eval(x)
    }

    #[test]
    fn examples() {
        assert_eq!(ev("x^2*cos(x^-2)", 1.0), 1f64.cos());
        assert!(ev("atan(x)", 1.0) == std::f64::consts::FRAC_PI_4);
        assert_eq!(parse_expression("x +"), Err(ExprError::Syntax { pos: 3, msg: "unexpected end of input".into() }));
        assert_eq!(parse_expression("foo(x)"), Err(ExprError::UnknownFunction("foo".into())));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("-x^2", 3.0), -9.0);
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("8/4/2", 0.0), 1.0);
        assert_eq!(ev("1-2-3", 0.0), -4.0);
        assert_eq!(ev("2*x+1", 3.0), 7.0);
        assert_eq!(ev("x^-2", 2.0), 0.25);
        assert_eq!(ev("--x", 2.0), 2.0);
        assert_eq!(ev("2 * -x", 2.0), -4.0);
        assert_eq!(ev("1e-3 * 2E2", 0.0), 0.2);
        assert_eq!(ev("pi", 0.0), std::f64::consts::PI);
    }

    #[test]
    fn piecewise_branches() {
        let e = parse_expression("piecewise(0, 1, 0, x, 1)").unwrap();
        assert_eq!(e.eval(-1.0), 0.0);
        assert_eq!(e.eval(0.5), 0.5);
        assert_eq!(e.eval(2.0), 1.0);
        assert_eq!(e.breakpoints(), vec![0.0, 1.0]);
        assert!(e.check_piecewise_continuity(1e-12).is_ok());
        let bad = parse_expression("piecewise(0, 0, 1)").unwrap();
        assert!(bad.check_piecewise_continuity(1e-12).is_err());
        assert!(parse_expression("piecewise(x, 0, 1)").is_err());
        assert!(parse_expression("piecewise(1, 0, 0, 1, 2)").is_err());
        assert!(parse_expression("piecewise(0, 1)").is_err());
    }

    #[test]
    fn errors_carry_positions() {
        match parse_expression("sin(x") {
            Err(ExprError::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{other:?}"),
        }
        match parse_expression("2 $ 3") {
            Err(ExprError::Syntax { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("{other:?}"),
        }
        match parse_expression("x y") {
            Err(ExprError::Syntax { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_expression("   ").is_err());
        assert_eq!(parse_expression("log(x)").unwrap().try_eval(-1.0), Err(ExprError::Eval(-1.0)));
    }

    fn arb_expr() -> impl Strategy<Value = Expression> {
        let leaf = prop_oneof![
            (-1e3f64..1e3).prop_map(Expression::Num),
            Just(Expression::X),
            Just(Expression::Pi),
        ];
        leaf.prop_recursive(4, 32, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expression::Neg(Box::new(e))),
                (0..5usize, inner.clone(), inner.clone()).prop_map(|(i, a, b)| {
                    let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow][i];
                    Expression::Bin(op, Box::new(a), Box::new(b))
                }),
                (0..7usize, inner.clone()).prop_map(|(i, e)| {
                    let f = [Func::Sin, Func::Cos, Func::Exp, Func::Log, Func::Atan, Func::Abs, Func::Sqrt][i];
                    Expression::Call(f, Box::new(e))
                }),
                (inner.clone(), inner).prop_map(|(a, b)| Expression::Piecewise(vec![0.5], vec![a, b])),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            let printed = e.to_string();
            let back = parse_expression(&printed).unwrap();
            prop_assert_eq!(back.to_string(), printed);
            for x in [-1.5, 0.0, 0.7, 3.0] {
                let (a, b) = (e.eval(x), back.eval(x));
                prop_assert!(a == b || (a.is_nan() && b.is_nan()));
            }
        }
    }
}
