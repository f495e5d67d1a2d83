//! A small language for holomorphic functions of one complex variable `z`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' integer)?
//! base   := literal | 'z' | func '(' expr ')' | '(' expr ')' | '-' base
//! ```
//!
//! Literals are real numbers, optionally suffixed by `i` (`3i`, `0.5i`), the
//! bare unit `i`, or `pi`. Exponents are integers so that no branch cut is
//! introduced by `^`; `log` and `sqrt` use the principal branch.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Exp,
        Func::Log,
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }

    fn apply(self, w: Complex64) -> Option<Complex64> {
        let out = match self {
            Func::Exp => w.exp(),
            Func::Log => {
                if w == Complex64::new(0.0, 0.0) {
                    return None;
                }
                w.ln()
            }
            Func::Sin => w.sin(),
            Func::Cos => w.cos(),
            Func::Tan => {
                let c = w.cos();
                if c.norm() < 1e-300 {
                    return None;
                }
                w.sin() / c
            }
            Func::Sinh => w.sinh(),
            Func::Cosh => w.cosh(),
            Func::Tanh => {
                let c = w.cosh();
                if c.norm() < 1e-300 {
                    return None;
                }
                w.sinh() / c
            }
            Func::Sqrt => w.sqrt(),
        };
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

fn c(re: f64) -> Expr {
    Expr::Const(Complex64::new(re, 0.0))
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let w = self.eval_inner(z).ok_or(Error::Pole { z })?;
        if w.re.is_finite() && w.im.is_finite() {
            Ok(w)
        } else {
            Err(Error::Pole { z })
        }
    }

    fn eval_inner(&self, z: Complex64) -> Option<Complex64> {
        Some(match self {
            Expr::Const(k) => *k,
            Expr::Var => z,
            Expr::Neg(a) => -a.eval_inner(z)?,
            Expr::Add(a, b) => a.eval_inner(z)? + b.eval_inner(z)?,
            Expr::Sub(a, b) => a.eval_inner(z)? - b.eval_inner(z)?,
            Expr::Mul(a, b) => a.eval_inner(z)? * b.eval_inner(z)?,
            Expr::Div(a, b) => {
                let den = b.eval_inner(z)?;
                if den.norm_sqr() == 0.0 {
                    return None;
                }
                a.eval_inner(z)? / den
            }
            Expr::Pow(a, n) => {
                let base = a.eval_inner(z)?;
                if *n < 0 && base.norm_sqr() == 0.0 {
                    return None;
                }
                base.powi(*n)
            }
            Expr::Call(f, a) => f.apply(a.eval_inner(z)?)?,
        })
    }

    /// Analytic derivative with respect to `z`, lightly simplified.
    pub fn derivative(&self) -> Expr {
        match self {
            Expr::Const(_) => c(0.0),
            Expr::Var => c(1.0),
            Expr::Neg(a) => neg(a.derivative()),
            Expr::Add(a, b) => add(a.derivative(), b.derivative()),
            Expr::Sub(a, b) => sub(a.derivative(), b.derivative()),
            Expr::Mul(a, b) => add(
                mul(a.derivative(), (**b).clone()),
                mul((**a).clone(), b.derivative()),
            ),
            Expr::Div(a, b) => div(
                sub(
                    mul(a.derivative(), (**b).clone()),
                    mul((**a).clone(), b.derivative()),
                ),
                pow((**b).clone(), 2),
            ),
            Expr::Pow(a, n) => mul(mul(c(*n as f64), pow((**a).clone(), n - 1)), a.derivative()),
            Expr::Call(f, a) => {
                let inner = (**a).clone();
                let outer = match f {
                    Func::Exp => call(Func::Exp, inner),
                    Func::Log => div(c(1.0), inner),
                    Func::Sin => call(Func::Cos, inner),
                    Func::Cos => neg(call(Func::Sin, inner)),
                    Func::Tan => add(c(1.0), pow(call(Func::Tan, inner), 2)),
                    Func::Sinh => call(Func::Cosh, inner),
                    Func::Cosh => call(Func::Sinh, inner),
                    Func::Tanh => sub(c(1.0), pow(call(Func::Tanh, inner), 2)),
                    Func::Sqrt => div(c(0.5), call(Func::Sqrt, inner)),
                };
                mul(outer, a.derivative())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(k) if k.re != 0.0 && k.im != 0.0 => 1,
            Expr::Const(k)
                if k.re < 0.0 || k.im < 0.0 || (k.re == 0.0 && k.re.is_sign_negative()) =>
            {
                3
            }
            _ => 5,
        }
    }
}

fn is_const(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Const(k) if *k == Complex64::new(v, 0.0))
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(k) => Expr::Const(-k),
        Expr::Neg(inner) => *inner,
        a => Expr::Neg(Box::new(a)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        (a, b) if is_const(&a, 0.0) => b,
        (a, b) if is_const(&b, 0.0) => a,
        (a, b) => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        (a, b) if is_const(&b, 0.0) => a,
        (a, b) if is_const(&a, 0.0) => neg(b),
        (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        (a, _) if is_const(&a, 0.0) => c(0.0),
        (_, b) if is_const(&b, 0.0) => c(0.0),
        (a, b) if is_const(&a, 1.0) => b,
        (a, b) if is_const(&b, 1.0) => a,
        (a, b) if is_const(&a, -1.0) => neg(b),
        (a, b) if is_const(&b, -1.0) => neg(a),
        (a, Expr::Const(y)) => Expr::Mul(Box::new(Expr::Const(y)), Box::new(a)),
        (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (a, _) if is_const(&a, 0.0) => c(0.0),
        (a, b) if is_const(&b, 1.0) => a,
        (a, b) => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn pow(a: Expr, n: i32) -> Expr {
    match n {
        0 => c(1.0),
        1 => a,
        n => Expr::Pow(Box::new(a), n),
    }
}

fn call(f: Func, a: Expr) -> Expr {
    Expr::Call(f, Box::new(a))
}

fn fmt_real(x: f64) -> String {
    format!("{x}")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |e: &Expr, min: u8, f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Const(k) => {
                if k.im == 0.0 {
                    write!(f, "{}", fmt_real(k.re))
                } else if k.re == 0.0 {
                    write!(f, "{}i", fmt_real(k.im))
                } else {
                    write!(f, "{}+{}i", fmt_real(k.re), fmt_real(k.im))
                }
            }
            Expr::Var => write!(f, "z"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(a, 5, f)
            }
            Expr::Add(a, b) => {
                wrap(a, 1, f)?;
                write!(f, " + ")?;
                wrap(b, 2, f)
            }
            Expr::Sub(a, b) => {
                wrap(a, 1, f)?;
                write!(f, " - ")?;
                wrap(b, 2, f)
            }
            Expr::Mul(a, b) => {
                wrap(a, 2, f)?;
                write!(f, "*")?;
                wrap(b, 4, f)
            }
            Expr::Div(a, b) => {
                wrap(a, 2, f)?;
                write!(f, "/")?;
                wrap(b, 4, f)
            }
            Expr::Pow(a, n) => {
                wrap(a, 5, f)?;
                if *n < 0 {
                    write!(f, "^({n})")
                } else {
                    write!(f, "^{n}")
                }
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

impl FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Expr::parse(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, ch: u8) -> Result<()> {
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", ch as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let n = self.integer()?;
            return Ok(Expr::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    /// Integer exponent: `3`, `-2` or `(-2)`.
    fn integer(&mut self) -> Result<i32> {
        let paren = self.peek() == Some(b'(');
        if paren {
            self.pos += 1;
        }
        let negative = self.peek() == Some(b'-');
        if negative {
            self.pos += 1;
        }
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer exponent"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        let n: i32 = digits.parse().map_err(|_| Error::Syntax {
            offset: start,
            message: "exponent out of range".into(),
        })?;
        if paren {
            self.expect(b')')?;
        }
        Ok(if negative { -n } else { n })
    }

    fn base(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.base()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(ch) if ch.is_ascii_digit() || ch == b'.' => self.number(),
            Some(ch) if ch.is_ascii_alphabetic() => self.identifier(),
            Some(ch) => Err(self.error(&format!("unexpected character '{}'", ch as char))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let s = self.src;
        while self.pos < s.len() && (s[self.pos].is_ascii_digit() || s[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            let mut look = self.pos + 1;
            if look < s.len() && (s[look] == b'+' || s[look] == b'-') {
                look += 1;
            }
            if look < s.len() && s[look].is_ascii_digit() {
                self.pos = look;
                while self.pos < s.len() && s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&s[start..self.pos]).unwrap_or_default();
        let value: f64 = text.parse().map_err(|_| Error::Syntax {
            offset: start,
            message: format!("malformed number '{text}'"),
        })?;
        let imaginary = self.pos < s.len()
            && s[self.pos] == b'i'
            && !(self.pos + 1 < s.len() && s[self.pos + 1].is_ascii_alphanumeric());
        if imaginary {
            self.pos += 1;
            Ok(Expr::Const(Complex64::new(0.0, value)))
        } else {
            Ok(c(value))
        }
    }

    fn identifier(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        match name {
            "z" => Ok(Expr::Var),
            "i" => Ok(Expr::Const(Complex64::new(0.0, 1.0))),
            "pi" => Ok(c(PI)),
            _ => {
                let Some(func) = Func::from_name(name) else {
                    return Err(Error::UnknownFunction {
                        name: name.to_string(),
                        offset: start,
                    });
                };
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
        }
    }
}

/// Named Weierstrass data sets `(g, h)`.
pub mod catalog {
    use super::*;

    pub const NAMES: [&str; 2] = ["enneper", "tanh-darboux"];

    /// `(g, h)` strings of a named data set. `tanh-darboux` is the Enneper
    /// data with the transformed Gauss map given by [`tanh_darboux_g_hat`].
    pub fn weierstrass(name: &str) -> Option<(&'static str, &'static str)> {
        match name {
            "enneper" | "tanh-darboux" => Some(("z", "2*z")),
            _ => None,
        }
    }

    /// Closed-form `ĝ = z - tanh(z - z0)` solving `ĝ' = (ĝ - z)²`, the
    /// holomorphic Riccati equation for Enneper data at `t = 1/2`.
    pub fn tanh_darboux_g_hat(z0: Complex64) -> Expr {
        Expr::Sub(
            Box::new(Expr::Var),
            Box::new(Expr::Call(
                Func::Tanh,
                Box::new(Expr::Sub(Box::new(Expr::Var), Box::new(Expr::Const(z0)))),
            )),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parse_examples() {
        assert_eq!(Expr::parse("z").unwrap(), Expr::Var);
        let e = Expr::parse("z - tanh(z - 1)").unwrap();
        match e {
            Expr::Sub(a, b) => {
                assert_eq!(*a, Expr::Var);
                match *b {
                    Expr::Call(Func::Tanh, inner) => assert!(matches!(*inner, Expr::Sub(..))),
                    other => panic!("unexpected {other:?}"),
                }
            }
            other => panic!("unexpected {other:?}"),
        }
        match Expr::parse("(") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Expr::parse("foo(z)"),
            Err(Error::UnknownFunction { offset: 0, .. })
        ));
        assert!(matches!(Expr::parse("z^1.5"), Err(Error::Syntax { .. })));
        assert!(matches!(Expr::parse("z +"), Err(Error::Syntax { .. })));
        assert!(matches!(
            Expr::parse("z)"),
            Err(Error::Syntax { offset: 1, .. })
        ));
        assert!(matches!(
            Expr::parse("z # 2"),
            Err(Error::Syntax { offset: 2, .. })
        ));
    }

    #[test]
    fn literals() {
        let e = Expr::parse("3i + 2 - i*pi + 1.5e1").unwrap();
        let w = e.eval(z(0.0, 0.0)).unwrap();
        assert!((w - z(17.0, 3.0 - PI)).norm() < 1e-15);
        assert_eq!(
            Expr::parse("z^(-2)").unwrap(),
            Expr::Pow(Box::new(Expr::Var), -2)
        );
    }

    #[test]
    fn eval_examples() {
        let sq = Expr::parse("z^2").unwrap().eval(z(1.0, 1.0)).unwrap();
        assert!((sq - z(0.0, 2.0)).norm() < 1e-15);
        let ex = Expr::parse("exp(z)").unwrap().eval(z(0.0, PI)).unwrap();
        assert!((ex - z(-1.0, 0.0)).norm() < 1e-15);
        let e2 = 1f64.exp().powi(2);
        let th = Expr::parse("tanh(z)").unwrap().eval(z(1.0, 0.0)).unwrap();
        assert!((th.re - (e2 - 1.0) / (e2 + 1.0)).abs() < 1e-15);
        assert!((th.re - 0.761_594_155_955_764_9).abs() < 1e-15);
    }

    #[test]
    fn poles_are_errors() {
        assert!(matches!(
            Expr::parse("1/z").unwrap().eval(z(0.0, 0.0)),
            Err(Error::Pole { .. })
        ));
        assert!(matches!(
            Expr::parse("log(z)").unwrap().eval(z(0.0, 0.0)),
            Err(Error::Pole { .. })
        ));
        assert!(matches!(
            Expr::parse("z^(-1)").unwrap().eval(z(0.0, 0.0)),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(Expr::parse("z^2").unwrap().derivative().to_string(), "2*z");
        let d = Expr::parse("tanh(z)").unwrap().derivative();
        let t1 = 1f64.tanh();
        let w = d.eval(z(1.0, 0.0)).unwrap();
        assert!((w.re - (1.0 - t1 * t1)).abs() < 1e-15);
        assert!((w.re - 0.419_974_341_614_026_1).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_central_difference() {
        let h = 1e-5;
        for text in [
            "z^3 - 2*z",
            "exp(z)*sin(z)",
            "tanh(z - 1)/(z + 3)",
            "log(z + 2)",
            "sqrt(z + 4)",
            "cos(z)^(-2)",
            "tan(z)*cosh(z) - sinh(2*z)",
        ] {
            let e = Expr::parse(text).unwrap();
            let d = e.derivative();
            for p in [z(0.3, 0.2), z(-0.5, 0.7), z(0.9, -0.4)] {
                let fd = (e.eval(p + h).unwrap() - e.eval(p - h).unwrap()) / (2.0 * h);
                let exact = d.eval(p).unwrap();
                assert!(
                    (fd - exact).norm() < 1e-8 * (1.0 + exact.norm()),
                    "{text} at {p}: {fd} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn display_reparses() {
        for text in [
            "z - tanh(z - 1)",
            "-(z + 1)^2",
            "2 - (3 - z)",
            "z/(z*z)",
            "(1+2i)*z^(-3)",
            "-z^2",
            "exp(-z)/2",
        ] {
            let e = Expr::parse(text).unwrap();
            let back = Expr::parse(&e.to_string()).unwrap();
            for p in [z(0.3, 0.2), z(-0.5, 0.7)] {
                assert!(
                    (e.eval(p).unwrap() - back.eval(p).unwrap()).norm() < 1e-14,
                    "{text} -> {e}"
                );
            }
        }
    }

    #[test]
    fn catalog_closed_form_solves_riccati() {
        let z0 = z(-1.0, 0.0);
        let g_hat = catalog::tanh_darboux_g_hat(z0);
        let d = g_hat.derivative();
        for p in [z(0.0, 0.0), z(0.5, 0.5), z(1.0, 1.0)] {
            let w = g_hat.eval(p).unwrap() - p;
            assert!((d.eval(p).unwrap() - w * w).norm() < 1e-13);
        }
        assert!((g_hat.eval(z(1.0, 0.0)).unwrap().re - (1.0 - 2f64.tanh())).abs() < 1e-15);
        assert_eq!(catalog::weierstrass("enneper"), Some(("z", "2*z")));
    }
}
