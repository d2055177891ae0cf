//! A small arithmetic expression grammar for spectral data files.
//!
//! Grammar (recursive descent, `^` binds tightest and is right-associative):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | 'pi' | 'e' | 'i' | var | func '(' expr ')' | '(' expr ')'
//! func    := 'log' | 'exp' | 'sin' | 'sqrt'
//! var     := 's' | 'n' | 't'
//! ```
//!
//! `log` is the natural logarithm. The variable names `s`, `n` and `t` all
//! denote the single free variable. The constant `i` is only legal under
//! complex evaluation (Toeplitz symbols).

use crate::error::Error;
use crate::lognum::LogNum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Log,
    Exp,
    Sin,
    Sqrt,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    E,
    I,
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, Error> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!(
                "unexpected trailing input at token {} in {src:?}",
                p.pos
            )));
        }
        Ok(e)
    }

    /// Plain f64 evaluation at the given variable value.
    pub fn eval(&self, x: f64) -> Result<f64, Error> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Pi => Ok(std::f64::consts::PI),
            Expr::E => Ok(std::f64::consts::E),
            Expr::I => Err(Error::Domain(
                "imaginary unit in a real-valued expression".into(),
            )),
            Expr::Var => Ok(x),
            Expr::Neg(a) => Ok(-a.eval(x)?),
            Expr::Add(a, b) => Ok(a.eval(x)? + b.eval(x)?),
            Expr::Sub(a, b) => Ok(a.eval(x)? - b.eval(x)?),
            Expr::Mul(a, b) => Ok(a.eval(x)? * b.eval(x)?),
            Expr::Div(a, b) => {
                let d = b.eval(x)?;
                if d == 0.0 {
                    return Err(Error::Domain(format!("division by zero at x = {x}")));
                }
                Ok(a.eval(x)? / d)
            }
            Expr::Pow(a, b) => {
                let base = a.eval(x)?;
                let ex = b.eval(x)?;
                let v = base.powf(ex);
                if v.is_nan() {
                    return Err(Error::Domain(format!(
                        "undefined power {base}^{ex} at x = {x}"
                    )));
                }
                Ok(v)
            }
            Expr::Call(f, a) => {
                let v = a.eval(x)?;
                let r = match f {
                    Func::Log => {
                        if v <= 0.0 {
                            return Err(Error::Domain(format!("log of {v} at x = {x}")));
                        }
                        v.ln()
                    }
                    Func::Exp => v.exp(),
                    Func::Sin => v.sin(),
                    Func::Sqrt => {
                        if v < 0.0 {
                            return Err(Error::Domain(format!("sqrt of {v} at x = {x}")));
                        }
                        v.sqrt()
                    }
                };
                Ok(r)
            }
        }
    }

    /// Log-magnitude evaluation. `x` may represent values far outside f64
    /// range (e.g. built with `LogNum::from_ln`); the expression is evaluated
    /// without ever materialising the plain value.
    pub fn eval_log(&self, x: LogNum) -> Result<LogNum, Error> {
        let dom = |m: &'static str| Error::Domain(m.to_string());
        match self {
            Expr::Num(v) => Ok(LogNum::from_f64(*v)),
            Expr::Pi => Ok(LogNum::from_f64(std::f64::consts::PI)),
            Expr::E => Ok(LogNum::from_f64(std::f64::consts::E)),
            Expr::I => Err(dom("imaginary unit in a real-valued expression")),
            Expr::Var => Ok(x),
            Expr::Neg(a) => Ok(a.eval_log(x)?.neg()),
            Expr::Add(a, b) => Ok(a.eval_log(x)?.add(b.eval_log(x)?)),
            Expr::Sub(a, b) => Ok(a.eval_log(x)?.sub(b.eval_log(x)?)),
            Expr::Mul(a, b) => Ok(a.eval_log(x)?.mul(b.eval_log(x)?)),
            Expr::Div(a, b) => a.eval_log(x)?.div(b.eval_log(x)?).map_err(dom),
            Expr::Pow(a, b) => {
                let ex = b.eval_log(x)?.to_f64();
                if !ex.is_finite() {
                    return Err(dom("exponent out of range"));
                }
                a.eval_log(x)?.pow(ex).map_err(dom)
            }
            Expr::Call(f, a) => {
                let v = a.eval_log(x)?;
                match f {
                    Func::Log => v.ln_val().map_err(dom),
                    Func::Exp => Ok(v.exp_val()),
                    Func::Sin => Ok(v.sin_val()),
                    Func::Sqrt => v.sqrt_val().map_err(dom),
                }
            }
        }
    }

    /// Complex evaluation (for circle symbols); the variable is real.
    pub fn eval_complex(&self, x: f64) -> Result<Complex64, Error> {
        match self {
            Expr::Num(v) => Ok(Complex64::new(*v, 0.0)),
            Expr::Pi => Ok(Complex64::new(std::f64::consts::PI, 0.0)),
            Expr::E => Ok(Complex64::new(std::f64::consts::E, 0.0)),
            Expr::I => Ok(Complex64::new(0.0, 1.0)),
            Expr::Var => Ok(Complex64::new(x, 0.0)),
            Expr::Neg(a) => Ok(-a.eval_complex(x)?),
            Expr::Add(a, b) => Ok(a.eval_complex(x)? + b.eval_complex(x)?),
            Expr::Sub(a, b) => Ok(a.eval_complex(x)? - b.eval_complex(x)?),
            Expr::Mul(a, b) => Ok(a.eval_complex(x)? * b.eval_complex(x)?),
            Expr::Div(a, b) => {
                let d = b.eval_complex(x)?;
                if d.norm() == 0.0 {
                    return Err(Error::Domain(format!("division by zero at x = {x}")));
                }
                Ok(a.eval_complex(x)? / d)
            }
            Expr::Pow(a, b) => Ok(a.eval_complex(x)?.powc(b.eval_complex(x)?)),
            Expr::Call(f, a) => {
                let v = a.eval_complex(x)?;
                Ok(match f {
                    Func::Log => v.ln(),
                    Func::Exp => v.exp(),
                    Func::Sin => v.sin(),
                    Func::Sqrt => v.sqrt(),
                })
            }
        }
    }
}

/// An expression together with its source text, serialised as a string.
#[derive(Debug, Clone)]
pub struct ParsedExpr {
    pub src: String,
    pub expr: Expr,
}

impl ParsedExpr {
    pub fn parse(src: &str) -> Result<Self, Error> {
        Ok(ParsedExpr {
            src: src.to_string(),
            expr: Expr::parse(src)?,
        })
    }

    pub fn eval(&self, x: f64) -> Result<f64, Error> {
        self.expr.eval(x)
    }

    pub fn eval_log(&self, x: LogNum) -> Result<LogNum, Error> {
        self.expr.eval_log(x)
    }
}

impl Serialize for ParsedExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.src)
    }
}

impl<'de> Deserialize<'de> for ParsedExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let src = String::deserialize(d)?;
        ParsedExpr::parse(&src).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>, Error> {
    let mut out = Vec::new();
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' | '\u{2212}' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '/' => {
                out.push(Token::Slash);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i], '0'..='9' | '.') {
                    i += 1;
                }
                // Scientific notation: 1e-3, 2.5E8.
                if i < bytes.len() && (bytes[i] == 'e' || bytes[i] == 'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == '+' || bytes[j] == '-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = bytes[start..i].iter().collect();
                let v: f64 = text
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number {text:?}")))?;
                out.push(Token::Num(v));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let text: String = bytes[start..i].iter().collect();
                out.push(Token::Ident(text));
            }
            other => {
                return Err(Error::Parse(format!("unexpected character {other:?}")));
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Token) -> Result<(), Error> {
        match self.bump() {
            Some(got) if got == t => Ok(()),
            got => Err(Error::Parse(format!("expected {t:?}, found {got:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr, Error> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, Error> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Token::Slash) => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, Error> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, Error> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.bump();
            // Right-associative; exponent may carry a unary minus.
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, Error> {
        match self.bump() {
            Some(Token::Num(v)) => Ok(Expr::Num(v)),
            Some(Token::LParen) => {
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            Some(Token::Ident(name)) => match name.as_str() {
                "pi" => Ok(Expr::Pi),
                "e" => Ok(Expr::E),
                "i" => Ok(Expr::I),
                "s" | "n" | "t" => Ok(Expr::Var),
                "log" | "exp" | "sin" | "sqrt" => {
                    let f = match name.as_str() {
                        "log" => Func::Log,
                        "exp" => Func::Exp,
                        "sin" => Func::Sin,
                        _ => Func::Sqrt,
                    };
                    self.expect(Token::LParen)?;
                    let arg = self.expr()?;
                    self.expect(Token::RParen)?;
                    Ok(Expr::Call(f, Box::new(arg)))
                }
                other => Err(Error::Parse(format!("unknown identifier {other:?}"))),
            },
            got => Err(Error::Parse(format!("unexpected token {got:?}"))),
        }
    }
}
