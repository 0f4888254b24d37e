//! Plain-text grammar for exact inputs.
//!
//! Scalars: terms like `(3/2+1/3*i)*x^2*y` combined with `+ - * / ^` and
//! parentheses. Variables are configurable so the same grammar serves the
//! (x, y) surface charts, the (z, w) Riccati charts and one-variable inputs
//! like `t` or `z`. A vector field is written as a scalar-multiplied pair,
//! e.g. `x*y*(2*x, -y)`.

use super::bipoly::{AlgebraError, BiPoly, Var};
use super::gaussrat::GaussRat;
use super::rational::{RationalFn1, RationalFn2};
use super::vf::RationalVF2;
use num_bigint::BigInt;
use num_rational::BigRational;

#[derive(Clone)]
struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, message: &str) -> AlgebraError {
        AlgebraError::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn peek_tok(&self) -> Result<(Tok, usize), AlgebraError> {
        let mut p = self.pos;
        while p < self.src.len() && self.src[p].is_ascii_whitespace() {
            p += 1;
        }
        if p >= self.src.len() {
            return Ok((Tok::End, p));
        }
        let c = self.src[p];
        let tok = match c {
            b'+' => (Tok::Plus, p + 1),
            b'-' => (Tok::Minus, p + 1),
            b'*' => (Tok::Star, p + 1),
            b'/' => (Tok::Slash, p + 1),
            b'^' => (Tok::Caret, p + 1),
            b'(' => (Tok::LParen, p + 1),
            b')' => (Tok::RParen, p + 1),
            b',' => (Tok::Comma, p + 1),
            b'0'..=b'9' => {
                let mut q = p;
                while q < self.src.len() && self.src[q].is_ascii_digit() {
                    q += 1;
                }
                let n = std::str::from_utf8(&self.src[p..q]).unwrap();
                let v = BigRational::from_integer(n.parse::<BigInt>().unwrap());
                (Tok::Num(v), q)
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut q = p;
                while q < self.src.len()
                    && (self.src[q].is_ascii_alphanumeric() || self.src[q] == b'_')
                {
                    q += 1;
                }
                let s = std::str::from_utf8(&self.src[p..q]).unwrap().to_string();
                (Tok::Ident(s), q)
            }
            _ => {
                return Err(AlgebraError::Parse {
                    offset: p,
                    message: format!("unexpected character '{}'", c as char),
                })
            }
        };
        Ok((tok.0, tok.1))
    }

    fn next_tok(&mut self) -> Result<Tok, AlgebraError> {
        let (t, p) = self.peek_tok()?;
        self.pos = p;
        Ok(t)
    }
}

/// Value in the expression algebra: a scalar or a component pair.
#[derive(Clone, Debug)]
enum Value {
    Scalar(RationalFn2),
    Pair(RationalFn2, RationalFn2),
}

struct Parser<'a> {
    lex: Lexer<'a>,
    vars: (String, String),
    allow_pair: bool,
}

impl<'a> Parser<'a> {
    fn expr(&mut self) -> Result<Value, AlgebraError> {
        let (first, _) = self.lex.peek_tok()?;
        let mut negate = false;
        if first == Tok::Minus {
            self.lex.next_tok()?;
            negate = true;
        } else if first == Tok::Plus {
            self.lex.next_tok()?;
        }
        let mut acc = self.term()?;
        if negate {
            acc = neg(acc);
        }
        loop {
            match self.lex.peek_tok()?.0 {
                Tok::Plus => {
                    self.lex.next_tok()?;
                    let t = self.term()?;
                    acc = add(acc, t, &self.lex)?;
                }
                Tok::Minus => {
                    self.lex.next_tok()?;
                    let t = self.term()?;
                    acc = add(acc, neg(t), &self.lex)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Value, AlgebraError> {
        let mut acc = self.factor()?;
        loop {
            match self.lex.peek_tok()?.0 {
                Tok::Star => {
                    self.lex.next_tok()?;
                    let f = self.factor()?;
                    acc = mul(acc, f, &self.lex)?;
                }
                Tok::Slash => {
                    self.lex.next_tok()?;
                    let f = self.factor()?;
                    acc = divide(acc, f, &self.lex)?;
                }
                // Implicit multiplication: `3x`, `x y`, `2(x+1)`.
                Tok::Ident(_) | Tok::LParen | Tok::Num(_) => {
                    let f = self.factor()?;
                    acc = mul(acc, f, &self.lex)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Value, AlgebraError> {
        let base = self.atom()?;
        if self.lex.peek_tok()?.0 == Tok::Caret {
            self.lex.next_tok()?;
            let mut neg_exp = false;
            if self.lex.peek_tok()?.0 == Tok::Minus {
                self.lex.next_tok()?;
                neg_exp = true;
            }
            let e = match self.lex.next_tok()? {
                Tok::Num(n) if n.is_integer() => n,
                _ => return Err(self.lex.error("expected integer exponent after '^'")),
            };
            use num_traits::ToPrimitive;
            let e = e
                .to_integer()
                .to_u32()
                .ok_or_else(|| self.lex.error("exponent too large"))?;
            let s = match base {
                Value::Scalar(s) => s,
                Value::Pair(..) => return Err(self.lex.error("cannot exponentiate a pair")),
            };
            let mut acc = RationalFn2::one();
            for _ in 0..e {
                acc = acc.mul(&s);
            }
            if neg_exp {
                if acc.is_zero() {
                    return Err(self.lex.error("zero to a negative power"));
                }
                acc = RationalFn2::one().div(&acc);
            }
            return Ok(Value::Scalar(acc));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Value, AlgebraError> {
        match self.lex.next_tok()? {
            Tok::Num(n) => Ok(Value::Scalar(RationalFn2::constant(GaussRat::new(
                n,
                BigRational::from_integer(0.into()),
            )))),
            Tok::Ident(name) => {
                if name == "i" {
                    Ok(Value::Scalar(RationalFn2::constant(GaussRat::i())))
                } else if name == self.vars.0 {
                    Ok(Value::Scalar(RationalFn2::from_poly(BiPoly::var(Var::X))))
                } else if name == self.vars.1 {
                    Ok(Value::Scalar(RationalFn2::from_poly(BiPoly::var(Var::Y))))
                } else {
                    Err(self.lex.error(&format!("unknown identifier '{}'", name)))
                }
            }
            Tok::Minus => Ok(neg(self.atom()?)),
            Tok::LParen => {
                let first = self.expr()?;
                match self.lex.next_tok()? {
                    Tok::RParen => Ok(first),
                    Tok::Comma if self.allow_pair => {
                        let second = self.expr()?;
                        if self.lex.next_tok()? != Tok::RParen {
                            return Err(self.lex.error("expected ')'"));
                        }
                        match (first, second) {
                            (Value::Scalar(a), Value::Scalar(b)) => Ok(Value::Pair(a, b)),
                            _ => Err(self.lex.error("nested pairs are not allowed")),
                        }
                    }
                    _ => Err(self.lex.error("expected ')'")),
                }
            }
            t => Err(self.lex.error(&format!("unexpected token {:?}", t))),
        }
    }
}

fn neg(v: Value) -> Value {
    match v {
        Value::Scalar(s) => Value::Scalar(s.neg()),
        Value::Pair(a, b) => Value::Pair(a.neg(), b.neg()),
    }
}

fn add(a: Value, b: Value, lex: &Lexer) -> Result<Value, AlgebraError> {
    match (a, b) {
        (Value::Scalar(a), Value::Scalar(b)) => Ok(Value::Scalar(a.add(&b))),
        (Value::Pair(a1, a2), Value::Pair(b1, b2)) => Ok(Value::Pair(a1.add(&b1), a2.add(&b2))),
        _ => Err(lex.error("cannot add a scalar and a pair")),
    }
}

fn mul(a: Value, b: Value, lex: &Lexer) -> Result<Value, AlgebraError> {
    match (a, b) {
        (Value::Scalar(a), Value::Scalar(b)) => Ok(Value::Scalar(a.mul(&b))),
        (Value::Scalar(s), Value::Pair(p, q)) | (Value::Pair(p, q), Value::Scalar(s)) => {
            Ok(Value::Pair(s.mul(&p), s.mul(&q)))
        }
        _ => Err(lex.error("cannot multiply two pairs")),
    }
}

fn divide(a: Value, b: Value, lex: &Lexer) -> Result<Value, AlgebraError> {
    match (a, b) {
        (_, Value::Pair(..)) => Err(lex.error("cannot divide by a pair")),
        (Value::Scalar(a), Value::Scalar(b)) => {
            if b.is_zero() {
                return Err(lex.error("division by zero"));
            }
            Ok(Value::Scalar(a.div(&b)))
        }
        (Value::Pair(p, q), Value::Scalar(b)) => {
            if b.is_zero() {
                return Err(lex.error("division by zero"));
            }
            Ok(Value::Pair(p.div(&b), q.div(&b)))
        }
    }
}

fn run_parser(
    src: &str,
    vars: (&str, &str),
    allow_pair: bool,
) -> Result<Value, AlgebraError> {
    let mut p = Parser {
        lex: Lexer::new(src),
        vars: (vars.0.to_string(), vars.1.to_string()),
        allow_pair,
    };
    let v = p.expr()?;
    if p.lex.next_tok()? != Tok::End {
        return Err(p.lex.error("trailing input"));
    }
    Ok(v)
}

/// Parse a scalar rational function in the given variable pair.
pub fn parse_rational(src: &str, vars: (&str, &str)) -> Result<RationalFn2, AlgebraError> {
    match run_parser(src, vars, false)? {
        Value::Scalar(s) => Ok(s),
        Value::Pair(..) => unreachable!("pairs disabled"),
    }
}

/// Parse a polynomial; rejects inputs with a nontrivial denominator.
pub fn parse_poly(src: &str, vars: (&str, &str)) -> Result<BiPoly, AlgebraError> {
    let r = parse_rational(src, vars)?;
    if !r.is_polynomial() {
        return Err(AlgebraError::Parse {
            offset: 0,
            message: "expected a polynomial, found a denominator".into(),
        });
    }
    let c = r.den().constant_term().inv();
    Ok(r.num().scale(&c))
}

/// Parse a vector field `f*(P, Q)` (or a bare scalar for 1-D fields placed
/// in the first component).
pub fn parse_vf(src: &str, vars: (&str, &str)) -> Result<RationalVF2, AlgebraError> {
    match run_parser(src, vars, true)? {
        Value::Pair(p, q) => {
            if p.is_zero() && q.is_zero() {
                return Err(AlgebraError::ZeroInput("vector field"));
            }
            Ok(RationalVF2::new(p, q))
        }
        Value::Scalar(s) => {
            if s.is_zero() {
                return Err(AlgebraError::ZeroInput("vector field"));
            }
            Ok(RationalVF2::new(s, RationalFn2::zero()))
        }
    }
}

/// Parse a univariate rational function in the named variable.
pub fn parse_rational1(src: &str, var: &str) -> Result<RationalFn1, AlgebraError> {
    // Reuse the bivariate parser with a dummy second variable.
    let dummy = "__unused";
    let r = parse_rational(src, (var, dummy))?;
    let to_uni = |p: &BiPoly| -> Result<_, AlgebraError> {
        match p.as_univariate() {
            Some((Var::X, u)) => Ok(u),
            None => Err(AlgebraError::Parse {
                offset: 0,
                message: "expected a function of one variable".into(),
            }),
            Some((Var::Y, u)) => {
                // Only possible for constants, which report as Y-univariate
                // when degree 0; pass them through.
                if u.degree().unwrap_or(0) == 0 {
                    Ok(u)
                } else {
                    Err(AlgebraError::Parse {
                        offset: 0,
                        message: "expected a function of one variable".into(),
                    })
                }
            }
        }
    };
    Ok(RationalFn1::new(to_uni(r.num())?, to_uni(r.den())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_grammar() {
        let p = parse_poly("(3/2+1/3*i)*x^2*y", ("x", "y")).unwrap();
        assert_eq!(p.terms.len(), 1);
        assert_eq!(
            p.terms.get(&(2, 1)).unwrap().clone(),
            GaussRat::from_parts(3, 2, 1, 3)
        );
        let q = parse_poly("x^2 - 2*x*y + y^2", ("x", "y")).unwrap();
        let alt = parse_poly("(x-y)^2", ("x", "y")).unwrap();
        assert_eq!(q, alt);
    }

    #[test]
    fn vf_pair_grammar() {
        let vf = parse_vf("x*y*(2*x, -y)", ("x", "y")).unwrap();
        let x = BiPoly::x();
        let y = BiPoly::y();
        assert_eq!(vf.px.num().clone(), x.pow(2).mul(&y).scale(&GaussRat::from_int(2)));
        assert_eq!(vf.py.num().clone(), x.mul(&y.pow(2)).neg());
        // Riccati chart variables
        let vf2 = parse_vf("(z, 3*i*w)", ("z", "w")).unwrap();
        assert_eq!(vf2.px.num().clone(), BiPoly::x());
    }

    #[test]
    fn rational_and_univariate() {
        let f = parse_rational("(x^2-1)/(x-1)", ("x", "y")).unwrap();
        assert!(f.is_polynomial());
        let g = parse_rational1("(t^3+2)/(t*(t^3-1))", "t").unwrap();
        assert_eq!(g.num().degree(), Some(3));
        assert_eq!(g.den().degree(), Some(4));
        assert!(parse_rational1("t + s", "t").is_err());
    }

    #[test]
    fn errors_carry_location() {
        match parse_poly("x + $", ("x", "y")) {
            Err(AlgebraError::Parse { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected parse error, got {:?}", other),
        }
    }
}
