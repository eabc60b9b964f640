//! Center-function expressions: a tiny infix language over the side
//! symbols `a b c`, the area `K`, and one real parameter `r`.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := atom ('^' exponent)?
//! atom     := number | 'a' | 'b' | 'c' | 'K' | 'r' | '(' expr ')'
//! exponent := ['-'] (integer | 'r') | '(' affine ')'
//! affine   := ['-'] aterm (('+' | '-') aterm)*      aterm := integer ['*'] ['r'] | 'r'
//! ```
//!
//! `3/4` is read as a division of two literals, which evaluates to the same
//! rational.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scalar::{int, rat, EvalMode, Rational, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at position {pos}: {msg}")]
    SyntaxError { pos: usize, msg: String },
    #[error("expression is not symmetric under b <-> c")]
    NotSymmetric,
    #[error("expression is not homogeneous in (a, b, c)")]
    NotHomogeneous,
    #[error("expression vanishes identically")]
    ZeroFunction,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("expression uses the parameter r but no value was supplied")]
    MissingParameter,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Exponent of the form `coef * r + constant`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exponent {
    pub r_coef: i64,
    pub constant: i64,
}

impl Exponent {
    pub fn int(n: i64) -> Self {
        Exponent {
            r_coef: 0,
            constant: n,
        }
    }

    pub fn uses_r(&self) -> bool {
        self.r_coef != 0
    }

    fn value(&self, r: Option<&Rational>) -> Result<Rational, EvalError> {
        if self.r_coef == 0 {
            return Ok(int(self.constant));
        }
        let r = r.ok_or(EvalError::MissingParameter)?;
        Ok(int(self.r_coef) * r + int(self.constant))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.r_coef, self.constant) {
            (0, c) if c >= 0 => write!(f, "{c}"),
            (0, c) => write!(f, "({c})"),
            (1, 0) => write!(f, "r"),
            (-1, 0) => write!(f, "(-r)"),
            (k, 0) => write!(f, "({k}*r)"),
            (k, c) => write!(f, "({k}*r{c:+})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    /// 0 = a, 1 = b, 2 = c
    Side(usize),
    Area,
    Param,
    Const(Rational),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Exponent),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Side(i) => write!(f, "{}", ["a", "b", "c"][*i]),
            Expr::Area => write!(f, "K"),
            Expr::Param => write!(f, "r"),
            Expr::Const(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Expr::Const(q) => write!(f, "({}/{})", q.numer(), q.denom()),
            Expr::Neg(x) => write!(f, "-({x})"),
            Expr::Add(x, y) => write!(f, "({x} + {y})"),
            Expr::Sub(x, y) => write!(f, "({x} - {y})"),
            Expr::Mul(x, y) => write!(f, "{x}*{y}"),
            Expr::Div(x, y) => write!(f, "{x}/({y})"),
            Expr::Pow(x, e) => write!(f, "({x})^{e}"),
        }
    }
}

/// Values the expression is evaluated at.
#[derive(Debug, Clone)]
pub struct EvalPoint<'a> {
    pub sides: [&'a Rational; 3],
    pub r: Option<&'a Rational>,
    pub mode: EvalMode,
}

impl EvalPoint<'_> {
    /// Heron: 16 K² = 2a²b² + 2b²c² + 2c²a² − a⁴ − b⁴ − c⁴.
    pub fn area_squared(&self) -> Rational {
        let [a, b, c] = self.sides;
        let (a2, b2, c2) = (a * a, b * b, c * c);
        (int(2) * (&a2 * &b2 + &b2 * &c2 + &c2 * &a2) - &a2 * &a2 - &b2 * &b2 - &c2 * &c2) / int(16)
    }
}

impl Expr {
    pub fn uses_param(&self) -> bool {
        match self {
            Expr::Param => true,
            Expr::Side(_) | Expr::Area | Expr::Const(_) => false,
            Expr::Neg(x) => x.uses_param(),
            Expr::Pow(x, e) => e.uses_r() || x.uses_param(),
            Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) | Expr::Div(x, y) => {
                x.uses_param() || y.uses_param()
            }
        }
    }

    /// True when every occurrence of `K` sits under an even integer power,
    /// so the value is rational for rational sides.
    pub fn is_rational_only(&self) -> bool {
        match self {
            Expr::Area => false,
            Expr::Side(_) | Expr::Param | Expr::Const(_) => true,
            Expr::Pow(x, e) if **x == Expr::Area => !e.uses_r() && e.constant % 2 == 0,
            Expr::Pow(x, _) | Expr::Neg(x) => x.is_rational_only(),
            Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) | Expr::Div(x, y) => {
                x.is_rational_only() && y.is_rational_only()
            }
        }
    }

    pub fn eval(&self, p: &EvalPoint<'_>) -> Result<Scalar, EvalError> {
        Ok(match self {
            Expr::Side(i) => Scalar::Exact(p.sides[*i].clone()),
            Expr::Area => Scalar::Exact(p.area_squared()).sqrt(p.mode)?,
            Expr::Param => Scalar::Exact(p.r.ok_or(EvalError::MissingParameter)?.clone()),
            Expr::Const(q) => Scalar::Exact(q.clone()),
            Expr::Neg(x) => -x.eval(p)?,
            Expr::Add(x, y) => x.eval(p)? + y.eval(p)?,
            Expr::Sub(x, y) => x.eval(p)? - y.eval(p)?,
            Expr::Mul(x, y) => x.eval(p)? * y.eval(p)?,
            Expr::Div(x, y) => x.eval(p)?.checked_div(&y.eval(p)?)?,
            Expr::Pow(x, e) => {
                let e = e.value(p.r)?;
                if **x == Expr::Area && e.is_integer() && e.numer().is_even() {
                    // K^(2m) = (K²)^m stays rational
                    let m = (e.numer() / BigInt::from(2)).to_i64().unwrap();
                    return Ok(Scalar::Exact(p.area_squared()).powi(m)?);
                }
                pow_rational(&x.eval(p)?, &e, p.mode)?
            }
        })
    }
}

/// `base^e` for rational `e = n/d`: integer power followed by a `d`-th root.
pub fn pow_rational(base: &Scalar, e: &Rational, mode: EvalMode) -> Result<Scalar, ScalarError> {
    let n = e.numer().to_i64().expect("exponent numerator fits in i64");
    let d = e
        .denom()
        .to_u32()
        .expect("exponent denominator fits in u32");
    let p = base.powi(n)?;
    if d == 1 {
        Ok(p)
    } else {
        p.root(d, mode)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

type PResult<T> = Result<T, ExprError>;

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ExprError::SyntaxError {
            pos: self.pos,
            msg: msg.into(),
        })
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> PResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{}`", c as char))
        }
    }

    fn integer(&mut self) -> PResult<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(text.parse().unwrap())
    }

    fn small_integer(&mut self) -> PResult<i64> {
        let start = self.pos;
        let n = self.integer()?;
        n.to_i64().ok_or(ExprError::SyntaxError {
            pos: start,
            msg: "exponent too large".into(),
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                Ok(Expr::Const(Rational::from_integer(self.integer()?)))
            }
            Some(c) => {
                let e = match c {
                    b'a' => Expr::Side(0),
                    b'b' => Expr::Side(1),
                    b'c' => Expr::Side(2),
                    b'K' => Expr::Area,
                    b'r' => Expr::Param,
                    _ => return self.err(format!("unexpected character `{}`", c as char)),
                };
                self.pos += 1;
                if let Some(n) = self.src.get(self.pos) {
                    if n.is_ascii_alphanumeric() {
                        return self.err("unknown identifier");
                    }
                }
                Ok(e)
            }
            None => self.err("unexpected end of input"),
        }
    }

    fn exponent(&mut self) -> PResult<Exponent> {
        if self.eat(b'(') {
            let e = self.affine()?;
            self.expect(b')')?;
            return Ok(e);
        }
        let neg = self.eat(b'-');
        let sign = if neg { -1 } else { 1 };
        if self.eat(b'r') {
            return Ok(Exponent {
                r_coef: sign,
                constant: 0,
            });
        }
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(Exponent::int(sign * self.small_integer()?)),
            _ => self.err("exponent must be an integer or r"),
        }
    }

    fn affine(&mut self) -> PResult<Exponent> {
        let mut out = Exponent::int(0);
        let mut sign = if self.eat(b'-') { -1 } else { 1 };
        loop {
            let mut coef = 1;
            let mut has_int = false;
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                coef = self.small_integer()?;
                has_int = true;
                self.eat(b'*');
            }
            if self.eat(b'r') {
                out.r_coef += sign * coef;
            } else if has_int {
                out.constant += sign * coef;
            } else {
                return self.err("expected an integer or r in exponent");
            }
            if self.eat(b'+') {
                sign = 1;
            } else if self.eat(b'-') {
                sign = -1;
            } else {
                return Ok(out);
            }
        }
    }
}

/// Parses without validating symmetry or homogeneity.
pub fn parse_raw(text: &str) -> Result<Expr, ExprError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// A parsed and validated center function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterExpr {
    pub expr: Expr,
    pub source: String,
    pub uses_r: bool,
    pub rational_only: bool,
    /// Degree in (a, b, c) at the validation parameter values
    /// (the degree may depend on `r`).
    pub degrees: Vec<(Option<i64>, i64)>,
}

impl CenterExpr {
    pub fn eval(&self, p: &EvalPoint<'_>) -> Result<Scalar, EvalError> {
        self.expr.eval(p)
    }
}

impl fmt::Display for CenterExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

/// Heronian triangles (rational sides and area) for validation: two right
/// triangles with unit height glued along it.
pub fn heronian_triangle<R: Rng>(rng: &mut R) -> [Rational; 3] {
    loop {
        let s = rat(rng.gen_range(1..12), 13);
        let u = rat(rng.gen_range(1..16), 17);
        let leg = |x: &Rational| (Rational::one() - x * x) / (int(2) * x);
        let hyp = |x: &Rational| (Rational::one() + x * x) / (int(2) * x);
        let sides = [hyp(&s), hyp(&u), leg(&s) + leg(&u)];
        if sides[0] != sides[1] && sides[1] != sides[2] && sides[0] != sides[2] {
            return sides;
        }
    }
}

const VALIDATION_SAMPLES: usize = 5;
const VALIDATION_R: [i64; 3] = [2, -1, 3];

/// Parses and validates a center function: homogeneity (C1) and b↔c
/// symmetry (C2) are checked on Heronian triangles, where `K` is rational
/// and every evaluation is exact.
pub fn parse_center_expr(text: &str) -> Result<CenterExpr, ExprError> {
    let expr = parse_raw(text)?;
    let uses_r = expr.uses_param();
    let rs: Vec<Option<i64>> = if uses_r {
        VALIDATION_R.iter().map(|&r| Some(r)).collect()
    } else {
        vec![None]
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c3);
    let mut degrees = Vec::new();
    let mut all_zero = true;
    for r in rs {
        let rq = r.map(int);
        let mut degree: Option<i64> = None;
        let mut valid = 0;
        let mut attempts = 0;
        while valid < VALIDATION_SAMPLES && attempts < 40 {
            attempts += 1;
            let sides = heronian_triangle(&mut rng);
            let t = rat(rng.gen_range(2..9), rng.gen_range(1..5));
            let eval = |s: [&Rational; 3]| {
                expr.eval(&EvalPoint {
                    sides: s,
                    r: rq.as_ref(),
                    mode: EvalMode::Exact,
                })
            };
            let Ok(Scalar::Exact(f)) = eval([&sides[0], &sides[1], &sides[2]]) else {
                continue;
            };
            let Ok(Scalar::Exact(f_swapped)) = eval([&sides[0], &sides[2], &sides[1]]) else {
                return Err(ExprError::NotSymmetric);
            };
            if f != f_swapped {
                return Err(ExprError::NotSymmetric);
            }
            let scaled: Vec<Rational> = sides.iter().map(|x| x * &t).collect();
            let Ok(Scalar::Exact(g)) = eval([&scaled[0], &scaled[1], &scaled[2]]) else {
                return Err(ExprError::NotHomogeneous);
            };
            valid += 1;
            if f.is_zero() {
                if !g.is_zero() {
                    return Err(ExprError::NotHomogeneous);
                }
                continue;
            }
            all_zero = false;
            let ratio = g / &f;
            let d = match degree {
                Some(d) => d,
                None => {
                    let d = log_exact(&ratio, &t).ok_or(ExprError::NotHomogeneous)?;
                    degree = Some(d);
                    d
                }
            };
            if ratio != pow_i(&t, d) {
                return Err(ExprError::NotHomogeneous);
            }
        }
        if valid == 0 {
            // Singular on every sample: treat as not a usable function.
            return Err(ExprError::ZeroFunction);
        }
        if let Some(d) = degree {
            degrees.push((r, d));
        }
    }
    if all_zero {
        return Err(ExprError::ZeroFunction);
    }
    Ok(CenterExpr {
        rational_only: expr.is_rational_only(),
        expr,
        source: text.trim().to_string(),
        uses_r,
        degrees,
    })
}

fn pow_i(t: &Rational, d: i64) -> Rational {
    if d >= 0 {
        num_traits::pow(t.clone(), d as usize)
    } else {
        num_traits::pow(t.recip(), (-d) as usize)
    }
}

/// Integer `d` with `t^d = x`, if one exists in a sane range.
fn log_exact(x: &Rational, t: &Rational) -> Option<i64> {
    if !x.is_positive() {
        return None;
    }
    (-64..=64).find(|&d| pow_i(t, d) == *x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval_at(e: &CenterExpr, a: i64, b: i64, c: i64, r: Option<i64>) -> Scalar {
        let (a, b, c) = (int(a), int(b), int(c));
        let r = r.map(int);
        e.eval(&EvalPoint {
            sides: [&a, &b, &c],
            r: r.as_ref(),
            mode: EvalMode::Interval { bits: 128 },
        })
        .unwrap()
    }

    #[test]
    fn nagel_function_is_degree_one() {
        let e = parse_center_expr("b + c - a").unwrap();
        assert_eq!(e.degrees, vec![(None, 1)]);
        assert!(e.rational_only);
        assert!(!e.uses_r);
    }

    #[test]
    fn asymmetric_rejected() {
        assert_eq!(parse_center_expr("b + a"), Err(ExprError::NotSymmetric));
    }

    #[test]
    fn inhomogeneous_rejected() {
        assert_eq!(parse_center_expr("a + 1"), Err(ExprError::NotHomogeneous));
        assert_eq!(parse_center_expr("a - a"), Err(ExprError::ZeroFunction));
    }

    #[test]
    fn parametric_entry() {
        let e = parse_center_expr("a^r*(b+c)").unwrap();
        assert!(e.uses_r);
        assert_eq!(e.degrees, vec![(Some(2), 3), (Some(-1), 0), (Some(3), 4)]);
        assert_eq!(eval_at(&e, 3, 4, 5, Some(2)), Scalar::from_int(81));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_center_expr("b + * c") {
            Err(ExprError::SyntaxError { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_raw("(a+b"),
            Err(ExprError::SyntaxError { .. })
        ));
        assert!(matches!(
            parse_raw("ab"),
            Err(ExprError::SyntaxError { .. })
        ));
        assert!(matches!(
            parse_raw("a^b"),
            Err(ExprError::SyntaxError { .. })
        ));
    }

    #[test]
    fn exponents() {
        let e = parse_raw("a^(2*r+1)").unwrap();
        assert_eq!(
            e,
            Expr::Pow(
                Box::new(Expr::Side(0)),
                Exponent {
                    r_coef: 2,
                    constant: 1
                }
            )
        );
        assert_eq!(
            parse_raw("a^-2").unwrap(),
            Expr::Pow(Box::new(Expr::Side(0)), Exponent::int(-2))
        );
        assert_eq!(
            parse_raw("a^(-r)").unwrap(),
            Expr::Pow(
                Box::new(Expr::Side(0)),
                Exponent {
                    r_coef: -1,
                    constant: 0
                }
            )
        );
    }

    #[test]
    fn area_terms() {
        // K for 3-4-5 is 6
        let e = parse_center_expr("a^2*(b^2+c^2-a^2+4*K)").unwrap();
        assert!(!e.rational_only);
        assert_eq!(
            eval_at(&e, 3, 4, 5, None),
            Scalar::from_int(9 * (16 + 25 - 9 + 24))
        );
        let even = parse_center_expr("K^2/a^2").unwrap();
        assert!(even.rational_only);
        let (a, b, c) = (int(2), int(3), int(4));
        let v = even
            .eval(&EvalPoint {
                sides: [&a, &b, &c],
                r: None,
                mode: EvalMode::Exact,
            })
            .unwrap();
        // 16K² = 2(36+144+64) - 16 - 81 - 256 = 135
        assert_eq!(v, Scalar::Exact(rat(135, 64)));
    }

    #[test]
    fn irrational_area_needs_interval_mode() {
        let e = parse_center_expr("K/a").unwrap();
        let (a, b, c) = (int(2), int(3), int(4));
        let res = e.eval(&EvalPoint {
            sides: [&a, &b, &c],
            r: None,
            mode: EvalMode::Exact,
        });
        assert_eq!(
            res,
            Err(EvalError::Scalar(ScalarError::IrrationalInExactMode))
        );
    }

    #[test]
    fn missing_parameter() {
        let e = parse_center_expr("a^r").unwrap();
        let (a, b, c) = (int(2), int(3), int(4));
        let res = e.eval(&EvalPoint {
            sides: [&a, &b, &c],
            r: None,
            mode: EvalMode::Exact,
        });
        assert_eq!(res, Err(EvalError::MissingParameter));
    }

    #[test]
    fn heronian_area_is_rational() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let s = heronian_triangle(&mut rng);
            let p = EvalPoint {
                sides: [&s[0], &s[1], &s[2]],
                r: None,
                mode: EvalMode::Exact,
            };
            assert!(crate::scalar::exact_sqrt(&p.area_squared()).is_some());
        }
    }
}
