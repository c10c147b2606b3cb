use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::rational::{format_rational, int, parse_rational, Rational};
use super::{AlgebraError, Coefficient};

/// An element `a + b·ε` of `Q(ε)`, `ε² = -1/r`.
///
/// `ε` stands for `i/√r`, the normalisation factor of the Lax operator
/// variable. Scalars carry their `r`; arithmetic between different `r` is an
/// error (the checked methods) or a panic (the operator impls).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    rational: Rational,
    epsilon: Rational,
    r: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarOp {
    Add,
    Mul,
    Div,
    /// Negates the first operand; the second is only checked for context.
    Neg,
}

impl Scalar {
    pub fn new(r: u32, rational: Rational, epsilon: Rational) -> Self {
        assert!(r >= 2, "ring context requires r >= 2");
        Scalar { rational, epsilon, r }
    }

    pub fn from_rational(r: u32, q: Rational) -> Self {
        Self::new(r, q, Rational::zero())
    }

    pub fn from_int(r: u32, n: i64) -> Self {
        Self::from_rational(r, int(n))
    }

    pub fn zero(r: u32) -> Self {
        Self::from_rational(r, Rational::zero())
    }

    pub fn one(r: u32) -> Self {
        Self::from_rational(r, Rational::one())
    }

    pub fn epsilon(r: u32) -> Self {
        Self::new(r, Rational::zero(), Rational::one())
    }

    /// `ε^k`, using `ε² = -1/r`.
    pub fn epsilon_pow(r: u32, k: u32) -> Self {
        let half = num_traits::pow(-Rational::new(1.into(), r.into()), (k / 2) as usize);
        if k.is_multiple_of(2) {
            Self::from_rational(r, half)
        } else {
            Self::new(r, Rational::zero(), half)
        }
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational
    }

    pub fn epsilon_part(&self) -> &Rational {
        &self.epsilon
    }

    pub fn is_rational(&self) -> bool {
        self.epsilon.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.epsilon.is_zero()
    }

    fn check(&self, other: &Scalar) -> Result<(), AlgebraError> {
        if self.r != other.r {
            Err(AlgebraError::MixedContext(self.r, other.r))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, AlgebraError> {
        self.check(other)?;
        Ok(Scalar {
            rational: &self.rational + &other.rational,
            epsilon: &self.epsilon + &other.epsilon,
            r: self.r,
        })
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, AlgebraError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Scalar) -> Scalar {
        if self.epsilon.is_zero() && other.epsilon.is_zero() {
            return Scalar::from_rational(self.r, &self.rational * &other.rational);
        }
        // (a + bε)(c + dε) = ac - bd/r + (ad + bc)ε
        let bd = &self.epsilon * &other.epsilon;
        let rational = &self.rational * &other.rational - bd / int(self.r as i64);
        let epsilon = &self.rational * &other.epsilon + &self.epsilon * &other.rational;
        Scalar {
            rational,
            epsilon,
            r: self.r,
        }
    }

    pub fn inverse(&self) -> Result<Scalar, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        // 1/(a + bε) = (a - bε) / (a² + b²/r)
        let norm = &self.rational * &self.rational + &self.epsilon * &self.epsilon / int(self.r as i64);
        Ok(Scalar {
            rational: &self.rational / &norm,
            epsilon: -&self.epsilon / &norm,
            r: self.r,
        })
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, AlgebraError> {
        self.check(other)?;
        Ok(self.mul_unchecked(&other.inverse()?))
    }

    pub fn apply(op: ScalarOp, a: &Scalar, b: &Scalar) -> Result<Scalar, AlgebraError> {
        match op {
            ScalarOp::Add => a.try_add(b),
            ScalarOp::Mul => a.try_mul(b),
            ScalarOp::Div => a.try_div(b),
            ScalarOp::Neg => {
                a.check(b)?;
                Ok(-a)
            }
        }
    }

    /// Parses `"p/q"` or `"p/q+p'/q'e"` (also `"p/q-p'/q'e"`).
    pub fn parse(r: u32, s: &str) -> Result<Scalar, AlgebraError> {
        let s = s.trim();
        let err = || AlgebraError::Parse {
            what: "scalar",
            input: s.to_string(),
        };
        let Some(body) = s.strip_suffix('e') else {
            return Ok(Scalar::from_rational(r, parse_rational(s)?));
        };
        // split at the sign separating the two parts (not a leading sign)
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .last()
            .map(|(i, _)| i);
        let Some(split) = split else {
            return Ok(Scalar::new(
                r,
                Rational::zero(),
                parse_rational(body).map_err(|_| err())?,
            ));
        };
        let (re, im) = body.split_at(split);
        let im = im.strip_prefix('+').unwrap_or(im);
        Ok(Scalar::new(r, parse_rational(re)?, parse_rational(im)?))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.epsilon.is_zero() {
            write!(f, "{}", format_rational(&self.rational))
        } else if self.rational.is_zero() {
            write!(f, "{}e", format_rational(&self.epsilon))
        } else {
            let sign = if self.epsilon.is_negative() { "-" } else { "+" };
            write!(
                f,
                "{}{}{}e",
                format_rational(&self.rational),
                sign,
                format_rational(&self.epsilon.abs())
            )
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.try_add(rhs).expect("scalar addition")
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.try_add(&-rhs).expect("scalar subtraction")
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.try_mul(rhs).expect("scalar multiplication")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            rational: -&self.rational,
            epsilon: -&self.epsilon,
            r: self.r,
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Coefficient for Scalar {
    fn is_zero_coeff(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn scale(&self, q: &Rational) -> Self {
        Scalar {
            rational: &self.rational * q,
            epsilon: &self.epsilon * q,
            r: self.r,
        }
    }
    fn is_one_coeff(&self) -> bool {
        self.epsilon.is_zero() && self.rational.is_one()
    }
    fn is_compound(&self) -> bool {
        !self.epsilon.is_zero() && !self.rational.is_zero()
    }
    fn is_negative_coeff(&self) -> bool {
        if self.rational.is_zero() {
            self.epsilon.is_negative()
        } else {
            self.rational.is_negative()
        }
    }
}
