//! Dense univariate polynomials over `Q`, used for quantities that are
//! polynomial in the squared head parameter `A = a^2`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalars::{ExactScalar, ScalarError};

/// `c[0] + c[1] A + c[2] A^2 + ...`, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn qr(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        QPoly::new(vec![c])
    }

    /// The monomial `c A^k`.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut v = vec![BigRational::zero(); k + 1];
        v[k] = c;
        QPoly::new(v)
    }

    /// The variable `A`.
    pub fn var() -> Self {
        QPoly::monomial(BigRational::one(), 1)
    }

    /// Integer coefficients, lowest degree first.
    pub fn from_ints(c: &[i64]) -> Self {
        QPoly::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        QPoly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        self.add(&o.scale(&q(-1)))
    }

    pub fn scale(&self, c: &BigRational) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn pow(&self, e: u32) -> QPoly {
        (0..e).fold(QPoly::constant(BigRational::one()), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * q(k as i64))
                .collect(),
        )
    }

    /// Horner evaluation in the scalar's own field.
    pub fn eval(&self, x: &ExactScalar) -> Result<ExactScalar, ScalarError> {
        let mut acc = ExactScalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.try_mul(x)?.try_add(&ExactScalar::Rational(c.clone()))?;
        }
        Ok(acc)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Primitive integer polynomial with positive leading coefficient and the
    /// same roots.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        use num_integer::Integer;
        if self.is_zero() {
            return Vec::new();
        }
        let l = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints.last().is_some_and(|c| c.is_negative()) { -1 } else { 1 };
        ints.iter().map(|c| c / &g * sign).collect()
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        write!(f, "A")?;
                    } else {
                        write!(f, "A^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_evaluation() {
        let p = QPoly::from_ints(&[1, -8, 1]); // A^2 - 8A + 1
        let x: ExactScalar = "4-sqrt(15)".parse().unwrap();
        assert!(p.eval(&x).unwrap().is_zero());
        let sq = QPoly::from_ints(&[1, 1]).pow(2);
        assert_eq!(sq, QPoly::from_ints(&[1, 2, 1]));
        assert_eq!(sq.derivative(), QPoly::from_ints(&[2, 2]));
        assert_eq!(sq.sub(&sq), QPoly::zero());
        assert_eq!(p.to_string(), "A^2 - 8*A + 1");
        assert_eq!(p.eval_f64(2.0), -11.0);
    }

    #[test]
    fn primitive_integer_form() {
        let p = QPoly::new(vec![qr(-1, 2), qr(3, 4), qr(-1, 4)]);
        let ints: Vec<i64> = p.primitive_integer().iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(ints, vec![2, -3, 1]);
    }
}
