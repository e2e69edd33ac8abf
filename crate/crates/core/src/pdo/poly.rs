//! Dense univariate polynomials in `n` over `BigRational`.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Coefficients stored lowest degree first, without trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

pub(crate) fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl Polynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(alloc::vec![c])
    }

    /// `n - root`.
    pub fn linear(root: &BigRational) -> Self {
        Self::from_coeffs(alloc::vec![-root.clone(), BigRational::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Expanded `prod (n - r)`.
    pub fn from_roots<'a>(roots: impl IntoIterator<Item = &'a BigRational>) -> Self {
        roots.into_iter().fold(Self::one(), |acc, r| acc.mul_linear(r))
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn eval(&self, n: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * n + c;
        }
        acc
    }

    pub fn eval_f64(&self, n: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * n + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    /// `p(n) * (n - root)`.
    pub fn mul_linear(&self, root: &BigRational) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let d = self.coeffs.len();
        let mut out = alloc::vec![BigRational::zero(); d + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i + 1] += c;
            out[i] -= c * root;
        }
        Self::from_coeffs(out)
    }

    /// Synthetic division by `n - root`: returns `(quotient, p(root))`.
    pub fn div_linear(&self, root: &BigRational) -> (Self, BigRational) {
        if self.is_zero() {
            return (Self::zero(), BigRational::zero());
        }
        let d = self.coeffs.len();
        let mut q = alloc::vec![BigRational::zero(); d - 1];
        let mut carry = BigRational::zero();
        for i in (0..d).rev() {
            let v = &self.coeffs[i] + &carry * root;
            if i == 0 {
                return (Self::from_coeffs(q), v);
            }
            q[i - 1] = v.clone();
            carry = v;
        }
        unreachable!("loop returns at i == 0")
    }

    /// `p(n + m)` by Horner's scheme in `n + m`.
    pub fn shift(&self, m: &BigRational) -> Self {
        if m.is_zero() || self.coeffs.len() <= 1 {
            return self.clone();
        }
        let neg = -m.clone();
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            // acc * (n + m) + c
            acc = acc.mul_linear(&neg);
            acc = &acc + &Self::constant(c.clone());
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().expect("nonzero").clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = alloc::vec![BigRational::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let f = &rem[i] / &lead;
            if f.is_zero() {
                continue;
            }
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] -= &f * c;
            }
            q[i - dd] = f;
        }
        rem.truncate(dd);
        (Self::from_coeffs(q), Self::from_coeffs(rem))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
            None => Self::zero(),
        }
    }

    /// Monic greatest common divisor (zero if both inputs vanish).
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let (mut a, mut b) = (a.monic(), b.monic());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.monic();
        }
        a
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let out = (0..len)
            .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => BigRational::zero(),
            })
            .collect();
        Polynomial::from_coeffs(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = alloc::vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::from_coeffs(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => f.write_str("n")?,
                (1, false) => write!(f, "{a}*n")?,
                (_, true) => write!(f, "n^{i}")?,
                (_, false) => write!(f, "{a}*n^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::from_coeffs(c.iter().map(|&v| rat(v)).collect())
    }

    #[test]
    fn arithmetic_and_degree() {
        let a = p(&[1, 2, 0]);
        assert_eq!(a.degree(), Some(1));
        assert_eq!(&a * &p(&[-1, 1]), p(&[-1, -1, 2]));
        assert_eq!(&a - &a, Polynomial::zero());
        assert_eq!(Polynomial::zero().degree(), None);
    }

    #[test]
    fn shift_matches_evaluation() {
        let a = p(&[3, -2, 0, 5]);
        let s = a.shift(&rat(2));
        for v in -3..4 {
            assert_eq!(s.eval(&rat(v)), a.eval(&rat(v + 2)));
        }
    }

    #[test]
    fn division_and_gcd() {
        let a = &p(&[-1, 1]) * &p(&[2, 0, 1]);
        let (q, r) = a.div_linear(&rat(1));
        assert!(r.is_zero());
        assert_eq!(q, p(&[2, 0, 1]));
        let b = &p(&[-1, 1]) * &p(&[3, 1]);
        assert_eq!(Polynomial::gcd(&a, &b), p(&[-1, 1]));
        let (q, r) = a.div_rem(&p(&[3, 1]));
        assert_eq!(&(&q * &p(&[3, 1])) + &r, a);
    }

    #[test]
    fn display() {
        assert_eq!(alloc::format!("{}", p(&[-1, 0, 1])), "n^2 - 1");
    }
}
