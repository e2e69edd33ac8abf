//! Exact rational functions of `n` whose denominators split over the rationals.
//!
//! Every coefficient arising from a wave operator with rational particle
//! positions has poles only at (shifted) positions, so a factored denominator
//! keeps addition cheap: the common denominator is a multiplicity maximum.

use alloc::collections::BTreeMap;
use core::fmt;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::poly::{rat, Polynomial};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFn {
    num: Polynomial,
    /// Pole location to multiplicity.
    den: BTreeMap<BigRational, u32>,
}

impl RationalFn {
    pub fn zero() -> Self {
        Self {
            num: Polynomial::zero(),
            den: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_polynomial(Polynomial::constant(c))
    }

    pub fn from_polynomial(num: Polynomial) -> Self {
        Self {
            num,
            den: BTreeMap::new(),
        }
    }

    /// `residue / (n - pole)`.
    pub fn simple_pole(residue: BigRational, pole: BigRational) -> Self {
        let mut den = BTreeMap::new();
        den.insert(pole, 1);
        Self::reduced(Polynomial::constant(residue), den)
    }

    /// `sum residue / (n - pole)`.
    pub fn partial_fractions<'a>(terms: impl IntoIterator<Item = (&'a BigRational, &'a BigRational)>) -> Self {
        terms.into_iter().fold(Self::zero(), |acc, (res, pole)| {
            acc.add(&Self::simple_pole(res.clone(), pole.clone()))
        })
    }

    /// Numerator and factored denominator; common roots are cancelled.
    pub fn from_parts(num: Polynomial, den: BTreeMap<BigRational, u32>) -> Self {
        Self::reduced(num, den)
    }

    fn reduced(mut num: Polynomial, mut den: BTreeMap<BigRational, u32>) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        den.retain(|root, mult| {
            while *mult > 0 {
                let (q, r) = num.div_linear(root);
                if !r.is_zero() {
                    break;
                }
                num = q;
                *mult -= 1;
            }
            *mult > 0
        });
        Self { num, den }
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn poles(&self) -> &BTreeMap<BigRational, u32> {
        &self.den
    }

    /// Expanded monic denominator.
    pub fn denominator(&self) -> Polynomial {
        let mut d = Polynomial::one();
        for (root, &m) in &self.den {
            for _ in 0..m {
                d = d.mul_linear(root);
            }
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    fn lifted(&self, target: &BTreeMap<BigRational, u32>) -> Polynomial {
        let mut out = self.num.clone();
        for (root, &m) in target {
            let have = self.den.get(root).copied().unwrap_or(0);
            for _ in have..m {
                out = out.mul_linear(root);
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let mut den = self.den.clone();
        for (root, &m) in &rhs.den {
            let e = den.entry(root.clone()).or_insert(0);
            *e = (*e).max(m);
        }
        let num = &self.lifted(&den) + &rhs.lifted(&den);
        Self::reduced(num, den)
    }

    pub fn neg(&self) -> Self {
        Self {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut den = self.den.clone();
        for (root, &m) in &rhs.den {
            *den.entry(root.clone()).or_insert(0) += m;
        }
        Self::reduced(&self.num * &rhs.num, den)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// `f(n + m)`.
    pub fn shift(&self, m: &BigRational) -> Self {
        if m.is_zero() {
            return self.clone();
        }
        Self {
            num: self.num.shift(m),
            den: self.den.iter().map(|(r, &k)| (r - m, k)).collect(),
        }
    }

    pub fn shift_int(&self, m: i64) -> Self {
        self.shift(&rat(m))
    }

    /// `None` at a pole.
    pub fn eval(&self, n: &BigRational) -> Option<BigRational> {
        let mut d = BigRational::one();
        for (root, &m) in &self.den {
            let f = n - root;
            if f.is_zero() {
                return None;
            }
            for _ in 0..m {
                d *= &f;
            }
        }
        Some(self.num.eval(n) / d)
    }

    pub fn eval_f64(&self, n: f64) -> f64 {
        let mut v = self.num.eval_f64(n);
        for (root, &m) in &self.den {
            let f = n - root.to_f64().unwrap_or(f64::NAN);
            for _ in 0..m {
                v /= f;
            }
        }
        v
    }

    /// Residue at a simple pole `root`; `None` if `root` is not a simple pole.
    pub fn simple_residue(&self, root: &BigRational) -> Option<BigRational> {
        if self.den.get(root) != Some(&1) {
            return None;
        }
        let mut others = self.den.clone();
        others.remove(root);
        Self {
            num: self.num.clone(),
            den: others,
        }
        .eval(root)
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/(", self.num)?;
        let mut first = true;
        for (root, &m) in &self.den {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if root.is_zero() {
                f.write_str("n")?;
            } else {
                write!(f, "(n - {root})")?;
            }
            if m > 1 {
                write!(f, "^{m}")?;
            }
        }
        f.write_str(")")
    }
}
