//! Scalar fields over the lattice that operator coefficients live in.

use alloc::vec::Vec;
use core::fmt::Debug;

use num_rational::BigRational;
use num_traits::One;

use super::poly::rat;
use super::ratfn::RationalFn;
use crate::error::{Error, Result};

/// Ring operations needed by operator multiplication. Method names avoid the
/// `core::ops` traits so both owned and borrowed forms stay unambiguous.
pub trait Coefficient: Clone + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    /// Exact zero test; sampled functions only report a literal constant zero.
    fn is_zero(&self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    fn scaled(&self, k: i128) -> Self;
    /// `f(n + m)`.
    fn shifted(&self, m: i64) -> Self;

    /// Forward difference `f(n + 1) - f(n)`.
    fn difference(&self) -> Self {
        self.shifted(1).minus(self)
    }
}

fn rat_i128(k: i128) -> BigRational {
    BigRational::from_integer(k.into())
}

impl Coefficient for RationalFn {
    fn zero() -> Self {
        RationalFn::zero()
    }
    fn one() -> Self {
        RationalFn::one()
    }
    fn from_int(v: i64) -> Self {
        RationalFn::constant(rat(v))
    }
    fn is_zero(&self) -> bool {
        RationalFn::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn times(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn negated(&self) -> Self {
        self.neg()
    }
    fn scaled(&self, k: i128) -> Self {
        if k == 1 {
            return self.clone();
        }
        self.scale(&rat_i128(k))
    }
    fn shifted(&self, m: i64) -> Self {
        self.shift_int(m)
    }
}

/// Field elements a lattice function can take values in.
pub trait Scalar: Clone + Debug + PartialEq {
    fn zero() -> Self;
    fn from_i128(v: i128) -> Self;
    /// Exact image of a finite binary float.
    fn from_f64(v: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_i128(v: i128) -> Self {
        v as f64
    }
    fn from_f64(v: f64) -> Option<Self> {
        Some(v)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn from_i128(v: i128) -> Self {
        rat_i128(v)
    }
    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }
    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
}

/// A function on a finite window of the lattice, or a global constant.
///
/// Shifts move the window; binary operations keep the intersection. Reading
/// outside the window is reported rather than extrapolated.
#[derive(Clone, Debug, PartialEq)]
pub enum GridFn<S = f64> {
    Const(S),
    Samples { lo: i64, values: Vec<S> },
}

/// Lattice function with exact rational samples.
pub type ExactGridFn = GridFn<BigRational>;

impl GridFn<f64> {
    pub fn from_rational(r: &RationalFn, lo: i64, hi: i64) -> Self {
        if r.is_polynomial() && r.numerator().degree().unwrap_or(0) == 0 {
            let c = r.eval(&BigRational::one()).map_or(0.0, |v| v.to_f64());
            return GridFn::Const(c);
        }
        Self::from_fn(lo, hi, |n| r.eval_f64(n as f64))
    }

    /// Multiplication by a real constant.
    pub fn scaled_by(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }
}

impl<S: Scalar> GridFn<S> {
    pub fn from_fn(lo: i64, hi: i64, f: impl Fn(i64) -> S) -> Self {
        GridFn::Samples {
            lo,
            values: (lo..=hi).map(f).collect(),
        }
    }

    /// Inclusive window, `None` for constants.
    pub fn window(&self) -> Option<(i64, i64)> {
        match self {
            GridFn::Const(_) => None,
            GridFn::Samples { lo, values } => Some((*lo, lo + values.len() as i64 - 1)),
        }
    }

    pub fn get(&self, n: i64) -> Option<&S> {
        match self {
            GridFn::Const(c) => Some(c),
            GridFn::Samples { lo, values } => usize::try_from(n - lo).ok().and_then(|i| values.get(i)),
        }
    }

    /// Value at `n` as a float.
    pub fn at(&self, n: i64) -> Option<f64> {
        self.get(n).map(Scalar::to_f64)
    }

    pub fn times_scalar(&self, s: &S) -> Self {
        self.map(|v| v.mul(s))
    }

    /// Largest magnitude over lattice indices `lo..=hi`.
    pub fn max_abs_on(&self, lo: i64, hi: i64) -> Result<f64> {
        let mut m = 0.0f64;
        for n in lo..=hi {
            let v = self.at(n).ok_or(Error::WindowExhausted { n })?;
            m = m.max(crate::math::abs(v));
        }
        Ok(m)
    }

    /// Float samples on `lo..=hi`.
    pub fn to_f64_grid(&self, lo: i64, hi: i64) -> Result<GridFn<f64>> {
        let mut values = Vec::with_capacity((hi - lo + 1).max(0) as usize);
        for n in lo..=hi {
            values.push(self.at(n).ok_or(Error::WindowExhausted { n })?);
        }
        Ok(GridFn::Samples { lo, values })
    }

    fn map(&self, f: impl Fn(&S) -> S) -> Self {
        match self {
            GridFn::Const(c) => GridFn::Const(f(c)),
            GridFn::Samples { lo, values } => GridFn::Samples {
                lo: *lo,
                values: values.iter().map(f).collect(),
            },
        }
    }

    fn zip(&self, rhs: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        match (self, rhs) {
            (GridFn::Const(a), GridFn::Const(b)) => GridFn::Const(f(a, b)),
            (GridFn::Const(a), s) => s.map(|v| f(a, v)),
            (s, GridFn::Const(b)) => s.map(|v| f(v, b)),
            (GridFn::Samples { lo: la, values: va }, GridFn::Samples { lo: lb, values: vb }) => {
                let lo = (*la).max(*lb);
                let hi = (la + va.len() as i64).min(lb + vb.len() as i64);
                let values = (lo..hi)
                    .map(|n| f(&va[(n - la) as usize], &vb[(n - lb) as usize]))
                    .collect();
                GridFn::Samples { lo, values }
            }
        }
    }
}

impl<S: Scalar> Coefficient for GridFn<S> {
    fn zero() -> Self {
        GridFn::Const(S::zero())
    }
    fn one() -> Self {
        GridFn::Const(S::from_i128(1))
    }
    fn from_int(v: i64) -> Self {
        GridFn::Const(S::from_i128(v as i128))
    }
    fn is_zero(&self) -> bool {
        matches!(self, GridFn::Const(c) if c.is_zero())
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.zip(rhs, S::add)
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.zip(rhs, S::sub)
    }
    fn times(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        self.zip(rhs, S::mul)
    }
    fn negated(&self) -> Self {
        self.map(S::neg)
    }
    fn scaled(&self, k: i128) -> Self {
        match k {
            0 => Self::zero(),
            1 => self.clone(),
            _ => {
                let k = S::from_i128(k);
                self.map(|v| v.mul(&k))
            }
        }
    }
    fn shifted(&self, m: i64) -> Self {
        match self {
            GridFn::Const(c) => GridFn::Const(c.clone()),
            GridFn::Samples { lo, values } => GridFn::Samples {
                lo: lo - m,
                values: values.clone(),
            },
        }
    }
}
