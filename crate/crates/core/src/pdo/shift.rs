//! Operators in the shift basis `sum_m b_m(n) E^m`, where `(E f)(n) = f(n + 1)`.
//!
//! Descending difference series map to series unbounded below in `E`; their
//! formal adjoints are unbounded above. `low` and `high` record which side has
//! been cut: exponents below `low` (or above `high`) were discarded.

use alloc::collections::BTreeMap;

use super::coeff::Coefficient;
use super::op::{binomial, PseudoDiffOp};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftOp<C> {
    terms: BTreeMap<i64, C>,
    low: Option<i64>,
    high: Option<i64>,
}

fn max_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) | (None, x) => x,
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) | (None, x) => x,
    }
}

impl<C: Coefficient> ShiftOp<C> {
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, C)>, low: Option<i64>, high: Option<i64>) -> Self {
        let mut map: BTreeMap<i64, C> = BTreeMap::new();
        for (m, c) in terms {
            if low.is_some_and(|l| m < l) || high.is_some_and(|h| m > h) {
                continue;
            }
            match map.get_mut(&m) {
                Some(acc) => *acc = acc.plus(&c),
                None => {
                    map.insert(m, c);
                }
            }
        }
        map.retain(|_, c| !c.is_zero());
        Self { terms: map, low, high }
    }

    pub fn identity() -> Self {
        Self::shift(0)
    }

    /// `E^m`.
    pub fn shift(m: i64) -> Self {
        Self::from_terms([(m, C::one())], None, None)
    }

    /// `nabla = 1 - E^{-1}`, exact.
    pub fn nabla() -> Self {
        Self::from_terms([(0, C::one()), (-1, C::one().negated())], None, None)
    }

    pub fn low(&self) -> Option<i64> {
        self.low
    }

    pub fn high(&self) -> Option<i64> {
        self.high
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> + '_ {
        self.terms.iter().map(|(&m, c)| (m, c))
    }

    pub fn coeff(&self, m: i64) -> Result<C> {
        let outside = self.low.is_some_and(|l| m < l) || self.high.is_some_and(|h| m > h);
        if outside {
            let floor = self.low.or(self.high).unwrap_or(m) as i32;
            return Err(Error::TruncationExhausted { order: m as i32, floor });
        }
        Ok(self.terms.get(&m).cloned().unwrap_or_else(C::zero))
    }

    /// Rewrites `sum a_j Delta^j`, `Delta = E - 1`. Negative powers expand as
    /// `E^j (1 - E^{-1})^j`, cut at exponent `-depth` or the operator's floor.
    pub fn from_pdo(a: &PseudoDiffOp<C>, depth: i32) -> Self {
        let low = match a.floor() {
            Some(f) => Some(f.max(-depth) as i64),
            None if a.terms().any(|(j, _)| j < 0) => Some(-depth as i64),
            None => None,
        };
        let mut out: BTreeMap<i64, C> = BTreeMap::new();
        for (j, c) in a.terms() {
            let mut l = 0u32;
            loop {
                let m = (j - l as i32) as i64;
                if (j >= 0 && l as i32 > j) || low.is_some_and(|lo| m < lo) {
                    break;
                }
                let b = binomial(j, l) * if l % 2 == 0 { 1 } else { -1 };
                let term = c.scaled(b);
                match out.get_mut(&m) {
                    Some(acc) => *acc = acc.plus(&term),
                    None => {
                        out.insert(m, term);
                    }
                }
                l += 1;
            }
        }
        Self::from_terms(out, low, None)
    }

    /// Back to the difference basis via `E^m = (1 + Delta)^m`. Only series
    /// bounded above have such a form.
    pub fn to_pdo(&self, depth: i32) -> Result<PseudoDiffOp<C>> {
        if self.high.is_some() {
            return Err(Error::InvalidArgument(
                "shift series unbounded above has no difference-basis form".into(),
            ));
        }
        let floor = match self.low {
            Some(l) => Some((l as i32).max(-depth)),
            None if self.terms.keys().any(|&m| m < 0) => Some(-depth),
            None => None,
        };
        let mut parts = alloc::vec::Vec::new();
        for (&m, c) in &self.terms {
            let m = m as i32;
            let mut l = 0u32;
            loop {
                let order = m - l as i32;
                if (m >= 0 && l as i32 > m) || floor.is_some_and(|f| order < f) {
                    break;
                }
                parts.push((order, c.scaled(binomial(m, l))));
                l += 1;
            }
        }
        Ok(PseudoDiffOp::from_terms(parts, floor))
    }

    /// Formal adjoint: `(b E^m)* = b(n - m) E^{-m}`.
    pub fn adjoint(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&m, b)| (-m, b.shifted(-m))).collect(),
            low: self.high.map(|h| -h),
            high: self.low.map(|l| -l),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let all = self.terms.iter().chain(rhs.terms.iter()).map(|(&m, c)| (m, c.clone()));
        Self::from_terms(all, max_opt(self.low, rhs.low), min_opt(self.high, rhs.high))
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&m, c)| (m, c.negated())).collect(),
            low: self.low,
            high: self.high,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn top(&self) -> Option<i64> {
        max_opt(self.terms.keys().next_back().copied(), self.low.map(|l| l - 1))
    }

    fn bottom(&self) -> Option<i64> {
        min_opt(self.terms.keys().next().copied(), self.high.map(|h| h + 1))
    }

    /// `(f E^m)(g E^k) = f g(n + m) E^{m + k}`.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        let cut_low = self.low.is_some() || rhs.low.is_some();
        let cut_high = self.high.is_some() || rhs.high.is_some();
        if cut_low && cut_high {
            return Err(Error::InvalidArgument(
                "product of shift series truncated on opposite sides".into(),
            ));
        }
        let low = max_opt(
            self.low.zip(rhs.top()).map(|(l, t)| l + t),
            rhs.low.zip(self.top()).map(|(l, t)| l + t),
        );
        let high = min_opt(
            self.high.zip(rhs.bottom()).map(|(h, b)| h + b),
            rhs.high.zip(self.bottom()).map(|(h, b)| h + b),
        );
        let mut parts = alloc::vec::Vec::new();
        for (&m, f) in &self.terms {
            for (&k, g) in &rhs.terms {
                parts.push((m + k, f.times(&g.shifted(m))));
            }
        }
        Ok(Self::from_terms(parts, low, high))
    }
}

impl<C: Coefficient> PseudoDiffOp<C> {
    /// Formal adjoint, fixing functions and sending `Delta` to `-nabla`.
    pub fn adjoint(&self, depth: i32) -> ShiftOp<C> {
        ShiftOp::from_pdo(self, depth).adjoint()
    }
}

/// Applies an exact shift operator to a sequence at `n`.
pub fn apply_to_sequence(op: &ShiftOp<super::coeff::GridFn>, f: impl Fn(i64) -> f64, n: i64) -> Result<f64> {
    if op.low.is_some() || op.high.is_some() {
        return Err(Error::InvalidArgument("cannot apply a truncated shift series".into()));
    }
    let mut acc = 0.0;
    for (&m, b) in &op.terms {
        let bn = b.at(n).ok_or(Error::WindowExhausted { n })?;
        acc += bn * f(n + m);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdo::coeff::GridFn;
    use crate::pdo::poly::{rat, Polynomial};
    use crate::pdo::ratfn::RationalFn;

    type Op = PseudoDiffOp<RationalFn>;

    fn n_fn() -> RationalFn {
        RationalFn::from_polynomial(Polynomial::from_coeffs(alloc::vec![rat(0), rat(1)]))
    }

    #[test]
    fn delta_adjoint_is_minus_nabla() {
        let adj = Op::delta().adjoint(6);
        assert_eq!(adj, ShiftOp::<RationalFn>::nabla().neg());
        let back = adj.to_pdo(6).unwrap();
        // -nabla = -1 + Delta^{-1} - Delta^{-2} + ...
        assert_eq!(back.coeff(0).unwrap(), RationalFn::constant(rat(-1)));
        assert_eq!(back.coeff(-1).unwrap(), RationalFn::one());
        assert_eq!(back.coeff(-2).unwrap(), RationalFn::constant(rat(-1)));
    }

    #[test]
    fn adjoint_of_function_and_involution() {
        let f = Op::monomial(n_fn(), 0);
        assert_eq!(f.adjoint(4), ShiftOp::from_pdo(&f, 4));
        let a = Op::from_terms([(1, n_fn()), (-1, RationalFn::one())], None);
        let s = ShiftOp::from_pdo(&a, 6);
        assert_eq!(s.adjoint().adjoint(), s);
    }

    #[test]
    fn summation_by_parts() {
        let f = |n: i64| if n.abs() <= 3 { (n * n) as f64 - 1.5 } else { 0.0 };
        let g = |n: i64| if n.abs() <= 4 { 2.0 - n as f64 } else { 0.0 };
        let d = ShiftOp::<GridFn>::from_pdo(&PseudoDiffOp::delta(), 0);
        let dstar = d.adjoint();
        let lhs: f64 = (-10..=10).map(|n| apply_to_sequence(&d, f, n).unwrap() * g(n)).sum();
        let rhs: f64 = (-10..=10)
            .map(|n| f(n) * apply_to_sequence(&dstar, g, n).unwrap())
            .sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }
}
