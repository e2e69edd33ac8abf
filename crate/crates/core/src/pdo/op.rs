//! Pseudo-difference operators `sum_j a_j(n) Delta^j`, truncated from below.
//!
//! Each operator records a `floor`: every order at or above it is known
//! exactly; orders below it were discarded. `None` means nothing was discarded.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::coeff::Coefficient;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PseudoDiffOp<C> {
    terms: BTreeMap<i32, C>,
    floor: Option<i32>,
}

/// Generalized binomial `binom(j, i)` for any integer `j` and `i >= 0`.
pub fn binomial(j: i32, i: u32) -> i128 {
    let mut c: i128 = 1;
    for t in 0..i as i128 {
        c = c * (j as i128 - t) / (t + 1);
    }
    c
}

fn max_opt(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl<C: Coefficient> PseudoDiffOp<C> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
            floor: None,
        }
    }

    pub fn identity() -> Self {
        Self::monomial(C::one(), 0)
    }

    pub fn delta() -> Self {
        Self::monomial(C::one(), 1)
    }

    /// `c(n) Delta^order`.
    pub fn monomial(c: C, order: i32) -> Self {
        Self::from_terms([(order, c)], None)
    }

    /// Terms below `floor` are dropped.
    pub fn from_terms(terms: impl IntoIterator<Item = (i32, C)>, floor: Option<i32>) -> Self {
        let mut map: BTreeMap<i32, C> = BTreeMap::new();
        for (j, c) in terms {
            if floor.is_some_and(|f| j < f) || c.is_zero() {
                continue;
            }
            match map.get_mut(&j) {
                Some(acc) => *acc = acc.plus(&c),
                None => {
                    map.insert(j, c);
                }
            }
        }
        map.retain(|_, c| !c.is_zero());
        Self { terms: map, floor }
    }

    pub fn floor(&self) -> Option<i32> {
        self.floor
    }

    pub fn is_exact(&self) -> bool {
        self.floor.is_none()
    }

    /// Highest order with a stored (nonzero) coefficient.
    pub fn order(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    /// Highest order that may carry a nonzero coefficient, known or not.
    fn reach(&self) -> Option<i32> {
        max_opt(self.order(), self.floor.map(|f| f - 1))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &C)> + '_ {
        self.terms.iter().map(|(&j, c)| (j, c))
    }

    pub fn coeff(&self, order: i32) -> Result<C> {
        if let Some(floor) = self.floor {
            if order < floor {
                return Err(Error::TruncationExhausted { order, floor });
            }
        }
        Ok(self.terms.get(&order).cloned().unwrap_or_else(C::zero))
    }

    /// Retain orders `>= floor`.
    pub fn truncated(&self, floor: i32) -> Self {
        let f = max_opt(self.floor, Some(floor));
        Self::from_terms(self.terms.iter().map(|(&j, c)| (j, c.clone())), f)
    }

    /// Non-negative orders. Exact unless the floor already cut into them.
    pub fn plus_part(&self) -> Self {
        let floor = self.floor.filter(|&f| f > 0);
        Self::from_terms(self.terms.range(0..).map(|(&j, c)| (j, c.clone())), floor)
    }

    /// Negative orders, keeping the floor.
    pub fn minus_part(&self) -> Self {
        Self::from_terms(self.terms.range(..0).map(|(&j, c)| (j, c.clone())), self.floor)
    }

    pub fn split(&self) -> (Self, Self) {
        (self.plus_part(), self.minus_part())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let floor = max_opt(self.floor, rhs.floor);
        let all = self.terms.iter().chain(rhs.terms.iter()).map(|(&j, c)| (j, c.clone()));
        Self::from_terms(all, floor)
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&j, c)| (j, c.negated())).collect(),
            floor: self.floor,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// Left multiplication by a function: `c(n) A`.
    pub fn scale_left(&self, c: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(&j, a)| (j, c.times(a))), self.floor)
    }

    /// `sum a_j(n + m) Delta^j`, i.e. conjugation by the shift `E^m`.
    pub fn shift_argument(&self, m: i64) -> Self {
        Self::from_terms(self.terms.iter().map(|(&j, a)| (j, a.shifted(m))), self.floor)
    }

    /// Applies `f` to every stored coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&C) -> C) -> Self {
        Self::from_terms(self.terms.iter().map(|(&j, c)| (j, f(c))), self.floor)
    }

    /// Product keeping orders `>= -depth`, via
    /// `a Delta^j b = sum_i binom(j, i) a (Delta^i b)(n + j - i) Delta^(j - i)`.
    pub fn mul(&self, rhs: &Self, depth: i32) -> Self {
        let lost = max_opt(
            self.floor.zip(rhs.reach()).map(|(f, t)| f + t),
            rhs.floor.zip(self.reach()).map(|(f, t)| f + t),
        );
        let bound = lost.map_or(-depth, |s| s.max(-depth));
        let mut dropped = false;
        let mut acc: BTreeMap<i32, C> = BTreeMap::new();
        for (&k, b) in &rhs.terms {
            let mut diffs: Vec<C> = alloc::vec![b.clone()];
            for (&j, a) in &self.terms {
                let mut i: u32 = 0;
                loop {
                    if j >= 0 && i as i32 > j {
                        break;
                    }
                    while diffs.len() <= i as usize {
                        let next = diffs.last().expect("nonempty").difference();
                        diffs.push(next);
                    }
                    if diffs[i as usize].is_zero() {
                        break;
                    }
                    let order = j - i as i32 + k;
                    if order < bound {
                        dropped = true;
                        break;
                    }
                    let term = a
                        .times(&diffs[i as usize].shifted((j - i as i32) as i64))
                        .scaled(binomial(j, i));
                    match acc.get_mut(&order) {
                        Some(v) => *v = v.plus(&term),
                        None => {
                            acc.insert(order, term);
                        }
                    }
                    i += 1;
                }
            }
        }
        let floor = if dropped { Some(bound) } else { lost };
        Self::from_terms(acc, floor)
    }

    pub fn commutator(&self, rhs: &Self, depth: i32) -> Self {
        self.mul(rhs, depth).sub(&rhs.mul(self, depth))
    }

    pub fn pow(&self, k: u32, depth: i32) -> Self {
        let mut out = Self::identity();
        for _ in 0..k {
            out = out.mul(self, depth);
        }
        out
    }

    /// Inverse of `1 + V` with `V` of negative order, by the Neumann series.
    pub fn unipotent_inverse(&self, depth: i32) -> Result<Self> {
        let v = self.sub(&Self::identity());
        if v.order().is_some_and(|o| o >= 0) || self.floor.is_some_and(|f| f > 0) {
            return Err(Error::InvalidArgument(
                "operator is not of the form 1 + lower order".into(),
            ));
        }
        if v.terms.is_empty() && v.floor.is_none() {
            return Ok(Self::identity());
        }
        let neg_v = v.neg();
        let mut term = Self::identity();
        let mut out = Self::identity();
        for _ in 0..depth.max(0) {
            term = term.mul(&neg_v, depth);
            out = out.add(&term);
        }
        // Powers beyond `depth` only reach orders below `-depth`.
        Ok(out.truncated(-depth))
    }

    /// Largest order at which `self - rhs` has a nonzero known coefficient.
    pub fn first_difference(&self, rhs: &Self) -> Option<i32> {
        self.sub(rhs).order()
    }
}
