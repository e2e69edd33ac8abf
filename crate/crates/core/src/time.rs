use alloc::collections::BTreeMap;
use core::fmt;

use crate::error::{invalid, Result};

/// Finitely supported multi-time `k -> t_k`, `k >= 1`.
///
/// Zero entries are never stored, so two vectors describing the same
/// point compare equal.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TimeVector {
    entries: BTreeMap<u32, f64>,
}

impl TimeVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        let mut t = Self::zero();
        for (k, v) in pairs {
            t.set(k, t.get(k) + v)?;
        }
        Ok(t)
    }

    /// Single nonzero entry `t_k = value`.
    pub fn single(k: u32, value: f64) -> Result<Self> {
        Self::from_pairs([(k, value)])
    }

    pub fn get(&self, k: u32) -> f64 {
        self.entries.get(&k).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, k: u32, value: f64) -> Result<()> {
        if k == 0 {
            return Err(invalid("flow indices start at 1"));
        }
        if !value.is_finite() {
            return Err(invalid("time entries must be finite"));
        }
        if value == 0.0 {
            self.entries.remove(&k);
        } else {
            self.entries.insert(k, value);
        }
        Ok(())
    }

    /// Adds `dt` to entry `k`.
    pub fn advance(&mut self, k: u32, dt: f64) -> Result<()> {
        self.set(k, self.get(k) + dt)
    }

    pub fn advanced(&self, k: u32, dt: f64) -> Result<Self> {
        let mut t = self.clone();
        t.advance(k, dt)?;
        Ok(t)
    }

    /// Largest supported index, 0 for the zero vector.
    pub fn k_max(&self) -> u32 {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Nonzero entries in ascending index order.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (u32, f64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    /// `self - other`, entrywise.
    pub fn difference(&self, other: &TimeVector) -> Self {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            // indices are already validated, values finite
            let _ = out.set(k, out.get(k) - v);
        }
        out
    }
}

impl fmt::Display for TimeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (k, v)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "t{k}={v}")?;
        }
        Ok(())
    }
}
