use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{abs, exp};
use crate::time::TimeVector;

/// Default half-width of the forbidden bands around `x_i - x_j = 0` and `x_i - x_j = 1`.
pub const DEFAULT_EPSILON_COLLISION: f64 = 1e-6;

/// Positions and rapidities of `N` particles at a multi-time.
///
/// Construction enforces the generic-configuration hypotheses: for `i != j`
/// the differences `x_i - x_j` stay at least `epsilon` away from 0 and 1, and
/// every first-flow velocity is nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    x: Vec<f64>,
    y: Vec<f64>,
    t: TimeVector,
    epsilon: f64,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        Self::with_time(x, y, TimeVector::zero(), DEFAULT_EPSILON_COLLISION)
    }

    pub fn with_time(x: Vec<f64>, y: Vec<f64>, t: TimeVector, epsilon: f64) -> Result<Self> {
        if x.is_empty() {
            return Err(crate::error::invalid("at least one particle is required"));
        }
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        if !(epsilon >= 0.0) {
            return Err(crate::error::invalid("epsilon_collision must be non-negative"));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(crate::error::invalid("positions and rapidities must be finite"));
        }
        check_gaps(&x, epsilon)?;
        let p = Self { x, y, t, epsilon };
        for (index, v) in p.first_flow_velocities().into_iter().enumerate() {
            if v == 0.0 || !v.is_finite() {
                return Err(Error::ZeroVelocity { index, value: v });
            }
        }
        Ok(p)
    }

    pub fn n_particles(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn t(&self) -> &TimeVector {
        &self.t
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `e^{-y_i}`.
    pub fn weights(&self) -> Vec<f64> {
        self.y.iter().map(|&y| exp(-y)).collect()
    }

    /// Same particles, new configuration; revalidates.
    pub fn moved(&self, x: Vec<f64>, y: Vec<f64>, t: TimeVector) -> Result<Self> {
        Self::with_time(x, y, t, self.epsilon)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::with_time(self.x.clone(), self.y.clone(), self.t.clone(), epsilon)
    }

    pub fn at_time(&self, t: TimeVector) -> Self {
        Self { t, ..self.clone() }
    }

    /// `dx_i/dt_1 = -e^{-y_i} prod_{s != i} (x_i - x_s + 1)/(x_i - x_s)`.
    pub fn first_flow_velocities(&self) -> Vec<f64> {
        let n = self.x.len();
        (0..n)
            .map(|i| {
                let mut prod = 1.0;
                for s in (0..n).filter(|&s| s != i) {
                    let d = self.x[i] - self.x[s];
                    prod *= (d + 1.0) / d;
                }
                -exp(-self.y[i]) * prod
            })
            .collect()
    }
}

/// Checks `|x_i - x_j| > eps` and `|x_i - x_j - 1| > eps` for all ordered pairs.
pub fn check_gaps(x: &[f64], epsilon: f64) -> Result<()> {
    for (i, &xi) in x.iter().enumerate() {
        for (j, &xj) in x.iter().enumerate() {
            if i == j {
                continue;
            }
            let gap = xi - xj;
            if abs(gap) <= epsilon || abs(gap - 1.0) <= epsilon {
                return Err(Error::Collision { i, j, gap });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn forbidden_gaps() {
        assert!(matches!(
            PhasePoint::new(vec![0.0, 1.0], vec![0.0, 0.0]),
            Err(Error::Collision { .. })
        ));
        assert!(matches!(
            PhasePoint::new(vec![0.5, 0.5], vec![0.0, 0.0]),
            Err(Error::Collision { .. })
        ));
        assert!(PhasePoint::new(vec![0.0, 1.0001], vec![0.0, 0.0]).is_ok());
        let p = PhasePoint::new(vec![0.0, 1.0001], vec![0.0, 0.0]).unwrap();
        assert!(p.with_epsilon(1e-3).is_err());
    }

    #[test]
    fn mismatched_lengths() {
        assert_eq!(
            PhasePoint::new(vec![0.0, 2.0], vec![0.0]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        );
    }

    #[test]
    fn single_particle_velocity() {
        let p = PhasePoint::new(vec![0.0], vec![0.0]).unwrap();
        assert_eq!(p.first_flow_velocities(), vec![-1.0]);
    }
}
