//! Phase-space data held as exact rationals.

use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::phase::PhasePoint;

pub type RatMatrix = Vec<Vec<BigRational>>;

/// Positions `x_i` and weights `c_i = e^{-y_i}`, both rational.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactPhase {
    x: Vec<BigRational>,
    c: Vec<BigRational>,
}

fn to_rational(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| invalid("non-finite value"))
}

impl ExactPhase {
    /// Rejects gaps exactly equal to 0 or 1 and non-positive weights.
    pub fn new(x: Vec<BigRational>, c: Vec<BigRational>) -> Result<Self> {
        if x.is_empty() || x.len() != c.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: c.len(),
            });
        }
        if let Some(i) = c.iter().position(|ci| !ci.is_positive()) {
            return Err(Error::NonpositiveRapidityArgument {
                index: i,
                value: c[i].to_f64().unwrap_or(f64::NAN),
            });
        }
        for i in 0..x.len() {
            for j in 0..x.len() {
                if i == j {
                    continue;
                }
                let d = &x[i] - &x[j];
                if d.is_zero() || d.is_one() {
                    return Err(Error::Collision {
                        i,
                        j,
                        gap: d.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        Ok(Self { x, c })
    }

    /// Exact images of the binary floats `x_i` and `e^{-y_i}`.
    pub fn from_phase(p: &PhasePoint) -> Result<Self> {
        let x = p.x().iter().map(|&v| to_rational(v)).collect::<Result<Vec<_>>>()?;
        let c = p.weights().into_iter().map(to_rational).collect::<Result<Vec<_>>>()?;
        Self::new(x, c)
    }

    pub fn n_particles(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[BigRational] {
        &self.x
    }

    pub fn c(&self) -> &[BigRational] {
        &self.c
    }

    fn p_factor(&self, i: usize) -> BigRational {
        let mut p = BigRational::one();
        for s in 0..self.x.len() {
            if s != i {
                let d = &self.x[i] - &self.x[s];
                p *= (&d + BigRational::one()) / d;
            }
        }
        p
    }

    /// `Y_ij = delta_ij + c_i P_i / (x_i - x_j - 1)`.
    pub fn y_matrix(&self) -> RatMatrix {
        let n = self.x.len();
        (0..n)
            .map(|i| {
                let cp = &self.c[i] * self.p_factor(i);
                (0..n)
                    .map(|j| {
                        let d = &self.x[i] - &self.x[j] - BigRational::one();
                        let v = &cp / d;
                        if i == j {
                            v + BigRational::one()
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// First-flow velocities `Y_ii - 1`.
    pub fn velocities(&self) -> Vec<BigRational> {
        (0..self.x.len()).map(|i| -(&self.c[i] * self.p_factor(i))).collect()
    }

    /// Residue vectors of `W`, from `(-Y)^{k-1}` applied to the velocities.
    pub fn residue_vectors(&self, k_max: usize) -> Vec<Vec<BigRational>> {
        let minus_y = neg_matrix(&self.y_matrix());
        iterate(&minus_y, self.velocities(), k_max)
    }

    /// One step of the scalar residue recursion at the poles `x_i - 1`:
    /// `w_{k+1,i} = -w_{k,i} + xdot_i sum_j w_{k,j} / (x_i - x_j - 1)`.
    pub fn residue_step(&self, w: &[BigRational]) -> Vec<BigRational> {
        let v = self.velocities();
        (0..self.x.len())
            .map(|i| {
                let mut s = BigRational::zero();
                for (j, wj) in w.iter().enumerate() {
                    s += wj / (&self.x[i] - &self.x[j] - BigRational::one());
                }
                -w[i].clone() + &v[i] * s
            })
            .collect()
    }

    /// Residue vectors of the adjoint wave operator,
    /// `-diag(xdot) (-Y^t)^{k-1} e`.
    pub fn adjoint_residue_vectors(&self, k_max: usize) -> Vec<Vec<BigRational>> {
        let y = self.y_matrix();
        let n = y.len();
        let minus_yt: RatMatrix = (0..n).map(|i| (0..n).map(|j| -y[j][i].clone()).collect()).collect();
        let v = self.velocities();
        iterate(&minus_yt, alloc::vec![BigRational::one(); n], k_max)
            .into_iter()
            .map(|u| u.iter().zip(&v).map(|(a, b)| -(a * b)).collect())
            .collect()
    }
}

pub fn neg_matrix(m: &RatMatrix) -> RatMatrix {
    m.iter().map(|row| row.iter().map(|v| -v.clone()).collect()).collect()
}

pub fn mat_vec(m: &RatMatrix, v: &[BigRational]) -> Vec<BigRational> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(BigRational::zero(), |acc, (a, b)| acc + a * b))
        .collect()
}

fn iterate(m: &RatMatrix, start: Vec<BigRational>, k_max: usize) -> Vec<Vec<BigRational>> {
    let mut out = Vec::with_capacity(k_max);
    let mut cur = start;
    for _ in 0..k_max {
        let next = mat_vec(m, &cur);
        out.push(cur);
        cur = next;
    }
    out
}
