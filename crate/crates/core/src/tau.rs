//! Polynomial tau-functions `tau(n; t) = det(nI - A(t))` with
//! `A(t) = X0 - sum_j j t_j (I - Y0)(-Y0)^{j-1}`.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::dynamics::{build_matrices, rank_one_ratio, rapidity_from_velocity};
use crate::error::{invalid, Error, Result};
use crate::math::{abs, sqrt};
use crate::phase::PhasePoint;
use crate::time::TimeVector;

/// Imaginary parts below this (relative to the spectrum scale) count as real.
pub const REAL_ROOT_TOLERANCE: f64 = 1e-9;
/// Eigenvalue condition numbers above this are rejected.
pub const MAX_EIGEN_CONDITION: f64 = 1e8;

/// Frozen matrices `X0 = diag(x0)` and `Y0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TauData {
    x0: DMatrix<f64>,
    y0: DMatrix<f64>,
    epsilon: f64,
}

/// Direction of the Miwa shift `t -/+ [1/z]`, `[z] = (z, z^2/2, z^3/3, ...)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MiwaShift {
    /// `t - [1/z]`, the wave function numerator.
    Minus,
    /// `t + [1/z]`, the adjoint wave function numerator.
    Plus,
}

/// Eigenvalues of `A(t)`, ordered by real part.
#[derive(Clone, Debug, PartialEq)]
pub struct TauRoots {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl TauRoots {
    pub fn is_real(&self) -> bool {
        self.max_imag() <= REAL_ROOT_TOLERANCE * (1.0 + crate::math::max_abs(self.re.iter().copied()))
    }

    pub fn max_imag(&self) -> f64 {
        crate::math::max_abs(self.im.iter().copied())
    }

    /// Real parts, or `ComplexRootsEncountered` when the spectrum is not real.
    pub fn real(&self) -> Result<Vec<f64>> {
        if self.is_real() {
            Ok(self.re.clone())
        } else {
            Err(Error::ComplexRootsEncountered {
                max_imag: self.max_imag(),
            })
        }
    }
}

impl TauData {
    /// Freezes `X` and `Y` of `p`; times passed to the methods are measured from `p`.
    pub fn from_phase(p: &PhasePoint) -> Result<Self> {
        let m = build_matrices(p)?;
        Ok(Self {
            x0: m.x,
            y0: m.y,
            epsilon: p.epsilon(),
        })
    }

    /// Accepts arbitrary matrices, e.g. read back from a file. `x0` must be
    /// diagonal and `I - Y0` invertible.
    pub fn from_matrices(x0: DMatrix<f64>, y0: DMatrix<f64>, epsilon: f64) -> Result<Self> {
        let n = x0.nrows();
        if x0.ncols() != n || y0.nrows() != n || y0.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: y0.nrows(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && x0[(i, j)] != 0.0 {
                    return Err(invalid("X0 must be diagonal"));
                }
            }
        }
        let det = (DMatrix::<f64>::identity(n, n) - &y0).determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(invalid("det(I - Y0) must be nonzero"));
        }
        Ok(Self { x0, y0, epsilon })
    }

    /// [`TauData::from_matrices`] with `X0 = diag(x0)` and `Y0` given row by row.
    pub fn from_rows(x0: &[f64], y0: &[Vec<f64>], epsilon: f64) -> Result<Self> {
        let n = x0.len();
        if y0.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: y0.len(),
            });
        }
        if let Some(row) = y0.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        let y = DMatrix::from_fn(n, n, |i, j| y0[i][j]);
        Self::from_matrices(DMatrix::from_diagonal(&DVector::from_column_slice(x0)), y, epsilon)
    }

    /// `Y0` as rows.
    pub fn y0_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.y0[(i, j)]).collect())
            .collect()
    }

    pub fn n(&self) -> usize {
        self.x0.nrows()
    }

    pub fn x0(&self) -> &DMatrix<f64> {
        &self.x0
    }

    pub fn y0(&self) -> &DMatrix<f64> {
        &self.y0
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn initial_positions(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.x0[(i, i)]).collect()
    }

    /// `sigma_2/sigma_1` of `X0 Y0 - Y0 X0 + I - Y0`.
    pub fn rank_one_residual(&self) -> f64 {
        let n = self.n();
        let c = &self.x0 * &self.y0 - &self.y0 * &self.x0 + DMatrix::identity(n, n) - &self.y0;
        rank_one_ratio(&c)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.y0
            .clone()
            .complex_eigenvalues()
            .iter()
            .map(|c| sqrt(c.re * c.re + c.im * c.im))
            .fold(0.0, f64::max)
    }

    /// `dA/dt_k = -k (I - Y0)(-Y0)^{k-1}`.
    pub fn a_rate(&self, k: u32) -> DMatrix<f64> {
        let n = self.n();
        let id = DMatrix::<f64>::identity(n, n);
        let minus_y = -&self.y0;
        let mut pw = id.clone();
        for _ in 1..k {
            pw = &pw * &minus_y;
        }
        (&id - &self.y0) * pw * -(k as f64)
    }

    pub fn a_matrix(&self, t: &TimeVector) -> DMatrix<f64> {
        let mut a = self.x0.clone();
        for (k, tk) in t.iter() {
            a += self.a_rate(k) * tk;
        }
        a
    }

    pub fn tau_det(&self, n: f64, t: &TimeVector) -> f64 {
        let dim = self.n();
        (DMatrix::<f64>::identity(dim, dim) * n - self.a_matrix(t)).determinant()
    }

    pub fn tau_roots(&self, t: &TimeVector) -> TauRoots {
        let mut ev: Vec<(f64, f64)> = self
            .a_matrix(t)
            .complex_eigenvalues()
            .iter()
            .map(|c| (c.re, c.im))
            .collect();
        ev.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
        TauRoots {
            re: ev.iter().map(|e| e.0).collect(),
            im: ev.iter().map(|e| e.1).collect(),
        }
    }

    /// `(I - Y0)(zI + Y0)^{-1}`, the resummed Miwa increment of `A`.
    pub fn miwa_increment(&self, z: f64) -> Result<DMatrix<f64>> {
        let rho = self.spectral_radius();
        if !(abs(z) > rho * (1.0 + 1e-6)) {
            return Err(Error::SpectralRadiusViolation { z, radius: rho });
        }
        let n = self.n();
        let id = DMatrix::<f64>::identity(n, n);
        let shifted = &id * z + &self.y0;
        let inv = shifted.clone().try_inverse().ok_or(Error::SingularShiftMatrix { z })?;
        if inv.norm() * shifted.norm() > 1e12 {
            return Err(Error::SingularShiftMatrix { z });
        }
        Ok((&id - &self.y0) * inv)
    }

    /// `tau(n; t -/+ [1/z]) = det(nI - A(t) -/+ (I - Y0)(zI + Y0)^{-1})`.
    pub fn tau_shifted(&self, n: f64, t: &TimeVector, z: f64, shift: MiwaShift) -> Result<f64> {
        let inc = self.miwa_increment(z)?;
        let dim = self.n();
        let base = DMatrix::<f64>::identity(dim, dim) * n - self.a_matrix(t);
        let m = match shift {
            MiwaShift::Minus => base - inc,
            MiwaShift::Plus => base + inc,
        };
        Ok(m.determinant())
    }

    /// Particle system whose positions are the roots of `tau(.; t)`.
    ///
    /// Roots are labelled by rank, matching the order of `x0` (real flows
    /// never reorder particles). Velocities come from first-order
    /// eigenvalue perturbation with `dA/dt_1 = -(I - Y0)`.
    pub fn phase_from_tau(&self, t: &TimeVector) -> Result<PhasePoint> {
        let a = self.a_matrix(t);
        let roots = self.tau_roots(t).real()?;
        let n = self.n();
        let ranks = rank_order(&self.initial_positions());
        let mut x = alloc::vec![0.0; n];
        for (r, &i) in ranks.iter().enumerate() {
            x[i] = roots[r];
        }
        let da = self.a_rate(1);
        let mut xdot = Vec::with_capacity(n);
        for (index, &lambda) in x.iter().enumerate() {
            let (deriv, condition) = eigenvalue_derivative(&a, lambda, &da);
            if condition > MAX_EIGEN_CONDITION || !deriv.is_finite() {
                return Err(Error::DegenerateEigenvalue { index, condition });
            }
            xdot.push(deriv);
        }
        let y = rapidity_from_velocity(&x, &xdot, self.epsilon)?;
        PhasePoint::with_time(x, y, t.clone(), self.epsilon)
    }
}

/// `prod_i (n - x_i)`.
pub fn tau_product(p: &PhasePoint, n: f64) -> f64 {
    p.x().iter().map(|x| n - x).product()
}

/// Indices of `v` sorted by value.
fn rank_order(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap_or(core::cmp::Ordering::Equal));
    idx
}

fn null_vector(m: &DMatrix<f64>) -> DVector<f64> {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    vt.row(imin).transpose()
}

/// `(v^T dA u)/(v^T u)` and the condition number `|u||v|/|v^T u|`.
fn eigenvalue_derivative(a: &DMatrix<f64>, lambda: f64, da: &DMatrix<f64>) -> (f64, f64) {
    let n = a.nrows();
    let shifted = a - DMatrix::<f64>::identity(n, n) * lambda;
    let u = null_vector(&shifted);
    let v = null_vector(&shifted.transpose());
    let vu = v.dot(&u);
    let condition = u.norm() * v.norm() / abs(vu);
    ((v.transpose() * da * &u)[(0, 0)] / vu, condition)
}

/// Relabels `next` so that each entry sits at the index of its nearest
/// unused neighbour in `previous` (greedy, smallest distances first).
pub fn match_roots(previous: &[f64], next: &[f64]) -> Vec<f64> {
    let n = previous.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, p) in previous.iter().enumerate() {
        for (j, q) in next.iter().enumerate() {
            pairs.push((abs(p - q), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
    let mut out = alloc::vec![f64::NAN; n];
    let mut used_prev = alloc::vec![false; n];
    let mut used_next = alloc::vec![false; n];
    for (_, i, j) in pairs {
        if !used_prev[i] && !used_next[j] {
            out[i] = next[j];
            used_prev[i] = true;
            used_next[j] = true;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::ln;
    use alloc::vec;

    fn scalar(y0: f64) -> TauData {
        TauData::from_matrices(DMatrix::from_element(1, 1, 0.0), DMatrix::from_element(1, 1, y0), 1e-6).unwrap()
    }

    #[test]
    fn a_matrix_scalar_examples() {
        let td = scalar(0.5);
        assert_eq!(td.a_matrix(&TimeVector::zero())[(0, 0)], 0.0);
        let t1 = TimeVector::single(1, 0.8).unwrap();
        assert!(abs(td.a_matrix(&t1)[(0, 0)] + 0.4) < 1e-15);
        let t2 = TimeVector::single(2, 0.8).unwrap();
        assert!(abs(td.a_matrix(&t2)[(0, 0)] - 0.4) < 1e-15);
    }

    #[test]
    fn tau_det_examples() {
        let td = scalar(0.5);
        assert_eq!(td.tau_det(3.0, &TimeVector::zero()), 3.0);
        assert!(abs(td.tau_det(0.0, &TimeVector::single(1, 1.0).unwrap()) - 0.5) < 1e-15);
        let p = PhasePoint::new(vec![0.0, 2.0], vec![0.0, 0.0]).unwrap();
        let td2 = TauData::from_phase(&p).unwrap();
        assert!(abs(td2.tau_det(1.0, &TimeVector::zero()) + 1.0) < 1e-14);
    }

    #[test]
    fn roots_and_products() {
        let td = scalar(0.5);
        let r = td.tau_roots(&TimeVector::single(1, 1.0).unwrap()).real().unwrap();
        assert!(abs(r[0] + 0.5) < 1e-15);
        let p = PhasePoint::new(vec![0.0], vec![0.0]).unwrap();
        assert_eq!(tau_product(&p, 5.0), 5.0);
        let p = PhasePoint::new(vec![0.0, 2.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(tau_product(&p, 1.0), -1.0);
        let td = TauData::from_phase(&p).unwrap();
        assert_eq!(td.tau_roots(&TimeVector::zero()).real().unwrap(), vec![0.0, 2.0]);
    }

    #[test]
    fn complex_spectrum_is_flagged() {
        let td = TauData::from_matrices(
            DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 0.0]),
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
            1e-6,
        )
        .unwrap();
        let roots = td.tau_roots(&TimeVector::single(1, 1.0).unwrap());
        assert!(matches!(roots.real(), Err(Error::ComplexRootsEncountered { .. })));
    }

    #[test]
    fn shifted_scalar_closed_form() {
        let td = scalar(0.5);
        let z = 3.0;
        let v = td.tau_shifted(2.0, &TimeVector::zero(), z, MiwaShift::Minus).unwrap();
        assert!(abs(v - (2.0 - 1.0 / (2.0 * z + 1.0))) < 1e-15);
        assert!(matches!(
            td.tau_shifted(2.0, &TimeVector::zero(), 0.4, MiwaShift::Minus),
            Err(Error::SpectralRadiusViolation { .. })
        ));
    }

    #[test]
    fn scalar_phase_recovery() {
        let p = scalar(0.5).phase_from_tau(&TimeVector::zero()).unwrap();
        assert_eq!(p.x(), &[0.0]);
        assert!(abs(p.y()[0] - ln(2.0)) < 1e-15);
    }

    #[test]
    fn greedy_matching() {
        assert_eq!(match_roots(&[0.0, 1.0, 5.0], &[5.1, -0.1, 1.2]), vec![-0.1, 1.2, 5.1]);
    }
}
