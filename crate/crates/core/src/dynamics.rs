//! Matrices, Hamiltonians and vector fields of the rational
//! Ruijsenaars-Schneider hierarchy.
//!
//! Conventions: `c_i = e^{-y_i}`, `P_i = prod_{s != i} (x_i - x_s + 1)/(x_i - x_s)`,
//! and
//!
//! ```text
//! Y_ij = delta_ij + c_i P_i / (x_i - x_j - 1),      H_k = tr(Y^k).
//! ```
//!
//! The flow `t_k` moves `(x_i, y_i)` with velocity
//! `(-1)^k (dH_k/dy_i, -dH_k/dx_i)`.

use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::math::{abs, exp, ln};
use crate::phase::{check_gaps, PhasePoint};

/// `X = diag(x)`, `Y`, and optionally the Lax partner `M`.
#[derive(Clone, Debug, PartialEq)]
pub struct RsMatrices {
    pub x: DMatrix<f64>,
    pub y: DMatrix<f64>,
    pub m: Option<DMatrix<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianGradient {
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
}

/// Phase-space velocity of one hierarchy flow.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowVelocity {
    pub xdot: Vec<f64>,
    pub ydot: Vec<f64>,
}

/// Residuals of the algebraic identities satisfied by `(X, Y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructureReport {
    /// `sigma_2 / sigma_1` of `XY - YX + I - Y`.
    pub rank_one_residual: f64,
    /// `|det(I - Y) - e^{-sum y}| / e^{-sum y}`.
    pub cauchy_residual: f64,
    /// Max entry of `XY - YX - Y + I + diag(xdot) e e^t`.
    pub identity_residual: f64,
}

fn products(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&s| s != i)
                .map(|s| {
                    let d = x[i] - x[s];
                    (d + 1.0) / d
                })
                .product()
        })
        .collect()
}

/// `Y` from positions and weights `c_i = e^{-y_i}`. No gap checks.
pub fn rs_matrix(x: &[f64], c: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let p = products(x);
    DMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        delta + c[i] * p[i] / (x[i] - x[j] - 1.0)
    })
}

pub fn build_matrices(p: &PhasePoint) -> Result<RsMatrices> {
    check_gaps(p.x(), p.epsilon())?;
    Ok(RsMatrices {
        x: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(p.x())),
        y: rs_matrix(p.x(), &p.weights()),
        m: None,
    })
}

/// [`build_matrices`] with the Lax partner `M` filled in.
pub fn build_matrices_with_m(p: &PhasePoint) -> Result<RsMatrices> {
    let mut mats = build_matrices(p)?;
    mats.m = Some(lax_m_matrix(p)?);
    Ok(mats)
}

fn check_flow_index(k: u32) -> Result<()> {
    if k == 0 {
        Err(invalid("flow index must be at least 1"))
    } else {
        Ok(())
    }
}

/// `[I, Y, Y^2, ..., Y^k]`.
pub(crate) fn matrix_powers(y: &DMatrix<f64>, k: usize) -> Vec<DMatrix<f64>> {
    let n = y.nrows();
    let mut out = Vec::with_capacity(k + 1);
    out.push(DMatrix::identity(n, n));
    for j in 1..=k {
        let next = &out[j - 1] * y;
        out.push(next);
    }
    out
}

pub fn hamiltonian(p: &PhasePoint, k: u32) -> Result<f64> {
    check_flow_index(k)?;
    let y = build_matrices(p)?.y;
    Ok(matrix_powers(&y, k as usize)[k as usize].trace())
}

/// `[H_1, ..., H_kmax]`.
pub fn hamiltonians(p: &PhasePoint, kmax: u32) -> Result<Vec<f64>> {
    let y = build_matrices(p)?.y;
    let pw = matrix_powers(&y, kmax as usize);
    Ok(pw[1..].iter().map(|m| m.trace()).collect())
}

/// `dY/dx_m`, differentiated entrywise through the logarithmic derivative
/// of `c_i P_i / (x_i - x_j - 1)`.
pub fn y_derivative_x(x: &[f64], y_mat: &DMatrix<f64>, m: usize) -> DMatrix<f64> {
    let n = x.len();
    // d log P_i / d x_m
    let dlog_p: Vec<f64> = (0..n)
        .map(|i| {
            if i == m {
                (0..n)
                    .filter(|&s| s != i)
                    .map(|s| {
                        let d = x[i] - x[s];
                        1.0 / (d + 1.0) - 1.0 / d
                    })
                    .sum()
            } else {
                let d = x[i] - x[m];
                -1.0 / (d + 1.0) + 1.0 / d
            }
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| {
        let f = y_mat[(i, j)] - if i == j { 1.0 } else { 0.0 };
        let mut dlog = dlog_p[i];
        if i != j {
            let kron = (if m == i { 1.0 } else { 0.0 }) - (if m == j { 1.0 } else { 0.0 });
            dlog -= kron / (x[i] - x[j] - 1.0);
        }
        f * dlog
    })
}

/// `dY/dy_m = I_m - I_m Y`: only row `m` is nonzero.
pub fn y_derivative_y(y_mat: &DMatrix<f64>, m: usize) -> DMatrix<f64> {
    let n = y_mat.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        if i != m {
            0.0
        } else {
            (if i == j { 1.0 } else { 0.0 }) - y_mat[(i, j)]
        }
    })
}

pub fn grad_hamiltonian(p: &PhasePoint, k: u32) -> Result<HamiltonianGradient> {
    check_flow_index(k)?;
    let y = build_matrices(p)?.y;
    Ok(gradient_from(p.x(), &y, k))
}

fn gradient_from(x: &[f64], y: &DMatrix<f64>, k: u32) -> HamiltonianGradient {
    let n = x.len();
    let k_us = k as usize;
    let pw = matrix_powers(y, k_us);
    let prev = &pw[k_us - 1];
    let kf = k as f64;
    // tr((I_i - I_i Y) Y^{k-1}) = (Y^{k-1})_ii - (Y^k)_ii
    let dy = (0..n).map(|i| kf * (prev[(i, i)] - pw[k_us][(i, i)])).collect();
    let dx = (0..n)
        .map(|m| {
            let dym = y_derivative_x(x, y, m);
            // tr(A B) = sum_ij A_ij B_ji
            kf * dym.component_mul(&prev.transpose()).sum()
        })
        .collect();
    HamiltonianGradient { dx, dy }
}

fn sign(k: u32) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn vector_field(p: &PhasePoint, k: u32) -> Result<FlowVelocity> {
    let g = grad_hamiltonian(p, k)?;
    let s = sign(k);
    Ok(FlowVelocity {
        xdot: g.dy.iter().map(|v| s * v).collect(),
        ydot: g.dx.iter().map(|v| -s * v).collect(),
    })
}

/// First-flow velocities `Y_ii - 1`.
pub fn velocities(p: &PhasePoint) -> Result<Vec<f64>> {
    let y = build_matrices(p)?.y;
    Ok((0..p.n_particles()).map(|i| y[(i, i)] - 1.0).collect())
}

/// Inverts the rapidity relation: `e^{-y_i} = -xdot_i prod_{s != i} (x_i - x_s)/(x_i - x_s + 1)`.
pub fn rapidity_from_velocity(x: &[f64], xdot: &[f64], epsilon: f64) -> Result<Vec<f64>> {
    if x.len() != xdot.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: xdot.len(),
        });
    }
    check_gaps(x, epsilon)?;
    let p = products(x);
    x.iter()
        .enumerate()
        .map(|(i, _)| {
            let arg = -xdot[i] / p[i];
            if arg > 0.0 && arg.is_finite() {
                Ok(-ln(arg))
            } else {
                Err(Error::NonpositiveRapidityArgument { index: i, value: arg })
            }
        })
        .collect()
}

/// The matrix `M` with `dY/dt_1 = YM - MY`.
pub fn lax_m_matrix(p: &PhasePoint) -> Result<DMatrix<f64>> {
    let xdot = velocities(p)?;
    let x = p.x();
    let n = x.len();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        if i != j {
            -xdot[i] / (x[i] - x[j])
        } else {
            let mut acc = 0.0;
            for k in 0..n {
                acc += xdot[k] / (x[i] - x[k] + 1.0);
                if k != i {
                    acc -= xdot[k] / (x[i] - x[k]);
                }
            }
            acc
        }
    }))
}

pub fn structure_checks(p: &PhasePoint) -> Result<StructureReport> {
    let mats = build_matrices(p)?;
    let n = p.n_particles();
    let (x, y) = (&mats.x, &mats.y);
    let id = DMatrix::<f64>::identity(n, n);
    let commutator = x * y - y * x;
    let c = &commutator + &id - y;
    let rank_one_residual = rank_one_ratio(&c);

    let target = exp(-p.y().iter().sum::<f64>());
    let det = (&id - y).determinant();
    let cauchy_residual = abs(det - target) / target;

    let xdot: Vec<f64> = (0..n).map(|i| y[(i, i)] - 1.0).collect();
    let mut identity_residual: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let v = commutator[(i, j)] - y[(i, j)] + id[(i, j)] + xdot[i];
            identity_residual = identity_residual.max(abs(v));
        }
    }
    Ok(StructureReport {
        rank_one_residual,
        cauchy_residual,
        identity_residual,
    })
}

/// `sigma_2 / sigma_1`; zero for 1x1 or rank-zero input.
pub fn rank_one_ratio(c: &DMatrix<f64>) -> f64 {
    if c.nrows() < 2 {
        return 0.0;
    }
    let mut s: Vec<f64> = c.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    if s[0] == 0.0 {
        0.0
    } else {
        s[1] / s[0]
    }
}

/// `dY/dt_k` along the Hamiltonian vector field of flow `k` (chain rule).
pub fn y_rate(p: &PhasePoint, k: u32) -> Result<DMatrix<f64>> {
    let y = build_matrices(p)?.y;
    let v = vector_field(p, k)?;
    let n = p.n_particles();
    let mut rate = DMatrix::zeros(n, n);
    for m in 0..n {
        rate += y_derivative_x(p.x(), &y, m) * v.xdot[m];
        rate += y_derivative_y(&y, m) * v.ydot[m];
    }
    Ok(rate)
}

/// `d^2 x_i / dt_1^2` from the chain rule applied to `dx_i/dt_1 = Y_ii - 1`.
pub fn accelerations(p: &PhasePoint) -> Result<Vec<f64>> {
    let r = y_rate(p, 1)?;
    Ok((0..p.n_particles()).map(|i| r[(i, i)]).collect())
}

/// Right-hand side of the second-order equation of motion of the first flow,
/// `-2 xdot_i sum_{j != i} xdot_j / ((x_i - x_j)(x_i - x_j + 1)(x_i - x_j - 1))`.
pub fn newton_rhs(x: &[f64], xdot: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let s: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = x[i] - x[j];
                    xdot[j] / (d * (d + 1.0) * (d - 1.0))
                })
                .sum();
            -2.0 * xdot[i] * s
        })
        .collect()
}
