//! Wave and adjoint wave functions as Miwa-shifted tau quotients.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::math::{abs, exp};
use crate::pdo::lax::{lax_coefficients_at, sample_offset};
use crate::phase::PhasePoint;
use crate::tau::{MiwaShift, TauData};
use crate::time::TimeVector;

/// Relative size below which `tau(n; t)` counts as zero.
pub const TAU_ZERO_TOL: f64 = 1e-12;

/// Largest admissible condition number of `nI - A(t)` in series extraction.
pub const MAX_EXTRACTION_CONDITION: f64 = 1e10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WaveKind {
    Wave,
    Adjoint,
}

impl WaveKind {
    fn shift(self) -> MiwaShift {
        match self {
            WaveKind::Wave => MiwaShift::Minus,
            WaveKind::Adjoint => MiwaShift::Plus,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveSample {
    pub n: f64,
    pub z: f64,
    pub t: TimeVector,
    pub value: f64,
    pub kind: WaveKind,
}

/// `Exp(n; t, z) = (1 + z)^n exp(sum_i t_i z^i)`.
pub fn exp_factor(n: f64, t: &TimeVector, z: f64) -> f64 {
    let xi: f64 = t.iter().map(|(k, tk)| tk * crate::math::powi(z, k as i64)).sum();
    libm::pow(1.0 + z, n) * exp(xi)
}

fn checked_tau(td: &TauData, n: f64, t: &TimeVector) -> Result<f64> {
    let tau = td.tau_det(n, t);
    let scale = crate::math::powi(abs(n).max(1.0), td.n() as i64);
    if abs(tau) <= TAU_ZERO_TOL * scale {
        return Err(Error::TauZeroDenominator {
            n: n as i64,
            value: tau,
        });
    }
    Ok(tau)
}

/// Value at real lattice point `n`; the preconditions match [`wave_value`].
pub fn wave_value_at(td: &TauData, n: f64, t: &TimeVector, z: f64, kind: WaveKind) -> Result<WaveSample> {
    if 1.0 + z == 0.0 {
        return Err(invalid("1 + z must be nonzero"));
    }
    let num = td.tau_shifted(n, t, z, kind.shift())?;
    let tau = checked_tau(td, n, t)?;
    let e = exp_factor(n, t, z);
    let value = match kind {
        WaveKind::Wave => num / tau * e,
        WaveKind::Adjoint => num / tau / e,
    };
    Ok(WaveSample {
        n,
        z,
        t: t.clone(),
        value,
        kind,
    })
}

pub fn wave_value(td: &TauData, n: i64, t: &TimeVector, z: f64, kind: WaveKind) -> Result<WaveSample> {
    wave_value_at(td, n as f64, t, z, kind)
}

/// Power series in `s` truncated after degree `depth`, as matrix coefficients.
type MatSeries = Vec<DMatrix<f64>>;

fn series_mul(a: &MatSeries, b: &MatSeries, depth: usize) -> MatSeries {
    let dim = a[0].nrows();
    let mut out = alloc::vec![DMatrix::<f64>::zeros(dim, dim); depth + 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            if i + j <= depth {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

/// Coefficients `[1, c_1, ..., c_depth]` of `z^{-k}` in
/// `tau(n; t -/+ [1/z]) / tau(n; t)`.
///
/// With `s = 1/z` the quotient is `det(I -/+ sum_j s^j C_j)`,
/// `C_j = (nI - A)^{-1}(I - Y0)(-Y0)^{j-1}`, expanded through
/// `log det = tr log`.
pub fn wave_series_coeffs(td: &TauData, n: f64, t: &TimeVector, depth: usize, kind: WaveKind) -> Result<Vec<f64>> {
    checked_tau(td, n, t)?;
    let dim = td.n();
    let id = DMatrix::<f64>::identity(dim, dim);
    let m0 = &id * n - td.a_matrix(t);
    let sv = m0.clone().singular_values();
    let condition = sv.max() / sv.min();
    if !(condition <= MAX_EXTRACTION_CONDITION) {
        return Err(Error::IllConditionedExtraction { condition });
    }
    let inv = m0.try_inverse().ok_or(Error::IllConditionedExtraction { condition })?;
    let sign = match kind {
        WaveKind::Wave => 1.0,
        WaveKind::Adjoint => -1.0,
    };
    // c(s) with det(I - c(s)) the quotient
    let mut c: MatSeries = alloc::vec![DMatrix::zeros(dim, dim); depth + 1];
    let base = &inv * (&id - td.y0());
    let minus_y = -td.y0();
    let mut pw = id.clone();
    for cj in c.iter_mut().skip(1) {
        *cj = &base * &pw * sign;
        pw = &pw * &minus_y;
    }
    // g(s) = log det(I - c) = -sum_m tr(c^m) / m
    let mut g = alloc::vec![0.0; depth + 1];
    let mut power = c.clone();
    for m in 1..=depth {
        for (k, gk) in g.iter_mut().enumerate() {
            *gk -= power[k].trace() / m as f64;
        }
        power = series_mul(&power, &c, depth);
    }
    let mut f = alloc::vec![0.0; depth + 1];
    f[0] = 1.0;
    for k in 1..=depth {
        let mut acc = 0.0;
        for i in 1..=k {
            acc += i as f64 * g[i] * f[k - i];
        }
        f[k] = acc / k as f64;
    }
    Ok(f)
}

/// Number of terms kept in each backward sum `Delta^{-1} f(n) = sum_{m>=1} f(n-m)`.
pub fn backward_sum_length(z: f64) -> i64 {
    let decay = libm::log(abs(1.0 + z));
    (crate::math::ceil(40.0 * core::f64::consts::LN_10 / decay) as i64).clamp(20, 400)
}

/// Lattice window for the eigen relation: five points starting `k + 5` to the
/// right of the rightmost particle, where the coefficients of `L` are small.
pub fn default_eigen_window(p: &PhasePoint, k: usize) -> (i64, i64) {
    let right = p.x().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let start = crate::math::ceil(right) as i64 + k as i64 + 5;
    (start, start + 4)
}

/// `max_n |(L w)(n) - z w(n)| / |z w(n)|` over `n = theta + m`, `m` in
/// `window`, with `L` truncated at order `K` built from `p` and `w` from `td`
/// at `p`'s time. Negative powers of `Delta` act as backward sums.
pub fn eigen_residual(p: &PhasePoint, td: &TauData, z: f64, k: usize, window: (i64, i64)) -> Result<f64> {
    let rho = td.spectral_radius();
    if !(abs(z) > rho) || !(abs(1.0 + z) > 1.0) {
        return Err(Error::SpectralRadiusViolation { z, radius: rho });
    }
    if window.0 > window.1 {
        return Err(invalid("empty window"));
    }
    let theta = sample_offset(p.x());
    let tail = backward_sum_length(z);
    let lo = window.0 - tail;
    let hi = window.1 + 1;
    let t = p.t();
    let mut w = Vec::with_capacity((hi - lo + 1) as usize);
    for m in lo..=hi {
        w.push(wave_value_at(td, theta + m as f64, t, z, WaveKind::Wave)?.value);
    }
    let idx = |m: i64| (m - lo) as usize;
    // sums[j][i] approximates (Delta^{-j} w)(lo + i)
    let mut sums: Vec<Vec<f64>> = alloc::vec![w.clone()];
    for _ in 1..k {
        let prev = sums.last().expect("nonempty");
        let mut next = alloc::vec![0.0; prev.len()];
        for i in 1..prev.len() {
            next[i] = next[i - 1] + prev[i - 1];
        }
        sums.push(next);
    }
    let mut worst = 0.0f64;
    for m in window.0..=window.1 {
        let mut lw = 0.0;
        for (j, a) in lax_coefficients_at(p, k, theta + m as f64)? {
            let term = match j {
                1 => w[idx(m + 1)] - w[idx(m)],
                0 => w[idx(m)],
                j => sums[(-j) as usize][idx(m)],
            };
            lw += a * term;
        }
        let zw = z * w[idx(m)];
        worst = worst.max(abs(lw - zw) / abs(zw));
    }
    Ok(worst)
}

/// Central difference in `t_1` of the (adjoint) wave function minus
/// `(Delta + a_0(n)) w` or `(nabla - a_0(n-1)) w*`, relative to `|z w|`.
pub fn t1_flow_residual(td: &TauData, n: i64, t: &TimeVector, z: f64, h: f64, kind: WaveKind) -> Result<f64> {
    let value = |m: i64, tt: &TimeVector| -> Result<f64> { Ok(wave_value(td, m, tt, z, kind)?.value) };
    let w0 = value(n, t)?;
    let fd = (value(n, &t.advanced(1, h)?)? - value(n, &t.advanced(1, -h)?)?) / (2.0 * h);
    let p = td.phase_from_tau(t)?;
    let a0 = |m: f64| -> f64 {
        p.x()
            .iter()
            .zip(p.first_flow_velocities())
            .map(|(xi, vi)| vi / ((m - xi) * (m + 1.0 - xi)))
            .sum()
    };
    let rhs = match kind {
        WaveKind::Wave => value(n + 1, t)? - w0 + a0(n as f64) * w0,
        WaveKind::Adjoint => w0 - value(n - 1, t)? - a0((n - 1) as f64) * w0,
    };
    Ok(abs(fd - rhs) / abs(z * w0))
}

/// `w_k(n)` from the residue vectors at `p`, sampled at real `n`.
pub fn partial_fraction_coeffs(p: &PhasePoint, n: f64, depth: usize, kind: WaveKind) -> Result<Vec<f64>> {
    let y = crate::dynamics::build_matrices(p)?.y;
    let v = p.first_flow_velocities();
    let dim = v.len();
    let mut out = alloc::vec![1.0];
    match kind {
        WaveKind::Wave => {
            let mut cur = nalgebra::DVector::from_vec(v.clone());
            for _ in 0..depth {
                out.push((0..dim).map(|i| cur[i] / (n - p.x()[i])).sum());
                cur = -(&y * &cur);
            }
        }
        WaveKind::Adjoint => {
            let yt = -y.transpose();
            let mut cur = nalgebra::DVector::from_element(dim, 1.0);
            for _ in 0..depth {
                out.push((0..dim).map(|i| -v[i] * cur[i] / (n - p.x()[i])).sum());
                cur = &yt * &cur;
            }
        }
    }
    Ok(out)
}
