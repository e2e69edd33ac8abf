//! Finite-difference residuals of the time-dependent operator identities.
//!
//! States at `t +- h` come from the integrator; coefficients are sampled on a
//! lattice `theta + m`, `m` in `SAMPLE_LO..=SAMPLE_HI`, kept clear of poles.

use alloc::vec::Vec;

use super::coeff::{GridFn, Scalar};
use super::lax::{lax_operator, sample_offset, wave_operator_grid, Lattice};
use super::op::PseudoDiffOp;
use crate::dynamics::accelerations;
use crate::error::{invalid, Result};
use crate::integrator::flow_by;
use crate::math::abs;
use crate::phase::PhasePoint;

/// A finite-difference residual together with the magnitude of the terms it
/// balances, so that state-dependent scales can be divided out.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdResidual {
    pub absolute: f64,
    pub scale: f64,
}

impl FdResidual {
    pub fn new(absolute: f64, scale: f64) -> Self {
        Self { absolute, scale }
    }

    /// `absolute / max(1, scale)`.
    pub fn relative(&self) -> f64 {
        self.absolute / self.scale.max(1.0)
    }
}

pub const SAMPLE_LO: i64 = -5;
pub const SAMPLE_HI: i64 = 5;

/// Integrator tolerance used for the `t +- h` states.
pub const FD_FLOW_TOL: f64 = 1e-12;

/// Sampling lattice for `p` at truncation `k`.
pub fn sample_lattice(p: &PhasePoint, k: usize) -> Lattice {
    let theta = sample_offset(p.x());
    Lattice::for_truncation(theta, SAMPLE_LO, SAMPLE_HI, k)
}

type Op = PseudoDiffOp<GridFn>;

fn lax_on(p: &PhasePoint, k: usize, lattice: &Lattice) -> Result<Op> {
    lax_operator(&wave_operator_grid(p, k, lattice)?)
}

fn central(plus: &Op, minus: &Op, h: f64) -> Result<Op> {
    let s = Scalar::from_f64(0.5 / h).ok_or_else(|| invalid("step must be finite and nonzero"))?;
    Ok(plus.sub(minus).map_coeffs(|c| c.times_scalar(&s)))
}

/// Largest known coefficient magnitude over the sample indices.
pub fn sample_norm<S: Scalar>(op: &PseudoDiffOp<GridFn<S>>) -> Result<f64> {
    let mut m = 0.0f64;
    for (_, c) in op.terms() {
        m = m.max(c.max_abs_on(SAMPLE_LO, SAMPLE_HI)?);
    }
    Ok(m)
}

/// `d L / d t_i - [(L^i)_+, L]`, over every order that truncation `k` keeps.
pub fn lax_residual(p: &PhasePoint, i: u32, k: usize, h: f64) -> Result<FdResidual> {
    if i == 0 || i as usize >= k {
        return Err(invalid("flow index must satisfy 1 <= i < K"));
    }
    let lat = sample_lattice(p, k);
    let lp = lax_on(&flow_by(p, i, h, FD_FLOW_TOL)?, k, &lat)?;
    let lm = lax_on(&flow_by(p, i, -h, FD_FLOW_TOL)?, k, &lat)?;
    let l = lax_on(p, k, &lat)?;
    let depth = k as i32;
    let bracket = l.pow(i, depth).plus_part().commutator(&l, depth);
    let rate = central(&lp, &lm, h)?;
    let scale = sample_norm(&rate)?.max(sample_norm(&bracket)?);
    Ok(FdResidual::new(sample_norm(&rate.sub(&bracket))?, scale))
}

fn plus_power(p: &PhasePoint, power: u32, k: usize, lat: &Lattice) -> Result<Op> {
    Ok(lax_on(p, k, lat)?.pow(power, k as i32).plus_part())
}

/// `d(L^k)_+/dt_m - d(L^m)_+/dt_k - [(L^m)_+, (L^k)_+]`.
pub fn zs_residual(p: &PhasePoint, k_flow: u32, m_flow: u32, k: usize, h: f64) -> Result<FdResidual> {
    if k_flow == 0 || m_flow == 0 || k_flow.max(m_flow) as usize > k {
        return Err(invalid("flow indices must lie in 1..=K"));
    }
    let lat = sample_lattice(p, k);
    let dk = central(
        &plus_power(&flow_by(p, m_flow, h, FD_FLOW_TOL)?, k_flow, k, &lat)?,
        &plus_power(&flow_by(p, m_flow, -h, FD_FLOW_TOL)?, k_flow, k, &lat)?,
        h,
    )?;
    let dm = central(
        &plus_power(&flow_by(p, k_flow, h, FD_FLOW_TOL)?, m_flow, k, &lat)?,
        &plus_power(&flow_by(p, k_flow, -h, FD_FLOW_TOL)?, m_flow, k, &lat)?,
        h,
    )?;
    let bracket = plus_power(p, m_flow, k, &lat)?.commutator(&plus_power(p, k_flow, k, &lat)?, k as i32);
    let r = dk.sub(&dm).sub(&bracket);
    if !r.is_exact() {
        return Err(invalid("truncation too shallow for the requested flows"));
    }
    let scale = sample_norm(&dk)?.max(sample_norm(&dm)?).max(sample_norm(&bracket)?);
    Ok(FdResidual::new(sample_norm(&r)?, scale))
}

fn g(u: f64) -> f64 {
    1.0 / (u * (u + 1.0))
}

fn g_prime(u: f64) -> f64 {
    let d = u * (u + 1.0);
    -(2.0 * u + 1.0) / (d * d)
}

/// `a_0` from the closed form and its analytic first-flow derivative, at `n`.
pub fn a0_and_rate(p: &PhasePoint, n: f64) -> Result<(f64, f64)> {
    let v = p.first_flow_velocities();
    let acc = accelerations(p)?;
    let mut a0 = 0.0;
    let mut rate = 0.0;
    for ((xi, vi), ai) in p.x().iter().zip(&v).zip(&acc) {
        let u = n - xi;
        a0 += vi * g(u);
        rate += ai * g(u) - vi * vi * g_prime(u);
    }
    Ok((a0, rate))
}

fn sample_points(p: &PhasePoint) -> Vec<f64> {
    let theta = sample_offset(p.x());
    (SAMPLE_LO..=SAMPLE_HI).map(|m| theta + m as f64).collect()
}

/// Residual of the scalar equation for `a_0` obtained from the `(2, 1)`
/// zero-curvature condition:
/// `d_2 Delta a0 - d_1 (Delta a0^2 - 2 Delta a0) - d_1^2 (Delta a0 + 2 a0)`.
/// The second derivative is a central difference of the analytic first one.
pub fn eq27_residual(p: &PhasePoint, h: f64) -> Result<FdResidual> {
    let t2 = [flow_by(p, 2, h, FD_FLOW_TOL)?, flow_by(p, 2, -h, FD_FLOW_TOL)?];
    let t1 = [flow_by(p, 1, h, FD_FLOW_TOL)?, flow_by(p, 1, -h, FD_FLOW_TOL)?];
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for n in sample_points(p) {
        let diff = |q: &PhasePoint| -> Result<f64> { Ok(a0_and_rate(q, n + 1.0)?.0 - a0_and_rate(q, n)?.0) };
        let quad = |q: &PhasePoint| -> Result<f64> {
            let (a, b) = (a0_and_rate(q, n)?.0, a0_and_rate(q, n + 1.0)?.0);
            Ok(b * b - a * a - 2.0 * (b - a))
        };
        let curv = |q: &PhasePoint| -> Result<f64> {
            let (r0, r1) = (a0_and_rate(q, n)?.1, a0_and_rate(q, n + 1.0)?.1);
            Ok(r1 - r0 + 2.0 * r0)
        };
        let s = 0.5 / h;
        let terms = [
            (diff(&t2[0])? - diff(&t2[1])?) * s,
            (quad(&t1[0])? - quad(&t1[1])?) * s,
            (curv(&t1[0])? - curv(&t1[1])?) * s,
        ];
        worst = worst.max(abs(terms[0] - terms[1] - terms[2]));
        scale = terms.iter().fold(scale, |m, v| m.max(abs(*v)));
    }
    Ok(FdResidual::new(worst, scale))
}
