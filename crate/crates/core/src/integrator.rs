//! Adaptive Dormand-Prince 5(4) integration of the hierarchy flows.

use alloc::vec::Vec;
use core::fmt;

use crate::dynamics::{build_matrices, lax_m_matrix, newton_rhs, vector_field};
use crate::error::{invalid, Error, Result};
use crate::math::{abs, max_abs};
use crate::pdo::residuals::FdResidual;
use crate::phase::PhasePoint;
use crate::time::TimeVector;

/// Smallest admissible adaptive step.
pub const MIN_STEP: f64 = 1e-14;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub max_error_estimate: f64,
}

/// Samples of one flow, monotone in the flow time.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub flow_index: u32,
    pub samples: Vec<(f64, PhasePoint)>,
    pub step_stats: StepStats,
}

impl Trajectory {
    pub fn last(&self) -> &PhasePoint {
        // never empty: the initial point is always recorded.
        &self.samples[self.samples.len() - 1].1
    }
}

/// Integration failure carrying whatever was computed before it.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowError {
    pub cause: Error,
    pub partial: Trajectory,
}

impl fmt::Display for FlowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "flow t{} aborted after {} samples: {}",
            self.partial.flow_index,
            self.partial.samples.len(),
            self.cause
        )
    }
}

impl core::error::Error for FlowError {}

impl From<FlowError> for Error {
    fn from(e: FlowError) -> Self {
        e.cause
    }
}

// Dormand-Prince tableau (autonomous system, so the nodes are not needed)
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct FlowSystem<'a> {
    template: &'a PhasePoint,
    k: u32,
    n: usize,
}

impl FlowSystem<'_> {
    fn point(&self, s: &[f64], t: TimeVector) -> Result<PhasePoint> {
        self.template.moved(s[..self.n].to_vec(), s[self.n..].to_vec(), t)
    }

    fn rhs(&self, s: &[f64]) -> Result<Vec<f64>> {
        let p = self.point(s, TimeVector::zero())?;
        let v = vector_field(&p, self.k)?;
        let mut out = v.xdot;
        out.extend(v.ydot);
        Ok(out)
    }
}

fn state_of(p: &PhasePoint) -> Vec<f64> {
    let mut s = p.x().to_vec();
    s.extend_from_slice(p.y());
    s
}

/// Integrates flow `k` for `duration` (either sign) with local error
/// tolerance `tol` (mixed absolute/relative).
pub fn integrate_flow(p0: &PhasePoint, k: u32, duration: f64, tol: f64) -> core::result::Result<Trajectory, FlowError> {
    let mut traj = Trajectory {
        flow_index: k,
        samples: alloc::vec![(p0.t().get(k), p0.clone())],
        step_stats: StepStats::default(),
    };
    let fail = |cause: Error, traj: Trajectory| Err(FlowError { cause, partial: traj });
    if k == 0 {
        return fail(invalid("flow index must be at least 1"), traj);
    }
    if !(tol > 0.0) || !duration.is_finite() {
        return fail(invalid("tolerance must be positive and duration finite"), traj);
    }
    if duration == 0.0 {
        return Ok(traj);
    }
    let sys = FlowSystem {
        template: p0,
        k,
        n: p0.n_particles(),
    };
    let dir = if duration > 0.0 { 1.0 } else { -1.0 };
    let mut s = state_of(p0);
    let mut elapsed = 0.0;
    let mut k1 = match sys.rhs(&s) {
        Ok(v) => v,
        Err(e) => return fail(e, traj),
    };
    let speed = max_abs(k1.iter().copied()).max(1e-12);
    let mut h = (0.01 / speed).min(abs(duration)).max(MIN_STEP * 10.0);
    let dim = s.len();
    let mut stages: Vec<Vec<f64>> = alloc::vec![alloc::vec![0.0; dim]; 7];

    while abs(duration) - elapsed > 0.0 {
        if h < MIN_STEP {
            return fail(
                Error::StepSizeUnderflow {
                    time: p0.t().get(k) + dir * elapsed,
                    step: h,
                },
                traj,
            );
        }
        let last = h >= abs(duration) - elapsed;
        let step = if last { abs(duration) - elapsed } else { h };
        let hs = dir * step;
        stages[0].clone_from(&k1);
        let mut trial_error = None;
        for st in 1..7 {
            let arg: Vec<f64> = (0..dim)
                .map(|i| s[i] + hs * (0..st).map(|j| A[st][j] * stages[j][i]).sum::<f64>())
                .collect();
            match sys.rhs(&arg) {
                Ok(v) => stages[st] = v,
                Err(e) => {
                    trial_error = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = trial_error {
            // a trial stage crossed into a forbidden configuration
            return fail(e, traj);
        }
        let new: Vec<f64> = (0..dim)
            .map(|i| s[i] + hs * (0..7).map(|j| B5[j] * stages[j][i]).sum::<f64>())
            .collect();
        let err = (0..dim)
            .map(|i| {
                let e = hs * (0..7).map(|j| (B5[j] - B4[j]) * stages[j][i]).sum::<f64>();
                abs(e) / (tol * (1.0 + abs(s[i]).max(abs(new[i]))))
            })
            .fold(0.0, f64::max);
        if err <= 1.0 {
            let t_now = p0.t().advanced(k, dir * (elapsed + step));
            let p = match t_now.and_then(|t| sys.point(&new, t)) {
                Ok(p) => p,
                Err(e) => return fail(e, traj),
            };
            elapsed = if last { abs(duration) } else { elapsed + step };
            s = new;
            k1 = stages[6].clone();
            traj.step_stats.accepted += 1;
            traj.step_stats.max_error_estimate = traj.step_stats.max_error_estimate.max(err * tol);
            traj.samples.push((p.t().get(k), p));
        } else {
            traj.step_stats.rejected += 1;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * powf_fifth(1.0 / err)).clamp(0.2, 5.0)
        };
        if !last || err > 1.0 {
            h = step * factor;
        }
    }
    Ok(traj)
}

fn powf_fifth(v: f64) -> f64 {
    libm::pow(v, 0.2)
}

/// Order in which [`integrate_multi_ordered`] applies the flows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowOrder {
    Ascending,
    Descending,
}

/// Moves `p0` to the absolute multi-time `target`, one flow at a time in
/// ascending index order.
pub fn integrate_multi(p0: &PhasePoint, target: &TimeVector, tol: f64) -> Result<PhasePoint> {
    integrate_multi_ordered(p0, target, tol, FlowOrder::Ascending)
}

pub fn integrate_multi_ordered(p0: &PhasePoint, target: &TimeVector, tol: f64, order: FlowOrder) -> Result<PhasePoint> {
    let delta = target.difference(p0.t());
    let mut legs: Vec<(u32, f64)> = delta.iter().collect();
    if order == FlowOrder::Descending {
        legs.reverse();
    }
    let mut p = p0.clone();
    for (k, d) in legs {
        p = integrate_flow(&p, k, d, tol)?.last().clone();
    }
    // pin the time label exactly
    Ok(p.at_time(target.clone()))
}

/// State after flowing `p` for time `dt` along flow `k`.
pub fn flow_by(p: &PhasePoint, k: u32, dt: f64, tol: f64) -> Result<PhasePoint> {
    Ok(integrate_flow(p, k, dt, tol)?.last().clone())
}

/// Max-norm of the central-difference acceleration along the first flow minus
/// the closed-form second-order equation of motion.
pub fn newton_residual(p: &PhasePoint, h: f64, tol: f64) -> Result<FdResidual> {
    let plus = flow_by(p, 1, h, tol)?.first_flow_velocities();
    let minus = flow_by(p, 1, -h, tol)?.first_flow_velocities();
    let rhs = newton_rhs(p.x(), &p.first_flow_velocities());
    let fd: Vec<f64> = (0..rhs.len()).map(|i| (plus[i] - minus[i]) / (2.0 * h)).collect();
    let scale = max_abs(fd.iter().chain(&rhs).copied());
    Ok(FdResidual::new(max_abs(fd.iter().zip(&rhs).map(|(a, b)| a - b)), scale))
}

/// Max-norm of the central-difference `dY/dt_1 - [Y, M]`.
pub fn lax_pair_residual(p: &PhasePoint, h: f64, tol: f64) -> Result<FdResidual> {
    let yp = build_matrices(&flow_by(p, 1, h, tol)?)?.y;
    let ym = build_matrices(&flow_by(p, 1, -h, tol)?)?.y;
    let y = build_matrices(p)?.y;
    let m = lax_m_matrix(p)?;
    let fd = (yp - ym) / (2.0 * h);
    let bracket = &y * &m - &m * &y;
    let scale = max_abs(fd.iter().chain(bracket.iter()).copied());
    Ok(FdResidual::new(max_abs((fd - bracket).iter().copied()), scale))
}

/// Max-norm of `(Phi_k^h o Phi_m^h - Phi_m^h o Phi_k^h)(p0)`.
pub fn commutativity_defect(p0: &PhasePoint, k: u32, m: u32, h: f64, tol: f64) -> Result<f64> {
    if k == m {
        return Err(invalid("commutativity defect needs two distinct flows"));
    }
    let km = {
        let a = integrate_flow(p0, m, h, tol)?.last().clone();
        integrate_flow(&a, k, h, tol)?.last().clone()
    };
    let mk = {
        let a = integrate_flow(p0, k, h, tol)?.last().clone();
        integrate_flow(&a, m, h, tol)?.last().clone()
    };
    let dx = km.x().iter().zip(mk.x()).map(|(a, b)| a - b);
    let dy = km.y().iter().zip(mk.y()).map(|(a, b)| a - b);
    Ok(max_abs(dx.chain(dy)))
}
