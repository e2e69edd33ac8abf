//! The verification catalogue behind `rskp verify`.
//!
//! Every check produces one or more [`Record`]s. Residuals are relative to
//! the size of the terms they balance unless the identity text says
//! otherwise. Decay records hold the ratio of a residual at step `5h` to the
//! one at `10h`; a second-order identity gives about `1/4`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rskp_core::dynamics::{
    grad_hamiltonian, hamiltonian, hamiltonians, rapidity_from_velocity, structure_checks, vector_field,
};
use rskp_core::integrator::{
    commutativity_defect, integrate_flow, integrate_multi, lax_pair_residual, newton_residual,
};
use rskp_core::pdo::coeff::Coefficient;
use rskp_core::pdo::lax::{
    a0_grid, bracket_factor_complete, l2_plus_complete, lax_operator, sample_offset, times_delta_plus_one,
    wave_operator_grid,
};
use rskp_core::pdo::residuals::{
    eq27_residual, lax_residual, sample_lattice, sample_norm, zs_residual, FdResidual, FD_FLOW_TOL, SAMPLE_HI,
    SAMPLE_LO,
};
use rskp_core::tau::{match_roots, tau_product, TauData};
use rskp_core::wave::{
    default_eigen_window, eigen_residual, partial_fraction_coeffs, t1_flow_residual, wave_series_coeffs, WaveKind,
};
use rskp_core::{PhasePoint, TimeVector};
use serde::Serialize;

use crate::cli::Suite;
use crate::error::{from_dynamics, is_collision, CliError, Result};

pub const STRUCTURE_TOL: f64 = 1e-10;
pub const GRADIENT_TOL: f64 = 1e-6;
pub const GRADIENT_STEP: f64 = 1e-5;
pub const CONSERVATION_TOL: f64 = 1e-8;
pub const CONSERVATION_SPAN: f64 = 0.05;
pub const COMMUTATIVITY_TOL: f64 = 1e-8;
pub const COMMUTATIVITY_STEP: f64 = 0.01;
pub const FD_TOL: f64 = 1e-5;
pub const DECAY_TOL: f64 = 1.0 / 3.5;
pub const DECAY_FLOOR: f64 = 1e-11;
pub const EQUIVALENCE_TOL: f64 = 1e-6;
pub const TIME_SPAN: f64 = 0.05;
pub const OPERATOR_TOL: f64 = 1e-10;
pub const SERIES_TOL: f64 = 1e-8;
pub const SERIES_DEPTH: usize = 6;
pub const EIGEN_TOL: f64 = 1e-3;
pub const EIGEN_DECAY_TOL: f64 = 1e-2;
pub const EIGEN_EXTRA_ORDERS: usize = 4;

/// Tolerances by name, echoed in reports.
pub fn tolerances() -> BTreeMap<&'static str, f64> {
    BTreeMap::from([
        ("structure", STRUCTURE_TOL),
        ("gradient", GRADIENT_TOL),
        ("gradient_step", GRADIENT_STEP),
        ("conservation", CONSERVATION_TOL),
        ("conservation_span", CONSERVATION_SPAN),
        ("commutativity", COMMUTATIVITY_TOL),
        ("commutativity_step", COMMUTATIVITY_STEP),
        ("finite_difference", FD_TOL),
        ("decay_ratio", DECAY_TOL),
        ("decay_floor", DECAY_FLOOR),
        ("tau_equivalence", EQUIVALENCE_TOL),
        ("tau_time_span", TIME_SPAN),
        ("operator", OPERATOR_TOL),
        ("series", SERIES_TOL),
        ("eigen", EIGEN_TOL),
        ("eigen_decay", EIGEN_DECAY_TOL),
        ("fd_flow_tol", FD_FLOW_TOL),
        ("flow_point_clearance", FLOW_POINT_CLEARANCE),
    ])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    /// The identity being checked, in words and symbols.
    pub identity: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn record(name: impl Into<String>, identity: impl Into<String>, residual: f64, tolerance: f64) -> Record {
    Record {
        name: name.into(),
        identity: identity.into(),
        residual,
        tolerance,
        pass: residual <= tolerance,
    }
}

/// A record for a check that could not be evaluated; it fails.
fn failed(name: impl Into<String>, identity: impl Into<String>, why: &str, tolerance: f64) -> Record {
    record(
        name,
        format!("{} [not evaluated: {why}]", identity.into()),
        f64::INFINITY,
        tolerance,
    )
}

/// Inputs shared by all checks.
pub struct Context {
    /// State with its multi-time reset to zero: `tau` is frozen here.
    pub phase: PhasePoint,
    pub tau: TauData,
    pub k: usize,
    pub h: f64,
    pub tol: f64,
    pub seed: u64,
}

impl Context {
    pub fn new(phase: &PhasePoint, tau: TauData, k: usize, h: f64, tol: f64, seed: u64) -> Result<Self> {
        if k < 3 {
            return Err(CliError::input("--K must be at least 3"));
        }
        if !(h > 0.0 && h < 0.01) {
            return Err(CliError::input("--h must lie in (0, 0.01)"));
        }
        if !(tol > 0.0) {
            return Err(CliError::input("--tol must be positive"));
        }
        Ok(Self {
            phase: phase.at_time(TimeVector::zero()),
            tau,
            k,
            h,
            tol,
            seed,
        })
    }
}

/// Runs `suite`, sorted by record name. Collisions abort the whole run.
pub fn run(suite: Suite, ctx: &Context) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Structure {
        out.extend(structure(ctx)?);
    }
    if all || suite == Suite::Hamiltonian {
        out.extend(hamiltonian_checks(ctx)?);
    }
    if all || suite == Suite::Tau {
        out.extend(tau_checks(ctx)?);
    }
    if all || suite == Suite::Lax {
        out.extend(lax_checks(ctx)?);
    }
    if all || suite == Suite::Zs {
        out.extend(zs_checks(ctx)?);
    }
    if all || suite == Suite::Wave {
        out.extend(wave_checks(ctx)?);
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

/// Evaluates a core computation; collisions abort, other errors become a failed record.
fn attempt<T>(r: rskp_core::Result<T>) -> Result<std::result::Result<T, String>> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(e) if is_collision(&e) => Err(from_dynamics(e)),
        Err(e) => Ok(Err(e.to_string())),
    }
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    max_abs(a.iter().zip(b).map(|(p, q)| p - q))
}

fn structure(ctx: &Context) -> Result<Vec<Record>> {
    let p = &ctx.phase;
    let mut out = vec![record(
        "structure_rank_one",
        "X0 Y0 - Y0 X0 + I - Y0 has rank one (sigma_2/sigma_1 of the frozen matrices)",
        ctx.tau.rank_one_residual(),
        STRUCTURE_TOL,
    )];
    match attempt(structure_checks(p))? {
        Ok(s) => {
            out.push(record(
                "structure_cauchy_determinant",
                "det(I - Y) = exp(-sum y_i), relative",
                s.cauchy_residual,
                STRUCTURE_TOL,
            ));
            out.push(record(
                "structure_commutator",
                "XY - YX - Y + I + diag(xdot) e e^t = 0, max entry",
                s.identity_residual,
                STRUCTURE_TOL,
            ));
        }
        Err(why) => out.push(failed(
            "structure_cauchy_determinant",
            "det(I - Y) = exp(-sum y_i)",
            &why,
            STRUCTURE_TOL,
        )),
    }
    let name = "structure_rapidity_relation";
    let identity = "exp(-y_i) = -xdot_i prod_{s != i} (x_i - x_s)/(x_i - x_s + 1), max |y - y(x, xdot)|";
    out.push(
        match attempt(rapidity_from_velocity(p.x(), &p.first_flow_velocities(), p.epsilon()))? {
            Ok(y) => record(name, identity, max_diff(&y, p.y()), STRUCTURE_TOL),
            Err(why) => failed(name, identity, &why, STRUCTURE_TOL),
        },
    );
    Ok(out)
}

/// Central difference of `H_k` against its analytic gradient.
fn gradient_error(p: &PhasePoint, k: u32) -> rskp_core::Result<f64> {
    let g = grad_hamiltonian(p, k)?;
    let n = p.n_particles();
    let h = GRADIENT_STEP;
    let mut worst = 0.0f64;
    for m in 0..2 * n {
        let shifted = |s: f64| -> rskp_core::Result<f64> {
            let (mut x, mut y) = (p.x().to_vec(), p.y().to_vec());
            if m < n {
                x[m] += s;
            } else {
                y[m - n] += s;
            }
            hamiltonian(&PhasePoint::with_time(x, y, p.t().clone(), p.epsilon())?, k)
        };
        let fd = (shifted(h)? - shifted(-h)?) / (2.0 * h);
        let exact = if m < n { g.dx[m] } else { g.dy[m - n] };
        worst = worst.max((fd - exact).abs() / exact.abs().max(1.0));
    }
    Ok(worst)
}

/// `base` divided by the largest particle speed of flow `k` (at least 1), so
/// that fast states are followed over a comparable distance in `x`.
pub fn scaled_span(p: &PhasePoint, k: u32, base: f64) -> Result<f64> {
    let v = vector_field(p, k).map_err(from_dynamics)?.xdot;
    Ok(base / max_abs(v).max(1.0))
}

/// Largest relative change of `H_1..H_4` over the samples of a flow.
fn conservation_drift(p: &PhasePoint, k: u32, tol: f64) -> Result<f64> {
    let h0 = hamiltonians(p, 4).map_err(from_dynamics)?;
    let traj = integrate_flow(p, k, scaled_span(p, k, CONSERVATION_SPAN)?, tol)?;
    let mut worst = 0.0f64;
    for (_, q) in &traj.samples {
        let hq = hamiltonians(q, 4).map_err(from_dynamics)?;
        for (a, b) in h0.iter().zip(&hq) {
            worst = worst.max((a - b).abs() / a.abs().max(1.0));
        }
    }
    Ok(worst)
}

fn decay(name: &str, identity: &str, coarse: f64, fine: f64) -> Record {
    let ratio = if coarse < DECAY_FLOOR { 0.0 } else { fine / coarse };
    record(
        format!("{name}_decay"),
        format!("{identity}: residual ratio for step 10h -> 5h (0 below {DECAY_FLOOR:e})"),
        ratio,
        DECAY_TOL,
    )
}

/// A finite-difference residual at `h` plus its decay record.
fn fd_pair(
    name: &str,
    identity: &str,
    h: f64,
    f: impl Fn(f64) -> rskp_core::Result<FdResidual>,
) -> Result<Vec<Record>> {
    let rel = |step: f64| -> Result<std::result::Result<f64, String>> { Ok(attempt(f(step))?.map(|r| r.relative())) };
    let at_h = rel(h)?;
    let coarse = rel(10.0 * h)?;
    let fine = rel(5.0 * h)?;
    let mut out = Vec::new();
    out.push(match at_h {
        Ok(r) => record(name, identity, r, FD_TOL),
        Err(why) => failed(name, identity, &why, FD_TOL),
    });
    out.push(match (coarse, fine) {
        (Ok(c), Ok(f)) => decay(name, identity, c, f),
        (Err(why), _) | (_, Err(why)) => failed(format!("{name}_decay"), identity, &why, DECAY_TOL),
    });
    Ok(out)
}

fn hamiltonian_checks(ctx: &Context) -> Result<Vec<Record>> {
    let p = &ctx.phase;
    let mut out = Vec::new();
    for k in 1..=4u32 {
        let name = format!("hamiltonian_gradient_t{k}");
        let identity = format!("dH_{k}/d(x, y) against a central difference with step {GRADIENT_STEP:e}");
        out.push(match attempt(gradient_error(p, k))? {
            Ok(e) => record(name, identity, e, GRADIENT_TOL),
            Err(why) => failed(name, identity, &why, GRADIENT_TOL),
        });
        out.push(record(
            format!("hamiltonian_conservation_t{k}"),
            format!("H_1..H_4 constant along t_{k} over {CONSERVATION_SPAN}/max(1, max|dx/dt_{k}|), relative drift"),
            conservation_drift(p, k, ctx.tol)?,
            CONSERVATION_TOL,
        ));
    }
    for (k, m) in [(1, 2), (1, 3), (2, 3)] {
        let name = format!("hamiltonian_commutativity_t{k}_t{m}");
        let identity = format!("flows t_{k} and t_{m} commute");
        let step = scaled_span(p, k, COMMUTATIVITY_STEP)?.min(scaled_span(p, m, COMMUTATIVITY_STEP)?);
        let d = |h: f64| commutativity_defect(p, k, m, h, FD_FLOW_TOL).map_err(from_dynamics);
        let (coarse, fine) = (d(step)?, d(step / 2.0)?);
        out.push(record(
            &name,
            format!("{identity} at step {COMMUTATIVITY_STEP}/max(1, top speed of either flow) = {step:.3e}"),
            coarse,
            COMMUTATIVITY_TOL,
        ));
        let ratio = if coarse < 1e-12 { 0.0 } else { fine / coarse };
        out.push(record(
            format!("{name}_decay"),
            format!("{identity}: defect ratio for step h -> h/2 (0 below 1e-12)"),
            ratio,
            DECAY_TOL,
        ));
    }
    out.extend(fd_pair(
        "hamiltonian_newton_equation",
        "d^2x_i/dt_1^2 = -2 xdot_i sum_j xdot_j / ((x_i-x_j)(x_i-x_j+1)(x_i-x_j-1))",
        ctx.h,
        |h| newton_residual(p, h, FD_FLOW_TOL),
    )?);
    for k in 1..=4u32 {
        let name = format!("hamiltonian_trace_formula_t{k}");
        let identity =
            format!("dx_i/dt_{k} = {k}(-1)^{k} tr((I_i - I_i Y) Y^{}), against the moving roots of tau, step h/max(1, top speed)", k - 1);
        out.push(match attempt(root_rate_error(ctx, k))? {
            Ok(e) => record(name, identity, e, FD_TOL),
            Err(why) => failed(name, identity, &why, FD_TOL),
        });
    }
    Ok(out)
}

/// Central difference of the roots of `tau` along `t_k` against the flow's velocity.
fn root_rate_error(ctx: &Context, k: u32) -> rskp_core::Result<f64> {
    let p = &ctx.phase;
    let roots = |s: f64| -> rskp_core::Result<Vec<f64>> {
        Ok(match_roots(
            p.x(),
            &ctx.tau.tau_roots(&TimeVector::single(k, s)?).real()?,
        ))
    };
    let v = vector_field(p, k)?.xdot;
    // same displacement in x for every flow
    let h = ctx.h / max_abs(v.iter().copied()).max(1.0);
    let (plus, minus) = (roots(h)?, roots(-h)?);
    let fd: Vec<f64> = plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * h)).collect();
    Ok(max_diff(&fd, &v) / max_abs(v.iter().copied()).max(1.0))
}

/// Seeded multi-time with `|t_k| <= TIME_SPAN / (3 max(1, max|dx/dt_k|))`, `k <= 3`.
fn seeded_time(p: &PhasePoint, seed: u64) -> Result<TimeVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for k in 1..=3 {
        let u: f64 = rng.gen_range(-1.0..=1.0);
        pairs.push((k, u * scaled_span(p, k, TIME_SPAN / 3.0)?));
    }
    Ok(TimeVector::from_pairs(pairs).expect("finite entries with positive indices"))
}

fn tau_checks(ctx: &Context) -> Result<Vec<Record>> {
    let p = &ctx.phase;
    let td = &ctx.tau;
    let zero = TimeVector::zero();
    let mut out = Vec::new();

    let theta = 0.5;
    let points: Vec<f64> = (SAMPLE_LO..=SAMPLE_HI).map(|m| m as f64 + theta).collect();
    let det_err = points
        .iter()
        .map(|&n| {
            let prod = tau_product(p, n);
            (td.tau_det(n, &zero) - prod).abs() / prod.abs().max(1.0)
        })
        .fold(0.0, f64::max);
    out.push(record(
        "tau_determinant_product",
        "det(nI - X) = prod_i (n - x_i) at t = 0, relative",
        det_err,
        STRUCTURE_TOL,
    ));

    let t = seeded_time(p, ctx.seed)?;
    let moved = integrate_multi(p, &t, ctx.tol).map_err(from_dynamics)?;
    let name = "tau_root_flow_equivalence";
    let identity = format!("roots of det(nI - A(t)) equal the integrated positions at t = ({t})");
    out.push(match attempt(td.tau_roots(&t).real())? {
        Ok(roots) => record(
            name,
            identity,
            max_diff(&match_roots(moved.x(), &roots), moved.x()),
            EQUIVALENCE_TOL,
        ),
        Err(why) => failed(name, identity, &why, EQUIVALENCE_TOL),
    });
    let name = "tau_rapidity_recovery";
    let identity = format!("rapidities recovered from the moving roots equal the integrated ones at t = ({t})");
    out.push(match attempt(td.phase_from_tau(&t))? {
        Ok(q) => record(name, identity, max_diff(q.y(), moved.y()), EQUIVALENCE_TOL),
        Err(why) => failed(name, identity, &why, EQUIVALENCE_TOL),
    });

    let name = "tau_round_trip";
    let identity = "state -> tau data -> state at t = 0, max difference in x and y";
    out.push(match attempt(td.phase_from_tau(&zero))? {
        Ok(q) => record(
            name,
            identity,
            max_diff(q.x(), p.x()).max(max_diff(q.y(), p.y())),
            EQUIVALENCE_TOL,
        ),
        Err(why) => failed(name, identity, &why, EQUIVALENCE_TOL),
    });

    let v = p.first_flow_velocities();
    let h = ctx.h;
    let mut worst = 0.0f64;
    for &n in &points {
        let exact: f64 = -(0..v.len())
            .map(|i| v[i] * (0..v.len()).filter(|&s| s != i).map(|s| n - p.x()[s]).product::<f64>())
            .sum::<f64>();
        let plus = td.tau_det(n, &TimeVector::single(1, h).map_err(from_dynamics)?);
        let minus = td.tau_det(n, &TimeVector::single(1, -h).map_err(from_dynamics)?);
        worst = worst.max(((plus - minus) / (2.0 * h) - exact).abs() / exact.abs().max(1.0));
    }
    out.push(record(
        "tau_first_order_expansion",
        "d tau(n; t)/dt_1 at 0 = -sum_i xdot_i prod_{s != i}(n - x_s), central difference",
        worst,
        FD_TOL,
    ));
    Ok(out)
}

fn lax_checks(ctx: &Context) -> Result<Vec<Record>> {
    let p = &ctx.phase;
    let mut out = Vec::new();
    for i in 1..=2u32 {
        out.extend(fd_pair(
            &format!("lax_equation_t{i}"),
            &format!("dL/dt_{i} = [(L^{i})_+, L] through order -{}", ctx.k - 1),
            ctx.h,
            |h| lax_residual(p, i, ctx.k, h),
        )?);
    }
    out.extend(fd_pair("lax_matrix_pair", "dY/dt_1 = [Y, M]", ctx.h, |h| {
        lax_pair_residual(p, h, FD_FLOW_TOL)
    })?);
    Ok(out)
}

/// Coefficient identities of `L` sampled on the lattice: the closed form for
/// `a_0`, the two-flow plus part, and its bracket with `(L)_+`.
fn operator_records(ctx: &Context) -> rskp_core::Result<[f64; 3]> {
    let p = &ctx.phase;
    let depth = ctx.k as i32;
    let lat = sample_lattice(p, ctx.k);
    let l = lax_operator(&wave_operator_grid(p, ctx.k, &lat)?)?;
    let (a0, a1) = (l.coeff(0)?, l.coeff(-1)?);
    let closed = a0_grid(p.x(), &p.first_flow_velocities(), &lat);
    let a0_err =
        a0.minus(&closed).max_abs_on(SAMPLE_LO, SAMPLE_HI)? / closed.max_abs_on(SAMPLE_LO, SAMPLE_HI)?.max(1.0);
    let l2 = l.pow(2, depth).plus_part();
    let plus_err = sample_norm(&l2.sub(&l2_plus_complete(&a0, &a1)))? / sample_norm(&l2)?.max(1.0);
    let bracket = l2.commutator(&l.plus_part(), depth);
    let factored = times_delta_plus_one(&bracket_factor_complete(&a1));
    let bracket_err = sample_norm(&bracket.sub(&factored))? / sample_norm(&bracket)?.max(1.0);
    Ok([a0_err, plus_err, bracket_err])
}

fn zs_checks(ctx: &Context) -> Result<Vec<Record>> {
    let p = &ctx.phase;
    let mut out = fd_pair(
        "zs_zero_curvature_t1_t2",
        "d(L)_+/dt_2 - d(L^2)_+/dt_1 = [(L^2)_+, (L)_+]",
        ctx.h,
        |h| zs_residual(p, 1, 2, ctx.k, h),
    )?;
    out.extend(fd_pair(
        "zs_a0_scalar_equation",
        "d_2 Delta a0 = d_1 (Delta a0^2 - 2 Delta a0) + d_1^2 (Delta a0 + 2 a0)",
        ctx.h,
        |h| eq27_residual(p, h),
    )?);
    let ids = [
        (
            "zs_a0_closed_form",
            "a0(n) = sum_i xdot_i / ((n - x_i)(n + 1 - x_i)) is the Delta^0 coefficient of L",
        ),
        (
            "zs_two_flow_plus_part",
            "(L^2)_+ = Delta^2 + (a0 + a0(n+1)) Delta + Delta a0 + a0^2 + a1 + a1(n+1)",
        ),
        (
            "zs_bracket_factor",
            "[(L^2)_+, (L)_+] = (Delta + 1) times -Delta(a1 + a1(n+1))",
        ),
    ];
    match attempt(operator_records(ctx))? {
        Ok(values) => {
            for ((name, identity), v) in ids.iter().zip(values) {
                out.push(record(*name, *identity, v, OPERATOR_TOL));
            }
        }
        Err(why) => out.extend(
            ids.iter()
                .map(|(name, identity)| failed(*name, *identity, &why, OPERATOR_TOL)),
        ),
    }
    Ok(out)
}

fn kind_label(kind: WaveKind) -> &'static str {
    match kind {
        WaveKind::Wave => "wave",
        WaveKind::Adjoint => "adjoint",
    }
}

/// Series of the tau quotient against the residue-vector coefficients.
fn series_error(ctx: &Context, kind: WaveKind) -> rskp_core::Result<f64> {
    let p = &ctx.phase;
    let theta = sample_offset(p.x());
    let mut worst = 0.0f64;
    for m in -3..=3 {
        let n = theta + m as f64;
        let a = wave_series_coeffs(&ctx.tau, n, &TimeVector::zero(), SERIES_DEPTH, kind)?;
        let b = partial_fraction_coeffs(p, n, SERIES_DEPTH, kind)?;
        worst = worst.max(max_diff(&a, &b) / max_abs(b.iter().copied()).max(1.0));
    }
    Ok(worst)
}

/// Spectral parameter for the wave checks, safely outside the spectral radius.
pub fn wave_z(tau: &TauData) -> f64 {
    1.5 * tau.spectral_radius() + 2.0
}

/// Integer points kept at least this far from every particle, so that the
/// difference quotient in `t_1` does not have to resolve a nearby moving pole.
pub const FLOW_POINT_CLEARANCE: f64 = 0.5;

/// Largest first-flow residual over the admissible integer points.
fn flow_error(ctx: &Context, kind: WaveKind, h: f64) -> rskp_core::Result<FdResidual> {
    let z = wave_z(&ctx.tau);
    let x = ctx.phase.x();
    let points: Vec<i64> = (SAMPLE_LO..=SAMPLE_HI)
        .filter(|&n| x.iter().all(|xi| (n as f64 - xi).abs() >= FLOW_POINT_CLEARANCE))
        .collect();
    if points.is_empty() {
        return Err(rskp_core::Error::InvalidArgument(
            "no sample point is clear of the particles".into(),
        ));
    }
    let mut worst = 0.0f64;
    let mut used = 0;
    for n in points {
        // the stencil's neighbours may still sit on a root
        match t1_flow_residual(&ctx.tau, n, &TimeVector::zero(), z, h, kind) {
            Ok(r) => {
                worst = worst.max(r);
                used += 1;
            }
            Err(rskp_core::Error::TauZeroDenominator { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    if used == 0 {
        return Err(rskp_core::Error::InvalidArgument(
            "tau vanishes at every admissible point".into(),
        ));
    }
    Ok(FdResidual::new(worst, 0.0))
}

fn wave_checks(ctx: &Context) -> Result<Vec<Record>> {
    let p = &ctx.phase;
    let mut out = Vec::new();
    for kind in [WaveKind::Wave, WaveKind::Adjoint] {
        let label = kind_label(kind);
        let name = format!("wave_series_{label}");
        let identity = match kind {
            WaveKind::Wave => "z^-k coefficients of tau(n; t - [1/z])/tau(n; t) = sum_i ((-Y)^(k-1) xdot)_i/(n - x_i)",
            WaveKind::Adjoint => {
                "z^-k coefficients of tau(n; t + [1/z])/tau(n; t) = sum_i (-diag(xdot)(-Y^t)^(k-1) e)_i/(n - x_i)"
            }
        };
        out.push(match attempt(series_error(ctx, kind))? {
            Ok(e) => record(name, identity, e, SERIES_TOL),
            Err(why) => failed(name, identity, &why, SERIES_TOL),
        });
        let identity = match kind {
            WaveKind::Wave => "dw/dt_1 = (Delta + a0(n)) w",
            WaveKind::Adjoint => "dw*/dt_1 = (nabla - a0(n-1)) w*",
        };
        out.extend(fd_pair(&format!("wave_first_flow_{label}"), identity, ctx.h, |h| {
            flow_error(ctx, kind, h)
        })?);
    }

    let z = wave_z(&ctx.tau);
    // one window for both truncations: the one meant for the larger
    let window = default_eigen_window(p, ctx.k + EIGEN_EXTRA_ORDERS);
    let eig = |k: usize| attempt(eigen_residual(p, &ctx.tau, z, k, window));
    let identity = format!("L w = z w at z = 1.5 rho(Y0) + 2 = {z:.6}, truncation K, n - theta in {window:?}");
    let (base, extended) = (eig(ctx.k)?, eig(ctx.k + EIGEN_EXTRA_ORDERS)?);
    out.push(match &base {
        Ok(r) => record("wave_eigen_relation", &identity, *r, EIGEN_TOL),
        Err(why) => failed("wave_eigen_relation", &identity, why, EIGEN_TOL),
    });
    let identity = format!("{identity}: residual ratio for K -> K + {EIGEN_EXTRA_ORDERS}");
    out.push(match (base, extended) {
        (Ok(a), Ok(b)) => record("wave_eigen_truncation_decay", identity, b / a, EIGEN_DECAY_TOL),
        (Err(why), _) | (_, Err(why)) => failed("wave_eigen_truncation_decay", identity, &why, EIGEN_DECAY_TOL),
    });
    Ok(out)
}
