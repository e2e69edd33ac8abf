//! Wave and Lax operators built from a phase point, and the closed forms they
//! must reproduce.

use alloc::vec::Vec;

use nalgebra::DVector;
use num_rational::BigRational;

use super::coeff::{Coefficient, GridFn, Scalar};
use super::exact::ExactPhase;
use super::op::{binomial, PseudoDiffOp};
use super::ratfn::RationalFn;
use crate::dynamics::build_matrices;
use crate::error::{invalid, Result};
use crate::phase::PhasePoint;

pub const DEFAULT_TRUNCATION: usize = 8;

/// `W = 1 + sum_{k <= K} w_k(n) Delta^{-k}` with `w_k = sum_i w_{k,i} / (n - x_i)`.
pub fn wave_operator(phase: &ExactPhase, k: usize) -> Result<PseudoDiffOp<RationalFn>> {
    if k == 0 {
        return Err(invalid("truncation order must be at least 1"));
    }
    let x = phase.x();
    let terms = phase
        .residue_vectors(k)
        .into_iter()
        .enumerate()
        .map(|(idx, w)| (-(idx as i32) - 1, RationalFn::partial_fractions(w.iter().zip(x))));
    Ok(PseudoDiffOp::from_terms(
        core::iter::once((0, RationalFn::one())).chain(terms),
        Some(-(k as i32)),
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdjointWave {
    /// `vectors[k - 1]` holds the residues of `w*_k`.
    pub vectors: Vec<Vec<BigRational>>,
    /// `coeffs[k - 1] = w*_k(n)`.
    pub coeffs: Vec<RationalFn>,
}

pub fn adjoint_wave_operator(phase: &ExactPhase, k: usize) -> Result<AdjointWave> {
    if k == 0 {
        return Err(invalid("truncation order must be at least 1"));
    }
    let vectors = phase.adjoint_residue_vectors(k);
    let coeffs = vectors
        .iter()
        .map(|w| RationalFn::partial_fractions(w.iter().zip(phase.x())))
        .collect();
    Ok(AdjointWave { vectors, coeffs })
}

/// `sum_j Delta^{-j} w*_j(n + 1)`, which must agree with `W^{-1}`.
pub fn inverse_from_adjoint(adjoint: &AdjointWave) -> PseudoDiffOp<RationalFn> {
    let k = adjoint.coeffs.len() as i32;
    let mut out = PseudoDiffOp::identity().truncated(-k);
    for (idx, c) in adjoint.coeffs.iter().enumerate() {
        let j = idx as i32 + 1;
        let term = PseudoDiffOp::monomial(RationalFn::one(), -j).mul(&PseudoDiffOp::monomial(c.shifted(1), 0), k);
        out = out.add(&term);
    }
    out
}

/// `L = W Delta W^{-1}`; the truncation depth is read off the floor of `W`.
pub fn lax_operator<C: Coefficient>(w: &PseudoDiffOp<C>) -> Result<PseudoDiffOp<C>> {
    let depth = -w
        .floor()
        .ok_or_else(|| invalid("wave operator must carry a truncation floor"))?;
    let winv = w.unipotent_inverse(depth)?;
    Ok(w.mul(&PseudoDiffOp::delta(), depth).mul(&winv, depth))
}

/// `a_0(n) = sum_i xdot_i / ((n - x_i)(n + 1 - x_i))`.
pub fn a0_closed_form(phase: &ExactPhase) -> RationalFn {
    let one = BigRational::from_integer(1.into());
    phase
        .velocities()
        .iter()
        .zip(phase.x())
        .fold(RationalFn::zero(), |acc, (v, x)| {
            let f = RationalFn::simple_pole(v.clone(), x.clone()).mul(&RationalFn::simple_pole(one.clone(), x - &one));
            acc.add(&f)
        })
}

/// `w_1(n) - w_1(n + 1)`.
pub fn a0_from_first_coefficient(w1: &RationalFn) -> RationalFn {
    w1.sub(&w1.shifted(1))
}

/// `(L^2)_+` in the form displayed in the two-flow example:
/// `Delta^2 + (a_0 + a_0(n+1)) Delta + a_0^2 + a_1 + a_1(n+1)`.
pub fn l2_plus_printed<C: Coefficient>(a0: &C, a1: &C) -> PseudoDiffOp<C> {
    PseudoDiffOp::from_terms(
        [
            (2, C::one()),
            (1, a0.plus(&a0.shifted(1))),
            (0, a0.times(a0).plus(a1).plus(&a1.shifted(1))),
        ],
        None,
    )
}

/// `(L^2)_+` as the product rule gives it, with the extra `Delta a_0`.
pub fn l2_plus_complete<C: Coefficient>(a0: &C, a1: &C) -> PseudoDiffOp<C> {
    l2_plus_printed(a0, a1).add(&PseudoDiffOp::monomial(a0.difference(), 0))
}

/// `c(n) (Delta + 1)`.
pub fn times_delta_plus_one<C: Coefficient>(c: &C) -> PseudoDiffOp<C> {
    PseudoDiffOp::from_terms([(1, c.clone()), (0, c.clone())], None)
}

/// Factor of `[(L^2)_+, (L)_+]` as displayed: `Delta^2 a_0 - Delta(a_1 + a_1(n+1))`.
pub fn bracket_factor_printed<C: Coefficient>(a0: &C, a1: &C) -> C {
    a0.difference()
        .difference()
        .minus(&a1.plus(&a1.shifted(1)).difference())
}

/// Factor that the complete `(L^2)_+` produces: `-Delta(a_1 + a_1(n+1))`.
pub fn bracket_factor_complete<C: Coefficient>(a1: &C) -> C {
    a1.plus(&a1.shifted(1)).difference().negated()
}

/// If `op = c(n)(Delta + 1)` exactly, returns `c`.
pub fn factor_delta_plus_one<C: Coefficient>(op: &PseudoDiffOp<C>) -> Option<C> {
    if op.terms().any(|(j, _)| j != 0 && j != 1) {
        return None;
    }
    let c1 = op.coeff(1).ok()?;
    let c0 = op.coeff(0).ok()?;
    c1.minus(&c0).is_zero().then_some(c0)
}

/// Lattice on which float coefficients are sampled: `n = theta + m` for
/// integer `m` in `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice {
    pub theta: f64,
    pub lo: i64,
    pub hi: i64,
}

/// Minimum distance allowed between a sample point and a pole.
pub const POLE_CLEARANCE: f64 = 0.1;

impl Lattice {
    /// Window large enough for products up to truncation `k` on `[a, b]`.
    pub fn for_truncation(theta: f64, a: i64, b: i64, k: usize) -> Self {
        let k = k as i64;
        Self {
            theta,
            lo: a - (k + 3) * (k + 6),
            hi: b + 3 * k + 10,
        }
    }

    pub fn point(&self, m: i64) -> f64 {
        self.theta + m as f64
    }
}

fn frac_distance(a: f64, b: f64) -> f64 {
    let d = crate::math::frac(a - b);
    d.min(1.0 - d)
}

/// Offset in `[0, 1)` farthest from every pole class `x_i + Z`; ties resolve
/// toward `0` so that well-separated states sample the integers.
pub fn sample_offset(x: &[f64]) -> f64 {
    let clearance = |theta: f64| {
        x.iter()
            .map(|&xi| frac_distance(theta, xi))
            .fold(f64::INFINITY, f64::min)
    };
    let mut fr: Vec<f64> = x.iter().map(|v| crate::math::frac(*v)).collect();
    fr.sort_by(f64::total_cmp);
    let mut best = (0.0, clearance(0.0));
    for (i, &a) in fr.iter().enumerate() {
        let b = if i + 1 < fr.len() { fr[i + 1] } else { fr[0] + 1.0 };
        let mid = crate::math::frac((a + b) / 2.0);
        let c = clearance(mid);
        if c > best.1 + 1e-12 {
            best = (mid, c);
        }
    }
    best.0
}

/// Distance from the lattice `offset + Z` to the nearest pole class.
pub fn pole_clearance(x: &[f64], offset: f64) -> f64 {
    x.iter()
        .map(|&xi| frac_distance(offset, xi))
        .fold(f64::INFINITY, f64::min)
}

/// Float residue vectors `(-Y)^{k-1} xdot`.
pub fn residue_vectors_f64(p: &PhasePoint, k: usize) -> Result<Vec<DVector<f64>>> {
    let y = build_matrices(p)?.y;
    let mut cur = DVector::from_iterator(y.nrows(), (0..y.nrows()).map(|i| y[(i, i)] - 1.0));
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let next = -(&y * &cur);
        out.push(cur);
        cur = next;
    }
    Ok(out)
}

/// `W` sampled on `lattice` from positions and residue vectors in any scalar field.
pub fn sampled_wave_operator<S: Scalar>(
    x: &[S],
    residues: &[Vec<S>],
    lattice: &Lattice,
) -> Result<PseudoDiffOp<GridFn<S>>> {
    if residues.is_empty() {
        return Err(invalid("truncation order must be at least 1"));
    }
    let theta = S::from_f64(lattice.theta).ok_or_else(|| invalid("non-finite lattice offset"))?;
    let terms = residues.iter().enumerate().map(|(idx, w)| {
        let f = GridFn::from_fn(lattice.lo, lattice.hi, |m| {
            let n = theta.add(&S::from_i128(m as i128));
            w.iter()
                .zip(x)
                .fold(S::zero(), |acc, (wi, xi)| acc.add(&wi.div(&n.sub(xi))))
        });
        (-(idx as i32) - 1, f)
    });
    let k = residues.len() as i32;
    Ok(PseudoDiffOp::from_terms(
        core::iter::once((0, GridFn::one())).chain(terms),
        Some(-k),
    ))
}

/// Float counterpart of `wave_operator` sampled on `lattice`.
pub fn wave_operator_grid(p: &PhasePoint, k: usize, lattice: &Lattice) -> Result<PseudoDiffOp<GridFn>> {
    let residues: Vec<Vec<f64>> = residue_vectors_f64(p, k)?
        .into_iter()
        .map(|v| v.iter().copied().collect())
        .collect();
    sampled_wave_operator(p.x(), &residues, lattice)
}

/// Coefficients `(order, a_order(n))` of the truncated `L` at a real point,
/// orders `1` down to `1 - k`, from
/// `L = sum_{i,j} w_i(n) Delta^{1-i-j} w*_j(n+1)`.
///
/// `w*_j(n+1)` is a sum of simple poles, so its differences have the closed
/// form `Delta^l 1/(n - r) = (-1)^l l! / prod_{s=0}^{l} (n - r + s)` and no
/// repeated differencing is needed. Every term lands on `n + order`.
pub fn lax_coefficients_at(p: &PhasePoint, k: usize, n: f64) -> Result<Vec<(i32, f64)>> {
    if k == 0 {
        return Err(invalid("truncation order must be at least 1"));
    }
    let x = p.x();
    let dim = x.len();
    let v = p.first_flow_velocities();
    let w = residue_vectors_f64(p, k)?;
    let minus_yt = -build_matrices(p)?.y.transpose();
    let mut ws: Vec<DVector<f64>> = Vec::with_capacity(k);
    let mut cur = DVector::from_element(dim, 1.0);
    for _ in 0..k {
        ws.push(DVector::from_iterator(dim, (0..dim).map(|r| -v[r] * cur[r])));
        cur = &minus_yt * &cur;
    }
    let mut wi = alloc::vec![1.0];
    for wk in &w {
        wi.push(wk.iter().zip(x).map(|(c, xr)| c / (n - xr)).sum());
    }
    // (Delta^l g_j)(q) where g_j(m) = w*_j(m + 1)
    let diff_at = |j: usize, l: u32, q: f64| -> f64 {
        if j == 0 {
            return if l == 0 { 1.0 } else { 0.0 };
        }
        let mut fact = 1.0;
        for s in 1..=l {
            fact *= s as f64;
        }
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        ws[j - 1]
            .iter()
            .zip(x)
            .map(|(c, xr)| {
                let den: f64 = (0..=l).map(|s| q + 1.0 - xr + s as f64).product();
                c * sign * fact / den
            })
            .sum()
    };
    let k = k as i32;
    let mut out = Vec::with_capacity(k as usize + 1);
    for order in (1 - k..=1).rev() {
        let mut acc = 0.0;
        for i in 0..=k {
            for j in 0..=k - i {
                let m = 1 - i - j;
                let l = m - order;
                if l < 0 || (m >= 0 && l > m) {
                    continue;
                }
                let b = binomial(m, l as u32) as f64;
                acc += wi[i as usize] * b * diff_at(j as usize, l as u32, n + order as f64);
            }
        }
        out.push((order, acc));
    }
    Ok(out)
}

/// `a_0` sampled on `lattice` from the closed form.
pub fn a0_grid(x: &[f64], xdot: &[f64], lattice: &Lattice) -> GridFn {
    GridFn::from_fn(lattice.lo, lattice.hi, |m| {
        let n = lattice.point(m);
        x.iter()
            .zip(xdot)
            .map(|(xi, vi)| vi / ((n - xi) * (n + 1.0 - xi)))
            .sum()
    })
}

/// Exact constant helper for tests and callers.
pub fn rational(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}
