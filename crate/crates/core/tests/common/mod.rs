#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rskp_core::sample::random_phase;
use rskp_core::PhasePoint;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` random states with particle numbers cycling through `sizes`.
pub fn states(seed: u64, count: usize, sizes: &[usize]) -> Vec<PhasePoint> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| random_phase(&mut r, sizes[i % sizes.len()]).unwrap())
        .collect()
}

pub fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    max_abs(a.iter().zip(b).map(|(p, q)| p - q))
}

pub fn ln2_state() -> PhasePoint {
    PhasePoint::new(vec![0.0], vec![std::f64::consts::LN_2]).unwrap()
}

pub fn two_particle_state() -> PhasePoint {
    PhasePoint::new(vec![0.0, 2.0], vec![0.0, 0.0]).unwrap()
}

/// Largest of `1, 1/2, 1/4, ...` (at least 2^-20) for which flow `k` from
/// `p` runs without a collision, with the resulting end state.
pub fn survivable_flow(p: &PhasePoint, k: u32, tol: f64) -> (f64, PhasePoint) {
    let mut d = 1.0;
    for _ in 0..=20 {
        if let Ok(tr) = rskp_core::integrator::integrate_flow(p, k, d, tol) {
            return (d, tr.last().clone());
        }
        d /= 2.0;
    }
    panic!("flow {k} collides immediately from {p:?}");
}

/// Random states of the given sizes, redrawn until `usable` accepts them.
/// Real trajectories leave the generic regime (a gap reaching 0 or 1) in
/// finite time, so checks that need a fixed time span condition on it.
pub fn states_where(seed: u64, count: usize, sizes: &[usize], usable: impl Fn(&PhasePoint) -> bool) -> Vec<PhasePoint> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut draws = 0;
    while out.len() < count {
        let p = random_phase(&mut r, sizes[out.len() % sizes.len()]).unwrap();
        draws += 1;
        assert!(draws < 100 * count, "too few usable states");
        if usable(&p) {
            out.push(p);
        }
    }
    out
}
