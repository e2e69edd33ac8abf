//! Random generic configurations.

use alloc::vec::Vec;
use rand::Rng;

use crate::error::Result;
use crate::phase::PhasePoint;

/// Draws `n` sorted positions whose consecutive gaps lie in `[0.3, 3]`
/// outside `(0.95, 1.05)`, with every pairwise difference kept at least
/// 0.05 away from 1, and rapidities uniform in `[-1, 1]`.
pub fn random_phase<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<PhasePoint> {
    loop {
        let mut x = Vec::with_capacity(n);
        let mut pos = 0.0;
        for i in 0..n {
            if i > 0 {
                let gap = loop {
                    let g: f64 = rng.gen_range(0.3..=3.0);
                    if !(0.95..=1.05).contains(&g) {
                        break g;
                    }
                };
                pos += gap;
            }
            x.push(pos);
        }
        let ok = x
            .iter()
            .all(|a| x.iter().all(|b| crate::math::abs(a - b - 1.0) >= 0.05));
        if !ok {
            continue;
        }
        // center the cloud near the origin
        let shift = crate::math::round(x[n - 1] / 2.0 * 8.0) / 8.0;
        let x: Vec<f64> = x.iter().map(|v| v - shift).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        return PhasePoint::new(x, y);
    }
}
