mod common;

use common::{ln2_state, max_diff, states, states_where, survivable_flow};
use rskp_core::dynamics::{build_matrices, hamiltonians};
use rskp_core::integrator::*;
use rskp_core::{PhasePoint, TimeVector};

const TOL: f64 = 1e-10;

fn sorted_eigenvalues(p: &PhasePoint) -> Vec<(f64, f64)> {
    let mut ev: Vec<(f64, f64)> = build_matrices(p)
        .unwrap()
        .y
        .complex_eigenvalues()
        .iter()
        .map(|c| (c.re, c.im))
        .collect();
    ev.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.partial_cmp(&b.1).unwrap()));
    ev
}

#[test]
fn hamiltonians_are_conserved_along_every_flow() {
    let mut full = 0;
    for (idx, p) in states(21, 12, &[2, 3, 4]).iter().enumerate() {
        let h0 = hamiltonians(p, 4).unwrap();
        for k in 1..=4 {
            let (d, end) = survivable_flow(p, k, TOL);
            full += (d == 1.0) as usize;
            let h1 = hamiltonians(&end, 4).unwrap();
            for m in 0..4 {
                let drift = (h1[m] - h0[m]).abs() / h0[m].abs().max(1.0);
                assert!(
                    drift < 1e-8,
                    "state {idx}, flow {k} for {d}, H_{}: drift {drift:e}",
                    m + 1
                );
            }
        }
    }
    assert!(full > 0);
}

#[test]
fn hamiltonians_are_conserved_over_unit_time() {
    let survives = |p: &PhasePoint| (1..=4).all(|k| integrate_flow(p, k, 1.0, TOL).is_ok());
    for p in states_where(27, 4, &[2, 3], survives) {
        let h0 = hamiltonians(&p, 4).unwrap();
        for k in 1..=4 {
            let h1 = hamiltonians(integrate_flow(&p, k, 1.0, TOL).unwrap().last(), 4).unwrap();
            for m in 0..4 {
                assert!((h1[m] - h0[m]).abs() / h0[m].abs().max(1.0) < 1e-8);
            }
        }
    }
}

#[test]
fn spectrum_of_y_is_preserved_along_the_first_flow() {
    for p in states(22, 12, &[2, 3, 4, 5]) {
        let (_, end) = survivable_flow(&p, 1, TOL);
        let (a, b) = (sorted_eigenvalues(&p), sorted_eigenvalues(&end));
        for (u, v) in a.iter().zip(&b) {
            assert!((u.0 - v.0).abs() < 1e-8 && (u.1 - v.1).abs() < 1e-8, "{a:?} vs {b:?}");
        }
    }
}

#[test]
fn flows_are_reversible() {
    for p in states(23, 12, &[1, 2, 3, 4]) {
        for k in 1..=3 {
            let (d, end) = survivable_flow(&p, k, TOL);
            let back = integrate_flow(&end, k, -d, TOL).unwrap().last().clone();
            let err = max_diff(back.x(), p.x()).max(max_diff(back.y(), p.y()));
            assert!(err < 10.0 * TOL * 10.0, "flow {k}: {err:e}");
            assert!(back.t().get(k).abs() < 1e-15);
        }
    }
}

#[test]
fn single_particle_flows_are_linear() {
    let p = ln2_state();
    let end = integrate_flow(&p, 1, 1.0, TOL).unwrap();
    assert!((end.last().x()[0] + 0.5).abs() < 1e-12);
    let end = integrate_flow(&p, 2, 1.0, TOL).unwrap();
    assert!((end.last().x()[0] - 0.5).abs() < 1e-12);
    let target = TimeVector::from_pairs([(1, 1.0), (2, 1.0)]).unwrap();
    let q = integrate_multi(&p, &target, TOL).unwrap();
    assert!(q.x()[0].abs() < 1e-12);
    assert_eq!(q.y(), p.y());
    assert_eq!(integrate_multi(&p, &TimeVector::zero(), TOL).unwrap(), p);
}

#[test]
fn multi_time_order_does_not_matter() {
    let target = TimeVector::from_pairs([(1, 0.1), (2, 0.05)]).unwrap();
    for p in states_where(24, 6, &[3], |p| integrate_multi(p, &target, TOL).is_ok()) {
        let a = integrate_multi_ordered(&p, &target, TOL, FlowOrder::Ascending);
        let b = integrate_multi_ordered(&p, &target, TOL, FlowOrder::Descending);
        let (a, b) = match (a, b) {
            (Ok(a), Ok(b)) => (a, b),
            (a, b) => panic!("{:?} / {:?}", a.err(), b.err()),
        };
        assert!(max_diff(a.x(), b.x()).max(max_diff(a.y(), b.y())) < 1e-7);
    }
}

#[test]
fn commutativity_defect_is_small_and_second_order() {
    let usable = |p: &PhasePoint| commutativity_defect(p, 1, 2, 0.01, TOL).is_ok();
    for p in states_where(25, 6, &[2, 3], usable) {
        let d = commutativity_defect(&p, 1, 2, 0.01, TOL).unwrap();
        let d_half = commutativity_defect(&p, 1, 2, 0.005, TOL).unwrap();
        assert!(d < 1e-8, "{d:e}");
        assert!(d / d_half >= 4.0 || d < 1e-12, "{d:e} -> {d_half:e}");
    }
    let one = commutativity_defect(&ln2_state(), 1, 3, 0.1, TOL).unwrap();
    assert!(one < 1e-12);
}

#[test]
fn second_order_equation_and_matrix_lax_pair() {
    for p in states(26, 6, &[1, 2, 3, 4]) {
        for (name, f) in [
            ("newton", newton_residual as fn(&PhasePoint, f64, f64) -> _),
            ("lax pair", lax_pair_residual),
        ] {
            let r = f(&p, 1e-4, 1e-13).unwrap();
            let r_half = f(&p, 5e-5, 1e-13).unwrap();
            assert!(r.relative() < 1e-5, "{name}: {r:?}");
            assert!(
                r.relative() / r_half.relative() >= 3.5 || r.relative() < 1e-11,
                "{name}: {r:?} -> {r_half:?}"
            );
        }
    }
}
