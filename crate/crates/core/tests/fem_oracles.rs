mod common;

use common::*;
use fem_evidence::fem::{assemble, modal_analysis, solve_modal, DOF_PER_NODE};
use fem_evidence::presets;
use proptest::prelude::*;

const CANTILEVER_ROOTS: [f64; 3] = [1.875_104_068_7, 4.694_091_132_9, 7.854_757_438_2];

#[test]
fn cantilever_bending_matches_closed_form() {
    let model = cantilever(50, 1.0);
    let modal = modal_analysis(&model, 30).unwrap();
    assert_eq!(modal.rigid_body_count(), 0);
    let fe = frequencies_along(&model, &modal, 1);
    for (k, lambda) in CANTILEVER_ROOTS.iter().enumerate() {
        let exact = bending_frequency(*lambda, 1.0);
        assert!(rel_err(fe[k], exact) < 0.01, "mode {}: {} vs {exact}", k + 1, fe[k]);
    }
}

#[test]
fn pinned_pinned_bending_matches_closed_form() {
    let n_el = 50;
    let last = n_el * DOF_PER_NODE;
    // v at both ends; u, w, θx, θy at the first node and w at the last to remove the remaining rigid motion
    let constrained = vec![0, 1, 2, 3, 4, last + 1, last + 2];
    let model = straight_beam(n_el, 1.0, constrained);
    let modal = modal_analysis(&model, 30).unwrap();
    assert_eq!(modal.rigid_body_count(), 0);
    let fe = frequencies_along(&model, &modal, 1);
    for n in 1..=3 {
        let exact = bending_frequency(n as f64 * std::f64::consts::PI, 1.0);
        assert!(rel_err(fe[n - 1], exact) < 0.005, "mode {n}: {} vs {exact}", fe[n - 1]);
    }
}

#[test]
fn mode_shapes_diagonalise_both_matrices() {
    let sys = assemble(&presets::hbeam()).unwrap();
    let modal = solve_modal(&sys, sys.n_dof()).unwrap();
    let phi = &modal.mode_shapes;
    let mm = phi.transpose() * &sys.mass * phi;
    let kk = phi.transpose() * &sys.stiffness * phi;
    let scale = modal.eigenvalues.last().unwrap().abs();
    for i in 0..sys.n_dof() {
        for j in 0..sys.n_dof() {
            let id = if i == j { 1.0 } else { 0.0 };
            assert!((mm[(i, j)] - id).abs() < 1e-8, "M[{i},{j}] = {}", mm[(i, j)]);
            let lam = if i == j { modal.eigenvalues[i] } else { 0.0 };
            assert!((kk[(i, j)] - lam).abs() < 1e-8 * scale, "K[{i},{j}]");
        }
    }
}

#[test]
fn hbeam_exposes_thirteen_modes_with_six_rigid() {
    let modal = modal_analysis(&presets::hbeam(), 13).unwrap();
    assert_eq!(modal.rigid_body_count(), 6);
    assert!(modal.frequency(13).unwrap() > 1.0);
    assert!(modal.frequencies_hz.windows(2).all(|w| w[0] <= w[1]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn frequencies_scale_with_sqrt_of_uniform_modulus(s in 0.5f64..2.0) {
        let base = presets::hbeam();
        let mut scaled = base.clone();
        for e in &mut scaled.elements {
            e.material = e.material.with_youngs_modulus(e.material.youngs_modulus * s);
        }
        let f0 = modal_analysis(&base, 20).unwrap();
        let f1 = modal_analysis(&scaled, 20).unwrap();
        for k in 6..20 {
            prop_assert!(rel_err(f1.frequencies_hz[k], f0.frequencies_hz[k] * s.sqrt()) < 1e-8);
        }
    }

    #[test]
    fn stiffening_one_element_never_lowers_a_frequency(element in 1usize..=12, s in 1.0f64..1.5) {
        let base = presets::hbeam();
        let mut stiff = base.clone();
        let e = stiff.element_mut(element).unwrap();
        e.material = e.material.with_youngs_modulus(e.material.youngs_modulus * s);
        let f0 = modal_analysis(&base, 20).unwrap();
        let f1 = modal_analysis(&stiff, 20).unwrap();
        for k in 6..20 {
            prop_assert!(f1.frequencies_hz[k] >= f0.frequencies_hz[k] * (1.0 - 1e-10));
        }
    }
}
