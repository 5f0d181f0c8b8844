#![allow(dead_code)]

use std::f64::consts::PI;

use fem_evidence::fem::{
    assemble, BeamSection, Element, Material, ModalData, Node, StructureModel, SystemMatrices, DOF_PER_NODE,
};

pub fn aluminium() -> Material {
    Material {
        youngs_modulus: 7.2e10,
        density: 2700.0,
        shear_modulus: 2.7e10,
    }
}

/// 10 mm (local y) by 30 mm (local z).
pub fn bar() -> BeamSection {
    BeamSection {
        width: 0.01,
        height: 0.03,
    }
}

/// `n_el` equal elements along global x from the origin.
pub fn straight_beam(n_el: usize, length: f64, constrained_dofs: Vec<usize>) -> StructureModel {
    let nodes = (0..=n_el)
        .map(|i| Node {
            id: i + 1,
            position: [length * i as f64 / n_el as f64, 0.0, 0.0],
        })
        .collect();
    let elements = (0..n_el)
        .map(|i| Element {
            id: i + 1,
            node_a: i + 1,
            node_b: i + 2,
            material: aluminium(),
            section: bar(),
            orientation: None,
        })
        .collect();
    StructureModel {
        nodes,
        elements,
        constrained_dofs,
    }
}

pub fn cantilever(n_el: usize, length: f64) -> StructureModel {
    straight_beam(n_el, length, (0..DOF_PER_NODE).collect())
}

/// Bending stiffness for deflection along global y.
pub fn in_plane_ei() -> f64 {
    aluminium().youngs_modulus * bar().iz()
}

pub fn mass_per_length() -> f64 {
    aluminium().density * bar().area()
}

/// `λ² / (2π L²) √(EI / ρA)` for a dimensionless root λ = βL.
pub fn bending_frequency(lambda: f64, length: f64) -> f64 {
    lambda * lambda / (2.0 * PI * length * length) * (in_plane_ei() / mass_per_length()).sqrt()
}

/// Translation (0 = u, 1 = v, 2 = w) carrying most of a mode's squared amplitude.
pub fn dominant_dof(sys: &SystemMatrices, modal: &ModalData, mode: usize) -> usize {
    let mut energy = [0.0; DOF_PER_NODE];
    for (row, &g) in sys.dof_map.iter().enumerate() {
        energy[g % DOF_PER_NODE] += modal.mode_shapes[(row, mode)].powi(2);
    }
    (0..3).max_by(|&a, &b| energy[a].total_cmp(&energy[b])).unwrap()
}

/// Frequencies of the modes whose dominant translation is `dof`, ascending.
pub fn frequencies_along(model: &StructureModel, modal: &ModalData, dof: usize) -> Vec<f64> {
    let sys = assemble(model).unwrap();
    (0..modal.n_modes())
        .filter(|&m| modal.frequencies_hz[m] > 1e-3 && dominant_dof(&sys, modal, m) == dof)
        .map(|m| modal.frequencies_hz[m])
        .collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
