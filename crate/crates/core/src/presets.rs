//! Built-in structures.

use crate::fem::{BeamSection, Element, Material, Node, StructureModel};

/// Aluminium used for every H-beam element before updating.
pub fn aluminium() -> Material {
    Material {
        youngs_modulus: 7.2e10,
        density: 2700.0,
        // E / (2 (1 + ν)) with ν = 0.33
        shear_modulus: 7.2e10 / 2.66,
    }
}

/// 9.8 mm x 32.2 mm bar: 9.8 mm in the plane of the H (local y), 32.2 mm
/// out of plane (local z).
pub fn hbeam_section() -> BeamSection {
    BeamSection {
        width: 0.0098,
        height: 0.0322,
    }
}

/// Unsymmetrical H-beam, free-free, 13 nodes and 12 elements in the x-y plane.
///
/// * elements 1-6: 600 mm cross-bar along x, nodes 1..=7
/// * elements 7-10: 400 mm left upright through node 1, top to bottom
/// * elements 11-12: 200 mm right upright through node 7, top to bottom
pub fn hbeam() -> StructureModel {
    let mut positions: Vec<[f64; 3]> = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6].map(|x| [x, 0.0, 0.0]).to_vec();
    positions.extend([[0.0, 0.2, 0.0], [0.0, 0.1, 0.0], [0.0, -0.1, 0.0], [0.0, -0.2, 0.0]]);
    positions.extend([[0.6, 0.1, 0.0], [0.6, -0.1, 0.0]]);
    let nodes = positions
        .into_iter()
        .enumerate()
        .map(|(i, position)| Node { id: i + 1, position })
        .collect();

    let mut connectivity: Vec<(usize, usize)> = (1..=6).map(|i| (i, i + 1)).collect();
    connectivity.extend([(8, 9), (9, 1), (1, 10), (10, 11), (12, 7), (7, 13)]);
    let elements = connectivity
        .into_iter()
        .enumerate()
        .map(|(i, (node_a, node_b))| Element {
            id: i + 1,
            node_a,
            node_b,
            material: aluminium(),
            section: hbeam_section(),
            orientation: None,
        })
        .collect();

    StructureModel {
        nodes,
        elements,
        constrained_dofs: Vec::new(),
    }
}
