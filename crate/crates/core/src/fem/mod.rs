//! Euler-Bernoulli beam structures: element matrices, assembly and modal
//! extraction for the undamped problem `K φ = ω² M φ`.

mod element;
mod modal;
mod structure;

pub use element::{element_matrices, local_frame, BeamSection, Element, ElementMatrix, Material, Node, DOF_PER_NODE};
pub use modal::{solve_modal, ModalData, RIGID_BODY_TOLERANCE_HZ};
pub use structure::{assemble, StructureModel, SystemMatrices};

/// Assemble and solve for every mode of the structure.
pub fn modal_analysis(model: &StructureModel, n_modes: usize) -> crate::Result<ModalData> {
    let sys = assemble(model)?;
    solve_modal(&sys, n_modes)
}
