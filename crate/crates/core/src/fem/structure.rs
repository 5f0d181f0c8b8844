use std::collections::{BTreeSet, HashMap};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::element::{element_matrices, Element, Node, DOF_PER_NODE};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureModel {
    pub nodes: Vec<Node>,
    pub elements: Vec<Element>,
    /// Global DOF indices (`6 * (node_id - 1) + local`) removed from the
    /// system. Empty means free-free.
    #[serde(default)]
    pub constrained_dofs: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SystemMatrices {
    pub mass: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
    /// Global DOF index of each retained row/column.
    pub dof_map: Vec<usize>,
}

impl SystemMatrices {
    pub fn n_dof(&self) -> usize {
        self.mass.nrows()
    }
}

impl StructureModel {
    pub fn n_dof_unconstrained(&self) -> usize {
        self.nodes.len() * DOF_PER_NODE
    }

    pub fn element(&self, id: usize) -> Option<&Element> {
        self.elements.iter().find(|e| e.id == id)
    }

    pub fn element_mut(&mut self, id: usize) -> Option<&mut Element> {
        self.elements.iter_mut().find(|e| e.id == id)
    }

    pub fn element_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.elements.iter().map(|e| e.id)
    }

    /// Every structural problem found, in a stable order. Empty means valid.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut node_ids: Vec<usize> = self.nodes.iter().map(|n| n.id).collect();
        node_ids.sort_unstable();
        if node_ids.iter().enumerate().any(|(i, &id)| id != i + 1) {
            out.push(format!(
                "node ids must be unique and contiguous from 1, got {node_ids:?}"
            ));
        }
        let mut elem_ids: Vec<usize> = self.elements.iter().map(|e| e.id).collect();
        elem_ids.sort_unstable();
        if elem_ids.iter().enumerate().any(|(i, &id)| id != i + 1) {
            out.push(format!(
                "element ids must be unique and contiguous from 1, got {elem_ids:?}"
            ));
        }
        let known: BTreeSet<usize> = node_ids.iter().copied().collect();
        for e in &self.elements {
            if e.node_a == e.node_b {
                out.push(format!("element {} connects node {} to itself", e.id, e.node_a));
            }
            for n in [e.node_a, e.node_b] {
                if !known.contains(&n) {
                    out.push(format!("element {} references unknown node {}", e.id, n));
                }
            }
            if let Err(err) = e.material.validate() {
                out.push(format!("element {}: {err}", e.id));
            }
            if let Err(err) = e.section.validate() {
                out.push(format!("element {}: {err}", e.id));
            }
        }
        let n_dof = self.n_dof_unconstrained();
        for &d in &self.constrained_dofs {
            if d >= n_dof {
                out.push(format!("constrained dof {d} exceeds dof count {n_dof}"));
            }
        }
        if self.elements.is_empty() {
            out.push("structure has no elements, so its nodes are not connected".into());
        } else if out.is_empty() {
            if let Some(msg) = self.connectivity_problem() {
                out.push(msg);
            }
        }
        if out.is_empty() {
            let lookup = self.node_lookup();
            for e in &self.elements {
                if let Err(err) = super::element::local_frame(e, lookup[&e.node_a], lookup[&e.node_b]) {
                    out.push(err.to_string());
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let diags = self.diagnostics();
        match diags.first() {
            None => Ok(()),
            Some(first) if first.contains("not connected") || first.contains("disconnected") => {
                Err(Error::Disconnected(diags.join("; ")))
            }
            Some(_) => Err(Error::InvalidStructure(diags.join("; "))),
        }
    }

    fn node_lookup(&self) -> HashMap<usize, &Node> {
        self.nodes.iter().map(|n| (n.id, n)).collect()
    }

    fn connectivity_problem(&self) -> Option<String> {
        let n = self.nodes.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for e in &self.elements {
            let (a, b) = (find(&mut parent, e.node_a - 1), find(&mut parent, e.node_b - 1));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        let isolated: Vec<usize> = (0..n)
            .filter(|&i| find(&mut parent, i) != root)
            .map(|i| i + 1)
            .collect();
        (!isolated.is_empty())
            .then(|| format!("structure is disconnected: nodes {isolated:?} are not reachable from node 1"))
    }
}

/// Assemble global mass and stiffness matrices, then drop constrained DOFs.
pub fn assemble(model: &StructureModel) -> Result<SystemMatrices> {
    model.validate()?;
    let lookup = model.node_lookup();
    let n = model.n_dof_unconstrained();
    let mut k = DMatrix::<f64>::zeros(n, n);
    let mut m = DMatrix::<f64>::zeros(n, n);

    for e in &model.elements {
        let (ke, me) = element_matrices(e, lookup[&e.node_a], lookup[&e.node_b])?;
        let base_a = (e.node_a - 1) * DOF_PER_NODE;
        let base_b = (e.node_b - 1) * DOF_PER_NODE;
        let map = |i: usize| {
            if i < DOF_PER_NODE {
                base_a + i
            } else {
                base_b + i - DOF_PER_NODE
            }
        };
        for i in 0..12 {
            let gi = map(i);
            for j in 0..12 {
                let gj = map(j);
                k[(gi, gj)] += ke[(i, j)];
                m[(gi, gj)] += me[(i, j)];
            }
        }
    }

    let constrained: BTreeSet<usize> = model.constrained_dofs.iter().copied().collect();
    if constrained.is_empty() {
        return Ok(SystemMatrices {
            mass: m,
            stiffness: k,
            dof_map: (0..n).collect(),
        });
    }
    let keep: Vec<usize> = (0..n).filter(|d| !constrained.contains(d)).collect();
    let reduce = |a: &DMatrix<f64>| DMatrix::from_fn(keep.len(), keep.len(), |i, j| a[(keep[i], keep[j])]);
    Ok(SystemMatrices {
        mass: reduce(&m),
        stiffness: reduce(&k),
        dof_map: keep,
    })
}
