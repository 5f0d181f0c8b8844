//! Three-dimensional Euler-Bernoulli beam element.
//!
//! Each node carries six degrees of freedom ordered `u, v, w, θx, θy, θz`.
//! Local axes follow the usual convention: `x` runs from node A to node B,
//! `z` is the component of the element's orientation vector orthogonal to
//! `x`, and `y = z × x`. The section `width` is measured along local `y` and
//! the `height` along local `z`.

use nalgebra::{Matrix3, SMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DOF_PER_NODE: usize = 6;

pub type ElementMatrix = SMatrix<f64, 12, 12>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    /// N·m⁻²
    pub youngs_modulus: f64,
    /// kg·m⁻³
    pub density: f64,
    /// N·m⁻²
    pub shear_modulus: f64,
}

impl Material {
    pub fn new(youngs_modulus: f64, density: f64, shear_modulus: f64) -> Result<Self> {
        let m = Self {
            youngs_modulus,
            density,
            shear_modulus,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("youngs_modulus", self.youngs_modulus),
            ("density", self.density),
            ("shear_modulus", self.shear_modulus),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "material {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Replace E, scaling G with it so Poisson's ratio is unchanged.
    pub fn with_youngs_modulus(self, youngs_modulus: f64) -> Self {
        Self {
            youngs_modulus,
            shear_modulus: self.shear_modulus * youngs_modulus / self.youngs_modulus,
            ..self
        }
    }
}

/// Solid rectangular cross-section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSection {
    /// Extent along local y (m).
    pub width: f64,
    /// Extent along local z (m).
    pub height: f64,
}

impl BeamSection {
    pub fn new(width: f64, height: f64) -> Result<Self> {
        let s = Self { width, height };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0 && self.height.is_finite() && self.height > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "section dimensions must be positive, got {} x {}",
                self.width, self.height
            )));
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    /// Second moment of area about local y (bending in the x-z plane).
    pub fn iy(&self) -> f64 {
        self.width * self.height.powi(3) / 12.0
    }

    /// Second moment of area about local z (bending in the x-y plane).
    pub fn iz(&self) -> f64 {
        self.height * self.width.powi(3) / 12.0
    }

    pub fn polar_moment(&self) -> f64 {
        self.iy() + self.iz()
    }

    /// Saint-Venant torsion constant, Roark's approximation for a solid rectangle.
    pub fn torsion_constant(&self) -> f64 {
        let long = self.width.max(self.height);
        let short = self.width.min(self.height);
        let r = short / long;
        long * short.powi(3) * (1.0 / 3.0 - 0.21 * r * (1.0 - r.powi(4) / 12.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub position: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub id: usize,
    pub node_a: usize,
    pub node_b: usize,
    pub material: Material,
    pub section: BeamSection,
    /// Vector fixing the local z axis. Defaults to global Z, or global Y for
    /// elements parallel to Z.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<[f64; 3]>,
}

/// Rotation whose rows are the local axes expressed in global coordinates.
pub fn local_frame(element: &Element, a: &Node, b: &Node) -> Result<(f64, Matrix3<f64>)> {
    let pa = Vector3::from(a.position);
    let pb = Vector3::from(b.position);
    let axis = pb - pa;
    let length = axis.norm();
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::DegenerateGeometry {
            element: element.id,
            reason: format!("zero length between nodes {} and {}", a.id, b.id),
        });
    }
    let ex = axis / length;
    let reference = match element.orientation {
        Some(v) => Vector3::from(v),
        None if ex.z.abs() > 0.999 => Vector3::y(),
        None => Vector3::z(),
    };
    let ez = reference - ex * ex.dot(&reference);
    let ez_norm = ez.norm();
    if ez_norm < 1e-9 * reference.norm().max(1e-300) || ez_norm == 0.0 {
        return Err(Error::DegenerateGeometry {
            element: element.id,
            reason: "orientation vector is parallel to the element axis".into(),
        });
    }
    let ez = ez / ez_norm;
    let ey = ez.cross(&ex);
    let rot = Matrix3::from_rows(&[ex.transpose(), ey.transpose(), ez.transpose()]);
    Ok((length, rot))
}

fn local_stiffness(e: &Element, l: f64) -> ElementMatrix {
    let Material {
        youngs_modulus: ym,
        shear_modulus: g,
        ..
    } = e.material;
    let s = &e.section;
    let mut k = ElementMatrix::zeros();

    let ea = ym * s.area() / l;
    k[(0, 0)] = ea;
    k[(6, 6)] = ea;
    k[(0, 6)] = -ea;
    k[(6, 0)] = -ea;

    let gj = g * s.torsion_constant() / l;
    k[(3, 3)] = gj;
    k[(9, 9)] = gj;
    k[(3, 9)] = -gj;
    k[(9, 3)] = -gj;

    // x-y plane: v, θz
    let eiz = ym * s.iz();
    let block = bending_stiffness(eiz, l, 1.0);
    scatter4(&mut k, [1, 5, 7, 11], &block);

    // x-z plane: w, θy (rotation sign flips the coupling terms)
    let eiy = ym * s.iy();
    let block = bending_stiffness(eiy, l, -1.0);
    scatter4(&mut k, [2, 4, 8, 10], &block);

    k
}

fn bending_stiffness(ei: f64, l: f64, sign: f64) -> [[f64; 4]; 4] {
    let l2 = l * l;
    let l3 = l2 * l;
    let a = 12.0 * ei / l3;
    let b = sign * 6.0 * ei / l2;
    let c = 4.0 * ei / l;
    let d = 2.0 * ei / l;
    [[a, b, -a, b], [b, c, -b, d], [-a, -b, a, -b], [b, d, -b, c]]
}

fn local_mass(e: &Element, l: f64) -> ElementMatrix {
    let s = &e.section;
    let rho = e.material.density;
    let mut m = ElementMatrix::zeros();
    let c = rho * s.area() * l / 420.0;

    m[(0, 0)] = 140.0 * c;
    m[(6, 6)] = 140.0 * c;
    m[(0, 6)] = 70.0 * c;
    m[(6, 0)] = 70.0 * c;

    let t = rho * s.polar_moment() * l / 6.0;
    m[(3, 3)] = 2.0 * t;
    m[(9, 9)] = 2.0 * t;
    m[(3, 9)] = t;
    m[(9, 3)] = t;

    scatter4(&mut m, [1, 5, 7, 11], &bending_mass(c, l, 1.0));
    scatter4(&mut m, [2, 4, 8, 10], &bending_mass(c, l, -1.0));
    m
}

fn bending_mass(c: f64, l: f64, sign: f64) -> [[f64; 4]; 4] {
    let l2 = l * l;
    let a = 22.0 * l * sign;
    let b = 13.0 * l * sign;
    [
        [156.0 * c, a * c, 54.0 * c, -b * c],
        [a * c, 4.0 * l2 * c, b * c, -3.0 * l2 * c],
        [54.0 * c, b * c, 156.0 * c, -a * c],
        [-b * c, -3.0 * l2 * c, -a * c, 4.0 * l2 * c],
    ]
}

fn scatter4(target: &mut ElementMatrix, dofs: [usize; 4], block: &[[f64; 4]; 4]) {
    for (i, &r) in dofs.iter().enumerate() {
        for (j, &c) in dofs.iter().enumerate() {
            target[(r, c)] = block[i][j];
        }
    }
}

fn transformation(rot: &Matrix3<f64>) -> ElementMatrix {
    let mut t = ElementMatrix::zeros();
    for b in 0..4 {
        t.fixed_view_mut::<3, 3>(3 * b, 3 * b).copy_from(rot);
    }
    t
}

/// Global-frame stiffness and consistent mass matrices `(k_e, m_e)`.
pub fn element_matrices(e: &Element, a: &Node, b: &Node) -> Result<(ElementMatrix, ElementMatrix)> {
    let (l, rot) = local_frame(e, a, b)?;
    let t = transformation(&rot);
    let tt = t.transpose();
    let k = tt * local_stiffness(e, l) * t;
    let m = tt * local_mass(e, l) * t;
    Ok((symmetrize(k), symmetrize(m)))
}

fn symmetrize(a: ElementMatrix) -> ElementMatrix {
    (a + a.transpose()) * 0.5
}
