//! Total-Lagrangian Q4 solid: dof bookkeeping, assembly and time stepping.

mod element;
mod time;

pub use time::{GenAlpha, SolidState, Stepper, TimeIntegrator};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::material::NeoHookean;
use crate::mesh::Mesh;
use crate::sparse::Coo;

/// Maps node dofs (`2 * node + component`) to equation numbers.
///
/// Fixed dofs carry no equation; their values live in the displacement
/// vector and are set by the caller. Tied dofs share a single equation.
#[derive(Clone, Debug, PartialEq)]
pub struct DofMap {
    eq: Vec<Option<usize>>,
    n_eq: usize,
}

impl DofMap {
    pub fn new(n_dofs: usize, fixed: &[usize], tied: &[Vec<usize>]) -> Result<Self> {
        let mut is_fixed = vec![false; n_dofs];
        for &d in fixed {
            if d >= n_dofs {
                return Err(Error::InvalidParameter(format!("fixed dof {d} out of range")));
            }
            is_fixed[d] = true;
        }
        let mut group = vec![usize::MAX; n_dofs];
        for (g, dofs) in tied.iter().enumerate() {
            for &d in dofs {
                if d >= n_dofs || is_fixed[d] || group[d] != usize::MAX {
                    return Err(Error::InvalidParameter(format!("tied dof {d} is invalid or already constrained")));
                }
                group[d] = g;
            }
        }
        let mut eq = vec![None; n_dofs];
        let mut group_eq = vec![usize::MAX; tied.len()];
        let mut n_eq = 0;
        for d in 0..n_dofs {
            if is_fixed[d] {
                continue;
            }
            let g = group[d];
            if g == usize::MAX {
                eq[d] = Some(n_eq);
                n_eq += 1;
            } else {
                if group_eq[g] == usize::MAX {
                    group_eq[g] = n_eq;
                    n_eq += 1;
                }
                eq[d] = Some(group_eq[g]);
            }
        }
        Ok(Self { eq, n_eq })
    }

    pub fn n_dofs(&self) -> usize {
        self.eq.len()
    }

    pub fn n_eq(&self) -> usize {
        self.n_eq
    }

    pub fn eq(&self, dof: usize) -> Option<usize> {
        self.eq[dof]
    }

    pub fn is_fixed(&self, dof: usize) -> bool {
        self.eq[dof].is_none()
    }

    pub fn fixed_dofs(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.eq.len()).filter(|&d| self.eq[d].is_none())
    }

    /// Sums a full-length vector into equation space.
    pub fn reduce(&self, full: &[f64]) -> Vec<f64> {
        let mut r = vec![0.0; self.n_eq];
        for (d, e) in self.eq.iter().enumerate() {
            if let Some(e) = e {
                r[*e] += full[d];
            }
        }
        r
    }

    pub fn apply_increment(&self, d: &mut [f64], du: &[f64]) {
        for (k, e) in self.eq.iter().enumerate() {
            if let Some(e) = e {
                d[k] += du[*e];
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solid {
    pub mesh: Mesh,
    /// One material per body index.
    pub materials: Vec<NeoHookean>,
}

impl Solid {
    pub fn new(mesh: Mesh, materials: Vec<NeoHookean>) -> Result<Self> {
        for (e, el) in mesh.elements.iter().enumerate() {
            if el.body >= materials.len() {
                return Err(Error::InvalidParameter(format!(
                    "element {e} has body {} but only {} materials",
                    el.body,
                    materials.len()
                )));
            }
        }
        for m in &materials {
            m.validate()?;
        }
        Ok(Self { mesh, materials })
    }

    pub fn n_dofs(&self) -> usize {
        self.mesh.n_dofs()
    }

    fn element_geometry(&self, e: usize, d: &[f64]) -> ([[f64; 2]; 4], [[f64; 2]; 4]) {
        let nodes = self.mesh.elements[e].nodes;
        let x = nodes.map(|n| self.mesh.nodes[n]);
        let u = nodes.map(|n| [d[2 * n], d[2 * n + 1]]);
        (x, u)
    }

    fn element_results(&self, d: &[f64], with_tangent: bool) -> Result<Vec<(element::ElemVec, element::ElemMat)>> {
        (0..self.mesh.elements.len())
            .into_par_iter()
            .map(|e| {
                let (x, u) = self.element_geometry(e, d);
                let mat = &self.materials[self.mesh.elements[e].body];
                element::force_stiffness(&x, &u, mat, with_tangent).map_err(|err| match err {
                    Error::InvertedElement { det, .. } => Error::InvertedElement { element: e, det },
                    other => other,
                })
            })
            .collect()
    }

    pub fn internal_force(&self, d: &[f64]) -> Result<Vec<f64>> {
        let res = self.element_results(d, false)?;
        let mut f = vec![0.0; self.n_dofs()];
        for (e, (fe, _)) in res.iter().enumerate() {
            let nodes = self.mesh.elements[e].nodes;
            for a in 0..4 {
                for i in 0..2 {
                    f[2 * nodes[a] + i] += fe[2 * a + i];
                }
            }
        }
        Ok(f)
    }

    /// Returns the full internal force vector and adds `K + mass_coeff * M`
    /// (restricted to free equations) to `coo`.
    pub fn assemble_into(&self, d: &[f64], map: &DofMap, mass_coeff: f64, coo: &mut Coo) -> Result<Vec<f64>> {
        let res = self.element_results(d, true)?;
        let mut f = vec![0.0; self.n_dofs()];
        for (e, (fe, ke)) in res.iter().enumerate() {
            let el = &self.mesh.elements[e];
            let dofs: [usize; 8] = std::array::from_fn(|k| 2 * el.nodes[k / 2] + k % 2);
            for a in 0..8 {
                f[dofs[a]] += fe[a];
            }
            let me = if mass_coeff != 0.0 {
                let (x, _) = self.element_geometry(e, d);
                Some(element::mass(&x, self.materials[el.body].density)?)
            } else {
                None
            };
            for a in 0..8 {
                let Some(ra) = map.eq(dofs[a]) else { continue };
                for b in 0..8 {
                    let Some(cb) = map.eq(dofs[b]) else { continue };
                    let mut v = ke[a][b];
                    if let Some(me) = &me {
                        if a % 2 == b % 2 {
                            v += mass_coeff * me[a / 2][b / 2];
                        }
                    }
                    coo.push(ra, cb, v);
                }
            }
        }
        Ok(f)
    }

    /// Consistent mass matrix applied to a full-length vector.
    pub fn mass_times(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n_dofs()];
        for el in &self.mesh.elements {
            let x = el.nodes.map(|n| self.mesh.nodes[n]);
            let me = element::mass(&x, self.materials[el.body].density)?;
            for a in 0..4 {
                for b in 0..4 {
                    for i in 0..2 {
                        out[2 * el.nodes[a] + i] += me[a][b] * v[2 * el.nodes[b] + i];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Consistent nodal forces of a uniform body force density [N/mm^3].
    pub fn body_force(&self, b: [f64; 2]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n_dofs()];
        for el in &self.mesh.elements {
            let x = el.nodes.map(|n| self.mesh.nodes[n]);
            let fe = element::body_force(&x, b)?;
            for a in 0..4 {
                for i in 0..2 {
                    out[2 * el.nodes[a] + i] += fe[2 * a + i];
                }
            }
        }
        Ok(out)
    }

    /// Solid-only implicit step: solves `f_int - f_ext + inertia = 0` for the
    /// free dofs. Fixed entries of `state_guess.d` must already hold their
    /// prescribed values at the end of the step.
    pub fn step(
        &self,
        map: &DofMap,
        stepper: &Stepper,
        prev: &SolidState,
        d_guess: Vec<f64>,
        f_ext: &[f64],
        tol: f64,
        max_iter: usize,
    ) -> Result<(SolidState, Vec<f64>)> {
        let mut d = d_guess;
        let mass_coeff = stepper.mass_coeff();
        let mut last = f64::INFINITY;
        for it in 0..max_iter {
            let mut coo = Coo::new(map.n_eq(), map.n_eq());
            let fint = self.assemble_into(&d, map, mass_coeff, &mut coo)?;
            let force: Vec<f64> = fint.iter().zip(f_ext).map(|(a, b)| a - b).collect();
            let inertia = stepper.inertial_residual(self, prev, &d)?;
            let full: Vec<f64> = force.iter().zip(&inertia).map(|(a, b)| a + b).collect();
            let r = map.reduce(&full);
            let norm = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            last = norm;
            if norm <= tol {
                let next = stepper.advance(self, prev, d, force)?;
                return Ok((next, full));
            }
            let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
            let du = coo.solve(&rhs)?;
            map.apply_increment(&mut d, &du);
            if it + 1 == max_iter {
                break;
            }
        }
        Err(Error::NotConverged {
            iterations: max_iter,
            residual: last,
        })
    }
}
