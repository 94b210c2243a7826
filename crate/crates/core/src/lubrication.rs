//! Averaged Reynolds equation on the slave surface.
//!
//! Weak residual per facet, rows `j` of the two facet nodes:
//!
//! ```text
//! r_j = int (h^3 / 12 eta) Phi_p grad N_j . grad p      Poiseuille
//!     + int dh/dt N_j                                  squeeze
//!     - eps <-p_j> int N_j                             cavitation (lumped)
//!     - int h v_mean . grad N_j                        Couette
//!     - int sigma Phi_s v_rel . grad N_j               shear
//! ```
//!
//! `v_mean = (v1 + v2) / 2` and `v_rel = (v1 - v2) / 2` are weighted tangential
//! surface velocities. Fluid density is constant and cancels.

use serde::{Deserialize, Serialize};

use crate::ad::{Dual, Scalar, V2};
use crate::error::{Error, Result};
use crate::mortar::rigid::facet_geom;
use crate::quadrature::gauss_unit;
use crate::sparse::Coo;

/// Gauss points per lubrication facet.
pub const FACET_GAUSS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluidParams {
    /// Dynamic viscosity [MPa s].
    pub viscosity: f64,
    /// Cavitation penalty [s/mm].
    pub penalty: f64,
    /// Lubricant density [tonne/mm^3]; cancels from the residual.
    #[serde(default)]
    pub density: f64,
}

impl FluidParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.viscosity > 0.0) {
            return Err(Error::InvalidParameter(format!("viscosity must be positive, got {}", self.viscosity)));
        }
        if !(self.penalty >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cavitation penalty must be nonnegative, got {}",
                self.penalty
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowFactors {
    pub pressure: f64,
    pub shear: f64,
    pub friction: f64,
}

/// Patir-Cheng flow factors for isotropic Gaussian roughness.
pub fn flow_factors(h: f64, sigma: f64) -> Result<FlowFactors> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("flow factors need h > 0, got {h}")));
    }
    if !(sigma >= 0.0) {
        return Err(Error::Domain(format!("roughness must be nonnegative, got {sigma}")));
    }
    let (pressure, shear, friction) = flow_factors_t(h, sigma);
    Ok(FlowFactors {
        pressure,
        shear,
        friction,
    })
}

pub fn flow_factors_t<T: Scalar>(h: T, sigma: f64) -> (T, T, T) {
    let r = h.recip() * sigma;
    let r2 = r * r;
    let phi_p = r2 * 3.0 + 1.0;
    let phi_s = (r * -3.0 - r2 * r * 30.0) / (r2 * 6.0 + 1.0);
    let phi_f = r2 + 1.0;
    (phi_p, phi_s, phi_f)
}

/// Everything one facet needs; index 0 is the first chain node.
#[derive(Clone, Copy, Debug)]
pub struct FacetState<T> {
    pub x: [V2<T>; 2],
    pub p: [T; 2],
    pub h: [T; 2],
    pub h_prev: [f64; 2],
    pub v_mean: [V2<T>; 2],
    pub v_rel: [V2<T>; 2],
}

/// Contributions of one facet to the two nodal Reynolds rows.
pub fn facet_residual<T: Scalar>(s: &FacetState<T>, fluid: &FluidParams, sigma: f64, dt: f64) -> [T; 2] {
    let geo = facet_geom(s.x[0], s.x[1]);
    let inv_l = geo.len.recip();
    // surface gradients of the two shape functions
    let grad_n = [geo.tangent.scale(-inv_l), geo.tangent.scale(inv_l)];
    let grad_p = geo.tangent.scale((s.p[1] - s.p[0]) * inv_l);
    let mut r = [T::cst(0.0), T::cst(0.0)];
    let inv_dt = 1.0 / dt;
    for (xi, w) in gauss_unit(FACET_GAUSS) {
        let n = [1.0 - xi, xi];
        let h = s.h[0] * n[0] + s.h[1] * n[1];
        let hdot = (h - (s.h_prev[0] * n[0] + s.h_prev[1] * n[1])) * inv_dt;
        let vm = s.v_mean[0].scalef(n[0]) + s.v_mean[1].scalef(n[1]);
        let vr = s.v_rel[0].scalef(n[0]) + s.v_rel[1].scalef(n[1]);
        let (phi_p, phi_s, _) = flow_factors_t(h, sigma);
        let cond = h * h * h * phi_p / (12.0 * fluid.viscosity);
        let jw = geo.len * w;
        for j in 0..2 {
            let mut v = cond * grad_n[j].dot(grad_p) + hdot * n[j];
            v -= h * vm.dot(grad_n[j]);
            if sigma > 0.0 {
                v -= phi_s * vr.dot(grad_n[j]) * sigma;
            }
            r[j] += v * jw;
        }
    }
    for j in 0..2 {
        r[j] -= (-s.p[j]).pos() * geo.len * (0.5 * fluid.penalty);
    }
    r
}

/// Fluid traction on the slave side at a node: `(t_parallel, t_normal)` where
/// `t_parallel = -(h/2) Phi_p grad p` and
/// `t_normal = -p n - (eta/h) v_rel (Phi_f + Phi_s)`.
pub fn fluid_traction<T: Scalar>(
    p: T,
    grad_p: V2<T>,
    h: T,
    normal: V2<T>,
    v_rel: V2<T>,
    fluid: &FluidParams,
    sigma: f64,
) -> (V2<T>, V2<T>) {
    let (phi_p, phi_s, phi_f) = flow_factors_t(h, sigma);
    let t_par = grad_p.scale(h * phi_p * -0.5);
    let t_perp = normal.scale(-p) - v_rel.scale(h.recip() * (phi_f + phi_s) * fluid.viscosity);
    (t_par, t_perp)
}

/// A film on a fixed polyline with prescribed thickness and velocities.
#[derive(Clone, Debug)]
pub struct Film {
    pub nodes: Vec<[f64; 2]>,
    pub h: Vec<f64>,
    /// Thickness at the previous step; ignored when `dt` is infinite.
    pub h_prev: Vec<f64>,
    pub v_mean: Vec<[f64; 2]>,
    pub v_rel: Vec<[f64; 2]>,
    /// Prescribed pressure per node.
    pub dirichlet: Vec<Option<f64>>,
}

impl Film {
    /// Steady film between a resting slave and a master sliding with `u`
    /// along the chain direction, with `p = 0` at both ends.
    pub fn sliding(nodes: Vec<[f64; 2]>, h: Vec<f64>, u: [f64; 2]) -> Self {
        let n = nodes.len();
        let mut dirichlet = vec![None; n];
        dirichlet[0] = Some(0.0);
        dirichlet[n - 1] = Some(0.0);
        Self {
            h_prev: h.clone(),
            v_mean: vec![[0.5 * u[0], 0.5 * u[1]]; n],
            v_rel: vec![[-0.5 * u[0], -0.5 * u[1]]; n],
            nodes,
            h,
            dirichlet,
        }
    }

    fn check(&self) -> Result<()> {
        let n = self.nodes.len();
        if n < 2 || [self.h.len(), self.h_prev.len(), self.v_mean.len(), self.v_rel.len(), self.dirichlet.len()]
            .iter()
            .any(|&m| m != n)
        {
            return Err(Error::InvalidParameter("film arrays must share the node count (>= 2)".into()));
        }
        if let Some(k) = self.h.iter().position(|h| !(*h > 0.0)) {
            return Err(Error::ModelViolation { node: k, h: self.h[k] });
        }
        Ok(())
    }

    fn facet<T: Scalar>(&self, e: usize, p: [T; 2]) -> FacetState<T> {
        let c = |v: [f64; 2]| V2::<T>::cst(v);
        FacetState {
            x: [c(self.nodes[e]), c(self.nodes[e + 1])],
            p,
            h: [T::cst(self.h[e]), T::cst(self.h[e + 1])],
            h_prev: [self.h_prev[e], self.h_prev[e + 1]],
            v_mean: [c(self.v_mean[e]), c(self.v_mean[e + 1])],
            v_rel: [c(self.v_rel[e]), c(self.v_rel[e + 1])],
        }
    }

    /// Full nodal residual including the rows of Dirichlet nodes.
    pub fn residual(&self, p: &[f64], fluid: &FluidParams, sigma: f64, dt: f64) -> Result<Vec<f64>> {
        self.check()?;
        let mut r = vec![0.0; self.nodes.len()];
        for e in 0..self.nodes.len() - 1 {
            let re = facet_residual(&self.facet(e, [p[e], p[e + 1]]), fluid, sigma, dt);
            r[e] += re[0];
            r[e + 1] += re[1];
        }
        Ok(r)
    }

    /// Newton solve for the pressure; returns nodal pressures.
    pub fn solve(&self, fluid: &FluidParams, sigma: f64, dt: f64, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
        self.check()?;
        fluid.validate()?;
        let n = self.nodes.len();
        let mut eq = vec![None; n];
        let mut n_eq = 0;
        let mut p = vec![0.0; n];
        for k in 0..n {
            match self.dirichlet[k] {
                Some(v) => p[k] = v,
                None => {
                    eq[k] = Some(n_eq);
                    n_eq += 1;
                }
            }
        }
        let mut last = f64::INFINITY;
        for _ in 0..max_iter {
            let mut rr = vec![0.0; n_eq];
            let mut jac = Coo::new(n_eq, n_eq);
            for e in 0..n - 1 {
                let pd = [Dual::<2>::variable(p[e], 0), Dual::<2>::variable(p[e + 1], 1)];
                let re = facet_residual(&self.facet(e, pd), fluid, sigma, dt);
                for a in 0..2 {
                    let Some(row) = eq[e + a] else { continue };
                    rr[row] += re[a].v;
                    for b in 0..2 {
                        if let Some(col) = eq[e + b] {
                            jac.push(row, col, re[a].d[b]);
                        }
                    }
                }
            }
            last = rr.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if last <= tol {
                return Ok(p);
            }
            let dp = jac.solve(&rr.iter().map(|v| -v).collect::<Vec<_>>())?;
            for k in 0..n {
                if let Some(e) = eq[k] {
                    p[k] += dp[e];
                }
            }
        }
        Err(Error::NotConverged {
            iterations: max_iter,
            residual: last,
        })
    }

    /// Nodal lumped weights `int N_k` of the film.
    pub fn nodal_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.nodes.len()];
        for e in 0..self.nodes.len() - 1 {
            let (a, b) = (self.nodes[e], self.nodes[e + 1]);
            let l = (b[0] - a[0]).hypot(b[1] - a[1]);
            w[e] += 0.5 * l;
            w[e + 1] += 0.5 * l;
        }
        w
    }
}

#[cfg(test)]
mod tests;
