//! Local interface stencils, each written once over [`Scalar`] and evaluated
//! with dual numbers seeded on the stencil unknowns.

use crate::ad::{Dual, Scalar, V2};
use crate::contact::{classify, ncp_normal, ncp_tangential, ContactStatus, RegularizationParams};
use crate::error::{Error, Result};
use crate::lubrication::{facet_residual, fluid_traction, FacetState, FluidParams};
use crate::mortar::rigid::{facet_geom, nodal_kinematics, NodalKinematics};
use crate::mortar::RigidPlane;

/// Unknown behind a stencil slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Var {
    /// Chain node and component.
    Pos(usize, usize),
    P(usize),
    LamN(usize),
    LamT(usize),
}

/// Values and local gradients of `R` rows over `N` slots.
#[derive(Clone, Debug)]
pub(crate) struct Stencil<const N: usize, const R: usize> {
    pub vars: [Option<Var>; N],
    pub value: [f64; R],
    pub grad: [[f64; N]; R],
}

impl<const N: usize, const R: usize> Stencil<N, R> {
    fn from_duals(vars: [Option<Var>; N], rows: [Dual<N>; R]) -> Self {
        Self {
            vars,
            value: rows.map(|r| r.v),
            grad: rows.map(|r| r.d),
        }
    }
}

/// Contact rows of one node together with the true NCP values.
#[derive(Clone, Debug)]
pub(crate) struct ContactRows {
    pub status: ContactStatus,
    pub rows: Stencil<8, 2>,
    pub ncp: [f64; 2],
}

/// Everything the stencils read at one Newton iterate.
pub(crate) struct Surface<'a> {
    pub x: &'a [[f64; 2]],
    /// Positions at the start of the step.
    pub start: &'a [[f64; 2]],
    pub v_offset: &'a [[f64; 2]],
    pub c_v: f64,
    pub plane: RigidPlane,
    pub p: &'a [f64],
    pub lam_n: &'a [f64],
    pub lam_t: &'a [f64],
    pub h_prev: &'a [f64],
    pub zone: &'a [bool],
    pub fluid: &'a FluidParams,
    pub reg: &'a RegularizationParams,
    pub dt: f64,
}

fn window(k: usize, before: usize, after: usize, n: usize) -> std::ops::RangeInclusive<usize> {
    k.saturating_sub(before)..=(k + after).min(n - 1)
}

impl Surface<'_> {
    fn n(&self) -> usize {
        self.x.len()
    }

    /// Position accessor seeding the listed chain nodes on slots `2i, 2i+1`.
    fn seeded<const N: usize>(&self, nodes: &[usize]) -> impl Fn(usize) -> V2<Dual<N>> + '_ {
        let nodes = nodes.to_vec();
        move |j| match nodes.iter().position(|&m| m == j) {
            Some(i) => V2::new(
                Dual::variable(self.x[j][0], 2 * i),
                Dual::variable(self.x[j][1], 2 * i + 1),
            ),
            None => V2::cst(self.x[j]),
        }
    }

    fn kin<T: Scalar>(&self, k: usize, pos: &impl Fn(usize) -> V2<T>) -> Result<NodalKinematics<T>> {
        let prev = (k > 0).then(|| pos(k - 1));
        let next = (k + 1 < self.n()).then(|| pos(k + 1));
        let x = pos(k);
        let v = (x - V2::cst(self.start[k])).scalef(self.c_v) + V2::cst(self.v_offset[k]);
        nodal_kinematics(prev, x, next, v, &self.plane)
            .ok_or_else(|| Error::Domain(format!("slave node {k} no longer faces the master")))
    }

    fn film<T: Scalar>(&self, k: usize, kin: &NodalKinematics<T>) -> Result<T> {
        let h = self.reg.film(kin.gap);
        if !(h.re() > 0.0) {
            return Err(Error::ModelViolation { node: k, h: h.re() });
        }
        Ok(h)
    }

    fn pos_vars<const N: usize>(nodes: &[usize], vars: &mut [Option<Var>; N]) {
        for (i, &j) in nodes.iter().enumerate() {
            vars[2 * i] = Some(Var::Pos(j, 0));
            vars[2 * i + 1] = Some(Var::Pos(j, 1));
        }
    }

    /// Reynolds rows of facet `e` (nodes `e`, `e + 1`).
    pub fn facet(&self, e: usize) -> Result<Stencil<10, 2>> {
        let nodes: Vec<usize> = window(e, 1, 2, self.n()).collect();
        let pos = self.seeded::<10>(&nodes);
        let mut vars = [None; 10];
        Self::pos_vars(&nodes, &mut vars);
        vars[8] = Some(Var::P(e));
        vars[9] = Some(Var::P(e + 1));
        let (ka, kb) = (self.kin(e, &pos)?, self.kin(e + 1, &pos)?);
        let state = FacetState {
            x: [pos(e), pos(e + 1)],
            p: [Dual::variable(self.p[e], 8), Dual::variable(self.p[e + 1], 9)],
            h: [self.film(e, &ka)?, self.film(e + 1, &kb)?],
            h_prev: [self.h_prev[e], self.h_prev[e + 1]],
            v_mean: [ka.mean_velocity(), kb.mean_velocity()],
            v_rel: [ka.rel_velocity(), kb.rel_velocity()],
        };
        let r = facet_residual(&state, self.fluid, self.reg.sigma, self.dt);
        Ok(Stencil::from_duals(vars, r))
    }

    /// Interface force on slave node `k`; fluid tractions only when the node
    /// borders the lubrication zone.
    pub fn force(&self, k: usize) -> Result<Stencil<11, 2>> {
        let n = self.n();
        let nodes: Vec<usize> = window(k, 1, 1, n).collect();
        let pos = self.seeded::<11>(&nodes);
        let mut vars = [None; 11];
        Self::pos_vars(&nodes, &mut vars);
        let p_slot = |j: usize| 6 + j + 1 - k;
        for j in window(k, 1, 1, n) {
            vars[p_slot(j)] = Some(Var::P(j));
        }
        vars[9] = Some(Var::LamN(k));
        vars[10] = Some(Var::LamT(k));
        let p = |j: usize| Dual::<11>::variable(self.p[j], p_slot(j));
        let kin = self.kin(k, &pos)?;
        let mut t = V2::zero();
        let facets: Vec<usize> = [k.checked_sub(1), (k + 1 < n).then_some(k)]
            .into_iter()
            .flatten()
            .filter(|&e| self.zone[e])
            .collect();
        if !facets.is_empty() {
            let h = self.film(k, &kin)?;
            let mut num = V2::zero();
            let mut den = Dual::constant(0.0);
            for &e in &facets {
                let g = facet_geom(pos(e), pos(e + 1));
                let half = g.len * 0.5;
                num += g.tangent.scale((p(e + 1) - p(e)) * half / g.len);
                den += half;
            }
            let grad = num.scale(den.recip());
            let (tp, tn) = fluid_traction(p(k), grad, h, kin.normal, kin.rel_velocity(), self.fluid, self.reg.sigma);
            t = tp + tn;
        }
        let ln = Dual::variable(self.lam_n[k], 9);
        let lt = Dual::variable(self.lam_t[k], 10);
        t = t - kin.normal.scale(ln) - kin.tangent.scale(lt);
        let f = t.scale(kin.weight);
        Ok(Stencil::from_duals(vars, [f.x, f.y]))
    }

    /// Contact rows of node `k` on the branch chosen by the current iterate.
    ///
    /// Inactive: `[lambda_n, lambda_t]`. Active: `c_n (g + gap(lambda_n))`,
    /// then `c_t v` in stick or `lambda_t - mu s lambda_n` in slip.
    pub fn contact(&self, k: usize, mu: f64, c_n: f64, c_t: f64) -> Result<ContactRows> {
        let nodes: Vec<usize> = window(k, 1, 1, self.n()).collect();
        let pos = self.seeded::<8>(&nodes);
        let mut vars = [None; 8];
        Self::pos_vars(&nodes, &mut vars);
        vars[6] = Some(Var::LamN(k));
        vars[7] = Some(Var::LamT(k));
        let kin = self.kin(k, &pos)?;
        let g = kin.gap;
        let v = (kin.v_slave - kin.v_master).dot(kin.tangent);
        let ln = Dual::<8>::variable(self.lam_n[k], 6);
        let lt = Dual::<8>::variable(self.lam_t[k], 7);
        let (lnv, ltv, gv, vv) = (ln.v, lt.v, g.v, v.v);
        let mut status = classify(lnv, ltv, gv, vv, self.reg, mu, c_n, c_t);
        if status == ContactStatus::Stick && mu == 0.0 {
            status = ContactStatus::Slip;
        }
        let rows = match status {
            ContactStatus::Inactive => [ln, lt],
            ContactStatus::Stick => [(g + self.reg.gap_law(ln)) * c_n, v * c_t],
            ContactStatus::Slip => {
                let s = if ltv + c_t * vv < 0.0 { -1.0 } else { 1.0 };
                [(g + self.reg.gap_law(ln)) * c_n, lt - ln * (mu * s)]
            }
        };
        Ok(ContactRows {
            status,
            rows: Stencil::from_duals(vars, rows),
            ncp: [
                ncp_normal(lnv, gv, self.reg, c_n),
                ncp_tangential(ltv, lnv, vv, mu, c_t),
            ],
        })
    }

    /// Plain `f64` kinematics for bookkeeping.
    pub fn kinematics(&self, k: usize) -> Option<NodalKinematics<f64>> {
        let pos = |j: usize| V2::cst(self.x[j]);
        self.kin(k, &pos).ok()
    }
}
