//! Monolithic solid-film-contact problem against a rigid plane.
//!
//! Unknowns per step are displacement increments on the free equations,
//! nodal film pressures inside the lubrication zone and two contact
//! multipliers per candidate slave node. The semi-smooth Newton iteration
//! re-selects the contact branch at every iterate and stops once all residual
//! groups are below tolerance with an unchanged active set.

mod condense;
mod interface;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contact::{ContactStatus, RegularizationParams};
use crate::error::{Error, Result};
use crate::lubrication::FluidParams;
use crate::mortar::RigidPlane;
use crate::solid::{DofMap, Solid, SolidState, Stepper, TimeIntegrator};
use crate::sparse::Coo;

use condense::{solve_condensed, RowSystem};
use interface::{Surface, Var};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterfaceParams {
    pub fluid: FluidParams,
    pub regularization: RegularizationParams,
    /// Coulomb coefficient of the dry asperity contact.
    pub friction: f64,
    /// Slave nodes further than this from the plane carry no film or contact.
    pub search_radius: f64,
    /// Normal complementarity constant; defaults to `kappa`.
    #[serde(default)]
    pub c_n: Option<f64>,
    /// Tangential complementarity constant [MPa s/mm]; defaults to `kappa * 1 s`.
    #[serde(default)]
    pub c_t: Option<f64>,
}

impl InterfaceParams {
    pub fn c_n(&self) -> f64 {
        self.c_n.unwrap_or(self.regularization.kappa)
    }

    pub fn c_t(&self) -> f64 {
        self.c_t.unwrap_or(self.regularization.kappa)
    }

    pub fn validate(&self) -> Result<()> {
        self.fluid.validate()?;
        self.regularization.validate()?;
        if !(self.friction >= 0.0) {
            return Err(Error::InvalidParameter(format!("friction must be nonnegative, got {}", self.friction)));
        }
        if !(self.search_radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "search radius must be positive, got {}",
                self.search_radius
            )));
        }
        if !(self.c_n() > 0.0 && self.c_t() > 0.0) {
            return Err(Error::InvalidParameter("complementarity constants must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
    /// Eliminate the contact multipliers before the linear solve.
    pub condense: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 50,
            max_halvings: 5,
            condense: true,
        }
    }
}

/// Boundary data at the end of a step.
#[derive(Clone, Debug)]
pub struct Loading {
    pub map: DofMap,
    /// Values of fixed dofs; unlisted fixed dofs keep their previous value.
    pub prescribed: Vec<(usize, f64)>,
    pub f_ext: Vec<f64>,
    pub plane: RigidPlane,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoupledState {
    pub solid: SolidState,
    /// Per slave chain node.
    pub p: Vec<f64>,
    pub lambda_n: Vec<f64>,
    pub lambda_t: Vec<f64>,
    pub status: Vec<ContactStatus>,
    /// Film thickness where the node faces the plane.
    pub film: Vec<Option<f64>>,
    /// `f_int - f_lub + inertia` per dof; balances supports and applied loads.
    pub reaction: Vec<f64>,
    pub plane: RigidPlane,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Residuals {
    pub force: f64,
    pub reynolds: f64,
    pub normal: f64,
    pub tangential: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.force.max(self.reynolds).max(self.normal).max(self.tangential)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StepReport {
    pub iterations: usize,
    pub history: Vec<Residuals>,
    /// Number of nodes whose contact branch changed, per iteration.
    pub active_changes: Vec<usize>,
    pub halvings: usize,
    pub substeps: usize,
}

impl StepReport {
    fn merge(mut self, other: StepReport) -> Self {
        self.iterations += other.iterations;
        self.history.extend(other.history);
        self.active_changes.extend(other.active_changes);
        self.halvings = self.halvings.max(other.halvings);
        self.substeps += other.substeps;
        self
    }
}

/// A deformable body whose slave chain meets a rigid plane through a film.
#[derive(Clone, Debug)]
pub struct LubricatedContact {
    pub solid: Solid,
    /// Mesh nodes of the slave chain in chain order.
    pub chain: Vec<usize>,
    pub params: InterfaceParams,
    pub solver: SolverParams,
}

impl LubricatedContact {
    pub fn new(solid: Solid, slave_set: &str, params: InterfaceParams, solver: SolverParams) -> Result<Self> {
        params.validate()?;
        if !(solver.tol > 0.0) || solver.max_iter == 0 {
            return Err(Error::InvalidParameter("solver needs tol > 0 and max_iter >= 1".into()));
        }
        let chain = solid.mesh.surface_chain(slave_set)?.nodes;
        Ok(Self {
            solid,
            chain,
            params,
            solver,
        })
    }

    pub fn initial_state(&self, plane: RigidPlane) -> CoupledState {
        let (nd, nc) = (self.solid.n_dofs(), self.chain.len());
        CoupledState {
            solid: SolidState::at_rest(nd),
            p: vec![0.0; nc],
            lambda_n: vec![0.0; nc],
            lambda_t: vec![0.0; nc],
            status: vec![ContactStatus::Inactive; nc],
            film: vec![None; nc],
            reaction: vec![0.0; nd],
            plane,
        }
    }

    pub fn chain_positions(&self, d: &[f64]) -> Vec<[f64; 2]> {
        self.chain.iter().map(|&n| self.solid.mesh.current_position(n, d)).collect()
    }

    /// Sum of `reaction` over the given nodes.
    pub fn boundary_force(&self, state: &CoupledState, nodes: &[usize]) -> [f64; 2] {
        let mut f = [0.0; 2];
        for &n in nodes {
            f[0] += state.reaction[2 * n];
            f[1] += state.reaction[2 * n + 1];
        }
        f
    }

    pub fn context<'a>(&'a self, prev: &'a CoupledState, stepper: Stepper, load: &'a Loading) -> Result<StepContext<'a>> {
        StepContext::new(self, prev, stepper, load)
    }

    /// One implicit step without step-size control.
    pub fn solve_step(&self, prev: &CoupledState, stepper: Stepper, load: &Loading) -> Result<(CoupledState, StepReport)> {
        let ctx = self.context(prev, stepper, load)?;
        let mut u = ctx.initial_unknowns();
        let mut status: Vec<ContactStatus> = ctx.lam_nodes.iter().map(|&k| prev.status[k]).collect();
        let mut report = StepReport {
            substeps: 1,
            ..Default::default()
        };
        let mut last = f64::INFINITY;
        for it in 0..self.solver.max_iter {
            let ev = ctx.evaluate(&u, true)?;
            let changed = ev.status.iter().zip(&status).filter(|(a, b)| a != b).count();
            report.iterations = it + 1;
            report.history.push(ev.norms);
            report.active_changes.push(changed);
            last = ev.norms.max();
            if !last.is_finite() {
                break;
            }
            if last <= self.solver.tol && changed == 0 {
                return Ok((ctx.finish(&u, ev), report));
            }
            status = ev.status.clone();
            let rhs: Vec<f64> = ev.residual.iter().map(|r| -r).collect();
            let jac = ev.jacobian.expect("jacobian requested");
            let du = if self.solver.condense {
                solve_condensed(RowSystem::from_coo(&jac, rhs, ctx.n_eq + ctx.n_p), &status)?
            } else {
                jac.solve(&rhs)?
            };
            for (a, b) in u.iter_mut().zip(&du) {
                *a += b;
            }
        }
        Err(Error::NotConverged {
            iterations: report.iterations,
            residual: last,
        })
    }

    /// Advances by `dt`, halving the step on failure up to the configured limit.
    pub fn advance(
        &self,
        prev: &CoupledState,
        integrator: TimeIntegrator,
        dt: f64,
        load_at: &dyn Fn(f64) -> Result<Loading>,
    ) -> Result<(CoupledState, StepReport)> {
        self.advance_level(prev, integrator, dt, load_at, 0)
    }

    fn advance_level(
        &self,
        prev: &CoupledState,
        integrator: TimeIntegrator,
        dt: f64,
        load_at: &dyn Fn(f64) -> Result<Loading>,
        level: usize,
    ) -> Result<(CoupledState, StepReport)> {
        let stepper = Stepper::new(integrator, dt)?;
        let t_end = if dt.is_finite() { prev.solid.time + dt } else { prev.solid.time };
        let load = load_at(t_end)?;
        match self.solve_step(prev, stepper, &load) {
            Ok((s, mut r)) => {
                r.halvings = level;
                Ok((s, r))
            }
            Err(e) if retryable(&e) && level < self.solver.max_halvings && dt.is_finite() => {
                let (mid, r1) = self.advance_level(prev, integrator, 0.5 * dt, load_at, level + 1)?;
                let (end, r2) = self.advance_level(&mid, integrator, 0.5 * dt, load_at, level + 1)?;
                Ok((end, r1.merge(r2)))
            }
            Err(e @ Error::StepFailed { .. }) => Err(e),
            Err(e) if retryable(&e) => Err(Error::StepFailed {
                time: t_end,
                halvings: level,
                cause: Box::new(e),
            }),
            Err(e) => Err(e),
        }
    }
}

fn retryable(e: &Error) -> bool {
    matches!(
        e,
        Error::NotConverged { .. }
            | Error::SingularSystem(_)
            | Error::ModelViolation { .. }
            | Error::InvertedElement { .. }
            | Error::Domain(_)
            | Error::SingularGeometry(_)
    )
}

/// Result of assembling at one iterate.
#[derive(Clone, Debug)]
pub struct Evaluation {
    /// Rows `[force (n_eq), reynolds (n_p), contact (2 n_c)]`.
    pub residual: Vec<f64>,
    pub jacobian: Option<Coo>,
    /// Contact branch per multiplier node.
    pub status: Vec<ContactStatus>,
    pub norms: Residuals,
    reaction: Vec<f64>,
    f_ext_residual: Vec<f64>,
}

/// Per-step bookkeeping: zone, unknown numbering and step-start data.
pub struct StepContext<'a> {
    sys: &'a LubricatedContact,
    prev: &'a CoupledState,
    stepper: Stepper,
    load: &'a Loading,
    d0: Vec<f64>,
    start: Vec<[f64; 2]>,
    v_offset: Vec<[f64; 2]>,
    h_prev: Vec<f64>,
    zone: Vec<bool>,
    p_eq: Vec<Option<usize>>,
    lam_idx: Vec<Option<usize>>,
    lam_nodes: Vec<usize>,
    zone_facets: Vec<usize>,
    pub n_eq: usize,
    pub n_p: usize,
    pub n_c: usize,
}

impl<'a> StepContext<'a> {
    fn new(sys: &'a LubricatedContact, prev: &'a CoupledState, stepper: Stepper, load: &'a Loading) -> Result<Self> {
        let nd = sys.solid.n_dofs();
        if load.map.n_dofs() != nd || load.f_ext.len() != nd {
            return Err(Error::InvalidParameter("loading does not match the mesh".into()));
        }
        let mut d0 = prev.solid.d.clone();
        for &(dof, v) in &load.prescribed {
            if !load.map.is_fixed(dof) {
                return Err(Error::InvalidParameter(format!("prescribed dof {dof} is not fixed")));
            }
            d0[dof] = v;
        }
        let nc = sys.chain.len();
        let start = sys.chain_positions(&prev.solid.d);
        let v_offset = sys
            .chain
            .iter()
            .map(|&n| [stepper.velocity_offset(&prev.solid, 2 * n), stepper.velocity_offset(&prev.solid, 2 * n + 1)])
            .collect();
        let x0 = sys.chain_positions(&d0);
        let reg = &sys.params.regularization;
        let probe = |x: &[[f64; 2]], plane: RigidPlane| -> Vec<Option<f64>> {
            let s = Surface {
                x,
                start: x,
                v_offset: x,
                c_v: 0.0,
                plane,
                p: &[],
                lam_n: &[],
                lam_t: &[],
                h_prev: &[],
                zone: &[],
                fluid: &sys.params.fluid,
                reg,
                dt: f64::INFINITY,
            };
            (0..nc).map(|k| s.kinematics(k).map(|kin| kin.gap)).collect()
        };
        let gaps = probe(&x0, load.plane);
        let gaps_prev = probe(&start, prev.plane);
        let cand: Vec<bool> = gaps
            .iter()
            .map(|g| g.is_some_and(|g| g <= sys.params.search_radius))
            .collect();
        let zone: Vec<bool> = (0..nc.saturating_sub(1)).map(|e| cand[e] && cand[e + 1]).collect();
        let zone_facets = (0..zone.len()).filter(|&e| zone[e]).collect();
        let mut p_eq = vec![None; nc];
        let mut n_p = 0;
        for k in 1..nc.saturating_sub(1) {
            if zone[k - 1] && zone[k] {
                p_eq[k] = Some(n_p);
                n_p += 1;
            }
        }
        let mut lam_idx = vec![None; nc];
        let mut lam_nodes = Vec::new();
        for k in 0..nc {
            if cand[k] {
                lam_idx[k] = Some(lam_nodes.len());
                lam_nodes.push(k);
            }
        }
        let h_prev = (0..nc)
            .map(|k| gaps_prev[k].or(gaps[k]).map_or(f64::NAN, |g| reg.film(g)))
            .collect();
        Ok(Self {
            sys,
            prev,
            stepper,
            load,
            d0,
            start,
            v_offset,
            h_prev,
            zone,
            p_eq,
            lam_idx,
            n_c: lam_nodes.len(),
            lam_nodes,
            zone_facets,
            n_eq: load.map.n_eq(),
            n_p,
        })
    }

    pub fn n_unknowns(&self) -> usize {
        self.n_eq + self.n_p + 2 * self.n_c
    }

    /// Chain nodes carrying pressure unknowns.
    pub fn pressure_nodes(&self) -> Vec<usize> {
        (0..self.p_eq.len()).filter(|&k| self.p_eq[k].is_some()).collect()
    }

    /// Chain nodes carrying contact multipliers.
    pub fn contact_nodes(&self) -> &[usize] {
        &self.lam_nodes
    }

    /// Zero increments, previous pressures and multipliers.
    pub fn initial_unknowns(&self) -> Vec<f64> {
        let mut u = vec![0.0; self.n_unknowns()];
        for (k, e) in self.p_eq.iter().enumerate() {
            if let Some(e) = e {
                u[self.n_eq + e] = self.prev.p[k];
            }
        }
        let base = self.n_eq + self.n_p;
        for (c, &k) in self.lam_nodes.iter().enumerate() {
            u[base + 2 * c] = self.prev.lambda_n[k];
            u[base + 2 * c + 1] = self.prev.lambda_t[k];
        }
        u
    }

    fn unpack(&self, u: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let nc = self.sys.chain.len();
        let mut d = self.d0.clone();
        self.load.map.apply_increment(&mut d, &u[..self.n_eq]);
        let mut p = vec![0.0; nc];
        for (k, e) in self.p_eq.iter().enumerate() {
            if let Some(e) = e {
                p[k] = u[self.n_eq + e];
            }
        }
        let (mut ln, mut lt) = (vec![0.0; nc], vec![0.0; nc]);
        let base = self.n_eq + self.n_p;
        for (c, &k) in self.lam_nodes.iter().enumerate() {
            ln[k] = u[base + 2 * c];
            lt[k] = u[base + 2 * c + 1];
        }
        (d, p, ln, lt)
    }

    fn column(&self, v: Var) -> Option<usize> {
        let base = self.n_eq + self.n_p;
        match v {
            Var::Pos(j, c) => self.load.map.eq(2 * self.sys.chain[j] + c),
            Var::P(j) => self.p_eq[j].map(|e| self.n_eq + e),
            Var::LamN(j) => self.lam_idx[j].map(|c| base + 2 * c),
            Var::LamT(j) => self.lam_idx[j].map(|c| base + 2 * c + 1),
        }
    }

    /// Residual (and Jacobian) at the unknown vector `u`.
    pub fn evaluate(&self, u: &[f64], jacobian: bool) -> Result<Evaluation> {
        let sys = self.sys;
        let prm = &sys.params;
        let (d, p, ln, lt) = self.unpack(u);
        let x = sys.chain_positions(&d);
        let surface = Surface {
            x: &x,
            start: &self.start,
            v_offset: &self.v_offset,
            c_v: self.stepper.velocity_coeff(),
            plane: self.load.plane,
            p: &p,
            lam_n: &ln,
            lam_t: &lt,
            h_prev: &self.h_prev,
            zone: &self.zone,
            fluid: &prm.fluid,
            reg: &prm.regularization,
            dt: self.stepper.dt,
        };
        let n_tot = self.n_unknowns();
        let mut coo = jacobian.then(|| Coo::new(n_tot, n_tot));
        let fint = match coo.as_mut() {
            Some(c) => sys.solid.assemble_into(&d, &self.load.map, self.stepper.mass_coeff(), c)?,
            None => sys.solid.internal_force(&d)?,
        };
        let inertia = self.stepper.inertial_residual(&sys.solid, &self.prev.solid, &d)?;

        let forces = self
            .lam_nodes
            .par_iter()
            .map(|&k| surface.force(k))
            .collect::<Result<Vec<_>>>()?;
        let facets = self
            .zone_facets
            .par_iter()
            .map(|&e| surface.facet(e))
            .collect::<Result<Vec<_>>>()?;
        let (mu, c_n, c_t) = (prm.friction, prm.c_n(), prm.c_t());
        let contacts = self
            .lam_nodes
            .par_iter()
            .map(|&k| surface.contact(k, mu, c_n, c_t))
            .collect::<Result<Vec<_>>>()?;

        let mut reaction: Vec<f64> = fint.iter().zip(&inertia).map(|(a, b)| a + b).collect();
        for (f, &k) in forces.iter().zip(&self.lam_nodes) {
            for c in 0..2 {
                reaction[2 * sys.chain[k] + c] -= f.value[c];
            }
        }
        let full: Vec<f64> = reaction.iter().zip(&self.load.f_ext).map(|(a, b)| a - b).collect();
        let mut residual = self.load.map.reduce(&full);
        residual.resize(n_tot, 0.0);
        for (s, &e) in facets.iter().zip(&self.zone_facets) {
            for a in 0..2 {
                if let Some(row) = self.p_eq[e + a] {
                    residual[self.n_eq + row] += s.value[a];
                }
            }
        }
        let base = self.n_eq + self.n_p;
        for (c, cr) in contacts.iter().enumerate() {
            residual[base + 2 * c] = cr.rows.value[0];
            residual[base + 2 * c + 1] = cr.rows.value[1];
        }

        if let Some(coo) = coo.as_mut() {
            for (f, &k) in forces.iter().zip(&self.lam_nodes) {
                for c in 0..2 {
                    let Some(row) = self.load.map.eq(2 * sys.chain[k] + c) else { continue };
                    for (s, v) in f.vars.iter().enumerate() {
                        if let Some(col) = v.and_then(|v| self.column(v)) {
                            coo.push(row, col, -f.grad[c][s]);
                        }
                    }
                }
            }
            for (st, &e) in facets.iter().zip(&self.zone_facets) {
                for a in 0..2 {
                    let Some(row) = self.p_eq[e + a] else { continue };
                    for (s, v) in st.vars.iter().enumerate() {
                        if let Some(col) = v.and_then(|v| self.column(v)) {
                            coo.push(self.n_eq + row, col, st.grad[a][s]);
                        }
                    }
                }
            }
            for (c, cr) in contacts.iter().enumerate() {
                for r in 0..2 {
                    for (s, v) in cr.rows.vars.iter().enumerate() {
                        if let Some(col) = v.and_then(|v| self.column(v)) {
                            coo.push(base + 2 * c + r, col, cr.rows.grad[r][s]);
                        }
                    }
                }
            }
        }

        let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let norms = Residuals {
            force: inf(&residual[..self.n_eq]),
            reynolds: inf(&residual[self.n_eq..base]),
            normal: contacts.iter().fold(0.0f64, |m, c| m.max(c.ncp[0].abs())),
            tangential: contacts.iter().fold(0.0f64, |m, c| m.max(c.ncp[1].abs())),
        };
        Ok(Evaluation {
            residual,
            jacobian: coo,
            status: contacts.iter().map(|c| c.status).collect(),
            norms,
            reaction,
            f_ext_residual: full,
        })
    }

    fn finish(&self, u: &[f64], ev: Evaluation) -> CoupledState {
        let sys = self.sys;
        let (d, p, ln, lt) = self.unpack(u);
        let nc = sys.chain.len();
        let mut status = vec![ContactStatus::Inactive; nc];
        for (c, &k) in self.lam_nodes.iter().enumerate() {
            status[k] = ev.status[c];
        }
        let x = sys.chain_positions(&d);
        let surface = Surface {
            x: &x,
            start: &self.start,
            v_offset: &self.v_offset,
            c_v: self.stepper.velocity_coeff(),
            plane: self.load.plane,
            p: &p,
            lam_n: &ln,
            lam_t: &lt,
            h_prev: &self.h_prev,
            zone: &self.zone,
            fluid: &sys.params.fluid,
            reg: &sys.params.regularization,
            dt: self.stepper.dt,
        };
        let reg = &sys.params.regularization;
        let film = (0..nc).map(|k| surface.kinematics(k).map(|kin| reg.film(kin.gap))).collect();
        let inertia_free: Vec<f64> = ev.f_ext_residual.clone();
        // the out-of-balance force excludes inertia
        let inertia = self
            .stepper
            .inertial_residual(&sys.solid, &self.prev.solid, &d)
            .unwrap_or_else(|_| vec![0.0; d.len()]);
        let force: Vec<f64> = inertia_free.iter().zip(&inertia).map(|(a, b)| a - b).collect();
        let mut solid = self.stepper.advance_with(&self.prev.solid, d, force);
        if !self.stepper.dt.is_finite() {
            solid.time = self.prev.solid.time;
        }
        CoupledState {
            solid,
            p,
            lambda_n: ln,
            lambda_t: lt,
            status,
            film,
            reaction: ev.reaction,
            plane: self.load.plane,
        }
    }
}
