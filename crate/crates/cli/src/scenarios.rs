//! Scenario drivers. Each builds the body and its supports, steps the coupled
//! problem and records one row per converged step.

use lubrimortar::mesh::{generate_half_cylinder, generate_pin_layers, parse_mesh, DIRICHLET};
use lubrimortar::solid::DofMap;
use lubrimortar::{CoupledState, Error, Loading, LubricatedContact, Mesh, RigidPlane, Solid, StepReport};

use crate::artifacts::{Failure, ProfileRow, RunArtifacts, Snapshot, StepRow, StribeckRow};
use crate::config::{Config, ConfigError, Scenario};

/// `|F_x| / |F_y|` of a support reaction; zero while unloaded.
pub fn friction_coefficient(force: [f64; 2]) -> f64 {
    if force[1] == 0.0 {
        0.0
    } else {
        (force[0] / force[1]).abs()
    }
}

/// Sliding speed [mm/s] for a product `U eta` given in N/m.
pub fn speed_for(u_eta: f64, viscosity: f64) -> f64 {
    u_eta * 1e-3 / viscosity
}

pub fn u_eta_for(speed: f64, viscosity: f64) -> f64 {
    speed * viscosity * 1e3
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measures {
    pub friction: f64,
    pub min_film: f64,
    pub max_pressure: f64,
    pub max_contact: f64,
}

pub fn measure(sys: &LubricatedContact, state: &CoupledState, support: &[usize]) -> Measures {
    let force = sys.boundary_force(state, support);
    let max = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(*x));
    let films: Vec<f64> = state.film.iter().flatten().copied().collect();
    Measures {
        friction: friction_coefficient(force),
        min_film: if films.is_empty() {
            0.0
        } else {
            films.iter().fold(f64::INFINITY, |m, h| m.min(*h))
        },
        max_pressure: max(&state.p),
        max_contact: max(&state.lambda_n),
    }
}

pub fn profile(sys: &LubricatedContact, state: &CoupledState) -> Vec<ProfileRow> {
    let x = sys.chain_positions(&state.solid.d);
    (0..x.len())
        .filter_map(|k| {
            state.film[k].map(|h| ProfileRow {
                node: sys.chain[k],
                x: x[k][0],
                y: x[k][1],
                p: state.p[k],
                lambda_n: state.lambda_n[k],
                h,
            })
        })
        .collect()
}

/// Supported nodes and the loadings built on them.
#[derive(Clone, Debug)]
pub struct Supports {
    pub n_dofs: usize,
    pub nodes: Vec<usize>,
}

impl Supports {
    /// Supported dofs follow `disp`; the plane is given.
    pub fn displacement_load(&self, disp: [f64; 2], plane: RigidPlane) -> Result<Loading, Error> {
        let fixed: Vec<usize> = self.nodes.iter().flat_map(|&n| [2 * n, 2 * n + 1]).collect();
        Ok(Loading {
            map: DofMap::new(self.n_dofs, &fixed, &[])?,
            prescribed: fixed.iter().map(|&d| (d, disp[d % 2])).collect(),
            f_ext: vec![0.0; self.n_dofs],
            plane,
        })
    }

    /// Supports held horizontally and tied vertically under a total downward
    /// force `w`.
    pub fn force_load(&self, w: f64, plane: RigidPlane) -> Result<Loading, Error> {
        let fixed: Vec<usize> = self.nodes.iter().map(|&n| 2 * n).collect();
        let tied: Vec<usize> = self.nodes.iter().map(|&n| 2 * n + 1).collect();
        let mut f_ext = vec![0.0; self.n_dofs];
        for &d in &tied {
            f_ext[d] = -w / tied.len() as f64;
        }
        Ok(Loading {
            map: DofMap::new(self.n_dofs, &fixed, &[tied])?,
            prescribed: Vec::new(),
            f_ext,
            plane,
        })
    }
}

/// Mutable run bookkeeping around one coupled system.
pub struct Run<'a> {
    pub cfg: &'a Config,
    pub sys: LubricatedContact,
    pub support: Supports,
    pub state: CoupledState,
    pub arts: RunArtifacts,
    pub step: usize,
}

impl<'a> Run<'a> {
    fn new(cfg: &'a Config, mesh: Mesh, slave: &str, support_set: &str, plane: RigidPlane) -> Result<Self, Error> {
        let n_bodies = mesh.elements.iter().map(|e| e.body + 1).max().unwrap_or(1);
        let nodes = mesh.nodes_in(support_set);
        if nodes.is_empty() {
            return Err(Error::InvalidParameter(format!("support set '{support_set}' is empty")));
        }
        let solid = Solid::new(mesh, vec![cfg.material; n_bodies])?;
        let sys = LubricatedContact::new(solid, slave, cfg.interface(), cfg.solver)?;
        let state = sys.initial_state(plane);
        let support = Supports {
            n_dofs: sys.solid.n_dofs(),
            nodes,
        };
        Ok(Self {
            cfg,
            sys,
            support,
            state,
            arts: RunArtifacts::default(),
            step: 0,
        })
    }

    pub fn measure(&self) -> Measures {
        measure(&self.sys, &self.state, &self.support.nodes)
    }

    /// One step of size `dt`; a converged step is recorded, a failed one
    /// leaves the state untouched.
    pub fn advance(&mut self, dt: f64, load_at: &dyn Fn(f64) -> Result<Loading, Error>) -> Result<StepReport, Error> {
        let (s, r) = self.sys.advance(&self.state, self.cfg.integrator, dt, load_at)?;
        self.state = s;
        self.step += 1;
        self.arts.newton_iterations += r.iterations;
        self.arts.max_halvings = self.arts.max_halvings.max(r.halvings);
        let m = self.measure();
        self.arts.steps.push(StepRow {
            step: self.step,
            time: self.state.solid.time,
            friction: m.friction,
            min_film: m.min_film,
            max_pressure: m.max_pressure,
            max_contact: m.max_contact,
        });
        if self.cfg.output.snapshots.contains(&self.step) {
            self.snapshot();
        }
        Ok(r)
    }

    pub fn snapshot(&mut self) {
        if self.arts.snapshots.last().is_some_and(|s| s.step == self.step) {
            return;
        }
        self.arts.snapshots.push(Snapshot {
            step: self.step,
            rows: profile(&self.sys, &self.state),
        });
    }

    pub fn fail(&mut self, at: usize, e: &Error) {
        eprintln!("step failure at {at}: {e}");
        self.arts.failures.push(Failure {
            at,
            time: self.state.solid.time,
            message: e.to_string(),
        });
    }

    fn finish(mut self) -> RunArtifacts {
        if self.cfg.output.snapshots.is_empty() && self.step > 0 {
            self.snapshot();
        }
        self.arts
    }
}

/// Runs the configured scenario. Solver failures end up in the artifacts;
/// only setup problems are returned as errors.
pub fn run(cfg: &Config) -> Result<RunArtifacts, ConfigError> {
    let setup = |e: Error| ConfigError(format!("setup failed: {e}"));
    match cfg.scenario {
        Scenario::PinOnPlane | Scenario::StribeckSweep => run_pin(cfg).map_err(setup),
        Scenario::CylinderOnFlat => run_cylinder(cfg).map_err(setup),
        Scenario::CustomMesh => run_custom(cfg).map_err(setup),
    }
}

fn plane(height: f64, velocity: [f64; 2]) -> RigidPlane {
    RigidPlane { height, velocity }
}

fn pin_run(cfg: &Config) -> Result<Run<'_>, Error> {
    let p = &cfg.pin;
    let n_vert = p.n_vert.unwrap_or(((p.n_surf as f64 * p.height / p.length).round() as usize).max(1));
    let mut mesh = generate_pin_layers(p.radius, p.height, p.length, p.n_surf, n_vert)?;
    mesh.translate(0.0, p.initial_gap);
    Run::new(cfg, mesh, lubrimortar::mesh::SLAVE, DIRICHLET, plane(0.0, [0.0; 2]))
}

/// Lowers the pin at constant speed onto the resting plane until the support
/// carries `W`. Returns false if that never happens.
fn approach(run: &mut Run) -> bool {
    let p = &run.cfg.pin;
    let w = p.load.expect("validated");
    let sup = run.support.clone();
    let load_at = |t: f64| sup.displacement_load([0.0, -p.approach_speed * t], plane(0.0, [0.0; 2]));
    for _ in 0..p.max_approach_steps {
        let at = run.step + 1;
        if let Err(e) = run.advance(p.approach_dt, &load_at) {
            run.fail(at, &e);
            return false;
        }
        if -run.sys.boundary_force(&run.state, &run.support.nodes)[1] >= w {
            return true;
        }
    }
    let e = Error::InvalidParameter(format!("load {w} not reached within {} approach steps", p.max_approach_steps));
    run.fail(run.step, &e);
    false
}

/// Pin pressed onto the resting plane with the configured load; `None` if
/// the approach failed (recorded in the artifacts).
pub fn loaded_pin(cfg: &Config) -> Result<(Run<'_>, bool), Error> {
    let mut run = pin_run(cfg)?;
    let ok = approach(&mut run);
    Ok((run, ok))
}

fn run_pin(cfg: &Config) -> Result<RunArtifacts, Error> {
    let (mut run, ok) = loaded_pin(cfg)?;
    if !ok {
        return Ok(run.finish());
    }
    match cfg.scenario {
        Scenario::StribeckSweep => sweep(&mut run)?,
        _ => accelerate(&mut run)?,
    }
    Ok(run.finish())
}

/// Plane accelerated from rest under constant load; every sliding step is a
/// point of the curve.
fn accelerate(run: &mut Run) -> Result<(), Error> {
    let cfg = run.cfg;
    let p = &cfg.pin;
    let w = p.load.expect("validated");
    let t0 = run.state.solid.time;
    let n = (p.max_velocity / (p.acceleration * p.dt) - 1e-9).ceil().max(1.0) as usize;
    let mut rows = Vec::new();
    let sup = run.support.clone();
    let speed = |t: f64| (p.acceleration * (t - t0)).min(p.max_velocity);
    let load_at = |t: f64| sup.force_load(w, plane(0.0, [speed(t), 0.0]));
    for _ in 0..n {
        let at = run.step + 1;
        if let Err(e) = run.advance(p.dt, &load_at) {
            run.fail(at, &e);
            break;
        }
        let m = run.measure();
        rows.push(StribeckRow {
            u_eta: u_eta_for(speed(run.state.solid.time), cfg.fluid.viscosity),
            friction: m.friction,
            min_film: m.min_film,
            max_pressure: m.max_pressure,
            max_contact: m.max_contact,
        });
    }
    run.arts.stribeck = Some(rows);
    Ok(())
}

/// Steady sliding per point, reached by steps growing geometrically until the
/// friction coefficient drifts less than `drift_tol` over `window` steps.
fn sweep(run: &mut Run) -> Result<(), Error> {
    let cfg = run.cfg;
    let s = &cfg.sweep;
    let w = cfg.pin.load.expect("validated");
    let mut rows = Vec::new();
    for (i, &ue) in s.u_eta.iter().enumerate() {
        let load = run.support.force_load(w, plane(0.0, [speed_for(ue, cfg.fluid.viscosity), 0.0]))?;
        let load_at = |_t: f64| Ok(load.clone());
        let mut hist: Vec<f64> = Vec::new();
        let mut done = false;
        for k in 0..s.max_steps {
            let dt = s.dt0 * s.growth.powi(k as i32);
            if let Err(e) = run.advance(dt, &load_at) {
                run.fail(i, &e);
                break;
            }
            hist.push(run.measure().friction);
            if hist.len() > s.window {
                let last = &hist[hist.len() - s.window - 1..];
                let (lo, hi) = last.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
                if hi - lo <= s.drift_tol * hist[hist.len() - 1].abs() {
                    done = true;
                    break;
                }
            }
        }
        if done {
            let m = run.measure();
            rows.push(StribeckRow {
                u_eta: ue,
                friction: m.friction,
                min_film: m.min_film,
                max_pressure: m.max_pressure,
                max_contact: m.max_contact,
            });
            run.snapshot();
        } else if run.arts.failures.last().map_or(true, |f| f.at != i) {
            let e = Error::NotConverged {
                iterations: s.max_steps,
                residual: f64::NAN,
            };
            run.fail(i, &e);
        }
    }
    run.arts.stribeck = Some(rows);
    Ok(())
}

fn run_cylinder(cfg: &Config) -> Result<RunArtifacts, Error> {
    let c = &cfg.cylinder;
    let mesh = generate_half_cylinder(c.radius, c.wall, c.n_circ, c.n_thick)?;
    let h0 = -c.radius - c.initial_gap;
    let mut run = Run::new(cfg, mesh, lubrimortar::mesh::SLAVE, DIRICHLET, plane(h0, [0.0; 2]))?;
    let sup = run.support.clone();
    let load_at = |t: f64| {
        sup.displacement_load(
                [0.0, c.feed_velocity * t.min(c.feed_time)],
            plane(h0, [c.flat_acceleration * t, 0.0]),
        )
    };
    for _ in 0..c.n_steps {
        let at = run.step + 1;
        if let Err(e) = run.advance(c.dt, &load_at) {
            run.fail(at, &e);
            break;
        }
    }
    Ok(run.finish())
}

fn run_custom(cfg: &Config) -> Result<RunArtifacts, Error> {
    let c = &cfg.custom;
    let path = c.mesh.as_deref().expect("validated");
    let mesh = parse_mesh(&std::fs::read_to_string(path)?)?;
    let plane_at = |t: f64| {
        let v = [
            c.plane_velocity[0] + c.plane_acceleration[0] * t,
            c.plane_velocity[1] + c.plane_acceleration[1] * t,
        ];
        let y = c.plane_height + c.plane_velocity[1] * t + 0.5 * c.plane_acceleration[1] * t * t;
        plane(y, v)
    };
    let mut run = Run::new(cfg, mesh, &c.slave_set, &c.support_set, plane_at(0.0))?;
    let sup = run.support.clone();
    let load_at = |t: f64| sup.displacement_load([c.support_velocity[0] * t, c.support_velocity[1] * t], plane_at(t));
    for _ in 0..c.n_steps {
        let at = run.step + 1;
        if let Err(e) = run.advance(c.dt, &load_at) {
            run.fail(at, &e);
            break;
        }
    }
    Ok(run.finish())
}
