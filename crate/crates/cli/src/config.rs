//! Run configuration: per-scenario defaults, a JSON file merged on top and
//! dotted `key=value` overrides last.

use std::path::Path;

use lubrimortar::{FluidParams, InterfaceParams, NeoHookean, RegularizationParams, SolverParams, TimeIntegrator};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    CylinderOnFlat,
    PinOnPlane,
    StribeckSweep,
    CustomMesh,
}

impl Scenario {
    pub fn parse(name: &str) -> Result<Self, String> {
        serde_json::from_value(Value::String(name.into())).map_err(|_| {
            format!("unknown scenario '{name}' (cylinder_on_flat, pin_on_plane, stribeck_sweep, custom_mesh)")
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactConfig {
    pub friction: f64,
    pub search_radius: f64,
    pub c_n: Option<f64>,
    pub c_t: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PinConfig {
    pub radius: f64,
    pub height: f64,
    pub length: f64,
    /// Slave elements along the arc.
    pub n_surf: usize,
    /// Element layers through the height; `null` keeps the elements square.
    pub n_vert: Option<usize>,
    /// Normal load per unit thickness [N/mm]; required.
    pub load: Option<f64>,
    /// Clearance between the arc and the plane before the approach [mm].
    pub initial_gap: f64,
    pub approach_speed: f64,
    pub approach_dt: f64,
    pub max_approach_steps: usize,
    /// Plane acceleration of the transient run [mm/s^2].
    pub acceleration: f64,
    pub max_velocity: f64,
    pub dt: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Sliding speed times viscosity [N/m], strictly increasing.
    pub u_eta: Vec<f64>,
    /// First step of every point [s]; later steps grow by `growth`.
    pub dt0: f64,
    pub growth: f64,
    /// Stationarity window in steps.
    pub window: usize,
    /// Relative friction drift accepted over the window.
    pub drift_tol: f64,
    pub max_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderConfig {
    pub radius: f64,
    pub wall: f64,
    pub n_circ: usize,
    pub n_thick: usize,
    pub initial_gap: f64,
    /// Vertical velocity of the end faces [mm/s].
    pub feed_velocity: f64,
    /// The end faces stop once this time is reached.
    pub feed_time: f64,
    pub flat_acceleration: f64,
    pub dt: f64,
    pub n_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomConfig {
    /// Mesh file in the NODES/ELEMS/FACETS text format.
    pub mesh: Option<String>,
    pub slave_set: String,
    pub support_set: String,
    /// Velocity of the supported nodes [mm/s].
    pub support_velocity: [f64; 2],
    pub plane_height: f64,
    pub plane_velocity: [f64; 2],
    pub plane_acceleration: [f64; 2],
    pub dt: f64,
    pub n_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Steps whose interface fields are written; empty writes the last one.
    pub snapshots: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: Scenario,
    pub material: NeoHookean,
    pub fluid: FluidParams,
    pub regularization: RegularizationParams,
    pub contact: ContactConfig,
    pub solver: SolverParams,
    pub integrator: TimeIntegrator,
    pub pin: PinConfig,
    pub sweep: SweepConfig,
    pub cylinder: CylinderConfig,
    pub custom: CustomConfig,
    pub output: OutputConfig,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Default sweep, geometric from boundary friction to full film.
pub const DEFAULT_U_ETA: [f64; 12] = [
    1e-8, 1e-7, 5e-7, 1e-6, 2e-6, 3e-6, 4e-6, 5e-6, 6e-6, 8e-6, 1.1e-5, 1.4e-5,
];

fn shared() -> Value {
    json!({
        "integrator": {"kind": "quasi_static"},
        "pin": {
            "radius": 1.5, "height": 1.0, "length": 1.0, "n_surf": 40, "n_vert": null,
            "load": null, "initial_gap": 2e-3, "approach_speed": 0.05, "approach_dt": 0.01,
            "max_approach_steps": 2000, "acceleration": 0.01, "max_velocity": 0.35, "dt": 0.5
        },
        "sweep": {
            "u_eta": DEFAULT_U_ETA, "dt0": 0.05, "growth": 2.0, "window": 10,
            "drift_tol": 1e-3, "max_steps": 60
        },
        "cylinder": {
            "radius": 4.0, "wall": 0.1, "n_circ": 512, "n_thick": 1, "initial_gap": 0.02,
            "feed_velocity": -0.2, "feed_time": 7.5, "flat_acceleration": 2.0, "dt": 0.05, "n_steps": 150
        },
        "custom": {
            "mesh": null, "slave_set": "slave", "support_set": "dirichlet", "support_velocity": [0.0, 0.0],
            "plane_height": 0.0, "plane_velocity": [0.0, 0.0], "plane_acceleration": [0.0, 0.0],
            "dt": 0.1, "n_steps": 10
        },
        "output": {"snapshots": []}
    })
}

/// Complete default tree for a scenario.
pub fn defaults(scenario: Scenario) -> Value {
    let mut v = shared();
    let specific = match scenario {
        Scenario::PinOnPlane | Scenario::StribeckSweep => json!({
            "material": {"youngs_modulus": 1e-2, "poisson_ratio": 0.0, "density": 0.0},
            "fluid": {"viscosity": 4e-8, "penalty": 1e8, "density": 0.0},
            "regularization": {"g_max": 3e-3, "kappa": 1.0, "tol": 0.01, "sigma": 1e-3},
            "contact": {"friction": 0.25, "search_radius": 1.0, "c_n": null, "c_t": 0.01},
            "solver": {"tol": 1e-13, "max_iter": 50, "max_halvings": 5, "condense": true}
        }),
        Scenario::CylinderOnFlat | Scenario::CustomMesh => json!({
            "material": {"youngs_modulus": 10.0, "poisson_ratio": 0.3, "density": 0.0},
            "fluid": {"viscosity": 4e-8, "penalty": 1e8, "density": 0.0},
            "regularization": {"g_max": 1e-3, "kappa": 1000.0, "tol": 0.01, "sigma": 0.0},
            "contact": {"friction": 0.0, "search_radius": 0.5, "c_n": null, "c_t": null},
            "solver": {"tol": 1e-10, "max_iter": 50, "max_halvings": 5, "condense": true}
        }),
    };
    merge(&mut v, specific);
    v["scenario"] = serde_json::to_value(scenario).unwrap();
    if scenario == Scenario::CylinderOnFlat {
        v["output"]["snapshots"] = json!([55, 150]);
    }
    v
}

/// Recursive object merge; `src` wins.
pub fn merge(dst: &mut Value, src: Value) {
    match (dst, src) {
        (Value::Object(d), Value::Object(s)) => {
            for (k, v) in s {
                match d.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        d.insert(k, v);
                    }
                }
            }
        }
        (d, s) => *d = s,
    }
}

/// Applies `a.b.c=value`; the value is read as JSON and falls back to a string.
pub fn apply_override(tree: &mut Value, entry: &str) -> Result<(), ConfigError> {
    let (key, raw) = entry
        .split_once('=')
        .ok_or_else(|| ConfigError(format!("override '{entry}' is not key=value")))?;
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().into()));
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(ConfigError(format!("override key '{key}' is malformed")));
    }
    let mut node = tree;
    for p in &parts[..parts.len() - 1] {
        if !node.is_object() {
            return Err(ConfigError(format!("override key '{key}' descends into a non-object")));
        }
        node = node
            .as_object_mut()
            .unwrap()
            .entry(p.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
    }
    match node.as_object_mut() {
        Some(m) => {
            m.insert(parts[parts.len() - 1].to_string(), value);
            Ok(())
        }
        None => Err(ConfigError(format!("override key '{key}' descends into a non-object"))),
    }
}

/// A run summary carries its configuration under `config`; accept both.
fn unwrap_echo(v: Value) -> Value {
    match v {
        Value::Object(mut m) if m.contains_key("config") && m.contains_key("status") => m.remove("config").unwrap(),
        other => other,
    }
}

/// Resolves the final configuration. A scenario given on the command line
/// wins over the file.
pub fn resolve(file: Option<&Value>, scenario: Option<Scenario>, overrides: &[String]) -> Result<Config, ConfigError> {
    let file = file.cloned().map(unwrap_echo);
    let mut from_overrides = Value::Object(Map::new());
    for o in overrides {
        apply_override(&mut from_overrides, o)?;
    }
    let pick = |v: Option<&Value>| -> Result<Option<Scenario>, ConfigError> {
        match v.and_then(|v| v.get("scenario")) {
            None => Ok(None),
            Some(Value::String(s)) => Scenario::parse(s).map(Some).map_err(ConfigError),
            Some(other) => Err(ConfigError(format!("scenario must be a string, got {other}"))),
        }
    };
    let scenario = match scenario {
        Some(s) => s,
        None => pick(Some(&from_overrides))?
            .or(pick(file.as_ref())?)
            .ok_or_else(|| ConfigError("no scenario given (use --scenario or the config file)".into()))?,
    };
    let mut tree = defaults(scenario);
    if let Some(f) = file {
        if !f.is_object() {
            return Err(ConfigError("config file must hold a JSON object".into()));
        }
        merge(&mut tree, f);
    }
    for o in overrides {
        apply_override(&mut tree, o)?;
    }
    tree["scenario"] = serde_json::to_value(scenario).unwrap();
    let cfg: Config = serde_json::from_value(tree).map_err(|e| ConfigError(format!("invalid config: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_file(path: &Path) -> Result<Value, ConfigError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError(format!("{name} must be positive, got {v}")))
    }
}

impl Config {
    pub fn interface(&self) -> InterfaceParams {
        InterfaceParams {
            fluid: self.fluid,
            regularization: self.regularization,
            friction: self.contact.friction,
            search_radius: self.contact.search_radius,
            c_n: self.contact.c_n,
            c_t: self.contact.c_t,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let core = |e: lubrimortar::Error| ConfigError(e.to_string());
        self.material.validate().map_err(core)?;
        self.interface().validate().map_err(core)?;
        positive("solver.tol", self.solver.tol)?;
        if self.solver.max_iter == 0 {
            return Err(ConfigError("solver.max_iter must be at least 1".into()));
        }
        if let TimeIntegrator::GeneralizedAlpha { rho_inf } = self.integrator {
            lubrimortar::solid::GenAlpha::from_rho_inf(rho_inf).map_err(core)?;
            if !(self.material.density > 0.0) {
                return Err(ConfigError("generalized-alpha needs material.density > 0".into()));
            }
        }
        match self.scenario {
            Scenario::PinOnPlane | Scenario::StribeckSweep => {
                let p = &self.pin;
                for (n, v) in [
                    ("pin.radius", p.radius),
                    ("pin.height", p.height),
                    ("pin.length", p.length),
                    ("pin.initial_gap", p.initial_gap),
                    ("pin.approach_speed", p.approach_speed),
                    ("pin.approach_dt", p.approach_dt),
                ] {
                    positive(n, v)?;
                }
                match p.load {
                    None => return Err(ConfigError("pin.load (normal force W [N/mm]) is required".into())),
                    Some(w) => positive("pin.load", w)?,
                }
                if self.scenario == Scenario::PinOnPlane {
                    positive("pin.acceleration", p.acceleration)?;
                    positive("pin.max_velocity", p.max_velocity)?;
                    positive("pin.dt", p.dt)?;
                } else {
                    let s = &self.sweep;
                    if s.u_eta.is_empty() {
                        return Err(ConfigError("sweep.u_eta must not be empty".into()));
                    }
                    if s.u_eta.iter().any(|u| !(*u > 0.0 && u.is_finite())) {
                        return Err(ConfigError("sweep.u_eta entries must be positive".into()));
                    }
                    if s.u_eta.windows(2).any(|w| w[1] <= w[0]) {
                        return Err(ConfigError("sweep.u_eta must be strictly increasing".into()));
                    }
                    positive("sweep.dt0", s.dt0)?;
                    if !(s.growth >= 1.0) {
                        return Err(ConfigError("sweep.growth must be at least 1".into()));
                    }
                    positive("sweep.drift_tol", s.drift_tol)?;
                    if s.window == 0 || s.max_steps <= s.window {
                        return Err(ConfigError("sweep needs window >= 1 and max_steps > window".into()));
                    }
                }
            }
            Scenario::CylinderOnFlat => {
                let c = &self.cylinder;
                for (n, v) in [
                    ("cylinder.radius", c.radius),
                    ("cylinder.wall", c.wall),
                    ("cylinder.initial_gap", c.initial_gap),
                    ("cylinder.dt", c.dt),
                ] {
                    positive(n, v)?;
                }
                if !(c.feed_time >= 0.0) || !c.flat_acceleration.is_finite() || !c.feed_velocity.is_finite() {
                    return Err(ConfigError("cylinder loading must be finite with feed_time >= 0".into()));
                }
            }
            Scenario::CustomMesh => {
                if self.custom.mesh.is_none() {
                    return Err(ConfigError("custom.mesh (path to a mesh file) is required".into()));
                }
                positive("custom.dt", self.custom.dt)?;
            }
        }
        Ok(())
    }
}
