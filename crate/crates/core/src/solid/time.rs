use serde::{Deserialize, Serialize};

use super::Solid;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeIntegrator {
    /// No inertia; velocities are backward differences. An infinite step
    /// gives the stationary problem.
    QuasiStatic,
    /// Chung-Hulbert generalized-alpha with spectral radius `rho_inf`.
    GeneralizedAlpha { rho_inf: f64 },
}

impl Default for TimeIntegrator {
    fn default() -> Self {
        TimeIntegrator::GeneralizedAlpha { rho_inf: 0.9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenAlpha {
    pub alpha_m: f64,
    pub alpha_f: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl GenAlpha {
    pub fn from_rho_inf(rho: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::InvalidParameter(format!("rho_inf must lie in [0, 1], got {rho}")));
        }
        let alpha_m = (2.0 * rho - 1.0) / (rho + 1.0);
        let alpha_f = rho / (rho + 1.0);
        let beta = 0.25 * (1.0 - alpha_m + alpha_f).powi(2);
        let gamma = 0.5 - alpha_m + alpha_f;
        Ok(Self {
            alpha_m,
            alpha_f,
            beta,
            gamma,
        })
    }
}

/// Converged kinematic state at the end of a step.
#[derive(Clone, Debug, PartialEq)]
pub struct SolidState {
    pub time: f64,
    pub d: Vec<f64>,
    pub v: Vec<f64>,
    pub a: Vec<f64>,
    /// Out-of-balance force `f_int - f_ext - f_interface` at this state.
    pub force: Vec<f64>,
}

impl SolidState {
    pub fn at_rest(n_dofs: usize) -> Self {
        Self {
            time: 0.0,
            d: vec![0.0; n_dofs],
            v: vec![0.0; n_dofs],
            a: vec![0.0; n_dofs],
            force: vec![0.0; n_dofs],
        }
    }
}

/// One step of a time integrator: maps the end-of-step displacement to
/// velocity, acceleration and the inertial part of the residual.
///
/// The generalized-alpha balance is divided by `1 - alpha_f`, so the residual
/// reads `F(d) + [(1 - am) M a + am M a_n + af F_n] / (1 - af)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stepper {
    pub integrator: TimeIntegrator,
    pub dt: f64,
    ga: Option<GenAlpha>,
}

impl Stepper {
    pub fn new(integrator: TimeIntegrator, dt: f64) -> Result<Self> {
        let ga = match integrator {
            TimeIntegrator::QuasiStatic => {
                if !(dt > 0.0) {
                    return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
                }
                None
            }
            TimeIntegrator::GeneralizedAlpha { rho_inf } => {
                if !(dt > 0.0 && dt.is_finite()) {
                    return Err(Error::InvalidParameter(format!("time step must be positive and finite, got {dt}")));
                }
                Some(GenAlpha::from_rho_inf(rho_inf)?)
            }
        };
        Ok(Self { integrator, dt, ga })
    }

    pub fn coefficients(&self) -> Option<GenAlpha> {
        self.ga
    }

    pub fn mass_coeff(&self) -> f64 {
        match self.ga {
            None => 0.0,
            Some(g) => (1.0 - g.alpha_m) / ((1.0 - g.alpha_f) * g.beta * self.dt * self.dt),
        }
    }

    /// `dv / dd` of the end-of-step velocity.
    pub fn velocity_coeff(&self) -> f64 {
        match self.ga {
            None => 1.0 / self.dt,
            Some(g) => g.gamma / (g.beta * self.dt),
        }
    }

    /// Velocity at the end of the step is `velocity_coeff * (d - d_n) + offset`.
    pub fn velocity_offset(&self, prev: &SolidState, dof: usize) -> f64 {
        match self.ga {
            None => 0.0,
            Some(g) => {
                (1.0 - g.gamma / g.beta) * prev.v[dof] + self.dt * (1.0 - g.gamma / (2.0 * g.beta)) * prev.a[dof]
            }
        }
    }

    pub fn velocity(&self, prev: &SolidState, d: &[f64]) -> Vec<f64> {
        let c = self.velocity_coeff();
        (0..d.len())
            .map(|k| c * (d[k] - prev.d[k]) + self.velocity_offset(prev, k))
            .collect()
    }

    pub fn acceleration(&self, prev: &SolidState, d: &[f64]) -> Vec<f64> {
        match self.ga {
            None => vec![0.0; d.len()],
            Some(g) => {
                let dt = self.dt;
                (0..d.len())
                    .map(|k| {
                        (d[k] - prev.d[k] - dt * prev.v[k]) / (g.beta * dt * dt)
                            - (1.0 - 2.0 * g.beta) / (2.0 * g.beta) * prev.a[k]
                    })
                    .collect()
            }
        }
    }

    pub fn inertial_residual_with(
        &self,
        mass_times: impl Fn(&[f64]) -> Result<Vec<f64>>,
        prev: &SolidState,
        d: &[f64],
    ) -> Result<Vec<f64>> {
        let Some(g) = self.ga else {
            return Ok(vec![0.0; d.len()]);
        };
        let a = self.acceleration(prev, d);
        let mix: Vec<f64> = a
            .iter()
            .zip(&prev.a)
            .map(|(an1, an)| (1.0 - g.alpha_m) * an1 + g.alpha_m * an)
            .collect();
        let ma = mass_times(&mix)?;
        Ok(ma
            .iter()
            .zip(&prev.force)
            .map(|(m, f)| (m + g.alpha_f * f) / (1.0 - g.alpha_f))
            .collect())
    }

    pub fn inertial_residual(&self, solid: &Solid, prev: &SolidState, d: &[f64]) -> Result<Vec<f64>> {
        self.inertial_residual_with(|v| solid.mass_times(v), prev, d)
    }

    pub fn advance_with(&self, prev: &SolidState, d: Vec<f64>, force: Vec<f64>) -> SolidState {
        let v = self.velocity(prev, &d);
        let a = self.acceleration(prev, &d);
        SolidState {
            time: prev.time + self.dt,
            d,
            v,
            a,
            force,
        }
    }

    pub fn advance(&self, _solid: &Solid, prev: &SolidState, d: Vec<f64>, force: Vec<f64>) -> Result<SolidState> {
        Ok(self.advance_with(prev, d, force))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_for_rho_one_are_trapezoidal() {
        let g = GenAlpha::from_rho_inf(1.0).unwrap();
        assert!((g.alpha_m - 0.5).abs() < 1e-15);
        assert!((g.alpha_f - 0.5).abs() < 1e-15);
        assert!((g.beta - 0.25).abs() < 1e-15);
        assert!((g.gamma - 0.5).abs() < 1e-15);
        assert!(GenAlpha::from_rho_inf(1.5).is_err());
    }

    /// Single-dof oscillator `m a + k d = 0`, solved through the stepper.
    fn run(integ: TimeIntegrator, steps: usize) -> Vec<f64> {
        let (m, k, dt) = (2.0, 50.0, 0.01);
        let st = Stepper::new(integ, dt).unwrap();
        let mut s = SolidState {
            time: 0.0,
            d: vec![1.0],
            v: vec![0.0],
            a: vec![-k / m],
            force: vec![k],
        };
        let mut out = vec![1.0];
        for _ in 0..steps {
            // residual is linear in d: r(d) = k d + inertial(d)
            let r = |d: f64| k * d + st.inertial_residual_with(|x| Ok(vec![m * x[0]]), &s, &[d]).unwrap()[0];
            let slope = k + st.mass_coeff() * m;
            let d = s.d[0] - r(s.d[0]) / slope;
            s = st.advance_with(&s, vec![d], vec![k * d]);
            out.push(d);
        }
        out
    }

    #[test]
    fn rho_one_reproduces_trapezoidal_rule() {
        let traj = run(TimeIntegrator::GeneralizedAlpha { rho_inf: 1.0 }, 200);
        // Newmark average acceleration, written out independently
        let (m, k, dt) = (2.0f64, 50.0f64, 0.01f64);
        let (mut d, mut v, mut a) = (1.0f64, 0.0f64, -k / m);
        for n in 1..=200 {
            let keff = k + 4.0 * m / (dt * dt);
            let rhs = m * (4.0 * d / (dt * dt) + 4.0 * v / dt + a);
            let dn = rhs / keff;
            let an = 4.0 * (dn - d) / (dt * dt) - 4.0 * v / dt - a;
            let vn = v + 0.5 * dt * (a + an);
            d = dn;
            v = vn;
            a = an;
            assert!((traj[n] - d).abs() < 1e-10, "step {n}");
        }
    }

    #[test]
    fn dissipation_bounds_amplitude() {
        let traj = run(TimeIntegrator::GeneralizedAlpha { rho_inf: 0.5 }, 2000);
        assert!(traj.iter().all(|d| d.abs() <= 1.0 + 1e-12));
        let tail = traj[1900..].iter().fold(0.0f64, |m, d| m.max(d.abs()));
        assert!(tail < 1.0);
    }

    #[test]
    fn quasi_static_velocity_is_backward_difference() {
        let st = Stepper::new(TimeIntegrator::QuasiStatic, 0.5).unwrap();
        let prev = SolidState::at_rest(2);
        assert_eq!(st.velocity(&prev, &[1.0, -2.0]), vec![2.0, -4.0]);
        let steady = Stepper::new(TimeIntegrator::QuasiStatic, f64::INFINITY).unwrap();
        assert_eq!(steady.velocity(&prev, &[1.0, -2.0]), vec![0.0, 0.0]);
    }
}
