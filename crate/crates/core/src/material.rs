//! Compressible Neo-Hookean solid in plane strain.
//!
//! `psi = mu/2 (tr C - 3) - mu ln J + lambda/2 (ln J)^2` with `C33 = 1`.

use nalgebra::{Matrix2, Matrix3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeoHookean {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    /// Mass density [tonne/mm^3].
    #[serde(default)]
    pub density: f64,
}

impl NeoHookean {
    pub fn new(youngs_modulus: f64, poisson_ratio: f64, density: f64) -> Result<Self> {
        let m = Self {
            youngs_modulus,
            poisson_ratio,
            density,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.youngs_modulus > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Young's modulus must be positive, got {}",
                self.youngs_modulus
            )));
        }
        if !(self.poisson_ratio > -1.0 && self.poisson_ratio < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "Poisson ratio must lie in (-1, 0.5), got {}",
                self.poisson_ratio
            )));
        }
        if !(self.density >= 0.0) {
            return Err(Error::InvalidParameter(format!("density must be nonnegative, got {}", self.density)));
        }
        Ok(())
    }

    pub fn mu(&self) -> f64 {
        self.youngs_modulus / (2.0 * (1.0 + self.poisson_ratio))
    }

    pub fn lambda(&self) -> f64 {
        let (e, nu) = (self.youngs_modulus, self.poisson_ratio);
        e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))
    }

    pub fn strain_energy(&self, f: &Matrix2<f64>) -> Result<f64> {
        let j = det_checked(f)?;
        let c = f.transpose() * f;
        let lj = j.ln();
        Ok(0.5 * self.mu() * (c.trace() - 2.0) - self.mu() * lj + 0.5 * self.lambda() * lj * lj)
    }

    /// Second Piola-Kirchhoff stress and its Voigt tangent `[11, 22, 12]`.
    pub fn stress_and_tangent(&self, f: &Matrix2<f64>) -> Result<(Matrix2<f64>, Matrix3<f64>)> {
        self.stress_and_tangent_from_grad(&(f - Matrix2::identity()))
    }

    /// Same as [`Self::stress_and_tangent`] but from the displacement gradient
    /// `H = F - I`, which avoids cancellation at small strains.
    pub fn stress_and_tangent_from_grad(&self, h: &Matrix2<f64>) -> Result<(Matrix2<f64>, Matrix3<f64>)> {
        let f = Matrix2::identity() + h;
        det_checked(&f)?;
        let c = f.transpose() * f;
        let ci = c
            .try_inverse()
            .ok_or_else(|| Error::Domain("singular right Cauchy-Green tensor".into()))?;
        let (mu, lam) = (self.mu(), self.lambda());
        let lj = (h.trace() + h.determinant()).ln_1p();
        let c_minus_i = h + h.transpose() + h.transpose() * h;
        let s = ci * c_minus_i * mu + ci * (lam * lj);

        let idx = [(0, 0), (1, 1), (0, 1)];
        let a = 2.0 * (mu - lam * lj);
        let mut d = Matrix3::zeros();
        for (p, &(i, jj)) in idx.iter().enumerate() {
            for (q, &(k, l)) in idx.iter().enumerate() {
                let sym = 0.5 * (ci[(i, k)] * ci[(jj, l)] + ci[(i, l)] * ci[(jj, k)]);
                d[(p, q)] = lam * ci[(i, jj)] * ci[(k, l)] + a * sym;
            }
        }
        Ok((s, d))
    }
}

pub(crate) fn det_checked(f: &Matrix2<f64>) -> Result<f64> {
    let j = f.determinant();
    if !(j > 0.0) {
        return Err(Error::InvertedElement { element: usize::MAX, det: j });
    }
    Ok(j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat() -> NeoHookean {
        NeoHookean::new(10.0, 0.3, 0.0).unwrap()
    }

    #[test]
    fn identity_is_stress_free() {
        let (s, _) = mat().stress_and_tangent(&Matrix2::identity()).unwrap();
        assert!(s.norm() < 1e-15);
        assert_eq!(mat().strain_energy(&Matrix2::identity()).unwrap(), 0.0);
    }

    #[test]
    fn reference_tangent_is_plane_strain_hooke() {
        let m = mat();
        let (_, d) = m.stress_and_tangent(&Matrix2::identity()).unwrap();
        let (mu, lam) = (m.mu(), m.lambda());
        let expect = Matrix3::new(lam + 2.0 * mu, lam, 0.0, lam, lam + 2.0 * mu, 0.0, 0.0, 0.0, mu);
        assert!((d - expect).norm() < 1e-12);
    }

    #[test]
    fn uniaxial_stretch_stress() {
        // F = diag(1.1, 1): S11 = mu (1 - 1/1.21) + lambda ln(1.1) / 1.21
        let m = mat();
        let f = Matrix2::new(1.1, 0.0, 0.0, 1.0);
        let (s, _) = m.stress_and_tangent(&f).unwrap();
        let expect = m.mu() * (1.0 - 1.0 / 1.21) + m.lambda() * 1.1f64.ln() / 1.21;
        assert!((s[(0, 0)] - expect).abs() < 1e-12);
        assert!(s[(0, 1)].abs() < 1e-15);
    }

    #[test]
    fn inverted_deformation_rejected() {
        let f = Matrix2::new(-1.0, 0.0, 0.0, 1.0);
        assert!(matches!(mat().stress_and_tangent(&f), Err(Error::InvertedElement { .. })));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(NeoHookean::new(-1.0, 0.3, 0.0).is_err());
        assert!(NeoHookean::new(1.0, 0.5, 0.0).is_err());
    }

    fn strain(f: &Matrix2<f64>) -> [f64; 3] {
        let e = (f.transpose() * f - Matrix2::identity()) * 0.5;
        [e[(0, 0)], e[(1, 1)], 2.0 * e[(0, 1)]]
    }

    proptest! {
        #[test]
        fn stress_is_energy_gradient(a in -0.2f64..0.2, b in -0.2f64..0.2, c in -0.2f64..0.2, d in -0.2f64..0.2) {
            let m = mat();
            let f = Matrix2::new(1.0 + a, b, c, 1.0 + d);
            let (s, dd) = m.stress_and_tangent(&f).unwrap();
            // dpsi/dF = F S
            let p = f * s;
            let h = 1e-6;
            for i in 0..2 {
                for j in 0..2 {
                    let mut fp = f;
                    fp[(i, j)] += h;
                    let mut fm = f;
                    fm[(i, j)] -= h;
                    let fd = (m.strain_energy(&fp).unwrap() - m.strain_energy(&fm).unwrap()) / (2.0 * h);
                    prop_assert!((fd - p[(i, j)]).abs() < 1e-6 * (1.0 + p.norm()));
                }
            }
            // dS/dE via perturbation of F along a direction, compared in Voigt form
            let df = Matrix2::new(0.3, -0.1, 0.2, 0.4);
            let fp = f + df * h;
            let fm = f - df * h;
            let (sp, _) = m.stress_and_tangent(&fp).unwrap();
            let (sm, _) = m.stress_and_tangent(&fm).unwrap();
            let ds = (sp - sm) / (2.0 * h);
            let (ep, em) = (strain(&fp), strain(&fm));
            let de = nalgebra::Vector3::new((ep[0] - em[0]) / (2.0 * h), (ep[1] - em[1]) / (2.0 * h), (ep[2] - em[2]) / (2.0 * h));
            let pred = dd * de;
            prop_assert!((pred[0] - ds[(0, 0)]).abs() < 1e-5 * (1.0 + ds.norm()));
            prop_assert!((pred[1] - ds[(1, 1)]).abs() < 1e-5 * (1.0 + ds.norm()));
            prop_assert!((pred[2] - ds[(0, 1)]).abs() < 1e-5 * (1.0 + ds.norm()));
        }

        #[test]
        fn tangent_symmetric(a in -0.3f64..0.3, b in -0.3f64..0.3, c in -0.3f64..0.3, d in -0.3f64..0.3) {
            let f = Matrix2::new(1.0 + a, b, c, 1.0 + d);
            prop_assume!(f.determinant() > 0.1);
            let (_, dd) = mat().stress_and_tangent(&f).unwrap();
            prop_assert!((dd - dd.transpose()).norm() < 1e-12 * dd.norm());
        }
    }
}
