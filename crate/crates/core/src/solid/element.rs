use nalgebra::{Matrix2, Matrix3x2, Vector2};

use crate::error::{Error, Result};
use crate::material::NeoHookean;

const GP: f64 = 0.577_350_269_189_625_8;
const CORNERS: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];

pub(crate) struct GaussPoint {
    pub n: [f64; 4],
    pub grad: [Vector2<f64>; 4],
    pub dv: f64,
}

pub(crate) fn gauss_points(x: &[[f64; 2]; 4]) -> Result<[GaussPoint; 4]> {
    let mut out: [Option<GaussPoint>; 4] = [None, None, None, None];
    for (q, c) in CORNERS.iter().enumerate() {
        let (xi, eta) = (c[0] * GP, c[1] * GP);
        let mut n = [0.0; 4];
        let mut dxi = [[0.0; 2]; 4];
        for a in 0..4 {
            let (xa, ea) = (CORNERS[a][0], CORNERS[a][1]);
            n[a] = 0.25 * (1.0 + xa * xi) * (1.0 + ea * eta);
            dxi[a] = [0.25 * xa * (1.0 + ea * eta), 0.25 * ea * (1.0 + xa * xi)];
        }
        let mut j = Matrix2::zeros();
        for a in 0..4 {
            for i in 0..2 {
                for k in 0..2 {
                    j[(i, k)] += x[a][i] * dxi[a][k];
                }
            }
        }
        let det = j.determinant();
        if !(det > 0.0) {
            return Err(Error::InvertedElement { element: usize::MAX, det });
        }
        let jit = j.try_inverse().unwrap().transpose();
        let grad = std::array::from_fn(|a| jit * Vector2::new(dxi[a][0], dxi[a][1]));
        out[q] = Some(GaussPoint { n, grad, dv: det });
    }
    Ok(out.map(|g| g.unwrap()))
}

pub(crate) type ElemVec = [f64; 8];
pub(crate) type ElemMat = [[f64; 8]; 8];

/// Internal force and material plus geometric tangent of one Q4 element.
pub(crate) fn force_stiffness(
    x: &[[f64; 2]; 4],
    u: &[[f64; 2]; 4],
    mat: &NeoHookean,
    with_tangent: bool,
) -> Result<(ElemVec, ElemMat)> {
    let mut f = [0.0; 8];
    let mut k = [[0.0; 8]; 8];
    for gp in gauss_points(x)? {
        let mut hgrad = Matrix2::zeros();
        for a in 0..4 {
            for i in 0..2 {
                for j in 0..2 {
                    hgrad[(i, j)] += u[a][i] * gp.grad[a][j];
                }
            }
        }
        let def = Matrix2::identity() + hgrad;
        let detf = def.determinant();
        if !(detf > 0.0) {
            return Err(Error::InvertedElement {
                element: usize::MAX,
                det: detf,
            });
        }
        let (s, d) = mat.stress_and_tangent_from_grad(&hgrad)?;
        let p = def * s;
        let b: [Matrix3x2<f64>; 4] = std::array::from_fn(|a| {
            let g = gp.grad[a];
            Matrix3x2::new(
                def[(0, 0)] * g[0],
                def[(1, 0)] * g[0],
                def[(0, 1)] * g[1],
                def[(1, 1)] * g[1],
                def[(0, 0)] * g[1] + def[(0, 1)] * g[0],
                def[(1, 0)] * g[1] + def[(1, 1)] * g[0],
            )
        });
        for a in 0..4 {
            let fa = p * gp.grad[a] * gp.dv;
            f[2 * a] += fa[0];
            f[2 * a + 1] += fa[1];
        }
        if !with_tangent {
            continue;
        }
        for a in 0..4 {
            let bd = b[a].transpose() * d;
            for c in 0..4 {
                let km = bd * b[c];
                let kg = (gp.grad[a].transpose() * s * gp.grad[c])[(0, 0)];
                for i in 0..2 {
                    for j in 0..2 {
                        let geo = if i == j { kg } else { 0.0 };
                        k[2 * a + i][2 * c + j] += (km[(i, j)] + geo) * gp.dv;
                    }
                }
            }
        }
    }
    Ok((f, k))
}

pub(crate) fn mass(x: &[[f64; 2]; 4], rho: f64) -> Result<[[f64; 4]; 4]> {
    let mut m = [[0.0; 4]; 4];
    for gp in gauss_points(x)? {
        for a in 0..4 {
            for b in 0..4 {
                m[a][b] += rho * gp.n[a] * gp.n[b] * gp.dv;
            }
        }
    }
    Ok(m)
}

pub(crate) fn body_force(x: &[[f64; 2]; 4], b: [f64; 2]) -> Result<ElemVec> {
    let mut f = [0.0; 8];
    for gp in gauss_points(x)? {
        for a in 0..4 {
            f[2 * a] += gp.n[a] * b[0] * gp.dv;
            f[2 * a + 1] += gp.n[a] * b[1] * gp.dv;
        }
    }
    Ok(f)
}
