//! Elimination of the contact multipliers from the linearized system.
//!
//! Per node the two contact rows read `E dlam + C du = b_c`. Where `E` is
//! invertible the multipliers are substituted directly. In stick `E` has a
//! zero tangential row, so `dlam_t` is taken from the tangential combination
//! of the node's two force rows instead and the stick row takes its place.

use std::collections::BTreeMap;

use crate::contact::ContactStatus;
use crate::error::{Error, Result};
use crate::sparse::Coo;

type Row = BTreeMap<usize, f64>;

/// Linear system in row form; unknowns `[u (n_u), lam (2 per node)]`.
pub(crate) struct RowSystem {
    pub rows: Vec<Row>,
    pub rhs: Vec<f64>,
    pub n_u: usize,
}

impl RowSystem {
    pub fn from_coo(coo: &Coo, rhs: Vec<f64>, n_u: usize) -> Self {
        let mut rows = vec![Row::new(); coo.n_rows];
        for &(i, j, v) in &coo.entries {
            *rows[i].entry(j).or_insert(0.0) += v;
        }
        Self { rows, rhs, n_u }
    }
}

enum Recovery {
    /// `dlam = Einv (b_c - C du)`.
    Direct { einv: [[f64; 2]; 2], bc: [f64; 2], c: [Row; 2] },
    /// `dlam_n` from the normal row, `dlam_t` from the tangential force combination.
    Stick { a: f64, bn: f64, cn: Row, p: Row, p_ln: f64, p_lt: f64, b_p: f64 },
}

fn u_part(row: &Row, n_u: usize) -> Row {
    row.range(..n_u).map(|(&k, &v)| (k, v)).collect()
}

fn axpy(dst: &mut Row, alpha: f64, src: &Row) {
    for (&k, &v) in src {
        *dst.entry(k).or_insert(0.0) += alpha * v;
    }
}

fn dot(row: &Row, x: &[f64]) -> f64 {
    row.iter().map(|(&k, &v)| v * x[k]).sum()
}

/// Solves the system with the multipliers condensed out; returns the full
/// increment `[du, dlam]`.
pub(crate) fn solve_condensed(sys: RowSystem, status: &[ContactStatus]) -> Result<Vec<f64>> {
    let RowSystem { mut rows, rhs, n_u } = sys;
    let n_c = status.len();
    let mut b: Vec<f64> = rhs[..n_u].to_vec();
    let mut lam_rows: Vec<Vec<usize>> = vec![Vec::new(); n_c];
    for (i, row) in rows[..n_u].iter().enumerate() {
        let mut seen = None;
        for &col in row.range(n_u..).map(|(k, _)| k) {
            let c = (col - n_u) / 2;
            if seen != Some(c) {
                lam_rows[c].push(i);
                seen = Some(c);
            }
        }
    }
    let mut rec = Vec::with_capacity(n_c);
    for c in 0..n_c {
        let (ln, lt) = (n_u + 2 * c, n_u + 2 * c + 1);
        let (rn, rt) = (ln, lt);
        let e = [
            [get(&rows[rn], ln), get(&rows[rn], lt)],
            [get(&rows[rt], ln), get(&rows[rt], lt)],
        ];
        let bc = [rhs[rn], rhs[rt]];
        let cr = [u_part(&rows[rn], n_u), u_part(&rows[rt], n_u)];
        if status[c] != ContactStatus::Stick {
            let det = e[0][0] * e[1][1] - e[0][1] * e[1][0];
            if !(det.abs() > 0.0) {
                return Err(Error::SingularSystem(format!("contact block of multiplier {c} is singular")));
            }
            let einv = [[e[1][1] / det, -e[0][1] / det], [-e[1][0] / det, e[0][0] / det]];
            for &i in &lam_rows[c] {
                let bi = [take(&mut rows[i], ln), take(&mut rows[i], lt)];
                let w = [
                    bi[0] * einv[0][0] + bi[1] * einv[1][0],
                    bi[0] * einv[0][1] + bi[1] * einv[1][1],
                ];
                b[i] -= w[0] * bc[0] + w[1] * bc[1];
                axpy(&mut rows[i], -w[0], &cr[0]);
                axpy(&mut rows[i], -w[1], &cr[1]);
            }
            rec.push(Recovery::Direct { einv, bc, c: cr });
        } else {
            let a = e[0][0];
            if !(a.abs() > 0.0) || e[0][1] != 0.0 {
                return Err(Error::SingularSystem(format!("normal contact row of multiplier {c} is degenerate")));
            }
            let [ex, ey] = lam_rows[c][..] else {
                return Err(Error::SingularSystem(format!(
                    "stick multiplier {c} needs exactly two free force rows"
                )));
            };
            let (bx, by) = (get(&rows[ex], lt), get(&rows[ey], lt));
            let norm2 = bx * bx + by * by;
            if !(norm2 > 0.0) {
                return Err(Error::SingularSystem(format!("stick multiplier {c} has no force coupling")));
            }
            let mut p = Row::new();
            axpy(&mut p, bx, &rows[ex]);
            axpy(&mut p, by, &rows[ey]);
            let mut q = Row::new();
            axpy(&mut q, by, &rows[ex]);
            axpy(&mut q, -bx, &rows[ey]);
            let b_p = bx * b[ex] + by * b[ey];
            let b_q = by * b[ex] - bx * b[ey];
            let p_ln = take(&mut p, ln);
            let p_lt = take(&mut p, lt);
            let q_ln = take(&mut q, ln);
            q.remove(&lt);
            // dlam_n = (b_n - C_n du) / a
            let mut row_q = q;
            axpy(&mut row_q, -q_ln / a, &cr[0]);
            rows[ex] = row_q;
            b[ex] = b_q - q_ln / a * bc[0];
            rows[ey] = cr[1].clone();
            b[ey] = bc[1];
            rec.push(Recovery::Stick {
                a,
                bn: bc[0],
                cn: cr[0].clone(),
                p: u_part(&p, n_u),
                p_ln,
                p_lt,
                b_p,
            });
        }
    }
    let mut coo = Coo::new(n_u, n_u);
    for (i, row) in rows[..n_u].iter().enumerate() {
        for (&j, &v) in row {
            if j >= n_u {
                return Err(Error::SingularSystem("multiplier column left after condensation".into()));
            }
            coo.push(i, j, v);
        }
    }
    let du = coo.solve(&b)?;
    let mut out = du.clone();
    out.resize(n_u + 2 * n_c, 0.0);
    for (c, r) in rec.iter().enumerate() {
        let (dn, dt) = match r {
            Recovery::Direct { einv, bc, c: cr } => {
                let rhs = [bc[0] - dot(&cr[0], &du), bc[1] - dot(&cr[1], &du)];
                (
                    einv[0][0] * rhs[0] + einv[0][1] * rhs[1],
                    einv[1][0] * rhs[0] + einv[1][1] * rhs[1],
                )
            }
            Recovery::Stick { a, bn, cn, p, p_ln, p_lt, b_p } => {
                let dn = (bn - dot(cn, &du)) / a;
                (dn, (b_p - dot(p, &du) - p_ln * dn) / p_lt)
            }
        };
        out[n_u + 2 * c] = dn;
        out[n_u + 2 * c + 1] = dt;
    }
    Ok(out)
}

fn get(row: &Row, k: usize) -> f64 {
    row.get(&k).copied().unwrap_or(0.0)
}

fn take(row: &mut Row, k: usize) -> f64 {
    row.remove(&k).unwrap_or(0.0)
}
