//! Dual mortar coupling of a slave polyline to a master surface.
//!
//! Slave facets are 2-node lines with dual shape functions `phi_i` satisfying
//! `int phi_i N_j = delta_ij int N_j` on each facet. Integration over the
//! interface is segment based: a slave facet is cut at the projections of
//! the master nodes and every segment is integrated with Gauss points.

pub mod rigid;

use crate::error::{Error, Result};
use crate::quadrature::gauss_unit;
use crate::sparse::Coo;

/// Default number of Gauss points per mortar segment.
pub const SEGMENT_GAUSS: usize = 3;

/// Dual basis on one linear facet, `phi_i = sum_j coeffs[i][j] N_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualBasis {
    pub coeffs: [[f64; 2]; 2],
}

impl DualBasis {
    /// Builds the basis from the facet mass matrix, `A = D M^-1`.
    pub fn for_facet(xa: [f64; 2], xb: [f64; 2]) -> Result<Self> {
        let l = (xb[0] - xa[0]).hypot(xb[1] - xa[1]);
        if !(l > 0.0) {
            return Err(Error::SingularGeometry("zero-length facet has no dual basis".into()));
        }
        let mut m = [[0.0; 2]; 2];
        let mut d = [0.0; 2];
        for (xi, w) in gauss_unit(2) {
            let n = shape(xi);
            for i in 0..2 {
                d[i] += w * l * n[i];
                for j in 0..2 {
                    m[i][j] += w * l * n[i] * n[j];
                }
            }
        }
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if !(det.abs() > 0.0) {
            return Err(Error::SingularGeometry("singular facet mass matrix".into()));
        }
        let inv = [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]];
        let coeffs = [
            [d[0] * inv[0][0], d[0] * inv[0][1]],
            [d[1] * inv[1][0], d[1] * inv[1][1]],
        ];
        Ok(Self { coeffs })
    }

    pub fn eval(&self, xi: f64) -> [f64; 2] {
        let n = shape(xi);
        [
            self.coeffs[0][0] * n[0] + self.coeffs[0][1] * n[1],
            self.coeffs[1][0] * n[0] + self.coeffs[1][1] * n[1],
        ]
    }
}

/// Linear shape functions on the unit parameter interval.
pub fn shape(xi: f64) -> [f64; 2] {
    [1.0 - xi, xi]
}

/// Rigid flat counter-surface `y = height` bounding a body below it, moving
/// with a uniform velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidPlane {
    pub height: f64,
    pub velocity: [f64; 2],
}

/// Deformable master polyline; facets are oriented with the master body on
/// their left so that `(t_y, -t_x)` points out of it.
#[derive(Clone, Debug, PartialEq)]
pub struct MasterPolyline {
    pub nodes: Vec<[f64; 2]>,
    pub velocities: Vec<[f64; 2]>,
    pub facets: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Master {
    Plane(RigidPlane),
    Polyline(MasterPolyline),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projection {
    /// Signed distance along the slave normal; equals the gap.
    pub gap: f64,
    pub point: [f64; 2],
    /// Master facet and local coordinate; `None` for an analytic master.
    pub facet: Option<(usize, f64)>,
}

/// Projects `x` along the unit slave normal `n` onto the master surface.
/// Returns `None` when the surfaces do not face each other or the closest
/// hit lies beyond `search_radius`.
pub fn project_to_master(x: [f64; 2], n: [f64; 2], master: &Master, search_radius: f64) -> Option<Projection> {
    match master {
        Master::Plane(p) => {
            if !(n[1] < 0.0) {
                return None;
            }
            let s = (p.height - x[1]) / n[1];
            (s.abs() <= search_radius).then_some(Projection {
                gap: s,
                point: [x[0] + s * n[0], p.height],
                facet: None,
            })
        }
        Master::Polyline(m) => {
            let mut best: Option<Projection> = None;
            for (f, &[a, b]) in m.facets.iter().enumerate() {
                if let Some((s, eta)) = ray_segment(x, n, m.nodes[a], m.nodes[b]) {
                    if s.abs() > search_radius {
                        continue;
                    }
                    if best.is_none_or(|bp| s.abs() < bp.gap.abs()) {
                        best = Some(Projection {
                            gap: s,
                            point: [x[0] + s * n[0], x[1] + s * n[1]],
                            facet: Some((f, eta)),
                        });
                    }
                }
            }
            best
        }
    }
}

/// Intersection of `x + s n` with a master facet that faces the ray.
fn ray_segment(x: [f64; 2], n: [f64; 2], a: [f64; 2], b: [f64; 2]) -> Option<(f64, f64)> {
    let t = [b[0] - a[0], b[1] - a[1]];
    let nm = [t[1], -t[0]];
    if !(n[0] * nm[0] + n[1] * nm[1] < 0.0) {
        return None;
    }
    // x + s n = a + eta t
    let det = -n[0] * t[1] + n[1] * t[0];
    if det == 0.0 {
        return None;
    }
    let r = [a[0] - x[0], a[1] - x[1]];
    let s = (-r[0] * t[1] + r[1] * t[0]) / det;
    let eta = (n[0] * r[1] - n[1] * r[0]) / det;
    let tol = 1e-12;
    (-tol..=1.0 + tol).contains(&eta).then_some((s, eta.clamp(0.0, 1.0)))
}

fn facet_frame(xa: [f64; 2], xb: [f64; 2]) -> Result<([f64; 2], [f64; 2], f64)> {
    let t = [xb[0] - xa[0], xb[1] - xa[1]];
    let l = t[0].hypot(t[1]);
    if !(l > 0.0) {
        return Err(Error::SingularGeometry("zero-length slave facet".into()));
    }
    let tu = [t[0] / l, t[1] / l];
    Ok((tu, [tu[1], -tu[0]], l))
}

/// One Gauss point of an overlapped slave segment.
#[derive(Clone, Copy, Debug)]
pub struct MortarPoint {
    /// Slave facet index along the chain.
    pub facet: usize,
    pub xi: f64,
    /// Quadrature weight including the facet length.
    pub weight: f64,
    pub normal: [f64; 2],
    pub proj: Projection,
}

/// Segment-based quadrature points of the interface between a slave chain
/// (current node positions, consecutive nodes joined by facets) and a master.
pub fn interface_points(slave: &[[f64; 2]], master: &Master, search_radius: f64, n_gauss: usize) -> Result<Vec<MortarPoint>> {
    let rule = gauss_unit(n_gauss);
    let mut out = Vec::new();
    for e in 0..slave.len().saturating_sub(1) {
        let (xa, xb) = (slave[e], slave[e + 1]);
        let (tu, n, l) = facet_frame(xa, xb)?;
        let mut cuts = vec![0.0, 1.0];
        if let Master::Polyline(m) = master {
            for p in &m.nodes {
                let xi = ((p[0] - xa[0]) * tu[0] + (p[1] - xa[1]) * tu[1]) / l;
                if xi > 1e-14 && xi < 1.0 - 1e-14 {
                    cuts.push(xi);
                }
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        for w in cuts.windows(2) {
            let (s0, s1) = (w[0], w[1]);
            let mid = 0.5 * (s0 + s1);
            let xm = lerp(xa, xb, mid);
            let Some(pm) = project_to_master(xm, n, master, f64::INFINITY) else {
                continue;
            };
            for &(q, wq) in &rule {
                let xi = s0 + (s1 - s0) * q;
                let x = lerp(xa, xb, xi);
                let proj = match (master, pm.facet) {
                    (Master::Polyline(m), Some((f, _))) => {
                        let [a, b] = m.facets[f];
                        match ray_segment(x, n, m.nodes[a], m.nodes[b]) {
                            Some((s, eta)) => Projection {
                                gap: s,
                                point: [x[0] + s * n[0], x[1] + s * n[1]],
                                facet: Some((f, eta)),
                            },
                            None => continue,
                        }
                    }
                    _ => match project_to_master(x, n, master, f64::INFINITY) {
                        Some(p) => p,
                        None => continue,
                    },
                };
                if proj.gap.abs() > search_radius {
                    continue;
                }
                out.push(MortarPoint {
                    facet: e,
                    xi,
                    weight: wq * (s1 - s0) * l,
                    normal: n,
                    proj,
                });
            }
        }
    }
    Ok(out)
}

fn lerp(a: [f64; 2], b: [f64; 2], t: f64) -> [f64; 2] {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// Mortar matrices: diagonal `D` on the slave chain and `M` coupling slave
/// nodes to master polyline nodes.
#[derive(Clone, Debug)]
pub struct MortarOperators {
    pub d: Vec<f64>,
    pub m: Coo,
}

pub fn assemble_mortar(slave: &[[f64; 2]], master: &Master, search_radius: f64, n_gauss: usize) -> Result<MortarOperators> {
    let n_s = slave.len();
    let n_m = match master {
        Master::Plane(_) => 0,
        Master::Polyline(m) => m.nodes.len(),
    };
    let pts = interface_points(slave, master, search_radius, n_gauss)?;
    let mut touched = vec![false; n_s.saturating_sub(1)];
    let mut m = Coo::new(n_s, n_m);
    for p in &pts {
        touched[p.facet] = true;
        let phi = DualBasis::for_facet(slave[p.facet], slave[p.facet + 1])?.eval(p.xi);
        if let (Master::Polyline(mp), Some((f, eta))) = (master, p.proj.facet) {
            let nm = shape(eta);
            let [a, b] = mp.facets[f];
            for i in 0..2 {
                m.push(p.facet + i, a, p.weight * phi[i] * nm[0]);
                m.push(p.facet + i, b, p.weight * phi[i] * nm[1]);
            }
        }
    }
    let mut d = vec![0.0; n_s];
    let rule = gauss_unit(2);
    for (e, &t) in touched.iter().enumerate() {
        if !t {
            continue;
        }
        let basis = DualBasis::for_facet(slave[e], slave[e + 1])?;
        let (_, _, l) = facet_frame(slave[e], slave[e + 1])?;
        for &(xi, w) in &rule {
            let (phi, n) = (basis.eval(xi), shape(xi));
            for i in 0..2 {
                d[e + i] += w * l * phi[i] * n[i];
            }
        }
    }
    Ok(MortarOperators { d, m })
}

/// Weighted gap `int phi_k g / int phi_k` per slave node; `None` where the
/// node has no overlapped support or a nonpositive weight.
pub fn weighted_gap(slave: &[[f64; 2]], master: &Master, search_radius: f64) -> Result<Vec<Option<f64>>> {
    let pts = interface_points(slave, master, search_radius, SEGMENT_GAUSS)?;
    weighted_average(slave, &pts, |p| p.proj.gap)
}

/// Weighted tangential velocities `(v1, v2)` of slave and master surfaces.
pub fn weighted_velocities(
    slave: &[[f64; 2]],
    slave_vel: &[[f64; 2]],
    master: &Master,
    search_radius: f64,
) -> Result<Vec<Option<([f64; 2], [f64; 2])>>> {
    let pts = interface_points(slave, master, search_radius, SEGMENT_GAUSS)?;
    let tang = |v: [f64; 2], n: [f64; 2]| {
        let vn = v[0] * n[0] + v[1] * n[1];
        [v[0] - vn * n[0], v[1] - vn * n[1]]
    };
    let mut out = vec![None; slave.len()];
    for comp in 0..4 {
        let avg = weighted_average(slave, &pts, |p| {
            let n = shape(p.xi);
            let (a, b) = (slave_vel[p.facet], slave_vel[p.facet + 1]);
            let v1 = tang([n[0] * a[0] + n[1] * b[0], n[0] * a[1] + n[1] * b[1]], p.normal);
            let v2 = tang(master_velocity(master, &p.proj), p.normal);
            [v1[0], v1[1], v2[0], v2[1]][comp]
        })?;
        for (k, v) in avg.iter().enumerate() {
            if let Some(v) = v {
                let e = out[k].get_or_insert(([0.0; 2], [0.0; 2]));
                match comp {
                    0 => e.0[0] = *v,
                    1 => e.0[1] = *v,
                    2 => e.1[0] = *v,
                    _ => e.1[1] = *v,
                }
            }
        }
    }
    Ok(out)
}

/// Weighted relative tangential velocity `(v1 - v2) / 2` per slave node.
pub fn weighted_rel_velocity(
    slave: &[[f64; 2]],
    slave_vel: &[[f64; 2]],
    master: &Master,
    search_radius: f64,
) -> Result<Vec<Option<[f64; 2]>>> {
    Ok(weighted_velocities(slave, slave_vel, master, search_radius)?
        .into_iter()
        .map(|v| v.map(|(a, b)| [0.5 * (a[0] - b[0]), 0.5 * (a[1] - b[1])]))
        .collect())
}

fn master_velocity(master: &Master, proj: &Projection) -> [f64; 2] {
    match (master, proj.facet) {
        (Master::Plane(p), _) => p.velocity,
        (Master::Polyline(m), Some((f, eta))) => {
            let [a, b] = m.facets[f];
            let n = shape(eta);
            let (va, vb) = (m.velocities[a], m.velocities[b]);
            [n[0] * va[0] + n[1] * vb[0], n[0] * va[1] + n[1] * vb[1]]
        }
        _ => [0.0, 0.0],
    }
}

fn weighted_average(
    slave: &[[f64; 2]],
    pts: &[MortarPoint],
    value: impl Fn(&MortarPoint) -> f64,
) -> Result<Vec<Option<f64>>> {
    let mut num = vec![0.0; slave.len()];
    let mut den = vec![0.0; slave.len()];
    let mut basis: Option<(usize, DualBasis)> = None;
    for p in pts {
        let b = match basis {
            Some((f, b)) if f == p.facet => b,
            _ => {
                let b = DualBasis::for_facet(slave[p.facet], slave[p.facet + 1])?;
                basis = Some((p.facet, b));
                b
            }
        };
        let phi = b.eval(p.xi);
        let v = value(p);
        for i in 0..2 {
            num[p.facet + i] += p.weight * phi[i] * v;
            den[p.facet + i] += p.weight * phi[i];
        }
    }
    Ok(num
        .iter()
        .zip(&den)
        .map(|(n, d)| (*d > 1e-14 * slave_scale(slave)).then(|| n / d))
        .collect())
}

fn slave_scale(slave: &[[f64; 2]]) -> f64 {
    slave
        .windows(2)
        .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
        .fold(0.0, f64::max)
}

/// Nodal surface gradient of a linear field on the slave chain by dual
/// weighted averaging of facet gradients. Only facets with `mask[e]` count.
pub fn smooth_gradient(slave: &[[f64; 2]], values: &[f64], mask: &[bool]) -> Result<Vec<Option<[f64; 2]>>> {
    let n = slave.len();
    let mut num = vec![[0.0; 2]; n];
    let mut den = vec![0.0; n];
    for e in 0..n.saturating_sub(1) {
        if !mask[e] {
            continue;
        }
        let (tu, _, l) = facet_frame(slave[e], slave[e + 1])?;
        let g = (values[e + 1] - values[e]) / l;
        let basis = DualBasis::for_facet(slave[e], slave[e + 1])?;
        for (xi, w) in gauss_unit(2) {
            let phi = basis.eval(xi);
            for i in 0..2 {
                num[e + i][0] += w * l * phi[i] * g * tu[0];
                num[e + i][1] += w * l * phi[i] * g * tu[1];
                den[e + i] += w * l * phi[i];
            }
        }
    }
    Ok((0..n)
        .map(|k| (den[k] > 0.0).then(|| [num[k][0] / den[k], num[k][1] / den[k]]))
        .collect())
}
