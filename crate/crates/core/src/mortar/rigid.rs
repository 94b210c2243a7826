//! Closed-form mortar kinematics against a [`RigidPlane`], generic over the
//! scalar type so that they can be differentiated with dual numbers.
//!
//! On a straight facet the gap and the tangential velocities are linear, so
//! biorthogonality collapses every weighted integral to `L/2` times the nodal
//! value.

use super::RigidPlane;
use crate::ad::{Scalar, V2};

#[derive(Clone, Copy, Debug)]
pub struct FacetGeom<T> {
    pub len: T,
    pub tangent: V2<T>,
    pub normal: V2<T>,
}

pub fn facet_geom<T: Scalar>(xa: V2<T>, xb: V2<T>) -> FacetGeom<T> {
    let t = xb - xa;
    let len = t.norm();
    let tangent = t.scale(len.recip());
    FacetGeom {
        len,
        tangent,
        normal: tangent.rot_cw(),
    }
}

/// A facet projects onto the plane when its outward normal points down.
pub fn faces_plane(xa: [f64; 2], xb: [f64; 2]) -> bool {
    xb[0] - xa[0] > 0.0
}

#[derive(Clone, Copy, Debug)]
pub struct NodalKinematics<T> {
    /// Diagonal mortar entry `D_kk`.
    pub weight: T,
    pub gap: T,
    pub normal: V2<T>,
    pub tangent: V2<T>,
    /// Weighted tangential velocity of the slave surface.
    pub v_slave: V2<T>,
    /// Weighted tangential velocity of the plane.
    pub v_master: V2<T>,
}

impl<T: Scalar> NodalKinematics<T> {
    /// `(v_slave - v_master) / 2`.
    pub fn rel_velocity(&self) -> V2<T> {
        (self.v_slave - self.v_master).scalef(0.5)
    }

    /// `(v_slave + v_master) / 2`.
    pub fn mean_velocity(&self) -> V2<T> {
        (self.v_slave + self.v_master).scalef(0.5)
    }
}

/// Kinematics of a slave node `x` with chain neighbours `prev`, `next`
/// and nodal velocity `v`. `None` if no adjacent facet faces the plane.
pub fn nodal_kinematics<T: Scalar>(
    prev: Option<V2<T>>,
    x: V2<T>,
    next: Option<V2<T>>,
    v: V2<T>,
    plane: &RigidPlane,
) -> Option<NodalKinematics<T>> {
    let mut weight = T::cst(0.0);
    let mut gap = T::cst(0.0);
    let mut vs = V2::zero();
    let mut vm = V2::zero();
    let vp = V2::<T>::cst(plane.velocity);
    let tangential = |w: V2<T>, n: V2<T>| w - n.scale(w.dot(n));
    let mut any = false;
    for (a, b) in [(prev, Some(x)), (Some(x), next)] {
        let (Some(a), Some(b)) = (a, b) else { continue };
        if !faces_plane(a.re(), b.re()) {
            continue;
        }
        any = true;
        let g = facet_geom(a, b);
        let half = g.len * 0.5;
        weight += half;
        gap += (x.y * -1.0 + plane.height) / g.normal.y * half;
        vs += tangential(v, g.normal).scale(half);
        vm += tangential(vp, g.normal).scale(half);
    }
    if !any {
        return None;
    }
    let inv = weight.recip();
    let span = next.unwrap_or(x) - prev.unwrap_or(x);
    let normal = span.rot_cw().scale(span.norm().recip());
    Some(NodalKinematics {
        weight,
        gap: gap * inv,
        normal,
        tangent: normal.rot_ccw(),
        v_slave: vs.scale(inv),
        v_master: vm.scale(inv),
    })
}
