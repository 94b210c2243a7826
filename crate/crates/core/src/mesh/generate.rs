use std::f64::consts::PI;

use super::{Element, Mesh, DIRICHLET, NEUMANN, SLAVE};
use crate::error::{Error, Result};

/// Structured `nx x ny` block with its lower-left corner at `origin`.
/// Bottom edge is the slave set, top edge is Dirichlet, sides are Neumann.
pub fn generate_block(width: f64, height: f64, nx: usize, ny: usize, origin: [f64; 2]) -> Result<Mesh> {
    if nx == 0 || ny == 0 || !(width > 0.0) || !(height > 0.0) {
        return Err(Error::InvalidParameter("block needs positive size and resolution".into()));
    }
    structured(nx, ny, |i, j| {
        [
            origin[0] + width * i as f64 / nx as f64,
            origin[1] + height * j as f64 / ny as f64,
        ]
    })
}

/// Pin of given `length` (x extent) and `height` whose bottom face is a
/// circular arc of `radius`. The lowest point of the arc sits at y = 0.
pub fn generate_pin(radius: f64, height: f64, length: f64, n_surf: usize) -> Result<Mesh> {
    let n_vert = ((n_surf as f64 * height / length).round() as usize).max(2);
    generate_pin_layers(radius, height, length, n_surf, n_vert)
}

pub fn generate_pin_layers(radius: f64, height: f64, length: f64, n_surf: usize, n_vert: usize) -> Result<Mesh> {
    if n_surf < 2 || n_vert < 1 {
        return Err(Error::InvalidParameter("pin needs n_surf >= 2 and n_vert >= 1".into()));
    }
    if !(length > 0.0 && radius > 0.5 * length) {
        return Err(Error::InvalidParameter(format!(
            "pin radius {radius} must exceed half the length {length}"
        )));
    }
    let alpha = (0.5 * length / radius).asin();
    let sag = radius * (1.0 - alpha.cos());
    if !(height > sag) {
        return Err(Error::InvalidParameter(format!("pin height {height} must exceed arc sag {sag}")));
    }
    structured(n_surf, n_vert, |i, j| {
        let th = -alpha + 2.0 * alpha * i as f64 / n_surf as f64;
        let x = radius * th.sin();
        let yb = radius * (1.0 - th.cos());
        let s = j as f64 / n_vert as f64;
        [x, yb + s * (height - yb)]
    })
}

/// Lower half of a ring centred at the origin. The outer arc is the slave
/// set, the inner arc is free and the two horizontal end faces are Dirichlet.
pub fn generate_half_cylinder(radius: f64, wall: f64, n_circ: usize, n_thick: usize) -> Result<Mesh> {
    if n_circ < 8 {
        return Err(Error::InvalidParameter(format!("n_circ must be at least 8, got {n_circ}")));
    }
    if n_thick < 1 || !(wall > 0.0 && wall < radius) {
        return Err(Error::InvalidParameter("ring needs 0 < wall < radius and n_thick >= 1".into()));
    }
    let id = |i: usize, j: usize| i * (n_thick + 1) + j;
    let mut nodes = Vec::with_capacity((n_circ + 1) * (n_thick + 1));
    for i in 0..=n_circ {
        let th = PI + PI * i as f64 / n_circ as f64;
        for j in 0..=n_thick {
            let r = radius - wall + wall * j as f64 / n_thick as f64;
            nodes.push([r * th.cos(), r * th.sin()]);
        }
    }
    let mut elements = Vec::with_capacity(n_circ * n_thick);
    for i in 0..n_circ {
        for j in 0..n_thick {
            elements.push(Element {
                body: 0,
                nodes: [id(i, j), id(i, j + 1), id(i + 1, j + 1), id(i + 1, j)],
            });
        }
    }
    let mut facets = Vec::new();
    for i in 0..n_circ {
        facets.push((SLAVE.to_string(), [id(i, n_thick), id(i + 1, n_thick)]));
        facets.push((NEUMANN.to_string(), [id(i + 1, 0), id(i, 0)]));
    }
    for j in 0..n_thick {
        facets.push((DIRICHLET.to_string(), [id(0, j + 1), id(0, j)]));
        facets.push((DIRICHLET.to_string(), [id(n_circ, j), id(n_circ, j + 1)]));
    }
    Mesh::from_parts(nodes, elements, facets)
}

fn structured(nx: usize, ny: usize, pos: impl Fn(usize, usize) -> [f64; 2]) -> Result<Mesh> {
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push(pos(i, j));
        }
    }
    let mut elements = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            elements.push(Element {
                body: 0,
                nodes: [id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)],
            });
        }
    }
    let mut facets = Vec::new();
    for i in 0..nx {
        facets.push((SLAVE.to_string(), [id(i, 0), id(i + 1, 0)]));
        facets.push((DIRICHLET.to_string(), [id(i + 1, ny), id(i, ny)]));
    }
    for j in 0..ny {
        facets.push((NEUMANN.to_string(), [id(nx, j), id(nx, j + 1)]));
        facets.push((NEUMANN.to_string(), [id(0, j + 1), id(0, j)]));
    }
    Mesh::from_parts(nodes, elements, facets)
}
