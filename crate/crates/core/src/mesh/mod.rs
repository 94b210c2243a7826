//! Q4 meshes with named boundary facet sets.

mod generate;
mod io;

pub use generate::{generate_block, generate_half_cylinder, generate_pin, generate_pin_layers};
pub use io::{parse_mesh, write_mesh};

use std::collections::HashMap;

use crate::error::{Error, Result};

pub const DIRICHLET: &str = "dirichlet";
pub const NEUMANN: &str = "neumann";
pub const SLAVE: &str = "slave";
pub const MASTER: &str = "master";

#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    pub body: usize,
    /// Counter-clockwise corner nodes.
    pub nodes: [usize; 4],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    /// Ordered so that the owning element lies to the left.
    pub nodes: [usize; 2],
    pub set: String,
    pub element: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    pub elements: Vec<Element>,
    pub facets: Vec<Facet>,
}

/// Slave facets arranged as one open polyline.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceChain {
    /// Global node ids in traversal order.
    pub nodes: Vec<usize>,
    /// Global facet ids; facet `i` joins `nodes[i]` and `nodes[i + 1]`.
    pub facets: Vec<usize>,
}

impl Mesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.nodes.len()
    }

    /// Builds a mesh from raw facets (`(set, [n1, n2])`), attaching each facet
    /// to its owning element and orienting it counter-clockwise.
    pub fn from_parts(
        nodes: Vec<[f64; 2]>,
        elements: Vec<Element>,
        facets: Vec<(String, [usize; 2])>,
    ) -> Result<Self> {
        let n = nodes.len();
        for (e, el) in elements.iter().enumerate() {
            if el.nodes.iter().any(|&i| i >= n) {
                return Err(Error::InvalidGeometry(format!("element {e} references a missing node")));
            }
            let a = signed_area(&nodes, &el.nodes);
            if !(a > 0.0) {
                return Err(Error::InvalidGeometry(format!(
                    "element {e} has nonpositive area {a:e} (nodes must be counter-clockwise)"
                )));
            }
        }
        let mut edges: HashMap<(usize, usize), Vec<(usize, [usize; 2])>> = HashMap::new();
        for (e, el) in elements.iter().enumerate() {
            for k in 0..4 {
                let (a, b) = (el.nodes[k], el.nodes[(k + 1) % 4]);
                edges.entry((a.min(b), a.max(b))).or_default().push((e, [a, b]));
            }
        }
        let mut out = Vec::with_capacity(facets.len());
        for (i, (set, [a, b])) in facets.into_iter().enumerate() {
            if a >= n || b >= n {
                return Err(Error::InvalidGeometry(format!("facet {i} references a missing node")));
            }
            let owners = edges.get(&(a.min(b), a.max(b))).ok_or_else(|| {
                Error::InvalidGeometry(format!("facet {i} ({set}) is not an element edge"))
            })?;
            if owners.len() != 1 {
                return Err(Error::InvalidGeometry(format!(
                    "facet {i} ({set}) is shared by {} elements",
                    owners.len()
                )));
            }
            let (element, oriented) = owners[0];
            out.push(Facet {
                nodes: oriented,
                set,
                element,
            });
        }
        Ok(Self {
            nodes,
            elements,
            facets: out,
        })
    }

    pub fn facets_in<'a>(&'a self, set: &'a str) -> impl Iterator<Item = usize> + 'a {
        self.facets
            .iter()
            .enumerate()
            .filter(move |(_, f)| f.set == set)
            .map(|(i, _)| i)
    }

    /// Sorted, deduplicated nodes touched by a facet set.
    pub fn nodes_in(&self, set: &str) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .facets_in(set)
            .flat_map(|f| self.facets[f].nodes)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn current_position(&self, node: usize, disp: &[f64]) -> [f64; 2] {
        let x = self.nodes[node];
        [x[0] + disp[2 * node], x[1] + disp[2 * node + 1]]
    }

    /// Outward unit normal of a facet in the deformed configuration.
    pub fn current_normal(&self, facet: usize, disp: &[f64]) -> Result<[f64; 2]> {
        let [a, b] = self.facets[facet].nodes;
        let (xa, xb) = (self.current_position(a, disp), self.current_position(b, disp));
        let t = [xb[0] - xa[0], xb[1] - xa[1]];
        let l = t[0].hypot(t[1]);
        if !(l > 0.0) {
            return Err(Error::SingularGeometry(format!("facet {facet} has zero length")));
        }
        Ok([t[1] / l, -t[0] / l])
    }

    /// Orders the facets of `set` into a single open chain.
    pub fn surface_chain(&self, set: &str) -> Result<SurfaceChain> {
        let ids: Vec<usize> = self.facets_in(set).collect();
        if ids.is_empty() {
            return Err(Error::InvalidGeometry(format!("facet set '{set}' is empty")));
        }
        let mut next: HashMap<usize, usize> = HashMap::new();
        let mut has_prev: HashMap<usize, usize> = HashMap::new();
        for &f in &ids {
            let [a, b] = self.facets[f].nodes;
            if next.insert(a, f).is_some() || has_prev.insert(b, f).is_some() {
                return Err(Error::InvalidGeometry(format!("facet set '{set}' branches")));
            }
        }
        let starts: Vec<usize> = ids
            .iter()
            .map(|&f| self.facets[f].nodes[0])
            .filter(|a| !has_prev.contains_key(a))
            .collect();
        if starts.len() != 1 {
            return Err(Error::InvalidGeometry(format!(
                "facet set '{set}' must form one open chain ({} starts)",
                starts.len()
            )));
        }
        let mut nodes = vec![starts[0]];
        let mut facets = Vec::with_capacity(ids.len());
        while let Some(&f) = next.get(nodes.last().unwrap()) {
            facets.push(f);
            nodes.push(self.facets[f].nodes[1]);
            if facets.len() > ids.len() {
                return Err(Error::InvalidGeometry(format!("facet set '{set}' is closed")));
            }
        }
        if facets.len() != ids.len() {
            return Err(Error::InvalidGeometry(format!("facet set '{set}' is disconnected")));
        }
        Ok(SurfaceChain { nodes, facets })
    }

    pub fn translate(&mut self, dx: f64, dy: f64) {
        for x in &mut self.nodes {
            x[0] += dx;
            x[1] += dy;
        }
    }
}

pub(crate) fn signed_area(nodes: &[[f64; 2]], quad: &[usize; 4]) -> f64 {
    let mut a = 0.0;
    for k in 0..4 {
        let (p, q) = (nodes[quad[k]], nodes[quad[(k + 1) % 4]]);
        a += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * a
}
