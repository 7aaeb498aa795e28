//! Structured quadrilateral meshes of the unit square, optionally split by an
//! edge crack along `y = 0.5, 0.5 ≤ x ≤ 1`.
//!
//! ```text
//!  (0,1) +---------Γ3---------+ (1,1)
//!        |                    |
//!       Γ4        tip         Γ2
//!        |         o==========| crack (upper / lower flank)
//!        |                    |
//!  (0,0) +---------Γ1---------+ (1,0)
//! ```
//!
//! The crack is a zero-width seam: every seam location strictly right of the
//! tip carries two nodes, one per flank. The tip node is shared.

use crate::error::{Error, Result};

pub const TIP: [f64; 2] = [0.5, 0.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Marker {
    Gamma1Bottom,
    Gamma2Right,
    Gamma3Top,
    Gamma4Left,
    CrackUpper,
    CrackLower,
}

impl Marker {
    pub const OUTER: [Marker; 4] = [Marker::Gamma1Bottom, Marker::Gamma2Right, Marker::Gamma3Top, Marker::Gamma4Left];

    pub fn is_crack(self) -> bool {
        matches!(self, Marker::CrackUpper | Marker::CrackLower)
    }
}

/// Boundary edge, oriented counterclockwise with respect to its element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Facet {
    pub nodes: [usize; 2],
    pub marker: Marker,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrackMesh {
    pub nodes: Vec<[f64; 2]>,
    /// Corner node indices, counterclockwise starting at the lower-left corner.
    pub quads: Vec<[usize; 4]>,
    pub facets: Vec<Facet>,
    pub n_div: usize,
    pub cracked: bool,
}

impl CrackMesh {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_elements(&self) -> usize {
        self.quads.len()
    }

    pub fn element_coords(&self, e: usize) -> [[f64; 2]; 4] {
        self.quads[e].map(|n| self.nodes[n])
    }

    pub fn nodes_on(&self, marker: Marker) -> Vec<usize> {
        let mut out: Vec<usize> = self.facets.iter().filter(|f| f.marker == marker).flat_map(|f| f.nodes).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Index of the crack-tip node at (0.5, 0.5).
    pub fn tip_index(&self) -> Result<usize> {
        if !self.cracked {
            return Err(Error::NoTip("mesh has no crack seam".to_string()));
        }
        let hits: Vec<usize> = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, p)| (p[0] - TIP[0]).abs() <= 1e-12 && (p[1] - TIP[1]).abs() <= 1e-12)
            .map(|(i, _)| i)
            .collect();
        match hits.as_slice() {
            [one] => Ok(*one),
            [] => Err(Error::NoTip("no node at (0.5, 0.5)".to_string())),
            many => Err(Error::Mesh(format!("{} nodes coincide at the crack tip", many.len()))),
        }
    }

    /// Elements having the tip node as a corner.
    pub fn elements_touching(&self, node: usize) -> Vec<usize> {
        (0..self.quads.len()).filter(|&e| self.quads[e].contains(&node)).collect()
    }
}

fn grid_index(n: usize, i: usize, j: usize) -> usize {
    j * (n + 1) + i
}

fn grid_nodes(n: usize) -> Vec<[f64; 2]> {
    let mut nodes = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            // i/n is exact at 0, 1/2 and 1, so boundary and tip lookups are tolerance-free
            let x = i as f64 / n as f64;
            let y = j as f64 / n as f64;
            nodes.push([x, y]);
        }
    }
    nodes
}

fn outer_facets(n: usize, node_at: impl Fn(usize, usize, bool) -> usize) -> Vec<Facet> {
    let mut facets = Vec::with_capacity(4 * n);
    for i in 0..n {
        facets.push(Facet { nodes: [node_at(i, 0, false), node_at(i + 1, 0, false)], marker: Marker::Gamma1Bottom });
    }
    for j in 0..n {
        // below the seam row the right edge uses lower-flank nodes
        let upper = j >= n / 2;
        facets.push(Facet { nodes: [node_at(n, j, upper), node_at(n, j + 1, upper)], marker: Marker::Gamma2Right });
    }
    for i in (0..n).rev() {
        facets.push(Facet { nodes: [node_at(i + 1, n, true), node_at(i, n, true)], marker: Marker::Gamma3Top });
    }
    for j in (0..n).rev() {
        facets.push(Facet { nodes: [node_at(0, j + 1, true), node_at(0, j, true)], marker: Marker::Gamma4Left });
    }
    facets
}

/// Unit square, `n_div × n_div` quads, no seam.
pub fn build_uncracked_square(n_div: usize) -> Result<CrackMesh> {
    if n_div < 1 {
        return Err(Error::InvalidInput("n_div must be >= 1".to_string()));
    }
    let n = n_div;
    let mut quads = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            quads.push([
                grid_index(n, i, j),
                grid_index(n, i + 1, j),
                grid_index(n, i + 1, j + 1),
                grid_index(n, i, j + 1),
            ]);
        }
    }
    let facets = outer_facets(n, |i, j, _| grid_index(n, i, j));
    Ok(CrackMesh { nodes: grid_nodes(n), quads, facets, n_div, cracked: false })
}

/// Unit square with the edge crack seam. Base grid nodes on the seam belong
/// to the lower flank; the `n_div/2` upper-flank duplicates are appended after
/// the `(n_div+1)²` grid nodes, ordered by increasing x.
pub fn build_cracked_square(n_div: usize) -> Result<CrackMesh> {
    if n_div < 4 || !n_div.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("n_div must be even and >= 4, got {n_div}")));
    }
    let n = n_div;
    let half = n / 2;
    let base = (n + 1) * (n + 1);
    let mut nodes = grid_nodes(n);
    for i in half + 1..=n {
        nodes.push(nodes[grid_index(n, i, half)]);
    }
    // upper selects the upper-flank copy where one exists
    let node_at = |i: usize, j: usize, upper: bool| {
        if upper && j == half && i > half {
            base + (i - half - 1)
        } else {
            grid_index(n, i, j)
        }
    };
    let mut quads = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let above = j >= half;
            quads.push([
                node_at(i, j, above),
                node_at(i + 1, j, above),
                node_at(i + 1, j + 1, above),
                node_at(i, j + 1, above),
            ]);
        }
    }
    let mut facets = outer_facets(n, node_at);
    for i in half..n {
        // lower flank is the top edge of the row below (right to left, CCW for that element)
        facets
            .push(Facet { nodes: [node_at(i + 1, half, false), node_at(i, half, false)], marker: Marker::CrackLower });
        facets.push(Facet { nodes: [node_at(i, half, true), node_at(i + 1, half, true)], marker: Marker::CrackUpper });
    }
    Ok(CrackMesh { nodes, quads, facets, n_div, cracked: true })
}
