//! One-dimensional measurement spaces: directed multigraphs whose vertices are
//! measurements and whose edges are jointly measurable pairs.
//!
//! Ids are strings and survive restriction and collapse, so distributions can
//! be re-attached to the pieces of a decomposition.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::invalid;
use crate::Result;

macro_rules! string_id {
    ($name:ident) => {
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(id: &str) -> Self {
                Self(id.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(id: String) -> Self {
                Self(id)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

string_id!(VertexId);
string_id!(EdgeId);

/// A directed edge. `src` is the `d1` face, `tgt` the `d0` face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub src: VertexId,
    pub tgt: VertexId,
}

impl Edge {
    pub fn new(id: impl Into<EdgeId>, src: impl Into<VertexId>, tgt: impl Into<VertexId>) -> Self {
        Edge {
            id: id.into(),
            src: src.into(),
            tgt: tgt.into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MeasurementSpace {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    ends: Vec<(usize, usize)>,
    vertex_index: BTreeMap<VertexId, usize>,
    edge_index: BTreeMap<EdgeId, usize>,
}

impl PartialEq for MeasurementSpace {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for MeasurementSpace {}

impl MeasurementSpace {
    /// Builds a space, rejecting duplicate ids, dangling endpoints and loops.
    pub fn new(vertices: Vec<VertexId>, edges: Vec<Edge>) -> Result<Self> {
        let mut vertex_index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(invalid!("duplicate vertex id {v}"));
            }
        }
        let mut edge_index = BTreeMap::new();
        let mut ends = Vec::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            if edge_index.insert(e.id.clone(), i).is_some() {
                return Err(invalid!("duplicate edge id {}", e.id));
            }
            let s = *vertex_index
                .get(&e.src)
                .ok_or_else(|| invalid!("edge {} has unknown source {}", e.id, e.src))?;
            let t = *vertex_index
                .get(&e.tgt)
                .ok_or_else(|| invalid!("edge {} has unknown target {}", e.id, e.tgt))?;
            if s == t {
                return Err(invalid!("edge {} is a loop on {}", e.id, e.src));
            }
            ends.push((s, t));
        }
        Ok(MeasurementSpace {
            vertices,
            edges,
            ends,
            vertex_index,
            edge_index,
        })
    }

    pub fn empty() -> Self {
        MeasurementSpace::new(Vec::new(), Vec::new()).expect("empty space is valid")
    }

    /// The n-circle: vertices `v1..vn`, edges `ei: vi -> v(i+1)` and `en: vn -> v1`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid!("a circle needs at least 2 edges, got {n}"));
        }
        let vertices = (1..=n).map(|i| VertexId::new(format!("v{i}"))).collect();
        let edges = (1..=n)
            .map(|i| {
                let next = if i == n { 1 } else { i + 1 };
                Edge::new(format!("e{i}"), format!("v{i}"), format!("v{next}"))
            })
            .collect();
        MeasurementSpace::new(vertices, edges)
    }

    /// Directed path with `n` edges `ei: vi -> v(i+1)`.
    pub fn path(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(invalid!("a path needs at least one edge"));
        }
        let vertices = (1..=n + 1).map(|i| VertexId::new(format!("v{i}"))).collect();
        let edges = (1..=n)
            .map(|i| Edge::new(format!("e{i}"), format!("v{i}"), format!("v{}", i + 1)))
            .collect();
        MeasurementSpace::new(vertices, edges)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_index(&self, id: &VertexId) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn edge_index(&self, id: &EdgeId) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges.iter().map(|e| e.id.clone()).collect()
    }

    /// `(source, target)` vertex indices of edge `e`.
    pub fn ends(&self, e: usize) -> (usize, usize) {
        self.ends[e]
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.ends
            .iter()
            .enumerate()
            .filter(move |(_, &(s, _))| s == v)
            .map(|(i, _)| i)
    }

    pub fn in_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.ends
            .iter()
            .enumerate()
            .filter(move |(_, &(_, t))| t == v)
            .map(|(i, _)| i)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.ends
            .iter()
            .map(|&(s, t)| usize::from(s == v) + usize::from(t == v))
            .sum()
    }

    /// The subspace spanned by `edge_ids` and their endpoints. Ids and the
    /// parent's ordering are preserved.
    pub fn restrict(&self, edge_ids: &[EdgeId]) -> Result<Self> {
        let mut keep = vec![false; self.edges.len()];
        for id in edge_ids {
            let e = self
                .edge_index(id)
                .ok_or_else(|| invalid!("unknown edge {id}"))?;
            keep[e] = true;
        }
        let mut used = vec![false; self.vertices.len()];
        let mut edges = Vec::new();
        for (e, edge) in self.edges.iter().enumerate() {
            if keep[e] {
                let (s, t) = self.ends[e];
                used[s] = true;
                used[t] = true;
                edges.push(edge.clone());
            }
        }
        let vertices = self
            .vertices
            .iter()
            .zip(&used)
            .filter(|(_, &u)| u)
            .map(|(v, _)| v.clone())
            .collect();
        MeasurementSpace::new(vertices, edges)
    }

    /// Union of two spaces sharing an id namespace. Edges present in both must
    /// agree on their endpoints.
    pub fn union(&self, other: &MeasurementSpace) -> Result<Self> {
        let mut vertices = self.vertices.clone();
        for v in &other.vertices {
            if self.vertex_index(v).is_none() {
                vertices.push(v.clone());
            }
        }
        let mut edges = self.edges.clone();
        for e in &other.edges {
            match self.edge_index(&e.id) {
                Some(i) if self.edges[i] != *e => {
                    return Err(invalid!("edge {} has different endpoints in the two spaces", e.id))
                }
                Some(_) => {}
                None => edges.push(e.clone()),
            }
        }
        MeasurementSpace::new(vertices, edges)
    }

    /// Connected components as lists of vertex indices, in vertex order.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut dsu = DisjointSets::new(self.vertices.len());
        for &(s, t) in &self.ends {
            dsu.union(s, t);
        }
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut order = Vec::new();
        for v in 0..self.vertices.len() {
            let root = dsu.find(v);
            let members = by_root.entry(root).or_insert_with(|| {
                order.push(root);
                Vec::new()
            });
            members.push(v);
        }
        order
            .into_iter()
            .map(|r| by_root.remove(&r).unwrap_or_default())
            .collect()
    }

    /// Dimension of the cycle space, `E - V + C`.
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + self.components().len() - self.vertices.len()
    }

    pub fn is_forest(&self) -> bool {
        self.cycle_rank() == 0
    }

    /// When the space is exactly one (undirected) cycle, returns its edges in
    /// traversal order together with the traversal direction (`true` when the
    /// edge is walked from source to target). The walk starts with edge 0
    /// walked forward.
    pub fn cycle_traversal(&self) -> Option<Vec<(usize, bool)>> {
        let n = self.edges.len();
        if n < 2 || self.vertices.len() != n || self.components().len() != 1 {
            return None;
        }
        if (0..n).any(|v| self.degree(v) != 2) {
            return None;
        }
        let mut walk = Vec::with_capacity(n);
        let mut used = vec![false; n];
        let (start, mut at) = self.ends[0];
        walk.push((0, true));
        used[0] = true;
        while at != start {
            let (e, forward) = (0..n).filter(|&e| !used[e]).find_map(|e| {
                let (s, t) = self.ends[e];
                if s == at {
                    Some((e, true))
                } else if t == at {
                    Some((e, false))
                } else {
                    None
                }
            })?;
            used[e] = true;
            let (s, t) = self.ends[e];
            at = if forward { t } else { s };
            walk.push((e, forward));
        }
        (walk.len() == n).then_some(walk)
    }

    /// If the edges, in their stored order, form the directed n-circle
    /// `e1: v1 -> v2, ..., en: vn -> v1`, returns the vertex indices `v1..vn`.
    pub fn directed_cycle_vertices(&self) -> Option<Vec<usize>> {
        let n = self.edges.len();
        if n < 2 || self.vertices.len() != n {
            return None;
        }
        let order: Vec<usize> = self.ends.iter().map(|&(s, _)| s).collect();
        let distinct: BTreeSet<usize> = order.iter().copied().collect();
        if distinct.len() != n {
            return None;
        }
        for i in 0..n {
            if self.ends[i].1 != order[(i + 1) % n] {
                return None;
            }
        }
        Some(order)
    }

    /// Quotient identifying the endpoints of every edge in `collapsed` and
    /// deleting those edges. A merged vertex is named by joining its members'
    /// ids with `+` in the parent's vertex order.
    pub fn collapse_edges(&self, collapsed: &[EdgeId]) -> Result<Collapse> {
        let mut dsu = DisjointSets::new(self.vertices.len());
        let mut removed = vec![false; self.edges.len()];
        let mut warnings = Vec::new();
        for id in collapsed {
            let e = self
                .edge_index(id)
                .ok_or_else(|| invalid!("unknown edge {id}"))?;
            if removed[e] {
                continue;
            }
            removed[e] = true;
            let (s, t) = self.ends[e];
            if !dsu.union(s, t) {
                warnings.push(CollapseWarning::ClosesCycle(id.clone()));
            }
        }

        let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut roots_in_order = Vec::new();
        for v in 0..self.vertices.len() {
            let root = dsu.find(v);
            members
                .entry(root)
                .or_insert_with(|| {
                    roots_in_order.push(root);
                    Vec::new()
                })
                .push(v);
        }
        let mut new_name: BTreeMap<usize, VertexId> = BTreeMap::new();
        let mut vertices = Vec::new();
        for root in &roots_in_order {
            let names: Vec<&str> = members[root]
                .iter()
                .map(|&v| self.vertices[v].as_str())
                .collect();
            let id = VertexId::new(names.join("+"));
            new_name.insert(*root, id.clone());
            vertices.push(id);
        }

        let mut vertex_map = BTreeMap::new();
        for (v, id) in self.vertices.iter().enumerate() {
            vertex_map.insert(id.clone(), new_name[&dsu.find(v)].clone());
        }
        let mut edges = Vec::new();
        let mut edge_map = BTreeMap::new();
        for (e, edge) in self.edges.iter().enumerate() {
            if removed[e] {
                continue;
            }
            let (s, t) = self.ends[e];
            let (s, t) = (dsu.find(s), dsu.find(t));
            if s == t {
                return Err(invalid!(
                    "collapsing turns surviving edge {} into a loop",
                    edge.id
                ));
            }
            edges.push(Edge {
                id: edge.id.clone(),
                src: new_name[&s].clone(),
                tgt: new_name[&t].clone(),
            });
            edge_map.insert(edge.id.clone(), edge.id.clone());
        }
        let collapsed = self
            .edges
            .iter()
            .zip(&removed)
            .filter(|(_, &r)| r)
            .map(|(e, _)| e.id.clone())
            .collect();
        Ok(Collapse {
            space: MeasurementSpace::new(vertices, edges)?,
            vertex_map,
            edge_map,
            collapsed,
            warnings,
        })
    }
}

/// Vertices present in both spaces.
pub fn intersection_vertices(a: &MeasurementSpace, b: &MeasurementSpace) -> BTreeSet<VertexId> {
    a.vertices()
        .iter()
        .filter(|v| b.vertex_index(v).is_some())
        .cloned()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CollapseWarning {
    /// The collapsed edge set contains a cycle through this edge; transporting
    /// a distribution then needs every edge of the cycle to be diagonal.
    ClosesCycle(EdgeId),
}

/// Result of [`MeasurementSpace::collapse_edges`].
#[derive(Clone, Debug)]
pub struct Collapse {
    pub space: MeasurementSpace,
    /// Old vertex id to the id of its image in the quotient.
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    /// Surviving old edge to its image (ids are kept).
    pub edge_map: BTreeMap<EdgeId, EdgeId>,
    pub collapsed: Vec<EdgeId>,
    pub warnings: Vec<CollapseWarning>,
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined. The smaller index
    /// becomes the root, which keeps naming deterministic.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}
