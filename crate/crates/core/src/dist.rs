//! Simplicial distributions on 1-dimensional spaces.
//!
//! A distribution assigns a nonnegative matrix summing to one to every edge;
//! row `a`, column `b` is the probability of outcome `a` at the source and `b`
//! at the target. Non-signaling asks that every edge incident to a vertex
//! induce the same marginal there.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::invalid;
use crate::rational::Rational;
use crate::space::{Collapse, EdgeId, MeasurementSpace, VertexId};
use crate::{Error, Result};

/// Number of outcomes per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeProfile {
    arities: BTreeMap<VertexId, usize>,
}

impl OutcomeProfile {
    pub fn uniform(space: &MeasurementSpace, d: usize) -> Self {
        OutcomeProfile {
            arities: space.vertices().iter().map(|v| (v.clone(), d)).collect(),
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VertexId, usize)>) -> Self {
        OutcomeProfile {
            arities: pairs.into_iter().collect(),
        }
    }

    pub fn get(&self, v: &VertexId) -> Option<usize> {
        self.arities.get(v).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexId, usize)> {
        self.arities.iter().map(|(v, &m)| (v, m))
    }
}

/// A measurement space together with its outcome arities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    space: MeasurementSpace,
    arities: Vec<usize>,
}

impl Scenario {
    pub fn new(space: MeasurementSpace, profile: &OutcomeProfile) -> Result<Self> {
        let arities = space
            .vertices()
            .iter()
            .map(|v| {
                let m = profile
                    .get(v)
                    .ok_or_else(|| invalid!("no outcome arity for vertex {v}"))?;
                if m < 2 {
                    return Err(invalid!("vertex {v} has {m} outcomes; at least 2 required"));
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Scenario { space, arities })
    }

    pub fn uniform(space: MeasurementSpace, d: usize) -> Result<Self> {
        let profile = OutcomeProfile::uniform(&space, d);
        Scenario::new(space, &profile)
    }

    pub fn from_arities(space: MeasurementSpace, arities: Vec<usize>) -> Result<Self> {
        if arities.len() != space.vertex_count() {
            return Err(invalid!("arity list does not match the vertex count"));
        }
        let profile =
            OutcomeProfile::from_pairs(space.vertices().iter().cloned().zip(arities.iter().copied()));
        Scenario::new(space, &profile)
    }

    pub fn space(&self) -> &MeasurementSpace {
        &self.space
    }

    pub fn arity(&self, v: usize) -> usize {
        self.arities[v]
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn profile(&self) -> OutcomeProfile {
        OutcomeProfile::from_pairs(
            self.space
                .vertices()
                .iter()
                .cloned()
                .zip(self.arities.iter().copied()),
        )
    }

    /// `Some(d)` when every vertex has `d` outcomes.
    pub fn uniform_arity(&self) -> Option<usize> {
        let first = *self.arities.first()?;
        self.arities.iter().all(|&m| m == first).then_some(first)
    }

    /// `(rows, cols)` of the matrix on edge `e`.
    pub fn edge_shape(&self, e: usize) -> (usize, usize) {
        let (s, t) = self.space.ends(e);
        (self.arities[s], self.arities[t])
    }

    pub fn restrict(&self, edge_ids: &[EdgeId]) -> Result<Scenario> {
        let space = self.space.restrict(edge_ids)?;
        let arities = space
            .vertices()
            .iter()
            .map(|v| self.arities[self.space.vertex_index(v).expect("restricted vertex")])
            .collect();
        Ok(Scenario { space, arities })
    }
}

/// Joint distribution on one edge: `rows` source outcomes by `cols` target outcomes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl EdgeMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        EdgeMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged or empty matrix".into()));
        }
        Ok(EdgeMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Point mass at `(a, b)`.
    pub fn point(rows: usize, cols: usize, a: usize, b: usize) -> Self {
        let mut m = EdgeMatrix::zeros(rows, cols);
        m.set(a, b, Rational::one());
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, a: usize, b: usize) -> &Rational {
        &self.data[a * self.cols + b]
    }

    pub fn set(&mut self, a: usize, b: usize, value: Rational) {
        self.data[a * self.cols + b] = value;
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn entries_mut(&mut self) -> &mut [Rational] {
        &mut self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        self.data.chunks(self.cols).map(<[Rational]>::to_vec).collect()
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<Rational> {
        (0..self.cols)
            .map(|b| (0..self.rows).map(|a| self.get(a, b)).sum())
            .collect()
    }

    pub fn total(&self) -> Rational {
        self.data.iter().sum()
    }

    pub fn transpose(&self) -> EdgeMatrix {
        let mut t = EdgeMatrix::zeros(self.cols, self.rows);
        for a in 0..self.rows {
            for b in 0..self.cols {
                t.set(b, a, self.get(a, b).clone());
            }
        }
        t
    }

    /// Cells with nonzero entries, row-major.
    pub fn support(&self) -> Vec<(usize, usize)> {
        (0..self.rows)
            .flat_map(|a| (0..self.cols).map(move |b| (a, b)))
            .filter(|&(a, b)| !self.get(a, b).is_zero())
            .collect()
    }

    /// True when every nonzero entry sits on the diagonal.
    pub fn is_diagonal(&self) -> bool {
        self.support().iter().all(|&(a, b)| a == b)
    }

    fn scaled_add(&mut self, weight: &Rational, other: &EdgeMatrix) {
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += weight * y;
        }
    }
}

impl fmt::Display for EdgeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.data.chunks(self.cols).enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            f.write_str("[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

/// A global outcome assignment: one outcome per vertex, in vertex order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Section(pub Vec<usize>);

impl Section {
    pub fn from_map(scenario: &Scenario, assignment: &BTreeMap<VertexId, usize>) -> Result<Self> {
        scenario
            .space()
            .vertices()
            .iter()
            .map(|v| {
                assignment
                    .get(v)
                    .copied()
                    .ok_or_else(|| invalid!("section has no outcome for {v}"))
            })
            .collect::<Result<Vec<_>>>()
            .map(Section)
    }

    pub fn outcome(&self, v: usize) -> usize {
        self.0[v]
    }
}

/// A non-signaling failure reported by [`SimplicialDistribution::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NegativeEntry {
        edge: EdgeId,
        a: usize,
        b: usize,
    },
    NotNormalized {
        edge: EdgeId,
        total: Rational,
    },
    /// The marginal `edge` induces at `vertex` differs from the one induced by
    /// `reference`.
    Signaling {
        vertex: VertexId,
        edge: EdgeId,
        reference: EdgeId,
        expected: Vec<Rational>,
        found: Vec<Rational>,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeEntry { edge, a, b } => {
                write!(f, "edge {edge}: negative entry at ({a}, {b})")
            }
            Violation::NotNormalized { edge, total } => {
                write!(f, "edge {edge}: entries sum to {total}")
            }
            Violation::Signaling {
                vertex,
                edge,
                reference,
                expected,
                found,
            } => write!(
                f,
                "vertex {vertex}: edge {edge} induces {found:?}, edge {reference} induces {expected:?}"
            ),
        }
    }
}

/// The pair returned by [`extract`]: `p = alpha * q + (1 - alpha) * remainder`.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub alpha: Rational,
    /// `None` exactly when `alpha = 1`, i.e. `p = q`.
    pub remainder: Option<SimplicialDistribution>,
}

#[derive(Clone, Debug)]
pub struct SimplicialDistribution {
    scenario: Arc<Scenario>,
    matrices: Vec<EdgeMatrix>,
}

impl PartialEq for SimplicialDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.same_scenario(other) && self.matrices == other.matrices
    }
}

impl Eq for SimplicialDistribution {}

impl SimplicialDistribution {
    /// Checks shapes only; call [`validate`](Self::validate) for non-signaling.
    pub fn new(scenario: Arc<Scenario>, matrices: Vec<EdgeMatrix>) -> Result<Self> {
        if matrices.len() != scenario.space().edge_count() {
            return Err(Error::Shape(alloc::format!(
                "{} matrices for {} edges",
                matrices.len(),
                scenario.space().edge_count()
            )));
        }
        for (e, m) in matrices.iter().enumerate() {
            let shape = scenario.edge_shape(e);
            if (m.rows, m.cols) != shape {
                return Err(Error::Shape(alloc::format!(
                    "edge {} expects {}x{}, got {}x{}",
                    scenario.space().edges()[e].id,
                    shape.0,
                    shape.1,
                    m.rows,
                    m.cols
                )));
            }
        }
        Ok(SimplicialDistribution { scenario, matrices })
    }

    pub fn from_named(
        scenario: Arc<Scenario>,
        mut named: BTreeMap<EdgeId, EdgeMatrix>,
    ) -> Result<Self> {
        let matrices = scenario
            .space()
            .edges()
            .iter()
            .map(|e| {
                named
                    .remove(&e.id)
                    .ok_or_else(|| Error::Shape(alloc::format!("no matrix for edge {}", e.id)))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(extra) = named.keys().next() {
            return Err(Error::Shape(alloc::format!("matrix for unknown edge {extra}")));
        }
        SimplicialDistribution::new(scenario, matrices)
    }

    pub fn scenario(&self) -> &Arc<Scenario> {
        &self.scenario
    }

    pub fn space(&self) -> &MeasurementSpace {
        self.scenario.space()
    }

    pub fn matrices(&self) -> &[EdgeMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, e: usize) -> &EdgeMatrix {
        &self.matrices[e]
    }

    pub fn matrix_by_id(&self, id: &EdgeId) -> Option<&EdgeMatrix> {
        self.space().edge_index(id).map(|e| &self.matrices[e])
    }

    pub fn same_scenario(&self, other: &SimplicialDistribution) -> bool {
        Arc::ptr_eq(&self.scenario, &other.scenario) || self.scenario == other.scenario
    }

    /// Lists every violation of nonnegativity, normalization and
    /// non-signaling; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let space = self.space();
        let mut out = Vec::new();
        for (e, m) in self.matrices.iter().enumerate() {
            let id = &space.edges()[e].id;
            for a in 0..m.rows {
                for b in 0..m.cols {
                    if m.get(a, b).is_negative() {
                        out.push(Violation::NegativeEntry {
                            edge: id.clone(),
                            a,
                            b,
                        });
                    }
                }
            }
            let total = m.total();
            if !total.is_one() {
                out.push(Violation::NotNormalized {
                    edge: id.clone(),
                    total,
                });
            }
        }
        for v in 0..space.vertex_count() {
            let mut reference: Option<(usize, Vec<Rational>)> = None;
            for (e, marginal) in self.incident_marginals(v) {
                match &reference {
                    None => reference = Some((e, marginal)),
                    Some((r, expected)) if *expected != marginal => {
                        out.push(Violation::Signaling {
                            vertex: space.vertices()[v].clone(),
                            edge: space.edges()[e].id.clone(),
                            reference: space.edges()[*r].id.clone(),
                            expected: expected.clone(),
                            found: marginal,
                        });
                    }
                    Some(_) => {}
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn incident_marginals(&self, v: usize) -> impl Iterator<Item = (usize, Vec<Rational>)> + '_ {
        let space = self.space();
        let outgoing = space.out_edges(v).map(|e| (e, self.matrices[e].row_sums()));
        let incoming = space.in_edges(v).map(|e| (e, self.matrices[e].col_sums()));
        outgoing.chain(incoming)
    }

    /// Marginal at vertex index `v`, read off its first incident edge.
    pub fn marginal_at(&self, v: usize) -> Result<Vec<Rational>> {
        self.incident_marginals(v)
            .next()
            .map(|(_, m)| m)
            .ok_or_else(|| invalid!("vertex {} is isolated", self.space().vertices()[v]))
    }

    pub fn marginal(&self, v: &VertexId) -> Result<Vec<Rational>> {
        let i = self
            .space()
            .vertex_index(v)
            .ok_or_else(|| invalid!("unknown vertex {v}"))?;
        self.marginal_at(i)
    }

    /// Point-mass distribution of a section.
    pub fn deterministic(scenario: Arc<Scenario>, section: &Section) -> Result<Self> {
        let space = scenario.space();
        if section.0.len() != space.vertex_count() {
            return Err(invalid!("section must assign every vertex"));
        }
        for (v, &x) in section.0.iter().enumerate() {
            if x >= scenario.arity(v) {
                return Err(invalid!(
                    "outcome {x} out of range at {}",
                    space.vertices()[v]
                ));
            }
        }
        let matrices = (0..space.edge_count())
            .map(|e| {
                let (s, t) = space.ends(e);
                EdgeMatrix::point(scenario.arity(s), scenario.arity(t), section.0[s], section.0[t])
            })
            .collect();
        SimplicialDistribution::new(scenario, matrices)
    }

    /// `Some(section)` when this is a deterministic distribution (every edge a
    /// point mass). Vertices without edges get outcome 0.
    pub fn as_deterministic(&self) -> Option<Section> {
        let space = self.space();
        let mut assignment = vec![None; space.vertex_count()];
        for (e, m) in self.matrices.iter().enumerate() {
            let support = m.support();
            if support.len() != 1 || !m.get(support[0].0, support[0].1).is_one() {
                return None;
            }
            let (a, b) = support[0];
            let (s, t) = space.ends(e);
            for (v, x) in [(s, a), (t, b)] {
                match assignment[v] {
                    None => assignment[v] = Some(x),
                    Some(y) if y != x => return None,
                    Some(_) => {}
                }
            }
        }
        Some(Section(assignment.into_iter().map(|x| x.unwrap_or(0)).collect()))
    }

    /// Nonzero cells as `(edge index, a, b)`.
    pub fn support_cells(&self) -> Vec<(usize, usize, usize)> {
        self.matrices
            .iter()
            .enumerate()
            .flat_map(|(e, m)| m.support().into_iter().map(move |(a, b)| (e, a, b)))
            .collect()
    }

    pub fn support_pattern(&self) -> BTreeSet<(EdgeId, usize, usize)> {
        let edges = self.space().edges();
        self.support_cells()
            .into_iter()
            .map(|(e, a, b)| (edges[e].id.clone(), a, b))
            .collect()
    }

    /// The restriction to a sub-collection of edges, on the restricted scenario.
    pub fn restrict(&self, edge_ids: &[EdgeId]) -> Result<SimplicialDistribution> {
        let scenario = Arc::new(self.scenario.restrict(edge_ids)?);
        let matrices = scenario
            .space()
            .edges()
            .iter()
            .map(|e| self.matrix_by_id(&e.id).expect("edge of restriction").clone())
            .collect();
        SimplicialDistribution::new(scenario, matrices)
    }

    /// Same matrices on another (equal-shaped) scenario handle.
    pub fn with_scenario(&self, scenario: Arc<Scenario>) -> Result<SimplicialDistribution> {
        SimplicialDistribution::new(scenario, self.matrices.clone())
    }

    /// Distribution on the quotient of a collapse: every collapsed edge must
    /// carry a diagonal matrix; surviving edges keep their matrices.
    pub fn transport_collapse(&self, collapse: &Collapse) -> Result<SimplicialDistribution> {
        let space = self.space();
        for id in &collapse.collapsed {
            let e = space
                .edge_index(id)
                .ok_or_else(|| invalid!("collapsed edge {id} not in the space"))?;
            let m = &self.matrices[e];
            if m.rows != m.cols || !m.is_diagonal() {
                return Err(Error::NotCollapsible(alloc::format!(
                    "edge {id} carries off-diagonal mass"
                )));
            }
        }
        let quotient = &collapse.space;
        let mut arities = vec![0usize; quotient.vertex_count()];
        for (v, id) in space.vertices().iter().enumerate() {
            let image = &collapse.vertex_map[id];
            let w = quotient
                .vertex_index(image)
                .ok_or_else(|| invalid!("collapse data does not match the space"))?;
            let m = self.scenario.arity(v);
            if arities[w] != 0 && arities[w] != m {
                return Err(Error::NotCollapsible(alloc::format!(
                    "vertex {image} merges different outcome arities"
                )));
            }
            arities[w] = m;
        }
        let scenario = Arc::new(Scenario::from_arities(quotient.clone(), arities)?);
        let matrices = quotient
            .edges()
            .iter()
            .map(|e| {
                self.matrix_by_id(&e.id)
                    .cloned()
                    .ok_or_else(|| invalid!("collapse data does not match the space"))
            })
            .collect::<Result<Vec<_>>>()?;
        let transported = SimplicialDistribution::new(scenario, matrices)?;
        if !transported.is_valid() {
            return Err(Error::NotCollapsible(
                "merged vertices carry different marginals".into(),
            ));
        }
        Ok(transported)
    }

    /// Pulls a distribution on the quotient back along the collapse map: every
    /// collapsed edge receives the diagonal of the merged vertex's marginal.
    pub fn pull_back_collapse(
        &self,
        original: Arc<Scenario>,
        collapse: &Collapse,
    ) -> Result<SimplicialDistribution> {
        let space = original.space();
        let matrices = space
            .edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| {
                if let Some(m) = self.matrix_by_id(&edge.id) {
                    return Ok(m.clone());
                }
                let (s, t) = original.edge_shape(e);
                if s != t {
                    return Err(invalid!("collapsed edge {} has non-square shape", edge.id));
                }
                let marginal = self.marginal(&collapse.vertex_map[&edge.src])?;
                let mut m = EdgeMatrix::zeros(s, t);
                for (a, x) in marginal.into_iter().enumerate() {
                    m.set(a, a, x);
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        SimplicialDistribution::new(original, matrices)
    }
}

/// Entrywise convex combination.
pub fn mix(terms: &[(Rational, &SimplicialDistribution)]) -> Result<SimplicialDistribution> {
    let (_, first) = terms
        .first()
        .ok_or_else(|| invalid!("mixture needs at least one term"))?;
    let mut total = Rational::zero();
    for (w, p) in terms {
        if w.is_negative() {
            return Err(invalid!("negative mixture weight {w}"));
        }
        if !p.same_scenario(first) {
            return Err(Error::ScenarioMismatch);
        }
        total += w;
    }
    if !total.is_one() {
        return Err(invalid!("mixture weights sum to {total}"));
    }
    let mut matrices: Vec<EdgeMatrix> = first
        .matrices
        .iter()
        .map(|m| EdgeMatrix::zeros(m.rows, m.cols))
        .collect();
    for (w, p) in terms {
        for (acc, m) in matrices.iter_mut().zip(&p.matrices) {
            acc.scaled_add(w, m);
        }
    }
    SimplicialDistribution::new(first.scenario.clone(), matrices)
}

/// `q ⪯ p`: every nonzero cell of `q` is nonzero in `p`.
pub fn preceq(q: &SimplicialDistribution, p: &SimplicialDistribution) -> Result<bool> {
    if !q.same_scenario(p) {
        return Err(Error::ScenarioMismatch);
    }
    Ok(q.matrices.iter().zip(&p.matrices).all(|(mq, mp)| {
        mq.data
            .iter()
            .zip(&mp.data)
            .all(|(x, y)| x.is_zero() || !y.is_zero())
    }))
}

/// Splits `p = alpha * q + (1 - alpha) * remainder` with the largest
/// admissible `alpha`, the minimum of `p / q` over the support of `q`.
pub fn extract(q: &SimplicialDistribution, p: &SimplicialDistribution) -> Result<Extraction> {
    if !preceq(q, p)? {
        return Err(Error::Precondition("q is not dominated by p".into()));
    }
    let alpha = q
        .matrices
        .iter()
        .zip(&p.matrices)
        .flat_map(|(mq, mp)| mq.data.iter().zip(&mp.data))
        .filter(|(x, _)| !x.is_zero())
        .map(|(x, y)| y / x)
        .min()
        .ok_or_else(|| Error::Precondition("q has empty support".into()))?;
    if alpha.is_one() {
        return Ok(Extraction {
            alpha,
            remainder: None,
        });
    }
    let rest = Rational::one() - &alpha;
    let matrices = q
        .matrices
        .iter()
        .zip(&p.matrices)
        .map(|(mq, mp)| EdgeMatrix {
            rows: mp.rows,
            cols: mp.cols,
            data: mq
                .data
                .iter()
                .zip(&mp.data)
                .map(|(x, y)| (y - &alpha * x) / &rest)
                .collect(),
        })
        .collect();
    Ok(Extraction {
        alpha,
        remainder: Some(SimplicialDistribution::new(p.scenario.clone(), matrices)?),
    })
}

/// Symmetric perturbation `p ± epsilon * direction` certifying that `p` is not
/// a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Perturbation {
    pub direction: Vec<EdgeMatrix>,
    pub epsilon: Rational,
}

impl Perturbation {
    /// Direction `q - p` for some `q ⪯ p` different from `p`.
    pub fn from_dominated(p: &SimplicialDistribution, q: &SimplicialDistribution) -> Result<Self> {
        let split = extract(q, p)?;
        if split.remainder.is_none() {
            return Err(Error::Precondition("q equals p".into()));
        }
        // p + t (p - q) stays valid for t up to alpha / (1 - alpha).
        let reach = &split.alpha / (Rational::one() - &split.alpha);
        let epsilon = reach.min(Rational::one());
        let direction = q
            .matrices
            .iter()
            .zip(&p.matrices)
            .map(|(mq, mp)| EdgeMatrix {
                rows: mp.rows,
                cols: mp.cols,
                data: mq.data.iter().zip(&mp.data).map(|(x, y)| x - y).collect(),
            })
            .collect();
        Ok(Perturbation { direction, epsilon })
    }

    /// The two points `p + epsilon u` and `p - epsilon u`.
    pub fn endpoints(
        &self,
        p: &SimplicialDistribution,
    ) -> Result<(SimplicialDistribution, SimplicialDistribution)> {
        if self.direction.len() != p.matrices.len() {
            return Err(Error::Shape("perturbation does not match the distribution".into()));
        }
        let shifted = |sign: &Rational| {
            let step = sign * &self.epsilon;
            let matrices = p
                .matrices
                .iter()
                .zip(&self.direction)
                .map(|(m, u)| {
                    let mut out = m.clone();
                    out.scaled_add(&step, u);
                    out
                })
                .collect();
            SimplicialDistribution::new(p.scenario.clone(), matrices)
        };
        Ok((shifted(&Rational::one())?, shifted(&-Rational::one())?))
    }

    /// Both endpoints are valid distributions and the direction is nonzero.
    pub fn verify(&self, p: &SimplicialDistribution) -> bool {
        let nonzero = self
            .direction
            .iter()
            .any(|u| u.data.iter().any(|x| !x.is_zero()));
        nonzero
            && self.epsilon.is_positive()
            && self
                .endpoints(p)
                .map(|(a, b)| a.is_valid() && b.is_valid())
                .unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{int, rat};
    use alloc::vec;

    fn m(rows: &[&[(i64, i64)]]) -> EdgeMatrix {
        EdgeMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(n, d)| rat(n, d)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn single_edge(d: usize) -> Arc<Scenario> {
        Arc::new(Scenario::uniform(MeasurementSpace::path(1).unwrap(), d).unwrap())
    }

    #[test]
    fn pr_box_is_valid_with_uniform_marginals() {
        let pr = fixtures::pr_box();
        assert!(pr.validate().is_empty());
        for v in pr.space().vertices() {
            assert_eq!(pr.marginal(v).unwrap(), vec![rat(1, 2), rat(1, 2)]);
        }
        assert_eq!(pr.support_pattern().len(), 8);
    }

    #[test]
    fn signaling_is_reported() {
        let sc = Arc::new(Scenario::uniform(MeasurementSpace::cycle(2).unwrap(), 2).unwrap());
        let p = SimplicialDistribution::new(
            sc,
            vec![
                m(&[&[(1, 2), (0, 1)], &[(0, 1), (1, 2)]]),
                m(&[&[(1, 1), (0, 1)], &[(0, 1), (0, 1)]]),
            ],
        )
        .unwrap();
        let violations = p.validate();
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::Signaling { vertex, .. } if vertex.as_str() == "v1")));
    }

    #[test]
    fn negative_and_unnormalized_entries() {
        let p = SimplicialDistribution::new(
            single_edge(2),
            vec![m(&[&[(-1, 2), (1, 1)], &[(0, 1), (1, 4)]])],
        )
        .unwrap();
        let v = p.validate();
        assert!(v.iter().any(|x| matches!(x, Violation::NegativeEntry { a: 0, b: 0, .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::NotNormalized { .. })));
    }

    #[test]
    fn shape_mismatch_is_structural() {
        let err = SimplicialDistribution::new(single_edge(2), vec![EdgeMatrix::zeros(3, 2)]);
        assert!(matches!(err, Err(Error::Shape(_))));
        let err = SimplicialDistribution::new(single_edge(2), vec![]);
        assert!(matches!(err, Err(Error::Shape(_))));
    }

    #[test]
    fn deterministic_distributions() {
        let sc = Arc::new(Scenario::uniform(MeasurementSpace::cycle(4).unwrap(), 2).unwrap());
        let zero = SimplicialDistribution::deterministic(sc.clone(), &Section(vec![0; 4])).unwrap();
        for mat in zero.matrices() {
            assert_eq!(mat.get(0, 0), &int(1));
        }
        assert!(zero.is_valid());

        let one_edge = SimplicialDistribution::deterministic(single_edge(2), &Section(vec![0, 1]))
            .unwrap();
        assert_eq!(one_edge.matrix(0), &m(&[&[(0, 1), (1, 1)], &[(0, 1), (0, 1)]]));
        assert_eq!(one_edge.marginal(&"v2".into()).unwrap(), vec![int(0), int(1)]);
        assert_eq!(one_edge.as_deterministic(), Some(Section(vec![0, 1])));

        assert!(SimplicialDistribution::deterministic(sc, &Section(vec![0, 2, 0, 0])).is_err());
    }

    #[test]
    fn isolated_vertex_has_no_marginal() {
        let space = MeasurementSpace::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![crate::space::Edge::new("e", "a", "b")],
        )
        .unwrap();
        let sc = Arc::new(Scenario::uniform(space, 2).unwrap());
        let p = SimplicialDistribution::deterministic(sc, &Section(vec![0, 0, 0])).unwrap();
        assert!(p.marginal(&"c".into()).is_err());
        assert!(p.marginal(&"a".into()).is_ok());
    }

    #[test]
    fn mixing_and_extraction() {
        let sc = single_edge(2);
        let d1 = SimplicialDistribution::deterministic(sc.clone(), &Section(vec![0, 1])).unwrap();
        let d2 = SimplicialDistribution::deterministic(sc.clone(), &Section(vec![1, 0])).unwrap();
        let anti = mix(&[(rat(1, 2), &d1), (rat(1, 2), &d2)]).unwrap();
        assert_eq!(anti.matrix(0), &m(&[&[(0, 1), (1, 2)], &[(1, 2), (0, 1)]]));

        let split = extract(&d1, &anti).unwrap();
        assert_eq!(split.alpha, rat(1, 2));
        assert_eq!(split.remainder.unwrap(), d2);

        let same = extract(&anti, &anti).unwrap();
        assert_eq!(same.alpha, int(1));
        assert!(same.remainder.is_none());

        let uniform = SimplicialDistribution::new(
            sc.clone(),
            vec![m(&[&[(1, 4), (1, 4)], &[(1, 4), (1, 4)]])],
        )
        .unwrap();
        let diag = SimplicialDistribution::new(
            sc.clone(),
            vec![m(&[&[(1, 2), (0, 1)], &[(0, 1), (1, 2)]])],
        )
        .unwrap();
        let split = extract(&diag, &uniform).unwrap();
        assert_eq!(split.alpha, rat(1, 2));
        assert_eq!(split.remainder.unwrap(), anti);

        assert!(matches!(extract(&uniform, &diag), Err(Error::Precondition(_))));
        assert!(mix(&[(rat(1, 2), &d1)]).is_err());
        assert_eq!(mix(&[(int(1), &d1)]).unwrap(), d1);
        assert_eq!(
            mix(&[(rat(1, 3), &d1), (rat(1, 3), &d1), (rat(1, 3), &d1)]).unwrap(),
            d1
        );
    }

    #[test]
    fn preorder() {
        let sc = Arc::new(Scenario::uniform(MeasurementSpace::cycle(3).unwrap(), 2).unwrap());
        let uniform = fixtures::uniform(sc.clone());
        for bits in 0..8usize {
            let phi = Section((0..3).map(|i| (bits >> i) & 1).collect());
            let det = SimplicialDistribution::deterministic(sc.clone(), &phi).unwrap();
            assert!(preceq(&det, &uniform).unwrap());
            assert!(!preceq(&uniform, &det).unwrap());
            assert!(preceq(&det, &det).unwrap());
        }
        let other = fixtures::uniform(Arc::new(
            Scenario::uniform(MeasurementSpace::cycle(4).unwrap(), 2).unwrap(),
        ));
        assert_eq!(preceq(&uniform, &other), Err(Error::ScenarioMismatch));
    }

    #[test]
    fn pr_box_edge_cannot_be_collapsed() {
        let pr = fixtures::pr_box();
        let col = pr.space().collapse_edges(&["e1".into()]).unwrap();
        assert!(matches!(pr.transport_collapse(&col), Err(Error::NotCollapsible(_))));
        let none = pr.space().collapse_edges(&[]).unwrap();
        assert_eq!(pr.transport_collapse(&none).unwrap().matrices(), pr.matrices());
    }

    #[test]
    fn collapse_transport_round_trip() {
        let pr = fixtures::pr_box();
        let col = pr.space().collapse_edges(&["e2".into()]).unwrap();
        let bar = pr.transport_collapse(&col).unwrap();
        assert!(bar.is_valid());
        assert_eq!(bar.space().vertex_count(), 3);
        let back = bar.pull_back_collapse(pr.scenario().clone(), &col).unwrap();
        assert_eq!(back, pr);
    }
}
