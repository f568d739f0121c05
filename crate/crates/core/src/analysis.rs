//! Contextuality and vertex tests for distributions on arbitrary 1-dimensional
//! scenarios.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::dist::{EdgeMatrix, Perturbation, Scenario, Section, SimplicialDistribution};
use crate::lpcore::{AffineSolution, LinearSystem};
use crate::rational::Rational;
use crate::{Error, Result};

/// Default cap on the number of sections enumerated by [`find_sections`].
pub const DEFAULT_SECTION_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    /// Deterministic distributions are exactly the noncontextual vertices.
    Deterministic,
    NoncontextualNonvertex,
    ContextualNonvertex,
    ContextualVertex,
}

impl Tag {
    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Deterministic => "DETERMINISTIC",
            Tag::NoncontextualNonvertex => "NONCONTEXTUAL_NONVERTEX",
            Tag::ContextualNonvertex => "CONTEXTUAL_NONVERTEX",
            Tag::ContextualVertex => "CONTEXTUAL_VERTEX",
        }
    }

    pub fn is_vertex(self) -> bool {
        matches!(self, Tag::Deterministic | Tag::ContextualVertex)
    }

    pub fn is_contextual(self) -> bool {
        matches!(self, Tag::ContextualNonvertex | Tag::ContextualVertex)
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub tag: Tag,
    pub strongly_contextual: bool,
    /// Sections in the support.
    pub sections: Vec<Section>,
    /// Convex weights over sections when noncontextual.
    pub noncontextual_witness: Option<Vec<(Section, Rational)>>,
    /// Two-sided perturbation when not a vertex.
    pub perturbation: Option<Perturbation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Contextuality {
    Contextual,
    /// `p = sum weight * delta(section)`.
    Noncontextual(Vec<(Section, Rational)>),
}

impl Contextuality {
    pub fn is_contextual(&self) -> bool {
        matches!(self, Contextuality::Contextual)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VertexTest {
    Vertex,
    NotVertex(Perturbation),
}

impl VertexTest {
    pub fn is_vertex(&self) -> bool {
        matches!(self, VertexTest::Vertex)
    }
}

/// Nonzero pattern of a distribution, per edge, as boolean matrices.
struct SupportMask {
    cells: Vec<Vec<bool>>,
    cols: Vec<usize>,
}

impl SupportMask {
    fn of(p: &SimplicialDistribution) -> Self {
        let cells = p
            .matrices()
            .iter()
            .map(|m| m.entries().iter().map(|x| !x.is_zero()).collect())
            .collect();
        let cols = p.matrices().iter().map(EdgeMatrix::cols).collect();
        SupportMask { cells, cols }
    }

    fn has(&self, e: usize, a: usize, b: usize) -> bool {
        self.cells[e][a * self.cols[e] + b]
    }
}

struct SectionSearch<'a> {
    p: &'a SimplicialDistribution,
    mask: SupportMask,
    domains: Vec<Vec<usize>>,
    assigned: Vec<Option<usize>>,
    found: Vec<Section>,
    limit: usize,
    stop_at_first: bool,
}

impl SectionSearch<'_> {
    /// Values of `v` compatible with every assigned neighbour.
    fn live_domain(&self, v: usize) -> Vec<usize> {
        let space = self.p.space();
        self.domains[v]
            .iter()
            .copied()
            .filter(|&x| {
                space.out_edges(v).all(|e| {
                    let (_, t) = space.ends(e);
                    self.assigned[t].is_none_or(|y| self.mask.has(e, x, y))
                }) && space.in_edges(v).all(|e| {
                    let (s, _) = space.ends(e);
                    self.assigned[s].is_none_or(|y| self.mask.has(e, y, x))
                })
            })
            .collect()
    }

    fn search(&mut self) -> Result<()> {
        if self.stop_at_first && !self.found.is_empty() {
            return Ok(());
        }
        // Fail-first: branch on the unassigned vertex with the fewest options.
        let mut best: Option<(usize, Vec<usize>)> = None;
        for v in 0..self.assigned.len() {
            if self.assigned[v].is_some() {
                continue;
            }
            let dom = self.live_domain(v);
            if best.as_ref().is_none_or(|(_, d)| dom.len() < d.len()) {
                let empty = dom.is_empty();
                best = Some((v, dom));
                if empty {
                    break;
                }
            }
        }
        let Some((v, dom)) = best else {
            if self.found.len() == self.limit {
                return Err(Error::ResourceLimit {
                    what: "sections in the support",
                    cap: self.limit,
                });
            }
            self.found.push(Section(
                self.assigned.iter().map(|x| x.expect("complete")).collect(),
            ));
            return Ok(());
        };
        for x in dom {
            self.assigned[v] = Some(x);
            self.search()?;
            self.assigned[v] = None;
            if self.stop_at_first && !self.found.is_empty() {
                break;
            }
        }
        Ok(())
    }
}

fn section_search(p: &SimplicialDistribution, limit: usize, stop_at_first: bool) -> Result<Vec<Section>> {
    let scenario = p.scenario();
    let space = scenario.space();
    let mask = SupportMask::of(p);
    let domains = (0..space.vertex_count())
        .map(|v| {
            (0..scenario.arity(v))
                .filter(|&x| {
                    space.out_edges(v).all(|e| {
                        (0..scenario.edge_shape(e).1).any(|y| mask.has(e, x, y))
                    }) && space.in_edges(v).all(|e| {
                        (0..scenario.edge_shape(e).0).any(|y| mask.has(e, y, x))
                    })
                })
                .collect()
        })
        .collect();
    let mut search = SectionSearch {
        p,
        mask,
        domains,
        assigned: vec![None; space.vertex_count()],
        found: Vec::new(),
        limit,
        stop_at_first,
    };
    search.search()?;
    let mut found = search.found;
    found.sort();
    Ok(found)
}

/// All sections in the support of `p`, sorted. Errors once more than `cap`
/// sections exist.
pub fn find_sections(p: &SimplicialDistribution, cap: usize) -> Result<Vec<Section>> {
    section_search(p, cap, false)
}

/// The support is empty.
pub fn is_strongly_contextual(p: &SimplicialDistribution) -> bool {
    section_search(p, 1, true)
        .map(|s| s.is_empty())
        .unwrap_or(false)
}

/// Decides whether `p` is a convex mixture of deterministic distributions.
/// Only sections in the support can carry weight, so the LP ranges over those.
pub fn is_contextual(p: &SimplicialDistribution, cap: usize) -> Result<Contextuality> {
    let sections = find_sections(p, cap)?;
    Ok(contextuality_over(p, &sections))
}

fn contextuality_over(p: &SimplicialDistribution, sections: &[Section]) -> Contextuality {
    if sections.is_empty() {
        return Contextuality::Contextual;
    }
    let space = p.space();
    let mut lp: LinearSystem<usize> = LinearSystem::new();
    for i in 0..sections.len() {
        lp.add_var(i, true);
    }
    lp.add_equality(
        (0..sections.len()).map(|i| (i, Rational::one())).collect(),
        Rational::one(),
    );
    for (e, a, b) in p.support_cells() {
        let (s, t) = space.ends(e);
        let terms: Vec<(usize, Rational)> = sections
            .iter()
            .enumerate()
            .filter(|(_, phi)| phi.outcome(s) == a && phi.outcome(t) == b)
            .map(|(i, _)| (i, Rational::one()))
            .collect();
        lp.add_equality(terms, p.matrix(e).get(a, b).clone());
    }
    match lp.lp_feasible() {
        None => Contextuality::Contextual,
        Some(weights) => Contextuality::Noncontextual(
            sections
                .iter()
                .cloned()
                .zip(weights)
                .filter(|(_, w)| !w.is_zero())
                .collect(),
        ),
    }
}

/// Equality system over the supported cells of `p`: edge normalization and
/// agreement of every incident edge's marginal at each vertex. Variables are
/// keyed `(edge, a, b)`.
pub(crate) fn support_system(p: &SimplicialDistribution) -> LinearSystem<(usize, usize, usize)> {
    cell_system(p.scenario(), &p.support_cells())
}

/// The non-signaling equality system restricted to `cells` (all other cells
/// are pinned to zero).
pub(crate) fn cell_system(
    scenario: &Scenario,
    cells: &[(usize, usize, usize)],
) -> LinearSystem<(usize, usize, usize)> {
    let space = scenario.space();
    let mut sys = LinearSystem::new();
    for &cell in cells {
        sys.add_var(cell, true);
    }
    for e in 0..space.edge_count() {
        let terms = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.0 == e)
            .map(|(i, _)| (i, Rational::one()))
            .collect();
        sys.add_equality(terms, Rational::one());
    }
    for v in 0..space.vertex_count() {
        // marginal of edge e at v, outcome x: cells on e with the v-side index x
        let incident: Vec<(usize, bool)> = space
            .out_edges(v)
            .map(|e| (e, true))
            .chain(space.in_edges(v).map(|e| (e, false)))
            .collect();
        let Some((&reference, rest)) = incident.split_first() else {
            continue;
        };
        for x in 0..scenario.arity(v) {
            let side = |&(e, outgoing): &(usize, bool), sign: Rational| {
                cells
                    .iter()
                    .enumerate()
                    .filter(move |(_, c)| c.0 == e && if outgoing { c.1 == x } else { c.2 == x })
                    .map(move |(i, _)| (i, sign.clone()))
            };
            for other in rest {
                let terms: Vec<(usize, Rational)> = side(other, Rational::one())
                    .chain(side(&reference, -Rational::one()))
                    .collect();
                if !terms.is_empty() {
                    sys.add_equality(terms, Rational::zero());
                }
            }
        }
    }
    sys
}

/// `p` is a vertex iff it is the only distribution supported inside its own
/// support, i.e. the equality system on its supported cells has a unique
/// solution. Otherwise a kernel direction gives a two-sided perturbation.
pub fn is_vertex(p: &SimplicialDistribution) -> VertexTest {
    let sys = support_system(p);
    match sys.solve_affine() {
        AffineSolution::Unique(_) | AffineSolution::Infeasible => VertexTest::Vertex,
        AffineSolution::Affine { kernel, .. } => {
            let u = &kernel[0];
            let cells = sys.keys();
            let epsilon = cells
                .iter()
                .zip(u)
                .filter(|(_, x)| !x.is_zero())
                .map(|(&(e, a, b), x)| p.matrix(e).get(a, b) / x.abs())
                .min()
                .expect("kernel vector is nonzero");
            let mut direction: Vec<EdgeMatrix> = p
                .matrices()
                .iter()
                .map(|m| EdgeMatrix::zeros(m.rows(), m.cols()))
                .collect();
            for (&(e, a, b), x) in cells.iter().zip(u) {
                direction[e].set(a, b, x.clone());
            }
            VertexTest::NotVertex(Perturbation { direction, epsilon })
        }
    }
}

/// Places `p` in the contextuality hierarchy.
pub fn classify(p: &SimplicialDistribution, cap: usize) -> Result<Classification> {
    if let Some(phi) = p.as_deterministic() {
        return Ok(Classification {
            tag: Tag::Deterministic,
            strongly_contextual: false,
            sections: vec![phi.clone()],
            noncontextual_witness: Some(vec![(phi, Rational::one())]),
            perturbation: None,
        });
    }
    let sections = find_sections(p, cap)?;
    let contextuality = contextuality_over(p, &sections);
    let vertex = is_vertex(p);
    let strongly_contextual = sections.is_empty();
    let contextual = contextuality.is_contextual();
    let tag = match (&vertex, contextual) {
        (VertexTest::Vertex, true) => Tag::ContextualVertex,
        (VertexTest::NotVertex(_), true) => Tag::ContextualNonvertex,
        (VertexTest::NotVertex(_), false) => Tag::NoncontextualNonvertex,
        (VertexTest::Vertex, false) => {
            panic!("a noncontextual vertex must be deterministic")
        }
    };
    assert!(
        tag != Tag::ContextualVertex || strongly_contextual,
        "contextual vertex with a section in its support"
    );
    assert!(!strongly_contextual || contextual);
    Ok(Classification {
        tag,
        strongly_contextual,
        sections,
        noncontextual_witness: match contextuality {
            Contextuality::Noncontextual(w) => Some(w),
            Contextuality::Contextual => None,
        },
        perturbation: match vertex {
            VertexTest::NotVertex(w) => Some(w),
            VertexTest::Vertex => None,
        },
    })
}
