//! Vertex detection on a union of two edge-disjoint pieces from the vertex
//! supports of the pieces.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::analysis::find_sections;
use crate::dist::{preceq, EdgeMatrix, Perturbation, Scenario, SimplicialDistribution};
use crate::fixtures::{self, Report};
use crate::lpcore::LinearSystem;
use crate::oracle::{enumerate_polytope_vertices, DEFAULT_CELL_CAP};
use crate::rational::{rat, Rational};
use crate::space::{intersection_vertices, EdgeId};
use crate::error::invalid;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    Deterministic,
    KOrder(usize),
    Oracle,
}

impl core::fmt::Display for Provenance {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Provenance::Deterministic => f.write_str("DETERMINISTIC"),
            Provenance::KOrder(k) => write!(f, "K_ORDER({k})"),
            Provenance::Oracle => f.write_str("ORACLE"),
        }
    }
}

/// Vertices of the polytope on a piece whose support lies inside the support
/// of the restricted distribution.
#[derive(Clone, Debug)]
pub struct VsuppResult {
    /// `p` restricted to the piece.
    pub piece: SimplicialDistribution,
    pub elements: Vec<(SimplicialDistribution, Provenance)>,
}

impl VsuppResult {
    pub fn position(&self, q: &SimplicialDistribution) -> Option<usize> {
        self.elements.iter().position(|(x, _)| x == q)
    }
}

pub fn restrict_distribution(p: &SimplicialDistribution, piece: &[EdgeId]) -> Result<SimplicialDistribution> {
    p.restrict(piece)
}

/// Computes the vertex support of `p` on `piece`. Forests only carry
/// sections, a single circle adds the k-order distributions found by walking
/// supported transitions, and anything else goes to the brute-force oracle.
pub fn vsupp(p: &SimplicialDistribution, piece: &[EdgeId], section_cap: usize) -> Result<VsuppResult> {
    let r = p.restrict(piece)?;
    let space = r.space();
    let mut elements: Vec<(SimplicialDistribution, Provenance)> = Vec::new();
    let deterministic = |r: &SimplicialDistribution| -> Result<Vec<(SimplicialDistribution, Provenance)>> {
        find_sections(r, section_cap)?
            .iter()
            .map(|phi| {
                SimplicialDistribution::deterministic(r.scenario().clone(), phi)
                    .map(|d| (d, Provenance::Deterministic))
            })
            .collect()
    };
    if space.is_forest() {
        elements = deterministic(&r)?;
    } else if let Some(walk) = space.cycle_traversal() {
        elements = deterministic(&r)?;
        let mut seen = BTreeSet::new();
        for (q, k) in circle_k_orders(&r, &walk)? {
            if seen.insert(q.matrices().to_vec()) {
                elements.push((q, Provenance::KOrder(k)));
            }
        }
    } else {
        let support: BTreeSet<(usize, usize, usize)> = r.support_cells().into_iter().collect();
        for q in enumerate_polytope_vertices(r.scenario(), Some(&support), DEFAULT_CELL_CAP)? {
            let tag = if q.as_deterministic().is_some() {
                Provenance::Deterministic
            } else {
                Provenance::Oracle
            };
            elements.push((q, tag));
        }
    }
    Ok(VsuppResult { piece: r, elements })
}

/// Simple cycles of order at least 2 in the layered transition graph of a
/// circle, as k-order distributions.
fn circle_k_orders(
    r: &SimplicialDistribution,
    walk: &[(usize, bool)],
) -> Result<Vec<(SimplicialDistribution, usize)>> {
    let scenario = r.scenario();
    let space = scenario.space();
    let n = walk.len();
    let layer_vertex: Vec<usize> = walk
        .iter()
        .map(|&(e, fwd)| {
            let (s, t) = space.ends(e);
            if fwd { s } else { t }
        })
        .collect();
    let arity: Vec<usize> = layer_vertex.iter().map(|&v| scenario.arity(v)).collect();
    let step = |i: usize, a: usize, b: usize| -> bool {
        let (e, fwd) = walk[i];
        let m = r.matrix(e);
        let cell = if fwd { m.get(a, b) } else { m.get(b, a) };
        !cell.is_zero()
    };

    struct Walker<'a> {
        n: usize,
        arity: &'a [usize],
        step: &'a dyn Fn(usize, usize, usize) -> bool,
        used: Vec<Vec<bool>>,
        rows: Vec<Vec<usize>>,
        start: usize,
        out: Vec<Vec<Vec<usize>>>,
    }

    impl Walker<'_> {
        // Extends the current row from layer `i` holding outcome `a`.
        fn go(&mut self, i: usize, a: usize) {
            let next = (i + 1) % self.n;
            for b in 0..self.arity[next] {
                if !(self.step)(i, a, b) {
                    continue;
                }
                if next == 0 {
                    if b == self.start {
                        if self.rows.len() >= 2 {
                            self.out.push(self.rows.clone());
                        }
                    } else if b > self.start && !self.used[0][b] {
                        self.used[0][b] = true;
                        self.rows.push(vec![b]);
                        self.go(0, b);
                        self.rows.pop();
                        self.used[0][b] = false;
                    }
                } else if !self.used[next][b] {
                    self.used[next][b] = true;
                    self.rows.last_mut().expect("open row").push(b);
                    self.go(next, b);
                    self.rows.last_mut().expect("open row").pop();
                    self.used[next][b] = false;
                }
            }
        }
    }

    let mut walker = Walker {
        n,
        arity: &arity,
        step: &step,
        used: arity.iter().map(|&m| vec![false; m]).collect(),
        rows: Vec::new(),
        start: 0,
        out: Vec::new(),
    };
    for a0 in 0..arity[0] {
        walker.start = a0;
        walker.used[0][a0] = true;
        walker.rows.push(vec![a0]);
        walker.go(0, a0);
        walker.rows.pop();
        walker.used[0][a0] = false;
    }

    walker
        .out
        .into_iter()
        .map(|rows| {
            let k = rows.len();
            let weight = Rational::new(1.into(), k.into());
            let mut matrices: Vec<EdgeMatrix> = r
                .matrices()
                .iter()
                .map(|m| EdgeMatrix::zeros(m.rows(), m.cols()))
                .collect();
            for (i, &(e, fwd)) in walk.iter().enumerate() {
                for j in 0..k {
                    let a = rows[j][i];
                    let b = if i + 1 < n { rows[j][i + 1] } else { rows[(j + 1) % k][0] };
                    let (x, y) = if fwd { (a, b) } else { (b, a) };
                    matrices[e].set(x, y, weight.clone());
                }
            }
            SimplicialDistribution::new(scenario.clone(), matrices).map(|q| (q, k))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GlueVerdict {
    Vertex,
    /// A glued distribution different from `p` together with a two-sided
    /// perturbation of `p` along it.
    NotVertex {
        witness: SimplicialDistribution,
        perturbation: Perturbation,
    },
}

impl GlueVerdict {
    pub fn is_vertex(&self) -> bool {
        matches!(self, GlueVerdict::Vertex)
    }
}

#[derive(Clone, Debug)]
pub struct GlueReport {
    pub verdict: GlueVerdict,
    pub vsupp_a: VsuppResult,
    pub vsupp_b: VsuppResult,
    /// Convex weight of each vertex-support element when the constraints fix it.
    pub weights_a: Vec<Option<Rational>>,
    pub weights_b: Vec<Option<Rational>>,
    pub intersection: Vec<crate::space::VertexId>,
}

impl GlueReport {
    /// The fixed weight of a given element of piece A's vertex support.
    pub fn weight_a(&self, q: &SimplicialDistribution) -> Option<&Rational> {
        self.vsupp_a.position(q).and_then(|i| self.weights_a[i].as_ref())
    }

    pub fn weight_b(&self, q: &SimplicialDistribution) -> Option<&Rational> {
        self.vsupp_b.position(q).and_then(|i| self.weights_b[i].as_ref())
    }
}

/// Tests whether `p` is a vertex by checking that the distribution glued from
/// convex mixtures over the two vertex supports is uniquely determined.
pub fn glue_vertex_check(
    p: &SimplicialDistribution,
    piece_a: &[EdgeId],
    piece_b: &[EdgeId],
    section_cap: usize,
) -> Result<GlueReport> {
    let space = p.space();
    let a_set: BTreeSet<&EdgeId> = piece_a.iter().collect();
    let b_set: BTreeSet<&EdgeId> = piece_b.iter().collect();
    if a_set.len() != piece_a.len() || b_set.len() != piece_b.len() {
        return Err(invalid!("a piece lists an edge twice"));
    }
    if a_set.intersection(&b_set).next().is_some() {
        return Err(invalid!("pieces must be edge-disjoint"));
    }
    if a_set.len() + b_set.len() != space.edge_count()
        || space.edges().iter().any(|e| !a_set.contains(&e.id) && !b_set.contains(&e.id))
    {
        return Err(invalid!("pieces must cover every edge"));
    }
    let va = vsupp(p, piece_a, section_cap)?;
    let vb = vsupp(p, piece_b, section_cap)?;
    let shared: Vec<crate::space::VertexId> =
        intersection_vertices(va.piece.space(), vb.piece.space()).into_iter().collect();

    let na = va.elements.len();
    let nb = vb.elements.len();
    let mut lp: LinearSystem<(bool, usize)> = LinearSystem::new();
    for i in 0..na {
        lp.add_var((false, i), true);
    }
    for j in 0..nb {
        lp.add_var((true, j), true);
    }
    lp.add_equality((0..na).map(|i| (i, Rational::one())).collect(), Rational::one());
    lp.add_equality((0..nb).map(|j| (na + j, Rational::one())).collect(), Rational::one());
    for v in &shared {
        let ma: Vec<Vec<Rational>> = va
            .elements
            .iter()
            .map(|(q, _)| q.marginal(v))
            .collect::<Result<_>>()?;
        let mb: Vec<Vec<Rational>> = vb
            .elements
            .iter()
            .map(|(q, _)| q.marginal(v))
            .collect::<Result<_>>()?;
        let arity = p.scenario().arity(space.vertex_index(v).expect("shared vertex"));
        for x in 0..arity {
            let mut terms: Vec<(usize, Rational)> = Vec::new();
            for (i, m) in ma.iter().enumerate() {
                if !m[x].is_zero() {
                    terms.push((i, m[x].clone()));
                }
            }
            for (j, m) in mb.iter().enumerate() {
                if !m[x].is_zero() {
                    terms.push((na + j, -m[x].clone()));
                }
            }
            if !terms.is_empty() {
                lp.add_equality(terms, Rational::zero());
            }
        }
    }

    let region = lp
        .feasible_region()
        .ok_or_else(|| invalid!("the restrictions of p admit no compatible mixtures"))?;
    let glue = |x: &[Rational]| -> Result<SimplicialDistribution> {
        let mut matrices: Vec<EdgeMatrix> = p
            .matrices()
            .iter()
            .map(|m| EdgeMatrix::zeros(m.rows(), m.cols()))
            .collect();
        for (offset, side) in [(0, &va), (na, &vb)] {
            for (i, (q, _)) in side.elements.iter().enumerate() {
                let w = &x[offset + i];
                if w.is_zero() {
                    continue;
                }
                for (le, edge) in q.space().edges().iter().enumerate() {
                    let e = space.edge_index(&edge.id).expect("piece edge");
                    let src = q.matrix(le);
                    for (slot, val) in matrices[e].entries_mut().iter_mut().zip(src.entries()) {
                        if !val.is_zero() {
                            *slot += w * val;
                        }
                    }
                }
            }
        }
        SimplicialDistribution::new(p.scenario().clone(), matrices)
    };

    // one objective per supported cell of p
    let owner: BTreeMap<usize, (usize, &VsuppResult)> = space
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            if a_set.contains(&edge.id) {
                (e, (0, &va))
            } else {
                (e, (na, &vb))
            }
        })
        .collect();
    let mut verdict = GlueVerdict::Vertex;
    for (e, a, b) in p.support_cells() {
        let (offset, side) = owner[&e];
        let id = &space.edges()[e].id;
        let mut objective = vec![Rational::zero(); na + nb];
        for (i, (q, _)) in side.elements.iter().enumerate() {
            objective[offset + i] = q.matrix_by_id(id).expect("piece edge").get(a, b).clone();
        }
        let ext = region.extremes(&objective);
        if ext.fixed_value().is_some() {
            continue;
        }
        let lo = glue(ext.min.point().expect("bounded"))?;
        let hi = glue(ext.max.point().expect("bounded"))?;
        let witness = if lo != *p { lo } else { hi };
        let perturbation = Perturbation::from_dominated(p, &witness)?;
        verdict = GlueVerdict::NotVertex { witness, perturbation };
        break;
    }

    let weight = |k: usize| {
        let mut unit = vec![Rational::zero(); na + nb];
        unit[k] = Rational::one();
        region.extremes(&unit).fixed_value().cloned()
    };
    Ok(GlueReport {
        verdict,
        weights_a: (0..na).map(weight).collect(),
        weights_b: (na..na + nb).map(weight).collect(),
        vsupp_a: va,
        vsupp_b: vb,
        intersection: shared,
    })
}

/// Builds a distribution on `scenario` from sparse `(edge, a, b, value)`
/// entries.
pub fn sparse(scenario: &Arc<Scenario>, entries: &[(&str, usize, usize, Rational)]) -> Result<SimplicialDistribution> {
    let space = scenario.space();
    let mut matrices: Vec<EdgeMatrix> = (0..space.edge_count())
        .map(|e| {
            let (r, c) = scenario.edge_shape(e);
            EdgeMatrix::zeros(r, c)
        })
        .collect();
    for (id, a, b, v) in entries {
        let e = space
            .edge_index(&EdgeId::new(*id))
            .ok_or_else(|| invalid!("unknown edge {id}"))?;
        matrices[e].set(*a, *b, v.clone());
    }
    SimplicialDistribution::new(scenario.clone(), matrices)
}

fn ids(xs: &[&str]) -> Vec<EdgeId> {
    xs.iter().map(|x| EdgeId::new(*x)).collect()
}

/// End-to-end check on the two-party, three-setting, three-outcome Bell
/// distribution: collapse the edges carrying a diagonal matrix, drop the
/// duplicated parallel edge and glue the two remaining circles.
pub fn verify_233_example() -> Result<Report> {
    verify_233_with(&fixtures::bell_233())
}

pub fn verify_233_with(p: &SimplicialDistribution) -> Result<Report> {
    let mut report = Report::new("bell-233");
    let violations = p.validate();
    report.check(
        "bell-233/valid",
        violations.is_empty(),
        format!("{} violation(s)", violations.len()),
    );
    if !violations.is_empty() {
        return Ok(report);
    }
    let collapse = p.space().collapse_edges(&ids(&fixtures::BELL_233_DIAGONAL_EDGES))?;
    let collapsed = match p.transport_collapse(&collapse) {
        Ok(q) => q,
        Err(err) => {
            report.check("bell-233/collapse", false, format!("{err}"));
            return Ok(report);
        }
    };
    report.check("bell-233/collapse", true, format!("{} vertices", collapsed.space().vertex_count()));
    let point = vec![rat(1, 2), rat(1, 4), rat(1, 4)];
    for v in collapsed.space().vertices() {
        let m = collapsed.marginal(v)?;
        report.check(
            &format!("bell-233/point-marginal/{v}"),
            m == point,
            fmt_vec(&m),
        );
    }
    let reduced = match drop_duplicate_edge(&collapsed, &EdgeId::new(fixtures::BELL_233_DUPLICATE))? {
        Some(z) => z,
        None => {
            report.check("bell-233/duplicate-edge", false, String::from("no equal parallel edge"));
            return Ok(report);
        }
    };
    report.check("bell-233/duplicate-edge", true, format!("{} edges remain", reduced.space().edge_count()));
    let (pa, pb) = fixtures::bell_233_pieces();
    let glue = glue_vertex_check(&reduced, &ids(&pa), &ids(&pb), crate::analysis::DEFAULT_SECTION_CAP)?;
    report.check(
        "bell-233/vsupp-a",
        glue.vsupp_a.elements.len() == 4
            && glue.vsupp_a.elements.iter().any(|(_, t)| *t == Provenance::KOrder(3)),
        format!("{} elements", glue.vsupp_a.elements.len()),
    );
    report.check("bell-233/vertex", glue.verdict.is_vertex(), verdict_name(&glue.verdict).into());
    let sc = glue.vsupp_b.piece.scenario().clone();
    let b1 = sparse(&sc, &[("s4", 1, 0, rat(1, 1)), ("s5", 0, 1, rat(1, 1))])?;
    let b2 = sparse(&sc, &[("s4", 0, 2, rat(1, 1)), ("s5", 2, 0, rat(1, 1))])?;
    let h = rat(1, 2);
    let b3 = sparse(
        &sc,
        &[
            ("s4", 0, 0, h.clone()),
            ("s4", 2, 1, h.clone()),
            ("s5", 0, 2, h.clone()),
            ("s5", 1, 0, h),
        ],
    )?;
    for (name, q, want) in [("beta1", &b1, rat(1, 4)), ("beta2", &b2, rat(1, 4)), ("beta3", &b3, rat(1, 2))] {
        let got = glue.weight_b(q);
        report.check(
            &format!("bell-233/{name}"),
            got == Some(&want),
            format!("expected {want}, got {}", fmt_opt(got)),
        );
    }
    let direct = crate::analysis::is_vertex(p).is_vertex();
    report.check("bell-233/direct-vertex-test", direct, String::new());
    Ok(report)
}

/// Removes `edge` when another edge with the same endpoints carries an equal
/// matrix; `None` if there is no such twin.
pub fn drop_duplicate_edge(p: &SimplicialDistribution, edge: &EdgeId) -> Result<Option<SimplicialDistribution>> {
    let space = p.space();
    let e = space.edge_index(edge).ok_or_else(|| invalid!("unknown edge {edge}"))?;
    let twin = (0..space.edge_count())
        .any(|f| f != e && space.ends(f) == space.ends(e) && p.matrix(f) == p.matrix(e));
    if !twin {
        return Ok(None);
    }
    let keep: Vec<EdgeId> = space.edges().iter().filter(|x| x.id != *edge).map(|x| x.id.clone()).collect();
    p.restrict(&keep).map(Some)
}

pub(crate) fn verdict_name(v: &GlueVerdict) -> &'static str {
    match v {
        GlueVerdict::Vertex => "VERTEX",
        GlueVerdict::NotVertex { .. } => "NOT_VERTEX",
    }
}

pub(crate) fn fmt_vec(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("({})", parts.join(", "))
}

pub(crate) fn fmt_opt(v: Option<&Rational>) -> String {
    v.map_or_else(|| String::from("not fixed"), |x| format!("{x}"))
}

/// Checks that every member of `vsupp` is dominated by the piece distribution.
pub fn vsupp_is_dominated(v: &VsuppResult) -> Result<bool> {
    for (q, _) in &v.elements {
        if !preceq(q, &v.piece)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{is_vertex, DEFAULT_SECTION_CAP};
    use crate::dist::mix;
    use crate::rational::rat;

    const CAP: usize = DEFAULT_SECTION_CAP;

    #[test]
    fn pr_box_split() {
        let pr = fixtures::pr_box();
        let (a, b) = fixtures::pr_box_pieces();
        let r = glue_vertex_check(&pr, &ids(&a), &ids(&b), CAP).unwrap();
        assert!(r.verdict.is_vertex());
        assert_eq!(r.vsupp_a.elements.len(), 2);
        assert_eq!(r.vsupp_b.elements.len(), 2);
        assert!(r.weights_a.iter().chain(&r.weights_b).all(|w| w == &Some(rat(1, 2))));
        let ra = restrict_distribution(&pr, &ids(&a)).unwrap();
        assert_eq!(ra.matrix(0).get(0, 1), &rat(1, 2));
        assert_eq!(ra.matrix(0).get(1, 0), &rat(1, 2));
    }

    #[test]
    fn uniform_split_is_not_a_vertex() {
        let pr = fixtures::pr_box();
        let u = fixtures::uniform(pr.scenario().clone());
        let (a, b) = fixtures::pr_box_pieces();
        let r = glue_vertex_check(&u, &ids(&a), &ids(&b), CAP).unwrap();
        match r.verdict {
            GlueVerdict::NotVertex { witness, perturbation } => {
                assert_ne!(witness, u);
                assert!(witness.is_valid());
                assert!(preceq(&witness, &u).unwrap());
                assert!(perturbation.verify(&u));
            }
            GlueVerdict::Vertex => panic!("uniform is not a vertex"),
        }
    }

    #[test]
    fn trichotomic_split() {
        let p = fixtures::trichotomic();
        let (a, b) = fixtures::trichotomic_pieces();
        let r = glue_vertex_check(&p, &ids(&a), &ids(&b), CAP).unwrap();
        assert!(r.verdict.is_vertex());
        assert_eq!(r.vsupp_a.elements.len(), 2);
        assert_eq!(r.vsupp_b.elements.len(), 2);
        let mut wa: Vec<_> = r.weights_a.iter().map(|w| w.clone().unwrap()).collect();
        let mut wb: Vec<_> = r.weights_b.iter().map(|w| w.clone().unwrap()).collect();
        wa.sort();
        wb.sort();
        assert_eq!(wa, vec![rat(1, 3), rat(2, 3)]);
        assert_eq!(wb, vec![rat(1, 3), rat(2, 3)]);
    }

    #[test]
    fn bell_233_pipeline() {
        let report = verify_233_example().unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn bell_233_vsupp_of_first_circle() {
        let p = fixtures::bell_233();
        let collapse = p.space().collapse_edges(&ids(&fixtures::BELL_233_DIAGONAL_EDGES)).unwrap();
        let q = p.transport_collapse(&collapse).unwrap();
        let z = drop_duplicate_edge(&q, &EdgeId::new(fixtures::BELL_233_DUPLICATE)).unwrap().unwrap();
        let (a, _) = fixtures::bell_233_pieces();
        let v = vsupp(&z, &ids(&a), CAP).unwrap();
        let sc = v.piece.scenario().clone();
        let t = rat(1, 3);
        let h = rat(1, 2);
        let expected = [
            sparse(&sc, &[("s1", 0, 0, rat(1, 1)), ("s2", 0, 0, rat(1, 1))]).unwrap(),
            sparse(&sc, &[("s1", 0, 0, h.clone()), ("s1", 1, 1, h.clone()), ("s2", 0, 1, h.clone()), ("s2", 1, 0, h.clone())]).unwrap(),
            sparse(
                &sc,
                &[
                    ("s1", 0, 2, t.clone()),
                    ("s1", 1, 1, t.clone()),
                    ("s1", 2, 0, t.clone()),
                    ("s2", 0, 1, t.clone()),
                    ("s2", 1, 0, t.clone()),
                    ("s2", 2, 2, t),
                ],
            )
            .unwrap(),
            sparse(&sc, &[("s1", 0, 2, h.clone()), ("s1", 2, 0, h.clone()), ("s2", 0, 0, h.clone()), ("s2", 2, 2, h)]).unwrap(),
        ];
        assert_eq!(v.elements.len(), 4);
        for e in &expected {
            assert!(v.position(e).is_some(), "missing {e:?}");
        }
        assert!(vsupp_is_dominated(&v).unwrap());
    }

    #[test]
    fn tampered_bell_233_fails() {
        let p = fixtures::bell_233();
        let mut m = p.matrices().to_vec();
        let s = 4;
        let mut rows = m[s].to_rows();
        rows[0][1] += rat(1, 100);
        rows[0][2] -= rat(1, 100);
        m[s] = EdgeMatrix::from_rows(rows).unwrap();
        let tampered = SimplicialDistribution::new(p.scenario().clone(), m).unwrap();
        let report = verify_233_with(&tampered).unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn vsupp_matches_oracle_on_circles() {
        let p = fixtures::trichotomic();
        let (a, _) = fixtures::trichotomic_pieces();
        let v = vsupp(&p, &ids(&a), CAP).unwrap();
        let support: BTreeSet<_> = v.piece.support_cells().into_iter().collect();
        let mut oracle = enumerate_polytope_vertices(v.piece.scenario(), Some(&support), DEFAULT_CELL_CAP).unwrap();
        let mut ours: Vec<_> = v.elements.iter().map(|(q, _)| q.clone()).collect();
        oracle.sort_by(|x, y| x.matrices().cmp(y.matrices()));
        ours.sort_by(|x, y| x.matrices().cmp(y.matrices()));
        assert_eq!(ours, oracle);
    }

    #[test]
    fn glue_agrees_with_direct_test_on_mixtures() {
        let pr = fixtures::pr_box();
        let sc = pr.scenario().clone();
        let det = SimplicialDistribution::deterministic(sc.clone(), &crate::dist::Section(vec![0, 1, 1, 1])).unwrap();
        let (a, b) = fixtures::pr_box_pieces();
        for q in [pr.clone(), det.clone(), mix(&[(rat(1, 3), &pr), (rat(2, 3), &det)]).unwrap()] {
            let r = glue_vertex_check(&q, &ids(&a), &ids(&b), CAP).unwrap();
            assert_eq!(r.verdict.is_vertex(), is_vertex(&q).is_vertex());
        }
    }

    #[test]
    fn oracle_fallback_for_theta_pieces() {
        // a circle with a pendant edge is neither a forest nor a circle
        let p = fixtures::trichotomic();
        let all: Vec<EdgeId> = p.space().edge_ids();
        let v = vsupp(&p, &all[..3], CAP).unwrap();
        assert!(v.elements.iter().all(|(_, t)| matches!(t, Provenance::Oracle | Provenance::Deterministic)));
        assert!(vsupp_is_dominated(&v).unwrap());
    }

    #[test]
    fn pieces_must_partition() {
        let pr = fixtures::pr_box();
        assert!(glue_vertex_check(&pr, &ids(&["e1"]), &ids(&["e2", "e3"]), CAP).is_err());
        assert!(glue_vertex_check(&pr, &ids(&["e1", "e2"]), &ids(&["e2", "e3", "e4"]), CAP).is_err());
    }
}
