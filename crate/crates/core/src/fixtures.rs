//! Worked examples used by tests and the command-line checks, plus the
//! claim reports produced when verifying them.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::analysis::{classify, is_vertex, Tag, DEFAULT_SECTION_CAP};
use crate::cycleclass::{from_sequence, recognize, CycleSequence};
use crate::dist::{EdgeMatrix, Scenario, SimplicialDistribution};
use crate::glue::{fmt_opt, glue_vertex_check, sparse, verdict_name};
use crate::rational::{rat, Rational};
use crate::space::{Edge, EdgeId, MeasurementSpace, VertexId};
use crate::Result;

/// One named claim and whether it held.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Claim {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub claims: Vec<Claim>,
}

impl Report {
    pub fn new(title: &str) -> Self {
        Report {
            title: title.into(),
            claims: Vec::new(),
        }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.claims.push(Claim {
            name: name.into(),
            passed,
            detail,
        });
    }

    pub fn passed(&self) -> bool {
        !self.claims.is_empty() && self.claims.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Claim> {
        self.claims.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.claims {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                writeln!(f, "{mark} {}", c.name)?;
            } else {
                writeln!(f, "{mark} {}: {}", c.name, c.detail)?;
            }
        }
        Ok(())
    }
}

fn m(rows: &[&[(i64, i64)]]) -> EdgeMatrix {
    EdgeMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&(n, d)| rat(n, d)).collect())
            .collect(),
    )
    .expect("rectangular")
}

const Z: (i64, i64) = (0, 1);
const H: (i64, i64) = (1, 2);
const T3: (i64, i64) = (1, 3);
const Q4: (i64, i64) = (1, 4);

fn ids(xs: &[&str]) -> Vec<EdgeId> {
    xs.iter().map(|x| EdgeId::new(*x)).collect()
}

/// Uniform distribution on every edge of `scenario`.
pub fn uniform(scenario: Arc<Scenario>) -> SimplicialDistribution {
    let matrices = (0..scenario.space().edge_count())
        .map(|e| {
            let (r, c) = scenario.edge_shape(e);
            let w = Rational::new(1.into(), (r * c).into());
            let mut out = EdgeMatrix::zeros(r, c);
            for a in 0..r {
                for b in 0..c {
                    out.set(a, b, w.clone());
                }
            }
            out
        })
        .collect();
    SimplicialDistribution::new(scenario, matrices).expect("shapes match")
}

/// PR box on the directed 4-circle: the first edge anticorrelated, the other
/// three correlated, every supported cell 1/2.
pub fn pr_box() -> SimplicialDistribution {
    let sc = Arc::new(Scenario::uniform(MeasurementSpace::cycle(4).expect("n >= 2"), 2).expect("d >= 2"));
    let anti = m(&[&[Z, H], &[H, Z]]);
    let diag = m(&[&[H, Z], &[Z, H]]);
    SimplicialDistribution::new(sc, vec![anti, diag.clone(), diag.clone(), diag]).expect("shapes match")
}

/// The first edge against the path formed by the remaining three.
pub fn pr_box_pieces() -> (Vec<&'static str>, Vec<&'static str>) {
    (vec!["e1"], vec!["e2", "e3", "e4"])
}

fn trichotomic_space() -> MeasurementSpace {
    MeasurementSpace::new(
        ["x1", "x2", "x3"].into_iter().map(VertexId::from).collect(),
        vec![
            Edge::new("s1", "x1", "x2"),
            Edge::new("s2", "x2", "x1"),
            Edge::new("s3", "x2", "x3"),
            Edge::new("s4", "x3", "x2"),
        ],
    )
    .expect("well formed")
}

/// Two 2-circles sharing the vertex `x2`, three outcomes everywhere, with
/// uniform marginals.
pub fn trichotomic() -> SimplicialDistribution {
    let sc = Arc::new(Scenario::uniform(trichotomic_space(), 3).expect("d >= 2"));
    let q1 = m(&[&[Z, T3, Z], &[T3, Z, Z], &[Z, Z, T3]]);
    let id = m(&[&[T3, Z, Z], &[Z, T3, Z], &[Z, Z, T3]]);
    let q4 = m(&[&[Z, Z, T3], &[Z, T3, Z], &[T3, Z, Z]]);
    SimplicialDistribution::new(sc, vec![q1, id.clone(), id, q4]).expect("shapes match")
}

pub fn trichotomic_pieces() -> (Vec<&'static str>, Vec<&'static str>) {
    (vec!["s1", "s2"], vec!["s3", "s4"])
}

/// Edges of the Bell distribution that carry the diagonal matrix.
pub const BELL_233_DIAGONAL_EDGES: [&str; 4] = ["s6", "s7", "s8", "s9"];
/// One of two parallel edges carrying the same matrix after collapsing.
pub const BELL_233_DUPLICATE: &str = "s3";

pub fn bell_233_pieces() -> (Vec<&'static str>, Vec<&'static str>) {
    (vec!["s1", "s2"], vec!["s4", "s5"])
}

/// The complete bipartite graph between settings `a1..a3` and `b1..b3`,
/// every edge pointing from an `a` to a `b`.
pub fn bell_233_space() -> MeasurementSpace {
    MeasurementSpace::new(
        ["a1", "a2", "a3", "b1", "b2", "b3"].into_iter().map(VertexId::from).collect(),
        vec![
            Edge::new("s1", "a2", "b2"),
            Edge::new("s2", "a3", "b2"),
            Edge::new("s3", "a2", "b1"),
            Edge::new("s4", "a3", "b1"),
            Edge::new("s5", "a1", "b3"),
            Edge::new("s6", "a1", "b1"),
            Edge::new("s7", "a1", "b2"),
            Edge::new("s8", "a2", "b3"),
            Edge::new("s9", "a3", "b3"),
        ],
    )
    .expect("well formed")
}

/// Two parties, three settings each, three outcomes; every marginal is
/// (1/2, 1/4, 1/4).
pub fn bell_233() -> SimplicialDistribution {
    let sc = Arc::new(Scenario::uniform(bell_233_space(), 3).expect("d >= 2"));
    let p = m(&[&[Q4, Z, Q4], &[Z, Q4, Z], &[Q4, Z, Z]]);
    let q = m(&[&[Q4, Q4, Z], &[Q4, Z, Z], &[Z, Z, Q4]]);
    let r = m(&[&[Q4, Z, Q4], &[Q4, Z, Z], &[Z, Q4, Z]]);
    let s = m(&[&[Z, Q4, Q4], &[Q4, Z, Z], &[Q4, Z, Z]]);
    let t = m(&[&[H, Z, Z], &[Z, Q4, Z], &[Z, Z, Q4]]);
    SimplicialDistribution::new(
        sc,
        vec![p, q, r.clone(), r, s, t.clone(), t.clone(), t.clone(), t],
    )
    .expect("shapes match")
}

/// Rows `(0, 1), (3, 2), (2, 3)` over four outcomes on the 2-circle.
pub fn two_circle_sequence() -> CycleSequence {
    CycleSequence::new(4, vec![vec![0, 1], vec![3, 2], vec![2, 3]]).expect("distinct columns")
}

/// The 3-order distribution of [`two_circle_sequence`], written out by hand.
pub fn two_circle_three_order() -> SimplicialDistribution {
    let sc = Arc::new(Scenario::uniform(MeasurementSpace::cycle(2).expect("n >= 2"), 4).expect("d >= 2"));
    let e1 = m(&[&[Z, T3, Z, Z], &[Z, Z, Z, Z], &[Z, Z, Z, T3], &[Z, Z, T3, Z]]);
    let e2 = m(&[&[Z, Z, Z, Z], &[Z, Z, Z, T3], &[Z, Z, T3, Z], &[T3, Z, Z, Z]]);
    SimplicialDistribution::new(sc, vec![e1, e2]).expect("shapes match")
}

fn tag_claim(report: &mut Report, name: &str, p: &SimplicialDistribution, want: Tag) {
    match classify(p, DEFAULT_SECTION_CAP) {
        Ok(c) => report.check(name, c.tag == want, c.tag.as_str().to_string()),
        Err(e) => report.check(name, false, format!("{e}")),
    }
}

fn valid_claim(report: &mut Report, name: &str, p: &SimplicialDistribution) -> bool {
    let violations = p.validate();
    let detail = violations.first().map(|v| format!("{v}")).unwrap_or_default();
    report.check(name, violations.is_empty(), detail);
    violations.is_empty()
}

/// PR box: valid, a contextual vertex, and the split into one edge plus a
/// path fixes both mixing weights at 1/2.
pub fn verify_pr_box(p: &SimplicialDistribution) -> Result<Report> {
    let mut report = Report::new("pr-box");
    if !valid_claim(&mut report, "pr-box/valid", p) {
        return Ok(report);
    }
    report.check("pr-box/matches-builtin", *p == pr_box(), String::new());
    tag_claim(&mut report, "pr-box/contextual-vertex", p, Tag::ContextualVertex);
    let (a, b) = pr_box_pieces();
    let glue = glue_vertex_check(p, &ids(&a), &ids(&b), DEFAULT_SECTION_CAP)?;
    report.check("pr-box/glue-vertex", glue.verdict.is_vertex(), verdict_name(&glue.verdict).into());
    let sa = glue.vsupp_a.piece.scenario().clone();
    let sb = glue.vsupp_b.piece.scenario().clone();
    let alpha = sparse(&sa, &[("e1", 0, 1, rat(1, 1))])?;
    let beta = sparse(&sb, &[("e2", 0, 0, rat(1, 1)), ("e3", 0, 0, rat(1, 1)), ("e4", 0, 0, rat(1, 1))])?;
    for (name, got) in [("pr-box/alpha", glue.weight_a(&alpha)), ("pr-box/beta", glue.weight_b(&beta))] {
        report.check(name, got == Some(&rat(1, 2)), format!("expected 1/2, got {}", fmt_opt(got)));
    }
    Ok(report)
}

/// Two 2-circles glued at a vertex: unique weights (1/3, 2/3) on both sides.
pub fn verify_trichotomic(p: &SimplicialDistribution) -> Result<Report> {
    let mut report = Report::new("trichotomic");
    if !valid_claim(&mut report, "trichotomic/valid", p) {
        return Ok(report);
    }
    let (a, b) = trichotomic_pieces();
    let glue = glue_vertex_check(p, &ids(&a), &ids(&b), DEFAULT_SECTION_CAP)?;
    report.check("trichotomic/glue-vertex", glue.verdict.is_vertex(), verdict_name(&glue.verdict).into());
    let sa = glue.vsupp_a.piece.scenario().clone();
    let sb = glue.vsupp_b.piece.scenario().clone();
    let one = rat(1, 1);
    let h = rat(1, 2);
    let alpha1 = sparse(&sa, &[("s1", 2, 2, one.clone()), ("s2", 2, 2, one.clone())])?;
    let alpha2 = sparse(
        &sa,
        &[("s1", 0, 1, h.clone()), ("s1", 1, 0, h.clone()), ("s2", 0, 0, h.clone()), ("s2", 1, 1, h.clone())],
    )?;
    let beta1 = sparse(&sb, &[("s3", 1, 1, one.clone()), ("s4", 1, 1, one)])?;
    let beta2 = sparse(
        &sb,
        &[("s3", 0, 0, h.clone()), ("s3", 2, 2, h.clone()), ("s4", 0, 2, h.clone()), ("s4", 2, 0, h)],
    )?;
    let checks = [
        ("trichotomic/alpha1", glue.weight_a(&alpha1), rat(1, 3)),
        ("trichotomic/alpha2", glue.weight_a(&alpha2), rat(2, 3)),
        ("trichotomic/beta1", glue.weight_b(&beta1), rat(1, 3)),
        ("trichotomic/beta2", glue.weight_b(&beta2), rat(2, 3)),
    ];
    for (name, got, want) in checks {
        report.check(name, got == Some(&want), format!("expected {want}, got {}", fmt_opt(got)));
    }
    report.check(
        "trichotomic/vsupp-sizes",
        glue.vsupp_a.elements.len() == 2 && glue.vsupp_b.elements.len() == 2,
        format!("{} and {}", glue.vsupp_a.elements.len(), glue.vsupp_b.elements.len()),
    );
    report.check("trichotomic/direct-vertex-test", is_vertex(p).is_vertex(), String::new());
    Ok(report)
}

/// The 3-order distribution on the 2-circle with four outcomes.
pub fn verify_two_circle(p: &SimplicialDistribution) -> Result<Report> {
    let mut report = Report::new("two-circle-3-order");
    if !valid_claim(&mut report, "two-circle-3-order/valid", p) {
        return Ok(report);
    }
    let seq = two_circle_sequence();
    let built = from_sequence(&seq)?;
    report.check("two-circle-3-order/matches-sequence", *p == built, String::new());
    let recognized = if p.space().directed_cycle_vertices().is_some() && p.scenario().uniform_arity().is_some() {
        recognize(p)?
    } else {
        None
    };
    report.check(
        "two-circle-3-order/recognized",
        recognized.as_ref() == Some(&seq.canonicalize()),
        match &recognized {
            Some(s) => format!("k = {}", s.k()),
            None => "not a k-order distribution".into(),
        },
    );
    tag_claim(&mut report, "two-circle-3-order/contextual-vertex", p, Tag::ContextualVertex);
    Ok(report)
}

/// Every built-in check run on the built-in fixtures.
pub fn verify_all_builtin() -> Result<Vec<Report>> {
    Ok(vec![
        verify_two_circle(&two_circle_three_order())?,
        verify_pr_box(&pr_box())?,
        verify_trichotomic(&trichotomic())?,
        crate::glue::verify_233_example()?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Section;

    #[test]
    fn fixtures_are_valid() {
        for p in [pr_box(), trichotomic(), bell_233(), two_circle_three_order()] {
            assert_eq!(p.validate(), vec![]);
        }
    }

    #[test]
    fn bell_marginals() {
        let p = bell_233();
        for v in p.space().vertices() {
            assert_eq!(p.marginal(v).unwrap(), vec![rat(1, 2), rat(1, 4), rat(1, 4)]);
        }
    }

    #[test]
    fn pr_box_is_the_sequence_distribution() {
        let s = CycleSequence::new(2, vec![vec![0, 1, 1, 1], vec![1, 0, 0, 0]]).unwrap();
        assert_eq!(from_sequence(&s).unwrap(), pr_box());
    }

    #[test]
    fn all_builtin_checks_pass() {
        for r in verify_all_builtin().unwrap() {
            assert!(r.passed(), "{}\n{r}", r.title);
        }
    }

    #[test]
    fn tampered_fixtures_name_the_failing_claim() {
        let pr = pr_box();
        let det = SimplicialDistribution::deterministic(pr.scenario().clone(), &Section(vec![0, 0, 0, 0])).unwrap();
        let r = verify_pr_box(&det).unwrap();
        assert!(!r.passed());
        assert!(r.failures().any(|c| c.name == "pr-box/contextual-vertex"));

        let mut q = trichotomic().matrices().to_vec();
        q[0] = EdgeMatrix::from_rows(vec![
            vec![rat(0, 1), rat(1, 3), rat(0, 1)],
            vec![rat(1, 3), rat(0, 1), rat(0, 1)],
            vec![rat(0, 1), rat(0, 1), rat(1, 3)],
        ])
        .unwrap();
        q[2] = q[1].clone();
        q[3] = q[1].clone();
        let t = SimplicialDistribution::new(trichotomic().scenario().clone(), q).unwrap();
        let r = verify_trichotomic(&t).unwrap();
        assert!(!r.passed());
        assert!(r.failures().any(|c| c.name == "trichotomic/glue-vertex"));
    }
}
