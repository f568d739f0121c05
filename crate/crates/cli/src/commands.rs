//! Subcommands. Each one writes text or JSON to the given sink and returns
//! the process exit code: 0 when the queried predicate holds, 1 when it does
//! not. Errors propagate and become exit code 2 in `main`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use simpol_core::analysis::{
    self, classify, find_sections, is_strongly_contextual, Contextuality, VertexTest, DEFAULT_SECTION_CAP,
};
use simpol_core::bundle::{pullback, pushforward, VertexwiseInjection};
use simpol_core::cycleclass::{count_k, enumerate_vertices, recognize, CycleSequence};
use simpol_core::dist::{Perturbation, Scenario, Section, SimplicialDistribution};
use simpol_core::fixtures::Report;
use simpol_core::glue::{glue_vertex_check, GlueVerdict, VsuppResult};
use simpol_core::homotopy::{face, find_lift, is_null_homotopic_cycle, EdgeLabeling, Face};
use simpol_core::oracle::{enumerate_polytope_vertices, DEFAULT_CELL_CAP};
use simpol_core::rational::format_rational;
use simpol_core::space::{EdgeId, MeasurementSpace};
use simpol_core::{fixtures, glue};

use crate::format::{
    distribution_to_string, load_distribution, matrices_json, named_scenario, parse_distribution,
    parse_scenario, parse_usize_list, read_file, split_list,
};

#[derive(Debug, Parser)]
#[command(name = "simpol", version, about = "Exact analysis of simplicial distributions")]
pub struct Cli {
    /// Upper bound on the number of sections enumerated in a support.
    #[arg(long, global = true, env = "SIMPOL_SECTION_CAP", default_value_t = DEFAULT_SECTION_CAP)]
    pub section_cap: usize,
    #[command(subcommand)]
    pub command: Command,
}

/// `--json` alone writes JSON to stdout; `--json PATH` writes it to a file.
#[derive(Debug, Clone, Args)]
pub struct JsonOut {
    #[arg(long, value_name = "PATH", num_args = 0..=1, default_missing_value = "-")]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate or count the vertices of the polytope on the directed n-circle.
    CycleVertices {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        d: u64,
        /// Skip the deterministic vertices.
        #[arg(long)]
        contextual_only: bool,
        /// Print the closed-form counts instead of the vertices.
        #[arg(long)]
        count_only: bool,
        #[command(flatten)]
        out: JsonOut,
    },
    /// Query a distribution. With no query flag, classifies it.
    Check {
        #[arg(long)]
        dist: PathBuf,
        /// Non-signaling and normalization.
        #[arg(long)]
        validate: bool,
        #[arg(long)]
        vertex: bool,
        #[arg(long)]
        contextual: bool,
        /// Empty support.
        #[arg(long)]
        strong: bool,
        #[arg(long)]
        classify: bool,
        /// List the sections in the support.
        #[arg(long)]
        sections: bool,
        /// Recognize a k-order distribution on a circle.
        #[arg(long)]
        recognize: bool,
        #[command(flatten)]
        out: JsonOut,
    },
    /// The face of the cycle polytope cut out by an edge labeling.
    Face {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        d: u64,
        /// Comma-separated labels in Z_d, one per edge.
        #[arg(long)]
        labels: String,
        #[command(flatten)]
        out: JsonOut,
    },
    /// Vertex test by gluing two edge-disjoint pieces.
    GlueCheck {
        #[arg(long)]
        dist: PathBuf,
        /// Comma-separated edge ids of the first piece; the rest form the second.
        #[arg(long)]
        piece_a: String,
        #[command(flatten)]
        out: JsonOut,
    },
    /// All vertices of a small non-signaling polytope.
    OracleEnumerate {
        /// Scenario file, distribution file, or a cycle id like `C4_d2`.
        #[arg(long)]
        scenario: String,
        /// Only vertices supported inside this distribution's support.
        #[arg(long)]
        support_of: Option<PathBuf>,
        #[arg(long, env = "SIMPOL_CELL_CAP", default_value_t = DEFAULT_CELL_CAP)]
        cell_cap: usize,
        #[command(flatten)]
        out: JsonOut,
    },
    /// Push a distribution forward along injective outcome relabelings.
    Pushforward {
        #[arg(long)]
        dist: PathBuf,
        /// Target outcome counts in vertex order, or one count for every vertex.
        #[arg(long)]
        target_outcomes: String,
        /// `VERTEX=i0,i1,...` images of a vertex's outcomes; identity when omitted.
        #[arg(long = "map", value_name = "VERTEX=IMAGES")]
        maps: Vec<String>,
        /// Write the result here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-derive the worked examples and report each claim.
    VerifyPaper {
        /// Read the example distributions from this directory instead of the
        /// embedded copies.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[command(flatten)]
        out: JsonOut,
    },
}

pub fn run(cli: Cli, sink: &mut dyn Write) -> Result<i32> {
    let cap = cli.section_cap;
    match cli.command {
        Command::CycleVertices {
            n,
            d,
            contextual_only,
            count_only,
            out,
        } => cycle_vertices(n as usize, d as usize, contextual_only, count_only, &out, sink),
        Command::Check {
            dist,
            validate,
            vertex,
            contextual,
            strong,
            classify,
            sections,
            recognize,
            out,
        } => {
            let q = Queries {
                validate,
                vertex,
                contextual,
                strong,
                classify,
                sections,
                recognize,
            };
            check(&load_distribution(&dist)?, q, cap, &out, sink)
        }
        Command::Face { n, d, labels, out } => face_cmd(n as usize, d as usize, &labels, &out, sink),
        Command::GlueCheck { dist, piece_a, out } => glue_check(&load_distribution(&dist)?, &piece_a, cap, &out, sink),
        Command::OracleEnumerate {
            scenario,
            support_of,
            cell_cap,
            out,
        } => oracle_enumerate(&scenario, support_of.as_deref(), cell_cap, &out, sink),
        Command::Pushforward {
            dist,
            target_outcomes,
            maps,
            out,
        } => pushforward_cmd(&load_distribution(&dist)?, &target_outcomes, &maps, out.as_deref(), sink),
        Command::VerifyPaper { fixtures, out } => verify_paper(fixtures.as_deref(), &out, sink),
    }
}

fn emit(out: &JsonOut, value: &Value, text: &str, sink: &mut dyn Write) -> Result<()> {
    match out.json.as_deref() {
        None => sink.write_all(text.as_bytes())?,
        Some(p) if p == Path::new("-") => writeln!(sink, "{}", serde_json::to_string_pretty(value)?)?,
        Some(p) => {
            std::fs::write(p, serde_json::to_string_pretty(value)? + "\n")
                .with_context(|| format!("cannot write {}", p.display()))?;
            sink.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn code(holds: bool) -> i32 {
    if holds {
        0
    } else {
        1
    }
}

fn sequence_text(seq: &CycleSequence) -> String {
    let rows: Vec<String> = seq
        .rows()
        .iter()
        .map(|r| r.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
        .collect();
    format!("({})", rows.join(";"))
}

fn sequence_json(seq: &CycleSequence) -> Value {
    json!({ "k": seq.k(), "rows": seq.rows() })
}

fn matrices_text(p: &SimplicialDistribution) -> String {
    let mut s = String::new();
    for (e, m) in p.space().edges().iter().zip(p.matrices()) {
        let _ = writeln!(s, "{}:", e.id);
        for line in m.to_string().lines() {
            let _ = writeln!(s, "  {line}");
        }
    }
    s
}

fn section_text(p: &SimplicialDistribution, s: &Section) -> String {
    p.space()
        .vertices()
        .iter()
        .zip(&s.0)
        .map(|(v, x)| format!("{v}={x}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn section_json(p: &SimplicialDistribution, s: &Section) -> Value {
    let map: serde_json::Map<String, Value> =
        p.space().vertices().iter().zip(&s.0).map(|(v, x)| (v.to_string(), json!(x))).collect();
    Value::Object(map)
}

fn perturbation_json(p: &SimplicialDistribution, w: &Perturbation) -> Value {
    let direction: serde_json::Map<String, Value> = p
        .space()
        .edges()
        .iter()
        .zip(&w.direction)
        .map(|(e, m)| (e.id.to_string(), json!(crate::format::matrix_to_json(m))))
        .collect();
    json!({ "epsilon": format_rational(&w.epsilon), "direction": direction })
}

fn perturbation_text(p: &SimplicialDistribution, w: &Perturbation) -> String {
    let mut s = format!("witness: p +/- {} * u stays in the polytope, with u =\n", w.epsilon);
    for (e, m) in p.space().edges().iter().zip(&w.direction) {
        let _ = writeln!(s, "{}:", e.id);
        for line in m.to_string().lines() {
            let _ = writeln!(s, "  {line}");
        }
    }
    s
}

fn cycle_vertices(
    n: usize,
    d: usize,
    contextual_only: bool,
    count_only: bool,
    out: &JsonOut,
    sink: &mut dyn Write,
) -> Result<i32> {
    let first = if contextual_only { 2 } else { 1 };
    let per_k: Vec<(usize, num_bigint::BigUint)> = (first..=d).map(|k| (k, count_k(n, d, k))).collect();
    let total: num_bigint::BigUint = per_k.iter().map(|(_, c)| c).sum();
    let counts_json: serde_json::Map<String, Value> =
        per_k.iter().map(|(k, c)| (k.to_string(), json!(c.to_string()))).collect();
    if count_only {
        let mut text = format!("total: {total}\n");
        for (k, c) in &per_k {
            let _ = writeln!(text, "k={k}: {c}");
        }
        let value = json!({
            "n": n, "d": d, "contextual_only": contextual_only,
            "total": total.to_string(), "per_k": counts_json,
        });
        emit(out, &value, &text, sink)?;
        return Ok(0);
    }
    let sequences = enumerate_vertices(n, d, contextual_only)?;
    if out.json.is_none() {
        for seq in sequences {
            writeln!(sink, "k={} {}", seq.k(), sequence_text(&seq))?;
        }
        return Ok(0);
    }
    let listed: Vec<Value> = sequences.map(|s| sequence_json(&s)).collect();
    let value = json!({
        "n": n, "d": d, "contextual_only": contextual_only,
        "total": total.to_string(), "per_k": counts_json, "vertices": listed,
    });
    emit(out, &value, &format!("{} vertices\n", listed.len()), sink)?;
    Ok(0)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Queries {
    pub validate: bool,
    pub vertex: bool,
    pub contextual: bool,
    pub strong: bool,
    pub classify: bool,
    pub sections: bool,
    pub recognize: bool,
}

fn recognize_if_cycle(p: &SimplicialDistribution) -> Result<Option<CycleSequence>> {
    if p.space().directed_cycle_vertices().is_some() && p.scenario().uniform_arity().is_some() {
        Ok(recognize(p)?)
    } else {
        Ok(None)
    }
}

fn check(p: &SimplicialDistribution, mut q: Queries, cap: usize, out: &JsonOut, sink: &mut dyn Write) -> Result<i32> {
    if !(q.validate || q.vertex || q.contextual || q.strong || q.classify || q.sections || q.recognize) {
        q.classify = true;
    }
    let mut text = String::new();
    let mut report = serde_json::Map::new();
    let mut holds = true;
    let violations = p.validate();
    if q.validate {
        holds &= violations.is_empty();
        let _ = writeln!(text, "{}", if violations.is_empty() { "VALID" } else { "INVALID" });
        for v in &violations {
            let _ = writeln!(text, "  {v}");
        }
        report.insert("valid".into(), json!(violations.is_empty()));
        report.insert(
            "violations".into(),
            json!(violations.iter().map(|v| v.to_string()).collect::<Vec<_>>()),
        );
    }
    let rest = q.vertex || q.contextual || q.strong || q.classify || q.sections || q.recognize;
    if rest && !violations.is_empty() {
        if q.validate {
            emit(out, &Value::Object(report), &text, sink)?;
            return Ok(1);
        }
        bail!("not a simplicial distribution: {}", violations[0]);
    }
    if q.classify {
        let c = classify(p, cap)?;
        let _ = writeln!(text, "{}", c.tag.as_str());
        report.insert("tag".into(), json!(c.tag.as_str()));
        report.insert("strongly_contextual".into(), json!(c.strongly_contextual));
    }
    if q.vertex {
        match analysis::is_vertex(p) {
            VertexTest::Vertex => {
                let _ = writeln!(text, "VERTEX");
                report.insert("vertex".into(), json!(true));
            }
            VertexTest::NotVertex(w) => {
                holds = false;
                let _ = writeln!(text, "NOT_VERTEX");
                text.push_str(&perturbation_text(p, &w));
                report.insert("vertex".into(), json!(false));
                report.insert("perturbation".into(), perturbation_json(p, &w));
            }
        }
    }
    if q.contextual {
        match analysis::is_contextual(p, cap)? {
            Contextuality::Contextual => {
                let _ = writeln!(text, "CONTEXTUAL");
                report.insert("contextual".into(), json!(true));
            }
            Contextuality::Noncontextual(weights) => {
                holds = false;
                let _ = writeln!(text, "NONCONTEXTUAL");
                for (s, w) in &weights {
                    let _ = writeln!(text, "  {w} * [{}]", section_text(p, s));
                }
                report.insert("contextual".into(), json!(false));
                report.insert(
                    "decomposition".into(),
                    json!(weights
                        .iter()
                        .map(|(s, w)| json!({ "weight": format_rational(w), "section": section_json(p, s) }))
                        .collect::<Vec<_>>()),
                );
            }
        }
    }
    if q.strong {
        let strong = is_strongly_contextual(p);
        holds &= strong;
        let _ = writeln!(text, "{}", if strong { "STRONGLY_CONTEXTUAL" } else { "NOT_STRONGLY_CONTEXTUAL" });
        report.insert("strongly_contextual".into(), json!(strong));
    }
    if q.sections {
        let sections = find_sections(p, cap)?;
        let _ = writeln!(text, "{} sections in the support", sections.len());
        for s in &sections {
            let _ = writeln!(text, "  {}", section_text(p, s));
        }
        report.insert(
            "sections".into(),
            json!(sections.iter().map(|s| section_json(p, s)).collect::<Vec<_>>()),
        );
    }
    if q.recognize {
        match recognize_if_cycle(p)? {
            Some(seq) => {
                let _ = writeln!(text, "K_ORDER k={} {}", seq.k(), sequence_text(&seq));
                report.insert("k_order".into(), sequence_json(&seq));
            }
            None => {
                holds = false;
                let _ = writeln!(text, "NOT_K_ORDER");
                report.insert("k_order".into(), Value::Null);
            }
        }
    }
    emit(out, &Value::Object(report), &text, sink)?;
    Ok(code(holds))
}

fn face_cmd(n: usize, d: usize, labels: &str, out: &JsonOut, sink: &mut dyn Write) -> Result<i32> {
    let space = MeasurementSpace::cycle(n)?;
    let labels = parse_usize_list(labels)?;
    if labels.len() != n {
        bail!("expected {n} labels, got {}", labels.len());
    }
    let phi = EdgeLabeling::new(d, labels)?;
    let null_homotopic = is_null_homotopic_cycle(&space, &phi)?;
    let lift = find_lift(&space, &phi)?;
    let f = face(&space, d, &phi)?;
    let mut text = format!("{}\n", f.kind());
    let mut value = json!({
        "n": n, "d": d, "labels": phi.labels(), "kind": f.kind(),
        "null_homotopic": null_homotopic,
        "lift": lift.as_ref().map(|s| s.0.clone()),
    });
    match &f {
        Face::Singleton(p) => {
            text.push_str(&matrices_text(p));
            value["dimension"] = json!(0);
            value["distribution"] = matrices_json(p);
        }
        Face::Polytope { dimension, sample } => {
            let _ = writeln!(text, "dimension: {dimension}");
            let _ = writeln!(text, "relative-interior point:");
            text.push_str(&matrices_text(sample));
            value["dimension"] = json!(dimension);
            value["sample"] = matrices_json(sample);
        }
        Face::Empty => {}
    }
    let _ = writeln!(text, "null-homotopic: {null_homotopic}");
    emit(out, &value, &text, sink)?;
    Ok(code(matches!(f, Face::Singleton(_))))
}

fn vsupp_json(v: &VsuppResult, weights: &[Option<simpol_core::Rational>]) -> Value {
    json!(v
        .elements
        .iter()
        .zip(weights)
        .map(|((q, prov), w)| json!({
            "provenance": prov.to_string(),
            "weight": w.as_ref().map(format_rational),
            "matrices": matrices_json(q),
        }))
        .collect::<Vec<_>>())
}

fn vsupp_text(label: &str, v: &VsuppResult, weights: &[Option<simpol_core::Rational>]) -> String {
    let mut s = format!("piece {label}: {} vertices in the vertex support\n", v.elements.len());
    for (i, ((_, prov), w)) in v.elements.iter().zip(weights).enumerate() {
        let w = w.as_ref().map_or("not fixed".to_string(), format_rational);
        let _ = writeln!(s, "  #{i} {prov} weight {w}");
    }
    s
}

fn glue_check(p: &SimplicialDistribution, piece_a: &str, cap: usize, out: &JsonOut, sink: &mut dyn Write) -> Result<i32> {
    let a: Vec<EdgeId> = split_list(piece_a).into_iter().map(EdgeId::new).collect();
    let space = p.space();
    for e in &a {
        if space.edge_index(e).is_none() {
            bail!("unknown edge {e}");
        }
    }
    let b: Vec<EdgeId> = space.edge_ids().into_iter().filter(|e| !a.contains(e)).collect();
    if a.is_empty() || b.is_empty() {
        bail!("both pieces must contain at least one edge");
    }
    if !p.is_valid() {
        bail!("not a simplicial distribution: {}", p.validate()[0]);
    }
    let r = glue_vertex_check(p, &a, &b, cap)?;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "{}",
        match &r.verdict {
            GlueVerdict::Vertex => "VERTEX",
            GlueVerdict::NotVertex { .. } => "NOT_VERTEX",
        }
    );
    let _ = writeln!(
        text,
        "shared vertices: {}",
        r.intersection.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
    );
    text.push_str(&vsupp_text("A", &r.vsupp_a, &r.weights_a));
    text.push_str(&vsupp_text("B", &r.vsupp_b, &r.weights_b));
    let mut value = json!({
        "verdict": if r.verdict.is_vertex() { "VERTEX" } else { "NOT_VERTEX" },
        "piece_a": a.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        "piece_b": b.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        "shared_vertices": r.intersection.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "vsupp_a": vsupp_json(&r.vsupp_a, &r.weights_a),
        "vsupp_b": vsupp_json(&r.vsupp_b, &r.weights_b),
    });
    if let GlueVerdict::NotVertex { witness, perturbation } = &r.verdict {
        text.push_str("another glued distribution:\n");
        text.push_str(&matrices_text(witness));
        text.push_str(&perturbation_text(p, perturbation));
        value["witness"] = matrices_json(witness);
        value["perturbation"] = perturbation_json(p, perturbation);
    }
    emit(out, &value, &text, sink)?;
    Ok(code(r.verdict.is_vertex()))
}

fn resolve_scenario(arg: &str) -> Result<Scenario> {
    let path = Path::new(arg);
    if path.exists() {
        parse_scenario(&read_file(path)?).with_context(|| format!("in {arg}"))
    } else {
        named_scenario(arg).with_context(|| format!("{arg} is neither a file nor a scenario id"))
    }
}

fn oracle_enumerate(
    scenario: &str,
    support_of: Option<&Path>,
    cap: usize,
    out: &JsonOut,
    sink: &mut dyn Write,
) -> Result<i32> {
    let sc = Arc::new(resolve_scenario(scenario)?);
    let restriction = match support_of {
        None => None,
        Some(path) => {
            let p = load_distribution(path)?;
            if p.space() != sc.space() || p.scenario().arities() != sc.arities() {
                bail!("{} does not live on the given scenario", path.display());
            }
            Some(p.support_cells().into_iter().collect::<BTreeSet<_>>())
        }
    };
    let vertices = enumerate_polytope_vertices(&sc, restriction.as_ref(), cap)?;
    let mut text = format!("{} vertices\n", vertices.len());
    let mut listed = Vec::with_capacity(vertices.len());
    for (i, v) in vertices.iter().enumerate() {
        let kind = if v.as_deterministic().is_some() {
            "DETERMINISTIC".to_string()
        } else {
            match recognize_if_cycle(v)? {
                Some(seq) => format!("K_ORDER({})", seq.k()),
                None => "CONTEXTUAL".to_string(),
            }
        };
        let _ = writeln!(text, "#{i} {kind}");
        text.push_str(&matrices_text(v));
        listed.push(json!({ "kind": kind, "matrices": matrices_json(v) }));
    }
    let value = json!({ "count": vertices.len(), "vertices": listed });
    emit(out, &value, &text, sink)?;
    Ok(0)
}

fn parse_maps(p: &SimplicialDistribution, specs: &[String]) -> Result<Vec<Vec<usize>>> {
    let space = p.space();
    let mut maps: Vec<Vec<usize>> = p.scenario().arities().iter().map(|&m| (0..m).collect()).collect();
    for spec in specs {
        let (v, images) = spec
            .split_once('=')
            .ok_or_else(|| anyhow!("--map expects VERTEX=IMAGES, got {spec:?}"))?;
        let idx = space
            .vertex_index(&simpol_core::space::VertexId::new(v.trim()))
            .ok_or_else(|| anyhow!("unknown vertex {v:?}"))?;
        maps[idx] = parse_usize_list(images)?;
    }
    Ok(maps)
}

fn pushforward_cmd(
    p: &SimplicialDistribution,
    target: &str,
    maps: &[String],
    out: Option<&Path>,
    sink: &mut dyn Write,
) -> Result<i32> {
    let n = p.space().vertex_count();
    let mut target = parse_usize_list(target)?;
    if target.len() == 1 {
        target = vec![target[0]; n];
    }
    if target.len() != n {
        bail!("expected 1 or {n} target outcome counts, got {}", target.len());
    }
    let t = VertexwiseInjection::new(parse_maps(p, maps)?, target)?;
    let q = pushforward(p, &t)?;
    if pullback(&q, &t, p.scenario().clone())?.as_ref() != Some(p) {
        bail!("pull-back of the push-forward differs from the input");
    }
    let text = distribution_to_string(&q, Some("push-forward along an injective outcome relabeling".into())) + "\n";
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?,
        None => sink.write_all(text.as_bytes())?,
    }
    Ok(0)
}

pub const PR_BOX_JSON: &str = include_str!("../fixtures/pr_box.json");
pub const TRICHOTOMIC_JSON: &str = include_str!("../fixtures/trichotomic.json");
pub const BELL_233_JSON: &str = include_str!("../fixtures/bell_233.json");
pub const TWO_CIRCLE_JSON: &str = include_str!("../fixtures/two_circle_three_order.json");
pub const UNIFORM_C3_D2_JSON: &str = include_str!("../fixtures/uniform_c3_d2.json");

type Verifier = fn(&SimplicialDistribution) -> simpol_core::Result<Report>;

/// Runs every worked-example check, reading fixtures from `dir` when given.
pub fn paper_reports(dir: Option<&Path>) -> Result<Vec<Report>> {
    let checks: [(&str, &str, Verifier); 4] = [
        ("two_circle_three_order.json", TWO_CIRCLE_JSON, fixtures::verify_two_circle),
        ("pr_box.json", PR_BOX_JSON, fixtures::verify_pr_box),
        ("trichotomic.json", TRICHOTOMIC_JSON, fixtures::verify_trichotomic),
        ("bell_233.json", BELL_233_JSON, glue::verify_233_with),
    ];
    let mut reports = Vec::new();
    for (file, embedded, verify) in checks {
        let text = match dir {
            Some(dir) => read_file(&dir.join(file))?,
            None => embedded.to_string(),
        };
        let p = parse_distribution(&text).with_context(|| format!("in fixture {file}"))?;
        reports.push(verify(&p)?);
    }
    Ok(reports)
}

fn verify_paper(dir: Option<&Path>, out: &JsonOut, sink: &mut dyn Write) -> Result<i32> {
    let reports = paper_reports(dir)?;
    let mut text = String::new();
    let (mut total, mut failed) = (0, 0);
    for r in &reports {
        let _ = writeln!(text, "== {} ==", r.title);
        let _ = write!(text, "{r}");
        total += r.claims.len();
        failed += r.failures().count();
    }
    if failed == 0 {
        let _ = writeln!(text, "all {total} claims passed");
    } else {
        let _ = writeln!(text, "{failed} of {total} claims failed");
    }
    let value = json!({
        "passed": failed == 0,
        "reports": reports.iter().map(|r| json!({
            "example": r.title,
            "passed": r.passed(),
            "claims": r.claims.iter().map(|c| json!({
                "claim": c.name, "passed": c.passed, "detail": c.detail,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });
    emit(out, &value, &text, sink)?;
    Ok(code(failed == 0 && reports.iter().all(Report::passed)))
}
