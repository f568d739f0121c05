use proptest::prelude::*;

use simpol_core::analysis::{classify, is_vertex, Tag, DEFAULT_SECTION_CAP};
use simpol_core::bundle::{pullback, pushforward, VertexwiseInjection};
use simpol_core::cycleclass::enumerate_vertex_distributions;
use simpol_core::dist::{extract, mix, preceq, Perturbation, SimplicialDistribution};
use simpol_core::glue::{glue_vertex_check, vsupp, vsupp_is_dominated};
use simpol_core::oracle::hull_membership;
use simpol_core::rational::rat;
use simpol_core::space::EdgeId;
use simpol_core::Rational;

const CASES: [(usize, usize); 4] = [(2, 2), (3, 2), (4, 2), (2, 3)];

fn pool(case: usize) -> Vec<SimplicialDistribution> {
    let (n, d) = CASES[case];
    enumerate_vertex_distributions(n, d, false).unwrap().map(|(_, p)| p).collect()
}

/// A random mixture of up to four vertices, with the vertices and weights used.
fn mixture() -> impl Strategy<Value = (SimplicialDistribution, Vec<(Rational, SimplicialDistribution)>)> {
    (0..CASES.len(), proptest::collection::vec((any::<prop::sample::Index>(), 1i64..6), 1..=4)).prop_map(
        |(case, picks)| {
            let vertices = pool(case);
            let total: i64 = picks.iter().map(|(_, w)| w).sum();
            let terms: Vec<(Rational, SimplicialDistribution)> = picks
                .iter()
                .map(|(i, w)| (rat(*w, total), vertices[i.index(vertices.len())].clone()))
                .collect();
            let refs: Vec<(Rational, &SimplicialDistribution)> = terms.iter().map(|(w, p)| (w.clone(), p)).collect();
            (mix(&refs).unwrap(), terms)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mixtures_are_valid_and_dominate_their_terms((p, terms) in mixture()) {
        prop_assert!(p.is_valid());
        for (_, q) in &terms {
            prop_assert!(preceq(q, &p).unwrap());
        }
    }

    #[test]
    fn extraction_recombines((p, terms) in mixture()) {
        let q = &terms[0].1;
        let split = extract(q, &p).unwrap();
        prop_assert!(split.alpha > rat(0, 1) && split.alpha <= rat(1, 1));
        match split.remainder {
            None => prop_assert_eq!(q, &p),
            Some(r) => {
                prop_assert!(r.is_valid());
                let back = mix(&[(split.alpha.clone(), q), (rat(1, 1) - &split.alpha, &r)]).unwrap();
                prop_assert_eq!(back, p.clone());
                let w = Perturbation::from_dominated(&p, q).unwrap();
                prop_assert!(w.verify(&p));
            }
        }
    }

    #[test]
    fn hierarchy_holds((p, _) in mixture()) {
        let c = classify(&p, DEFAULT_SECTION_CAP).unwrap();
        if c.tag == Tag::ContextualVertex {
            prop_assert!(c.strongly_contextual);
        }
        if c.strongly_contextual {
            prop_assert!(c.tag.is_contextual());
        }
        prop_assert_eq!(c.tag.is_vertex(), is_vertex(&p).is_vertex());
    }

    #[test]
    fn pieces_lie_in_the_hull_of_their_vertex_support((p, _) in mixture(), cut in 1usize..4) {
        let ids: Vec<EdgeId> = p.space().edge_ids();
        let cut = cut.min(ids.len() - 1);
        for piece in [&ids[..cut], &ids[cut..]] {
            let v = vsupp(&p, piece, DEFAULT_SECTION_CAP).unwrap();
            prop_assert!(vsupp_is_dominated(&v).unwrap());
            let members: Vec<SimplicialDistribution> = v.elements.iter().map(|(q, _)| q.clone()).collect();
            prop_assert!(hull_membership(&v.piece, &members).is_some());
            for q in &members {
                prop_assert!(is_vertex(q).is_vertex());
            }
        }
    }

    #[test]
    fn glue_check_agrees_with_direct_vertex_test((p, _) in mixture(), cut in 1usize..4) {
        let ids: Vec<EdgeId> = p.space().edge_ids();
        let cut = cut.min(ids.len() - 1);
        let report = glue_vertex_check(&p, &ids[..cut], &ids[cut..], DEFAULT_SECTION_CAP).unwrap();
        prop_assert_eq!(report.verdict.is_vertex(), is_vertex(&p).is_vertex());
    }

    #[test]
    fn pushforward_then_pullback_is_identity((p, _) in mixture(), extra in 0usize..3, flip in any::<bool>()) {
        let arities = p.scenario().arities().to_vec();
        let target: Vec<usize> = arities.iter().map(|m| m + extra).collect();
        let maps: Vec<Vec<usize>> = arities
            .iter()
            .zip(&target)
            .map(|(&m, &t)| {
                let mut image: Vec<usize> = (t - m..t).collect();
                if flip {
                    image.reverse();
                }
                image
            })
            .collect();
        let t = VertexwiseInjection::new(maps, target).unwrap();
        let q = pushforward(&p, &t).unwrap();
        prop_assert!(q.is_valid());
        prop_assert_eq!(pullback(&q, &t, p.scenario().clone()).unwrap(), Some(p.clone()));
        let (cp, cq) = (classify(&p, DEFAULT_SECTION_CAP).unwrap(), classify(&q, DEFAULT_SECTION_CAP).unwrap());
        prop_assert_eq!(cp.tag, cq.tag);
    }
}
