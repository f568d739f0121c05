//! Scenarios with per-vertex outcome counts, injective relabelings between
//! them, and transfer of classification along those relabelings.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::analysis::{classify, Classification};
use crate::cycleclass::{count_k_mixed, cycle_distribution, CycleSequence, RowArrays};
use crate::dist::{EdgeMatrix, Scenario, SimplicialDistribution};
use crate::error::invalid;
use crate::Result;

/// A bundle scenario is a base space with an outcome profile.
pub type BundleScenario = Scenario;

/// Injective maps `t_v: Z_{m_v} -> Z_{M_v}`, one per base vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexwiseInjection {
    maps: Vec<Vec<usize>>,
    target: Vec<usize>,
}

impl VertexwiseInjection {
    pub fn new(maps: Vec<Vec<usize>>, target: Vec<usize>) -> Result<Self> {
        if maps.len() != target.len() {
            return Err(invalid!("one map per vertex is required"));
        }
        for (v, (t, &m)) in maps.iter().zip(&target).enumerate() {
            let mut hit = vec![false; m];
            for &x in t {
                if x >= m {
                    return Err(invalid!("map at vertex {v} leaves the target range {m}"));
                }
                if core::mem::replace(&mut hit[x], true) {
                    return Err(invalid!("map at vertex {v} is not injective"));
                }
            }
        }
        Ok(VertexwiseInjection { maps, target })
    }

    pub fn identity(scenario: &Scenario) -> Self {
        VertexwiseInjection::inclusion(scenario, scenario.arities().to_vec())
            .expect("identity is an injection")
    }

    /// `t_v(x) = x` into larger outcome sets.
    pub fn inclusion(scenario: &Scenario, target: Vec<usize>) -> Result<Self> {
        let maps = scenario.arities().iter().map(|&m| (0..m).collect()).collect();
        VertexwiseInjection::new(maps, target)
    }

    pub fn maps(&self) -> &[Vec<usize>] {
        &self.maps
    }

    pub fn target_arities(&self) -> &[usize] {
        &self.target
    }

    fn check_source(&self, scenario: &Scenario) -> Result<()> {
        if self.maps.len() != scenario.space().vertex_count()
            || self.maps.iter().zip(scenario.arities()).any(|(t, &m)| t.len() != m)
        {
            return Err(invalid!("injection does not match the source profile"));
        }
        Ok(())
    }

    pub fn target_scenario(&self, source: &Scenario) -> Result<Scenario> {
        self.check_source(source)?;
        Scenario::from_arities(source.space().clone(), self.target.clone())
    }
}

/// `q(t_s(a), t_t(b)) = p(a, b)`, zero elsewhere.
pub fn pushforward(p: &SimplicialDistribution, t: &VertexwiseInjection) -> Result<SimplicialDistribution> {
    let target = Arc::new(t.target_scenario(p.scenario())?);
    pushforward_into(p, t, &target)
}

pub(crate) fn pushforward_into(
    p: &SimplicialDistribution,
    t: &VertexwiseInjection,
    target: &Arc<Scenario>,
) -> Result<SimplicialDistribution> {
    let space = p.space();
    let matrices = (0..space.edge_count())
        .map(|e| {
            let (s, u) = space.ends(e);
            let (rows, cols) = target.edge_shape(e);
            let mut out = EdgeMatrix::zeros(rows, cols);
            let m = p.matrix(e);
            for a in 0..m.rows() {
                for b in 0..m.cols() {
                    out.set(t.maps[s][a], t.maps[u][b], m.get(a, b).clone());
                }
            }
            out
        })
        .collect();
    SimplicialDistribution::new(target.clone(), matrices)
}

/// The distribution whose push-forward is `q`, if `q` vanishes off the image.
pub fn pullback(
    q: &SimplicialDistribution,
    t: &VertexwiseInjection,
    source: Arc<Scenario>,
) -> Result<Option<SimplicialDistribution>> {
    t.check_source(&source)?;
    if q.scenario().arities() != t.target.as_slice() || q.space() != source.space() {
        return Err(invalid!("distribution does not live on the injection's target"));
    }
    let space = source.space();
    let mut matrices = Vec::with_capacity(space.edge_count());
    for e in 0..space.edge_count() {
        let (s, u) = space.ends(e);
        let (rows, cols) = source.edge_shape(e);
        let m = q.matrix(e);
        let mut out = EdgeMatrix::zeros(rows, cols);
        let mut carried = crate::rational::zero();
        for a in 0..rows {
            for b in 0..cols {
                let x = m.get(t.maps[s][a], t.maps[u][b]);
                carried += x;
                out.set(a, b, x.clone());
            }
        }
        if carried != m.total() {
            return Ok(None);
        }
        matrices.push(out);
    }
    SimplicialDistribution::new(source, matrices).map(Some)
}

/// Classifies by embedding into the uniform scenario with the largest arity.
pub fn analyze_bundle(p: &SimplicialDistribution, cap: usize) -> Result<Classification> {
    let top = p.scenario().arities().iter().copied().max().unwrap_or(2).max(2);
    let t = VertexwiseInjection::inclusion(p.scenario(), vec![top; p.scenario().arities().len()])?;
    classify(&pushforward(p, &t)?, cap)
}

/// Canonical k-order sequences on C^(n) where column `i` draws from
/// `0..arities[i]`, ordered by `k` then lexicographically.
pub fn enumerate_bundle_cycle_sequences(
    arities: &[usize],
    contextual_only: bool,
) -> Result<impl Iterator<Item = CycleSequence>> {
    let n = arities.len();
    if n < 2 {
        return Err(invalid!("the cycle needs at least two edges"));
    }
    if arities.iter().any(|&m| m < 2) {
        return Err(invalid!("every vertex needs at least two outcomes"));
    }
    let top = *arities.iter().max().expect("nonempty");
    let low = *arities.iter().min().expect("nonempty");
    let first = if contextual_only { 2 } else { 1 };
    let arities = arities.to_vec();
    Ok((first..=low).flat_map(move |k| {
        RowArrays::new(arities.clone(), k)
            .map(move |rows| CycleSequence::new(top, rows).expect("rows respect arities"))
    }))
}

/// Vertices of the polytope on the bundle scenario over C^(n) with the given
/// per-vertex arities (vertex `i` is the source of edge `i`).
pub fn enumerate_bundle_cycle_vertices(
    arities: &[usize],
    contextual_only: bool,
) -> Result<impl Iterator<Item = (CycleSequence, SimplicialDistribution)>> {
    let space = crate::space::MeasurementSpace::cycle(arities.len())?;
    let scenario = Arc::new(Scenario::from_arities(space, arities.to_vec())?);
    Ok(enumerate_bundle_cycle_sequences(arities, contextual_only)?.map(move |seq| {
        let p = cycle_distribution(&scenario, seq.rows()).expect("rows respect arities");
        (seq, p)
    }))
}

/// Vertex count on the bundle cycle; reduces to the uniform count when all
/// arities agree.
pub fn count_bundle_vertices(arities: &[usize], contextual_only: bool) -> BigUint {
    let low = arities.iter().copied().min().unwrap_or(0);
    let first = if contextual_only { 2 } else { 1 };
    if low < first {
        return BigUint::zero();
    }
    (first..=low).map(|k| count_k_mixed(arities, k)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Tag;
    use crate::cycleclass::{enumerate_vertices, from_sequence};
    use crate::dist::mix;
    use crate::fixtures;
    use crate::rational::rat;
    use crate::space::MeasurementSpace;
    use num_traits::Zero;

    #[test]
    fn identity_pushforward_is_identity() {
        let pr = fixtures::pr_box();
        let t = VertexwiseInjection::identity(pr.scenario());
        assert_eq!(pushforward(&pr, &t).unwrap(), pr);
    }

    #[test]
    fn embedding_pr_box_into_three_outcomes() {
        let pr = fixtures::pr_box();
        let t = VertexwiseInjection::inclusion(pr.scenario(), vec![3; 4]).unwrap();
        let q = pushforward(&pr, &t).unwrap();
        assert!(q.is_valid());
        assert_eq!(q.support_cells().len(), 8);
        assert_eq!(q.matrix(0).rows(), 3);
        assert_eq!(analyze_bundle(&pr, 100).unwrap().tag, Tag::ContextualVertex);
        assert_eq!(classify(&q, 100).unwrap().tag, Tag::ContextualVertex);
        assert_eq!(pullback(&q, &t, pr.scenario().clone()).unwrap(), Some(pr));
    }

    #[test]
    fn non_injective_maps_are_rejected() {
        assert!(VertexwiseInjection::new(vec![vec![0, 0]], vec![3]).is_err());
        assert!(VertexwiseInjection::new(vec![vec![0, 3]], vec![3]).is_err());
    }

    #[test]
    fn staircase_pushed_to_prescribed_sequence() {
        // t_i(j) = a_i^(j) carries the staircase onto the sequence's distribution
        let seq = CycleSequence::new(4, vec![vec![0, 1], vec![3, 2], vec![2, 3]]).unwrap();
        let stair = from_sequence(&CycleSequence::new(3, vec![vec![0, 0], vec![1, 1], vec![2, 2]]).unwrap())
            .unwrap();
        let maps = (0..2).map(|i| seq.rows().iter().map(|r| r[i]).collect()).collect();
        let t = VertexwiseInjection::new(maps, vec![4, 4]).unwrap();
        assert_eq!(pushforward(&stair, &t).unwrap(), from_sequence(&seq).unwrap());
    }

    #[test]
    fn pullback_rejects_mass_off_image() {
        let sc = Arc::new(Scenario::from_arities(MeasurementSpace::cycle(3).unwrap(), vec![2, 3, 2]).unwrap());
        let u = fixtures::uniform(sc.clone());
        let t = VertexwiseInjection::inclusion(
            &Scenario::from_arities(MeasurementSpace::cycle(3).unwrap(), vec![2, 2, 2]).unwrap(),
            vec![2, 3, 2],
        )
        .unwrap();
        let small = Arc::new(Scenario::uniform(MeasurementSpace::cycle(3).unwrap(), 2).unwrap());
        assert_eq!(pullback(&u, &t, small.clone()).unwrap(), None);
        // supported on the two-outcome sub-fiber at the middle vertex
        let d = SimplicialDistribution::deterministic(sc, &crate::dist::Section(vec![1, 0, 1])).unwrap();
        let back = pullback(&d, &t, small).unwrap().unwrap();
        assert_eq!(pushforward(&back, &t).unwrap(), d);
    }

    #[test]
    fn mixed_arity_two_order_is_contextual_vertex() {
        let sc = Arc::new(Scenario::from_arities(MeasurementSpace::cycle(4).unwrap(), vec![2, 3, 2, 3]).unwrap());
        let p = cycle_distribution(&sc, &[vec![0, 0, 0, 0], vec![1, 1, 1, 1]]).unwrap();
        assert_eq!(analyze_bundle(&p, 100).unwrap().tag, Tag::ContextualVertex);
        let q = cycle_distribution(&sc, &[vec![0, 1, 0, 1], vec![1, 0, 1, 0]]).unwrap();
        let m = mix(&[(rat(1, 2), &p), (rat(1, 2), &q)]).unwrap();
        assert!(!analyze_bundle(&m, 100).unwrap().tag.is_vertex());
    }

    #[test]
    fn bundle_enumeration_specializes_to_uniform() {
        for (n, d) in [(2, 2), (3, 3), (2, 4)] {
            let a: Vec<_> = enumerate_bundle_cycle_sequences(&vec![d; n], false).unwrap().collect();
            let b: Vec<_> = enumerate_vertices(n, d, false).unwrap().collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn mixed_counts() {
        let listed = enumerate_bundle_cycle_vertices(&[2, 3], true).unwrap().count();
        assert_eq!(listed, 6);
        assert_eq!(count_bundle_vertices(&[2, 3], true), BigUint::from(6u32));
        for ar in [vec![2, 3], vec![3, 2, 4], vec![2, 2, 3], vec![4, 3]] {
            let n = enumerate_bundle_cycle_vertices(&ar, false).unwrap().count();
            assert_eq!(BigUint::from(n), count_bundle_vertices(&ar, false), "{ar:?}");
        }
        assert!(count_bundle_vertices(&[1, 3], true).is_zero());
    }
}
