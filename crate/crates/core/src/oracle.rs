//! Brute-force vertex enumeration for small non-signaling polytopes, by
//! searching over candidate supports.

use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::analysis::cell_system;
use crate::dist::{EdgeMatrix, Scenario, SimplicialDistribution};
use crate::lpcore::LinearSystem;
use crate::rational::Rational;
use crate::{Error, Result};

pub const DEFAULT_CELL_CAP: usize = 24;

type Cell = (usize, usize, usize);

/// Incrementally maintained echelon basis of the chosen columns, used to
/// reject dependent column sets early.
#[derive(Clone)]
struct Echelon {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl Echelon {
    fn reduce(&self, mut v: Vec<Rational>) -> Vec<Rational> {
        for (pivot, row) in &self.rows {
            if !v[*pivot].is_zero() {
                let f = v[*pivot].clone() / &row[*pivot];
                for (x, y) in v.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        v
    }

    fn try_push(&mut self, v: &[Rational]) -> bool {
        let r = self.reduce(v.to_vec());
        match r.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                self.rows.push((p, r));
                true
            }
            None => false,
        }
    }
}

struct Search<'a> {
    cells: &'a [Cell],
    columns: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    last_of_edge: Vec<usize>,
    chosen: Vec<usize>,
    per_edge: Vec<usize>,
    found: Vec<Vec<Rational>>,
}

impl Search<'_> {
    fn run(&mut self, idx: usize, basis: &Echelon) {
        if idx == self.cells.len() {
            if self.per_edge.iter().all(|&c| c > 0) {
                if let Some(x) = self.solve() {
                    self.found.push(x);
                }
            }
            return;
        }
        let e = self.cells[idx].0;
        let mut extended = basis.clone();
        if extended.try_push(&self.columns[idx]) {
            self.chosen.push(idx);
            self.per_edge[e] += 1;
            self.run(idx + 1, &extended);
            self.per_edge[e] -= 1;
            self.chosen.pop();
        }
        // skipping the last allowed cell of an edge with nothing chosen is a dead end
        if !(self.last_of_edge[e] == idx && self.per_edge[e] == 0) {
            self.run(idx + 1, basis);
        }
    }

    /// The solution of the system on the chosen columns, if it exists and is
    /// strictly positive there. Independence makes it unique.
    fn solve(&self) -> Option<Vec<Rational>> {
        let m = self.rhs.len();
        let k = self.chosen.len();
        let mut aug: Vec<Vec<Rational>> = (0..m)
            .map(|r| {
                let mut row: Vec<Rational> = self.chosen.iter().map(|&c| self.columns[c][r].clone()).collect();
                row.push(self.rhs[r].clone());
                row
            })
            .collect();
        let pivots = crate::lpcore::row_reduce(&mut aug, k + 1);
        if pivots.contains(&k) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cells.len()];
        for (r, &p) in pivots.iter().enumerate() {
            let v = aug[r][k].clone() / &aug[r][p];
            if !v.is_positive() {
                return None;
            }
            x[self.chosen[p]] = v;
        }
        Some(x)
    }
}

/// All vertices of the non-signaling polytope of `scenario`, optionally with
/// every cell outside `restriction` forced to zero. Sorted by flattened
/// matrices.
pub fn enumerate_polytope_vertices(
    scenario: &Arc<Scenario>,
    restriction: Option<&BTreeSet<Cell>>,
    cap: usize,
) -> Result<Vec<SimplicialDistribution>> {
    let space = scenario.space();
    let cells: Vec<Cell> = (0..space.edge_count())
        .flat_map(|e| {
            let (r, c) = scenario.edge_shape(e);
            (0..r).flat_map(move |a| (0..c).map(move |b| (e, a, b)))
        })
        .filter(|cell| restriction.is_none_or(|s| s.contains(cell)))
        .collect();
    if cells.len() > cap {
        return Err(Error::ResourceLimit {
            what: "supported cells for vertex enumeration",
            cap,
        });
    }
    let sys = cell_system(scenario, &cells);
    let (matrix, rhs) = sys.dense();
    let columns: Vec<Vec<Rational>> = (0..cells.len())
        .map(|j| matrix.iter().map(|row| row[j].clone()).collect())
        .collect();
    let mut last_of_edge = vec![usize::MAX; space.edge_count()];
    for (i, &(e, _, _)) in cells.iter().enumerate() {
        last_of_edge[e] = i;
    }
    if space.edge_count() > 0 && last_of_edge.contains(&usize::MAX) {
        return Ok(Vec::new());
    }
    let mut search = Search {
        cells: &cells,
        columns,
        rhs,
        last_of_edge,
        chosen: Vec::new(),
        per_edge: vec![0; space.edge_count()],
        found: Vec::new(),
    };
    search.run(0, &Echelon { rows: Vec::new() });
    let mut found = search.found;
    found.sort();
    found.dedup();
    found
        .into_iter()
        .map(|x| {
            let mut matrices: Vec<EdgeMatrix> = (0..space.edge_count())
                .map(|e| {
                    let (r, c) = scenario.edge_shape(e);
                    EdgeMatrix::zeros(r, c)
                })
                .collect();
            for (&(e, a, b), v) in cells.iter().zip(x) {
                matrices[e].set(a, b, v);
            }
            SimplicialDistribution::new(scenario.clone(), matrices)
        })
        .collect()
}

/// Convex weights expressing `p` over `vertices`, if any exist.
pub fn hull_membership(p: &SimplicialDistribution, vertices: &[SimplicialDistribution]) -> Option<Vec<Rational>> {
    if vertices.iter().any(|v| !v.same_scenario(p)) {
        return None;
    }
    let mut lp: LinearSystem<usize> = LinearSystem::new();
    for i in 0..vertices.len() {
        lp.add_var(i, true);
    }
    lp.add_equality(
        (0..vertices.len()).map(|i| (i, Rational::one())).collect(),
        Rational::one(),
    );
    for (e, m) in p.matrices().iter().enumerate() {
        for a in 0..m.rows() {
            for b in 0..m.cols() {
                let terms = vertices
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.matrix(e).get(a, b).is_zero())
                    .map(|(i, v)| (i, v.matrix(e).get(a, b).clone()))
                    .collect();
                lp.add_equality(terms, m.get(a, b).clone());
            }
        }
    }
    lp.lp_feasible()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::is_vertex;
    use crate::cycleclass::{cycle_scenario, enumerate_vertex_distributions};
    use crate::dist::mix;
    use crate::fixtures;
    use crate::rational::rat;
    use crate::space::MeasurementSpace;

    fn sorted(mut v: Vec<SimplicialDistribution>) -> Vec<SimplicialDistribution> {
        v.sort_by(|a, b| a.matrices().cmp(b.matrices()));
        v
    }

    #[test]
    fn single_edge_gives_point_masses() {
        let sc = Arc::new(Scenario::uniform(MeasurementSpace::path(1).unwrap(), 2).unwrap());
        let v = enumerate_polytope_vertices(&sc, None, DEFAULT_CELL_CAP).unwrap();
        assert_eq!(v.len(), 4);
        assert!(v.iter().all(|p| p.as_deterministic().is_some()));
    }

    #[test]
    fn matches_k_order_enumeration() {
        for (n, d) in [(2, 2), (3, 2), (4, 2), (2, 3)] {
            let sc = cycle_scenario(n, d).unwrap();
            let oracle = enumerate_polytope_vertices(&sc, None, DEFAULT_CELL_CAP).unwrap();
            let listed: Vec<_> = enumerate_vertex_distributions(n, d, false)
                .unwrap()
                .map(|(_, p)| p)
                .collect();
            assert_eq!(sorted(oracle.clone()), sorted(listed), "n={n} d={d}");
            assert!(oracle.iter().all(|p| is_vertex(p).is_vertex()));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let sc = cycle_scenario(2, 4).unwrap();
        assert!(matches!(
            enumerate_polytope_vertices(&sc, None, DEFAULT_CELL_CAP),
            Err(Error::ResourceLimit { cap: 24, .. })
        ));
    }

    #[test]
    fn restriction_to_pr_support() {
        let pr = fixtures::pr_box();
        let support: BTreeSet<Cell> = pr.support_cells().into_iter().collect();
        let v = enumerate_polytope_vertices(pr.scenario(), Some(&support), DEFAULT_CELL_CAP).unwrap();
        assert_eq!(v, vec![pr]);
    }

    #[test]
    fn hull_membership_cases() {
        let sc = cycle_scenario(4, 2).unwrap();
        let all = enumerate_polytope_vertices(&sc, None, DEFAULT_CELL_CAP).unwrap();
        let dets: Vec<_> = all.iter().filter(|p| p.as_deterministic().is_some()).cloned().collect();
        assert_eq!(dets.len(), 16);
        let pr = fixtures::pr_box();
        assert_eq!(hull_membership(&pr, &dets), None);
        assert_eq!(hull_membership(&pr, &[pr.clone()]), Some(vec![rat(1, 1)]));
        let m = mix(&[(rat(1, 3), &dets[0]), (rat(2, 3), &dets[5])]).unwrap();
        let w = hull_membership(&m, &dets).unwrap();
        let terms: Vec<_> = w.iter().cloned().zip(dets.iter()).collect();
        assert_eq!(mix(&terms).unwrap(), m);
    }

    #[test]
    fn strict_mixtures_of_oracle_vertices_are_not_vertices() {
        let sc = cycle_scenario(3, 2).unwrap();
        let all = enumerate_polytope_vertices(&sc, None, DEFAULT_CELL_CAP).unwrap();
        for i in 0..all.len() {
            for j in (i + 1)..all.len() {
                let m = mix(&[(rat(1, 2), &all[i]), (rat(1, 2), &all[j])]).unwrap();
                assert!(!is_vertex(&m).is_vertex());
            }
        }
    }
}
