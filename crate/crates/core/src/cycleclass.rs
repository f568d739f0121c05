//! k-order distributions on the directed cycle C^(n): recognition, canonical
//! form, enumeration and vertex counts.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, Zero};

use crate::dist::{EdgeMatrix, Scenario, SimplicialDistribution};
use crate::rational::Rational;
use crate::space::MeasurementSpace;
use crate::error::invalid;
use crate::Result;

/// `k` rows `(a_1^j, ..., a_n^j)` with distinct entries in every column.
///
/// Edge `i < n` of the cycle is supported on `(a_i^j, a_{i+1}^j)` and edge
/// `n` on `(a_n^j, a_1^{j+1})`, indices of rows taken cyclically; every
/// supported cell carries `1/k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CycleSequence {
    // k first so the derived order sorts by order first
    k: usize,
    rows: Vec<Vec<usize>>,
    n: usize,
    d: usize,
}

impl CycleSequence {
    pub fn new(d: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(invalid!("a cycle sequence needs at least one row"));
        }
        let n = rows[0].len();
        if n < 2 {
            return Err(invalid!("a cycle sequence needs at least two columns"));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(invalid!("rows of a cycle sequence must have equal length"));
        }
        for i in 0..n {
            let mut seen = vec![false; d];
            for r in &rows {
                let x = r[i];
                if x >= d {
                    return Err(invalid!("outcome {x} out of range for {d} outcomes"));
                }
                if core::mem::replace(&mut seen[x], true) {
                    return Err(invalid!("outcome {x} repeats in column {}", i + 1));
                }
            }
        }
        Ok(CycleSequence { k, rows, n, d })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    /// Rotation of the rows starting at the row with the smallest first entry.
    /// First-column entries are distinct, so this is the lexicographically
    /// least rotation.
    pub fn canonicalize(&self) -> CycleSequence {
        let start = (0..self.k).min_by_key(|&j| self.rows[j][0]).unwrap_or(0);
        let rows = (0..self.k)
            .map(|j| self.rows[(start + j) % self.k].clone())
            .collect();
        CycleSequence { rows, ..*self }
    }

    pub fn is_canonical(&self) -> bool {
        self.rows.iter().skip(1).all(|r| r[0] > self.rows[0][0])
    }

    /// Supported cells `(edge, a, b)` in edge order.
    pub fn cells(&self) -> Vec<(usize, usize, usize)> {
        cycle_cells(&self.rows)
    }

    /// The distribution on the cycle scenario, which must be C^(n) with arity
    /// at least the outcome used in each column.
    pub fn distribution_on(&self, scenario: &Arc<Scenario>) -> Result<SimplicialDistribution> {
        cycle_distribution(scenario, &self.rows)
    }
}

pub(crate) fn cycle_cells(rows: &[Vec<usize>]) -> Vec<(usize, usize, usize)> {
    let k = rows.len();
    let n = rows[0].len();
    let mut cells = Vec::with_capacity(n * k);
    for i in 0..n {
        for j in 0..k {
            let b = if i + 1 < n { rows[j][i + 1] } else { rows[(j + 1) % k][0] };
            cells.push((i, rows[j][i], b));
        }
    }
    cells
}

/// k-order distribution with the given rows on a scenario over C^(n).
pub(crate) fn cycle_distribution(
    scenario: &Arc<Scenario>,
    rows: &[Vec<usize>],
) -> Result<SimplicialDistribution> {
    let space = scenario.space();
    let n = space.edge_count();
    if space.directed_cycle_vertices().is_none() {
        return Err(invalid!("scenario is not a directed cycle"));
    }
    if rows.is_empty() || rows.iter().any(|r| r.len() != n) {
        return Err(invalid!("sequence has the wrong number of columns for C^({n})"));
    }
    let weight = Rational::new(1.into(), rows.len().into());
    let mut matrices: Vec<EdgeMatrix> = (0..n)
        .map(|e| {
            let (r, c) = scenario.edge_shape(e);
            EdgeMatrix::zeros(r, c)
        })
        .collect();
    for (e, a, b) in cycle_cells(rows) {
        let m = &mut matrices[e];
        if a >= m.rows() || b >= m.cols() {
            return Err(invalid!("outcome out of range on edge {}", e + 1));
        }
        if !m.get(a, b).is_zero() {
            return Err(invalid!("outcome repeats within a column"));
        }
        m.set(a, b, weight.clone());
    }
    SimplicialDistribution::new(scenario.clone(), matrices)
}

/// The scenario C^(n) with `d` outcomes everywhere.
pub fn cycle_scenario(n: usize, d: usize) -> Result<Arc<Scenario>> {
    Ok(Arc::new(Scenario::uniform(MeasurementSpace::cycle(n)?, d)?))
}

/// Builds the k-order distribution on C^(n) with `d` outcomes.
pub fn from_sequence(seq: &CycleSequence) -> Result<SimplicialDistribution> {
    seq.distribution_on(&cycle_scenario(seq.n, seq.d)?)
}

/// Recovers the canonical sequence of a k-order distribution on a directed
/// cycle with uniform arity, or `None` when `p` is not of that form.
pub fn recognize(p: &SimplicialDistribution) -> Result<Option<CycleSequence>> {
    let space = p.space();
    if space.directed_cycle_vertices().is_none() {
        return Err(invalid!("distribution does not live on a directed cycle"));
    }
    let Some(d) = p.scenario().uniform_arity() else {
        return Err(invalid!("recognition needs a uniform outcome count"));
    };
    let n = space.edge_count();
    let support: Vec<Vec<(usize, usize)>> = p.matrices().iter().map(EdgeMatrix::support).collect();
    let k = support[0].len();
    if k == 0 || support.iter().any(|s| s.len() != k) {
        return Ok(None);
    }
    let next = |e: usize, a: usize| -> Option<usize> {
        let mut hits = support[e].iter().filter(|&&(x, _)| x == a);
        let (_, b) = *hits.next()?;
        hits.next().is_none().then_some(b)
    };
    let start = support[0].iter().map(|&(a, _)| a).min().expect("nonempty");
    let mut rows = Vec::with_capacity(k);
    let mut head = start;
    loop {
        let mut row = Vec::with_capacity(n);
        row.push(head);
        let mut cur = head;
        for e in 0..n {
            let Some(b) = next(e, cur) else { return Ok(None) };
            if e + 1 < n {
                row.push(b);
            }
            cur = b;
        }
        rows.push(row);
        if cur == start {
            break;
        }
        if rows.len() == k {
            return Ok(None);
        }
        head = cur;
    }
    let Ok(seq) = CycleSequence::new(d, rows) else {
        return Ok(None);
    };
    if seq.k != k || cycle_distribution(p.scenario(), &seq.rows)? != *p {
        return Ok(None);
    }
    Ok(Some(seq.canonicalize()))
}

/// Lexicographic stream of canonical row arrays of a fixed order `k`, where
/// column `i` draws from `0..arities[i]`.
#[derive(Clone, Debug)]
pub(crate) struct RowArrays {
    arities: Vec<usize>,
    k: usize,
    cur: Vec<usize>,
    pos: usize,
    candidate: usize,
    started: bool,
    done: bool,
}

impl RowArrays {
    pub(crate) fn new(arities: Vec<usize>, k: usize) -> Self {
        let done = k == 0 || arities.iter().any(|&m| m < k);
        let len = k * arities.len();
        RowArrays {
            arities,
            k,
            cur: vec![0; len],
            pos: 0,
            candidate: 0,
            started: false,
            done,
        }
    }

    fn admissible(&self, pos: usize, x: usize) -> bool {
        let n = self.arities.len();
        let (j, i) = (pos / n, pos % n);
        if x >= self.arities[i] {
            return false;
        }
        if i == 0 && j == 0 {
            // room for k - 1 larger values in the first column
            return x + self.k <= self.arities[0];
        }
        if i == 0 && x <= self.cur[0] {
            return false;
        }
        (0..j).all(|r| self.cur[r * n + i] != x)
    }

    fn rows(&self) -> Vec<Vec<usize>> {
        self.cur.chunks(self.arities.len()).map(<[usize]>::to_vec).collect()
    }
}

impl Iterator for RowArrays {
    type Item = Vec<Vec<usize>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let len = self.cur.len();
        if self.started {
            self.pos = len - 1;
            self.candidate = self.cur[self.pos] + 1;
        }
        self.started = true;
        loop {
            let bound = self.arities[self.pos % self.arities.len()];
            let found = (self.candidate..bound).find(|&x| self.admissible(self.pos, x));
            match found {
                Some(x) => {
                    self.cur[self.pos] = x;
                    self.pos += 1;
                    self.candidate = 0;
                    if self.pos == len {
                        return Some(self.rows());
                    }
                }
                None => {
                    if self.pos == 0 {
                        self.done = true;
                        return None;
                    }
                    self.pos -= 1;
                    self.candidate = self.cur[self.pos] + 1;
                }
            }
        }
    }
}

/// Canonical sequences of every vertex of the polytope on C^(n) with `d`
/// outcomes, ordered by `k` and then lexicographically by rows. With
/// `contextual_only` the deterministic vertices (`k = 1`) are skipped.
pub fn enumerate_vertices(
    n: usize,
    d: usize,
    contextual_only: bool,
) -> Result<impl Iterator<Item = CycleSequence>> {
    if n < 2 {
        return Err(invalid!("the cycle needs at least two edges"));
    }
    if d < 2 {
        return Err(invalid!("outcome count must be at least 2"));
    }
    let first = if contextual_only { 2 } else { 1 };
    Ok((first..=d).flat_map(move |k| {
        RowArrays::new(vec![d; n], k).map(move |rows| CycleSequence { k, rows, n, d })
    }))
}

/// Vertex sequences paired with their distributions over a shared scenario.
pub fn enumerate_vertex_distributions(
    n: usize,
    d: usize,
    contextual_only: bool,
) -> Result<impl Iterator<Item = (CycleSequence, SimplicialDistribution)>> {
    let scenario = cycle_scenario(n, d)?;
    Ok(enumerate_vertices(n, d, contextual_only)?.map(move |seq| {
        let p = seq
            .distribution_on(&scenario)
            .expect("enumerated sequences are well formed");
        (seq, p)
    }))
}

fn factorial(m: usize) -> BigUint {
    (1..=m).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Number of k-order vertices when column `i` has `arities[i]` outcomes:
/// `prod_i C(m_i, k) * (k!)^(n-1) * (k-1)!`.
pub fn count_k_mixed(arities: &[usize], k: usize) -> BigUint {
    if k == 0 || arities.is_empty() {
        return BigUint::zero();
    }
    let n = arities.len();
    let choose: BigUint = arities
        .iter()
        .map(|&m| binomial(BigUint::from(m), BigUint::from(k)))
        .product();
    choose * num_traits::pow(factorial(k), n - 1) * factorial(k - 1)
}

pub fn count_k(n: usize, d: usize, k: usize) -> BigUint {
    count_k_mixed(&vec![d; n], k)
}

/// Total vertex count of the polytope on C^(n) with `d` outcomes.
pub fn count_vertices(n: usize, d: usize) -> BigUint {
    (1..=d).map(|k| count_k(n, d, k)).sum()
}

/// Vertices of order at least 2.
pub fn count_contextual_vertices(n: usize, d: usize) -> BigUint {
    (2..=d).map(|k| count_k(n, d, k)).sum()
}

pub fn count_vertices_mixed(arities: &[usize]) -> BigUint {
    let top = arities.iter().copied().min().unwrap_or(0);
    (1..=top).map(|k| count_k_mixed(arities, k)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{self, Tag};
    use crate::rational::rat;
    use alloc::collections::BTreeSet;
    use proptest::prelude::*;

    fn seq(d: usize, rows: &[&[usize]]) -> CycleSequence {
        CycleSequence::new(d, rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    /// Brute force over all row arrays, deduplicated by canonical form.
    fn brute_force(n: usize, d: usize) -> BTreeSet<CycleSequence> {
        let mut out = BTreeSet::new();
        for k in 1..=d {
            let cells = k * n;
            let total = d.pow(cells as u32);
            for code in 0..total {
                let mut c = code;
                let rows: Vec<Vec<usize>> = (0..k)
                    .map(|_| {
                        (0..n)
                            .map(|_| {
                                let x = c % d;
                                c /= d;
                                x
                            })
                            .collect()
                    })
                    .collect();
                if let Ok(s) = CycleSequence::new(d, rows) {
                    out.insert(s.canonicalize());
                }
            }
        }
        out
    }

    #[test]
    fn counts_match_closed_form_values() {
        let table = [
            ((2, 2), 6u64),
            ((2, 3), 39),
            ((2, 4), 424),
            ((3, 2), 12),
            ((3, 3), 207),
            ((3, 4), 8992),
            ((4, 2), 24),
            ((4, 3), 1161),
            ((4, 4), 204160),
        ];
        for ((n, d), v) in table {
            assert_eq!(count_vertices(n, d), BigUint::from(v), "n={n} d={d}");
        }
    }

    #[test]
    fn enumeration_agrees_with_brute_force() {
        for (n, d) in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)] {
            let listed: Vec<CycleSequence> = enumerate_vertices(n, d, false).unwrap().collect();
            let set: BTreeSet<CycleSequence> = listed.iter().cloned().collect();
            assert_eq!(set.len(), listed.len(), "duplicates for n={n} d={d}");
            assert_eq!(set, brute_force(n, d), "n={n} d={d}");
            assert_eq!(BigUint::from(listed.len()), count_vertices(n, d));
            // stream is sorted
            assert!(listed.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn contextual_only_drops_order_one() {
        let all = enumerate_vertices(4, 2, false).unwrap().count();
        let ctx: Vec<_> = enumerate_vertices(4, 2, true).unwrap().collect();
        assert_eq!(all, 24);
        assert_eq!(ctx.len(), 8);
        assert!(ctx.iter().all(|s| s.k() == 2));
        assert_eq!(count_contextual_vertices(4, 2), BigUint::from(8u32));
    }

    #[test]
    fn two_cycle_three_order_over_four_outcomes() {
        let s = seq(4, &[&[0, 1], &[3, 2], &[2, 3]]);
        let p = from_sequence(&s).unwrap();
        let third = rat(1, 3);
        let z = rat(0, 1);
        let e1 = EdgeMatrix::from_rows(vec![
            vec![z.clone(), third.clone(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), z.clone(), third.clone()],
            vec![z.clone(), z.clone(), third.clone(), z.clone()],
        ])
        .unwrap();
        let e2 = EdgeMatrix::from_rows(vec![
            vec![z.clone(), z.clone(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), z.clone(), third.clone()],
            vec![z.clone(), z.clone(), third.clone(), z.clone()],
            vec![third.clone(), z.clone(), z.clone(), z.clone()],
        ])
        .unwrap();
        assert_eq!(p.matrix(0), &e1);
        assert_eq!(p.matrix(1), &e2);
        assert!(p.is_valid());
        assert_eq!(recognize(&p).unwrap(), Some(s.canonicalize()));
        assert_eq!(s.canonicalize(), s);
    }

    #[test]
    fn recognize_rejects_non_k_order() {
        let sc = cycle_scenario(3, 2).unwrap();
        let u = crate::fixtures::uniform(sc);
        assert_eq!(recognize(&u).unwrap(), None);
        // two disjoint 1-cycles of the transition graph: sum of two sections
        let a = from_sequence(&seq(2, &[&[0, 0, 0]])).unwrap();
        let b = from_sequence(&seq(2, &[&[1, 1, 1]])).unwrap();
        let m = crate::dist::mix(&[(rat(1, 2), &a), (rat(1, 2), &b)]).unwrap();
        assert_eq!(recognize(&m).unwrap(), None);
        assert!(recognize(&crate::fixtures::trichotomic()).is_err());
    }

    #[test]
    fn k_order_distributions_are_contextual_vertices() {
        for s in enumerate_vertices(3, 3, true).unwrap() {
            let p = from_sequence(&s).unwrap();
            assert_eq!(analysis::classify(&p, 1000).unwrap().tag, Tag::ContextualVertex);
        }
    }

    #[test]
    fn mixed_count_reduces_to_uniform() {
        assert_eq!(count_vertices_mixed(&[3, 3, 3]), count_vertices(3, 3));
        // contextual part for arities (2, 3) on the 2-cycle
        assert_eq!(count_k_mixed(&[2, 3], 2), BigUint::from(6u32));
        assert_eq!(count_vertices_mixed(&[2, 3]), BigUint::from(12u32));
    }

    #[test]
    fn growth_matches_leading_order() {
        use num_traits::ToPrimitive;
        let (n, d) = (3usize, 40usize);
        let count = count_vertices(n, d).to_f64().unwrap();
        let df = d as f64;
        let ratio = count.ln() / (n as f64 * (df * df.ln() - df));
        assert!((0.8..=1.2).contains(&ratio), "ratio {ratio}");
    }

    proptest! {
        #[test]
        fn canonical_form_is_rotation_invariant(
            d in 2usize..6,
            n in 2usize..5,
            shift in 0usize..6,
            seed in any::<u64>(),
        ) {
            let k = 1 + (seed as usize % d);
            // random column permutations
            let mut state = seed;
            let mut rows = vec![vec![0; n]; k];
            for i in 0..n {
                let mut pool: Vec<usize> = (0..d).collect();
                for row in rows.iter_mut() {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    let idx = (state >> 33) as usize % pool.len();
                    row[i] = pool.swap_remove(idx);
                }
            }
            let s = CycleSequence::new(d, rows.clone()).unwrap();
            let rotated: Vec<Vec<usize>> = (0..k).map(|j| rows[(j + shift) % k].clone()).collect();
            let r = CycleSequence::new(d, rotated).unwrap();
            prop_assert_eq!(s.canonicalize(), r.canonicalize());
            prop_assert!(s.canonicalize().is_canonical());
            let p = from_sequence(&s).unwrap();
            prop_assert!(p.is_valid());
            prop_assert_eq!(from_sequence(&r).unwrap(), p.clone());
            prop_assert_eq!(recognize(&p).unwrap(), Some(s.canonicalize()));
        }
    }
}
