//! Exact linear algebra and linear programming over the rationals.
//!
//! Dense matrices throughout; the systems built by this crate have at most a
//! few hundred variables. The simplex method uses Bland's smallest-index rule,
//! which guarantees termination.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// Equality constraints over keyed variables, some of which are required to
/// be nonnegative.
#[derive(Clone, Debug)]
pub struct LinearSystem<K> {
    keys: Vec<K>,
    index: BTreeMap<K, usize>,
    nonneg: Vec<bool>,
    rows: Vec<(Vec<(usize, Rational)>, Rational)>,
}

/// Solution set of an equality system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AffineSolution {
    Unique(Vec<Rational>),
    Infeasible,
    Affine {
        dimension: usize,
        particular: Vec<Rational>,
        kernel: Vec<Vec<Rational>>,
    },
}

/// One end of the range of an objective over the feasible region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    Finite { value: Rational, point: Vec<Rational> },
    Unbounded,
}

impl Bound {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            Bound::Finite { value, .. } => Some(value),
            Bound::Unbounded => None,
        }
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            Bound::Finite { point, .. } => Some(point),
            Bound::Unbounded => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extremes {
    pub min: Bound,
    pub max: Bound,
}

impl Extremes {
    /// The objective takes a single value over the whole feasible region.
    pub fn fixed_value(&self) -> Option<&Rational> {
        match (self.min.value(), self.max.value()) {
            (Some(a), Some(b)) if a == b => Some(a),
            _ => None,
        }
    }
}

impl<K: Ord + Clone> Default for LinearSystem<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Ord + Clone> LinearSystem<K> {
    pub fn new() -> Self {
        LinearSystem {
            keys: Vec::new(),
            index: BTreeMap::new(),
            nonneg: Vec::new(),
            rows: Vec::new(),
        }
    }

    /// Adds a variable (or returns the existing one with this key).
    pub fn add_var(&mut self, key: K, nonneg: bool) -> usize {
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.keys.len();
        self.keys.push(key.clone());
        self.index.insert(key, i);
        self.nonneg.push(nonneg);
        i
    }

    pub fn index_of(&self, key: &K) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }

    pub fn var_count(&self) -> usize {
        self.keys.len()
    }

    pub fn equality_count(&self) -> usize {
        self.rows.len()
    }

    /// Adds `sum coeff * var = rhs`; repeated indices are summed.
    pub fn add_equality(&mut self, terms: Vec<(usize, Rational)>, rhs: Rational) {
        debug_assert!(terms.iter().all(|(i, _)| *i < self.keys.len()));
        self.rows.push((terms, rhs));
    }

    pub fn add_equality_by_key(&mut self, terms: &[(K, Rational)], rhs: Rational) {
        let terms = terms
            .iter()
            .map(|(k, c)| (self.index[k], c.clone()))
            .collect();
        self.add_equality(terms, rhs);
    }

    fn dense_rows(&self) -> Vec<Vec<Rational>> {
        let n = self.keys.len();
        self.rows
            .iter()
            .map(|(terms, rhs)| {
                let mut row = vec![Rational::zero(); n + 1];
                for (i, c) in terms {
                    row[*i] += c;
                }
                row[n] = rhs.clone();
                row
            })
            .collect()
    }

    /// Coefficient matrix and right-hand side as dense rows.
    pub fn dense(&self) -> (Vec<Vec<Rational>>, Vec<Rational>) {
        let n = self.keys.len();
        self.dense_rows()
            .into_iter()
            .map(|mut row| {
                let rhs = row.pop().expect("rhs column");
                debug_assert_eq!(row.len(), n);
                (row, rhs)
            })
            .unzip()
    }

    /// Residual-free check of a point against every constraint.
    pub fn satisfies(&self, x: &[Rational]) -> bool {
        if x.len() != self.keys.len() {
            return false;
        }
        let signs = self
            .nonneg
            .iter()
            .zip(x)
            .all(|(&nn, v)| !nn || !v.is_negative());
        signs
            && self.rows.iter().all(|(terms, rhs)| {
                let lhs: Rational = terms.iter().map(|(i, c)| c * &x[*i]).sum();
                lhs == *rhs
            })
    }

    /// Solves the equalities, ignoring sign constraints, by exact Gauss-Jordan
    /// elimination.
    pub fn solve_affine(&self) -> AffineSolution {
        let n = self.keys.len();
        let mut m = self.dense_rows();
        let pivots = row_reduce(&mut m, n);
        if m.iter().skip(pivots.len()).any(|row| !row[n].is_zero()) {
            return AffineSolution::Infeasible;
        }
        let mut particular = vec![Rational::zero(); n];
        for (r, &c) in pivots.iter().enumerate() {
            particular[c] = m[r][n].clone();
        }
        if pivots.len() == n {
            return AffineSolution::Unique(particular);
        }
        let mut is_pivot = vec![false; n];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let kernel: Vec<Vec<Rational>> = (0..n)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![Rational::zero(); n];
                v[f] = Rational::one();
                for (r, &c) in pivots.iter().enumerate() {
                    v[c] = -m[r][f].clone();
                }
                v
            })
            .collect();
        AffineSolution::Affine {
            dimension: kernel.len(),
            particular,
            kernel,
        }
    }

    /// Runs phase one of the simplex method. `None` when infeasible.
    pub fn feasible_region(&self) -> Option<FeasibleRegion> {
        FeasibleRegion::new(self)
    }

    pub fn lp_feasible(&self) -> Option<Vec<Rational>> {
        self.feasible_region().map(|r| r.point())
    }

    /// Minimum and maximum of one variable over the feasible region.
    pub fn lp_extremes(&self, key: &K) -> Option<Extremes> {
        let i = self.index_of(key)?;
        let mut objective = vec![Rational::zero(); self.keys.len()];
        objective[i] = Rational::one();
        self.extremes(&objective)
    }

    /// Range of a linear objective; `None` when infeasible.
    pub fn extremes(&self, objective: &[Rational]) -> Option<Extremes> {
        self.feasible_region().map(|r| r.extremes(objective))
    }
}

/// Reduces `m` (with `n` coefficient columns followed by a right-hand side)
/// to reduced row echelon form and returns the pivot columns.
pub fn row_reduce(m: &mut [Vec<Rational>], n: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a set of vectors.
pub fn rank(vectors: &[Vec<Rational>]) -> usize {
    let Some(len) = vectors.first().map(Vec::len) else {
        return 0;
    };
    let mut m: Vec<Vec<Rational>> = vectors
        .iter()
        .map(|v| {
            let mut row = v.clone();
            row.push(Rational::zero());
            row
        })
        .collect();
    row_reduce(&mut m, len).len()
}

/// A feasible basis of `{Ax = b, x_i >= 0 for constrained i}` in standard
/// form, ready for repeated phase-two solves.
#[derive(Clone, Debug)]
pub struct FeasibleRegion {
    /// Structural column of each original variable, plus the negative part
    /// for free variables.
    columns: Vec<(usize, Option<usize>)>,
    structural: usize,
    tableau: Tableau,
}

#[derive(Clone, Debug)]
struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Reduced costs per column, with minus the objective value last.
    cost: Vec<Rational>,
    /// Columns allowed to enter the basis.
    allowed: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cost.len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        if !self.cost[c].is_zero() {
            let f = self.cost[c].clone();
            for (x, y) in self.cost.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Sets the cost row for objective `c` (minimized) given the basis.
    fn price(&mut self, objective: &[Rational]) {
        let w = self.width();
        let mut cost = vec![Rational::zero(); w + 1];
        cost[..objective.len()].clone_from_slice(objective);
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = cost[b].clone();
            if cb.is_zero() {
                continue;
            }
            for (x, y) in cost.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &cb * y;
                }
            }
        }
        self.cost = cost;
    }

    fn run(&mut self) -> Outcome {
        let w = self.width();
        loop {
            let Some(enter) = (0..self.allowed).find(|&j| self.cost[j].is_negative()) else {
                return Outcome::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[w] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((l, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return Outcome::Unbounded,
            }
        }
    }

    fn values(&self, count: usize) -> Vec<Rational> {
        let w = self.width();
        let mut y = vec![Rational::zero(); count];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < count {
                y[b] = row[w].clone();
            }
        }
        y
    }
}

impl FeasibleRegion {
    fn new<K: Ord + Clone>(system: &LinearSystem<K>) -> Option<Self> {
        let n = system.var_count();
        let mut columns = Vec::with_capacity(n);
        let mut structural = 0;
        for &nn in &system.nonneg {
            let pos = structural;
            structural += 1;
            let neg = (!nn).then(|| {
                structural += 1;
                structural - 1
            });
            columns.push((pos, neg));
        }
        let dense = system.dense_rows();
        let m = dense.len();
        let width = structural + m;
        let mut rows = Vec::with_capacity(m);
        for (i, src) in dense.into_iter().enumerate() {
            let mut row = vec![Rational::zero(); width + 1];
            for (v, &(pos, neg)) in columns.iter().enumerate() {
                row[pos] = src[v].clone();
                if let Some(neg) = neg {
                    row[neg] = -src[v].clone();
                }
            }
            row[structural + i] = Rational::one();
            row[width] = src[n].clone();
            if row[width].is_negative() {
                for x in row.iter_mut().take(structural) {
                    *x = -x.clone();
                }
                row[width] = -row[width].clone();
            }
            rows.push(row);
        }
        let mut tableau = Tableau {
            rows,
            basis: (structural..width).collect(),
            cost: vec![Rational::zero(); width + 1],
            allowed: width,
        };
        let mut phase_one = vec![Rational::zero(); width];
        for c in phase_one.iter_mut().skip(structural) {
            *c = Rational::one();
        }
        tableau.price(&phase_one);
        tableau.run();
        if !tableau.cost[width].is_zero() {
            return None;
        }

        // Drive artificial variables out of the basis; drop redundant rows.
        let mut r = 0;
        while r < tableau.rows.len() {
            if tableau.basis[r] < structural {
                r += 1;
                continue;
            }
            match (0..structural).find(|&j| !tableau.rows[r][j].is_zero()) {
                Some(j) => {
                    tableau.pivot(r, j);
                    r += 1;
                }
                None => {
                    tableau.rows.remove(r);
                    tableau.basis.remove(r);
                }
            }
        }
        for row in tableau.rows.iter_mut() {
            let rhs = row[width].clone();
            row.truncate(structural);
            row.push(rhs);
        }
        tableau.cost = vec![Rational::zero(); structural + 1];
        tableau.allowed = structural;
        Some(FeasibleRegion {
            columns,
            structural,
            tableau,
        })
    }

    fn to_original(&self, y: &[Rational]) -> Vec<Rational> {
        self.columns
            .iter()
            .map(|&(pos, neg)| match neg {
                Some(neg) => &y[pos] - &y[neg],
                None => y[pos].clone(),
            })
            .collect()
    }

    /// The basic feasible point found by phase one.
    pub fn point(&self) -> Vec<Rational> {
        self.to_original(&self.tableau.values(self.structural))
    }

    /// Minimizes `objective` (over the original variables).
    pub fn minimize(&self, objective: &[Rational]) -> Bound {
        let mut c = vec![Rational::zero(); self.structural];
        for (&(pos, neg), coeff) in self.columns.iter().zip(objective) {
            c[pos] = coeff.clone();
            if let Some(neg) = neg {
                c[neg] = -coeff.clone();
            }
        }
        let mut t = self.tableau.clone();
        t.price(&c);
        match t.run() {
            Outcome::Unbounded => Bound::Unbounded,
            Outcome::Optimal => {
                let point = self.to_original(&t.values(self.structural));
                let value = point.iter().zip(objective).map(|(x, c)| x * c).sum();
                Bound::Finite { value, point }
            }
        }
    }

    pub fn maximize(&self, objective: &[Rational]) -> Bound {
        let negated: Vec<Rational> = objective.iter().map(|c| -c.clone()).collect();
        match self.minimize(&negated) {
            Bound::Finite { value, point } => Bound::Finite {
                value: -value,
                point,
            },
            Bound::Unbounded => Bound::Unbounded,
        }
    }

    pub fn extremes(&self, objective: &[Rational]) -> Extremes {
        Extremes {
            min: self.minimize(objective),
            max: self.maximize(objective),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn system(nonneg: bool, vars: &[&'static str]) -> LinearSystem<&'static str> {
        let mut s = LinearSystem::new();
        for v in vars {
            s.add_var(*v, nonneg);
        }
        s
    }

    #[test]
    fn affine_unique() {
        let mut s = system(false, &["x", "y"]);
        s.add_equality_by_key(&[("x", int(1)), ("y", int(1))], int(1));
        s.add_equality_by_key(&[("x", int(1)), ("y", int(-1))], int(0));
        assert_eq!(s.solve_affine(), AffineSolution::Unique(vec![rat(1, 2), rat(1, 2)]));
    }

    #[test]
    fn affine_line() {
        let mut s = system(false, &["x", "y"]);
        s.add_equality_by_key(&[("x", int(1)), ("y", int(1))], int(1));
        match s.solve_affine() {
            AffineSolution::Affine {
                dimension,
                particular,
                kernel,
            } => {
                assert_eq!(dimension, 1);
                assert!(s.satisfies(&particular));
                let k = &kernel[0];
                assert_eq!(&k[0] + &k[1], int(0));
            }
            other => panic!("expected a line, got {other:?}"),
        }
    }

    #[test]
    fn affine_infeasible() {
        let mut s = system(false, &["x"]);
        s.add_equality_by_key(&[("x", int(1))], int(0));
        s.add_equality_by_key(&[("x", int(1))], int(1));
        assert_eq!(s.solve_affine(), AffineSolution::Infeasible);
    }

    #[test]
    fn simplex_box() {
        let mut s = system(true, &["x", "y"]);
        s.add_equality_by_key(&[("x", int(1)), ("y", int(1))], int(1));
        let ex = s.lp_extremes(&"x").unwrap();
        assert_eq!(ex.min.value(), Some(&int(0)));
        assert_eq!(ex.max.value(), Some(&int(1)));
        assert!(s.satisfies(ex.min.point().unwrap()));
        assert!(s.satisfies(ex.max.point().unwrap()));
        assert_eq!(ex.fixed_value(), None);
    }

    #[test]
    fn simplex_infeasible_sign() {
        let mut s = system(true, &["x"]);
        s.add_equality_by_key(&[("x", int(1))], int(-1));
        assert!(s.lp_feasible().is_none());
        assert!(s.lp_extremes(&"x").is_none());
    }

    #[test]
    fn simplex_unbounded_and_free_vars() {
        let mut s = LinearSystem::new();
        s.add_var("x", true);
        s.add_var("y", false);
        s.add_equality_by_key(&[("x", int(1)), ("y", int(-1))], int(2));
        let ex = s.lp_extremes(&"y").unwrap();
        assert_eq!(ex.min.value(), Some(&int(-2)));
        assert_eq!(ex.max, Bound::Unbounded);
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let mut s = system(true, &["x", "y", "z"]);
        s.add_equality_by_key(&[("x", int(1)), ("y", int(1))], int(1));
        s.add_equality_by_key(&[("x", int(2)), ("y", int(2))], int(2));
        s.add_equality_by_key(&[("z", int(1))], rat(1, 3));
        let ex = s.lp_extremes(&"z").unwrap();
        assert_eq!(ex.fixed_value(), Some(&rat(1, 3)));
        let ex = s.lp_extremes(&"y").unwrap();
        assert_eq!((ex.min.value(), ex.max.value()), (Some(&int(0)), Some(&int(1))));
    }

    /// The trichotomic matching system: weights on two vertex supports that
    /// must agree on a shared vertex.
    #[test]
    fn trichotomic_matching_system() {
        let mut s = system(true, &["a1", "a2", "b1", "b2"]);
        s.add_equality_by_key(&[("a1", int(1)), ("a2", int(1))], int(1));
        s.add_equality_by_key(&[("b1", int(1)), ("b2", int(1))], int(1));
        s.add_equality_by_key(&[("a2", rat(1, 2)), ("b2", rat(-1, 2))], int(0));
        s.add_equality_by_key(&[("a2", rat(1, 2)), ("b1", int(-1))], int(0));
        for (k, v) in [("a1", rat(1, 3)), ("a2", rat(2, 3)), ("b1", rat(1, 3)), ("b2", rat(2, 3))] {
            assert_eq!(s.lp_extremes(&k).unwrap().fixed_value(), Some(&v), "{k}");
        }
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's classic cycling example under the textbook rule; Bland's rule must terminate.
        let mut s = system(true, &["x1", "x2", "x3", "x4", "s1", "s2", "s3"]);
        s.add_equality_by_key(
            &[("x1", rat(1, 4)), ("x2", int(-60)), ("x3", rat(-1, 25)), ("x4", int(9)), ("s1", int(1))],
            int(0),
        );
        s.add_equality_by_key(
            &[("x1", rat(1, 2)), ("x2", int(-90)), ("x3", rat(-1, 50)), ("x4", int(3)), ("s2", int(1))],
            int(0),
        );
        s.add_equality_by_key(&[("x3", int(1)), ("s3", int(1))], int(1));
        let region = s.feasible_region().unwrap();
        let objective = [rat(-3, 4), int(150), rat(-1, 50), int(6), int(0), int(0), int(0)];
        let min = region.minimize(&objective);
        assert_eq!(min.value(), Some(&rat(-1, 20)));
    }

    proptest! {
        #[test]
        fn lp_points_satisfy_constraints(
            coeffs in proptest::collection::vec(-3i64..=3, 12),
            point in proptest::collection::vec(0i64..=4, 4),
        ) {
            // Build a system that is feasible by construction at `point`.
            let mut s = system(true, &["a", "b", "c", "d"]);
            for row in coeffs.chunks(4) {
                let rhs: i64 = row.iter().zip(&point).map(|(c, x)| c * x).sum();
                let terms = row.iter().enumerate().map(|(i, &c)| (i, int(c))).collect();
                s.add_equality(terms, int(rhs));
            }
            let region = s.feasible_region().expect("feasible by construction");
            prop_assert!(s.satisfies(&region.point()));
            for k in ["a", "b", "c", "d"] {
                let ex = s.lp_extremes(&k).unwrap();
                if let (Some(lo), Some(hi)) = (ex.min.value(), ex.max.value()) {
                    prop_assert!(lo <= hi);
                    prop_assert!(s.satisfies(ex.min.point().unwrap()));
                    prop_assert!(s.satisfies(ex.max.point().unwrap()));
                }
            }
        }

        #[test]
        fn kernel_vectors_are_homogeneous(coeffs in proptest::collection::vec(-3i64..=3, 10)) {
            let mut s = system(false, &["a", "b", "c", "d", "e"]);
            for row in coeffs.chunks(5) {
                let terms = row.iter().enumerate().map(|(i, &c)| (i, int(c))).collect();
                s.add_equality(terms, int(0));
            }
            if let AffineSolution::Affine { kernel, .. } = s.solve_affine() {
                for k in kernel {
                    for row in coeffs.chunks(5) {
                        let dot: Rational = row.iter().zip(&k).map(|(c, x)| int(*c) * x).sum();
                        prop_assert!(dot.is_zero());
                    }
                }
            }
        }
    }
}
