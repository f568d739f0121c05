//! Edge labelings by Z_d, null-homotopy, the difference push-forward and
//! faces of the polytope cut out by a labeling.

use alloc::collections::VecDeque;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::analysis::cell_system;
use crate::dist::{EdgeMatrix, Scenario, Section, SimplicialDistribution};
use crate::lpcore::AffineSolution;
use crate::rational::Rational;
use crate::space::{EdgeId, MeasurementSpace};
use crate::error::invalid;
use crate::Result;

/// A map from edges to Z_d, stored in the space's edge order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeLabeling {
    d: usize,
    labels: Vec<usize>,
}

impl EdgeLabeling {
    pub fn new(d: usize, labels: Vec<usize>) -> Result<Self> {
        if d < 2 {
            return Err(invalid!("modulus must be at least 2"));
        }
        Ok(EdgeLabeling {
            d,
            labels: labels.into_iter().map(|x| x % d).collect(),
        })
    }

    pub fn from_map(
        space: &MeasurementSpace,
        d: usize,
        labels: &alloc::collections::BTreeMap<EdgeId, usize>,
    ) -> Result<Self> {
        let values = space
            .edges()
            .iter()
            .map(|e| {
                labels
                    .get(&e.id)
                    .copied()
                    .ok_or_else(|| invalid!("no label for edge {}", e.id))
            })
            .collect::<Result<Vec<_>>>()?;
        if labels.len() != space.edge_count() {
            return Err(invalid!("labels name edges outside the space"));
        }
        EdgeLabeling::new(d, values)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, e: usize) -> usize {
        self.labels[e]
    }

    /// The labeling `(0, ..., 0, 1)` on C^(n).
    pub fn last_edge_one(n: usize, d: usize) -> Result<Self> {
        let mut labels = vec![0; n];
        if let Some(last) = labels.last_mut() {
            *last = 1;
        }
        EdgeLabeling::new(d, labels)
    }

    fn check_space(&self, space: &MeasurementSpace) -> Result<()> {
        if self.labels.len() != space.edge_count() {
            return Err(invalid!(
                "labeling has {} labels but the space has {} edges",
                self.labels.len(),
                space.edge_count()
            ));
        }
        Ok(())
    }
}

/// Signed label sum around the single cycle of `space`, which must be a
/// circle (edges may point either way around it).
pub fn is_null_homotopic_cycle(space: &MeasurementSpace, phi: &EdgeLabeling) -> Result<bool> {
    phi.check_space(space)?;
    let Some(walk) = space.cycle_traversal() else {
        return Err(invalid!("space is not a cycle"));
    };
    let d = phi.d;
    let sum = walk.iter().fold(0, |acc, &(e, forward)| {
        let x = phi.labels[e];
        if forward { (acc + x) % d } else { (acc + d - x) % d }
    });
    Ok(sum == 0)
}

/// Lift of a labeling on one connected component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentLift {
    /// Vertex indices of the component, base first.
    pub vertices: Vec<usize>,
    /// Values on `vertices`, or `None` when some cycle has nonzero sum.
    pub values: Option<Vec<usize>>,
}

/// Per component: fix the base vertex to 0 and propagate
/// `psi(tgt) = psi(src) + phi(edge)`, checking every edge afterwards.
pub fn find_lift_components(space: &MeasurementSpace, phi: &EdgeLabeling) -> Result<Vec<ComponentLift>> {
    phi.check_space(space)?;
    let d = phi.d;
    let mut psi: Vec<Option<usize>> = vec![None; space.vertex_count()];
    let mut out = Vec::new();
    for comp in space.components() {
        let base = comp[0];
        psi[base] = Some(0);
        let mut order = vec![base];
        let mut queue = VecDeque::from([base]);
        while let Some(v) = queue.pop_front() {
            let here = psi[v].expect("visited");
            let forward = space.out_edges(v).map(|e| (space.ends(e).1, (here + phi.labels[e]) % d));
            let backward = space
                .in_edges(v)
                .map(|e| (space.ends(e).0, (here + d - phi.labels[e]) % d));
            let next: Vec<(usize, usize)> = forward.chain(backward).collect();
            for (w, value) in next {
                if psi[w].is_none() {
                    psi[w] = Some(value);
                    order.push(w);
                    queue.push_back(w);
                }
            }
        }
        let consistent = (0..space.edge_count()).all(|e| {
            let (s, t) = space.ends(e);
            match (psi[s], psi[t]) {
                (Some(a), Some(b)) if comp.contains(&s) => (a + phi.labels[e]) % d == b,
                _ => true,
            }
        });
        out.push(ComponentLift {
            values: consistent.then(|| order.iter().map(|&v| psi[v].expect("visited")).collect()),
            vertices: order,
        });
    }
    Ok(out)
}

/// A section `psi` over Z_d with `psi(tgt) - psi(src) = phi` on every edge,
/// or `None` if any component obstructs.
pub fn find_lift(space: &MeasurementSpace, phi: &EdgeLabeling) -> Result<Option<Section>> {
    let mut psi = vec![0; space.vertex_count()];
    for comp in find_lift_components(space, phi)? {
        let Some(values) = comp.values else {
            return Ok(None);
        };
        for (v, x) in comp.vertices.into_iter().zip(values) {
            psi[v] = x;
        }
    }
    Ok(Some(Section(psi)))
}

/// Per edge, the distribution of `b - a` mod `d`.
pub fn kappa_pushforward(p: &SimplicialDistribution) -> Result<Vec<Vec<Rational>>> {
    let Some(d) = p.scenario().uniform_arity() else {
        return Err(invalid!("difference push-forward needs a uniform outcome count"));
    };
    Ok(p.matrices()
        .iter()
        .map(|m| {
            let mut out = vec![Rational::zero(); d];
            for a in 0..d {
                for b in 0..d {
                    out[(b + d - a) % d] += m.get(a, b);
                }
            }
            out
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Face {
    Singleton(SimplicialDistribution),
    /// Positive-dimensional face with a relative-interior sample point.
    Polytope { dimension: usize, sample: SimplicialDistribution },
    Empty,
}

impl Face {
    pub fn kind(&self) -> &'static str {
        match self {
            Face::Singleton(_) => "SINGLETON",
            Face::Polytope { .. } => "NONEMPTY_DIM",
            Face::Empty => "EMPTY",
        }
    }
}

/// Distributions on `space` with `d` outcomes whose difference push-forward
/// is the point mass at `phi` on every edge.
pub fn face(space: &MeasurementSpace, d: usize, phi: &EdgeLabeling) -> Result<Face> {
    phi.check_space(space)?;
    if phi.d != d {
        return Err(invalid!("labeling modulus {} differs from {d}", phi.d));
    }
    let scenario = Arc::new(Scenario::uniform(space.clone(), d)?);
    let cells: Vec<(usize, usize, usize)> = (0..space.edge_count())
        .flat_map(|e| {
            let c = phi.labels[e];
            (0..d).map(move |a| (e, a, (a + c) % d))
        })
        .collect();
    let sys = cell_system(&scenario, &cells);
    let Some(region) = sys.feasible_region() else {
        return Ok(Face::Empty);
    };
    let count = cells.len();
    let unit = |i: usize| {
        let mut v = vec![Rational::zero(); count];
        v[i] = Rational::one();
        v
    };
    let mut fixed = Vec::with_capacity(count);
    let mut zero_forced = Vec::new();
    let mut witnesses: Vec<Vec<Rational>> = Vec::new();
    for i in 0..count {
        let ext = region.extremes(&unit(i));
        let max = ext.max.value().expect("coordinates are bounded").clone();
        if max.is_zero() {
            zero_forced.push(i);
        } else {
            witnesses.push(ext.max.point().expect("finite").to_vec());
        }
        fixed.push(ext.fixed_value().cloned());
    }
    let build = |x: &[Rational]| {
        let mut matrices = vec![EdgeMatrix::zeros(d, d); space.edge_count()];
        for (&(e, a, b), v) in cells.iter().zip(x) {
            matrices[e].set(a, b, v.clone());
        }
        SimplicialDistribution::new(scenario.clone(), matrices)
    };
    if fixed.iter().all(Option::is_some) {
        let values: Vec<Rational> = fixed.into_iter().map(Option::unwrap).collect();
        return Ok(Face::Singleton(build(&values)?));
    }
    let mut pinned = sys.clone();
    for &i in &zero_forced {
        pinned.add_equality(vec![(i, Rational::one())], Rational::zero());
    }
    let dimension = match pinned.solve_affine() {
        AffineSolution::Affine { dimension, .. } => dimension,
        AffineSolution::Unique(_) | AffineSolution::Infeasible => 0,
    };
    let scale = Rational::new(1.into(), witnesses.len().into());
    let sample: Vec<Rational> = (0..count)
        .map(|i| witnesses.iter().map(|w| &w[i]).sum::<Rational>() * &scale)
        .collect();
    Ok(Face::Polytope {
        dimension,
        sample: build(&sample)?,
    })
}

/// The unique member of `face(phi)` when `phi` does not lift to a section;
/// such a distribution is a contextual vertex.
pub fn certify_face_vertex(
    space: &MeasurementSpace,
    d: usize,
    phi: &EdgeLabeling,
) -> Result<Option<SimplicialDistribution>> {
    if find_lift(space, phi)?.is_some() {
        return Ok(None);
    }
    match face(space, d, phi)? {
        Face::Singleton(p) => Ok(Some(p)),
        Face::Polytope { .. } | Face::Empty => Ok(None),
    }
}
