//! Deterministic families of finite G-complexes.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{Complex, DEFAULT_DEGREE_BOUND};
use crate::error::{Error, Result};
use crate::group::{CatalogGroup, Group, GroupAction, SubgroupEmbedding};
use crate::induction::induce_complex;

/// Largest Sierpinski index accepted.
pub const MAX_SIERPINSKI: usize = 8;

fn cyclic(k: usize) -> Arc<Group> {
    Arc::new(Group::catalog(CatalogGroup::Cyclic(k)).expect("cyclic group"))
}

/// Lower-left corners of the unit triangles of T_n.
fn sierpinski_cells(n: usize) -> Vec<(i64, i64)> {
    let mut cells = vec![(0i64, 0i64)];
    for k in 0..n {
        let s = 1i64 << k;
        let mut next = cells.clone();
        next.extend(cells.iter().map(|&(a, b)| (a + s, b)));
        next.extend(cells.iter().map(|&(a, b)| (a, b + s)));
        cells = next;
    }
    cells.sort_unstable();
    cells
}

/// Sierpinski triangle T_n with C_3 acting by rotation σ(a,b) = (2^n − a − b, a).
pub fn sierpinski(n: usize) -> Result<GroupAction> {
    if n > MAX_SIERPINSKI {
        return Err(Error::IndexOutOfRange(n));
    }
    let cells = sierpinski_cells(n);
    let mut points: BTreeSet<(i64, i64)> = BTreeSet::new();
    for &(a, b) in &cells {
        points.extend([(a, b), (a + 1, b), (a, b + 1)]);
    }
    let points: Vec<(i64, i64)> = points.into_iter().collect();
    let id = |p: (i64, i64)| points.binary_search(&p).ok();
    let triangles: Vec<Vec<usize>> = cells
        .iter()
        .map(|&(a, b)| vec![id((a, b)).unwrap(), id((a + 1, b)).unwrap(), id((a, b + 1)).unwrap()])
        .collect();
    let complex = Complex::new(points.len(), &triangles, DEFAULT_DEGREE_BOUND)?;
    let side = 1i64 << n;
    let sigma: Vec<usize> = points
        .iter()
        .map(|&(a, b)| {
            id((side - a - b, a))
                .ok_or_else(|| Error::InternalInconsistency("rotation leaves the vertex set".into()))
        })
        .collect::<Result<_>>()?;
    let sigma2: Vec<usize> = sigma.iter().map(|&v| sigma[v]).collect();
    let act = vec![(0..points.len()).collect(), sigma, sigma2];
    GroupAction::new(cyclic(3), complex, act)
}

fn cycle_complex(m: usize) -> Result<Complex> {
    let edges: Vec<Vec<usize>> = (0..m).map(|i| vec![i, (i + 1) % m]).collect();
    Complex::new(m, &edges, DEFAULT_DEGREE_BOUND)
}

/// C_k rotating the m-cycle by m/k steps.
pub fn cycle_rotation(m: usize, k: usize) -> Result<GroupAction> {
    if m < 3 {
        return Err(Error::IndexOutOfRange(m));
    }
    if k == 0 || m % k != 0 {
        return Err(Error::Indivisible(m, k));
    }
    let step = m / k;
    let act = (0..k).map(|j| (0..m).map(|i| (i + j * step) % m).collect()).collect();
    GroupAction::new(cyclic(k), cycle_complex(m)?, act)
}

/// C_2 reflecting the m-cycle by i ↦ −i.
pub fn cycle_reflection(m: usize) -> Result<GroupAction> {
    if m < 3 {
        return Err(Error::IndexOutOfRange(m));
    }
    let act = vec![(0..m).collect(), (0..m).map(|i| (m - i) % m).collect()];
    GroupAction::new(cyclic(2), cycle_complex(m)?, act)
}

/// Triangulated m-cycle × hollow triangle with C_3 rotating the triangle.
/// Vertex (i, j) has id 3i + j.
pub fn prism_rotation(m: usize) -> Result<GroupAction> {
    if m < 3 {
        return Err(Error::IndexOutOfRange(m));
    }
    let v = |i: usize, j: usize| 3 * (i % m) + j % 3;
    let mut facets = Vec::new();
    for i in 0..m {
        for j in 0..3 {
            facets.push(vec![v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
            facets.push(vec![v(i, j), v(i, j + 1), v(i + 1, j + 1)]);
        }
    }
    let complex = Complex::new(3 * m, &facets, DEFAULT_DEGREE_BOUND)?;
    let act = (0..3)
        .map(|s| (0..3 * m).map(|x| v(x / 3, x % 3 + s)).collect())
        .collect();
    GroupAction::new(cyclic(3), complex, act)
}

/// Disjoint copies G ×_H K; see [`induce_complex`].
pub fn induced_copies(emb: &SubgroupEmbedding, action: &GroupAction) -> Result<GroupAction> {
    induce_complex(emb, action)
}

/// Seeded random complex built from free G-orbits: ⌊v/|G|⌋ (at least one)
/// copies of G as vertices, edge orbits proposed uniformly and kept while
/// every degree stays ≤ D, then each closed triangle orbit filled with
/// probability 1/2.
pub fn random_gcomplex(v: usize, degree_bound: usize, group: Arc<Group>, seed: u64) -> Result<GroupAction> {
    let order = group.order();
    let copies = (v / order).max(1);
    let nv = copies * order;
    let act: Vec<Vec<usize>> = (0..order)
        .map(|g| (0..nv).map(|x| (x / order) * order + group.mul(g, x % order)).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nv];
    let proposals = nv * degree_bound / 2 + 1;
    for _ in 0..proposals {
        if nv < 2 {
            break;
        }
        let a = rng.gen_range(0..nv);
        let b = rng.gen_range(0..nv);
        if a == b || adj[a].contains(&b) {
            continue;
        }
        let orbit: BTreeSet<(usize, usize)> = act
            .iter()
            .map(|row| {
                let (x, y) = (row[a], row[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        let mut extra = vec![0usize; nv];
        for &(x, y) in &orbit {
            extra[x] += 1;
            extra[y] += 1;
        }
        if (0..nv).all(|x| adj[x].len() + extra[x] <= degree_bound) {
            for (x, y) in orbit {
                adj[x].insert(y);
                adj[y].insert(x);
            }
        }
    }
    let mut edges: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut triangles: BTreeSet<Vec<usize>> = BTreeSet::new();
    for a in 0..nv {
        for &b in adj[a].range(a + 1..) {
            edges.insert(vec![a, b]);
            for &c in adj[b].range(b + 1..) {
                if adj[a].contains(&c) {
                    triangles.insert(vec![a, b, c]);
                }
            }
        }
    }
    let mut filled: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut decided: BTreeSet<Vec<usize>> = BTreeSet::new();
    for t in &triangles {
        if decided.contains(t) {
            continue;
        }
        let orbit: BTreeSet<Vec<usize>> = act
            .iter()
            .map(|row| {
                let mut s: Vec<usize> = t.iter().map(|&x| row[x]).collect();
                s.sort_unstable();
                s
            })
            .collect();
        let fill = rng.gen_bool(0.5);
        for s in orbit {
            if fill {
                filled.insert(s.clone());
            }
            decided.insert(s);
        }
    }
    let mut facets: Vec<Vec<usize>> = edges.into_iter().collect();
    facets.extend(filled);
    let complex = Complex::new(nv, &facets, degree_bound)?;
    GroupAction::new(group, complex, act)
}

/// Named generator families addressable by an index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// Index n: T_n with C_3.
    Sierpinski,
    /// Index m: the m-cycle with C_k.
    CycleRotation { k: usize },
    /// Index m: the m-cycle with reflection.
    CycleReflection,
    /// Index m: the prism over the m-cycle.
    Prism,
    /// Index v: random complex with about v vertices.
    Random {
        degree_bound: usize,
        group: CatalogGroup,
        seed: u64,
    },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Sierpinski => write!(f, "sierpinski"),
            Family::CycleRotation { k } => write!(f, "cycle-rotation(k={k})"),
            Family::CycleReflection => write!(f, "cycle-reflection"),
            Family::Prism => write!(f, "prism"),
            Family::Random {
                degree_bound,
                group,
                seed,
            } => write!(f, "random(D={degree_bound},G={group},seed={seed})"),
        }
    }
}

/// A family together with one index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
    pub index: usize,
}

impl FamilySpec {
    pub fn new(family: Family, index: usize) -> Self {
        FamilySpec { family, index }
    }

    pub fn build(&self) -> Result<GroupAction> {
        match &self.family {
            Family::Sierpinski => sierpinski(self.index),
            Family::CycleRotation { k } => cycle_rotation(self.index, *k),
            Family::CycleReflection => cycle_reflection(self.index),
            Family::Prism => prism_rotation(self.index),
            Family::Random {
                degree_bound,
                group,
                seed,
            } => random_gcomplex(self.index, *degree_bound, Arc::new(Group::catalog(*group)?), *seed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Distance;

    #[test]
    fn sierpinski_counts() {
        for n in 0..=MAX_SIERPINSKI {
            let a = sierpinski(n).unwrap();
            let k = a.complex();
            let p = 3usize.pow(n as u32);
            assert_eq!(k.count(0), (3 * p + 3) / 2, "n={n}");
            assert_eq!(k.count(1), 3 * p);
            assert_eq!(k.count(2), p);
            assert!(k.max_degree() <= 4);
        }
        assert!(sierpinski(9).is_err());
    }

    #[test]
    fn sierpinski_rotation_cycles_corners() {
        let a = sierpinski(0).unwrap();
        // points (0,0), (0,1), (1,0)
        assert_eq!(a.table()[1], vec![2, 0, 1]);
    }

    #[test]
    fn sierpinski_corner_distance() {
        for n in 0..=6 {
            let k = sierpinski(n).unwrap();
            let last = k.complex().vertex_count() - 1;
            // vertices sorted lexicographically: (0,0) first, (2^n, 0) last
            assert_eq!(k.complex().path_distance(0, last).unwrap(), Distance::Finite(1 << n));
        }
    }

    #[test]
    fn cycles_and_prisms() {
        assert_eq!(cycle_rotation(12, 3).unwrap().act(1, 0), 4);
        assert_eq!(cycle_rotation(12, 5).unwrap_err(), Error::Indivisible(12, 5));
        let r4 = cycle_reflection(4).unwrap();
        let fixed: Vec<usize> = (0..4).filter(|&i| r4.act(1, i) == i).collect();
        assert_eq!(fixed, vec![0, 2]);
        let r5 = cycle_reflection(5).unwrap();
        assert_eq!((0..5).filter(|&i| r5.act(1, i) == i).count(), 1);
        for m in 3..8 {
            let p = prism_rotation(m).unwrap();
            assert_eq!(p.complex().vertex_count(), 3 * m);
            assert_eq!(p.complex().max_degree(), 6);
            assert_eq!(p.complex().euler_characteristic(), 0);
        }
    }

    #[test]
    fn random_is_deterministic() {
        let g = Arc::new(Group::catalog(CatalogGroup::Cyclic(2)).unwrap());
        let a = random_gcomplex(12, 5, g.clone(), 7).unwrap();
        let b = random_gcomplex(12, 5, g, 7).unwrap();
        assert_eq!(a.complex(), b.complex());
        assert_eq!(a.table(), b.table());
        assert!(a.complex().max_degree() <= 5);
    }
}
