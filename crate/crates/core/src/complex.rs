//! Finite simplicial complexes of bounded vertex degree.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

/// Default bound on the vertex degree.
pub const DEFAULT_DEGREE_BOUND: usize = 16;

/// A simplex, stored with its vertices in ascending order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Sorts and deduplicates the given vertices.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptySimplex);
        }
        vertices.sort_unstable();
        vertices.dedup();
        Ok(Simplex(vertices))
    }

    pub(crate) fn from_sorted(vertices: Vec<usize>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// The i-th face, obtained by deleting the i-th vertex.
    pub fn face(&self, i: usize) -> Simplex {
        let mut v = self.0.clone();
        v.remove(i);
        Simplex(v)
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Sign of the permutation that sorts `seq` (entries pairwise distinct).
pub fn sort_sign(seq: &[usize]) -> i64 {
    let mut inversions = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Path distance between vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }
}

/// A finite, downward closed simplicial complex on vertices `0..vertex_count`.
#[derive(Clone, PartialEq, Eq)]
pub struct Complex {
    vertex_count: usize,
    degree_bound: usize,
    simplices: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
    neighbors: Vec<Vec<usize>>,
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Complex")
            .field("vertex_count", &self.vertex_count)
            .field("f_vector", &self.f_vector())
            .finish()
    }
}

/// Builds the downward closure of `raw`, inferring the vertex count.
pub fn validate_complex(raw: &[Vec<usize>], degree_bound: usize) -> Result<Complex> {
    let n = raw.iter().flatten().map(|&v| v + 1).max().unwrap_or(0);
    Complex::new(n, raw, degree_bound)
}

impl Complex {
    /// Builds the downward closure of `maximal` on `vertex_count` vertices.
    /// Every vertex in range becomes a 0-simplex.
    pub fn new(vertex_count: usize, maximal: &[Vec<usize>], degree_bound: usize) -> Result<Self> {
        if maximal.is_empty() && vertex_count == 0 {
            return Err(Error::EmptyComplex);
        }
        let mut facets = Vec::with_capacity(maximal.len());
        for raw in maximal {
            let s = Simplex::new(raw.clone())?;
            if let Some(&v) = s.vertices().iter().find(|&&v| v >= vertex_count) {
                return Err(Error::VertexOutOfRange(v));
            }
            facets.push(s);
        }
        // Degree check on the 1-skeleton before enumerating faces.
        let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        for s in &facets {
            let v = s.vertices();
            if v.len() > degree_bound + 1 {
                return Err(Error::DegreeBoundExceeded {
                    vertex: v[0],
                    degree: v.len() - 1,
                    bound: degree_bound,
                });
            }
            for i in 0..v.len() {
                for j in i + 1..v.len() {
                    edges.insert((v[i], v[j]));
                }
            }
        }
        let mut degree = vec![0usize; vertex_count];
        for &(a, b) in &edges {
            degree[a] += 1;
            degree[b] += 1;
        }
        if let Some((vertex, &d)) = degree.iter().enumerate().find(|(_, &d)| d > degree_bound) {
            return Err(Error::DegreeBoundExceeded {
                vertex,
                degree: d,
                bound: degree_bound,
            });
        }
        let mut all: BTreeSet<Simplex> = (0..vertex_count).map(|v| Simplex(vec![v])).collect();
        for s in &facets {
            let v = s.vertices();
            let k = v.len();
            for mask in 1u64..(1u64 << k) {
                let sub: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| v[i]).collect();
                all.insert(Simplex(sub));
            }
        }
        Ok(Self::from_closed_set(vertex_count, degree_bound, all))
    }

    /// Builds a complex from a simplex set already known to be downward closed.
    pub(crate) fn from_closed_set(
        vertex_count: usize,
        degree_bound: usize,
        all: impl IntoIterator<Item = Simplex>,
    ) -> Self {
        let mut simplices: Vec<Vec<Simplex>> = Vec::new();
        for s in all {
            let d = s.dim();
            if simplices.len() <= d {
                simplices.resize(d + 1, Vec::new());
            }
            simplices[d].push(s);
        }
        if simplices.is_empty() {
            simplices.push(Vec::new());
        }
        for level in &mut simplices {
            level.sort();
            level.dedup();
        }
        let index = simplices
            .iter()
            .map(|level| level.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        let mut neighbors = vec![Vec::new(); vertex_count];
        if let Some(edges) = simplices.get(1) {
            for e in edges {
                let v = e.vertices();
                neighbors[v[0]].push(v[1]);
                neighbors[v[1]].push(v[0]);
            }
        }
        for n in &mut neighbors {
            n.sort_unstable();
        }
        Complex {
            vertex_count,
            degree_bound,
            simplices,
            index,
            neighbors,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    /// Top dimension; 0 for a complex consisting only of vertices.
    pub fn dim(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn simplices(&self, n: usize) -> &[Simplex] {
        self.simplices.get(n).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, n: usize) -> usize {
        self.simplices(n).len()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s.dim()).and_then(|m| m.get(s).copied())
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index_of(s).is_some()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Maximal simplices, sorted.
    pub fn facets(&self) -> Vec<Simplex> {
        let mut covered: BTreeSet<&Simplex> = BTreeSet::new();
        let mut out = Vec::new();
        for d in (0..self.simplices.len()).rev() {
            for s in &self.simplices[d] {
                if !covered.contains(s) {
                    out.push(s.clone());
                }
            }
            if d > 0 {
                for s in &self.simplices[d] {
                    for i in 0..=d {
                        // faces of any simplex are non-maximal
                        let f = s.face(i);
                        if let Some(idx) = self.index[d - 1].get(&f) {
                            covered.insert(&self.simplices[d - 1][*idx]);
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(d, s)| if d % 2 == 0 { s.len() as i64 } else { -(s.len() as i64) })
            .sum()
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertex_count {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange(v))
        }
    }

    /// Multi-source breadth-first distances, optionally truncated at `limit`.
    pub fn distances_from(&self, sources: &[usize], limit: Option<usize>) -> Vec<Distance> {
        let mut dist = vec![Distance::Infinite; self.vertex_count];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] == Distance::Infinite {
                dist[s] = Distance::Finite(0);
                queue.push_back((s, 0usize));
            }
        }
        while let Some((v, d)) = queue.pop_front() {
            if limit.is_some_and(|l| d >= l) {
                continue;
            }
            for &w in &self.neighbors[v] {
                if dist[w] == Distance::Infinite {
                    dist[w] = Distance::Finite(d + 1);
                    queue.push_back((w, d + 1));
                }
            }
        }
        dist
    }

    pub fn path_distance(&self, u: usize, v: usize) -> Result<Distance> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Ok(Distance::Finite(0));
        }
        Ok(self.distances_from(&[u], None)[v])
    }

    /// Connected component label of every vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.vertex_count];
        let mut next = 0;
        for s in 0..self.vertex_count {
            if label[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            label[s] = next;
            while let Some(v) = stack.pop() {
                for &w in &self.neighbors[v] {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// The full subcomplex on the given vertex set, relabeled order-preservingly.
    pub fn induced_subcomplex(&self, keep: &[bool]) -> Ball {
        let mut old_to_new = vec![None; self.vertex_count];
        let mut new_to_old = Vec::new();
        for (v, &k) in keep.iter().enumerate() {
            if k {
                old_to_new[v] = Some(new_to_old.len());
                new_to_old.push(v);
            }
        }
        let mut all = Vec::new();
        for level in &self.simplices {
            for s in level {
                if s.vertices().iter().all(|&v| keep[v]) {
                    let mapped = s.vertices().iter().map(|&v| old_to_new[v].unwrap()).collect();
                    all.push(Simplex::from_sorted(mapped));
                }
            }
        }
        Ball {
            complex: Complex::from_closed_set(new_to_old.len(), self.degree_bound, all),
            old_to_new,
            new_to_old,
        }
    }

    /// B_r(K, V): the full subcomplex on vertices within distance `r` of `sources`.
    pub fn ball(&self, sources: &[usize], r: usize) -> Result<Ball> {
        if sources.is_empty() {
            return Err(Error::EmptySimplex);
        }
        for &s in sources {
            self.check_vertex(s)?;
        }
        let dist = self.distances_from(sources, Some(r));
        let keep: Vec<bool> = dist.iter().map(|d| d.finite().is_some_and(|d| d <= r)).collect();
        Ok(self.induced_subcomplex(&keep))
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n <= self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionOutOfRange {
                requested: n,
                available: self.dim(),
            })
        }
    }

    /// ∂_n: rows indexed by (n-1)-simplices, columns by n-simplices.
    pub fn boundary_matrix(&self, n: usize) -> Result<IntMatrix> {
        if n == 0 {
            return Err(Error::DimensionOutOfRange {
                requested: 0,
                available: self.dim(),
            });
        }
        self.check_dim(n)?;
        Ok(self.boundary_unchecked(n))
    }

    /// ∂_n with empty matrices outside the range of dimensions.
    fn boundary_unchecked(&self, n: usize) -> IntMatrix {
        let rows = if n == 0 { 0 } else { self.count(n - 1) };
        let mut m = IntMatrix::new(rows, self.count(n));
        if n == 0 {
            return m;
        }
        for (c, s) in self.simplices(n).iter().enumerate() {
            for i in 0..=n {
                let r = self.index[n - 1][&s.face(i)];
                m.set(r, c, if i % 2 == 0 { 1 } else { -1 });
            }
        }
        m
    }

    /// Δ_n = ∂_{n+1}∂_{n+1}^T + ∂_n^T∂_n on n-chains.
    pub fn laplacian(&self, n: usize) -> Result<IntMatrix> {
        self.check_dim(n)?;
        let up = self.boundary_unchecked(n + 1);
        let down = self.boundary_unchecked(n);
        let mut lap = up.matmul(&up.transpose());
        if lap.rows() == 0 {
            lap = IntMatrix::new(self.count(n), self.count(n));
        }
        if n > 0 {
            lap = lap.add(&down.transpose().matmul(&down));
        }
        Ok(lap)
    }

    /// Rank of H_n(K; ℚ) from exact boundary ranks.
    pub fn betti(&self, n: usize) -> usize {
        if n > self.dim() {
            return 0;
        }
        let rank_n = if n == 0 { 0 } else { self.boundary_unchecked(n).rank() };
        let rank_up = if n + 1 > self.dim() {
            0
        } else {
            self.boundary_unchecked(n + 1).rank()
        };
        self.count(n) - rank_n - rank_up
    }

    /// Serializable form listing maximal simplices.
    pub fn to_file(&self) -> ComplexFile {
        ComplexFile {
            vertex_count: self.vertex_count,
            degree_bound: self.degree_bound,
            maximal_simplices: self.facets().into_iter().map(|s| s.0).collect(),
        }
    }
}

/// A subcomplex together with its vertex relabeling.
#[derive(Clone, Debug)]
pub struct Ball {
    pub complex: Complex,
    /// `old_to_new[v]` is the new label of original vertex `v`, if kept.
    pub old_to_new: Vec<Option<usize>>,
    pub new_to_old: Vec<usize>,
}

/// On-disk complex description; loading applies downward closure.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ComplexFile {
    pub vertex_count: usize,
    #[serde(default = "default_bound")]
    pub degree_bound: usize,
    pub maximal_simplices: Vec<Vec<usize>>,
}

fn default_bound() -> usize {
    DEFAULT_DEGREE_BOUND
}

impl ComplexFile {
    pub fn build(&self) -> Result<Complex> {
        Complex::new(self.vertex_count, &self.maximal_simplices, self.degree_bound)
    }
}
