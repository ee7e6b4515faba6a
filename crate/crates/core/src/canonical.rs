//! Rooted and doubly rooted G-complexes, equivariant isomorphism, the Ψ
//! canonical code, and the rooted metric.
//!
//! A code is the ≺-minimal embedding of a rooted G-complex into Δ(ℕ_G).
//! The point (ℓ, X_j, x) of ℕ_G occupies slot ℓ·N + off_j + x, where N is
//! the total size of the models in Orb(G). Simplices are ordered
//! colexicographically on slots, and a present simplex precedes an absent
//! one. The root orbit fills level 0 alone. Minimization runs block by
//! block over (level, type) with a beam of all tied partial embeddings.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::io::Read;
use std::sync::Arc;

use crate::complex::{Complex, Distance, Simplex, DEFAULT_DEGREE_BOUND};
use crate::error::{Error, Result};
use crate::group::{mask_of, Group, GroupAction, OrbitCatalog};

/// Format version written as the first byte of every code.
pub const CODE_VERSION: u8 = 1;
/// Default cutoff for [`rooted_distance`].
pub const DEFAULT_R_MAX: usize = 8;
/// Largest number of tied partial embeddings kept during minimization.
pub const BEAM_CAP: usize = 200_000;

const UNPLACED: u32 = u32::MAX;

/// A G-complex with a distinguished vertex orbit meeting every component.
#[derive(Clone, Debug)]
pub struct RootedGComplex {
    action: GroupAction,
    root: Vec<usize>,
}

/// A G-complex with two distinguished orbits whose union meets every
/// component.
#[derive(Clone, Debug)]
pub struct DoublyRootedGComplex {
    action: GroupAction,
    root1: Vec<usize>,
    root2: Vec<usize>,
}

fn check_orbit(action: &GroupAction, orbit: &[usize]) -> Result<Vec<usize>> {
    let v = *orbit.first().ok_or(Error::EmptySimplex)?;
    if let Some(&w) = orbit.iter().find(|&&w| w >= action.complex().vertex_count()) {
        return Err(Error::VertexOutOfRange(w));
    }
    let full = action.orbit_of(v);
    let mut given = orbit.to_vec();
    given.sort_unstable();
    given.dedup();
    if full != given {
        return Err(Error::InvalidAction("root is not a single orbit".into()));
    }
    Ok(full)
}

fn components_meeting(complex: &Complex, seeds: &[usize]) -> Vec<bool> {
    let labels = complex.components();
    let hit: BTreeSet<usize> = seeds.iter().map(|&v| labels[v]).collect();
    labels.iter().map(|l| hit.contains(l)).collect()
}

impl RootedGComplex {
    /// Checks that `root` is an orbit meeting every component.
    pub fn new(action: GroupAction, root: Vec<usize>) -> Result<Self> {
        let root = check_orbit(&action, &root)?;
        if components_meeting(action.complex(), &root).iter().any(|&k| !k) {
            return Err(Error::InvalidAction("a component misses the root orbit".into()));
        }
        Ok(RootedGComplex { action, root })
    }

    pub fn action(&self) -> &GroupAction {
        &self.action
    }

    pub fn complex(&self) -> &Complex {
        self.action.complex()
    }

    pub fn group(&self) -> &Arc<Group> {
        self.action.group()
    }

    /// Root orbit, sorted.
    pub fn root(&self) -> &[usize] {
        &self.root
    }

    /// B_r around the root orbit.
    pub fn ball(&self, r: usize) -> RootedGComplex {
        let dist = self.complex().distances_from(&self.root, Some(r));
        let keep: Vec<bool> = dist.iter().map(|d| d.finite().is_some_and(|d| d <= r)).collect();
        let (action, ball) = self.action.restrict(&keep);
        let root = self.root.iter().map(|&v| ball.old_to_new[v].unwrap()).collect();
        RootedGComplex { action, root }
    }

    /// Largest distance of a vertex from the root orbit.
    pub fn radius(&self) -> usize {
        self.complex()
            .distances_from(&self.root, None)
            .iter()
            .filter_map(|d| d.finite())
            .max()
            .unwrap_or(0)
    }
}

impl DoublyRootedGComplex {
    pub fn new(action: GroupAction, root1: Vec<usize>, root2: Vec<usize>) -> Result<Self> {
        let root1 = check_orbit(&action, &root1)?;
        let root2 = check_orbit(&action, &root2)?;
        let seeds: Vec<usize> = root1.iter().chain(&root2).copied().collect();
        if components_meeting(action.complex(), &seeds).iter().any(|&k| !k) {
            return Err(Error::InvalidAction("a component misses both roots".into()));
        }
        Ok(DoublyRootedGComplex { action, root1, root2 })
    }

    pub fn action(&self) -> &GroupAction {
        &self.action
    }

    pub fn root1(&self) -> &[usize] {
        &self.root1
    }

    pub fn root2(&self) -> &[usize] {
        &self.root2
    }

    /// The same complex with the roots exchanged.
    pub fn swapped(&self) -> Self {
        DoublyRootedGComplex {
            action: self.action.clone(),
            root1: self.root2.clone(),
            root2: self.root1.clone(),
        }
    }
}

/// Root at the orbit of `v`, keeping the components that meet it.
pub fn root_restrict(action: &GroupAction, v: usize) -> Result<RootedGComplex> {
    if v >= action.complex().vertex_count() {
        return Err(Error::VertexOutOfRange(v));
    }
    let orbit = action.orbit_of(v);
    let keep = components_meeting(action.complex(), &orbit);
    let (restricted, ball) = action.restrict(&keep);
    let root = orbit.iter().map(|&w| ball.old_to_new[w].unwrap()).collect();
    Ok(RootedGComplex {
        action: restricted,
        root,
    })
}

/// Roots at the orbits of `v1` and `v2`, keeping components meeting either.
pub fn doubly_restrict(action: &GroupAction, v1: usize, v2: usize) -> Result<DoublyRootedGComplex> {
    for v in [v1, v2] {
        if v >= action.complex().vertex_count() {
            return Err(Error::VertexOutOfRange(v));
        }
    }
    let o1 = action.orbit_of(v1);
    let o2 = action.orbit_of(v2);
    let seeds: Vec<usize> = o1.iter().chain(&o2).copied().collect();
    let keep = components_meeting(action.complex(), &seeds);
    let (restricted, ball) = action.restrict(&keep);
    let map = |o: &[usize]| o.iter().map(|&w| ball.old_to_new[w].unwrap()).collect();
    Ok(DoublyRootedGComplex {
        root1: map(&o1),
        root2: map(&o2),
        action: restricted,
    })
}

/// Serialized Ψ-minimal embedding.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let bytes = hex::decode(s.trim()).map_err(|e| Error::MalformedCode(e.to_string()))?;
        let code = CanonicalCode(bytes);
        code.parse()?;
        Ok(code)
    }

    fn parse(&self) -> Result<ParsedCode> {
        let bad = |m: &str| Error::MalformedCode(m.to_string());
        let mut r: &[u8] = &self.0;
        let mut byte = [0u8; 1];
        r.read_exact(&mut byte).map_err(|_| bad("empty"))?;
        if byte[0] != CODE_VERSION {
            return Err(bad("unknown version"));
        }
        let uint = |r: &mut &[u8]| -> Result<usize> {
            leb128::read::unsigned(r).map(|v| v as usize).map_err(|_| bad("truncated varint"))
        };
        let root_rank = uint(&mut r)?;
        r.read_exact(&mut byte).map_err(|_| bad("missing flag"))?;
        let second = match byte[0] {
            0 => SecondRoot::None,
            1 => SecondRoot::Distinct(uint(&mut r)?),
            2 => SecondRoot::Same,
            _ => return Err(bad("bad flag")),
        };
        let count = uint(&mut r)?;
        let mut facets = Vec::with_capacity(count.min(1 << 16));
        for _ in 0..count {
            let len = uint(&mut r)?;
            if len == 0 {
                return Err(bad("empty facet"));
            }
            let mut f = Vec::with_capacity(len.min(64));
            for _ in 0..len {
                f.push(uint(&mut r)?);
            }
            facets.push(f);
        }
        if !r.is_empty() {
            return Err(bad("trailing bytes"));
        }
        Ok(ParsedCode {
            root_rank,
            second,
            facets,
        })
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalCode({})", self.to_hex())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SecondRoot {
    None,
    /// Second orbit of the given type rank, placed in block (1, rank).
    Distinct(usize),
    Same,
}

struct ParsedCode {
    root_rank: usize,
    second: SecondRoot,
    facets: Vec<Vec<usize>>,
}

struct OrbitInfo {
    vertices: Vec<usize>,
    rank: usize,
    /// For each admissible base point x, the model point of every vertex.
    placements: Vec<Vec<usize>>,
}

struct Prepared<'a> {
    complex: &'a Complex,
    orbits: Vec<OrbitInfo>,
    orbit_of: Vec<usize>,
    index_in_orbit: Vec<usize>,
    /// All simplices (every dimension) as vertex lists.
    simplices: Vec<Vec<usize>>,
    incident: Vec<Vec<usize>>,
    catalog: Arc<OrbitCatalog>,
}

impl<'a> Prepared<'a> {
    fn new(action: &'a GroupAction) -> Result<Self> {
        let complex = action.complex();
        if complex.dim() > complex.degree_bound() {
            return Err(Error::DegreeBoundExceeded {
                vertex: 0,
                degree: complex.dim(),
                bound: complex.degree_bound(),
            });
        }
        let group = action.group();
        let catalog = group.orbit_catalog()?;
        let nv = complex.vertex_count();
        let mut orbit_of = vec![0; nv];
        let mut index_in_orbit = vec![0; nv];
        let mut orbits = Vec::new();
        for (oid, vertices) in action.orbits().into_iter().enumerate() {
            let base = vertices[0];
            let stab = mask_of(&action.stabilizer(base));
            let rank = catalog
                .rank_of(stab)
                .ok_or_else(|| Error::InternalInconsistency("unclassified stabilizer".into()))?;
            let model = &catalog.sets[rank];
            // g_u with g_u·base = u for every orbit vertex u
            let mut lift = vec![usize::MAX; vertices.len()];
            for (k, &u) in vertices.iter().enumerate() {
                orbit_of[u] = oid;
                index_in_orbit[u] = k;
            }
            for g in group.elements() {
                let k = index_in_orbit[action.act(g, base)];
                if lift[k] == usize::MAX {
                    lift[k] = g;
                }
            }
            let placements = (0..model.cosets.len())
                .filter(|&x| model.point_stabilizers[x] == stab)
                .map(|x| lift.iter().map(|&g| model.act[g][x]).collect())
                .collect();
            orbits.push(OrbitInfo {
                vertices,
                rank,
                placements,
            });
        }
        let mut simplices = Vec::new();
        let mut incident = vec![Vec::new(); nv];
        for n in 0..=complex.dim() {
            for s in complex.simplices(n) {
                for &v in s.vertices() {
                    incident[v].push(simplices.len());
                }
                simplices.push(s.vertices().to_vec());
            }
        }
        Ok(Prepared {
            complex,
            orbits,
            orbit_of,
            index_in_orbit,
            simplices,
            incident,
            catalog,
        })
    }

    fn block_base(&self, level: usize, rank: usize) -> u32 {
        (level * self.catalog.level_width + self.catalog.offsets[rank]) as u32
    }

    /// Colex-sorted simplices whose largest slot lies in the candidate's block.
    fn segment(&self, state: &State, oid: usize, placement: usize, base: u32) -> Vec<Vec<u32>> {
        let info = &self.orbits[oid];
        let pos = &info.placements[placement];
        let slot_of = |w: usize| -> u32 {
            if self.orbit_of[w] == oid {
                base + pos[self.index_in_orbit[w]] as u32
            } else {
                state.slot[w]
            }
        };
        let mut seg = Vec::new();
        for &u in &info.vertices {
            let su = slot_of(u);
            'simplex: for &sid in &self.incident[u] {
                let s = &self.simplices[sid];
                let mut key = Vec::with_capacity(s.len());
                for &w in s {
                    let sw = slot_of(w);
                    if sw == UNPLACED || sw > su {
                        continue 'simplex;
                    }
                    key.push(sw);
                }
                key.sort_unstable_by(|a, b| b.cmp(a));
                seg.push(key);
            }
        }
        seg.sort_unstable();
        seg
    }

    fn is_frontier(&self, state: &State, oid: usize) -> bool {
        let base = self.orbits[oid].vertices[0];
        self.complex.neighbors(base).iter().any(|&w| state.slot[w] != UNPLACED)
    }

    /// Whether exchanging two unplaced orbits (fixing everything else) can
    /// be an equivariant automorphism.
    fn twins(&self, action: &GroupAction, a: usize, b: usize) -> bool {
        let (oa, ob) = (&self.orbits[a], &self.orbits[b]);
        if oa.vertices.len() != ob.vertices.len() {
            return false;
        }
        let base = oa.vertices[0];
        let stab = action.stabilizer(base);
        for &w in &ob.vertices {
            if action.stabilizer(w) != stab {
                continue;
            }
            let mut perm: Vec<usize> = (0..self.complex.vertex_count()).collect();
            for g in action.group().elements() {
                let (x, y) = (action.act(g, base), action.act(g, w));
                perm[x] = y;
                perm[y] = x;
            }
            let ok = oa.vertices.iter().chain(&ob.vertices).all(|&u| {
                self.incident[u].iter().all(|&sid| {
                    let img: Vec<usize> = self.simplices[sid].iter().map(|&v| perm[v]).collect();
                    Simplex::new(img).is_ok_and(|s| self.complex.contains(&s))
                })
            });
            if ok {
                return true;
            }
        }
        false
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    slot: Vec<u32>,
    placed: Vec<bool>,
}

fn segment_cmp(a: &[Vec<u32>], b: &[Vec<u32>]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    // a longer list carries an extra present simplex
    b.len().cmp(&a.len())
}

/// Runs the block-by-block minimization and returns one optimal state.
fn minimize(
    action: &GroupAction,
    prep: &Prepared,
    root: &[usize],
    second: Option<&[usize]>,
) -> Result<(State, usize, SecondRoot)> {
    let nv = prep.complex.vertex_count();
    let root_oid = prep.orbit_of[root[0]];
    let root_rank = prep.orbits[root_oid].rank;
    let second_info = match second {
        None => SecondRoot::None,
        Some(o) if prep.orbit_of[o[0]] == root_oid => SecondRoot::Same,
        Some(o) => SecondRoot::Distinct(prep.orbits[prep.orbit_of[o[0]]].rank),
    };
    let second_oid = match second_info {
        SecondRoot::Distinct(_) => Some(prep.orbit_of[second.unwrap()[0]]),
        _ => None,
    };
    let mut remaining = vec![0usize; prep.catalog.sets.len()];
    for o in &prep.orbits {
        remaining[o.rank] += 1;
    }
    let mut beam = vec![State {
        slot: vec![UNPLACED; nv],
        placed: vec![false; prep.orbits.len()],
    }];
    let mut blocks: Vec<(usize, usize)> = vec![(0, root_rank)];
    let types = prep.catalog.sets.len();
    let mut level = 1;
    let mut left = prep.orbits.len();
    // Root placements modulo the centre: central elements are automorphisms.
    let group = action.group();
    let center = group.center();
    let root_model = &prep.catalog.sets[root_rank];
    let root_points: Vec<usize> = prep.orbits[root_oid]
        .placements
        .iter()
        .map(|p| p[0])
        .collect();
    let root_allowed: Vec<usize> = (0..root_points.len())
        .filter(|&i| {
            let x = root_points[i];
            center.iter().all(|&z| {
                let zx = root_model.act[z][x];
                !root_points.contains(&zx) || zx >= x
            })
        })
        .collect();
    let mut block_idx = 0;
    while left > 0 {
        if block_idx == blocks.len() {
            blocks.extend((0..types).map(|j| (level, j)));
            level += 1;
        }
        let (lvl, j) = blocks[block_idx];
        block_idx += 1;
        let forced = if lvl == 0 {
            Some(root_oid)
        } else if lvl == 1 && second_info == SecondRoot::Distinct(j) {
            second_oid
        } else {
            None
        };
        if forced.is_none() && remaining[j] == 0 {
            continue;
        }
        let base = prep.block_base(lvl, j);
        let mut best: Option<Vec<Vec<u32>>> = None;
        let mut tied: Vec<(usize, usize, usize)> = Vec::new();
        for (si, state) in beam.iter().enumerate() {
            let pool: Vec<usize> = match forced {
                Some(o) => vec![o],
                None => {
                    let unplaced: Vec<usize> = (0..prep.orbits.len())
                        .filter(|&o| !state.placed[o] && prep.orbits[o].rank == j && Some(o) != second_oid)
                        .collect();
                    let frontier: Vec<usize> =
                        unplaced.iter().copied().filter(|&o| prep.is_frontier(state, o)).collect();
                    if frontier.is_empty() {
                        unplaced
                    } else {
                        frontier
                    }
                }
            };
            for &oid in &pool {
                let placements: Vec<usize> = if lvl == 0 {
                    root_allowed.clone()
                } else {
                    (0..prep.orbits[oid].placements.len()).collect()
                };
                for p in placements {
                    let seg = prep.segment(state, oid, p, base);
                    let ord = best.as_ref().map_or(Ordering::Less, |b| segment_cmp(&seg, b));
                    match ord {
                        Ordering::Less => {
                            best = Some(seg);
                            tied.clear();
                            tied.push((si, oid, p));
                        }
                        Ordering::Equal => tied.push((si, oid, p)),
                        Ordering::Greater => {}
                    }
                }
            }
        }
        if tied.is_empty() {
            return Err(Error::InternalInconsistency("no candidate for a nonempty block".into()));
        }
        // twin pruning within each state
        let mut kept: Vec<(usize, usize, usize)> = Vec::new();
        let mut i = 0;
        while i < tied.len() {
            let si = tied[i].0;
            let mut k = i;
            while k < tied.len() && tied[k].0 == si {
                k += 1;
            }
            let mut reps: Vec<usize> = Vec::new();
            let mut dropped: Vec<usize> = Vec::new();
            for &(_, oid, _) in &tied[i..k] {
                if reps.contains(&oid) || dropped.contains(&oid) {
                    continue;
                }
                if reps.iter().any(|&r| prep.twins(action, r, oid)) {
                    dropped.push(oid);
                } else {
                    reps.push(oid);
                }
            }
            kept.extend(tied[i..k].iter().filter(|c| !dropped.contains(&c.1)));
            i = k;
        }
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        let mut next = Vec::new();
        for (si, oid, p) in kept {
            let mut st = beam[si].clone();
            let info = &prep.orbits[oid];
            for (k, &u) in info.vertices.iter().enumerate() {
                st.slot[u] = base + info.placements[p][k] as u32;
            }
            st.placed[oid] = true;
            if seen.insert(st.slot.clone()) {
                next.push(st);
            }
        }
        if next.len() > BEAM_CAP {
            return Err(Error::SizeCapExceeded(next.len(), BEAM_CAP));
        }
        beam = next;
        remaining[j] -= 1;
        left -= 1;
    }
    Ok((beam.swap_remove(0), root_rank, second_info))
}

fn write_code(prep: &Prepared, state: &State, root_rank: usize, second: SecondRoot) -> CanonicalCode {
    let mut facets: Vec<Vec<u32>> = prep
        .complex
        .facets()
        .iter()
        .map(|s| {
            let mut k: Vec<u32> = s.vertices().iter().map(|&v| state.slot[v]).collect();
            k.sort_unstable_by(|a, b| b.cmp(a));
            k
        })
        .collect();
    facets.sort_unstable();
    let mut out = vec![CODE_VERSION];
    let put = |out: &mut Vec<u8>, v: u64| {
        leb128::write::unsigned(out, v).expect("writing to a Vec");
    };
    put(&mut out, root_rank as u64);
    match second {
        SecondRoot::None => out.push(0),
        SecondRoot::Distinct(j) => {
            out.push(1);
            put(&mut out, j as u64);
        }
        SecondRoot::Same => out.push(2),
    }
    put(&mut out, facets.len() as u64);
    for f in facets {
        put(&mut out, f.len() as u64);
        for s in f {
            put(&mut out, s as u64);
        }
    }
    CanonicalCode(out)
}

/// Ψ code of a rooted G-complex.
pub fn canonical_code(rc: &RootedGComplex) -> Result<CanonicalCode> {
    let prep = Prepared::new(&rc.action)?;
    let (state, rank, second) = minimize(&rc.action, &prep, &rc.root, None)?;
    Ok(write_code(&prep, &state, rank, second))
}

/// Ψ code of a doubly rooted G-complex; the second root occupies block
/// (1, type) unless it equals the first.
pub fn doubly_canonical_code(dc: &DoublyRootedGComplex) -> Result<CanonicalCode> {
    let prep = Prepared::new(&dc.action)?;
    let (state, rank, second) = minimize(&dc.action, &prep, &dc.root1, Some(&dc.root2))?;
    Ok(write_code(&prep, &state, rank, second))
}

/// A decoded code: the complex on the used slots of ℕ_G.
pub struct Decoded {
    pub action: GroupAction,
    pub root: Vec<usize>,
    pub second_root: Option<Vec<usize>>,
}

/// Rebuilds the embedded G-complex from a code.
pub fn decode(code: &CanonicalCode, group: &Arc<Group>) -> Result<Decoded> {
    let parsed = code.parse()?;
    let catalog = group.orbit_catalog()?;
    let width = catalog.level_width;
    let bad = |m: &str| Error::MalformedCode(m.to_string());
    if parsed.root_rank >= catalog.sets.len() {
        return Err(bad("root type out of range"));
    }
    let locate = |slot: usize| -> Result<(usize, usize, usize)> {
        let level = slot / width;
        let within = slot % width;
        let j = catalog.offsets.partition_point(|&o| o <= within) - 1;
        Ok((level, j, within - catalog.offsets[j]))
    };
    let slots: BTreeSet<usize> = parsed.facets.iter().flatten().copied().collect();
    let slots: Vec<usize> = slots.into_iter().collect();
    let id = |s: usize| slots.binary_search(&s).ok();
    let facets: Vec<Vec<usize>> = parsed
        .facets
        .iter()
        .map(|f| f.iter().map(|&s| id(s).unwrap()).collect())
        .collect();
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for f in &facets {
        for (i, &a) in f.iter().enumerate() {
            for &b in &f[i + 1..] {
                edges.insert((a.min(b), a.max(b)));
            }
        }
    }
    let mut degree = vec![0usize; slots.len()];
    for &(a, b) in &edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let bound = degree.iter().copied().max().unwrap_or(0).max(DEFAULT_DEGREE_BOUND);
    let complex = Complex::new(slots.len(), &facets, bound)?;
    let mut act = vec![vec![0; slots.len()]; group.order()];
    for (v, &s) in slots.iter().enumerate() {
        let (level, j, x) = locate(s)?;
        for g in group.elements() {
            let img = level * width + catalog.offsets[j] + catalog.sets[j].act[g][x];
            act[g][v] = id(img).ok_or_else(|| bad("slot set is not G-invariant"))?;
        }
    }
    let action = GroupAction::new(group.clone(), complex, act)?;
    let in_block = |level: usize, rank: usize| -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (v, &s) in slots.iter().enumerate() {
            let (l, j, _) = locate(s)?;
            if l == level && j == rank {
                out.push(v);
            }
        }
        Ok(out)
    };
    let root = in_block(0, parsed.root_rank)?;
    if root.is_empty() {
        return Err(bad("no root"));
    }
    let second_root = match parsed.second {
        SecondRoot::None => None,
        SecondRoot::Same => Some(root.clone()),
        SecondRoot::Distinct(j) => Some(in_block(1, j)?),
    };
    Ok(Decoded {
        action,
        root,
        second_root,
    })
}

/// Decodes a singly rooted code.
pub fn decode_rooted(code: &CanonicalCode, group: &Arc<Group>) -> Result<RootedGComplex> {
    let d = decode(code, group)?;
    if d.second_root.is_some() {
        return Err(Error::MalformedCode("code is doubly rooted".into()));
    }
    RootedGComplex::new(d.action, d.root)
}

/// Code of B_r(rc) computed from the code of rc.
pub fn ball_code(code: &CanonicalCode, group: &Arc<Group>, r: usize) -> Result<CanonicalCode> {
    canonical_code(&decode_rooted(code, group)?.ball(r))
}

/// Equivariant isomorphism test by backtracking over orbit assignments.
pub fn rooted_isomorphic(a: &RootedGComplex, b: &RootedGComplex) -> Result<bool> {
    if a.group() != b.group() {
        return Err(Error::GroupMismatch);
    }
    let (ka, kb) = (a.complex(), b.complex());
    if ka.f_vector() != kb.f_vector() || a.root.len() != b.root.len() {
        return Ok(false);
    }
    let aa = a.action();
    let ab = b.action();
    let group = a.group();
    if aa.orbit_type(&a.root)? != ab.orbit_type(&b.root)? {
        return Ok(false);
    }
    let mut sorted_a: Vec<usize> = (0..ka.vertex_count()).map(|v| ka.degree(v)).collect();
    let mut sorted_b: Vec<usize> = (0..kb.vertex_count()).map(|v| kb.degree(v)).collect();
    sorted_a.sort_unstable();
    sorted_b.sort_unstable();
    if sorted_a != sorted_b {
        return Ok(false);
    }
    // orbits of a in order of distance from the root
    let dist = ka.distances_from(&a.root, None);
    let mut orbits_a = aa.orbits();
    orbits_a.sort_by_key(|o| (dist[o[0]].finite().unwrap_or(usize::MAX), o[0]));
    let orbits_b = ab.orbits();
    let dist_b = kb.distances_from(&b.root, None);
    let mut orbit_id_b = vec![0; kb.vertex_count()];
    for (i, o) in orbits_b.iter().enumerate() {
        for &v in o {
            orbit_id_b[v] = i;
        }
    }
    let mut simplices_at: Vec<Vec<Simplex>> = vec![Vec::new(); ka.vertex_count()];
    for n in 1..=ka.dim() {
        for s in ka.simplices(n) {
            for &v in s.vertices() {
                simplices_at[v].push(s.clone());
            }
        }
    }
    struct Search<'s> {
        aa: &'s GroupAction,
        ab: &'s GroupAction,
        group: &'s Group,
        orbits_a: Vec<Vec<usize>>,
        orbits_b: Vec<Vec<usize>>,
        dist_a: Vec<Distance>,
        dist_b: Vec<Distance>,
        simplices_at: Vec<Vec<Simplex>>,
        map: Vec<usize>,
        used_b: Vec<bool>,
    }
    impl Search<'_> {
        fn go(&mut self, i: usize) -> bool {
            if i == self.orbits_a.len() {
                return true;
            }
            let orbit = self.orbits_a[i].clone();
            let base = orbit[0];
            let stab = self.aa.stabilizer(base);
            for ob in 0..self.orbits_b.len() {
                if self.used_b[ob] || self.orbits_b[ob].len() != orbit.len() {
                    continue;
                }
                if (i == 0) != (ob == 0) {
                    continue;
                }
                let cands = self.orbits_b[ob].clone();
                for w in cands {
                    if self.ab.stabilizer(w) != stab
                        || self.ab.complex().degree(w) != self.aa.complex().degree(base)
                        || self.dist_b[w] != self.dist_a[base]
                    {
                        continue;
                    }
                    for g in self.group.elements() {
                        self.map[self.aa.act(g, base)] = self.ab.act(g, w);
                    }
                    let ok = orbit.iter().all(|&u| {
                        self.simplices_at[u].iter().all(|s| {
                            if s.vertices().iter().any(|&v| self.map[v] == usize::MAX) {
                                return true;
                            }
                            let img: Vec<usize> = s.vertices().iter().map(|&v| self.map[v]).collect();
                            Simplex::new(img).is_ok_and(|t| self.ab.complex().contains(&t))
                        })
                    });
                    if ok {
                        self.used_b[ob] = true;
                        if self.go(i + 1) {
                            return true;
                        }
                        self.used_b[ob] = false;
                    }
                    for &u in &orbit {
                        self.map[u] = usize::MAX;
                    }
                }
            }
            false
        }
    }
    // the root orbit of b must come first
    let root_b = orbit_id_b[b.root[0]];
    let mut orbits_b_ordered = vec![orbits_b[root_b].clone()];
    orbits_b_ordered.extend(orbits_b.iter().enumerate().filter(|(i, _)| *i != root_b).map(|(_, o)| o.clone()));
    let mut search = Search {
        aa,
        ab,
        group,
        orbits_a,
        orbits_b: orbits_b_ordered,
        dist_a: dist,
        dist_b,
        simplices_at,
        map: vec![usize::MAX; ka.vertex_count()],
        used_b: vec![false; orbits_b.len()],
    };
    Ok(search.go(0))
}

/// Outcome of comparing balls around two roots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootedDistance {
    /// Even the radius-0 balls differ.
    Infinite,
    /// Balls agree up to this radius and differ beyond it.
    Exact(usize),
    /// Balls agree at every radius up to the cutoff.
    AtLeast(usize),
}

impl RootedDistance {
    /// d = 2^{−r}, or ∞; the cutoff bound for `AtLeast`.
    pub fn value(&self) -> f64 {
        match self {
            RootedDistance::Infinite => f64::INFINITY,
            RootedDistance::Exact(r) | RootedDistance::AtLeast(r) => 0.5f64.powi(*r as i32),
        }
    }

    /// Agreement radius; `None` for infinite distance.
    pub fn exponent(&self) -> Option<usize> {
        match self {
            RootedDistance::Infinite => None,
            RootedDistance::Exact(r) | RootedDistance::AtLeast(r) => Some(*r),
        }
    }
}

/// Largest r ≤ `r_max` with isomorphic radius-r balls.
pub fn rooted_distance(a: &RootedGComplex, b: &RootedGComplex, r_max: usize) -> Result<RootedDistance> {
    if a.group() != b.group() {
        return Err(Error::GroupMismatch);
    }
    let (ra, rb) = (a.radius(), b.radius());
    for r in 0..=r_max {
        if canonical_code(&a.ball(r))? != canonical_code(&b.ball(r))? {
            return Ok(if r == 0 {
                RootedDistance::Infinite
            } else {
                RootedDistance::Exact(r - 1)
            });
        }
        if r >= ra && r >= rb {
            break;
        }
    }
    Ok(RootedDistance::AtLeast(r_max))
}
