//! Finite groups given by multiplication tables, a small exact catalog, and
//! subgroup machinery (transitive G-sets, embeddings, coset representatives).

mod action;
mod characters;

pub use action::{isotypic_projection, signed_permutation, ActionFile, GroupAction};
pub use characters::{restriction_multiplicities, CharacterTable, CharacterTableFile};

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest group order for which subgroups are enumerated exhaustively.
pub const MAX_SUBGROUP_SEARCH: usize = 48;

/// Groups with a built-in exact character table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CatalogGroup {
    Cyclic(usize),
    /// Symmetries of an n-gon, of order 2n.
    Dihedral(usize),
    Symmetric(usize),
    Klein4,
    Quaternion8,
}

impl fmt::Display for CatalogGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogGroup::Cyclic(n) => write!(f, "cyclic:{n}"),
            CatalogGroup::Dihedral(n) => write!(f, "dihedral:{n}"),
            CatalogGroup::Symmetric(n) => write!(f, "symmetric:{n}"),
            CatalogGroup::Klein4 => write!(f, "klein4"),
            CatalogGroup::Quaternion8 => write!(f, "quaternion8"),
        }
    }
}

impl FromStr for CatalogGroup {
    type Err = Error;

    /// Accepts `cyclic:3`, `cyclic 3`, `C3`, `dihedral:4`, `D4`, `S3`,
    /// `klein4`, `V4`, `quaternion8`, `Q8` and `trivial`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        match lower.as_str() {
            "trivial" | "1" => return Ok(CatalogGroup::Cyclic(1)),
            "klein4" | "v4" | "klein" => return Ok(CatalogGroup::Klein4),
            "quaternion8" | "q8" | "quaternion" => return Ok(CatalogGroup::Quaternion8),
            _ => {}
        }
        let bad = || Error::Parse(format!("unknown group `{s}`"));
        let (name, param) = if let Some((a, b)) = lower.split_once([':', ' ']) {
            (a.to_string(), b.trim().to_string())
        } else {
            let split = lower.find(|c: char| c.is_ascii_digit()).ok_or_else(bad)?;
            (lower[..split].to_string(), lower[split..].to_string())
        };
        let n: usize = param.parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        match name.as_str() {
            "c" | "cyclic" | "z" => Ok(CatalogGroup::Cyclic(n)),
            "d" | "dihedral" => Ok(CatalogGroup::Dihedral(n)),
            "s" | "symmetric" if n <= 4 => Ok(CatalogGroup::Symmetric(n)),
            _ => Err(bad()),
        }
    }
}

/// A finite group given by its multiplication table.
pub struct Group {
    order: usize,
    mul: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
    exponent: usize,
    catalog: Option<CatalogGroup>,
    supplied_table: Option<CharacterTableFile>,
    orbit_catalog: OnceLock<Arc<OrbitCatalog>>,
    table_cache: OnceLock<Result<Arc<CharacterTable>>>,
}

impl Clone for Group {
    fn clone(&self) -> Self {
        Group {
            order: self.order,
            mul: self.mul.clone(),
            identity: self.identity,
            inverse: self.inverse.clone(),
            exponent: self.exponent,
            catalog: self.catalog,
            supplied_table: self.supplied_table.clone(),
            orbit_catalog: OnceLock::new(),
            table_cache: OnceLock::new(),
        }
    }
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.mul == other.mul
    }
}

impl Eq for Group {}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.catalog {
            Some(c) => write!(f, "Group({c})"),
            None => write!(f, "Group(order {})", self.order),
        }
    }
}

/// On-disk group description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupFile {
    pub order: usize,
    pub mul_table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub character_table: Option<CharacterTableFile>,
}

fn gcd(a: usize, b: usize) -> usize {
    num_integer::gcd(a, b)
}

impl Group {
    /// Validates a multiplication table (`table[a][b]` = index of a·b).
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::NotAGroup("empty table".into()));
        }
        if table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::NotAGroup("table is not square with entries in range".into()));
        }
        let mul: Vec<usize> = table.into_iter().flatten().collect();
        let m = |a: usize, b: usize| mul[a * n + b];
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| m(e, a) == a && m(a, e) == a))
            .ok_or_else(|| Error::NotAGroup("no identity element".into()))?;
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n)
                .find(|&b| m(a, b) == identity && m(b, a) == identity)
                .ok_or_else(|| Error::NotAGroup(format!("element {a} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = m(a, b);
                for c in 0..n {
                    if m(ab, c) != m(a, m(b, c)) {
                        return Err(Error::NotAGroup(format!("({a}·{b})·{c} ≠ {a}·({b}·{c})")));
                    }
                }
            }
        }
        let mut g = Group {
            order: n,
            mul,
            identity,
            inverse,
            exponent: 1,
            catalog: None,
            supplied_table: None,
            orbit_catalog: OnceLock::new(),
            table_cache: OnceLock::new(),
        };
        g.exponent = (0..n).fold(1, |acc, a| {
            let o = g.element_order(a);
            acc / gcd(acc, o) * o
        });
        Ok(g)
    }

    pub fn from_file(file: &GroupFile) -> Result<Self> {
        if file.mul_table.len() != file.order {
            return Err(Error::NotAGroup(format!(
                "order {} but table has {} rows",
                file.order,
                file.mul_table.len()
            )));
        }
        let mut g = Self::from_table(file.mul_table.clone())?;
        if let Some(t) = &file.character_table {
            g.supplied_table = Some(t.clone());
            // validate eagerly so bad files fail at load time
            CharacterTable::for_group(&g)?;
        }
        Ok(g)
    }

    pub fn to_file(&self) -> GroupFile {
        GroupFile {
            order: self.order,
            mul_table: (0..self.order)
                .map(|a| (0..self.order).map(|b| self.mul(a, b)).collect())
                .collect(),
            character_table: self.supplied_table.clone(),
        }
    }

    /// A catalog group with its fixed element numbering (identity is 0).
    pub fn catalog(which: CatalogGroup) -> Result<Self> {
        let table = catalog_table(which)?;
        let mut g = Self::from_table(table)?;
        g.catalog = Some(which);
        Ok(g)
    }

    pub fn trivial() -> Self {
        Self::catalog(CatalogGroup::Cyclic(1)).expect("trivial group")
    }

    pub fn catalog_kind(&self) -> Option<CatalogGroup> {
        self.catalog
    }

    pub(crate) fn supplied_table(&self) -> Option<&CharacterTableFile> {
        self.supplied_table.as_ref()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn exponent(&self) -> usize {
        self.exponent
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn conjugate(&self, c: usize, x: usize) -> usize {
        self.mul(self.mul(c, x), self.inv(c))
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Elements commuting with everything.
    pub fn center(&self) -> Vec<usize> {
        (0..self.order)
            .filter(|&z| (0..self.order).all(|a| self.mul(z, a) == self.mul(a, z)))
            .collect()
    }

    /// Conjugacy classes, each sorted, ordered by smallest element.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order];
        let mut classes = Vec::new();
        for a in 0..self.order {
            if seen[a] {
                continue;
            }
            let class: BTreeSet<usize> = (0..self.order).map(|c| self.conjugate(c, a)).collect();
            for &x in &class {
                seen[x] = true;
            }
            classes.push(class.into_iter().collect());
        }
        classes
    }

    /// Whether `elements` is closed under products and inverses.
    pub fn is_subgroup(&self, elements: &[usize]) -> bool {
        if elements.is_empty() || elements.iter().any(|&x| x >= self.order) {
            return false;
        }
        let set: BTreeSet<usize> = elements.iter().copied().collect();
        set.iter().all(|&a| set.contains(&self.inv(a)) && set.iter().all(|&b| set.contains(&self.mul(a, b))))
    }

    /// Smallest subgroup containing `generators`.
    pub fn closure(&self, generators: &[usize]) -> Vec<usize> {
        let mut set: BTreeSet<usize> = BTreeSet::new();
        set.insert(self.identity);
        let mut frontier: Vec<usize> = generators.to_vec();
        while let Some(x) = frontier.pop() {
            if !set.insert(x) {
                continue;
            }
            let current: Vec<usize> = set.iter().copied().collect();
            for y in current {
                for z in [self.mul(x, y), self.mul(y, x)] {
                    if !set.contains(&z) {
                        frontier.push(z);
                    }
                }
            }
        }
        set.into_iter().collect()
    }

    fn mask(&self, elements: &[usize]) -> u64 {
        elements.iter().fold(0u64, |m, &x| m | (1 << x))
    }

    fn unmask(mask: u64) -> Vec<usize> {
        (0..64).filter(|i| mask >> i & 1 == 1).collect()
    }

    /// All subgroups, each as a sorted element list.
    pub fn subgroups(&self) -> Result<Vec<Vec<usize>>> {
        if self.order > MAX_SUBGROUP_SEARCH {
            return Err(Error::GroupTooLarge(self.order));
        }
        let mut found: BTreeSet<u64> = BTreeSet::new();
        let trivial = vec![self.identity];
        found.insert(self.mask(&trivial));
        let mut queue = vec![trivial];
        while let Some(s) = queue.pop() {
            let smask = self.mask(&s);
            for g in 0..self.order {
                if smask >> g & 1 == 1 {
                    continue;
                }
                let mut gens = s.clone();
                gens.push(g);
                let t = self.closure(&gens);
                if found.insert(self.mask(&t)) {
                    queue.push(t);
                }
            }
        }
        Ok(found.into_iter().map(Self::unmask).collect())
    }

    /// Exact character table (catalog or supplied), cached.
    pub fn character_table(&self) -> Result<Arc<CharacterTable>> {
        self.table_cache
            .get_or_init(|| CharacterTable::for_group(self).map(Arc::new))
            .clone()
    }

    /// Cached classification of transitive G-sets.
    pub fn orbit_catalog(&self) -> Result<Arc<OrbitCatalog>> {
        if let Some(c) = self.orbit_catalog.get() {
            return Ok(c.clone());
        }
        let built = Arc::new(OrbitCatalog::build(self)?);
        Ok(self.orbit_catalog.get_or_init(|| built).clone())
    }

    /// Orb(G): one orbit type per conjugacy class of subgroups.
    pub fn transitive_gsets(&self) -> Result<Vec<OrbitType>> {
        Ok(self
            .orbit_catalog()?
            .sets
            .iter()
            .map(|s| s.orbit_type.clone())
            .collect())
    }
}

/// Isomorphism type of a transitive G-set, named by a stabilizer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrbitType {
    /// Lexicographically minimal representative of the stabilizer class.
    pub stabilizer: Vec<usize>,
    /// |G| / |stabilizer|.
    pub index: usize,
    /// Position within Orb(G).
    pub rank: usize,
}

/// A concrete model G/S of a transitive G-set.
#[derive(Clone, Debug)]
pub struct TransitiveGSet {
    pub orbit_type: OrbitType,
    /// Left cosets gS, ordered by their smallest element.
    pub cosets: Vec<Vec<usize>>,
    /// `act[g][x]`: image of point x under g.
    pub act: Vec<Vec<usize>>,
    /// Stabilizer bitmask of each point.
    pub point_stabilizers: Vec<u64>,
}

/// Orb(G) together with concrete models and lookup of stabilizer classes.
#[derive(Clone, Debug)]
pub struct OrbitCatalog {
    pub sets: Vec<TransitiveGSet>,
    /// Maps every subgroup (as a bitmask) to the rank of its conjugacy class.
    class_of: HashMap<u64, usize>,
    /// Starting position of each model inside one level of ℕ_G.
    pub offsets: Vec<usize>,
    /// Number of points in one level of ℕ_G.
    pub level_width: usize,
}

impl OrbitCatalog {
    fn build(g: &Group) -> Result<Self> {
        let subgroups = g.subgroups()?;
        let mut classes: Vec<(usize, Vec<usize>, Vec<u64>)> = Vec::new();
        let mut seen: BTreeSet<u64> = BTreeSet::new();
        for s in &subgroups {
            let m = g.mask(s);
            if seen.contains(&m) {
                continue;
            }
            let conjugates: BTreeSet<Vec<usize>> = (0..g.order)
                .map(|c| {
                    let mut v: Vec<usize> = s.iter().map(|&x| g.conjugate(c, x)).collect();
                    v.sort_unstable();
                    v
                })
                .collect();
            let masks: Vec<u64> = conjugates.iter().map(|v| g.mask(v)).collect();
            seen.extend(masks.iter().copied());
            let rep = conjugates.into_iter().next().unwrap();
            classes.push((g.order / s.len(), rep, masks));
        }
        classes.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        let mut class_of = HashMap::new();
        let mut sets = Vec::new();
        let mut offsets = Vec::new();
        let mut width = 0;
        for (rank, (index, rep, masks)) in classes.into_iter().enumerate() {
            for m in masks {
                class_of.insert(m, rank);
            }
            let rep_mask = g.mask(&rep);
            let mut cosets: Vec<Vec<usize>> = Vec::new();
            let mut covered = 0u64;
            for a in 0..g.order {
                if covered >> a & 1 == 1 {
                    continue;
                }
                let mut c: Vec<usize> = rep.iter().map(|&s| g.mul(a, s)).collect();
                c.sort_unstable();
                covered |= g.mask(&c);
                cosets.push(c);
            }
            cosets.sort();
            let coset_of = |x: usize| cosets.iter().position(|c| c.binary_search(&x).is_ok()).unwrap();
            let act: Vec<Vec<usize>> = (0..g.order)
                .map(|h| cosets.iter().map(|c| coset_of(g.mul(h, c[0]))).collect())
                .collect();
            let point_stabilizers = cosets
                .iter()
                .map(|c| {
                    // Stab(cS) = c S c^{-1}
                    let stab: Vec<usize> = rep.iter().map(|&s| g.conjugate(c[0], s)).collect();
                    g.mask(&stab)
                })
                .collect();
            debug_assert_eq!(cosets.len(), index);
            let _ = rep_mask;
            offsets.push(width);
            width += index;
            sets.push(TransitiveGSet {
                orbit_type: OrbitType {
                    stabilizer: rep,
                    index,
                    rank,
                },
                cosets,
                act,
                point_stabilizers,
            });
        }
        Ok(OrbitCatalog {
            sets,
            class_of,
            offsets,
            level_width: width,
        })
    }

    /// Rank of the orbit type whose stabilizers are conjugate to `stabilizer`.
    pub fn rank_of(&self, stabilizer_mask: u64) -> Option<usize> {
        self.class_of.get(&stabilizer_mask).copied()
    }
}

pub(crate) fn mask_of(elements: &[usize]) -> u64 {
    elements.iter().fold(0u64, |m, &x| m | (1 << x))
}

/// A subgroup H ≤ G, given as an injective homomorphism from a group with
/// its own table, plus left coset representatives.
#[derive(Clone, Debug)]
pub struct SubgroupEmbedding {
    ambient: Arc<Group>,
    sub: Arc<Group>,
    map: Vec<usize>,
    elements: Vec<usize>,
    coset_reps: Vec<usize>,
    /// Ambient element → sub element, where defined.
    preimage: HashMap<usize, usize>,
}

impl SubgroupEmbedding {
    /// `map[h]` is the image of sub element `h` in the ambient group.
    pub fn new(ambient: Arc<Group>, sub: Arc<Group>, map: Vec<usize>) -> Result<Self> {
        if map.len() != sub.order() {
            return Err(Error::InvalidEmbedding("map length differs from subgroup order".into()));
        }
        if map.iter().any(|&x| x >= ambient.order()) {
            return Err(Error::InvalidEmbedding("image out of range".into()));
        }
        let distinct: BTreeSet<usize> = map.iter().copied().collect();
        if distinct.len() != map.len() {
            return Err(Error::InvalidEmbedding("map is not injective".into()));
        }
        for a in 0..sub.order() {
            for b in 0..sub.order() {
                if map[sub.mul(a, b)] != ambient.mul(map[a], map[b]) {
                    return Err(Error::InvalidEmbedding("map is not a homomorphism".into()));
                }
            }
        }
        let elements: Vec<usize> = distinct.into_iter().collect();
        let mut coset_reps = Vec::new();
        let mut covered: BTreeSet<usize> = BTreeSet::new();
        // The coset H itself is represented by the identity.
        let mut candidates: Vec<usize> = vec![ambient.identity()];
        candidates.extend((0..ambient.order()).filter(|&g| g != ambient.identity()));
        for g in candidates {
            if covered.contains(&g) {
                continue;
            }
            coset_reps.push(g);
            for &h in &elements {
                covered.insert(ambient.mul(g, h));
            }
        }
        let preimage = map.iter().enumerate().map(|(h, &g)| (g, h)).collect();
        Ok(SubgroupEmbedding {
            ambient,
            sub,
            map,
            elements,
            coset_reps,
            preimage,
        })
    }

    /// The whole group as a subgroup of itself.
    pub fn identity(group: Arc<Group>) -> Self {
        let map = (0..group.order()).collect();
        Self::new(group.clone(), group, map).expect("identity embedding")
    }

    /// The trivial subgroup.
    pub fn trivial(ambient: Arc<Group>) -> Self {
        let id = ambient.identity();
        Self::new(ambient, Arc::new(Group::trivial()), vec![id]).expect("trivial embedding")
    }

    /// Embeds `sub` into `ambient`, choosing the first subgroup (in the
    /// deterministic subgroup order) isomorphic to it.
    pub fn find(ambient: Arc<Group>, sub: Arc<Group>) -> Result<Self> {
        for s in ambient.subgroups()? {
            if s.len() != sub.order() {
                continue;
            }
            if let Some(map) = find_isomorphism(&sub, &ambient, &s) {
                return Self::new(ambient, sub, map);
            }
        }
        Err(Error::InvalidEmbedding(format!("{sub:?} is not a subgroup of {ambient:?}")))
    }

    /// Recognizes an element subset as a catalog group and embeds it.
    pub fn from_elements(ambient: Arc<Group>, elements: &[usize]) -> Result<Self> {
        if !ambient.is_subgroup(elements) {
            return Err(Error::NotASubgroup);
        }
        let mut sorted = elements.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for cand in catalog_candidates(sorted.len()) {
            let sub = Group::catalog(cand)?;
            if let Some(map) = find_isomorphism(&sub, &ambient, &sorted) {
                return Self::new(ambient, Arc::new(sub), map);
            }
        }
        Err(Error::TableUnavailable)
    }

    pub fn ambient(&self) -> &Arc<Group> {
        &self.ambient
    }

    pub fn sub(&self) -> &Arc<Group> {
        &self.sub
    }

    /// Sub element → ambient element.
    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// Ambient indices of the subgroup, sorted.
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn contains(&self, g: usize) -> bool {
        self.preimage.contains_key(&g)
    }

    /// Ambient element → sub element.
    pub fn preimage(&self, g: usize) -> Option<usize> {
        self.preimage.get(&g).copied()
    }

    pub fn coset_reps(&self) -> &[usize] {
        &self.coset_reps
    }

    pub fn index(&self) -> usize {
        self.coset_reps.len()
    }

    /// Writes g = rep·h; returns (position of rep, h as a sub element).
    pub fn decompose(&self, g: usize) -> (usize, usize) {
        for (i, &rep) in self.coset_reps.iter().enumerate() {
            let h = self.ambient.mul(self.ambient.inv(rep), g);
            if let Some(hs) = self.preimage(h) {
                return (i, hs);
            }
        }
        unreachable!("coset representatives cover the group")
    }
}

fn catalog_candidates(order: usize) -> Vec<CatalogGroup> {
    let mut c = vec![CatalogGroup::Cyclic(order)];
    if order % 2 == 0 && order >= 2 {
        c.push(CatalogGroup::Dihedral(order / 2));
    }
    match order {
        4 => c.push(CatalogGroup::Klein4),
        6 => c.push(CatalogGroup::Symmetric(3)),
        8 => c.push(CatalogGroup::Quaternion8),
        24 => c.push(CatalogGroup::Symmetric(4)),
        _ => {}
    }
    c
}

/// Finds an isomorphism from `src` onto the subgroup `target` of `dst`.
fn find_isomorphism(src: &Group, dst: &Group, target: &[usize]) -> Option<Vec<usize>> {
    if src.order() != target.len() {
        return None;
    }
    // Greedy generating set of src.
    let mut gens = Vec::new();
    let mut span = vec![src.identity()];
    for a in 0..src.order() {
        if span.binary_search(&a).is_err() {
            gens.push(a);
            span = src.closure(&gens);
        }
        if span.len() == src.order() {
            break;
        }
    }
    let mut choice = vec![0usize; gens.len()];
    loop {
        let images: Vec<usize> = choice.iter().map(|&i| target[i]).collect();
        if gens
            .iter()
            .zip(&images)
            .all(|(&g, &im)| src.element_order(g) == dst.element_order(im))
        {
            if let Some(map) = extend_hom(src, dst, &gens, &images) {
                let imgs: BTreeSet<usize> = map.iter().copied().collect();
                if imgs.len() == src.order() && imgs.iter().all(|x| target.binary_search(x).is_ok()) {
                    return Some(map);
                }
            }
        }
        // next tuple
        let mut i = 0;
        loop {
            if i == choice.len() {
                return None;
            }
            choice[i] += 1;
            if choice[i] < target.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if gens.is_empty() {
            return None;
        }
    }
}

fn extend_hom(src: &Group, dst: &Group, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
    let mut map: Vec<Option<usize>> = vec![None; src.order()];
    map[src.identity()] = Some(dst.identity());
    let mut queue = vec![src.identity()];
    while let Some(x) = queue.pop() {
        let fx = map[x].unwrap();
        for (&g, &fg) in gens.iter().zip(images) {
            let y = src.mul(x, g);
            let fy = dst.mul(fx, fg);
            match map[y] {
                Some(v) if v != fy => return None,
                Some(_) => {}
                None => {
                    map[y] = Some(fy);
                    queue.push(y);
                }
            }
        }
    }
    let map: Vec<usize> = map.into_iter().collect::<Option<_>>()?;
    for a in 0..src.order() {
        for b in 0..src.order() {
            if map[src.mul(a, b)] != dst.mul(map[a], map[b]) {
                return None;
            }
        }
    }
    Some(map)
}

fn catalog_table(which: CatalogGroup) -> Result<Vec<Vec<usize>>> {
    Ok(match which {
        CatalogGroup::Cyclic(n) if n >= 1 => (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect(),
        CatalogGroup::Dihedral(n) if n >= 1 => {
            // 0..n: r^k, n..2n: s r^k, with r s = s r^{-1}.
            let enc = |refl: bool, k: usize| if refl { n + k } else { k };
            (0..2 * n)
                .map(|a| {
                    (0..2 * n)
                        .map(|b| {
                            let (sa, ka) = (a >= n, a % n);
                            let (sb, kb) = (b >= n, b % n);
                            match (sa, sb) {
                                (false, false) => enc(false, (ka + kb) % n),
                                (false, true) => enc(true, (kb + n - ka) % n),
                                (true, false) => enc(true, (ka + kb) % n),
                                (true, true) => enc(false, (kb + n - ka) % n),
                            }
                        })
                        .collect()
                })
                .collect()
        }
        CatalogGroup::Symmetric(n) if (1..=4).contains(&n) => {
            let perms = permutations(n);
            let pos = |p: &Vec<usize>| perms.iter().position(|q| q == p).unwrap();
            perms
                .iter()
                .map(|p| {
                    perms
                        .iter()
                        .map(|q| pos(&(0..n).map(|i| p[q[i]]).collect()))
                        .collect()
                })
                .collect()
        }
        CatalogGroup::Klein4 => (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect(),
        CatalogGroup::Quaternion8 => {
            // index = 2*unit + sign, units 1, i, j, k
            const UNIT: [[(usize, bool); 4]; 4] = [
                [(0, false), (1, false), (2, false), (3, false)],
                [(1, false), (0, true), (3, false), (2, true)],
                [(2, false), (3, true), (0, true), (1, false)],
                [(3, false), (2, false), (1, true), (0, true)],
            ];
            (0..8)
                .map(|a| {
                    (0..8)
                        .map(|b| {
                            let (u, neg) = UNIT[a / 2][b / 2];
                            let sign = (a % 2 == 1) ^ (b % 2 == 1) ^ neg;
                            2 * u + usize::from(sign)
                        })
                        .collect()
                })
                .collect()
        }
        other => return Err(Error::Parse(format!("catalog group {other} unsupported"))),
    })
}

/// Permutations of 0..n in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_orders_and_exponents() {
        let cases = [
            (CatalogGroup::Cyclic(3), 3, 3),
            (CatalogGroup::Symmetric(3), 6, 6),
            (CatalogGroup::Symmetric(4), 24, 12),
            (CatalogGroup::Dihedral(4), 8, 4),
            (CatalogGroup::Dihedral(5), 10, 10),
            (CatalogGroup::Klein4, 4, 2),
            (CatalogGroup::Quaternion8, 8, 4),
            (CatalogGroup::Cyclic(1), 1, 1),
        ];
        for (c, order, exp) in cases {
            let g = Group::catalog(c).unwrap();
            assert_eq!(g.order(), order, "{c}");
            assert_eq!(g.exponent(), exp, "{c}");
            assert_eq!(g.identity(), 0);
        }
        assert!(!Group::catalog(CatalogGroup::Quaternion8).unwrap().is_abelian());
        assert_eq!(Group::catalog(CatalogGroup::Quaternion8).unwrap().center(), vec![0, 1]);
    }

    #[test]
    fn parsing_names() {
        assert_eq!("C3".parse::<CatalogGroup>().unwrap(), CatalogGroup::Cyclic(3));
        assert_eq!("cyclic:12".parse::<CatalogGroup>().unwrap(), CatalogGroup::Cyclic(12));
        assert_eq!("S3".parse::<CatalogGroup>().unwrap(), CatalogGroup::Symmetric(3));
        assert_eq!("trivial".parse::<CatalogGroup>().unwrap(), CatalogGroup::Cyclic(1));
        assert_eq!("Q8".parse::<CatalogGroup>().unwrap(), CatalogGroup::Quaternion8);
        assert!("S5".parse::<CatalogGroup>().is_err());
        assert!("foo".parse::<CatalogGroup>().is_err());
    }

    #[test]
    fn non_associative_table_rejected() {
        // Latin square with identity 0 that is not associative.
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(Group::from_table(t), Err(Error::NotAGroup(_))));
    }

    #[test]
    fn transitive_gset_counts() {
        let count = |c| Group::catalog(c).unwrap().transitive_gsets().unwrap().len();
        assert_eq!(count(CatalogGroup::Cyclic(1)), 1);
        assert_eq!(count(CatalogGroup::Cyclic(3)), 2);
        assert_eq!(count(CatalogGroup::Symmetric(3)), 4);
        assert_eq!(count(CatalogGroup::Symmetric(4)), 11);
        assert_eq!(count(CatalogGroup::Quaternion8), 6);
        let s3 = Group::catalog(CatalogGroup::Symmetric(3)).unwrap();
        let types = s3.transitive_gsets().unwrap();
        let indices: Vec<usize> = types.iter().map(|t| t.index).collect();
        assert_eq!(indices, vec![1, 2, 3, 6]);
        assert_eq!(types[0].stabilizer.len(), 6);
        assert_eq!(types[3].stabilizer, vec![0]);
    }

    #[test]
    fn embeddings_and_cosets() {
        let s3 = Arc::new(Group::catalog(CatalogGroup::Symmetric(3)).unwrap());
        let c3 = Arc::new(Group::catalog(CatalogGroup::Cyclic(3)).unwrap());
        let emb = SubgroupEmbedding::find(s3.clone(), c3).unwrap();
        assert_eq!(emb.index(), 2);
        assert_eq!(emb.coset_reps()[0], 0);
        for g in 0..6 {
            let (i, h) = emb.decompose(g);
            assert_eq!(s3.mul(emb.coset_reps()[i], emb.map()[h]), g);
        }
        let rec = SubgroupEmbedding::from_elements(s3.clone(), emb.elements()).unwrap();
        assert_eq!(rec.sub().catalog_kind(), Some(CatalogGroup::Cyclic(3)));
        assert_eq!(
            SubgroupEmbedding::from_elements(s3, &[0, 1, 2]).unwrap_err(),
            Error::NotASubgroup
        );
    }
}
