//! Simplicial group actions, orbits, and isotypic projections.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{mask_of, CharacterTable, Group, OrbitType};
use crate::complex::{sort_sign, Ball, Complex, Simplex};
use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, SparseMatrix};

/// A finite group acting on a complex by simplicial automorphisms.
#[derive(Clone, Debug)]
pub struct GroupAction {
    group: Arc<Group>,
    complex: Complex,
    act: Vec<Vec<usize>>,
}

/// On-disk action: references to a group and a complex plus the table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ActionFile {
    pub group_ref: String,
    pub complex_ref: String,
    pub act_table: Vec<Vec<usize>>,
}

impl GroupAction {
    /// `act[g][v]` is the image of vertex v under g.
    pub fn new(group: Arc<Group>, complex: Complex, act: Vec<Vec<usize>>) -> Result<Self> {
        let nv = complex.vertex_count();
        if act.len() != group.order() {
            return Err(Error::InvalidAction(format!(
                "{} rows for a group of order {}",
                act.len(),
                group.order()
            )));
        }
        for (g, row) in act.iter().enumerate() {
            if row.len() != nv {
                return Err(Error::InvalidAction(format!("row {g} has wrong length")));
            }
            let mut seen = vec![false; nv];
            for &w in row {
                if w >= nv || std::mem::replace(&mut seen[w], true) {
                    return Err(Error::InvalidAction(format!("row {g} is not a permutation")));
                }
            }
        }
        if act[group.identity()].iter().enumerate().any(|(v, &w)| v != w) {
            return Err(Error::InvalidAction("identity acts nontrivially".into()));
        }
        for g in group.elements() {
            for h in group.elements() {
                let gh = group.mul(g, h);
                if (0..nv).any(|v| act[g][act[h][v]] != act[gh][v]) {
                    return Err(Error::InvalidAction(format!("g{g}·(g{h}·v) ≠ (g{g}g{h})·v")));
                }
            }
        }
        let action = GroupAction { group, complex, act };
        for g in action.group.elements() {
            for n in 1..=action.complex.dim() {
                for s in action.complex.simplices(n) {
                    if !action.complex.contains(&action.image(g, s).0) {
                        return Err(Error::InvalidAction(format!("g{g} does not map {s:?} to a simplex")));
                    }
                }
            }
        }
        Ok(action)
    }

    /// The trivial group acting on `complex`.
    pub fn trivial(complex: Complex) -> Self {
        let act = vec![(0..complex.vertex_count()).collect()];
        GroupAction {
            group: Arc::new(Group::trivial()),
            complex,
            act,
        }
    }

    /// Every group element acting as the identity.
    pub fn fixed(group: Arc<Group>, complex: Complex) -> Self {
        let act = vec![(0..complex.vertex_count()).collect(); group.order()];
        GroupAction { group, complex, act }
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn act(&self, g: usize, v: usize) -> usize {
        self.act[g][v]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.act
    }

    /// g·s with its orientation sign relative to the ascending order.
    pub fn image(&self, g: usize, s: &Simplex) -> (Simplex, i64) {
        let seq: Vec<usize> = s.vertices().iter().map(|&v| self.act[g][v]).collect();
        let sign = sort_sign(&seq);
        let mut sorted = seq;
        sorted.sort_unstable();
        (Simplex::from_sorted(sorted), sign)
    }

    pub fn orbit_of(&self, v: usize) -> Vec<usize> {
        let mut o: Vec<usize> = self.act.iter().map(|row| row[v]).collect();
        o.sort_unstable();
        o.dedup();
        o
    }

    /// Vertex orbits, each sorted, ordered by smallest vertex.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.complex.vertex_count()];
        let mut out = Vec::new();
        for v in 0..self.complex.vertex_count() {
            if !seen[v] {
                let o = self.orbit_of(v);
                for &w in &o {
                    seen[w] = true;
                }
                out.push(o);
            }
        }
        out
    }

    pub fn stabilizer(&self, v: usize) -> Vec<usize> {
        self.group.elements().filter(|&g| self.act[g][v] == v).collect()
    }

    /// Isomorphism type of the orbit containing `orbit[0]`.
    pub fn orbit_type(&self, orbit: &[usize]) -> Result<OrbitType> {
        let v = *orbit.first().ok_or(Error::EmptySimplex)?;
        if v >= self.complex.vertex_count() {
            return Err(Error::VertexOutOfRange(v));
        }
        let cat = self.group.orbit_catalog()?;
        let rank = cat
            .rank_of(mask_of(&self.stabilizer(v)))
            .ok_or_else(|| Error::InternalInconsistency("stabilizer not in subgroup list".into()))?;
        Ok(cat.sets[rank].orbit_type.clone())
    }

    /// Restriction to a G-invariant vertex set, relabeled order-preservingly.
    pub fn restrict(&self, keep: &[bool]) -> (GroupAction, Ball) {
        let ball = self.complex.induced_subcomplex(keep);
        let act = self
            .act
            .iter()
            .map(|row| {
                ball.new_to_old
                    .iter()
                    .map(|&v| ball.old_to_new[row[v]].expect("vertex set is G-invariant"))
                    .collect()
            })
            .collect();
        let restricted = GroupAction {
            group: self.group.clone(),
            complex: ball.complex.clone(),
            act,
        };
        (restricted, ball)
    }

    /// The same action transported along a vertex bijection `perm[old] = new`.
    pub fn relabel(&self, perm: &[usize]) -> Result<GroupAction> {
        let n = self.complex.vertex_count();
        let facets: Vec<Vec<usize>> = self
            .complex
            .facets()
            .iter()
            .map(|s| s.vertices().iter().map(|&v| perm[v]).collect())
            .collect();
        let complex = Complex::new(n, &facets, self.complex.degree_bound())?;
        let mut act = vec![vec![0; n]; self.group.order()];
        for (g, row) in self.act.iter().enumerate() {
            for v in 0..n {
                act[g][perm[v]] = perm[row[v]];
            }
        }
        Ok(GroupAction {
            group: self.group.clone(),
            complex,
            act,
        })
    }

    pub fn to_file(&self, group_ref: &str, complex_ref: &str) -> ActionFile {
        ActionFile {
            group_ref: group_ref.to_string(),
            complex_ref: complex_ref.to_string(),
            act_table: self.act.clone(),
        }
    }
}

fn check_dim(action: &GroupAction, n: usize) -> Result<()> {
    let dim = action.complex().dim();
    if n > dim {
        return Err(Error::DimensionOutOfRange {
            requested: n,
            available: dim,
        });
    }
    Ok(())
}

/// M_g on n-chains: column s holds ±1 at row g·s.
pub fn signed_permutation(action: &GroupAction, g: usize, n: usize) -> Result<IntMatrix> {
    check_dim(action, n)?;
    let k = action.complex().count(n);
    let mut m = IntMatrix::new(k, k);
    for (c, s) in action.complex().simplices(n).iter().enumerate() {
        let (img, sign) = action.image(g, s);
        let r = action.complex().index_of(&img).expect("action is simplicial");
        m.set(r, c, sign);
    }
    Ok(m)
}

/// P_ρ = (χ_ρ(1)/|G|) Σ_g conj(χ_ρ(g)) M_g on n-chains.
pub fn isotypic_projection(
    action: &GroupAction,
    table: &CharacterTable,
    rho: usize,
    n: usize,
) -> Result<SparseMatrix<Cyclotomic>> {
    check_dim(action, n)?;
    table.check_index(rho)?;
    let group = action.group();
    let e = table.field();
    let scale = BigRational::new(table.degree(rho).into(), group.order().into());
    let coeff: Vec<Cyclotomic> = group
        .elements()
        .map(|g| table.value(rho, g).conj().scale(&scale))
        .collect();
    let k = action.complex().count(n);
    let mut m = SparseMatrix::new(k, k);
    for (c, s) in action.complex().simplices(n).iter().enumerate() {
        let mut col: BTreeMap<usize, Cyclotomic> = BTreeMap::new();
        for g in group.elements() {
            let (img, sign) = action.image(g, s);
            let r = action.complex().index_of(&img).expect("action is simplicial");
            let term = if sign > 0 { coeff[g].clone() } else { -&coeff[g] };
            let entry = col.entry(r).or_insert_with(|| Cyclotomic::zero(e));
            *entry = &*entry + &term;
        }
        for (r, v) in col {
            if !v.is_zero() {
                m.set(r, c, v);
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::complex::validate_complex;
    use crate::group::CatalogGroup;

    pub(crate) fn c3_hollow_triangle() -> GroupAction {
        let k = validate_complex(&[vec![0, 1], vec![1, 2], vec![0, 2]], 4).unwrap();
        let g = Arc::new(Group::catalog(CatalogGroup::Cyclic(3)).unwrap());
        GroupAction::new(g, k, vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).unwrap()
    }

    fn mat_mul(a: &SparseMatrix<Cyclotomic>, b: &SparseMatrix<Cyclotomic>, e: u32) -> SparseMatrix<Cyclotomic> {
        let mut out = SparseMatrix::new(a.rows(), b.cols());
        for r in 0..a.rows() {
            let mut acc: BTreeMap<usize, Cyclotomic> = BTreeMap::new();
            for (&k, x) in a.row(r) {
                for (&c, y) in b.row(k) {
                    let entry = acc.entry(c).or_insert_with(|| Cyclotomic::zero(e));
                    *entry = &*entry + &(x * y);
                }
            }
            for (c, v) in acc {
                if !v.is_zero() {
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    #[test]
    fn orbit_examples() {
        let a = c3_hollow_triangle();
        assert_eq!(a.orbits(), vec![vec![0, 1, 2]]);
        let t = a.orbit_type(&[0]).unwrap();
        assert_eq!(t.stabilizer, vec![0]);
        assert_eq!(t.index, 3);

        let two = validate_complex(&[vec![0], vec![1]], 4).unwrap();
        let g = Arc::new(Group::catalog(CatalogGroup::Cyclic(2)).unwrap());
        let fixed = GroupAction::fixed(g.clone(), two);
        assert_eq!(fixed.orbits(), vec![vec![0], vec![1]]);
        assert_eq!(fixed.orbit_type(&[1]).unwrap().index, 1);

        // reflection of a 4-cycle fixing 0 and 2
        let sq = validate_complex(&[vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]], 4).unwrap();
        let refl = GroupAction::new(g, sq, vec![vec![0, 1, 2, 3], vec![0, 3, 2, 1]]).unwrap();
        assert_eq!(refl.orbits(), vec![vec![0], vec![1, 3], vec![2]]);
    }

    #[test]
    fn invalid_actions_rejected() {
        let k = validate_complex(&[vec![0, 1], vec![1, 2]], 4).unwrap();
        let g = Arc::new(Group::catalog(CatalogGroup::Cyclic(3)).unwrap());
        let bad = GroupAction::new(g, k, vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]);
        assert!(matches!(bad, Err(Error::InvalidAction(_))));
    }

    #[test]
    fn averaging_projector() {
        let a = c3_hollow_triangle();
        let t = a.group().character_table().unwrap();
        let p = isotypic_projection(&a, &t, 0, 0).unwrap();
        let third = Cyclotomic::from_rational(3, BigRational::new(1.into(), 3.into()));
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(p.get(r, c), Some(&third));
            }
        }
    }

    #[test]
    fn projections_are_orthogonal_idempotents() {
        let a = c3_hollow_triangle();
        let t = a.group().character_table().unwrap();
        let e = t.field();
        for n in 0..=1 {
            let ps: Vec<_> = (0..3).map(|rho| isotypic_projection(&a, &t, rho, n).unwrap()).collect();
            let k = a.complex().count(n);
            let mut sum: BTreeMap<(usize, usize), Cyclotomic> = BTreeMap::new();
            for p in &ps {
                for (r, c, v) in p.entries() {
                    let entry = sum.entry((r, c)).or_insert_with(|| Cyclotomic::zero(e));
                    *entry = &*entry + v;
                }
            }
            for r in 0..k {
                for c in 0..k {
                    let v = sum.get(&(r, c)).cloned().unwrap_or_else(|| Cyclotomic::zero(e));
                    let expect = if r == c { Cyclotomic::one(e) } else { Cyclotomic::zero(e) };
                    assert_eq!(v, expect);
                }
            }
            for i in 0..3 {
                for j in 0..3 {
                    let prod = mat_mul(&ps[i], &ps[j], e);
                    if i == j {
                        assert_eq!(prod, ps[i]);
                    } else {
                        assert_eq!(prod.nnz(), 0);
                    }
                }
            }
        }
    }
}
