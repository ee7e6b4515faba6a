//! Exact character tables over ℚ(ζ_e).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{permutations, CatalogGroup, Group, SubgroupEmbedding};
use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};

/// Character table as stored in a group file: class lists and, per
/// character and class, the rational coefficients (as `"p/q"` strings) of
/// the value in the power basis 1, ζ_e, ζ_e², …
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterTableFile {
    pub classes: Vec<Vec<usize>>,
    pub characters: Vec<Vec<Vec<String>>>,
}

/// Irreducible characters of a group, constant on conjugacy classes.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    field: u32,
    group_order: usize,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    values: Vec<Vec<Cyclotomic>>,
    degrees: Vec<usize>,
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl CharacterTable {
    /// Catalog table, or the table supplied with the group file.
    pub fn for_group(g: &Group) -> Result<Self> {
        let field = g.exponent() as u32;
        let classes = g.conjugacy_classes();
        let values: Vec<Vec<Cyclotomic>> = if let Some(kind) = g.catalog_kind() {
            let per_element = catalog_characters(kind, g)?;
            per_element
                .into_iter()
                .map(|chi| classes.iter().map(|c| chi[c[0]].clone()).collect())
                .collect()
        } else if let Some(file) = g.supplied_table() {
            let mut sorted: Vec<Vec<usize>> = file
                .classes
                .iter()
                .map(|c| {
                    let mut c = c.clone();
                    c.sort_unstable();
                    c
                })
                .collect();
            let order: Vec<usize> = {
                let mut idx: Vec<usize> = (0..sorted.len()).collect();
                idx.sort_by(|&a, &b| sorted[a].cmp(&sorted[b]));
                idx
            };
            let perm_sorted: Vec<Vec<usize>> = order.iter().map(|&i| sorted[i].clone()).collect();
            sorted = perm_sorted;
            if sorted != classes {
                return Err(Error::OrthogonalityFailure(
                    "supplied classes are not the conjugacy classes".into(),
                ));
            }
            let mut vals = Vec::new();
            for chi in &file.characters {
                if chi.len() != classes.len() {
                    return Err(Error::OrthogonalityFailure("character length differs from class count".into()));
                }
                let row: Vec<Cyclotomic> = order
                    .iter()
                    .map(|&i| {
                        let coeffs = chi[i].iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
                        Ok(Cyclotomic::from_coeffs(field, coeffs))
                    })
                    .collect::<Result<_>>()?;
                vals.push(row);
            }
            vals
        } else {
            return Err(Error::TableUnavailable);
        };
        let mut class_of = vec![0; g.order()];
        for (i, c) in classes.iter().enumerate() {
            for &x in c {
                class_of[x] = i;
            }
        }
        let id_class = class_of[g.identity()];
        let mut degrees = Vec::new();
        for chi in &values {
            let d = chi[id_class]
                .to_rational()
                .filter(|d| d.is_integer() && d.is_positive())
                .ok_or_else(|| Error::OrthogonalityFailure("degree is not a positive integer".into()))?;
            degrees.push(d.to_integer().try_into().unwrap_or(usize::MAX));
        }
        let table = CharacterTable {
            field,
            group_order: g.order(),
            classes,
            class_of,
            values,
            degrees,
        };
        table.verify()?;
        Ok(table)
    }

    /// Checks row orthogonality, Σ d² = |G| and squareness.
    pub fn verify(&self) -> Result<()> {
        if self.values.len() != self.classes.len() {
            return Err(Error::OrthogonalityFailure(format!(
                "{} characters for {} classes",
                self.values.len(),
                self.classes.len()
            )));
        }
        let sum_sq: usize = self.degrees.iter().map(|d| d * d).sum();
        if sum_sq != self.group_order {
            return Err(Error::OrthogonalityFailure(format!("Σ d² = {sum_sq} ≠ |G|")));
        }
        for a in 0..self.len() {
            for b in 0..self.len() {
                let ip = self.inner_product(&self.values[a], &self.values[b]);
                let expect = if a == b { BigRational::one() } else { BigRational::zero() };
                if ip.to_rational() != Some(expect) {
                    return Err(Error::OrthogonalityFailure(format!("⟨χ{a}, χ{b}⟩ = {ip}")));
                }
            }
        }
        Ok(())
    }

    /// (1/|G|) Σ_g f1(g) conj(f2(g)) for class functions.
    fn inner_product(&self, f1: &[Cyclotomic], f2: &[Cyclotomic]) -> Cyclotomic {
        let mut acc = Cyclotomic::zero(self.field);
        for (i, c) in self.classes.iter().enumerate() {
            let term = (&f1[i] * &f2[i].conj()).scale(&BigRational::from_integer(c.len().into()));
            acc = &acc + &term;
        }
        acc.scale(&BigRational::new(1.into(), self.group_order.into()))
    }

    /// Number of irreducible characters.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Order e of the field ℚ(ζ_e) holding the values.
    pub fn field(&self) -> u32 {
        self.field
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn degree(&self, rho: usize) -> usize {
        self.degrees[rho]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn value(&self, rho: usize, g: usize) -> &Cyclotomic {
        &self.values[rho][self.class_of[g]]
    }

    /// Values per class, in class order.
    pub fn class_values(&self, rho: usize) -> &[Cyclotomic] {
        &self.values[rho]
    }

    pub fn check_index(&self, rho: usize) -> Result<()> {
        if rho < self.len() {
            Ok(())
        } else {
            Err(Error::CharacterOutOfRange(rho))
        }
    }

    pub fn to_file(&self) -> CharacterTableFile {
        CharacterTableFile {
            classes: self.classes.clone(),
            characters: self
                .values
                .iter()
                .map(|row| row.iter().map(|v| v.coeffs().iter().map(format_rational).collect()).collect())
                .collect(),
        }
    }
}

/// m(θ, ρ|_H) for every θ ∈ Irr(H), in H's character order.
pub fn restriction_multiplicities(emb: &SubgroupEmbedding, rho: usize) -> Result<Vec<usize>> {
    let tg = emb.ambient().character_table()?;
    tg.check_index(rho)?;
    let th = emb.sub().character_table()?;
    let e = tg.field();
    let h_order = emb.sub().order();
    (0..th.len())
        .map(|theta| {
            let mut acc = Cyclotomic::zero(e);
            for h in 0..h_order {
                let chi = tg.value(rho, emb.map()[h]);
                let psi = th.value(theta, h).conj().embed(e);
                acc = &acc + &(chi * &psi);
            }
            let m = acc
                .to_rational()
                .map(|r| r / BigRational::from_integer(h_order.into()))
                .filter(|r| r.is_integer() && !r.is_negative())
                .ok_or_else(|| Error::InternalInconsistency(format!("restriction multiplicity {acc}")))?;
            Ok(m.to_integer().try_into().unwrap_or(usize::MAX))
        })
        .collect()
}

/// Character values per element for catalog groups, ordered by degree.
fn catalog_characters(kind: CatalogGroup, g: &Group) -> Result<Vec<Vec<Cyclotomic>>> {
    let e = g.exponent() as u32;
    let int = |v: i64| Cyclotomic::from_int(e, v);
    let sign = |odd: bool| int(if odd { -1 } else { 1 });
    let order = g.order();
    Ok(match kind {
        CatalogGroup::Cyclic(n) => (0..n)
            .map(|j| (0..n).map(|k| Cyclotomic::zeta_pow(e, (j * k % n) as i64)).collect())
            .collect(),
        CatalogGroup::Dihedral(n) => {
            let step = (e as usize / n) as i64;
            let refl = |x: usize| x >= n;
            let rot = |x: usize| x % n;
            let mut chars: Vec<Vec<Cyclotomic>> = vec![
                vec![int(1); order],
                (0..order).map(|x| sign(refl(x))).collect(),
            ];
            if n % 2 == 0 {
                chars.push((0..order).map(|x| sign(rot(x) % 2 == 1)).collect());
                chars.push((0..order).map(|x| sign((rot(x) % 2 == 1) ^ refl(x))).collect());
            }
            for h in 1..=(n - 1) / 2 {
                chars.push(
                    (0..order)
                        .map(|x| {
                            if refl(x) {
                                Cyclotomic::zero(e)
                            } else {
                                let k = (h * rot(x)) as i64;
                                &Cyclotomic::zeta_pow(e, k * step) + &Cyclotomic::zeta_pow(e, -k * step)
                            }
                        })
                        .collect(),
                );
            }
            chars
        }
        CatalogGroup::Symmetric(n) => {
            let perms = permutations(n);
            let cycle_type = |p: &Vec<usize>| {
                let mut seen = vec![false; n];
                let mut lens = Vec::new();
                for s in 0..n {
                    if !seen[s] {
                        let mut len = 0;
                        let mut x = s;
                        while !seen[x] {
                            seen[x] = true;
                            x = p[x];
                            len += 1;
                        }
                        lens.push(len);
                    }
                }
                lens.sort_unstable();
                lens
            };
            let types: Vec<Vec<usize>> = perms.iter().map(cycle_type).collect();
            let odd = |t: &Vec<usize>| t.iter().filter(|&&l| l % 2 == 0).count() % 2 == 1;
            let fixed = |t: &Vec<usize>| t.iter().filter(|&&l| l == 1).count() as i64;
            let trivial: Vec<Cyclotomic> = vec![int(1); order];
            let sgn: Vec<Cyclotomic> = types.iter().map(|t| sign(odd(t))).collect();
            let standard: Vec<Cyclotomic> = types.iter().map(|t| int(fixed(t) - 1)).collect();
            let standard_sign: Vec<Cyclotomic> =
                types.iter().map(|t| int(if odd(t) { 1 - fixed(t) } else { fixed(t) - 1 })).collect();
            match n {
                1 => vec![trivial],
                2 => vec![trivial, sgn],
                3 => vec![trivial, sgn, standard],
                _ => {
                    let two: Vec<Cyclotomic> = types
                        .iter()
                        .map(|t| {
                            int(match t.as_slice() {
                                [1, 1, 1, 1] => 2,
                                [2, 2] => 2,
                                [1, 3] => -1,
                                _ => 0,
                            })
                        })
                        .collect();
                    vec![trivial, sgn, two, standard, standard_sign]
                }
            }
        }
        CatalogGroup::Klein4 => (0..4)
            .map(|a: usize| (0..4).map(|x: usize| sign((a & x).count_ones() % 2 == 1)).collect())
            .collect(),
        CatalogGroup::Quaternion8 => {
            // index = 2*unit + sign with units 1, i, j, k
            let mut chars: Vec<Vec<Cyclotomic>> = Vec::new();
            for (a, b) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                chars.push(
                    (0..8)
                        .map(|x| {
                            let odd = match x / 2 {
                                0 => 0,
                                1 => a,
                                2 => b,
                                _ => a + b,
                            };
                            sign(odd % 2 == 1)
                        })
                        .collect(),
                );
            }
            chars.push((0..8).map(|x| int([2, -2, 0, 0, 0, 0, 0, 0][x])).collect());
            chars
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn table(kind: CatalogGroup) -> CharacterTable {
        CharacterTable::for_group(&Group::catalog(kind).unwrap()).unwrap()
    }

    #[test]
    fn catalog_tables_are_orthogonal() {
        let kinds = [
            CatalogGroup::Cyclic(1),
            CatalogGroup::Cyclic(2),
            CatalogGroup::Cyclic(3),
            CatalogGroup::Cyclic(6),
            CatalogGroup::Cyclic(12),
            CatalogGroup::Dihedral(1),
            CatalogGroup::Dihedral(2),
            CatalogGroup::Dihedral(3),
            CatalogGroup::Dihedral(4),
            CatalogGroup::Dihedral(5),
            CatalogGroup::Dihedral(6),
            CatalogGroup::Symmetric(1),
            CatalogGroup::Symmetric(2),
            CatalogGroup::Symmetric(3),
            CatalogGroup::Symmetric(4),
            CatalogGroup::Klein4,
            CatalogGroup::Quaternion8,
        ];
        for k in kinds {
            let t = table(k);
            assert_eq!(t.len(), t.classes().len(), "{k}");
        }
        assert_eq!(table(CatalogGroup::Symmetric(3)).degrees(), &[1, 1, 2]);
        assert_eq!(table(CatalogGroup::Symmetric(4)).degrees(), &[1, 1, 2, 3, 3]);
    }

    #[test]
    fn cyclic_three_values() {
        let t = table(CatalogGroup::Cyclic(3));
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(t.value(j, k), &Cyclotomic::zeta_pow(3, (j * k) as i64));
            }
        }
    }

    #[test]
    fn klein_values_are_signs() {
        let t = table(CatalogGroup::Klein4);
        for rho in 0..4 {
            for g in 0..4 {
                let v = t.value(rho, g).to_rational().unwrap();
                assert!(v == BigRational::one() || v == -BigRational::one());
            }
        }
    }

    #[test]
    fn supplied_table_round_trip_and_rejection() {
        let g = Group::catalog(CatalogGroup::Symmetric(3)).unwrap();
        let file = table(CatalogGroup::Symmetric(3)).to_file();
        let mut gf = g.to_file();
        gf.character_table = Some(file.clone());
        let loaded = Group::from_file(&gf).unwrap();
        assert_eq!(loaded.character_table().unwrap().degrees(), &[1, 1, 2]);
        let mut broken = file;
        broken.characters[2][0] = vec!["3".into()];
        gf.character_table = Some(broken);
        assert!(matches!(Group::from_file(&gf), Err(Error::OrthogonalityFailure(_))));
        let bare = Group::from_table(g.to_file().mul_table).unwrap();
        assert_eq!(bare.character_table().unwrap_err(), Error::TableUnavailable);
    }

    #[test]
    fn restriction_examples() {
        let s3 = Arc::new(Group::catalog(CatalogGroup::Symmetric(3)).unwrap());
        let whole = SubgroupEmbedding::identity(s3.clone());
        for rho in 0..3 {
            let m = restriction_multiplicities(&whole, rho).unwrap();
            let expect: Vec<usize> = (0..3).map(|t| usize::from(t == rho)).collect();
            assert_eq!(m, expect);
        }
        let triv = SubgroupEmbedding::trivial(s3.clone());
        assert_eq!(restriction_multiplicities(&triv, 2).unwrap(), vec![2]);
        let c3 = Arc::new(Group::catalog(CatalogGroup::Cyclic(3)).unwrap());
        let emb = SubgroupEmbedding::find(s3, c3).unwrap();
        assert_eq!(restriction_multiplicities(&emb, 2).unwrap(), vec![0, 1, 1]);
        assert_eq!(restriction_multiplicities(&emb, 1).unwrap(), vec![1, 0, 0]);
    }
}
