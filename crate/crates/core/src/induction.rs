//! Induction G ×_H K, moved-vertex sets, and the induced-limit criterion.

use std::io::Write;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::canonical::RootedGComplex;
use crate::complex::{Complex, Distance};
use crate::error::{Error, Result};
use crate::group::{GroupAction, SubgroupEmbedding};
use crate::measure::WeightedEnsemble;

/// G ×_H K. Vertex ⌊rep_i, y⌋ gets id i·|K⁰| + y, with `rep_i` the i-th
/// coset representative; g·⌊rep_i, y⌋ = ⌊rep_k, h·y⌋ where g·rep_i = rep_k·h.
pub fn induce_complex(emb: &SubgroupEmbedding, action: &GroupAction) -> Result<GroupAction> {
    if action.group().as_ref() != emb.sub().as_ref() {
        return Err(Error::InvalidEmbedding("action group differs from the embedded subgroup".into()));
    }
    let k = action.complex();
    let nk = k.vertex_count();
    let cosets = emb.index();
    let facets: Vec<Vec<usize>> = (0..cosets)
        .flat_map(|i| {
            k.facets()
                .into_iter()
                .map(move |s| s.vertices().iter().map(|&y| i * nk + y).collect())
        })
        .collect();
    let complex = Complex::new(cosets * nk, &facets, k.degree_bound())?;
    let g = emb.ambient();
    let act: Vec<Vec<usize>> = g
        .elements()
        .map(|x| {
            let mut row = vec![0; cosets * nk];
            for (i, &rep) in emb.coset_reps().iter().enumerate() {
                let (kk, h) = emb.decompose(g.mul(x, rep));
                for y in 0..nk {
                    row[i * nk + y] = kk * nk + action.act(h, y);
                }
            }
            row
        })
        .collect();
    GroupAction::new(g.clone(), complex, act)
}

/// [G ×_H K, G⌊1, o⌋].
pub fn induce_rooted(emb: &SubgroupEmbedding, rc: &RootedGComplex) -> Result<RootedGComplex> {
    let induced = induce_complex(emb, rc.action())?;
    // coset 0 is represented by the identity
    let root = induced.orbit_of(rc.root()[0]);
    RootedGComplex::new(induced, root)
}

/// Push-forward of an ensemble along induction; weights are unchanged.
pub fn induce_ensemble(emb: &SubgroupEmbedding, ensemble: &WeightedEnsemble) -> Result<WeightedEnsemble> {
    let mut atoms = Vec::with_capacity(ensemble.atoms().len());
    for (rc, w) in ensemble.atoms() {
        if rc.group().as_ref() != emb.sub().as_ref() {
            return Err(Error::GroupMismatch);
        }
        atoms.push((induce_rooted(emb, rc)?, w.clone()));
    }
    WeightedEnsemble::new(atoms)
}

/// E(K, g, C) = {x : d(x, g·x) ≤ C}.
pub fn moved_set(action: &GroupAction, g: usize, c: usize) -> Vec<usize> {
    let k = action.complex();
    (0..k.vertex_count())
        .filter(|&x| {
            let gx = action.act(g, x);
            x == gx || matches!(k.distances_from(&[x], Some(c))[gx], Distance::Finite(d) if d <= c)
        })
        .collect()
}

/// One row of the criterion table.
#[derive(Clone, Debug, PartialEq)]
pub struct CriterionRow {
    pub n: usize,
    pub g: usize,
    pub c: usize,
    pub moved_fraction: BigRational,
}

/// Moved fractions along a family, with a verdict relative to a tolerance.
#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub rows: Vec<CriterionRow>,
    pub tolerance: f64,
    /// Every g ∉ H and every C ≤ Cmax has fraction ≤ tolerance at the last member.
    pub consistent: bool,
}

impl CriterionReport {
    pub fn verdict_line(&self) -> String {
        format!(
            "criterion: {}",
            if self.consistent { "consistent" } else { "inconsistent" }
        )
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "g", "C", "moved_fraction"]).map_err(csv_err)?;
        for row in &self.rows {
            let f = row.moved_fraction.to_f64().unwrap_or(f64::NAN);
            w.write_record([row.n.to_string(), row.g.to_string(), row.c.to_string(), format!("{f}")])
                .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// |E(K_n, g, C)| / |K_n⁰| for g ∈ G∖H and 1 ≤ C ≤ Cmax along `family`
/// (pairs of family index and action).
pub fn induced_criterion_report(
    family: &[(usize, GroupAction)],
    h: &[usize],
    c_max: usize,
    tolerance: f64,
) -> Result<CriterionReport> {
    let first = family.first().ok_or(Error::IndexOutOfRange(0))?;
    let group = first.1.group().clone();
    if family.iter().any(|(_, a)| a.group().as_ref() != group.as_ref()) {
        return Err(Error::GroupMismatch);
    }
    if !group.is_subgroup(h) {
        return Err(Error::NotASubgroup);
    }
    let outside: Vec<usize> = group.elements().filter(|g| !h.contains(g)).collect();
    let mut rows = Vec::new();
    let mut consistent = true;
    for (pos, (n, action)) in family.iter().enumerate() {
        let nv = action.complex().vertex_count().max(1);
        for &g in &outside {
            for c in 1..=c_max {
                let moved = moved_set(action, g, c).len();
                let frac = BigRational::new(moved.into(), nv.into());
                if pos + 1 == family.len() && frac.to_f64().unwrap_or(f64::INFINITY) > tolerance {
                    consistent = false;
                }
                rows.push(CriterionRow {
                    n: *n,
                    g,
                    c,
                    moved_fraction: frac,
                });
            }
        }
    }
    Ok(CriterionReport {
        rows,
        tolerance,
        consistent,
    })
}
