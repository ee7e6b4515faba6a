//! Empirical Benjamini-Schramm measures, total variation, unimodularity
//! checks, and convergence reports.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::canonical::{
    canonical_code, decode_rooted, doubly_canonical_code, CanonicalCode, DoublyRootedGComplex, RootedGComplex,
};
use crate::error::{Error, Result};
use crate::group::{Group, GroupAction};
use crate::induction::csv_err;

/// Rational-weighted canonical codes of radius-r balls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalMeasure {
    radius: usize,
    atoms: BTreeMap<CanonicalCode, BigRational>,
    provenance: String,
}

fn ratio(a: usize, b: usize) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// The ball of radius `r` around the orbit of `v`, rooted at that orbit.
pub fn rooted_ball(action: &GroupAction, v: usize, r: usize) -> Result<RootedGComplex> {
    if v >= action.complex().vertex_count() {
        return Err(Error::VertexOutOfRange(v));
    }
    let orbit = action.orbit_of(v);
    let dist = action.complex().distances_from(&orbit, Some(r));
    let keep: Vec<bool> = dist.iter().map(|d| d.finite().is_some_and(|d| d <= r)).collect();
    let (restricted, ball) = action.restrict(&keep);
    let root = orbit.iter().map(|&w| ball.old_to_new[w].unwrap()).collect();
    RootedGComplex::new(restricted, root)
}

impl EmpiricalMeasure {
    /// Builds a measure from atoms, merging equal codes.
    pub fn from_atoms(
        radius: usize,
        atoms: impl IntoIterator<Item = (CanonicalCode, BigRational)>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let mut map: BTreeMap<CanonicalCode, BigRational> = BTreeMap::new();
        for (c, w) in atoms {
            if !w.is_positive() {
                return Err(Error::Parse("atom weights must be positive".into()));
            }
            *map.entry(c).or_insert_with(BigRational::zero) += w;
        }
        let total: BigRational = map.values().sum();
        if !total.is_one() {
            return Err(Error::Parse(format!("weights sum to {total}, not 1")));
        }
        Ok(EmpiricalMeasure {
            radius,
            atoms: map,
            provenance: provenance.into(),
        })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn atoms(&self) -> &BTreeMap<CanonicalCode, BigRational> {
        &self.atoms
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn weight(&self, code: &CanonicalCode) -> BigRational {
        self.atoms.get(code).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Measure file rows: `code,weight_num,weight_den,r`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["code", "weight_num", "weight_den", "r"]).map_err(csv_err)?;
        for (code, weight) in &self.atoms {
            w.write_record([
                code.to_hex(),
                weight.numer().to_string(),
                weight.denom().to_string(),
                self.radius.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R, provenance: impl Into<String>) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let mut atoms = Vec::new();
        let mut radius = None;
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            if rec.len() != 4 {
                return Err(Error::Parse("expected 4 columns".into()));
            }
            let field = |i: usize| rec[i].trim().to_string();
            let num: BigInt = field(1).parse().map_err(|_| Error::Parse("bad numerator".into()))?;
            let den: BigInt = field(2).parse().map_err(|_| Error::Parse("bad denominator".into()))?;
            if den.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            let r: usize = field(3).parse().map_err(|_| Error::Parse("bad radius".into()))?;
            if radius.is_some_and(|x| x != r) {
                return Err(Error::Parse("mixed radii".into()));
            }
            radius = Some(r);
            atoms.push((CanonicalCode::from_hex(&field(0))?, BigRational::new(num, den)));
        }
        Self::from_atoms(radius.ok_or_else(|| Error::Parse("empty measure".into()))?, atoms, provenance)
    }
}

/// μ_K^G pushed to radius r: each vertex x contributes the code of the
/// ball of radius r around Gx with weight 1/|K⁰|.
pub fn empirical_measure(action: &GroupAction, r: usize) -> Result<EmpiricalMeasure> {
    let nv = action.complex().vertex_count();
    if nv == 0 {
        return Err(Error::EmptyComplex);
    }
    let orbits = action.orbits();
    let coded: Vec<(CanonicalCode, BigRational)> = orbits
        .par_iter()
        .map(|o| Ok((canonical_code(&rooted_ball(action, o[0], r)?)?, ratio(o.len(), nv))))
        .collect::<Result<_>>()?;
    EmpiricalMeasure::from_atoms(r, coded, format!("empirical measure of {:?} at radius {r}", action.complex()))
}

/// (1/2) Σ |μ1 − μ2| over codes.
pub fn tv_distance(a: &EmpiricalMeasure, b: &EmpiricalMeasure) -> Result<BigRational> {
    if a.radius != b.radius {
        return Err(Error::RadiusMismatch(a.radius, b.radius));
    }
    let mut total = BigRational::zero();
    for (c, w) in &a.atoms {
        total += (w - b.weight(c)).abs();
    }
    for (c, w) in &b.atoms {
        if !a.atoms.contains_key(c) {
            total += w.clone();
        }
    }
    Ok(total / BigRational::from_integer(2.into()))
}

/// Finitely supported probability measure on rooted G-complexes.
#[derive(Clone, Debug)]
pub struct WeightedEnsemble {
    atoms: Vec<(RootedGComplex, BigRational)>,
}

impl WeightedEnsemble {
    pub fn new(atoms: Vec<(RootedGComplex, BigRational)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyComplex);
        }
        if atoms.iter().any(|(_, w)| !w.is_positive()) {
            return Err(Error::Parse("ensemble weights must be positive".into()));
        }
        let total: BigRational = atoms.iter().map(|(_, w)| w.clone()).sum();
        if !total.is_one() {
            return Err(Error::Parse(format!("ensemble weights sum to {total}")));
        }
        let group = atoms[0].0.group().clone();
        if atoms.iter().any(|(rc, _)| rc.group().as_ref() != group.as_ref()) {
            return Err(Error::GroupMismatch);
        }
        Ok(WeightedEnsemble { atoms })
    }

    pub fn point_mass(rc: RootedGComplex) -> Self {
        WeightedEnsemble {
            atoms: vec![(rc, BigRational::one())],
        }
    }

    /// μ_K^G: the full complex rooted at each orbit, weighted by orbit size.
    pub fn from_action(action: &GroupAction) -> Result<Self> {
        let nv = action.complex().vertex_count();
        let atoms = action
            .orbits()
            .iter()
            .map(|o| Ok((crate::canonical::root_restrict(action, o[0])?, ratio(o.len(), nv))))
            .collect::<Result<_>>()?;
        Self::new(atoms)
    }

    /// Decodes every atom of an empirical measure.
    pub fn from_measure(measure: &EmpiricalMeasure, group: &Arc<Group>) -> Result<Self> {
        let atoms = measure
            .atoms
            .iter()
            .map(|(c, w)| Ok((decode_rooted(c, group)?, w.clone())))
            .collect::<Result<_>>()?;
        Self::new(atoms)
    }

    pub fn atoms(&self) -> &[(RootedGComplex, BigRational)] {
        &self.atoms
    }

    /// Codes of the radius-r balls, merged.
    pub fn to_measure(&self, r: usize) -> Result<EmpiricalMeasure> {
        let coded: Vec<(CanonicalCode, BigRational)> = self
            .atoms
            .par_iter()
            .map(|(rc, w)| Ok((canonical_code(&rc.ball(r))?, w.clone())))
            .collect::<Result<_>>()?;
        EmpiricalMeasure::from_atoms(r, coded, "ensemble")
    }
}

/// Outcome of the finite mass-transport test.
#[derive(Clone, Debug, PartialEq)]
pub struct UnimodularReport {
    pub depth: usize,
    pub pass: bool,
    /// Largest |left − right| over doubly rooted classes.
    pub max_violation: BigRational,
    pub classes: usize,
}

/// Compares Σ w Σ_{d(x,o) ≤ n} 1[(K,o,Gx) ≅ α] with the same sum for
/// (K,Gx,o), for every doubly rooted class α.
pub fn check_unimodular(ensemble: &WeightedEnsemble, depth: usize) -> Result<UnimodularReport> {
    let mut jobs: Vec<(DoublyRootedGComplex, BigRational)> = Vec::new();
    for (rc, w) in &ensemble.atoms {
        let dist = rc.complex().distances_from(rc.root(), Some(depth));
        for orbit in rc.action().orbits() {
            let within = dist[orbit[0]].finite().is_some_and(|d| d <= depth);
            if within {
                let dc = DoublyRootedGComplex::new(rc.action().clone(), rc.root().to_vec(), orbit.clone())?;
                jobs.push((dc, w * ratio(orbit.len(), 1)));
            }
        }
    }
    let coded: Vec<(CanonicalCode, CanonicalCode, BigRational)> = jobs
        .par_iter()
        .map(|(dc, w)| Ok((doubly_canonical_code(dc)?, doubly_canonical_code(&dc.swapped())?, w.clone())))
        .collect::<Result<_>>()?;
    let mut balance: BTreeMap<CanonicalCode, BigRational> = BTreeMap::new();
    for (left, right, w) in coded {
        *balance.entry(left).or_insert_with(BigRational::zero) += &w;
        *balance.entry(right).or_insert_with(BigRational::zero) -= &w;
    }
    let max_violation = balance
        .values()
        .map(|v| v.abs())
        .max()
        .unwrap_or_else(BigRational::zero);
    Ok(UnimodularReport {
        depth,
        pass: max_violation.is_zero(),
        max_violation,
        classes: balance.len(),
    })
}

/// One row of a convergence report.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub index: usize,
    pub r: usize,
    pub tv_to_next: BigRational,
}

/// TV distances between consecutive family members, per radius.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "r", "tv_to_next"]).map_err(csv_err)?;
        for row in &self.rows {
            let tv = row.tv_to_next.to_f64().unwrap_or(f64::NAN);
            w.write_record([row.index.to_string(), row.r.to_string(), format!("{tv}")])
                .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Whether the last consecutive distance at radius r is below `eps`.
    pub fn converged_at(&self, r: usize, eps: f64) -> bool {
        self.rows
            .iter()
            .rev()
            .find(|row| row.r == r)
            .is_some_and(|row| row.tv_to_next.to_f64().unwrap_or(f64::INFINITY) < eps)
    }
}

/// Consecutive TV distances of empirical measures along a family of
/// (index, action) pairs.
pub fn convergence_report(family: &[(usize, GroupAction)], radii: &[usize]) -> Result<ConvergenceReport> {
    if family.is_empty() {
        return Err(Error::IndexOutOfRange(0));
    }
    let group = family[0].1.group().clone();
    if family.iter().any(|(_, a)| a.group().as_ref() != group.as_ref()) {
        return Err(Error::GroupMismatch);
    }
    let mut rows = Vec::new();
    for &r in radii {
        let measures: Vec<EmpiricalMeasure> = family
            .iter()
            .map(|(_, a)| empirical_measure(a, r))
            .collect::<Result<_>>()?;
        for (i, pair) in measures.windows(2).enumerate() {
            rows.push(ConvergenceRow {
                index: family[i].0,
                r,
                tv_to_next: tv_distance(&pair[0], &pair[1])?,
            });
        }
    }
    Ok(ConvergenceReport { rows })
}
