//! ρ-Laplacians, exact ℓ²-multiplicities, spectral measures, trace moments,
//! Fuglede-Kadison determinants, and reciprocity checks.
//!
//! P_ρ commutes with Δ_n, so Δ_{n,ρ} = (I − P_ρ) + Δ_n acts as Δ_n on
//! im P_ρ and as Δ_n + I on ker P_ρ. Large inputs are handled on im P_ρ,
//! spanned orbit by orbit by the columns P_ρ e_s.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::complex::Complex;
use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::group::{isotypic_projection, restriction_multiplicities, CharacterTable, GroupAction, SubgroupEmbedding};
use crate::induction::induce_complex;
use crate::linalg::{rank, IntMatrix, SparseMatrix};
use crate::measure::{EmpiricalMeasure, WeightedEnsemble};

/// Largest power accepted by [`moment`].
pub const MAX_POWER: usize = 12;
/// Default simplex cap for [`spectral_measure`].
pub const DEFAULT_SPECTRAL_CAP: usize = 5000;
/// Eigenvalues closer than this are merged into one atom.
pub const MERGE_TOL: f64 = 1e-8;
/// Eigenvalues at or below this count as zero.
pub const ZERO_TOL: f64 = 1e-9;
/// Up to this many n-simplices the kernel is taken of Δ_{n,ρ} itself;
/// above it, of Δ_n restricted to im P_ρ.
pub const DIRECT_KERNEL_LIMIT: usize = 64;

fn q(a: usize, b: usize) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
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

/// Δ_{n,ρ} = (I − P_ρ) + Δ_n over ℚ(ζ_e).
pub fn rho_laplacian(action: &GroupAction, n: usize, rho: usize) -> Result<SparseMatrix<Cyclotomic>> {
    check_dim(action, n)?;
    let table = action.group().character_table()?;
    let e = table.field();
    let p = isotypic_projection(action, &table, rho, n)?;
    let lap = action.complex().laplacian(n)?;
    let k = lap.rows();
    let mut m: SparseMatrix<Cyclotomic> = lap.map(|&v| Cyclotomic::from_int(e, v));
    for i in 0..k {
        let cur = m.get(i, i).cloned().unwrap_or_else(|| Cyclotomic::zero(e));
        m.set(i, i, &cur + &Cyclotomic::one(e));
    }
    for (r, c, v) in p.entries() {
        let cur = m.get(r, c).cloned().unwrap_or_else(|| Cyclotomic::zero(e));
        let next = &cur - v;
        if next.is_zero() {
            m.remove(r, c);
        } else {
            m.set(r, c, next);
        }
    }
    Ok(m)
}

/// Exact multiplicity data for one (n, ρ).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityResult {
    /// m(ρ, H_n(K; ℂ)).
    pub multiplicity: usize,
    /// m / |K⁰|.
    pub l2: BigRational,
    /// dim ker Δ_{n,ρ} = χ_ρ(1)·m.
    pub kernel_dim: usize,
}

/// Sparse columns spanning im P_ρ on n-chains, independent by construction.
fn isotypic_basis(
    action: &GroupAction,
    table: &CharacterTable,
    rho: usize,
    n: usize,
) -> Vec<BTreeMap<usize, Cyclotomic>> {
    let complex = action.complex();
    let group = action.group();
    let e = table.field();
    let scale = q(table.degree(rho), group.order());
    let coeff: Vec<Cyclotomic> = group
        .elements()
        .map(|g| table.value(rho, g).conj().scale(&scale))
        .collect();
    let simplices = complex.simplices(n);
    let mut seen = vec![false; simplices.len()];
    let mut basis = Vec::new();
    for start in 0..simplices.len() {
        if seen[start] {
            continue;
        }
        let mut orbit: Vec<usize> = group
            .elements()
            .map(|g| complex.index_of(&action.image(g, &simplices[start]).0).unwrap())
            .collect();
        orbit.sort_unstable();
        orbit.dedup();
        for &t in &orbit {
            seen[t] = true;
        }
        // echelon rows over the orbit coordinates
        let mut echelon: Vec<(usize, BTreeMap<usize, Cyclotomic>)> = Vec::new();
        for &t in &orbit {
            let mut col: BTreeMap<usize, Cyclotomic> = BTreeMap::new();
            for g in group.elements() {
                let (img, sign) = action.image(g, &simplices[t]);
                let r = complex.index_of(&img).unwrap();
                let term = if sign > 0 { coeff[g].clone() } else { -&coeff[g] };
                let entry = col.entry(r).or_insert_with(|| Cyclotomic::zero(e));
                *entry = &*entry + &term;
            }
            col.retain(|_, v| !v.is_zero());
            let mut red = col.clone();
            for (pivot, row) in &echelon {
                if let Some(f) = red.get(pivot).cloned() {
                    for (c, v) in row {
                        let entry = red.entry(*c).or_insert_with(|| Cyclotomic::zero(e));
                        *entry = &*entry - &(&f * v);
                    }
                    red.retain(|_, v| !v.is_zero());
                }
            }
            if let Some((&pivot, pv)) = red.iter().next() {
                let inv = pv.inv();
                let row: BTreeMap<usize, Cyclotomic> = red.iter().map(|(&c, v)| (c, v * &inv)).collect();
                echelon.push((pivot, row));
                basis.push(col);
            }
        }
    }
    basis
}

/// U* Δ U for the columns U of an im P_ρ basis.
fn compressed_laplacian(
    lap: &IntMatrix,
    basis: &[BTreeMap<usize, Cyclotomic>],
    e: u32,
) -> SparseMatrix<Cyclotomic> {
    let mut owners: HashMap<usize, Vec<usize>> = HashMap::new();
    for (a, col) in basis.iter().enumerate() {
        for &i in col.keys() {
            owners.entry(i).or_default().push(a);
        }
    }
    let k = basis.len();
    let rows: Vec<BTreeMap<usize, Cyclotomic>> = basis
        .par_iter()
        .map(|col| {
            let mut w: BTreeMap<usize, Cyclotomic> = BTreeMap::new();
            for (&j, v) in col {
                for (&i, &d) in lap.row(j) {
                    let entry = w.entry(i).or_insert_with(|| Cyclotomic::zero(e));
                    *entry = &*entry + &v.scale(&BigRational::from_integer(d.into()));
                }
            }
            let mut out: BTreeMap<usize, Cyclotomic> = BTreeMap::new();
            for (i, wv) in &w {
                if wv.is_zero() {
                    continue;
                }
                for &a in owners.get(i).map(Vec::as_slice).unwrap_or(&[]) {
                    let term = &basis[a][i].conj() * wv;
                    let entry = out.entry(a).or_insert_with(|| Cyclotomic::zero(e));
                    *entry = &*entry + &term;
                }
            }
            out.retain(|_, v| !v.is_zero());
            out
        })
        .collect();
    // rows[b] holds column b of U*ΔU; the matrix is Hermitian so only the rank matters
    let mut m = SparseMatrix::new(k, k);
    for (b, col) in rows.into_iter().enumerate() {
        for (a, v) in col {
            m.set(a, b, v);
        }
    }
    m
}

/// dim ker Δ_{n,ρ}, computed directly.
pub fn kernel_dim_direct(action: &GroupAction, n: usize, rho: usize) -> Result<usize> {
    let m = rho_laplacian(action, n, rho)?;
    Ok(m.rows() - rank(&m))
}

/// dim ker Δ_{n,ρ} as the nullity of Δ_n compressed to im P_ρ.
pub fn kernel_dim_compressed(action: &GroupAction, n: usize, rho: usize) -> Result<usize> {
    check_dim(action, n)?;
    let table = action.group().character_table()?;
    table.check_index(rho)?;
    let basis = isotypic_basis(action, &table, rho, n);
    let lap = action.complex().laplacian(n)?;
    let m = compressed_laplacian(&lap, &basis, table.field());
    Ok(m.rows() - rank(&m))
}

/// Exact m(ρ, H_n(K; ℂ)) from the kernel of Δ_{n,ρ}.
pub fn multiplicity(action: &GroupAction, n: usize, rho: usize) -> Result<MultiplicityResult> {
    let table = action.group().character_table()?;
    table.check_index(rho)?;
    let nv = action.complex().vertex_count();
    if n > action.complex().dim() {
        return Ok(MultiplicityResult {
            multiplicity: 0,
            l2: BigRational::zero(),
            kernel_dim: 0,
        });
    }
    let kernel_dim = if action.complex().count(n) <= DIRECT_KERNEL_LIMIT {
        kernel_dim_direct(action, n, rho)?
    } else {
        kernel_dim_compressed(action, n, rho)?
    };
    let d = table.degree(rho);
    if kernel_dim % d != 0 {
        return Err(Error::InternalInconsistency(format!(
            "kernel dimension {kernel_dim} not divisible by χ(1) = {d}"
        )));
    }
    let m = kernel_dim / d;
    Ok(MultiplicityResult {
        multiplicity: m,
        l2: q(m, nv),
        kernel_dim,
    })
}

/// Multiplicities for every irreducible, checked against b_n.
pub fn multiplicities(action: &GroupAction, n: usize) -> Result<Vec<MultiplicityResult>> {
    let table = action.group().character_table()?;
    let results: Vec<MultiplicityResult> = (0..table.len())
        .into_par_iter()
        .map(|rho| multiplicity(action, n, rho))
        .collect::<Result<_>>()?;
    let total: usize = results.iter().map(|r| r.kernel_dim).sum();
    let betti = action.complex().betti(n);
    if total != betti {
        return Err(Error::InternalInconsistency(format!(
            "Σ ker Δ_(n,ρ) = {total} but b_{n} = {betti}"
        )));
    }
    Ok(results)
}

/// b_n^{(2)} = b_n / |K⁰|.
pub fn l2_betti(complex: &Complex, n: usize) -> BigRational {
    q(complex.betti(n), complex.vertex_count().max(1))
}

/// Vertex-normalized eigenvalue distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMeasure {
    /// (eigenvalue, mass), eigenvalues ascending.
    pub atoms: Vec<(f64, BigRational)>,
    /// |K⁰|.
    pub normalization: usize,
}

impl SpectralMeasure {
    pub fn total_mass(&self) -> BigRational {
        self.atoms.iter().map(|(_, m)| m.clone()).sum()
    }

    /// ∫ λ^r dν.
    pub fn moment(&self, r: usize) -> f64 {
        self.atoms
            .iter()
            .map(|(l, m)| l.powi(r as i32) * m.to_f64().unwrap_or(0.0))
            .sum()
    }

    /// Rows `eigenvalue,mass_num,mass_den`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["eigenvalue", "mass_num", "mass_den"])
            .map_err(crate::induction::csv_err)?;
        for (l, m) in &self.atoms {
            w.write_record([format!("{l}"), m.numer().to_string(), m.denom().to_string()])
                .map_err(crate::induction::csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn hermitian_eigenvalues(m: DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    m.symmetric_eigenvalues().iter().copied().collect()
}

/// Eigenvalues of Δ_n on im P_σ, from an orthonormalized isotypic basis.
fn isotypic_spectrum(action: &GroupAction, table: &CharacterTable, lap: &IntMatrix, sigma: usize, n: usize) -> Vec<f64> {
    let exact = isotypic_basis(action, table, sigma, n);
    // Gram-Schmidt against earlier columns sharing support; different orbits never overlap
    let mut cols: Vec<BTreeMap<usize, Complex64>> = Vec::new();
    let mut owners: HashMap<usize, Vec<usize>> = HashMap::new();
    for col in &exact {
        let mut v: BTreeMap<usize, Complex64> = col.iter().map(|(&i, c)| (i, c.to_complex())).collect();
        let mut peers: Vec<usize> = v
            .keys()
            .flat_map(|i| owners.get(i).into_iter().flatten().copied())
            .collect();
        peers.sort_unstable();
        peers.dedup();
        for p in peers {
            let dot: Complex64 = cols[p]
                .iter()
                .map(|(i, u)| u.conj() * v.get(i).copied().unwrap_or_default())
                .sum();
            for (i, u) in &cols[p] {
                *v.entry(*i).or_default() -= dot * u;
            }
        }
        let norm: f64 = v.values().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.values_mut() {
            *z /= norm;
        }
        let slot = cols.len();
        for &i in v.keys() {
            owners.entry(i).or_default().push(slot);
        }
        cols.push(v);
    }
    let k = cols.len();
    let mut m = DMatrix::<Complex64>::zeros(k, k);
    for (b, col) in cols.iter().enumerate() {
        let mut w: HashMap<usize, Complex64> = HashMap::new();
        for (&j, v) in col {
            for (&i, &d) in lap.row(j) {
                *w.entry(i).or_default() += v * d as f64;
            }
        }
        for (i, wv) in w {
            for &a in owners.get(&i).map(Vec::as_slice).unwrap_or(&[]) {
                m[(a, b)] += cols[a][&i].conj() * wv;
            }
        }
    }
    hermitian_eigenvalues(m)
}

/// Eigenvalues of the dense complex embedding of Δ_{n,ρ}.
pub fn dense_eigenvalues(action: &GroupAction, n: usize, rho: usize) -> Result<Vec<f64>> {
    let m = rho_laplacian(action, n, rho)?;
    let k = m.rows();
    let mut d = DMatrix::<Complex64>::zeros(k, k);
    for (r, c, v) in m.entries() {
        d[(r, c)] = v.to_complex();
    }
    let mut ev = hermitian_eigenvalues(d);
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// ν_{n,ρ} with the default simplex cap.
pub fn spectral_measure(action: &GroupAction, n: usize, rho: usize) -> Result<SpectralMeasure> {
    spectral_measure_capped(action, n, rho, DEFAULT_SPECTRAL_CAP)
}

/// ν_{n,ρ}: each eigenvalue of Δ_{n,ρ} with mass 1/|K⁰|, the kernel
/// replaced by the exact kernel dimension.
pub fn spectral_measure_capped(action: &GroupAction, n: usize, rho: usize, cap: usize) -> Result<SpectralMeasure> {
    check_dim(action, n)?;
    let count = action.complex().count(n);
    if count > cap {
        return Err(Error::SizeCapExceeded(count, cap));
    }
    let table = action.group().character_table()?;
    table.check_index(rho)?;
    let lap = action.complex().laplacian(n)?;
    let spectra: Vec<Vec<f64>> = (0..table.len())
        .into_par_iter()
        .map(|sigma| isotypic_spectrum(action, &table, &lap, sigma, n))
        .collect();
    let mut eigen: Vec<f64> = Vec::with_capacity(count);
    for (sigma, spec) in spectra.iter().enumerate() {
        if sigma == rho {
            eigen.extend(spec.iter().copied());
        } else {
            eigen.extend(spec.iter().map(|l| l + 1.0));
        }
    }
    if eigen.len() != count {
        return Err(Error::InternalInconsistency(format!(
            "isotypic blocks have total size {} for {count} simplices",
            eigen.len()
        )));
    }
    eigen.sort_by(f64::total_cmp);
    let kernel = multiplicity(action, n, rho)?.kernel_dim;
    for (i, l) in eigen.iter_mut().enumerate() {
        if i < kernel || *l < 0.0 {
            *l = 0.0;
        }
    }
    Ok(merge_eigenvalues(&eigen, action.complex().vertex_count()))
}

fn merge_eigenvalues(sorted: &[f64], nv: usize) -> SpectralMeasure {
    let mut atoms: Vec<(f64, BigRational)> = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let start = sorted[i];
        let mut j = i;
        let mut sum = 0.0;
        while j < sorted.len() && sorted[j] - start <= MERGE_TOL {
            sum += sorted[j];
            j += 1;
        }
        let value = if start == 0.0 { 0.0 } else { sum / (j - i) as f64 };
        atoms.push((value, q(j - i, nv)));
        i = j;
    }
    SpectralMeasure {
        atoms,
        normalization: nv,
    }
}

/// det_FK(ν) = exp ∫_{λ>0} log λ dν.
pub fn fk_determinant(nu: &SpectralMeasure) -> f64 {
    nu.atoms
        .iter()
        .filter(|(l, _)| *l > ZERO_TOL)
        .map(|(l, m)| m.to_f64().unwrap_or(0.0) * l.ln())
        .sum::<f64>()
        .exp()
}

fn binomial(r: usize, j: usize) -> i128 {
    (0..j).fold(1i128, |acc, i| acc * (r - i) as i128 / (i + 1) as i128)
}

fn overflow() -> Error {
    Error::InternalInconsistency("integer overflow in exact power".into())
}

/// Per-simplex trace data shared by [`moment`] and [`local_moment`].
struct TraceContext<'a> {
    action: &'a GroupAction,
    lap: IntMatrix,
    /// (χ(1)/|G|)·conj χ(g).
    coeff: Vec<Cyclotomic>,
    field: u32,
    n: usize,
}

impl<'a> TraceContext<'a> {
    fn new(action: &'a GroupAction, n: usize, rho: usize) -> Result<Self> {
        let table = action.group().character_table()?;
        table.check_index(rho)?;
        let scale = q(table.degree(rho), action.group().order());
        let coeff = action
            .group()
            .elements()
            .map(|g| table.value(rho, g).conj().scale(&scale))
            .collect();
        Ok(TraceContext {
            action,
            lap: action.complex().laplacian(n)?,
            coeff,
            field: table.field(),
            n,
        })
    }

    /// (Δ_{n,ρ}^r)_{ss} via Δ_{n,ρ}^r = Δ^r + Σ_{j<r} C(r,j) Δ^j (I − P_ρ).
    fn diagonal(&self, s: usize, r: usize) -> Result<Cyclotomic> {
        let e = self.field;
        let complex = self.action.complex();
        let simplex = &complex.simplices(self.n)[s];
        let images: Vec<(usize, i64)> = self
            .action
            .group()
            .elements()
            .map(|g| {
                let (img, sign) = self.action.image(g, simplex);
                (complex.index_of(&img).unwrap(), sign)
            })
            .collect();
        let mut v: HashMap<usize, i128> = HashMap::from([(s, 1i128)]);
        let mut total = Cyclotomic::zero(e);
        for j in 0..=r {
            if j == r {
                let diag = v.get(&s).copied().unwrap_or(0);
                total = &total + &Cyclotomic::from_int(e, i64::try_from(diag).map_err(|_| overflow())?);
                break;
            }
            let c = binomial(r, j);
            let diag = v.get(&s).copied().unwrap_or(0);
            let mut term = Cyclotomic::from_int(e, i64::try_from(diag).map_err(|_| overflow())?);
            for (g, &(t, sign)) in images.iter().enumerate() {
                let entry = v.get(&t).copied().unwrap_or(0) * sign as i128;
                if entry != 0 {
                    let x = Cyclotomic::from_int(e, i64::try_from(entry).map_err(|_| overflow())?);
                    term = &term - &(&self.coeff[g] * &x);
                }
            }
            let c = i64::try_from(c).map_err(|_| overflow())?;
            total = &total + &term.scale(&BigRational::from_integer(c.into()));
            // v ← Δ v
            let mut next: HashMap<usize, i128> = HashMap::with_capacity(v.len() * 4);
            for (&t, &val) in &v {
                for (&u, &d) in self.lap.row(t) {
                    let add = (d as i128).checked_mul(val).ok_or_else(overflow)?;
                    let slot = next.entry(u).or_insert(0);
                    *slot = slot.checked_add(add).ok_or_else(overflow)?;
                }
            }
            next.retain(|_, x| *x != 0);
            v = next;
        }
        Ok(total)
    }
}

fn to_rational(c: &Cyclotomic) -> Result<BigRational> {
    c.to_rational().ok_or_else(|| Error::NotRational(c.to_string()))
}

/// tr(Δ_{n,ρ}^r) = (1/|K⁰|) Σ_s (Δ_{n,ρ}^r)_{ss}, exactly.
pub fn moment(action: &GroupAction, n: usize, rho: usize, r: usize) -> Result<BigRational> {
    if r > MAX_POWER {
        return Err(Error::PowerCapExceeded(r, MAX_POWER));
    }
    let nv = action.complex().vertex_count();
    if n > action.complex().dim() {
        action.group().character_table()?.check_index(rho)?;
        return Ok(BigRational::zero());
    }
    let ctx = TraceContext::new(action, n, rho)?;
    let parts: Vec<Cyclotomic> = (0..action.complex().count(n))
        .into_par_iter()
        .map(|s| ctx.diagonal(s, r))
        .collect::<Result<_>>()?;
    let sum = parts.iter().fold(Cyclotomic::zero(ctx.field), |acc, x| &acc + x);
    Ok(to_rational(&sum)? / BigRational::from_integer(nv.into()))
}

/// Σ over atoms of weight × (1/(n+1)) Σ_{s ∋ root} (Δ_{n,ρ}^r)_{ss},
/// computed inside each decoded ball.
pub fn local_moment(
    measure: &EmpiricalMeasure,
    group: &std::sync::Arc<crate::group::Group>,
    n: usize,
    rho: usize,
    r: usize,
) -> Result<BigRational> {
    if r > MAX_POWER {
        return Err(Error::PowerCapExceeded(r, MAX_POWER));
    }
    let need = 2 * r + 1;
    if measure.radius() < need {
        return Err(Error::RadiusTooSmall {
            have: measure.radius(),
            need,
        });
    }
    group.character_table()?.check_index(rho)?;
    let ensemble = WeightedEnsemble::from_measure(measure, group)?;
    let parts: Vec<Cyclotomic> = ensemble
        .atoms()
        .par_iter()
        .map(|(rc, w)| {
            let e = group.character_table()?.field();
            if n > rc.complex().dim() {
                return Ok(Cyclotomic::zero(e));
            }
            let ctx = TraceContext::new(rc.action(), n, rho)?;
            let x = rc.root()[0];
            let mut acc = Cyclotomic::zero(e);
            for (s, simplex) in rc.complex().simplices(n).iter().enumerate() {
                if simplex.contains(x) {
                    acc = &acc + &ctx.diagonal(s, r)?;
                }
            }
            Ok(acc.scale(&(w / BigRational::from_integer((n + 1).into()))))
        })
        .collect::<Result<_>>()?;
    let e = group.character_table()?.field();
    let sum = parts.iter().fold(Cyclotomic::zero(e), |acc, x| &acc + x);
    to_rational(&sum)
}

/// Both sides of the reciprocity identity for one irreducible of G.
#[derive(Clone, Debug, PartialEq)]
pub struct ReciprocityRow {
    pub rho: usize,
    /// m_n^{(2)}(ρ, ind μ_K^H), from the induced complex.
    pub lhs: BigRational,
    /// (|H|/|G|) Σ_θ m(θ, ρ|_H) m_n^{(2)}(θ, μ_K^H).
    pub rhs: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReciprocityReport {
    pub n: usize,
    pub rows: Vec<ReciprocityRow>,
}

impl ReciprocityReport {
    pub fn all_equal(&self) -> bool {
        self.rows.iter().all(|r| r.lhs == r.rhs)
    }
}

/// Evaluates the reciprocity identity exactly for every ρ ∈ Irr(G).
pub fn reciprocity_check(emb: &SubgroupEmbedding, action_h: &GroupAction, n: usize) -> Result<ReciprocityReport> {
    let induced = induce_complex(emb, action_h)?;
    let tg = emb.ambient().character_table()?;
    let th = emb.sub().character_table()?;
    let nv_h = action_h.complex().vertex_count();
    let sub: Vec<BigRational> = (0..th.len())
        .map(|theta| multiplicity(action_h, n, theta).map(|m| m.l2))
        .collect::<Result<_>>()?;
    let ratio = q(emb.sub().order(), emb.ambient().order());
    let _ = nv_h;
    let rows = (0..tg.len())
        .map(|rho| {
            let lhs = multiplicity(&induced, n, rho)?.l2;
            let res = restriction_multiplicities(emb, rho)?;
            let sum: BigRational = res
                .iter()
                .zip(&sub)
                .map(|(&m, l2)| l2 * BigRational::from_integer(m.into()))
                .sum();
            Ok(ReciprocityRow {
                rho,
                lhs,
                rhs: &ratio * sum,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ReciprocityReport { n, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::validate_complex;
    use crate::generators::{cycle_reflection, cycle_rotation, sierpinski};
    use crate::group::{CatalogGroup, Group};
    use crate::measure::empirical_measure;
    use std::sync::Arc;

    fn qq(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn hollow() -> Complex {
        validate_complex(&[vec![0, 1], vec![1, 2], vec![0, 2]], 4).unwrap()
    }

    #[test]
    fn point_and_triangle_multiplicities() {
        let point = GroupAction::trivial(validate_complex(&[vec![0]], 4).unwrap());
        let m = multiplicity(&point, 0, 0).unwrap();
        assert_eq!((m.multiplicity, m.l2.clone()), (1, qq(1, 1)));
        let rot = cycle_rotation(3, 3).unwrap();
        assert_eq!(multiplicity(&rot, 1, 0).unwrap().multiplicity, 1);
        assert_eq!(multiplicity(&rot, 1, 1).unwrap().multiplicity, 0);
        assert_eq!(multiplicity(&rot, 1, 2).unwrap().multiplicity, 0);
        assert_eq!(l2_betti(&hollow(), 1), qq(1, 3));
    }

    #[test]
    fn trivial_group_laplacian_is_plain() {
        let a = GroupAction::trivial(hollow());
        let m = rho_laplacian(&a, 0, 0).unwrap();
        let lap = hollow().laplacian(0).unwrap();
        for (r, c, v) in lap.entries() {
            assert_eq!(m.get(r, c).unwrap().to_rational().unwrap(), BigRational::from_integer((*v).into()));
        }
        assert_eq!(m.nnz(), lap.nnz());
    }

    #[test]
    fn rho_laplacian_is_self_adjoint() {
        let a = sierpinski(1).unwrap();
        for rho in 0..3 {
            let m = rho_laplacian(&a, 1, rho).unwrap();
            for (r, c, v) in m.entries() {
                assert_eq!(m.get(c, r).unwrap(), &v.conj());
            }
        }
    }

    #[test]
    fn sierpinski_multiplicities_sum_to_betti() {
        for n in 0..=3 {
            let a = sierpinski(n).unwrap();
            let all = multiplicities(&a, 1).unwrap();
            let total: usize = all.iter().map(|m| m.multiplicity).sum();
            assert_eq!(total, (3usize.pow(n as u32) - 1) / 2);
        }
    }

    #[test]
    fn compressed_kernel_matches_direct() {
        let a = sierpinski(3).unwrap();
        for rho in 0..3 {
            assert_eq!(
                kernel_dim_direct(&a, 1, rho).unwrap(),
                kernel_dim_compressed(&a, 1, rho).unwrap()
            );
        }
        let s3 = Arc::new(Group::catalog(CatalogGroup::Symmetric(3)).unwrap());
        let c3 = Arc::new(Group::catalog(CatalogGroup::Cyclic(3)).unwrap());
        let emb = SubgroupEmbedding::find(s3, c3).unwrap();
        let ind = induce_complex(&emb, &sierpinski(2).unwrap()).unwrap();
        for rho in 0..3 {
            for n in 0..=2 {
                assert_eq!(
                    kernel_dim_direct(&ind, n, rho).unwrap(),
                    kernel_dim_compressed(&ind, n, rho).unwrap()
                );
            }
        }
        let refl = cycle_reflection(9).unwrap();
        for rho in 0..2 {
            for n in 0..=1 {
                assert_eq!(
                    kernel_dim_direct(&refl, n, rho).unwrap(),
                    kernel_dim_compressed(&refl, n, rho).unwrap()
                );
            }
        }
    }

    #[test]
    fn triangle_spectrum_and_determinant() {
        let a = GroupAction::trivial(hollow());
        let nu = spectral_measure(&a, 0, 0).unwrap();
        assert_eq!(nu.atoms.len(), 2);
        assert_eq!(nu.atoms[0], (0.0, qq(1, 3)));
        assert!((nu.atoms[1].0 - 3.0).abs() < 1e-9);
        assert_eq!(nu.atoms[1].1, qq(2, 3));
        assert!((fk_determinant(&nu) - 3f64.powf(2.0 / 3.0)).abs() < 1e-9);
        let point = GroupAction::trivial(validate_complex(&[vec![0]], 4).unwrap());
        let nu = spectral_measure(&point, 0, 0).unwrap();
        assert_eq!(nu.atoms, vec![(0.0, qq(1, 1))]);
        assert_eq!(fk_determinant(&nu), 1.0);
    }

    #[test]
    fn block_spectrum_matches_dense() {
        let a = sierpinski(2).unwrap();
        for rho in 0..3 {
            let dense = dense_eigenvalues(&a, 1, rho).unwrap();
            let nu = spectral_measure(&a, 1, rho).unwrap();
            let mut expanded = Vec::new();
            for (l, m) in &nu.atoms {
                let count = (m * BigRational::from_integer(15.into())).to_integer();
                for _ in 0..count.to_usize().unwrap() {
                    expanded.push(*l);
                }
            }
            assert_eq!(expanded.len(), dense.len());
            for (x, y) in expanded.iter().zip(&dense) {
                assert!((x - y).abs() < 1e-6, "{x} vs {y}");
            }
            assert_eq!(nu.total_mass(), qq(27, 15));
        }
    }

    fn expand(nu: &SpectralMeasure) -> Vec<f64> {
        let mut out = Vec::new();
        for (l, m) in &nu.atoms {
            let count = (m * BigRational::from_integer(nu.normalization.into())).to_integer();
            out.extend(std::iter::repeat(*l).take(count.to_usize().unwrap()));
        }
        out
    }

    #[test]
    fn block_spectrum_matches_dense_without_freeness() {
        let s3 = Arc::new(Group::catalog(CatalogGroup::Symmetric(3)).unwrap());
        let c3 = Arc::new(Group::catalog(CatalogGroup::Cyclic(3)).unwrap());
        let emb = SubgroupEmbedding::find(s3.clone(), c3).unwrap();
        let induced = induce_complex(&emb, &sierpinski(1).unwrap()).unwrap();
        let square = validate_complex(&[vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 4], vec![0, 4, 1]], 8).unwrap();
        let d4 = Arc::new(Group::catalog(CatalogGroup::Dihedral(4)).unwrap());
        // element k is r^k, element 4 + k is s·r^k; the centre 0 is fixed
        let r = [0, 2, 3, 4, 1];
        let s = [0, 1, 4, 3, 2];
        let act: Vec<Vec<usize>> = (0..8)
            .map(|g| {
                let (k, flip) = (g % 4, g >= 4);
                (0..5)
                    .map(|v| {
                        let mut x = v;
                        for _ in 0..k {
                            x = r[x];
                        }
                        if flip {
                            s[x]
                        } else {
                            x
                        }
                    })
                    .collect()
            })
            .collect();
        let cone = GroupAction::new(d4, square, act).unwrap();
        for a in [induced, cycle_reflection(6).unwrap(), cone] {
            let chars = a.group().character_table().unwrap().len();
            for n in 0..=a.complex().dim() {
                for rho in 0..chars {
                    let dense = dense_eigenvalues(&a, n, rho).unwrap();
                    let block = expand(&spectral_measure(&a, n, rho).unwrap());
                    assert_eq!(block.len(), dense.len());
                    for (x, y) in block.iter().zip(&dense) {
                        assert!((x - y).abs() < 1e-6, "n={n} ρ={rho}: {x} vs {y}");
                    }
                }
            }
        }
    }

    #[test]
    fn moments_match_examples() {
        let a = GroupAction::trivial(hollow());
        assert_eq!(moment(&a, 0, 0, 0).unwrap(), qq(1, 1));
        assert_eq!(moment(&a, 0, 0, 1).unwrap(), qq(2, 1));
        assert!(matches!(moment(&a, 0, 0, 13), Err(Error::PowerCapExceeded(13, 12))));
        let s = sierpinski(2).unwrap();
        for rho in 0..3 {
            let nu = spectral_measure(&s, 1, rho).unwrap();
            for r in 0..=6 {
                let exact = moment(&s, 1, rho, r).unwrap().to_f64().unwrap();
                let approx = nu.moment(r);
                assert!((exact - approx).abs() <= 1e-6 * exact.abs().max(1.0), "r={r}");
            }
        }
    }

    #[test]
    fn local_moment_equals_moment() {
        let a = sierpinski(2).unwrap();
        for r in 0..=2 {
            let mu = empirical_measure(&a, 2 * r + 1).unwrap();
            for rho in 0..3 {
                assert_eq!(
                    local_moment(&mu, a.group(), 1, rho, r).unwrap(),
                    moment(&a, 1, rho, r).unwrap()
                );
            }
        }
        let mu = empirical_measure(&a, 2).unwrap();
        assert_eq!(
            local_moment(&mu, a.group(), 1, 0, 1).unwrap_err(),
            Error::RadiusTooSmall { have: 2, need: 3 }
        );
    }

    #[test]
    fn reciprocity_examples() {
        let c3 = Arc::new(Group::catalog(CatalogGroup::Cyclic(3)).unwrap());
        let free = SubgroupEmbedding::trivial(c3.clone());
        let rep = reciprocity_check(&free, &GroupAction::trivial(hollow()), 1).unwrap();
        assert!(rep.all_equal());
        assert!(rep.rows.iter().all(|r| r.lhs == qq(1, 9)));
        let s3 = Arc::new(Group::catalog(CatalogGroup::Symmetric(3)).unwrap());
        let emb = SubgroupEmbedding::find(s3, c3).unwrap();
        let rep = reciprocity_check(&emb, &cycle_rotation(3, 3).unwrap(), 1).unwrap();
        assert_eq!(rep.rows.len(), 3);
        assert!(rep.all_equal());
    }
}
