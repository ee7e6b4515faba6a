//! Equivariant Benjamini-Schramm statistics of finite simplicial G-complexes.

pub mod canonical;
pub mod complex;
pub mod cyclotomic;
pub mod error;
pub mod generators;
pub mod group;
pub mod induction;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod spectra;

pub use canonical::{
    canonical_code, decode, doubly_canonical_code, rooted_distance, rooted_isomorphic, CanonicalCode,
    DoublyRootedGComplex, RootedDistance, RootedGComplex,
};
pub use complex::{validate_complex, Ball, Complex, ComplexFile, Distance, Simplex};
pub use cyclotomic::Cyclotomic;
pub use error::{Error, Result};
pub use generators::{Family, FamilySpec};
pub use group::{CatalogGroup, CharacterTable, Group, GroupAction, OrbitType, SubgroupEmbedding};
pub use induction::{induce_complex, induce_ensemble, induced_criterion_report, moved_set, CriterionReport};
pub use linalg::{IntMatrix, SparseMatrix};
pub use measure::{
    check_unimodular, convergence_report, empirical_measure, tv_distance, EmpiricalMeasure, UnimodularReport,
    WeightedEnsemble,
};
pub use spectra::{
    fk_determinant, l2_betti, local_moment, moment, multiplicity, reciprocity_check, rho_laplacian,
    spectral_measure, MultiplicityResult, ReciprocityReport, SpectralMeasure,
};
