use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

use equibs_core::canonical::{canonical_code, decode_rooted, root_restrict, rooted_isomorphic};
use equibs_core::generators::random_gcomplex;
use equibs_core::group::restriction_multiplicities;
use equibs_core::induction::induce_complex;
use equibs_core::measure::{empirical_measure, tv_distance};
use equibs_core::spectra::{moment, multiplicities, spectral_measure};
use equibs_core::{CatalogGroup, Complex, Cyclotomic, Distance, Group, GroupAction, SubgroupEmbedding};

const GROUPS: [CatalogGroup; 6] = [
    CatalogGroup::Cyclic(1),
    CatalogGroup::Cyclic(2),
    CatalogGroup::Cyclic(3),
    CatalogGroup::Cyclic(4),
    CatalogGroup::Symmetric(3),
    CatalogGroup::Klein4,
];

fn raw_complex() -> impl Strategy<Value = Complex> {
    (1usize..10).prop_flat_map(|nv| {
        prop::collection::vec(prop::collection::btree_set(0..nv, 1..4), 0..12).prop_map(move |facets| {
            let facets: Vec<Vec<usize>> = facets.into_iter().map(|s| s.into_iter().collect()).collect();
            Complex::new(nv, &facets, 16).unwrap()
        })
    })
}

fn action() -> impl Strategy<Value = GroupAction> {
    (0..GROUPS.len(), 2usize..14, 2usize..6, any::<u64>()).prop_map(|(g, v, d, seed)| {
        random_gcomplex(v, d, Arc::new(Group::catalog(GROUPS[g]).unwrap()), seed).unwrap()
    })
}

fn cyclotomic(order: u32) -> impl Strategy<Value = Cyclotomic> {
    prop::collection::vec((-5i64..6, 1i64..4), order as usize).prop_map(move |cs| {
        Cyclotomic::from_coeffs(
            order,
            cs.into_iter()
                .map(|(a, b)| BigRational::new(BigInt::from(a), BigInt::from(b)))
                .collect(),
        )
    })
}

fn q(a: usize, b: usize) -> BigRational {
    BigRational::new(a.into(), b.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn boundary_squares_to_zero(k in raw_complex()) {
        for n in 2..=k.dim() {
            let a = k.boundary_matrix(n - 1).unwrap();
            let b = k.boundary_matrix(n).unwrap();
            prop_assert!(a.matmul(&b).is_zero());
        }
        for n in 0..=k.dim() {
            prop_assert!(k.laplacian(n).unwrap().is_symmetric());
        }
    }

    #[test]
    fn euler_poincare(k in raw_complex()) {
        let alternating: i64 = (0..=k.dim())
            .map(|n| if n % 2 == 0 { k.betti(n) as i64 } else { -(k.betti(n) as i64) })
            .sum();
        prop_assert_eq!(alternating, k.euler_characteristic());
        let components = k.components().into_iter().max().map_or(0, |c| c + 1);
        prop_assert_eq!(k.betti(0), components);
    }

    #[test]
    fn balls_are_distance_sublevel_sets(k in raw_complex(), r in 0usize..4) {
        let ball = k.ball(&[0], r).unwrap();
        let dist = k.distances_from(&[0], None);
        for (v, d) in dist.iter().enumerate() {
            let inside = matches!(d, Distance::Finite(x) if *x <= r);
            prop_assert_eq!(ball.old_to_new[v].is_some(), inside);
        }
    }

    #[test]
    fn cyclotomic_field_axioms(a in cyclotomic(12), b in cyclotomic(12), c in cyclotomic(12)) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!((&a * &b).galois(5), &a.galois(5) * &b.galois(5));
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv(), Cyclotomic::one(12));
        }
    }

    #[test]
    fn orbit_stabilizer(a in action()) {
        let order = a.group().order();
        let orbits = a.orbits();
        let covered: usize = orbits.iter().map(Vec::len).sum();
        prop_assert_eq!(covered, a.complex().vertex_count());
        for o in &orbits {
            prop_assert_eq!(o.len() * a.stabilizer(o[0]).len(), order);
        }
    }

    #[test]
    fn restriction_preserves_degree(g in 0..GROUPS.len(), h in 0..GROUPS.len()) {
        let big = Arc::new(Group::catalog(GROUPS[g]).unwrap());
        let small = Arc::new(Group::catalog(GROUPS[h]).unwrap());
        if let Ok(emb) = SubgroupEmbedding::find(big.clone(), small.clone()) {
            let tg = big.character_table().unwrap();
            let th = small.character_table().unwrap();
            for rho in 0..tg.len() {
                let m = restriction_multiplicities(&emb, rho).unwrap();
                let dim: usize = m.iter().enumerate().map(|(t, &k)| k * th.degree(t)).sum();
                prop_assert_eq!(dim, tg.degree(rho));
            }
        }
    }

    #[test]
    fn canonical_code_round_trips(a in action(), pick in any::<prop::sample::Index>()) {
        let v = pick.index(a.complex().vertex_count());
        let rc = root_restrict(&a, v).unwrap();
        let code = canonical_code(&rc).unwrap();
        let back = decode_rooted(&code, a.group()).unwrap();
        prop_assert!(rooted_isomorphic(&rc, &back).unwrap());
        prop_assert_eq!(canonical_code(&back).unwrap(), code);
    }

    #[test]
    fn canonical_code_ignores_labels(a in action(), pick in any::<prop::sample::Index>(), perm_seed in any::<u64>()) {
        use rand::{seq::SliceRandom, SeedableRng};
        let nv = a.complex().vertex_count();
        let v = pick.index(nv);
        let mut perm: Vec<usize> = (0..nv).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(perm_seed));
        let b = a.relabel(&perm).unwrap();
        prop_assert_eq!(
            canonical_code(&root_restrict(&a, v).unwrap()).unwrap(),
            canonical_code(&root_restrict(&b, perm[v]).unwrap()).unwrap()
        );
    }

    #[test]
    fn measures_are_probability_vectors(a in action(), r in 0usize..3) {
        let mu = empirical_measure(&a, r).unwrap();
        let total: BigRational = mu.atoms().values().cloned().sum();
        prop_assert!(total.is_one());
        prop_assert!(tv_distance(&mu, &mu).unwrap().is_zero());
    }

    #[test]
    fn tv_is_a_metric(seeds in prop::array::uniform3(any::<u64>()), g in 0..GROUPS.len(), r in 0usize..3) {
        let group = Arc::new(Group::catalog(GROUPS[g]).unwrap());
        let mus: Vec<_> = seeds
            .iter()
            .map(|&s| empirical_measure(&random_gcomplex(10, 4, group.clone(), s).unwrap(), r).unwrap())
            .collect();
        let d = |i: usize, j: usize| tv_distance(&mus[i], &mus[j]).unwrap();
        prop_assert_eq!(d(0, 1), d(1, 0));
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2));
        prop_assert!(d(0, 1) <= BigRational::one());
    }

    #[test]
    fn induction_multiplies_vertices(g in 0..GROUPS.len(), h in 0..GROUPS.len(), v in 2usize..10, seed in any::<u64>()) {
        let big = Arc::new(Group::catalog(GROUPS[g]).unwrap());
        let small = Arc::new(Group::catalog(GROUPS[h]).unwrap());
        if let Ok(emb) = SubgroupEmbedding::find(big, small.clone()) {
            let k = random_gcomplex(v, 3, small, seed).unwrap();
            let ind = induce_complex(&emb, &k).unwrap();
            prop_assert_eq!(ind.complex().vertex_count(), emb.index() * k.complex().vertex_count());
            prop_assert_eq!(ind.orbits().len(), k.orbits().len());
        }
    }

    #[test]
    fn multiplicities_account_for_betti(a in action()) {
        let table = a.group().character_table().unwrap();
        for n in 0..=a.complex().dim() {
            let all = multiplicities(&a, n).unwrap();
            let weighted: usize = all.iter().enumerate().map(|(rho, m)| table.degree(rho) * m.multiplicity).sum();
            prop_assert_eq!(weighted, a.complex().betti(n));
        }
    }

    #[test]
    fn spectral_mass_and_moments(a in action(), pick in any::<prop::sample::Index>()) {
        let table = a.group().character_table().unwrap();
        let rho = pick.index(table.len());
        let nv = a.complex().vertex_count();
        for n in 0..=a.complex().dim() {
            let nu = spectral_measure(&a, n, rho).unwrap();
            let mass = q(a.complex().count(n), nv);
            prop_assert_eq!(&nu.total_mass(), &mass);
            prop_assert_eq!(moment(&a, n, rho, 0).unwrap(), mass);
            for r in 1..=3 {
                let exact = moment(&a, n, rho, r).unwrap().to_f64().unwrap();
                prop_assert!((exact - nu.moment(r)).abs() <= 1e-6 * exact.abs().max(1.0));
            }
        }
    }

    #[test]
    fn random_generator_contract(g in 0..GROUPS.len(), v in 1usize..20, d in 1usize..6, seed in any::<u64>()) {
        let group = Arc::new(Group::catalog(GROUPS[g]).unwrap());
        let a = random_gcomplex(v, d, group.clone(), seed).unwrap();
        let b = random_gcomplex(v, d, group, seed).unwrap();
        prop_assert!(a.complex().max_degree() <= d);
        prop_assert_eq!(a.complex(), b.complex());
        prop_assert_eq!(a.table(), b.table());
    }
}
