//! Worked examples with independently computed or frozen values.

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use equibs_core::canonical::{root_restrict, rooted_distance, rooted_isomorphic, RootedDistance, RootedGComplex};
use equibs_core::generators::{cycle_reflection, cycle_rotation, prism_rotation, sierpinski};
use equibs_core::induction::{induce_ensemble, induced_criterion_report, moved_set};
use equibs_core::measure::{convergence_report, empirical_measure, tv_distance, WeightedEnsemble};
use equibs_core::spectra::{local_moment, moment, rho_laplacian, spectral_measure};
use equibs_core::{validate_complex, CatalogGroup, Group, GroupAction, SubgroupEmbedding};

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// T_n rebuilt from its cells: lower-left corners (a,b) with a & b = 0.
fn corner_ball_oracle(n: usize, r: usize) -> Vec<usize> {
    let side = 1i64 << n;
    let cells: Vec<(i64, i64)> = (0..side)
        .flat_map(|a| (0..side - a).map(move |b| (a, b)))
        .filter(|&(a, b)| a & b == 0)
        .collect();
    let mut points: Vec<(i64, i64)> = cells
        .iter()
        .flat_map(|&(a, b)| [(a, b), (a + 1, b), (a, b + 1)])
        .collect();
    points.sort_unstable();
    points.dedup();
    let id = |p: (i64, i64)| points.binary_search(&p).unwrap();
    let mut edges = BTreeSet::new();
    let mut adj = vec![Vec::new(); points.len()];
    for &(a, b) in &cells {
        let t = [id((a, b)), id((a + 1, b)), id((a, b + 1))];
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            if edges.insert((t[i].min(t[j]), t[i].max(t[j]))) {
                adj[t[i]].push(t[j]);
                adj[t[j]].push(t[i]);
            }
        }
    }
    let d = bfs(&adj, id((0, 0)));
    let near = |v: usize| d[v] <= r;
    let vertices = (0..points.len()).filter(|&v| near(v)).count();
    let e = edges.iter().filter(|&&(x, y)| near(x) && near(y)).count();
    let triangles = cells
        .iter()
        .filter(|&&(a, b)| [id((a, b)), id((a + 1, b)), id((a, b + 1))].iter().all(|&v| near(v)))
        .count();
    vec![vertices, e, triangles]
}

fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::from([s]);
    d[s] = 0;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if d[w] == usize::MAX {
                d[w] = d[v] + 1;
                queue.push_back(w);
            }
        }
    }
    d
}

#[test]
fn corner_balls_match_lattice_oracle() {
    let t2 = sierpinski(2).unwrap();
    let ball = t2.complex().ball(&[0], 2).unwrap();
    assert_eq!(ball.complex.f_vector(), vec![6, 9, 3]);
    for n in 1..=4 {
        let t = sierpinski(n).unwrap();
        for r in 0..=5 {
            let ball = t.complex().ball(&[0], r).unwrap();
            let mut f = ball.complex.f_vector();
            f.resize(3, 0);
            assert_eq!(f, corner_ball_oracle(n, r), "n={n} r={r}");
        }
    }
}

#[test]
fn small_boundaries_and_laplacians() {
    let t1 = sierpinski(1).unwrap();
    let d2 = t1.complex().boundary_matrix(2).unwrap();
    assert_eq!((d2.rows(), d2.cols(), d2.rank()), (9, 3, 3));
    let tri = validate_complex(&[vec![0, 1], vec![1, 2], vec![0, 2]], 4).unwrap();
    let l0 = tri.laplacian(0).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let expected = if i == j { 2 } else { -1 };
            assert_eq!(*l0.get(i, j).unwrap(), expected);
        }
    }
    assert_eq!(3 - l0.rank(), 1);
    let l1 = t1.complex().laplacian(1).unwrap();
    assert_eq!((l1.rows(), 9 - l1.rank()), (9, 1));
}

#[test]
fn reflection_of_square_orbits() {
    let c2 = Arc::new(Group::catalog(CatalogGroup::Cyclic(2)).unwrap());
    let square = validate_complex(&[vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]], 4).unwrap();
    let a = GroupAction::new(c2, square, vec![vec![0, 1, 2, 3], vec![0, 3, 2, 1]]).unwrap();
    assert_eq!(a.orbits(), vec![vec![0], vec![1, 3], vec![2]]);
}

#[test]
fn permuted_triangles_keep_all_components() {
    let c3 = Arc::new(Group::catalog(CatalogGroup::Cyclic(3)).unwrap());
    let k = validate_complex(&[vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]], 4).unwrap();
    let act = (0..3).map(|s| (0..9).map(|v| (v + 3 * s) % 9).collect()).collect();
    let a = GroupAction::new(c3, k, act).unwrap();
    let rc = root_restrict(&a, 4).unwrap();
    assert_eq!(rc.complex().vertex_count(), 9);
    assert_eq!(rc.root(), &[1, 4, 7]);
}

#[test]
fn corner_distance_between_t2_and_t3() {
    let x = root_restrict(&sierpinski(2).unwrap(), 0).unwrap();
    let y = root_restrict(&sierpinski(3).unwrap(), 0).unwrap();
    let d = rooted_distance(&x, &y, 8).unwrap();
    // oracle: first radius at which the balls stop being isomorphic
    let first_diff = (0..=8)
        .find(|&r| !rooted_isomorphic(&x.ball(r), &y.ball(r)).unwrap())
        .unwrap();
    assert_eq!(d, RootedDistance::Exact(first_diff - 1));
    assert_eq!(d, RootedDistance::Exact(1));
}

#[test]
fn sierpinski_tv_decreases() {
    let family: Vec<_> = (2..=5).map(|n| (n, sierpinski(n).unwrap())).collect();
    let rep = convergence_report(&family, &[1]).unwrap();
    let tv: Vec<BigRational> = rep.rows.iter().map(|r| r.tv_to_next.clone()).collect();
    assert!(tv.iter().all(|t| t.is_positive() && *t < BigRational::one()));
    assert!(tv.windows(2).all(|w| w[1] < w[0]));
    let family: Vec<_> = (3..=7).map(|n| (n, sierpinski(n).unwrap())).collect();
    let rep = convergence_report(&family, &[2]).unwrap();
    let tv: Vec<f64> = rep.rows.iter().map(|r| r.tv_to_next.to_f64().unwrap()).collect();
    assert!(tv.windows(2).all(|w| w[1] < w[0]), "{tv:?}");
    assert!(tv[3] < 0.05);
}

#[test]
fn induced_sierpinski_measure_is_close() {
    let c3 = Arc::new(Group::catalog(CatalogGroup::Cyclic(3)).unwrap());
    let emb = SubgroupEmbedding::trivial(c3);
    for n in 2..=6 {
        let t = sierpinski(n).unwrap();
        let plain = GroupAction::trivial(t.complex().clone());
        let ens = WeightedEnsemble::from_action(&plain).unwrap();
        let induced = induce_ensemble(&emb, &ens).unwrap();
        let tv = tv_distance(&induced.to_measure(1).unwrap(), &empirical_measure(&t, 1).unwrap()).unwrap();
        // at radius 1 the two agree once every x has d(x, σx) ≥ 4
        let expected = if n == 2 { q(4, 5) } else { BigRational::zero() };
        assert_eq!(tv, expected, "n={n}");
    }
}

#[test]
fn trivial_rho_laplacian_of_rotated_triangle() {
    let a = cycle_rotation(3, 3).unwrap();
    let m = rho_laplacian(&a, 0, 0).unwrap();
    // Δ_0 + I − J/3
    for i in 0..3 {
        for j in 0..3 {
            let lap = if i == j { q(2, 1) } else { q(-1, 1) };
            let id = if i == j { q(1, 1) } else { q(0, 1) };
            let expected = lap + id - q(1, 3);
            let got = m.get(i, j).map(|c| c.to_rational().unwrap()).unwrap_or_default();
            assert_eq!(got, expected);
        }
    }
}

#[test]
fn filled_triangle_edge_mass() {
    let t0 = sierpinski(0).unwrap();
    assert_eq!(spectral_measure(&t0, 1, 0).unwrap().total_mass(), q(1, 1));
}

#[test]
fn sierpinski_moments_settle() {
    for rho in 0..3 {
        for r in 1..=6 {
            let m: Vec<f64> = (2..=6)
                .map(|n| moment(&sierpinski(n).unwrap(), 1, rho, r).unwrap().to_f64().unwrap())
                .collect();
            let gaps: Vec<f64> = m.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
            assert!(gaps.windows(2).all(|g| g[1] < g[0]), "ρ={rho} r={r}: {m:?}");
        }
    }
}

#[test]
fn local_moment_at_r0_counts_simplices() {
    for a in [sierpinski(2).unwrap(), prism_rotation(4).unwrap(), cycle_reflection(7).unwrap()] {
        let mu = empirical_measure(&a, 1).unwrap();
        for n in 0..=a.complex().dim() {
            // per atom: simplices touching the root orbit over |orbit|(n+1)
            let mut expected = BigRational::zero();
            for (code, w) in mu.atoms() {
                let rc: RootedGComplex = equibs_core::canonical::decode_rooted(code, a.group()).unwrap();
                let touching = rc
                    .complex()
                    .simplices(n)
                    .iter()
                    .map(|s| s.vertices().iter().filter(|v| rc.root().contains(v)).count())
                    .sum::<usize>();
                expected += w * q(touching as i64, (rc.root().len() * (n + 1)) as i64);
            }
            assert_eq!(local_moment(&mu, a.group(), n, 0, 0).unwrap(), expected);
        }
    }
}

#[test]
fn rotation_and_reflection_families() {
    let rot = cycle_rotation(12, 3).unwrap();
    assert!(moved_set(&rot, 1, 3).is_empty());
    assert_eq!(moved_set(&cycle_rotation(3, 3).unwrap(), 1, 1).len(), 3);
    let family: Vec<_> = (1..=6).map(|j| (j, cycle_rotation(3 << j, 3).unwrap())).collect();
    assert!(induced_criterion_report(&family, &[0], 4, 0.05).unwrap().consistent);
    for j in 3..=8 {
        let m = 1usize << j;
        let refl = cycle_reflection(m).unwrap();
        for c in 1..=4 {
            assert!(moved_set(&refl, 1, c).len() <= 2 * c + 2, "m={m} C={c}");
        }
    }
    assert_eq!(moved_set(&cycle_reflection(4).unwrap(), 1, 0), vec![0, 2]);
    assert_eq!(moved_set(&cycle_reflection(5).unwrap(), 1, 0), vec![0]);
}

#[test]
fn prism_measures_stabilize() {
    let family: Vec<_> = (5..=9).map(|m| (m, prism_rotation(m).unwrap())).collect();
    let rep = convergence_report(&family, &[1]).unwrap();
    assert!(rep.rows.iter().all(|r| r.tv_to_next.is_zero()));
    for m in 3..=6 {
        let p = prism_rotation(m).unwrap();
        assert_eq!(moved_set(&p, 1, 1).len(), 3 * m);
    }
}
