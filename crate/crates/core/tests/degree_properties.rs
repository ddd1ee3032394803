mod common;

use common::{gen, query_points, FREE_KINDS};
use plopen::degree::{
    degree, degree_at_regular, homotopy_degree_constant, is_regular_value, local_degree,
    uniform_samples,
};
use plopen::generators::{oracle_fiber_count, oracle_signed_count, FiberCount, GenKind};
use plopen::linalg::{rat, ratio, Rational, Vector};
use plopen::openness::coherently_oriented;
use plopen::polyhedra::{segment_avoids_sets, SimplicialComplex};
use plopen::{Error, PLMap};
use proptest::prelude::*;

#[test]
fn fold_degrees_match_brute_force() {
    let f = gen(GenKind::Fold1d, 1, 0);
    let half = vec![ratio(1, 2)];
    let c = degree_at_regular(&f, &half).unwrap();
    assert_eq!(c.degree, 0);
    assert_eq!(oracle_signed_count(&f, &half), Some(0));
    assert_eq!(oracle_fiber_count(&f, &half), FiberCount::Finite(2));
    let c = degree(&f, &[rat(0)]).unwrap();
    assert_eq!(c.degree, 0);
    assert!(c.perturbed());
    assert_eq!(oracle_signed_count(&f, &c.regular_point), Some(0));
}

#[test]
fn doubling_degree_is_two() {
    let f = gen(GenKind::Doubling2d, 2, 0);
    let y = vec![ratio(1, 5), ratio(1, 7)];
    let c = degree(&f, &y).unwrap();
    assert_eq!(c.degree, 2);
    assert_eq!(oracle_signed_count(&f, &y), Some(2));
    // the cone point
    let origin = vec![rat(0), rat(0)];
    assert!(!is_regular_value(&f, &origin));
    let c = degree(&f, &origin).unwrap();
    assert!(c.perturbed());
    assert_eq!(c.degree, 2);
    assert_eq!(oracle_signed_count(&f, &c.regular_point), Some(2));
    assert_eq!(local_degree(&f, &origin).unwrap(), 2);
}

#[test]
fn identity_degree_and_local_degree() {
    for n in 1..=3 {
        let f = gen(GenKind::Identity, n, 0);
        let y: Vector = (0..n).map(|i| ratio(1, 3 + i as i64)).collect();
        assert_eq!(degree(&f, &y).unwrap().degree, 1);
        assert_eq!(local_degree(&f, &y).unwrap(), 1);
        let origin = vec![rat(0); n];
        assert_eq!(degree(&f, &origin).unwrap().degree, 1);
        assert_eq!(local_degree(&f, &origin).unwrap(), 1);
    }
    assert_eq!(local_degree(&gen(GenKind::Fold1d, 1, 0), &[rat(0)]).unwrap(), 0);
}

fn identity_on(f: &PLMap) -> PLMap {
    f.with_images(f.domain().vertices().to_vec()).unwrap()
}

#[test]
fn homotopy_identity_to_shear_is_constant() {
    let shear = gen(GenKind::Shear, 2, 0);
    let id = identity_on(&shear);
    let gamma = vec![ratio(3, 2), rat(1)];
    let v = homotopy_degree_constant(&id, &shear, (&gamma, &gamma), &uniform_samples(33)).unwrap();
    assert!(v.constant);
    assert_eq!(v.degrees.len(), 33);
    assert!(v.degrees.iter().all(|(_, d)| *d == 1));
}

#[test]
fn homotopy_through_reflection_is_flagged() {
    let id = symmetric_box();
    let reflected: Vec<Vector> = id
        .images()
        .iter()
        .map(|p| p.iter().map(|x| -x).collect())
        .collect();
    let g = id.with_images(reflected).unwrap();
    let center = vec![rat(0), rat(0)];
    match homotopy_degree_constant(&id, &g, (&center, &center), &uniform_samples(33)) {
        Err(Error::HomotopyHypothesis { t, .. }) => assert_eq!(t, ratio(1, 2)),
        other => panic!("expected a violation at t = 1/2, got {other:?}"),
    }
}

/// The default 2-D box, checked to be symmetric under `x ↦ -x`.
fn symmetric_box() -> PLMap {
    let f = gen(GenKind::Identity, 2, 0);
    let mut v = f.domain().vertices().to_vec();
    let mut neg: Vec<Vector> = v.iter().map(|p| p.iter().map(|x| -x).collect()).collect();
    v.sort();
    neg.sort();
    assert_eq!(v, neg);
    f
}

/// Restriction of `f` to a subset of its cells.
fn restrict(f: &PLMap, cells: &[usize]) -> PLMap {
    let k = f.domain();
    let mut ids: Vec<usize> = cells.iter().flat_map(|&c| k.cell(c).vertices().to_vec()).collect();
    ids.sort_unstable();
    ids.dedup();
    let vertices = ids.iter().map(|&v| k.vertex(v).clone()).collect();
    let images = ids.iter().map(|&v| f.image(v).clone()).collect();
    let local = cells
        .iter()
        .map(|&c| k.cell(c).vertices().iter().map(|v| ids.binary_search(v).unwrap()).collect())
        .collect();
    PLMap::build(SimplicialComplex::validate(k.dim(), vertices, local).unwrap(), images).unwrap()
}

fn finite_instance() -> impl Strategy<Value = PLMap> {
    (prop_oneof![Just(0usize), Just(2), Just(3)], 1usize..=3, 0u64..1000)
        .prop_map(|(k, n, seed)| gen(FREE_KINDS[k], n, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn certificates_are_self_consistent(f in finite_instance(), seed in 0u64..1000) {
        for y in query_points(&f, 20, seed) {
            let Ok(c) = degree(&f, &y) else { continue };
            let sum: i64 = c.fiber.iter().map(|(_, s)| s.as_i32() as i64).sum();
            prop_assert_eq!(c.degree, sum);
            prop_assert!(is_regular_value(&f, &c.regular_point));
            prop_assert!(c.path_evidence.avoids_boundary_image);
            for (x, _) in &c.fiber {
                prop_assert_eq!(f.eval(x).unwrap(), c.regular_point.clone());
            }
            prop_assert!(c.degree.unsigned_abs() as usize <= f.domain().num_cells());
            prop_assert_eq!(Some(c.degree), oracle_signed_count(&f, &c.regular_point));
            if coherently_oriented(&f) {
                let s = f.piece(0).det_sign.as_i32() as i64;
                prop_assert_eq!(c.degree, s * c.fiber.len() as i64);
            }
        }
    }

    #[test]
    fn degree_is_locally_constant(f in finite_instance(), seed in 0u64..1000) {
        let obstacles: Vec<Vec<Vector>> = f.boundary_images().into_iter().map(|(_, p)| p).collect();
        let ys: Vec<Vector> = query_points(&f, 12, seed)
            .into_iter()
            .filter(|y| is_regular_value(&f, y) && degree(&f, y).is_ok())
            .collect();
        for a in &ys {
            for b in &ys {
                if segment_avoids_sets(a, b, &obstacles) {
                    prop_assert_eq!(degree(&f, a).unwrap().degree, degree(&f, b).unwrap().degree);
                }
            }
        }
    }

    #[test]
    fn degree_adds_over_a_split(f in finite_instance(), seed in 0u64..1000) {
        let k = f.domain();
        prop_assume!(k.num_cells() >= 2);
        // split by the sign of the first barycenter coordinate
        let (left, right): (Vec<usize>, Vec<usize>) = (0..k.num_cells())
            .partition(|&c| k.barycenter_of(k.cell(c))[0] < Rational::from_integer(0.into()));
        prop_assume!(!left.is_empty() && !right.is_empty());
        let (fl, fr) = (restrict(&f, &left), restrict(&f, &right));
        for y in query_points(&f, 10, seed) {
            let (Ok(dl), Ok(dr), Ok(d)) = (degree(&fl, &y), degree(&fr, &y), degree(&f, &y)) else {
                continue;
            };
            prop_assert_eq!(d.degree, dl.degree + dr.degree);
        }
    }
}
