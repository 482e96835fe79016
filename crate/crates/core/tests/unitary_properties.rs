use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use projrep::skew::{self, SkewMatrixZm};
use projrep::unitary::{
    commutant_dimension, construct_tuple, eigen_invariants, extract_class, power_scalar_residual,
    CMatrix, ConstructOptions, UnitaryTuple, C64, DEFAULT_TOL, EIGEN_TOL,
};

/// Haar-distributed unitary: Q from the QR factorization of a complex
/// Gaussian matrix, with the phases of diag(R) divided out.
fn random_unitary(dim: usize, rng: &mut StdRng) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(
            StandardNormal.sample(&mut *rng),
            StandardNormal.sample(&mut *rng),
        )
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

fn admissible_class(max_n: usize, max_m: u64) -> impl Strategy<Value = SkewMatrixZm> {
    (1..=max_n, 1..=max_m)
        .prop_flat_map(|(n, m)| {
            proptest::collection::vec(0..m, n * (n - 1) / 2).prop_map(move |u| (n, m, u))
        })
        .prop_map(|(n, m, u)| SkewMatrixZm::new(n, m, u).unwrap())
        .prop_filter("sigma(D) must divide m", |d| {
            d.m() % skew::sigma(d).unwrap() == 0
        })
}

fn power(a: &CMatrix, k: u64) -> CMatrix {
    (0..k).fold(CMatrix::identity(a.nrows(), a.ncols()), |p, _| p * a)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn extraction_is_conjugation_invariant(d in admissible_class(3, 6), seed in any::<u64>()) {
        let t = construct_tuple(&d, &ConstructOptions::default()).unwrap();
        let base = commutant_dimension(&t, DEFAULT_TOL).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        for _ in 0..100 {
            let u = random_unitary(t.dim(), &mut rng);
            let c = t.conjugated(&u).unwrap();
            prop_assert_eq!(&extract_class(&c, d.m(), DEFAULT_TOL).unwrap().d, &d);
        }
        let c = t.conjugated(&random_unitary(t.dim(), &mut rng)).unwrap();
        prop_assert_eq!(commutant_dimension(&c, DEFAULT_TOL).unwrap(), base);
        if skew::sigma(&d).unwrap() == d.m() {
            let before = eigen_invariants(&t, &d, EIGEN_TOL).unwrap();
            let after = eigen_invariants(&c, &d, EIGEN_TOL).unwrap();
            for ((x, y), r) in before.coords.iter().zip(&after.coords).zip(&before.orders) {
                let gap = (x - y).abs();
                prop_assert!(gap < 1e-8 || (gap - 1.0 / *r as f64).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn power_law_when_irreducible(d in admissible_class(4, 8)) {
        prop_assume!(skew::sigma(&d).unwrap() == d.m());
        let t = construct_tuple(&d, &ConstructOptions::default()).unwrap();
        for (a, r) in t.matrices().iter().zip(d.coordinate_orders()) {
            prop_assert!(power_scalar_residual(a, r) <= 1e-9);
        }
    }

    #[test]
    fn torsion_contract(d in admissible_class(4, 8), multipliers in proptest::collection::vec(1u64..4, 0..=4)) {
        let s = multipliers.len().min(d.n());
        let torsion: Vec<u64> = d.coordinate_orders().iter().zip(&multipliers).map(|(r, k)| r * k).collect();
        let opts = ConstructOptions { scalars: None, torsion: Some(torsion.clone()) };
        let t = construct_tuple(&d, &opts).unwrap();
        let id = CMatrix::identity(t.dim(), t.dim());
        for (a, &k) in t.matrices().iter().zip(&torsion).take(s) {
            prop_assert!((power(a, k) - &id).norm() <= 1e-8);
        }
        prop_assert_eq!(extract_class(&t, d.m(), DEFAULT_TOL).unwrap().d, d);
    }
}

#[test]
fn explicit_scalars_on_torsion_must_be_roots() {
    let d = SkewMatrixZm::new(2, 4, vec![2]).unwrap();
    let bad = ConstructOptions {
        scalars: Some(vec![vec![0.1, 0.0], vec![0.0, 0.0]]),
        torsion: Some(vec![2]),
    };
    assert!(construct_tuple(&d, &bad).is_err());
    let good = ConstructOptions {
        scalars: Some(vec![vec![0.5, 0.0], vec![0.0, 0.25]]),
        torsion: Some(vec![2]),
    };
    let t = construct_tuple(&d, &good).unwrap();
    let a = &t.matrices()[0];
    assert!((power(a, 2) - CMatrix::identity(4, 4)).norm() <= 1e-8);
}

#[test]
fn random_unitary_is_unitary() {
    let mut rng = StdRng::seed_from_u64(1);
    let u = random_unitary(7, &mut rng);
    assert!(UnitaryTuple::new(vec![u]).is_ok());
}
