//! TT engine against a brute-force dense oracle.

use gtoqtt::{Core, TensorTrain, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_tt(rng: &mut ChaCha8Rng, n: usize, max_bond: usize) -> TensorTrain {
    let mut bonds = vec![1usize];
    for _ in 1..n {
        bonds.push(rng.gen_range(1..=max_bond));
    }
    bonds.push(1);
    let cores = (0..n)
        .map(|j| {
            let len = bonds[j] * 2 * bonds[j + 1];
            let data = (0..len)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            Core::new(bonds[j], bonds[j + 1], data).unwrap()
        })
        .collect();
    TensorTrain::new(cores).unwrap()
}

fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<C64> {
    (0..len)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Rank of the `2^k x 2^(n-k)` matricization, counting singular values
/// above `tol * s_max` (via an independent nalgebra SVD of a real embedding).
fn matricization_rank(v: &[C64], k: usize, tol: f64) -> usize {
    let rows = 1usize << k;
    let cols = v.len() / rows;
    // [[Re, -Im], [Im, Re]] doubles every singular value's multiplicity
    let m = nalgebra::DMatrix::from_fn(2 * rows, 2 * cols, |r, c| {
        let z = v[(r % rows) * cols + (c % cols)];
        match (r < rows, c < cols) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let s = m.singular_values();
    let smax = s.max();
    s.iter().filter(|&&x| x > tol * smax).count() / 2
}

#[test]
fn random_round_trip_256() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let v = random_vec(&mut rng, 256);
    let tt = TensorTrain::from_dense(&v, 0.0).unwrap();
    assert!(dist(&tt.to_dense().unwrap(), &v) < 1e-10);
    let w = random_vec(&mut rng, 16);
    let t16 = TensorTrain::from_dense(&w, 0.0).unwrap();
    assert!(dist(&t16.to_dense().unwrap(), &w) < 1e-12);
}

#[test]
fn svd_regression_matrix() {
    // nearly rank-deficient 4x32 unfolding that once produced a wrong SVD
    let text = include_str!("data/svd_regression_4x32.txt");
    let v: Vec<C64> = text
        .lines()
        .map(|l| {
            let mut it = l.split_whitespace().map(|x| x.parse::<f64>().unwrap());
            C64::new(it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    assert_eq!(v.len(), 128);
    let tt = TensorTrain::from_dense(&v, 0.0).unwrap();
    assert!(dist(&tt.to_dense().unwrap(), &v) < 1e-13);
    let r = tt.round(0.0).unwrap();
    assert!(dist(&r.to_dense().unwrap(), &v) < 1e-13);
}

#[test]
fn from_dense_tolerance_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for tol in [1e-3, 1e-2, 0.1] {
        let v = random_vec(&mut rng, 512);
        let tt = TensorTrain::from_dense(&v, tol).unwrap();
        assert!(dist(&tt.to_dense().unwrap(), &v) <= 9.0 * tol * norm(&v) + 1e-12);
    }
}

#[test]
fn scale_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let t = random_tt(&mut rng, 6, 3);
    let d = t.to_dense().unwrap();
    assert_eq!(t.scale(C64::new(1.0, 0.0)).to_dense().unwrap(), d);
    assert!(norm(&t.scale(C64::new(0.0, 0.0)).to_dense().unwrap()) == 0.0);
    let c = C64::new(2.0, 1.0);
    let want: Vec<C64> = d.iter().map(|x| x * c).collect();
    assert!(dist(&t.scale(c).to_dense().unwrap(), &want) < 1e-12);
    assert_eq!(t.scale(c).bond_dims(), t.bond_dims());
}

#[test]
fn hadamard_with_ones_and_rank_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let t = random_tt(&mut rng, 6, 3);
    let ones = TensorTrain::ones(6).unwrap();
    let h = t.hadamard(&ones).unwrap();
    assert!(dist(&h.to_dense().unwrap(), &t.to_dense().unwrap()) < 1e-13);
    let a = random_tt(&mut rng, 5, 1);
    let b = random_tt(&mut rng, 5, 1);
    assert_eq!(a.hadamard(&b).unwrap().max_bond_dim(), 1);
}

#[test]
fn tensor_product_profile() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = random_tt(&mut rng, 4, 3);
    let b = random_tt(&mut rng, 4, 3);
    let ab = a.tensor_product(&b);
    let mut want = a.bond_dims();
    want.push(1);
    want.extend(b.bond_dims());
    assert_eq!(ab.bond_dims(), want);
    let da = a.to_dense().unwrap();
    let db = b.to_dense().unwrap();
    let kron: Vec<C64> = da.iter().flat_map(|x| db.iter().map(move |y| x * y)).collect();
    assert!(dist(&ab.to_dense().unwrap(), &kron) < 1e-10);
}

#[test]
fn canonical_train_has_small_residuals() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let t = random_tt(&mut rng, 7, 4).left_canonicalize();
    let res = t.isometry_residuals();
    assert!(res[..res.len() - 1].iter().all(|&r| r < 1e-12));
    let again = t.left_canonicalize();
    assert!(again.isometry_residuals()[..res.len() - 1].iter().all(|&r| r < 1e-12));
    let last = &t.cores()[t.n_sites() - 1];
    let fro = last.data().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    assert!((fro - norm(&t.to_dense().unwrap())).abs() < 1e-10);
}

#[test]
fn cutoff_one_collapses_bonds() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let t = random_tt(&mut rng, 8, 4);
    let t = t.scale(C64::new(1.0 / t.norm(), 0.0));
    assert!(t.round(1.0).unwrap().bond_dims().iter().all(|&b| b == 1));
}

#[test]
fn sum_of_orthogonal_rank_one() {
    let k = 5;
    let mut acc = TensorTrain::basis(6, 0).unwrap();
    for i in 1..k {
        acc = acc.add(&TensorTrain::basis(6, 7 * i as u128).unwrap()).unwrap();
    }
    assert!(acc.max_bond_dim() <= k);
}

#[test]
fn max_bond_matches_dense_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let t = random_tt(&mut rng, 7, 3);
        let r = t.round(1e-12).unwrap();
        let d = t.to_dense().unwrap();
        let ranks: Vec<usize> = (1..7).map(|k| matricization_rank(&d, k, 1e-10)).collect();
        assert_eq!(r.bond_dims(), ranks);
    }
}

#[test]
fn dump_json_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let t = random_tt(&mut rng, 5, 3);
    let json = serde_json::to_string(&t.to_dump()).unwrap();
    let back = TensorTrain::from_dump(&serde_json::from_str(&json).unwrap()).unwrap();
    assert_eq!(back.to_dense().unwrap(), t.to_dense().unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip(seed in any::<u64>(), n in 1usize..=12, bond in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tt(&mut rng, n, bond);
        let d = t.to_dense().unwrap();
        let back = TensorTrain::from_dense(&d, 0.0).unwrap().to_dense().unwrap();
        prop_assert!(dist(&back, &d) < 1e-10 * norm(&d).max(1.0));
    }

    #[test]
    fn linearity(seed in any::<u64>(), n in 1usize..=10,
                 ar in -2.0..2.0f64, ai in -2.0..2.0f64, br in -2.0..2.0f64, bi in -2.0..2.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_tt(&mut rng, n, 3);
        let b = random_tt(&mut rng, n, 3);
        let (al, be) = (C64::new(ar, ai), C64::new(br, bi));
        let s = a.scale(al).add(&b.scale(be)).unwrap();
        let da = a.to_dense().unwrap();
        let db = b.to_dense().unwrap();
        let want: Vec<C64> = da.iter().zip(&db).map(|(x, y)| al * x + be * y).collect();
        prop_assert!(dist(&s.to_dense().unwrap(), &want) < 1e-10 * norm(&want).max(1.0));
        for ((sb, ab), bb) in s.bond_dims().iter().zip(a.bond_dims()).zip(b.bond_dims()) {
            prop_assert!(*sb <= ab + bb);
        }
    }

    #[test]
    fn canonicalization_preserves(seed in any::<u64>(), n in 2usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tt(&mut rng, n, 4);
        let c = t.left_canonicalize();
        let d = t.to_dense().unwrap();
        prop_assert!(dist(&c.to_dense().unwrap(), &d) < 1e-10 * norm(&d).max(1.0));
        prop_assert!((c.norm() - norm(&d)).abs() < 1e-10 * norm(&d).max(1.0));
        let res = c.isometry_residuals();
        prop_assert!(res[..n - 1].iter().all(|&r| r < 1e-10));
    }

    #[test]
    fn rounding_error_bound(seed in any::<u64>(), n in 2usize..=10, cut in 1e-4..0.5f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tt(&mut rng, n, 4);
        let r = t.round_with_report(cut).unwrap();
        let err = dist(&r.tt.to_dense().unwrap(), &t.to_dense().unwrap());
        prop_assert!(err <= r.error_bound() * (1.0 + 1e-9) + 1e-12);
        for (rb, tb) in r.tt.bond_dims().iter().zip(t.bond_dims()) {
            prop_assert!(*rb <= tb);
        }
    }

    #[test]
    fn hadamard_and_inner_product(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_tt(&mut rng, n, 3);
        let b = random_tt(&mut rng, n, 3);
        let da = a.to_dense().unwrap();
        let db = b.to_dense().unwrap();
        let h = a.hadamard(&b).unwrap();
        let want: Vec<C64> = da.iter().zip(&db).map(|(x, y)| x * y).collect();
        prop_assert!(dist(&h.to_dense().unwrap(), &want) < 1e-10 * norm(&want).max(1.0));
        for ((hb, ab), bb) in h.bond_dims().iter().zip(a.bond_dims()).zip(b.bond_dims()) {
            prop_assert!(*hb <= ab * bb);
        }
        let ip = a.inner_product(&b).unwrap();
        let dot: C64 = da.iter().zip(&db).map(|(x, y)| x.conj() * y).sum();
        prop_assert!((ip - dot).norm() < 1e-10 * (norm(&da) * norm(&db)).max(1.0));
        let aa = a.inner_product(&a).unwrap();
        prop_assert!(aa.re >= 0.0 && aa.im.abs() < 1e-10 * aa.re.max(1.0));
    }
}
