//! Orbital assembly: overlaps, canonical orthogonalization, summation and
//! error bookkeeping against dense and closed-form oracles.

use std::f64::consts::{E, PI};

use gtoqtt::gauss_pw::{choose_cutoff, norm_const, PlaneWaveGrid, PrimitiveGaussian};
use gtoqtt::orbital::*;
use gtoqtt::{Error, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn s_at(x: f64, gamma: f64) -> PrimitiveGaussian {
    PrimitiveGaussian::new([x, 0.0, 0.0], gamma, [0, 0, 0]).unwrap()
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[test]
fn overlap_examples() {
    let grid = PlaneWaveGrid::new(20.0, 16.5).unwrap();
    let (s, _) = overlap_matrix(&[s_at(0.0, 1.0)], &grid, 1e-6).unwrap();
    assert!((s.s[(0, 0)] - c(1.0)).norm() < 1e-8);

    let (s, _) = overlap_matrix(&[s_at(0.5, 1.0), s_at(0.5, 1.0)], &grid, 1e-6).unwrap();
    assert!((s.s[(0, 1)] - c(1.0)).norm() < 1e-8);

    let (s, _) = overlap_matrix(&[s_at(0.0, 1.0), s_at(2.0, 1.0)], &grid, 1e-6).unwrap();
    // closed form for equal exponents: exp(-gamma d^2 / 2)
    assert!((s.s[(0, 1)] - c((-2.0f64).exp())).norm() < 1e-6, "{}", s.s[(0, 1)]);
    assert!(s.hermitian_defect() < 1e-10);
    for i in 0..2 {
        assert!((s.s[(i, i)].re - 1.0).abs() < 1e-8);
    }
}

#[test]
fn whole_line_overlap_by_quadrature() {
    // p_x on one centre against d_xx-type on another, 3-point-per-axis product
    let a = PrimitiveGaussian::new([0.2, -0.4, 0.1], 0.9, [1, 0, 2]).unwrap();
    let b = PrimitiveGaussian::new([-0.5, 0.3, 0.6], 1.7, [2, 1, 0]).unwrap();
    let mut want = 1.0;
    for ax in 0..3 {
        let n = 6000;
        let h = 24.0 / n as f64;
        let mut acc = 0.0;
        for j in 0..=n {
            let x = -12.0 + j as f64 * h;
            let ga = norm_const(a.ang[ax], a.gamma)
                * (x - a.center[ax]).powi(a.ang[ax] as i32)
                * (-a.gamma * (x - a.center[ax]).powi(2)).exp();
            let gb = norm_const(b.ang[ax], b.gamma)
                * (x - b.center[ax]).powi(b.ang[ax] as i32)
                * (-b.gamma * (x - b.center[ax]).powi(2)).exp();
            acc += ga * gb * h;
        }
        want *= acc;
    }
    assert!((gaussian_overlap(&a, &b) - want).abs() < 1e-12);
}

#[test]
fn canonical_orthogonalization_examples() {
    let s = OverlapMatrix::from_real(&DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0])).unwrap();
    let b = canonical_orthogonalize(&s, 0.1).unwrap();
    assert_eq!(b.kept, 2);
    // eigenvectors (1, -1)/sqrt2 at 0.5 and (1, 1)/sqrt2 at 1.5
    let x = &b.x_tilde;
    assert!((x[(0, 0)].norm() - 1.0).abs() < 1e-12);
    assert!((x[(0, 1)].norm() - (1.0 / 3.0f64).sqrt()).abs() < 1e-12);
    assert!(b.orthonormality_defect(&s) < 1e-12);
    assert_eq!(canonical_orthogonalize(&s, 0.6).unwrap().kept, 1);

    let id = OverlapMatrix::from_real(&DMatrix::identity(3, 3)).unwrap();
    let b = canonical_orthogonalize(&id, 1.0).unwrap();
    assert_eq!(b.kept, 3);
    for j in 0..3 {
        let nonzero = (0..3).filter(|&i| b.x_tilde[(i, j)].norm() > 1e-12).count();
        assert_eq!(nonzero, 1);
    }
    assert!(matches!(canonical_orthogonalize(&id, 1.5), Err(Error::EmptyBasis { .. })));
    assert!(canonical_orthogonalize(&id, 0.0).is_err());
}

fn random_spd(rng: &mut ChaCha8Rng, n: usize, cond: f64) -> OverlapMatrix {
    // random unitary from the QR of a complex Gaussian matrix
    let g = DMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let q = g.qr().q();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| {
        let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
        c(cond.powf(-t))
    }));
    let s = &q * d * q.adjoint();
    OverlapMatrix::new((&s + s.adjoint()).map(|z| z * 0.5)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn orthonormal_and_coefficient_bound(seed in any::<u64>(), n in 1usize..=30, lc in 0.0..8.0f64, ls in 1.0..7.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_spd(&mut rng, n, 10f64.powf(lc));
        let sigma = 10f64.powf(-ls);
        match canonical_orthogonalize(&s, sigma) {
            Ok(b) => {
                prop_assert!(b.orthonormality_defect(&s) < 1e-9);
                prop_assert!(b.eigenvalues.iter().all(|&e| e >= sigma));
                for _ in 0..4 {
                    let v: Vec<C64> = (0..b.kept).map(|_| C64::new(rng.gen(), rng.gen())).collect();
                    let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    let v: Vec<C64> = v.iter().map(|z| z / nv).collect();
                    let coeffs = b.coefficients(&v).unwrap();
                    let cn = coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    prop_assert!(cn <= 1.0 / sigma);
                }
            }
            Err(e) => {
                let empty = matches!(e, Error::EmptyBasis { .. });
                prop_assert!(empty);
            }
        }
    }
}

#[test]
fn single_primitive_orbital() {
    let grid = PlaneWaveGrid::new(20.0, 6.0).unwrap();
    let g = s_at(0.3, 1.2);
    let mo = MolecularOrbital::new(vec![c(1.0)], vec![g.clone()], None).unwrap();
    let o = build_mo_mps(&mo, &grid, 1e-3, DEFAULT_EPS_SUM).unwrap();
    let p = gtoqtt::gauss_pw::primitive_3d_mps(&g, &grid, 1e-3).unwrap();
    assert!((o.tt.inner_product(&p.tt).unwrap().norm() - 1.0).abs() < 1e-12);
    assert!((o.tt.norm() - 1.0).abs() < 1e-9);
    assert!((o.raw_norm_sq - p.weight * p.weight).abs() < 1e-12);
    assert!(infidelity_estimate(&o) <= 1e-3);
}

#[test]
fn displaced_pair_keeps_unit_norm() {
    let grid = PlaneWaveGrid::new(24.0, 5.0).unwrap();
    assert!(grid.qubits_per_axis <= 6);
    let prims = vec![s_at(-5.0, 1.0), s_at(5.0, 1.0)];
    assert!(gaussian_overlap(&prims[0], &prims[1]) < 1e-20);
    let h = 0.5f64.sqrt();
    let mo = MolecularOrbital::new(vec![c(h), c(h)], prims.clone(), None).unwrap();
    let o = build_mo_mps(&mo, &grid, 1e-3, DEFAULT_EPS_SUM).unwrap();
    assert!((o.raw_norm_sq - 1.0).abs() < 1e-4, "{}", o.raw_norm_sq);
    assert_eq!(o.infidelity, (1.0 - o.raw_norm_sq).abs());
    let bound: usize = prims
        .iter()
        .map(|g| gtoqtt::gauss_pw::primitive_3d_mps(g, &grid, 1e-3).unwrap().tt.max_bond_dim())
        .sum();
    assert!(o.peak_bond <= bound);
}

#[test]
fn exact_cancellation_is_an_error() {
    let grid = PlaneWaveGrid::new(20.0, 4.0).unwrap();
    let h = 0.5f64.sqrt();
    let mo = MolecularOrbital::new(vec![c(h), c(-h)], vec![s_at(0.0, 1.0), s_at(0.0, 1.0)], None).unwrap();
    assert_eq!(build_mo_mps(&mo, &grid, 1e-3, DEFAULT_EPS_SUM).unwrap_err(), Error::DegenerateOrbital);
}

#[test]
fn truncation_behaviour() {
    let grid = PlaneWaveGrid::new(16.0, 5.0).unwrap();
    let prims = vec![s_at(-0.7, 0.8), s_at(0.7, 0.8), PrimitiveGaussian::new([0.0, 0.5, 0.0], 2.0, [0, 1, 0]).unwrap()];
    let mo = MolecularOrbital::new(vec![c(0.5), c(0.5), c(0.3)], prims, None).unwrap();
    let o = build_mo_mps(&mo, &grid, 1e-3, DEFAULT_EPS_SUM).unwrap();
    let same = truncate_mo(&o, 0.0).unwrap();
    assert_eq!(same.tt.to_dense().unwrap(), o.tt.to_dense().unwrap());
    let one = truncate_mo(&o, 1.0).unwrap();
    assert!(one.tt.bond_dims().iter().all(|&b| b == 1));
    assert!((one.tt.norm() - 1.0).abs() < 1e-9);
    let coarse = truncate_mo(&o, 1e-3).unwrap();
    let fine = truncate_mo(&o, 1e-6).unwrap();
    assert!(coarse.infidelity >= fine.infidelity);
    for (a, b) in coarse.tt.bond_dims().iter().zip(o.tt.bond_dims()) {
        assert!(*a <= b);
    }
}

#[test]
fn trace_distance_examples() {
    assert_eq!(trace_distance_from_norm(1.0), 0.0);
    assert!((trace_distance_from_norm(0.99) - 0.1).abs() < 1e-15);
}

/// Per-axis overlaps by real-space quadrature (independent of the Hermite route).
fn quad_axis(gamma: f64, l: u32, a: f64, cell: f64, p: i64) -> C64 {
    let k = 2.0 * PI * p as f64 / cell;
    let half = 16.0 / gamma.sqrt();
    let n = 4000;
    let h = 2.0 * half / n as f64;
    let cn = norm_const(l, gamma);
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..=n {
        let u = -half + j as f64 * h;
        let g = cn * u.powi(l as i32) * (-gamma * u * u).exp();
        acc += C64::from_polar(g * h, k * (u + a));
    }
    acc / cell.sqrt()
}

#[test]
fn norm_based_distance_matches_dense_oracle() {
    // strong cutoff loss so the estimate is far from zero
    let grid = PlaneWaveGrid::new(10.0, 3.0).unwrap();
    assert!(grid.qubits_per_axis <= 5);
    let prims = vec![
        s_at(-0.6, 1.0),
        PrimitiveGaussian::new([0.6, 0.0, 0.2], 1.0, [1, 0, 0]).unwrap(),
    ];
    let coeffs = vec![c(0.8), c(0.5)];
    let mo = MolecularOrbital::new(coeffs.clone(), prims.clone(), None).unwrap();
    let scale = mo.whole_line_norm_sq().sqrt();
    let coeffs: Vec<C64> = coeffs.iter().map(|z| z / scale).collect();
    let mo = MolecularOrbital::new(coeffs.clone(), prims.clone(), None).unwrap();
    let o = build_mo_mps(&mo, &grid, 1e-6, DEFAULT_EPS_SUM).unwrap();

    let sg = grid.signed_grid();
    let q = grid.qubits_per_axis;
    let r = sg.radius();
    let p_wide = 40i64;
    // chi on the full lattice, and its overlap with the train
    let axis = |g: &PrimitiveGaussian, ax: usize, p: i64| quad_axis(g.gamma, g.ang[ax], g.center[ax], grid.cell, p);
    let tables: Vec<Vec<Vec<C64>>> = prims
        .iter()
        .map(|g| (0..3).map(|ax| (-p_wide..=p_wide).map(|p| axis(g, ax, p)).collect()).collect())
        .collect();
    let dense = o.tt.to_dense().unwrap();
    let mut total = 0.0;
    let mut ov = C64::new(0.0, 0.0);
    for i in -p_wide..=p_wide {
        for j in -p_wide..=p_wide {
            for k in -p_wide..=p_wide {
                let mut chi = C64::new(0.0, 0.0);
                for (g, t) in tables.iter().enumerate() {
                    let id = |p: i64| (p + p_wide) as usize;
                    chi += coeffs[g] * t[0][id(i)] * t[1][id(j)] * t[2][id(k)];
                }
                total += chi.norm_sqr();
                if i.abs() <= r && j.abs() <= r && k.abs() <= r {
                    let code = ((sg.codeword(i) as usize) << (2 * q))
                        | ((sg.codeword(j) as usize) << q)
                        | sg.codeword(k) as usize;
                    ov += chi.conj() * dense[code];
                }
            }
        }
    }
    let d_oracle = (1.0 - ov.norm_sqr() / total).max(0.0).sqrt();
    let d_est = infidelity_estimate(&o);
    assert!(d_est > 1e-2, "{d_est}");
    assert!((d_oracle - d_est).abs() < 1e-6, "oracle {d_oracle} vs estimate {d_est}");
}

#[test]
fn bound_regressions() {
    let m = mo_bond_bound(1, 0.1, 0.1, 0).unwrap();
    let direct = 8.0 * E * E * (2.0 * (288.0 * 3f64.sqrt() / (1e-4 * 1e-2)).ln() + 4.0);
    assert_eq!(m, direct.ceil() as u64);
    assert_eq!(m, 2_605);
    let k = mo_cutoff_bound(1.0, 4, 0.01, 1e-4, 1).unwrap();
    let direct = 2.0 * 2f64.sqrt()
        * (2.0 * (288.0 * 3f64.sqrt() * 4.0 / (1e-8 * 1e-8)).ln() + 4f64.ln() + 45f64.ln()).sqrt();
    assert!((k - direct).abs() < 1e-12);
    assert!((k - 27.433_235_579_913_564).abs() < 1e-9, "{k}");
    for n in 1..50 {
        assert!(mo_bond_bound(n + 1, 0.1, 0.1, 2).unwrap() > mo_bond_bound(n, 0.1, 0.1, 2).unwrap());
    }
}

#[test]
fn orbital_cutoff_covers_primitives() {
    for &gamma in &[0.25, 1.0, 4.0, 25.0] {
        for l in 0..=2 {
            for &eps in &[1e-2, 1e-3] {
                let k_mo = mo_cutoff_bound(gamma, 3, eps, 0.1, l).unwrap();
                assert!(k_mo >= choose_cutoff(gamma, l, 30.0, eps).unwrap());
            }
        }
    }
}
