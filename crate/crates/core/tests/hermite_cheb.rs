//! Hermite functions, expansions and Chebyshev fits against independent
//! oracles (coefficient tables, quadrature, dense scans).

use std::f64::consts::PI;

use gtoqtt::gauss_pw::{
    chebyshev_fit, chebyshev_fit_in, choose_cutoff, choose_degree, h_coeffs, hermite_gaussian,
    hermite_gaussian_in, hermite_poly, interp_error_bound, interp_conditions_hold, interp_min_nodes,
    norm_const, primitive_3d_mps, PlaneWaveGrid, PrimitiveGaussian,
};
use gtoqtt::real::{BigReal, Real};
use gtoqtt::C64;
use proptest::prelude::*;

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Explicit power-series form `H_n(x) = n! sum_m (-1)^m (2x)^{n-2m} / (m! (n-2m)!)`.
fn hermite_table(n: u32, x: f64) -> f64 {
    (0..=n / 2)
        .map(|m| {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sign * factorial(n) * (2.0 * x).powi((n - 2 * m) as i32)
                / (factorial(m) * factorial(n - 2 * m))
        })
        .sum()
}

#[test]
fn hermite_matches_coefficient_table() {
    assert!((hermite_poly(5, 0.7).unwrap() - hermite_table(5, 0.7)).abs() < 1e-10);
    for n in 0..=12 {
        for &x in &[-1.3, 0.0, 0.4, 2.2] {
            let want = hermite_table(n, x);
            assert!((hermite_poly(n as usize, x).unwrap() - want).abs() < 1e-9 * want.abs().max(1.0));
        }
    }
}

#[test]
fn hermite_function_normalized() {
    let n = 2000;
    let h = 24.0 / n as f64;
    let s: f64 = (0..=n)
        .map(|j| {
            let x = -12.0 + j as f64 * h;
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            w * hermite_gaussian(3, x).powi(2) * h
        })
        .sum();
    assert!((s - 1.0).abs() < 1e-8);
}

#[test]
fn expansion_reconstructs_monomial_gaussian() {
    // c x^l e^{-x^2/2} (gamma = 1/2) equals sum_n h_n psi_n(x)
    for l in 0..=6u32 {
        let h = h_coeffs(l).unwrap();
        assert!((h.h.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        for j in 0..20 {
            let x = -4.0 + 0.41 * j as f64;
            let want = norm_const(l, 0.5) * x.powi(l as i32) * (-x * x / 2.0).exp();
            let got: f64 = h
                .h
                .iter()
                .enumerate()
                .map(|(n, hn)| hn * hermite_gaussian(n, x))
                .sum();
            assert!((got - want).abs() < 1e-10, "l {l} x {x}");
        }
        for (n, hn) in h.h.iter().enumerate() {
            if (l as usize - n.min(l as usize)) % 2 == 1 {
                assert_eq!(*hn, 0.0);
            }
        }
    }
}

#[test]
fn norm_const_by_quadrature() {
    for &(l, gamma) in &[(0u32, 1.0), (1, 0.5), (3, 2.0), (6, 0.3)] {
        let c = norm_const(l, gamma);
        let half = 40.0 / gamma.sqrt();
        let n = 8000;
        let h = 2.0 * half / n as f64;
        let s: f64 = (0..=n)
            .map(|j| {
                let x = -half + j as f64 * h;
                (c * x.powi(l as i32) * (-gamma * x * x).exp()).powi(2) * h
            })
            .sum();
        assert!((s - 1.0).abs() < 1e-10, "l {l}: {s}");
    }
}

#[test]
fn translation_is_a_phase() {
    use gtoqtt::gauss_pw::pw_overlap;
    for &k in &[0.3, 1.1, 2.9] {
        let a = pw_overlap(0.8, 2, 0.0, k, 20.0).unwrap();
        let b = pw_overlap(0.8, 2, 3.0, k, 20.0).unwrap();
        assert!((a.norm() - b.norm()).abs() < 1e-12);
        assert!((b - a * C64::from_polar(1.0, 3.0 * k)).norm() < 1e-12);
    }
}

#[test]
fn cutoff_regression_and_monotonicity() {
    let k = choose_cutoff(1.0, 0, 30.0, 0.01).unwrap();
    // direct evaluation of the closed form
    let s = 2.0 * 200f64.ln() + 45f64.ln() + (1.0 + 2.0 * PI.sqrt() / 30.0).ln();
    assert!((k - 2.0 * 2f64.sqrt() * s.sqrt()).abs() < 1e-12);
    assert!((k - 10.775_893_433_304_358).abs() < 1e-9, "{k}");
    assert!(choose_cutoff(1.0, 0, 30.0, 0.001).unwrap() > k);
    let m1 = choose_degree(1.0, 1.0).unwrap();
    let m2 = choose_degree(2.0, 1.0).unwrap();
    assert!(m2 >= 4 * m1 - 4 && m2 <= 4 * m1);
    for &g in &[0.25, 1.0, 4.0] {
        let kk = choose_cutoff(g, 0, 30.0, 0.5).unwrap();
        assert!(choose_degree(kk, g).unwrap() >= 2);
    }
}

#[test]
fn chebyshev_dense_scan() {
    let f = chebyshev_fit(0, 4.0, 40).unwrap();
    let worst = (0..=1000)
        .map(|i| {
            let x = -4.0 + 8.0 * i as f64 / 1000.0;
            (f.eval(x) - hermite_gaussian(0, x)).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");

    let c = 3.0;
    let m = interp_min_nodes(2, c, 1e-3).unwrap();
    assert!(interp_conditions_hold(2, c, m, 1e-3));
    let f = chebyshev_fit(2, c, m).unwrap();
    let worst = (0..=1000)
        .map(|i| {
            let x = -c + 2.0 * c * i as f64 / 1000.0;
            (f.eval(x) - hermite_gaussian(2, x)).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst <= 1e-3 && worst <= interp_error_bound(m));
}

#[test]
fn big_precision_agrees_with_f64() {
    let c = BigReal::from_f64(2.0);
    let f = chebyshev_fit_in(3, c, 30).unwrap();
    let g = chebyshev_fit(3, 2.0, 30).unwrap();
    for &x in &[-1.9, -0.3, 0.0, 1.2] {
        let a = f.eval(BigReal::from_f64(x)).to_f64();
        assert!((a - g.eval(x)).abs() < 1e-13);
        let h = hermite_gaussian_in(3, BigReal::from_f64(x)).to_f64();
        assert!((h - hermite_gaussian(3, x)).abs() < 1e-14);
    }
}

#[test]
fn s_gaussian_3d_is_symmetric() {
    let grid = PlaneWaveGrid::new(20.0, 4.0).unwrap();
    let g = PrimitiveGaussian::new([0.0; 3], 1.0, [0, 0, 0]).unwrap();
    let p = primitive_3d_mps(&g, &grid, 1e-3).unwrap();
    let b = p.tt.bond_dims();
    let q = grid.qubits_per_axis;
    assert_eq!(b.len(), 3 * q - 1);
    assert_eq!(b[q - 1], 1);
    assert_eq!(b[2 * q - 1], 1);
    assert_eq!(&b[..q - 1], &b[q..2 * q - 1]);
    assert_eq!(&b[..q - 1], &b[2 * q..]);
    assert!((p.tt.norm() - 1.0).abs() < 1e-9);
    assert_eq!(p.tt.n_sites(), grid.total_qubits());
}

/// 3D dense projection oracle on a 2^5-per-axis grid.
#[test]
fn three_dimensional_distance_dense() {
    use gtoqtt::gauss_pw::project_exact;
    let grid = PlaneWaveGrid::new(12.0, 7.5).unwrap();
    assert!(grid.qubits_per_axis <= 5);
    let g = PrimitiveGaussian::new([0.4, -0.7, 1.1], 1.3, [1, 0, 2]).unwrap();
    let eps = 1e-2;
    let p = primitive_3d_mps(&g, &grid, eps).unwrap();
    let sg = grid.signed_grid();
    let q = grid.qubits_per_axis;
    let r = sg.radius();
    // exact per-axis coefficients over a widened lattice give the whole-lattice norm
    let axes: Vec<_> = (0..3)
        .map(|ax| project_exact(g.gamma, g.ang[ax], g.center[ax], grid.cell, grid.cutoff).unwrap())
        .collect();
    let total: f64 = axes.iter().map(|a| a.n_tilde * a.n_tilde).product();
    let dense = p.tt.to_dense().unwrap();
    let mut ov = C64::new(0.0, 0.0);
    for i in -r..=r {
        for j in -r..=r {
            for k in -r..=r {
                let exact = axes[0].coeff(i) * axes[1].coeff(j) * axes[2].coeff(k);
                let code = ((sg.codeword(i) as usize) << (2 * q))
                    | ((sg.codeword(j) as usize) << q)
                    | sg.codeword(k) as usize;
                ov += exact.conj() * dense[code];
            }
        }
    }
    let d = (1.0 - ov.norm_sqr() / total).max(0.0).sqrt();
    assert!(d <= eps, "D = {d}");
    assert!((d - p.distance_bound()).abs() < 1e-3);
}

proptest! {
    #[test]
    fn cramer_bound(n in 0usize..=20, x in -20.0..20.0f64) {
        prop_assert!(hermite_gaussian(n, x).abs() <= PI.powf(-0.25) + 1e-12);
    }
}
