//! Dense cross-checks on small grids. Plane-wave coefficients come from
//! real-space trapezoid quadrature of the Fourier integral, independent of
//! the Hermite-Gaussian route used by the library.

use std::f64::consts::PI;

use anyhow::Result;
use gtoqtt::gauss_pw::{norm_const, primitive_3d_mps, PlaneWaveGrid, PrimitiveGaussian};
use gtoqtt::orbital::{infidelity_estimate, overlap_from_trains, MolecularOrbital, OrbitalMPS};
use gtoqtt::C64;
use serde::{Deserialize, Serialize};

use crate::config::JobConfig;
use crate::fixture::MoleculeFixture;
use crate::output::{fmt_f64, Table};
use crate::pipeline::{build_untruncated, prepare};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub value: f64,
    pub tol: f64,
    pub note: String,
}

impl Check {
    fn compare(name: String, value: f64, tol: f64) -> Self {
        let status = if value <= tol { CheckStatus::Pass } else { CheckStatus::Fail };
        Self { name, status, value, tol, note: String::new() }
    }

    fn skip(name: String, note: String) -> Self {
        Self { name, status: CheckStatus::Skip, value: f64::NAN, tol: f64::NAN, note }
    }
}

pub fn checks_table(checks: &[Check]) -> Table {
    let mut t = Table::new(&["check", "status", "value", "tol", "note"]);
    for c in checks {
        let status = match c.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skip => "skip",
        };
        t.push(vec![c.name.clone(), status.into(), fmt_f64(c.value), fmt_f64(c.tol), c.note.clone()]);
    }
    t
}

/// `<phi_p | g>` on one axis by the trapezoid rule.
pub fn quad_coeff(gamma: f64, l: u32, center: f64, cell: f64, k: f64) -> C64 {
    let sg = gamma.sqrt();
    let half = ((60.0 + 4.0 * l as f64) / gamma).sqrt();
    // aliasing of the trapezoid rule decays like exp(-(2 pi / h - k)^2 / 4 gamma)
    let h = 2.0 * PI / (1.5 * (k.abs() + (240.0 * gamma).sqrt() + sg));
    let n = (2.0 * half / h).ceil() as usize;
    let h = 2.0 * half / n as f64;
    let c = norm_const(l, gamma);
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..=n {
        let u = -half + j as f64 * h;
        let w = if j == 0 || j == n { 0.5 } else { 1.0 };
        let g = w * c * u.powi(l as i32) * (-gamma * u * u).exp();
        acc += C64::from_polar(g * h, k * (u + center));
    }
    acc / cell.sqrt()
}

/// Per-axis coefficient tables for `|p| <= p_wide`.
fn axis_tables(g: &PrimitiveGaussian, grid: &PlaneWaveGrid, p_wide: i64) -> [Vec<C64>; 3] {
    std::array::from_fn(|ax| {
        (-p_wide..=p_wide)
            .map(|p| quad_coeff(g.gamma, g.ang[ax], g.center[ax], grid.cell, grid.momentum(p)))
            .collect()
    })
}

fn wide_radius(gammas: impl Iterator<Item = f64>, grid: &PlaneWaveGrid) -> i64 {
    let gmax = gammas.fold(0.0, f64::max);
    // |coefficient|^2 ~ exp(-k^2 / 2 gamma) is below 1e-35 past this k
    let k = (170.0 * gmax).sqrt() + 4.0 * gmax.sqrt();
    ((k / grid.dk()).ceil() as i64).max(grid.p_max as i64)
}

/// Dense retained vector in the train's site ordering.
fn dense_orbital(coeffs: &[C64], tables: &[[Vec<C64>; 3]], grid: &PlaneWaveGrid, p_wide: i64) -> Vec<C64> {
    let q = grid.qubits_per_axis;
    let sg = grid.signed_grid();
    let r = grid.p_max as i64;
    let mut v = vec![C64::new(0.0, 0.0); 1 << (3 * q)];
    let id = |p: i64| (p + p_wide) as usize;
    for i in -r..=r {
        for j in -r..=r {
            for k in -r..=r {
                let mut z = C64::new(0.0, 0.0);
                for (c, t) in coeffs.iter().zip(tables) {
                    z += c * t[0][id(i)] * t[1][id(j)] * t[2][id(k)];
                }
                let code = ((sg.codeword(i) as usize) << (2 * q))
                    | ((sg.codeword(j) as usize) << q)
                    | sg.codeword(k) as usize;
                v[code] = z;
            }
        }
    }
    v
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sq(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Checks one assembled (untruncated) orbital against its dense projection:
/// state distance, raw norm, and the norm-based distance estimate against the
/// distance to the full-lattice function.
pub fn oracle_orbital(
    name: &str,
    mo: &MolecularOrbital,
    built: &OrbitalMPS,
    grid: &PlaneWaveGrid,
    tol: f64,
) -> Vec<Check> {
    let p_wide = wide_radius(mo.primitives.iter().map(|g| g.gamma), grid);
    let tables: Vec<[Vec<C64>; 3]> = mo.primitives.iter().map(|g| axis_tables(g, grid, p_wide)).collect();
    let dense = dense_orbital(&mo.coeffs, &tables, grid, p_wide);
    let train = match built.tt.to_dense() {
        Ok(t) => t,
        Err(e) => return vec![Check::skip(format!("{name}: dense train"), e.to_string())],
    };
    let retained = norm_sq(&dense);
    let ov = dot(&dense, &train);
    let tn = norm_sq(&train);
    let d_state = (1.0 - ov.norm_sqr() / (retained * tn)).max(0.0).sqrt();

    // lattice norm of the full function, summed axis by axis
    let n = mo.coeffs.len();
    let mut lattice = 0.0;
    for a in 0..n {
        for b in 0..n {
            let mut s = mo.coeffs[a].conj() * mo.coeffs[b];
            for ax in 0..3 {
                s *= dot(&tables[a][ax], &tables[b][ax]);
            }
            lattice += s.re;
        }
    }
    let d_full = (1.0 - ov.norm_sqr() / (lattice * tn)).max(0.0).sqrt();
    vec![
        Check::compare(format!("{name}: trace distance train vs dense"), d_state, tol),
        Check::compare(
            format!("{name}: raw norm vs dense"),
            (built.raw_norm_sq - retained).abs(),
            tol,
        ),
        Check::compare(
            format!("{name}: norm-based distance vs full lattice"),
            (infidelity_estimate(built) - d_full).abs(),
            tol,
        ),
    ]
}

/// Overlaps of normalized projected primitives, train vs dense.
fn overlap_check(fx: &MoleculeFixture, grid: &PlaneWaveGrid, eps: f64, tol: f64) -> Result<Check> {
    let prims: Vec<PrimitiveGaussian> = fx
        .primitives
        .iter()
        .map(|p| PrimitiveGaussian::new(p.center, p.gamma, p.ang))
        .collect::<gtoqtt::Result<_>>()?;
    let trains = prims
        .iter()
        .map(|g| primitive_3d_mps(g, grid, eps))
        .collect::<gtoqtt::Result<Vec<_>>>()?;
    let s = overlap_from_trains(&trains)?;
    let r = grid.p_max as i64;
    let tables: Vec<[Vec<C64>; 3]> = prims.iter().map(|g| axis_tables(g, grid, r)).collect();
    let mut worst = 0.0f64;
    for a in 0..prims.len() {
        for b in 0..prims.len() {
            let mut z = C64::new(1.0, 0.0);
            for ax in 0..3 {
                let (ta, tb) = (&tables[a][ax], &tables[b][ax]);
                z *= dot(ta, tb) / (norm_sq(ta) * norm_sq(tb)).sqrt();
            }
            worst = worst.max((z - s.s[(a, b)]).norm());
        }
    }
    Ok(Check::compare("primitive overlaps train vs dense".into(), worst, tol))
}

/// All oracle checks for a job; grids above the cap are skipped explicitly.
pub fn oracle(cfg: &JobConfig, fx: &MoleculeFixture) -> Result<Vec<Check>> {
    let prepared = prepare(cfg, fx)?;
    let grid = cfg.grid()?;
    let oc = &cfg.oracle;
    if !oc.enabled {
        return Ok(vec![Check::skip("oracle".into(), "disabled in config".into())]);
    }
    if grid.points_per_axis > oc.max_points_per_axis {
        let note = format!(
            "{} points per axis exceeds the cap of {}",
            grid.points_per_axis, oc.max_points_per_axis
        );
        return Ok(prepared
            .iter()
            .map(|p| Check::skip(format!("{}: dense comparison", p.name), note.clone()))
            .collect());
    }
    let built = build_untruncated(cfg, &grid, &prepared)?;
    let mut checks = vec![overlap_check(fx, &grid, cfg.compression.eps_primitive, oc.tol)?];
    for (p, b) in prepared.iter().zip(&built) {
        checks.extend(oracle_orbital(&p.name, &p.mo, &b.orbital, &grid, oc.tol));
    }
    Ok(checks)
}
