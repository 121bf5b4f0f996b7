//! The four commands as library functions returning in-memory tables.

use anyhow::{Context, Result};
use gtoqtt::gauss_pw::PlaneWaveGrid;
use gtoqtt::orbital::{build_mo_mps, infidelity_estimate, mo_bond_bound, truncate_mo, OrbitalMPS};
use gtoqtt::resources::{slater_report, BondProfile, LambdaPolicy, OrbitalCostInput, ResourceReport};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{JobConfig, ValidationError};
use crate::fixture::{MoleculeFixture, PreparedOrbital};
use crate::output::{fmt_f64, Table};

pub const BONDS_HEADER: &[&str] = &["orbital", "bond_index", "bond_dim", "log2_bond_dim"];

pub const ORBITALS_HEADER: &[&str] = &[
    "orbital",
    "occupation",
    "n_primitives",
    "L_bohr",
    "K_inv_bohr",
    "points_per_axis",
    "n_plane_waves",
    "qubits",
    "svd_cutoff",
    "max_bond",
    "raw_norm_sq",
    "infidelity",
    "trace_distance",
    "mo_bond_bound",
];

pub const SWEEP_HEADER: &[&str] = &[
    "axis",
    "value",
    "orbital",
    "L_bohr",
    "K_inv_bohr",
    "points_per_axis",
    "n_plane_waves",
    "qubits",
    "svd_cutoff",
    "max_bond",
    "raw_norm_sq",
    "trace_distance",
    "toffoli_orbital",
    "toffoli_mps_total",
    "toffoli_naive_total",
];

/// One finished orbital.
#[derive(Debug, Clone)]
pub struct BuiltOrbital {
    pub name: String,
    pub occupation: u8,
    pub n_primitives: usize,
    pub max_angular: u32,
    pub sigma: f64,
    pub orbital: OrbitalMPS,
}

impl BuiltOrbital {
    pub fn trace_distance(&self) -> f64 {
        infidelity_estimate(&self.orbital)
    }

    pub fn bond_bound(&self, eps: f64) -> Result<u64> {
        Ok(mo_bond_bound(self.n_primitives, eps, self.sigma, self.max_angular)?)
    }
}

/// Loads, validates and normalizes a fixture against a config.
pub fn prepare(cfg: &JobConfig, fx: &MoleculeFixture) -> Result<Vec<PreparedOrbital>, ValidationError> {
    cfg.validate()?;
    fx.check_cell(cfg.grid.l_bohr)?;
    fx.prepare()
}

/// Projects and sums every orbital, then applies the configured SVD cutoff.
pub fn build_orbitals(cfg: &JobConfig, orbitals: &[PreparedOrbital]) -> Result<Vec<BuiltOrbital>> {
    let grid = cfg.grid()?;
    build_on_grid(cfg, &grid, orbitals, true)
}

fn build_on_grid(
    cfg: &JobConfig,
    grid: &PlaneWaveGrid,
    orbitals: &[PreparedOrbital],
    truncate: bool,
) -> Result<Vec<BuiltOrbital>> {
    let c = &cfg.compression;
    orbitals
        .par_iter()
        .map(|p| {
            let o = build_mo_mps(&p.mo, grid, c.eps_primitive, c.eps_sum)
                .with_context(|| format!("building orbital {}", p.name))?;
            let o = if truncate { truncate_mo(&o, c.svd_cutoff)? } else { o };
            Ok(BuiltOrbital {
                name: p.name.clone(),
                occupation: p.occupation,
                n_primitives: p.mo.primitives.len(),
                max_angular: p.max_angular(),
                sigma: p.mo.sigma.unwrap_or(crate::fixture::DEFAULT_SIGMA),
                orbital: o,
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ProjectOutput {
    pub bonds: Table,
    pub orbitals: Table,
    pub built: Vec<BuiltOrbital>,
}

pub fn project(cfg: &JobConfig, fx: &MoleculeFixture) -> Result<ProjectOutput> {
    let prepared = prepare(cfg, fx)?;
    let grid = cfg.grid()?;
    let built = build_orbitals(cfg, &prepared)?;
    let mut bonds = Table::new(BONDS_HEADER);
    let mut orbitals = Table::new(ORBITALS_HEADER);
    for b in &built {
        for (j, &d) in b.orbital.tt.bond_dims().iter().enumerate() {
            bonds.push(vec![
                b.name.clone(),
                (j + 1).to_string(),
                d.to_string(),
                fmt_f64((d as f64).log2()),
            ]);
        }
        orbitals.push(vec![
            b.name.clone(),
            b.occupation.to_string(),
            b.n_primitives.to_string(),
            fmt_f64(grid.cell),
            fmt_f64(grid.cutoff),
            grid.points_per_axis.to_string(),
            grid.total_points().to_string(),
            grid.total_qubits().to_string(),
            fmt_f64(b.orbital.svd_cutoff_used),
            b.orbital.tt.max_bond_dim().to_string(),
            fmt_f64(b.orbital.raw_norm_sq),
            fmt_f64(b.orbital.infidelity),
            fmt_f64(b.trace_distance()),
            b.bond_bound(cfg.compression.eps_primitive)?.to_string(),
        ]);
    }
    Ok(ProjectOutput { bonds, orbitals, built })
}

/// Per-orbital detail carried in the JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitalSummary {
    pub name: String,
    pub occupation: u8,
    pub bond_dims: Vec<usize>,
    pub max_bond: usize,
    pub mo_bond_bound: u64,
    pub raw_norm_sq: f64,
    pub trace_distance: f64,
    pub toffoli_prep: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub fixture: String,
    pub grid: PlaneWaveGrid,
    pub svd_cutoff: f64,
    pub eps_primitive: f64,
    /// Recorded for reference; the MPS loading count is already minimized
    /// over the SELSWAP parameter.
    pub lambda_policy: LambdaPolicy,
    pub orbitals: Vec<OrbitalSummary>,
    pub resources: ResourceReport,
    pub naive_to_mps_ratio: f64,
    /// Antisymmetrization estimate as a fraction of the MPS-method total.
    pub antisym_fraction: f64,
}

/// Spin orbitals: doubly occupied orbitals appear twice.
fn cost_inputs(built: &[BuiltOrbital]) -> Result<Vec<OrbitalCostInput>> {
    let mut out = Vec::new();
    for b in built {
        let profile = BondProfile::from_bonds(&b.orbital.tt.bond_dims())?;
        let spins: &[&str] = if b.occupation == 2 { &["alpha", "beta"] } else { &["alpha"] };
        for s in spins {
            out.push(OrbitalCostInput {
                name: format!("{}.{s}", b.name),
                profile: profile.clone(),
                distance: b.trace_distance(),
            });
        }
    }
    Ok(out)
}

pub fn estimate_from_built(
    cfg: &JobConfig,
    fx: &MoleculeFixture,
    built: &[BuiltOrbital],
) -> Result<EstimateReport> {
    let grid = cfg.grid()?;
    let occ = fx.total_occupation();
    if let Some(eta) = cfg.resources.eta {
        if eta != occ {
            return Err(ValidationError::new(
                "resources.eta",
                format!("{eta} does not match the fixture's total occupation {occ}"),
            )
            .into());
        }
    }
    let inputs = cost_inputs(built)?;
    let resources = slater_report(
        &inputs,
        grid.total_qubits() as u64,
        fx.orbitals.len() as u64,
        grid.total_points(),
        cfg.resources.b,
    )?;
    let mut orbitals = Vec::with_capacity(built.len());
    for b in built {
        let profile = BondProfile::from_bonds(&b.orbital.tt.bond_dims())?;
        orbitals.push(OrbitalSummary {
            name: b.name.clone(),
            occupation: b.occupation,
            bond_dims: b.orbital.tt.bond_dims(),
            max_bond: b.orbital.tt.max_bond_dim(),
            mo_bond_bound: b.bond_bound(cfg.compression.eps_primitive)?,
            raw_norm_sq: b.orbital.raw_norm_sq,
            trace_distance: b.trace_distance(),
            toffoli_prep: gtoqtt::resources::toffoli_mps_prep(&profile, cfg.resources.b)?,
        });
    }
    Ok(EstimateReport {
        fixture: fx.name.clone(),
        grid,
        svd_cutoff: cfg.compression.svd_cutoff,
        eps_primitive: cfg.compression.eps_primitive,
        lambda_policy: cfg.resources.lambda_policy,
        orbitals,
        naive_to_mps_ratio: resources.naive_method_total / resources.mps_method_total,
        antisym_fraction: resources.antisym_toffoli / resources.mps_method_total,
        resources,
    })
}

pub fn estimate(cfg: &JobConfig, fx: &MoleculeFixture) -> Result<EstimateReport> {
    let prepared = prepare(cfg, fx)?;
    let built = build_orbitals(cfg, &prepared)?;
    estimate_from_built(cfg, fx, &built)
}

/// Long-form `quantity,value` view of a report.
pub fn report_table(r: &EstimateReport) -> Table {
    let mut t = Table::new(&["quantity", "value"]);
    let res = &r.resources;
    let mut put = |k: String, v: f64| t.push(vec![k, fmt_f64(v)]);
    put("eta".into(), res.eta as f64);
    put("n_mo".into(), res.n_mo as f64);
    put("n_system".into(), res.n_system as f64);
    put("n_plane_waves".into(), res.n_plane_waves);
    put("b".into(), res.b as f64);
    for (k, v) in &res.toffoli {
        put(format!("toffoli.{k}"), *v);
    }
    for (k, v) in &res.orbital_prep {
        put(format!("orbital_prep.{k}"), *v);
    }
    for (k, v) in &res.qubits {
        put(format!("qubits.{k}"), *v);
    }
    put("mps_method_total".into(), res.mps_method_total);
    put("mps_method_total_floor".into(), res.mps_method_total.floor());
    put("naive_method_total".into(), res.naive_method_total);
    put("naive_to_mps_ratio".into(), r.naive_to_mps_ratio);
    put("eps1".into(), res.eps1);
    put("eps2".into(), res.eps2);
    put("error_approx".into(), res.error_approx);
    put("error_spectral".into(), res.error_spectral);
    put("antisym_toffoli".into(), res.antisym_toffoli);
    put("antisym_fraction".into(), r.antisym_fraction);
    t
}

/// One sweep point: which axis moved, its value, and the derived config.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub axis: &'static str,
    pub value: f64,
    pub config: JobConfig,
}

/// Axes are swept one at a time around the base config, in the order
/// `L_bohr`, `K_inv_bohr`, `svd_cutoff`.
pub fn sweep_points(cfg: &JobConfig) -> Result<Vec<SweepPoint>, ValidationError> {
    cfg.validate()?;
    if cfg.sweep.is_empty() {
        return Err(ValidationError::new("sweep", "at least one sweep axis must be nonempty"));
    }
    let k = cfg.cutoff();
    let mut pts = Vec::new();
    for &l in &cfg.sweep.l_bohr {
        pts.push(SweepPoint { axis: "L_bohr", value: l, config: cfg.with_grid(l, k) });
    }
    for &kk in &cfg.sweep.k_inv_bohr {
        pts.push(SweepPoint {
            axis: "K_inv_bohr",
            value: kk,
            config: cfg.with_grid(cfg.grid.l_bohr, kk),
        });
    }
    for &c in &cfg.sweep.svd_cutoff {
        pts.push(SweepPoint { axis: "svd_cutoff", value: c, config: cfg.with_svd_cutoff(c) });
    }
    for (i, p) in pts.iter().enumerate() {
        p.config
            .validate()
            .map_err(|e| ValidationError::new(format!("sweep point {i} ({}): {}", p.axis, e.path), e.message))?;
    }
    Ok(pts)
}

pub fn sweep(cfg: &JobConfig, fx: &MoleculeFixture) -> Result<Table> {
    let pts = sweep_points(cfg)?;
    let results: Vec<Result<Vec<Vec<String>>>> = pts
        .par_iter()
        .map(|p| {
            let prepared = prepare(&p.config, fx)?;
            let built = build_orbitals(&p.config, &prepared)
                .with_context(|| format!("sweep {} = {}", p.axis, p.value))?;
            let est = estimate_from_built(&p.config, fx, &built)?;
            let g = est.grid;
            Ok(built
                .iter()
                .zip(&est.orbitals)
                .map(|(b, s)| {
                    vec![
                        p.axis.to_string(),
                        fmt_f64(p.value),
                        b.name.clone(),
                        fmt_f64(g.cell),
                        fmt_f64(g.cutoff),
                        g.points_per_axis.to_string(),
                        g.total_points().to_string(),
                        g.total_qubits().to_string(),
                        fmt_f64(b.orbital.svd_cutoff_used),
                        s.max_bond.to_string(),
                        fmt_f64(s.raw_norm_sq),
                        fmt_f64(s.trace_distance),
                        fmt_f64(s.toffoli_prep),
                        fmt_f64(est.resources.mps_method_total),
                        fmt_f64(est.resources.naive_method_total),
                    ]
                })
                .collect())
        })
        .collect();
    // reduction in axis order
    let mut t = Table::new(SWEEP_HEADER);
    for r in results {
        for row in r? {
            t.push(row);
        }
    }
    Ok(t)
}

pub use crate::oracle::{oracle, oracle_orbital, Check, CheckStatus};

/// Runs `f` on a pool sized by `GTOQTT_THREADS` when set.
pub fn with_threads<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R> {
    match std::env::var(crate::THREADS_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .with_context(|| format!("{} must be a positive integer, got {v:?}", crate::THREADS_ENV))?;
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

pub(crate) fn build_untruncated(
    cfg: &JobConfig,
    grid: &PlaneWaveGrid,
    orbitals: &[PreparedOrbital],
) -> Result<Vec<BuiltOrbital>> {
    build_on_grid(cfg, grid, orbitals, false)
}
