//! Closed-form Toffoli and qubit counts for multiplexed rotations, state
//! preparation, MPS loading and Slater-determinant preparation in first
//! quantization.
//!
//! Logarithms are base 2. Real-valued bounds are returned unfloored.

use std::f64::consts::{PI, SQRT_2};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest accepted rotation precision; several bounds go negative below it.
pub const MIN_BITS: u32 = 5;
/// Largest register size for the integer formulas.
pub const MAX_REGISTER: u32 = 62;

fn check_bits(b: u32) -> Result<()> {
    if b < MIN_BITS {
        Err(Error::Parameter(format!("b = {b} is below the minimum of {MIN_BITS}")))
    } else {
        Ok(())
    }
}

fn check_register(n: u32) -> Result<()> {
    if n > MAX_REGISTER {
        Err(Error::Parameter(format!("register size {n} exceeds {MAX_REGISTER}")))
    } else {
        Ok(())
    }
}

fn check_lambda(n: u32, lambda: u64) -> Result<u32> {
    if !lambda.is_power_of_two() || lambda > 1u64 << n {
        return Err(Error::Parameter(format!(
            "lambda = {lambda} must be a power of two in [1, 2^{n}]"
        )));
    }
    Ok(lambda.trailing_zeros())
}

fn ceil_log2_u64(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Multi-controlled X on `n` controls: `n - 1`.
pub fn toffoli_mcx(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::Parameter(format!("MCX needs n >= 2 controls, got {n}")));
    }
    Ok(n - 1)
}

/// Controlled swap of two `b`-qubit registers.
pub fn toffoli_cswap(b: u64) -> u64 {
    b
}

/// Unary-iteration SELECT over `2^n` items: `2^n - 1`.
pub fn toffoli_select(n: u32) -> Result<u64> {
    check_register(n)?;
    Ok((1u64 << n) - 1)
}

pub fn qubits_select(n: u32, b: u64) -> Result<u64> {
    check_register(n)?;
    if b == 0 {
        return Err(Error::Parameter("b must be >= 1".into()));
    }
    Ok(2 * n as u64 + b - 1)
}

/// Swap network over `2^n` registers of `b` qubits: `(2^n - 1) b`.
pub fn toffoli_swapnet(n: u32, b: u64) -> Result<u64> {
    check_register(n)?;
    Ok(((1u64 << n) - 1) * b)
}

pub fn qubits_swapnet(n: u32, b: u64) -> Result<u64> {
    check_register(n)?;
    if n == 0 && b < 2 {
        return Err(Error::Parameter("n = 0 needs b >= 2".into()));
    }
    Ok(2 * n as u64 + (1u64 << n) * b - 2)
}

/// SELECT-SWAP with `lambda` registers: clean `2^n/λ - 1 + (λ-1) b`,
/// dirty `2^{n+1}/λ - 2 + 4 (λ-1) b`.
pub fn toffoli_selswap(n: u32, b: u64, lambda: u64, dirty: bool) -> Result<u64> {
    check_register(n)?;
    check_lambda(n, lambda)?;
    let blocks = (1u64 << n) / lambda;
    Ok(if dirty {
        2 * blocks - 2 + 4 * (lambda - 1) * b
    } else {
        blocks - 1 + (lambda - 1) * b
    })
}

/// Clean `2n + λ b - log λ - 1`, dirty `2n + (λ+1) b - log λ - 1`.
pub fn qubits_selswap(n: u32, b: u64, lambda: u64, dirty: bool) -> Result<u64> {
    check_register(n)?;
    let log_l = check_lambda(n, lambda)? as u64;
    let regs = if dirty { lambda + 1 } else { lambda };
    (2 * n as u64 + regs * b)
        .checked_sub(log_l + 1)
        .ok_or_else(|| Error::Parameter("qubit count underflows".into()))
}

/// Phase-gradient addition with 0, 1 or 2 controls: `b`, `2b`, `3b`.
pub fn toffoli_adder(b: u64, controls: u8) -> Result<u64> {
    if controls > 2 {
        return Err(Error::Parameter(format!("adder supports 0..=2 controls, got {controls}")));
    }
    Ok(b * (controls as u64 + 1))
}

/// Z-rotation multiplexor: `2^{n+1}/λ + (b+1)(λ-1) + 2b - 3`.
pub fn toffoli_zrot_mux(n: u32, b: u32, lambda: u64) -> Result<f64> {
    check_register(n)?;
    check_lambda(n, lambda)?;
    let l = lambda as f64;
    let bf = b as f64;
    Ok(2f64.powi(n as i32 + 1) / l + (bf + 1.0) * (l - 1.0) + 2.0 * bf - 3.0)
}

/// `2n + (λ+2) b - log λ - 3`.
pub fn qubits_zrot_mux(n: u32, b: u32, lambda: u64) -> Result<u64> {
    check_register(n)?;
    let log_l = check_lambda(n, lambda)? as u64;
    (2 * n as u64 + (lambda + 2) * b as u64)
        .checked_sub(log_l + 3)
        .ok_or_else(|| Error::Parameter("qubit count underflows".into()))
}

/// Rotation synthesis error `π 2^{-b}`.
pub fn zrot_error(b: u32) -> f64 {
    PI * 2f64.powi(-(b as i32))
}

/// Power-of-two `λ_p = 2^{ceil(log(μ 2^{p/2}))}` with `μ = (b+1)^{-1/2}`,
/// clamped to `[1, 2^p]`.
pub fn lambda_optimal(p: u32, b: u32) -> u64 {
    let mu = 1.0 / ((b + 1) as f64).sqrt();
    let e = (mu * 2f64.powf(p as f64 / 2.0)).log2().ceil();
    let e = e.clamp(0.0, p as f64) as u32;
    1u64 << e
}

/// Arbitrary `n`-qubit state preparation: `(1+√2)(2^{n+7}(b+1))^{1/2} + 2n(b-4)`.
pub fn toffoli_arbitrary_state_prep(n: u32, b: u32) -> Result<f64> {
    check_bits(b)?;
    let (nf, bf) = (n as f64, b as f64);
    Ok((1.0 + SQRT_2) * (2f64.powf(nf + 7.0) * (bf + 1.0)).sqrt() + 2.0 * nf * (bf - 4.0))
}

/// `3n/2 + 2^{n/2+1} b / √(b+1) + log(b+1)/2 + 3b - 4`.
pub fn qubits_arbitrary_state_prep(n: u32, b: u32) -> Result<f64> {
    check_bits(b)?;
    let (nf, bf) = (n as f64, b as f64);
    Ok(1.5 * nf + 2f64.powf(nf / 2.0 + 1.0) * bf / (bf + 1.0).sqrt() + 0.5 * (bf + 1.0).log2()
        + 3.0 * bf
        - 4.0)
}

/// `2πn 2^{-b}`.
pub fn arb_prep_error(n: u32, b: u32) -> f64 {
    2.0 * PI * n as f64 * 2f64.powi(-(b as i32))
}

/// `n`-qubit isometry synthesis: `2^{3n/2+9/2}(1+√2)(b+1)^{1/2} + 2^n n (8b-15)`.
pub fn toffoli_unitary_synthesis(n: u32, b: u32) -> Result<f64> {
    check_bits(b)?;
    let (nf, bf) = (n as f64, b as f64);
    Ok(2f64.powf(1.5 * nf + 4.5) * (1.0 + SQRT_2) * (bf + 1.0).sqrt()
        + 2f64.powf(nf) * nf * (8.0 * bf - 15.0))
}

/// `8π√2 n 2^{n-b}`.
pub fn synthesis_error(n: u32, b: u32) -> f64 {
    8.0 * PI * SQRT_2 * n as f64 * 2f64.powf(n as f64 - b as f64)
}

/// Internal bond dimensions `m_1 .. m_{n-1}` of an `n`-site MPS.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BondProfile {
    pub m: Vec<u64>,
}

impl BondProfile {
    pub fn new(m: Vec<u64>) -> Result<Self> {
        if m.iter().any(|&x| x == 0) {
            return Err(Error::Parameter("bond dimensions must be >= 1".into()));
        }
        Ok(Self { m })
    }

    pub fn from_bonds(bonds: &[usize]) -> Result<Self> {
        Self::new(bonds.iter().map(|&x| x as u64).collect())
    }

    pub fn n_sites(&self) -> usize {
        self.m.len() + 1
    }

    /// `m_j` for `j = 0..=n` with `m_0 = m_n = 1`.
    pub fn m_at(&self, j: usize) -> u64 {
        if j == 0 || j > self.m.len() {
            1
        } else {
            self.m[j - 1]
        }
    }

    /// `m̄_j = max(2^{ceil log m_{j-1}}, 2^{ceil log m_j})`.
    pub fn m_bar(&self, j: usize) -> u64 {
        let a = 1u64 << ceil_log2_u64(self.m_at(j - 1));
        let b = 1u64 << ceil_log2_u64(self.m_at(j));
        a.max(b)
    }
}

/// MPS loading by sequential isometries:
/// `sum_j 32(1+√2)(b+1)^{1/2} m_j m̄_j^{1/2} + (8b-15) m_j log(2 m̄_j)`.
pub fn toffoli_mps_prep(profile: &BondProfile, b: u32) -> Result<f64> {
    check_bits(b)?;
    let bf = b as f64;
    let lead = 32.0 * (1.0 + SQRT_2) * (bf + 1.0).sqrt();
    Ok((1..=profile.n_sites())
        .map(|j| {
            let m = profile.m_at(j) as f64;
            let mb = profile.m_bar(j) as f64;
            lead * m * mb.sqrt() + (8.0 * bf - 15.0) * m * (2.0 * mb).log2()
        })
        .sum())
}

/// `2^{7/2-b} sum_j m_j log(2 m̄_j)`.
pub fn mps_prep_error(profile: &BondProfile, b: u32) -> Result<f64> {
    check_bits(b)?;
    let s: f64 = (1..=profile.n_sites())
        .map(|j| profile.m_at(j) as f64 * (2.0 * profile.m_bar(j) as f64).log2())
        .sum();
    Ok(2f64.powf(3.5 - b as f64) * s)
}

/// `η² n + 2η sum_k T_k`, one cost per occupied orbital.
pub fn toffoli_slater(eta: u64, n_system: u64, per_orbital_costs: &[f64]) -> f64 {
    let e = eta as f64;
    e * e * n_system as f64 + 2.0 * e * per_orbital_costs.iter().sum::<f64>()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMode {
    /// `η (ε₁ + ε₂)`.
    Approx,
    /// `2^{3/2} η N_mo (ε₁ + ε₂)`.
    Spectral,
}

pub fn slater_error_bound(eta: u64, n_mo: u64, eps1: f64, eps2: f64, mode: ErrorMode) -> f64 {
    let e = eta as f64;
    match mode {
        ErrorMode::Approx => e * (eps1 + eps2),
        ErrorMode::Spectral => 2f64.powf(1.5) * e * n_mo as f64 * (eps1 + eps2),
    }
}

/// Givens-rotation baseline: `N((3+4b)η + ceil(log(η+1)) - 2)`.
pub fn toffoli_naive_slater(n: f64, eta: u64, b: u32) -> f64 {
    let per = (3.0 + 4.0 * b as f64) * eta as f64 + ceil_log2_u64(eta + 1) as f64 - 2.0;
    n * per
}

/// Heuristic antisymmetrization cost `η ceil(log η) ceil(log N)`; not part of totals.
pub fn antisym_estimate(eta: u64, n: u128) -> f64 {
    let log_n = if n <= 1 { 0 } else { 128 - (n - 1).leading_zeros() };
    (eta * ceil_log2_u64(eta) as u64) as f64 * log_n as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "lambda")]
pub enum LambdaPolicy {
    OptimalMu,
    Fixed(u64),
}

impl LambdaPolicy {
    pub fn lambda(&self, n: u32, b: u32) -> Result<u64> {
        match *self {
            LambdaPolicy::OptimalMu => Ok(lambda_optimal(n, b)),
            LambdaPolicy::Fixed(l) => {
                check_lambda(n, l)?;
                Ok(l)
            }
        }
    }
}

/// One occupied spin orbital as seen by the cost model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitalCostInput {
    pub name: String,
    pub profile: BondProfile,
    /// Trace-distance error of the compressed orbital (feeds `eps1`).
    pub distance: f64,
}

/// Aggregated Slater-determinant preparation costs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub b: u32,
    pub eta: u64,
    pub n_system: u64,
    pub n_mo: u64,
    pub n_plane_waves: f64,
    /// Included subroutines; their sum is `mps_method_total`.
    pub toffoli: BTreeMap<String, f64>,
    pub qubits: BTreeMap<String, f64>,
    /// Per-orbital MPS loading cost `Toffoli(|tau_k>)`.
    pub orbital_prep: BTreeMap<String, f64>,
    pub eps1: f64,
    pub eps2: f64,
    pub error_approx: f64,
    pub error_spectral: f64,
    pub mps_method_total: f64,
    pub naive_method_total: f64,
    /// Reported separately and excluded from the totals.
    pub antisym_toffoli: f64,
}

/// Costs of preparing `orbitals.len()` occupied spin orbitals on
/// `n_system` qubits per particle, against the naive baseline on
/// `n_plane_waves` basis functions.
pub fn slater_report(
    orbitals: &[OrbitalCostInput],
    n_system: u64,
    n_mo: u64,
    n_plane_waves: u128,
    b: u32,
) -> Result<ResourceReport> {
    check_bits(b)?;
    if orbitals.is_empty() {
        return Err(Error::Parameter("no occupied orbitals".into()));
    }
    let eta = orbitals.len() as u64;
    let mut toffoli = BTreeMap::new();
    let mut orbital_prep = BTreeMap::new();
    let mut costs = Vec::with_capacity(orbitals.len());
    let (mut eps1, mut eps2) = (0.0f64, 0.0f64);
    for (k, o) in orbitals.iter().enumerate() {
        let t = toffoli_mps_prep(&o.profile, b)?;
        costs.push(t);
        orbital_prep.insert(o.name.clone(), t);
        toffoli.insert(format!("orbital_prep[{k:03}]"), 2.0 * eta as f64 * t);
        eps1 = eps1.max(o.distance);
        eps2 = eps2.max(mps_prep_error(&o.profile, b)?);
    }
    let reflections = (eta * eta * n_system) as f64;
    toffoli.insert("reflections".into(), reflections);
    let total = toffoli_slater(eta, n_system, &costs);
    let mut qubits = BTreeMap::new();
    qubits.insert("system_register".into(), (eta * n_system) as f64);
    qubits.insert("phase_gradient".into(), b as f64);
    Ok(ResourceReport {
        b,
        eta,
        n_system,
        n_mo,
        n_plane_waves: n_plane_waves as f64,
        toffoli,
        qubits,
        orbital_prep,
        eps1,
        eps2,
        error_approx: slater_error_bound(eta, n_mo, eps1, eps2, ErrorMode::Approx),
        error_spectral: slater_error_bound(eta, n_mo, eps1, eps2, ErrorMode::Spectral),
        mps_method_total: total,
        naive_method_total: toffoli_naive_slater(n_plane_waves as f64, eta, b),
        antisym_toffoli: antisym_estimate(eta, n_plane_waves),
    })
}
