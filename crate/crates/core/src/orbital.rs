//! Molecular orbitals as sums of primitive trains: overlap matrices,
//! canonical orthogonalization, weighted summation with intermediate
//! rounding, and trace-distance bookkeeping.

use std::f64::consts::{E, PI};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss_pw::{norm_const, primitive_3d_mps, PlaneWaveGrid, Primitive3D, PrimitiveGaussian};
use crate::tt::TensorTrain;

/// Default truncation applied after each addition.
pub const DEFAULT_EPS_SUM: f64 = 1e-9;

/// Final squared norms below this fraction of `(sum |c_g| w_g)^2` are
/// treated as exact cancellation.
const DEGENERATE_REL: f64 = 1e-20;

/// Overlaps between normalized primitives.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapMatrix {
    pub s: DMatrix<C64>,
}

impl OverlapMatrix {
    pub fn new(s: DMatrix<C64>) -> Result<Self> {
        if !s.is_square() {
            return Err(Error::ShapeMismatch(s.nrows(), s.ncols()));
        }
        Ok(Self { s })
    }

    pub fn from_real(s: &DMatrix<f64>) -> Result<Self> {
        Self::new(s.map(|x| C64::new(x, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    /// Largest `|S_ij - conj(S_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.s[(i, j)] - self.s[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

/// `S_ij = <f_i, f_j>` for the normalized primitive trains.
pub fn overlap_from_trains(prims: &[Primitive3D]) -> Result<OverlapMatrix> {
    let n = prims.len();
    let mut s = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for i in 0..n {
        for j in i..n {
            let v = prims[i].tt.inner_product(&prims[j].tt)?;
            s[(i, j)] = v;
            s[(j, i)] = v.conj();
        }
    }
    OverlapMatrix::new(s)
}

/// Projects every primitive onto `grid` and returns their overlap matrix
/// together with the trains, which callers usually want to reuse.
pub fn overlap_matrix(
    primitives: &[PrimitiveGaussian],
    grid: &PlaneWaveGrid,
    eps_primitive: f64,
) -> Result<(OverlapMatrix, Vec<Primitive3D>)> {
    let prims = primitives
        .iter()
        .map(|g| primitive_3d_mps(g, grid, eps_primitive))
        .collect::<Result<Vec<_>>>()?;
    Ok((overlap_from_trains(&prims)?, prims))
}

/// Whole-line overlap of two normalized Cartesian primitives.
pub fn gaussian_overlap(a: &PrimitiveGaussian, b: &PrimitiveGaussian) -> f64 {
    (0..3)
        .map(|ax| {
            overlap_1d(
                a.gamma, a.ang[ax], a.center[ax], b.gamma, b.ang[ax], b.center[ax],
            )
        })
        .product()
}

fn overlap_1d(ga: f64, la: u32, xa: f64, gb: f64, lb: u32, xb: f64) -> f64 {
    let p = ga + gb;
    let xp = (ga * xa + gb * xb) / p;
    let pre = (-ga * gb / p * (xa - xb).powi(2)).exp();
    // (u + pa)^la (u + pb)^lb against e^{-p u^2}; odd moments vanish
    let pa = xp - xa;
    let pb = xp - xb;
    let ea = binomial_poly(la, pa);
    let eb = binomial_poly(lb, pb);
    let mut sum = 0.0;
    for (i, ci) in ea.iter().enumerate() {
        for (j, cj) in eb.iter().enumerate() {
            let k = i + j;
            if k % 2 == 0 {
                sum += ci * cj * gaussian_moment(k / 2, p);
            }
        }
    }
    norm_const(la, ga) * norm_const(lb, gb) * pre * sum
}

/// Coefficients of `u^i` in `(u + s)^l`.
fn binomial_poly(l: u32, s: f64) -> Vec<f64> {
    let l = l as usize;
    let mut c = vec![0.0; l + 1];
    let mut binom = 1.0;
    for i in 0..=l {
        c[i] = binom * s.powi((l - i) as i32);
        binom = binom * (l - i) as f64 / (i + 1) as f64;
    }
    c
}

/// `int u^{2k} e^{-p u^2} du = (2k-1)!! / (2p)^k sqrt(pi/p)`.
fn gaussian_moment(k: usize, p: f64) -> f64 {
    let mut dfact = 1.0;
    for j in 1..=k {
        dfact *= (2 * j - 1) as f64;
    }
    dfact / (2.0 * p).powi(k as i32) * (PI / p).sqrt()
}

/// `X~ = U~ D~^{-1/2}` after discarding eigenvalues below `sigma`.
#[derive(Clone, Debug)]
pub struct OrthoBasis {
    pub x_tilde: DMatrix<C64>,
    pub sigma: f64,
    pub kept: usize,
    /// Retained eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
}

impl OrthoBasis {
    /// Largest entry of `|X~^dagger S X~ - I|`.
    pub fn orthonormality_defect(&self, s: &OverlapMatrix) -> f64 {
        let g = self.x_tilde.adjoint() * &s.s * &self.x_tilde;
        let mut worst = 0.0f64;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// Primitive coefficients of the orthonormal combination `v`
    /// (length `kept`).
    pub fn coefficients(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.kept {
            return Err(Error::ShapeMismatch(self.kept, v.len()));
        }
        Ok((0..self.x_tilde.nrows())
            .map(|i| (0..self.kept).map(|j| self.x_tilde[(i, j)] * v[j]).sum())
            .collect())
    }
}

pub fn canonical_orthogonalize(s: &OverlapMatrix, sigma: f64) -> Result<OrthoBasis> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Parameter(format!("sigma must be > 0, got {sigma}")));
    }
    let n = s.dim();
    if n == 0 {
        return Err(Error::EmptyBasis { sigma });
    }
    // symmetrize first so the eigensolver sees an exactly Hermitian input
    let h = (&s.s + s.s.adjoint()).map(|z| z * 0.5);
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] >= sigma).collect();
    if order.is_empty() {
        return Err(Error::EmptyBasis { sigma });
    }
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let kept = order.len();
    let mut x = DMatrix::from_element(n, kept, C64::new(0.0, 0.0));
    let mut values = Vec::with_capacity(kept);
    for (col, &i) in order.iter().enumerate() {
        let u = eig.eigenvectors.column(i);
        // Rayleigh quotient of the computed vector keeps the diagonal of
        // X~^dagger S X~ at one even when the eigenvalue is small
        let su = &h * u;
        let rq = u.dotc(&su).re;
        let d = if rq > 0.0 { rq } else { eig.eigenvalues[i] };
        values.push(eig.eigenvalues[i]);
        let inv = 1.0 / d.sqrt();
        for r in 0..n {
            x[(r, col)] = u[r] * inv;
        }
    }
    Ok(OrthoBasis {
        x_tilde: x,
        sigma,
        kept,
        eigenvalues: values,
    })
}

/// `chi = sum_j c_j g_j` over normalized primitives.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MolecularOrbital {
    pub coeffs: Vec<C64>,
    pub primitives: Vec<PrimitiveGaussian>,
    /// Orthogonalization cutoff used upstream, if any.
    pub sigma: Option<f64>,
}

impl MolecularOrbital {
    pub fn new(coeffs: Vec<C64>, primitives: Vec<PrimitiveGaussian>, sigma: Option<f64>) -> Result<Self> {
        if coeffs.len() != primitives.len() {
            return Err(Error::ShapeMismatch(primitives.len(), coeffs.len()));
        }
        if coeffs.is_empty() {
            return Err(Error::Parameter("orbital has no primitives".into()));
        }
        for g in &primitives {
            g.validate()?;
        }
        Ok(Self {
            coeffs,
            primitives,
            sigma,
        })
    }

    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<chi, chi>` from whole-line overlaps.
    pub fn whole_line_norm_sq(&self) -> f64 {
        let n = self.coeffs.len();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let s = gaussian_overlap(&self.primitives[i], &self.primitives[j]);
                acc += self.coeffs[i].conj() * self.coeffs[j] * s;
            }
        }
        acc.re
    }
}

/// A normalized orbital train plus its error accounting.
#[derive(Clone, Debug)]
pub struct OrbitalMPS {
    pub tt: TensorTrain,
    /// `||tau||^2` before renormalization.
    pub raw_norm_sq: f64,
    pub eps_sum_used: f64,
    /// Cutoff of the most recent [`truncate_mo`]; 0 when never truncated.
    pub svd_cutoff_used: f64,
    /// `|1 - raw_norm_sq|`.
    pub infidelity: f64,
    /// Largest bond dimension seen during assembly.
    pub peak_bond: usize,
}

impl OrbitalMPS {
    fn finish(tau: TensorTrain, raw_norm_sq: f64, eps_sum: f64, cutoff: f64, peak: usize) -> Self {
        let tt = tau.scale(C64::new(1.0 / raw_norm_sq.sqrt(), 0.0));
        Self {
            tt,
            raw_norm_sq,
            eps_sum_used: eps_sum,
            svd_cutoff_used: cutoff,
            infidelity: (1.0 - raw_norm_sq).abs(),
            peak_bond: peak,
        }
    }
}

/// Projects the orbital's primitives and sums them.
pub fn build_mo_mps(
    mo: &MolecularOrbital,
    grid: &PlaneWaveGrid,
    eps_primitive: f64,
    eps_sum: f64,
) -> Result<OrbitalMPS> {
    let prims = mo
        .primitives
        .iter()
        .map(|g| primitive_3d_mps(g, grid, eps_primitive))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&Primitive3D> = prims.iter().collect();
    sum_primitives(&mo.coeffs, &refs, eps_sum)
}

/// `tau = sum_g c_g w_g f_g` in input order, rounded after every addition.
pub fn sum_primitives(coeffs: &[C64], prims: &[&Primitive3D], eps_sum: f64) -> Result<OrbitalMPS> {
    if coeffs.len() != prims.len() {
        return Err(Error::ShapeMismatch(prims.len(), coeffs.len()));
    }
    if coeffs.is_empty() {
        return Err(Error::Parameter("orbital has no primitives".into()));
    }
    if !(eps_sum >= 0.0 && eps_sum.is_finite()) {
        return Err(Error::Parameter(format!("eps_sum must be >= 0, got {eps_sum}")));
    }
    let scale = coeffs
        .iter()
        .zip(prims)
        .map(|(c, p)| c.norm() * p.weight)
        .sum::<f64>();
    let mut tau: Option<TensorTrain> = None;
    let mut peak = 0;
    for (c, p) in coeffs.iter().zip(prims) {
        let term = p.tt.scale(c * p.weight);
        let next = match tau {
            None => term,
            Some(acc) => {
                let sum = acc.add(&term)?;
                peak = peak.max(sum.max_bond_dim());
                sum.round(eps_sum)?
            }
        };
        peak = peak.max(next.max_bond_dim());
        tau = Some(next);
    }
    let tau = tau.expect("nonempty");
    let raw = tau.norm().powi(2);
    if !(raw > DEGENERATE_REL * scale * scale) {
        return Err(Error::DegenerateOrbital);
    }
    Ok(OrbitalMPS::finish(tau, raw, eps_sum, 0.0, peak))
}

/// Re-rounds a finished orbital with a (typically larger) cutoff.
pub fn truncate_mo(o: &OrbitalMPS, eps: f64) -> Result<OrbitalMPS> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::Parameter(format!("cutoff must be >= 0, got {eps}")));
    }
    if eps == 0.0 {
        return Ok(o.clone());
    }
    let r = o.tt.round(eps)?;
    let kept = r.norm().powi(2);
    if !(kept > 0.0) {
        return Err(Error::DegenerateOrbital);
    }
    let raw = o.raw_norm_sq * kept;
    let tt = r.scale(C64::new(1.0 / kept.sqrt(), 0.0));
    Ok(OrbitalMPS {
        tt,
        raw_norm_sq: raw,
        eps_sum_used: o.eps_sum_used,
        svd_cutoff_used: eps,
        infidelity: (1.0 - raw).abs(),
        peak_bond: o.peak_bond,
    })
}

/// Trace-distance estimate `sqrt(1 - |raw_norm_sq|)`, clamped at zero.
pub fn infidelity_estimate(o: &OrbitalMPS) -> f64 {
    trace_distance_from_norm(o.raw_norm_sq)
}

pub fn trace_distance_from_norm(raw_norm_sq: f64) -> f64 {
    (1.0 - raw_norm_sq.abs()).max(0.0).sqrt()
}

fn log_term(n_g: usize, eps: f64, sigma: f64, ell: u32) -> Result<f64> {
    if n_g == 0 {
        return Err(Error::Parameter("N_g must be >= 1".into()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Parameter(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::Parameter(format!("sigma must lie in (0, 1], got {sigma}")));
    }
    let l = ell as f64;
    let l_term = if ell == 0 { 0.0 } else { l * (4.0 * l).ln() };
    Ok(2.0 * (288.0 * 3f64.sqrt() * n_g as f64 / (eps.powi(4) * sigma * sigma)).ln() + l_term)
}

/// Upper bound on the orbital bond dimension (ceiling of the real bound).
pub fn mo_bond_bound(n_g: usize, eps: f64, sigma: f64, ell: u32) -> Result<u64> {
    let t = log_term(n_g, eps, sigma, ell)?;
    Ok((8.0 * E * E * n_g as f64 * (t + 4.0)).ceil() as u64)
}

/// Momentum cutoff sufficient for the whole orbital; `gamma_max` is the
/// largest exponent among its primitives.
pub fn mo_cutoff_bound(gamma_max: f64, n_g: usize, eps: f64, sigma: f64, ell: u32) -> Result<f64> {
    if !(gamma_max > 0.0 && gamma_max.is_finite()) {
        return Err(Error::Parameter(format!("gamma must be > 0, got {gamma_max}")));
    }
    let t = log_term(n_g, eps, sigma, ell)?;
    Ok(2.0 * (2.0 * gamma_max).sqrt() * (t + 45f64.ln()).sqrt())
}

/// `G_ij = <tau_i, tau_j>` of finished orbitals (diagnostic only).
pub fn orbital_gram(orbitals: &[OrbitalMPS]) -> Result<DMatrix<C64>> {
    let n = orbitals.len();
    let mut g = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for i in 0..n {
        for j in i..n {
            let v = orbitals[i].tt.inner_product(&orbitals[j].tt)?;
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    Ok(g)
}
