//! Plane-wave projections of primitive Cartesian Gaussians and their
//! tensor-train encodings.
//!
//! Conventions: `phi_k(x) = L^{-1/2} e^{ikx}` and the coefficient of a
//! primitive centred at `a` is `int g(x - a) phi_k(x) dx`, which carries the
//! phase `e^{ika}`. Momenta live on the lattice `k = p dk`, `dk = 2 pi / L`.

use std::f64::consts::{E, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func_encode::{ceil_log2, signed_poly_phase_tt, Polynomial, SignedGrid1D};
use crate::real::Real;
use crate::tt::{TensorTrain, DEFAULT_DENSE_CAP};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Largest Hermite order accepted by [`hermite_poly`].
pub const MAX_HERMITE_ORDER: usize = 40;
/// Largest Cartesian angular momentum per axis.
pub const MAX_ANGULAR: u32 = 12;
/// Largest degree accepted by the monomial conversion.
pub const MAX_MONOMIAL_DEGREE: usize = 60;
/// Largest number of Chebyshev nodes accepted anywhere.
pub const MAX_CHEBYSHEV_NODES: usize = 200_000;
/// TT-SVD tolerance for per-axis coefficient vectors.
pub const AXIS_TT_TOL: f64 = 1e-14;

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence.
pub fn hermite_poly(n: usize, x: f64) -> Result<f64> {
    if n > MAX_HERMITE_ORDER {
        return Err(Error::Parameter(format!(
            "Hermite order {n} exceeds {MAX_HERMITE_ORDER}"
        )));
    }
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return Ok(h0);
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    Ok(h1)
}

/// Normalized Hermite function `psi_n(x) = (2^n n! sqrt(pi))^{-1/2} e^{-x^2/2} H_n(x)`.
///
/// Evaluated with the normalized recurrence, which neither overflows nor
/// loses the Gaussian factor for large `n`.
pub fn hermite_gaussian(n: usize, x: f64) -> f64 {
    hermite_gaussian_in(n, x)
}

pub fn hermite_gaussian_in<T: Real>(n: usize, x: T) -> T {
    let two = T::from_i64(2);
    let quarter_pi = T::pi().sqrt().sqrt();
    let p0 = (-(x.clone() * x.clone()) / two.clone()).exp() / quarter_pi;
    if n == 0 {
        return p0;
    }
    let mut prev = p0.clone();
    let mut cur = two.sqrt() * x.clone() * p0;
    for k in 1..n {
        let kf = T::from_i64(k as i64);
        let k1 = T::from_i64(k as i64 + 1);
        let next = (two.clone() / k1.clone()).sqrt() * x.clone() * cur.clone()
            - (kf / k1).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `psi_0(x) .. psi_nmax(x)` in one pass.
pub fn hermite_gaussians(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax + 1);
    let p0 = (-0.5 * x * x).exp() / PI.sqrt().sqrt();
    out.push(p0);
    if nmax == 0 {
        return out;
    }
    out.push(2f64.sqrt() * x * p0);
    for k in 1..nmax {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Coefficients `h_n` with `x^l e^{-x^2/2} ∝ sum_n h_n psi_n(x)`, normalized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermiteExpansion {
    pub h: Vec<f64>,
}

pub fn h_coeffs(l: u32) -> Result<HermiteExpansion> {
    if l > MAX_ANGULAR {
        return Err(Error::Parameter(format!(
            "angular momentum {l} exceeds {MAX_ANGULAR}"
        )));
    }
    let mut h: Vec<f64> = (0..=l)
        .map(|n| {
            if (l - n) % 2 == 1 {
                0.0
            } else {
                2f64.powf(n as f64 / 2.0) / (factorial((l - n) / 2) * factorial(n).sqrt())
            }
        })
        .collect();
    let norm = h.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut h {
        *x /= norm;
    }
    Ok(HermiteExpansion { h })
}

/// `c_{l,gamma}` normalizing `x^l e^{-gamma x^2}` on the real line.
pub fn norm_const(l: u32, gamma: f64) -> f64 {
    2f64.powi(l as i32) * (2.0 * gamma).powf(l as f64 / 2.0 + 0.25) * factorial(l).sqrt()
        / (PI.powf(0.25) * factorial(2 * l).sqrt())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("gamma must be > 0, got {gamma}")))
    }
}

/// `int g(x - a) phi_k(x) dx` for the normalized `g(x) = c x^l e^{-gamma x^2}`.
pub fn pw_overlap(gamma: f64, l: u32, a: f64, k: f64, cell: f64) -> Result<C64> {
    check_gamma(gamma)?;
    if !(cell > 0.0) {
        return Err(Error::Parameter(format!("cell length must be > 0, got {cell}")));
    }
    let h = h_coeffs(l)?;
    Ok(overlap_with(&h, gamma, a, k, cell))
}

fn i_pow(n: usize) -> C64 {
    match n % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

fn overlap_prefactor(gamma: f64, cell: f64) -> f64 {
    (2.0 * PI).sqrt() * (2.0 * gamma).powf(-0.25) / cell.sqrt()
}

fn overlap_with(h: &HermiteExpansion, gamma: f64, a: f64, k: f64, cell: f64) -> C64 {
    let kappa = k / (2.0 * gamma).sqrt();
    let psi = hermite_gaussians(h.h.len() - 1, kappa);
    let mut acc = ZERO;
    for (n, (&hn, &pn)) in h.h.iter().zip(&psi).enumerate() {
        if hn != 0.0 {
            acc += i_pow(n) * (hn * pn);
        }
    }
    acc * overlap_prefactor(gamma, cell) * C64::from_polar(1.0, k * a)
}

fn l_log_4l(l: u32) -> f64 {
    if l == 0 {
        0.0
    } else {
        l as f64 * (4.0 * l as f64).ln()
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("epsilon must lie in (0, 1), got {eps}")))
    }
}

/// Momentum cutoff of the one-dimensional construction at equality.
pub fn choose_cutoff(gamma: f64, l: u32, cell: f64, eps: f64) -> Result<f64> {
    check_gamma(gamma)?;
    check_eps(eps)?;
    let s = 2.0 * (2.0 / eps).ln()
        + 45f64.ln()
        + (1.0 + 2.0 * PI.sqrt() / (cell * gamma.sqrt())).ln()
        + l_log_4l(l);
    Ok(2.0 * (2.0 * gamma).sqrt() * s.sqrt())
}

/// Cutoff for a 3D primitive: each axis gets `eps / sqrt(3)`.
pub fn choose_cutoff_3d(gamma: f64, l: u32, cell: f64, eps: f64) -> Result<f64> {
    choose_cutoff(gamma, l, cell, eps / 3f64.sqrt())
}

/// Tail cutoff guaranteeing `sum_{|k|>K} |<g~, phi_k>|^2 <= eps_t^2`.
pub fn tail_cutoff(gamma: f64, l: u32, cell: f64, eps_t: f64, n_tilde: f64) -> Result<f64> {
    check_gamma(gamma)?;
    check_eps(eps_t)?;
    let s = 2.0 * (1.0 / eps_t).ln() + 20f64.ln()
        + (1.0 + 2.0 * PI.sqrt() / (cell * gamma.sqrt())).ln()
        - (n_tilde * n_tilde).ln()
        + l_log_4l(l);
    Ok(2.0 * (2.0 * gamma).sqrt() * s.max(0.0).sqrt())
}

/// `ceil(e^2 K^2 / (2 gamma))`.
pub fn choose_degree(k: f64, gamma: f64) -> Result<usize> {
    check_gamma(gamma)?;
    if !(k > 0.0) {
        return Err(Error::Parameter(format!("cutoff must be > 0, got {k}")));
    }
    let m = (E * E * k * k / (2.0 * gamma)).ceil();
    if m > MAX_CHEBYSHEV_NODES as f64 {
        return Err(Error::Parameter(format!(
            "degree {m} exceeds the limit of {MAX_CHEBYSHEV_NODES}"
        )));
    }
    Ok(m as usize)
}

/// Node count for one axis: `choose_degree` at the equality case, raised to
/// the fitting conditions when `K` is below the cutoff that makes them
/// redundant. `n_tilde` and `n_t` are the lattice and retained norms.
pub fn axis_nodes(gamma: f64, l: u32, cell: f64, k: f64, eps: f64, n_tilde: f64, n_t: f64) -> Result<usize> {
    check_eps(eps)?;
    let m1 = choose_degree(k, gamma)? as f64;
    let q = E * k / (2.0 * gamma.sqrt());
    let m2 = q * (q + ((2 * l + 1) as f64).sqrt());
    // fit budget eps / 2
    let m3 = (4.0 * (2.0 / eps).ln() - 2.0 * n_tilde.ln() - 2.0 * n_t.ln()
        + (k / gamma.sqrt() + PI / (cell * gamma.sqrt())).ln()
        + ((l + 1) as f64).ln())
        / 2f64.ln()
        + 4.5;
    let m = m1.max(m2).max(m3).max(2.0).ceil();
    if !(m <= MAX_CHEBYSHEV_NODES as f64) {
        return Err(Error::Parameter(format!(
            "degree {m} exceeds the limit of {MAX_CHEBYSHEV_NODES}"
        )));
    }
    Ok(m as usize)
}

/// Smallest `m` meeting the three interpolation conditions for `psi_n` on `[-C, C]`.
pub fn interp_min_nodes(n: usize, c: f64, eps_cheb: f64) -> Result<usize> {
    check_eps(eps_cheb)?;
    let q = E * c / 2f64.sqrt();
    let a = q * (q + ((2 * n + 1) as f64).sqrt());
    let b = 2.0 * (1.0 / eps_cheb).ln() / 2f64.ln();
    Ok(a.max(b).max(1.0).ceil() as usize)
}

/// Whether `m` meets the three interpolation conditions.
pub fn interp_conditions_hold(n: usize, c: f64, m: usize, eps_cheb: f64) -> bool {
    let q = E * c / 2f64.sqrt();
    let mf = m as f64;
    mf >= q * (q + ((2 * n + 1) as f64).sqrt())
        && mf >= 2.0 * (1.0 / eps_cheb).ln() / 2f64.ln()
        && m >= 1
}

/// The error bound `(1/2)^{m/2}`.
pub fn interp_error_bound(m: usize) -> f64 {
    0.5f64.powf(m as f64 / 2.0)
}

/// Degree `m - 1` interpolant of `psi_n` through
/// `t_i = C cos((2i + 1) pi / (2m + 2))`, `i = 0..m-1`, in barycentric form.
#[derive(Clone, Debug)]
pub struct ChebyshevInterpolant<T: Real = f64> {
    pub n: usize,
    pub half_width: T,
    unit_nodes: Vec<T>,
    values: Vec<T>,
    weights: Vec<T>,
}

pub fn chebyshev_fit(n: usize, c: f64, m: usize) -> Result<ChebyshevInterpolant<f64>> {
    chebyshev_fit_in(n, c, m)
}

pub fn chebyshev_fit_in<T: Real>(n: usize, c: T, m: usize) -> Result<ChebyshevInterpolant<T>> {
    if m < 1 {
        return Err(Error::Parameter("at least one Chebyshev node is required".into()));
    }
    if m > MAX_CHEBYSHEV_NODES {
        return Err(Error::Parameter(format!(
            "{m} nodes exceed the limit of {MAX_CHEBYSHEV_NODES}"
        )));
    }
    if !(c > T::from_i64(0)) {
        return Err(Error::Parameter("interval half-width must be > 0".into()));
    }
    let pi = T::pi();
    let denom = T::from_i64(2 * m as i64 + 2);
    let theta = |i: usize| pi.clone() * T::from_i64(2 * i as i64 + 1) / denom.clone();
    // the omitted root of T_{m+1}
    let x_m = theta(m).cos();
    let mut unit_nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    let mut values = Vec::with_capacity(m);
    for i in 0..m {
        let th = theta(i);
        let x = th.cos();
        let sign = if i % 2 == 0 { T::from_i64(1) } else { T::from_i64(-1) };
        weights.push(sign * th.sin() * (x.clone() - x_m.clone()));
        values.push(hermite_gaussian_in(n, c.clone() * x.clone()));
        unit_nodes.push(x);
    }
    Ok(ChebyshevInterpolant {
        n,
        half_width: c,
        unit_nodes,
        values,
        weights,
    })
}

impl<T: Real> ChebyshevInterpolant<T> {
    pub fn n_nodes(&self) -> usize {
        self.unit_nodes.len()
    }

    pub fn degree(&self) -> usize {
        self.unit_nodes.len() - 1
    }

    pub fn nodes(&self) -> Vec<T> {
        self.unit_nodes
            .iter()
            .map(|u| self.half_width.clone() * u.clone())
            .collect()
    }

    pub fn eval(&self, x: T) -> T {
        let u = x / self.half_width.clone();
        let mut num = T::from_i64(0);
        let mut den = T::from_i64(0);
        for ((t, w), f) in self.unit_nodes.iter().zip(&self.weights).zip(&self.values) {
            let d = u.clone() - t.clone();
            if d.is_zero() {
                return f.clone();
            }
            let q = w.clone() / d;
            num = num + q.clone() * f.clone();
            den = den + q;
        }
        num / den
    }
}

impl ChebyshevInterpolant<f64> {
    /// Evaluate at many points with the `f64` fast path.
    pub fn eval_many(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }

    /// Monomial coefficients in `x` (not the scaled variable).
    ///
    /// Solves for Chebyshev-basis coefficients in `t = x / C` and expands them
    /// in powers of `t`, accumulating in double-double arithmetic above degree
    /// 30 to contain the cancellation in the Chebyshev-to-monomial map.
    pub fn to_polynomial(&self) -> Result<Polynomial> {
        let m = self.n_nodes();
        let d = m - 1;
        if d > MAX_MONOMIAL_DEGREE {
            return Err(Error::Parameter(format!(
                "monomial conversion of degree {d} exceeds {MAX_MONOMIAL_DEGREE}"
            )));
        }
        let vander = DMatrix::from_fn(m, m, |i, j| {
            let t = self.unit_nodes[i];
            (j as f64 * t.clamp(-1.0, 1.0).acos()).cos()
        });
        let rhs = DVector::from_column_slice(&self.values);
        let a = vander
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Precondition("singular Chebyshev system".into()))?;
        let table = chebyshev_monomial_table(d);
        let mut coeffs_t = vec![0.0; m];
        for (k, out) in coeffs_t.iter_mut().enumerate() {
            if d > 30 {
                let mut acc = Dd::ZERO;
                for j in k..m {
                    let t = table[j][k];
                    if t != 0 {
                        acc = acc.add(Dd::from_i128(t).mul_f64(a[j]));
                    }
                }
                *out = acc.to_f64();
            } else {
                *out = (k..m).map(|j| table[j][k] as f64 * a[j]).sum();
            }
        }
        let c = self.half_width;
        let coeffs = coeffs_t
            .iter()
            .enumerate()
            .map(|(j, v)| C64::new(v / c.powi(j as i32), 0.0))
            .collect();
        Ok(Polynomial::new(coeffs))
    }
}

/// `table[j][k]` = coefficient of `t^k` in `T_j(t)`.
fn chebyshev_monomial_table(d: usize) -> Vec<Vec<i128>> {
    let mut t = vec![vec![0i128; d + 1]; d + 1];
    t[0][0] = 1;
    if d >= 1 {
        t[1][1] = 1;
    }
    for j in 2..=d {
        for k in 0..=j {
            let up = if k >= 1 { 2 * t[j - 1][k - 1] } else { 0 };
            t[j][k] = up - t[j - 2][k];
        }
    }
    t
}

/// Unevaluated sum `hi + lo` of two doubles.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn from_i128(x: i128) -> Dd {
        let hi = x as f64;
        let lo = (x - hi as i128) as f64;
        Dd { hi, lo }
    }

    fn mul_f64(self, b: f64) -> Dd {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p);
        let (hi, lo) = Self::two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = Self::two_sum(self.hi, o.hi);
        let (hi, lo) = Self::two_sum(s, e + self.lo + o.lo);
        Dd { hi, lo }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Periodic plane-wave basis on a cubic cell of side `L` with cutoff `K`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveGrid {
    pub cell: f64,
    pub cutoff: f64,
    /// `floor(K L / 2 pi)`.
    pub p_max: u64,
    pub points_per_axis: u64,
    pub qubits_per_axis: usize,
}

impl PlaneWaveGrid {
    pub fn new(cell: f64, cutoff: f64) -> Result<Self> {
        if !(cell > 0.0 && cell.is_finite()) {
            return Err(Error::Parameter(format!("cell length must be > 0, got {cell}")));
        }
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::Parameter(format!("cutoff must be > 0, got {cutoff}")));
        }
        let p_max = (cutoff * cell / (2.0 * PI)).floor() as u64;
        if p_max < 1 {
            return Err(Error::Parameter(format!(
                "K L / 2 pi = {} < 1: the grid holds only k = 0",
                cutoff * cell / (2.0 * PI)
            )));
        }
        let points = 2 * p_max + 1;
        Ok(Self {
            cell,
            cutoff,
            p_max,
            points_per_axis: points,
            qubits_per_axis: ceil_log2(points as u128),
        })
    }

    /// Cutoff from a kinetic-energy cutoff in Hartree, `K = sqrt(2 E_cut)`.
    pub fn from_ecut(cell: f64, ecut_hartree: f64) -> Result<Self> {
        if !(ecut_hartree > 0.0) {
            return Err(Error::Parameter(format!(
                "energy cutoff must be > 0, got {ecut_hartree}"
            )));
        }
        Self::new(cell, (2.0 * ecut_hartree).sqrt())
    }

    pub fn dk(&self) -> f64 {
        2.0 * PI / self.cell
    }

    pub fn momentum(&self, p: i64) -> f64 {
        p as f64 * self.dk()
    }

    /// `N = points_per_axis^3`.
    pub fn total_points(&self) -> u128 {
        (self.points_per_axis as u128).pow(3)
    }

    pub fn total_qubits(&self) -> usize {
        3 * self.qubits_per_axis
    }

    /// Signed momentum grid of one axis.
    pub fn signed_grid(&self) -> SignedGrid1D {
        SignedGrid1D::new(
            self.p_max as f64 * self.dk(),
            self.points_per_axis,
            self.qubits_per_axis,
        )
        .expect("plane-wave grid always yields a valid signed grid")
    }
}

/// Exact projection of one Cartesian factor onto the momentum lattice.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Projection1D {
    pub gamma: f64,
    pub l: u32,
    pub center: f64,
    pub cell: f64,
    pub cutoff: f64,
    /// Grid radius `P`; coefficients are stored for `p = -P..=P`.
    pub p_max: i64,
    /// Unnormalized overlaps `<phi_k, g>` on the retained momenta.
    #[serde(skip)]
    pub coeffs: Vec<C64>,
    /// Whole-lattice norm of the projection.
    pub n_tilde: f64,
    /// Fraction of the (normalized) projection norm kept by the cutoff.
    pub n_t: f64,
    /// `sum_{|k| > K} |<g~, phi_k>|^2`.
    pub tail_weight: f64,
    /// Chebyshev node count (0 for an exact projection without fit).
    pub nodes: usize,
    /// Chebyshev interval half-width `C = K / sqrt(2 gamma)`.
    pub cheb_half_width: f64,
    /// Cutoff the one-dimensional construction asks for at the requested epsilon.
    pub fit_cutoff: f64,
    /// Trace distance between the normalized projection and the encoded vector.
    pub distance: f64,
}

impl Projection1D {
    /// Norm of the projection restricted to the cutoff, `N~ N_t`.
    pub fn kept_norm(&self) -> f64 {
        self.n_tilde * self.n_t
    }

    pub fn coeff(&self, p: i64) -> C64 {
        self.coeffs[(p + self.p_max) as usize]
    }
}

/// Exact overlaps on `|p| <= p_max`, plus the whole-lattice and tail sums.
///
/// The whole-lattice sum runs to `|kappa| <= 12 + 2 sqrt(2l + 1)`, beyond
/// which the Hermite functions are below `e^{-72}`.
pub fn project_exact(gamma: f64, l: u32, a: f64, cell: f64, cutoff: f64) -> Result<Projection1D> {
    check_gamma(gamma)?;
    if !(cell > 0.0) || !(cutoff >= 0.0) {
        return Err(Error::Parameter("cell must be > 0 and cutoff >= 0".into()));
    }
    let h = h_coeffs(l)?;
    let dk = 2.0 * PI / cell;
    let p_max = (cutoff / dk).floor() as i64;
    let kappa_max = 12.0 + 2.0 * ((2 * l + 1) as f64).sqrt();
    let p_wide = ((kappa_max * (2.0 * gamma).sqrt() / dk).ceil() as i64).max(p_max);
    if p_wide > 50_000_000 {
        return Err(Error::Parameter(format!(
            "whole-lattice sum needs {p_wide} momenta; cell or gamma too large"
        )));
    }
    let mut coeffs = Vec::with_capacity((2 * p_max + 1) as usize);
    let mut inside = 0.0;
    let mut outside = 0.0;
    for p in -p_wide..=p_wide {
        let c = overlap_with(&h, gamma, a, p as f64 * dk, cell);
        if p.abs() <= p_max {
            inside += c.norm_sqr();
            coeffs.push(c);
        } else {
            outside += c.norm_sqr();
        }
    }
    let total = inside + outside;
    let n_tilde = total.sqrt();
    Ok(Projection1D {
        gamma,
        l,
        center: a,
        cell,
        cutoff,
        p_max,
        coeffs,
        n_tilde,
        n_t: (inside / total).sqrt(),
        tail_weight: outside / total,
        nodes: 0,
        cheb_half_width: cutoff / (2.0 * gamma).sqrt(),
        fit_cutoff: f64::NAN,
        distance: f64::NAN,
    })
}

/// How the per-axis coefficient vector becomes a tensor train.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisRoute {
    /// Barycentric evaluation on the momentum lattice, then TT-SVD.
    Tensorized,
    /// Monomial polynomial encoded analytically by the signed polynomial TT
    /// (degree <= 60 only).
    Analytic,
}

/// One-dimensional primitive: the normalized signed-grid TT of `p(k) e^{ika}`
/// over the retained momenta, where `p` is the Chebyshev fit of the Hermite
/// expansion at `m = ceil(e^2 K^2 / 2 gamma)` nodes.
pub fn primitive_1d_mps(
    gamma: f64,
    l: u32,
    a: f64,
    grid: &PlaneWaveGrid,
    eps: f64,
) -> Result<(TensorTrain, Projection1D)> {
    primitive_1d_mps_with(gamma, l, a, grid, eps, AxisRoute::Tensorized)
}

pub fn primitive_1d_mps_with(
    gamma: f64,
    l: u32,
    a: f64,
    grid: &PlaneWaveGrid,
    eps: f64,
    route: AxisRoute,
) -> Result<(TensorTrain, Projection1D)> {
    check_eps(eps)?;
    let mut proj = project_exact(gamma, l, a, grid.cell, grid.cutoff)?;
    if proj.n_tilde < 2.0 / 3.0 {
        return Err(Error::Precondition(format!(
            "whole-lattice norm {} < 2/3; the cell is too small for gamma = {gamma}",
            proj.n_tilde
        )));
    }
    let m = axis_nodes(gamma, l, grid.cell, grid.cutoff, eps, proj.n_tilde, proj.n_t)?;
    let scale = (2.0 * gamma).sqrt();
    let c = grid.cutoff / scale;
    let h = h_coeffs(l)?;
    let fits = h
        .h
        .iter()
        .enumerate()
        .filter(|(_, &hn)| hn != 0.0)
        .map(|(n, &hn)| Ok((n, hn, chebyshev_fit(n, c, m)?)))
        .collect::<Result<Vec<_>>>()?;

    let sg = grid.signed_grid();
    let radius = sg.radius();
    let pref = overlap_prefactor(gamma, grid.cell);
    let values: Vec<C64> = (-radius..=radius)
        .map(|p| {
            let k = grid.momentum(p);
            let mut acc = ZERO;
            for (n, hn, f) in &fits {
                acc += i_pow(*n) * (hn * f.eval(k / scale));
            }
            acc * pref * C64::from_polar(1.0, k * a)
        })
        .collect();
    let norm = values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::Precondition("fitted coefficient vector vanishes".into()));
    }

    let tt = match route {
        AxisRoute::Tensorized => {
            if sg.n_sites > DEFAULT_DENSE_CAP {
                return Err(Error::Capacity {
                    n_sites: sg.n_sites,
                    cap: DEFAULT_DENSE_CAP,
                });
            }
            let mut dense = vec![ZERO; 1usize << sg.n_sites];
            for (j, v) in values.iter().enumerate() {
                dense[sg.codeword(j as i64 - radius) as usize] = v / norm;
            }
            TensorTrain::from_dense(&dense, AXIS_TT_TOL)?
        }
        AxisRoute::Analytic => {
            let mut coeffs = vec![ZERO; m];
            for (n, hn, f) in &fits {
                let poly = f.to_polynomial()?;
                // p_n(k / scale): rescale monomials to the momentum variable
                for (j, cj) in poly.coeffs.iter().enumerate() {
                    coeffs[j] += i_pow(*n) * hn * cj / scale.powi(j as i32);
                }
            }
            for cj in &mut coeffs {
                *cj *= pref / norm;
            }
            signed_poly_phase_tt(&Polynomial::new(coeffs), &sg, a, grid.dk())?
        }
    };
    let tt_norm = tt.norm();
    let tt = tt.scale(C64::new(1.0 / tt_norm, 0.0));

    let overlap: C64 = proj
        .coeffs
        .iter()
        .zip(&values)
        .map(|(g, f)| g.conj() * f)
        .sum::<C64>()
        / (proj.n_tilde * norm);
    proj.distance = (1.0 - overlap.norm_sqr()).max(0.0).sqrt();
    proj.nodes = m;
    proj.cheb_half_width = c;
    proj.fit_cutoff = choose_cutoff(gamma, l, grid.cell, eps)?;
    Ok((tt, proj))
}

/// Cartesian primitive `c x^l y^m z^n e^{-gamma r^2}` about `center`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveGaussian {
    pub center: [f64; 3],
    pub gamma: f64,
    pub ang: [u32; 3],
}

impl PrimitiveGaussian {
    pub fn new(center: [f64; 3], gamma: f64, ang: [u32; 3]) -> Result<Self> {
        let g = Self { center, gamma, ang };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma)?;
        if let Some(a) = self.ang.iter().find(|&&a| a > MAX_ANGULAR) {
            return Err(Error::Parameter(format!(
                "angular momentum {a} exceeds {MAX_ANGULAR}"
            )));
        }
        if self.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parameter("center must be finite".into()));
        }
        Ok(())
    }

    pub fn total_angular(&self) -> u32 {
        self.ang.iter().sum()
    }

    /// Normalized value at `r`.
    pub fn eval(&self, r: [f64; 3]) -> f64 {
        (0..3)
            .map(|ax| {
                let x = r[ax] - self.center[ax];
                let l = self.ang[ax];
                norm_const(l, self.gamma) * x.powi(l as i32) * (-self.gamma * x * x).exp()
            })
            .product()
    }
}

/// A 3D primitive as the tensor product of three axis trains.
#[derive(Clone, Debug)]
pub struct Primitive3D {
    /// Normalized train on `3 * qubits_per_axis` sites, x bits first.
    pub tt: TensorTrain,
    pub axes: [Projection1D; 3],
    /// Norm of the unnormalized projection onto the retained plane waves.
    pub weight: f64,
}

impl Primitive3D {
    pub fn distance_bound(&self) -> f64 {
        // trace distances of a product state add in quadrature at most
        self.axes.iter().map(|p| p.distance * p.distance).sum::<f64>().sqrt()
    }
}

/// Tensor product of the per-axis trains with translation phases; each axis
/// is budgeted `eps / sqrt(3)`.
pub fn primitive_3d_mps(g: &PrimitiveGaussian, grid: &PlaneWaveGrid, eps: f64) -> Result<Primitive3D> {
    primitive_3d_mps_with(g, grid, eps, AxisRoute::Tensorized)
}

pub fn primitive_3d_mps_with(
    g: &PrimitiveGaussian,
    grid: &PlaneWaveGrid,
    eps: f64,
    route: AxisRoute,
) -> Result<Primitive3D> {
    g.validate()?;
    check_eps(eps)?;
    let axis_eps = eps / 3f64.sqrt();
    let (tx, px) = primitive_1d_mps_with(g.gamma, g.ang[0], g.center[0], grid, axis_eps, route)?;
    let (ty, py) = primitive_1d_mps_with(g.gamma, g.ang[1], g.center[1], grid, axis_eps, route)?;
    let (tz, pz) = primitive_1d_mps_with(g.gamma, g.ang[2], g.center[2], grid, axis_eps, route)?;
    let tt = tx.tensor_product(&ty).tensor_product(&tz);
    let weight = px.kept_norm() * py.kept_norm() * pz.kept_norm();
    Ok(Primitive3D {
        tt,
        axes: [px, py, pz],
        weight,
    })
}
