//! Tensor-train constructors for functions sampled on dyadic grids.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::tt::{Core, TensorTrain};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Tolerance used when tensorizing raw samples.
pub const TENSORIZE_TOL: f64 = 1e-14;

/// `n_points` equispaced samples of `[a, b]` on `n_sites` binary sites,
/// `x_j = a + (b - a) j / (N - 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    pub a: f64,
    pub b: f64,
    pub n_points: u128,
    pub n_sites: usize,
}

impl Grid1D {
    pub fn new(a: f64, b: f64, n_points: u128, n_sites: usize) -> Result<Self> {
        if !(a < b) {
            return Err(Error::Parameter(format!("grid needs a < b, got [{a}, {b}]")));
        }
        if n_points < 2 {
            return Err(Error::Parameter(format!("grid needs N >= 2, got {n_points}")));
        }
        if n_sites == 0 || n_sites > 127 || n_points > 1u128 << n_sites {
            return Err(Error::Parameter(format!(
                "{n_points} points do not fit in {n_sites} sites"
            )));
        }
        Ok(Self {
            a,
            b,
            n_points,
            n_sites,
        })
    }

    /// Grid with the fewest sites that hold `n_points`.
    pub fn fitted(a: f64, b: f64, n_points: u128) -> Result<Self> {
        let n_sites = ceil_log2(n_points).max(1);
        Self::new(a, b, n_points, n_sites)
    }

    pub fn spacing(&self) -> f64 {
        (self.b - self.a) / (self.n_points - 1) as f64
    }

    pub fn point(&self, j: u128) -> f64 {
        self.a + self.spacing() * j as f64
    }
}

/// Symmetric grid `x_i = 2a i / (N - 1)` for `i in -(N-1)/2 ..= (N-1)/2`.
///
/// Codewords carry the sign in bit 1 and `|i|` in bits 2..n. The codeword
/// `1 0 .. 0` ("-0") is not a grid point of its own.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedGrid1D {
    pub half_width: f64,
    pub n_points: u64,
    pub n_sites: usize,
}

impl SignedGrid1D {
    pub fn new(half_width: f64, n_points: u64, n_sites: usize) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::Parameter(format!(
                "signed grid half-width must be > 0, got {half_width}"
            )));
        }
        if n_points % 2 == 0 || n_points < 3 {
            return Err(Error::Parameter(format!(
                "signed grid needs an odd N >= 3, got {n_points}"
            )));
        }
        let r = (n_points - 1) / 2;
        if n_sites < 2 || n_sites > 64 || (1u128 << (n_sites - 1)) < r as u128 + 1 {
            return Err(Error::Parameter(format!(
                "{n_points} signed points do not fit in {n_sites} sites"
            )));
        }
        Ok(Self {
            half_width,
            n_points,
            n_sites,
        })
    }

    pub fn fitted(half_width: f64, n_points: u64) -> Result<Self> {
        let n_sites = ceil_log2(n_points as u128).max(2);
        Self::new(half_width, n_points, n_sites)
    }

    /// Largest index magnitude `(N - 1) / 2`.
    pub fn radius(&self) -> i64 {
        ((self.n_points - 1) / 2) as i64
    }

    pub fn point(&self, i: i64) -> f64 {
        self.half_width * i as f64 / self.radius() as f64
    }

    /// Codeword (as an integer, MSB = sign) for signed index `i`.
    pub fn codeword(&self, i: i64) -> u64 {
        let mag = i.unsigned_abs();
        if i < 0 {
            (1u64 << (self.n_sites - 1)) | mag
        } else {
            mag
        }
    }

    /// Signed index of a codeword, or `None` for "-0" and out-of-range codewords.
    pub fn index_of(&self, code: u64) -> Option<i64> {
        let sign_bit = 1u64 << (self.n_sites - 1);
        let mag = (code & (sign_bit - 1)) as i64;
        if mag > self.radius() || code >> self.n_sites != 0 {
            return None;
        }
        if code & sign_bit != 0 {
            if mag == 0 {
                None
            } else {
                Some(-mag)
            }
        } else {
            Some(mag)
        }
    }

    /// The unsigned magnitude grid `0, a/R, .., a` on the remaining sites.
    fn magnitude_grid(&self) -> Result<Grid1D> {
        Grid1D::new(0.0, self.half_width, self.radius() as u128 + 1, self.n_sites - 1)
    }
}

pub(crate) fn ceil_log2(n: u128) -> usize {
    if n <= 1 {
        0
    } else {
        128 - (n - 1).leading_zeros() as usize
    }
}

/// Polynomial with complex coefficients, `coeffs[j]` multiplying `x^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<C64>) -> Self {
        let coeffs = if coeffs.is_empty() { vec![ZERO] } else { coeffs };
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    /// Nominal degree (leading coefficients may vanish).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * x + c)
    }

    /// `x -> p(-x)`.
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| if j % 2 == 1 { -c } else { *c })
                .collect(),
        )
    }
}

/// Samples at indices `0..len`, zero padded to `2^n_sites`.
pub fn tensorize(samples: &[C64], n_sites: usize) -> Result<TensorTrain> {
    if n_sites == 0 || n_sites > 40 {
        return Err(Error::InvalidShape(format!(
            "tensorize supports 1..=40 sites, got {n_sites}"
        )));
    }
    let len = 1usize << n_sites;
    if samples.len() > len {
        return Err(Error::InvalidShape(format!(
            "{} samples do not fit in {n_sites} sites",
            samples.len()
        )));
    }
    let mut v = samples.to_vec();
    v.resize(len, ZERO);
    TensorTrain::from_dense(&v, TENSORIZE_TOL)
}

fn binomial_table(d: usize) -> Vec<Vec<f64>> {
    let mut t = vec![vec![0.0; d + 1]; d + 1];
    for j in 0..=d {
        t[j][0] = 1.0;
        for i in 1..=j {
            t[j][i] = t[j - 1][i - 1] + if i < j { t[j - 1][i] } else { 0.0 };
        }
    }
    t
}

fn powers(y: f64, d: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(d + 1);
    let mut acc = 1.0;
    for _ in 0..=d {
        p.push(acc);
        acc *= y;
    }
    p
}

/// `p(x_j)` on the grid points and zero on the padding, with bond dimension
/// at most `d + 2`.
///
/// The first `d + 1` bond states carry the powers `y^0..y^d` of the partial
/// grid coordinate of a prefix that is already below the last valid index
/// `N - 1`; the extra state tracks a prefix that still equals that index.
/// Prefixes above it terminate. Nothing is densified, so `n_sites` up to 127
/// works.
pub fn poly_tt(p: &Polynomial, g: &Grid1D) -> TensorTrain {
    let d = p.degree();
    let dd = d + 1;
    let n = g.n_sites;
    let h = g.spacing();
    let max_index = g.n_points - 1;
    let bit = |k: usize| ((max_index >> (n - 1 - k)) & 1) as usize;
    let binom = binomial_table(d);

    // transfer of the power vector under y -> y + delta
    let shift = |delta: f64| -> Vec<Vec<f64>> {
        let dp = powers(delta, d);
        let mut m = vec![vec![0.0; dd]; dd];
        for j in 0..dd {
            for i in 0..=j {
                m[i][j] = binom[j][i] * dp[j - i];
            }
        }
        m
    };

    if n == 1 {
        let data = (0..2u128)
            .map(|s| {
                if s <= max_index {
                    p.eval(g.point(s))
                } else {
                    ZERO
                }
            })
            .collect();
        return TensorTrain::new(vec![Core::new(1, 1, data).unwrap()]).unwrap();
    }

    let mut cores = Vec::with_capacity(n);
    // partial index of the "equal" prefix before site k
    let mut eq_prefix: u128 = 0;
    for k in 0..n {
        let weight = (1u128 << (n - 1 - k)) as f64;
        let mk = bit(k);
        let y_eq = g.a + h * eq_prefix as f64;
        let first = k == 0;
        let last = k == n - 1;
        let left = if first { 1 } else { dd + 1 };
        let right = if last { 1 } else { dd + 1 };
        let eq_row = if first { 0 } else { dd };
        let mut core = Core::zeros(left, right);
        for s in 0..2usize {
            let delta = h * weight * s as f64;
            if !first {
                let m = shift(delta);
                for i in 0..dd {
                    if last {
                        let mut acc = ZERO;
                        for j in i..dd {
                            acc += p.coeffs[j] * m[i][j];
                        }
                        core.set(i, s, 0, acc);
                    } else {
                        for j in i..dd {
                            core.set(i, s, j, C64::new(m[i][j], 0.0));
                        }
                    }
                }
            }
            if s == mk {
                if last {
                    core.set(eq_row, s, 0, p.eval(y_eq + delta));
                } else {
                    core.set(eq_row, s, dd, ONE);
                }
            } else if s < mk {
                let yp = powers(y_eq + delta, d);
                if last {
                    core.set(eq_row, s, 0, p.eval(y_eq + delta));
                } else {
                    for (j, v) in yp.iter().enumerate() {
                        core.set(eq_row, s, j, C64::new(*v, 0.0));
                    }
                }
            }
        }
        cores.push(core);
        if mk == 1 {
            eq_prefix += 1u128 << (n - 1 - k);
        }
    }
    TensorTrain::new(cores).expect("poly_tt cores are consistent")
}

fn selector(s: usize) -> TensorTrain {
    let v = if s == 0 { [ONE, ZERO] } else { [ZERO, ONE] };
    TensorTrain::product(&[v]).unwrap()
}

/// Rank-1 train of `exp(i theta j)` over the unsigned index `j` on `n` sites.
fn unsigned_phase(n: usize, theta: f64) -> TensorTrain {
    let vecs: Vec<[C64; 2]> = (0..n)
        .map(|k| {
            let w = (1u128 << (n - 1 - k)) as f64;
            [ONE, C64::from_polar(1.0, theta * w)]
        })
        .collect();
    TensorTrain::product(&vecs).unwrap()
}

fn signed_assembly(p: &Polynomial, g: &SignedGrid1D, theta: f64) -> Result<TensorTrain> {
    let mag = g.magnitude_grid()?;
    let mut pos = poly_tt(p, &mag);
    let mut neg = poly_tt(&p.reflect(), &mag);
    if theta != 0.0 {
        pos = pos.hadamard(&unsigned_phase(mag.n_sites, theta))?;
        neg = neg.hadamard(&unsigned_phase(mag.n_sites, -theta))?;
    }
    let t_pos = selector(0).tensor_product(&pos);
    let t_neg = selector(1).tensor_product(&neg);
    let minus_zero = selector(1)
        .tensor_product(&TensorTrain::basis(mag.n_sites, 0)?)
        .scale(-p.eval(0.0));
    t_pos.add(&t_neg)?.add(&minus_zero)
}

/// `p(x_i)` at the codeword of every signed index `i`, zero at "-0" and at
/// out-of-range codewords. Bond dimension at most `2d + 5`.
pub fn signed_poly_tt(p: &Polynomial, g: &SignedGrid1D) -> Result<TensorTrain> {
    signed_assembly(p, g, 0.0)
}

/// `p(x_i) exp(i (i dk) x0)` on a signed grid.
///
/// The phase is applied inside each sign branch, where it is rank one, so
/// the bond dimensions are exactly those of [`signed_poly_tt`].
pub fn signed_poly_phase_tt(
    p: &Polynomial,
    g: &SignedGrid1D,
    x0: f64,
    dk: f64,
) -> Result<TensorTrain> {
    signed_assembly(p, g, dk * x0)
}

/// `exp(i (i dk) x0)` at the codeword of every signed index `i` (value 1 at
/// "-0").
///
/// In sign-magnitude encoding the phase is rank one within each sign branch
/// but not across the sign bit, so the train has bond dimension 2 unless the
/// phase is trivial.
pub fn phase_tt(g: &SignedGrid1D, x0: f64, dk: f64) -> TensorTrain {
    let n = g.n_sites;
    let theta = dk * x0;
    if theta == 0.0 {
        return TensorTrain::ones(n).unwrap();
    }
    let mut cores = Vec::with_capacity(n);
    cores.push(Core::from_fn(1, 2, |_, s, b| if s == b { ONE } else { ZERO }));
    for k in 1..n {
        let w = (1u128 << (n - 1 - k)) as f64;
        let phase = |branch: usize, s: usize| {
            let sign = if branch == 0 { 1.0 } else { -1.0 };
            C64::from_polar(1.0, sign * theta * w * s as f64)
        };
        let core = if k == n - 1 {
            Core::from_fn(2, 1, |a, s, _| phase(a, s))
        } else {
            Core::from_fn(2, 2, |a, s, b| if a == b { phase(a, s) } else { ZERO })
        };
        cores.push(core);
    }
    TensorTrain::new(cores).unwrap()
}
