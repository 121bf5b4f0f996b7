//! Quantized tensor trains over binary site indices.
//!
//! A train of `n` cores represents a vector of length `2^n`. Site 1 holds the
//! most significant bit, so the bit string `(s_1, .., s_n)` addresses entry
//! `i = sum_k 2^(n-k) s_k`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default site cap for dense conversion (2^24 complex entries, 256 MiB).
pub const DEFAULT_DENSE_CAP: usize = 24;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
/// Relative floor below which singular values count as zero.
const ROUNDOFF: f64 = 4.0 * f64::EPSILON;

/// Rank-3 core of shape `(left, 2, right)`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Core {
    left: usize,
    right: usize,
    data: Vec<C64>,
}

impl Core {
    pub fn new(left: usize, right: usize, data: Vec<C64>) -> Result<Self> {
        if left == 0 || right == 0 {
            return Err(Error::InvalidShape(format!(
                "core bond dimensions must be >= 1, got ({left}, 2, {right})"
            )));
        }
        if data.len() != left * 2 * right {
            return Err(Error::InvalidShape(format!(
                "core ({left}, 2, {right}) needs {} entries, got {}",
                left * 2 * right,
                data.len()
            )));
        }
        Ok(Self { left, right, data })
    }

    pub fn zeros(left: usize, right: usize) -> Self {
        Self {
            left,
            right,
            data: vec![ZERO; left * 2 * right],
        }
    }

    pub fn from_fn(left: usize, right: usize, f: impl Fn(usize, usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(left * 2 * right);
        for a in 0..left {
            for s in 0..2 {
                for b in 0..right {
                    data.push(f(a, s, b));
                }
            }
        }
        Self { left, right, data }
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.left, 2, self.right]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, a: usize, s: usize, b: usize) -> C64 {
        self.data[(a * 2 + s) * self.right + b]
    }

    #[inline]
    pub fn set(&mut self, a: usize, s: usize, b: usize, v: C64) {
        self.data[(a * 2 + s) * self.right + b] = v;
    }

    /// The `left x right` matrix for a fixed physical index.
    pub fn slice(&self, s: usize) -> DMatrix<C64> {
        DMatrix::from_fn(self.left, self.right, |a, b| self.get(a, s, b))
    }

    /// Reshape to `(2*left, right)`, rows indexed by `(a, s)`.
    fn left_unfolding(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(2 * self.left, self.right, &self.data)
    }

    /// Reshape to `(left, 2*right)`, columns indexed by `(s, b)`.
    fn right_unfolding(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.left, 2 * self.right, &self.data)
    }

    fn from_left_unfolding(m: &DMatrix<C64>) -> Self {
        let left = m.nrows() / 2;
        let right = m.ncols();
        let mut data = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for c in 0..right {
                data.push(m[(r, c)]);
            }
        }
        Self { left, right, data }
    }

    fn from_right_unfolding(m: &DMatrix<C64>) -> Self {
        let left = m.nrows();
        let right = m.ncols() / 2;
        let mut data = Vec::with_capacity(m.len());
        for r in 0..left {
            for c in 0..m.ncols() {
                data.push(m[(r, c)]);
            }
        }
        Self { left, right, data }
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CanonicalForm {
    None,
    Left,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TensorTrain {
    cores: Vec<Core>,
    form: CanonicalForm,
}

/// Singular value decomposition with singular values sorted in descending order.
pub(crate) struct SortedSvd {
    pub u: DMatrix<C64>,
    pub s: Vec<f64>,
    pub v_t: DMatrix<C64>,
}

// nalgebra's complex SVD silently returns a wrong factorization for some
// nearly rank-deficient wide matrices, so the decomposition goes through faer.
pub(crate) fn svd_sorted(m: DMatrix<C64>) -> Result<SortedSvd> {
    let (nr, nc) = m.shape();
    let k = nr.min(nc);
    if k == 0 {
        return Ok(SortedSvd {
            u: DMatrix::zeros(nr, 0),
            s: Vec::new(),
            v_t: DMatrix::zeros(0, nc),
        });
    }
    let a = faer::Mat::<faer::c64>::from_fn(nr, nc, |i, j| {
        let z = m[(i, j)];
        faer::c64::new(z.re, z.im)
    });
    let svd = a.thin_svd().map_err(|_| Error::NoConvergence)?;
    let (fu, fs, fv) = (svd.U(), svd.S().column_vector(), svd.V());
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| fs[j].re.total_cmp(&fs[i].re));
    let s = order.iter().map(|&i| fs[i].re).collect();
    let u = DMatrix::from_fn(nr, k, |r, c| {
        let z = fu[(r, order[c])];
        C64::new(z.re, z.im)
    });
    let v_t = DMatrix::from_fn(k, nc, |r, c| {
        let z = fv[(c, order[r])];
        C64::new(z.re, -z.im)
    });
    Ok(SortedSvd { u, s, v_t })
}

/// Smallest rank whose discarded tail has 2-norm at most `budget`.
fn rank_for_budget(s: &[f64], budget: f64) -> usize {
    let mut tail = 0.0;
    let mut r = s.len();
    while r > 1 {
        let next = tail + s[r - 1] * s[r - 1];
        if next.sqrt() > budget {
            break;
        }
        tail = next;
        r -= 1;
    }
    r
}

/// Number of singular values at or above `cutoff * s_max` (at least one).
fn rank_for_relative_cutoff(s: &[f64], cutoff: f64) -> usize {
    let thresh = cutoff * s.first().copied().unwrap_or(0.0);
    s.iter().take_while(|&&x| x >= thresh).count().max(1)
}

/// Result of [`TensorTrain::round_with_report`].
#[derive(Clone, Debug)]
pub struct Rounded {
    pub tt: TensorTrain,
    /// Sum of squared discarded singular values per internal bond, left to right.
    pub discarded: Vec<f64>,
}

impl Rounded {
    /// `sqrt(sum over bonds of discarded sigma^2)`, the bound on the rounding error.
    pub fn error_bound(&self) -> f64 {
        self.discarded.iter().sum::<f64>().sqrt()
    }
}

impl TensorTrain {
    pub fn new(cores: Vec<Core>) -> Result<Self> {
        if cores.is_empty() {
            return Err(Error::InvalidShape("a tensor train needs at least one core".into()));
        }
        if cores[0].left != 1 {
            return Err(Error::InvalidShape(format!(
                "first core has left bond {}, expected 1",
                cores[0].left
            )));
        }
        let last = cores.len() - 1;
        if cores[last].right != 1 {
            return Err(Error::InvalidShape(format!(
                "last core has right bond {}, expected 1",
                cores[last].right
            )));
        }
        for (j, w) in cores.windows(2).enumerate() {
            if w[0].right != w[1].left {
                return Err(Error::InvalidShape(format!(
                    "bond {} mismatch: core {} right = {}, core {} left = {}",
                    j + 1,
                    j,
                    w[0].right,
                    j + 1,
                    w[1].left
                )));
            }
        }
        Ok(Self {
            cores,
            form: CanonicalForm::None,
        })
    }

    fn from_parts(cores: Vec<Core>, form: CanonicalForm) -> Self {
        Self { cores, form }
    }

    /// Product state `v_1 ⊗ v_2 ⊗ ... ⊗ v_n`.
    pub fn product(vectors: &[[C64; 2]]) -> Result<Self> {
        let cores = vectors
            .iter()
            .map(|v| Core::new(1, 1, vec![v[0], v[1]]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(cores)
    }

    /// Computational basis vector `e_index` on `n_sites` sites.
    pub fn basis(n_sites: usize, index: u128) -> Result<Self> {
        if n_sites == 0 || n_sites > 128 || (n_sites < 128 && index >> n_sites != 0) {
            return Err(Error::InvalidShape(format!(
                "index {index} does not fit in {n_sites} sites"
            )));
        }
        let vecs: Vec<[C64; 2]> = (0..n_sites)
            .map(|k| {
                let bit = (index >> (n_sites - 1 - k)) & 1;
                if bit == 0 {
                    [ONE, ZERO]
                } else {
                    [ZERO, ONE]
                }
            })
            .collect();
        Self::product(&vecs)
    }

    pub fn zeros(n_sites: usize) -> Result<Self> {
        Self::product(&vec![[ZERO, ZERO]; n_sites])
    }

    pub fn ones(n_sites: usize) -> Result<Self> {
        Self::product(&vec![[ONE, ONE]; n_sites])
    }

    pub fn n_sites(&self) -> usize {
        self.cores.len()
    }

    pub fn cores(&self) -> &[Core] {
        &self.cores
    }

    pub fn into_cores(self) -> Vec<Core> {
        self.cores
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        self.form
    }

    /// Internal bond dimensions `m_1 .. m_{n-1}`.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.cores[..self.cores.len() - 1]
            .iter()
            .map(|c| c.right)
            .collect()
    }

    pub fn max_bond_dim(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Number of stored complex parameters.
    pub fn n_params(&self) -> usize {
        self.cores.iter().map(|c| c.data.len()).sum()
    }

    /// Exact or truncated TT-SVD of a dense vector of length `2^n`.
    ///
    /// At each bond the smallest rank is kept whose discarded singular values
    /// have 2-norm at most `max(tol, 4 eps) * ||v||`.
    pub fn from_dense(v: &[C64], tol: f64) -> Result<Self> {
        if v.is_empty() || !v.len().is_power_of_two() || v.len() < 2 {
            return Err(Error::InvalidShape(format!(
                "dense length {} is not 2^n with n >= 1",
                v.len()
            )));
        }
        if !(tol >= 0.0) {
            return Err(Error::Parameter(format!("tolerance must be >= 0, got {tol}")));
        }
        let n = v.len().trailing_zeros() as usize;
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // singular values at roundoff level are dropped even when tol = 0
        let budget = tol.max(ROUNDOFF) * norm;

        let mut cores = Vec::with_capacity(n);
        let mut rank = 1usize;
        // remainder is (rank, 2^(n-k)) row-major
        let mut rem: Vec<C64> = v.to_vec();
        for k in 0..n - 1 {
            let cols = rem.len() / (rank * 2);
            let m = DMatrix::from_row_slice(rank * 2, cols, &rem);
            let svd = svd_sorted(m)?;
            let r = rank_for_budget(&svd.s, budget);
            let u = svd.u.columns(0, r).into_owned();
            cores.push(Core::from_left_unfolding(&u));
            let mut next = Vec::with_capacity(r * cols);
            for i in 0..r {
                for c in 0..cols {
                    next.push(svd.v_t[(i, c)] * svd.s[i]);
                }
            }
            rem = next;
            rank = r;
            debug_assert_eq!(cores[k].right, rank);
        }
        cores.push(Core::new(rank, 1, rem)?);
        Self::new(cores)
    }

    pub fn to_dense(&self) -> Result<Vec<C64>> {
        self.to_dense_with_cap(DEFAULT_DENSE_CAP)
    }

    pub fn to_dense_with_cap(&self, cap: usize) -> Result<Vec<C64>> {
        let n = self.n_sites();
        if n > cap {
            return Err(Error::Capacity { n_sites: n, cap });
        }
        // cur is (2^k, r) row-major
        let mut cur = vec![ONE];
        let mut r = 1usize;
        for core in &self.cores {
            let rows = cur.len() / r;
            let nr = core.right;
            let mut next = vec![ZERO; rows * 2 * nr];
            for i in 0..rows {
                for a in 0..r {
                    let x = cur[i * r + a];
                    if x == ZERO {
                        continue;
                    }
                    for s in 0..2 {
                        let out = &mut next[(i * 2 + s) * nr..(i * 2 + s + 1) * nr];
                        let row = &core.data[(a * 2 + s) * nr..(a * 2 + s + 1) * nr];
                        for (o, c) in out.iter_mut().zip(row) {
                            *o += x * c;
                        }
                    }
                }
            }
            cur = next;
            r = nr;
        }
        Ok(cur)
    }

    /// Contract a single bit string (MSB first).
    pub fn eval(&self, bits: &[u8]) -> Result<C64> {
        if bits.len() != self.n_sites() {
            return Err(Error::ShapeMismatch(bits.len(), self.n_sites()));
        }
        let mut row = vec![ONE];
        for (core, &s) in self.cores.iter().zip(bits) {
            let s = s as usize;
            if s > 1 {
                return Err(Error::InvalidShape(format!("bit value {s} is not 0 or 1")));
            }
            let mut next = vec![ZERO; core.right];
            for (a, x) in row.iter().enumerate() {
                for (b, o) in next.iter_mut().enumerate() {
                    *o += x * core.get(a, s, b);
                }
            }
            row = next;
        }
        Ok(row[0])
    }

    /// Entry at integer index `i = sum_k 2^(n-k) s_k`.
    pub fn eval_index(&self, index: u128) -> Result<C64> {
        let n = self.n_sites();
        if n < 128 && index >> n != 0 {
            return Err(Error::InvalidShape(format!(
                "index {index} out of range for {n} sites"
            )));
        }
        let bits: Vec<u8> = (0..n).map(|k| ((index >> (n - 1 - k)) & 1) as u8).collect();
        self.eval(&bits)
    }

    fn check_same_len(&self, other: &Self) -> Result<()> {
        if self.n_sites() != other.n_sites() {
            Err(Error::ShapeMismatch(self.n_sites(), other.n_sites()))
        } else {
            Ok(())
        }
    }

    /// Direct sum: bond dimensions add.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_len(other)?;
        let n = self.n_sites();
        if n == 1 {
            let a = &self.cores[0];
            let b = &other.cores[0];
            let data = a.data.iter().zip(&b.data).map(|(x, y)| x + y).collect();
            return Ok(Self::from_parts(vec![Core::new(1, 1, data)?], CanonicalForm::None));
        }
        let mut cores = Vec::with_capacity(n);
        for (j, (a, b)) in self.cores.iter().zip(&other.cores).enumerate() {
            let core = if j == 0 {
                Core::from_fn(1, a.right + b.right, |_, s, c| {
                    if c < a.right {
                        a.get(0, s, c)
                    } else {
                        b.get(0, s, c - a.right)
                    }
                })
            } else if j == n - 1 {
                Core::from_fn(a.left + b.left, 1, |r, s, _| {
                    if r < a.left {
                        a.get(r, s, 0)
                    } else {
                        b.get(r - a.left, s, 0)
                    }
                })
            } else {
                Core::from_fn(a.left + b.left, a.right + b.right, |r, s, c| {
                    match (r < a.left, c < a.right) {
                        (true, true) => a.get(r, s, c),
                        (false, false) => b.get(r - a.left, s, c - a.right),
                        _ => ZERO,
                    }
                })
            };
            cores.push(core);
        }
        Ok(Self::from_parts(cores, CanonicalForm::None))
    }

    /// Multiply by a scalar. The factor is absorbed in the last core, which keeps
    /// a left-canonical train left-canonical.
    pub fn scale(&self, c: C64) -> Self {
        let mut out = self.clone();
        let last = out.cores.len() - 1;
        for z in &mut out.cores[last].data {
            *z *= c;
        }
        out
    }

    /// Entrywise product; bond dimensions multiply.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.check_same_len(other)?;
        let cores = self
            .cores
            .iter()
            .zip(&other.cores)
            .map(|(a, b)| {
                Core::from_fn(a.left * b.left, a.right * b.right, |r, s, c| {
                    let (ra, rb) = (r / b.left, r % b.left);
                    let (ca, cb) = (c / b.right, c % b.right);
                    a.get(ra, s, ca) * b.get(rb, s, cb)
                })
            })
            .collect();
        Ok(Self::from_parts(cores, CanonicalForm::None))
    }

    /// Kronecker product `self ⊗ other`; `self` supplies the high bits.
    pub fn tensor_product(&self, other: &Self) -> Self {
        let mut cores = self.cores.clone();
        cores.extend(other.cores.iter().cloned());
        Self::from_parts(cores, CanonicalForm::None)
    }

    /// `<self, other>`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &Self) -> Result<C64> {
        self.check_same_len(other)?;
        let mut env = DMatrix::from_element(1, 1, ONE);
        for (a, b) in self.cores.iter().zip(&other.cores) {
            let mut next = DMatrix::zeros(a.right, b.right);
            for s in 0..2 {
                next += a.slice(s).adjoint() * &env * b.slice(s);
            }
            env = next;
        }
        Ok(env[(0, 0)])
    }

    pub fn norm(&self) -> f64 {
        if self.form == CanonicalForm::Left {
            self.cores.last().unwrap().frobenius()
        } else {
            self.left_canonicalize().cores.last().unwrap().frobenius()
        }
    }

    /// QR sweep left to right; every core but the last becomes an isometry.
    pub fn left_canonicalize(&self) -> Self {
        let n = self.n_sites();
        let mut cores = self.cores.clone();
        for j in 0..n - 1 {
            let m = cores[j].left_unfolding();
            let qr = m.qr();
            let q = qr.q();
            let r = qr.r();
            cores[j] = Core::from_left_unfolding(&q);
            let next = r * cores[j + 1].right_unfolding();
            cores[j + 1] = Core::from_right_unfolding(&next);
        }
        Self::from_parts(cores, CanonicalForm::Left)
    }

    /// `||A^H A - I||_max` for each core's left unfolding; the last entry
    /// is reported for completeness but is not expected to vanish.
    pub fn isometry_residuals(&self) -> Vec<f64> {
        self.cores
            .iter()
            .map(|c| {
                let m = c.left_unfolding();
                let g = m.adjoint() * &m;
                let mut worst = 0.0f64;
                for i in 0..g.nrows() {
                    for j in 0..g.ncols() {
                        let target = if i == j { ONE } else { ZERO };
                        worst = worst.max((g[(i, j)] - target).norm());
                    }
                }
                worst
            })
            .collect()
    }

    /// SVD rounding with a cutoff relative to the largest singular value at each bond.
    pub fn round(&self, svd_cutoff: f64) -> Result<Self> {
        Ok(self.round_with_report(svd_cutoff)?.tt)
    }

    pub fn round_with_report(&self, svd_cutoff: f64) -> Result<Rounded> {
        if !(svd_cutoff >= 0.0) {
            return Err(Error::Parameter(format!(
                "svd cutoff must be >= 0, got {svd_cutoff}"
            )));
        }
        let n = self.n_sites();
        let mut cores = self.left_canonicalize().cores;
        let mut discarded = vec![0.0; n.saturating_sub(1)];
        for j in (1..n).rev() {
            let m = cores[j].right_unfolding();
            let svd = svd_sorted(m)?;
            let k = rank_for_relative_cutoff(&svd.s, svd_cutoff);
            discarded[j - 1] = svd.s[k..].iter().map(|x| x * x).sum();
            let vt = svd.v_t.rows(0, k).into_owned();
            cores[j] = Core::from_right_unfolding(&vt);
            let mut us = svd.u.columns(0, k).into_owned();
            for (c, &sv) in svd.s[..k].iter().enumerate() {
                for r in 0..us.nrows() {
                    us[(r, c)] *= sv;
                }
            }
            let prev = cores[j - 1].left_unfolding() * us;
            cores[j - 1] = Core::from_left_unfolding(&prev);
        }
        Ok(Rounded {
            tt: Self::from_parts(cores, CanonicalForm::None),
            discarded,
        })
    }

    pub fn to_dump(&self) -> TtDump {
        TtDump {
            shapes: self.cores.iter().map(|c| c.shape()).collect(),
            cores: self
                .cores
                .iter()
                .map(|c| c.data.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn from_dump(d: &TtDump) -> Result<Self> {
        if d.shapes.len() != d.cores.len() {
            return Err(Error::InvalidShape(format!(
                "{} shapes but {} cores",
                d.shapes.len(),
                d.cores.len()
            )));
        }
        let cores = d
            .shapes
            .iter()
            .zip(&d.cores)
            .map(|(sh, data)| {
                if sh[1] != 2 {
                    return Err(Error::InvalidShape(format!("site dimension {} != 2", sh[1])));
                }
                Core::new(sh[0], sh[2], data.iter().map(|p| C64::new(p[0], p[1])).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(cores)
    }
}

/// JSON debug dump: core shapes plus flattened `[re, im]` entries in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TtDump {
    pub shapes: Vec<[usize; 3]>,
    pub cores: Vec<Vec<[f64; 2]>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn product_basis_from_dense() {
        let tt = TensorTrain::from_dense(&[c(1.0), c(0.0), c(0.0), c(0.0)], 0.0).unwrap();
        assert_eq!(tt.bond_dims(), vec![1]);
        assert_eq!(tt.to_dense().unwrap(), vec![c(1.0), c(0.0), c(0.0), c(0.0)]);
    }

    #[test]
    fn uniform_vector_is_rank_one() {
        let tt = TensorTrain::from_dense(&[c(0.5); 4], 0.0).unwrap();
        assert_eq!(tt.max_bond_dim(), 1);
    }

    #[test]
    fn basis_cores_give_e1() {
        let tt = TensorTrain::product(&[[ONE, ZERO], [ZERO, ONE]]).unwrap();
        assert_eq!(tt.to_dense().unwrap(), vec![c(0.0), c(1.0), c(0.0), c(0.0)]);
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(matches!(TensorTrain::from_dense(&[], 0.0), Err(Error::InvalidShape(_))));
        assert!(matches!(
            TensorTrain::from_dense(&[c(1.0); 3], 0.0),
            Err(Error::InvalidShape(_))
        ));
    }

    #[test]
    fn dense_cap_enforced() {
        let tt = TensorTrain::ones(30).unwrap();
        assert_eq!(
            tt.to_dense(),
            Err(Error::Capacity {
                n_sites: 30,
                cap: DEFAULT_DENSE_CAP
            })
        );
        assert_eq!(tt.to_dense_with_cap(4).unwrap_err(), Error::Capacity { n_sites: 30, cap: 4 });
    }

    #[test]
    fn sum_of_basis_vectors() {
        let a = TensorTrain::basis(3, 2).unwrap();
        let b = TensorTrain::basis(3, 5).unwrap();
        let d = a.add(&b).unwrap().to_dense().unwrap();
        for (i, z) in d.iter().enumerate() {
            let want = if i == 2 || i == 5 { 1.0 } else { 0.0 };
            assert_eq!(*z, c(want));
        }
        assert!(a.add(&b).unwrap().max_bond_dim() <= 2);
    }

    #[test]
    fn add_zero_is_identity() {
        let a = TensorTrain::basis(4, 9).unwrap();
        let z = TensorTrain::zeros(4).unwrap();
        assert_eq!(a.add(&z).unwrap().to_dense().unwrap(), a.to_dense().unwrap());
    }

    #[test]
    fn single_site_trains() {
        let a = TensorTrain::product(&[[c(1.0), c(2.0)]]).unwrap();
        assert_eq!(a.max_bond_dim(), 1);
        assert_eq!(a.add(&a).unwrap().to_dense().unwrap(), vec![c(2.0), c(4.0)]);
        assert!((a.norm() - 5f64.sqrt()).abs() < 1e-14);
        let r = a.round(0.5).unwrap();
        assert_eq!(r.to_dense().unwrap(), a.to_dense().unwrap());
    }

    #[test]
    fn tensor_product_of_basis() {
        let e0 = TensorTrain::basis(1, 0).unwrap();
        let e1 = TensorTrain::basis(1, 1).unwrap();
        let p = e0.tensor_product(&e1);
        assert_eq!(p.to_dense().unwrap(), TensorTrain::basis(2, 1).unwrap().to_dense().unwrap());
    }

    #[test]
    fn norms_of_simple_trains() {
        assert!((TensorTrain::basis(5, 17).unwrap().norm() - 1.0).abs() < 1e-15);
        assert_eq!(TensorTrain::zeros(5).unwrap().norm(), 0.0);
    }

    #[test]
    fn orthogonal_basis_inner_product() {
        let a = TensorTrain::basis(4, 3).unwrap();
        let b = TensorTrain::basis(4, 12).unwrap();
        assert_eq!(a.inner_product(&b).unwrap(), ZERO);
        assert_eq!(a.inner_product(&a).unwrap(), ONE);
    }

    #[test]
    fn negative_cutoff_rejected() {
        let a = TensorTrain::basis(3, 1).unwrap();
        assert!(matches!(a.round(-1e-3), Err(Error::Parameter(_))));
    }

    #[test]
    fn shape_mismatch() {
        let a = TensorTrain::basis(3, 1).unwrap();
        let b = TensorTrain::basis(4, 1).unwrap();
        assert_eq!(a.add(&b).unwrap_err(), Error::ShapeMismatch(3, 4));
        assert!(a.hadamard(&b).is_err());
        assert!(a.inner_product(&b).is_err());
    }

    #[test]
    fn invalid_cores_rejected() {
        let c1 = Core::zeros(1, 2);
        let c2 = Core::zeros(3, 1);
        assert!(TensorTrain::new(vec![c1, c2]).is_err());
        assert!(TensorTrain::new(vec![Core::zeros(2, 1)]).is_err());
        assert!(Core::new(0, 1, vec![]).is_err());
    }

    #[test]
    fn rank_two_rounding() {
        // e_0 ⊗ e_0 + 1e-8 e_1 ⊗ e_1 has Schmidt values (1, 1e-8)
        let a = TensorTrain::basis(2, 0).unwrap();
        let b = TensorTrain::basis(2, 3).unwrap().scale(c(1e-8));
        let s = a.add(&b).unwrap();
        assert_eq!(s.max_bond_dim(), 2);
        let r = s.round_with_report(1e-6).unwrap();
        assert_eq!(r.tt.max_bond_dim(), 1);
        let d0 = s.to_dense().unwrap();
        let d1 = r.tt.to_dense().unwrap();
        let err: f64 = d0.iter().zip(&d1).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        assert!(err <= 1e-8 * (1.0 + 1e-12));
        assert!(err <= r.error_bound() * (1.0 + 1e-12));
    }

    #[test]
    fn dump_round_trip() {
        let a = TensorTrain::basis(3, 5)
            .unwrap()
            .add(&TensorTrain::basis(3, 2).unwrap().scale(C64::new(0.5, -1.5)))
            .unwrap();
        let js = serde_json::to_string(&a.to_dump()).unwrap();
        let back: TtDump = serde_json::from_str(&js).unwrap();
        assert_eq!(TensorTrain::from_dump(&back).unwrap(), a);
    }
}
