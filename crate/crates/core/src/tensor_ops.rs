//! Dense complex-matrix kernel.
//!
//! Matrices are stored row-major. Multipartite operators follow the usual
//! Kronecker convention: the last subsystem is the fastest-varying index.

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Tolerance for structural checks (Hermiticity, trace, positivity).
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Tolerance for entropy and eigenvalue comparisons.
pub const SPECTRAL_TOL: f64 = 1e-8;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::EntryCount {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = C64::new(e, 0.0);
        }
        m
    }

    /// The projector `|v⟩⟨v|` (not normalized).
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), v.len(), |r, c| v[r] * v[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        Ok(acc)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest `|m_ij - conj(m_ji)|`; infinite for non-square matrices.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Conjugation `U · self · U†`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.matmul(self)?.matmul(&u.adjoint())
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    pub fn eigvalsh(&self) -> Result<Vec<f64>> {
        let dev = self.hermiticity_deviation();
        if dev > STRUCTURAL_TOL.max(1e-12 * self.frobenius_norm()) {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let m = self.to_nalgebra();
        let mut vals: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        Ok(vals)
    }

    /// Numerical rank: number of singular values above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        svd_singular_values(self)
            .iter()
            .filter(|&&s| s > tol)
            .count()
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Ordered subsystem dimensions of a multipartite operator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsystemShape {
    dims: Vec<usize>,
}

impl SubsystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidShape("no subsystems".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d == 0) {
            return Err(Error::InvalidShape(format!("subsystem dimension {d}")));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Row-major strides: `strides[i]` is the flat step of subsystem `i`.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }

    fn check_matrix(&self, m: &ComplexMatrix) -> Result<()> {
        let total = self.total();
        if m.rows() != total || m.cols() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: if m.rows() != total {
                    m.rows()
                } else {
                    m.cols()
                },
            });
        }
        Ok(())
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.dims.len() {
            return Err(Error::SubsystemOutOfRange {
                index,
                count: self.dims.len(),
            });
        }
        Ok(())
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows() {
        for ac in 0..a.cols() {
            let x = a[(ar, ac)];
            if x == ZERO {
                continue;
            }
            for br in 0..b.rows() {
                for bc in 0..b.cols() {
                    out[(ar * b.rows() + br, ac * b.cols() + bc)] = x * b[(br, bc)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// Reorders tensor factors: output subsystem `i` is input subsystem `perm[i]`.
///
/// Returns the permuted matrix together with its new shape.
pub fn permute_subsystems(
    m: &ComplexMatrix,
    shape: &SubsystemShape,
    perm: &[usize],
) -> Result<(ComplexMatrix, SubsystemShape)> {
    shape.check_matrix(m)?;
    let n = shape.len();
    let mut seen = vec![false; n];
    if perm.len() != n
        || perm
            .iter()
            .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
    {
        return Err(Error::InvalidPermutation {
            perm: perm.to_vec(),
            count: n,
        });
    }
    let new_shape = SubsystemShape::new(perm.iter().map(|&p| shape.dims()[p]).collect())?;
    let old_strides = shape.strides();
    let new_strides = new_shape.strides();
    let total = shape.total();

    // new flat index -> old flat index
    let map: Vec<usize> = (0..total)
        .map(|idx| {
            perm.iter()
                .enumerate()
                .map(|(i, &p)| (idx / new_strides[i]) % new_shape.dims()[i] * old_strides[p])
                .sum()
        })
        .collect();
    let out = ComplexMatrix::from_fn(total, total, |r, c| m[(map[r], map[c])]);
    Ok((out, new_shape))
}

/// Traces out every subsystem not listed in `keep`. Kept subsystems retain
/// their original relative order.
pub fn partial_trace(
    m: &ComplexMatrix,
    shape: &SubsystemShape,
    keep: &[usize],
) -> Result<(ComplexMatrix, SubsystemShape)> {
    shape.check_matrix(m)?;
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    for &k in keep {
        shape.check_index(k)?;
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..shape.len()).filter(|i| !kept.contains(i)).collect();

    let strides = shape.strides();
    let dims = shape.dims();
    let offsets = |subs: &[usize]| -> Vec<usize> {
        let count: usize = subs.iter().map(|&s| dims[s]).product();
        (0..count)
            .map(|mut idx| {
                let mut off = 0;
                for &s in subs.iter().rev() {
                    off += (idx % dims[s]) * strides[s];
                    idx /= dims[s];
                }
                off
            })
            .collect()
    };
    let kept_off = offsets(&kept);
    let traced_off = offsets(&traced);

    let out = ComplexMatrix::from_fn(kept_off.len(), kept_off.len(), |r, c| {
        traced_off
            .iter()
            .map(|&t| m[(kept_off[r] + t, kept_off[c] + t)])
            .sum()
    });
    let new_shape = SubsystemShape::new(kept.iter().map(|&k| dims[k]).collect())?;
    Ok((out, new_shape))
}

/// Transposes the factor at subsystem `sys`.
pub fn partial_transpose(
    m: &ComplexMatrix,
    shape: &SubsystemShape,
    sys: usize,
) -> Result<ComplexMatrix> {
    shape.check_matrix(m)?;
    shape.check_index(sys)?;
    let stride = shape.strides()[sys];
    let d = shape.dims()[sys];
    let total = shape.total();
    Ok(ComplexMatrix::from_fn(total, total, |r, c| {
        let dr = (r / stride) % d;
        let dc = (c / stride) % d;
        let r2 = r - dr * stride + dc * stride;
        let c2 = c - dc * stride + dr * stride;
        m[(r2, c2)]
    }))
}

/// Singular values in non-increasing order; `min(rows, cols)` of them.
pub fn svd_singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    if m.data().iter().all(|z| *z == ZERO) {
        return vec![0.0; m.rows().min(m.cols())];
    }
    let mut s: Vec<f64> = m.to_nalgebra().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Singular values of a real row-major matrix, non-increasing.
pub fn real_singular_values(rows: usize, cols: usize, data: &[f64]) -> Vec<f64> {
    debug_assert_eq!(rows * cols, data.len());
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    if data.iter().all(|&x| x == 0.0) {
        return vec![0.0; rows.min(cols)];
    }
    let m = DMatrix::from_row_slice(rows, cols, data);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Von Neumann entropy in nats.
pub fn von_neumann_entropy(m: &ComplexMatrix) -> Result<f64> {
    von_neumann_entropy_with(m, STRUCTURAL_TOL)
}

/// Von Neumann entropy with an explicit clamping tolerance: eigenvalues
/// within `tol` of zero count as zero, anything more negative is an error.
pub fn von_neumann_entropy_with(m: &ComplexMatrix, tol: f64) -> Result<f64> {
    let vals = m.eigvalsh()?;
    if let Some(&min) = vals.first() {
        if min < -tol {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
    }
    Ok(vals
        .into_iter()
        .filter(|&e| e > tol)
        .map(|e| -e * e.ln())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c64(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn bell_phi_plus() -> ComplexMatrix {
        let s = 0.5f64.sqrt();
        ComplexMatrix::outer(&[c64(s, 0.0), ZERO, ZERO, c64(s, 0.0)])
    }

    fn shape(d: &[usize]) -> SubsystemShape {
        SubsystemShape::new(d.to_vec()).unwrap()
    }

    #[test]
    fn new_rejects_wrong_entry_count() {
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![ZERO; 3]),
            Err(Error::EntryCount {
                expected: 4,
                found: 3
            })
        ));
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let out = kron(
            &ComplexMatrix::diag(&[1.0, 0.0]),
            &ComplexMatrix::diag(&[0.0, 1.0]),
        );
        assert_eq!(out, ComplexMatrix::diag(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn kron_xx_expectation_on_phi_plus() {
        let xx = kron(&sigma_x(), &sigma_x());
        let t = bell_phi_plus().trace_product(&xx).unwrap();
        assert_abs_diff_eq!(t.re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn permute_identity_and_swap() {
        let a = ComplexMatrix::from_fn(2, 2, |r, c| c64(r as f64 + 1.0, c as f64));
        let b = ComplexMatrix::from_fn(3, 3, |r, c| c64((r * 3 + c) as f64, -1.0));
        let ab = kron(&a, &b);
        let s = shape(&[2, 3]);
        let (same, sh) = permute_subsystems(&ab, &s, &[0, 1]).unwrap();
        assert_eq!(same, ab);
        assert_eq!(sh, s);
        let (swapped, sh) = permute_subsystems(&ab, &s, &[1, 0]).unwrap();
        assert_eq!(swapped, kron(&b, &a));
        assert_eq!(sh.dims(), &[3, 2]);
    }

    #[test]
    fn permute_rejects_bad_input() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(
            permute_subsystems(&m, &shape(&[2, 2]), &[0, 0]),
            Err(Error::InvalidPermutation { .. })
        ));
        assert!(matches!(
            permute_subsystems(&m, &shape(&[2, 3]), &[1, 0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_trace_of_product() {
        let a = ComplexMatrix::from_fn(2, 2, |r, c| c64((r + 2 * c) as f64, r as f64 - c as f64));
        let b = ComplexMatrix::diag(&[0.25, 0.5, 1.0]);
        let (red, sh) = partial_trace(&kron(&a, &b), &shape(&[2, 3]), &[0]).unwrap();
        assert_eq!(sh.dims(), &[2]);
        assert!(red.max_abs_diff(&a.scale(1.75)).unwrap() < 1e-14);
        let (red, _) = partial_trace(&kron(&a, &b), &shape(&[2, 3]), &[1]).unwrap();
        assert!(red.max_abs_diff(&b.scale_complex(a.trace())).unwrap() < 1e-14);
    }

    #[test]
    fn partial_trace_of_ghz_and_identity() {
        let s = 0.5f64.sqrt();
        let mut v = vec![ZERO; 8];
        v[0] = c64(s, 0.0);
        v[7] = c64(s, 0.0);
        let ghz = ComplexMatrix::outer(&v);
        let (red, _) = partial_trace(&ghz, &shape(&[2, 2, 2]), &[0]).unwrap();
        assert!(
            red.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5))
                .unwrap()
                < 1e-14
        );
        let purity = red.trace_product(&red).unwrap().re;
        assert_abs_diff_eq!(purity, 0.5, epsilon = 1e-14);

        let mixed = ComplexMatrix::identity(8).scale(1.0 / 8.0);
        let (red, sh) = partial_trace(&mixed, &shape(&[2, 2, 2]), &[0, 1]).unwrap();
        assert_eq!(sh.total(), 4);
        assert!(
            red.max_abs_diff(&ComplexMatrix::identity(4).scale(0.25))
                .unwrap()
                < 1e-14
        );
    }

    #[test]
    fn partial_trace_errors() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(
            partial_trace(&m, &shape(&[2, 2]), &[]),
            Err(Error::EmptyKeepSet)
        ));
        assert!(matches!(
            partial_trace(&m, &shape(&[2, 2]), &[2]),
            Err(Error::SubsystemOutOfRange { .. })
        ));
        assert!(partial_trace(&m, &shape(&[2, 3]), &[0]).is_err());
    }

    #[test]
    fn partial_transpose_of_product() {
        let a = ComplexMatrix::diag(&[0.7, 0.3]);
        let b = ComplexMatrix::from_fn(2, 2, |r, c| {
            if r == c {
                c64(0.5, 0.0)
            } else if r < c {
                c64(0.1, 0.2)
            } else {
                c64(0.1, -0.2)
            }
        });
        let pt = partial_transpose(&kron(&a, &b), &shape(&[2, 2]), 1).unwrap();
        assert!(pt.max_abs_diff(&kron(&a, &b.transpose())).unwrap() < 1e-15);
        assert!(pt.eigvalsh().unwrap()[0] > 0.0);
    }

    #[test]
    fn svd_examples() {
        assert_eq!(
            svd_singular_values(&ComplexMatrix::identity(3)),
            vec![1.0; 3]
        );
        let s = svd_singular_values(&ComplexMatrix::diag(&[3.0, -4.0]));
        assert_abs_diff_eq!(s[0], 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s[1], 3.0, epsilon = 1e-12);
        assert_eq!(
            svd_singular_values(&ComplexMatrix::zeros(2, 5)),
            vec![0.0, 0.0]
        );
        let rect = ComplexMatrix::zeros(3, 7);
        assert_eq!(svd_singular_values(&rect).len(), 3);
    }

    #[test]
    fn entropy_examples() {
        assert_abs_diff_eq!(
            von_neumann_entropy(&bell_phi_plus()).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        for d in 2..6 {
            let m = ComplexMatrix::identity(d).scale(1.0 / d as f64);
            assert_abs_diff_eq!(
                von_neumann_entropy(&m).unwrap(),
                (d as f64).ln(),
                epsilon = 1e-12
            );
        }
        let bad = ComplexMatrix::diag(&[1.5, -0.5]);
        assert!(matches!(
            von_neumann_entropy(&bad),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn eigvalsh_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(m.eigvalsh(), Err(Error::NotHermitian { .. })));
    }
}
