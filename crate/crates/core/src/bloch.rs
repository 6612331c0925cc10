//! Bloch correlation tensors of tripartite qudit states.
//!
//! With `B_0 = I` and `B_a = λ_a` the expansion reads
//! `ρ = Σ w(μ)w(ν)w(κ) Tr(ρ B_μ⊗B_ν⊗B_κ) B_μ⊗B_ν⊗B_κ`
//! where `w(0) = 1/d` and `w(a) = 1/2` otherwise; the seven component
//! families are the slices of that coefficient array with a given pattern
//! of identity factors.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::states::DensityMatrix;
use crate::su_basis::GeneratorBasis;
use crate::tensor_ops::{real_singular_values, ComplexMatrix, C64, ZERO};

/// Largest imaginary part tolerated in a trace pairing.
pub const IMAGINARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationTensor {
    d: usize,
    t1: Vec<f64>,
    t2: Vec<f64>,
    t3: Vec<f64>,
    /// `n x n`, row-major, `n = d² - 1`.
    t12: Vec<f64>,
    t13: Vec<f64>,
    t23: Vec<f64>,
    /// Flat `n³` array, index `(i n + j) n + k`.
    t123: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Pivot {
    First,
    Second,
    Third,
}

impl Pivot {
    pub const ALL: [Pivot; 3] = [Pivot::First, Pivot::Second, Pivot::Third];

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            1 => Some(Pivot::First),
            2 => Some(Pivot::Second),
            3 => Some(Pivot::Third),
            _ => None,
        }
    }
}

/// One flattening of the three-body tensor: the pivot index labels rows,
/// the remaining two (in original order) form the column index.
#[derive(Debug, Clone, PartialEq)]
pub struct Matricization {
    pivot: Pivot,
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matricization {
    pub fn pivot(&self) -> Pivot {
        self.pivot
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn singular_values(&self) -> Vec<f64> {
        real_singular_values(self.rows, self.cols, &self.data)
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }
}

/// Frobenius norms of the seven component families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochNorms {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t12: f64,
    pub t13: f64,
    pub t23: f64,
    pub t123: f64,
}

/// Euclidean norm summed in ascending order of the squares, so any
/// reshuffling of the entries yields the bit-identical result.
fn norm(v: &[f64]) -> f64 {
    let mut squares: Vec<f64> = v.iter().map(|x| x * x).collect();
    squares.sort_by(f64::total_cmp);
    squares.iter().sum::<f64>().sqrt()
}

impl CorrelationTensor {
    /// A tensor whose only nonzero family is the three-body one.
    pub fn from_t123(d: usize, t123: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidLocalDimension(d));
        }
        let n = d * d - 1;
        if t123.len() != n * n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n * n,
                found: t123.len(),
            });
        }
        Ok(Self {
            d,
            t1: vec![0.0; n],
            t2: vec![0.0; n],
            t3: vec![0.0; n],
            t12: vec![0.0; n * n],
            t13: vec![0.0; n * n],
            t23: vec![0.0; n * n],
            t123,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of generators, `d² - 1`.
    pub fn n(&self) -> usize {
        self.d * self.d - 1
    }

    pub fn t1(&self) -> &[f64] {
        &self.t1
    }

    pub fn t2(&self) -> &[f64] {
        &self.t2
    }

    pub fn t3(&self) -> &[f64] {
        &self.t3
    }

    pub fn t12(&self) -> &[f64] {
        &self.t12
    }

    pub fn t13(&self) -> &[f64] {
        &self.t13
    }

    pub fn t23(&self) -> &[f64] {
        &self.t23
    }

    pub fn t123(&self) -> &[f64] {
        &self.t123
    }

    pub fn t123_at(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.n();
        self.t123[(i * n + j) * n + k]
    }

    pub fn norms(&self) -> BlochNorms {
        BlochNorms {
            t1: norm(&self.t1),
            t2: norm(&self.t2),
            t3: norm(&self.t3),
            t12: norm(&self.t12),
            t13: norm(&self.t13),
            t23: norm(&self.t23),
            t123: norm(&self.t123),
        }
    }

    /// Rebuilds the density operator from the components.
    pub fn reconstruct(&self, basis: &GeneratorBasis) -> Result<ComplexMatrix> {
        if basis.d() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: basis.d(),
            });
        }
        let d = self.d;
        let n = self.n();
        let m = n + 1;
        let w = |mu: usize| if mu == 0 { 1.0 / d as f64 } else { 0.5 };
        let mut coeff = vec![0.0; m * m * m];
        for mu in 0..m {
            for nu in 0..m {
                for ka in 0..m {
                    coeff[(mu * m + nu) * m + ka] =
                        w(mu) * w(nu) * w(ka) * self.component(mu, nu, ka);
                }
            }
        }
        let ops = operator_list(basis);
        // out[(a b c),(a' b' c')] = Σ coeff[μνκ] B_μ[a,a'] B_ν[b,b'] B_κ[c,c']
        let d2 = d * d;
        // step 1: over μ -> P[ν κ][a a']
        let mut p1 = vec![ZERO; m * m * d2];
        for mu in 0..m {
            let op = ops[mu].data();
            for nk in 0..m * m {
                let c = coeff[mu * m * m + nk];
                if c == 0.0 {
                    continue;
                }
                let dst = &mut p1[nk * d2..(nk + 1) * d2];
                for (x, o) in dst.iter_mut().zip(op) {
                    *x += o * c;
                }
            }
        }
        // step 2: over ν -> Q[κ][a a' b b']
        let d4 = d2 * d2;
        let mut p2 = vec![ZERO; m * d4];
        for nu in 0..m {
            let op = ops[nu].data();
            for ka in 0..m {
                let src = &p1[(nu * m + ka) * d2..(nu * m + ka + 1) * d2];
                let dst = &mut p2[ka * d4..(ka + 1) * d4];
                for (aa, s) in src.iter().enumerate() {
                    if *s == ZERO {
                        continue;
                    }
                    for (bb, o) in op.iter().enumerate() {
                        dst[aa * d2 + bb] += s * o;
                    }
                }
            }
        }
        // step 3: over κ
        let total = d * d * d;
        let mut out = ComplexMatrix::zeros(total, total);
        for ka in 0..m {
            let op = ops[ka].data();
            let src = &p2[ka * d4..(ka + 1) * d4];
            for a in 0..d {
                for a2 in 0..d {
                    for b in 0..d {
                        for b2 in 0..d {
                            let s = src[(a * d + a2) * d2 + b * d + b2];
                            if s == ZERO {
                                continue;
                            }
                            for c in 0..d {
                                for c2 in 0..d {
                                    let r = (a * d + b) * d + c;
                                    let col = (a2 * d + b2) * d + c2;
                                    out[(r, col)] += s * op[c * d + c2];
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Component `Tr(ρ B_μ⊗B_ν⊗B_κ)` with index 0 standing for the identity.
    pub fn component(&self, mu: usize, nu: usize, ka: usize) -> f64 {
        let n = self.n();
        match (mu, nu, ka) {
            (0, 0, 0) => 1.0,
            (i, 0, 0) => self.t1[i - 1],
            (0, j, 0) => self.t2[j - 1],
            (0, 0, k) => self.t3[k - 1],
            (i, j, 0) => self.t12[(i - 1) * n + j - 1],
            (i, 0, k) => self.t13[(i - 1) * n + k - 1],
            (0, j, k) => self.t23[(j - 1) * n + k - 1],
            (i, j, k) => self.t123_at(i - 1, j - 1, k - 1),
        }
    }
}

fn operator_list(basis: &GeneratorBasis) -> Vec<ComplexMatrix> {
    std::iter::once(ComplexMatrix::identity(basis.d()))
        .chain(basis.generators().iter().cloned())
        .collect()
}

/// Computes all seven component families by trace pairing.
///
/// The state must live on `[d, d, d]` with `d` the basis dimension; embed
/// smaller subsystems first.
pub fn correlation_tensor(
    state: &DensityMatrix,
    basis: &GeneratorBasis,
) -> Result<CorrelationTensor> {
    let d = basis.d();
    if state.dims() != [d, d, d] {
        return Err(Error::InvalidShape(format!(
            "correlation tensor needs shape [{d}, {d}, {d}], got {:?}",
            state.dims()
        )));
    }
    let full = pairing_array(state.matrix(), d, &operator_list(basis))?;
    let m = d * d;
    let n = m - 1;
    let at = |mu: usize, nu: usize, ka: usize| full[(mu * m + nu) * m + ka];

    let mut t = CorrelationTensor {
        d,
        t1: (1..m).map(|i| at(i, 0, 0)).collect(),
        t2: (1..m).map(|j| at(0, j, 0)).collect(),
        t3: (1..m).map(|k| at(0, 0, k)).collect(),
        t12: Vec::with_capacity(n * n),
        t13: Vec::with_capacity(n * n),
        t23: Vec::with_capacity(n * n),
        t123: Vec::with_capacity(n * n * n),
    };
    for a in 1..m {
        for b in 1..m {
            t.t12.push(at(a, b, 0));
            t.t13.push(at(a, 0, b));
            t.t23.push(at(0, a, b));
            for c in 1..m {
                t.t123.push(at(a, b, c));
            }
        }
    }
    Ok(t)
}

/// `G[μνκ] = Tr(ρ ops[μ]⊗ops[ν]⊗ops[κ])` by successive contraction over
/// the third, second, and first subsystem.
fn pairing_array(rho: &ComplexMatrix, d: usize, ops: &[ComplexMatrix]) -> Result<Vec<f64>> {
    let m = ops.len();
    let d2 = d * d;
    let d4 = d2 * d2;
    let total = d * d2;
    debug_assert_eq!(rho.rows(), total);

    // s3[κ][(a b),(a' b')] = Σ_{c c'} ρ[(a b c),(a' b' c')] Z_κ[c', c]
    let mut s3 = vec![ZERO; m * d4];
    for (ka, z) in ops.iter().enumerate() {
        let dst = &mut s3[ka * d4..(ka + 1) * d4];
        for ab in 0..d2 {
            for ab2 in 0..d2 {
                let mut acc = ZERO;
                for c in 0..d {
                    for c2 in 0..d {
                        let zc = z[(c2, c)];
                        if zc == ZERO {
                            continue;
                        }
                        acc += rho[(ab * d + c, ab2 * d + c2)] * zc;
                    }
                }
                dst[ab * d2 + ab2] = acc;
            }
        }
    }

    // s2[ν κ][a, a'] = Σ_{b b'} s3[κ][(a b),(a' b')] Y_ν[b', b]
    let mut s2 = vec![ZERO; m * m * d2];
    for (nu, y) in ops.iter().enumerate() {
        for ka in 0..m {
            let src = &s3[ka * d4..(ka + 1) * d4];
            let dst = &mut s2[(nu * m + ka) * d2..(nu * m + ka + 1) * d2];
            for a in 0..d {
                for a2 in 0..d {
                    let mut acc = ZERO;
                    for b in 0..d {
                        for b2 in 0..d {
                            let yb = y[(b2, b)];
                            if yb == ZERO {
                                continue;
                            }
                            acc += src[(a * d + b) * d2 + a2 * d + b2] * yb;
                        }
                    }
                    dst[a * d + a2] = acc;
                }
            }
        }
    }

    let mut full = Vec::with_capacity(m * m * m);
    let mut worst: f64 = 0.0;
    for x in ops {
        for nk in 0..m * m {
            let src = &s2[nk * d2..(nk + 1) * d2];
            let mut acc: C64 = ZERO;
            for a in 0..d {
                for a2 in 0..d {
                    acc += src[a * d + a2] * x[(a2, a)];
                }
            }
            worst = worst.max(acc.im.abs());
            full.push(acc.re);
        }
    }
    if worst > IMAGINARY_TOL {
        return Err(Error::ImaginaryResidue { residue: worst });
    }
    Ok(full)
}

/// Flattens the three-body tensor with the chosen index as rows.
pub fn matricize(t: &CorrelationTensor, pivot: Pivot) -> Matricization {
    let n = t.n();
    let mut data = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = t.t123_at(i, j, k);
                let (row, col) = match pivot {
                    Pivot::First => (i, j * n + k),
                    Pivot::Second => (j, i * n + k),
                    Pivot::Third => (k, i * n + j),
                };
                data[row * n * n + col] = v;
            }
        }
    }
    Matricization {
        pivot,
        rows: n,
        cols: n * n,
        data,
    }
}

/// Frobenius norm of the three-body tensor.
pub fn frobenius_t123(t: &CorrelationTensor) -> f64 {
    norm(&t.t123)
}

/// Embeds a tripartite state into `[d, d, d]` with `d` its largest local
/// dimension (identity if already equal).
pub fn embed_to_common_dimension(state: &DensityMatrix) -> Result<DensityMatrix> {
    if state.dims().len() != 3 {
        return Err(Error::InvalidShape(format!(
            "expected a tripartite state, got {:?}",
            state.dims()
        )));
    }
    let d = *state.dims().iter().max().expect("three subsystems");
    if state.dims().iter().all(|&x| x == d) {
        return Ok(state.clone());
    }
    crate::states::embed(state, &[d, d, d])
}
