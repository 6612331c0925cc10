//! Density matrices and the state constructions used for entanglement
//! detection: Werner states, GHZ/W mixtures, PPT examples, noise mixing,
//! regrouped tensor products, and embeddings.

use crate::error::{Error, Result};
use crate::tensor_ops::{
    kron, kron_all, partial_trace, partial_transpose, permute_subsystems, von_neumann_entropy,
    ComplexMatrix, SubsystemShape, C64, ONE, STRUCTURAL_TOL, ZERO,
};
use serde::Serialize;

/// Largest total dimension `tensor_and_regroup` will build by default.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

/// A Hermitian, positive semidefinite, unit-trace matrix on a fixed
/// subsystem shape.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    shape: SubsystemShape,
}

impl DensityMatrix {
    /// Validates all invariants at [`STRUCTURAL_TOL`].
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        Self::with_tolerance(matrix, dims, STRUCTURAL_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, dims: Vec<usize>, tol: f64) -> Result<Self> {
        let shape = SubsystemShape::new(dims)?;
        if matrix.rows() != shape.total() || matrix.cols() != shape.total() {
            return Err(Error::DimensionMismatch {
                expected: shape.total(),
                found: matrix.rows(),
            });
        }
        let deviation = matrix.hermiticity_deviation();
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if (trace - ONE).norm() > tol {
            return Err(Error::InvalidTrace { trace: trace.re });
        }
        let min = matrix.eigvalsh()?[0];
        if min < -tol {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(Self { matrix, shape })
    }

    /// Normalizes a positive semidefinite operator to unit trace.
    pub fn normalized(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr.abs() < f64::EPSILON {
            return Err(Error::ZeroTrace);
        }
        Self::new(matrix.scale(1.0 / tr), dims)
    }

    /// The projector onto a (not necessarily normalized) pure state.
    pub fn pure(amplitudes: &[C64], dims: Vec<usize>) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq < f64::EPSILON {
            return Err(Error::ZeroTrace);
        }
        let scale = norm_sq.sqrt().recip();
        let v: Vec<C64> = amplitudes.iter().map(|a| a * scale).collect();
        Self::new(ComplexMatrix::outer(&v), dims)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let n: usize = dims.iter().product();
        Self::new(ComplexMatrix::identity(n).scale(1.0 / n as f64), dims)
    }

    /// Skips validation; for internal constructions that preserve the
    /// invariants by construction.
    pub(crate) fn from_parts(matrix: ComplexMatrix, shape: SubsystemShape) -> Self {
        debug_assert_eq!(matrix.rows(), shape.total());
        Self { matrix, shape }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn shape(&self) -> &SubsystemShape {
        &self.shape
    }

    pub fn dims(&self) -> &[usize] {
        self.shape.dims()
    }

    pub fn dim(&self) -> usize {
        self.shape.total()
    }

    pub fn purity(&self) -> f64 {
        self.matrix
            .trace_product(&self.matrix)
            .expect("square matrix")
            .re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.matrix
            .eigvalsh()
            .expect("density matrices are Hermitian")
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&e| e > tol).count()
    }

    pub fn entropy(&self) -> Result<f64> {
        von_neumann_entropy(&self.matrix)
    }

    /// Reduced state on the listed subsystems.
    pub fn reduced(&self, keep: &[usize]) -> Result<Self> {
        let (m, shape) = partial_trace(&self.matrix, &self.shape, keep)?;
        Ok(Self::from_parts(m, shape))
    }

    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let (m, shape) = permute_subsystems(&self.matrix, &self.shape, perm)?;
        Ok(Self::from_parts(m, shape))
    }

    /// Partial transpose over every subsystem in `side`.
    pub fn partial_transpose(&self, side: &[usize]) -> Result<ComplexMatrix> {
        side.iter().try_fold(self.matrix.clone(), |m, &s| {
            partial_transpose(&m, &self.shape, s)
        })
    }

    /// Conjugation by a product of local unitaries, one per subsystem.
    pub fn conjugate_local(&self, unitaries: &[ComplexMatrix]) -> Result<Self> {
        if unitaries.len() != self.shape.len() {
            return Err(Error::DimensionMismatch {
                expected: self.shape.len(),
                found: unitaries.len(),
            });
        }
        for (u, &d) in unitaries.iter().zip(self.dims()) {
            if u.rows() != d || u.cols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: u.rows(),
                });
            }
        }
        let u = kron_all(unitaries);
        Ok(Self::from_parts(
            self.matrix.conjugate_by(&u)?,
            self.shape.clone(),
        ))
    }

    /// Merges adjacent subsystems `[from, to)` into one factor.
    pub fn merge_subsystems(&self, from: usize, to: usize) -> Result<Self> {
        let dims = self.dims();
        if from >= to || to > dims.len() {
            return Err(Error::InvalidShape(format!(
                "cannot merge subsystems {from}..{to} of {}",
                dims.len()
            )));
        }
        let mut merged = dims[..from].to_vec();
        merged.push(dims[from..to].iter().product());
        merged.extend_from_slice(&dims[to..]);
        Ok(Self::from_parts(
            self.matrix.clone(),
            SubsystemShape::new(merged)?,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WernerParams {
    p: f64,
    d: usize,
}

impl WernerParams {
    pub fn new(p: f64, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidLocalDimension(d));
        }
        if !(-1.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter {
                name: "p".into(),
                value: p,
                reason: "Werner parameter must lie in [-1, 1]".into(),
            });
        }
        Ok(Self { p, d })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }
}

/// The swap operator `Σ |i,j⟩⟨j,i|` on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j, j * d + i)] = ONE;
        }
    }
    m
}

/// `(I + p·SWAP) / (d² + p d)` on `[d, d]`.
pub fn werner(params: WernerParams) -> DensityMatrix {
    let WernerParams { p, d } = params;
    let n = d * d;
    let norm = 1.0 / (n as f64 + p * d as f64);
    let m = ComplexMatrix::identity(n)
        .add(&swap_operator(d).scale(p))
        .expect("same shape")
        .scale(norm);
    DensityMatrix::from_parts(m, SubsystemShape::new(vec![d, d]).expect("d >= 2"))
}

fn basis_ket(dims: &[usize], digits: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

fn superposition(dims: &[usize], terms: &[&[usize]]) -> Vec<C64> {
    let mut v = vec![ZERO; dims.iter().product()];
    for t in terms {
        v[basis_ket(dims, t)] += ONE;
    }
    v
}

/// `(|000⟩ + |111⟩)/√2`.
pub fn ghz_state() -> DensityMatrix {
    let dims = vec![2, 2, 2];
    let v = superposition(&dims, &[&[0, 0, 0], &[1, 1, 1]]);
    DensityMatrix::pure(&v, dims).expect("valid state")
}

/// `(|001⟩ + |010⟩ + |100⟩)/√3`.
pub fn w_state() -> DensityMatrix {
    let dims = vec![2, 2, 2];
    let v = superposition(&dims, &[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
    DensityMatrix::pure(&v, dims).expect("valid state")
}

/// `(|012⟩ + |021⟩ + |111⟩)/√3` on three qutrits.
pub fn qutrit_psi() -> DensityMatrix {
    let dims = vec![3, 3, 3];
    let v = superposition(&dims, &[&[0, 1, 2], &[0, 2, 1], &[1, 1, 1]]);
    DensityMatrix::pure(&v, dims).expect("valid state")
}

/// The seven local vectors `x_0..x_6` of the completely symmetric state.
pub const CS_VECTORS: [[f64; 4]; 7] = [
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [1.0, 1.0, 1.0, 1.0],
    [1.0, 2.0, 3.0, 4.0],
    [1.0, -2.0, 3.0, -4.0],
];

/// The eighth common zero of the quadrics through `x_0..x_6`; `|x_7, x_7⟩`
/// is the only further symmetric product vector in their span.
pub const CS_EXTRA_VECTOR: [f64; 4] = [3.0, -8.0, 3.0, -8.0];

fn real_product_ket(x: &[f64; 4]) -> Vec<C64> {
    let mut v = Vec::with_capacity(16);
    for &a in x {
        for &b in x {
            v.push(C64::new(a * b, 0.0));
        }
    }
    v
}

/// Unnormalized `Σ λ_i |x_i x_i⟩⟨x_i x_i| - lam |x_7 x_7⟩⟨x_7 x_7|`.
fn cs_operator(lambdas: &[f64; 7], lam: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(16, 16);
    for (x, &w) in CS_VECTORS.iter().zip(lambdas) {
        m = m
            .add(&ComplexMatrix::outer(&real_product_ket(x)).scale(w))
            .expect("same shape");
    }
    m.sub(&ComplexMatrix::outer(&real_product_ket(&CS_EXTRA_VECTOR)).scale(lam))
        .expect("same shape")
}

fn check_cs_weights(lambdas: &[f64; 7], lam: f64) -> Result<()> {
    if let Some(&w) = lambdas.iter().find(|&&w| !(w > 0.0)) {
        return Err(Error::InvalidParameter {
            name: "lambda_i".into(),
            value: w,
            reason: "weights must be positive".into(),
        });
    }
    if !(lam > 0.0) {
        return Err(Error::InvalidParameter {
            name: "lam".into(),
            value: lam,
            reason: "must be positive".into(),
        });
    }
    Ok(())
}

/// Completely symmetric 4x4 state. Fails with `NotPositive` when `lam`
/// exceeds [`cs_max_lambda`].
pub fn cs_state(lambdas: &[f64; 7], lam: f64) -> Result<DensityMatrix> {
    check_cs_weights(lambdas, lam)?;
    let m = cs_operator(lambdas, lam);
    let tr = m.trace().re;
    let m = m.scale(1.0 / tr);
    let min = m.eigvalsh()?[0];
    // the boundary value of lam leaves a zero eigenvalue up to round-off
    let tol = STRUCTURAL_TOL.max(1e-13 * m.frobenius_norm());
    if min < -tol {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    Ok(DensityMatrix::from_parts(
        m,
        SubsystemShape::new(vec![4, 4]).expect("static shape"),
    ))
}

/// Largest `lam` keeping the completely symmetric operator positive
/// semidefinite, located by bisection on its minimum eigenvalue.
pub fn cs_max_lambda(lambdas: &[f64; 7]) -> Result<f64> {
    check_cs_weights(lambdas, 1.0)?;
    let min_eig = |lam: f64| -> f64 {
        let m = cs_operator(lambdas, lam);
        let tr = m.trace().re;
        m.scale(1.0 / tr).eigvalsh().expect("Hermitian")[0]
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    while min_eig(hi) >= 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if min_eig(mid) >= -1e-15 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// The rank-ten PPT state on `C^4 ⊗ C^4`.
pub fn beta_state() -> DensityMatrix {
    let dims = [4, 4];
    let v1 = superposition(&dims, &[&[0, 0], &[1, 1], &[2, 2]]);
    let v2 = superposition(&dims, &[&[0, 1], &[1, 0], &[3, 3]]);
    let mut m = ComplexMatrix::outer(&v1)
        .add(&ComplexMatrix::outer(&v2))
        .expect("same shape");
    for (i, j) in [
        (1, 2),
        (1, 3),
        (3, 0),
        (2, 1),
        (0, 2),
        (2, 0),
        (0, 3),
        (3, 1),
    ] {
        let k = basis_ket(&dims, &[i, j]);
        m[(k, k)] += ONE;
    }
    DensityMatrix::normalized(m, dims.to_vec()).expect("valid state")
}

/// Convex combination `Σ w_i ρ_i + noise · I/D`.
pub fn noisy_mix(
    components: &[&DensityMatrix],
    weights: &[f64],
    noise_weight: f64,
) -> Result<DensityMatrix> {
    if components.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: components.len(),
            found: weights.len(),
        });
    }
    let first = components
        .first()
        .ok_or_else(|| Error::InvalidShape("no components to mix".into()))?;
    let shape = first.shape().clone();
    if let Some(c) = components.iter().find(|c| c.shape() != &shape) {
        return Err(Error::InvalidShape(format!(
            "component shape {:?} differs from {:?}",
            c.dims(),
            shape.dims()
        )));
    }
    if let Some(&w) = weights
        .iter()
        .chain([&noise_weight])
        .find(|&&w| !(w >= 0.0))
    {
        return Err(Error::InvalidParameter {
            name: "weight".into(),
            value: w,
            reason: "mixing weights must be non-negative".into(),
        });
    }
    let sum: f64 = weights.iter().sum::<f64>() + noise_weight;
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::WeightSum { sum });
    }
    let n = shape.total();
    let mut m = ComplexMatrix::identity(n).scale(noise_weight / n as f64);
    for (c, &w) in components.iter().zip(weights) {
        m = m.add(&c.matrix().scale(w))?;
    }
    Ok(DensityMatrix::from_parts(m, shape))
}

/// `kron(alpha, beta)` on `(A, C1, B, C2)` regrouped to `(A, B, C)` with
/// `C = C1 ⊗ C2` (C2 fastest-varying).
pub fn tensor_and_regroup(alpha: &DensityMatrix, beta: &DensityMatrix) -> Result<DensityMatrix> {
    tensor_and_regroup_capped(alpha, beta, DEFAULT_DIMENSION_CAP)
}

pub fn tensor_and_regroup_capped(
    alpha: &DensityMatrix,
    beta: &DensityMatrix,
    cap: usize,
) -> Result<DensityMatrix> {
    for s in [alpha, beta] {
        if s.shape().len() != 2 {
            return Err(Error::InvalidShape(format!(
                "expected a bipartite state, got shape {:?}",
                s.dims()
            )));
        }
    }
    let total = alpha.dim().saturating_mul(beta.dim());
    if total > cap {
        return Err(Error::DimensionCap { total, cap });
    }
    let (da, dc1) = (alpha.dims()[0], alpha.dims()[1]);
    let (db, dc2) = (beta.dims()[0], beta.dims()[1]);
    let joint = kron(alpha.matrix(), beta.matrix());
    let shape = SubsystemShape::new(vec![da, dc1, db, dc2])?;
    let (m, _) = permute_subsystems(&joint, &shape, &[0, 2, 1, 3])?;
    Ok(DensityMatrix::from_parts(
        m,
        SubsystemShape::new(vec![da, db, dc1 * dc2])?,
    ))
}

/// Zero-padding isometry: each subsystem's levels map onto the first
/// levels of the corresponding target space.
pub fn embed(state: &DensityMatrix, target_dims: &[usize]) -> Result<DensityMatrix> {
    let dims = state.dims();
    if target_dims.len() != dims.len() {
        return Err(Error::DimensionMismatch {
            expected: dims.len(),
            found: target_dims.len(),
        });
    }
    for (&s, &t) in dims.iter().zip(target_dims) {
        if t < s {
            return Err(Error::EmbedTooSmall {
                source_dim: s,
                target: t,
            });
        }
    }
    let target = SubsystemShape::new(target_dims.to_vec())?;
    let map: Vec<usize> = (0..state.dim())
        .map(|mut idx| {
            let mut digits = vec![0; dims.len()];
            for i in (0..dims.len()).rev() {
                digits[i] = idx % dims[i];
                idx /= dims[i];
            }
            basis_ket(target_dims, &digits)
        })
        .collect();
    let mut m = ComplexMatrix::zeros(target.total(), target.total());
    for (r, &tr) in map.iter().enumerate() {
        for (c, &tc) in map.iter().enumerate() {
            m[(tr, tc)] = state.matrix()[(r, c)];
        }
    }
    Ok(DensityMatrix::from_parts(m, target))
}

/// How `werner_project` treats its precondition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WernerCheck {
    /// Confirm the input has the form `a·I + b·SWAP` (the U⊗U commutant).
    Verify,
    Trust,
}

/// Compresses a two-qudit state with `Q ⊗ Q`, `Q` the projector onto the
/// first two levels, and renormalizes.
pub fn werner_project(state: &DensityMatrix, check: WernerCheck) -> Result<DensityMatrix> {
    werner_project_levels(state, [0, 1], check)
}

pub fn werner_project_levels(
    state: &DensityMatrix,
    levels: [usize; 2],
    check: WernerCheck,
) -> Result<DensityMatrix> {
    let dims = state.dims();
    if dims.len() != 2 || dims[0] != dims[1] || dims[0] < 2 {
        return Err(Error::InvalidShape(format!(
            "expected a [d, d] state with d >= 2, got {dims:?}"
        )));
    }
    let d = dims[0];
    if levels[0] == levels[1] || levels.iter().any(|&l| l >= d) {
        return Err(Error::InvalidParameter {
            name: "levels".into(),
            value: levels[1] as f64,
            reason: format!("need two distinct levels below {d}"),
        });
    }
    if check == WernerCheck::Verify {
        let deviation = werner_form_deviation(state);
        if deviation > STRUCTURAL_TOL {
            return Err(Error::NotWerner { deviation });
        }
    }
    let idx: Vec<usize> = levels
        .iter()
        .flat_map(|&i| levels.iter().map(move |&j| i * d + j))
        .collect();
    let m = ComplexMatrix::from_fn(4, 4, |r, c| state.matrix()[(idx[r], idx[c])]);
    let tr = m.trace().re;
    if tr.abs() <= STRUCTURAL_TOL {
        return Err(Error::ZeroTrace);
    }
    Ok(DensityMatrix::from_parts(
        m.scale(1.0 / tr),
        SubsystemShape::new(vec![2, 2])?,
    ))
}

/// Distance of a `[d, d]` state from the span of `{I, SWAP}`.
pub fn werner_form_deviation(state: &DensityMatrix) -> f64 {
    let d = state.dims()[0];
    let n = (d * d) as f64;
    let swap = swap_operator(d);
    let tr = state.matrix().trace().re;
    let tr_swap = state.matrix().trace_product(&swap).expect("square").re;
    // tr = a n + b d, tr_swap = a d + b n
    let det = n * n - (d * d) as f64;
    let a = (tr * n - tr_swap * d as f64) / det;
    let b = (tr_swap * n - tr * d as f64) / det;
    let fit = ComplexMatrix::identity(d * d)
        .scale(a)
        .add(&swap.scale(b))
        .expect("same shape");
    state.matrix().max_abs_diff(&fit).expect("same shape")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PptReport {
    pub ppt: bool,
    pub min_eigenvalue: f64,
}

/// Positivity of the partial transpose over the subsystems in `side`.
pub fn is_ppt(state: &DensityMatrix, side: &[usize]) -> Result<PptReport> {
    is_ppt_with(state, side, STRUCTURAL_TOL)
}

pub fn is_ppt_with(state: &DensityMatrix, side: &[usize], tol: f64) -> Result<PptReport> {
    let pt = state.partial_transpose(side)?;
    let min_eigenvalue = pt.eigvalsh()?[0];
    Ok(PptReport {
        ppt: min_eigenvalue >= -tol,
        min_eigenvalue,
    })
}
