//! Random sampling of unitaries, states, and orthogonal matrices.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::states::DensityMatrix;
use crate::tensor_ops::{ComplexMatrix, C64};

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random `d x d` unitary (QR of a Ginibre matrix with phase fix).
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_nalgebra(&q)
}

/// Haar-random real orthogonal `n x n` matrix, row-major.
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let (mut q, r) = g.qr().unpack();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(q[(i, j)]);
        }
    }
    out
}

/// Uniformly random normalized state vector.
pub fn random_ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn random_pure_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> DensityMatrix {
    let v = random_ket(dims.iter().product(), rng);
    DensityMatrix::pure(&v, dims.to_vec()).expect("normalized ket")
}

/// Full-rank random mixed state `G G† / Tr(G G†)` (Hilbert-Schmidt measure).
pub fn random_mixed_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> DensityMatrix {
    let n: usize = dims.iter().product();
    let g = ginibre(n, n, rng);
    let m = &g * g.adjoint();
    let m = ComplexMatrix::from_nalgebra(&m);
    // symmetrize away round-off before validation
    let m = m.add(&m.adjoint()).expect("square").scale(0.5);
    DensityMatrix::normalized(m, dims.to_vec()).expect("positive operator")
}

/// One Haar unitary per local dimension.
pub fn local_unitaries<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Vec<ComplexMatrix> {
    dims.iter().map(|&d| haar_unitary(d, rng)).collect()
}
