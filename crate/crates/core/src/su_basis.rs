//! Generalized Gell-Mann generators of SU(d).
//!
//! Canonical order: the symmetric family `E_jk + E_kj` (j < k, lexicographic),
//! then the antisymmetric family `-i(E_jk - E_kj)`, then the diagonal family
//! `sqrt(2/(l(l+1))) (Σ_{m<l} E_mm - l E_ll)` for l = 1..d-1.
//!
//! Every generator is Hermitian, traceless, and satisfies
//! `Tr(λ_k λ_l) = 2 δ_kl`.

use crate::error::{Error, Result};
use crate::tensor_ops::{ComplexMatrix, C64, STRUCTURAL_TOL};
use serde::Serialize;

/// Integer Gaussian pattern times `sqrt(scale_num / scale_den)`.
///
/// Lets the trace pairing be evaluated without rounding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactGenerator {
    /// Nonzero entries `(row, col, re, im)`.
    pub entries: Vec<(usize, usize, i64, i64)>,
    pub scale_num: i64,
    pub scale_den: i64,
}

impl ExactGenerator {
    fn to_matrix(&self, d: usize) -> ComplexMatrix {
        let s = (self.scale_num as f64 / self.scale_den as f64).sqrt();
        let mut m = ComplexMatrix::zeros(d, d);
        for &(r, c, re, im) in &self.entries {
            m[(r, c)] = C64::new(re as f64 * s, im as f64 * s);
        }
        m
    }

    /// `Tr(P_self P_other)` on the integer patterns, as (re, im).
    fn pattern_trace(&self, other: &Self) -> (i64, i64) {
        let mut re = 0;
        let mut im = 0;
        for &(r, c, a_re, a_im) in &self.entries {
            for &(r2, c2, b_re, b_im) in &other.entries {
                if r2 == c && c2 == r {
                    re += a_re * b_re - a_im * b_im;
                    im += a_re * b_im + a_im * b_re;
                }
            }
        }
        (re, im)
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorBasis {
    d: usize,
    generators: Vec<ComplexMatrix>,
    exact: Option<Vec<ExactGenerator>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrthogonalityReport {
    pub orthogonal: bool,
    /// `max |Tr(λ_k λ_l) - 2δ_kl|`.
    pub max_deviation: f64,
    /// Whether the deviation was computed from the exact generator form.
    pub exact: bool,
}

/// Builds the canonical generalized Gell-Mann basis for `d ≥ 2`.
pub fn generators(d: usize) -> Result<GeneratorBasis> {
    if d < 2 {
        return Err(Error::InvalidLocalDimension(d));
    }
    let mut exact = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in j + 1..d {
            exact.push(ExactGenerator {
                entries: vec![(j, k, 1, 0), (k, j, 1, 0)],
                scale_num: 1,
                scale_den: 1,
            });
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            exact.push(ExactGenerator {
                entries: vec![(j, k, 0, -1), (k, j, 0, 1)],
                scale_num: 1,
                scale_den: 1,
            });
        }
    }
    for l in 1..d {
        let mut entries: Vec<_> = (0..l).map(|m| (m, m, 1, 0)).collect();
        entries.push((l, l, -(l as i64), 0));
        exact.push(ExactGenerator {
            entries,
            scale_num: 2,
            scale_den: (l * (l + 1)) as i64,
        });
    }
    let generators = exact.iter().map(|g| g.to_matrix(d)).collect();
    Ok(GeneratorBasis {
        d,
        generators,
        exact: Some(exact),
    })
}

impl GeneratorBasis {
    /// Wraps an arbitrary generator list after checking every basis
    /// invariant at [`STRUCTURAL_TOL`].
    pub fn from_generators(d: usize, generators: Vec<ComplexMatrix>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidLocalDimension(d));
        }
        if generators.len() != d * d - 1 {
            return Err(Error::InvalidBasis(format!(
                "expected {} generators, got {}",
                d * d - 1,
                generators.len()
            )));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.rows() != d || g.cols() != d {
                return Err(Error::InvalidBasis(format!("generator {i} is not {d}x{d}")));
            }
            if !g.is_hermitian(STRUCTURAL_TOL) {
                return Err(Error::InvalidBasis(format!(
                    "generator {i} is not Hermitian"
                )));
            }
            if g.trace().norm() > STRUCTURAL_TOL {
                return Err(Error::InvalidBasis(format!(
                    "generator {i} is not traceless"
                )));
            }
        }
        let basis = Self {
            d,
            generators,
            exact: None,
        };
        let report = basis.verify_orthogonality();
        if !report.orthogonal {
            return Err(Error::InvalidBasis(format!(
                "trace pairing deviates by {:e}",
                report.max_deviation
            )));
        }
        Ok(basis)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    pub fn get(&self, i: usize) -> &ComplexMatrix {
        &self.generators[i]
    }

    pub fn exact_form(&self) -> Option<&[ExactGenerator]> {
        self.exact.as_deref()
    }

    pub fn verify_orthogonality(&self) -> OrthogonalityReport {
        self.verify_orthogonality_with(STRUCTURAL_TOL)
    }

    pub fn verify_orthogonality_with(&self, tol: f64) -> OrthogonalityReport {
        let max_deviation = match &self.exact {
            Some(exact) => exact_gram_deviation(exact),
            None => self.float_gram_deviation(),
        };
        OrthogonalityReport {
            orthogonal: max_deviation < tol,
            max_deviation,
            exact: self.exact.is_some(),
        }
    }

    /// Gram deviation evaluated in floating point from the stored matrices.
    pub fn float_gram_deviation(&self) -> f64 {
        let n = self.generators.len();
        let mut dev: f64 = 0.0;
        for k in 0..n {
            for l in k..n {
                let tr = self.generators[k]
                    .trace_product(&self.generators[l])
                    .expect("generators share dimension");
                let target = if k == l { 2.0 } else { 0.0 };
                dev = dev.max((tr - C64::new(target, 0.0)).norm());
            }
        }
        dev
    }

    /// Recombines the generators with a real orthogonal matrix `o`
    /// (row-major, `n x n` with `n = d²-1`): `λ'_a = Σ_b o[a][b] λ_b`.
    pub fn mixed(&self, o: &[f64]) -> Result<Self> {
        let n = self.generators.len();
        if o.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: o.len(),
            });
        }
        let gens = (0..n)
            .map(|a| {
                let mut acc = ComplexMatrix::zeros(self.d, self.d);
                for b in 0..n {
                    acc = acc
                        .add(&self.generators[b].scale(o[a * n + b]))
                        .expect("same shape");
                }
                acc
            })
            .collect();
        Self::from_generators(self.d, gens)
    }

    /// Returns the basis with generators in the given order.
    pub fn reordered(&self, order: &[usize]) -> Result<Self> {
        let n = self.generators.len();
        let mut seen = vec![false; n];
        if order.len() != n
            || order
                .iter()
                .any(|&i| i >= n || std::mem::replace(&mut seen[i], true))
        {
            return Err(Error::InvalidPermutation {
                perm: order.to_vec(),
                count: n,
            });
        }
        Ok(Self {
            d: self.d,
            generators: order.iter().map(|&i| self.generators[i].clone()).collect(),
            exact: self
                .exact
                .as_ref()
                .map(|e| order.iter().map(|&i| e[i].clone()).collect()),
        })
    }

    /// Scales one generator; used to exercise the orthogonality check.
    pub fn with_scaled_generator(&self, index: usize, factor: f64) -> Self {
        let mut generators = self.generators.clone();
        generators[index] = generators[index].scale(factor);
        Self {
            d: self.d,
            generators,
            exact: None,
        }
    }
}

fn exact_gram_deviation(exact: &[ExactGenerator]) -> f64 {
    let mut dev: f64 = 0.0;
    for (k, gk) in exact.iter().enumerate() {
        for gl in &exact[k..] {
            let (re, im) = gk.pattern_trace(gl);
            let same = std::ptr::eq(gk, gl);
            if re == 0 && im == 0 {
                if same {
                    dev = dev.max(2.0);
                }
                continue;
            }
            // Tr = sqrt(nk/dk * nl/dl) * (re + i im)
            let num = gk.scale_num as i128 * gl.scale_num as i128;
            let den = gk.scale_den as i128 * gl.scale_den as i128;
            if same && im == 0 {
                // scale² · re vs 2, compared as integers
                let lhs = gk.scale_num as i128 * re as i128;
                let rhs = 2 * gk.scale_den as i128;
                if lhs != rhs {
                    dev = dev.max(((lhs - rhs) as f64 / gk.scale_den as f64).abs());
                }
            } else {
                let mag =
                    ((num as f64) / (den as f64)).sqrt() * ((re * re + im * im) as f64).sqrt();
                let target = if same { 2.0 } else { 0.0 };
                dev = dev.max((mag - target).abs());
            }
        }
    }
    dev
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rejects_small_dimension() {
        assert!(matches!(
            generators(1),
            Err(Error::InvalidLocalDimension(1))
        ));
        assert!(matches!(
            generators(0),
            Err(Error::InvalidLocalDimension(0))
        ));
    }

    #[test]
    fn qubit_basis_is_pauli() {
        let b = generators(2).unwrap();
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let y =
            ComplexMatrix::new(2, 2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap();
        let z = ComplexMatrix::diag(&[1.0, -1.0]);
        assert_eq!(b.generators(), &[x, y, z]);
    }

    fn contains(b: &GeneratorBasis, m: &ComplexMatrix) -> bool {
        b.generators()
            .iter()
            .any(|g| g.max_abs_diff(m).unwrap() < 1e-15)
    }

    #[test]
    fn qutrit_basis_matches_standard_set() {
        let b = generators(3).unwrap();
        assert_eq!(b.len(), 8);
        let s3 = 1.0 / 3f64.sqrt();
        assert!(contains(&b, &ComplexMatrix::diag(&[s3, s3, -2.0 * s3])));
        assert!(contains(&b, &ComplexMatrix::diag(&[1.0, -1.0, 0.0])));
        let mut l5 = ComplexMatrix::zeros(3, 3);
        l5[(0, 2)] = c(0.0, -1.0);
        l5[(2, 0)] = c(0.0, 1.0);
        assert!(contains(&b, &l5));
    }

    #[test]
    fn ququart_diagonals() {
        let b = generators(4).unwrap();
        assert_eq!(b.len(), 15);
        let s3 = 1.0 / 3f64.sqrt();
        let s6 = 1.0 / 6f64.sqrt();
        assert!(contains(
            &b,
            &ComplexMatrix::diag(&[s3, s3, -2.0 * s3, 0.0])
        ));
        assert!(contains(&b, &ComplexMatrix::diag(&[s6, s6, s6, -3.0 * s6])));
    }

    #[test]
    fn invariants_hold_for_small_d() {
        for d in 2..=5 {
            let b = generators(d).unwrap();
            assert_eq!(b.len(), d * d - 1);
            for g in b.generators() {
                assert_eq!(g.hermiticity_deviation(), 0.0);
                assert!(g.trace().norm() < 1e-15);
            }
            let r = b.verify_orthogonality();
            assert!(r.orthogonal && r.exact);
            assert_eq!(r.max_deviation, 0.0);
            assert!(b.float_gram_deviation() < 1e-15);
        }
    }

    #[test]
    fn scaled_generator_breaks_orthogonality() {
        let b = generators(3).unwrap().with_scaled_generator(2, 1.1);
        let r = b.verify_orthogonality();
        assert!(!r.orthogonal);
        assert!((r.max_deviation - 0.42).abs() < 1e-12);
    }

    #[test]
    fn from_generators_validates() {
        let b = generators(2).unwrap();
        let mut gens = b.generators().to_vec();
        assert!(GeneratorBasis::from_generators(2, gens.clone()).is_ok());
        gens[0] = ComplexMatrix::identity(2);
        assert!(GeneratorBasis::from_generators(2, gens).is_err());
        assert!(GeneratorBasis::from_generators(2, vec![]).is_err());
    }

    #[test]
    fn reordered_keeps_exactness() {
        let b = generators(3).unwrap();
        let r = b.reordered(&[7, 6, 5, 4, 3, 2, 1, 0]).unwrap();
        assert_eq!(r.get(0), b.get(7));
        assert_eq!(r.verify_orthogonality().max_deviation, 0.0);
        assert!(b.reordered(&[0, 0, 1, 2, 3, 4, 5, 6]).is_err());
    }
}
