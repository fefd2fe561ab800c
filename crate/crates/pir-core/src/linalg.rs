//! Exact real-amplitude linear algebra: dense matrices, state vectors,
//! Jacobi eigendecomposition, PSD factorization, unitary completion, trace
//! norm, and measurement probabilities.
//!
//! Everything in scope has real entries (phases are signs, Hadamards are
//! real), so the scalar field is `f64` throughout. Dimensions stay small
//! (at most a few hundred), which is why cyclic Jacobi is enough.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::bits::{BitString, SubsetMask};
use crate::error::{Error, Result};

/// Off-diagonal Frobenius norm below which Jacobi stops.
const JACOBI_TOL: f64 = 1e-12;
/// Hard cap on Jacobi sweeps; never reached for the sizes used here.
const JACOBI_MAX_SWEEPS: usize = 100;
/// Eigenvalues below this are a genuine PSD violation.
const PSD_FAIL_TOL: f64 = -1e-6;

/// Dense row-major matrix of reals.
#[derive(Clone, PartialEq, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Matrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
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

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)];
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let v = self[(r, k)];
                if v == 0.0 {
                    continue;
                }
                for c in 0..rhs.cols {
                    out[(r, c)] += v * rhs[(k, c)];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, factor: f64) -> Matrix {
        let data = self.data.iter().map(|a| a * factor).collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![0.0; self.rows];
        for r in 0..self.rows {
            let mut acc = 0.0;
            for c in 0..self.cols {
                acc += self[(r, c)] * v[c];
            }
            out[r] = acc;
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn set_column(&mut self, c: usize, v: &[f64]) {
        assert_eq!(v.len(), self.rows);
        for (r, &x) in v.iter().enumerate() {
            self[(r, c)] = x;
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(libm::fabs(v)))
    }

    /// Largest absolute entry of the difference.
    pub fn max_abs_diff(&self, rhs: &Matrix) -> f64 {
        self.sub(rhs).max_abs()
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in (r + 1)..self.cols.min(self.rows) {
                worst = worst.max(libm::fabs(self[(r, c)] - self[(c, r)]));
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

/// A real amplitude vector over a register of `dim` basis states.
#[derive(Clone, PartialEq, Debug)]
pub struct StateVector {
    amps: Vec<f64>,
}

impl StateVector {
    pub fn zeros(dim: usize) -> Self {
        StateVector {
            amps: vec![0.0; dim],
        }
    }

    pub fn from_amplitudes(amps: Vec<f64>) -> Self {
        StateVector { amps }
    }

    /// Basis state `|index>`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut s = StateVector::zeros(dim);
        s.amps[index] = 1.0;
        s
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [f64] {
        &mut self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    pub fn inner(&self, other: &StateVector) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.amps.iter().zip(&other.amps).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, factor: f64) -> StateVector {
        StateVector {
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// Outer product `|self><self|`.
    pub fn projector(&self) -> Matrix {
        let d = self.dim();
        let mut m = Matrix::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                m[(r, c)] = self.amps[r] * self.amps[c];
            }
        }
        m
    }
}

/// Eigenvalues and eigenvectors of a symmetric matrix; column `k` of
/// `vectors` is the eigenvector for `values[k]`.
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

fn off_diag_norm_sq(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)] * a[(r, c)];
            }
        }
    }
    s
}

fn check_symmetric(m: &Matrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            actual: m.cols(),
        });
    }
    let defect = m.symmetry_defect();
    if defect > 1e-9 {
        return Err(Error::NotSymmetric { deviation: defect });
    }
    Ok(())
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
pub fn jacobi_eigen(m: &Matrix) -> Result<Eigen> {
    check_symmetric(m)?;
    let n = m.rows();
    let mut a = m.clone();
    // Symmetrize round-off so rotations see an exactly symmetric matrix.
    for r in 0..n {
        for c in (r + 1)..n {
            let avg = 0.5 * (a[(r, c)] + a[(c, r)]);
            a[(r, c)] = avg;
            a[(c, r)] = avg;
        }
    }
    let mut v = Matrix::identity(n);

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diag_norm_sq(&a) <= JACOBI_TOL * JACOBI_TOL {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if libm::fabs(apq) < 1e-300 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + libm::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let values = (0..n).map(|i| a[(i, i)]).collect();
    Ok(Eigen { values, vectors: v })
}

/// Factors a PSD matrix as `M = A^T A` via eigendecomposition:
/// `A = sqrt(Lambda) Q^T`.
///
/// Eigenvalues in `[-1e-6, 0)` are treated as round-off at the PSD boundary
/// and clamped to zero; anything below fails with [`Error::NotPsd`].
pub fn psd_factor(m: &Matrix) -> Result<Matrix> {
    let eig = jacobi_eigen(m)?;
    let n = m.rows();
    let mut a = Matrix::zeros(n, n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda < PSD_FAIL_TOL {
            return Err(Error::NotPsd { eigenvalue: lambda });
        }
        let root = libm::sqrt(lambda.max(0.0));
        for c in 0..n {
            a[(k, c)] = root * eig.vectors[(c, k)];
        }
    }
    Ok(a)
}

/// Extends pairwise-orthonormal columns, given with their positions, to a
/// full unitary.
///
/// Remaining columns come from Gram-Schmidt over the standard basis in index
/// order; candidates whose residual norm drops below `1e-8` are skipped.
pub fn complete_to_unitary(columns: &[(usize, Vec<f64>)], dim: usize) -> Result<Matrix> {
    for (pos, col) in columns {
        if *pos >= dim {
            return Err(Error::IndexOutOfRange {
                index: *pos,
                len: dim,
            });
        }
        if col.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: col.len(),
            });
        }
    }
    for (i, (pos_a, col_a)) in columns.iter().enumerate() {
        for (pos_b, col_b) in &columns[i..] {
            if pos_a == pos_b && !core::ptr::eq(col_a, col_b) {
                return Err(Error::InvalidParameter("duplicate column position".into()));
            }
            let want = if pos_a == pos_b { 1.0 } else { 0.0 };
            let got: f64 = col_a.iter().zip(col_b).map(|(x, y)| x * y).sum();
            let deviation = libm::fabs(got - want);
            if deviation > 1e-8 {
                return Err(Error::ColumnsNotOrthonormal {
                    col_a: *pos_a,
                    col_b: *pos_b,
                    deviation,
                });
            }
        }
    }

    let mut out = Matrix::zeros(dim, dim);
    let mut accepted: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let mut filled = vec![false; dim];
    for (pos, col) in columns {
        out.set_column(*pos, col);
        accepted.push(col.clone());
        filled[*pos] = true;
    }

    let mut candidate = 0usize;
    for (pos, _) in filled.iter().enumerate().filter(|&(_, &taken)| !taken) {
        loop {
            if candidate >= dim {
                return Err(Error::InvalidParameter(
                    "ran out of basis candidates while completing unitary".into(),
                ));
            }
            let mut v = vec![0.0; dim];
            v[candidate] = 1.0;
            candidate += 1;
            // Two orthogonalization passes keep the result orthonormal to
            // well below the 1e-9 unitarity budget.
            for _ in 0..2 {
                for col in &accepted {
                    let overlap: f64 = col.iter().zip(&v).map(|(a, b)| a * b).sum();
                    for (vi, ci) in v.iter_mut().zip(col) {
                        *vi -= overlap * ci;
                    }
                }
            }
            let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
            if norm < 1e-8 {
                continue;
            }
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            out.set_column(pos, &v);
            accepted.push(v);
            break;
        }
    }
    Ok(out)
}

/// Trace norm (sum of absolute eigenvalues) of a symmetric matrix.
pub fn trace_norm(m: &Matrix) -> Result<f64> {
    let eig = jacobi_eigen(m)?;
    Ok(eig.values.iter().map(|v| libm::fabs(*v)).sum())
}

/// `<psi| P |psi>` for a projector `P`.
pub fn measure_probability(state: &StateVector, projector: &Matrix) -> Result<f64> {
    if projector.rows() != state.dim() || projector.cols() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            actual: projector.rows().max(projector.cols()),
        });
    }
    let sym = projector.symmetry_defect();
    if sym > 1e-9 {
        return Err(Error::NotAProjector { deviation: sym });
    }
    let idem = projector.mul(projector).max_abs_diff(projector);
    if idem > 1e-9 {
        return Err(Error::NotAProjector { deviation: idem });
    }
    let p: f64 = state
        .amplitudes()
        .iter()
        .zip(projector.apply(state.amplitudes()))
        .map(|(a, b)| a * b)
        .sum();
    Ok(p.clamp(0.0, 1.0))
}

fn check_psd(m: &Matrix, label: &str) -> Result<()> {
    let eig = jacobi_eigen(m).map_err(|_| Error::NotAPovm(format!("{label} not symmetric")))?;
    if let Some(bad) = eig.values.iter().find(|&&v| v < -1e-8) {
        return Err(Error::NotAPovm(format!(
            "{label} has negative eigenvalue {bad:e}"
        )));
    }
    Ok(())
}

/// Outcome probabilities `tr(rho E_k)` of a POVM.
pub fn povm_outcome_probs(rho: &Matrix, elements: &[Matrix]) -> Result<Vec<f64>> {
    check_symmetric(rho).map_err(|_| Error::NotAPovm("state is not symmetric".into()))?;
    if libm::fabs(rho.trace() - 1.0) > 1e-8 {
        return Err(Error::NotAPovm(format!("state trace is {}", rho.trace())));
    }
    check_psd(rho, "state")?;
    let dim = rho.rows();
    let mut sum = Matrix::zeros(dim, dim);
    for (k, e) in elements.iter().enumerate() {
        if e.rows() != dim || e.cols() != dim {
            return Err(Error::NotAPovm(format!("element {k} has wrong dimensions")));
        }
        check_psd(e, "element")?;
        sum = sum.add(e);
    }
    let defect = sum.max_abs_diff(&Matrix::identity(dim));
    if defect > 1e-8 {
        return Err(Error::NotAPovm(format!(
            "elements sum to I off by {defect:e}"
        )));
    }
    Ok(elements.iter().map(|e| rho.mul(e).trace()).collect())
}

/// The phase `(-1)^{T . y}` a query imprints on `|z_T>`.
pub fn phase_query_sign(y: &BitString, t: &SubsetMask) -> Result<i8> {
    let ip = crate::bits::inner_product_mod2(y, t.mask())?;
    Ok(if ip == 0 { 1 } else { -1 })
}

/// Materializes `|z_T>` as `2^ell` computational-basis amplitudes.
///
/// Used only in tests of phase-basis orthonormality; the decoders index the
/// phase basis directly by subset integer.
pub fn phase_basis_state(t: &SubsetMask) -> StateVector {
    let ell = t.universe_len();
    let dim = 1usize << ell;
    let t_int = t.subset_index();
    let scale = 1.0 / libm::sqrt(dim as f64);
    let amps = (0..dim)
        .map(|v| {
            let sign = if ((v & t_int).count_ones() & 1) == 0 {
                1.0
            } else {
                -1.0
            };
            sign * scale
        })
        .collect();
    StateVector::from_amplitudes(amps)
}

/// All subsets of `[ell]` of size at most `b`, as subset integers in
/// increasing order.
pub fn subsets_up_to(ell: usize, b: usize) -> Vec<usize> {
    (0..(1usize << ell))
        .filter(|v| (v.count_ones() as usize) <= b)
        .collect()
}

/// All subsets of `[ell]` of size exactly `b`, in increasing integer order.
pub fn subsets_of_size(ell: usize, b: usize) -> Vec<usize> {
    (0..(1usize << ell))
        .filter(|v| (v.count_ones() as usize) == b)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use rand_core::RngCore;

    fn random_symmetric(n: usize, rng: &mut ChaCha12Rng) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for r in 0..n {
            for c in r..n {
                let v = (rng.next_u32() as f64 / u32::MAX as f64) * 2.0 - 1.0;
                m[(r, c)] = v;
                m[(c, r)] = v;
            }
        }
        m
    }

    fn random_gram(n: usize, rng: &mut ChaCha12Rng) -> Matrix {
        let mut g = Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                g[(r, c)] = (rng.next_u32() as f64 / u32::MAX as f64) * 2.0 - 1.0;
            }
        }
        g.transpose().mul(&g)
    }

    #[test]
    fn jacobi_diagonalizes() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for _ in 0..10 {
            let m = random_symmetric(8, &mut rng);
            let eig = jacobi_eigen(&m).unwrap();
            // Reconstruct V diag(w) V^T and compare.
            let mut d = Matrix::zeros(8, 8);
            for (i, &w) in eig.values.iter().enumerate() {
                d[(i, i)] = w;
            }
            let back = eig.vectors.mul(&d).mul(&eig.vectors.transpose());
            assert!(back.max_abs_diff(&m) < 1e-10);
            // Eigenvector orthonormality.
            let vtv = eig.vectors.transpose().mul(&eig.vectors);
            assert!(vtv.max_abs_diff(&Matrix::identity(8)) < 1e-10);
        }
    }

    #[test]
    fn jacobi_rejects_non_symmetric() {
        let m = Matrix::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(jacobi_eigen(&m), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn psd_factor_identity_and_zero() {
        let a = psd_factor(&Matrix::identity(4)).unwrap();
        assert!(a.transpose().mul(&a).max_abs_diff(&Matrix::identity(4)) < 1e-10);
        let z = psd_factor(&Matrix::zeros(3, 3)).unwrap();
        assert!(z.max_abs() < 1e-12);
    }

    #[test]
    fn psd_factor_roundtrip_on_gram_matrices() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        for trial in 0..100 {
            let n = 2 + (trial % 31);
            let m = random_gram(n, &mut rng);
            let a = psd_factor(&m).unwrap();
            assert!(a.transpose().mul(&a).max_abs_diff(&m) <= 1e-8, "dim {n}");
        }
    }

    #[test]
    fn psd_factor_rejects_negative() {
        let mut m = Matrix::identity(2);
        m[(1, 1)] = -0.5;
        assert!(matches!(psd_factor(&m), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn complete_full_set_is_reproduced() {
        let cols: Vec<(usize, Vec<f64>)> =
            (0..4).map(|i| (i, Matrix::identity(4).column(i))).collect();
        let u = complete_to_unitary(&cols, 4).unwrap();
        assert!(u.max_abs_diff(&Matrix::identity(4)) < 1e-12);
    }

    #[test]
    fn complete_single_column() {
        let u = complete_to_unitary(&[(0, vec![1.0, 0.0, 0.0, 0.0])], 4).unwrap();
        assert!(u.transpose().mul(&u).max_abs_diff(&Matrix::identity(4)) < 1e-9);
        assert_eq!(u.column(0), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn complete_rejects_non_orthonormal() {
        let cols = vec![(0, vec![1.0, 0.0]), (1, vec![0.9, 0.1])];
        assert!(matches!(
            complete_to_unitary(&cols, 2),
            Err(Error::ColumnsNotOrthonormal { .. })
        ));
    }

    #[test]
    fn complete_skips_dependent_candidates() {
        // Given column is e_0 rotated into e_1's direction, forcing a skip.
        let inv = 1.0 / libm::sqrt(2.0);
        let u = complete_to_unitary(&[(0, vec![inv, inv, 0.0])], 3).unwrap();
        assert!(u.transpose().mul(&u).max_abs_diff(&Matrix::identity(3)) < 1e-9);
    }

    #[test]
    fn trace_norm_examples() {
        let m = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert!((trace_norm(&m).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(trace_norm(&Matrix::zeros(3, 3)).unwrap(), 0.0);
    }

    #[test]
    fn trace_norm_matches_singular_value_oracle() {
        // Independent oracle: singular values of symmetric M are
        // sqrt(eigenvalues of M^T M).
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m = random_symmetric(16, &mut rng);
            let direct = trace_norm(&m).unwrap();
            let mtm = m.transpose().mul(&m);
            let oracle: f64 = jacobi_eigen(&mtm)
                .unwrap()
                .values
                .iter()
                .map(|&v| libm::sqrt(v.max(0.0)))
                .sum();
            assert!((direct - oracle).abs() < 1e-8);
        }
    }

    #[test]
    fn measurement_edge_cases() {
        let plus = StateVector::from_amplitudes(vec![1.0 / libm::sqrt(2.0); 2]);
        assert!((measure_probability(&plus, &Matrix::identity(2)).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            measure_probability(&plus, &Matrix::zeros(2, 2)).unwrap(),
            0.0
        );
        let p0 = StateVector::basis(2, 0).projector();
        assert!((measure_probability(&plus, &p0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn measurement_rejects_non_projector() {
        let s = StateVector::basis(2, 0);
        let half = Matrix::identity(2).scale(0.5);
        assert!(matches!(
            measure_probability(&s, &half),
            Err(Error::NotAProjector { .. })
        ));
    }

    #[test]
    fn povm_trivial_pairs() {
        let rho = Matrix::identity(2).scale(0.5);
        let probs = povm_outcome_probs(&rho, &[Matrix::identity(2), Matrix::zeros(2, 2)]).unwrap();
        assert!((probs[0] - 1.0).abs() < 1e-12 && probs[1].abs() < 1e-12);

        let p0 = StateVector::basis(2, 0).projector();
        let p1 = StateVector::basis(2, 1).projector();
        let probs = povm_outcome_probs(&rho, &[p0, p1]).unwrap();
        assert!((probs[0] - 0.5).abs() < 1e-12 && (probs[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn povm_rejects_bad_sums() {
        let rho = Matrix::identity(2).scale(0.5);
        let err = povm_outcome_probs(&rho, &[Matrix::identity(2), Matrix::identity(2)]);
        assert!(matches!(err, Err(Error::NotAPovm(_))));
    }

    #[test]
    fn phase_query_examples() {
        let y = BitString::parse("101").unwrap();
        assert_eq!(phase_query_sign(&y, &SubsetMask::empty(3)).unwrap(), 1);
        // T = {1,3}: both selected bits are 1, so the sign is (+1)^2.
        let t = SubsetMask::from_positions(3, &[0, 2]);
        assert_eq!(phase_query_sign(&y, &t).unwrap(), 1);
        // Full T over all-ones of even length.
        let y = BitString::parse("1111").unwrap();
        let t = SubsetMask::from_positions(4, &[0, 1, 2, 3]);
        assert_eq!(phase_query_sign(&y, &t).unwrap(), 1);
    }

    #[test]
    fn phase_basis_is_orthonormal() {
        for ell in 1..=4usize {
            for s in 0..(1usize << ell) {
                for t in 0..(1usize << ell) {
                    let zs = phase_basis_state(&SubsetMask::from_subset_index(ell, s));
                    let zt = phase_basis_state(&SubsetMask::from_subset_index(ell, t));
                    let want = if s == t { 1.0 } else { 0.0 };
                    assert!((zs.inner(&zt) - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn subset_enumeration_counts() {
        assert_eq!(subsets_up_to(4, 1).len(), 5);
        assert_eq!(subsets_of_size(4, 2).len(), 6);
        // Increasing order is part of the contract.
        let s = subsets_up_to(5, 2);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }
}
