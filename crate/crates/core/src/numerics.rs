//! Dense complex-matrix kernel.
//!
//! Hermitian eigensolving, positive semidefiniteness, Kronecker and
//! direct-sum calculus, and orthonormal span bases. Frobenius norm is used
//! for residuals throughout; operator inequalities are decided by the
//! spectrum of a Hermitian difference. All tolerances are explicit and
//! residuals are reported, never silently clamped.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Absolute/relative tolerance pair. The effective margin for a quantity of
/// scale `s` is `abs + rel * s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-9,
            rel: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        assert!(abs >= 0.0 && rel >= 0.0, "tolerances must be non-negative");
        Tolerance { abs, rel }
    }

    pub fn margin(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale
    }
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl std::fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f, "{}", if self.cols > 8 { "..." } else { "" })?;
        }
        if self.rows > 8 {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// Matrix unit `E_ij` in dimension `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        m.data[i * n + j] = ONE;
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Build from rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch {
                context: "ragged row lengths".into(),
            });
        }
        Ok(CMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Real entries given row-major, for fixtures and tests.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        CMatrix {
            rows,
            cols,
            data: entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m.data[i * n + i] = z;
        }
        m
    }

    pub fn scalar(z: C64) -> Self {
        CMatrix {
            rows: 1,
            cols: 1,
            data: vec![z],
        }
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

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        self.data[i * self.cols + j] = z;
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conjugate(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, z: C64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|w| w * z).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self.data[i * self.cols + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius inner product `<self, other> = tr(self* other)`.
    pub fn inner(&self, other: &CMatrix) -> C64 {
        assert_eq!(self.shape(), other.shape(), "inner product shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn hermitian_part(&self) -> CMatrix {
        assert!(self.is_square(), "hermitian part of a non-square matrix");
        CMatrix::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// `|| M - M* ||_F`.
    pub fn hermiticity_residual(&self) -> f64 {
        assert!(self.is_square(), "hermiticity of a non-square matrix");
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                s += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Block starting at `(i0, j0)` with shape `(r, c)`.
    pub fn block(&self, i0: usize, j0: usize, r: usize, c: usize) -> CMatrix {
        assert!(i0 + r <= self.rows && j0 + c <= self.cols, "block out of range");
        CMatrix::from_fn(r, c, |i, j| self[(i0 + i, j0 + j)])
    }

    pub fn set_block(&mut self, i0: usize, j0: usize, b: &CMatrix) {
        assert!(
            i0 + b.rows <= self.rows && j0 + b.cols <= self.cols,
            "block out of range"
        );
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(i0 + i, j0 + j, b[(i, j)]);
            }
        }
    }

    pub fn column(&self, j: usize) -> CMatrix {
        self.block(0, j, self.rows, 1)
    }

    pub fn from_columns(cols: &[CMatrix]) -> CMatrix {
        if cols.is_empty() {
            return CMatrix::zeros(0, 0);
        }
        let n = cols[0].rows;
        assert!(cols.iter().all(|c| c.cols == 1 && c.rows == n));
        CMatrix::from_fn(n, cols.len(), |i, j| cols[j][(i, 0)])
    }

    /// Column-stacked vectorization: `vec(M)[j*rows + i] = M[i, j]`.
    pub fn vectorize(&self) -> CMatrix {
        let mut v = CMatrix::zeros(self.rows * self.cols, 1);
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.data[j * self.rows + i] = self[(i, j)];
            }
        }
        v
    }

    /// Inverse of [`CMatrix::vectorize`] for an `n x n` target.
    pub fn unvectorize(v: &CMatrix, n: usize) -> CMatrix {
        assert_eq!(v.cols, 1, "unvectorize expects a column vector");
        assert_eq!(v.rows, n * n, "unvectorize length mismatch");
        CMatrix::from_fn(n, n, |i, j| v.data[j * n + i])
    }

    fn to_na(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    fn from_na(m: &DMatrix<C64>) -> CMatrix {
        CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl std::ops::Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl std::ops::Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "mul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

/// Kronecker product: entry `(i*rows(B)+k, j*cols(B)+l) = A[i,j] * B[k,l]`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let z = a[(i, j)];
            if z == ZERO {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out.set(i * b.rows + k, j * b.cols + l, z * b[(k, l)]);
                }
            }
        }
    }
    out
}

/// Block-diagonal sum; off-diagonal blocks are exactly zero.
pub fn direct_sum(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.rows + b.rows, a.cols + b.cols);
    out.set_block(0, 0, a);
    out.set_block(a.rows, a.cols, b);
    out
}

/// Eigendecomposition of the Hermitian part of `m`.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvector columns `U`, so `herm(m) = U diag(w) U*`. The input is
/// symmetrized first; callers that must reject non-Hermitian input gate on
/// [`CMatrix::hermiticity_residual`] (as [`is_psd`] does).
pub fn hermitian_eig(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if !m.is_square() {
        return Err(Error::NonSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    let se = m.hermitian_part().to_na().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Smallest eigenvalue of the Hermitian part.
pub fn hermitian_min_eig(m: &CMatrix) -> Result<f64> {
    let (w, _) = hermitian_eig(m)?;
    Ok(w.first().copied().unwrap_or(0.0))
}

/// PSD test at tolerance: requires `m` square and Hermitian within
/// `tol.margin(||m||_F)`, then accepts iff the smallest eigenvalue of the
/// Hermitian part is `>= -tol.margin(||m||_F)`.
pub fn is_psd(m: &CMatrix, tol: Tolerance) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::NonSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let margin = tol.margin(m.frobenius_norm());
    let herm = m.hermiticity_residual();
    if herm > margin {
        return Err(Error::NotHermitian { residual: herm });
    }
    Ok(hermitian_min_eig(m)? >= -margin)
}

/// Square root of a PSD matrix. Eigenvalues below `-tol.margin(||m||_F)`
/// are an error; small negatives inside the margin are clamped to zero.
pub fn psd_sqrt(m: &CMatrix, tol: Tolerance) -> Result<CMatrix> {
    let margin = tol.margin(m.frobenius_norm());
    let herm = m.hermiticity_residual();
    if herm > margin {
        return Err(Error::NotHermitian { residual: herm });
    }
    let (w, u) = hermitian_eig(m)?;
    if let Some(&min) = w.first() {
        if min < -margin {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
    }
    let sqrt = CMatrix::diag(
        &w.iter()
            .map(|&x| C64::new(x.max(0.0).sqrt(), 0.0))
            .collect::<Vec<_>>(),
    );
    Ok(&(&u * &sqrt) * &u.adjoint())
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.rows == 0 || m.cols == 0 {
        return 0.0;
    }
    let gram = &m.adjoint() * m;
    let (w, _) = hermitian_eig(&gram).expect("gram matrix is square");
    w.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Orthonormal basis (Frobenius inner product) of the linear span of
/// `vectors`, via modified Gram-Schmidt with a second orthogonalization
/// pass. Components with norm `<= tol.abs` after projection are discarded,
/// so the output size is the numerical rank.
///
/// All inputs must share one shape; the empty input gives the empty basis.
pub fn span_basis(vectors: &[CMatrix], tol: Tolerance) -> Vec<CMatrix> {
    let mut basis: Vec<CMatrix> = Vec::new();
    let Some(first) = vectors.first() else {
        return basis;
    };
    let shape = first.shape();
    for v in vectors {
        assert_eq!(v.shape(), shape, "span_basis inputs must share a shape");
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = b.inner(&w);
                w = &w - &b.scale(c);
            }
        }
        let norm = w.frobenius_norm();
        if norm > tol.abs {
            basis.push(w.scale(C64::new(1.0 / norm, 0.0)));
        }
    }
    basis
}

/// Residual of `v` against the span of an orthonormal `basis`:
/// `|| v - sum_b b <b, v> ||_F`.
pub fn span_residual(basis: &[CMatrix], v: &CMatrix) -> f64 {
    let mut w = v.clone();
    for b in basis {
        let c = b.inner(&w);
        w = &w - &b.scale(c);
    }
    w.frobenius_norm()
}

/// Orthonormal Hermitian basis of the `n x n` matrices:
/// diagonal units, then `(E_ij + E_ji)/sqrt(2)` and `i(E_ij - E_ji)/sqrt(2)`.
pub fn hermitian_basis(n: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(CMatrix::unit(n, i, i));
    }
    let s = C64::new(1.0 / 2.0_f64.sqrt(), 0.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let e_ij = CMatrix::unit(n, i, j);
            let e_ji = CMatrix::unit(n, j, i);
            out.push((&e_ij + &e_ji).scale(s));
            out.push((&e_ij - &e_ji).scale(s * I));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn adjoint_involution_is_exact() {
        let m = CMatrix::from_fn(3, 2, |i, j| C64::new(i as f64 + 0.5, j as f64 - 1.0));
        assert_eq!(m.adjoint().adjoint(), m);
    }

    #[test]
    fn identity_is_psd() {
        assert!(is_psd(&CMatrix::identity(3), tol()).unwrap());
    }

    #[test]
    fn indefinite_diagonal_is_not_psd() {
        let m = CMatrix::diag(&[ONE, C64::new(-0.5, 0.0)]);
        assert!(!is_psd(&m, tol()).unwrap());
    }

    #[test]
    fn is_psd_rejects_non_square() {
        let m = CMatrix::zeros(2, 3);
        assert!(matches!(is_psd(&m, tol()), Err(Error::NonSquare { .. })));
    }

    #[test]
    fn is_psd_rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m.set(0, 1, ONE);
        assert!(matches!(
            is_psd(&m, tol()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn kron_of_identities() {
        assert_eq!(
            kron(&CMatrix::identity(2), &CMatrix::identity(3)),
            CMatrix::identity(6)
        );
        let d = CMatrix::diag(&[ONE, C64::new(2.0, 0.0)]);
        let expect = CMatrix::diag(&[ONE, ONE, C64::new(2.0, 0.0), C64::new(2.0, 0.0)]);
        assert_eq!(kron(&d, &CMatrix::identity(2)), expect);
    }

    #[test]
    fn direct_sum_builds_projections() {
        assert_eq!(
            direct_sum(&CMatrix::identity(5), &CMatrix::identity(1)),
            CMatrix::identity(6)
        );
        // the corner projection q = 0_{2x2} (+) 1
        let q = direct_sum(&CMatrix::zeros(2, 2), &CMatrix::identity(1));
        assert_eq!(q[(2, 2)], ONE);
        assert_eq!((&q * &q), q);
    }

    #[test]
    fn hermitian_eig_reconstructs() {
        let m = CMatrix::from_fn(4, 4, |i, j| {
            C64::new(
                ((i * 7 + j * 3) % 5) as f64,
                (i as f64 - j as f64) * 0.25,
            )
        })
        .hermitian_part();
        let (w, u) = hermitian_eig(&m).unwrap();
        let lam = CMatrix::diag(&w.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        let rec = &(&u * &lam) * &u.adjoint();
        assert!((&rec - &m).frobenius_norm() < 1e-12);
        // ascending order
        assert!(w.windows(2).all(|p| p[0] <= p[1]));
        // orthonormal columns
        let gram = &u.adjoint() * &u;
        assert!((&gram - &CMatrix::identity(4)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn span_basis_drops_duplicates_and_zeros() {
        let e1 = CMatrix::from_fn(3, 1, |i, _| if i == 0 { ONE } else { ZERO });
        let e2 = CMatrix::from_fn(3, 1, |i, _| if i == 1 { ONE } else { ZERO });
        let basis = span_basis(&[e1.clone(), e1.clone(), e2], tol());
        assert_eq!(basis.len(), 2);
        assert!(span_basis(&[CMatrix::zeros(3, 1)], tol()).is_empty());
        assert!(span_basis(&[], tol()).is_empty());
    }

    #[test]
    fn spectral_norm_of_commutator_of_paulis() {
        let x = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let z = CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let comm = &(&x * &z) - &(&z * &x);
        assert!((spectral_norm(&comm) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn vectorize_is_column_stacking() {
        let m = CMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let v = m.vectorize();
        let flat: Vec<f64> = v.entries().iter().map(|z| z.re).collect();
        assert_eq!(flat, vec![1.0, 3.0, 2.0, 4.0]);
        assert_eq!(CMatrix::unvectorize(&v, 2), m);
    }

    #[test]
    fn hermitian_basis_is_orthonormal() {
        let basis = hermitian_basis(3);
        assert_eq!(basis.len(), 9);
        for (i, a) in basis.iter().enumerate() {
            assert!(a.hermiticity_residual() < 1e-15);
            for (j, b) in basis.iter().enumerate() {
                let g = a.inner(b);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g - C64::new(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let a = CMatrix::from_fn(3, 3, |i, j| C64::new((i + 2 * j) as f64 * 0.3, 0.1 * i as f64 - 0.1 * j as f64));
        let m = &a * &a.adjoint();
        let s = psd_sqrt(&m, tol()).unwrap();
        assert!((&(&s * &s) - &m).frobenius_norm() < 1e-10);
        let neg = CMatrix::diag(&[ONE, C64::new(-1.0, 0.0)]);
        assert!(matches!(psd_sqrt(&neg, tol()), Err(Error::NotPsd { .. })));
    }
}
