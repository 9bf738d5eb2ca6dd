//! CP maps on the `d x d` matrix algebra.
//!
//! A map is stored as a Kraus family with its Choi matrix cached at
//! construction. Conventions, fixed once for the whole crate:
//! Choi matrix `C(T) = sum_ij E_ij (x) T(E_ij)` (block `(i,j)` reads off
//! `T(E_ij)`), vectorization is column-stacking, and the superoperator of
//! `a -> k a k*` is `conj(k) (x) k` on vectorized matrices.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, hermitian_eig, kron, CMatrix, Tolerance, C64};

/// Classification flags for a CP map, with the residuals that back them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapClass {
    pub is_cp: bool,
    pub is_unital: bool,
    pub is_contractive: bool,
    pub residuals: BTreeMap<String, f64>,
}

/// A normal CP map on `M_d`, as a Kraus family with cached Choi matrix.
#[derive(Clone)]
pub struct CpMap {
    dim: usize,
    kraus: Vec<CMatrix>,
    choi: CMatrix,
}

impl std::fmt::Debug for CpMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CpMap(dim={}, kraus_count={})", self.dim, self.kraus.len())
    }
}

impl CpMap {
    /// Build from a non-empty Kraus family of equal square dimensions.
    pub fn from_kraus(ops: Vec<CMatrix>) -> Result<Self> {
        let first = ops.first().ok_or(Error::EmptyKraus)?;
        if !first.is_square() {
            return Err(Error::NonSquare {
                rows: first.rows(),
                cols: first.cols(),
            });
        }
        let dim = first.rows();
        if ops.iter().any(|k| k.shape() != (dim, dim)) {
            return Err(Error::DimensionMismatch {
                context: "Kraus operators must share one square dimension".into(),
            });
        }
        let choi = choi_of_kraus(&ops, dim);
        Ok(CpMap {
            dim,
            kraus: ops,
            choi,
        })
    }

    /// The map `a -> t a t*`.
    pub fn conjugation(t: &CMatrix) -> Self {
        assert!(t.is_square(), "conjugation requires a square operator");
        CpMap::from_kraus(vec![t.clone()]).expect("single square Kraus operator")
    }

    pub fn identity(dim: usize) -> Self {
        CpMap::conjugation(&CMatrix::identity(dim))
    }

    pub fn zero(dim: usize) -> Self {
        CpMap::conjugation(&CMatrix::zeros(dim, dim))
    }

    /// Rebuild a map from a Choi matrix (PSD within `tol`); the Kraus
    /// family comes from the eigenpairs with eigenvalue above `tol.abs`.
    pub fn from_choi(choi: &CMatrix, tol: Tolerance) -> Result<Self> {
        let dim = (choi.rows() as f64).sqrt().round() as usize;
        let mut kraus = kraus_from_choi(choi, tol)?;
        if kraus.is_empty() {
            kraus.push(CMatrix::zeros(dim, dim));
        }
        CpMap::from_kraus(kraus)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    /// `T(a) = sum_i k_i a k_i*`.
    pub fn apply(&self, a: &CMatrix) -> Result<CMatrix> {
        if a.shape() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "apply expects a {0}x{0} argument, got {1}x{2}",
                    self.dim,
                    a.rows(),
                    a.cols()
                ),
            });
        }
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out = &out + &(&(k * a) * &k.adjoint());
        }
        Ok(out)
    }

    /// `T(a)` read from the cached Choi matrix, an independent route from
    /// [`CpMap::apply`]: `T(a) = sum_ij a_ij C_block(i,j)`.
    pub fn apply_via_choi(&self, a: &CMatrix) -> Result<CMatrix> {
        if a.shape() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch {
                context: "apply_via_choi dimension mismatch".into(),
            });
        }
        let d = self.dim;
        let mut out = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let z = a[(i, j)];
                if z == numerics::ZERO {
                    continue;
                }
                let block = self.choi.block(i * d, j * d, d, d);
                out = &out + &block.scale(z);
            }
        }
        Ok(out)
    }

    /// Composition `self . other` (apply `other` first); the Kraus family
    /// is all products `t_i s_j`.
    pub fn compose(&self, other: &CpMap) -> Result<CpMap> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                context: format!("compose of dims {} and {}", self.dim, other.dim),
            });
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for t in &self.kraus {
            for s in &other.kraus {
                kraus.push(t * s);
            }
        }
        CpMap::from_kraus(kraus)
    }

    /// Same map with the minimal Kraus family recovered from the Choi
    /// matrix. Used to keep composed families from growing geometrically.
    pub fn reduced(&self, tol: Tolerance) -> Result<CpMap> {
        CpMap::from_choi(&self.choi, tol)
    }

    /// Superoperator on column-vectorized matrices: `sum_i conj(k_i) (x) k_i`.
    pub fn superop(&self) -> CMatrix {
        let d2 = self.dim * self.dim;
        let mut out = CMatrix::zeros(d2, d2);
        for k in &self.kraus {
            out = &out + &kron(&k.conjugate(), k);
        }
        out
    }

    pub fn classify(&self, tol: Tolerance) -> MapClass {
        let mut residuals = BTreeMap::new();

        let choi_norm = self.choi.frobenius_norm();
        let choi_min = numerics::hermitian_min_eig(&self.choi).expect("choi is square");
        residuals.insert("choi_min_eigenvalue".into(), choi_min);
        let is_cp = choi_min >= -tol.margin(choi_norm);

        let id = CMatrix::identity(self.dim);
        let t_of_id = self.apply(&id).expect("identity has the right shape");
        let unital_residual = (&t_of_id - &id).frobenius_norm();
        residuals.insert("unitality".into(), unital_residual);
        let is_unital = unital_residual <= tol.margin((self.dim as f64).sqrt());

        let gap = &id - &t_of_id;
        let contr_min = numerics::hermitian_min_eig(&gap.hermitian_part()).expect("square");
        residuals.insert("contractivity_min_eigenvalue".into(), contr_min);
        let is_contractive = contr_min >= -tol.margin(gap.frobenius_norm());

        MapClass {
            is_cp,
            is_unital,
            is_contractive,
            residuals,
        }
    }

    /// `|| C(self . other) - C(other . self) ||_F` over the Choi matrices.
    pub fn commutation_residual(&self, other: &CpMap) -> Result<f64> {
        let ts = self.compose(other)?;
        let st = other.compose(self)?;
        Ok((ts.choi() - st.choi()).frobenius_norm())
    }

    pub fn commutes(&self, other: &CpMap, tol: Tolerance) -> Result<bool> {
        let r = self.commutation_residual(other)?;
        Ok(r <= tol.margin(self.choi.frobenius_norm().max(other.choi.frobenius_norm())))
    }
}

fn choi_of_kraus(ops: &[CMatrix], dim: usize) -> CMatrix {
    let d2 = dim * dim;
    let mut choi = CMatrix::zeros(d2, d2);
    for k in ops {
        let v = k.vectorize();
        choi = &choi + &(&v * &v.adjoint());
    }
    choi
}

/// Kraus family of a Choi matrix: eigenpairs with eigenvalue above
/// `tol.abs` give `k_i = sqrt(lambda_i) unvec(v_i)`. An eigenvalue below
/// `-tol.margin(||C||_F)` means the input is not a CP map.
pub fn kraus_from_choi(choi: &CMatrix, tol: Tolerance) -> Result<Vec<CMatrix>> {
    if !choi.is_square() {
        return Err(Error::NonSquare {
            rows: choi.rows(),
            cols: choi.cols(),
        });
    }
    let d = (choi.rows() as f64).sqrt().round() as usize;
    if d * d != choi.rows() {
        return Err(Error::DimensionMismatch {
            context: format!("Choi matrix side {} is not a perfect square", choi.rows()),
        });
    }
    let margin = tol.margin(choi.frobenius_norm());
    let herm = choi.hermiticity_residual();
    if herm > margin {
        return Err(Error::NotHermitian { residual: herm });
    }
    let (w, u) = hermitian_eig(choi)?;
    if let Some(&min) = w.first() {
        if min < -margin {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
    }
    let mut kraus = Vec::new();
    for (idx, &lambda) in w.iter().enumerate() {
        if lambda > tol.abs {
            let v = u.column(idx).scale(C64::new(lambda.sqrt(), 0.0));
            kraus.push(CMatrix::unvectorize(&v, d));
        }
    }
    Ok(kraus)
}
