//! Finite-dimensional *-subalgebras of a full matrix algebra, represented
//! by an orthonormal (Frobenius) basis of their linear span. Everything
//! needed downstream is linear-algebraic on the span: generated algebras,
//! commutants, centers, and central carriers.

use crate::error::{Error, Result};
use crate::numerics::{
    hermitian_eig, kron, span_basis, span_residual, CMatrix, Tolerance, C64,
};

/// A unital *-subalgebra of the `n x n` matrices. The full algebra is kept
/// symbolic so high-dimensional certificates never materialize `n^2` basis
/// matrices unless something actually asks for them.
#[derive(Clone, Debug)]
pub struct MatrixStarAlgebra {
    ambient: usize,
    kind: AlgebraKind,
}

#[derive(Clone, Debug)]
enum AlgebraKind {
    Full,
    Span(Vec<CMatrix>),
}

impl MatrixStarAlgebra {
    /// The full matrix algebra on dimension `n`.
    pub fn full(n: usize) -> Self {
        MatrixStarAlgebra {
            ambient: n,
            kind: AlgebraKind::Full,
        }
    }

    /// Wrap an orthonormal spanning basis, validating the *-algebra
    /// invariants: closure under adjoints and products, and membership of
    /// the identity, all within `tol`.
    pub fn from_orthonormal_basis(basis: Vec<CMatrix>, tol: Tolerance) -> Result<Self> {
        let first = basis.first().ok_or(Error::DimensionMismatch {
            context: "algebra basis must be non-empty".into(),
        })?;
        if !first.is_square() {
            return Err(Error::NonSquare {
                rows: first.rows(),
                cols: first.cols(),
            });
        }
        let n = first.rows();
        if basis.iter().any(|b| b.shape() != (n, n)) {
            return Err(Error::DimensionMismatch {
                context: "algebra basis matrices must share one dimension".into(),
            });
        }
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let g = a.inner(b);
                let expect = if i == j { 1.0 } else { 0.0 };
                if (g - C64::new(expect, 0.0)).norm() > tol.margin(1.0) {
                    return Err(Error::DimensionMismatch {
                        context: format!("algebra basis is not orthonormal at ({i}, {j})"),
                    });
                }
            }
        }
        let alg = MatrixStarAlgebra {
            ambient: n,
            kind: AlgebraKind::Span(basis),
        };
        let id = CMatrix::identity(n);
        let r = alg.member_residual(&id);
        if r > tol.margin(id.frobenius_norm()) {
            return Err(Error::NotInAlgebra { residual: r });
        }
        for a in alg.basis().iter() {
            let r = alg.member_residual(&a.adjoint());
            if r > tol.margin(1.0) {
                return Err(Error::NotInAlgebra { residual: r });
            }
            for b in alg.basis().iter() {
                let r = alg.member_residual(&(a * b));
                if r > tol.margin(1.0) {
                    return Err(Error::NotInAlgebra { residual: r });
                }
            }
        }
        Ok(alg)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Linear dimension of the span.
    pub fn dimension(&self) -> usize {
        match &self.kind {
            AlgebraKind::Full => self.ambient * self.ambient,
            AlgebraKind::Span(b) => b.len(),
        }
    }

    pub fn is_full(&self) -> bool {
        self.dimension() == self.ambient * self.ambient
    }

    /// Orthonormal basis of the span. For the full algebra this is the
    /// matrix-unit basis, materialized on demand.
    pub fn basis(&self) -> Vec<CMatrix> {
        match &self.kind {
            AlgebraKind::Full => {
                let n = self.ambient;
                let mut out = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        out.push(CMatrix::unit(n, i, j));
                    }
                }
                out
            }
            AlgebraKind::Span(b) => b.clone(),
        }
    }

    /// Distance from `m` to the span.
    pub fn member_residual(&self, m: &CMatrix) -> f64 {
        match &self.kind {
            AlgebraKind::Full => 0.0,
            AlgebraKind::Span(basis) => span_residual(basis, m),
        }
    }

    pub fn contains(&self, m: &CMatrix, tol: Tolerance) -> bool {
        self.member_residual(m) <= tol.margin(m.frobenius_norm())
    }

    /// Residual of span equality against another algebra on the same
    /// ambient space: max projection defect in both directions.
    pub fn span_equality_residual(&self, other: &MatrixStarAlgebra) -> f64 {
        if self.ambient != other.ambient {
            return f64::INFINITY;
        }
        if self.is_full() && other.is_full() {
            return 0.0;
        }
        if self.dimension() != other.dimension() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for b in other.basis() {
            worst = worst.max(self.member_residual(&b));
        }
        for b in self.basis() {
            worst = worst.max(other.member_residual(&b));
        }
        worst
    }

    /// Commutant `{x : xb = bx for all b}` as a *-algebra. Computed as the
    /// null space of the stacked commutator system, via the Hermitian
    /// eigendecomposition of `sum_b L_b* L_b` on vectorized matrices.
    pub fn commutant(&self) -> MatrixStarAlgebra {
        let n = self.ambient;
        if self.is_full() {
            let scalar = CMatrix::identity(n).scale(C64::new(1.0 / (n as f64).sqrt(), 0.0));
            return MatrixStarAlgebra {
                ambient: n,
                kind: AlgebraKind::Span(vec![scalar]),
            };
        }
        let id = CMatrix::identity(n);
        let mut gram = CMatrix::zeros(n * n, n * n);
        for b in self.basis() {
            // vec(bx - xb) = (I (x) b - b^T (x) I) vec(x)
            let l = &kron(&id, &b) - &kron(&b.transpose(), &id);
            gram = &gram + &(&l.adjoint() * &l);
        }
        let (w, u) = hermitian_eig(&gram).expect("gram is square");
        let threshold = Tolerance::default().margin(gram.frobenius_norm());
        let mut basis = Vec::new();
        for (idx, &lambda) in w.iter().enumerate() {
            if lambda <= threshold {
                basis.push(CMatrix::unvectorize(&u.column(idx), n));
            }
        }
        if basis.len() == n * n {
            return MatrixStarAlgebra::full(n);
        }
        MatrixStarAlgebra {
            ambient: n,
            kind: AlgebraKind::Span(basis),
        }
    }

    /// Center `A intersect A'`, as an orthonormal basis of the
    /// intersection of the two spans.
    pub fn center(&self) -> Vec<CMatrix> {
        let commutant = self.commutant();
        let cbasis = commutant.basis();
        if cbasis.is_empty() {
            return Vec::new();
        }
        let abasis = self.basis();
        // Gram matrix of the residuals of commutant basis vectors against
        // the algebra span; its null space is the intersection.
        let c = cbasis.len();
        let residuals: Vec<CMatrix> = cbasis
            .iter()
            .map(|x| {
                let mut w = x.clone();
                for _ in 0..2 {
                    for a in &abasis {
                        let coeff = a.inner(&w);
                        w = &w - &a.scale(coeff);
                    }
                }
                w
            })
            .collect();
        let gram = CMatrix::from_fn(c, c, |i, j| residuals[i].inner(&residuals[j]));
        let (w, u) = hermitian_eig(&gram).expect("gram is square");
        let threshold = Tolerance::default().margin(gram.frobenius_norm().max(1.0));
        let mut out = Vec::new();
        for (idx, &lambda) in w.iter().enumerate() {
            if lambda <= threshold {
                let mut combo = CMatrix::zeros(self.ambient, self.ambient);
                for (k, b) in cbasis.iter().enumerate() {
                    combo = &combo + &b.scale(u[(k, idx)]);
                }
                out.push(combo);
            }
        }
        span_basis(&out, Tolerance::default())
    }
}

/// Smallest unital *-subalgebra of `M_n` containing the seeds: iterate
/// span closure under adjoints and pairwise products until the dimension
/// stabilizes (capped at `n^2`, which forces termination).
pub fn generated_star_algebra(
    seeds: &[CMatrix],
    n: usize,
    tol: Tolerance,
) -> MatrixStarAlgebra {
    for s in seeds {
        assert_eq!(s.shape(), (n, n), "seed dimension mismatch");
    }
    let mut basis: Vec<CMatrix> = Vec::new();
    let mut absorb = |m: &CMatrix, basis: &mut Vec<CMatrix>| {
        let mut w = m.clone();
        for _ in 0..2 {
            for b in basis.iter() {
                let c = b.inner(&w);
                w = &w - &b.scale(c);
            }
        }
        let norm = w.frobenius_norm();
        if norm > tol.abs {
            basis.push(w.scale(C64::new(1.0 / norm, 0.0)));
        }
    };
    absorb(&CMatrix::identity(n), &mut basis);
    for s in seeds {
        absorb(s, &mut basis);
        absorb(&s.adjoint(), &mut basis);
    }
    let cap = n * n;
    let mut i = 0;
    while i < basis.len() && basis.len() < cap {
        absorb(&basis[i].adjoint(), &mut basis);
        let mut j = 0;
        while j < basis.len() && basis.len() < cap {
            let left = &basis[i] * &basis[j];
            absorb(&left, &mut basis);
            if basis.len() >= cap {
                break;
            }
            let right = &basis[j] * &basis[i];
            absorb(&right, &mut basis);
            j += 1;
        }
        i += 1;
    }
    if basis.len() == cap {
        return MatrixStarAlgebra::full(n);
    }
    MatrixStarAlgebra {
        ambient: n,
        kind: AlgebraKind::Span(basis),
    }
}

/// Central carrier of the projection `p` in the algebra: the orthogonal
/// projection onto `span{b xi : b in A, xi in range(p)}`. It is the
/// minimal projection in `A intersect A'` dominating `p`.
pub fn central_carrier(
    algebra: &MatrixStarAlgebra,
    p: &CMatrix,
    tol: Tolerance,
) -> Result<CMatrix> {
    let n = algebra.ambient_dim();
    if p.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            context: "projection dimension does not match the algebra".into(),
        });
    }
    let proj_residual =
        (&(p * p) - p).frobenius_norm().max(p.hermiticity_residual());
    if proj_residual > tol.margin(p.frobenius_norm().max(1.0)) {
        return Err(Error::NotProjection {
            residual: proj_residual,
        });
    }
    let member = algebra.member_residual(p);
    if member > tol.margin(p.frobenius_norm().max(1.0)) {
        return Err(Error::NotInAlgebra { residual: member });
    }
    if p.frobenius_norm() <= tol.abs {
        return Ok(CMatrix::zeros(n, n));
    }
    if algebra.is_full() {
        // the full algebra acts irreducibly: any nonzero p has carrier I
        return Ok(CMatrix::identity(n));
    }
    // orthonormal basis of range(p): eigenvectors with eigenvalue near 1
    let (w, u) = hermitian_eig(p)?;
    let mut range: Vec<CMatrix> = Vec::new();
    for (idx, &lambda) in w.iter().enumerate() {
        if lambda >= 0.5 {
            range.push(u.column(idx));
        }
    }
    let mut vectors = Vec::new();
    for b in algebra.basis() {
        for xi in &range {
            vectors.push(&b * xi);
        }
    }
    let span = span_basis(&vectors, tol);
    let mut carrier = CMatrix::zeros(n, n);
    for v in &span {
        carrier = &carrier + &(v * &v.adjoint());
    }
    Ok(carrier)
}

/// Minimal central projections of the algebra, found by eigendecomposing a
/// generic Hermitian element of the center and grouping eigenspaces by
/// eigenvalue. Used to check carrier minimality against the whole lattice.
pub fn minimal_central_projections(
    algebra: &MatrixStarAlgebra,
    tol: Tolerance,
) -> Vec<CMatrix> {
    let n = algebra.ambient_dim();
    let center = algebra.center();
    if center.is_empty() {
        return Vec::new();
    }
    // a pseudo-random but deterministic combination keeps eigenvalues of
    // distinct central components separated
    let mut generic = CMatrix::zeros(n, n);
    for (k, z) in center.iter().enumerate() {
        let h = (&z.scale(C64::new(1.0 + 0.37 * (k as f64 + 1.0).sin(), 0.0))
            + &z.adjoint().scale(C64::new(1.0 + 0.37 * (k as f64 + 1.0).sin(), 0.0)))
        .hermitian_part();
        generic = &generic + &h.scale(C64::new(1.0 + (k as f64 + 1.0) * 0.61, 0.0));
    }
    let (w, u) = hermitian_eig(&generic).expect("square");
    let mut projections = Vec::new();
    let mut idx = 0;
    while idx < w.len() {
        let mut stop = idx + 1;
        while stop < w.len() && (w[stop] - w[idx]).abs() <= tol.margin(1.0).max(1e-8) {
            stop += 1;
        }
        let mut proj = CMatrix::zeros(n, n);
        for k in idx..stop {
            let v = u.column(k);
            proj = &proj + &(&v * &v.adjoint());
        }
        projections.push(proj);
        idx = stop;
    }
    projections
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::direct_sum;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn empty_seeds_generate_the_scalars() {
        let a = generated_star_algebra(&[], 3, tol());
        assert_eq!(a.dimension(), 1);
        assert!(a.contains(&CMatrix::identity(3), tol()));
    }

    #[test]
    fn matrix_units_generate_the_full_algebra() {
        let seeds: Vec<CMatrix> = (0..3)
            .flat_map(|i| (0..3).map(move |j| CMatrix::unit(3, i, j)))
            .collect();
        let a = generated_star_algebra(&seeds, 3, tol());
        assert_eq!(a.dimension(), 9);
        assert!(a.is_full());
    }

    #[test]
    fn single_diagonal_seed_generates_the_diagonal_algebra() {
        let seed = CMatrix::diag(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0)]);
        let a = generated_star_algebra(&[seed], 2, tol());
        assert_eq!(a.dimension(), 2);
        for b in a.basis() {
            assert!(b[(0, 1)].norm() < 1e-12 && b[(1, 0)].norm() < 1e-12);
        }
        assert!(a.contains(&CMatrix::unit(2, 0, 0), tol()));
        assert!(!a.contains(&CMatrix::unit(2, 0, 1), tol()));
    }

    #[test]
    fn commutant_of_full_algebra_is_scalars() {
        let c = MatrixStarAlgebra::full(4).commutant();
        assert_eq!(c.dimension(), 1);
        assert!(c.contains(&CMatrix::identity(4), tol()));
    }

    #[test]
    fn commutant_of_scalars_is_full_algebra() {
        let scalars = generated_star_algebra(&[], 3, tol());
        let c = scalars.commutant();
        assert_eq!(c.dimension(), 9);
    }

    fn two_block_algebra() -> MatrixStarAlgebra {
        // M_2 (+) M_2 inside M_4
        let mut seeds = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                seeds.push(CMatrix::unit(4, i, j));
                seeds.push(CMatrix::unit(4, 2 + i, 2 + j));
            }
        }
        generated_star_algebra(&seeds, 4, tol())
    }

    #[test]
    fn commutant_of_two_blocks_is_two_dimensional() {
        let a = two_block_algebra();
        assert_eq!(a.dimension(), 8);
        let c = a.commutant();
        assert_eq!(c.dimension(), 2);
        // commutant elements commute with every basis element of a
        for x in c.basis() {
            for b in a.basis() {
                assert!((&(&x * &b) - &(&b * &x)).frobenius_norm() < 1e-9);
            }
        }
        let block_id = direct_sum(&CMatrix::identity(2), &CMatrix::zeros(2, 2));
        assert!(c.contains(&block_id, tol()));
    }

    #[test]
    fn double_commutant_recovers_the_algebra() {
        let a = two_block_algebra();
        let cc = a.commutant().commutant();
        assert_eq!(cc.dimension(), a.dimension());
        assert!(a.span_equality_residual(&cc) < 1e-9);
    }

    #[test]
    fn central_carrier_in_full_algebra_is_identity() {
        let a = MatrixStarAlgebra::full(3);
        let p = CMatrix::unit(3, 0, 0);
        let q = central_carrier(&a, &p, tol()).unwrap();
        assert!((&q - &CMatrix::identity(3)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn central_carrier_of_zero_is_zero() {
        let a = MatrixStarAlgebra::full(3);
        let q = central_carrier(&a, &CMatrix::zeros(3, 3), tol()).unwrap();
        assert_eq!(q.frobenius_norm(), 0.0);
    }

    #[test]
    fn central_carrier_picks_out_the_block() {
        let a = two_block_algebra();
        let p = CMatrix::unit(4, 0, 0);
        let q = central_carrier(&a, &p, tol()).unwrap();
        let expect = direct_sum(&CMatrix::identity(2), &CMatrix::zeros(2, 2));
        assert!((&q - &expect).frobenius_norm() < 1e-10);
        // q is a central projection dominating p
        assert!((&(&q * &q) - &q).frobenius_norm() < 1e-10);
        assert!((&(&q * &p) - &p).frobenius_norm() < 1e-10);
        for b in a.basis() {
            assert!((&(&q * &b) - &(&b * &q)).frobenius_norm() < 1e-9);
        }
    }

    #[test]
    fn central_carrier_rejects_non_projections_and_outsiders() {
        let a = two_block_algebra();
        let not_proj = CMatrix::diag(&[C64::new(0.5, 0.0); 4]);
        assert!(matches!(
            central_carrier(&a, &not_proj, tol()),
            Err(Error::NotProjection { .. })
        ));
        // projection onto a vector straddling both blocks is not in M2 (+) M2
        let mut v = CMatrix::zeros(4, 1);
        let s = C64::new(1.0 / 2.0_f64.sqrt(), 0.0);
        v.set(0, 0, s);
        v.set(2, 0, s);
        let straddle = &v * &v.adjoint();
        assert!(matches!(
            central_carrier(&a, &straddle, tol()),
            Err(Error::NotInAlgebra { .. })
        ));
    }

    #[test]
    fn carrier_is_minimal_over_the_central_projection_lattice() {
        let a = two_block_algebra();
        let p = CMatrix::unit(4, 0, 0);
        let carrier = central_carrier(&a, &p, tol()).unwrap();
        for m in minimal_central_projections(&a, tol()) {
            // any central projection dominating p dominates the carrier
            let dominates_p = (&(&m * &p) - &p).frobenius_norm() < 1e-8;
            if dominates_p {
                assert!((&(&m * &carrier) - &carrier).frobenius_norm() < 1e-8);
            }
        }
    }

    #[test]
    fn center_of_factor_is_scalars() {
        let c = MatrixStarAlgebra::full(3).center();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn center_of_two_blocks_has_dimension_two() {
        let a = two_block_algebra();
        assert_eq!(a.center().len(), 2);
    }

    #[test]
    fn from_orthonormal_basis_validates_closure() {
        let n = 2;
        let ok = vec![
            CMatrix::identity(n).scale(C64::new(1.0 / 2.0_f64.sqrt(), 0.0)),
            CMatrix::diag(&[C64::new(1.0 / 2.0_f64.sqrt(), 0.0), C64::new(-1.0 / 2.0_f64.sqrt(), 0.0)]),
        ];
        assert!(MatrixStarAlgebra::from_orthonormal_basis(ok, tol()).is_ok());
        // a single off-diagonal unit is not closed under products
        let bad = vec![CMatrix::unit(2, 0, 1)];
        assert!(MatrixStarAlgebra::from_orthonormal_basis(bad, tol()).is_err());
    }
}
