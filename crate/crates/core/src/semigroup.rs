//! CP-semigroups over `N^k` generated by commuting CP maps, and the
//! unitalization that turns a contractive semigroup on `M_d` into a Markov
//! semigroup on `M_{d+1}` compressing back onto the original corner.
//!
//! The unitalized generator sends the block matrix `(A, h; g*, c)` to
//! `(T(A) + c(I - T(I)), 0; 0, c)`. It is realized here as a first-class
//! Kraus family: `{k_i (+) 0}` plus the rank-one operators `w_j e_D*`
//! feeding the corner through the defect root `(I - T(I))^{1/2} (+) 1`.
//! Correctness is enforced by testing the block formula, not trusted from
//! the construction.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cpmap::CpMap;
use crate::error::{Error, Result};
use crate::numerics::{self, direct_sum, psd_sqrt, CMatrix, Tolerance, C64};
use crate::report::VerificationReport;

/// Element of `N^k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(components: Vec<u32>) -> Self {
        MultiIndex(components)
    }

    pub fn zero(arity: usize) -> Self {
        MultiIndex(vec![0; arity])
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.arity(), other.arity(), "multi-index arity mismatch");
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn leq(&self, other: &MultiIndex) -> bool {
        self.arity() == other.arity() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Standard basis index `e_i`.
    pub fn basis(arity: usize, i: usize) -> Self {
        let mut c = vec![0; arity];
        c[i] = 1;
        MultiIndex(c)
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices `s <= bound` componentwise, in lexicographic order.
pub fn box_indices(bound: &MultiIndex) -> Vec<MultiIndex> {
    let mut out = vec![Vec::new()];
    for &b in bound.components() {
        let mut next = Vec::with_capacity(out.len() * (b as usize + 1));
        for prefix in &out {
            for c in 0..=b {
                let mut p = prefix.clone();
                p.push(c);
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter().map(MultiIndex).collect()
}

/// CP-semigroup over `N^k`: `T_s = T_1^{s_1} . ... . T_k^{s_k}` for
/// commuting, contractive CP generators, with memoized evaluation.
pub struct CpSemigroup {
    dim: usize,
    generators: Vec<CpMap>,
    tol: Tolerance,
    cache: Mutex<HashMap<Vec<u32>, Arc<CpMap>>>,
}

impl Clone for CpSemigroup {
    fn clone(&self) -> Self {
        CpSemigroup {
            dim: self.dim,
            generators: self.generators.clone(),
            tol: self.tol,
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

impl std::fmt::Debug for CpSemigroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "CpSemigroup(dim={}, arity={})",
            self.dim,
            self.generators.len()
        )
    }
}

impl CpSemigroup {
    /// Build from commuting, contractive CP generators. Every construction
    /// check runs here: complete positivity and contractivity per
    /// generator, pairwise commutation within `tol`.
    pub fn from_generators(gens: Vec<CpMap>, tol: Tolerance) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::DimensionMismatch {
                context: "a semigroup needs at least one generator".into(),
            });
        }
        let dim = gens[0].dim();
        if gens.iter().any(|g| g.dim() != dim) {
            return Err(Error::DimensionMismatch {
                context: "generators must share one dimension".into(),
            });
        }
        for (i, g) in gens.iter().enumerate() {
            let class = g.classify(tol);
            if !class.is_cp {
                return Err(Error::NotCp {
                    index: Some(i),
                    min_eigenvalue: class.residuals["choi_min_eigenvalue"],
                });
            }
            if !class.is_contractive {
                return Err(Error::NotContractive {
                    index: Some(i),
                    min_eigenvalue: class.residuals["contractivity_min_eigenvalue"],
                });
            }
        }
        for i in 0..gens.len() {
            for j in (i + 1)..gens.len() {
                let residual = gens[i].commutation_residual(&gens[j])?;
                let scale = gens[i]
                    .choi()
                    .frobenius_norm()
                    .max(gens[j].choi().frobenius_norm());
                if residual > tol.margin(scale) {
                    return Err(Error::NotCommuting { i, j, residual });
                }
            }
        }
        Ok(CpSemigroup {
            dim,
            generators: gens,
            tol,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Construction with all checks skipped. For negative-path tests and
    /// deliberately broken fixtures only.
    #[doc(hidden)]
    pub fn from_generators_unchecked(gens: Vec<CpMap>, tol: Tolerance) -> Self {
        let dim = gens.first().map_or(0, CpMap::dim);
        CpSemigroup {
            dim,
            generators: gens,
            tol,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[CpMap] {
        &self.generators
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    /// `T_s`, composed in ascending generator order and memoized. The Kraus
    /// family is reduced through the Choi matrix whenever it outgrows
    /// `dim^2`, which leaves the map itself unchanged.
    pub fn evaluate(&self, s: &MultiIndex) -> Result<CpMap> {
        if s.arity() != self.generators.len() {
            return Err(Error::ArityMismatch {
                expected: self.generators.len(),
                found: s.arity(),
            });
        }
        if let Some(hit) = self.cache.lock().unwrap().get(s.components()) {
            return Ok((**hit).clone());
        }
        let mut acc = CpMap::identity(self.dim);
        for (i, g) in self.generators.iter().enumerate() {
            for _ in 0..s.components()[i] {
                acc = acc.compose(g)?;
                if acc.kraus().len() > self.dim * self.dim {
                    acc = acc.reduced(self.tol)?;
                }
            }
        }
        let arc = Arc::new(acc);
        let mut cache = self.cache.lock().unwrap();
        let entry = cache
            .entry(s.components().to_vec())
            .or_insert_with(|| Arc::clone(&arc));
        Ok((**entry).clone())
    }

    /// Check `T_s . T_t = T_{s+t}` for every pair with `s + t <= bound`,
    /// comparing Choi matrices in Frobenius norm.
    pub fn verify_semigroup_law(
        &self,
        bound: &MultiIndex,
        tol: Tolerance,
    ) -> Result<VerificationReport> {
        let mut report = VerificationReport::new();
        let indices = box_indices(bound);
        for s in &indices {
            for t in &indices {
                let st = s.add(t);
                if !st.leq(bound) {
                    continue;
                }
                let direct = self.evaluate(&st)?;
                let composed = self.evaluate(s)?.compose(&self.evaluate(t)?)?;
                let residual = (direct.choi() - composed.choi()).frobenius_norm();
                let threshold = tol.margin(direct.choi().frobenius_norm());
                report.push(format!("law[{s}+{t}]"), residual, threshold);
            }
        }
        Ok(report)
    }

    /// Markov test: every generator unital within `tol` (sufficient, since
    /// unitality composes).
    pub fn is_markov(&self, tol: Tolerance) -> bool {
        self.generators.iter().all(|g| g.classify(tol).is_unital)
    }

    /// The unitalized semigroup on dimension `d + 1`.
    pub fn unitalize(&self) -> Result<CpSemigroup> {
        let gens = self
            .generators
            .iter()
            .map(|g| unitalize_map(g, self.tol))
            .collect::<Result<Vec<_>>>()?;
        CpSemigroup::from_generators(gens, self.tol)
    }

    /// Check the compression identity `T_s(b) = p_H Tu_s(b (+) 0) p_H` on
    /// random Hermitian samples over the index box. Deterministic: the
    /// sample stream is seeded per call.
    pub fn compression_check(
        &self,
        unitalized: &CpSemigroup,
        samples: usize,
        bound: &MultiIndex,
        tol: Tolerance,
    ) -> Result<VerificationReport> {
        if unitalized.dim != self.dim + 1 {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "unitalized semigroup must act on dim {} + 1, got {}",
                    self.dim, unitalized.dim
                ),
            });
        }
        if unitalized.arity() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: unitalized.arity(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
        let d = self.dim;
        let mut report = VerificationReport::new();
        for s in box_indices(bound) {
            let t_s = self.evaluate(&s)?;
            let tu_s = unitalized.evaluate(&s)?;
            for sample in 0..samples {
                let b = random_hermitian(&mut rng, d);
                let embedded = direct_sum(&b, &CMatrix::zeros(1, 1));
                let lhs = t_s.apply(&b)?;
                let rhs = tu_s.apply(&embedded)?.block(0, 0, d, d);
                let residual = (&lhs - &rhs).frobenius_norm();
                report.push(
                    format!("compression[{s}] sample {sample}"),
                    residual,
                    tol.margin(b.frobenius_norm()),
                );
            }
        }
        Ok(report)
    }
}

/// Unitalization of a single contractive CP map: the Kraus realization of
/// `(A, h; g*, c) -> (T(A) + c(I - T(I)), 0; 0, c)` on `M_{d+1}`.
pub fn unitalize_map(map: &CpMap, tol: Tolerance) -> Result<CpMap> {
    let d = map.dim();
    let id = CMatrix::identity(d);
    let gap = (&id - &map.apply(&id)?).hermitian_part();
    let min = numerics::hermitian_min_eig(&gap)?;
    if min < -tol.margin(gap.frobenius_norm()) {
        return Err(Error::NotContractive {
            index: None,
            min_eigenvalue: min,
        });
    }
    let defect_root = psd_sqrt(&gap, tol)?;
    let big = d + 1;
    let mut kraus: Vec<CMatrix> = map
        .kraus()
        .iter()
        .map(|k| direct_sum(k, &CMatrix::zeros(1, 1)))
        .collect();
    let feeder = direct_sum(&defect_root, &CMatrix::identity(1));
    for j in 0..big {
        let w = feeder.column(j);
        if w.frobenius_norm() <= tol.abs {
            continue;
        }
        let mut op = CMatrix::zeros(big, big);
        op.set_block(0, big - 1, &w);
        kraus.push(op);
    }
    CpMap::from_kraus(kraus)
}

/// Random Hermitian matrix with entries of order one.
pub(crate) fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
    .hermitian_part()
}
