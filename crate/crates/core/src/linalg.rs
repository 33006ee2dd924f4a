//! Dense complex matrix arithmetic and the spectral routines every relation is built on.
//!
//! Storage and the Hermitian eigensolver come from `nalgebra`; singular value decompositions
//! come from `faer`, whose complex SVD stays accurate on rank-deficient input. The
//! absolute value is taken from the SVD (`a = U Σ V*`, `|a| = V Σ V*`) instead of the
//! square root of `a*a`: forming the Gram matrix first squares the condition number and
//! costs half the significant digits around the zero eigenvalues.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use faer::Mat;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

const MAX_SWEEPS: usize = 20_000;

/// Tolerances shared by every numerical predicate.
///
/// `herm` and `recon` are absolute after scaling by `max(1, ‖a‖)`. `rank` is relative to
/// the largest singular value. `relation` is the threshold a relation defect is compared
/// against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    pub herm: f64,
    pub recon: f64,
    pub rank: f64,
    pub relation: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            herm: 1e-8,
            recon: 1e-8,
            rank: 1e-10,
            relation: 1e-8,
        }
    }
}

impl ToleranceConfig {
    /// Default configuration with the relation threshold replaced.
    pub fn with_relation(relation: f64) -> Self {
        Self {
            relation,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("herm", self.herm),
            ("recon", self.recon),
            ("rank", self.rank),
            ("relation", self.relation),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "tolerance `{name}` must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Dense square complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

impl Serialize for ComplexMatrix {
    /// Row-major nested arrays of `[re, im]` pairs.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_pairs().serialize(serializer)
    }
}

impl ComplexMatrix {
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.dim())
            .map(|i| {
                (0..self.dim())
                    .map(|j| {
                        let z = self.get(i, j);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect()
    }

    pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn new(inner: DMatrix<C64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::InvalidMatrix(format!(
                "expected a square matrix, got {}x{}",
                inner.nrows(),
                inner.ncols()
            )));
        }
        if inner.nrows() == 0 {
            return Err(Error::InvalidMatrix("dimension must be positive".into()));
        }
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix("entries must be finite".into()));
        }
        Ok(Self(inner))
    }

    /// Wraps a matrix produced internally from finite square data.
    pub(crate) fn wrap(inner: DMatrix<C64>) -> Self {
        debug_assert_eq!(inner.nrows(), inner.ncols());
        Self(inner)
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::InvalidMatrix(format!(
                "row of length {} in a {n}-row matrix",
                bad.len()
            )));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Real matrix from row slices. Panics on ragged input; intended for literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "ragged matrix literal");
        Self(DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0)))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.0[(i, j)] = value;
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conjugate(&self) -> Self {
        Self(self.0.conjugate())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(&self.0 * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Self(&self.0 * C64::new(c, 0.0))
    }

    /// `½(a + a*)`, exactly Hermitian in floating point.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Entrywise comparison within an absolute tolerance.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .0
                .iter()
                .zip(other.0.iter())
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> Result<f64> {
        op_norm(self)
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(&self.0 $op &rhs.0)
            }
        }
        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0 $op rhs.0)
            }
        }
        impl $trait<&ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0 $op &rhs.0)
            }
        }
        impl $trait<ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(&self.0 $op rhs.0)
            }
        }
    };
}

impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);
impl_binop!(Mul, mul, *);

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-self.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    /// `V · diag(f(λ)) · V*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = self.eigenvectors.as_dmatrix();
        let mut scaled = v.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let fl = C64::new(f(lambda), 0.0);
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= fl;
            }
        }
        ComplexMatrix::wrap(scaled * v.adjoint()).hermitian_part()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// Singular value decomposition `a = U Σ V*`, singular values descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub left: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub right: ComplexMatrix,
}

impl Svd {
    /// Number of singular values above `rank_tol · σ_max`.
    pub fn rank(&self, rank_tol: f64) -> usize {
        let cut = rank_tol * self.singular_values.first().copied().unwrap_or(0.0);
        self.singular_values
            .iter()
            .take_while(|&&s| s > cut && s > 0.0)
            .count()
    }

    /// `Σ_{i ∈ keep} w_i · x_i y_i*` over selected singular triplets, with `x`/`y` drawn
    /// from the left or right factor.
    pub(crate) fn outer_sum(
        &self,
        left_from_u: bool,
        right_from_u: bool,
        weights: impl Fn(usize, f64) -> Option<f64>,
    ) -> ComplexMatrix {
        let n = self.left.dim();
        let mut acc = DMatrix::<C64>::zeros(n, n);
        let x_src = if left_from_u { &self.left } else { &self.right };
        let y_src = if right_from_u { &self.left } else { &self.right };
        for (k, &s) in self.singular_values.iter().enumerate() {
            if let Some(w) = weights(k, s) {
                let x = x_src.as_dmatrix().column(k);
                let y = y_src.as_dmatrix().column(k);
                acc += (x * y.adjoint()) * C64::new(w, 0.0);
            }
        }
        ComplexMatrix::wrap(acc)
    }
}

pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::InvalidMatrix("empty matrix".into()));
    }
    let dec = to_faer(a)
        .svd()
        .map_err(|e| Error::NumericalFailure(format!("SVD did not converge: {e:?}")))?;
    let s = dec.S().column_vector();
    let singular_values: Vec<f64> = (0..n).map(|i| s[i].re).collect();
    if singular_values.iter().any(|s| !s.is_finite()) {
        return Err(Error::NumericalFailure("non-finite singular value".into()));
    }
    let (u, v) = (dec.U(), dec.V());
    Ok(Svd {
        left: ComplexMatrix::wrap(DMatrix::from_fn(n, n, |i, j| u[(i, j)])),
        singular_values,
        right: ComplexMatrix::wrap(DMatrix::from_fn(n, n, |i, j| v[(i, j)])),
    })
}

fn to_faer(a: &ComplexMatrix) -> Mat<C64> {
    let m = a.as_dmatrix();
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Largest singular value of `a`.
pub fn op_norm(a: &ComplexMatrix) -> Result<f64> {
    if a.dim() == 0 {
        return Ok(0.0);
    }
    let values = to_faer(a)
        .singular_values()
        .map_err(|e| Error::NumericalFailure(format!("SVD did not converge: {e:?}")))?;
    let s = values.iter().copied().fold(0.0, f64::max);
    if s.is_finite() {
        Ok(s)
    } else {
        Err(Error::NumericalFailure("non-finite singular value".into()))
    }
}

/// `‖a − a*‖` in operator norm.
pub fn hermitian_defect(a: &ComplexMatrix) -> Result<f64> {
    op_norm(&(a - a.adjoint()))
}

fn check_hermitian(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<()> {
    let defect = hermitian_defect(a)?;
    let scale = op_norm(a)?.max(1.0);
    if defect > tol.herm * scale {
        return Err(Error::NotHermitian { defect });
    }
    Ok(())
}

/// Eigendecomposition of the Hermitian part of `a`, no precondition check.
pub(crate) fn eigh_unchecked(a: &ComplexMatrix) -> Result<HermitianEig> {
    let h = a.hermitian_part().into_dmatrix();
    let dec = SymmetricEigen::try_new(h, f64::EPSILON, MAX_SWEEPS)
        .ok_or_else(|| Error::NumericalFailure("eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..dec.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| dec.eigenvalues[i].total_cmp(&dec.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| dec.eigenvalues[i]).collect();
    if eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalFailure("non-finite eigenvalue".into()));
    }
    let vecs = DMatrix::from_fn(a.dim(), a.dim(), |r, c| dec.eigenvectors[(r, order[c])]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors: ComplexMatrix::wrap(vecs),
    })
}

/// Eigendecomposition of a Hermitian matrix.
pub fn herm_eig(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<HermitianEig> {
    check_hermitian(a, tol)?;
    eigh_unchecked(a)
}

/// Continuous functional calculus `f(a)` for Hermitian `a`.
pub fn apply_function(
    a: &ComplexMatrix,
    f: impl Fn(f64) -> f64,
    tol: &ToleranceConfig,
) -> Result<ComplexMatrix> {
    Ok(herm_eig(a, tol)?.map(f))
}

/// Square root of a positive semidefinite matrix; eigenvalues are clamped at zero first.
pub fn sqrt_psd(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    apply_function(a, |x| x.max(0.0).sqrt(), tol)
}

/// `|h|` for a matrix known to be Hermitian up to roundoff.
pub(crate) fn hermitian_abs(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(eigh_unchecked(h)?.map(f64::abs))
}

/// `|a| = (a*a)^{1/2}`.
pub fn abs_value(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dec = svd(a)?;
    Ok(dec
        .outer_sum(false, false, |_, s| Some(s))
        .hermitian_part())
}

/// Polar decomposition `a = u |a|` with `u*u = r(|a|)`.
#[derive(Debug, Clone)]
pub struct PolarDecomposition {
    pub partial_isometry: ComplexMatrix,
    pub absolute_value: ComplexMatrix,
    pub rank: usize,
}

pub fn polar(a: &ComplexMatrix, rank_tol: f64) -> Result<PolarDecomposition> {
    if !(rank_tol > 0.0 && rank_tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "rank tolerance must be positive, got {rank_tol}"
        )));
    }
    let dec = svd(a)?;
    let rank = dec.rank(rank_tol);
    let partial_isometry = dec.outer_sum(true, false, |k, _| (k < rank).then_some(1.0));
    let absolute_value = dec
        .outer_sum(false, false, |_, s| Some(s))
        .hermitian_part();
    Ok(PolarDecomposition {
        partial_isometry,
        absolute_value,
        rank,
    })
}

/// Smallest projection `r` with `r·a = a`.
pub fn range_projection(a: &ComplexMatrix, rank_tol: f64) -> Result<ComplexMatrix> {
    let dec = svd(a)?;
    let rank = dec.rank(rank_tol);
    Ok(dec
        .outer_sum(true, true, |k, _| (k < rank).then_some(1.0))
        .hermitian_part())
}
