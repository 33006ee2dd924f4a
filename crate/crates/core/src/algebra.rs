//! Finite-dimensional C*-algebras `⊕ᵢ M_{nᵢ}(ℂ)` and their elements.
//!
//! Elements are stored block by block, so off-block entries are zero by construction and
//! every spectral computation runs on the individual blocks. All represented algebras are
//! unital; no unitization is needed.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ToleranceConfig, C64};
use crate::report::RelationReport;

/// Block dimensions `(n₁, …, n_k)` of `⊕ᵢ M_{nᵢ}(ℂ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraShape {
    block_dims: Vec<usize>,
}

impl AlgebraShape {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(Error::InvalidArgument("shape needs at least one block".into()));
        }
        if block_dims.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "block dimensions must be positive, got {block_dims:?}"
            )));
        }
        Ok(Self { block_dims })
    }

    /// A single full matrix block `M_n(ℂ)`.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    /// The commutative algebra `ℂⁿ = C(Ω)` with `|Ω| = n`.
    pub fn commutative(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.block_dims.iter().sum()
    }

    /// Linear dimension `Σ nᵢ²`.
    pub fn basis_len(&self) -> usize {
        self.block_dims.iter().map(|n| n * n).sum()
    }

    pub fn offsets(&self) -> Vec<usize> {
        self.block_dims
            .iter()
            .scan(0, |acc, &n| {
                let start = *acc;
                *acc += n;
                Some(start)
            })
            .collect()
    }

    /// Block index owning the dense entry `(i, j)`, if it is an in-block entry.
    pub fn block_of(&self, i: usize, j: usize) -> Option<usize> {
        let mut start = 0;
        for (k, &n) in self.block_dims.iter().enumerate() {
            let range = start..start + n;
            if range.contains(&i) {
                return range.contains(&j).then_some(k);
            }
            start += n;
        }
        None
    }

    pub fn largest_block(&self) -> usize {
        self.block_dims.iter().copied().max().unwrap_or(0)
    }

    pub fn is_commutative(&self) -> bool {
        self.block_dims.iter().all(|&n| n == 1)
    }
}

impl fmt::Display for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.block_dims.iter().map(|n| n.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for AlgebraShape {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.block_dims.serialize(serializer)
    }
}

/// Element of `⊕ᵢ M_{nᵢ}(ℂ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    shape: AlgebraShape,
    blocks: Vec<ComplexMatrix>,
}

/// Serialized as `{"shape": [...], "entries": [block rows of [re, im]]}`.
impl Serialize for AlgebraElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("AlgebraElement", 2)?;
        st.serialize_field("shape", &self.shape)?;
        st.serialize_field("entries", &self.blocks)?;
        st.end()
    }
}

impl AlgebraElement {
    pub fn from_blocks(shape: AlgebraShape, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if blocks.len() != shape.num_blocks()
            || blocks
                .iter()
                .zip(shape.block_dims())
                .any(|(b, &n)| b.dim() != n)
        {
            let got: Vec<usize> = blocks.iter().map(ComplexMatrix::dim).collect();
            return Err(Error::ShapeMismatch {
                left: shape.to_string(),
                right: format!("{got:?}"),
            });
        }
        Ok(Self { shape, blocks })
    }

    /// Single-block element of `M_n(ℂ)`.
    pub fn full(matrix: ComplexMatrix) -> Self {
        let shape = AlgebraShape {
            block_dims: vec![matrix.dim()],
        };
        Self {
            shape,
            blocks: vec![matrix],
        }
    }

    /// Diagonal element of the commutative algebra `ℂⁿ`.
    pub fn commutative(values: &[C64]) -> Result<Self> {
        let shape = AlgebraShape::commutative(values.len())?;
        let blocks = values
            .iter()
            .map(|&v| ComplexMatrix::from_diagonal(&[v]))
            .collect();
        Ok(Self { shape, blocks })
    }

    /// Reads a dense matrix; off-block entries above `tol` are rejected, the rest dropped.
    pub fn from_dense(shape: AlgebraShape, matrix: &ComplexMatrix, tol: f64) -> Result<Self> {
        if matrix.dim() != shape.total_dim() {
            return Err(Error::ShapeMismatch {
                left: shape.to_string(),
                right: format!("dense {}x{}", matrix.dim(), matrix.dim()),
            });
        }
        let n = matrix.dim();
        for i in 0..n {
            for j in 0..n {
                if shape.block_of(i, j).is_none() && matrix.get(i, j).norm() > tol {
                    return Err(Error::InvalidMatrix(format!(
                        "off-block entry ({i},{j}) is nonzero for shape {shape}"
                    )));
                }
            }
        }
        let blocks = shape
            .offsets()
            .iter()
            .zip(shape.block_dims())
            .map(|(&o, &d)| ComplexMatrix::from_fn(d, |i, j| matrix.get(o + i, o + j)))
            .collect();
        Ok(Self { shape, blocks })
    }

    pub fn zero(shape: &AlgebraShape) -> Self {
        Self::map_shape(shape, ComplexMatrix::zeros)
    }

    pub fn unit(shape: &AlgebraShape) -> Self {
        Self::map_shape(shape, ComplexMatrix::identity)
    }

    /// Matrix unit `E_{ij}` inside block `block`.
    pub fn matrix_unit(shape: &AlgebraShape, block: usize, i: usize, j: usize) -> Self {
        let mut e = Self::zero(shape);
        e.blocks[block].set(i, j, C64::new(1.0, 0.0));
        e
    }

    /// Canonical basis: matrix units of every block, blocks in order, row-major inside.
    pub fn basis(shape: &AlgebraShape) -> Vec<Self> {
        let mut out = Vec::with_capacity(shape.basis_len());
        for (k, &n) in shape.block_dims().iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    out.push(Self::matrix_unit(shape, k, i, j));
                }
            }
        }
        out
    }

    fn map_shape(shape: &AlgebraShape, f: impl Fn(usize) -> ComplexMatrix) -> Self {
        Self {
            shape: shape.clone(),
            blocks: shape.block_dims().iter().map(|&n| f(n)).collect(),
        }
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &ComplexMatrix {
        &self.blocks[k]
    }

    /// Dense block-diagonal matrix of size `total_dim`.
    pub fn matrix(&self) -> ComplexMatrix {
        let n = self.shape.total_dim();
        let mut m = ComplexMatrix::zeros(n);
        for (b, &o) in self.blocks.iter().zip(self.shape.offsets().iter()) {
            for i in 0..b.dim() {
                for j in 0..b.dim() {
                    m.set(o + i, o + j, b.get(i, j));
                }
            }
        }
        m
    }

    pub fn map_blocks(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    pub fn try_map_blocks(
        &self,
        f: impl Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
    ) -> Result<Self> {
        Ok(Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(f).collect::<Result<_>>()?,
        })
    }

    fn zip_blocks(
        &self,
        other: &Self,
        f: impl Fn(&ComplexMatrix, &ComplexMatrix) -> ComplexMatrix,
    ) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            shape: self.shape.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch {
                left: self.shape.to_string(),
                right: other.shape.to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, |a, b| a * b)
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map_blocks(|b| b.scale(c))
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.map_blocks(|b| b.scale_real(c))
    }

    pub fn adjoint(&self) -> Self {
        self.map_blocks(ComplexMatrix::adjoint)
    }

    /// Blockwise transpose, the canonical *-anti-automorphism.
    pub fn transpose(&self) -> Self {
        self.map_blocks(ComplexMatrix::transpose)
    }

    pub fn conjugate(&self) -> Self {
        self.map_blocks(ComplexMatrix::conjugate)
    }

    /// `1 − self`.
    pub fn complement(&self) -> Self {
        self.map_blocks(|b| ComplexMatrix::identity(b.dim()) - b)
    }

    pub fn hermitian_part(&self) -> Self {
        self.map_blocks(ComplexMatrix::hermitian_part)
    }

    /// Operator norm: the largest block norm.
    pub fn op_norm(&self) -> Result<f64> {
        self.blocks
            .iter()
            .map(linalg::op_norm)
            .try_fold(0.0, |acc, n| Ok(f64::max(acc, n?)))
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.sub(other)?.op_norm()
    }

    /// `|x| = (x*x)^{1/2}`, blockwise.
    pub fn abs(&self) -> Result<Self> {
        self.try_map_blocks(linalg::abs_value)
    }

    /// `|x*| = (xx*)^{1/2}`.
    pub fn abs_adjoint(&self) -> Result<Self> {
        self.adjoint().abs()
    }

    /// `|h|` for `h` Hermitian up to roundoff, via eigendecomposition of `h` itself.
    pub(crate) fn hermitian_abs(&self) -> Result<Self> {
        self.try_map_blocks(linalg::hermitian_abs)
    }

    /// Smallest and largest eigenvalue of the Hermitian part across all blocks.
    pub(crate) fn hermitian_spectrum_bounds(&self) -> Result<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for b in &self.blocks {
            let e = linalg::eigh_unchecked(b)?;
            lo = lo.min(e.min_eigenvalue());
            hi = hi.max(e.max_eigenvalue());
        }
        Ok((lo, hi))
    }

    /// Spectrum of the Hermitian part, all blocks merged, ascending.
    pub fn hermitian_spectrum(&self) -> Result<Vec<f64>> {
        let mut all = Vec::with_capacity(self.shape.total_dim());
        for b in &self.blocks {
            all.extend(linalg::eigh_unchecked(b)?.eigenvalues);
        }
        all.sort_by(f64::total_cmp);
        Ok(all)
    }

    /// Continuous functional calculus of a Hermitian element.
    pub fn apply_function(
        &self,
        f: impl Fn(f64) -> f64 + Copy,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        self.try_map_blocks(|b| linalg::apply_function(b, f, tol))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.shape == other.shape
            && self
                .blocks
                .iter()
                .zip(&other.blocks)
                .all(|(a, b)| a.approx_eq(b, tol))
    }
}

/// `a ∘ b = ½(ab + ba)`.
pub fn jordan(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
    a.zip_blocks(b, |x, y| (x * y + y * x).scale_real(0.5))
}

/// `{a, b, c} = ½(ab*c + cb*a)`.
pub fn triple(a: &AlgebraElement, b: &AlgebraElement, c: &AlgebraElement) -> Result<AlgebraElement> {
    a.check_same_shape(b)?;
    a.check_same_shape(c)?;
    let blocks = a
        .blocks
        .iter()
        .zip(&b.blocks)
        .zip(&c.blocks)
        .map(|((x, y), z)| {
            let ys = y.adjoint();
            (x * &ys * z + z * &ys * x).scale_real(0.5)
        })
        .collect();
    Ok(AlgebraElement {
        shape: a.shape.clone(),
        blocks,
    })
}

pub fn unit(shape: &AlgebraShape) -> AlgebraElement {
    AlgebraElement::unit(shape)
}

pub fn adjoint(a: &AlgebraElement) -> AlgebraElement {
    a.adjoint()
}

/// Hermitian with nonnegative spectrum, both up to `tol.relation`.
pub fn is_positive(a: &AlgebraElement, tol: &ToleranceConfig) -> Result<RelationReport> {
    let herm = a.sub(&a.adjoint())?.op_norm()?;
    let (lo, _) = a.hermitian_spectrum_bounds()?;
    let defect = herm.max((-lo).max(0.0));
    Ok(RelationReport::new("positive", defect, tol.relation))
}

/// `‖a‖ ≤ 1 + tol`.
pub fn is_contraction(a: &AlgebraElement, tol: &ToleranceConfig) -> Result<RelationReport> {
    let defect = (a.op_norm()? - 1.0).max(0.0);
    Ok(RelationReport::new("contraction", defect, tol.relation))
}
