//! Linear maps between block-diagonal algebras and builders for the standard examples.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{AlgebraElement, AlgebraShape};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ToleranceConfig, C64};

/// How a map was constructed.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    StarHom,
    StarAntiHom,
    Sandwich {
        u: AlgebraElement,
        v: AlgebraElement,
    },
    Transpose,
    Compression,
    Custom(String),
}

impl Provenance {
    pub fn label(&self) -> String {
        match self {
            Provenance::StarHom => "*-homomorphism".into(),
            Provenance::StarAntiHom => "*-anti-homomorphism".into(),
            Provenance::Sandwich { .. } => "sandwich x -> uxv".into(),
            Provenance::Transpose => "transpose".into(),
            Provenance::Compression => "compression x -> pxp".into(),
            Provenance::Custom(s) => s.clone(),
        }
    }
}

/// One domain block placed on the diagonal of a codomain block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub block: usize,
    pub transpose: bool,
}

/// Complex-linear map `T: A → B`, stored as its matrix on row-major vectorized dense
/// elements. Columns of off-block domain entries and rows of off-block codomain entries
/// are zero.
#[derive(Debug, Clone)]
pub struct LinearMap {
    domain: AlgebraShape,
    codomain: AlgebraShape,
    action: DMatrix<C64>,
    provenance: Provenance,
}

fn vec_index(n: usize, i: usize, j: usize) -> usize {
    i * n + j
}

impl LinearMap {
    /// Builds the action column by column from the images of the matrix units.
    pub fn from_basis_images(
        domain: &AlgebraShape,
        codomain: &AlgebraShape,
        provenance: Provenance,
        image: impl Fn(&AlgebraElement) -> Result<AlgebraElement>,
    ) -> Result<Self> {
        let n = domain.total_dim();
        let m = codomain.total_dim();
        let mut action = DMatrix::<C64>::zeros(m * m, n * n);
        for (k, &dk) in domain.block_dims().iter().enumerate() {
            let off = domain.offsets()[k];
            for i in 0..dk {
                for j in 0..dk {
                    let e = AlgebraElement::matrix_unit(domain, k, i, j);
                    let img = image(&e)?;
                    if img.shape() != codomain {
                        return Err(Error::ShapeMismatch {
                            left: codomain.to_string(),
                            right: img.shape().to_string(),
                        });
                    }
                    let col = vec_index(n, off + i, off + j);
                    for (blk, &o) in img.blocks().iter().zip(codomain.offsets().iter()) {
                        for r in 0..blk.dim() {
                            for c in 0..blk.dim() {
                                action[(vec_index(m, o + r, o + c), col)] = blk.get(r, c);
                            }
                        }
                    }
                }
            }
        }
        Ok(Self {
            domain: domain.clone(),
            codomain: codomain.clone(),
            action,
            provenance,
        })
    }

    /// Raw action on vectorized coordinates; off-block rows and columns are masked out.
    pub fn from_action(
        domain: &AlgebraShape,
        codomain: &AlgebraShape,
        action: DMatrix<C64>,
    ) -> Result<Self> {
        let n = domain.total_dim();
        let m = codomain.total_dim();
        if action.nrows() != m * m || action.ncols() != n * n {
            return Err(Error::ShapeIncompatible(format!(
                "action must be {}x{}, got {}x{}",
                m * m,
                n * n,
                action.nrows(),
                action.ncols()
            )));
        }
        if action.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix("action entries must be finite".into()));
        }
        let mut action = action;
        for i in 0..n {
            for j in 0..n {
                if domain.block_of(i, j).is_none() {
                    action.column_mut(vec_index(n, i, j)).fill(C64::new(0.0, 0.0));
                }
            }
        }
        for i in 0..m {
            for j in 0..m {
                if codomain.block_of(i, j).is_none() {
                    action.row_mut(vec_index(m, i, j)).fill(C64::new(0.0, 0.0));
                }
            }
        }
        Ok(Self {
            domain: domain.clone(),
            codomain: codomain.clone(),
            action,
            provenance: Provenance::Custom("raw action".into()),
        })
    }

    pub fn domain(&self) -> &AlgebraShape {
        &self.domain
    }

    pub fn codomain(&self) -> &AlgebraShape {
        &self.codomain
    }

    pub fn action(&self) -> &DMatrix<C64> {
        &self.action
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn apply(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        if x.shape() != &self.domain {
            return Err(Error::ShapeMismatch {
                left: self.domain.to_string(),
                right: x.shape().to_string(),
            });
        }
        let n = self.domain.total_dim();
        let m = self.codomain.total_dim();
        let dense = x.matrix();
        let v = DVector::from_fn(n * n, |idx, _| dense.get(idx / n, idx % n));
        let y = &self.action * v;
        let blocks = self
            .codomain
            .block_dims()
            .iter()
            .zip(self.codomain.offsets())
            .map(|(&d, o)| ComplexMatrix::from_fn(d, |r, c| y[vec_index(m, o + r, o + c)]))
            .collect();
        AlgebraElement::from_blocks(self.codomain.clone(), blocks)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LinearMap) -> Result<LinearMap> {
        if inner.codomain != self.domain {
            return Err(Error::ShapeMismatch {
                left: self.domain.to_string(),
                right: inner.codomain.to_string(),
            });
        }
        Ok(LinearMap {
            domain: inner.domain.clone(),
            codomain: self.codomain.clone(),
            action: &self.action * &inner.action,
            provenance: Provenance::Custom(format!(
                "({}) o ({})",
                self.provenance.label(),
                inner.provenance.label()
            )),
        })
    }

    /// `x ↦ w · T(x)`.
    pub fn left_multiply(&self, w: &AlgebraElement) -> Result<LinearMap> {
        let label = format!("w * ({})", self.provenance.label());
        LinearMap::from_basis_images(&self.domain, &self.codomain, Provenance::Custom(label), |e| {
            w.mul(&self.apply(e)?)
        })
    }

    /// `x ↦ c · T(x)`.
    pub fn scaled(&self, c: C64) -> LinearMap {
        LinearMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            action: &self.action * c,
            provenance: Provenance::Custom(format!("{c} * ({})", self.provenance.label())),
        }
    }
}

pub fn identity(shape: &AlgebraShape) -> LinearMap {
    LinearMap::from_basis_images(shape, shape, Provenance::StarHom, |e| Ok(e.clone()))
        .expect("identity preserves the shape")
}

fn check_unitary(w: &AlgebraElement, which: &str, tol: &ToleranceConfig) -> Result<()> {
    let one = AlgebraElement::unit(w.shape());
    let defect = w
        .adjoint()
        .mul(w)?
        .sub(&one)?
        .op_norm()?
        .max(w.mul(&w.adjoint())?.sub(&one)?.op_norm()?);
    if defect > tol.recon {
        return Err(Error::NotUnitary {
            which: which.to_string(),
            defect,
        });
    }
    Ok(())
}

/// Jordan *-homomorphism: codomain block `j` receives `W_j* (x_{k₁}^{(t)} ⊕ x_{k₂}^{(t)} ⊕ … ⊕ 0) W_j`,
/// each placed block transposed when its flag is set.
pub fn build_jordan_hom(
    domain: &AlgebraShape,
    codomain: &AlgebraShape,
    placements: &[Vec<Placement>],
    unitary: Option<&AlgebraElement>,
    tol: &ToleranceConfig,
) -> Result<LinearMap> {
    if placements.len() != codomain.num_blocks() {
        return Err(Error::ShapeIncompatible(format!(
            "{} placement lists for codomain {codomain}",
            placements.len()
        )));
    }
    for (j, list) in placements.iter().enumerate() {
        let mut used = 0;
        for p in list {
            let d = *domain.block_dims().get(p.block).ok_or_else(|| {
                Error::ShapeIncompatible(format!("domain {domain} has no block {}", p.block))
            })?;
            used += d;
        }
        if used > codomain.block_dims()[j] {
            return Err(Error::ShapeIncompatible(format!(
                "codomain block {j} of size {} cannot hold blocks of total size {used}",
                codomain.block_dims()[j]
            )));
        }
    }
    if let Some(w) = unitary {
        if w.shape() != codomain {
            return Err(Error::ShapeIncompatible(format!(
                "unitary has shape {}, codomain is {codomain}",
                w.shape()
            )));
        }
        check_unitary(w, "unitary", tol)?;
    }

    let all_plain = placements.iter().flatten().all(|p| !p.transpose || domain.block_dims()[p.block] == 1);
    let all_transposed = placements.iter().flatten().all(|p| p.transpose || domain.block_dims()[p.block] == 1);
    let provenance = if all_plain {
        Provenance::StarHom
    } else if all_transposed {
        Provenance::StarAntiHom
    } else {
        Provenance::Custom("jordan *-homomorphism".into())
    };

    LinearMap::from_basis_images(domain, codomain, provenance, |x| {
        let blocks = placements
            .iter()
            .enumerate()
            .map(|(j, list)| {
                let size = codomain.block_dims()[j];
                let mut d = ComplexMatrix::zeros(size);
                let mut off = 0;
                for p in list {
                    let src = if p.transpose {
                        x.block(p.block).transpose()
                    } else {
                        x.block(p.block).clone()
                    };
                    for r in 0..src.dim() {
                        for c in 0..src.dim() {
                            d.set(off + r, off + c, src.get(r, c));
                        }
                    }
                    off += src.dim();
                }
                match unitary {
                    Some(w) => w.block(j).adjoint() * d * w.block(j),
                    None => d,
                }
            })
            .collect();
        AlgebraElement::from_blocks(codomain.clone(), blocks)
    })
}

fn plain(assignment: &[Vec<usize>], transpose: bool) -> Vec<Vec<Placement>> {
    assignment
        .iter()
        .map(|list| {
            list.iter()
                .map(|&block| Placement { block, transpose })
                .collect()
        })
        .collect()
}

/// *-homomorphism. `assignment[j]` lists the domain blocks stacked into codomain block `j`
/// (repeats allowed); `unitary` conjugates the result as `x ↦ w* x w`.
pub fn build_star_hom(
    domain: &AlgebraShape,
    codomain: &AlgebraShape,
    assignment: &[Vec<usize>],
    unitary: Option<&AlgebraElement>,
    tol: &ToleranceConfig,
) -> Result<LinearMap> {
    build_jordan_hom(domain, codomain, &plain(assignment, false), unitary, tol)
        .map(|m| m.with_provenance(Provenance::StarHom))
}

/// *-anti-homomorphism: as [`build_star_hom`] with every placed block transposed.
pub fn build_star_anti_hom(
    domain: &AlgebraShape,
    codomain: &AlgebraShape,
    assignment: &[Vec<usize>],
    unitary: Option<&AlgebraElement>,
    tol: &ToleranceConfig,
) -> Result<LinearMap> {
    build_jordan_hom(domain, codomain, &plain(assignment, true), unitary, tol)
        .map(|m| m.with_provenance(Provenance::StarAntiHom))
}

/// Blockwise transpose `x ↦ xᵗ`.
pub fn build_transpose(shape: &AlgebraShape) -> LinearMap {
    LinearMap::from_basis_images(shape, shape, Provenance::Transpose, |e| Ok(e.transpose()))
        .expect("transpose preserves the shape")
}

/// `x ↦ u x v` for unitaries `u`, `v`.
pub fn build_sandwich(
    u: &AlgebraElement,
    v: &AlgebraElement,
    tol: &ToleranceConfig,
) -> Result<LinearMap> {
    u.check_same_shape(v)?;
    check_unitary(u, "u", tol)?;
    check_unitary(v, "v", tol)?;
    let provenance = Provenance::Sandwich {
        u: u.clone(),
        v: v.clone(),
    };
    LinearMap::from_basis_images(u.shape(), u.shape(), provenance, |e| u.mul(e)?.mul(v))
}

/// `x ↦ c·x`.
pub fn build_scalar(shape: &AlgebraShape, c: C64) -> LinearMap {
    LinearMap::from_basis_images(shape, shape, Provenance::Custom(format!("x -> ({c})x")), |e| {
        Ok(e.scale(c))
    })
    .expect("scaling preserves the shape")
}

/// `x ↦ p x p`.
pub fn build_compression(p: &AlgebraElement) -> LinearMap {
    LinearMap::from_basis_images(p.shape(), p.shape(), Provenance::Compression, |e| {
        p.mul(e)?.mul(p)
    })
    .expect("compression preserves the shape")
}

/// `S(x) = T(x*)*`; `S` preserves domain compatibility exactly when `T` preserves range
/// compatibility.
pub fn range_version_adapter(map: &LinearMap) -> LinearMap {
    let label = format!("x -> T(x*)* for T = {}", map.provenance().label());
    LinearMap::from_basis_images(map.domain(), map.codomain(), Provenance::Custom(label), |e| {
        Ok(map.apply(&e.adjoint())?.adjoint())
    })
    .expect("adapter preserves the shapes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_unitary_element, random_contraction, random_element, seeded};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn m2() -> AlgebraShape {
        AlgebraShape::full(2).unwrap()
    }

    fn multiplicative_defect(map: &LinearMap, anti: bool) -> f64 {
        let basis = AlgebraElement::basis(map.domain());
        let mut worst: f64 = 0.0;
        for x in &basis {
            for y in &basis {
                let lhs = map.apply(&x.mul(y).unwrap()).unwrap();
                let (tx, ty) = (map.apply(x).unwrap(), map.apply(y).unwrap());
                let rhs = if anti { ty.mul(&tx) } else { tx.mul(&ty) }.unwrap();
                worst = worst.max(lhs.distance(&rhs).unwrap());
                let star = map
                    .apply(&x.adjoint())
                    .unwrap()
                    .distance(&tx.adjoint())
                    .unwrap();
                worst = worst.max(star);
            }
        }
        worst
    }

    #[test]
    fn identity_builder() {
        let s = AlgebraShape::new(vec![2, 1]).unwrap();
        let id = build_star_hom(&s, &s, &[vec![0], vec![1]], None, &tol()).unwrap();
        let mut rng = seeded(1);
        let x = random_element(&s, &mut rng, random_contraction);
        assert!(id.apply(&x).unwrap().approx_eq(&x, 1e-15));
        assert!(identity(&s).apply(&x).unwrap().approx_eq(&x, 1e-15));
    }

    #[test]
    fn conjugation_is_an_automorphism() {
        let mut rng = seeded(2);
        let w = haar_unitary_element(&m2(), &mut rng);
        let phi = build_star_hom(&m2(), &m2(), &[vec![0]], Some(&w), &tol()).unwrap();
        assert!(multiplicative_defect(&phi, false) < 1e-10);
        let x = random_element(&m2(), &mut rng, random_contraction);
        let expected = w.adjoint().mul(&x).unwrap().mul(&w).unwrap();
        assert!(phi.apply(&x).unwrap().approx_eq(&expected, 1e-12));
    }

    #[test]
    fn diagonal_embedding_into_direct_sum() {
        let cod = AlgebraShape::new(vec![2, 2]).unwrap();
        let phi = build_star_hom(&m2(), &cod, &[vec![0], vec![0]], None, &tol()).unwrap();
        assert!(multiplicative_defect(&phi, false) < 1e-10);
        let one = phi.apply(&AlgebraElement::unit(&m2())).unwrap();
        assert!(one.approx_eq(&AlgebraElement::unit(&cod), 0.0));

        let wide = AlgebraShape::new(vec![3, 2]).unwrap();
        let phi = build_star_hom(&m2(), &wide, &[vec![0], vec![]], None, &tol()).unwrap();
        let p = phi.apply(&AlgebraElement::unit(&m2())).unwrap();
        assert!(p.approx_eq(&p.mul(&p).unwrap(), 0.0));
        assert!(!p.approx_eq(&AlgebraElement::unit(&wide), 0.5));
        assert!(multiplicative_defect(&phi, false) < 1e-10);
    }

    #[test]
    fn builder_rejects_bad_assignments() {
        let cod = AlgebraShape::full(3).unwrap();
        assert!(matches!(
            build_star_hom(&m2(), &cod, &[vec![0, 0]], None, &tol()),
            Err(Error::ShapeIncompatible(_))
        ));
        assert!(matches!(
            build_star_hom(&m2(), &cod, &[vec![1]], None, &tol()),
            Err(Error::ShapeIncompatible(_))
        ));
        assert!(matches!(
            build_star_hom(&m2(), &cod, &[vec![0], vec![0]], None, &tol()),
            Err(Error::ShapeIncompatible(_))
        ));
        let not_unitary = AlgebraElement::unit(&cod).scale_real(2.0);
        assert!(matches!(
            build_star_hom(&m2(), &cod, &[vec![0]], Some(&not_unitary), &tol()),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn transpose_is_an_anti_automorphism() {
        let t = build_transpose(&m2());
        assert!(multiplicative_defect(&t, true) < 1e-12);
        assert!(multiplicative_defect(&t, false) > 0.5);
        let anti = build_star_anti_hom(&m2(), &m2(), &[vec![0]], None, &tol()).unwrap();
        assert_eq!(anti.action(), t.action());

        let comm = AlgebraShape::commutative(3).unwrap();
        let t = build_transpose(&comm);
        assert!(multiplicative_defect(&t, false) < 1e-12);

        let mut rng = seeded(5);
        let w = haar_unitary_element(&m2(), &mut rng);
        let anti = build_star_anti_hom(&m2(), &m2(), &[vec![0]], Some(&w), &tol()).unwrap();
        assert_eq!(anti.provenance(), &Provenance::StarAntiHom);
        assert!(multiplicative_defect(&anti, true) < 1e-10);
    }

    #[test]
    fn sandwich_examples() {
        let one = AlgebraElement::unit(&m2());
        let id = build_sandwich(&one, &one, &tol()).unwrap();
        assert_eq!(id.action(), identity(&m2()).action());

        let v = AlgebraElement::full(ComplexMatrix::from_real_diagonal(&[1.0, -1.0]));
        let right = build_sandwich(&one, &v, &tol()).unwrap();
        let mut rng = seeded(9);
        let x = random_element(&m2(), &mut rng, random_contraction);
        assert!(right
            .apply(&x)
            .unwrap()
            .approx_eq(&x.mul(&v).unwrap(), 1e-15));

        let u = haar_unitary_element(&m2(), &mut rng);
        let w = haar_unitary_element(&m2(), &mut rng);
        let s = build_sandwich(&u, &w, &tol()).unwrap();
        // neither multiplicative nor symmetric
        assert!(multiplicative_defect(&s, false) > 1e-3);
        assert!(build_sandwich(&one.scale_real(0.5), &one, &tol()).is_err());
    }

    #[test]
    fn range_adapter_examples() {
        let s = AlgebraShape::new(vec![2, 1]).unwrap();
        let id = identity(&s);
        assert_eq!(range_version_adapter(&id).action(), id.action());

        // x ↦ ((x*)ᵗ)* is the transpose again; entrywise conjugation is not complex-linear
        let t = build_transpose(&s);
        assert_eq!(range_version_adapter(&t).action(), t.action());
        let mut rng = seeded(4);
        let x = random_element(&s, &mut rng, random_contraction);

        let w = haar_unitary_element(&s, &mut rng);
        let phi = build_star_hom(&s, &s, &[vec![0], vec![1]], Some(&w), &tol()).unwrap();
        let adapted = range_version_adapter(&phi);
        assert!(adapted.apply(&x).unwrap().approx_eq(&phi.apply(&x).unwrap(), 1e-12));
    }

    #[test]
    fn raw_action_is_masked() {
        let s = AlgebraShape::new(vec![1, 1]).unwrap();
        let action = DMatrix::from_element(4, 4, C64::new(1.0, 0.0));
        let map = LinearMap::from_action(&s, &s, action).unwrap();
        // only the (0,0) and (1,1) coordinates survive
        assert_eq!(map.action().iter().filter(|z| z.re != 0.0).count(), 4);
        assert!(LinearMap::from_action(&s, &s, DMatrix::zeros(3, 4)).is_err());
    }

    #[test]
    fn composition_and_scaling() {
        let t = build_transpose(&m2());
        let tt = t.compose(&t).unwrap();
        assert_eq!(tt.action(), identity(&m2()).action());
        let half = build_scalar(&m2(), C64::new(0.5, 0.0));
        assert_eq!(half.action(), t.scaled(C64::new(0.5, 0.0)).compose(&t).unwrap().action());
        let p = AlgebraElement::full(ComplexMatrix::from_real_diagonal(&[1.0, 0.0]));
        let comp = build_compression(&p);
        let x = AlgebraElement::full(ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]));
        let y = comp.apply(&x).unwrap();
        assert!(y.approx_eq(
            &AlgebraElement::full(ComplexMatrix::from_real_diagonal(&[1.0, 0.0])),
            0.0
        ));
    }
}
