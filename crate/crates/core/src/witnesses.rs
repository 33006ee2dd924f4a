//! Fixed example elements: the noncommuting compatible pair in `M₂`, the partial isometries
//! that break domain compatibility under the transpose, and saturated pairs `(1, b)`.

use crate::algebra::{AlgebraElement, AlgebraShape};
use crate::error::Result;
use crate::linalg::{ComplexMatrix, ToleranceConfig};
use crate::relations::{compat_defect, CompatKind};

/// Positive, absolutely compatible, `ab ≠ ba ≠ 0`.
pub fn paper_pair() -> (ComplexMatrix, ComplexMatrix) {
    (
        ComplexMatrix::from_real_rows(&[&[2.0 / 3.0, 1.0 / 3.0], &[1.0 / 3.0, 1.0 / 3.0]]),
        ComplexMatrix::from_real_rows(&[&[2.0 / 3.0, -1.0 / 3.0], &[-1.0 / 3.0, 1.0 / 3.0]]),
    )
}

/// Minimal partial isometries with `e*e = p`, `ee* = 1 − p`, `v*v = 1 − p` and
/// `vv* = ½[[1,1],[1,1]]`, where `p = diag(1, 0)`.
pub fn transpose_witnesses() -> (ComplexMatrix, ComplexMatrix) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (
        ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]),
        ComplexMatrix::from_real_rows(&[&[0.0, s], &[0.0, s]]),
    )
}

/// Places a 2×2 matrix in the top-left corner of the first block of dimension ≥ 2.
pub fn embed_2x2(shape: &AlgebraShape, m: &ComplexMatrix) -> Option<AlgebraElement> {
    let k = shape.block_dims().iter().position(|&n| n >= 2)?;
    let blocks = shape
        .block_dims()
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            if i == k {
                ComplexMatrix::from_fn(n, |r, c| {
                    if r < 2 && c < 2 {
                        m.get(r, c)
                    } else {
                        crate::C64::new(0.0, 0.0)
                    }
                })
            } else {
                ComplexMatrix::zeros(n)
            }
        })
        .collect();
    AlgebraElement::from_blocks(shape.clone(), blocks).ok()
}

/// A named candidate pair.
#[derive(Debug, Clone)]
pub struct LabeledPair {
    pub label: &'static str,
    pub a: AlgebraElement,
    pub b: AlgebraElement,
}

/// Fixed pairs that embed into `shape`, in a fixed order, before any filtering.
pub fn fixed_pairs(shape: &AlgebraShape) -> Vec<LabeledPair> {
    let mut out = Vec::new();
    let (pa, pb) = paper_pair();
    let (e, v) = transpose_witnesses();
    if let (Some(a), Some(b)) = (embed_2x2(shape, &pa), embed_2x2(shape, &pb)) {
        out.push(LabeledPair {
            label: "paper_m2_pair",
            a,
            b,
        });
    }
    if let (Some(a), Some(b)) = (embed_2x2(shape, &e), embed_2x2(shape, &v)) {
        out.push(LabeledPair {
            label: "transpose_witness",
            a: a.clone(),
            b: b.clone(),
        });
        out.push(LabeledPair {
            label: "transpose_witness_adjoint",
            a: a.adjoint(),
            b: b.adjoint(),
        });
    }
    let one = AlgebraElement::unit(shape);
    out.push(LabeledPair {
        label: "saturated_unit_half",
        a: one.clone(),
        b: one.scale_real(0.5),
    });
    if let Some(b) = embed_2x2(shape, &pa) {
        out.push(LabeledPair {
            label: "saturated_unit_paper",
            a: one.clone(),
            b,
        });
    }
    out
}

/// The fixed pairs that are `kind`-compatible at `tol`.
pub fn seeded_prefix(
    shape: &AlgebraShape,
    kind: CompatKind,
    tol: &ToleranceConfig,
) -> Result<Vec<LabeledPair>> {
    let mut out = Vec::new();
    for pair in fixed_pairs(shape) {
        if compat_defect(&pair.a, &pair.b, kind, tol)?.verdict {
            out.push(pair);
        }
    }
    Ok(out)
}
