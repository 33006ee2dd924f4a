//! Seeded random matrices. Every generator takes the RNG explicitly so that a fixed seed
//! reproduces the same sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{AlgebraElement, AlgebraShape};
use crate::linalg::{ComplexMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal(rng: &mut SeededRng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn unit_phase(rng: &mut SeededRng) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre(n: usize, rng: &mut SeededRng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |_, _| complex_normal(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of `diag(R)` removed.
pub fn haar_unitary(n: usize, rng: &mut SeededRng) -> ComplexMatrix {
    let qr = ginibre(n, rng).into_dmatrix().qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_fn(n, |i, j| q[(i, j)])
}

/// `W diag(values) W*` for a Haar unitary `W`.
pub fn unitary_conjugate_diagonal(values: &[C64], rng: &mut SeededRng) -> ComplexMatrix {
    let w = haar_unitary(values.len(), rng);
    &w * ComplexMatrix::from_diagonal(values) * w.adjoint()
}

/// Contraction with Gaussian singular frame, scaled so that its norm is `s ∈ [0.2, 1]`;
/// a quarter of the draws have norm exactly one.
pub fn random_contraction(n: usize, rng: &mut SeededRng) -> ComplexMatrix {
    let g = ginibre(n, rng);
    let norm = g.op_norm().unwrap_or(1.0).max(f64::MIN_POSITIVE);
    let s = if rng.random_bool(0.25) {
        1.0
    } else {
        rng.random_range(0.2..1.0)
    };
    g.scale_real(s / norm)
}

/// `0 ≤ x ≤ 1` with uniformly drawn spectrum.
pub fn random_positive_contraction(n: usize, rng: &mut SeededRng) -> ComplexMatrix {
    let values: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.random_range(0.0..=1.0), 0.0))
        .collect();
    unitary_conjugate_diagonal(&values, rng)
}

/// Hermitian contraction with spectrum drawn from `[-1, 1]`.
pub fn random_hermitian_contraction(n: usize, rng: &mut SeededRng) -> ComplexMatrix {
    let values: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.random_range(-1.0..=1.0), 0.0))
        .collect();
    unitary_conjugate_diagonal(&values, rng)
}

/// `W₁ (1_rank ⊕ 0) W₂` for independent Haar unitaries.
pub fn random_partial_isometry(n: usize, rank: usize, rng: &mut SeededRng) -> ComplexMatrix {
    let d: Vec<f64> = (0..n).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    let w1 = haar_unitary(n, rng);
    let w2 = haar_unitary(n, rng);
    w1 * ComplexMatrix::from_real_diagonal(&d) * w2
}

/// Element built block by block from a per-dimension sampler.
pub fn random_element(
    shape: &AlgebraShape,
    rng: &mut SeededRng,
    mut sample: impl FnMut(usize, &mut SeededRng) -> ComplexMatrix,
) -> AlgebraElement {
    let blocks = shape.block_dims().iter().map(|&n| sample(n, rng)).collect();
    AlgebraElement::from_blocks(shape.clone(), blocks).expect("sampler respects block sizes")
}

pub fn haar_unitary_element(shape: &AlgebraShape, rng: &mut SeededRng) -> AlgebraElement {
    random_element(shape, rng, haar_unitary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_unitary_is_unitary_and_reproducible() {
        let mut rng = seeded(11);
        let u = haar_unitary(4, &mut rng);
        assert!((u.adjoint() * &u).approx_eq(&ComplexMatrix::identity(4), 1e-12));
        let mut again = seeded(11);
        assert_eq!(haar_unitary(4, &mut again), u);
    }

    #[test]
    fn samplers_respect_their_bounds() {
        let mut rng = seeded(3);
        for n in 1..=5 {
            let c = random_contraction(n, &mut rng);
            assert!(c.op_norm().unwrap() <= 1.0 + 1e-12);
            let p = random_positive_contraction(n, &mut rng);
            let spec = crate::linalg::eigh_unchecked(&p).unwrap();
            assert!(spec.min_eigenvalue() >= -1e-12 && spec.max_eigenvalue() <= 1.0 + 1e-12);
            let v = random_partial_isometry(n, n / 2, &mut rng);
            assert!((&v * v.adjoint() * &v).approx_eq(&v, 1e-12));
        }
    }
}
