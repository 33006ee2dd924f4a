//! Seeded generators of compatible pairs.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::algebra::{AlgebraElement, AlgebraShape};
use crate::error::{Error, Result};
use crate::linalg::{svd, ComplexMatrix, ToleranceConfig, C64};
use crate::random::{
    haar_unitary, random_contraction, random_positive_contraction, seeded, unit_phase, SeededRng,
};
use crate::relations::{compat_defect, CompatKind};
use crate::witnesses::paper_pair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStrategy {
    /// `ab* = b*a = 0`.
    Orthogonal,
    /// Commuting normal pairs, unitarily conjugated diagonals.
    CommutingDiagonal,
    /// The noncommuting positive pair in a 2×2 corner, plus a compatible diagonal remainder.
    PaperM2Conjugates,
    /// Independent choice of construction per block.
    DirectSumMix,
    /// A random contraction with a partner built on its singular frame.
    RandomContraction,
}

impl PairStrategy {
    pub const ALL: [PairStrategy; 5] = [
        PairStrategy::Orthogonal,
        PairStrategy::CommutingDiagonal,
        PairStrategy::PaperM2Conjugates,
        PairStrategy::DirectSumMix,
        PairStrategy::RandomContraction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PairStrategy::Orthogonal => "orthogonal",
            PairStrategy::CommutingDiagonal => "commuting_diagonal",
            PairStrategy::PaperM2Conjugates => "paper_m2_conjugates",
            PairStrategy::DirectSumMix => "direct_sum_mix",
            PairStrategy::RandomContraction => "random_contraction",
        }
    }

    pub fn supports(self, shape: &AlgebraShape) -> bool {
        match self {
            PairStrategy::PaperM2Conjugates => shape.largest_block() >= 2,
            _ => true,
        }
    }
}

impl fmt::Display for PairStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PairStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PairStrategy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown strategy '{s}'")))
    }
}

/// Deterministic stream of compatible pairs.
#[derive(Debug, Clone)]
pub struct PairGenerator {
    strategy: PairStrategy,
    seed: u64,
    rng: SeededRng,
    tol: ToleranceConfig,
    max_retries: usize,
}

pub const DEFAULT_MAX_RETRIES: usize = 100;

#[derive(Debug, Clone, Copy)]
enum Core {
    Orthogonal,
    Diagonal,
    Paper,
    Saturated,
    SingularFrame,
}

impl PairGenerator {
    pub fn new(strategy: PairStrategy, seed: u64) -> Self {
        Self {
            strategy,
            seed,
            rng: seeded(seed),
            tol: ToleranceConfig::default(),
            max_retries: DEFAULT_MAX_RETRIES,
        }
    }

    pub fn with_tolerance(mut self, tol: ToleranceConfig) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_retries(mut self, max_retries: usize) -> Self {
        self.max_retries = max_retries;
        self
    }

    pub fn strategy(&self) -> PairStrategy {
        self.strategy
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn tolerance(&self) -> &ToleranceConfig {
        &self.tol
    }

    /// Next pair with `compat_defect(a, b, kind) ≤ tol.relation`, resampling on failure.
    pub fn generate_compat_pair(
        &mut self,
        shape: &AlgebraShape,
        kind: CompatKind,
    ) -> Result<(AlgebraElement, AlgebraElement)> {
        if !self.strategy.supports(shape) {
            return Err(Error::UnsupportedShape {
                strategy: self.strategy.name().to_string(),
                shape: shape.to_string(),
            });
        }
        for _ in 0..self.max_retries.max(1) {
            let (a, b) = self.candidate(shape, kind)?;
            if compat_defect(&a, &b, kind, &self.tol)?.verdict {
                return Ok((a, b));
            }
        }
        Err(Error::GeneratorExhausted {
            strategy: self.strategy.name().to_string(),
            attempts: self.max_retries.max(1),
        })
    }

    fn core_for(&mut self, n: usize) -> Core {
        match self.strategy {
            PairStrategy::Orthogonal => Core::Orthogonal,
            PairStrategy::CommutingDiagonal => Core::Diagonal,
            PairStrategy::PaperM2Conjugates if n >= 2 => Core::Paper,
            PairStrategy::PaperM2Conjugates => Core::Diagonal,
            PairStrategy::RandomContraction => Core::SingularFrame,
            PairStrategy::DirectSumMix => {
                let options: &[Core] = if n >= 2 {
                    &[
                        Core::Orthogonal,
                        Core::Diagonal,
                        Core::Paper,
                        Core::Saturated,
                        Core::SingularFrame,
                    ]
                } else {
                    &[
                        Core::Orthogonal,
                        Core::Diagonal,
                        Core::Saturated,
                        Core::SingularFrame,
                    ]
                };
                options[self.rng.random_range(0..options.len())]
            }
        }
    }

    fn candidate(
        &mut self,
        shape: &AlgebraShape,
        kind: CompatKind,
    ) -> Result<(AlgebraElement, AlgebraElement)> {
        let mut blocks_a = Vec::with_capacity(shape.num_blocks());
        let mut blocks_b = Vec::with_capacity(shape.num_blocks());
        for &n in shape.block_dims() {
            let core = self.core_for(n);
            let (a, b) = block_pair(core, n, kind, &mut self.rng)?;
            blocks_a.push(a);
            blocks_b.push(b);
        }
        Ok((
            AlgebraElement::from_blocks(shape.clone(), blocks_a)?,
            AlgebraElement::from_blocks(shape.clone(), blocks_b)?,
        ))
    }
}

/// Free-function form of [`PairGenerator::generate_compat_pair`].
pub fn generate_compat_pair(
    generator: &mut PairGenerator,
    shape: &AlgebraShape,
    kind: CompatKind,
) -> Result<(AlgebraElement, AlgebraElement)> {
    generator.generate_compat_pair(shape, kind)
}

fn direct_sum(x: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = (x.dim(), y.dim());
    ComplexMatrix::from_fn(p + q, |i, j| {
        if i < p && j < p {
            x.get(i, j)
        } else if i >= p && j >= p {
            y.get(i - p, j - p)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// A per-coordinate pair `(f, g)` with `min(|f|, |g|) = 0` or `max(|f|, |g|) = 1`.
fn compatible_scalars(rng: &mut SeededRng, complex: bool) -> (C64, C64) {
    let phase = |rng: &mut SeededRng| {
        if complex {
            unit_phase(rng)
        } else {
            C64::new(1.0, 0.0)
        }
    };
    let r: f64 = rng.random_range(0.0..=1.0);
    match rng.random_range(0..4) {
        0 => (phase(rng), phase(rng) * r),
        1 => (phase(rng) * r, phase(rng)),
        2 => {
            if rng.random_bool(0.5) {
                (phase(rng) * r, C64::new(0.0, 0.0))
            } else {
                (C64::new(0.0, 0.0), phase(rng) * r)
            }
        }
        _ => (C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
    }
}

/// Puts the core pair `(p, q)` into frames suited to `kind`:
/// `a = w₁ p w₂` and `b = w₃ q w₄`, sharing the right frame for domain compatibility
/// and the left frame for range compatibility.
fn framed(
    p: &ComplexMatrix,
    q: &ComplexMatrix,
    w1: ComplexMatrix,
    w2: ComplexMatrix,
    kind: CompatKind,
    rng: &mut SeededRng,
) -> (ComplexMatrix, ComplexMatrix) {
    let n = p.dim();
    let w3 = match kind {
        CompatKind::Domain => haar_unitary(n, rng),
        _ => w1.clone(),
    };
    let w4 = match kind {
        CompatKind::Range => haar_unitary(n, rng),
        _ => w2.clone(),
    };
    (&w1 * p * &w2, w3 * q * w4)
}

fn block_pair(
    core: Core,
    n: usize,
    kind: CompatKind,
    rng: &mut SeededRng,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    Ok(match core {
        Core::Orthogonal => {
            let k = rng.random_range(0..=n);
            let x = if k > 0 {
                random_contraction(k, rng)
            } else {
                ComplexMatrix::zeros(0)
            };
            let y = if k < n {
                random_contraction(n - k, rng)
            } else {
                ComplexMatrix::zeros(0)
            };
            let p = direct_sum(&x, &ComplexMatrix::zeros(n - k));
            let q = direct_sum(&ComplexMatrix::zeros(k), &y);
            let (w1, w2) = (haar_unitary(n, rng), haar_unitary(n, rng));
            framed(&p, &q, w1, w2, CompatKind::Full, rng)
        }
        Core::Diagonal => {
            let (f, g): (Vec<C64>, Vec<C64>) =
                (0..n).map(|_| compatible_scalars(rng, true)).unzip();
            let w = haar_unitary(n, rng);
            let (p, q) = (ComplexMatrix::from_diagonal(&f), ComplexMatrix::from_diagonal(&g));
            (&w * p * w.adjoint(), &w * q * w.adjoint())
        }
        Core::Paper => {
            let (pa, pb) = paper_pair();
            let (f, g): (Vec<C64>, Vec<C64>) =
                (2..n).map(|_| compatible_scalars(rng, false)).unzip();
            let p = direct_sum(&pa, &ComplexMatrix::from_diagonal(&f));
            let q = direct_sum(&pb, &ComplexMatrix::from_diagonal(&g));
            let w = haar_unitary(n, rng);
            if rng.random_bool(0.5) {
                (w.adjoint() * p * &w, w.adjoint() * q * &w)
            } else {
                let w2 = haar_unitary(n, rng);
                framed(&p, &q, w, w2, kind, rng)
            }
        }
        Core::Saturated => {
            let p = ComplexMatrix::identity(n);
            let q = random_positive_contraction(n, rng);
            let (w1, w2) = (haar_unitary(n, rng), haar_unitary(n, rng));
            let (a, b) = framed(&p, &q, w1, w2, kind, rng);
            if rng.random_bool(0.5) {
                (a, b)
            } else {
                (b, a)
            }
        }
        Core::SingularFrame => {
            let a = random_contraction(n, rng);
            let s = svd(&a)?;
            let g: Vec<C64> = s
                .singular_values
                .iter()
                .map(|&sigma| {
                    let ph = unit_phase(rng);
                    if sigma >= 1.0 - 1e-12 {
                        ph * rng.random_range(0.0..=1.0)
                    } else if rng.random_bool(0.5) {
                        ph
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
                .collect();
            let d = ComplexMatrix::from_diagonal(&g);
            let b = match kind {
                CompatKind::Full => &s.left * d * s.right.adjoint(),
                CompatKind::Domain => haar_unitary(n, rng) * d * s.right.adjoint(),
                CompatKind::Range => &s.left * d * haar_unitary(n, rng),
            };
            (a, b)
        }
    })
}
