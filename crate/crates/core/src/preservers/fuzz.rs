//! Search for compatible pairs whose images are not compatible.

use rayon::prelude::*;

use super::audit::{evaluate_pair, Witness};
use super::generator::{PairGenerator, PairStrategy};
use super::map::LinearMap;
use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::linalg::ToleranceConfig;
use crate::relations::CompatKind;
use crate::witnesses::seeded_prefix;

/// Candidates generated before each parallel evaluation round.
const CHUNK: usize = 32;

struct Candidate {
    index: usize,
    source: String,
    a: AlgebraElement,
    b: AlgebraElement,
}

/// Deterministic candidate order: the fixed witness pairs that are `kind`-compatible,
/// then the supported strategies in round-robin, each with its own seeded generator.
struct CandidateStream {
    prefix: std::vec::IntoIter<(String, AlgebraElement, AlgebraElement)>,
    generators: Vec<PairGenerator>,
    next_generator: usize,
    index: usize,
}

impl CandidateStream {
    fn new(map: &LinearMap, kind: CompatKind, seed: u64, tol: &ToleranceConfig) -> Result<Self> {
        let shape = map.domain();
        let prefix: Vec<_> = seeded_prefix(shape, kind, tol)?
            .into_iter()
            .map(|p| (p.label.to_string(), p.a, p.b))
            .collect();
        let generators = PairStrategy::ALL
            .iter()
            .enumerate()
            .filter(|(_, s)| s.supports(shape))
            .map(|(i, &s)| {
                let derived = seed ^ (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                PairGenerator::new(s, derived).with_tolerance(*tol)
            })
            .collect();
        Ok(Self {
            prefix: prefix.into_iter(),
            generators,
            next_generator: 0,
            index: 0,
        })
    }

    fn next(&mut self, map: &LinearMap, kind: CompatKind) -> Result<Candidate> {
        let index = self.index;
        self.index += 1;
        if let Some((source, a, b)) = self.prefix.next() {
            return Ok(Candidate {
                index,
                source,
                a,
                b,
            });
        }
        let slot = self.next_generator;
        self.next_generator = (slot + 1) % self.generators.len();
        let g = &mut self.generators[slot];
        let (a, b) = g.generate_compat_pair(map.domain(), kind)?;
        Ok(Candidate {
            index,
            source: g.strategy().name().to_string(),
            a,
            b,
        })
    }
}

/// First candidate, in stream order, whose image pair fails `kind`-compatibility or leaves
/// the unit ball. Candidates are evaluated in parallel chunks; the result does not depend
/// on scheduling.
pub fn fuzz_counterexample(
    map: &LinearMap,
    kind: CompatKind,
    budget: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<Option<Witness>> {
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    let mut stream = CandidateStream::new(map, kind, seed, tol)?;
    let mut remaining = budget;
    while remaining > 0 {
        let take = remaining.min(CHUNK);
        let chunk = (0..take)
            .map(|_| stream.next(map, kind))
            .collect::<Result<Vec<_>>>()?;
        remaining -= take;
        let evaluated = chunk
            .into_par_iter()
            .map(|c| evaluate_pair(map, c.a, c.b, kind, kind, tol, c.index, c.source))
            .collect::<Result<Vec<_>>>()?;
        if let Some(w) = evaluated
            .into_iter()
            .find(|w| w.output_defect > tol.relation)
        {
            return Ok(Some(w));
        }
    }
    Ok(None)
}
