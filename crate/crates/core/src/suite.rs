//! Batch verification over seeded random inputs: the relation characterizations, the
//! commutative cross-check, and preservation by the structural maps.

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::algebra::{AlgebraElement, AlgebraShape};
use crate::error::{Error, Result};
use crate::linalg::{ToleranceConfig, C64};
use crate::preservers::{
    build_jordan_hom, build_sandwich, build_scalar, build_star_anti_hom, build_star_hom,
    build_transpose, classify_triple_hom, fuzz_counterexample, is_triple_hom,
    preserves_compat_sampled, range_version_adapter, symmetric_factorization, LinearMap,
    PairGenerator, PairStrategy, Placement,
};
use crate::random::{
    haar_unitary_element, random_contraction, random_element, random_partial_isometry,
    random_positive_contraction, seeded, unit_phase, SeededRng,
};
use crate::relations::{
    check_orth_characterization, check_p00_equivalences, check_tripotent_characterization,
    commutative_compat_check, compat_defect, element_polar, is_orthogonal, is_partial_isometry,
    CompatKind,
};
use crate::report::{ConsistencyReport, ClauseStatus};
use crate::witnesses::seeded_prefix;

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tol: ToleranceConfig,
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::InvalidArgument(
                "dims must be a nonempty list of positive integers".into(),
            ));
        }
        self.tol.validate()
    }

    /// `M_d` for each listed `d`, plus their direct sum when several are given.
    pub fn shapes(&self) -> Result<Vec<AlgebraShape>> {
        let mut shapes = self
            .dims
            .iter()
            .map(|&d| AlgebraShape::full(d))
            .collect::<Result<Vec<_>>>()?;
        if self.dims.len() > 1 {
            shapes.push(AlgebraShape::new(self.dims.clone())?);
        }
        Ok(shapes)
    }
}

/// One row of the summary table.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub shape: String,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub indeterminate: usize,
    pub worst_defect: f64,
}

impl SuiteResult {
    fn new(name: &str, shape: &AlgebraShape) -> Self {
        Self {
            name: name.to_string(),
            shape: shape.to_string(),
            trials: 0,
            passed: 0,
            failed: 0,
            indeterminate: 0,
            worst_defect: 0.0,
        }
    }

    fn record(&mut self, ok: bool, defect: f64) {
        self.trials += 1;
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        if defect.is_finite() {
            self.worst_defect = self.worst_defect.max(defect);
        }
    }

    /// Records a consistency report; the reported defect is the largest side defect of any
    /// clause whose sides disagree.
    fn record_consistency(&mut self, report: &ConsistencyReport) {
        let spread = report
            .clauses
            .iter()
            .filter(|c| c.status != ClauseStatus::Consistent)
            .flat_map(|c| c.sides.iter().map(|s| s.defect))
            .fold(0.0, f64::max);
        if report.indeterminate && report.consistent {
            self.trials += 1;
            self.indeterminate += 1;
            self.worst_defect = self.worst_defect.max(spread);
        } else {
            self.record(report.consistent, spread);
        }
    }

    /// No failures and fewer than 1% indeterminate trials.
    pub fn ok(&self) -> bool {
        self.failed == 0 && self.indeterminate * 100 < self.trials.max(1)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub seed: u64,
    pub trials: usize,
    pub tolerance_used: f64,
    pub results: Vec<SuiteResult>,
}

impl SuiteSummary {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(SuiteResult::ok)
    }
}

impl fmt::Display for SuiteSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<22} {:<12} {:>7} {:>7} {:>7} {:>7} {:>12}  status",
            "suite", "shape", "trials", "passed", "failed", "indet", "worst"
        )?;
        for r in &self.results {
            writeln!(
                f,
                "{:<22} {:<12} {:>7} {:>7} {:>7} {:>7} {:>12.3e}  {}",
                r.name,
                r.shape,
                r.trials,
                r.passed,
                r.failed,
                r.indeterminate,
                r.worst_defect,
                if r.ok() { "ok" } else { "FAIL" }
            )?;
        }
        write!(
            f,
            "{}",
            if self.all_passed() {
                "all suites passed"
            } else {
                "some suites failed"
            }
        )
    }
}

/// `(|a|, |b|)` for a domain-compatible pair, or two independent positive contractions.
pub fn random_positive_pair(
    shape: &AlgebraShape,
    generator: &mut PairGenerator,
    rng: &mut SeededRng,
    compatible: bool,
) -> Result<(AlgebraElement, AlgebraElement)> {
    if compatible {
        let (a, b) = generator.generate_compat_pair(shape, CompatKind::Domain)?;
        Ok((a.abs()?, b.abs()?))
    } else {
        Ok((
            random_element(shape, rng, random_positive_contraction),
            random_element(shape, rng, random_positive_contraction),
        ))
    }
}

/// Random contraction (40%), exact partial isometry of random rank (30%), or such a
/// partial isometry scaled by 0.9 (30%).
pub fn random_tripotent_candidate(shape: &AlgebraShape, rng: &mut SeededRng) -> AlgebraElement {
    let draw: f64 = rng.random();
    if draw < 0.4 {
        random_element(shape, rng, random_contraction)
    } else {
        let scale = if draw < 0.7 { 1.0 } else { 0.9 };
        random_element(shape, rng, |n, rng| {
            let rank = rng.random_range(0..=n);
            random_partial_isometry(n, rank, rng).scale_real(scale)
        })
    }
}

/// Pairs for the orthogonality characterization: orthogonal constructions, conjugates of
/// the noncommuting 2×2 pair (diagonal pairs when no block is large enough) and independent
/// random contractions, in rotation.
pub fn orth_characterization_pair(
    shape: &AlgebraShape,
    k: usize,
    orthogonal: &mut PairGenerator,
    paper: &mut PairGenerator,
    rng: &mut SeededRng,
) -> Result<(AlgebraElement, AlgebraElement)> {
    match k % 3 {
        0 => orthogonal.generate_compat_pair(shape, CompatKind::Full),
        1 => paper.generate_compat_pair(shape, CompatKind::Full),
        _ => Ok((
            random_element(shape, rng, random_contraction),
            random_element(shape, rng, random_contraction),
        )),
    }
}

fn paper_or_diagonal(shape: &AlgebraShape, seed: u64) -> PairGenerator {
    if PairStrategy::PaperM2Conjugates.supports(shape) {
        PairGenerator::new(PairStrategy::PaperM2Conjugates, seed)
    } else {
        PairGenerator::new(PairStrategy::CommutingDiagonal, seed)
    }
}

fn sub_seed(seed: u64, shape_index: usize, suite: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ ((shape_index as u64) << 32)
        ^ suite.wrapping_mul(0xBF58_476D_1CE4_E5B9)
}

fn linalg_suite(shape: &AlgebraShape, cfg: &SuiteConfig, seed: u64) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("linalg", shape);
    let mut rng = seeded(seed);
    for _ in 0..cfg.trials {
        let a = random_element(shape, &mut rng, random_contraction);
        let abs = a.abs()?;
        let square = abs.mul(&abs)?.distance(&a.adjoint().mul(&a)?)?;
        let (u, _) = element_polar(&a, cfg.tol.rank)?;
        let recon = u.mul(&abs)?.distance(&a)?;
        let pi = is_partial_isometry(&u, &cfg.tol)?.defect;
        let neg = (-abs.hermitian_spectrum()?[0]).max(0.0);
        let defect = square.max(recon).max(pi).max(neg);
        out.record(defect <= cfg.tol.recon, defect);
    }
    Ok(out)
}

fn tripotent_suite(shape: &AlgebraShape, cfg: &SuiteConfig, seed: u64) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("tripotent_char", shape);
    let mut rng = seeded(seed);
    for _ in 0..cfg.trials {
        let a = random_tripotent_candidate(shape, &mut rng);
        out.record_consistency(&check_tripotent_characterization(&a, &cfg.tol)?);
    }
    Ok(out)
}

fn orth_suite(shape: &AlgebraShape, cfg: &SuiteConfig, seed: u64) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("orth_char", shape);
    let mut rng = seeded(seed);
    let mut orth = PairGenerator::new(PairStrategy::Orthogonal, seed ^ 1).with_tolerance(cfg.tol);
    let mut paper = paper_or_diagonal(shape, seed ^ 2).with_tolerance(cfg.tol);
    for k in 0..cfg.trials {
        let (a, b) = orth_characterization_pair(shape, k, &mut orth, &mut paper, &mut rng)?;
        out.record_consistency(&check_orth_characterization(&a, &b, &cfg.tol)?);
    }
    Ok(out)
}

fn p00_suite(shape: &AlgebraShape, cfg: &SuiteConfig, seed: u64) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("jordan_equivalences", shape);
    let mut rng = seeded(seed);
    let mut generator =
        PairGenerator::new(PairStrategy::DirectSumMix, seed ^ 1).with_tolerance(cfg.tol);
    for k in 0..cfg.trials {
        let (a, b) = random_positive_pair(shape, &mut generator, &mut rng, k % 2 == 0)?;
        out.record_consistency(&check_p00_equivalences(&a, &b, &cfg.tol)?);
    }
    Ok(out)
}

/// Functions on `Ω` mixing saturated, vanishing and free coordinates.
pub fn random_function_pair(size: usize, rng: &mut SeededRng) -> (Vec<C64>, Vec<C64>) {
    let coord = |rng: &mut SeededRng| -> C64 {
        match rng.random_range(0..4) {
            0 => unit_phase(rng),
            1 => C64::new(0.0, 0.0),
            _ => unit_phase(rng) * rng.random_range(0.0..=1.0),
        }
    };
    let f = (0..size).map(|_| coord(rng)).collect();
    let g = (0..size).map(|_| coord(rng)).collect();
    (f, g)
}

fn commutative_suite(shape: &AlgebraShape, cfg: &SuiteConfig, seed: u64) -> Result<SuiteResult> {
    let size = shape.total_dim().clamp(1, 8);
    let mut out = SuiteResult::new("commutative_cross", &AlgebraShape::commutative(size)?);
    let mut rng = seeded(seed);
    for _ in 0..cfg.trials {
        let (f, g) = random_function_pair(size, &mut rng);
        let report = commutative_compat_check(&f, &g, &cfg.tol)?;
        let cross = report.cross_check.as_ref().expect("cross-check is always attached");
        // the pointwise rule has no comparable defect scale; only disagreements count
        out.record(cross.agrees, if cross.agrees { 0.0 } else { cross.defect });
    }
    Ok(out)
}

fn adjoint_duality_suite(shape: &AlgebraShape, cfg: &SuiteConfig, seed: u64) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("adjoint_duality", shape);
    let mut rng = seeded(seed);
    let mut generator =
        PairGenerator::new(PairStrategy::DirectSumMix, seed ^ 1).with_tolerance(cfg.tol);
    for k in 0..cfg.trials {
        let (a, b) = if k % 2 == 0 {
            generator.generate_compat_pair(shape, CompatKind::Domain)?
        } else {
            (
                random_element(shape, &mut rng, random_contraction),
                random_element(shape, &mut rng, random_contraction),
            )
        };
        let d = compat_defect(&a, &b, CompatKind::Domain, &cfg.tol)?;
        let r = compat_defect(&a.adjoint(), &b.adjoint(), CompatKind::Range, &cfg.tol)?;
        let gap = (d.defect - r.defect).abs();
        out.record(d.verdict == r.verdict && gap <= cfg.tol.recon, gap);
    }
    Ok(out)
}

fn orth_implies_compat_suite(
    shape: &AlgebraShape,
    cfg: &SuiteConfig,
    seed: u64,
) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("orth_implies_compat", shape);
    let mut generator =
        PairGenerator::new(PairStrategy::Orthogonal, seed).with_tolerance(cfg.tol);
    for _ in 0..cfg.trials {
        let (a, b) = generator.generate_compat_pair(shape, CompatKind::Full)?;
        let orth = is_orthogonal(&a, &b, &cfg.tol)?;
        let compat = compat_defect(&a, &b, CompatKind::Full, &cfg.tol)?;
        out.record(orth.verdict && compat.verdict, orth.defect.max(compat.defect));
    }
    Ok(out)
}

/// Which one-sided compatibility a structural map carries over, and to which side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    /// Domain to domain.
    Hom,
    /// Domain to range.
    AntiHom,
    /// Only full compatibility is carried over.
    Mixed,
}

/// Structural triple homomorphisms on `shape`.
pub fn structural_maps(
    shape: &AlgebraShape,
    rng: &mut SeededRng,
    tol: &ToleranceConfig,
) -> Result<Vec<(String, LinearMap, MapKind)>> {
    let own: Vec<Vec<usize>> = (0..shape.num_blocks()).map(|k| vec![k]).collect();
    let w = haar_unitary_element(shape, rng);
    let mut maps = vec![
        (
            "star_hom".to_string(),
            build_star_hom(shape, shape, &own, Some(&w), tol)?,
            MapKind::Hom,
        ),
        (
            "star_anti_hom".to_string(),
            build_star_anti_hom(shape, shape, &own, Some(&w), tol)?,
            MapKind::AntiHom,
        ),
    ];
    let u = haar_unitary_element(shape, rng);
    let v = haar_unitary_element(shape, rng);
    maps.push(("sandwich".to_string(), build_sandwich(&u, &v, tol)?, MapKind::Hom));
    if shape.num_blocks() > 1 {
        let placements: Vec<Vec<Placement>> = (0..shape.num_blocks())
            .map(|k| {
                vec![Placement {
                    block: k,
                    transpose: k % 2 == 1,
                }]
            })
            .collect();
        maps.push((
            "mixed_jordan".to_string(),
            build_jordan_hom(shape, shape, &placements, Some(&w), tol)?,
            MapKind::Mixed,
        ));
    }
    Ok(maps)
}

fn preserver_suites(
    shape: &AlgebraShape,
    cfg: &SuiteConfig,
    seed: u64,
) -> Result<Vec<SuiteResult>> {
    let mut rng = seeded(seed);
    let mut structure = SuiteResult::new("triple_hom_structure", shape);
    let mut preservation = SuiteResult::new("preservation", shape);
    for (i, (_, map, kind)) in structural_maps(shape, &mut rng, &cfg.tol)?
        .into_iter()
        .enumerate()
    {
        let th = is_triple_hom(&map, &cfg.tol)?;
        let e = map.apply(&AlgebraElement::unit(shape))?;
        let pi = is_partial_isometry(&e, &cfg.tol)?;
        let classified = classify_triple_hom(&map, &cfg.tol).is_ok();
        structure.record(
            th.defect <= 1e-9 && pi.defect <= 1e-9 && classified,
            th.defect.max(pi.defect),
        );
        if i == 0 {
            let f = symmetric_factorization(&map, cfg.trials.min(50), seed)?;
            structure.record(
                f.jordan_defect <= 1e-8 && f.factor_defect <= 1e-10,
                f.jordan_defect.max(f.factor_defect),
            );
            let adapted = range_version_adapter(&map);
            let gap = (adapted.action() - map.action()).camax();
            structure.record(gap <= cfg.tol.recon, gap);
        }

        let mut kinds = vec![(CompatKind::Full, CompatKind::Full)];
        match kind {
            MapKind::Hom => kinds.push((CompatKind::Domain, CompatKind::Domain)),
            MapKind::AntiHom => kinds.push((CompatKind::Domain, CompatKind::Range)),
            MapKind::Mixed => {}
        }
        for (j, (input, output)) in kinds.into_iter().enumerate() {
            let mut generator = PairGenerator::new(
                PairStrategy::DirectSumMix,
                sub_seed(seed, i, j as u64),
            )
            .with_tolerance(cfg.tol);
            let r = preserves_compat_sampled(&map, input, output, &mut generator, cfg.trials, &cfg.tol)?;
            preservation.trials += r.pairs_checked;
            preservation.failed += r.violations;
            preservation.passed += r.pairs_checked - r.violations;
            preservation.worst_defect = preservation.worst_defect.max(r.max_output_defect);
        }
    }
    Ok(vec![structure, preservation])
}

fn fuzz_suite(shape: &AlgebraShape, cfg: &SuiteConfig, seed: u64) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("fuzz", shape);
    let mut rng = seeded(seed);
    let half = build_scalar(shape, C64::new(0.5, 0.0));
    let mut refuted = vec![(half, CompatKind::Full)];
    if shape.largest_block() >= 2 {
        refuted.push((build_transpose(shape), CompatKind::Domain));
    }
    for (map, kind) in refuted {
        let prefix = seeded_prefix(shape, kind, &cfg.tol)?.len();
        let w = fuzz_counterexample(&map, kind, prefix.max(1), seed, &cfg.tol)?;
        match w {
            Some(w) => out.record(w.index < prefix, w.output_defect),
            None => out.record(false, 0.0),
        }
    }
    let own: Vec<Vec<usize>> = (0..shape.num_blocks()).map(|k| vec![k]).collect();
    let w = haar_unitary_element(shape, &mut rng);
    let hom = build_star_hom(shape, shape, &own, Some(&w), &cfg.tol)?;
    let found = fuzz_counterexample(&hom, CompatKind::Domain, cfg.trials, seed, &cfg.tol)?;
    out.record(found.is_none(), found.map_or(0.0, |w| w.output_defect));
    Ok(out)
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteSummary> {
    cfg.validate()?;
    let mut results = Vec::new();
    for (i, shape) in cfg.shapes()?.iter().enumerate() {
        let s = |k: u64| sub_seed(cfg.seed, i, k);
        results.push(linalg_suite(shape, cfg, s(1))?);
        results.push(tripotent_suite(shape, cfg, s(2))?);
        results.push(orth_suite(shape, cfg, s(3))?);
        results.push(p00_suite(shape, cfg, s(4))?);
        results.push(commutative_suite(shape, cfg, s(5))?);
        results.push(adjoint_duality_suite(shape, cfg, s(6))?);
        results.push(orth_implies_compat_suite(shape, cfg, s(7))?);
        results.extend(preserver_suites(shape, cfg, s(8))?);
        results.push(fuzz_suite(shape, cfg, s(9))?);
    }
    Ok(SuiteSummary {
        seed: cfg.seed,
        trials: cfg.trials,
        tolerance_used: cfg.tol.relation,
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(dims: Vec<usize>, trials: usize) -> SuiteConfig {
        SuiteConfig {
            dims,
            trials,
            seed: 7,
            tol: ToleranceConfig::default(),
        }
    }

    #[test]
    fn invalid_configurations() {
        assert!(run_suite(&config(vec![2], 0)).is_err());
        assert!(run_suite(&config(vec![], 5)).is_err());
        assert!(run_suite(&config(vec![0], 5)).is_err());
    }

    #[test]
    fn small_run_passes() {
        let summary = run_suite(&config(vec![1, 2], 12)).unwrap();
        assert!(summary.all_passed(), "{summary}");
        // M_1, M_2 and their direct sum
        let shapes: std::collections::BTreeSet<_> =
            summary.results.iter().map(|r| r.shape.clone()).collect();
        assert!(shapes.contains("(1,2)"));
    }
}
