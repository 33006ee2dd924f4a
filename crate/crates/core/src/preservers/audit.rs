//! Sampled and exhaustive checks on linear maps.

use std::collections::BTreeSet;

use serde::Serialize;

use super::generator::PairGenerator;
use super::map::LinearMap;
use crate::algebra::{triple, AlgebraElement};
use crate::error::{Error, Result};
use crate::linalg::{ToleranceConfig, C64};
use crate::random::{haar_unitary_element, random_contraction, random_element, random_hermitian_contraction, seeded};
use crate::relations::{compat_defect, is_partial_isometry, CompatKind};
use crate::report::RelationReport;

/// Sampled lower bound for `‖T‖ − 1`. The unit comes first, then alternating Haar
/// unitaries and norm-one random elements. A false verdict is conclusive.
pub fn is_contractive_sampled(
    map: &LinearMap,
    n_samples: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<RelationReport> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    let shape = map.domain();
    let mut rng = seeded(seed);
    let mut worst: Option<(f64, AlgebraElement, AlgebraElement)> = None;
    for k in 0..n_samples {
        let x = match k {
            0 => AlgebraElement::unit(shape),
            k if k % 2 == 1 => haar_unitary_element(shape, &mut rng),
            _ => {
                let x = random_element(shape, &mut rng, random_contraction);
                let norm = x.op_norm()?;
                if norm > 0.0 {
                    x.scale_real(1.0 / norm)
                } else {
                    AlgebraElement::unit(shape)
                }
            }
        };
        let tx = map.apply(&x)?;
        let excess = tx.op_norm()? - 1.0;
        if worst.as_ref().is_none_or(|(w, _, _)| excess > *w) {
            worst = Some((excess, x, tx));
        }
    }
    let (excess, x, tx) = worst.expect("at least one sample");
    let report = RelationReport::new("contractive_sampled", excess.max(0.0), tol.relation);
    Ok(if report.verdict {
        report
    } else {
        report.with_witness("x", x.matrix()).with_witness("T(x)", tx.matrix())
    })
}

/// `max ‖T{x,y,z} − {Tx,Ty,Tz}‖` over basis triples, with the middle slot also
/// taken as `i·y`.
pub fn is_triple_hom(map: &LinearMap, tol: &ToleranceConfig) -> Result<RelationReport> {
    let basis = AlgebraElement::basis(map.domain());
    let images = basis
        .iter()
        .map(|b| map.apply(b))
        .collect::<Result<Vec<_>>>()?;
    let i_unit = C64::new(0.0, 1.0);
    let mut worst = (0.0f64, 0usize, 0usize, 0usize);
    for x in 0..basis.len() {
        for y in 0..basis.len() {
            let iy = basis[y].scale(i_unit);
            let t_iy = images[y].scale(i_unit);
            for z in x..basis.len() {
                for (mid, t_mid) in [(&basis[y], &images[y]), (&iy, &t_iy)] {
                    let lhs = map.apply(&triple(&basis[x], mid, &basis[z])?)?;
                    let rhs = triple(&images[x], t_mid, &images[z])?;
                    let d = lhs.distance(&rhs)?;
                    if d > worst.0 {
                        worst = (d, x, y, z);
                    }
                }
            }
        }
    }
    let report = RelationReport::new("triple_hom", worst.0, tol.relation);
    Ok(if report.verdict {
        report
    } else {
        let (_, x, y, z) = worst;
        report
            .with_witness("x", basis[x].matrix())
            .with_witness("y", basis[y].matrix())
            .with_witness("z", basis[z].matrix())
    })
}

/// `T(x*) = T(x)*` on the basis.
pub fn is_symmetric(map: &LinearMap, tol: &ToleranceConfig) -> Result<RelationReport> {
    let mut defect: f64 = 0.0;
    for b in AlgebraElement::basis(map.domain()) {
        let lhs = map.apply(&b.adjoint())?;
        let rhs = map.apply(&b)?.adjoint();
        defect = defect.max(lhs.distance(&rhs)?);
    }
    Ok(RelationReport::new("symmetric", defect, tol.relation))
}

/// Residuals of the factorization `T = e·Φ` with `e = T(1)` and `Φ = e*T` a Jordan
/// *-homomorphism, sampled on random Hermitian contractions.
#[derive(Debug, Clone, Serialize)]
pub struct FactorizationReport {
    /// `max ‖Φ(x²) − Φ(x)²‖`.
    pub jordan_defect: f64,
    /// `max ‖T(x) − e·Φ(x)‖`.
    pub factor_defect: f64,
}

pub fn symmetric_factorization(
    map: &LinearMap,
    n_samples: usize,
    seed: u64,
) -> Result<FactorizationReport> {
    let e = map.apply(&AlgebraElement::unit(map.domain()))?;
    let e_star = e.adjoint();
    let mut rng = seeded(seed);
    let mut out = FactorizationReport {
        jordan_defect: 0.0,
        factor_defect: 0.0,
    };
    for _ in 0..n_samples {
        let x = random_element(map.domain(), &mut rng, random_hermitian_contraction);
        let tx = map.apply(&x)?;
        let phi_x = e_star.mul(&tx)?;
        let phi_x2 = e_star.mul(&map.apply(&x.mul(&x)?)?)?;
        out.jordan_defect = out
            .jordan_defect
            .max(phi_x2.distance(&phi_x.mul(&phi_x)?)?);
        out.factor_defect = out.factor_defect.max(tx.distance(&e.mul(&phi_x)?)?);
    }
    Ok(out)
}

/// Per-block residuals used for the I/J assignment.
#[derive(Debug, Clone, Serialize)]
pub struct BlockResidual {
    pub block: usize,
    pub hom_defect: f64,
    pub antihom_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TripleHomClassification {
    pub unit_image: AlgebraElement,
    pub triple_hom_defect: f64,
    pub partial_isometry_defect: f64,
    /// Blocks on which `e*T` is multiplicative.
    pub hom_block_indices: BTreeSet<usize>,
    /// Blocks on which `e*T` is anti-multiplicative.
    pub antihom_block_indices: BTreeSet<usize>,
    pub residuals: Vec<BlockResidual>,
}

/// Splits the domain blocks of a triple homomorphism into those where `Φ = e*T` is a
/// *-homomorphism and those where it is a *-anti-homomorphism.
pub fn classify_triple_hom(
    map: &LinearMap,
    tol: &ToleranceConfig,
) -> Result<TripleHomClassification> {
    let shape = map.domain();
    let e = map.apply(&AlgebraElement::unit(shape))?;
    let pi = is_partial_isometry(&e, tol)?;
    let th = is_triple_hom(map, tol)?;
    if !th.verdict || !pi.verdict {
        return Err(Error::NotTripleHom {
            defect: th.defect.max(pi.defect),
        });
    }
    let e_star = e.adjoint();
    let phi = |x: &AlgebraElement| -> Result<AlgebraElement> { e_star.mul(&map.apply(x)?) };

    let mut hom = BTreeSet::new();
    let mut antihom = BTreeSet::new();
    let mut residuals = Vec::with_capacity(shape.num_blocks());
    for (k, &n) in shape.block_dims().iter().enumerate() {
        let units: Vec<AlgebraElement> = (0..n * n)
            .map(|idx| AlgebraElement::matrix_unit(shape, k, idx / n, idx % n))
            .collect();
        let images = units.iter().map(&phi).collect::<Result<Vec<_>>>()?;
        let (mut hom_defect, mut antihom_defect) = (0.0f64, 0.0f64);
        for (x, px) in units.iter().zip(&images) {
            for (y, py) in units.iter().zip(&images) {
                let pxy = phi(&x.mul(y)?)?;
                hom_defect = hom_defect.max(pxy.distance(&px.mul(py)?)?);
                antihom_defect = antihom_defect.max(pxy.distance(&py.mul(px)?)?);
            }
        }
        residuals.push(BlockResidual {
            block: k,
            hom_defect,
            antihom_defect,
        });
        if hom_defect > tol.relation && antihom_defect > tol.relation {
            return Err(Error::AmbiguousBlock {
                block: k,
                hom_defect,
                antihom_defect,
            });
        }
        if hom_defect <= antihom_defect {
            hom.insert(k);
        } else {
            antihom.insert(k);
        }
    }
    Ok(TripleHomClassification {
        unit_image: e,
        triple_hom_defect: th.defect,
        partial_isometry_defect: pi.defect,
        hom_block_indices: hom,
        antihom_block_indices: antihom,
        residuals,
    })
}

/// A compatible input pair and what the map made of it.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    /// Position in the candidate stream.
    pub index: usize,
    pub source: String,
    pub a: AlgebraElement,
    pub b: AlgebraElement,
    pub input_defect: f64,
    pub image_a: AlgebraElement,
    pub image_b: AlgebraElement,
    /// Compatibility defect of the images, or the norm excess of the larger image when it
    /// leaves the unit ball.
    pub output_defect: f64,
    pub image_not_contractive: bool,
}

/// Evaluates the map on one input pair. Images outside the unit ball are flagged and
/// scored by their norm excess instead of being renormalized.
pub(crate) fn evaluate_pair(
    map: &LinearMap,
    a: AlgebraElement,
    b: AlgebraElement,
    input_kind: CompatKind,
    output_kind: CompatKind,
    tol: &ToleranceConfig,
    index: usize,
    source: String,
) -> Result<Witness> {
    let input_defect = compat_defect(&a, &b, input_kind, tol)?.defect;
    let image_a = map.apply(&a)?;
    let image_b = map.apply(&b)?;
    let excess = image_a.op_norm()?.max(image_b.op_norm()?) - 1.0;
    let (output_defect, image_not_contractive) = if excess > tol.relation {
        (excess, true)
    } else {
        (compat_defect(&image_a, &image_b, output_kind, tol)?.defect, false)
    };
    Ok(Witness {
        index,
        source,
        a,
        b,
        input_defect,
        image_a,
        image_b,
        output_defect,
        image_not_contractive,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PreservationReport {
    pub input_kind: CompatKind,
    pub output_kind: CompatKind,
    pub strategy: String,
    pub pairs_checked: usize,
    pub violations: usize,
    /// Violations caused by an image leaving the unit ball.
    pub non_contractive_images: usize,
    pub max_output_defect: f64,
    pub tolerance_used: f64,
    /// No violation found. A false verdict is conclusive.
    pub verdict: bool,
    pub worst: Option<Witness>,
    pub contractivity: RelationReport,
}

/// Number of samples used for the contractivity certificate attached to preservation audits.
pub const CONTRACTIVITY_SAMPLES: usize = 32;

/// Feeds `n_pairs` generated `input_kind`-compatible pairs through the map and checks the
/// images for `output_kind`-compatibility.
pub fn preserves_compat_sampled(
    map: &LinearMap,
    input_kind: CompatKind,
    output_kind: CompatKind,
    generator: &mut PairGenerator,
    n_pairs: usize,
    tol: &ToleranceConfig,
) -> Result<PreservationReport> {
    let contractivity = is_contractive_sampled(map, CONTRACTIVITY_SAMPLES, generator.seed(), tol)?;
    let mut report = PreservationReport {
        input_kind,
        output_kind,
        strategy: generator.strategy().name().to_string(),
        pairs_checked: 0,
        violations: 0,
        non_contractive_images: 0,
        max_output_defect: 0.0,
        tolerance_used: tol.relation,
        verdict: true,
        worst: None,
        contractivity,
    };
    for index in 0..n_pairs {
        let (a, b) = generator.generate_compat_pair(map.domain(), input_kind)?;
        let w = evaluate_pair(
            map,
            a,
            b,
            input_kind,
            output_kind,
            tol,
            index,
            generator.strategy().name().to_string(),
        )?;
        report.pairs_checked += 1;
        if w.output_defect > tol.relation {
            report.violations += 1;
            if w.image_not_contractive {
                report.non_contractive_images += 1;
            }
        }
        if report.worst.is_none() || w.output_defect > report.max_output_defect {
            report.max_output_defect = w.output_defect;
            report.worst = Some(w);
        }
    }
    report.verdict = report.violations == 0;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraShape;
    use crate::linalg::ComplexMatrix;
    use crate::preservers::generator::PairStrategy;
    use crate::preservers::map::{
        build_jordan_hom, build_sandwich, build_scalar, build_star_hom, build_transpose, identity,
        Placement,
    };

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn m2() -> AlgebraShape {
        AlgebraShape::full(2).unwrap()
    }

    #[test]
    fn contractivity_examples() {
        let id = identity(&m2());
        assert!(is_contractive_sampled(&id, 20, 1, &tol()).unwrap().verdict);
        let double = build_scalar(&m2(), C64::new(2.0, 0.0));
        let r = is_contractive_sampled(&double, 1, 1, &tol()).unwrap();
        assert!(!r.verdict);
        assert!(r.defect >= 1.0 - 1e-12);
        assert!(r.witness("x").is_some());
        let t = build_transpose(&m2());
        assert!(is_contractive_sampled(&t, 50, 2, &tol()).unwrap().verdict);
        assert!(is_contractive_sampled(&t, 0, 2, &tol()).is_err());
    }

    #[test]
    fn triple_hom_examples() {
        let mut rng = seeded(3);
        let w = haar_unitary_element(&m2(), &mut rng);
        let phi = build_star_hom(&m2(), &m2(), &[vec![0]], Some(&w), &tol()).unwrap();
        assert!(is_triple_hom(&phi, &tol()).unwrap().defect < 1e-10);
        assert!(is_triple_hom(&build_transpose(&m2()), &tol()).unwrap().verdict);

        let half = build_scalar(&m2(), C64::new(0.5, 0.0));
        let r = is_triple_hom(&half, &tol()).unwrap();
        assert!(!r.verdict);
        // {E11, E11, E11} = E11, so the worst defect is at least |1/2 - 1/8|
        assert!(r.defect >= 0.375 - 1e-12);
    }

    #[test]
    fn classification_examples() {
        let mut rng = seeded(4);
        let w = haar_unitary_element(&m2(), &mut rng);
        let phi = build_star_hom(&m2(), &m2(), &[vec![0]], Some(&w), &tol()).unwrap();
        let c = classify_triple_hom(&phi, &tol()).unwrap();
        assert_eq!(c.hom_block_indices, BTreeSet::from([0]));
        assert!(c.antihom_block_indices.is_empty());

        let c = classify_triple_hom(&build_transpose(&m2()), &tol()).unwrap();
        assert_eq!(c.antihom_block_indices, BTreeSet::from([0]));

        let s = AlgebraShape::new(vec![2, 2]).unwrap();
        let mixed = build_jordan_hom(
            &s,
            &s,
            &[
                vec![Placement { block: 0, transpose: false }],
                vec![Placement { block: 1, transpose: true }],
            ],
            None,
            &tol(),
        )
        .unwrap();
        let c = classify_triple_hom(&mixed, &tol()).unwrap();
        assert_eq!(c.hom_block_indices, BTreeSet::from([0]));
        assert_eq!(c.antihom_block_indices, BTreeSet::from([1]));

        let comm = AlgebraShape::commutative(2).unwrap();
        let c = classify_triple_hom(&identity(&comm), &tol()).unwrap();
        assert_eq!(c.hom_block_indices, BTreeSet::from([0, 1]));

        let half = build_scalar(&m2(), C64::new(0.5, 0.0));
        assert!(matches!(
            classify_triple_hom(&half, &tol()),
            Err(Error::NotTripleHom { .. })
        ));
    }

    #[test]
    fn split_jordan_map_is_ambiguous() {
        // x -> x ⊕ xᵗ is a triple hom whose single domain block is neither part
        let cod = AlgebraShape::new(vec![2, 2]).unwrap();
        let split = build_jordan_hom(
            &m2(),
            &cod,
            &[
                vec![Placement { block: 0, transpose: false }],
                vec![Placement { block: 0, transpose: true }],
            ],
            None,
            &tol(),
        )
        .unwrap();
        assert!(is_triple_hom(&split, &tol()).unwrap().verdict);
        assert!(matches!(
            classify_triple_hom(&split, &tol()),
            Err(Error::AmbiguousBlock { block: 0, .. })
        ));
    }

    #[test]
    fn sandwich_factorization() {
        let mut rng = seeded(8);
        let u = haar_unitary_element(&m2(), &mut rng);
        let v = haar_unitary_element(&m2(), &mut rng);
        let s = build_sandwich(&u, &v, &tol()).unwrap();
        assert!(!is_symmetric(&s, &tol()).unwrap().verdict);
        let c = classify_triple_hom(&s, &tol()).unwrap();
        assert!(c.unit_image.approx_eq(&u.mul(&v).unwrap(), 1e-12));
        assert_eq!(c.hom_block_indices, BTreeSet::from([0]));

        let phi = build_star_hom(&m2(), &m2(), &[vec![0]], Some(&u), &tol()).unwrap();
        assert!(is_symmetric(&phi, &tol()).unwrap().verdict);
        let f = symmetric_factorization(&phi, 20, 1).unwrap();
        assert!(f.jordan_defect < 1e-8 && f.factor_defect < 1e-10);
    }

    #[test]
    fn preservation_examples() {
        let mut rng = seeded(5);
        let w = haar_unitary_element(&m2(), &mut rng);
        let phi = build_star_hom(&m2(), &m2(), &[vec![0]], Some(&w), &tol()).unwrap();
        let mut g = PairGenerator::new(PairStrategy::DirectSumMix, 1);
        let r = preserves_compat_sampled(&phi, CompatKind::Domain, CompatKind::Domain, &mut g, 50, &tol())
            .unwrap();
        assert!(r.verdict);
        assert_eq!(r.pairs_checked, 50);

        let t = build_transpose(&m2());
        let mut g = PairGenerator::new(PairStrategy::DirectSumMix, 1);
        let r = preserves_compat_sampled(&t, CompatKind::Domain, CompatKind::Range, &mut g, 50, &tol())
            .unwrap();
        assert!(r.verdict);

        let (e, v) = crate::witnesses::transpose_witnesses();
        let w = evaluate_pair(
            &t,
            AlgebraElement::full(e),
            AlgebraElement::full(v),
            CompatKind::Domain,
            CompatKind::Domain,
            &tol(),
            0,
            "fixed".into(),
        )
        .unwrap();
        assert!(w.input_defect < 1e-12);
        assert!((w.output_defect - (2f64.sqrt() - 1.0)).abs() < 1e-8);
        assert!(!w.image_not_contractive);
    }

    #[test]
    fn non_contractive_images_are_flagged() {
        let double = build_scalar(&m2(), C64::new(2.0, 0.0));
        let one = AlgebraElement::unit(&m2());
        let w = evaluate_pair(
            &double,
            one.clone(),
            AlgebraElement::full(ComplexMatrix::zeros(2)),
            CompatKind::Full,
            CompatKind::Full,
            &tol(),
            0,
            "fixed".into(),
        )
        .unwrap();
        assert!(w.image_not_contractive);
        assert!((w.output_defect - 1.0).abs() < 1e-12);
    }
}
