//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use abscompat::algebra::{is_positive, jordan, AlgebraElement, AlgebraShape};
use abscompat::linalg::{ComplexMatrix, ToleranceConfig, C64};
use abscompat::preservers::{
    build_jordan_hom, build_sandwich, build_scalar, build_star_anti_hom, build_star_hom,
    build_transpose, fuzz_counterexample, is_triple_hom, preserves_compat_sampled, LinearMap,
    PairGenerator, PairStrategy, Placement,
};
use abscompat::random::{haar_unitary_element, random_contraction, random_element, random_partial_isometry, seeded};
use abscompat::relations::{
    check_orth_characterization, check_p00_equivalences, check_tripotent_characterization,
    commutative_compat_check, compat_defect, is_orthogonal, is_partial_isometry, CompatKind,
};
use abscompat::report::ConsistencyReport;
use abscompat::suite::{orth_characterization_pair, random_function_pair, random_positive_pair};
use abscompat::witnesses::{paper_pair, seeded_prefix, transpose_witnesses};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn m(n: usize) -> AlgebraShape {
    AlgebraShape::full(n).unwrap()
}

fn real(rows: &[&[f64]]) -> AlgebraElement {
    AlgebraElement::full(ComplexMatrix::from_real_rows(rows))
}

fn paper_elements() -> (AlgebraElement, AlgebraElement) {
    let (a, b) = paper_pair();
    (AlgebraElement::full(a), AlgebraElement::full(b))
}

fn count_statuses(reports: &[ConsistencyReport]) -> (usize, usize) {
    let mut inconsistent = 0;
    let mut indeterminate = 0;
    for r in reports {
        if !r.consistent {
            inconsistent += 1;
        } else if r.indeterminate {
            indeterminate += 1;
        }
    }
    (inconsistent, indeterminate)
}

fn criterion_1() -> Outcome {
    let (a, b) = paper_elements();
    // entries typed in directly, independent of the witness module
    let a_lit = real(&[&[2.0 / 3.0, 1.0 / 3.0], &[1.0 / 3.0, 1.0 / 3.0]]);
    let b_lit = real(&[&[2.0 / 3.0, -1.0 / 3.0], &[-1.0 / 3.0, 1.0 / 3.0]]);
    check(a == a_lit && b == b_lit, || "fixed pair differs from literal entries".into())?;

    let evaluate = || -> Result<(bool, bool, f64, f64), String> {
        let pa = is_positive(&a, &tol()).map_err(err)?.verdict;
        let pb = is_positive(&b, &tol()).map_err(err)?.verdict;
        let d = compat_defect(&a, &b, CompatKind::Full, &tol()).map_err(err)?.defect;
        let comm = a
            .mul(&b)
            .and_then(|ab| ab.sub(&b.mul(&a)?))
            .and_then(|c| c.op_norm())
            .map_err(err)?;
        Ok((pa, pb, d, comm))
    };
    evaluate()?;
    let mut best = Duration::MAX;
    let mut last = None;
    for _ in 0..5 {
        let t = Instant::now();
        last = Some(evaluate()?);
        best = best.min(t.elapsed());
    }
    let (pa, pb, d, comm) = last.unwrap();
    check(pa && pb, || format!("positivity: a {pa}, b {pb}"))?;
    check(d <= 1e-9, || format!("compat defect {d:e} > 1e-9"))?;
    // ab − ba = (1/9)[[0,−2],[2,0]] by hand, norm 2/9
    check(comm >= 0.1 && (comm - 2.0 / 9.0).abs() < 1e-12, || format!("‖ab−ba‖ = {comm}"))?;
    check(best < Duration::from_millis(1), || format!("runtime {best:?} ≥ 1 ms"))?;
    Ok(format!("defect {d:.2e}, ‖ab−ba‖ = {comm:.6}, runtime {best:?}"))
}

fn criterion_2() -> Outcome {
    let (e, v) = transpose_witnesses();
    let p = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
    let q = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
    let r = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
    check(
        (e.adjoint() * &e).approx_eq(&p, 1e-15)
            && (&e * e.adjoint()).approx_eq(&q, 1e-15)
            && (v.adjoint() * &v).approx_eq(&q, 1e-15)
            && (&v * v.adjoint()).approx_eq(&r, 1e-15),
        || "e, v violate their defining constraints".into(),
    )?;
    let (e, v) = (AlgebraElement::full(e), AlgebraElement::full(v));
    let before = compat_defect(&e, &v, CompatKind::Domain, &tol()).map_err(err)?;
    check(before.defect <= 1e-9, || format!("domain defect of (e, v) = {:e}", before.defect))?;

    let after = compat_defect(&e.transpose(), &v.transpose(), CompatKind::Domain, &tol()).map_err(err)?;
    let sum = after.witness("||a|-|b||").unwrap() + after.witness("|1-|a|-|b||").unwrap();
    // |eᵗ| = diag(0,1), |vᵗ| = ½[[1,1],[1,1]]; both absolute-value terms equal (1/√2)·1
    let sqrt2 = std::f64::consts::SQRT_2;
    let expected = ComplexMatrix::identity(2).scale_real(sqrt2);
    check(sum.approx_eq(&expected, 1e-9), || format!("sum of terms {sum:?}"))?;
    let norm = sum.op_norm().map_err(err)?;
    check((norm - sqrt2).abs() <= 1e-9, || format!("norm {norm} ≠ √2"))?;
    check((after.defect - (sqrt2 - 1.0)).abs() <= 1e-8, || format!("defect {}", after.defect))?;
    Ok(format!(
        "(e,v) defect {:.2e}; transposed defect {:.10} (√2−1 = {:.10})",
        before.defect,
        after.defect,
        sqrt2 - 1.0
    ))
}

fn criterion_3() -> Outcome {
    let (a, b) = paper_elements();
    let abs_diff = a.sub(&b).and_then(|d| d.abs()).map_err(err)?;
    let two_thirds = AlgebraElement::unit(&m(2)).scale_real(2.0 / 3.0);
    let gap = abs_diff.distance(&two_thirds).map_err(err)?;
    check(gap <= 1e-10, || format!("‖|a−b| − (2/3)1‖ = {gap:e}"))?;
    let lhs = jordan(&a, &b).map_err(err)?.scale_real(2.0);
    let rhs = a.add(&b).and_then(|s| s.sub(&abs_diff)).map_err(err)?;
    let residual = lhs.distance(&rhs).map_err(err)?;
    check(residual <= 1e-10, || format!("residual {residual:e}"))?;
    // independent arithmetic: 2a∘b = ab + ba = (1/9)[[6,0],[0,0]] = a + b − (2/3)1
    let by_hand = real(&[&[2.0 / 3.0, 0.0], &[0.0, 0.0]]);
    check(lhs.approx_eq(&by_hand, 1e-12), || format!("2a∘b = {:?}", lhs.matrix()))?;
    Ok(format!("Jordan residual {residual:.2e}, ‖|a−b| − (2/3)1‖ = {gap:.2e}"))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded(4);
    let mut reports = Vec::new();
    let mut wrong_verdicts = 0;
    for k in 0..1200 {
        let n = 2 + k % 3;
        let (a, truth) = if k < 1000 {
            // generic contractions are never partial isometries
            (random_element(&m(n), &mut rng, random_contraction), Some(false))
        } else {
            let rank = (k % (n + 1)).max(1);
            let u = random_element(&m(n), &mut rng, |n, rng| random_partial_isometry(n, rank, rng));
            (u, Some(true))
        };
        let mut candidates = vec![(a.clone(), truth)];
        if k >= 1100 {
            candidates = vec![(a.scale_real(0.9), Some(false))];
        }
        for (x, truth) in candidates {
            let r = check_tripotent_characterization(&x, &tol()).map_err(err)?;
            if let (Some(v), Some(t)) = (r.clauses[0].verdict(), truth) {
                if v != t {
                    wrong_verdicts += 1;
                }
            }
            reports.push(r);
        }
    }
    let elapsed = start.elapsed();
    let (inconsistent, indeterminate) = count_statuses(&reports);
    let disagreements = inconsistent + indeterminate;
    check(disagreements == 0, || format!("{inconsistent} inconsistent, {indeterminate} indeterminate"))?;
    check(wrong_verdicts == 0, || format!("{wrong_verdicts} verdicts contradict the construction"))?;
    check(elapsed < Duration::from_secs(10), || format!("runtime {elapsed:?}"))?;
    Ok(format!(
        "{} elements (1000 contractions, 100 partial isometries, 100 scaled), 0 disagreements, {elapsed:.2?}",
        reports.len()
    ))
}

fn criterion_5() -> Outcome {
    let shapes = [m(2), m(3), AlgebraShape::new(vec![2, 1]).unwrap()];
    let mut rng = seeded(5);
    let mut orth = PairGenerator::new(PairStrategy::Orthogonal, 51);
    let mut paper = PairGenerator::new(PairStrategy::PaperM2Conjugates, 52);
    let mut reports = Vec::new();
    let mut orth_misses = 0;
    for k in 0..1000 {
        let shape = &shapes[(k / 3) % shapes.len()];
        let (a, b) = orth_characterization_pair(shape, k, &mut orth, &mut paper, &mut rng).map_err(err)?;
        if k % 3 == 0 {
            // direct products, not the report's own defects
            let ab = a.mul(&b.adjoint()).and_then(|x| x.op_norm()).map_err(err)?;
            let ba = b.adjoint().mul(&a).and_then(|x| x.op_norm()).map_err(err)?;
            if ab.max(ba) > 1e-12 || !is_orthogonal(&a, &b, &tol()).map_err(err)?.verdict {
                orth_misses += 1;
            }
        }
        reports.push(check_orth_characterization(&a, &b, &tol()).map_err(err)?);
    }
    let (inconsistent, indeterminate) = count_statuses(&reports);
    check(orth_misses == 0, || format!("{orth_misses} orthogonal constructions not orthogonal"))?;
    check(inconsistent == 0, || format!("{inconsistent} inconsistent pairs"))?;
    check(indeterminate * 100 < reports.len(), || format!("{indeterminate} indeterminate (≥ 1%)"))?;
    Ok(format!("1000 pairs, 0 inconsistent, {indeterminate} indeterminate"))
}

fn criterion_6() -> Outcome {
    let shapes = [m(2), m(3), AlgebraShape::new(vec![2, 2]).unwrap()];
    let mut rng = seeded(6);
    let mut generator = PairGenerator::new(PairStrategy::DirectSumMix, 61);
    let mut reports = Vec::new();
    let mut compatible_rejected = 0;
    let mut true_count = 0;
    for k in 0..500 {
        let shape = &shapes[k % shapes.len()];
        let compatible = k % 2 == 0;
        let (a, b) = random_positive_pair(shape, &mut generator, &mut rng, compatible).map_err(err)?;
        let r = check_p00_equivalences(&a, &b, &tol()).map_err(err)?;
        let verdict = r.clauses[0].verdict();
        if compatible && verdict != Some(true) {
            compatible_rejected += 1;
        }
        if verdict == Some(true) {
            true_count += 1;
        }
        reports.push(r);
    }
    let (inconsistent, indeterminate) = count_statuses(&reports);
    check(compatible_rejected == 0, || format!("{compatible_rejected} constructed compatible pairs rejected"))?;
    check(inconsistent == 0, || format!("{inconsistent} inconsistent pairs"))?;
    check(indeterminate * 100 < reports.len(), || format!("{indeterminate} indeterminate (≥ 1%)"))?;
    Ok(format!(
        "500 positive pairs ({true_count} compatible), 0 inconsistent, {indeterminate} indeterminate"
    ))
}

struct Audited {
    name: &'static str,
    map: LinearMap,
    kinds: Vec<(CompatKind, CompatKind)>,
}

fn audited_maps() -> Result<Vec<Audited>, String> {
    let t = tol();
    let mut rng = seeded(7);
    let m2 = m(2);
    let m21 = AlgebraShape::new(vec![2, 1]).unwrap();
    let m22 = AlgebraShape::new(vec![2, 2]).unwrap();
    let w2 = haar_unitary_element(&m2, &mut rng);
    let w21 = haar_unitary_element(&m21, &mut rng);
    let w22 = haar_unitary_element(&m22, &mut rng);
    let hom = [(CompatKind::Full, CompatKind::Full), (CompatKind::Domain, CompatKind::Domain)];
    let anti = [(CompatKind::Full, CompatKind::Full), (CompatKind::Domain, CompatKind::Range)];
    let (u, v) = (haar_unitary_element(&m21, &mut rng), haar_unitary_element(&m21, &mut rng));
    Ok(vec![
        Audited {
            name: "conjugation on M2",
            map: build_star_hom(&m2, &m2, &[vec![0]], Some(&w2), &t).map_err(err)?,
            kinds: hom.to_vec(),
        },
        Audited {
            name: "M2 -> M2+M2 diagonal",
            map: build_star_hom(&m2, &m22, &[vec![0], vec![0]], Some(&w22), &t).map_err(err)?,
            kinds: hom.to_vec(),
        },
        Audited {
            name: "M2+M1 -> M3 block embedding",
            map: build_star_hom(&m21, &m(3), &[vec![0, 1]], None, &t).map_err(err)?,
            kinds: hom.to_vec(),
        },
        Audited {
            name: "M2 -> M3 non-unital corner",
            map: build_star_hom(&m2, &m(3), &[vec![0]], Some(&haar_unitary_element(&m(3), &mut rng)), &t)
                .map_err(err)?,
            kinds: hom.to_vec(),
        },
        Audited {
            name: "anti-hom on M2+M1",
            map: build_star_anti_hom(&m21, &m21, &[vec![0], vec![1]], Some(&w21), &t).map_err(err)?,
            kinds: anti.to_vec(),
        },
        Audited {
            name: "transpose on M2",
            map: build_transpose(&m2),
            kinds: anti.to_vec(),
        },
        Audited {
            name: "sandwich on M2+M1",
            map: build_sandwich(&u, &v, &t).map_err(err)?,
            kinds: hom.to_vec(),
        },
        Audited {
            name: "x+y -> x+y^t on M2+M2",
            map: build_jordan_hom(
                &m22,
                &m22,
                &[
                    vec![Placement { block: 0, transpose: false }],
                    vec![Placement { block: 1, transpose: true }],
                ],
                Some(&w22),
                &t,
            )
            .map_err(err)?,
            kinds: vec![(CompatKind::Full, CompatKind::Full)],
        },
    ])
}

fn criterion_7() -> Outcome {
    let t = tol();
    let mut lines = Vec::new();
    for (i, audited) in audited_maps()?.into_iter().enumerate() {
        let th = is_triple_hom(&audited.map, &t).map_err(err)?;
        let e = audited.map.apply(&AlgebraElement::unit(audited.map.domain())).map_err(err)?;
        let pi = is_partial_isometry(&e, &t).map_err(err)?;
        check(th.defect <= 1e-9, || format!("{}: triple-hom defect {:e}", audited.name, th.defect))?;
        check(pi.defect <= 1e-9, || format!("{}: T(1) partial-isometry defect {:e}", audited.name, pi.defect))?;
        let strategies: Vec<PairStrategy> = PairStrategy::ALL
            .into_iter()
            .filter(|s| s.supports(audited.map.domain()))
            .collect();
        for &(input, output) in &audited.kinds {
            let mut checked = 0;
            let mut violations = 0;
            let mut worst: f64 = 0.0;
            for (j, &s) in strategies.iter().enumerate() {
                let share = 500 / strategies.len() + usize::from(j < 500 % strategies.len());
                let mut g = PairGenerator::new(s, (i * 100 + j) as u64);
                let r = preserves_compat_sampled(&audited.map, input, output, &mut g, share, &t).map_err(err)?;
                checked += r.pairs_checked;
                violations += r.violations;
                worst = worst.max(r.max_output_defect);
            }
            check(checked == 500 && violations == 0, || {
                format!(
                    "{} ({} -> {}): {violations} violations in {checked} pairs, worst {worst:e}",
                    audited.name,
                    input.name(),
                    output.name()
                )
            })?;
            lines.push(worst);
        }
    }
    let worst = lines.iter().copied().fold(0.0, f64::max);
    Ok(format!(
        "8 maps, {} audits of 500 pairs, 0 violations (worst output defect {worst:.2e})",
        lines.len()
    ))
}

fn criterion_8() -> Outcome {
    let t = tol();
    let m2 = m(2);
    let mut notes = Vec::new();
    for (name, map, kind) in [
        ("transpose", build_transpose(&m2), CompatKind::Domain),
        ("x -> x/2", build_scalar(&m2, C64::new(0.5, 0.0)), CompatKind::Full),
    ] {
        let prefix = seeded_prefix(&m2, kind, &t).map_err(err)?.len();
        let first = fuzz_counterexample(&map, kind, 1000, 8, &t).map_err(err)?;
        let again = fuzz_counterexample(&map, kind, 1000, 8, &t).map_err(err)?;
        let w = first.ok_or_else(|| format!("{name}: no witness"))?;
        let w2 = again.ok_or_else(|| format!("{name}: no witness on replay"))?;
        check(w.index < prefix, || format!("{name}: witness at {} outside prefix of {prefix}", w.index))?;
        check(
            w.index == w2.index && w.output_defect.to_bits() == w2.output_defect.to_bits(),
            || format!("{name}: replay differs"),
        )?;
        // confirm with the oracle on the images
        let direct = compat_defect(&map.apply(&w.a).map_err(err)?, &map.apply(&w.b).map_err(err)?, kind, &t)
            .map_err(err)?;
        check(!direct.verdict, || format!("{name}: oracle accepts the image pair"))?;
        let th = is_triple_hom(&map, &t).map_err(err)?.defect;
        notes.push(format!(
            "{name}: {} at #{} (output defect {:.4}, triple-hom defect {:.3})",
            w.source, w.index, w.output_defect, th
        ));
    }
    let mut rng = seeded(88);
    let m21 = AlgebraShape::new(vec![2, 1]).unwrap();
    let homs = [
        build_star_hom(&m2, &m2, &[vec![0]], Some(&haar_unitary_element(&m2, &mut rng)), &t).map_err(err)?,
        build_star_hom(&m21, &m21, &[vec![0], vec![1]], Some(&haar_unitary_element(&m21, &mut rng)), &t)
            .map_err(err)?,
        build_star_hom(&m2, &AlgebraShape::new(vec![2, 2]).unwrap(), &[vec![0], vec![0]], None, &t).map_err(err)?,
    ];
    for (i, hom) in homs.iter().enumerate() {
        for kind in CompatKind::ALL {
            let found = fuzz_counterexample(hom, kind, 1000, 80 + i as u64, &t).map_err(err)?;
            check(found.is_none(), || format!("*-hom {i} ({}) refuted: {:?}", kind.name(), found.map(|w| w.output_defect)))?;
        }
    }
    notes.push("3 *-homs x 3 kinds: none at budget 1000".into());
    Ok(notes.join("; "))
}

fn criterion_9() -> Outcome {
    let mut rng = seeded(9);
    let mut compatible = 0;
    for k in 0..1000 {
        let size = 1 + k % 8;
        let (f, g) = random_function_pair(size, &mut rng);
        let r = commutative_compat_check(&f, &g, &tol()).map_err(err)?;
        let cross = r.cross_check.as_ref().ok_or("missing cross-check")?;
        // scalar arithmetic on moduli, no matrices involved
        let scalar_defect = f
            .iter()
            .zip(&g)
            .map(|(x, y)| {
                let (p, q) = (x.norm(), y.norm());
                ((p - q).abs() + (1.0 - p - q).abs() - 1.0).abs()
            })
            .fold(0.0, f64::max);
        let scalar = scalar_defect <= tol().relation;
        check(cross.agrees && r.verdict == cross.verdict && r.verdict == scalar, || {
            format!(
                "trial {k}: pointwise {} ({:e}), diagonal {} ({:e}), scalar {scalar}",
                r.verdict, r.defect, cross.verdict, cross.defect
            )
        })?;
        compatible += usize::from(r.verdict);
    }
    Ok(format!("1000 pairs on |Ω| ≤ 8 ({compatible} compatible), 0 disagreements"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("M2 pair positive, compatible, noncommuting", criterion_1),
        ("transpose breaks domain compatibility", criterion_2),
        ("Jordan identity on the M2 pair", criterion_3),
        ("tripotent characterization", criterion_4),
        ("orthogonality characterization", criterion_5),
        ("four-way equivalence for positive pairs", criterion_6),
        ("structural maps preserve compatibility", criterion_7),
        ("contrapositive fuzzing", criterion_8),
        ("commutative cross-validation", criterion_9),
    ];
    let mut passed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let ok = outcome.is_ok();
        let detail = outcome.unwrap_or_else(|e| e);
        println!("criterion {}: {} - {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
        passed.push(ok);
    }
    let covered = passed[6] && passed[7];
    println!(
        "criterion 10: {} - general preserver theorem: not decidable by sampling; covered by criteria 7 and 8",
        if covered { "PASS" } else { "FAIL" }
    );
    passed.push(covered);
    if passed.iter().all(|&p| p) {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} of 10 criteria failed", passed.iter().filter(|&&p| !p).count());
        ExitCode::FAILURE
    }
}
