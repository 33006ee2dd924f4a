//! Orthogonality, absolute compatibility and the characterizations built on them.
//!
//! Every relation is scored by the operator norm of the residual of its defining identity
//! and the verdict is a threshold comparison. Relations between elements are only defined
//! on the closed unit ball; inputs whose norm exceeds one by at most `tol.relation` are
//! rescaled onto the ball, anything larger is rejected.

use serde::Serialize;

use crate::algebra::{is_positive, jordan, AlgebraElement};
use crate::error::{Error, Result};
use crate::linalg::{self, ToleranceConfig, C64};
use crate::report::{
    ClauseOutcome, ConsistencyReport, CrossCheck, RelationReport, SideOutcome,
};

/// Which absolute values enter the compatibility identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompatKind {
    /// `|a|`, `|b|`.
    Domain,
    /// `|a*|`, `|b*|`.
    Range,
    /// Both.
    Full,
}

impl CompatKind {
    pub const ALL: [CompatKind; 3] = [CompatKind::Domain, CompatKind::Range, CompatKind::Full];

    pub fn name(self) -> &'static str {
        match self {
            CompatKind::Domain => "domain",
            CompatKind::Range => "range",
            CompatKind::Full => "full",
        }
    }

    /// The kind a *-anti-homomorphism maps this one to.
    pub fn swapped(self) -> Self {
        match self {
            CompatKind::Domain => CompatKind::Range,
            CompatKind::Range => CompatKind::Domain,
            CompatKind::Full => CompatKind::Full,
        }
    }
}

impl std::str::FromStr for CompatKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "domain" | "d" => Ok(CompatKind::Domain),
            "range" | "r" => Ok(CompatKind::Range),
            "full" | "both" => Ok(CompatKind::Full),
            other => Err(Error::InvalidArgument(format!(
                "unknown compatibility kind `{other}` (expected domain, range or full)"
            ))),
        }
    }
}

/// Puts `x` on the closed unit ball, allowing `tol.relation` of overshoot.
pub fn into_unit_ball(
    x: &AlgebraElement,
    which: &str,
    tol: &ToleranceConfig,
) -> Result<AlgebraElement> {
    let norm = x.op_norm()?;
    if norm > 1.0 + tol.relation {
        return Err(Error::NotContraction {
            which: which.to_string(),
            norm,
        });
    }
    if norm > 1.0 {
        Ok(x.scale_real(1.0 / norm))
    } else {
        Ok(x.clone())
    }
}

/// Residuals of `|x − y| + |1 − x − y| = 1` for positive `x`, `y`.
struct PositiveCompat {
    defect: f64,
    abs_difference: AlgebraElement,
    abs_complement: AlgebraElement,
}

fn positive_compat(x: &AlgebraElement, y: &AlgebraElement) -> Result<PositiveCompat> {
    let abs_difference = x.sub(y)?.hermitian_abs()?;
    let abs_complement = x.add(y)?.complement().hermitian_abs()?;
    let one = AlgebraElement::unit(x.shape());
    let defect = abs_difference
        .add(&abs_complement)?
        .sub(&one)?
        .op_norm()?;
    Ok(PositiveCompat {
        defect,
        abs_difference,
        abs_complement,
    })
}

/// Defect of `a △_d b`, `a △_r b` or `a △ b`.
pub fn compat_defect(
    a: &AlgebraElement,
    b: &AlgebraElement,
    kind: CompatKind,
    tol: &ToleranceConfig,
) -> Result<RelationReport> {
    a.check_same_shape(b)?;
    let a = into_unit_ball(a, "a", tol)?;
    let b = into_unit_ball(b, "b", tol)?;

    let mut witnesses = Vec::new();
    let mut defect: f64 = 0.0;
    if matches!(kind, CompatKind::Domain | CompatKind::Full) {
        let (x, y) = (a.abs()?, b.abs()?);
        let pc = positive_compat(&x, &y)?;
        defect = defect.max(pc.defect);
        witnesses.push(("|a|", x.matrix()));
        witnesses.push(("|b|", y.matrix()));
        witnesses.push(("||a|-|b||", pc.abs_difference.matrix()));
        witnesses.push(("|1-|a|-|b||", pc.abs_complement.matrix()));
    }
    if matches!(kind, CompatKind::Range | CompatKind::Full) {
        let (x, y) = (a.abs_adjoint()?, b.abs_adjoint()?);
        let pc = positive_compat(&x, &y)?;
        defect = defect.max(pc.defect);
        witnesses.push(("|a*|", x.matrix()));
        witnesses.push(("|b*|", y.matrix()));
        witnesses.push(("||a*|-|b*||", pc.abs_difference.matrix()));
        witnesses.push(("|1-|a*|-|b*||", pc.abs_complement.matrix()));
    }
    let report = RelationReport::new(format!("compat_{}", kind.name()), defect, tol.relation);
    Ok(witnesses
        .into_iter()
        .fold(report, |r, (name, m)| r.with_witness(name, m)))
}

/// `ab* = 0` and `b*a = 0`.
pub fn is_orthogonal(
    a: &AlgebraElement,
    b: &AlgebraElement,
    tol: &ToleranceConfig,
) -> Result<RelationReport> {
    let domain = domain_orthogonality_defect(a, b)?;
    let range = range_orthogonality_defect(a, b)?;
    Ok(RelationReport::new("orthogonal", domain.max(range), tol.relation))
}

/// `‖ab*‖`.
pub fn domain_orthogonality_defect(a: &AlgebraElement, b: &AlgebraElement) -> Result<f64> {
    a.mul(&b.adjoint())?.op_norm()
}

/// `‖b*a‖`.
pub fn range_orthogonality_defect(a: &AlgebraElement, b: &AlgebraElement) -> Result<f64> {
    b.adjoint().mul(a)?.op_norm()
}

/// Defect of `x + y ≤ 1` for Hermitian `x`, `y`.
fn sum_bound_defect(x: &AlgebraElement, y: &AlgebraElement) -> Result<f64> {
    let (_, hi) = x.add(y)?.hermitian_spectrum_bounds()?;
    Ok((hi - 1.0).max(0.0))
}

fn hermitian_defect(x: &AlgebraElement) -> Result<f64> {
    x.sub(&x.adjoint())?.op_norm()
}

/// Evaluates both sides of each equivalence between orthogonality and "sum bounded by
/// one plus compatibility", for general, then self-adjoint, contractions.
pub fn check_orth_characterization(
    a: &AlgebraElement,
    b: &AlgebraElement,
    tol: &ToleranceConfig,
) -> Result<ConsistencyReport> {
    a.check_same_shape(b)?;
    let a = into_unit_ball(a, "a", tol)?;
    let b = into_unit_ball(b, "b", tol)?;
    let t = tol.relation;
    let (a_s, b_s) = (a.adjoint(), b.adjoint());

    let dom_orth = domain_orthogonality_defect(&a, &b)?;
    let rng_orth = range_orthogonality_defect(&a, &b)?;
    let sum_dom = sum_bound_defect(&a.abs()?, &b.abs()?)?;
    let sum_rng = sum_bound_defect(&a.abs_adjoint()?, &b.abs_adjoint()?)?;
    let compat_d = compat_defect(&a, &b, CompatKind::Domain, tol)?.defect;
    let compat_r = compat_defect(&a, &b, CompatKind::Range, tol)?.defect;
    let compat_adj_d = compat_defect(&a_s, &b_s, CompatKind::Domain, tol)?.defect;
    let compat_adj_r = compat_defect(&a_s, &b_s, CompatKind::Range, tol)?.defect;

    let mut clauses = vec![
        ClauseOutcome::new(
            "a",
            vec![
                SideOutcome::conjunction("ab* = 0", &[dom_orth], t),
                SideOutcome::conjunction("|a|+|b| <= 1 and a △_d b", &[sum_dom, compat_d], t),
                SideOutcome::conjunction(
                    "|a|+|b| <= 1 and a* △_r b*",
                    &[sum_dom, compat_adj_r],
                    t,
                ),
            ],
            t,
        ),
        ClauseOutcome::new(
            "b",
            vec![
                SideOutcome::conjunction("b*a = 0", &[rng_orth], t),
                SideOutcome::conjunction(
                    "|a*|+|b*| <= 1 and a* △_d b*",
                    &[sum_rng, compat_adj_d],
                    t,
                ),
                SideOutcome::conjunction("|a*|+|b*| <= 1 and a △_r b", &[sum_rng, compat_r], t),
            ],
            t,
        ),
        ClauseOutcome::new(
            "c",
            vec![
                SideOutcome::conjunction("a ⊥ b", &[dom_orth, rng_orth], t),
                SideOutcome::conjunction(
                    "|a|+|b| <= 1, |a*|+|b*| <= 1, a △_r b, a △_d b",
                    &[sum_dom, sum_rng, compat_r, compat_d],
                    t,
                ),
            ],
            t,
        ),
    ];
    if hermitian_defect(&a)? <= t && hermitian_defect(&b)? <= t {
        clauses.push(ClauseOutcome::new(
            "self_adjoint",
            vec![
                SideOutcome::conjunction("a ⊥ b", &[dom_orth, rng_orth], t),
                SideOutcome::conjunction(
                    "|a|+|b| <= 1 and a △ b",
                    &[sum_dom, compat_d.max(compat_r)],
                    t,
                ),
            ],
            t,
        ));
    }
    Ok(ConsistencyReport::new("orthogonality_characterization", clauses, t))
}

fn check_unit_interval(x: &AlgebraElement, which: &str, tol: &ToleranceConfig) -> Result<()> {
    let lower = is_positive(x, tol)?;
    let upper = is_positive(&x.complement(), tol)?;
    let defect = lower.defect.max(upper.defect);
    if defect > tol.relation {
        return Err(Error::NotInUnitInterval {
            which: which.to_string(),
            defect,
        });
    }
    Ok(())
}

fn negative_part(x: &AlgebraElement) -> Result<f64> {
    let (lo, _) = x.hermitian_spectrum_bounds()?;
    Ok((-lo).max(0.0))
}

/// The four equivalent conditions for `0 ≤ a, b ≤ 1`: compatibility, the Jordan identity
/// `2a∘b = a + b − |a − b|`, and the two positivity-with-zero-product forms.
pub fn check_p00_equivalences(
    a: &AlgebraElement,
    b: &AlgebraElement,
    tol: &ToleranceConfig,
) -> Result<ConsistencyReport> {
    a.check_same_shape(b)?;
    check_unit_interval(a, "a", tol)?;
    check_unit_interval(b, "b", tol)?;
    let t = tol.relation;

    let cond_a = compat_defect(a, b, CompatKind::Domain, tol)?.defect;

    let ab = jordan(a, b)?;
    let abs_diff = a.sub(b)?.hermitian_abs()?;
    let cond_b = ab
        .scale_real(2.0)
        .sub(&a.add(b)?.sub(&abs_diff)?)?
        .op_norm()?;

    let (ca, cb) = (a.complement(), b.complement());
    let cc = jordan(&ca, &cb)?;
    let cond_c = [
        negative_part(&ab)?,
        negative_part(&cc)?,
        ab.mul(&cc)?.op_norm()?,
    ];

    let a_cb = jordan(a, &cb)?;
    let ca_b = jordan(&ca, b)?;
    let cond_d = [
        negative_part(&a_cb)?,
        negative_part(&ca_b)?,
        a_cb.mul(&ca_b)?.op_norm()?,
    ];

    let clause = ClauseOutcome::new(
        "a-d",
        vec![
            SideOutcome::conjunction("a △ b", &[cond_a], t),
            SideOutcome::conjunction("2a∘b = a + b - |a-b|", &[cond_b], t),
            SideOutcome::conjunction("a∘b, (1-a)∘(1-b) >= 0 with zero product", &cond_c, t),
            SideOutcome::conjunction("a∘(1-b), (1-a)∘b >= 0 with zero product", &cond_d, t),
        ],
        t,
    );
    Ok(ConsistencyReport::new("jordan_equivalences", vec![clause], t))
}

/// `max(‖a² − a‖, ‖a − a*‖)`.
pub fn is_projection(a: &AlgebraElement, tol: &ToleranceConfig) -> Result<RelationReport> {
    let idem = a.mul(a)?.sub(a)?.op_norm()?;
    let defect = idem.max(hermitian_defect(a)?);
    Ok(RelationReport::new("projection", defect, tol.relation))
}

/// `‖aa*a − a‖`.
pub fn is_partial_isometry(a: &AlgebraElement, tol: &ToleranceConfig) -> Result<RelationReport> {
    let defect = a.mul(&a.adjoint())?.mul(a)?.sub(a)?.op_norm()?;
    Ok(RelationReport::new("partial_isometry", defect, tol.relation))
}

/// `a △ a` against `aa*a = a` for a contraction `a`.
pub fn check_tripotent_characterization(
    a: &AlgebraElement,
    tol: &ToleranceConfig,
) -> Result<ConsistencyReport> {
    let a = into_unit_ball(a, "a", tol)?;
    let t = tol.relation;
    let self_compat = compat_defect(&a, &a, CompatKind::Full, tol)?.defect;
    let tripotent = is_partial_isometry(&a, tol)?.defect;
    let clause = ClauseOutcome::new(
        "tripotent",
        vec![
            SideOutcome::conjunction("a △ a", &[self_compat], t),
            SideOutcome::conjunction("aa*a = a", &[tripotent], t),
        ],
        t,
    );
    Ok(ConsistencyReport::new("tripotent_characterization", vec![clause], t))
}

/// Pointwise compatibility test in `C(Ω)`: at every point one of the functions has modulus
/// one or their product vanishes.
///
/// The pointwise rule is cross-validated against `compat_defect` on `diag(f)`, `diag(g)`;
/// disagreement shows up as `cross_check.agrees == false`.
pub fn commutative_compat_check(
    f: &[C64],
    g: &[C64],
    tol: &ToleranceConfig,
) -> Result<RelationReport> {
    if f.len() != g.len() {
        return Err(Error::LengthMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    if f.is_empty() {
        return Err(Error::InvalidArgument("Ω must be nonempty".into()));
    }
    for (which, v) in [("f", f), ("g", g)] {
        let norm = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if norm > 1.0 + tol.relation {
            return Err(Error::NotContraction {
                which: which.to_string(),
                norm,
            });
        }
    }
    let defect = f
        .iter()
        .zip(g)
        .map(|(x, y)| {
            let (fx, gy) = (x.norm(), y.norm());
            (1.0 - fx).min(1.0 - gy).min(fx * gy).max(0.0)
        })
        .fold(0.0, f64::max);
    let mut report = RelationReport::new("commutative_compat", defect, tol.relation);

    let fd = AlgebraElement::commutative(f)?;
    let gd = AlgebraElement::commutative(g)?;
    let diagonal = compat_defect(&fd, &gd, CompatKind::Full, tol)?;
    report.cross_check = Some(CrossCheck {
        relation: diagonal.relation_name.clone(),
        verdict: diagonal.verdict,
        defect: diagonal.defect,
        agrees: diagonal.verdict == report.verdict,
    });
    Ok(report)
}

/// Endpoint membership of a spectral interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalBoundary {
    ClosedClosed,
    OpenOpen,
    ClosedOpen,
    OpenClosed,
}

impl IntervalBoundary {
    fn lo_closed(self) -> bool {
        matches!(self, IntervalBoundary::ClosedClosed | IntervalBoundary::ClosedOpen)
    }

    fn hi_closed(self) -> bool {
        matches!(self, IntervalBoundary::ClosedClosed | IntervalBoundary::OpenClosed)
    }
}

/// Polar decomposition `a = u|a|` of an element, blockwise, with one rank cut relative to
/// the largest singular value of the whole element.
pub fn element_polar(
    a: &AlgebraElement,
    rank_tol: f64,
) -> Result<(AlgebraElement, AlgebraElement)> {
    let svds = a
        .blocks()
        .iter()
        .map(linalg::svd)
        .collect::<Result<Vec<_>>>()?;
    let smax = svds
        .iter()
        .filter_map(|s| s.singular_values.first().copied())
        .fold(0.0, f64::max);
    let cut = rank_tol * smax;
    let u = svds
        .iter()
        .map(|s| s.outer_sum(true, false, |_, sv| (sv > cut && sv > 0.0).then_some(1.0)))
        .collect();
    let abs = svds
        .iter()
        .map(|s| s.outer_sum(false, false, |_, sv| Some(sv)).hermitian_part())
        .collect();
    Ok((
        AlgebraElement::from_blocks(a.shape().clone(), u)?,
        AlgebraElement::from_blocks(a.shape().clone(), abs)?,
    ))
}

/// `u · χ_I(|a|)` where `a = u|a|` and `I` is the interval `lo..hi` with the given endpoint
/// membership. Singular values within `tol.relation` of an endpoint are snapped onto it when
/// `snap` is set; otherwise they raise [`Error::EndpointAmbiguity`].
pub fn spectral_tripotent(
    a: &AlgebraElement,
    lo: f64,
    hi: f64,
    boundary: IntervalBoundary,
    snap: bool,
    tol: &ToleranceConfig,
) -> Result<AlgebraElement> {
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
        return Err(Error::InvalidInterval { lo, hi });
    }
    let t = tol.relation;
    let svds = a
        .blocks()
        .iter()
        .map(linalg::svd)
        .collect::<Result<Vec<_>>>()?;
    let smax = svds
        .iter()
        .filter_map(|s| s.singular_values.first().copied())
        .fold(0.0, f64::max);
    let cut = tol.rank * smax;

    let member = |s: f64| -> Result<bool> {
        if (s - lo).abs() <= t {
            if !snap {
                return Err(Error::EndpointAmbiguity {
                    eigenvalue: s,
                    endpoint: lo,
                });
            }
            return Ok(boundary.lo_closed());
        }
        if (s - hi).abs() <= t {
            if !snap {
                return Err(Error::EndpointAmbiguity {
                    eigenvalue: s,
                    endpoint: hi,
                });
            }
            return Ok(boundary.hi_closed());
        }
        Ok(lo < s && s < hi)
    };

    let mut blocks = Vec::with_capacity(svds.len());
    for s in &svds {
        let mut keep = vec![false; s.singular_values.len()];
        for (k, &sv) in s.singular_values.iter().enumerate() {
            // the kernel of |a| is annihilated by u
            if sv > cut && sv > 0.0 {
                keep[k] = member(sv)?;
            }
        }
        blocks.push(s.outer_sum(true, false, |k, _| keep[k].then_some(1.0)));
    }
    AlgebraElement::from_blocks(a.shape().clone(), blocks)
}

/// Helper for callers holding real-valued functions on `Ω`.
pub fn real_function(values: &[f64]) -> Vec<C64> {
    values.iter().map(|&x| C64::new(x, 0.0)).collect()
}
