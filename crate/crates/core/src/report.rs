//! Report values returned by relation checks and consistency cross-checks.

use serde::Serialize;

use crate::linalg::ComplexMatrix;

/// A named intermediate kept for inspection, e.g. `|a|` or `|1 − |a| − |b||`.
#[derive(Debug, Clone, Serialize)]
pub struct NamedMatrix {
    pub name: String,
    pub matrix: ComplexMatrix,
}

/// Outcome of an independent route evaluated alongside the primary defect.
#[derive(Debug, Clone, Serialize)]
pub struct CrossCheck {
    pub relation: String,
    pub verdict: bool,
    pub defect: f64,
    /// Verdicts of both routes coincide.
    pub agrees: bool,
}

/// Verdict of one relation: `verdict == (defect <= tolerance_used)`.
#[derive(Debug, Clone, Serialize)]
pub struct RelationReport {
    pub relation_name: String,
    pub verdict: bool,
    pub defect: f64,
    pub tolerance_used: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<NamedMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheck>,
}

impl RelationReport {
    pub fn new(relation: impl Into<String>, defect: f64, tolerance: f64) -> Self {
        Self {
            relation_name: relation.into(),
            verdict: defect <= tolerance,
            defect,
            tolerance_used: tolerance,
            witnesses: Vec::new(),
            cross_check: None,
        }
    }

    pub fn with_witness(mut self, name: impl Into<String>, matrix: ComplexMatrix) -> Self {
        self.witnesses.push(NamedMatrix {
            name: name.into(),
            matrix,
        });
        self
    }

    pub fn witness(&self, name: &str) -> Option<&ComplexMatrix> {
        self.witnesses
            .iter()
            .find(|w| w.name == name)
            .map(|w| &w.matrix)
    }
}

/// One side of an equivalence: a conjunction of conditions, each with its own defect.
#[derive(Debug, Clone, Serialize)]
pub struct SideOutcome {
    pub label: String,
    pub verdict: bool,
    pub defect: f64,
}

impl SideOutcome {
    /// Conjunction of `(condition, defect)` pairs; the side's defect is the largest one.
    pub fn conjunction(label: impl Into<String>, defects: &[f64], tol: f64) -> Self {
        let defect = defects.iter().copied().fold(0.0, f64::max);
        Self {
            label: label.into(),
            verdict: defect <= tol,
            defect,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClauseStatus {
    Consistent,
    /// Sides disagree, but every defect sits within the near-threshold band.
    Indeterminate,
    Inconsistent,
}

/// All sides of one "if and only if" clause.
#[derive(Debug, Clone, Serialize)]
pub struct ClauseOutcome {
    pub clause: String,
    pub sides: Vec<SideOutcome>,
    pub status: ClauseStatus,
}

/// Width of the near-threshold band, in multiples of the tolerance.
pub const INDETERMINATE_BAND: f64 = 10.0;

impl ClauseOutcome {
    pub fn new(clause: impl Into<String>, sides: Vec<SideOutcome>, tol: f64) -> Self {
        let first = sides.first().map(|s| s.verdict);
        let status = if sides.iter().all(|s| Some(s.verdict) == first) {
            ClauseStatus::Consistent
        } else if sides
            .iter()
            .all(|s| (s.defect - tol).abs() <= INDETERMINATE_BAND * tol)
        {
            ClauseStatus::Indeterminate
        } else {
            ClauseStatus::Inconsistent
        };
        Self {
            clause: clause.into(),
            sides,
            status,
        }
    }

    /// Common verdict when the clause is consistent.
    pub fn verdict(&self) -> Option<bool> {
        (self.status == ClauseStatus::Consistent).then(|| self.sides[0].verdict)
    }
}

/// Numerical evaluation of a set of equivalences.
#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    pub name: String,
    pub tolerance_used: f64,
    pub clauses: Vec<ClauseOutcome>,
    /// No clause is inconsistent.
    pub consistent: bool,
    /// Some clause landed in the near-threshold band.
    pub indeterminate: bool,
}

impl ConsistencyReport {
    pub fn new(name: impl Into<String>, clauses: Vec<ClauseOutcome>, tol: f64) -> Self {
        let consistent = clauses
            .iter()
            .all(|c| c.status != ClauseStatus::Inconsistent);
        let indeterminate = clauses
            .iter()
            .any(|c| c.status == ClauseStatus::Indeterminate);
        Self {
            name: name.into(),
            tolerance_used: tol,
            clauses,
            consistent,
            indeterminate,
        }
    }

    pub fn clause(&self, name: &str) -> Option<&ClauseOutcome> {
        self.clauses.iter().find(|c| c.clause == name)
    }
}
