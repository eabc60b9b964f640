//! The screening engine: property matrices over generated instances, the
//! theorem registry, and counterexample hunts.

mod hunt;
mod registry;
mod report;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{Catalog, CatalogError, Center};
use crate::model::{generate, validate, EdgeLengths, ModelError, TetraFamily};
use crate::properties::{check, Payload, Precision, PropertyId, Verdict};

pub use hunt::{
    hunt_counterexample, Claim, HuntReport, HuntResult, CONJECTURE_BUDGET, UNIQUENESS_BUDGET,
};
pub use registry::{
    registry, verify_all, verify_theorem, CaseFailure, CaseReport, CaseStatus, Centers, Expect,
    Observation, Target, TheoremCase, VerifyReport,
};

#[derive(Debug, Error)]
pub enum ScreenError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("unknown theorem case `{0}`")]
    UnknownCase(String),
}

/// Verdict counts for one cell.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub holds_exact: usize,
    pub holds_numeric: usize,
    pub fails: usize,
    pub undecided: usize,
    pub degenerate: usize,
    pub skipped: usize,
}

impl Tally {
    pub fn add(&mut self, v: &Verdict) {
        match v {
            Verdict::HoldsExact => self.holds_exact += 1,
            Verdict::HoldsNumeric { .. } => self.holds_numeric += 1,
            Verdict::Fails { .. } => self.fails += 1,
            Verdict::Undecided { .. } => self.undecided += 1,
            Verdict::Degenerate { .. } => self.degenerate += 1,
            Verdict::Skipped { .. } => self.skipped += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.holds_exact
            + self.holds_numeric
            + self.fails
            + self.undecided
            + self.degenerate
            + self.skipped
    }

    pub fn holds(&self) -> usize {
        self.holds_exact + self.holds_numeric
    }
}

/// A (family × centers × properties) matrix on `n` seeded instances.
#[derive(Debug, Clone)]
pub struct ScreenPlan {
    pub family: TetraFamily,
    pub centers: Vec<String>,
    pub properties: Vec<PropertyId>,
    pub n: usize,
    pub seed: u64,
    pub precision: Precision,
    /// Replaces generated instances when present.
    pub instances: Option<Vec<EdgeLengths>>,
}

impl ScreenPlan {
    pub fn new(
        family: TetraFamily,
        centers: Vec<String>,
        properties: Vec<PropertyId>,
        n: usize,
        seed: u64,
    ) -> Self {
        ScreenPlan {
            family,
            centers,
            properties,
            n,
            seed,
            precision: Precision {
                prefilter: true,
                ..Precision::default()
            },
            instances: None,
        }
    }

    fn resolve(&self, cat: &Catalog) -> Result<(Vec<Center>, Vec<EdgeLengths>), ScreenError> {
        if self.centers.is_empty() || self.properties.is_empty() {
            return Err(ScreenError::InvalidPlan(
                "at least one center and one property are required".into(),
            ));
        }
        let centers = self
            .centers
            .iter()
            .map(|c| cat.resolve(c))
            .collect::<Result<Vec<_>, _>>()?;
        let instances = match &self.instances {
            Some(v) => {
                for (i, e) in v.iter().enumerate() {
                    validate(e)
                        .map_err(|r| ScreenError::InvalidPlan(format!("instance {i}: {r}")))?;
                }
                v.clone()
            }
            None => generate(self.family, self.seed, self.n)?,
        };
        if instances.is_empty() {
            return Err(ScreenError::InvalidPlan(
                "instance count must be at least 1".into(),
            ));
        }
        Ok((centers, instances))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    ConfirmedExact,
    ConfirmedNumeric,
    /// Holds or is vacuous on every instance, vacuous on some.
    Degenerate,
    Refuted,
    /// Fails on some instances and holds on others.
    Mixed,
    Inconclusive,
    Skipped,
}

impl CellStatus {
    fn from_tally(t: &Tally) -> Self {
        let n = t.total();
        if t.fails > 0 {
            if t.holds() + t.degenerate == 0 {
                CellStatus::Refuted
            } else {
                CellStatus::Mixed
            }
        } else if t.holds_exact == n {
            CellStatus::ConfirmedExact
        } else if t.holds() == n {
            CellStatus::ConfirmedNumeric
        } else if t.skipped == n {
            CellStatus::Skipped
        } else if t.degenerate > 0 && t.holds() + t.degenerate == n {
            CellStatus::Degenerate
        } else {
            CellStatus::Inconclusive
        }
    }

    pub fn describe(self, n: usize) -> String {
        match self {
            CellStatus::ConfirmedExact => format!("confirmed (randomized exact, n={n})"),
            CellStatus::ConfirmedNumeric => format!("confirmed (interval, n={n})"),
            CellStatus::Degenerate => "degenerate".into(),
            CellStatus::Refuted => "refuted".into(),
            CellStatus::Mixed => "mixed".into(),
            CellStatus::Inconclusive => "inconclusive".into(),
            CellStatus::Skipped => "skipped".into(),
        }
    }
}

/// A failing (or otherwise notable) instance with its full rational data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub instance: usize,
    pub edges: EdgeLengths,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellReport {
    pub center: String,
    pub property: PropertyId,
    pub property_name: &'static str,
    pub status: CellStatus,
    pub tally: Tally,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Payload of the first instance on which the property held.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_payload: Option<Payload>,
    /// Distinct reasons for skipped or degenerate instances.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScreenReport {
    pub family: TetraFamily,
    pub seed: u64,
    pub n: usize,
    pub precision_cap: u32,
    pub instances: Vec<EdgeLengths>,
    pub cells: Vec<CellReport>,
}

fn build_cell(
    center: &Center,
    prop: PropertyId,
    instances: &[EdgeLengths],
    outcomes: Vec<(Verdict, Payload)>,
) -> CellReport {
    let mut tally = Tally::default();
    let mut witness = None;
    let mut sample_payload = None;
    let mut notes: Vec<String> = Vec::new();
    for (i, (v, p)) in outcomes.into_iter().enumerate() {
        tally.add(&v);
        match &v {
            Verdict::Fails { .. } if witness.is_none() => {
                witness = Some(Witness {
                    instance: i,
                    edges: instances[i].clone(),
                    verdict: v.clone(),
                })
            }
            Verdict::Skipped { reason } | Verdict::Degenerate { reason, .. } => {
                if !notes.contains(reason) {
                    notes.push(reason.clone());
                }
            }
            _ if v.holds() && sample_payload.is_none() && !p.is_empty() => sample_payload = Some(p),
            _ => {}
        }
    }
    CellReport {
        center: center.label(),
        property: prop,
        property_name: prop.name(),
        status: CellStatus::from_tally(&tally),
        tally,
        witness,
        sample_payload,
        notes,
    }
}

/// Runs every (center, property) cell on every instance. Cells are
/// independent and evaluated in parallel; the report is ordered by the
/// plan's center and property order, so it is identical for any thread
/// count.
pub fn run_screen(plan: &ScreenPlan, cat: &Catalog) -> Result<ScreenReport, ScreenError> {
    let (centers, instances) = plan.resolve(cat)?;
    let mut cells = Vec::with_capacity(centers.len() * plan.properties.len());
    for c in &centers {
        for &p in &plan.properties {
            cells.push((c, p));
        }
    }
    let reports: Vec<CellReport> = cells
        .par_iter()
        .map(|&(c, p)| {
            let outcomes: Vec<(Verdict, Payload)> = instances
                .par_iter()
                .map(|e| {
                    let o = check(e, c, p, &plan.precision);
                    (o.verdict, o.payload)
                })
                .collect();
            build_cell(c, p, &instances, outcomes)
        })
        .collect();
    Ok(ScreenReport {
        family: plan.family,
        seed: plan.seed,
        n: instances.len(),
        precision_cap: plan.precision.cap_bits,
        instances,
        cells: reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin_catalog;

    #[test]
    fn gergonne_cells() {
        let cat = builtin_catalog();
        let plan = ScreenPlan::new(
            TetraFamily::Circumscriptible,
            vec!["X7".into()],
            vec![PropertyId::Concur],
            10,
            1,
        );
        let r = run_screen(&plan, cat).unwrap();
        assert_eq!(r.cells[0].status, CellStatus::ConfirmedExact);
        let plan = ScreenPlan::new(
            TetraFamily::General,
            vec!["X7".into()],
            vec![PropertyId::Concur],
            10,
            1,
        );
        let r = run_screen(&plan, cat).unwrap();
        assert_eq!(r.cells[0].status, CellStatus::Refuted);
        assert_eq!(r.cells[0].witness.as_ref().unwrap().instance, 0);
    }

    #[test]
    fn bad_plans_are_rejected() {
        let cat = builtin_catalog();
        let plan = ScreenPlan::new(
            TetraFamily::General,
            vec!["X9999".into()],
            vec![PropertyId::Concur],
            3,
            1,
        );
        assert!(matches!(
            run_screen(&plan, cat),
            Err(ScreenError::Catalog(_))
        ));
        let plan = ScreenPlan::new(TetraFamily::General, vec!["X2".into()], vec![], 3, 1);
        assert!(matches!(
            run_screen(&plan, cat),
            Err(ScreenError::InvalidPlan(_))
        ));
    }

    #[test]
    fn screens_are_deterministic() {
        let cat = builtin_catalog();
        let plan = ScreenPlan::new(
            TetraFamily::Orthocentric,
            vec!["X4".into(), "X3".into(), "X371".into()],
            vec![
                PropertyId::Concur,
                PropertyId::Hyperbolic,
                PropertyId::NormalsConcur,
            ],
            4,
            11,
        );
        let a = run_screen(&plan, cat).unwrap();
        let b = run_screen(&plan, cat).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.to_csv(), b.to_csv());
    }
}
