//! Falsification searches: the uniqueness and impossibility results are
//! supported by finding, for every other catalog center, an instance that
//! breaks the property; the conjectures are searched for counterexamples.

use std::fmt;
use std::str::FromStr;

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::registry::at_infinity_everywhere;
use super::ScreenError;
use crate::catalog::{instantiate_all, Catalog, Center, SAMPLE_R};
use crate::model::{family_predicate, generate_one, validate, EdgeLengths, TetraFamily};
use crate::properties::{check, Precision, PropertyId, Verdict};
use crate::scalar::{int, rat, EvalMode, Rational};
use crate::triangle::{proj_eq, TriangleSides};

/// Instances tried per center for the uniqueness searches.
pub const UNIQUENESS_BUDGET: usize = 1000;
/// Perturbed instances tried for each conjecture.
pub const CONJECTURE_BUDGET: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    /// Only the centroid has concurrent cevians on every isosceles tetrahedron.
    CentroidUniqueness,
    /// Only the power points give hyperbolic cevians on every tetrahedron.
    PowerUniqueness,
    /// No center has coplanar face centers on every isosceles tetrahedron.
    PlanarityImpossibility,
    /// Central tetrahedron isosceles ⟹ reference isosceles.
    CentralIsoscelesConjecture,
    /// Central tetrahedron regular ⟹ reference regular.
    CentralRegularConjecture,
    /// Central tetrahedron similar to the reference ⟹ the center is the centroid.
    SimilarityConjecture,
    /// Equal cevians ⟹ isosceles.
    EqualCeviansConjecture,
}

impl Claim {
    pub const ALL: [Claim; 7] = [
        Claim::CentroidUniqueness,
        Claim::PowerUniqueness,
        Claim::PlanarityImpossibility,
        Claim::CentralIsoscelesConjecture,
        Claim::CentralRegularConjecture,
        Claim::SimilarityConjecture,
        Claim::EqualCeviansConjecture,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Claim::CentroidUniqueness => "centroid-uniqueness",
            Claim::PowerUniqueness => "power-uniqueness",
            Claim::PlanarityImpossibility => "planarity-impossibility",
            Claim::CentralIsoscelesConjecture => "central-isosceles-conjecture",
            Claim::CentralRegularConjecture => "central-regular-conjecture",
            Claim::SimilarityConjecture => "similarity-conjecture",
            Claim::EqualCeviansConjecture => "equal-cevians-conjecture",
        }
    }

    pub fn is_conjecture(self) -> bool {
        !matches!(
            self,
            Claim::CentroidUniqueness | Claim::PowerUniqueness | Claim::PlanarityImpossibility
        )
    }

    pub fn default_budget(self) -> usize {
        if self.is_conjecture() {
            CONJECTURE_BUDGET
        } else {
            UNIQUENESS_BUDGET
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Claim {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Claim::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<_> = Claim::ALL.iter().map(|c| c.name()).collect();
                format!("unknown claim `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum HuntResult {
    /// The property was broken (uniqueness searches) or the conjecture's
    /// hypothesis held without its conclusion (conjecture searches).
    Witness {
        center: String,
        attempt: usize,
        edges: EdgeLengths,
        verdict: Verdict,
    },
    /// The budget ran out.
    Exhausted {
        center: Option<String>,
        attempts: usize,
    },
    /// The center belongs to the family the claim singles out.
    Excluded { center: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HuntReport {
    pub claim: Claim,
    pub seed: u64,
    pub budget: usize,
    pub results: Vec<HuntResult>,
    /// Uniqueness searches: centers that never failed. Conjectures: empty.
    pub survivors: Vec<String>,
    pub counterexamples: usize,
    /// Uniqueness searches: every non-excluded center was broken.
    /// Conjectures: no counterexample found within the budget.
    pub supported: bool,
}

fn probe_triangles() -> Vec<TriangleSides> {
    [(3, 4, 5), (5, 6, 7), (7, 8, 13)]
        .iter()
        .map(|&(a, b, c)| TriangleSides::from_ints(a, b, c).unwrap())
        .collect()
}

fn probe_coords(c: &Center, s: &TriangleSides) -> Option<[f64; 3]> {
    let p = c.areal(s, EvalMode::Interval { bits: 128 }).ok()?;
    let v = [p.0[0].to_f64(), p.0[1].to_f64(), p.0[2].to_f64()];
    let sum: f64 = v.iter().sum();
    (sum.abs() > 1e-300).then(|| v.map(|x| x / sum))
}

fn is_centroid(c: &Center) -> bool {
    let one = [int(1), int(1), int(1)].map(crate::scalar::Scalar::Exact);
    probe_triangles()
        .iter()
        .all(|s| match c.areal(s, EvalMode::Exact) {
            Ok(p) => proj_eq(&p.0, &one) == Some(true),
            Err(_) => {
                probe_coords(c, s).is_some_and(|v| v.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-12))
            }
        })
}

/// Projectively equal to (a^s, b^s, c^s) for one exponent s on every probe triangle.
fn is_power_point(c: &Center) -> bool {
    let Some(base) = TriangleSides::from_ints(4, 6, 9)
        .ok()
        .and_then(|s| probe_coords(c, &s))
    else {
        return false;
    };
    if base.iter().any(|x| *x <= 0.0) {
        return false;
    }
    let s = (base[1] / base[0]).ln() / 1.5f64.ln();
    if ((base[2] / base[0]).ln() / 2.25f64.ln() - s).abs() > 1e-9 {
        return false;
    }
    probe_triangles().iter().all(|t| {
        let Some(v) = probe_coords(c, t) else {
            return false;
        };
        let sides = t
            .as_array()
            .map(|x| crate::scalar::Scalar::Exact(x.clone()).to_f64());
        let w: Vec<f64> = sides.iter().map(|a| a.powf(s)).collect();
        let sum: f64 = w.iter().sum();
        v.iter().zip(&w).all(|(x, y)| (x - y / sum).abs() < 1e-9)
    })
}

fn search(
    c: &Center,
    family: TetraFamily,
    prop: PropertyId,
    seed: u64,
    budget: usize,
    prec: &Precision,
) -> HuntResult {
    for k in 0..budget {
        let Ok(e) = generate_one(family, seed, k as u64) else {
            continue;
        };
        let o = check(&e, c, prop, prec);
        if o.verdict.fails() {
            return HuntResult::Witness {
                center: c.label(),
                attempt: k,
                edges: e,
                verdict: o.verdict,
            };
        }
    }
    HuntResult::Exhausted {
        center: Some(c.label()),
        attempts: budget,
    }
}

/// Perturbs one or two edges of `base` by small rational factors until the
/// result is valid and leaves `keep_out`.
fn perturb(base: &EdgeLengths, rng: &mut ChaCha8Rng, keep_out: TetraFamily) -> Option<EdgeLengths> {
    for _ in 0..50 {
        let mut six: Vec<Rational> = base.six().iter().map(|x| (*x).clone()).collect();
        for _ in 0..rng.gen_range(1..=2) {
            let k = rng.gen_range(0..6);
            let m: i64 = rng.gen_range(5..=40);
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            six[k] = &six[k] * (int(1) + rat(sign, m));
        }
        let e = EdgeLengths::new(
            [six[0].clone(), six[1].clone(), six[2].clone()],
            [six[3].clone(), six[4].clone(), six[5].clone()],
        );
        let regular = six.iter().all(|x| x == &six[0]);
        let outside = match keep_out {
            TetraFamily::General => !regular,
            f => !family_predicate(&e, f),
        };
        if outside && validate(&e).is_ok() && six.iter().all(|x| x.is_positive()) {
            return Some(e);
        }
    }
    None
}

fn conjecture(
    claim: Claim,
    cat: &Catalog,
    seed: u64,
    budget: usize,
    prec: &Precision,
) -> Vec<HuntResult> {
    let centers: Vec<Center> = instantiate_all(cat, &SAMPLE_R)
        .into_iter()
        .filter(|c| c.rational_only() && !at_infinity_everywhere(c))
        .collect();
    let (prop, base_family, keep_out) = match claim {
        Claim::CentralIsoscelesConjecture => (
            PropertyId::CentralIsosceles,
            TetraFamily::Isosceles,
            TetraFamily::Isosceles,
        ),
        Claim::CentralRegularConjecture => (
            PropertyId::CentralRegular,
            TetraFamily::General,
            TetraFamily::General,
        ),
        Claim::SimilarityConjecture => (
            PropertyId::SimilarToReference,
            TetraFamily::General,
            TetraFamily::General,
        ),
        Claim::EqualCeviansConjecture => (
            PropertyId::EqualCevians,
            TetraFamily::Isosceles,
            TetraFamily::Isosceles,
        ),
        _ => unreachable!("not a conjecture"),
    };
    let instances: Vec<EdgeLengths> = (0..budget)
        .filter_map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0_ffee);
            rng.set_stream(k as u64);
            match claim {
                Claim::CentralRegularConjecture => {
                    perturb(&EdgeLengths::regular(), &mut rng, keep_out)
                }
                Claim::SimilarityConjecture => generate_one(base_family, seed, k as u64).ok(),
                _ => {
                    let base = generate_one(base_family, seed, k as u64).ok()?;
                    perturb(&base, &mut rng, keep_out)
                }
            }
        })
        .collect();
    let hits: Vec<HuntResult> = centers
        .par_iter()
        .filter(|c| claim != Claim::SimilarityConjecture || !is_centroid(c))
        .flat_map_iter(|c| {
            instances.iter().enumerate().find_map(|(k, e)| {
                let o = check(e, c, prop, prec);
                o.verdict.holds().then(|| HuntResult::Witness {
                    center: c.label(),
                    attempt: k,
                    edges: e.clone(),
                    verdict: o.verdict,
                })
            })
        })
        .collect();
    if hits.is_empty() {
        vec![HuntResult::Exhausted {
            center: None,
            attempts: instances.len() * centers.len(),
        }]
    } else {
        hits
    }
}

/// Runs the search for `claim`; `budget` defaults per claim.
pub fn hunt_counterexample(
    claim: Claim,
    budget: Option<usize>,
    seed: u64,
    cat: &Catalog,
) -> Result<HuntReport, ScreenError> {
    let budget = budget.unwrap_or(claim.default_budget());
    if budget == 0 {
        return Err(ScreenError::InvalidPlan("budget must be at least 1".into()));
    }
    let prec = Precision {
        prefilter: true,
        ..Precision::default()
    };
    let results: Vec<HuntResult> = if claim.is_conjecture() {
        conjecture(claim, cat, seed, budget, &prec)
    } else {
        let (family, prop) = match claim {
            Claim::CentroidUniqueness => (TetraFamily::Isosceles, PropertyId::Concur),
            Claim::PowerUniqueness => (TetraFamily::General, PropertyId::Hyperbolic),
            _ => (TetraFamily::Isosceles, PropertyId::Coplanar),
        };
        instantiate_all(cat, &SAMPLE_R)
            .par_iter()
            .map(|c| {
                let excluded = match claim {
                    _ if at_infinity_everywhere(c) => Some("point at infinity on every triangle"),
                    Claim::CentroidUniqueness if is_centroid(c) => {
                        Some("projectively the centroid")
                    }
                    Claim::PowerUniqueness if is_power_point(c) => {
                        Some("projectively a power point")
                    }
                    _ => None,
                };
                match excluded {
                    Some(reason) => HuntResult::Excluded {
                        center: c.label(),
                        reason: reason.into(),
                    },
                    None => search(c, family, prop, seed, budget, &prec),
                }
            })
            .collect()
    };
    let survivors: Vec<String> = if claim.is_conjecture() {
        Vec::new()
    } else {
        results
            .iter()
            .filter_map(|r| match r {
                HuntResult::Exhausted { center, .. } => center.clone(),
                _ => None,
            })
            .collect()
    };
    let counterexamples = if claim.is_conjecture() {
        results
            .iter()
            .filter(|r| matches!(r, HuntResult::Witness { .. }))
            .count()
    } else {
        0
    };
    Ok(HuntReport {
        claim,
        seed,
        budget,
        supported: survivors.is_empty() && counterexamples == 0,
        results,
        survivors,
        counterexamples,
    })
}
