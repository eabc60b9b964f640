//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Some stated results do not hold; those criteria are listed in
//! `KNOWN_FAILING` with the reason and still print FAIL. The target exits
//! nonzero only when an outcome differs from that list, so a regression or
//! an unexpected pass is caught without hiding the known failures.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use tetracenter::catalog::builtin_catalog;
use tetracenter::properties::Precision;
use tetracenter::screen::{
    hunt_counterexample, registry, verify_all, verify_theorem, CaseStatus, Claim,
};

const KNOWN_FAILING: &[(u8, &str)] = &[
    (4, "the 2a^r+b^r+c^r central tetrahedron does not share the reference centroid"),
    (7, "X76 circumcenter is not the reference centroid; X106, X110, X111 are not hyperbolic; X107-X109 have no curated formula"),
    (8, "X5 centroid, orthocenter centroid, orthocenter Monge point and X53 centroid relations do not hold"),
];

type Check = Result<String, String>;

fn cases(pred: impl Fn(&str) -> bool) -> Check {
    let cat = builtin_catalog();
    let prec = Precision::default();
    let ids: Vec<&str> = registry()
        .iter()
        .map(|c| c.id)
        .filter(|id| pred(id))
        .collect();
    assert!(!ids.is_empty(), "no cases selected");
    let mut bad = Vec::new();
    let mut trials = 0;
    for id in &ids {
        let r = verify_theorem(id, None, 7, cat, &prec).map_err(|e| e.to_string())?;
        trials += r.tally.total();
        match r.status {
            CaseStatus::Pass => {}
            CaseStatus::Fail => bad.push(format!("{id} ({} failing)", r.failing.max(1))),
            CaseStatus::Skipped => bad.push(format!("{id} (skipped)")),
        }
    }
    if bad.is_empty() {
        Ok(format!("{} cases, {trials} trials", ids.len()))
    } else {
        Err(format!(
            "{}/{} cases fail: {}",
            bad.len(),
            ids.len(),
            bad.join(", ")
        ))
    }
}

fn hunt(claim: Claim) -> Check {
    let r = hunt_counterexample(claim, None, 7, builtin_catalog()).map_err(|e| e.to_string())?;
    if r.supported {
        Ok(format!(
            "{claim}: every non-excluded center broken within {}",
            r.budget
        ))
    } else {
        Err(format!("{claim}: survivors {}", r.survivors.join(", ")))
    }
}

fn both(a: Check, b: Check) -> Check {
    match (a, b) {
        (Ok(x), Ok(y)) => Ok(format!("{x}; {y}")),
        (Err(x), Ok(_)) | (Ok(_), Err(x)) => Err(x),
        (Err(x), Err(y)) => Err(format!("{x}; {y}")),
    }
}

fn closures() -> Check {
    let mut parts = Vec::new();
    for (name, f) in [
        (
            "isotomic",
            common::isotomic_closure as fn(usize, u64) -> Result<usize, String>,
        ),
        ("power", common::power_closure),
        ("a^r F^q", common::side_power_closure),
        ("isogonal/isotomic hyperbolic", common::conjugate_closure),
    ] {
        let n = f(50, 3).map_err(|e| format!("{name} closure: {e}"))?;
        parts.push(format!("{name} {n}"));
    }
    Ok(parts.join(", "))
}

fn kernels() -> Check {
    common::squared_distance_oracle(1000, 13).map_err(|e| format!("squared distance: {e}"))?;
    let (conf, rand) = common::spear_oracle(500, 17).map_err(|e| format!("spear: {e}"))?;
    let hyp = common::hyperboloid_oracle(200, 19).map_err(|e| format!("hyperboloid: {e}"))?;
    Ok(format!("1000 distances; 500 spear triples ({conf} conforming, {rand} not); {hyp} hyperboloid centers"))
}

fn determinism() -> Check {
    let cat = builtin_catalog();
    let prec = Precision::default();
    let a = verify_all(&[], None, 7, cat, &prec).map_err(|e| e.to_string())?;
    let b = verify_all(&[], None, 7, cat, &prec).map_err(|e| e.to_string())?;
    let (ja, jb) = (a.to_json(), b.to_json());
    if ja == jb && a.to_markdown() == b.to_markdown() && a.to_csv() == b.to_csv() {
        Ok(format!("{} bytes identical", ja.len()))
    } else {
        Err("reports differ between runs".into())
    }
}

fn main() -> ExitCode {
    let criteria: Vec<(u8, &str, Box<dyn Fn() -> Check>)> = vec![
        (
            1,
            "centroid central tetrahedron on general tetrahedra",
            Box::new(|| cases(|id| id.starts_with("general-centroid-"))),
        ),
        (
            2,
            "normals at circumcenters concur",
            Box::new(|| cases(|id| id == "general-circumcenter-normals-concur")),
        ),
        (
            3,
            "power points form hyperbolic groups",
            Box::new(|| cases(|id| id == "general-power-points-hyperbolic")),
        ),
        (
            4,
            "2a^r+b^r+c^r shares the centroid",
            Box::new(|| cases(|id| id == "general-2ar-br-cr-shared-centroid")),
        ),
        (
            5,
            "isosceles tetrahedra, full rational catalog",
            Box::new(|| cases(|id| id.starts_with("isosceles-"))),
        ),
        (
            6,
            "circumscriptible tetrahedra",
            Box::new(|| cases(|id| id.starts_with("circumscriptible-"))),
        ),
        (
            7,
            "isodynamic tetrahedra",
            Box::new(|| cases(|id| id.starts_with("isodynamic-"))),
        ),
        (
            8,
            "orthocentric tetrahedra",
            Box::new(|| cases(|id| id.starts_with("orthocentric-"))),
        ),
        (9, "closure invariants", Box::new(closures)),
        (
            10,
            "Feuerbach determinant and planarity impossibility",
            Box::new(|| {
                both(
                    cases(|id| id.starts_with("feuerbach-determinant-")),
                    hunt(Claim::PlanarityImpossibility),
                )
            }),
        ),
        (
            11,
            "two-face normals biconditional",
            Box::new(|| cases(|id| id == "tabov-biconditional")),
        ),
        (
            12,
            "uniqueness falsification",
            Box::new(|| {
                both(
                    hunt(Claim::CentroidUniqueness),
                    hunt(Claim::PowerUniqueness),
                )
            }),
        ),
        (13, "kernel oracles", Box::new(kernels)),
        (
            14,
            "determinism of verify all --seed 7",
            Box::new(determinism),
        ),
    ];

    let mut unexpected = Vec::new();
    let (mut pass, mut fail) = (0, 0);
    for (n, title, run) in &criteria {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        let known = KNOWN_FAILING.iter().find(|(k, _)| k == n);
        if result.is_ok() {
            pass += 1;
        } else {
            fail += 1;
        }
        match (&result, known) {
            (Ok(detail), None) => {
                println!("criterion {n:>2}: PASS  {title} — {detail} [{secs:.1}s]")
            }
            (Err(detail), Some((_, why))) => {
                println!("criterion {n:>2}: FAIL  {title} — {detail} [{secs:.1}s]");
                println!("               known failure: {why}");
            }
            (Ok(detail), Some(_)) => {
                println!(
                    "criterion {n:>2}: PASS  {title} — {detail} [{secs:.1}s] (listed as failing)"
                );
                unexpected.push(*n);
            }
            (Err(detail), None) => {
                println!("criterion {n:>2}: FAIL  {title} — {detail} [{secs:.1}s]");
                unexpected.push(*n);
            }
        }
    }
    println!(
        "acceptance: {pass} pass, {fail} fail, {} unexpected",
        unexpected.len()
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
