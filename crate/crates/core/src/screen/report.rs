//! JSON, CSV and Markdown renderings. None of them carries timing, so equal
//! inputs give byte-identical output.

use std::fmt::Write as _;

use super::{CaseStatus, HuntReport, HuntResult, ScreenReport, VerifyReport};

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn md_escape(s: &str) -> String {
    s.replace('|', "\\|")
}

impl ScreenReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        csv_string(
            &[
                "center",
                "property",
                "name",
                "status",
                "holds_exact",
                "holds_numeric",
                "fails",
                "undecided",
                "degenerate",
                "skipped",
            ],
            self.cells.iter().map(|c| {
                let t = &c.tally;
                vec![
                    c.center.clone(),
                    c.property.number().to_string(),
                    c.property_name.to_string(),
                    c.status.describe(t.total()),
                    t.holds_exact.to_string(),
                    t.holds_numeric.to_string(),
                    t.fails.to_string(),
                    t.undecided.to_string(),
                    t.degenerate.to_string(),
                    t.skipped.to_string(),
                ]
            }),
        )
    }

    pub fn to_markdown(&self) -> String {
        let mut props: Vec<_> = Vec::new();
        let mut centers: Vec<&str> = Vec::new();
        for c in &self.cells {
            if !props.contains(&c.property) {
                props.push(c.property);
            }
            if !centers.contains(&c.center.as_str()) {
                centers.push(&c.center);
            }
        }
        let mut s = format!(
            "# Screen: {} tetrahedra\n\n{} instances, seed {}, precision cap {} bits.\n\n| center |",
            self.family, self.n, self.seed, self.precision_cap
        );
        for p in &props {
            let _ = write!(s, " {} {} |", p, p.name());
        }
        s.push_str("\n|---|");
        s.push_str(&"---|".repeat(props.len()));
        s.push('\n');
        for center in &centers {
            let _ = write!(s, "| {} |", md_escape(center));
            for p in &props {
                let cell = self
                    .cells
                    .iter()
                    .find(|c| c.center == *center && c.property == *p)
                    .unwrap();
                let t = &cell.tally;
                let _ = write!(
                    s,
                    " {} ({}/{}) |",
                    cell.status.describe(t.total()),
                    t.holds(),
                    t.total()
                );
            }
            s.push('\n');
        }
        let witnesses: Vec<_> = self
            .cells
            .iter()
            .filter_map(|c| c.witness.as_ref().map(|w| (c, w)))
            .collect();
        if !witnesses.is_empty() {
            s.push_str("\n## Failing witnesses\n\n");
            for (c, w) in witnesses {
                let _ = writeln!(
                    s,
                    "- {} {}: instance {} `{}`",
                    md_escape(&c.center),
                    c.property,
                    w.instance,
                    w.edges
                );
            }
        }
        s
    }
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        csv_string(
            &[
                "case",
                "family",
                "status",
                "mode",
                "n",
                "trials",
                "holds_exact",
                "holds_numeric",
                "degenerate_holds",
                "inapplicable",
                "failing",
            ],
            self.cases.iter().map(|c| {
                vec![
                    c.id.clone(),
                    c.family.to_string(),
                    format!("{:?}", c.status).to_lowercase(),
                    c.mode.clone(),
                    c.n.to_string(),
                    c.tally.total().to_string(),
                    c.tally.holds_exact.to_string(),
                    c.tally.holds_numeric.to_string(),
                    c.degenerate_holds.to_string(),
                    c.inapplicable.to_string(),
                    c.failing.to_string(),
                ]
            }),
        )
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!(
            "# Theorem verification\n\nseed {}: {} passed, {} failed, {} skipped.\n",
            self.seed, self.passed, self.failed, self.skipped
        );
        let mut family = None;
        for c in &self.cases {
            if family != Some(c.family) {
                family = Some(c.family);
                let _ = write!(s, "\n## {} tetrahedra\n\n| case | statement | result | mode |\n|---|---|---|---|\n", c.family);
            }
            let result = match c.status {
                CaseStatus::Pass if c.inapplicable > 0 => {
                    format!(
                        "pass ({} trials, {} inapplicable)",
                        c.tally.total(),
                        c.inapplicable
                    )
                }
                CaseStatus::Pass => format!("pass ({} trials)", c.tally.total()),
                CaseStatus::Fail => {
                    format!("FAIL ({} of {} trials)", c.failing.max(1), c.tally.total())
                }
                CaseStatus::Skipped => "skipped".into(),
            };
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} |",
                c.id,
                md_escape(&c.statement),
                result,
                c.mode
            );
        }
        let notes: Vec<_> = self
            .cases
            .iter()
            .filter(|c| c.note.is_some() || !c.observations.is_empty() || !c.failures.is_empty())
            .collect();
        if !notes.is_empty() {
            s.push_str("\n## Notes\n\n");
            for c in notes {
                if let Some(n) = &c.note {
                    let _ = writeln!(s, "- {}: {}", c.id, n);
                }
                for (k, v) in &c.observations {
                    let _ = writeln!(s, "- {}: {} — {}", c.id, k, v);
                }
                for f in &c.failures {
                    let _ = writeln!(
                        s,
                        "- {}: {} on instance {} `{}`: {}",
                        c.id,
                        f.center.as_deref().unwrap_or("-"),
                        f.instance,
                        f.edges,
                        f.reason
                    );
                }
            }
        }
        s
    }
}

impl HuntReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        csv_string(
            &["center", "result", "attempt", "edges"],
            self.results.iter().map(|r| match r {
                HuntResult::Witness {
                    center,
                    attempt,
                    edges,
                    ..
                } => {
                    vec![
                        center.clone(),
                        "witness".into(),
                        attempt.to_string(),
                        edges.to_string(),
                    ]
                }
                HuntResult::Exhausted { center, attempts } => {
                    vec![
                        center.clone().unwrap_or_default(),
                        "exhausted".into(),
                        attempts.to_string(),
                        String::new(),
                    ]
                }
                HuntResult::Excluded { center, reason } => {
                    vec![
                        center.clone(),
                        format!("excluded: {reason}"),
                        String::new(),
                        String::new(),
                    ]
                }
            }),
        )
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!(
            "# Hunt: {}\n\nseed {}, budget {}. {}\n\n",
            self.claim,
            self.seed,
            self.budget,
            match (self.claim.is_conjecture(), self.supported) {
                (true, true) =>
                    "No counterexample found within the budget (no claim is made).".to_string(),
                (true, false) => format!("{} counterexample(s) found.", self.counterexamples),
                (false, true) => "Every non-excluded center was broken.".to_string(),
                (false, false) => format!("Survivors: {}.", self.survivors.join(", ")),
            }
        );
        s.push_str("| center | result |\n|---|---|\n");
        for r in &self.results {
            let (c, what) = match r {
                HuntResult::Witness {
                    center,
                    attempt,
                    edges,
                    ..
                } => (
                    center.clone(),
                    format!("witness at attempt {attempt}: `{edges}`"),
                ),
                HuntResult::Exhausted { center, attempts } => (
                    center.clone().unwrap_or_else(|| "all".into()),
                    format!("exhausted after {attempts}"),
                ),
                HuntResult::Excluded { center, reason } => {
                    (center.clone(), format!("excluded ({reason})"))
                }
            };
            let _ = writeln!(s, "| {} | {} |", md_escape(&c), what);
        }
        s
    }
}
