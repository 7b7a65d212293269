//! Command results, printable as text or as JSON.

use std::fmt;

use satmatch_core::Side;
use serde::{Deserialize, Serialize};

use crate::market::PreferenceBlock;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Report {
    Analyze(AnalyzeReport),
    Match(MatchReport),
    Enumerate(EnumerateReport),
    Adversary(AdversaryReport),
    Verify(VerifyReport),
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }
}

pub type Pair = (String, String);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRow {
    pub name: String,
    pub n_size: usize,
    pub nn_size: usize,
    pub cond1: bool,
    pub witness: Option<String>,
    pub satisfied: bool,
    pub isolated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub vertex: String,
    pub preferences: PreferenceBlock,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentRow {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub biclique: bool,
    pub balanced: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentsReport {
    pub holds: bool,
    pub components: Vec<ComponentRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompleteReport {
    pub holds: bool,
    pub missing_edge: Option<Pair>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRow {
    pub name: String,
    pub a_size: usize,
    pub b_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassReport {
    pub holds: bool,
    pub classes: Vec<ClassRow>,
    /// False only when the class sizes pass but a vertex fails both conditions.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub side: Side,
    pub holds: bool,
    pub vertices: Vec<VertexRow>,
    pub counterexample: Option<CounterexampleReport>,
    pub obstructed: Vec<String>,
    pub perfect: bool,
    pub components: Option<ComponentsReport>,
    pub complete: Option<CompleteReport>,
    pub classes: Option<ClassReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchReport {
    pub proposing: Side,
    pub pairs: Vec<Pair>,
    pub matched_x: Vec<String>,
    pub matched_y: Vec<String>,
    pub unmatched_x: Vec<String>,
    pub unmatched_y: Vec<String>,
    pub stable: bool,
    pub blocking_pairs: Vec<Pair>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerateReport {
    pub matchings: Vec<Vec<Pair>>,
    pub matched_x: Vec<String>,
    pub matched_y: Vec<String>,
    pub visited: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confirmation {
    pub stable_matchings: usize,
    pub target_unmatched_in_all: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryReport {
    pub target: String,
    pub constructed: bool,
    /// Why no instance was built, when `constructed` is false.
    pub reason: Option<String>,
    pub preferences: Option<PreferenceBlock>,
    /// Exhaustive check of the built instance, when within the node cap.
    pub confirmation: Option<Confirmation>,
    pub written_to: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub graphs: u64,
    pub instances: u64,
    pub matchings: u64,
    pub discrepancies: u64,
    pub millis: u64,
    pub notes: Vec<String>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {}: {} (graphs {}, instances {}, matchings {}, discrepancies {}, {} ms)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.graphs,
            self.instances,
            self.matchings,
            self.discrepancies,
            self.millis
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn pairs(ps: &[Pair]) -> String {
    let parts: Vec<String> = ps.iter().map(|(a, b)| format!("({a}, {b})")).collect();
    format!("{{{}}}", parts.join(", "))
}

fn names(ns: &[String]) -> String {
    format!("{{{}}}", ns.join(", "))
}

fn write_preferences(f: &mut fmt::Formatter<'_>, p: &PreferenceBlock) -> fmt::Result {
    for (v, list) in p.x.iter().chain(&p.y) {
        writeln!(f, "    {v}: {}", list.join(" > "))?;
    }
    Ok(())
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Report::Analyze(r) => r.fmt(f),
            Report::Match(r) => r.fmt(f),
            Report::Enumerate(r) => r.fmt(f),
            Report::Adversary(r) => r.fmt(f),
            Report::Verify(r) => r.fmt(f),
        }
    }
}

impl fmt::Display for AnalyzeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}-side conditions:", self.side)?;
        writeln!(f, "  {:<10} {:>5} {:>8} {:>6} {:<10} status", "vertex", "|N|", "|N(N)|", "(1)", "(2)")?;
        for row in &self.vertices {
            let status = if row.isolated {
                "isolated"
            } else if row.satisfied {
                "ok"
            } else {
                "FAILS"
            };
            writeln!(
                f,
                "  {:<10} {:>5} {:>8} {:>6} {:<10} {}",
                row.name,
                row.n_size,
                row.nn_size,
                yes(row.cond1),
                row.witness.as_deref().unwrap_or("-"),
                status
            )?;
        }
        writeln!(
            f,
            "every stable matching is {}-saturating for all preferences: {}",
            self.side,
            yes(self.holds)
        )?;
        if let Some(cx) = &self.counterexample {
            writeln!(f, "counterexample: {} is unmatched in every stable matching under", cx.vertex)?;
            write_preferences(f, &cx.preferences)?;
        }
        if !self.obstructed.is_empty() {
            writeln!(
                f,
                "no adversarial instance exists for {} (neighbors cannot all be taken by competitors)",
                names(&self.obstructed)
            )?;
        }
        writeln!(f, "every stable matching is perfect for all preferences: {}", yes(self.perfect))?;
        if let Some(c) = &self.complete {
            match &c.missing_edge {
                None => writeln!(f, "connected and complete: yes")?,
                Some((x, y)) => writeln!(f, "connected and complete: no (missing edge {x}-{y})")?,
            }
        }
        if let Some(c) = &self.components {
            writeln!(f, "every component a balanced biclique: {}", yes(c.holds))?;
            for row in &c.components {
                writeln!(
                    f,
                    "  component X={} Y={} biclique={} balanced={}",
                    names(&row.x),
                    names(&row.y),
                    yes(row.biclique),
                    yes(row.balanced)
                )?;
            }
        }
        if let Some(c) = &self.classes {
            writeln!(f, "class sizes |B_i| >= |A_i| for all classes: {}", yes(c.holds))?;
            for row in &c.classes {
                writeln!(f, "  class {}: |A| = {}, |B| = {}", row.name, row.a_size, row.b_size)?;
            }
            writeln!(f, "class verdict consistent with vertex conditions: {}", yes(c.consistent))?;
        }
        Ok(())
    }
}

impl fmt::Display for MatchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}-proposing deferred acceptance: {}", self.proposing, pairs(&self.pairs))?;
        writeln!(f, "matched X: {}", names(&self.matched_x))?;
        writeln!(f, "matched Y: {}", names(&self.matched_y))?;
        writeln!(f, "unmatched X: {}", names(&self.unmatched_x))?;
        writeln!(f, "unmatched Y: {}", names(&self.unmatched_y))?;
        writeln!(f, "stable: {}", yes(self.stable))?;
        if !self.blocking_pairs.is_empty() {
            writeln!(f, "blocking pairs: {}", pairs(&self.blocking_pairs))?;
        }
        Ok(())
    }
}

impl fmt::Display for EnumerateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} stable matchings ({} search nodes)", self.matchings.len(), self.visited)?;
        for (i, m) in self.matchings.iter().enumerate() {
            writeln!(f, "  {}: {}", i + 1, pairs(m))?;
        }
        writeln!(f, "matched X in every stable matching: {}", names(&self.matched_x))?;
        writeln!(f, "matched Y in every stable matching: {}", names(&self.matched_y))
    }
}

impl fmt::Display for AdversaryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.constructed {
            return writeln!(
                f,
                "no adversarial instance for {}: {}",
                self.target,
                self.reason.as_deref().unwrap_or("unknown reason")
            );
        }
        writeln!(f, "preferences leaving {} unmatched in every stable matching:", self.target)?;
        if let Some(p) = &self.preferences {
            write_preferences(f, p)?;
        }
        match &self.confirmation {
            Some(c) => writeln!(
                f,
                "confirmed by enumeration: {} stable matchings, {} unmatched in all: {}",
                c.stable_matchings,
                self.target,
                yes(c.target_unmatched_in_all)
            )?,
            None => writeln!(f, "not confirmed: enumeration exceeded the node cap")?,
        }
        if let Some(path) = &self.written_to {
            writeln!(f, "market written to {path}")?;
        }
        Ok(())
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.criteria {
            writeln!(f, "{}", c.line())?;
            for note in &c.notes {
                writeln!(f, "    {note}")?;
            }
        }
        writeln!(f, "{}", if self.passed { "all criteria passed" } else { "VERIFICATION FAILED" })
    }
}
