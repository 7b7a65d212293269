use std::path::Path;

use satmatch_core::{
    adversarial_instance, completeness_verdict, component_verdict, deferred_acceptance, enumerate_stable,
    find_blocking_pairs, perfect_verdict, saturation_verdict, AnalysisError, MatchingError,
    PreferenceInstance, Side, VertexId,
};

use crate::error::CliError;
use crate::market::{Market, MarketFile};
use crate::report::*;

/// A finished command: its report, the process exit code (0 or 1) and, for
/// `adversary`, the market it emitted.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: u8,
    pub emitted: Option<MarketFile>,
}

impl Outcome {
    fn new(report: Report, positive: bool) -> Self {
        Outcome { report, exit_code: if positive { 0 } else { 1 }, emitted: None }
    }
}

fn names(m: &Market, vs: impl IntoIterator<Item = VertexId>) -> Vec<String> {
    vs.into_iter().map(|v| m.name(v).to_string()).collect()
}

fn pair(m: &Market, x: usize, y: usize) -> Pair {
    (m.x_names[x].clone(), m.y_names[y].clone())
}

fn require_preferences(market: &Market) -> Result<&PreferenceInstance, CliError> {
    market
        .preferences
        .as_ref()
        .ok_or_else(|| CliError::Usage("the market file has no [preferences] block".into()))
}

pub fn analyze_market(market: &Market, side: Side) -> AnalyzeReport {
    let g = &market.graph;
    let verdict = saturation_verdict(g, side);
    let vertices = verdict
        .reports
        .iter()
        .map(|r| VertexRow {
            name: market.name(r.vertex).to_string(),
            n_size: r.n_size,
            nn_size: r.nn_size,
            cond1: r.cond1,
            witness: r.cond2_witness.map(|w| market.name(w).to_string()),
            satisfied: r.satisfied,
            isolated: r.isolated,
        })
        .collect();
    let counterexample = verdict.counterexample.as_ref().map(|cx| CounterexampleReport {
        vertex: market.name(cx.vertex).to_string(),
        preferences: market.preference_block(&cx.instance),
    });
    let components = component_verdict(g).ok().map(|c| ComponentsReport {
        holds: c.holds,
        components: c
            .components
            .iter()
            .map(|row| ComponentRow {
                x: names(market, row.x.iter().copied()),
                y: names(market, row.y.iter().copied()),
                biclique: row.biclique,
                balanced: row.balanced,
            })
            .collect(),
    });
    let complete = completeness_verdict(g).ok().map(|c| CompleteReport {
        holds: c.holds,
        missing_edge: c.missing_edge.map(|(x, y)| pair(market, x.index, y.index)),
    });
    let classes = market.compatibility.as_ref().map(|c| {
        let verdict = c.market.class_verdict();
        ClassReport {
            holds: verdict.holds,
            classes: verdict
                .classes
                .iter()
                .map(|s| ClassRow { name: c.names[s.class].clone(), a_size: s.a_size, b_size: s.b_size })
                .collect(),
            consistent: c.market.verdict_consistency().consistent,
        }
    });
    AnalyzeReport {
        side,
        holds: verdict.holds,
        vertices,
        counterexample,
        obstructed: names(market, verdict.obstructed.iter().copied()),
        perfect: perfect_verdict(g),
        components,
        complete,
        classes,
    }
}

pub fn cmd_analyze(path: &Path, side: Side) -> Result<Outcome, CliError> {
    let market = Market::load(path)?;
    let report = analyze_market(&market, side);
    let holds = report.holds;
    Ok(Outcome::new(Report::Analyze(report), holds))
}

pub fn match_market(market: &Market, proposing: Side) -> Result<MatchReport, CliError> {
    let p = require_preferences(market)?;
    let g = &market.graph;
    let m = deferred_acceptance(g, p, proposing);
    let blocking = find_blocking_pairs(g, p, &m);
    let unmatched = |side: Side| names(market, g.vertices(side).filter(|&v| m.partner(v).is_none()));
    Ok(MatchReport {
        proposing,
        pairs: m.pairs().map(|(x, y)| pair(market, x, y)).collect(),
        matched_x: names(market, m.matched_set(Side::X)),
        matched_y: names(market, m.matched_set(Side::Y)),
        unmatched_x: unmatched(Side::X),
        unmatched_y: unmatched(Side::Y),
        stable: blocking.is_empty(),
        blocking_pairs: blocking.iter().map(|b| pair(market, b.x, b.y)).collect(),
    })
}

pub fn cmd_match(path: &Path, proposing: Side) -> Result<Outcome, CliError> {
    let market = Market::load(path)?;
    let report = match_market(&market, proposing)?;
    let stable = report.stable;
    Ok(Outcome::new(Report::Match(report), stable))
}

fn cap_error(e: MatchingError) -> CliError {
    match e {
        MatchingError::CapExceeded { .. } => CliError::Cap(e.to_string()),
        other => CliError::Invalid(other.to_string()),
    }
}

pub fn enumerate_market(market: &Market, cap: u64) -> Result<EnumerateReport, CliError> {
    let p = require_preferences(market)?;
    let set = enumerate_stable(&market.graph, p, cap).map_err(cap_error)?;
    Ok(EnumerateReport {
        matchings: set
            .matchings
            .iter()
            .map(|m| m.pairs().map(|(x, y)| pair(market, x, y)).collect())
            .collect(),
        matched_x: names(market, set.matched_x.iter().copied()),
        matched_y: names(market, set.matched_y.iter().copied()),
        visited: set.visited,
    })
}

pub fn cmd_enumerate(path: &Path, cap: u64) -> Result<Outcome, CliError> {
    let market = Market::load(path)?;
    Ok(Outcome::new(Report::Enumerate(enumerate_market(&market, cap)?), true))
}

/// Builds the adversarial instance for `target`. Returns the report and, when
/// one was built, the market carrying it.
pub fn adversary_market(market: &Market, target: VertexId, cap: u64) -> (AdversaryReport, Option<Market>) {
    let target_name = market.name(target).to_string();
    match adversarial_instance(&market.graph, target) {
        Ok(p) => {
            let confirmation = enumerate_stable(&market.graph, &p, cap).ok().map(|set| Confirmation {
                stable_matchings: set.matchings.len(),
                target_unmatched_in_all: set.matchings.iter().all(|m| m.partner(target).is_none()),
            });
            let out = market.with_preferences(p);
            let report = AdversaryReport {
                target: target_name,
                constructed: true,
                reason: None,
                preferences: out.preferences.as_ref().map(|p| out.preference_block(p)),
                confirmation,
                written_to: None,
            };
            (report, Some(out))
        }
        Err(e) => {
            let reason = match e {
                AnalysisError::SatisfiesCondition1 { n_size, nn_size, .. } => {
                    format!("condition (1) holds: |N(N({target_name}))| = {nn_size} <= |N({target_name})| = {n_size}")
                }
                AnalysisError::SatisfiesCondition2 { witness, .. } => {
                    format!("condition (2) witness {}", market.name(witness))
                }
                AnalysisError::Isolated { .. } => format!("{target_name} is isolated and never matched"),
                AnalysisError::HallObstruction { deficient, competitors, .. } => format!(
                    "{target_name} is matched in every stable matching: {} can only be taken by {}",
                    names(market, deficient).join(", "),
                    names(market, competitors).join(", ")
                ),
                other => other.to_string(),
            };
            let report = AdversaryReport {
                target: target_name,
                constructed: false,
                reason: Some(reason),
                preferences: None,
                confirmation: None,
                written_to: None,
            };
            (report, None)
        }
    }
}

pub fn cmd_adversary(
    path: &Path,
    target: &str,
    side: Option<Side>,
    out: Option<&Path>,
    cap: u64,
) -> Result<Outcome, CliError> {
    let market = Market::load(path)?;
    let v = market.lookup(target, side)?;
    let (mut report, built) = adversary_market(&market, v, cap);
    let Some(built) = built else {
        return Ok(Outcome::new(Report::Adversary(report), false));
    };
    let file = built.to_file();
    if let Some(out) = out {
        std::fs::write(out, file.to_toml())
            .map_err(|source| CliError::Io { path: out.display().to_string(), source })?;
        report.written_to = Some(out.display().to_string());
    }
    let confirmed = report.confirmation.as_ref().is_none_or(|c| c.target_unmatched_in_all);
    Ok(Outcome {
        report: Report::Adversary(report),
        exit_code: if confirmed { 0 } else { 1 },
        emitted: Some(file),
    })
}
