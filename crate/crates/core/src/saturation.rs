//! Saturation conditions, the saturation verdict with certificates, the
//! adversarial preference constructor, and the perfect-matching verdicts.
//!
//! For a vertex `x` the two conditions are
//!
//! 1. `|N(N(x))| <= |N(x)|`
//! 2. some `y` in `N(x)` has degree 1.
//!
//! A non-isolated vertex meeting either one is matched in every stable
//! matching of every preference instance. A vertex failing both can be left
//! unmatched in every stable matching of a suitably chosen instance, provided
//! its neighbors can be matched into its competitors `N(N(x)) - x`; see
//! [`adversarial_instance`].

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BipartiteGraph, GraphError, Side, VertexId};
use crate::preferences::PreferenceInstance;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{vertex} is isolated; it is unmatched under every instance")]
    Isolated { vertex: VertexId },
    #[error("{vertex} satisfies condition (1): |N(N(x))| = {nn_size} <= |N(x)| = {n_size}")]
    SatisfiesCondition1 { vertex: VertexId, n_size: usize, nn_size: usize },
    #[error("{vertex} satisfies condition (2): witness {witness} has degree 1")]
    SatisfiesCondition2 { vertex: VertexId, witness: VertexId },
    #[error(
        "{vertex} is matched in every stable matching of every instance: neighbors {} have only {} as other partners",
        join(deficient), join(competitors)
    )]
    HallObstruction { vertex: VertexId, deficient: Vec<VertexId>, competitors: Vec<VertexId> },
    #[error("graph is not connected; use the component-wise verdict")]
    NotConnected,
    #[error("sides are unbalanced ({x_count} vs {y_count})")]
    Unbalanced { x_count: usize, y_count: usize },
}

fn join(vs: &[VertexId]) -> String {
    let parts: Vec<String> = vs.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Condition (1) for one vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition1 {
    pub holds: bool,
    pub n_size: usize,
    pub nn_size: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexConditionReport {
    pub vertex: VertexId,
    pub n_size: usize,
    pub nn_size: usize,
    pub cond1: bool,
    pub cond2_witness: Option<VertexId>,
    /// Condition (1) or (2) holds and the vertex is not isolated.
    pub satisfied: bool,
    pub isolated: bool,
}

/// `N(N(v))` as indices on `v`'s own side, ascending.
fn second_neighborhood(g: &BipartiteGraph, v: VertexId) -> Vec<usize> {
    let other = v.side.opposite();
    let mut seen = vec![false; g.side_len(v.side)];
    for &a in g.adjacent(v) {
        for &b in g.adjacent(VertexId::new(other, a)) {
            seen[b] = true;
        }
    }
    seen.iter().enumerate().filter(|(_, &s)| s).map(|(i, _)| i).collect()
}

pub fn check_condition1(g: &BipartiteGraph, v: VertexId) -> Result<Condition1, AnalysisError> {
    g.check(v)?;
    let n_size = g.adjacent(v).len();
    let nn_size = second_neighborhood(g, v).len();
    Ok(Condition1 { holds: nn_size <= n_size, n_size, nn_size })
}

/// The lowest-index neighbor of degree 1, if any.
pub fn check_condition2(g: &BipartiteGraph, v: VertexId) -> Result<Option<VertexId>, AnalysisError> {
    g.check(v)?;
    let other = v.side.opposite();
    Ok(g.adjacent(v).iter().map(|&a| VertexId::new(other, a)).find(|&a| g.adjacent(a).len() == 1))
}

pub fn vertex_report(g: &BipartiteGraph, v: VertexId) -> Result<VertexConditionReport, AnalysisError> {
    let c1 = check_condition1(g, v)?;
    let witness = check_condition2(g, v)?;
    let isolated = c1.n_size == 0;
    Ok(VertexConditionReport {
        vertex: v,
        n_size: c1.n_size,
        nn_size: c1.nn_size,
        cond1: c1.holds,
        cond2_witness: witness,
        satisfied: !isolated && (c1.holds || witness.is_some()),
        isolated,
    })
}

/// A vertex and an instance under which it is unmatched in every stable matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub vertex: VertexId,
    pub instance: PreferenceInstance,
}

/// Does every stable matching saturate `side` under every preference instance?
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationVerdict {
    pub side: Side,
    /// No vertex of `side` is isolated and each one meets condition (1) or (2).
    pub holds: bool,
    pub reports: Vec<VertexConditionReport>,
    /// Built for the first failing non-isolated vertex that admits one.
    pub counterexample: Option<Counterexample>,
    /// Failing vertices for which no adversarial instance exists because their
    /// neighbors cannot all be matched into distinct competitors.
    pub obstructed: Vec<VertexId>,
}

impl SaturationVerdict {
    pub fn failing(&self) -> impl Iterator<Item = &VertexConditionReport> {
        self.reports.iter().filter(|r| !r.satisfied)
    }
}

pub fn saturation_verdict(g: &BipartiteGraph, side: Side) -> SaturationVerdict {
    let reports: Vec<_> =
        g.vertices(side).map(|v| vertex_report(g, v).expect("vertex from the graph itself")).collect();
    let holds = reports.iter().all(|r| r.satisfied);
    let mut counterexample = None;
    let mut obstructed = Vec::new();
    for r in reports.iter().filter(|r| !r.satisfied && !r.isolated) {
        match adversarial_instance(g, r.vertex) {
            Ok(instance) => {
                if counterexample.is_none() {
                    counterexample = Some(Counterexample { vertex: r.vertex, instance });
                }
            }
            Err(AnalysisError::HallObstruction { .. }) => obstructed.push(r.vertex),
            Err(e) => unreachable!("failing vertex rejected by constructor: {e}"),
        }
    }
    SaturationVerdict { side, holds, reports, counterexample, obstructed }
}

/// Builds a preference instance under which `v` is unmatched in every stable
/// matching.
///
/// Let `A = N(v)` and let the competitors be `C = N(N(v)) - v`. The instance
/// satisfies:
///
/// * every `a` in `A` ranks all of its competitors above `v`;
/// * every `c` in `C` ranks all of its neighbors inside `A` above those outside.
///
/// Within those blocks the order is not free. A matching `μ` of `A` into
/// distinct competitors is fixed first, and each pair `(a, μ(a))` is made a
/// pair of mutual first choices; everything else follows ascending index.
/// Mutual first choices are together in every stable matching, so every `a`
/// is taken and `v` stays unmatched. When no such `μ` exists (some subset of
/// `A` has fewer competitors than members) `v` is matched in every stable
/// matching of every instance, and this returns
/// [`AnalysisError::HallObstruction`].
pub fn adversarial_instance(g: &BipartiteGraph, v: VertexId) -> Result<PreferenceInstance, AnalysisError> {
    let report = vertex_report(g, v)?;
    if report.isolated {
        return Err(AnalysisError::Isolated { vertex: v });
    }
    if report.cond1 {
        return Err(AnalysisError::SatisfiesCondition1 {
            vertex: v,
            n_size: report.n_size,
            nn_size: report.nn_size,
        });
    }
    if let Some(witness) = report.cond2_witness {
        return Err(AnalysisError::SatisfiesCondition2 { vertex: v, witness });
    }

    let own = v.side;
    let other = own.opposite();
    let options = g.adjacent(v);
    let competitors: Vec<usize> = second_neighborhood(g, v).into_iter().filter(|&c| c != v.index).collect();

    let assignment = match match_into_competitors(g, v) {
        Ok(a) => a,
        Err(deficient) => {
            let mut rivals = BTreeSet::new();
            for &a in &deficient {
                rivals.extend(g.adjacent(VertexId::new(other, a)).iter().copied().filter(|&c| c != v.index));
            }
            return Err(AnalysisError::HallObstruction {
                vertex: v,
                deficient: deficient.into_iter().map(|a| VertexId::new(other, a)).collect(),
                competitors: rivals.into_iter().map(|c| VertexId::new(own, c)).collect(),
            });
        }
    };
    let partner_of_competitor: HashMap<usize, usize> = assignment.iter().map(|(&a, &c)| (c, a)).collect();

    let mut lists = [g.side_adjacency(Side::X).to_vec(), g.side_adjacency(Side::Y).to_vec()];

    // Options of v: assigned competitor first, other competitors ascending, v last.
    for &a in options {
        let mut list: Vec<usize> = Vec::with_capacity(g.adjacent(VertexId::new(other, a)).len());
        let first = assignment[&a];
        list.push(first);
        list.extend(
            g.adjacent(VertexId::new(other, a)).iter().copied().filter(|&c| c != v.index && c != first),
        );
        list.push(v.index);
        lists[other.slot()][a] = list;
    }

    // Competitors: neighbors inside N(v) before those outside, with the
    // assigned option (if any) leading.
    for &c in &competitors {
        let adj = g.adjacent(VertexId::new(own, c));
        let lead = partner_of_competitor.get(&c).copied();
        let mut list: Vec<usize> = Vec::with_capacity(adj.len());
        list.extend(lead);
        list.extend(adj.iter().copied().filter(|&a| options.binary_search(&a).is_ok() && Some(a) != lead));
        list.extend(adj.iter().copied().filter(|&a| options.binary_search(&a).is_err()));
        lists[own.slot()][c] = list;
    }

    Ok(PreferenceInstance::from_trusted(g, lists))
}

/// Matches every neighbor of `v` to a distinct competitor (a vertex of
/// `N(N(v)) - v`) by augmenting paths. On failure returns a set of neighbors
/// with fewer competitors than members.
fn match_into_competitors(g: &BipartiteGraph, v: VertexId) -> Result<HashMap<usize, usize>, Vec<usize>> {
    let other = v.side.opposite();
    let options = g.adjacent(v);
    let rivals =
        |a: usize| g.adjacent(VertexId::new(other, a)).iter().copied().filter(move |&c| c != v.index);

    let mut holder: HashMap<usize, usize> = HashMap::new(); // competitor -> option
    for &root in options {
        let mut visited_options = vec![root];
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        if !augment(root, &rivals, &mut holder, &mut seen, &mut visited_options) {
            // Everything reachable from `root` by alternating paths is a deficient set.
            visited_options.sort_unstable();
            visited_options.dedup();
            return Err(visited_options);
        }
    }
    Ok(holder.into_iter().map(|(c, a)| (a, c)).collect())
}

fn augment<I: Iterator<Item = usize>>(
    a: usize,
    rivals: &impl Fn(usize) -> I,
    holder: &mut HashMap<usize, usize>,
    seen: &mut BTreeSet<usize>,
    visited_options: &mut Vec<usize>,
) -> bool {
    for c in rivals(a) {
        if !seen.insert(c) {
            continue;
        }
        match holder.get(&c).copied() {
            None => {
                holder.insert(c, a);
                return true;
            }
            Some(prev) => {
                visited_options.push(prev);
                if augment(prev, rivals, holder, seen, visited_options) {
                    holder.insert(c, a);
                    return true;
                }
            }
        }
    }
    false
}

/// Verdict on a connected balanced graph: are all stable matchings perfect
/// for all instances? Holds exactly for complete bipartite graphs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletenessVerdict {
    pub holds: bool,
    /// A non-edge `(x, y)` when the graph is not complete.
    pub missing_edge: Option<(VertexId, VertexId)>,
}

pub fn completeness_verdict(g: &BipartiteGraph) -> Result<CompletenessVerdict, AnalysisError> {
    if g.x_count() != g.y_count() || g.x_count() == 0 {
        return Err(AnalysisError::Unbalanced { x_count: g.x_count(), y_count: g.y_count() });
    }
    if !g.is_connected() {
        return Err(AnalysisError::NotConnected);
    }
    let missing_edge = g.missing_edge().map(|(x, y)| (VertexId::x(x), VertexId::y(y)));
    Ok(CompletenessVerdict { holds: missing_edge.is_none(), missing_edge })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub x: Vec<VertexId>,
    pub y: Vec<VertexId>,
    pub biclique: bool,
    pub balanced: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentVerdict {
    pub holds: bool,
    pub components: Vec<ComponentSummary>,
}

/// Component-wise perfection verdict for a graph with `|X| = |Y|`: holds iff
/// every component is a biclique with equally many X and Y vertices.
///
/// Requiring only bicliques is not enough: `K_{1,2} + K_{2,1}` is balanced
/// overall and made of bicliques, yet every stable matching leaves a vertex of
/// the `K_{1,2}` unmatched.
pub fn component_verdict(g: &BipartiteGraph) -> Result<ComponentVerdict, AnalysisError> {
    if g.x_count() != g.y_count() {
        return Err(AnalysisError::Unbalanced { x_count: g.x_count(), y_count: g.y_count() });
    }
    let components: Vec<_> = g
        .components()
        .into_iter()
        .map(|c| ComponentSummary {
            x: c.x_map.iter().map(|&i| VertexId::x(i)).collect(),
            y: c.y_map.iter().map(|&i| VertexId::y(i)).collect(),
            biclique: c.graph.is_biclique(),
            balanced: c.graph.x_count() == c.graph.y_count(),
        })
        .collect();
    let holds = components.iter().all(|c| c.biclique && c.balanced);
    Ok(ComponentVerdict { holds, components })
}

/// Both sides saturated in every stable matching of every instance.
pub fn perfect_verdict(g: &BipartiteGraph) -> bool {
    Side::BOTH
        .iter()
        .all(|&s| g.vertices(s).all(|v| vertex_report(g, v).map(|r| r.satisfied).unwrap_or(false)))
}
