//! Matchings, deferred acceptance, stability, and exhaustive enumeration of
//! stable matchings.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BipartiteGraph, Side, VertexId};
use crate::preferences::PreferenceInstance;

/// Default ceiling on search nodes visited by `enumerate_stable`.
pub const DEFAULT_NODE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("{x}-{y} is not an edge")]
    NotAnEdge { x: VertexId, y: VertexId },
    #[error("{vertex} appears in two pairs")]
    Overlap { vertex: VertexId },
    #[error("search visited {visited} nodes, exceeding the cap of {cap} (search space up to {estimate} assignments)")]
    CapExceeded { visited: u64, cap: u64, estimate: u128 },
}

/// A set of disjoint edges, stored as mutually consistent partner maps.
///
/// Equality and ordering compare partner maps.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    partner: [Vec<Option<usize>>; 2],
}

impl Matching {
    pub fn empty(g: &BipartiteGraph) -> Self {
        Matching { partner: [vec![None; g.x_count()], vec![None; g.y_count()]] }
    }

    /// Builds a matching from `(x, y)` index pairs, checking edges and disjointness.
    pub fn from_pairs(
        g: &BipartiteGraph,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, MatchingError> {
        let mut m = Self::empty(g);
        for (x, y) in pairs {
            if !g.has_edge(x, y) {
                return Err(MatchingError::NotAnEdge { x: VertexId::x(x), y: VertexId::y(y) });
            }
            if m.partner[0][x].is_some() {
                return Err(MatchingError::Overlap { vertex: VertexId::x(x) });
            }
            if m.partner[1][y].is_some() {
                return Err(MatchingError::Overlap { vertex: VertexId::y(y) });
            }
            m.partner[0][x] = Some(y);
            m.partner[1][y] = Some(x);
        }
        Ok(m)
    }

    fn from_x_partners(y_count: usize, x_partner: Vec<Option<usize>>) -> Self {
        let mut y_partner = vec![None; y_count];
        for (x, p) in x_partner.iter().enumerate() {
            if let Some(y) = *p {
                y_partner[y] = Some(x);
            }
        }
        Matching { partner: [x_partner, y_partner] }
    }

    pub fn partner(&self, v: VertexId) -> Option<VertexId> {
        self.partner[v.side.slot()][v.index].map(|i| VertexId::new(v.side.opposite(), i))
    }

    /// Partner indices of every vertex on one side.
    pub fn partners(&self, side: Side) -> &[Option<usize>] {
        &self.partner[side.slot()]
    }

    /// Matched pairs as `(x, y)` indices in X order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.partner[0].iter().enumerate().filter_map(|(x, p)| p.map(|y| (x, y)))
    }

    pub fn size(&self) -> usize {
        self.partner[0].iter().flatten().count()
    }

    /// The vertices of `side` that have a partner.
    pub fn matched_set(&self, side: Side) -> BTreeSet<VertexId> {
        self.partner[side.slot()]
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_some())
            .map(|(i, _)| VertexId::new(side, i))
            .collect()
    }

    pub fn is_saturating(&self, side: Side) -> bool {
        self.partner[side.slot()].iter().all(Option::is_some)
    }

    pub fn is_perfect(&self) -> bool {
        self.is_saturating(Side::X) && self.is_saturating(Side::Y)
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, y)) in self.pairs().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({}, {})", VertexId::x(x), VertexId::y(y))?;
        }
        f.write_str("}")
    }
}

/// An edge whose endpoints are not matched together but each prefer the other
/// to their current partner (or to being unmatched).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockingPair {
    pub x: usize,
    pub y: usize,
}

/// Gale–Shapley deferred acceptance. The lowest-index free proposer proposes
/// next; the result is the proposing side's optimal stable matching.
pub fn deferred_acceptance(g: &BipartiteGraph, p: &PreferenceInstance, proposing: Side) -> Matching {
    run_deferred_acceptance(g, p, proposing, |free| {
        let lowest = free.iter().enumerate().min_by_key(|(_, &v)| v).map(|(i, _)| i).unwrap();
        free.swap_remove(lowest)
    })
}

/// Deferred acceptance with the next proposer drawn at random from the free
/// set. Any proposal order yields the same matching.
pub fn deferred_acceptance_random_order(
    g: &BipartiteGraph,
    p: &PreferenceInstance,
    proposing: Side,
    seed: u64,
) -> Matching {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    run_deferred_acceptance(g, p, proposing, move |free| {
        let pick = *free.choose(&mut rng).unwrap();
        let at = free.iter().position(|&v| v == pick).unwrap();
        free.swap_remove(at)
    })
}

fn run_deferred_acceptance(
    g: &BipartiteGraph,
    p: &PreferenceInstance,
    proposing: Side,
    mut next: impl FnMut(&mut Vec<usize>) -> usize,
) -> Matching {
    let reviewing = proposing.opposite();
    let lists = p.side_lists(proposing);
    let ranks = p.ranks();
    let mut cursor = vec![0usize; g.side_len(proposing)];
    let mut held: Vec<Option<usize>> = vec![None; g.side_len(reviewing)];
    let mut free: Vec<usize> = (0..g.side_len(proposing)).collect();
    let mut proposals = 0usize;

    while !free.is_empty() {
        let v = next(&mut free);
        let Some(&target) = lists[v].get(cursor[v]) else {
            continue;
        };
        cursor[v] += 1;
        proposals += 1;
        match held[target] {
            None => held[target] = Some(v),
            Some(current) if ranks.prefers(reviewing, target, Some(v), Some(current)) => {
                held[target] = Some(v);
                free.push(current);
            }
            Some(_) => free.push(v),
        }
    }
    debug_assert!(proposals <= g.edge_count());

    let mut partner = [vec![None; g.x_count()], vec![None; g.y_count()]];
    for (r, h) in held.iter().enumerate() {
        if let Some(v) = *h {
            partner[reviewing.slot()][r] = Some(v);
            partner[proposing.slot()][v] = Some(r);
        }
    }
    Matching { partner }
}

/// All blocking pairs of `m`, in `(x, y)` order.
pub fn find_blocking_pairs(g: &BipartiteGraph, p: &PreferenceInstance, m: &Matching) -> Vec<BlockingPair> {
    let ranks = p.ranks();
    g.edges()
        .filter(|&(x, y)| {
            let px = m.partner[0][x];
            px != Some(y)
                && ranks.prefers(Side::X, x, Some(y), px)
                && ranks.prefers(Side::Y, y, Some(x), m.partner[1][y])
        })
        .map(|(x, y)| BlockingPair { x, y })
        .collect()
}

pub fn is_stable(g: &BipartiteGraph, p: &PreferenceInstance, m: &Matching) -> bool {
    let ranks = p.ranks();
    !g.edges().any(|(x, y)| {
        let px = m.partner[0][x];
        px != Some(y)
            && ranks.prefers(Side::X, x, Some(y), px)
            && ranks.prefers(Side::Y, y, Some(x), m.partner[1][y])
    })
}

/// The complete set of stable matchings of one instance, plus the matched
/// vertex sets they all share.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableSet {
    /// Sorted by partner map.
    pub matchings: Vec<Matching>,
    pub matched_x: BTreeSet<VertexId>,
    pub matched_y: BTreeSet<VertexId>,
    /// Search nodes visited.
    pub visited: u64,
}

impl StableSet {
    pub fn matched(&self, side: Side) -> &BTreeSet<VertexId> {
        match side {
            Side::X => &self.matched_x,
            Side::Y => &self.matched_y,
        }
    }

    pub fn all_saturating(&self, side: Side) -> bool {
        self.matchings.iter().all(|m| m.is_saturating(side))
    }
}

/// Enumerates every stable matching by backtracking over X vertices, each
/// assigned a free neighbor or left unmatched. A branch is cut as soon as a
/// pair of already-assigned vertices blocks.
///
/// # Panics
///
/// If two stable matchings match different vertex sets. Every instance has a
/// single matched set across its stable matchings, so this signals an engine bug.
pub fn enumerate_stable(
    g: &BipartiteGraph,
    p: &PreferenceInstance,
    cap: u64,
) -> Result<StableSet, MatchingError> {
    let (matchings, visited) = stable_matchings(g, p, cap)?;
    let matched_x = matchings.first().map(|m| m.matched_set(Side::X)).unwrap_or_default();
    let matched_y = matchings.first().map(|m| m.matched_set(Side::Y)).unwrap_or_default();
    for m in &matchings {
        assert!(
            m.matched_set(Side::X) == matched_x && m.matched_set(Side::Y) == matched_y,
            "stable matchings {} and {} match different vertex sets",
            matchings[0],
            m
        );
    }
    Ok(StableSet { matchings, matched_x, matched_y, visited })
}

/// The same search as [`enumerate_stable`] without the matched-set check:
/// sorted stable matchings and the number of search nodes visited.
pub fn stable_matchings(
    g: &BipartiteGraph,
    p: &PreferenceInstance,
    cap: u64,
) -> Result<(Vec<Matching>, u64), MatchingError> {
    let mut search = Search {
        g,
        p,
        x_partner: vec![None; g.x_count()],
        y_partner: vec![None; g.y_count()],
        found: Vec::new(),
        visited: 0,
        cap,
    };
    if !search.descend(0) {
        let estimate = g
            .side_adjacency(Side::X)
            .iter()
            .fold(1u128, |acc, adj| acc.saturating_mul(adj.len() as u128 + 1));
        return Err(MatchingError::CapExceeded { visited: search.visited, cap, estimate });
    }
    let mut matchings = search.found;
    matchings.sort();
    matchings.dedup();
    Ok((matchings, search.visited))
}

struct Search<'a> {
    g: &'a BipartiteGraph,
    p: &'a PreferenceInstance,
    x_partner: Vec<Option<usize>>,
    y_partner: Vec<Option<usize>>,
    found: Vec<Matching>,
    visited: u64,
    cap: u64,
}

impl Search<'_> {
    /// Returns false once the node cap is hit.
    fn descend(&mut self, x: usize) -> bool {
        self.visited += 1;
        if self.visited > self.cap {
            return false;
        }
        if x == self.g.x_count() {
            let m = Matching::from_x_partners(self.g.y_count(), self.x_partner.clone());
            if is_stable(self.g, self.p, &m) {
                self.found.push(m);
            }
            return true;
        }
        let options = self.g.adjacent(VertexId::x(x));
        for choice in options.iter().map(|&y| Some(y)).chain(std::iter::once(None)) {
            if let Some(y) = choice {
                if self.y_partner[y].is_some() {
                    continue;
                }
            }
            if self.blocks_so_far(x, choice) {
                continue;
            }
            self.x_partner[x] = choice;
            if let Some(y) = choice {
                self.y_partner[y] = Some(x);
            }
            let ok = self.descend(x + 1);
            if let Some(y) = choice {
                self.y_partner[y] = None;
            }
            self.x_partner[x] = None;
            if !ok {
                return false;
            }
        }
        true
    }

    /// Would giving `x` the partner `choice` create a blocking pair among
    /// vertices whose partners are already fixed? A Y vertex's partner is fixed
    /// once some X vertex takes it; unassigned Y vertices are settled at the leaf.
    fn blocks_so_far(&self, x: usize, choice: Option<usize>) -> bool {
        let ranks = self.p.ranks();
        // x against Y vertices it would rather have that are already taken.
        for &y in self.p.list(VertexId::x(x)) {
            if Some(y) == choice {
                break;
            }
            if let Some(holder) = self.y_partner[y] {
                if ranks.prefers(Side::Y, y, Some(x), Some(holder)) {
                    return true;
                }
            }
        }
        // Earlier X vertices against the Y vertex x takes.
        if let Some(y) = choice {
            for &earlier in self.g.adjacent(VertexId::y(y)) {
                if earlier >= x {
                    break;
                }
                if ranks.prefers(Side::X, earlier, Some(y), self.x_partner[earlier])
                    && ranks.prefers(Side::Y, y, Some(earlier), Some(x))
                {
                    return true;
                }
            }
        }
        false
    }
}

/// A maximum-cardinality matching by repeated augmenting-path search.
/// Stability plays no role here.
pub fn maximum_matching(g: &BipartiteGraph) -> Matching {
    let mut y_partner: Vec<Option<usize>> = vec![None; g.y_count()];
    let mut x_partner: Vec<Option<usize>> = vec![None; g.x_count()];
    for root in 0..g.x_count() {
        // BFS over alternating paths from `root`.
        let mut parent_of_y: Vec<Option<usize>> = vec![None; g.y_count()];
        let mut queue = VecDeque::from([root]);
        let mut end = None;
        'bfs: while let Some(x) = queue.pop_front() {
            for &y in g.adjacent(VertexId::x(x)) {
                if parent_of_y[y].is_some() {
                    continue;
                }
                parent_of_y[y] = Some(x);
                match y_partner[y] {
                    None => {
                        end = Some(y);
                        break 'bfs;
                    }
                    Some(next) => queue.push_back(next),
                }
            }
        }
        let mut cur = end;
        while let Some(y) = cur {
            let x = parent_of_y[y].unwrap();
            cur = x_partner[x];
            x_partner[x] = Some(y);
            y_partner[y] = Some(x);
        }
    }
    Matching { partner: [x_partner, y_partner] }
}
