//! Strict preference instances over neighborhoods.
//!
//! Each vertex ranks exactly its acceptable partners (its neighborhood), most
//! preferred first. Unacceptable partners cannot be written down at all, and
//! being unmatched ranks below every acceptable partner.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{BipartiteGraph, GraphError, Side, VertexId};

/// Default ceiling on `enumerate_all`.
pub const DEFAULT_INSTANCE_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreferenceError {
    #[error("no preference list for {vertex}")]
    MissingList { vertex: VertexId },
    #[error("{vertex} lists {entry} more than once")]
    DuplicateEntry { vertex: VertexId, entry: VertexId },
    #[error("{vertex} lists {entry}, which is not in its neighborhood")]
    NotANeighbor { vertex: VertexId, entry: VertexId },
    #[error("{vertex} lists {entry}, which is on its own side")]
    SameSide { vertex: VertexId, entry: VertexId },
    #[error("{vertex} omits acceptable partner {missing}")]
    Incomplete { vertex: VertexId, missing: VertexId },
    #[error("{instances} preference instances exceed the cap of {cap}")]
    TooManyInstances { instances: InstanceCount, cap: u128 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Size of a preference space, saturating at `u128::MAX`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct InstanceCount(pub u128);

impl InstanceCount {
    pub fn is_saturated(self) -> bool {
        self.0 == u128::MAX
    }
}

impl std::fmt::Display for InstanceCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_saturated() {
            write!(f, "more than {}", u128::MAX - 1)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// `Π_v deg(v)!` over both sides.
pub fn instance_count(g: &BipartiteGraph) -> InstanceCount {
    let mut total: u128 = 1;
    for side in Side::BOTH {
        for list in g.side_adjacency(side) {
            for k in 2..=list.len() as u128 {
                total = total.saturating_mul(k);
            }
        }
    }
    InstanceCount(total)
}

/// O(1) preference comparisons: `rank[side][v][candidate]` is the 0-based
/// position of `candidate` in `v`'s list, or `UNRANKED` if unacceptable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RankTable {
    rank: [Vec<Vec<u32>>; 2],
}

impl RankTable {
    pub const UNRANKED: u32 = u32::MAX;

    fn build(lists: &[Vec<Vec<usize>>; 2], g: &BipartiteGraph) -> Self {
        let rank = Side::BOTH.map(|side| {
            let width = g.side_len(side.opposite());
            lists[side.slot()]
                .iter()
                .map(|list| {
                    let mut row = vec![Self::UNRANKED; width];
                    for (pos, &c) in list.iter().enumerate() {
                        row[c] = pos as u32;
                    }
                    row
                })
                .collect()
        });
        RankTable { rank }
    }

    #[inline]
    pub fn rank(&self, side: Side, v: usize, candidate: usize) -> Option<usize> {
        match self.rank[side.slot()][v][candidate] {
            Self::UNRANKED => None,
            r => Some(r as usize),
        }
    }

    /// Strict preference with `None` meaning unmatched. Assumes both options
    /// are acceptable or `None`.
    #[inline]
    pub fn prefers(&self, side: Side, v: usize, a: Option<usize>, b: Option<usize>) -> bool {
        let row = &self.rank[side.slot()][v];
        match (a, b) {
            (None, _) => false,
            (Some(_), None) => true,
            (Some(a), Some(b)) => row[a] < row[b],
        }
    }
}

/// One strict ranking per vertex over its neighborhood; an element of the
/// space of all preference instances on a graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PreferenceInstance {
    lists: [Vec<Vec<usize>>; 2],
    ranks: RankTable,
}

/// Unvalidated rankings keyed by vertex.
pub type RawPreferences = BTreeMap<VertexId, Vec<VertexId>>;

impl PreferenceInstance {
    /// Validates raw rankings against `g`: every vertex needs a list that is a
    /// permutation of its neighborhood.
    pub fn validate(g: &BipartiteGraph, raw: &RawPreferences) -> Result<Self, PreferenceError> {
        for &v in raw.keys() {
            g.check(v)?;
        }
        let mut lists: [Vec<Vec<usize>>; 2] = [Vec::new(), Vec::new()];
        for side in Side::BOTH {
            for v in g.vertices(side) {
                let entries = raw.get(&v).ok_or(PreferenceError::MissingList { vertex: v })?;
                let mut seen = vec![false; g.side_len(side.opposite())];
                let mut list = Vec::with_capacity(entries.len());
                for &e in entries {
                    if e.side == side {
                        return Err(PreferenceError::SameSide { vertex: v, entry: e });
                    }
                    if g.adjacent(v).binary_search(&e.index).is_err() {
                        return Err(PreferenceError::NotANeighbor { vertex: v, entry: e });
                    }
                    if std::mem::replace(&mut seen[e.index], true) {
                        return Err(PreferenceError::DuplicateEntry { vertex: v, entry: e });
                    }
                    list.push(e.index);
                }
                if let Some(&missing) = g.adjacent(v).iter().find(|&&w| !seen[w]) {
                    return Err(PreferenceError::Incomplete {
                        vertex: v,
                        missing: VertexId::new(side.opposite(), missing),
                    });
                }
                lists[side.slot()].push(list);
            }
        }
        Ok(Self::from_trusted(g, lists))
    }

    /// Validates per-side lists of opposite-side indices.
    pub fn from_lists(
        g: &BipartiteGraph,
        x_lists: Vec<Vec<usize>>,
        y_lists: Vec<Vec<usize>>,
    ) -> Result<Self, PreferenceError> {
        let mut raw = RawPreferences::new();
        for (side, lists) in [(Side::X, x_lists), (Side::Y, y_lists)] {
            let other = side.opposite();
            for (i, list) in lists.into_iter().enumerate() {
                raw.insert(
                    VertexId::new(side, i),
                    list.into_iter().map(|j| VertexId::new(other, j)).collect(),
                );
            }
        }
        Self::validate(g, &raw)
    }

    /// Lists already known to be neighborhood permutations.
    pub(crate) fn from_trusted(g: &BipartiteGraph, lists: [Vec<Vec<usize>>; 2]) -> Self {
        debug_assert!(Side::BOTH.iter().all(|&s| {
            lists[s.slot()].iter().zip(g.side_adjacency(s)).all(|(l, adj)| {
                let mut l = l.clone();
                l.sort_unstable();
                &l == adj
            })
        }));
        let ranks = RankTable::build(&lists, g);
        PreferenceInstance { lists, ranks }
    }

    /// Every vertex ranks its neighbors in ascending index order.
    pub fn ascending(g: &BipartiteGraph) -> Self {
        let lists = Side::BOTH.map(|s| g.side_adjacency(s).to_vec());
        Self::from_trusted(g, lists)
    }

    /// Independent uniform random permutation of each neighborhood, from a
    /// ChaCha8 stream seeded with `seed`. Vertices are shuffled in order
    /// X then Y, by index.
    pub fn sample_uniform(g: &BipartiteGraph, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lists = Side::BOTH.map(|s| {
            g.side_adjacency(s)
                .iter()
                .map(|adj| {
                    let mut l = adj.clone();
                    l.shuffle(&mut rng);
                    l
                })
                .collect()
        });
        Self::from_trusted(g, lists)
    }

    /// Iterates over every preference instance of `g`, refusing when there are
    /// more than `cap` of them.
    pub fn enumerate_all(g: &BipartiteGraph, cap: u128) -> Result<InstanceIter, PreferenceError> {
        let count = instance_count(g);
        if count.0 > cap {
            return Err(PreferenceError::TooManyInstances { instances: count, cap });
        }
        Ok(InstanceIter { graph: g.clone(), current: Some(Side::BOTH.map(|s| g.side_adjacency(s).to_vec())) })
    }

    /// `v`'s ranking, most preferred first, as opposite-side indices.
    pub fn list(&self, v: VertexId) -> &[usize] {
        &self.lists[v.side.slot()][v.index]
    }

    pub fn side_lists(&self, side: Side) -> &[Vec<usize>] {
        &self.lists[side.slot()]
    }

    pub fn ranks(&self) -> &RankTable {
        &self.ranks
    }

    /// Does `v` strictly prefer `a` to `b`? `None` stands for being unmatched.
    pub fn prefers(
        &self,
        v: VertexId,
        a: Option<VertexId>,
        b: Option<VertexId>,
    ) -> Result<bool, PreferenceError> {
        let side = v.side;
        let per_side = &self.lists[side.slot()];
        if v.index >= per_side.len() {
            return Err(GraphError::InvalidVertex { vertex: v, count: per_side.len() }.into());
        }
        let resolve = |c: Option<VertexId>| -> Result<Option<usize>, PreferenceError> {
            match c {
                None => Ok(None),
                Some(c) if c.side == side => Err(PreferenceError::SameSide { vertex: v, entry: c }),
                Some(c) => {
                    let known = c.index < self.ranks.rank[side.slot()][v.index].len();
                    if known && self.ranks.rank(side, v.index, c.index).is_some() {
                        Ok(Some(c.index))
                    } else {
                        Err(PreferenceError::NotANeighbor { vertex: v, entry: c })
                    }
                }
            }
        };
        let (a, b) = (resolve(a)?, resolve(b)?);
        Ok(self.ranks.prefers(side, v.index, a, b))
    }

    /// The same instance on the transposed graph.
    pub fn transpose(&self, g: &BipartiteGraph) -> PreferenceInstance {
        let t = g.transpose();
        Self::from_trusted(&t, [self.lists[1].clone(), self.lists[0].clone()])
    }
}

/// Odometer over per-vertex permutations; the last vertex (highest Y index)
/// turns fastest, so instances come out in lexicographic order of their
/// per-vertex permutation indices.
pub struct InstanceIter {
    graph: BipartiteGraph,
    current: Option<[Vec<Vec<usize>>; 2]>,
}

impl Iterator for InstanceIter {
    type Item = PreferenceInstance;

    fn next(&mut self) -> Option<PreferenceInstance> {
        let lists = self.current.as_mut()?;
        let out = PreferenceInstance::from_trusted(&self.graph, lists.clone());
        let mut advanced = false;
        'outer: for side in [Side::Y, Side::X] {
            for list in lists[side.slot()].iter_mut().rev() {
                if next_permutation(list) {
                    advanced = true;
                    break 'outer;
                }
            }
        }
        if !advanced {
            self.current = None;
        }
        Some(out)
    }
}

/// Advances to the next lexicographic permutation; on the last one, resets to
/// ascending order and returns false.
fn next_permutation(list: &mut [usize]) -> bool {
    let n = list.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && list[i - 1] >= list[i] {
        i -= 1;
    }
    if i == 0 {
        list.reverse();
        return false;
    }
    let mut j = n - 1;
    while list[j] <= list[i - 1] {
        j -= 1;
    }
    list.swap(i - 1, j);
    list[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn fig1a() -> BipartiteGraph {
        BipartiteGraph::new(2, 2, [(0, 0), (1, 1), (0, 1)]).unwrap()
    }

    fn fig1b() -> BipartiteGraph {
        BipartiteGraph::new(2, 3, [(0, 0), (1, 1), (0, 1), (1, 2)]).unwrap()
    }

    fn raw(entries: &[(VertexId, &[VertexId])]) -> RawPreferences {
        entries.iter().map(|(v, l)| (*v, l.to_vec())).collect()
    }

    use VertexId as V;

    #[test]
    fn validate_accepts_permutations() {
        let g = fig1b();
        let r = raw(&[
            (V::x(0), &[V::y(1), V::y(0)]),
            (V::x(1), &[V::y(1), V::y(2)]),
            (V::y(0), &[V::x(0)]),
            (V::y(1), &[V::x(1), V::x(0)]),
            (V::y(2), &[V::x(1)]),
        ]);
        let p = PreferenceInstance::validate(&g, &r).unwrap();
        assert_eq!(p.list(V::x(1)), &[1, 2]);
        assert_eq!(p.list(V::y(1)), &[1, 0]);
    }

    #[test]
    fn validate_rejects_each_defect() {
        let g = fig1a();
        let good = raw(&[
            (V::x(0), &[V::y(0), V::y(1)]),
            (V::x(1), &[V::y(1)]),
            (V::y(0), &[V::x(0)]),
            (V::y(1), &[V::x(0), V::x(1)]),
        ]);
        assert!(PreferenceInstance::validate(&g, &good).is_ok());

        let mut r = good.clone();
        r.insert(V::x(1), vec![V::y(1), V::y(0)]);
        assert_eq!(
            PreferenceInstance::validate(&g, &r),
            Err(PreferenceError::NotANeighbor { vertex: V::x(1), entry: V::y(0) })
        );

        let mut r = good.clone();
        r.insert(V::x(0), vec![V::y(0), V::y(0)]);
        assert_eq!(
            PreferenceInstance::validate(&g, &r),
            Err(PreferenceError::DuplicateEntry { vertex: V::x(0), entry: V::y(0) })
        );

        let mut r = good.clone();
        r.remove(&V::y(0));
        assert_eq!(
            PreferenceInstance::validate(&g, &r),
            Err(PreferenceError::MissingList { vertex: V::y(0) })
        );

        let mut r = good.clone();
        r.insert(V::x(1), vec![V::x(0)]);
        assert_eq!(
            PreferenceInstance::validate(&g, &r),
            Err(PreferenceError::SameSide { vertex: V::x(1), entry: V::x(0) })
        );

        let mut r = good;
        r.insert(V::x(0), vec![V::y(1)]);
        assert_eq!(
            PreferenceInstance::validate(&g, &r),
            Err(PreferenceError::Incomplete { vertex: V::x(0), missing: V::y(0) })
        );
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = BipartiteGraph::complete(3, 4);
        assert_eq!(PreferenceInstance::sample_uniform(&g, 42), PreferenceInstance::sample_uniform(&g, 42));
        let g = fig1a();
        for seed in 0..20 {
            let p = PreferenceInstance::sample_uniform(&g, seed);
            assert_eq!(p.list(V::x(1)), &[1]);
            assert_eq!(p.list(V::y(0)), &[0]);
        }
    }

    #[test]
    fn sampling_is_uniform_on_k22() {
        let g = BipartiteGraph::complete(2, 2);
        let trials = 10_000;
        let mut first_is_zero = [[0usize; 2]; 2];
        for seed in 0..trials {
            let p = PreferenceInstance::sample_uniform(&g, seed);
            for side in Side::BOTH {
                for (v, list) in p.side_lists(side).iter().enumerate() {
                    if list[0] == 0 {
                        first_is_zero[side.slot()][v] += 1;
                    }
                }
            }
        }
        for row in first_is_zero {
            for count in row {
                let freq = count as f64 / trials as f64;
                assert!((freq - 0.5).abs() <= 0.05, "frequency {freq}");
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        let k11 = BipartiteGraph::complete(1, 1);
        assert_eq!(PreferenceInstance::enumerate_all(&k11, 10).unwrap().count(), 1);
        assert_eq!(instance_count(&fig1a()), InstanceCount(4));
        let all: Vec<_> = PreferenceInstance::enumerate_all(&fig1a(), 10).unwrap().collect();
        assert_eq!(all.len(), 4);
        let k22: Vec<_> =
            PreferenceInstance::enumerate_all(&BipartiteGraph::complete(2, 2), 100).unwrap().collect();
        assert_eq!(k22.len(), 16);
        assert_eq!(k22.iter().collect::<HashSet<_>>().len(), 16);
        // The first instance is all-ascending, the second flips the last Y vertex.
        assert_eq!(k22[0], PreferenceInstance::ascending(&BipartiteGraph::complete(2, 2)));
        assert_eq!(k22[1].list(V::y(1)), &[1, 0]);
        assert_eq!(k22[1].list(V::y(0)), &[0, 1]);
    }

    #[test]
    fn enumeration_refuses_over_cap() {
        let g = BipartiteGraph::complete(3, 3);
        match PreferenceInstance::enumerate_all(&g, 1000) {
            Err(PreferenceError::TooManyInstances { instances, cap }) => {
                assert_eq!(instances, InstanceCount(46_656));
                assert_eq!(cap, 1000);
            }
            _ => panic!("expected refusal"),
        }
        assert!(instance_count(&BipartiteGraph::complete(40, 40)).is_saturated());
    }

    #[test]
    fn prefers_examples() {
        let g = fig1a();
        let p = PreferenceInstance::ascending(&g);
        let v = V::x(0);
        assert!(p.prefers(v, Some(V::y(0)), Some(V::y(1))).unwrap());
        assert!(!p.prefers(v, Some(V::y(1)), Some(V::y(0))).unwrap());
        assert!(p.prefers(v, Some(V::y(1)), None).unwrap());
        assert!(!p.prefers(v, None, Some(V::y(1))).unwrap());
        assert!(!p.prefers(v, None, None).unwrap());
        assert!(matches!(p.prefers(V::x(1), Some(V::y(0)), None), Err(PreferenceError::NotANeighbor { .. })));
        assert!(matches!(p.prefers(V::x(1), Some(V::x(0)), None), Err(PreferenceError::SameSide { .. })));
    }

    #[test]
    fn next_permutation_cycles() {
        let mut l = vec![0, 1, 2];
        let mut seen = vec![l.clone()];
        while next_permutation(&mut l) {
            seen.push(l.clone());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(l, vec![0, 1, 2]);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
    }
}
