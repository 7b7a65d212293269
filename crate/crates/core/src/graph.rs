//! Immutable bipartite graphs with dense per-side vertex indices.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One of the two vertex sets of a bipartite graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    X,
    Y,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::X, Side::Y];

    pub fn opposite(self) -> Side {
        match self {
            Side::X => Side::Y,
            Side::Y => Side::X,
        }
    }

    pub(crate) fn slot(self) -> usize {
        match self {
            Side::X => 0,
            Side::Y => 1,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::X => f.write_str("X"),
            Side::Y => f.write_str("Y"),
        }
    }
}

/// A vertex, addressed by its side and its 0-based index within that side.
///
/// Displayed 1-based (`x1`, `y3`) to match the usual hand-written labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId {
    pub side: Side,
    pub index: usize,
}

impl VertexId {
    pub fn new(side: Side, index: usize) -> Self {
        VertexId { side, index }
    }

    pub fn x(index: usize) -> Self {
        VertexId::new(Side::X, index)
    }

    pub fn y(index: usize) -> Self {
        VertexId::new(Side::Y, index)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Side::X => write!(f, "x{}", self.index + 1),
            Side::Y => write!(f, "y{}", self.index + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} does not exist (side {} has {count} vertices)", vertex.side)]
    InvalidVertex { vertex: VertexId, count: usize },
    #[error("duplicate edge {x}-{y}")]
    DuplicateEdge { x: VertexId, y: VertexId },
    #[error("vertex set mixes sides: {first} and {other}")]
    MixedSides { first: VertexId, other: VertexId },
}

/// A bipartite graph `G = (X + Y, E)`.
///
/// Adjacency is stored for both sides; every list is strictly increasing and
/// the Y-side lists are the exact transpose of the X-side lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteGraph {
    adj: [Vec<Vec<usize>>; 2],
}

impl BipartiteGraph {
    /// Builds a graph from `(x index, y index)` edge pairs.
    pub fn new(
        x_count: usize,
        y_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut x_adj = vec![Vec::new(); x_count];
        for (x, y) in edges {
            if x >= x_count {
                return Err(GraphError::InvalidVertex { vertex: VertexId::x(x), count: x_count });
            }
            if y >= y_count {
                return Err(GraphError::InvalidVertex { vertex: VertexId::y(y), count: y_count });
            }
            x_adj[x].push(y);
        }
        Self::from_x_adjacency(y_count, x_adj)
    }

    /// Builds a graph from X-side adjacency lists in any order.
    pub fn from_x_adjacency(y_count: usize, mut x_adj: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        let mut y_adj = vec![Vec::new(); y_count];
        for (x, list) in x_adj.iter_mut().enumerate() {
            list.sort_unstable();
            for pair in list.windows(2) {
                if pair[0] == pair[1] {
                    return Err(GraphError::DuplicateEdge { x: VertexId::x(x), y: VertexId::y(pair[0]) });
                }
            }
            for &y in list.iter() {
                if y >= y_count {
                    return Err(GraphError::InvalidVertex { vertex: VertexId::y(y), count: y_count });
                }
                y_adj[y].push(x);
            }
        }
        Ok(BipartiteGraph { adj: [x_adj, y_adj] })
    }

    /// Complete bipartite graph `K_{x_count, y_count}`.
    pub fn complete(x_count: usize, y_count: usize) -> Self {
        let x_adj = vec![(0..y_count).collect(); x_count];
        let y_adj = vec![(0..x_count).collect(); y_count];
        BipartiteGraph { adj: [x_adj, y_adj] }
    }

    pub fn x_count(&self) -> usize {
        self.adj[0].len()
    }

    pub fn y_count(&self) -> usize {
        self.adj[1].len()
    }

    pub fn side_len(&self, side: Side) -> usize {
        self.adj[side.slot()].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj[0].iter().map(Vec::len).sum()
    }

    /// Edges as `(x index, y index)`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj[0].iter().enumerate().flat_map(|(x, list)| list.iter().map(move |&y| (x, y)))
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.adj[0].get(x).is_some_and(|list| list.binary_search(&y).is_ok())
    }

    pub fn vertices(&self, side: Side) -> impl Iterator<Item = VertexId> {
        (0..self.side_len(side)).map(move |i| VertexId::new(side, i))
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.index < self.side_len(v.side)
    }

    pub fn check(&self, v: VertexId) -> Result<(), GraphError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(GraphError::InvalidVertex { vertex: v, count: self.side_len(v.side) })
        }
    }

    /// Opposite-side indices adjacent to `v`, ascending. Panics on an invalid id.
    pub fn adjacent(&self, v: VertexId) -> &[usize] {
        &self.adj[v.side.slot()][v.index]
    }

    /// All adjacency lists of one side.
    pub fn side_adjacency(&self, side: Side) -> &[Vec<usize>] {
        &self.adj[side.slot()]
    }

    /// `N(v)`.
    pub fn neighborhood(&self, v: VertexId) -> Result<BTreeSet<VertexId>, GraphError> {
        self.check(v)?;
        let other = v.side.opposite();
        Ok(self.adjacent(v).iter().map(|&i| VertexId::new(other, i)).collect())
    }

    /// `N(S)`, the union of the neighborhoods of a same-side vertex set.
    pub fn neighborhood_of_set<'a>(
        &self,
        set: impl IntoIterator<Item = &'a VertexId>,
    ) -> Result<BTreeSet<VertexId>, GraphError> {
        let mut out = BTreeSet::new();
        let mut first: Option<VertexId> = None;
        for &v in set {
            self.check(v)?;
            match first {
                None => first = Some(v),
                Some(f) if f.side != v.side => {
                    return Err(GraphError::MixedSides { first: f, other: v });
                }
                Some(_) => {}
            }
            let other = v.side.opposite();
            out.extend(self.adjacent(v).iter().map(|&i| VertexId::new(other, i)));
        }
        Ok(out)
    }

    pub fn degree(&self, v: VertexId) -> Result<usize, GraphError> {
        self.check(v)?;
        Ok(self.adjacent(v).len())
    }

    /// The same graph with the roles of X and Y exchanged.
    pub fn transpose(&self) -> BipartiteGraph {
        BipartiteGraph { adj: [self.adj[1].clone(), self.adj[0].clone()] }
    }

    /// Connected components, ordered by smallest X index and then smallest Y index.
    /// Components without X vertices (isolated Y vertices) come last.
    pub fn components(&self) -> Vec<Component> {
        let mut label: [Vec<Option<usize>>; 2] = [vec![None; self.x_count()], vec![None; self.y_count()]];
        let mut members: Vec<[Vec<usize>; 2]> = Vec::new();
        for side in Side::BOTH {
            for start in 0..self.side_len(side) {
                if label[side.slot()][start].is_some() {
                    continue;
                }
                let id = members.len();
                let mut found = [Vec::new(), Vec::new()];
                let mut queue = VecDeque::from([VertexId::new(side, start)]);
                label[side.slot()][start] = Some(id);
                while let Some(v) = queue.pop_front() {
                    found[v.side.slot()].push(v.index);
                    let other = v.side.opposite();
                    for &w in self.adjacent(v) {
                        if label[other.slot()][w].is_none() {
                            label[other.slot()][w] = Some(id);
                            queue.push_back(VertexId::new(other, w));
                        }
                    }
                }
                found[0].sort_unstable();
                found[1].sort_unstable();
                members.push(found);
            }
        }
        // X-rooted components were discovered in X-index order already; the
        // remaining ones are isolated Y vertices in Y-index order.
        members
            .into_iter()
            .map(|[x_map, y_map]| {
                let mut y_local = vec![usize::MAX; self.y_count()];
                for (local, &y) in y_map.iter().enumerate() {
                    y_local[y] = local;
                }
                let x_adj =
                    x_map.iter().map(|&x| self.adj[0][x].iter().map(|&y| y_local[y]).collect()).collect();
                let graph = BipartiteGraph::from_x_adjacency(y_map.len(), x_adj)
                    .expect("component of a valid graph is valid");
                Component { graph, x_map, y_map }
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.x_count() + self.y_count() > 0 && self.components().len() == 1
    }

    /// Every X vertex is adjacent to every Y vertex (vacuously true when a side is empty).
    pub fn is_biclique(&self) -> bool {
        self.edge_count() == self.x_count() * self.y_count()
    }

    pub fn is_complete_bipartite_balanced(&self) -> bool {
        self.x_count() == self.y_count() && self.is_biclique()
    }

    /// The first non-edge `(x, y)` in index order, if any.
    pub fn missing_edge(&self) -> Option<(usize, usize)> {
        (0..self.x_count())
            .flat_map(|x| (0..self.y_count()).map(move |y| (x, y)))
            .find(|&(x, y)| !self.has_edge(x, y))
    }
}

/// A connected component with maps from local indices back to the parent graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub graph: BipartiteGraph,
    pub x_map: Vec<usize>,
    pub y_map: Vec<usize>,
}

impl Component {
    pub fn original(&self, local: VertexId) -> VertexId {
        let map = match local.side {
            Side::X => &self.x_map,
            Side::Y => &self.y_map,
        };
        VertexId::new(local.side, map[local.index])
    }
}
