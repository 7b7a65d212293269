//! Brute-force references that share no code with the engine.

#![allow(dead_code)]

use satmatch_core::{BipartiteGraph, PreferenceInstance, Side, VertexId};

/// Every matching of `g`, as X-partner vectors.
pub fn all_matchings(g: &BipartiteGraph) -> Vec<Vec<Option<usize>>> {
    fn rec(
        g: &BipartiteGraph,
        x: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<Option<usize>>,
        out: &mut Vec<Vec<Option<usize>>>,
    ) {
        if x == g.x_count() {
            out.push(cur.clone());
            return;
        }
        cur.push(None);
        rec(g, x + 1, used, cur, out);
        cur.pop();
        for &y in g.adjacent(VertexId::x(x)) {
            if !used[y] {
                used[y] = true;
                cur.push(Some(y));
                rec(g, x + 1, used, cur, out);
                cur.pop();
                used[y] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(g, 0, &mut vec![false; g.y_count()], &mut Vec::new(), &mut out);
    out
}

fn position(list: &[usize], v: usize) -> usize {
    list.iter().position(|&w| w == v).expect("acceptable partner")
}

/// Stability straight from the definition, reading positions off the raw lists.
pub fn stable_by_definition(g: &BipartiteGraph, p: &PreferenceInstance, x_partner: &[Option<usize>]) -> bool {
    let mut y_partner = vec![None; g.y_count()];
    for (x, py) in x_partner.iter().enumerate() {
        if let Some(y) = py {
            y_partner[*y] = Some(x);
        }
    }
    for (x, y) in g.edges() {
        if x_partner[x] == Some(y) {
            continue;
        }
        let xl = p.list(VertexId::x(x));
        let yl = p.list(VertexId::y(y));
        let x_wants = match x_partner[x] {
            None => true,
            Some(cur) => position(xl, y) < position(xl, cur),
        };
        let y_wants = match y_partner[y] {
            None => true,
            Some(cur) => position(yl, x) < position(yl, cur),
        };
        if x_wants && y_wants {
            return false;
        }
    }
    true
}

/// Sorted X-partner vectors of all stable matchings.
pub fn stable_by_brute_force(g: &BipartiteGraph, p: &PreferenceInstance) -> Vec<Vec<Option<usize>>> {
    let mut v: Vec<_> = all_matchings(g).into_iter().filter(|m| stable_by_definition(g, p, m)).collect();
    v.sort();
    v
}

pub fn graph_from_mask(nx: usize, ny: usize, mask: u64) -> BipartiteGraph {
    let edges = (0..nx * ny).filter(|k| mask >> k & 1 == 1).map(|k| (k / ny, k % ny));
    BipartiteGraph::new(nx, ny, edges).unwrap()
}

pub fn side_of(v: VertexId) -> Side {
    v.side
}
