//! Markets with compatibility classes.
//!
//! X vertices belong to one or more classes `A_1..A_n` (which may overlap);
//! Y vertices are partitioned into `B_1..B_n`. A pair is acceptable only when
//! it shares a class. With CW-complete preferences every same-class pair is
//! acceptable, which is the graph [`CompatibilityMarket::induced_graph`] builds.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BipartiteGraph, Side};
use crate::saturation::saturation_verdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompatibilityError {
    #[error("a market needs at least one class")]
    NoClasses,
    #[error("x vertex {x} belongs to no class")]
    EmptyMembership { x: usize },
    #[error("class {class} is out of range (the market has {n_classes} classes)")]
    UnknownClass { class: usize, n_classes: usize },
    #[error("class {class} has no X vertex outside every other class")]
    NoExclusiveMember { class: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatibilityMarket {
    n_classes: usize,
    /// Classes of each X vertex (the vector `q` of that vertex).
    x_membership: Vec<BTreeSet<usize>>,
    /// Class of each Y vertex.
    y_class: Vec<usize>,
}

impl CompatibilityMarket {
    pub fn new(
        n_classes: usize,
        x_membership: Vec<BTreeSet<usize>>,
        y_class: Vec<usize>,
    ) -> Result<Self, CompatibilityError> {
        if n_classes == 0 {
            return Err(CompatibilityError::NoClasses);
        }
        for (x, classes) in x_membership.iter().enumerate() {
            if classes.is_empty() {
                return Err(CompatibilityError::EmptyMembership { x });
            }
            if let Some(&class) = classes.iter().find(|&&c| c >= n_classes) {
                return Err(CompatibilityError::UnknownClass { class, n_classes });
            }
        }
        if let Some(&class) = y_class.iter().find(|&&c| c >= n_classes) {
            return Err(CompatibilityError::UnknownClass { class, n_classes });
        }
        let market = CompatibilityMarket { n_classes, x_membership, y_class };
        for class in 0..n_classes {
            if market.exclusive_members(class).next().is_none() {
                return Err(CompatibilityError::NoExclusiveMember { class });
            }
        }
        Ok(market)
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn x_membership(&self) -> &[BTreeSet<usize>] {
        &self.x_membership
    }

    pub fn y_class(&self) -> &[usize] {
        &self.y_class
    }

    /// `A_i`.
    pub fn class_x(&self, class: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.x_membership.len()).filter(move |&x| self.x_membership[x].contains(&class))
    }

    /// `B_i`.
    pub fn class_y(&self, class: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.y_class.len()).filter(move |&y| self.y_class[y] == class)
    }

    /// X vertices in `class` and no other.
    pub fn exclusive_members(&self, class: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.x_membership.len()).filter(move |&x| {
            let m = &self.x_membership[x];
            m.len() == 1 && m.contains(&class)
        })
    }

    /// Edge `(x, y)` exactly when `y`'s class is one of `x`'s.
    pub fn induced_graph(&self) -> BipartiteGraph {
        let x_adj = self
            .x_membership
            .iter()
            .map(|classes| (0..self.y_class.len()).filter(|&y| classes.contains(&self.y_class[y])).collect())
            .collect();
        BipartiteGraph::from_x_adjacency(self.y_class.len(), x_adj)
            .expect("induced adjacency is sorted and in range")
    }

    pub fn class_verdict(&self) -> ClassVerdict {
        let classes: Vec<ClassSize> = (0..self.n_classes)
            .map(|i| ClassSize { class: i, a_size: self.class_x(i).count(), b_size: self.class_y(i).count() })
            .collect();
        ClassVerdict { holds: classes.iter().all(|c| c.b_size >= c.a_size), classes }
    }

    /// Cross-checks the class-size verdict against the per-vertex saturation
    /// verdict on the induced graph.
    pub fn verdict_consistency(&self) -> Consistency {
        let class_sizes = self.class_verdict().holds;
        let conditions = saturation_verdict(&self.induced_graph(), Side::X).holds;
        Consistency { class_sizes, conditions, consistent: !class_sizes || conditions }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSize {
    pub class: usize,
    pub a_size: usize,
    pub b_size: usize,
}

/// Every stable matching is X-saturating under every CW-complete instance
/// exactly when `|B_i| >= |A_i|` for every class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub holds: bool,
    pub classes: Vec<ClassSize>,
}

impl ClassVerdict {
    pub fn deficient(&self) -> impl Iterator<Item = &ClassSize> {
        self.classes.iter().filter(|c| c.b_size < c.a_size)
    }
}

/// `consistent` is false only if the class sizes pass while some vertex of the
/// induced graph fails both conditions. The opposite combination is allowed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Consistency {
    pub class_sizes: bool,
    pub conditions: bool,
    pub consistent: bool,
}
