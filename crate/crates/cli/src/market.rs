//! The market file: a TOML document naming vertices, edges, and optionally
//! preferences and compatibility classes.
//!
//! ```toml
//! schema_version = "1"
//! x = ["x1", "x2"]
//! y = ["y1", "y2"]
//! edges = [["x1", "y1"], ["x1", "y2"], ["x2", "y2"]]
//!
//! [preferences.x]
//! x1 = ["y2", "y1"]
//! x2 = ["y2"]
//!
//! [preferences.y]
//! y1 = ["x1"]
//! y2 = ["x1", "x2"]
//! ```
//!
//! A `[compatibility]` block lists class names, the classes of each X vertex
//! and the class of each Y vertex. Edges may then be omitted; if given, they
//! must be exactly the same-class pairs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use satmatch_core::{
    BipartiteGraph, CompatibilityMarket, PreferenceInstance, RawPreferences, Side, VertexId,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketFile {
    pub schema_version: String,
    pub x: Vec<String>,
    pub y: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preferences: Option<PreferenceBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compatibility: Option<CompatibilityBlock>,
}

/// Ranked lists by vertex name, most preferred first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreferenceBlock {
    #[serde(default)]
    pub x: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub y: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompatibilityBlock {
    pub classes: Vec<String>,
    pub x: BTreeMap<String, Vec<String>>,
    pub y: BTreeMap<String, String>,
}

impl MarketFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string().trim_end().to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("market files always serialize")
    }
}

/// A validated market: names resolved to dense indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Market {
    pub x_names: Vec<String>,
    pub y_names: Vec<String>,
    pub graph: BipartiteGraph,
    pub preferences: Option<PreferenceInstance>,
    pub compatibility: Option<Classes>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classes {
    pub names: Vec<String>,
    pub market: CompatibilityMarket,
}

fn index_names(side: Side, names: &[String]) -> Result<HashMap<&str, usize>, CliError> {
    let mut map = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if map.insert(n.as_str(), i).is_some() {
            return Err(CliError::Invalid(format!("duplicate {side} vertex name {n:?}")));
        }
    }
    Ok(map)
}

fn resolve(map: &HashMap<&str, usize>, side: Side, name: &str, context: &str) -> Result<usize, CliError> {
    map.get(name)
        .copied()
        .ok_or_else(|| CliError::Invalid(format!("{context}: unknown {side} vertex {name:?}")))
}

impl Market {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::from_file(&MarketFile::read(path)?)
    }

    pub fn from_file(file: &MarketFile) -> Result<Self, CliError> {
        if file.schema_version != SCHEMA_VERSION {
            return Err(CliError::Invalid(format!(
                "unsupported schema_version {:?} (expected {SCHEMA_VERSION:?})",
                file.schema_version
            )));
        }
        let xs = index_names(Side::X, &file.x)?;
        let ys = index_names(Side::Y, &file.y)?;

        let mut edges = Vec::with_capacity(file.edges.len());
        for (a, b) in &file.edges {
            let ctx = format!("edge [{a:?}, {b:?}]");
            edges.push((resolve(&xs, Side::X, a, &ctx)?, resolve(&ys, Side::Y, b, &ctx)?));
        }

        let compatibility =
            file.compatibility.as_ref().map(|block| Self::classes(block, &xs, &ys, file)).transpose()?;

        let graph = match &compatibility {
            Some(classes) if edges.is_empty() => classes.market.induced_graph(),
            Some(classes) => {
                let g = BipartiteGraph::new(file.x.len(), file.y.len(), edges)
                    .map_err(|e| CliError::Invalid(Self::describe_graph_error(e, file)))?;
                if g != classes.market.induced_graph() {
                    return Err(CliError::Invalid(
                        "edges must be exactly the same-class pairs of the compatibility block".into(),
                    ));
                }
                g
            }
            None => BipartiteGraph::new(file.x.len(), file.y.len(), edges)
                .map_err(|e| CliError::Invalid(Self::describe_graph_error(e, file)))?,
        };

        let preferences = match &file.preferences {
            None => None,
            Some(block) => {
                let mut raw = RawPreferences::new();
                for (side, lists, own, other) in
                    [(Side::X, &block.x, &xs, &ys), (Side::Y, &block.y, &ys, &xs)]
                {
                    for (name, list) in lists {
                        let ctx = format!("preferences of {name:?}");
                        let v = VertexId::new(side, resolve(own, side, name, &ctx)?);
                        let mut entries = Vec::with_capacity(list.len());
                        for entry in list {
                            let index = match other.get(entry.as_str()) {
                                Some(&i) => VertexId::new(side.opposite(), i),
                                // Lets validation report a same-side entry precisely.
                                None => match own.get(entry.as_str()) {
                                    Some(&i) => VertexId::new(side, i),
                                    None => {
                                        return Err(CliError::Invalid(format!(
                                            "{ctx}: unknown vertex {entry:?}"
                                        )))
                                    }
                                },
                            };
                            entries.push(index);
                        }
                        raw.insert(v, entries);
                    }
                }
                let names = [&file.x, &file.y];
                let name_of = |v: VertexId| names[if v.side == Side::X { 0 } else { 1 }][v.index].clone();
                Some(PreferenceInstance::validate(&graph, &raw).map_err(|e| {
                    use satmatch_core::PreferenceError as E;
                    CliError::Invalid(match e {
                        E::MissingList { vertex } => format!("no preference list for {:?}", name_of(vertex)),
                        E::DuplicateEntry { vertex, entry } => {
                            format!("{:?} lists {:?} more than once", name_of(vertex), name_of(entry))
                        }
                        E::NotANeighbor { vertex, entry } => {
                            format!(
                                "{:?} lists {:?}, which is not adjacent to it",
                                name_of(vertex),
                                name_of(entry)
                            )
                        }
                        E::SameSide { vertex, entry } => {
                            format!(
                                "{:?} lists {:?}, which is on its own side",
                                name_of(vertex),
                                name_of(entry)
                            )
                        }
                        E::Incomplete { vertex, missing } => {
                            format!("{:?} omits acceptable partner {:?}", name_of(vertex), name_of(missing))
                        }
                        other => other.to_string(),
                    })
                })?)
            }
        };

        Ok(Market { x_names: file.x.clone(), y_names: file.y.clone(), graph, preferences, compatibility })
    }

    fn describe_graph_error(e: satmatch_core::GraphError, file: &MarketFile) -> String {
        match e {
            satmatch_core::GraphError::DuplicateEdge { x, y } => {
                format!("duplicate edge [{:?}, {:?}]", file.x[x.index], file.y[y.index])
            }
            other => other.to_string(),
        }
    }

    fn classes(
        block: &CompatibilityBlock,
        xs: &HashMap<&str, usize>,
        ys: &HashMap<&str, usize>,
        file: &MarketFile,
    ) -> Result<Classes, CliError> {
        let mut class_index = HashMap::new();
        for (i, c) in block.classes.iter().enumerate() {
            if class_index.insert(c.as_str(), i).is_some() {
                return Err(CliError::Invalid(format!("duplicate class name {c:?}")));
            }
        }
        let class_of = |name: &str, ctx: &str| {
            class_index
                .get(name)
                .copied()
                .ok_or_else(|| CliError::Invalid(format!("{ctx}: unknown class {name:?}")))
        };
        let mut membership = vec![BTreeSet::new(); file.x.len()];
        for (name, classes) in &block.x {
            let ctx = format!("classes of {name:?}");
            let x = resolve(xs, Side::X, name, &ctx)?;
            for c in classes {
                membership[x].insert(class_of(c, &ctx)?);
            }
        }
        let mut y_class = vec![None; file.y.len()];
        for (name, class) in &block.y {
            let ctx = format!("class of {name:?}");
            y_class[resolve(ys, Side::Y, name, &ctx)?] = Some(class_of(class, &ctx)?);
        }
        let y_class = y_class
            .into_iter()
            .enumerate()
            .map(|(y, c)| c.ok_or_else(|| CliError::Invalid(format!("{:?} has no class", file.y[y]))))
            .collect::<Result<Vec<_>, _>>()?;
        let market = CompatibilityMarket::new(block.classes.len(), membership, y_class).map_err(|e| {
            use satmatch_core::CompatibilityError as E;
            CliError::Invalid(match e {
                E::EmptyMembership { x } => format!("{:?} belongs to no class", file.x[x]),
                E::NoExclusiveMember { class } => {
                    format!("class {:?} has no X vertex outside every other class", block.classes[class])
                }
                other => other.to_string(),
            })
        })?;
        Ok(Classes { names: block.classes.clone(), market })
    }

    pub fn names(&self, side: Side) -> &[String] {
        match side {
            Side::X => &self.x_names,
            Side::Y => &self.y_names,
        }
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names(v.side)[v.index]
    }

    /// Finds a vertex by name, on `side` if given, else on whichever side has it.
    pub fn lookup(&self, name: &str, side: Option<Side>) -> Result<VertexId, CliError> {
        let sides: Vec<Side> = side.map_or(Side::BOTH.to_vec(), |s| vec![s]);
        let hits: Vec<VertexId> = sides
            .into_iter()
            .filter_map(|s| self.names(s).iter().position(|n| n == name).map(|i| VertexId::new(s, i)))
            .collect();
        match hits.as_slice() {
            [v] => Ok(*v),
            [] => Err(CliError::Usage(format!("unknown vertex {name:?}"))),
            _ => Err(CliError::Usage(format!("{name:?} names a vertex on both sides; pass --side"))),
        }
    }

    /// Preference lists by name.
    pub fn preference_block(&self, p: &PreferenceInstance) -> PreferenceBlock {
        let table = |side: Side| {
            self.graph
                .vertices(side)
                .map(|v| {
                    let other = side.opposite();
                    let list =
                        p.list(v).iter().map(|&i| self.name(VertexId::new(other, i)).to_string()).collect();
                    (self.name(v).to_string(), list)
                })
                .collect()
        };
        PreferenceBlock { x: table(Side::X), y: table(Side::Y) }
    }

    pub fn to_file(&self) -> MarketFile {
        let derived_edges = self.compatibility.is_some();
        MarketFile {
            schema_version: SCHEMA_VERSION.to_string(),
            x: self.x_names.clone(),
            y: self.y_names.clone(),
            edges: if derived_edges {
                Vec::new()
            } else {
                self.graph.edges().map(|(x, y)| (self.x_names[x].clone(), self.y_names[y].clone())).collect()
            },
            preferences: self.preferences.as_ref().map(|p| self.preference_block(p)),
            compatibility: self.compatibility.as_ref().map(|c| CompatibilityBlock {
                classes: c.names.clone(),
                x: c.market
                    .x_membership()
                    .iter()
                    .enumerate()
                    .map(|(x, q)| (self.x_names[x].clone(), q.iter().map(|&i| c.names[i].clone()).collect()))
                    .collect(),
                y: c.market
                    .y_class()
                    .iter()
                    .enumerate()
                    .map(|(y, &i)| (self.y_names[y].clone(), c.names[i].clone()))
                    .collect(),
            }),
        }
    }

    pub fn with_preferences(&self, p: PreferenceInstance) -> Market {
        Market { preferences: Some(p), ..self.clone() }
    }
}
