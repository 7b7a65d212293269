//! Exhaustive and sampled checks of the saturation theory on small markets.
//!
//! Each check returns a [`CriterionResult`]; `run` executes all of them. The
//! brute-force stable-matching oracle here walks every matching and tests the
//! definition directly, sharing no code with the engine's search.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use satmatch_core::{
    adversarial_instance, completeness_verdict, component_verdict, saturation_verdict, stable_matchings,
    vertex_report, BipartiteGraph, CompatibilityMarket, Matching, PreferenceInstance, Side, VertexId,
    DEFAULT_NODE_CAP,
};

use crate::commands::analyze_market;
use crate::market::{Market, MarketFile};
use crate::report::{CriterionResult, VerifyReport};

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    /// Largest side for the exhaustive graph suites.
    pub max_side: usize,
    /// Exhaust every preference instance up to this many; sample above it.
    pub instance_cap: u128,
    /// Samples per graph when the instance space is over the cap.
    pub seeds: u64,
    pub seed: u64,
    /// Largest side for compatibility markets and random oracle pairs.
    pub wide_side: usize,
    pub max_classes: usize,
    pub class_samples: u64,
    pub oracle_pairs: u64,
    /// Sensitivity probe for the harness itself.
    pub fault: Option<Fault>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            max_side: 3,
            instance_cap: 10_000,
            seeds: 200,
            seed: 0,
            wide_side: 4,
            max_classes: 3,
            class_samples: 50,
            oracle_pairs: 1_000,
            fault: None,
        }
    }
}

impl VerifyConfig {
    /// Scales the secondary sizes with `max_side` (one wider, at most three classes).
    pub fn with_max_side(max_side: usize) -> Self {
        VerifyConfig {
            max_side,
            wide_side: max_side + 1,
            max_classes: max_side.min(3),
            ..VerifyConfig::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Negates the saturation verdict of every graph in the first suite.
    NegateSaturationVerdict,
    /// Uses ascending preferences instead of the adversarial instance.
    PlainAdversary,
}

pub fn run(config: &VerifyConfig) -> VerifyReport {
    let suite = saturation_suites(config);
    let criteria = vec![
        suite.verdicts,
        suite.adversary,
        suite.invariance,
        completeness_exhaustive(config),
        components_exhaustive(config),
        class_markets(config),
        figure_fixtures(),
        oracle_equivalence(config),
    ];
    VerifyReport { passed: criteria.iter().all(|c| c.passed), criteria }
}

struct Tally {
    id: u8,
    name: &'static str,
    graphs: u64,
    instances: u64,
    matchings: u64,
    discrepancies: u64,
    notes: Vec<String>,
    started: Instant,
}

impl Tally {
    fn new(id: u8, name: &'static str) -> Self {
        Tally {
            id,
            name,
            graphs: 0,
            instances: 0,
            matchings: 0,
            discrepancies: 0,
            notes: Vec::new(),
            started: Instant::now(),
        }
    }

    fn fail(&mut self, note: String) {
        self.discrepancies += 1;
        // Keep reports readable when something is badly broken.
        if self.notes.len() < 10 {
            self.notes.push(note);
        }
    }

    fn finish(self) -> CriterionResult {
        CriterionResult {
            id: self.id,
            name: self.name.to_string(),
            passed: self.discrepancies == 0,
            graphs: self.graphs,
            instances: self.instances,
            matchings: self.matchings,
            discrepancies: self.discrepancies,
            millis: self.started.elapsed().as_millis() as u64,
            notes: self.notes,
        }
    }
}

/// Every graph with `nx` X vertices and `ny` Y vertices, by edge bitmask.
pub fn all_graphs(nx: usize, ny: usize) -> impl Iterator<Item = BipartiteGraph> {
    (0u64..1 << (nx * ny)).map(move |mask| {
        let edges = (0..nx * ny).filter(|k| mask >> k & 1 == 1).map(|k| (k / ny, k % ny));
        BipartiteGraph::new(nx, ny, edges).expect("bitmask edges are distinct")
    })
}

/// Every instance when there are at most `cap`, else `seeds` seeded samples.
pub fn instances(g: &BipartiteGraph, config: &VerifyConfig) -> Box<dyn Iterator<Item = PreferenceInstance>> {
    match PreferenceInstance::enumerate_all(g, config.instance_cap) {
        Ok(all) => Box::new(all),
        Err(_) => {
            let g = g.clone();
            let base = config.seed;
            Box::new(
                (0..config.seeds).map(move |i| PreferenceInstance::sample_uniform(&g, base.wrapping_add(i))),
            )
        }
    }
}

fn stable_set(g: &BipartiteGraph, p: &PreferenceInstance) -> Vec<Matching> {
    stable_matchings(g, p, DEFAULT_NODE_CAP).expect("small graphs stay under the node cap").0
}

/// Matched sets agree across members, on both sides.
fn invariant(set: &[Matching]) -> bool {
    set.windows(2).all(|w| Side::BOTH.iter().all(|&s| w[0].matched_set(s) == w[1].matched_set(s)))
}

fn describe(g: &BipartiteGraph) -> String {
    let edges: Vec<String> =
        g.edges().map(|(x, y)| format!("{}{}", VertexId::x(x), VertexId::y(y))).collect();
    format!("{}x{} [{}]", g.x_count(), g.y_count(), edges.join(" "))
}

pub struct SaturationSuites {
    pub verdicts: CriterionResult,
    pub adversary: CriterionResult,
    pub invariance: CriterionResult,
}

/// Criteria 1-3, sharing one sweep over all graphs up to `max_side` per side.
pub fn saturation_suites(config: &VerifyConfig) -> SaturationSuites {
    let mut t1 = Tally::new(1, "saturation verdict matches exhaustive ground truth");
    let mut l2 = Tally::new(2, "adversarial instance strands its target");
    let mut mw = Tally::new(3, "matched sets agree across stable matchings");

    for nx in 1..=config.max_side {
        for ny in 0..=config.max_side {
            for g in all_graphs(nx, ny) {
                t1.graphs += 1;
                let mut verdict = saturation_verdict(&g, Side::X).holds;
                if config.fault == Some(Fault::NegateSaturationVerdict) {
                    verdict = !verdict;
                }
                let mut truth = true;
                for p in instances(&g, config) {
                    let set = stable_set(&g, &p);
                    t1.instances += 1;
                    t1.matchings += set.len() as u64;
                    mw.instances += 1;
                    mw.matchings += set.len() as u64;
                    if !invariant(&set) {
                        mw.fail(format!("{}: matched sets differ", describe(&g)));
                    }
                    if set.is_empty() {
                        t1.fail(format!("{}: no stable matching found", describe(&g)));
                    }
                    truth &= set.iter().all(|m| m.is_saturating(Side::X));
                }
                if verdict != truth {
                    t1.fail(format!("{}: verdict {verdict}, exhaustive {truth}", describe(&g)));
                }

                for x in g.vertices(Side::X) {
                    let r = vertex_report(&g, x).expect("vertex of g");
                    if r.satisfied || r.isolated {
                        continue;
                    }
                    l2.instances += 1;
                    let p = match adversarial_instance(&g, x) {
                        Ok(_) if config.fault == Some(Fault::PlainAdversary) => {
                            PreferenceInstance::ascending(&g)
                        }
                        Ok(p) => p,
                        Err(e) => {
                            l2.fail(format!("{} at {x}: {e}", describe(&g)));
                            continue;
                        }
                    };
                    let set = stable_set(&g, &p);
                    l2.matchings += set.len() as u64;
                    mw.instances += 1;
                    mw.matchings += set.len() as u64;
                    if !invariant(&set) {
                        mw.fail(format!("{}: matched sets differ under adversarial instance", describe(&g)));
                    }
                    if set.iter().any(|m| m.partner(x).is_some()) {
                        l2.fail(format!("{}: {x} matched under its adversarial instance", describe(&g)));
                    }
                }
            }
        }
    }
    l2.graphs = t1.graphs;
    mw.graphs = t1.graphs;
    SaturationSuites { verdicts: t1.finish(), adversary: l2.finish(), invariance: mw.finish() }
}

/// Is every stable matching perfect under every checked instance?
fn all_perfect(g: &BipartiteGraph, config: &VerifyConfig, tally: &mut Tally) -> bool {
    let mut perfect = true;
    for p in instances(g, config) {
        let set = stable_set(g, &p);
        tally.instances += 1;
        tally.matchings += set.len() as u64;
        perfect &= set.iter().all(Matching::is_perfect);
        if !perfect {
            break;
        }
    }
    perfect
}

/// Criterion 4: connected balanced graphs.
pub fn completeness_exhaustive(config: &VerifyConfig) -> CriterionResult {
    let mut t = Tally::new(4, "connected balanced graphs: perfect iff complete");
    for n in 1..=config.max_side {
        for g in all_graphs(n, n).filter(BipartiteGraph::is_connected) {
            t.graphs += 1;
            let verdict = completeness_verdict(&g).expect("connected and balanced").holds;
            let truth = all_perfect(&g, config, &mut t);
            if verdict != truth {
                t.fail(format!("{}: verdict {verdict}, exhaustive {truth}", describe(&g)));
            }
        }
    }
    t.finish()
}

/// Criterion 5: all balanced graphs, components must be balanced bicliques.
pub fn components_exhaustive(config: &VerifyConfig) -> CriterionResult {
    let mut t = Tally::new(5, "balanced graphs: perfect iff every component is a balanced biclique");
    let split = BipartiteGraph::new(3, 3, [(0, 0), (0, 1), (1, 2), (2, 2)]).expect("static graph");
    let mut saw_split = false;
    for n in 1..=config.max_side {
        for g in all_graphs(n, n) {
            t.graphs += 1;
            let verdict = component_verdict(&g).expect("balanced").holds;
            let truth = all_perfect(&g, config, &mut t);
            if verdict != truth {
                t.fail(format!("{}: verdict {verdict}, exhaustive {truth}", describe(&g)));
            }
            if g == split {
                saw_split = true;
                let bicliques_only = g.components().iter().all(|c| c.graph.is_biclique());
                t.notes.push(format!(
                    "K_(1,2) + K_(2,1): all components bicliques = {bicliques_only}, verdict = {verdict}, exhaustive = {truth}"
                ));
            }
        }
    }
    if config.max_side >= 3 && !saw_split {
        t.fail("K_(1,2) + K_(2,1) was not among the checked graphs".into());
    }
    t.finish()
}

/// Markets up to relabeling within a side: X memberships as a non-decreasing
/// sequence of class bitmasks and Y as a count per class.
pub fn all_class_markets(max_classes: usize, max_side: usize) -> Vec<CompatibilityMarket> {
    fn memberships(n: usize, len: usize, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for mask in min..(1u32 << n) {
            cur.push(mask);
            memberships(n, len, mask, cur, out);
            cur.pop();
        }
    }
    fn counts(n: usize, total: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n - 1 {
            let used: usize = cur.iter().sum();
            let mut full = cur.clone();
            full.push(total - used);
            out.push(full);
            return;
        }
        let used: usize = cur.iter().sum();
        for c in 0..=total - used {
            cur.push(c);
            counts(n, total, cur, out);
            cur.pop();
        }
    }

    let mut markets = Vec::new();
    for n in 1..=max_classes {
        for nx in n..=max_side {
            let mut xs = Vec::new();
            memberships(n, nx, 1, &mut Vec::new(), &mut xs);
            for ny in 0..=max_side {
                let mut ys = Vec::new();
                counts(n, ny, &mut Vec::new(), &mut ys);
                for x in &xs {
                    let membership: Vec<BTreeSet<usize>> =
                        x.iter().map(|&mask| (0..n).filter(|i| mask >> i & 1 == 1).collect()).collect();
                    for y in &ys {
                        let y_class: Vec<usize> =
                            y.iter().enumerate().flat_map(|(c, &k)| std::iter::repeat_n(c, k)).collect();
                        if let Ok(m) = CompatibilityMarket::new(n, membership.clone(), y_class) {
                            markets.push(m);
                        }
                    }
                }
            }
        }
    }
    markets
}

/// Criterion 6: class-size verdict against enumeration on induced graphs.
pub fn class_markets(config: &VerifyConfig) -> CriterionResult {
    let mut t = Tally::new(6, "compatibility classes: saturating iff |B_i| >= |A_i|");
    for market in all_class_markets(config.max_classes, config.wide_side) {
        t.graphs += 1;
        let g = market.induced_graph();
        let verdict = market.class_verdict();
        let label = || {
            let sizes: Vec<String> =
                verdict.classes.iter().map(|c| format!("{}/{}", c.a_size, c.b_size)).collect();
            format!("market |A|/|B| = [{}], {}", sizes.join(" "), describe(&g))
        };
        if !market.verdict_consistency().consistent {
            t.fail(format!("{}: class sizes pass but a vertex fails both conditions", label()));
        }
        if verdict.holds {
            for i in 0..config.class_samples {
                let p = PreferenceInstance::sample_uniform(&g, config.seed.wrapping_add(i));
                let set = stable_set(&g, &p);
                t.instances += 1;
                t.matchings += set.len() as u64;
                if !set.iter().all(|m| m.is_saturating(Side::X)) {
                    t.fail(format!("{}: non-saturating stable matching (seed {})", label(), config.seed + i));
                }
            }
        } else {
            let class = verdict.deficient().next().expect("failed verdict has a deficient class").class;
            let x = VertexId::x(market.exclusive_members(class).next().expect("validated market"));
            let p = match adversarial_instance(&g, x) {
                Ok(p) => p,
                // Empty B_i: the exclusive member has no partner at all.
                Err(satmatch_core::AnalysisError::Isolated { .. }) => {
                    PreferenceInstance::sample_uniform(&g, config.seed)
                }
                Err(e) => {
                    t.fail(format!("{}: no adversarial instance for {x}: {e}", label()));
                    continue;
                }
            };
            let set = stable_set(&g, &p);
            t.instances += 1;
            t.matchings += set.len() as u64;
            if set.iter().any(|m| m.partner(x).is_some()) {
                t.fail(format!("{}: {x} matched under its adversarial instance", label()));
            }
        }
    }
    t.finish()
}

pub const FIXTURES: [(&str, &str); 5] = [
    ("fig1a", include_str!("../fixtures/fig1a.toml")),
    ("fig1b", include_str!("../fixtures/fig1b.toml")),
    ("fig1c", include_str!("../fixtures/fig1c.toml")),
    ("fig2a", include_str!("../fixtures/fig2a.toml")),
    ("fig2b", include_str!("../fixtures/fig2b.toml")),
];

/// Criterion 7: the analysis of the five figure markets.
pub fn figure_fixtures() -> CriterionResult {
    let mut t = Tally::new(7, "figure fixtures reproduce the expected verdicts");
    for (name, text) in FIXTURES {
        t.graphs += 1;
        let market = match MarketFile::parse(text).and_then(|f| Market::from_file(&f)) {
            Ok(m) => m,
            Err(e) => {
                t.fail(format!("{name}: {e}"));
                continue;
            }
        };
        let r = analyze_market(&market, Side::X);
        let row = |v: &str| r.vertices.iter().find(|row| row.name == v);
        let ok = match name {
            "fig1a" => {
                let x2 = row("x2");
                !r.holds
                    && x2.is_some_and(|x2| !x2.satisfied && (x2.nn_size, x2.n_size) == (2, 1))
                    && r.vertices.iter().filter(|row| !row.satisfied).count() == 1
                    && r.counterexample.as_ref().is_some_and(|c| c.vertex == "x2")
            }
            "fig1b" => r.holds,
            "fig1c" => {
                r.holds
                    && row("x1").is_some_and(|v| v.cond1)
                    && row("x2").is_some_and(|v| v.cond1)
                    && row("x3").is_some_and(|v| !v.cond1 && v.witness.as_deref() == Some("y3"))
            }
            "fig2a" => !r.perfect && r.complete.as_ref().is_some_and(|c| !c.holds),
            "fig2b" => r.perfect && r.components.as_ref().is_some_and(|c| c.holds && c.components.len() == 2),
            _ => false,
        };
        if !ok {
            t.fail(format!("{name}: unexpected analysis"));
        }
    }
    t.finish()
}

/// Every matching of `g`, as X-partner vectors.
fn every_matching(g: &BipartiteGraph) -> Vec<Vec<Option<usize>>> {
    fn go(
        g: &BipartiteGraph,
        x: usize,
        taken: &mut [bool],
        cur: &mut Vec<Option<usize>>,
        out: &mut Vec<Vec<Option<usize>>>,
    ) {
        if x == g.x_count() {
            out.push(cur.clone());
            return;
        }
        cur.push(None);
        go(g, x + 1, taken, cur, out);
        cur.pop();
        for &y in g.adjacent(VertexId::x(x)) {
            if !taken[y] {
                taken[y] = true;
                cur.push(Some(y));
                go(g, x + 1, taken, cur, out);
                cur.pop();
                taken[y] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(g, 0, &mut vec![false; g.y_count()], &mut Vec::new(), &mut out);
    out
}

/// No edge outside the matching has both endpoints preferring each other.
fn no_blocking_edge(g: &BipartiteGraph, p: &PreferenceInstance, x_partner: &[Option<usize>]) -> bool {
    let mut y_partner = vec![None; g.y_count()];
    for (x, py) in x_partner.iter().enumerate() {
        if let Some(y) = *py {
            y_partner[y] = Some(x);
        }
    }
    let before = |list: &[usize], a: usize, current: Option<usize>| match current {
        None => true,
        Some(c) => list.iter().position(|&v| v == a) < list.iter().position(|&v| v == c),
    };
    !g.edges().any(|(x, y)| {
        x_partner[x] != Some(y)
            && before(p.list(VertexId::x(x)), y, x_partner[x])
            && before(p.list(VertexId::y(y)), x, y_partner[y])
    })
}

pub fn brute_force_stable(g: &BipartiteGraph, p: &PreferenceInstance) -> Vec<Vec<Option<usize>>> {
    let mut all: Vec<_> = every_matching(g).into_iter().filter(|m| no_blocking_edge(g, p, m)).collect();
    all.sort();
    all
}

/// Criterion 8: engine enumeration against the brute-force oracle.
pub fn oracle_equivalence(config: &VerifyConfig) -> CriterionResult {
    let mut t = Tally::new(8, "stable enumeration agrees with brute force");
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x0ac1e);
    for _ in 0..config.oracle_pairs {
        let nx = rng.random_range(1..=config.wide_side);
        let ny = rng.random_range(1..=config.wide_side);
        let edges: Vec<(usize, usize)> =
            (0..nx).flat_map(|x| (0..ny).map(move |y| (x, y))).filter(|_| rng.random_bool(0.5)).collect();
        let g = BipartiteGraph::new(nx, ny, edges).expect("distinct edges");
        let p = PreferenceInstance::sample_uniform(&g, rng.random());
        t.graphs += 1;
        t.instances += 1;
        let ours: Vec<Vec<Option<usize>>> =
            stable_set(&g, &p).iter().map(|m| m.partners(Side::X).to_vec()).collect();
        t.matchings += ours.len() as u64;
        if ours != brute_force_stable(&g, &p) {
            t.fail(format!("{}: enumerations differ", describe(&g)));
        }
    }
    t.finish()
}
