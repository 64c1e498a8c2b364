//! The full check suite behind `simres verify`.
//!
//! Checks are grouped into families. Each family runs over a grid of
//! `(q, t)` instances (or over `q` alone) and reports pass/fail together with
//! the first counterexample it met. Exact oracles are built once per instance
//! and shared between families.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{self, build_network, NodeId, SimplicialNetwork};
use crate::indices::{self, IndexReport, Provenance};
use crate::oracle::{
    self, grounded_one_inverse, laplacian, max_relative_error, partitioned_one_inverse,
    verify_clique_block_inverse, verify_cross_block_product, ExactOracle, FloatOracle,
    FLOAT_TOLERANCE,
};
use crate::parallel::Execution;
use crate::recursion::{
    classify_pair, omega_node_to_parents, omega_set_sum, parent_resistances, PairClass,
    RecursiveResistance, ResistanceMemo,
};
use crate::scalar::{from_biguint, int, ratio, render, to_f64, Exact};

/// Networks up to this size also get the dense rational block checks.
pub const BLOCK_CHECK_MAX_NODES: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckFamily {
    Degrees,
    CrossBlockProduct,
    CliqueBlockInverse,
    BlockOneInverse,
    OldPairScaling,
    SiblingResistance,
    ParentResistance,
    RecursionVsOracle,
    NewEdgeSum,
    NewSetSum,
    Foster,
    SumRule,
    IndexAgreement,
    BaseReductions,
    MeanResistance,
    FloatVsExact,
}

impl CheckFamily {
    pub const ALL: [CheckFamily; 16] = [
        CheckFamily::Degrees,
        CheckFamily::CrossBlockProduct,
        CheckFamily::CliqueBlockInverse,
        CheckFamily::BlockOneInverse,
        CheckFamily::OldPairScaling,
        CheckFamily::SiblingResistance,
        CheckFamily::ParentResistance,
        CheckFamily::RecursionVsOracle,
        CheckFamily::NewEdgeSum,
        CheckFamily::NewSetSum,
        CheckFamily::Foster,
        CheckFamily::SumRule,
        CheckFamily::IndexAgreement,
        CheckFamily::BaseReductions,
        CheckFamily::MeanResistance,
        CheckFamily::FloatVsExact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckFamily::Degrees => "degrees",
            CheckFamily::CrossBlockProduct => "cross-block-product",
            CheckFamily::CliqueBlockInverse => "clique-block-inverse",
            CheckFamily::BlockOneInverse => "block-one-inverse",
            CheckFamily::OldPairScaling => "old-pair-scaling",
            CheckFamily::SiblingResistance => "sibling-resistance",
            CheckFamily::ParentResistance => "parent-resistance",
            CheckFamily::RecursionVsOracle => "recursion-vs-oracle",
            CheckFamily::NewEdgeSum => "new-edge-sum",
            CheckFamily::NewSetSum => "new-set-sum",
            CheckFamily::Foster => "foster",
            CheckFamily::SumRule => "sum-rule",
            CheckFamily::IndexAgreement => "index-agreement",
            CheckFamily::BaseReductions => "base-reductions",
            CheckFamily::MeanResistance => "mean-resistance",
            CheckFamily::FloatVsExact => "float-vs-exact",
        }
    }

    /// Library operations each family calls.
    pub fn exercises(self) -> &'static [&'static str] {
        match self {
            CheckFamily::Degrees => &[
                "build_network",
                "node_count",
                "edge_count",
                "new_node_count",
                "node_degree_formula",
                "degree_histogram_formula",
                "degree_histogram",
                "average_degree_formula",
                "handshake_holds",
            ],
            CheckFamily::CrossBlockProduct => &["verify_cross_block_product"],
            CheckFamily::CliqueBlockInverse => &["verify_clique_block_inverse"],
            CheckFamily::BlockOneInverse => &[
                "partitioned_one_inverse",
                "block_one_inverse",
                "grounded_one_inverse",
                "laplacian",
            ],
            CheckFamily::OldPairScaling => &["resistance_oracle"],
            CheckFamily::SiblingResistance => &["classify_pair", "resistance_recursive"],
            CheckFamily::ParentResistance => &[
                "omega_node_to_parents",
                "parent_resistances",
                "omega_set_sum",
            ],
            CheckFamily::RecursionVsOracle => {
                &["classify_pair", "resistance_recursive", "resistance_oracle"]
            }
            CheckFamily::NewEdgeSum => &["new_parent_edge_sum_check"],
            CheckFamily::NewSetSum => &["new_parent_set_sum_check"],
            CheckFamily::Foster => &["foster_check"],
            CheckFamily::SumRule => &["sum_rule_check"],
            CheckFamily::IndexAgreement => &[
                "kirchhoff_closed",
                "add_kirchhoff_closed",
                "mult_kirchhoff_closed",
                "indices_by_recursion",
                "indices_brute_force",
            ],
            CheckFamily::BaseReductions => &[
                "kirchhoff_closed",
                "add_kirchhoff_closed",
                "mult_kirchhoff_closed",
            ],
            CheckFamily::MeanResistance => &["avg_resistance", "avg_resistance_limit"],
            CheckFamily::FloatVsExact => &["resistance_oracle", "indices_brute_force"],
        }
    }

    fn per_instance(self) -> bool {
        !matches!(
            self,
            CheckFamily::BaseReductions | CheckFamily::MeanResistance
        )
    }
}

impl fmt::Display for CheckFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckFamily::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| Error::Parameter(format!("unknown check family '{s}'")))
    }
}

/// Parses a comma-separated family list; `all` selects everything.
pub fn parse_families(list: &str) -> Result<Vec<CheckFamily>> {
    if list.trim() == "all" {
        return Ok(CheckFamily::ALL.to_vec());
    }
    let mut out = Vec::new();
    for part in list.split(',').filter(|p| !p.trim().is_empty()) {
        let f: CheckFamily = part.parse()?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    if out.is_empty() {
        return Err(Error::Parameter("empty check list".into()));
    }
    Ok(out)
}

/// The three index closed forms under test, swappable for fault injection.
#[derive(Clone, Copy)]
pub struct ClosedForms {
    pub kirchhoff: fn(u32, u32) -> Exact,
    pub additive: fn(u32, u32) -> Exact,
    pub multiplicative: fn(u32, u32) -> Exact,
}

impl Default for ClosedForms {
    fn default() -> Self {
        Self {
            kirchhoff: indices::kirchhoff_closed,
            additive: indices::add_kirchhoff_closed,
            multiplicative: indices::mult_kirchhoff_closed,
        }
    }
}

impl fmt::Debug for ClosedForms {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ClosedForms")
    }
}

/// Kirchhoff closed form with its constant term halved.
fn corrupted_kirchhoff(q: u32, t: u32) -> Exact {
    let q1 = q as i64 + 1;
    let q3 = q as i64 + 3;
    indices::kirchhoff_closed(q, t) + ratio(q1, q3 * q3)
}

impl ClosedForms {
    pub fn with_corrupted_kirchhoff() -> Self {
        Self {
            kirchhoff: corrupted_kirchhoff,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyScope {
    pub qs: Vec<u32>,
    pub ts: Vec<u32>,
    pub families: Vec<CheckFamily>,
    pub max_nodes: u64,
    pub exec: Execution,
    pub closed_forms: ClosedForms,
    /// Extra instance checked only by the float family.
    pub float_probe: Option<(u32, u32)>,
    pub sum_rule_pairs: usize,
}

impl Default for VerifyScope {
    fn default() -> Self {
        Self {
            qs: vec![1, 2, 3],
            ts: vec![0, 1, 2],
            families: CheckFamily::ALL.to_vec(),
            max_nodes: graph::DEFAULT_MAX_NODES,
            exec: Execution::default(),
            closed_forms: ClosedForms::default(),
            float_probe: Some((1, 4)),
            sum_rule_pairs: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub family: CheckFamily,
    pub scope: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} [{}] {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.family,
            self.scope,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }

    pub fn summary(&self) -> String {
        let failed = self.failures().count();
        format!(
            "{} checks, {} passed, {} failed",
            self.outcomes.len(),
            self.outcomes.len() - failed,
            failed
        )
    }
}

/// Counts checks and keeps the first failure.
#[derive(Default)]
struct Tally {
    checked: usize,
    first: Option<String>,
}

impl Tally {
    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.first.is_none() {
            self.first = Some(describe());
        }
    }

    fn finish(self, unit: &str) -> (bool, String) {
        match self.first {
            None => (true, format!("{} {unit} checked", self.checked)),
            Some(c) => (false, format!("first counterexample: {c}")),
        }
    }
}

/// Runs every selected family, streaming outcomes to `log`.
pub fn run_checks(scope: &VerifyScope, log: &mut dyn FnMut(&CheckOutcome)) -> Result<VerifyReport> {
    let mut suite = Suite {
        scope,
        networks: HashMap::new(),
        oracles: HashMap::new(),
        report: VerifyReport::default(),
        log,
    };
    for &family in &scope.families {
        if family.per_instance() {
            for &q in &scope.qs {
                for &t in &scope.ts {
                    suite.run_instance(family, q, t)?;
                }
            }
            if family == CheckFamily::FloatVsExact {
                if let Some((q, t)) = scope.float_probe {
                    if !(scope.qs.contains(&q) && scope.ts.contains(&t)) {
                        suite.run_instance(family, q, t)?;
                    }
                }
            }
        } else {
            suite.run_global(family)?;
        }
    }
    Ok(suite.report)
}

struct Suite<'a> {
    scope: &'a VerifyScope,
    networks: HashMap<(u32, u32), Rc<SimplicialNetwork>>,
    oracles: HashMap<(u32, u32), Rc<ExactOracle>>,
    report: VerifyReport,
    log: &'a mut dyn FnMut(&CheckOutcome),
}

fn label(q: u32, t: u32) -> String {
    format!("q={q} t={t}")
}

impl Suite<'_> {
    fn network(&mut self, q: u32, t: u32) -> Result<Rc<SimplicialNetwork>> {
        if let Some(n) = self.networks.get(&(q, t)) {
            return Ok(n.clone());
        }
        let n = Rc::new(build_network(q, t, self.scope.max_nodes)?);
        self.networks.insert((q, t), n.clone());
        Ok(n)
    }

    fn oracle(&mut self, q: u32, t: u32) -> Result<Rc<ExactOracle>> {
        if let Some(o) = self.oracles.get(&(q, t)) {
            return Ok(o.clone());
        }
        let network = self.network(q, t)?;
        let o = Rc::new(ExactOracle::with_ground(&network, 0, self.scope.exec)?);
        self.oracles.insert((q, t), o.clone());
        Ok(o)
    }

    fn emit(&mut self, family: CheckFamily, scope: String, (passed, detail): (bool, String)) {
        let outcome = CheckOutcome {
            family,
            scope,
            passed,
            detail,
        };
        (self.log)(&outcome);
        self.report.outcomes.push(outcome);
    }

    fn run_instance(&mut self, family: CheckFamily, q: u32, t: u32) -> Result<()> {
        let needs_level = !matches!(
            family,
            CheckFamily::Degrees
                | CheckFamily::RecursionVsOracle
                | CheckFamily::Foster
                | CheckFamily::SumRule
                | CheckFamily::IndexAgreement
                | CheckFamily::FloatVsExact
        );
        if needs_level && t == 0 {
            return Ok(());
        }
        let network = self.network(q, t)?;
        if family == CheckFamily::BlockOneInverse && network.node_len() > BLOCK_CHECK_MAX_NODES {
            return Ok(());
        }
        let result = match family {
            CheckFamily::Degrees => check_degrees(&network),
            CheckFamily::CrossBlockProduct => identity(verify_cross_block_product(&network, t)?),
            CheckFamily::CliqueBlockInverse => identity(verify_clique_block_inverse(&network, t)?),
            CheckFamily::BlockOneInverse => {
                let oracle = self.oracle(q, t)?;
                check_block_one_inverse(&network, &oracle)?
            }
            CheckFamily::OldPairScaling => {
                let now = self.oracle(q, t)?;
                let before = self.oracle(q, t - 1)?;
                check_old_pair_scaling(&network, &now, &before)?
            }
            CheckFamily::SiblingResistance => {
                let oracle = self.oracle(q, t)?;
                check_siblings(&network, &oracle)?
            }
            CheckFamily::ParentResistance => {
                let oracle = self.oracle(q, t)?;
                check_parents(&network, &oracle)?
            }
            CheckFamily::RecursionVsOracle => {
                let oracle = self.oracle(q, t)?;
                check_recursion_vs_oracle(&network, &oracle)?
            }
            CheckFamily::NewEdgeSum => {
                let oracle = self.oracle(q, t)?;
                check_new_edge_sum(&network, &oracle)?
            }
            CheckFamily::NewSetSum => {
                let oracle = self.oracle(q, t)?;
                check_new_set_sum(&network, &oracle)?
            }
            CheckFamily::Foster => {
                let oracle = self.oracle(q, t)?;
                check_foster(&network, &oracle)?
            }
            CheckFamily::SumRule => {
                let oracle = self.oracle(q, t)?;
                check_sum_rule(&network, &oracle, self.scope.sum_rule_pairs)?
            }
            CheckFamily::IndexAgreement => {
                let oracle = self.oracle(q, t)?;
                check_index_agreement(&network, &oracle, self.scope)
            }
            CheckFamily::FloatVsExact => {
                let oracle = self.oracle(q, t)?;
                check_float(&network, &oracle, self.scope.exec)?
            }
            CheckFamily::BaseReductions | CheckFamily::MeanResistance => unreachable!(),
        };
        self.emit(family, label(q, t), result);
        Ok(())
    }

    fn run_global(&mut self, family: CheckFamily) -> Result<()> {
        match family {
            CheckFamily::BaseReductions => {
                let result = check_base_reductions(&self.scope.closed_forms);
                self.emit(family, "q=1..10 t=0".into(), result);
            }
            CheckFamily::MeanResistance => {
                for q in self.scope.qs.clone() {
                    let result = check_mean_resistance(q, &self.scope.closed_forms);
                    self.emit(family, format!("q={q} t=0..8"), result);
                }
            }
            _ => unreachable!(),
        }
        Ok(())
    }
}

fn identity(check: oracle::IdentityCheck) -> (bool, String) {
    match check.first_mismatch {
        None if check.holds => (true, "identity holds entrywise".into()),
        None => (false, "identity fails".into()),
        Some((r, c, e, a)) => (
            false,
            format!("first counterexample: entry ({r},{c}) expected {e}, got {a}"),
        ),
    }
}

fn check_degrees(network: &SimplicialNetwork) -> (bool, String) {
    let (q, t) = (network.q(), network.t());
    let mut tally = Tally::default();
    let n = graph::node_count(q, t);
    let m = graph::edge_count(q, t);
    tally.record(n == network.node_len().into(), || {
        format!("node count {} vs formula {n}", network.node_len())
    });
    tally.record(m == network.edge_len().into(), || {
        format!("edge count {} vs formula {m}", network.edge_len())
    });
    for level in 1..=t {
        let w = graph::new_node_count(q, level);
        let built = network.created_at(level).len();
        tally.record(w == built.into(), || {
            format!("level {level} created {built} nodes, formula {w}")
        });
    }
    for v in network.nodes() {
        let expected = graph::node_degree_formula(q, t, v.born);
        let actual = network.degree(v.id);
        tally.record(expected == actual.into(), || {
            format!("node {} degree {actual}, formula {expected}", v.id)
        });
    }
    let formula = graph::degree_histogram_formula(q, t);
    let built = network.degree_histogram();
    let same = formula.len() == built.len()
        && built
            .iter()
            .all(|(d, c)| formula.get(&(*d).into()) == Some(&(*c).into()));
    tally.record(same, || {
        format!("histogram {built:?} vs formula {formula:?}")
    });
    tally.record(graph::handshake_holds(q, t), || "handshake identity".into());
    let avg = graph::average_degree_formula(q, t);
    let direct = ratio(2 * network.edge_len() as i64, network.node_len() as i64);
    tally.record(avg == direct, || {
        format!(
            "average degree {} vs formula {}",
            render(&direct),
            render(&avg)
        )
    });
    tally.finish("degree facts")
}

fn check_block_one_inverse(
    network: &SimplicialNetwork,
    oracle: &ExactOracle,
) -> Result<(bool, String)> {
    let n = network.node_len();
    let mut tally = Tally::default();
    let block = partitioned_one_inverse(network, network.t(), 0)?;
    let other_ground = grounded_one_inverse(&laplacian(network), n - 1)?;
    for i in 0..n {
        for j in i + 1..n {
            let a = block.resistance(i, j);
            let b = other_ground.resistance(i, j);
            let ok = oracle.matches(i, j, &a) && a == b;
            tally.record(ok, || {
                format!(
                    "pair ({i},{j}): block {} vs ground-{} {} vs oracle",
                    render(&a),
                    n - 1,
                    render(&b)
                )
            });
        }
    }
    Ok(tally.finish("pairs"))
}

fn shown(oracle: &ExactOracle, i: NodeId, j: NodeId) -> String {
    oracle
        .resistance(i, j)
        .map(|v| render(&v))
        .unwrap_or_else(|e| e.to_string())
}

fn check_old_pair_scaling(
    network: &SimplicialNetwork,
    now: &ExactOracle,
    before: &ExactOracle,
) -> Result<(bool, String)> {
    let factor = ratio(2, network.q() as i64 + 2);
    let old = network.nodes_at(network.t() - 1);
    let mut tally = Tally::default();
    for i in 0..old {
        for j in i + 1..old {
            let expected = &factor * before.resistance(i, j)?;
            tally.record(now.matches(i, j, &expected), || {
                format!(
                    "pair ({i},{j}): {} vs scaled {}",
                    shown(now, i, j),
                    render(&expected)
                )
            });
        }
    }
    Ok(tally.finish("old pairs"))
}

/// Pairs of top-level nodes sharing a clique copy.
fn sibling_pairs(network: &SimplicialNetwork) -> Vec<(NodeId, NodeId)> {
    let nodes = network.nodes();
    let fresh: Vec<NodeId> = network.created_at(network.t()).collect();
    let mut out = Vec::new();
    for (k, &i) in fresh.iter().enumerate() {
        for &j in &fresh[k + 1..] {
            if nodes[i].clique == nodes[j].clique {
                out.push((i, j));
            }
        }
    }
    out
}

fn check_siblings(network: &SimplicialNetwork, oracle: &ExactOracle) -> Result<(bool, String)> {
    let t = network.t();
    let expected = ratio(2, network.q() as i64 + 2);
    let mut memo = ResistanceMemo::new();
    let mut tally = Tally::default();
    let pairs = sibling_pairs(network);
    for (i, j) in pairs {
        let class = classify_pair(network, t, i, j)?.class;
        tally.record(class == PairClass::AdjacentNew, || {
            format!("pair ({i},{j}) classified {class:?}")
        });
        tally.record(network.contains_edge(i, j), || {
            format!("pair ({i},{j}) not adjacent")
        });
        let r = crate::recursion::resistance_recursive(network, t, i, j, &mut memo)?;
        let ok = r == expected && oracle.matches(i, j, &expected);
        tally.record(ok, || {
            format!(
                "pair ({i},{j}): recursion {} oracle {} expected {}",
                render(&r),
                shown(oracle, i, j),
                render(&expected)
            )
        });
    }
    Ok(tally.finish("sibling facts"))
}

fn check_parents(network: &SimplicialNetwork, oracle: &ExactOracle) -> Result<(bool, String)> {
    let t = network.t();
    let mut memo = ResistanceMemo::new();
    let mut tally = Tally::default();
    for i in network.created_at(t) {
        let (m, n) = network.nodes()[i].parents.expect("new nodes have parents");
        let total = omega_node_to_parents(network, t, i, &mut memo)?;
        let (a, b) = parent_resistances(network, t, i, &mut memo)?;
        let as_set = omega_set_sum(network, t, &[i], &[m, n], &mut memo)?;
        let from_oracle = oracle.resistance(i, m)? + oracle.resistance(i, n)?;
        tally.record(a == b, || {
            format!("node {i}: parents at {} and {}", render(&a), render(&b))
        });
        tally.record(
            total == &a + &b && total == as_set && total == from_oracle,
            || {
                format!(
                    "node {i}: formula {} vs recursion {} vs set sum {} vs oracle {}",
                    render(&total),
                    render(&(&a + &b)),
                    render(&as_set),
                    render(&from_oracle)
                )
            },
        );
    }
    Ok(tally.finish("parent facts"))
}

fn check_recursion_vs_oracle(
    network: &SimplicialNetwork,
    oracle: &ExactOracle,
) -> Result<(bool, String)> {
    let n = network.node_len();
    let mut session = RecursiveResistance::new(network);
    let mut plain = RecursiveResistance::without_memo(network);
    let mut tally = Tally::default();
    let mut spot = 0;
    for i in 0..n {
        for j in i + 1..n {
            let r = session.resistance(i, j)?;
            tally.record(oracle.matches(i, j, &r), || {
                format!(
                    "pair ({i},{j}): recursion {} oracle {}",
                    render(&r),
                    shown(oracle, i, j)
                )
            });
            if spot < 20 && (i + j) % 7 == 0 {
                spot += 1;
                let unmemoized = plain.resistance(i, j)?;
                tally.record(unmemoized == r, || {
                    format!(
                        "pair ({i},{j}): memo {} vs plain {}",
                        render(&r),
                        render(&unmemoized)
                    )
                });
            }
        }
    }
    Ok(tally.finish("pairs"))
}

fn zero_residual(tally: &mut Tally, residual: Exact, what: impl FnOnce() -> String) {
    let ok = residual.is_zero();
    tally.record(ok, || format!("{}: residual {}", what(), render(&residual)));
}

fn check_new_edge_sum(network: &SimplicialNetwork, oracle: &ExactOracle) -> Result<(bool, String)> {
    let mut tally = Tally::default();
    let mut o = oracle;
    zero_residual(
        &mut tally,
        indices::new_parent_edge_sum_check(network, &mut o)?,
        || "oracle".into(),
    );
    let mut rec = RecursiveResistance::new(network);
    zero_residual(
        &mut tally,
        indices::new_parent_edge_sum_check(network, &mut rec)?,
        || "recursion".into(),
    );
    Ok(tally.finish("sums"))
}

fn check_new_set_sum(network: &SimplicialNetwork, oracle: &ExactOracle) -> Result<(bool, String)> {
    let old = network.nodes_at(network.t() - 1);
    let everything: Vec<NodeId> = (0..old).collect();
    let alternate: Vec<NodeId> = (0..old).step_by(2).collect();
    let sets: [(&str, Vec<NodeId>); 4] = [
        ("empty set", vec![]),
        ("single node", vec![0]),
        ("every other old node", alternate),
        ("all old nodes", everything),
    ];
    let mut tally = Tally::default();
    let mut o = oracle;
    for (name, ys) in &sets {
        zero_residual(
            &mut tally,
            indices::new_parent_set_sum_check(network, ys, &mut o)?,
            || (*name).into(),
        );
    }
    Ok(tally.finish("sets"))
}

fn check_foster(network: &SimplicialNetwork, oracle: &ExactOracle) -> Result<(bool, String)> {
    let mut tally = Tally::default();
    let mut o = oracle;
    zero_residual(&mut tally, indices::foster_check(network, &mut o)?, || {
        "oracle".into()
    });
    let mut rec = RecursiveResistance::new(network);
    zero_residual(
        &mut tally,
        indices::foster_check(network, &mut rec)?,
        || "recursion".into(),
    );
    Ok(tally.finish("edge sums"))
}

/// Deterministic spread of distinct ordered pairs; all of them when there
/// are no more than `count`.
pub fn sample_pairs(n: usize, count: usize) -> Vec<(NodeId, NodeId)> {
    let total = n * n.saturating_sub(1);
    if total <= count {
        return (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
    }
    let mut out = Vec::with_capacity(count);
    let mut k: usize = 0;
    while out.len() < count {
        let i = (k * 7 + 3) % n;
        let j = (i + 1 + (k * 13 + 5) % (n - 1)) % n;
        if !out.contains(&(i, j)) {
            out.push((i, j));
        }
        k += 1;
    }
    out
}

fn check_sum_rule(
    network: &SimplicialNetwork,
    oracle: &ExactOracle,
    count: usize,
) -> Result<(bool, String)> {
    let mut tally = Tally::default();
    let mut o = oracle;
    let mut rec = RecursiveResistance::new(network);
    for (i, j) in sample_pairs(network.node_len(), count) {
        zero_residual(
            &mut tally,
            indices::sum_rule_check(network, i, j, &mut o)?,
            || format!("pair ({i},{j}) oracle"),
        );
        zero_residual(
            &mut tally,
            indices::sum_rule_check(network, i, j, &mut rec)?,
            || format!("pair ({i},{j}) recursion"),
        );
    }
    Ok(tally.finish("pair residuals"))
}

fn check_index_agreement(
    network: &SimplicialNetwork,
    oracle: &ExactOracle,
    scope: &VerifyScope,
) -> (bool, String) {
    let (q, t) = (network.q(), network.t());
    let forms = &scope.closed_forms;
    let mut report = IndexReport::from_values(
        q,
        t,
        (forms.kirchhoff)(q, t),
        (forms.additive)(q, t),
        (forms.multiplicative)(q, t),
        Provenance::ClosedForm,
    );
    let merged = report
        .merge(&indices::indices_by_recursion(q, t))
        .and_then(|_| report.merge(&indices::brute_force_with(network, oracle, scope.exec)));
    match merged {
        Ok(()) => (
            true,
            format!(
                "R={} agreed across {}",
                render(&report.kirchhoff.value),
                report.provenance()
            ),
        ),
        Err(e) => (false, format!("first counterexample: {e}")),
    }
}

fn check_base_reductions(forms: &ClosedForms) -> (bool, String) {
    let mut tally = Tally::default();
    for q in 1..=10u32 {
        let q1 = q as i64 + 1;
        let cases = [
            ("Kirchhoff index", (forms.kirchhoff)(q, 0), int(2 * q1)),
            (
                "additive degree-Kirchhoff index",
                (forms.additive)(q, 0),
                int(4 * q1 * q1),
            ),
            (
                "multiplicative degree-Kirchhoff index",
                (forms.multiplicative)(q, 0),
                int(2 * q1.pow(3)),
            ),
        ];
        for (name, got, want) in cases {
            tally.record(got == want, || {
                format!(
                    "{name} closed form at q={q} t=0 gives {}, expected {}",
                    render(&got),
                    render(&want)
                )
            });
        }
    }
    tally.finish("reductions")
}

fn check_mean_resistance(q: u32, forms: &ClosedForms) -> (bool, String) {
    let mut tally = Tally::default();
    let limit = indices::avg_resistance_limit(q);
    let mut previous_gap: Option<Exact> = None;
    for t in 0..=8 {
        let n = from_biguint(&graph::node_count(q, t));
        let avg = (forms.kirchhoff)(q, t) / (&n * (&n - int(1)));
        let direct = indices::avg_resistance(q, t);
        let factored = indices::avg_resistance_factored(q, t);
        tally.record(avg == direct && direct == factored, || {
            format!(
                "t={t}: mean {} vs library {} vs factored {}",
                render(&avg),
                render(&direct),
                render(&factored)
            )
        });
        let gap = (&avg - &limit).abs();
        if let Some(prev) = &previous_gap {
            tally.record(&gap < prev, || {
                format!(
                    "t={t}: distance to limit {} did not shrink from {}",
                    render(&gap),
                    render(prev)
                )
            });
        }
        previous_gap = Some(gap);
    }
    tally.record(indices::avg_resistance_limit(q + 1) < limit, || {
        format!("limit at q={} is not below limit at q={q}", q + 1)
    });
    tally.finish("mean facts")
}

fn check_float(
    network: &SimplicialNetwork,
    oracle: &ExactOracle,
    exec: Execution,
) -> Result<(bool, String)> {
    let float = FloatOracle::new(network)?;
    let worst = max_relative_error(oracle, &float, exec);
    let brute = indices::brute_force_float(network, &float, exec);
    let closed = to_f64(&indices::kirchhoff_closed(network.q(), network.t()));
    let index_gap = ((brute.kirchhoff - closed) / closed).abs();
    let mut tally = Tally::default();
    tally.record(worst < FLOAT_TOLERANCE, || {
        format!("max relative pair error {worst:.3e}")
    });
    tally.record(index_gap < FLOAT_TOLERANCE, || {
        format!(
            "float Kirchhoff index {} vs closed form {closed}, relative {index_gap:.3e}",
            brute.kirchhoff
        )
    });
    let (ok, detail) = tally.finish("float comparisons");
    Ok((
        ok,
        format!("{detail}; max relative error {worst:.3e}, index relative error {index_gap:.3e}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn small(families: Vec<CheckFamily>) -> VerifyScope {
        VerifyScope {
            qs: vec![1, 2],
            ts: vec![0, 1],
            families,
            float_probe: None,
            ..VerifyScope::default()
        }
    }

    #[test]
    fn every_operation_is_exercised() {
        let covered: BTreeSet<&str> = CheckFamily::ALL
            .iter()
            .flat_map(|f| f.exercises().iter().copied())
            .collect();
        let required = [
            "build_network",
            "node_count",
            "edge_count",
            "node_degree_formula",
            "degree_histogram",
            "laplacian",
            "grounded_one_inverse",
            "block_one_inverse",
            "resistance_oracle",
            "verify_cross_block_product",
            "verify_clique_block_inverse",
            "classify_pair",
            "resistance_recursive",
            "omega_node_to_parents",
            "omega_set_sum",
            "kirchhoff_closed",
            "mult_kirchhoff_closed",
            "add_kirchhoff_closed",
            "indices_by_recursion",
            "indices_brute_force",
            "avg_resistance",
            "avg_resistance_limit",
            "foster_check",
            "sum_rule_check",
            "new_parent_edge_sum_check",
            "new_parent_set_sum_check",
        ];
        for op in required {
            assert!(
                covered.contains(op),
                "{op} is not exercised by any check family"
            );
        }
    }

    #[test]
    fn families_round_trip_by_name() {
        for f in CheckFamily::ALL {
            assert_eq!(f.name().parse::<CheckFamily>().unwrap(), f);
        }
        assert_eq!(parse_families("all").unwrap().len(), CheckFamily::ALL.len());
        assert_eq!(
            parse_families("foster,sum-rule,foster").unwrap(),
            vec![CheckFamily::Foster, CheckFamily::SumRule]
        );
        assert!(parse_families("nonsense").is_err());
        assert!(parse_families(",").is_err());
    }

    #[test]
    fn small_grid_passes_every_family() {
        let mut seen = Vec::new();
        let report = run_checks(&small(CheckFamily::ALL.to_vec()), &mut |o| {
            seen.push(o.clone())
        })
        .unwrap();
        if let Some(o) = report.failures().next() {
            panic!("{o}");
        }
        assert_eq!(seen, report.outcomes);
        for f in CheckFamily::ALL {
            assert!(
                report.outcomes.iter().any(|o| o.family == f),
                "{f} never ran"
            );
        }
    }

    #[test]
    fn corrupted_closed_form_is_caught() {
        let scope = VerifyScope {
            closed_forms: ClosedForms::with_corrupted_kirchhoff(),
            ..small(vec![
                CheckFamily::IndexAgreement,
                CheckFamily::BaseReductions,
            ])
        };
        let report = run_checks(&scope, &mut |_| {}).unwrap();
        assert!(!report.passed());
        let first = report.failures().next().unwrap();
        assert!(first.detail.contains("Kirchhoff index"), "{}", first.detail);
        assert!(report.failures().all(|o| o.detail.contains("Kirchhoff")));
    }

    #[test]
    fn sampled_pairs_are_distinct_and_ordered() {
        assert_eq!(sample_pairs(3, 50).len(), 6);
        let pairs = sample_pairs(15, 50);
        assert_eq!(pairs.len(), 50);
        let set: BTreeSet<_> = pairs.iter().collect();
        assert_eq!(set.len(), 50);
        assert!(pairs.iter().all(|&(i, j)| i != j && i < 15 && j < 15));
    }
}
