//! Exact two-node resistances from the network genealogy, without matrices.
//!
//! At level `l` every pair falls in one of four cases:
//!
//! * both nodes existed at `l - 1`: `Ω⁽ˡ⁾ = 2/(q+2) · Ω⁽ˡ⁻¹⁾`;
//! * two new nodes in the same clique copy: `Ω = 2/(q+2)`;
//! * a new node `i` with parents `Δi` and an old node `j`:
//!   `Ω = ½ (3/(q+2) − ½ Ω_Δi + Ω_{Δi,j})`;
//! * two new nodes in different copies:
//!   `Ω = 3/(q+2) − ¼ (Ω_Δi + Ω_Δj) + ¼ Ω_{Δi,Δj}`.
//!
//! Set terms are sums over old pairs at the same level, which fall back to
//! the first case. Level 0 is the complete graph `K_{q+2}` with `2/(q+2)`
//! between any two distinct nodes. Each step either lowers the level or
//! replaces new nodes by their strictly older parents, so evaluation
//! terminates.

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graph::{NodeId, SimplicialNetwork};
use crate::scalar::{ratio, Exact};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairClass {
    /// Level 0: both nodes belong to the base clique.
    Base,
    BothOld,
    AdjacentNew,
    NonadjacentNew,
    /// `first` is the new node.
    NewOld,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairClassification {
    pub class: PairClass,
    pub first: NodeId,
    pub second: NodeId,
    pub first_parents: Option<(NodeId, NodeId)>,
    pub second_parents: Option<(NodeId, NodeId)>,
}

/// Cache of level-wise resistances keyed by `(level, low id, high id)`.
///
/// Entries belong to one network; handing the memo to a different network
/// clears it.
#[derive(Debug, Clone)]
pub struct ResistanceMemo {
    enabled: bool,
    owner: Option<(u32, u32, usize)>,
    map: HashMap<(u32, NodeId, NodeId), Exact>,
}

impl Default for ResistanceMemo {
    fn default() -> Self {
        Self::new()
    }
}

impl ResistanceMemo {
    pub fn new() -> Self {
        Self {
            enabled: true,
            owner: None,
            map: HashMap::new(),
        }
    }

    /// A memo that never stores anything.
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            owner: None,
            map: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn clear(&mut self) {
        self.map.clear();
    }

    fn bind(&mut self, network: &SimplicialNetwork) {
        let id = (network.q(), network.t(), network.node_len());
        if self.owner != Some(id) {
            self.map.clear();
            self.owner = Some(id);
        }
    }

    fn get(&self, key: &(u32, NodeId, NodeId)) -> Option<&Exact> {
        self.map.get(key)
    }

    fn insert(&mut self, key: (u32, NodeId, NodeId), value: Exact) {
        if self.enabled {
            self.map.insert(key, value);
        }
    }
}

fn check_exists(network: &SimplicialNetwork, level: u32, node: NodeId) -> Result<()> {
    if level > network.t() {
        return Err(Error::Parameter(format!(
            "level {level} exceeds network depth {}",
            network.t()
        )));
    }
    let record = network.node(node)?;
    if record.born > level {
        return Err(Error::Genealogy { node, level });
    }
    Ok(())
}

/// Which recursion case applies to `(i, j)` at `level`.
pub fn classify_pair(
    network: &SimplicialNetwork,
    level: u32,
    i: NodeId,
    j: NodeId,
) -> Result<PairClassification> {
    if i == j {
        return Err(Error::SamePair(i));
    }
    check_exists(network, level, i)?;
    check_exists(network, level, j)?;
    let (a, b) = (&network.nodes()[i], &network.nodes()[j]);
    let class = if level == 0 {
        PairClass::Base
    } else {
        match (a.born == level, b.born == level) {
            (false, false) => PairClass::BothOld,
            (true, true) if a.clique == b.clique => PairClass::AdjacentNew,
            (true, true) => PairClass::NonadjacentNew,
            _ => PairClass::NewOld,
        }
    };
    let (first, second) = if class == PairClass::NewOld && b.born == level {
        (b, a)
    } else {
        (a, b)
    };
    Ok(PairClassification {
        class,
        first: first.id,
        second: second.id,
        first_parents: first.parents,
        second_parents: second.parents,
    })
}

/// Resistance between `i` and `j` in the level-`level` network.
pub fn resistance_recursive(
    network: &SimplicialNetwork,
    level: u32,
    i: NodeId,
    j: NodeId,
    memo: &mut ResistanceMemo,
) -> Result<Exact> {
    check_exists(network, level, i)?;
    check_exists(network, level, j)?;
    Ok(Evaluator::new(network, memo).resist(level, i, j))
}

/// `Ω_{i,Δi}`: summed resistance from a node created at `level` to its two
/// parents, `3/(q+2) + ½ Ω_Δi`.
pub fn omega_node_to_parents(
    network: &SimplicialNetwork,
    level: u32,
    i: NodeId,
    memo: &mut ResistanceMemo,
) -> Result<Exact> {
    check_exists(network, level, i)?;
    let record = &network.nodes()[i];
    let (m, n) = record
        .parents
        .ok_or_else(|| Error::Parameter(format!("node {i} belongs to the base clique")))?;
    if record.born != level {
        return Err(Error::Parameter(format!(
            "node {i} was created at level {}, not {level}",
            record.born
        )));
    }
    let mut eval = Evaluator::new(network, memo);
    let half = ratio(1, 2);
    Ok(eval.three_over() + half * eval.resist(level, m, n))
}

/// Resistances from a node created at `level` to each of its two parents.
pub fn parent_resistances(
    network: &SimplicialNetwork,
    level: u32,
    i: NodeId,
    memo: &mut ResistanceMemo,
) -> Result<(Exact, Exact)> {
    check_exists(network, level, i)?;
    let (m, n) = network.nodes()[i]
        .parents
        .ok_or_else(|| Error::Parameter(format!("node {i} belongs to the base clique")))?;
    let mut eval = Evaluator::new(network, memo);
    Ok((eval.resist(level, i, m), eval.resist(level, i, n)))
}

/// `Σ_{x∈X, y∈Y} Ω_xy` at `level`.
pub fn omega_set_sum(
    network: &SimplicialNetwork,
    level: u32,
    xs: &[NodeId],
    ys: &[NodeId],
    memo: &mut ResistanceMemo,
) -> Result<Exact> {
    for &v in xs.iter().chain(ys) {
        check_exists(network, level, v)?;
    }
    let mut eval = Evaluator::new(network, memo);
    let mut total = Exact::zero();
    for &x in xs {
        for &y in ys {
            total += eval.resist(level, x, y);
        }
    }
    Ok(total)
}

/// Query session over one network with its own memo.
#[derive(Debug)]
pub struct RecursiveResistance<'a> {
    network: &'a SimplicialNetwork,
    memo: ResistanceMemo,
}

impl<'a> RecursiveResistance<'a> {
    pub fn new(network: &'a SimplicialNetwork) -> Self {
        Self {
            network,
            memo: ResistanceMemo::new(),
        }
    }

    pub fn without_memo(network: &'a SimplicialNetwork) -> Self {
        Self {
            network,
            memo: ResistanceMemo::disabled(),
        }
    }

    /// Resistance in the full network.
    pub fn resistance(&mut self, i: NodeId, j: NodeId) -> Result<Exact> {
        self.at(self.network.t(), i, j)
    }

    pub fn at(&mut self, level: u32, i: NodeId, j: NodeId) -> Result<Exact> {
        resistance_recursive(self.network, level, i, j, &mut self.memo)
    }

    pub fn memo(&self) -> &ResistanceMemo {
        &self.memo
    }
}

struct Evaluator<'n, 'm> {
    network: &'n SimplicialNetwork,
    memo: &'m mut ResistanceMemo,
    q: i64,
}

impl<'n, 'm> Evaluator<'n, 'm> {
    fn new(network: &'n SimplicialNetwork, memo: &'m mut ResistanceMemo) -> Self {
        memo.bind(network);
        Self {
            network,
            memo,
            q: network.q() as i64,
        }
    }

    fn two_over(&self) -> Exact {
        ratio(2, self.q + 2)
    }

    fn three_over(&self) -> Exact {
        ratio(3, self.q + 2)
    }

    fn born(&self, v: NodeId) -> u32 {
        self.network.nodes()[v].born
    }

    fn parents(&self, v: NodeId) -> (NodeId, NodeId) {
        self.network.nodes()[v]
            .parents
            .expect("nodes created after level 0 have parents")
    }

    /// Resistance between two nodes that both predate `level`, evaluated at
    /// `level`. This is the only entry point for the set terms, and it
    /// always lands on a strictly smaller level.
    fn old_pair(&mut self, level: u32, a: NodeId, b: NodeId) -> Exact {
        debug_assert!(self.born(a) < level && self.born(b) < level);
        self.resist(level, a, b)
    }

    fn resist(&mut self, level: u32, i: NodeId, j: NodeId) -> Exact {
        if i == j {
            return Exact::zero();
        }
        let key = (level, i.min(j), i.max(j));
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let value = if level == 0 {
            self.two_over()
        } else {
            let (new_i, new_j) = (self.born(i) == level, self.born(j) == level);
            match (new_i, new_j) {
                (false, false) => self.two_over() * self.resist(level - 1, i, j),
                (true, true) => {
                    if self.network.nodes()[i].clique == self.network.nodes()[j].clique {
                        self.two_over()
                    } else {
                        self.new_new(level, i, j)
                    }
                }
                (true, false) => self.new_old(level, i, j),
                (false, true) => self.new_old(level, j, i),
            }
        };
        self.memo.insert(key, value.clone());
        value
    }

    fn new_old(&mut self, level: u32, new: NodeId, old: NodeId) -> Exact {
        let (m, n) = self.parents(new);
        let delta = self.old_pair(level, m, n);
        let to_old = self.old_pair(level, m, old) + self.old_pair(level, n, old);
        ratio(1, 2) * (self.three_over() - ratio(1, 2) * delta + to_old)
    }

    fn new_new(&mut self, level: u32, i: NodeId, j: NodeId) -> Exact {
        let (a, b) = self.parents(i);
        let (c, d) = self.parents(j);
        let delta_i = self.old_pair(level, a, b);
        let delta_j = self.old_pair(level, c, d);
        let cross = self.old_pair(level, a, c)
            + self.old_pair(level, a, d)
            + self.old_pair(level, b, c)
            + self.old_pair(level, b, d);
        let quarter = ratio(1, 4);
        self.three_over() - &quarter * (delta_i + delta_j) + quarter * cross
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_network, DEFAULT_MAX_NODES};

    fn net(q: u32, t: u32) -> SimplicialNetwork {
        build_network(q, t, DEFAULT_MAX_NODES).unwrap()
    }

    #[test]
    fn classification() {
        let g = net(1, 1);
        assert_eq!(
            classify_pair(&g, 1, 0, 1).unwrap().class,
            PairClass::BothOld
        );
        let c = classify_pair(&g, 1, 0, 4).unwrap();
        assert_eq!((c.class, c.first, c.second), (PairClass::NewOld, 4, 0));
        assert_eq!(c.first_parents, Some((0, 2)));
        assert_eq!(
            classify_pair(&g, 1, 3, 5).unwrap().class,
            PairClass::NonadjacentNew
        );
        assert_eq!(classify_pair(&g, 0, 0, 2).unwrap().class, PairClass::Base);
        assert!(matches!(
            classify_pair(&g, 1, 2, 2),
            Err(Error::SamePair(2))
        ));
        assert!(matches!(
            classify_pair(&g, 0, 0, 4),
            Err(Error::Genealogy { node: 4, level: 0 })
        ));

        let g = net(2, 1);
        assert_eq!(
            classify_pair(&g, 1, 4, 5).unwrap().class,
            PairClass::AdjacentNew
        );
        assert_eq!(
            classify_pair(&g, 1, 4, 6).unwrap().class,
            PairClass::NonadjacentNew
        );
    }

    #[test]
    fn first_level_values() {
        let g = net(1, 1);
        let mut memo = ResistanceMemo::new();
        assert_eq!(
            resistance_recursive(&g, 1, 0, 1, &mut memo).unwrap(),
            ratio(4, 9)
        );
        // Node 3 hangs off edge (0, 1).
        assert_eq!(
            resistance_recursive(&g, 1, 3, 0, &mut memo).unwrap(),
            ratio(11, 18)
        );
        assert_eq!(
            resistance_recursive(&g, 1, 3, 5, &mut memo).unwrap(),
            ratio(10, 9)
        );
        assert_eq!(
            resistance_recursive(&g, 1, 3, 3, &mut memo).unwrap(),
            ratio(0, 1)
        );
    }

    #[test]
    fn node_to_parents() {
        let g = net(1, 1);
        let mut memo = ResistanceMemo::new();
        for i in 3..6 {
            assert_eq!(
                omega_node_to_parents(&g, 1, i, &mut memo).unwrap(),
                ratio(11, 9)
            );
            let (a, b) = parent_resistances(&g, 1, i, &mut memo).unwrap();
            assert_eq!(a, b);
            assert_eq!(a + b, ratio(11, 9));
        }
        let g = net(2, 1);
        for i in g.created_at(1) {
            assert_eq!(
                omega_node_to_parents(&g, 1, i, &mut memo).unwrap(),
                ratio(7, 8)
            );
        }
        assert!(omega_node_to_parents(&g, 1, 0, &mut memo).is_err());
    }

    #[test]
    fn set_sums() {
        let g = net(1, 1);
        let mut memo = ResistanceMemo::new();
        assert_eq!(
            omega_set_sum(&g, 1, &[4], &[4], &mut memo).unwrap(),
            ratio(0, 1)
        );
        assert_eq!(
            omega_set_sum(&g, 1, &[0, 1], &[1, 2], &mut memo).unwrap(),
            ratio(12, 9)
        );
        let g = net(1, 0);
        assert_eq!(
            omega_set_sum(&g, 0, &[0, 1, 2], &[0, 1, 2], &mut memo).unwrap(),
            ratio(4, 1)
        );
    }

    #[test]
    fn memo_is_a_pure_cache() {
        let g = net(2, 2);
        let mut with = RecursiveResistance::new(&g);
        let mut without = RecursiveResistance::without_memo(&g);
        for (i, j) in [(0, 87), (17, 40), (5, 6), (20, 80)] {
            assert_eq!(
                with.resistance(i, j).unwrap(),
                without.resistance(i, j).unwrap()
            );
        }
        assert!(!with.memo().is_empty());
        assert!(without.memo().is_empty());
    }

    #[test]
    fn level_beyond_network_is_rejected() {
        let g = net(1, 1);
        let mut memo = ResistanceMemo::new();
        assert!(matches!(
            resistance_recursive(&g, 2, 0, 1, &mut memo),
            Err(Error::Parameter(_))
        ));
    }
}
