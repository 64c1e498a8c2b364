//! Deterministic construction of the simplicial network family and its
//! counting formulas.
//!
//! The level-0 network is the complete graph on `q + 2` nodes. Every further
//! level visits each existing edge in ascending `(low, high)` order and
//! attaches a fresh `q`-clique whose nodes are all joined to both endpoints.
//! Node ids are dense and follow creation order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub type NodeId = usize;

pub const DEFAULT_MAX_NODES: u64 = 2_000_000;

/// One node's genealogy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeRecord {
    pub id: NodeId,
    /// Iteration that created the node; 0 for the base clique.
    pub born: u32,
    /// Endpoints `(low, high)` of the edge that spawned the node.
    pub parents: Option<(NodeId, NodeId)>,
    /// Index of the clique copy the node belongs to, counted across levels.
    pub clique: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialNetwork {
    q: u32,
    t: u32,
    nodes: Vec<NodeRecord>,
    /// Level-major: all level-0 edges, then level-1 edges, ... Each block is
    /// sorted ascending and every pair is stored `(low, high)`.
    edges: Vec<(NodeId, NodeId)>,
    /// `edge_ends[l]` is the number of edges that exist at level `l`.
    edge_ends: Vec<usize>,
    /// `node_ends[l]` is the number of nodes that exist at level `l`.
    node_ends: Vec<usize>,
    adjacency: Vec<Vec<NodeId>>,
}

/// Base of every geometric factor: `(q+1)(q+2)/2`, the edge multiplier per level.
pub fn edge_growth(q: u32) -> BigUint {
    let q = BigUint::from(q);
    (&q + 1u32) * (&q + 2u32) / 2u32
}

pub fn edge_count(q: u32, t: u32) -> BigUint {
    num_traits::pow::pow(edge_growth(q), t as usize + 1)
}

/// Node count `(2 M_t + 2(q+2)) / (q+3)`; the division is exact.
pub fn node_count(q: u32, t: u32) -> BigUint {
    let numer = edge_count(q, t) * 2u32 + BigUint::from(2 * (q + 2));
    let denom = BigUint::from(q + 3);
    assert!(
        (&numer % &denom).is_zero(),
        "node count is not integral for q={q}, t={t}"
    );
    numer / denom
}

/// Number of nodes created at iteration `level` (>= 1).
pub fn new_node_count(q: u32, level: u32) -> BigUint {
    assert!(level >= 1, "new nodes only exist from level 1 on");
    BigUint::from(q) * num_traits::pow::pow(edge_growth(q), level as usize)
}

/// Degree in the level-`t` network of a node created at iteration `born`.
pub fn node_degree_formula(q: u32, t: u32, born: u32) -> BigUint {
    assert!(born <= t, "node born at {born} does not exist at level {t}");
    num_traits::pow::pow(BigUint::from(q + 1), (t - born + 1) as usize)
}

/// Expected number of nodes per degree, from the genealogy counts alone.
pub fn degree_histogram_formula(q: u32, t: u32) -> BTreeMap<BigUint, BigUint> {
    let mut hist = BTreeMap::new();
    for born in 0..=t {
        let count = if born == 0 {
            BigUint::from(q + 2)
        } else {
            new_node_count(q, born)
        };
        *hist
            .entry(node_degree_formula(q, t, born))
            .or_insert_with(BigUint::zero) += count;
    }
    hist
}

fn validate(q: u32) -> Result<()> {
    if q == 0 {
        return Err(Error::Parameter("q must be at least 1".into()));
    }
    Ok(())
}

/// Builds the level-`t` network, refusing when it would exceed `max_nodes`.
pub fn build_network(q: u32, t: u32, max_nodes: u64) -> Result<SimplicialNetwork> {
    validate(q)?;
    let total = node_count(q, t);
    if total > BigUint::from(max_nodes) {
        return Err(Error::SizeLimit {
            nodes: total,
            limit: max_nodes,
        });
    }
    let total = total.to_usize().expect("bounded by max_nodes");
    let total_edges = edge_count(q, t).to_usize().expect("bounded with nodes");

    let base = (q + 2) as usize;
    let mut nodes = Vec::with_capacity(total);
    let mut edges = Vec::with_capacity(total_edges);
    let mut adjacency: Vec<Vec<NodeId>> = Vec::with_capacity(total);

    for id in 0..base {
        nodes.push(NodeRecord {
            id,
            born: 0,
            parents: None,
            clique: None,
        });
        adjacency.push(Vec::new());
    }
    for a in 0..base {
        for b in a + 1..base {
            edges.push((a, b));
        }
    }
    let mut edge_ends = vec![edges.len()];
    let mut node_ends = vec![base];

    let q = q as usize;
    let mut clique = 0usize;
    for level in 1..=t {
        let mut parents = edges.clone();
        parents.sort_unstable();
        let mut fresh = Vec::with_capacity(parents.len() * (2 * q + q * (q - 1) / 2));
        for (lo, hi) in parents {
            let first = nodes.len();
            for k in 0..q {
                nodes.push(NodeRecord {
                    id: first + k,
                    born: level,
                    parents: Some((lo, hi)),
                    clique: Some(clique),
                });
                adjacency.push(Vec::new());
                fresh.push((lo, first + k));
                fresh.push((hi, first + k));
            }
            for a in first..first + q {
                for b in a + 1..first + q {
                    fresh.push((a, b));
                }
            }
            clique += 1;
        }
        fresh.sort_unstable();
        edges.extend(fresh);
        edge_ends.push(edges.len());
        node_ends.push(nodes.len());
    }

    for &(a, b) in &edges {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }

    debug_assert_eq!(nodes.len(), total);
    debug_assert_eq!(edges.len(), total_edges);
    Ok(SimplicialNetwork {
        q: q as u32,
        t,
        nodes,
        edges,
        edge_ends,
        node_ends,
        adjacency,
    })
}

impl SimplicialNetwork {
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn node_len(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_len(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Result<&NodeRecord> {
        self.nodes.get(id).ok_or(Error::UnknownNode(id))
    }

    /// Every edge of the full network, level-major.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    /// Edges that exist at `level` (a prefix of [`Self::edges`]).
    pub fn edges_at(&self, level: u32) -> &[(NodeId, NodeId)] {
        &self.edges[..self.edge_ends[level as usize]]
    }

    /// Number of nodes that exist at `level`; they are ids `0..n`.
    pub fn nodes_at(&self, level: u32) -> usize {
        self.node_ends[level as usize]
    }

    /// Ids created exactly at `level`.
    pub fn created_at(&self, level: u32) -> std::ops::Range<NodeId> {
        let start = if level == 0 {
            0
        } else {
            self.node_ends[level as usize - 1]
        };
        start..self.node_ends[level as usize]
    }

    pub fn neighbors(&self, id: NodeId) -> &[NodeId] {
        &self.adjacency[id]
    }

    pub fn degree(&self, id: NodeId) -> usize {
        self.adjacency[id].len()
    }

    /// Degree of `id` in the level-`level` network.
    pub fn degree_at(&self, id: NodeId, level: u32) -> usize {
        let limit = self.nodes_at(level);
        self.adjacency[id].iter().filter(|&&v| v < limit).count()
    }

    pub fn contains_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.adjacency
            .get(a)
            .is_some_and(|list| list.binary_search(&b).is_ok())
    }

    /// Network restricted to its first `level` iterations.
    pub fn truncated(&self, level: u32) -> SimplicialNetwork {
        assert!(level <= self.t);
        let n = self.nodes_at(level);
        let edges = self.edges_at(level).to_vec();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        SimplicialNetwork {
            q: self.q,
            t: level,
            nodes: self.nodes[..n].to_vec(),
            edges,
            edge_ends: self.edge_ends[..=level as usize].to_vec(),
            node_ends: self.node_ends[..=level as usize].to_vec(),
            adjacency,
        }
    }

    /// Degree -> number of nodes, counted from the adjacency lists.
    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for list in &self.adjacency {
            *hist.entry(list.len()).or_insert(0) += 1;
        }
        hist
    }

    /// `2M / N` for this instance.
    pub fn average_degree(&self) -> f64 {
        2.0 * self.edges.len() as f64 / self.nodes.len() as f64
    }

    pub fn metadata(&self) -> NetworkMetadata {
        NetworkMetadata {
            q: self.q,
            t: self.t,
            nodes: self.nodes.len(),
            edges: self.edges.len(),
        }
    }

    /// One `u v` line per edge, ascending.
    pub fn to_edge_list(&self) -> String {
        let mut sorted = self.edges.clone();
        sorted.sort_unstable();
        let mut out = String::with_capacity(sorted.len() * 12);
        for (a, b) in sorted {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    /// CSV with header `id,t_v,parent_low,parent_high,clique_copy`; empty
    /// cells for base nodes.
    pub fn to_node_table(&self) -> String {
        let mut out = String::from("id,t_v,parent_low,parent_high,clique_copy\n");
        for n in &self.nodes {
            let (lo, hi) = n
                .parents
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .unwrap_or_default();
            let clique = n.clique.map(|c| c.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{},{lo},{hi},{clique}", n.id, n.born);
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = format!("graph simplicial_q{}_t{} {{\n", self.q, self.t);
        for n in &self.nodes {
            let _ = writeln!(out, "  {} [t_v={}];", n.id, n.born);
        }
        let mut sorted = self.edges.clone();
        sorted.sort_unstable();
        for (a, b) in sorted {
            let _ = writeln!(out, "  {a} -- {b};");
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NetworkMetadata {
    pub q: u32,
    pub t: u32,
    #[serde(rename = "N")]
    pub nodes: usize,
    #[serde(rename = "M")]
    pub edges: usize,
}

/// `2 M_t / N_t` from the counting formulas, for levels too large to build.
pub fn average_degree_formula(q: u32, t: u32) -> num_rational::BigRational {
    use num_bigint::BigInt;
    num_rational::BigRational::new(
        BigInt::from(edge_count(q, t) * 2u32),
        BigInt::from(node_count(q, t)),
    )
}

/// True when the degree-based counts are self-consistent:
/// `sum(degree * count) == 2 M`.
pub fn handshake_holds(q: u32, t: u32) -> bool {
    let total: BigUint = degree_histogram_formula(q, t)
        .iter()
        .map(|(d, c)| d * c)
        .fold(BigUint::zero(), |acc, x| acc + x);
    total == edge_count(q, t) * 2u32
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn counting_formulas() {
        assert_eq!(edge_count(1, 0), big(3));
        assert_eq!(edge_count(2, 2), big(216));
        assert_eq!(edge_count(1, 1), big(9));
        assert_eq!(node_count(1, 1), big(6));
        assert_eq!(node_count(2, 0), big(4));
        assert_eq!(node_count(1, 6), big(1095));
        assert_eq!(new_node_count(1, 1), big(3));
        assert_eq!(new_node_count(2, 1), big(12));
        assert_eq!(node_degree_formula(1, 2, 0), big(8));
        assert_eq!(node_degree_formula(2, 3, 1), big(27));
        for q in 1..6 {
            assert_eq!(node_degree_formula(q, 4, 4), big(q as u64 + 1));
        }
    }

    #[test]
    fn small_networks() {
        let k3 = build_network(1, 0, DEFAULT_MAX_NODES).unwrap();
        assert_eq!((k3.node_len(), k3.edge_len()), (3, 3));
        let g = build_network(1, 2, DEFAULT_MAX_NODES).unwrap();
        assert_eq!((g.node_len(), g.edge_len()), (15, 27));
        let g = build_network(2, 1, DEFAULT_MAX_NODES).unwrap();
        assert_eq!((g.node_len(), g.edge_len()), (16, 36));
        let g = build_network(1, 1, DEFAULT_MAX_NODES).unwrap();
        assert_eq!(g.edge_len(), 9);
    }

    #[test]
    fn genealogy_of_first_level() {
        let g = build_network(1, 1, DEFAULT_MAX_NODES).unwrap();
        let parents: Vec<_> = g.nodes()[3..].iter().map(|n| n.parents.unwrap()).collect();
        assert_eq!(parents, vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(g.neighbors(3), &[0, 1]);
        assert_eq!(g.created_at(1), 3..6);
        assert_eq!(g.created_at(0), 0..3);
    }

    #[test]
    fn q_equal_one_adds_single_node_per_edge() {
        let g = build_network(1, 1, DEFAULT_MAX_NODES).unwrap();
        for n in &g.nodes()[3..] {
            assert_eq!(g.degree(n.id), 2);
        }
    }

    #[test]
    fn histograms() {
        let g = build_network(1, 1, DEFAULT_MAX_NODES).unwrap();
        assert_eq!(g.degree_histogram(), BTreeMap::from([(2, 3), (4, 3)]));
        let g = build_network(2, 0, DEFAULT_MAX_NODES).unwrap();
        assert_eq!(g.degree_histogram(), BTreeMap::from([(3, 4)]));
        let g = build_network(1, 2, DEFAULT_MAX_NODES).unwrap();
        assert_eq!(
            g.degree_histogram(),
            BTreeMap::from([(2, 9), (4, 3), (8, 3)])
        );
        assert_eq!(
            degree_histogram_formula(1, 2),
            BTreeMap::from([(big(2), big(9)), (big(4), big(3)), (big(8), big(3))])
        );
        assert!(handshake_holds(3, 5));
    }

    #[test]
    fn size_guard_refuses() {
        match build_network(1, 20, DEFAULT_MAX_NODES) {
            Err(Error::SizeLimit { nodes, .. }) => assert_eq!(nodes, node_count(1, 20)),
            other => panic!("expected refusal, got {other:?}"),
        }
        assert!(matches!(build_network(0, 1, 10), Err(Error::Parameter(_))));
    }

    #[test]
    fn truncation_matches_direct_build() {
        let full = build_network(2, 2, DEFAULT_MAX_NODES).unwrap();
        let direct = build_network(2, 1, DEFAULT_MAX_NODES).unwrap();
        assert_eq!(full.truncated(1), direct);
        assert_eq!(full.degree_at(0, 1), direct.degree(0));
    }

    #[test]
    fn exports() {
        let g = build_network(1, 1, DEFAULT_MAX_NODES).unwrap();
        assert_eq!(g.to_edge_list().lines().count(), 9);
        assert_eq!(g.to_node_table().lines().count(), 7);
        assert!(g.to_node_table().contains("\n3,1,0,1,0\n"));
        assert!(g.to_node_table().contains("\n0,0,,,\n"));
        let k4 = build_network(2, 0, DEFAULT_MAX_NODES).unwrap();
        assert_eq!(k4.to_dot().matches(" -- ").count(), 6);
        let json = serde_json::to_string(&k4.metadata()).unwrap();
        assert_eq!(json, r#"{"q":2,"t":0,"N":4,"M":6}"#);
    }
}
