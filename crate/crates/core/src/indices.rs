//! Kirchhoff, additive and multiplicative degree-Kirchhoff indices.
//!
//! Every sum runs over ordered pairs `(i, j) ∈ V × V`, so each unordered pair
//! is counted twice and the level-0 Kirchhoff index is `2(q+1)`. The mean
//! resistance divides by `N(N-1)` accordingly.
//!
//! Three independent routes produce the indices: the closed forms, the
//! one-step level recursions iterated from the level-0 seeds, and brute-force
//! pair sums over an oracle. [`IndexReport::merge`] insists they agree
//! exactly.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graph::{self, NodeId, SimplicialNetwork};
use crate::oracle::{ExactOracle, FloatOracle};
use crate::parallel::Execution;
use crate::recursion::RecursiveResistance;
use crate::scalar::{from_biguint, int, pow, ratio, render, render_sig, Exact};

fn q_exact(q: u32) -> Exact {
    int(q as i64)
}

/// `(q+1)(q+2)/2`
fn growth(q: u32) -> Exact {
    let q = q_exact(q);
    (&q + int(1)) * (&q + int(2)) / int(2)
}

/// `(q+2)(q+1)²/2`
fn degree_growth(q: u32) -> Exact {
    let q = q_exact(q);
    (&q + int(2)) * pow(&(&q + int(1)), 2) / int(2)
}

/// Multiplicative degree-Kirchhoff index `Σ d_i d_j Ω_ij`.
pub fn mult_kirchhoff_closed(q: u32, t: u32) -> Exact {
    let a = growth(q);
    let b = degree_growth(q);
    let q = q_exact(q);
    let q1sq = pow(&(&q + int(1)), 2);
    let q2 = &q + int(2);
    let q3 = &q + int(3);

    -(&q + int(4)) * &q1sq * pow(&b, t)
        + int(2) * &q2 * &q1sq / &q3 * pow(&a, t)
        + &q2 * (int(3) * &q + int(7)) * &q1sq / &q3 * pow(&a, 2 * t)
}

/// Additive degree-Kirchhoff index `Σ (d_i + d_j) Ω_ij`.
pub fn add_kirchhoff_closed(q: u32, t: u32) -> Exact {
    let a = growth(q);
    let b = degree_growth(q);
    let q = q_exact(q);
    let q1 = &q + int(1);
    let q1sq = pow(&q1, 2);
    let q2 = &q + int(2);
    let q3 = &q + int(3);
    let q3sq = pow(&q3, 2);
    let c = &q * &q + int(5) * &q + int(8);
    let cubic = pow(&q, 3) + int(8) * &q * &q + int(22) * &q + int(20);
    let quad = &q * &q + int(9) * &q + int(20);

    int(4) * &q2 * &q1sq / &q3sq * pow(&a, t)
        + int(2) * (int(3) * &q + int(7)) * &q1sq * cubic / (&q3sq * &c) * pow(&a, 2 * t)
        - int(2) * (&q + int(4)) * &q1sq / &q3 * pow(&b, t)
        + int(2) * &q1sq * quad / (&q3 * &c) * pow(&q1, t)
        + int(2) * &q1sq / &q3sq
}

/// Kirchhoff index `Σ Ω_ij` over ordered pairs.
pub fn kirchhoff_closed(q: u32, t: u32) -> Exact {
    let a = growth(q);
    let b = degree_growth(q);
    let q = q_exact(q);
    let q1 = &q + int(1);
    let q1sq = pow(&q1, 2);
    let q2 = &q + int(2);
    let q4 = &q + int(4);
    let q3sq = pow(&(&q + int(3)), 2);
    let c = &q * &q + int(5) * &q + int(8);
    let cubic = pow(&q, 3) + int(8) * &q * &q + int(15) * &q + int(8);
    let quad = &q * &q + int(9) * &q + int(20);
    let shrink = int(2) / &q2;

    int(2) * &q2 * cubic / (&q3sq * &c) * pow(&a, t)
        + &q2 * &q4 * (int(3) * &q + int(7)) * &q1sq / (&q3sq * &c) * pow(&a, 2 * t)
        - &q4 * &q1sq / &q3sq * pow(&b, t)
        + int(2) * &q1sq * quad / (&q3sq * &c) * pow(&q1, t)
        + int(4) * &q1 * pow(&q4, 2) / (&q3sq * &c) * pow(&shrink, t)
        - int(2) * &q1 / &q3sq
}

/// Mean resistance over ordered pairs, `R / (N (N - 1))`.
pub fn avg_resistance(q: u32, t: u32) -> Exact {
    let n = from_biguint(&graph::node_count(q, t));
    kirchhoff_closed(q, t) / (&n * (&n - int(1)))
}

/// The same mean written with the two shifted geometric factors,
/// `(q+3)² R / ((q+1)²(q+2)² (a^t + 2/(q+1)) (a^t + 1/(q+2)))`.
pub fn avg_resistance_factored(q: u32, t: u32) -> Exact {
    let at = pow(&growth(q), t);
    let qe = q_exact(q);
    let q1 = &qe + int(1);
    let q2 = &qe + int(2);
    let prefactor = pow(&(&qe + int(3)), 2)
        / (pow(&q1, 2) * pow(&q2, 2) * (&at + int(2) / &q1) * (&at + int(1) / &q2));
    prefactor * kirchhoff_closed(q, t)
}

/// Large-`t` limit of the mean resistance, `(q+4)(3q+7) / ((q+2)(q²+5q+8))`.
pub fn avg_resistance_limit(q: u32) -> Exact {
    let q = q_exact(q);
    (&q + int(4)) * (int(3) * &q + int(7)) / ((&q + int(2)) * (&q * &q + int(5) * &q + int(8)))
}

/// `(R, R⁺, R*)` at every level `0..=t`, from the one-step recursions
/// started at `(2(q+1), 4(q+1)², 2(q+1)³)`.
pub fn recursion_trajectory(q: u32, t: u32) -> Vec<(Exact, Exact, Exact)> {
    let a = growth(q);
    let b = degree_growth(q);
    let qe = q_exact(q);
    let q1 = &qe + int(1);
    let q2 = &qe + int(2);
    let q3 = &qe + int(3);

    let mut r = int(2) * &q1;
    let mut r_plus = int(4) * pow(&q1, 2);
    let mut r_star = int(2) * pow(&q1, 3);
    let mut out = vec![(r.clone(), r_plus.clone(), r_star.clone())];

    for level in 0..t {
        let n = from_biguint(&graph::node_count(q, level));
        let m = from_biguint(&graph::edge_count(q, level));
        let w = from_biguint(&graph::new_node_count(q, level + 1));
        let at = pow(&a, level);
        let a2t = pow(&a, 2 * level);

        // Pieces shared by the three updates.
        let spread = (int(3) * &w - &qe * (&n - int(1))) / &q2;
        let new_block = &w * (int(3) * &w - &q2 - &qe * (&n - int(1))) / &q2;

        let next_star = &b * &r_star - &qe * pow(&q2, 2) * pow(&q1, 3) / &q3 * &at
            + &qe * (int(3) * &qe + int(7)) * pow(&q2, 2) * pow(&q1, 4) / (int(4) * &q3) * &a2t;
        let next_plus = &q1 * &r_plus
            + &qe * &q1 * &r_star
            + &q1 * (&n + int(2) * &m) * &spread
            + int(2) * &q1 * &new_block;
        let next = int(2) / &q2 * &r
            + &qe / &q2 * &r_plus
            + &qe * &qe / (int(2) * &q2) * &r_star
            + &n * &spread
            + &new_block;

        r = next;
        r_plus = next_plus;
        r_star = next_star;
        out.push((r.clone(), r_plus.clone(), r_star.clone()));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Provenance {
    ClosedForm,
    Recursion,
    BruteForce,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::Recursion => "recursion",
            Provenance::BruteForce => "brute-force",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexValue {
    pub value: Exact,
    pub provenance: Vec<Provenance>,
}

impl IndexValue {
    fn new(value: Exact, source: Provenance) -> Self {
        Self {
            value,
            provenance: vec![source],
        }
    }

    fn merge(&mut self, other: &IndexValue, quantity: &'static str) -> Result<()> {
        if self.value != other.value {
            return Err(Error::ProvenanceMismatch {
                quantity,
                left: format!("{} ({})", render(&self.value), join(&self.provenance)),
                right: format!("{} ({})", render(&other.value), join(&other.provenance)),
            });
        }
        for p in &other.provenance {
            if !self.provenance.contains(p) {
                self.provenance.push(*p);
            }
        }
        self.provenance.sort();
        Ok(())
    }
}

fn join(p: &[Provenance]) -> String {
    p.iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join("+")
}

/// Indices of one `(q, t)` instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexReport {
    pub q: u32,
    pub t: u32,
    pub nodes: BigUint,
    pub edges: BigUint,
    pub kirchhoff: IndexValue,
    pub additive: IndexValue,
    pub multiplicative: IndexValue,
    pub average: Exact,
    pub limit: Exact,
}

impl IndexReport {
    pub fn from_values(
        q: u32,
        t: u32,
        r: Exact,
        r_plus: Exact,
        r_star: Exact,
        source: Provenance,
    ) -> Self {
        let nodes = graph::node_count(q, t);
        let n = from_biguint(&nodes);
        let average = if n > int(1) {
            &r / (&n * (&n - int(1)))
        } else {
            Exact::zero()
        };
        Self {
            q,
            t,
            nodes,
            edges: graph::edge_count(q, t),
            kirchhoff: IndexValue::new(r, source),
            additive: IndexValue::new(r_plus, source),
            multiplicative: IndexValue::new(r_star, source),
            average,
            limit: avg_resistance_limit(q),
        }
    }

    pub fn closed_form(q: u32, t: u32) -> Self {
        Self::from_values(
            q,
            t,
            kirchhoff_closed(q, t),
            add_kirchhoff_closed(q, t),
            mult_kirchhoff_closed(q, t),
            Provenance::ClosedForm,
        )
    }

    /// Adds another route's values, failing on any disagreement.
    pub fn merge(&mut self, other: &IndexReport) -> Result<()> {
        if (self.q, self.t) != (other.q, other.t) {
            return Err(Error::Parameter(
                "merging reports of different instances".into(),
            ));
        }
        self.kirchhoff.merge(&other.kirchhoff, "Kirchhoff index")?;
        self.additive
            .merge(&other.additive, "additive degree-Kirchhoff index")?;
        self.multiplicative.merge(
            &other.multiplicative,
            "multiplicative degree-Kirchhoff index",
        )?;
        Ok(())
    }

    pub fn provenance(&self) -> String {
        join(&self.kirchhoff.provenance)
    }

    pub const CSV_HEADER: &'static str =
        "q,t,N,M,R,R_plus,R_star,avg,limit,R_f,R_plus_f,R_star_f,avg_f,limit_f,provenance";

    pub fn csv_row(&self) -> String {
        let exact = [
            &self.kirchhoff.value,
            &self.additive.value,
            &self.multiplicative.value,
            &self.average,
            &self.limit,
        ];
        let mut cells = vec![
            self.q.to_string(),
            self.t.to_string(),
            self.nodes.to_string(),
            self.edges.to_string(),
        ];
        cells.extend(exact.iter().map(|v| render(v)));
        cells.extend(exact.iter().map(|v| render_sig(v, 12)));
        cells.push(self.provenance());
        cells.join(",")
    }
}

/// Indices from the level recursions alone.
pub fn indices_by_recursion(q: u32, t: u32) -> IndexReport {
    let (r, r_plus, r_star) = recursion_trajectory(q, t)
        .pop()
        .expect("level 0 is always present");
    IndexReport::from_values(q, t, r, r_plus, r_star, Provenance::Recursion)
}

/// Indices as literal ordered-pair sums over an exact oracle.
pub fn indices_brute_force(network: &SimplicialNetwork) -> Result<IndexReport> {
    let oracle = ExactOracle::new(network)?;
    Ok(brute_force_with(network, &oracle, Execution::default()))
}

pub fn brute_force_with(
    network: &SimplicialNetwork,
    oracle: &ExactOracle,
    exec: Execution,
) -> IndexReport {
    let deg: Vec<i64> = (0..network.node_len())
        .map(|v| network.degree(v) as i64)
        .collect();
    let r = oracle.weighted_pair_sum(exec, |_, _| 1);
    let r_plus = oracle.weighted_pair_sum(exec, |i, j| deg[i] + deg[j]);
    let r_star = oracle.weighted_pair_sum(exec, |i, j| deg[i] * deg[j]);
    IndexReport::from_values(
        network.q(),
        network.t(),
        r,
        r_plus,
        r_star,
        Provenance::BruteForce,
    )
}

/// Float brute-force indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloatIndices {
    pub kirchhoff: f64,
    pub additive: f64,
    pub multiplicative: f64,
    pub average: f64,
}

pub fn brute_force_float(
    network: &SimplicialNetwork,
    oracle: &FloatOracle,
    exec: Execution,
) -> FloatIndices {
    let deg: Vec<f64> = (0..network.node_len())
        .map(|v| network.degree(v) as f64)
        .collect();
    let n = network.node_len() as f64;
    let kirchhoff = oracle.weighted_pair_sum(exec, |_, _| 1.0);
    FloatIndices {
        kirchhoff,
        additive: oracle.weighted_pair_sum(exec, |i, j| deg[i] + deg[j]),
        multiplicative: oracle.weighted_pair_sum(exec, |i, j| deg[i] * deg[j]),
        average: kirchhoff / (n * (n - 1.0)),
    }
}

/// Anything that can report resistances within one fixed network.
pub trait ResistanceSource {
    fn omega(&mut self, i: NodeId, j: NodeId) -> Result<Exact>;
}

impl ResistanceSource for ExactOracle {
    fn omega(&mut self, i: NodeId, j: NodeId) -> Result<Exact> {
        self.resistance(i, j)
    }
}

impl ResistanceSource for &ExactOracle {
    fn omega(&mut self, i: NodeId, j: NodeId) -> Result<Exact> {
        self.resistance(i, j)
    }
}

impl ResistanceSource for RecursiveResistance<'_> {
    fn omega(&mut self, i: NodeId, j: NodeId) -> Result<Exact> {
        self.resistance(i, j)
    }
}

/// Resistances summed over the edges minus `N - 1`; zero for every
/// connected graph.
pub fn foster_check(
    network: &SimplicialNetwork,
    source: &mut impl ResistanceSource,
) -> Result<Exact> {
    let mut total = Exact::zero();
    for &(a, b) in network.edges() {
        total += source.omega(a, b)?;
    }
    Ok(total - int(network.node_len() as i64 - 1))
}

/// `d_i Ω_ij + Σ_{k ∈ N(i)} (Ω_ik − Ω_jk) − 2`; zero for every distinct pair.
pub fn sum_rule_check(
    network: &SimplicialNetwork,
    i: NodeId,
    j: NodeId,
    source: &mut impl ResistanceSource,
) -> Result<Exact> {
    network.node(i)?;
    network.node(j)?;
    if i == j {
        return Err(Error::SamePair(i));
    }
    let mut total = int(network.degree(i) as i64) * source.omega(i, j)?;
    for &k in network.neighbors(i) {
        total += source.omega(i, k)? - source.omega(j, k)?;
    }
    Ok(total - int(2))
}

fn top_level(network: &SimplicialNetwork) -> Result<u32> {
    match network.t() {
        0 => Err(Error::Parameter(
            "needs a network with at least one level".into(),
        )),
        t => Ok(t),
    }
}

/// `Σ_{i new} Ω_Δi − 2q(N_prev − 1)/(q+2)` at the network's top level.
pub fn new_parent_edge_sum_check(
    network: &SimplicialNetwork,
    source: &mut impl ResistanceSource,
) -> Result<Exact> {
    let t = top_level(network)?;
    let mut lhs = Exact::zero();
    for v in network.created_at(t) {
        let (m, n) = network.nodes()[v].parents.expect("new nodes have parents");
        lhs += source.omega(m, n)?;
    }
    let q = network.q() as i64;
    let prev = network.nodes_at(t - 1) as i64;
    Ok(lhs - ratio(2 * q * (prev - 1), q + 2))
}

/// `Σ_{i new} Ω_{Δi,Y} − Σ_{x old} q d_x Ω_{x,Y}` at the network's top
/// level, degrees taken one level earlier; `Y` must hold only old nodes.
pub fn new_parent_set_sum_check<S: ResistanceSource>(
    network: &SimplicialNetwork,
    ys: &[NodeId],
    source: &mut S,
) -> Result<Exact> {
    let t = top_level(network)?;
    let old = network.nodes_at(t - 1);
    if let Some(&bad) = ys.iter().find(|&&y| y >= old) {
        return Err(Error::Genealogy {
            node: bad,
            level: t - 1,
        });
    }
    let mut cache = vec![None::<Exact>; old];
    let mut to_set = |x: NodeId, source: &mut S| -> Result<Exact> {
        if let Some(v) = &cache[x] {
            return Ok(v.clone());
        }
        let mut s = Exact::zero();
        for &y in ys {
            s += source.omega(x, y)?;
        }
        cache[x] = Some(s.clone());
        Ok(s)
    };

    let mut lhs = Exact::zero();
    for v in network.created_at(t) {
        let (m, n) = network.nodes()[v].parents.expect("new nodes have parents");
        lhs += to_set(m, source)? + to_set(n, source)?;
    }
    let q = network.q() as i64;
    let mut rhs = Exact::zero();
    for x in 0..old {
        let weight = q * network.degree_at(x, t - 1) as i64;
        rhs += int(weight) * to_set(x, source)?;
    }
    Ok(lhs - rhs)
}

/// `|avg(q, t) − limit(q)|`, exact.
pub fn limit_gap(q: u32, t: u32) -> Exact {
    let d = avg_resistance(q, t) - avg_resistance_limit(q);
    if d < Exact::zero() {
        -d
    } else {
        d
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
    fn closed_form_anchors() {
        assert_eq!(kirchhoff_closed(1, 0), int(4));
        assert_eq!(kirchhoff_closed(1, 1), ratio(65, 3));
        assert_eq!(kirchhoff_closed(2, 0), int(6));
        assert_eq!(mult_kirchhoff_closed(1, 0), int(16));
        assert_eq!(mult_kirchhoff_closed(1, 1), int(168));
        assert_eq!(add_kirchhoff_closed(1, 1), int(122));
        assert_eq!(add_kirchhoff_closed(2, 0), int(36));
        for q in 1..=10u32 {
            let q1 = q as i64 + 1;
            assert_eq!(kirchhoff_closed(q, 0), int(2 * q1));
            assert_eq!(mult_kirchhoff_closed(q, 0), int(2 * q1.pow(3)));
            assert_eq!(add_kirchhoff_closed(q, 0), int(4 * q1 * q1));
        }
    }

    #[test]
    fn averages() {
        assert_eq!(avg_resistance(1, 1), ratio(13, 18));
        assert_eq!(avg_resistance(1, 0), ratio(2, 3));
        assert_eq!(avg_resistance(2, 0), ratio(1, 2));
        assert_eq!(avg_resistance_limit(1), ratio(25, 21));
        assert_eq!(avg_resistance_limit(2), ratio(39, 44));
        for q in 1..5 {
            for t in 0..6 {
                assert_eq!(avg_resistance(q, t), avg_resistance_factored(q, t));
            }
        }
    }

    #[test]
    fn limit_behaviour_in_q() {
        for q in 1..50 {
            assert!(avg_resistance_limit(q + 1) < avg_resistance_limit(q));
        }
        for q in 2..20 {
            assert!(avg_resistance_limit(q) < ratio(25, 21));
        }
        let gap = |q: u32| {
            let r = avg_resistance_limit(q) / ratio(3, q as i64);
            crate::scalar::to_f64(&r) - 1.0
        };
        assert!(gap(1_000).abs() < 1e-2);
        assert!(gap(1_000_000).abs() < 1e-5);
        assert!(gap(1_000_000).abs() < gap(1_000).abs());
    }

    #[test]
    fn recursion_seeds_and_first_step() {
        let r = indices_by_recursion(1, 1);
        assert_eq!(r.kirchhoff.value, ratio(65, 3));
        assert_eq!(r.additive.value, int(122));
        assert_eq!(r.multiplicative.value, int(168));
        let r = indices_by_recursion(3, 0);
        assert_eq!(
            (r.kirchhoff.value, r.additive.value, r.multiplicative.value),
            (int(8), int(64), int(128))
        );
    }

    #[test]
    fn recursion_tracks_closed_forms() {
        for q in 1..=4 {
            for (t, (r, rp, rs)) in recursion_trajectory(q, 6).into_iter().enumerate() {
                let t = t as u32;
                assert_eq!(r, kirchhoff_closed(q, t), "R q={q} t={t}");
                assert_eq!(rp, add_kirchhoff_closed(q, t), "R+ q={q} t={t}");
                assert_eq!(rs, mult_kirchhoff_closed(q, t), "R* q={q} t={t}");
            }
        }
    }

    #[test]
    fn brute_force_small() {
        let r = indices_brute_force(&net(1, 0)).unwrap();
        assert_eq!(
            (r.kirchhoff.value, r.additive.value, r.multiplicative.value),
            (int(4), int(16), int(16))
        );
        let mut closed = IndexReport::closed_form(1, 1);
        closed
            .merge(&indices_brute_force(&net(1, 1)).unwrap())
            .unwrap();
        closed.merge(&indices_by_recursion(1, 1)).unwrap();
        assert_eq!(closed.provenance(), "closed-form+recursion+brute-force");
    }

    #[test]
    fn merge_rejects_disagreement() {
        let mut a = IndexReport::closed_form(1, 1);
        let b = IndexReport::closed_form(1, 2);
        assert!(a.merge(&b).is_err());
        let mut c = IndexReport::closed_form(1, 1);
        c.kirchhoff.value += int(1);
        assert!(matches!(
            a.merge(&c),
            Err(Error::ProvenanceMismatch {
                quantity: "Kirchhoff index",
                ..
            })
        ));
    }

    #[test]
    fn csv_row_layout() {
        let row = indices_by_recursion(1, 1).csv_row();
        assert_eq!(
            row,
            "1,1,6,9,65/3,122,168,13/18,25/21,21.6666666667,122,168,0.722222222222,1.19047619048,recursion"
        );
        assert_eq!(
            IndexReport::CSV_HEADER.split(',').count(),
            row.split(',').count()
        );
    }

    #[test]
    fn identities_on_first_level() {
        let g = net(1, 1);
        let mut oracle = ExactOracle::new(&g).unwrap();
        assert!(foster_check(&g, &mut oracle).unwrap().is_zero());
        for v in 3..6 {
            let (m, _) = g.nodes()[v].parents.unwrap();
            assert!(sum_rule_check(&g, v, m, &mut oracle).unwrap().is_zero());
        }
        assert!(sum_rule_check(&g, 1, 1, &mut oracle).is_err());
        assert!(new_parent_edge_sum_check(&g, &mut oracle)
            .unwrap()
            .is_zero());
        assert!(new_parent_set_sum_check(&g, &[], &mut oracle)
            .unwrap()
            .is_zero());
        assert!(new_parent_set_sum_check(&g, &[0], &mut oracle)
            .unwrap()
            .is_zero());
        assert!(matches!(
            new_parent_set_sum_check(&g, &[4], &mut oracle),
            Err(Error::Genealogy { node: 4, .. })
        ));
        assert!(new_parent_edge_sum_check(&net(1, 0), &mut oracle).is_err());
    }
}
