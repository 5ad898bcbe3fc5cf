//! Random graph ensembles and exact Max-Cut.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Largest vertex count accepted by the exhaustive solver and the diagonal builders.
pub const MAX_EXACT_VERTICES: usize = 30;

/// Assignments are packed into a `u64`.
pub const MAX_VERTICES: usize = 64;

/// Rejection-sampling budget for both generators.
pub const MAX_SAMPLER_ATTEMPTS: usize = 10_000;

/// Ensemble tag without parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyKind {
    #[serde(rename = "3reg")]
    ThreeRegular,
    #[serde(rename = "er")]
    ErdosRenyi,
}

impl FamilyKind {
    pub fn token(self) -> &'static str {
        match self {
            FamilyKind::ThreeRegular => "3reg",
            FamilyKind::ErdosRenyi => "er",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "3reg" | "three_regular" | "3-regular" => Ok(FamilyKind::ThreeRegular),
            "er" | "erdos_renyi" | "gnp" => Ok(FamilyKind::ErdosRenyi),
            other => Err(Error::Parse(format!("unknown graph family `{other}`"))),
        }
    }
}

/// Where a graph came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum Family {
    #[serde(rename = "3reg")]
    ThreeRegular,
    #[serde(rename = "er")]
    ErdosRenyi { p: f64 },
    /// Hand-built or externally supplied graphs.
    #[serde(rename = "custom")]
    Custom,
}

impl Family {
    pub fn token(&self) -> &'static str {
        match self {
            Family::ThreeRegular => "3reg",
            Family::ErdosRenyi { .. } => "er",
            Family::Custom => "custom",
        }
    }

    pub fn p(&self) -> Option<f64> {
        match self {
            Family::ErdosRenyi { p } => Some(*p),
            _ => None,
        }
    }
}

/// Undirected, unweighted simple graph with generation provenance.
///
/// Edges are stored as `(i, j)` with `i < j`, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    family: Family,
    seed: u64,
}

impl Graph {
    /// Builds a validated graph. Edge endpoints may be given in either order.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        family: Family,
        seed: u64,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidVertexCount {
                n,
                reason: "a graph needs at least 2 vertices",
            });
        }
        if n > MAX_VERTICES {
            return Err(Error::TooLarge {
                what: "graph",
                n,
                max: MAX_VERTICES,
            });
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for n = {n}"
                )));
            }
            let e = (a.min(b), a.max(b));
            if !set.insert(e) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    e.0, e.1
                )));
            }
        }
        if set.is_empty() {
            return Err(Error::InvalidGraph("graph has no edges".into()));
        }
        let graph = Graph {
            n,
            edges: set.into_iter().collect(),
            family,
            seed,
        };
        match family {
            Family::ThreeRegular => {
                if !n.is_multiple_of(2) || n < 4 {
                    return Err(Error::InvalidVertexCount {
                        n,
                        reason: "3-regular graphs need even n >= 4",
                    });
                }
                if let Some(v) = graph.degrees().iter().position(|&d| d != 3) {
                    return Err(Error::InvalidGraph(format!(
                        "vertex {v} does not have degree 3"
                    )));
                }
            }
            Family::ErdosRenyi { p } => check_probability(p)?,
            Family::Custom => {}
        }
        Ok(graph)
    }

    /// A hand-built graph with no random provenance.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Graph::new(n, edges, Family::Custom, 0)
    }

    pub fn complete(n: usize) -> Result<Self> {
        Graph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidVertexCount {
                n,
                reason: "a cycle needs at least 3 vertices",
            });
        }
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn petersen() -> Self {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        Graph::new(
            10,
            outer.chain(spokes).chain(inner),
            Family::ThreeRegular,
            0,
        )
        .expect("the Petersen graph is 3-regular")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    /// Neighbourhood of each vertex as a bitmask.
    pub fn adjacency_masks(&self) -> Vec<u64> {
        let mut adj = vec![0u64; self.n];
        for &(i, j) in &self.edges {
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
        adj
    }

    /// Cut value of the basis index `bits` (bit `i` is the side of vertex `i`).
    pub fn cut_of_bits(&self, bits: u64) -> usize {
        self.edges
            .iter()
            .filter(|&&(i, j)| ((bits >> i) ^ (bits >> j)) & 1 == 1)
            .count()
    }

    /// Serializes to the edge-list text format: a header `n m family p seed`
    /// followed by one `i j` line per edge. `p` is `-` for non-ER graphs.
    pub fn to_edge_list(&self) -> String {
        let p = match self.family.p() {
            Some(p) => format!("{p:?}"),
            None => "-".to_string(),
        };
        let mut out = format!(
            "{} {} {} {} {}\n",
            self.n,
            self.edges.len(),
            self.family.token(),
            p,
            self.seed
        );
        for &(i, j) in &self.edges {
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty edge list".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let [n, m, family, p, seed] = fields[..] else {
            return Err(Error::Parse(format!(
                "header must be `n m family p seed`, got `{header}`"
            )));
        };
        let n: usize = parse_field(n, "n")?;
        let m: usize = parse_field(m, "m")?;
        let seed: u64 = parse_field(seed, "seed")?;
        let family = match family {
            "custom" => Family::Custom,
            other => match other.parse::<FamilyKind>()? {
                FamilyKind::ThreeRegular => Family::ThreeRegular,
                FamilyKind::ErdosRenyi => Family::ErdosRenyi {
                    p: parse_field(p, "p")?,
                },
            },
        };
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            let mut it = line.split_whitespace();
            let (Some(i), Some(j), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::Parse(format!(
                    "edge line must be `i j`, got `{line}`"
                )));
            };
            edges.push((parse_field(i, "vertex")?, parse_field(j, "vertex")?));
        }
        if edges.len() != m {
            return Err(Error::Parse(format!(
                "header declares {m} edges, found {}",
                edges.len()
            )));
        }
        Graph::new(n, edges, family, seed)
    }
}

fn parse_field<T: FromStr>(s: &str, name: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse(format!("invalid {name} `{s}`")))
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

/// A bipartition of `n` vertices; bit `i` is the side of vertex `i`.
///
/// Written as a string of `0`/`1` characters with vertex 0 first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    n: usize,
    bits: u64,
}

impl Assignment {
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::InvalidVertexCount {
                n,
                reason: "assignments hold 1..=64 bits",
            });
        }
        if n < 64 && bits >> n != 0 {
            return Err(Error::InvalidConfig(format!(
                "bits {bits:#b} do not fit in {n} positions"
            )));
        }
        Ok(Assignment { n, bits })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn side(&self, vertex: usize) -> bool {
        (self.bits >> vertex) & 1 == 1
    }

    pub fn complement(&self) -> Self {
        let mask = if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        };
        Assignment {
            n: self.n,
            bits: !self.bits & mask,
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in 0..self.n {
            f.write_str(if self.side(v) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = 0u64;
        for (v, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' if v < 64 => bits |= 1 << v,
                _ => return Err(Error::Parse(format!("invalid assignment `{s}`"))),
            }
        }
        Assignment::new(s.chars().count(), bits)
    }
}

/// Exact Max-Cut with one optimal witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxCutSolution {
    pub optimum: usize,
    pub witness: Assignment,
}

/// Samples a simple 3-regular graph with the configuration model.
///
/// Each attempt shuffles `3n` stubs and pairs them up; attempts producing a
/// loop or a repeated edge are discarded entirely.
pub fn gen_three_regular(n: usize, seed: u64) -> Result<Graph> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidVertexCount {
            n,
            reason: "3-regular graphs need even n >= 4",
        });
    }
    if n > MAX_VERTICES {
        return Err(Error::TooLarge {
            what: "graph",
            n,
            max: MAX_VERTICES,
        });
    }
    let mut rng = rng::seeded(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| [v; 3]).collect();
    'attempt: for _ in 0..MAX_SAMPLER_ATTEMPTS {
        stubs.shuffle(&mut rng);
        let mut edges = BTreeSet::new();
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if a == b || !edges.insert((a, b)) {
                continue 'attempt;
            }
        }
        return Graph::new(n, edges, Family::ThreeRegular, seed);
    }
    Err(Error::SamplerExhausted {
        attempts: MAX_SAMPLER_ATTEMPTS,
        reason: "no simple pairing found",
    })
}

/// Samples `G(n, p)`, visiting pairs `(i, j)`, `i < j`, in lexicographic order.
///
/// An empty draw is resampled from the sub-seed `seed ^ attempt`.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    check_probability(p)?;
    if n < 2 {
        return Err(Error::InvalidVertexCount {
            n,
            reason: "a graph needs at least 2 vertices",
        });
    }
    if n > MAX_VERTICES {
        return Err(Error::TooLarge {
            what: "graph",
            n,
            max: MAX_VERTICES,
        });
    }
    for attempt in 0..MAX_SAMPLER_ATTEMPTS as u64 {
        let mut rng = rng::seeded(seed ^ attempt);
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|_| rng.random::<f64>() < p)
            .collect();
        if !edges.is_empty() {
            return Graph::new(n, edges, Family::ErdosRenyi { p }, seed);
        }
    }
    Err(Error::SamplerExhausted {
        attempts: MAX_SAMPLER_ATTEMPTS,
        reason: "every draw had zero edges",
    })
}

/// Number of edges whose endpoints lie on different sides.
pub fn cut_value(g: &Graph, assignment: &Assignment) -> Result<usize> {
    if assignment.len() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            actual: assignment.len(),
        });
    }
    Ok(g.cut_of_bits(assignment.bits()))
}

/// Exhaustive Max-Cut over the `2^(n-1)` bipartitions with vertex 0 on side 0.
///
/// Ties resolve to the smallest basis index.
pub fn max_cut_brute_force(g: &Graph) -> Result<MaxCutSolution> {
    let n = g.n();
    if n > MAX_EXACT_VERTICES {
        return Err(Error::TooLarge {
            what: "max-cut instance",
            n,
            max: MAX_EXACT_VERTICES,
        });
    }
    let adj = g.adjacency_masks();
    let mut best = (0usize, 0u64);
    for half in 0..1u64 << (n - 1) {
        let bits = half << 1;
        // Every cut edge has exactly one endpoint on side 1.
        let mut cut = 0u32;
        let mut ones = bits;
        while ones != 0 {
            let v = ones.trailing_zeros() as usize;
            cut += (adj[v] & !bits).count_ones();
            ones &= ones - 1;
        }
        if cut as usize > best.0 {
            best = (cut as usize, bits);
        }
    }
    Ok(MaxCutSolution {
        optimum: best.0,
        witness: Assignment::new(n, best.1)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> Assignment {
        s.parse().unwrap()
    }

    #[test]
    fn k4_is_the_only_cubic_graph_on_four_vertices() {
        for seed in 0..20 {
            let g = gen_three_regular(4, seed).unwrap();
            assert_eq!(g.edges(), Graph::complete(4).unwrap().edges());
        }
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(
            gen_three_regular(8, 1).unwrap(),
            gen_three_regular(8, 1).unwrap()
        );
        assert_eq!(
            gen_erdos_renyi(8, 0.5, 3).unwrap(),
            gen_erdos_renyi(8, 0.5, 3).unwrap()
        );
        assert_ne!(
            gen_erdos_renyi(14, 0.5, 3).unwrap().edges(),
            gen_erdos_renyi(14, 0.5, 4).unwrap().edges()
        );
    }

    #[test]
    fn generator_argument_errors() {
        assert!(matches!(
            gen_three_regular(9, 0),
            Err(Error::InvalidVertexCount { .. })
        ));
        assert!(matches!(
            gen_three_regular(2, 0),
            Err(Error::InvalidVertexCount { .. })
        ));
        assert!(matches!(
            gen_erdos_renyi(8, 0.0, 0),
            Err(Error::InvalidProbability(_))
        ));
        assert!(matches!(
            gen_erdos_renyi(8, 1.5, 0),
            Err(Error::InvalidProbability(_))
        ));
        assert!(matches!(
            gen_erdos_renyi(8, f64::NAN, 0),
            Err(Error::InvalidProbability(_))
        ));
    }

    #[test]
    fn complete_er_graph() {
        let g = gen_erdos_renyi(14, 1.0, 7).unwrap();
        assert_eq!(g.edge_count(), 91);
    }

    #[test]
    fn sparse_er_never_returns_an_empty_graph() {
        for seed in 0..200 {
            assert!(gen_erdos_renyi(2, 0.05, seed).unwrap().edge_count() == 1);
        }
    }

    #[test]
    fn cut_value_examples() {
        let k3 = Graph::complete(3).unwrap();
        assert_eq!(cut_value(&k3, &a("001")).unwrap(), 2);
        assert_eq!(cut_value(&k3, &a("000")).unwrap(), 0);
        let c4 = Graph::cycle(4).unwrap();
        assert_eq!(cut_value(&c4, &a("0101")).unwrap(), 4);
        assert!(matches!(
            cut_value(&c4, &a("010")),
            Err(Error::LengthMismatch {
                expected: 4,
                actual: 3
            })
        ));
    }

    #[test]
    fn brute_force_small_cases() {
        assert_eq!(
            max_cut_brute_force(&Graph::complete(4).unwrap())
                .unwrap()
                .optimum,
            4
        );
        let edge = Graph::from_edges(2, [(0, 1)]).unwrap();
        let sol = max_cut_brute_force(&edge).unwrap();
        assert_eq!(sol.optimum, 1);
        assert_eq!(sol.witness.to_string(), "01");
        let big = Graph::from_edges(31, [(0, 30)]).unwrap();
        assert!(matches!(
            max_cut_brute_force(&big),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = gen_erdos_renyi(14, 1.0, 7).unwrap();
        let text = g.to_edge_list();
        assert!(text.starts_with("14 91 er 1.0 7\n"));
        assert_eq!(Graph::from_edge_list(&text).unwrap(), g);
        let r = gen_three_regular(10, 5).unwrap();
        assert_eq!(Graph::from_edge_list(&r.to_edge_list()).unwrap(), r);
    }

    #[test]
    fn edge_list_rejects_bad_input() {
        assert!(Graph::from_edge_list("").is_err());
        assert!(Graph::from_edge_list("3 2 custom - 0\n0 1\n").is_err());
        assert!(Graph::from_edge_list("3 1 custom - 0\n0 0\n").is_err());
        assert!(Graph::from_edge_list("3 2 custom - 0\n0 1\n1 0\n").is_err());
        assert!(Graph::from_edge_list("4 2 3reg - 0\n0 1\n2 3\n").is_err());
        assert!(Graph::from_edge_list("2 1 er 0.0 0\n0 1\n").is_err());
    }

    #[test]
    fn graph_rejects_invalid_edges() {
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
        assert!(Graph::from_edges(3, Vec::<(usize, usize)>::new()).is_err());
        assert!(Graph::from_edges(1, [(0, 0)]).is_err());
    }
}
