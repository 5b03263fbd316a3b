//! Finite multigraphs with half-edge incidence: parsing, vertex explosion,
//! and the connectivity invariants (lambda, epsilon, delta) of exploded graphs.
//!
//! A graph stores a sorted vertex-name table and an oriented edge list.
//! Edge `e` carries half-edges `2e` (source end) and `2e+1` (target end);
//! loops place both half-edges at the same vertex. Multi-edges are kept as
//! distinct edges. Explosion preserves edge ids, orientations and half-edge
//! ids, so repeated explosions compose on the nose.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("malformed graph document: {0}")]
    Malformed(String),
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("isolated vertex {0:?} (every vertex must meet an edge)")]
    IsolatedVertex(String),
    #[error("dangling endpoint {0:?} (edge endpoint is not a declared vertex)")]
    DanglingEndpoint(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("vertex {0:?} is not essential (degree < 3)")]
    NotEssential(String),
    #[error("not enough essential vertices: have {have}, need {need}")]
    NotEnoughEssential { have: usize, need: usize },
    #[error("subset enumeration would visit {subsets} sets, above the cap {cap}")]
    SubsetCapExceeded { subsets: u128, cap: u64 },
}

/// Default cap on the number of vertex subsets `best_invariants` will visit.
pub const DEFAULT_SUBSET_CAP: u64 = 1_000_000;

#[derive(Deserialize, Serialize)]
struct GraphDoc {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
}

/// Immutable multigraph. Vertices are indexed by their position in the sorted
/// name table; edges are index pairs `(source, target)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    edges: Vec<(usize, usize)>,
    incidence: Vec<Vec<u32>>,
}

impl Graph {
    /// Build from named parts. Vertex names are sorted; edge order and
    /// orientation are preserved exactly as given.
    pub fn from_named_edges(
        vertices: Vec<String>,
        edges: Vec<(String, String)>,
    ) -> Result<Graph, GraphError> {
        let mut names = vertices;
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateVertex(w[0].clone()));
        }
        let index: HashMap<&str, usize> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let mut idx_edges = Vec::with_capacity(edges.len());
        for (a, b) in &edges {
            let ia = *index
                .get(a.as_str())
                .ok_or_else(|| GraphError::DanglingEndpoint(a.clone()))?;
            let ib = *index
                .get(b.as_str())
                .ok_or_else(|| GraphError::DanglingEndpoint(b.clone()))?;
            idx_edges.push((ia, ib));
        }
        Self::from_parts(names, idx_edges)
    }

    /// Internal raw constructor: `names` must be sorted and unique, `edges`
    /// index into it. Edge order and orientation become the graph's identity.
    fn from_parts(names: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Graph, GraphError> {
        let mut incidence = vec![Vec::new(); names.len()];
        for (e, &(a, b)) in edges.iter().enumerate() {
            incidence[a].push(2 * e as u32);
            incidence[b].push(2 * e as u32 + 1);
        }
        for v in 0..names.len() {
            incidence[v].sort_unstable();
            if incidence[v].is_empty() {
                return Err(GraphError::IsolatedVertex(names[v].clone()));
            }
        }
        Ok(Graph {
            names,
            edges,
            incidence,
        })
    }

    /// Parse the JSON document format
    /// `{"vertices":["a",...],"edges":[["a","b"],...]}`. Repeated pairs are
    /// multi-edges; `["v","v"]` is a loop. Edges are canonically ordered by
    /// (smaller endpoint, larger endpoint, input position) and oriented from
    /// the lexicographically smaller endpoint.
    pub fn parse(document: &str) -> Result<Graph, GraphError> {
        let doc: GraphDoc =
            serde_json::from_str(document).map_err(|e| GraphError::Malformed(e.to_string()))?;
        let mut edges: Vec<(String, String)> = doc
            .edges
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        edges.sort(); // stable: ordinal among equal pairs is input order
        Self::from_named_edges(doc.vertices, edges)
    }

    /// The canonical JSON serialization: vertices sorted, edges sorted by
    /// (smaller endpoint, larger endpoint, ordinal). Suitable for hashing.
    pub fn canonical_json(&self) -> String {
        let mut edges: Vec<(String, String)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (&self.names[a], &self.names[b]);
                if x <= y {
                    (x.clone(), y.clone())
                } else {
                    (y.clone(), x.clone())
                }
            })
            .collect();
        edges.sort();
        let doc = GraphDoc {
            vertices: self.names.clone(),
            edges,
        };
        serde_json::to_string(&doc).expect("serializing a graph document cannot fail")
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize, GraphError> {
        self.names
            .binary_search_by(|n| n.as_str().cmp(name))
            .map_err(|_| GraphError::UnknownVertex(name.to_string()))
    }

    /// Endpoints of edge `e` as `(source, target)` vertex indices.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// The vertex holding half-edge `h`.
    pub fn vertex_of(&self, h: u32) -> usize {
        let (s, t) = self.edges[(h / 2) as usize];
        if h % 2 == 0 {
            s
        } else {
            t
        }
    }

    /// Half-edge ids at `v`, ascending.
    pub fn half_edges_at(&self, v: usize) -> &[u32] {
        &self.incidence[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v].len()
    }

    pub fn is_essential(&self, v: usize) -> bool {
        self.degree(v) >= 3
    }

    /// Essential vertices (degree ≥ 3), ascending by index.
    pub fn essential_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count())
            .filter(|&v| self.is_essential(v))
            .collect()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.vertex_count())
            .filter(|&v| self.degree(v) == 1)
            .collect()
    }

    /// Connected components as sorted vertex-index sets.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        let mut out = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![start];
            let mut members = Vec::new();
            comp[start] = id;
            while let Some(v) = stack.pop() {
                members.push(v);
                for &w in &adjacency[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// First Betti number of the graph as a 1-complex: E − V + #components.
    pub fn first_betti(&self) -> usize {
        self.edge_count() + self.components().len() - self.vertex_count()
    }

    /// Explode every vertex in `names`: remove it and cap each half-edge `h`
    /// formerly at it with a fresh leaf `"{vertex}#{h}"`. Edge ids, orientations
    /// and half-edge ids are preserved, so explosions compose literally.
    pub fn explode(&self, names: &BTreeSet<String>) -> Result<Graph, GraphError> {
        let mut doomed = vec![false; self.vertex_count()];
        for name in names {
            doomed[self.vertex_index(name)?] = true;
        }
        let mut new_names: Vec<String> = self
            .names
            .iter()
            .enumerate()
            .filter(|&(v, _)| !doomed[v])
            .map(|(_, n)| n.clone())
            .collect();
        let mut named_edges: Vec<(String, String)> = Vec::with_capacity(self.edges.len());
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            let src = if doomed[a] {
                let leaf = format!("{}#{}", self.names[a], 2 * e);
                new_names.push(leaf.clone());
                leaf
            } else {
                self.names[a].clone()
            };
            let dst = if doomed[b] {
                let leaf = format!("{}#{}", self.names[b], 2 * e + 1);
                new_names.push(leaf.clone());
                leaf
            } else {
                self.names[b].clone()
            };
            named_edges.push((src, dst));
        }
        Graph::from_named_edges(new_names, named_edges)
    }

    /// Explode `names` (which must all be essential) and classify the
    /// components of the result.
    pub fn component_invariants(
        &self,
        names: &BTreeSet<String>,
    ) -> Result<ExplosionInvariants, GraphError> {
        for name in names {
            let v = self.vertex_index(name)?;
            if !self.is_essential(v) {
                return Err(GraphError::NotEssential(name.clone()));
            }
        }
        let exploded = self.explode(names)?;
        Ok(exploded.classify_components())
    }

    /// Classify this graph's own components into those with and without an
    /// essential vertex.
    pub fn classify_components(&self) -> ExplosionInvariants {
        let mut lambda = 0;
        let mut epsilon = 0;
        for comp in self.components() {
            if comp.iter().any(|&v| self.is_essential(v)) {
                epsilon += 1;
            } else {
                lambda += 1;
            }
        }
        ExplosionInvariants {
            lambda,
            epsilon,
            delta: lambda + epsilon,
        }
    }

    /// All size-`i` sets of essential vertices with their explosion
    /// invariants. Errors if there are fewer than `i` essential vertices or
    /// the enumeration exceeds `cap` subsets.
    pub fn essential_subsets_with_invariants(
        &self,
        i: usize,
        cap: u64,
    ) -> Result<Vec<(Vec<String>, ExplosionInvariants)>, GraphError> {
        let essential = self.essential_vertices();
        if essential.len() < i {
            return Err(GraphError::NotEnoughEssential {
                have: essential.len(),
                need: i,
            });
        }
        let total = binomial_u128(essential.len(), i);
        if total > cap as u128 {
            return Err(GraphError::SubsetCapExceeded {
                subsets: total,
                cap,
            });
        }
        let mut out = Vec::with_capacity(total as usize);
        let mut choice: Vec<usize> = (0..i).collect();
        'emit: loop {
            let set: BTreeSet<String> = choice
                .iter()
                .map(|&j| self.names[essential[j]].clone())
                .collect();
            let inv = self.component_invariants(&set)?;
            out.push((set.into_iter().collect(), inv));
            // Lexicographic successor of the index combination.
            for pos in (0..i).rev() {
                if choice[pos] != essential.len() - i + pos {
                    choice[pos] += 1;
                    for q in pos + 1..i {
                        choice[q] = choice[q - 1] + 1;
                    }
                    continue 'emit;
                }
            }
            return Ok(out);
        }
    }

    /// Independent maxima of lambda, delta and epsilon over all essential
    /// sets of size `i`, with the achieving sets for lambda and delta.
    pub fn best_invariants(&self, i: usize, cap: u64) -> Result<BestInvariants, GraphError> {
        let all = self.essential_subsets_with_invariants(i, cap)?;
        let lambda = all.iter().map(|(_, inv)| inv.lambda).max().unwrap_or(0);
        let delta = all.iter().map(|(_, inv)| inv.delta).max().unwrap_or(0);
        let epsilon = all.iter().map(|(_, inv)| inv.epsilon).max().unwrap_or(0);
        let lambda_argmax = all
            .iter()
            .filter(|(_, inv)| inv.lambda == lambda)
            .cloned()
            .collect();
        let delta_argmax = all
            .iter()
            .filter(|(_, inv)| inv.delta == delta)
            .cloned()
            .collect();
        Ok(BestInvariants {
            size: i,
            lambda,
            delta,
            epsilon,
            lambda_argmax,
            delta_argmax,
        })
    }

    /// Structural report: components, circle components, essential vertices,
    /// leaves and degrees.
    pub fn classify(&self) -> StructuralReport {
        let components = self
            .components()
            .into_iter()
            .map(|members| {
                let is_circle = members.iter().all(|&v| self.degree(v) == 2);
                let has_essential = members.iter().any(|&v| self.is_essential(v));
                ComponentReport {
                    vertices: members.iter().map(|&v| self.names[v].clone()).collect(),
                    is_circle,
                    has_essential,
                }
            })
            .collect();
        StructuralReport {
            components,
            essential: self
                .essential_vertices()
                .into_iter()
                .map(|v| self.names[v].clone())
                .collect(),
            leaves: self
                .leaves()
                .into_iter()
                .map(|v| self.names[v].clone())
                .collect(),
            degrees: self
                .names
                .iter()
                .cloned()
                .zip((0..self.vertex_count()).map(|v| self.degree(v)))
                .collect(),
        }
    }

    /// Subdivide every edge into `segments` equal pieces by inserting
    /// `segments − 1` fresh bivalent vertices. Preserves the homeomorphism
    /// type. Fresh names are `"{src}~{dst}~e{edge}.{step}"`.
    pub fn subdivided(&self, segments: usize) -> Graph {
        assert!(segments >= 1, "need at least one segment per edge");
        let mut names = self.names.clone();
        let mut edges: Vec<(String, String)> = Vec::new();
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            let mut prev = self.names[a].clone();
            for step in 1..segments {
                let mid = format!("{}~{}~e{}.{}", self.names[a], self.names[b], e, step);
                names.push(mid.clone());
                edges.push((prev, mid.clone()));
                prev = mid;
            }
            edges.push((prev, self.names[b].clone()));
        }
        Graph::from_named_edges(names, edges)
            .expect("subdivision names collide with existing vertex ids")
    }
}

fn binomial_u128(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for j in 0..r {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
    }
    acc
}

/// Component counts of an exploded graph: `lambda` components without an
/// essential vertex, `epsilon` with one, `delta` their sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExplosionInvariants {
    pub lambda: usize,
    pub epsilon: usize,
    pub delta: usize,
}

/// Maxima over all essential subsets of one cardinality, with achieving sets.
#[derive(Clone, Debug, Serialize)]
pub struct BestInvariants {
    pub size: usize,
    pub lambda: usize,
    pub delta: usize,
    pub epsilon: usize,
    pub lambda_argmax: Vec<(Vec<String>, ExplosionInvariants)>,
    pub delta_argmax: Vec<(Vec<String>, ExplosionInvariants)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentReport {
    pub vertices: Vec<String>,
    pub is_circle: bool,
    pub has_essential: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructuralReport {
    pub components: Vec<ComponentReport>,
    pub essential: Vec<String>,
    pub leaves: Vec<String>,
    pub degrees: BTreeMap<String, usize>,
}
