//! A finite chain model for configurations of `k` labeled particles on a
//! graph.
//!
//! A degree-`i` basis element occupies `i` distinct vertices of degree at
//! least 2, each by one particle label together with a *direction index*
//! `d` selecting the `d`-th smallest half-edge at that vertex (so `d` runs
//! over `1..degree(v)-1` inclusive, pointing anywhere but the smallest
//! half-edge).  The remaining labels form words along the oriented edges,
//! read from source to target.
//!
//! The boundary releases an occupied vertex's particle onto the selected
//! half-edge's end of its edge, minus the release onto the smallest
//! half-edge, with a Koszul sign `(-1)^p` where `p` is the number of
//! occupied vertices preceding it in vertex order.  Occupied-vertex factors
//! are odd, edge words are even; since relabeling never reorders the vertex
//! factors, the symmetric group acts on labels without signs.  Stabilization
//! at a leaf inserts a fresh largest label at the leaf end of its unique
//! edge and commutes with the boundary.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::falling;
use crate::graph::Graph;
use crate::linalg::SparseMatrix;

/// Default ceiling on the total number of basis elements a complex may hold.
pub const DEFAULT_BASIS_CAP: u64 = 2_000_000;

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("predicted basis size {predicted} exceeds the cap of {cap} elements (per degree: {})",
            per_degree.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", "))]
    ResourceCap {
        predicted: BigUint,
        cap: u64,
        per_degree: Vec<BigUint>,
    },
    #[error("vertex `{0}` is not a leaf")]
    NotLeaf(String),
    #[error("weight {0} exceeds the supported label range (at most 255)")]
    WeightTooLarge(u64),
}

/// One basis element, stored as a canonical byte string:
/// `[occ_count] ([vertex_hi] [vertex_lo] [label] [direction])* ([word_len] [label]*)+`
/// with one length-prefixed word per edge, in edge order.  Byte equality is
/// element equality, which keeps index lookups and hashing cheap.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisElement(Box<[u8]>);

impl BasisElement {
    /// Assemble from occupied-vertex records `(vertex, label, direction)`
    /// (sorted by vertex) and one word per edge.
    pub fn from_parts(occupied: &[(u16, u8, u8)], words: &[Vec<u8>]) -> BasisElement {
        debug_assert!(occupied.windows(2).all(|w| w[0].0 < w[1].0));
        let total = 1 + 4 * occupied.len() + words.iter().map(|w| w.len() + 1).sum::<usize>();
        let mut buf = Vec::with_capacity(total);
        buf.push(occupied.len() as u8);
        for &(v, t, d) in occupied {
            buf.extend_from_slice(&v.to_be_bytes());
            buf.push(t);
            buf.push(d);
        }
        for w in words {
            buf.push(w.len() as u8);
            buf.extend_from_slice(w);
        }
        BasisElement(buf.into_boxed_slice())
    }

    /// Decode into occupied-vertex records and per-edge words.
    pub fn parts(&self) -> (Vec<(u16, u8, u8)>, Vec<Vec<u8>>) {
        let b = &self.0;
        let occ_count = b[0] as usize;
        let mut occupied = Vec::with_capacity(occ_count);
        let mut at = 1;
        for _ in 0..occ_count {
            let v = u16::from_be_bytes([b[at], b[at + 1]]);
            occupied.push((v, b[at + 2], b[at + 3]));
            at += 4;
        }
        let mut words = Vec::new();
        while at < b.len() {
            let len = b[at] as usize;
            at += 1;
            words.push(b[at..at + len].to_vec());
            at += len;
        }
        (occupied, words)
    }

    /// Number of occupied vertices.
    pub fn degree(&self) -> usize {
        self.0[0] as usize
    }

    /// Total number of particle labels carried.
    pub fn weight(&self) -> u64 {
        let occ = self.degree();
        let word_bytes = self.0.len() - 1 - 4 * occ;
        let (_, words) = self.parts();
        (occ + word_bytes - words.len()) as u64
    }

    /// Human-readable form with vertex names resolved against `g`, e.g.
    /// `(c:1#1 | [2] [] [])`: occupied entries `name:label#direction`, then
    /// one bracketed word per edge.
    pub fn display(&self, g: &Graph) -> String {
        let (occupied, words) = self.parts();
        let occ = if occupied.is_empty() {
            "-".to_string()
        } else {
            occupied
                .iter()
                .map(|&(v, t, d)| format!("{}:{}#{}", g.vertex_name(v as usize), t, d))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let ws = words
            .iter()
            .map(|w| {
                let inner = w
                    .iter()
                    .map(|t| t.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                format!("[{inner}]")
            })
            .collect::<Vec<_>>()
            .join(" ");
        format!("({occ} | {ws})")
    }
}

struct DegreeData {
    basis: Vec<BasisElement>,
    index: HashMap<BasisElement, u32>,
    /// Boundary into the next degree down; degree 0 holds a 0-row matrix.
    boundary: SparseMatrix<i64>,
}

/// The full chain complex of a graph at a fixed particle count, with one
/// enumerated basis and one sparse boundary matrix per degree.
pub struct ChainComplex {
    graph: Graph,
    k: u64,
    degrees: Vec<DegreeData>,
}

/// Predicted basis size per degree: with `m` labels left for words on `E`
/// edges there are `falling(m+E-1, m)` words, `falling(k, i)` ways to pick
/// ordered labels for `i` occupied vertices, and the elementary symmetric
/// polynomial in the values `degree(v) - 1` counts direction choices over
/// vertex subsets.
pub fn predict_dims(g: &Graph, k: u64) -> Vec<BigUint> {
    let eligible: Vec<usize> = (0..g.vertex_count())
        .filter(|&v| g.degree(v) >= 2)
        .collect();
    let max_degree = eligible.len().min(k as usize);
    // Coefficients of prod_v (1 + (degree(v)-1) x) over eligible vertices.
    let mut elem_sym: Vec<BigUint> = vec![BigUint::one()];
    for &v in &eligible {
        let w = BigUint::from(g.degree(v) as u64 - 1);
        elem_sym.push(BigUint::zero());
        for j in (1..elem_sym.len()).rev() {
            let add = &elem_sym[j - 1] * &w;
            elem_sym[j] += add;
        }
    }
    let edges = g.edge_count() as u64;
    (0..=max_degree)
        .map(|i| {
            let m = k - i as u64;
            let words = if edges == 0 {
                if m == 0 {
                    BigUint::one()
                } else {
                    BigUint::zero()
                }
            } else {
                falling(m + edges - 1, m)
            };
            &elem_sym[i] * falling(k, i as u64) * words
        })
        .collect()
}

/// Build the complex of `g` at weight `k`, refusing (with the predicted
/// sizes) if the total basis would exceed `cap` elements.
pub fn build_complex(g: &Graph, k: u64, cap: u64) -> Result<ChainComplex, ComplexError> {
    if k > 255 {
        return Err(ComplexError::WeightTooLarge(k));
    }
    assert!(
        g.vertex_count() <= u16::MAX as usize,
        "vertex table overflows u16 indices"
    );
    let per_degree = predict_dims(g, k);
    let predicted: BigUint = per_degree.iter().sum();
    if predicted > BigUint::from(cap) {
        return Err(ComplexError::ResourceCap {
            predicted,
            cap,
            per_degree,
        });
    }

    let eligible: Vec<usize> = (0..g.vertex_count())
        .filter(|&v| g.degree(v) >= 2)
        .collect();
    let max_degree = eligible.len().min(k as usize);
    let edges = g.edge_count();

    // Pass 1: enumerate every degree's basis in canonical order — occupied
    // set, then label assignment, then directions, then words (word tuples
    // ordered by length composition, then by the order of the underlying
    // label permutation).
    let mut bases: Vec<Vec<BasisElement>> = Vec::with_capacity(max_degree + 1);
    for i in 0..=max_degree {
        let mut basis =
            Vec::with_capacity(per_degree[i].to_usize().expect("capped size fits usize"));
        let compositions = compositions_of(k as u8 - i as u8, edges);
        for occ_set in combinations(&eligible, i) {
            for labels in label_injections(k as u8, i) {
                let occupied: Vec<(u16, u8, u8)> = occ_set
                    .iter()
                    .zip(&labels)
                    .map(|(&v, &t)| (v as u16, t, 1))
                    .collect();
                let mut rest: Vec<u8> = (1..=k as u8).filter(|t| !labels.contains(t)).collect();
                let arrangements = permutations_lex(&mut rest);
                for directions in direction_tuples(g, &occ_set) {
                    let mut occ = occupied.clone();
                    for (slot, d) in occ.iter_mut().zip(&directions) {
                        slot.2 = *d;
                    }
                    for comp in &compositions {
                        for arrangement in &arrangements {
                            let mut words: Vec<Vec<u8>> = Vec::with_capacity(edges);
                            let mut at = 0usize;
                            for &len in comp {
                                words.push(arrangement[at..at + len as usize].to_vec());
                                at += len as usize;
                            }
                            basis.push(BasisElement::from_parts(&occ, &words));
                        }
                    }
                }
            }
        }
        debug_assert_eq!(BigUint::from(basis.len() as u64), per_degree[i]);
        bases.push(basis);
    }

    // Pass 2: index lookups and boundary matrices.
    let indexes: Vec<HashMap<BasisElement, u32>> = bases
        .iter()
        .map(|basis| {
            let mut index = HashMap::with_capacity(basis.len());
            for (j, x) in basis.iter().enumerate() {
                index.insert(x.clone(), j as u32);
            }
            index
        })
        .collect();

    let mut boundaries = Vec::with_capacity(max_degree + 1);
    for (i, basis) in bases.iter().enumerate() {
        boundaries.push(if i == 0 {
            SparseMatrix::new(0, basis.len())
        } else {
            boundary_matrix(g, basis, &indexes[i - 1], bases[i - 1].len())
        });
    }

    let degrees = bases
        .into_iter()
        .zip(indexes)
        .zip(boundaries)
        .map(|((basis, index), boundary)| DegreeData {
            basis,
            index,
            boundary,
        })
        .collect();

    Ok(ChainComplex {
        graph: g.clone(),
        k,
        degrees,
    })
}

fn boundary_matrix(
    g: &Graph,
    basis: &[BasisElement],
    prev_index: &HashMap<BasisElement, u32>,
    prev_dim: usize,
) -> SparseMatrix<i64> {
    // The two release terms of one vertex can collide (a loop edge with an
    // empty word reaches the same word from both ends), so accumulate and
    // drop any entry that cancels to zero.
    let mut acc: HashMap<(u32, u32), i64> = HashMap::new();
    for (c, x) in basis.iter().enumerate() {
        let (occupied, words) = x.parts();
        for (pos, &(v, t, d)) in occupied.iter().enumerate() {
            let koszul: i64 = if pos % 2 == 0 { 1 } else { -1 };
            let halves = g.half_edges_at(v as usize);
            let mut rest = occupied.clone();
            rest.remove(pos);
            for (h, term_sign) in [(halves[d as usize], 1i64), (halves[0], -1i64)] {
                let e = (h / 2) as usize;
                let mut released = words.clone();
                if h % 2 == 0 {
                    released[e].insert(0, t);
                } else {
                    released[e].push(t);
                }
                let target = BasisElement::from_parts(&rest, &released);
                let row = *prev_index
                    .get(&target)
                    .expect("released element must be a basis element one degree down");
                *acc.entry((row, c as u32)).or_default() += koszul * term_sign;
            }
        }
    }
    let triples: Vec<(u32, u32, i64)> = acc
        .into_iter()
        .filter(|&(_, v)| v != 0)
        .map(|((r, c), v)| (r, c, v))
        .collect();
    SparseMatrix::from_triples(prev_dim, basis.len(), triples)
}

impl ChainComplex {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// The particle count this complex was built at.
    pub fn weight(&self) -> u64 {
        self.k
    }

    /// Largest degree with a (possibly empty) stored chain group.
    pub fn max_degree(&self) -> usize {
        self.degrees.len() - 1
    }

    /// Dimension of the degree-`i` chain group (0 beyond the stored range).
    pub fn dim(&self, i: usize) -> usize {
        self.degrees.get(i).map_or(0, |d| d.basis.len())
    }

    pub fn basis(&self, i: usize) -> &[BasisElement] {
        self.degrees.get(i).map_or(&[], |d| d.basis.as_slice())
    }

    pub fn index_of(&self, i: usize, x: &BasisElement) -> Option<u32> {
        self.degrees.get(i).and_then(|d| d.index.get(x).copied())
    }

    /// The boundary matrix out of degree `i` (columns) into degree `i-1`
    /// (rows); `None` beyond the stored range, where the map is zero.
    pub fn boundary(&self, i: usize) -> Option<&SparseMatrix<i64>> {
        self.degrees.get(i).map(|d| &d.boundary)
    }

    /// Check that consecutive boundaries compose to zero.
    pub fn verify_d_squared(&self) -> bool {
        for i in 2..self.degrees.len() {
            let inner = &self.degrees[i].boundary;
            let outer = &self.degrees[i - 1].boundary;
            let mut outer_cols: HashMap<u32, Vec<(u32, i64)>> = HashMap::new();
            for &(r, c, v) in outer.triples() {
                outer_cols.entry(c).or_default().push((r, v));
            }
            let mut acc: HashMap<(u32, u32), i64> = HashMap::new();
            for &(r, c, v) in inner.triples() {
                if let Some(next) = outer_cols.get(&r) {
                    for &(rr, vv) in next {
                        *acc.entry((rr, c)).or_default() += v * vv;
                    }
                }
            }
            if acc.values().any(|&v| v != 0) {
                return false;
            }
        }
        true
    }

    /// The (sign-free) permutation matrix of `perm` relabeling degree-`i`
    /// basis elements; `perm[t-1]` is the image of label `t`.
    pub fn action_matrix(&self, i: usize, perm: &[u8]) -> SparseMatrix<i64> {
        let n = self.dim(i);
        let mut triples = Vec::with_capacity(n);
        if let Some(data) = self.degrees.get(i) {
            for (c, x) in data.basis.iter().enumerate() {
                let image = act(perm, x);
                let r = data.index[&image];
                triples.push((r, c as u32, 1i64));
            }
        }
        SparseMatrix::from_triples(n, n, triples)
    }

    /// Triples of the degree-`i` boundary as CSV (`row,col,value` with a
    /// header), for inspection alongside [`ChainComplex::basis_manifest`].
    pub fn boundary_csv(&self, i: usize) -> String {
        let mut out = String::from("row,col,value\n");
        if let Some(m) = self.boundary(i) {
            for &(r, c, v) in m.triples() {
                let _ = writeln!(out, "{r},{c},{v}");
            }
        }
        out
    }

    /// Degree-`i` basis as CSV lines `index,element` using the readable
    /// element form.
    pub fn basis_manifest(&self, i: usize) -> String {
        let mut out = String::from("index,element\n");
        for (j, x) in self.basis(i).iter().enumerate() {
            let _ = writeln!(out, "{j},\"{}\"", x.display(&self.graph));
        }
        out
    }
}

/// Relabel every particle through `perm` (`perm[t-1]` is the image of label
/// `t`, a permutation of `1..=weight`).  Occupied-vertex factors keep their
/// vertex order, so no sign arises.
pub fn act(perm: &[u8], x: &BasisElement) -> BasisElement {
    debug_assert!({
        let mut seen = vec![false; perm.len()];
        perm.iter().all(|&t| {
            let ok = t >= 1 && (t as usize) <= perm.len() && !seen[(t - 1) as usize];
            if ok {
                seen[(t - 1) as usize] = true;
            }
            ok
        })
    });
    debug_assert_eq!(perm.len() as u64, x.weight());
    let (mut occupied, mut words) = x.parts();
    for slot in &mut occupied {
        slot.1 = perm[(slot.1 - 1) as usize];
    }
    for w in &mut words {
        for t in w.iter_mut() {
            *t = perm[(*t - 1) as usize];
        }
    }
    BasisElement::from_parts(&occupied, &words)
}

/// Insert a fresh largest label at the `leaf` end of the unique edge at
/// `leaf` (a vertex index of `g`), taking weight `k` to `k + 1` in the same
/// degree.
pub fn leaf_stabilize(
    g: &Graph,
    x: &BasisElement,
    leaf: usize,
) -> Result<BasisElement, ComplexError> {
    let halves = g.half_edges_at(leaf);
    if halves.len() != 1 {
        return Err(ComplexError::NotLeaf(g.vertex_name(leaf).to_string()));
    }
    let new_label = x.weight() + 1;
    if new_label > 255 {
        return Err(ComplexError::WeightTooLarge(new_label));
    }
    let h = halves[0];
    let e = (h / 2) as usize;
    let (occupied, mut words) = x.parts();
    if h % 2 == 0 {
        words[e].insert(0, new_label as u8);
    } else {
        words[e].push(new_label as u8);
    }
    Ok(BasisElement::from_parts(&occupied, &words))
}

/// Matrix of leaf stabilization from the degree-`i` chains of `from` into
/// the degree-`i` chains of `to` (the same graph one weight up).
pub fn stabilization_matrix(
    from: &ChainComplex,
    to: &ChainComplex,
    i: usize,
    leaf: usize,
) -> Result<SparseMatrix<i64>, ComplexError> {
    assert_eq!(from.graph(), to.graph(), "complexes must share a graph");
    assert_eq!(
        from.weight() + 1,
        to.weight(),
        "target must sit one weight up"
    );
    let mut triples = Vec::with_capacity(from.dim(i));
    for (c, x) in from.basis(i).iter().enumerate() {
        let image = leaf_stabilize(from.graph(), x, leaf)?;
        let r = to
            .index_of(i, &image)
            .expect("stabilized element must be a basis element at the next weight");
        triples.push((r, c as u32, 1i64));
    }
    Ok(SparseMatrix::from_triples(to.dim(i), from.dim(i), triples))
}

// ---------------------------------------------------------------------------
// Canonical enumeration helpers.

/// All `r`-subsets of `items` in lexicographic order.
fn combinations(items: &[usize], r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(
        items: &[usize],
        start: usize,
        r: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        let need = r - cur.len();
        for j in start..=items.len().saturating_sub(need) {
            cur.push(items[j]);
            rec(items, j + 1, r, cur, out);
            cur.pop();
        }
    }
    if r <= items.len() {
        rec(items, 0, r, &mut cur, &mut out);
    }
    out
}

/// All ordered `r`-tuples of distinct labels from `1..=k`, lexicographically.
fn label_injections(k: u8, r: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    let mut used = vec![false; k as usize + 1];
    fn rec(k: u8, r: usize, cur: &mut Vec<u8>, used: &mut Vec<bool>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for t in 1..=k {
            if !used[t as usize] {
                used[t as usize] = true;
                cur.push(t);
                rec(k, r, cur, used, out);
                cur.pop();
                used[t as usize] = false;
            }
        }
    }
    if r <= k as usize {
        rec(k, r, &mut cur, &mut used, &mut out);
    }
    out
}

/// Direction tuples for an occupied vertex set: the `j`-th entry ranges over
/// `1..=degree(v_j)-1`, in lexicographic order.
fn direction_tuples(g: &Graph, occ_set: &[usize]) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for &v in occ_set {
        let top = (g.degree(v) - 1) as u8;
        let mut next = Vec::with_capacity(out.len() * top as usize);
        for prefix in &out {
            for d in 1..=top {
                let mut t = prefix.clone();
                t.push(d);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Compositions of `total` into `parts` ordered summands, lexicographically.
fn compositions_of(total: u8, parts: usize) -> Vec<Vec<u8>> {
    if parts == 0 {
        return if total == 0 {
            vec![Vec::new()]
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(parts);
    fn rec(total: u8, parts: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if parts == 1 {
            cur.push(total);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in 0..=total {
            cur.push(first);
            rec(total - first, parts - 1, cur, out);
            cur.pop();
        }
    }
    rec(total, parts, &mut cur, &mut out);
    out
}

/// All permutations of `items` in lexicographic order (`items` is sorted in
/// place first).
fn permutations_lex(items: &mut [u8]) -> Vec<Vec<u8>> {
    items.sort_unstable();
    let mut out = vec![items.to_vec()];
    while next_permutation(items) {
        out.push(items.to_vec());
    }
    out
}

fn next_permutation(a: &mut [u8]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}
